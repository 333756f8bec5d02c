//! Prints the lookahead claim reports and the unsoundness search as JSON.

use piupto::lookahead::{check_appendix_claims, search_unsoundness, AppendixLimits, OpKind, SearchParams};

fn main() {
    let limits = AppendixLimits::default();
    for op in OpKind::ALL {
        let t = std::time::Instant::now();
        for r in check_appendix_claims(op, &limits) {
            println!("{}", serde_json::to_string(&r).unwrap());
        }
        eprintln!("{} {:?}", op.name(), t.elapsed());
    }
    let t = std::time::Instant::now();
    println!("{}", serde_json::to_string_pretty(&search_unsoundness(&SearchParams::default())).unwrap());
    println!("{}", serde_json::to_string(&search_unsoundness(&SearchParams::default().without_op())).unwrap());
    eprintln!("search {:?}", t.elapsed());
}
