use std::collections::BTreeSet;

use super::{Name, Process};

#[derive(Clone, Copy, Debug, Default)]
pub struct PrintOptions {
    /// Print `a(z).P` with unused `z` as `a.P`, `a<a>.P` as `a^.P`, and drop
    /// trailing `.0`.
    pub ccs_sugar: bool,
}

pub fn print(p: &Process) -> String {
    print_with(p, PrintOptions::default())
}

pub fn print_with(p: &Process, opts: PrintOptions) -> String {
    let free: BTreeSet<String> = p.free_names().iter().map(|n| n.to_string()).collect();
    let mut prefix = String::from("x");
    while free.iter().any(|f| {
        f.strip_prefix(prefix.as_str()).is_some_and(|rest| !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit()))
    }) {
        prefix.insert(0, '_');
    }
    let mut out = String::new();
    Printer { opts, prefix }.go(p, 0, &mut out);
    out
}

struct Printer {
    opts: PrintOptions,
    prefix: String,
}

impl Printer {
    fn name(&self, n: &Name) -> String {
        match n {
            Name::Free(s) => s.to_string(),
            Name::Bound(i) => format!("{}{}", self.prefix, i),
        }
    }

    fn cont(&self, p: &Process, out: &mut String) {
        if self.opts.ccs_sugar && *p == Process::Nil {
            return;
        }
        out.push('.');
        self.go(p, 2, out);
    }

    fn go(&self, p: &Process, level: u8, out: &mut String) {
        match p {
            Process::Nil => out.push('0'),
            Process::Par(l, r) => {
                let paren = level > 0;
                if paren {
                    out.push('(');
                }
                self.go(l, 0, out);
                out.push_str(" | ");
                self.go(r, 1, out);
                if paren {
                    out.push(')');
                }
            }
            Process::Sum(l, r) => {
                let paren = level > 1;
                if paren {
                    out.push('(');
                }
                self.go(l, 1, out);
                out.push_str(" + ");
                self.go(r, 2, out);
                if paren {
                    out.push(')');
                }
            }
            Process::Tau(q) => {
                out.push_str("tau");
                self.cont(q, out);
            }
            Process::Out(a, b, q) => {
                if self.opts.ccs_sugar && a == b {
                    out.push_str(&self.name(a));
                    out.push('^');
                } else {
                    out.push_str(&format!("{}<{}>", self.name(a), self.name(b)));
                }
                self.cont(q, out);
            }
            Process::In(a, x, q) => {
                if self.opts.ccs_sugar && !q.has_free(x) {
                    out.push_str(&self.name(a));
                } else {
                    out.push_str(&format!("{}({})", self.name(a), self.name(x)));
                }
                self.cont(q, out);
            }
            Process::Res(x, q) => {
                out.push_str(&format!("(^{})", self.name(x)));
                self.go(q, 2, out);
            }
            Process::Rep(q) => {
                out.push('!');
                self.go(q, 2, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn prints_canonical_terms() {
        let p = parse("a(x).x<b>.0 | new c. c<c>.0").unwrap();
        assert_eq!(print(&p), "a(x0).x0<b>.0 | (^x1)x1<x1>.0");
    }

    #[test]
    fn sugar_round_trip() {
        let p = parse("a.c^ | c^").unwrap();
        let s = print_with(&p, PrintOptions { ccs_sugar: true });
        assert_eq!(s, "a.c^ | c^");
        assert_eq!(parse(&s).unwrap(), p);
    }

    #[test]
    fn avoids_clashing_binder_prefix() {
        let p = parse("a(y).x0<y>.0").unwrap();
        let s = print(&p);
        assert_eq!(parse(&s).unwrap(), p, "{s}");
    }

    #[test]
    fn nesting_is_preserved() {
        for src in ["a<b> | (c<d> | e<f>)", "(tau + a<b>) + c<c>", "tau + (a<b> + c<c>)", "!(tau.0 + tau.0)"] {
            let p = parse(src).unwrap();
            assert_eq!(parse(&print(&p)).unwrap(), p, "{src}");
        }
    }
}
