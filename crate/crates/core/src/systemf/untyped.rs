use std::collections::BTreeSet;
use std::fmt;

use crate::syntax::TargetTerm;

/// Untyped λ-terms with de Bruijn indices for bound variables and names for
/// free ones. Binder names are kept only as printing hints and are ignored by
/// equality, so `==` is α-equivalence.
#[derive(Clone, Debug, Eq)]
pub enum Untyped {
    Bound(usize),
    Free(String),
    Lam(String, Box<Untyped>),
    App(Box<Untyped>, Box<Untyped>),
}

impl PartialEq for Untyped {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Untyped::Bound(i), Untyped::Bound(j)) => i == j,
            (Untyped::Free(x), Untyped::Free(y)) => x == y,
            (Untyped::Lam(_, a), Untyped::Lam(_, b)) => a == b,
            (Untyped::App(f1, a1), Untyped::App(f2, a2)) => f1 == f2 && a1 == a2,
            _ => false,
        }
    }
}

impl Untyped {
    pub fn lam(hint: impl Into<String>, body: Untyped) -> Self {
        Untyped::Lam(hint.into(), Box::new(body))
    }

    pub fn app(f: Untyped, a: Untyped) -> Self {
        Untyped::App(Box::new(f), Box::new(a))
    }

    pub fn free(name: impl Into<String>) -> Self {
        Untyped::Free(name.into())
    }

    pub fn size(&self) -> usize {
        match self {
            Untyped::Bound(_) | Untyped::Free(_) => 1,
            Untyped::Lam(_, b) => 1 + b.size(),
            Untyped::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<String>) {
        match self {
            Untyped::Bound(_) => {}
            Untyped::Free(x) => {
                out.insert(x.clone());
            }
            Untyped::Lam(_, b) => b.collect_free(out),
            Untyped::App(f, a) => {
                f.collect_free(out);
                a.collect_free(out);
            }
        }
    }

    /// Does bound index `k` (relative to this node) occur?
    pub(crate) fn has_bound(&self, k: usize) -> bool {
        match self {
            Untyped::Bound(i) => *i == k,
            Untyped::Free(_) => false,
            Untyped::Lam(_, b) => b.has_bound(k + 1),
            Untyped::App(f, a) => f.has_bound(k) || a.has_bound(k),
        }
    }

    /// Add `d` to every index `>= cutoff`. `d` may be negative.
    pub(crate) fn shift(&self, d: isize, cutoff: usize) -> Untyped {
        match self {
            Untyped::Bound(i) if *i >= cutoff => Untyped::Bound((*i as isize + d) as usize),
            Untyped::Bound(_) | Untyped::Free(_) => self.clone(),
            Untyped::Lam(h, b) => Untyped::Lam(h.clone(), Box::new(b.shift(d, cutoff + 1))),
            Untyped::App(f, a) => Untyped::app(f.shift(d, cutoff), a.shift(d, cutoff)),
        }
    }

    /// `[k ↦ s]self` where `s` is valid at depth `k`... with indices above `k`
    /// decremented, i.e. the body half of a β-step when called with `k = 0`.
    pub(crate) fn instantiate(&self, s: &Untyped, k: usize) -> Untyped {
        match self {
            Untyped::Bound(i) if *i == k => s.shift(k as isize, 0),
            Untyped::Bound(i) if *i > k => Untyped::Bound(i - 1),
            Untyped::Bound(_) | Untyped::Free(_) => self.clone(),
            Untyped::Lam(h, b) => Untyped::Lam(h.clone(), Box::new(b.instantiate(s, k + 1))),
            Untyped::App(f, a) => Untyped::app(f.instantiate(s, k), a.instantiate(s, k)),
        }
    }
}

/// Drop type abstractions, type applications and binder annotations.
pub fn erase(t: &TargetTerm) -> Untyped {
    fn go(t: &TargetTerm, scope: &mut Vec<String>) -> Untyped {
        match t {
            TargetTerm::Var(x) => match scope.iter().rev().position(|y| y == x) {
                Some(i) => Untyped::Bound(i),
                None => Untyped::Free(x.clone()),
            },
            TargetTerm::Lam(x, _, b) => {
                scope.push(x.clone());
                let body = go(b, scope);
                scope.pop();
                Untyped::lam(x.clone(), body)
            }
            TargetTerm::App(f, a) => Untyped::app(go(f, scope), go(a, scope)),
            TargetTerm::TyLam(_, b) | TargetTerm::TyApp(b, _) => go(b, scope),
        }
    }
    go(t, &mut Vec::new())
}

impl fmt::Display for Untyped {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Untyped, names: &mut Vec<String>, avoid: &BTreeSet<String>, prec: u8, out: &mut String) {
            match t {
                Untyped::Bound(i) => out.push_str(&names[names.len() - 1 - i]),
                Untyped::Free(x) => out.push_str(x),
                Untyped::Lam(..) => {
                    if prec > 0 {
                        out.push('(');
                    }
                    out.push('\\');
                    let mut cur = t;
                    let mut pushed = 0;
                    while let Untyped::Lam(h, b) = cur {
                        let mut taken: BTreeSet<String> = avoid.clone();
                        taken.extend(names.iter().cloned());
                        let name = crate::syntax::fresh_variant(h, &taken);
                        if pushed > 0 {
                            out.push(' ');
                        }
                        out.push_str(&name);
                        names.push(name);
                        pushed += 1;
                        cur = b;
                    }
                    out.push_str(". ");
                    go(cur, names, avoid, 0, out);
                    names.truncate(names.len() - pushed);
                    if prec > 0 {
                        out.push(')');
                    }
                }
                Untyped::App(g, a) => {
                    if prec > 1 {
                        out.push('(');
                    }
                    go(g, names, avoid, 1, out);
                    out.push(' ');
                    go(a, names, avoid, 2, out);
                    if prec > 1 {
                        out.push(')');
                    }
                }
            }
        }
        let avoid = self.free_vars();
        let mut out = String::new();
        go(self, &mut Vec::new(), &avoid, 0, &mut out);
        f.write_str(&out)
    }
}
