use std::collections::BTreeSet;

use super::source::SrcType;

/// Prefix reserved for unification variables; the concrete syntax cannot produce it.
pub const META_PREFIX: char = '?';

pub fn is_meta(name: &str) -> bool {
    name.starts_with(META_PREFIX)
}

/// First of `base`, `base1`, `base2`, ... (trailing digits of `base` dropped) not in `avoid`.
pub fn fresh_variant(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    let root = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let root = if root.is_empty() { "x" } else { root };
    (1..)
        .map(|n| format!("{root}{n}"))
        .find(|cand| !avoid.contains(cand))
        .expect("unbounded")
}

/// Deterministic fresh-name supply. Every name it hands out, and every name
/// reserved through it, is never handed out again.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: BTreeSet<String>,
    next_meta: usize,
}

impl NameSupply {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn avoiding(names: impl IntoIterator<Item = String>) -> Self {
        NameSupply {
            used: names.into_iter().collect(),
            next_meta: 0,
        }
    }

    pub fn reserve(&mut self, name: impl Into<String>) {
        self.used.insert(name.into());
    }

    pub fn is_used(&self, name: &str) -> bool {
        self.used.contains(name)
    }

    pub fn used(&self) -> &BTreeSet<String> {
        &self.used
    }

    /// `base1`, `base2`, ... skipping anything already used.
    pub fn fresh(&mut self, base: &str) -> String {
        let name = (1..)
            .map(|n| format!("{base}{n}"))
            .find(|cand| !self.used.contains(cand))
            .expect("unbounded");
        self.used.insert(name.clone());
        name
    }

    /// `base` itself when unused, otherwise a numbered variant.
    pub fn fresh_like(&mut self, base: &str) -> String {
        let name = fresh_variant(base, &self.used);
        self.used.insert(name.clone());
        name
    }

    pub fn fresh_meta(&mut self) -> SrcType {
        self.next_meta += 1;
        SrcType::Var(format!("{META_PREFIX}{}", self.next_meta))
    }
}

/// `a, b, ..., z, a1, b1, ...` skipping names in `avoid`.
pub fn pretty_tyvar_names(avoid: &BTreeSet<String>) -> impl Iterator<Item = String> + '_ {
    (0..)
        .map(|i: usize| {
            let letter = (b'a' + (i % 26) as u8) as char;
            match i / 26 {
                0 => letter.to_string(),
                n => format!("{letter}{n}"),
            }
        })
        .filter(move |n| !avoid.contains(n) && !crate::surface::is_keyword(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_variant_strips_digits() {
        let avoid = BTreeSet::from(["d1".to_string(), "d2".to_string()]);
        assert_eq!(fresh_variant("d1", &avoid), "d3");
        assert_eq!(fresh_variant("x", &avoid), "x");
    }

    #[test]
    fn supply_never_repeats() {
        let mut s = NameSupply::avoiding(["d1".to_string()]);
        let a = s.fresh("d");
        let b = s.fresh("d");
        assert_eq!(a, "d2");
        assert_eq!(b, "d3");
        assert!(is_meta(s.fresh_meta().as_var().unwrap()));
    }

    #[test]
    fn pretty_names_skip_taken() {
        let avoid = BTreeSet::from(["a".to_string()]);
        let names: Vec<_> = pretty_tyvar_names(&avoid).take(2).collect();
        assert_eq!(names, vec!["b", "c"]);
    }
}
