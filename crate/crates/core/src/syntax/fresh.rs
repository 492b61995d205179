use std::collections::BTreeSet;

use super::formula::Formula;
use super::term::{Name, Term};

/// Prefix reserved for generated variables, symbols and labels.
pub const RESERVED_PREFIX: &str = "_";

/// Supplies names that avoid everything registered with it.
#[derive(Clone, Debug, Default)]
pub struct NameSupply {
    used: BTreeSet<Name>,
    counter: usize,
}

impl NameSupply {
    pub fn new() -> NameSupply {
        NameSupply::default()
    }

    pub fn avoid(&mut self, name: &str) {
        self.used.insert(name.into());
    }

    pub fn avoid_formula(&mut self, a: &Formula) {
        a.collect_names(&mut self.used);
    }

    pub fn avoid_term(&mut self, t: &Term) {
        t.collect_names(&mut self.used);
    }

    pub fn is_used(&self, name: &str) -> bool {
        self.used.contains(name)
    }

    /// `_<hint><n>` for the next unused counter value.
    pub fn fresh(&mut self, hint: &str) -> Name {
        loop {
            self.counter += 1;
            let candidate = format!("{RESERVED_PREFIX}{hint}{}", self.counter);
            if !self.used.contains(candidate.as_str()) {
                let n: Name = candidate.into();
                self.used.insert(n.clone());
                return n;
            }
        }
    }

    /// `preferred` itself when unused, otherwise a fresh variant.
    pub fn prefer(&mut self, preferred: &str) -> Name {
        if self.used.contains(preferred) {
            self.fresh(preferred)
        } else {
            let n: Name = preferred.into();
            self.used.insert(n.clone());
            n
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_names_skip_used() {
        let mut s = NameSupply::new();
        s.avoid("_y1");
        assert_eq!(&*s.fresh("y"), "_y2");
        assert_eq!(&*s.prefer("x"), "x");
        assert_eq!(&*s.prefer("x"), "_x3");
    }
}
