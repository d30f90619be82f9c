//! Process-wide symbol interning.
//!
//! Predicates, functors, constants and variable names are all interned into
//! [`Symbol`]s so that equality and hashing are a single integer compare. The
//! prover's join loop compares symbols constantly, so this matters.

use std::collections::HashMap;
use std::fmt;
use std::sync::{OnceLock, RwLock};

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Symbol(u32);

struct Interner {
    names: Vec<&'static str>,
    ids: HashMap<&'static str, u32>,
}

fn interner() -> &'static RwLock<Interner> {
    static INTERNER: OnceLock<RwLock<Interner>> = OnceLock::new();
    INTERNER.get_or_init(|| {
        RwLock::new(Interner {
            names: Vec::new(),
            ids: HashMap::new(),
        })
    })
}

impl Symbol {
    pub fn intern(name: &str) -> Symbol {
        if let Some(&id) = interner().read().unwrap().ids.get(name) {
            return Symbol(id);
        }
        let mut table = interner().write().unwrap();
        if let Some(&id) = table.ids.get(name) {
            return Symbol(id);
        }
        // Symbols live for the whole process; the vocabulary is bounded by the
        // loaded knowledge.
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = table.names.len() as u32;
        table.names.push(leaked);
        table.ids.insert(leaked, id);
        Symbol(id)
    }

    pub fn as_str(self) -> &'static str {
        interner().read().unwrap().names[self.0 as usize]
    }
}

impl From<&str> for Symbol {
    fn from(name: &str) -> Self {
        Symbol::intern(name)
    }
}

// Ordering is lexicographic on the name so that sorted output does not depend
// on interning order.
impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        if self.0 == other.0 {
            std::cmp::Ordering::Equal
        } else {
            self.as_str().cmp(other.as_str())
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interning_is_stable() {
        let a = Symbol::intern("berlin");
        let b = Symbol::intern("berlin");
        assert_eq!(a, b);
        assert_eq!(a.as_str(), "berlin");
        assert_ne!(a, Symbol::intern("bonn"));
    }

    #[test]
    fn order_follows_names() {
        let z = Symbol::intern("zz_sym_order");
        let a = Symbol::intern("aa_sym_order");
        assert!(a < z);
    }
}
