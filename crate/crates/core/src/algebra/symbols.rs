use std::collections::BTreeMap;
use std::sync::Arc;

/// Ordered table of parameter symbols.
///
/// The position of a symbol is its canonical rank: system parameters come in
/// first-declaration order, then `lambda`, then `epsilon`, then auto-generated
/// kernel unknowns `v0k1` and perturbation unknowns `g1_jk`/`g2_jk`, in the
/// order the pipelines introduce them. Tables only ever grow by appending, so
/// exponent vectors of existing polynomials stay valid under an extended table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    names: Vec<String>,
    index: BTreeMap<String, usize>,
}

impl SymbolTable {
    pub fn empty() -> Arc<SymbolTable> {
        Arc::new(SymbolTable {
            names: Vec::new(),
            index: BTreeMap::new(),
        })
    }

    /// Builds a table from names in canonical order. Panics on duplicates;
    /// callers validate user input before reaching here.
    pub fn new<S: AsRef<str>>(names: &[S]) -> Arc<SymbolTable> {
        let mut t = SymbolTable {
            names: Vec::new(),
            index: BTreeMap::new(),
        };
        for n in names {
            let n = n.as_ref();
            assert!(
                t.index.insert(n.to_string(), t.names.len()).is_none(),
                "duplicate symbol {n}"
            );
            t.names.push(n.to_string());
        }
        Arc::new(t)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    /// Returns a table extended with `name` appended, or the same table if the
    /// symbol is already present.
    pub fn with_symbol(table: &Arc<SymbolTable>, name: &str) -> Arc<SymbolTable> {
        if table.contains(name) {
            return Arc::clone(table);
        }
        let mut t = (**table).clone();
        t.index.insert(name.to_string(), t.names.len());
        t.names.push(name.to_string());
        Arc::new(t)
    }

    /// True when `self` is a prefix of `other` (so exponent vectors written
    /// against `self` are already aligned with `other`).
    pub fn is_prefix_of(&self, other: &SymbolTable) -> bool {
        self.names.len() <= other.names.len() && other.names[..self.names.len()] == self.names[..]
    }

    /// Union of two tables: left order first, then the right table's new
    /// symbols in their own order. Returns the merged table together with the
    /// index remapping for the right table (left never needs remapping because
    /// it is a prefix of the result).
    pub fn merge(a: &Arc<SymbolTable>, b: &Arc<SymbolTable>) -> (Arc<SymbolTable>, Vec<usize>) {
        if b.is_prefix_of(a) {
            return (Arc::clone(a), (0..b.len()).collect());
        }
        let mut t = (**a).clone();
        let mut map = Vec::with_capacity(b.len());
        for n in &b.names {
            let idx = match t.index.get(n) {
                Some(&i) => i,
                None => {
                    t.index.insert(n.clone(), t.names.len());
                    t.names.push(n.clone());
                    t.names.len() - 1
                }
            };
            map.push(idx);
        }
        (Arc::new(t), map)
    }
}
