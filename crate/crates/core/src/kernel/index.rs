use std::cmp::Ordering;
use std::fmt;

/// Symmetric multi-index `I = i1 i2 ... ik` of base directions.
///
/// Entries are kept sorted, so `Ij == jI` holds structurally.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(Vec<u8>);

impl MultiIndex {
    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn from_entries<I: IntoIterator<Item = u8>>(entries: I) -> Self {
        let mut v: Vec<u8> = entries.into_iter().collect();
        v.sort_unstable();
        MultiIndex(v)
    }

    pub fn order(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[u8] {
        &self.0
    }

    pub fn with(&self, dir: u8) -> Self {
        let mut v = self.0.clone();
        let pos = v.partition_point(|&e| e <= dir);
        v.insert(pos, dir);
        MultiIndex(v)
    }

    /// Removes one occurrence of `dir`, if present.
    pub fn without(&self, dir: u8) -> Option<Self> {
        let pos = self.0.iter().position(|&e| e == dir)?;
        let mut v = self.0.clone();
        v.remove(pos);
        Some(MultiIndex(v))
    }

    pub fn count(&self, dir: u8) -> usize {
        self.0.iter().filter(|&&e| e == dir).count()
    }

    pub fn concat(&self, other: &MultiIndex) -> Self {
        MultiIndex::from_entries(self.0.iter().chain(other.0.iter()).copied())
    }

    /// Splits into the entries inside `dirs` and the rest.
    pub fn split(&self, dirs: &[u8]) -> (MultiIndex, MultiIndex) {
        let (a, b): (Vec<u8>, Vec<u8>) = self.0.iter().partition(|e| dirs.contains(e));
        (MultiIndex(a), MultiIndex(b))
    }

    /// All multi-indices of exactly `order` over the given directions.
    pub fn all_of_order(dirs: &[u8], order: usize) -> Vec<MultiIndex> {
        fn rec(dirs: &[u8], start: usize, left: usize, cur: &mut Vec<u8>, out: &mut Vec<MultiIndex>) {
            if left == 0 {
                out.push(MultiIndex::from_entries(cur.iter().copied()));
                return;
            }
            for k in start..dirs.len() {
                cur.push(dirs[k]);
                rec(dirs, k, left - 1, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(dirs, 0, order, &mut Vec::new(), &mut out);
        out
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, e) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}
