//! Bucket-brigade QRAM: router tree, clock-cycle schedules and a dense
//! state-vector simulation of queries for small trees.

mod schedule;
mod sim;

pub use schedule::{schedule_initialization, schedule_query, total_time, Cycle, CycleOp, Schedule};
pub use sim::{
    simulate_query, simulate_query_with, verify_retrieval, QueryResult, RetrievalReport,
    RetrievalRow,
};

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complete binary tree of routers with N = 2ⁿ leaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouterTree {
    depth: usize,
}

/// Tree with `n_leaves` leaves; `n_leaves` must be a power of two ≥ 2.
pub fn build_tree(n_leaves: usize) -> Result<RouterTree> {
    if n_leaves < 2 || !n_leaves.is_power_of_two() {
        return Err(Error::InvalidTree(format!(
            "N = {n_leaves} is not a power of two >= 2"
        )));
    }
    RouterTree::with_depth(n_leaves.trailing_zeros() as usize)
}

impl RouterTree {
    pub fn with_depth(depth: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidTree("empty tree".into()));
        }
        if depth >= usize::BITS as usize - 1 {
            return Err(Error::InvalidTree(format!("depth {depth} too large")));
        }
        Ok(RouterTree { depth })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn n_leaves(&self) -> usize {
        1 << self.depth
    }

    pub fn n_routers(&self) -> usize {
        (1 << self.depth) - 1
    }

    /// Heap index of the router at (`level`, `position`).
    pub fn index(&self, level: usize, position: usize) -> usize {
        assert!(level < self.depth && position < (1 << level));
        (1 << level) - 1 + position
    }

    /// (level, position) of a heap index.
    pub fn node(&self, index: usize) -> (usize, usize) {
        assert!(index < self.n_routers());
        let level = (index + 1).ilog2() as usize;
        (level, index + 1 - (1 << level))
    }

    /// Left and right children, or `None` at the last level.
    pub fn children(&self, level: usize, position: usize) -> Option<[(usize, usize); 2]> {
        (level + 1 < self.depth).then(|| [(level + 1, 2 * position), (level + 1, 2 * position + 1)])
    }
}

/// Mode assignment of the simulated register.
///
/// Address qubits come first (a₁ is mode 0), then the routers in heap order,
/// then 2ⁿ⁻¹ bus slots; slot 0 is the bus that enters at the root. The bus is
/// routed through the first n − 1 router levels into one slot per last-level
/// router.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct QramLayout {
    pub tree: RouterTree,
}

impl QramLayout {
    pub fn new(depth: usize) -> Result<Self> {
        Ok(QramLayout {
            tree: RouterTree::with_depth(depth)?,
        })
    }

    pub fn depth(&self) -> usize {
        self.tree.depth()
    }

    pub fn address(&self, k: usize) -> usize {
        assert!(k < self.depth());
        k
    }

    pub fn router(&self, level: usize, position: usize) -> usize {
        self.depth() + self.tree.index(level, position)
    }

    pub fn n_slots(&self) -> usize {
        1 << (self.depth() - 1)
    }

    pub fn slot(&self, i: usize) -> usize {
        assert!(i < self.n_slots());
        self.depth() + self.tree.n_routers() + i
    }

    pub fn bus(&self) -> usize {
        self.slot(0)
    }

    pub fn n_modes(&self) -> usize {
        self.depth() + self.tree.n_routers() + self.n_slots()
    }
}

/// Classical bits D₀…D_{N−1}.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalDatabase {
    bits: Vec<bool>,
}

impl ClassicalDatabase {
    pub fn new(bits: Vec<bool>) -> Result<Self> {
        build_tree(bits.len())?;
        Ok(ClassicalDatabase { bits })
    }

    pub fn from_bitstring(text: &str) -> Result<Self> {
        let bits = text
            .chars()
            .filter(|ch| !ch.is_whitespace())
            .map(|ch| match ch {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::Config(format!("database contains '{other}'"))),
            })
            .collect::<Result<Vec<bool>>>()?;
        Self::new(bits)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|_| Error::ConfigNotFound(path.display().to_string()))?;
        Self::from_bitstring(&text)
    }

    /// Uniform random bits from a seeded generator.
    pub fn random(n_leaves: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::new((0..n_leaves).map(|_| rng.gen()).collect())
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.bits.len().trailing_zeros() as usize
    }

    pub fn get(&self, x: usize) -> bool {
        self.bits[x]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn to_bitstring(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

/// Reference retrieval: walk the routers from the root, turning right on
/// each address bit 1 (a₁ first), and read the leaf reached.
pub fn classical_trace(db: &ClassicalDatabase, x: usize) -> bool {
    let n = db.depth();
    let mut position = 0;
    for level in 0..n {
        let bit = (x >> (n - 1 - level)) & 1;
        position = 2 * position + bit;
    }
    db.get(position)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_examples() {
        assert_eq!(build_tree(2).unwrap().n_routers(), 1);
        let t = build_tree(8).unwrap();
        assert_eq!((t.n_routers(), t.depth()), (7, 3));
        assert!(build_tree(6).is_err());
        assert!(build_tree(1).is_err());
        assert_eq!(
            RouterTree::with_depth(0).unwrap_err().to_string(),
            "empty tree"
        );
    }

    #[test]
    fn tree_structure() {
        let t = build_tree(16).unwrap();
        let mut non_leaf = 0;
        for i in 0..t.n_routers() {
            let (l, p) = t.node(i);
            assert_eq!(t.index(l, p), i);
            if let Some(ch) = t.children(l, p) {
                non_leaf += 1;
                assert_eq!(ch.len(), 2);
            }
        }
        assert_eq!(non_leaf, 7);
    }

    #[test]
    fn layout_counts() {
        let l = QramLayout::new(3).unwrap();
        assert_eq!(l.n_modes(), 14);
        assert_eq!(l.router(0, 0), 3);
        assert_eq!(l.bus(), 10);
        assert_eq!(QramLayout::new(1).unwrap().n_modes(), 3);
    }

    #[test]
    fn database_parsing() {
        let db = ClassicalDatabase::from_bitstring("0110\n").unwrap();
        assert_eq!(db.bits(), &[false, true, true, false]);
        assert_eq!(db.to_bitstring(), "0110");
        assert!(ClassicalDatabase::from_bitstring("011").is_err());
        assert!(ClassicalDatabase::from_bitstring("01x0").is_err());
        let a = ClassicalDatabase::random(8, 42).unwrap();
        assert_eq!(a, ClassicalDatabase::random(8, 42).unwrap());
    }

    #[test]
    fn trace_reads_address_directly() {
        let db = ClassicalDatabase::from_bitstring("01101001").unwrap();
        for x in 0..8 {
            assert_eq!(classical_trace(&db, x), db.get(x));
        }
    }
}
