//! Finitely supported graded modules: free modules of known rank per degree.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

/// Cohomological degree; differentials raise it by one.
pub type Degree = i32;

/// Ranks per degree with finite support; zero ranks are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedModule {
    ranks: BTreeMap<Degree, usize>,
}

impl GradedModule {
    pub fn new() -> Self {
        GradedModule::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Degree, usize)>) -> Self {
        let mut g = GradedModule::new();
        for (n, r) in pairs {
            g.set_rank(n, r);
        }
        g
    }

    pub fn set_rank(&mut self, n: Degree, r: usize) {
        if r == 0 {
            self.ranks.remove(&n);
        } else {
            self.ranks.insert(n, r);
        }
    }

    pub fn rank(&self, n: Degree) -> usize {
        self.ranks.get(&n).copied().unwrap_or(0)
    }

    /// Degrees of nonzero rank, ascending.
    pub fn support(&self) -> Vec<Degree> {
        self.ranks.keys().copied().collect()
    }

    pub fn min_degree(&self) -> Option<Degree> {
        self.ranks.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<Degree> {
        self.ranks.keys().next_back().copied()
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Shifted module `M[k]` with `M[k]^n = M^{n+k}`.
    pub fn shift(&self, k: Degree) -> Self {
        GradedModule::from_pairs(self.ranks.iter().map(|(&n, &r)| (n - k, r)))
    }
}
