//! k-dimensional complexes and their totalizations.
//!
//! A multicomplex stores one rank per multidegree and one differential
//! per direction, each raising its coordinate by one. The stored
//! differentials square to zero and commute on the nose; the Koszul
//! twist that makes distinct directions anticommute is applied only when
//! the total complex is assembled.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::complex::Complex;
use crate::graded::{Degree, GradedModule};
use crate::matrix::Matrix;
use crate::ring::{sign_pow, Scalar};

/// A finitely supported k-dimensional complex.
pub struct MultiComplex<S: Scalar> {
    dim: usize,
    ranks: BTreeMap<Vec<Degree>, usize>,
    // diffs[j] maps a multidegree p to the matrix of the direction-j
    // differential p -> p + e_j; absent entries are zero.
    diffs: Vec<BTreeMap<Vec<Degree>, Matrix<S>>>,
}

impl<S: Scalar> MultiComplex<S> {
    /// Validates shapes, that every direction squares to zero, and that
    /// distinct directions commute before the totalization twist.
    pub fn new(
        dim: usize,
        ranks: BTreeMap<Vec<Degree>, usize>,
        diffs: Vec<BTreeMap<Vec<Degree>, Matrix<S>>>,
    ) -> Result<Self, String> {
        if dim == 0 {
            return Err("dimension must be at least one".into());
        }
        if diffs.len() != dim {
            return Err(format!("expected {dim} differentials, got {}", diffs.len()));
        }
        for p in ranks.keys() {
            if p.len() != dim {
                return Err(format!("multidegree {p:?} has the wrong arity"));
            }
        }
        let mc = MultiComplex {
            dim,
            ranks: ranks.into_iter().filter(|&(_, r)| r > 0).collect(),
            diffs,
        };
        for (j, dj) in mc.diffs.iter().enumerate() {
            for (p, m) in dj {
                if p.len() != dim {
                    return Err(format!("multidegree {p:?} has the wrong arity"));
                }
                let tgt = step(p, j);
                if m.rows() != mc.rank(&tgt) || m.cols() != mc.rank(p) {
                    return Err(format!(
                        "direction {j} at {p:?}: shape ({}, {}) does not match ranks ({}, {})",
                        m.rows(),
                        m.cols(),
                        mc.rank(&tgt),
                        mc.rank(p)
                    ));
                }
            }
        }
        for p in mc.ranks.keys() {
            for j in 0..dim {
                let once = mc.d(j, p);
                let twice = mc.d(j, &step(p, j)).mul(&once);
                if !twice.is_zero() {
                    return Err(format!("direction {j} does not square to zero at {p:?}"));
                }
                for i in 0..j {
                    let ij = mc.d(i, &step(p, j)).mul(&mc.d(j, p));
                    let ji = mc.d(j, &step(p, i)).mul(&mc.d(i, p));
                    if ij != ji {
                        return Err(format!("directions {i} and {j} do not commute at {p:?}"));
                    }
                }
            }
        }
        Ok(mc)
    }

    /// A one-dimensional multicomplex is the complex itself.
    pub fn from_complex(c: &Complex<S>) -> Self {
        let mut ranks = BTreeMap::new();
        let mut d = BTreeMap::new();
        for &n in &c.support() {
            ranks.insert(vec![n], c.rank(n));
            let m = c.d(n);
            if !m.is_zero() {
                d.insert(vec![n], m);
            }
        }
        MultiComplex {
            dim: 1,
            ranks,
            diffs: vec![d],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self, p: &[Degree]) -> usize {
        self.ranks.get(p).copied().unwrap_or(0)
    }

    /// The direction-j differential out of multidegree p.
    pub fn d(&self, j: usize, p: &[Degree]) -> Matrix<S> {
        self.diffs[j]
            .get(p)
            .cloned()
            .unwrap_or_else(|| Matrix::zero(self.rank(&step(p, j)), self.rank(p)))
    }

    /// Multidegrees with nonzero rank, ascending lexicographically.
    pub fn support(&self) -> Vec<Vec<Degree>> {
        self.ranks.keys().cloned().collect()
    }

    /// The total complex, with one summand per multidegree. A generator
    /// in multidegree (p_1, ..., p_k) receives, for the differential in
    /// direction j, the sign (-1)^{p_1 + ... + p_{j-1}}.
    pub fn total(&self) -> TotalAssembly<S> {
        let mut blocks: BTreeMap<Degree, Vec<(Vec<Degree>, usize)>> = BTreeMap::new();
        let mut modules = GradedModule::new();
        for (p, &r) in &self.ranks {
            let t: Degree = p.iter().sum();
            blocks.entry(t).or_default().push((p.clone(), r));
            modules.set_rank(t, modules.rank(t) + r);
        }
        let assembly = TotalAssembly {
            complex: Complex::with_zero_diff(modules.clone()),
            blocks,
        };
        let mut diffs = BTreeMap::new();
        for &t in &modules.support() {
            let mut m = Matrix::zero(modules.rank(t + 1), modules.rank(t));
            for (p, _) in assembly.blocks(t) {
                let mut twist = 0i64;
                for j in 0..self.dim {
                    let blk = self.d(j, p);
                    if !blk.is_zero() {
                        let tgt = assembly
                            .offset(t + 1, &step(p, j))
                            .expect("differential target block exists");
                        let src = assembly.offset(t, p).expect("source block exists");
                        add_block(&mut m, tgt, src, &blk.scale(&sign_pow(twist)));
                    }
                    twist += p[j] as i64;
                }
            }
            diffs.insert(t, m);
        }
        TotalAssembly {
            complex: Complex::new(modules, diffs)
                .expect("total differential squares to zero"),
            ..assembly
        }
    }
}

fn step(p: &[Degree], j: usize) -> Vec<Degree> {
    let mut q = p.to_vec();
    q[j] += 1;
    q
}

fn add_block<S: Scalar>(m: &mut Matrix<S>, row_off: usize, col_off: usize, blk: &Matrix<S>) {
    for r in 0..blk.rows() {
        for c in 0..blk.cols() {
            let v = m.get(row_off + r, col_off + c).clone() + blk.get(r, c).clone();
            m.set(row_off + r, col_off + c, v);
        }
    }
}

/// A total complex together with its block layout: which multidegrees
/// make up each total degree, in lexicographic order.
pub struct TotalAssembly<S: Scalar> {
    pub complex: Complex<S>,
    blocks: BTreeMap<Degree, Vec<(Vec<Degree>, usize)>>,
}

impl<S: Scalar> TotalAssembly<S> {
    pub fn blocks(&self, t: Degree) -> &[(Vec<Degree>, usize)] {
        self.blocks.get(&t).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Offset of the summand at multidegree p inside total degree t.
    pub fn offset(&self, t: Degree, p: &[Degree]) -> Option<usize> {
        let mut off = 0;
        for (q, r) in self.blocks(t) {
            if q == p {
                return Some(off);
            }
            off += r;
        }
        None
    }
}

/// The total complex of a multicomplex.
pub fn total_complex<S: Scalar>(m: &MultiComplex<S>) -> Complex<S> {
    m.total().complex
}
