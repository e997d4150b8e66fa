//! Bounded cochain complexes of based free modules, chain maps, and the
//! classical operations: shift, cone, tensor, Hom-complex, homology.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::graded::{Degree, GradedModule};
use crate::matrix::Matrix;
use crate::ring::{sign_pow, RingTag, Scalar};
use crate::snf;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ComplexError {
    /// `d^n` must be a `rank(n+1) x rank(n)` matrix.
    ShapeMismatch { degree: Degree },
    /// `d^{n+1} * d^n != 0`.
    SquareNonzero { degree: Degree },
}

impl core::fmt::Display for ComplexError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ComplexError::ShapeMismatch { degree } => {
                write!(f, "differential at degree {degree} has wrong shape")
            }
            ComplexError::SquareNonzero { degree } => {
                write!(f, "d^2 != 0 at degree {degree}")
            }
        }
    }
}

/// Bounded cochain complex of based free modules; `d^n: C^n -> C^{n+1}`
/// and `d^2 = 0` is enforced at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex<S: Scalar> {
    modules: GradedModule,
    diffs: BTreeMap<Degree, Matrix<S>>,
}

impl<S: Scalar> Complex<S> {
    /// Validating constructor; nonzero differentials must match the ranks
    /// and compose to zero.
    pub fn new(
        modules: GradedModule,
        diffs: BTreeMap<Degree, Matrix<S>>,
    ) -> Result<Self, ComplexError> {
        for (&n, m) in &diffs {
            if m.rows() != modules.rank(n + 1) || m.cols() != modules.rank(n) {
                return Err(ComplexError::ShapeMismatch { degree: n });
            }
        }
        let c = Complex {
            modules,
            diffs: diffs.into_iter().filter(|(_, m)| !m.is_zero()).collect(),
        };
        for &n in c.diffs.keys() {
            if !c.d(n + 1).mul(&c.d(n)).is_zero() {
                return Err(ComplexError::SquareNonzero { degree: n });
            }
        }
        Ok(c)
    }

    /// Complex with zero differentials.
    pub fn with_zero_diff(modules: GradedModule) -> Self {
        Complex {
            modules,
            diffs: BTreeMap::new(),
        }
    }

    /// The zero complex.
    pub fn zero() -> Self {
        Complex::with_zero_diff(GradedModule::new())
    }

    /// Single free module of rank `r` in degree `n`.
    pub fn concentrated(n: Degree, r: usize) -> Self {
        Complex::with_zero_diff(GradedModule::from_pairs([(n, r)]))
    }

    pub fn modules(&self) -> &GradedModule {
        &self.modules
    }

    pub fn rank(&self, n: Degree) -> usize {
        self.modules.rank(n)
    }

    pub fn support(&self) -> Vec<Degree> {
        self.modules.support()
    }

    /// Differential `d^n` as a `rank(n+1) x rank(n)` matrix.
    pub fn d(&self, n: Degree) -> Matrix<S> {
        match self.diffs.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::zero(self.modules.rank(n + 1), self.modules.rank(n)),
        }
    }

    /// `X[k]` with `X[k]^n = X^{n+k}` and `d_{X[k]}^n = (-1)^k d_X^{n+k}`.
    pub fn shift(&self, k: Degree) -> Self {
        let sign: S = sign_pow(k as i64);
        let modules = self.modules.shift(k);
        let diffs = self
            .diffs
            .iter()
            .map(|(&n, m)| (n - k, m.scale(&sign)))
            .collect();
        Complex::new(modules, diffs).expect("shift preserves d^2 = 0")
    }

    /// Direct sum, left block first in every degree.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let mut modules = GradedModule::new();
        let mut diffs = BTreeMap::new();
        let degrees: Vec<Degree> = {
            let mut s = self.modules.support();
            s.extend(other.modules.support());
            s.sort_unstable();
            s.dedup();
            s
        };
        for &n in &degrees {
            modules.set_rank(n, self.rank(n) + other.rank(n));
        }
        for &n in &degrees {
            let a = self.d(n);
            let b = other.d(n);
            let z_tl = Matrix::zero(a.rows(), b.cols());
            let z_bl = Matrix::zero(b.rows(), a.cols());
            diffs.insert(n, Matrix::block(&[vec![&a, &z_tl], vec![&z_bl, &b]]));
        }
        Complex::new(modules, diffs).expect("direct sum preserves d^2 = 0")
    }

    pub fn homology_at(&self, n: Degree) -> Homology<S> {
        let rank_in = snf::diagonalize(&self.d(n - 1));
        let rank_out = snf::rank(&self.d(n));
        let free_rank = self.rank(n) - rank_out - rank_in.rank();
        let torsion = rank_in
            .divisors
            .iter()
            .filter(|d| !d.is_unit())
            .cloned()
            .collect();
        Homology { free_rank, torsion }
    }

    pub fn homology(&self) -> BTreeMap<Degree, Homology<S>> {
        let mut out = BTreeMap::new();
        let support = self.modules.support();
        let (Some(&lo), Some(&hi)) = (support.first(), support.last()) else {
            return out;
        };
        for n in lo..=hi {
            let h = self.homology_at(n);
            if !h.is_zero() {
                out.insert(n, h);
            }
        }
        out
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology().is_empty()
    }

    /// Is element `v` of degree `n` a cycle?
    pub fn is_cycle(&self, n: Degree, v: &[S]) -> bool {
        self.d(n).mul_vec(v).iter().all(Zero::is_zero)
    }

    /// Is element `v` of degree `n` a boundary over the coefficient ring?
    pub fn is_boundary(&self, n: Degree, v: &[S]) -> bool {
        snf::in_image(&self.d(n - 1), v)
    }
}

/// Finitely generated abelian-group presentation of a homology group:
/// free rank plus invariant factors in divisibility order (`> 1` over Z;
/// always empty over Q).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homology<S: Scalar> {
    pub free_rank: usize,
    pub torsion: Vec<S>,
}

impl<S: Scalar> Homology<S> {
    pub fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    pub fn free(rank: usize) -> Self {
        Homology {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }
}

/// Degree-`k` map of complexes satisfying `d_Y ∘ f = (-1)^k f ∘ d_X`,
/// i.e. a degree-`k` cycle of the Hom-complex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainMap<S: Scalar> {
    source: Complex<S>,
    target: Complex<S>,
    degree: Degree,
    comps: BTreeMap<Degree, Matrix<S>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainMapError {
    ShapeMismatch { degree: Degree },
    NotChainMap { degree: Degree },
}

impl core::fmt::Display for ChainMapError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            ChainMapError::ShapeMismatch { degree } => {
                write!(f, "component at degree {degree} has wrong shape")
            }
            ChainMapError::NotChainMap { degree } => {
                write!(f, "chain condition fails at degree {degree}")
            }
        }
    }
}

impl<S: Scalar> ChainMap<S> {
    pub fn new(
        source: Complex<S>,
        target: Complex<S>,
        degree: Degree,
        comps: BTreeMap<Degree, Matrix<S>>,
    ) -> Result<Self, ChainMapError> {
        let f = ChainMap::new_unchecked(source, target, degree, comps)?;
        for &n in f.source.support().iter() {
            // d_Y ∘ f = (-1)^k f ∘ d_X, checked on every degree of the source.
            let lhs = f.target.d(n + f.degree).mul(&f.component(n));
            let rhs = f
                .component(n + 1)
                .mul(&f.source.d(n))
                .scale(&sign_pow(f.degree as i64));
            if lhs != rhs {
                return Err(ChainMapError::NotChainMap { degree: n });
            }
        }
        Ok(f)
    }

    /// Shape-checked only; used for raw graded maps (e.g. homotopies) that
    /// are not cycles of the Hom-complex.
    pub fn new_unchecked(
        source: Complex<S>,
        target: Complex<S>,
        degree: Degree,
        comps: BTreeMap<Degree, Matrix<S>>,
    ) -> Result<Self, ChainMapError> {
        for (&n, m) in &comps {
            if m.rows() != target.rank(n + degree) || m.cols() != source.rank(n) {
                return Err(ChainMapError::ShapeMismatch { degree: n });
            }
        }
        Ok(ChainMap {
            comps: comps.into_iter().filter(|(_, m)| !m.is_zero()).collect(),
            source,
            target,
            degree,
        })
    }

    pub fn identity(c: &Complex<S>) -> Self {
        let comps = c
            .support()
            .into_iter()
            .map(|n| (n, Matrix::identity(c.rank(n))))
            .collect();
        ChainMap::new_unchecked(c.clone(), c.clone(), 0, comps).expect("identity shapes")
    }

    pub fn zero(source: &Complex<S>, target: &Complex<S>, degree: Degree) -> Self {
        ChainMap::new_unchecked(source.clone(), target.clone(), degree, BTreeMap::new())
            .expect("zero map shapes")
    }

    pub fn source(&self) -> &Complex<S> {
        &self.source
    }

    pub fn target(&self) -> &Complex<S> {
        &self.target
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    pub fn component(&self, n: Degree) -> Matrix<S> {
        match self.comps.get(&n) {
            Some(m) => m.clone(),
            None => Matrix::zero(self.target.rank(n + self.degree), self.source.rank(n)),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose(&self, other: &ChainMap<S>) -> ChainMap<S> {
        assert_eq!(
            other.target, self.source,
            "compose requires matching middle complex"
        );
        let degree = self.degree + other.degree;
        let mut comps = BTreeMap::new();
        for n in other.source.support() {
            comps.insert(n, self.component(n + other.degree).mul(&other.component(n)));
        }
        ChainMap::new_unchecked(other.source.clone(), self.target.clone(), degree, comps)
            .expect("composite shapes")
    }

    pub fn add(&self, other: &ChainMap<S>) -> ChainMap<S> {
        assert_eq!(self.source, other.source);
        assert_eq!(self.target, other.target);
        assert_eq!(self.degree, other.degree);
        let mut comps = BTreeMap::new();
        for n in self.source.support() {
            comps.insert(n, self.component(n).add(&other.component(n)));
        }
        ChainMap::new_unchecked(self.source.clone(), self.target.clone(), self.degree, comps)
            .expect("sum shapes")
    }

    pub fn scale(&self, s: &S) -> ChainMap<S> {
        let comps = self.comps.iter().map(|(&n, m)| (n, m.scale(s))).collect();
        ChainMap::new_unchecked(self.source.clone(), self.target.clone(), self.degree, comps)
            .expect("scaled shapes")
    }

    /// Does the degree-`k` chain condition hold?
    pub fn is_chain_map(&self) -> bool {
        self.source.support().iter().all(|&n| {
            self.target.d(n + self.degree).mul(&self.component(n))
                == self
                    .component(n + 1)
                    .mul(&self.source.d(n))
                    .scale(&sign_pow(self.degree as i64))
        })
    }
}

/// The cone sequence `X -> Y -> Cone(f) -> X[1] -> Y[1]` of a degree-0
/// chain map, carrying its four structure maps.
#[derive(Clone, Debug)]
pub struct Cone<S: Scalar> {
    pub complex: Complex<S>,
    /// The map the cone was taken of.
    pub map: ChainMap<S>,
    /// `Y -> Cone(f)`, inclusion of the first block.
    pub incl: ChainMap<S>,
    /// `Cone(f) -> X[1]`, projection onto the second block.
    pub proj: ChainMap<S>,
    /// `X[1] -> Y[1]`, the rotation `-f[1]` closing the sequence.
    pub connecting: ChainMap<S>,
}

/// `Cone(f)^n = Y^n ⊕ X^{n+1}` with differential `[[d_Y, f], [0, d_{X[1]}]]`.
pub fn cone<S: Scalar>(f: &ChainMap<S>) -> Cone<S> {
    assert_eq!(f.degree(), 0, "cone requires a degree-0 chain map");
    assert!(f.is_chain_map(), "cone requires a chain map");
    let x = f.source().clone();
    let y = f.target().clone();
    let x1 = x.shift(1);

    let mut modules = GradedModule::new();
    let degrees: Vec<Degree> = {
        let mut s = y.support();
        s.extend(x1.support());
        s.sort_unstable();
        s.dedup();
        s
    };
    for &n in &degrees {
        modules.set_rank(n, y.rank(n) + x1.rank(n));
    }
    let mut diffs = BTreeMap::new();
    for &n in &degrees {
        let dy = y.d(n);
        let fx = f.component(n + 1);
        let dx1 = x1.d(n);
        let zero = Matrix::zero(dx1.rows(), dy.cols());
        diffs.insert(n, Matrix::block(&[vec![&dy, &fx], vec![&zero, &dx1]]));
    }
    let complex = Complex::new(modules, diffs).expect("cone differential squares to zero");

    let mut incl_comps = BTreeMap::new();
    for &n in &y.support() {
        let mut m = Matrix::zero(complex.rank(n), y.rank(n));
        for i in 0..y.rank(n) {
            m.set(i, i, S::one());
        }
        incl_comps.insert(n, m);
    }
    let incl = ChainMap::new(y.clone(), complex.clone(), 0, incl_comps).expect("cone inclusion");

    let mut proj_comps = BTreeMap::new();
    for &n in &complex.support() {
        let mut m = Matrix::zero(x1.rank(n), complex.rank(n));
        for i in 0..x1.rank(n) {
            m.set(i, y.rank(n) + i, S::one());
        }
        proj_comps.insert(n, m);
    }
    let proj = ChainMap::new(complex.clone(), x1.clone(), 0, proj_comps).expect("cone projection");

    let mut conn_comps = BTreeMap::new();
    for &n in &x1.support() {
        conn_comps.insert(n, f.component(n + 1).scale(&(S::zero() - S::one())));
    }
    let connecting =
        ChainMap::new(x1, y.shift(1), 0, conn_comps).expect("cone connecting map");

    Cone {
        complex,
        map: f.clone(),
        incl,
        proj,
        connecting,
    }
}

/// Tensor product complex with its block structure. Blocks of degree `n`
/// are `X^i ⊗ Y^{n-i}` for ascending `i`; within a block the basis is
/// Kronecker-ordered (`X` index major).
#[derive(Clone, Debug)]
pub struct TensorComplex<S: Scalar> {
    pub complex: Complex<S>,
    pub left: Complex<S>,
    pub right: Complex<S>,
}

impl<S: Scalar> TensorComplex<S> {
    pub fn new(x: &Complex<S>, y: &Complex<S>) -> Self {
        let mut modules = GradedModule::new();
        let mut blocks: BTreeMap<Degree, Vec<Degree>> = BTreeMap::new();
        for &i in &x.support() {
            for &j in &y.support() {
                blocks.entry(i + j).or_default().push(i);
                let r = modules.rank(i + j) + x.rank(i) * y.rank(j);
                modules.set_rank(i + j, r);
            }
        }
        let tc = TensorComplex {
            complex: Complex::with_zero_diff(modules.clone()),
            left: x.clone(),
            right: y.clone(),
        };
        // d(a⊗b) = da⊗b + (-1)^{deg a} a⊗db
        let mut diffs = BTreeMap::new();
        for &n in &modules.support() {
            let mut m = Matrix::zero(modules.rank(n + 1), modules.rank(n));
            for &i in blocks.get(&n).unwrap_or(&Vec::new()) {
                let j = n - i;
                let src_off = tc.offset(n, i);
                // da⊗b lands in block (i+1, j)
                let dx = x.d(i);
                if dx.rows() > 0 && y.rank(j) > 0 {
                    let tgt_off = tc.offset(n + 1, i + 1);
                    let blk = dx.kronecker(&Matrix::identity(y.rank(j)));
                    copy_block(&mut m, tgt_off, src_off, &blk);
                }
                // (-1)^i a⊗db lands in block (i, j+1)
                let dy = y.d(j);
                if dy.rows() > 0 && x.rank(i) > 0 {
                    let tgt_off = tc.offset(n + 1, i);
                    let blk = Matrix::identity(x.rank(i))
                        .kronecker(&dy)
                        .scale(&sign_pow(i as i64));
                    copy_block(&mut m, tgt_off, src_off, &blk);
                }
            }
            diffs.insert(n, m);
        }
        TensorComplex {
            complex: Complex::new(modules, diffs).expect("tensor differential squares to zero"),
            ..tc
        }
    }

    /// Ascending `i` with both factors nonzero at `(i, n-i)`.
    pub fn degree_blocks(&self, n: Degree) -> Vec<(Degree, Degree)> {
        self.left
            .support()
            .into_iter()
            .filter(|&i| self.right.rank(n - i) > 0)
            .map(|i| (i, n - i))
            .collect()
    }

    /// Offset of block `X^i ⊗ Y^{n-i}` inside degree `n`.
    pub fn offset(&self, n: Degree, i: Degree) -> usize {
        self.degree_blocks(n)
            .iter()
            .take_while(|&&(bi, _)| bi < i)
            .map(|&(bi, bj)| self.left.rank(bi) * self.right.rank(bj))
            .sum()
    }
}

fn copy_block<S: Scalar>(m: &mut Matrix<S>, row_off: usize, col_off: usize, blk: &Matrix<S>) {
    for r in 0..blk.rows() {
        for c in 0..blk.cols() {
            let v = m.get(row_off + r, col_off + c).clone() + blk.get(r, c).clone();
            m.set(row_off + r, col_off + c, v);
        }
    }
}

/// Tensor of two degree-0 chain maps on the given tensor presentations:
/// `(f⊗g)(a⊗b) = f(a)⊗g(b)`, no sign since both maps have degree 0.
pub fn tensor_map<S: Scalar>(
    f: &ChainMap<S>,
    g: &ChainMap<S>,
    src: &TensorComplex<S>,
    tgt: &TensorComplex<S>,
) -> ChainMap<S> {
    assert_eq!(f.degree(), 0);
    assert_eq!(g.degree(), 0);
    assert_eq!(*f.source(), src.left);
    assert_eq!(*g.source(), src.right);
    assert_eq!(*f.target(), tgt.left);
    assert_eq!(*g.target(), tgt.right);
    let mut comps = BTreeMap::new();
    for &n in &src.complex.support() {
        let mut m = Matrix::zero(tgt.complex.rank(n), src.complex.rank(n));
        for (i, j) in src.degree_blocks(n) {
            let blk = f.component(i).kronecker(&g.component(j));
            if !blk.is_zero() {
                copy_block(&mut m, tgt.offset(n, i), src.offset(n, i), &blk);
            }
        }
        comps.insert(n, m);
    }
    ChainMap::new(src.complex.clone(), tgt.complex.clone(), 0, comps)
        .expect("tensor of chain maps is a chain map")
}

/// Symmetry `τ: X⊗Y -> Y⊗X`, `a⊗b ↦ (-1)^{deg a · deg b} b⊗a`.
pub fn tensor_symmetry<S: Scalar>(xy: &TensorComplex<S>, yx: &TensorComplex<S>) -> ChainMap<S> {
    assert_eq!(xy.left, yx.right);
    assert_eq!(xy.right, yx.left);
    let mut comps = BTreeMap::new();
    for &n in &xy.complex.support() {
        let mut m = Matrix::zero(yx.complex.rank(n), xy.complex.rank(n));
        for (i, j) in xy.degree_blocks(n) {
            let (ri, rj) = (xy.left.rank(i), xy.right.rank(j));
            let src = xy.offset(n, i);
            let tgt = yx.offset(n, j);
            let sgn: S = sign_pow((i as i64) * (j as i64));
            for a in 0..ri {
                for b in 0..rj {
                    m.set(tgt + b * ri + a, src + a * rj + b, sgn.clone());
                }
            }
        }
        comps.insert(n, m);
    }
    ChainMap::new(xy.complex.clone(), yx.complex.clone(), 0, comps)
        .expect("tensor symmetry is a chain map")
}

/// Hom-complex `Hom(X,Y)^n = ⊕_p Hom(X^p, Y^{n+p})` with differential
/// `d(f) = d_Y ∘ f - (-1)^n f ∘ d_X`. Blocks are ordered by ascending `p`;
/// within a block, source-basis index is major.
#[derive(Clone, Debug)]
pub struct HomComplex<S: Scalar> {
    pub complex: Complex<S>,
    pub source: Complex<S>,
    pub target: Complex<S>,
}

impl<S: Scalar> HomComplex<S> {
    pub fn new(x: &Complex<S>, y: &Complex<S>) -> Self {
        let mut modules = GradedModule::new();
        let mut degrees: Vec<Degree> = Vec::new();
        for &p in &x.support() {
            for &q in &y.support() {
                degrees.push(q - p);
            }
        }
        degrees.sort_unstable();
        degrees.dedup();
        for &n in &degrees {
            let r: usize = x
                .support()
                .iter()
                .map(|&p| x.rank(p) * y.rank(n + p))
                .sum();
            modules.set_rank(n, r);
        }
        let hc = HomComplex {
            complex: Complex::with_zero_diff(modules.clone()),
            source: x.clone(),
            target: y.clone(),
        };
        let mut diffs = BTreeMap::new();
        for &n in &modules.support() {
            let rows = modules.rank(n + 1);
            let cols = modules.rank(n);
            let mut m = Matrix::zero(rows, cols);
            for col in 0..cols {
                let mut unit = vec![S::zero(); cols];
                unit[col] = S::one();
                let f = hc.unflatten(n, &unit);
                let df = hc.differential_of(&f);
                for (row, v) in hc.flatten(&df).1.into_iter().enumerate() {
                    if !v.is_zero() {
                        m.set(row, col, v);
                    }
                }
            }
            diffs.insert(n, m);
        }
        HomComplex {
            complex: Complex::new(modules, diffs).expect("hom differential squares to zero"),
            ..hc
        }
    }

    /// Blocks `(p, rank X^p, rank Y^{n+p})` of degree `n`, ascending `p`.
    pub fn degree_blocks(&self, n: Degree) -> Vec<(Degree, usize, usize)> {
        hom_degree_blocks(&self.source, &self.target, n)
    }

    /// A degree-`n` element as one matrix `X^p -> Y^{n+p}` per block.
    pub fn unflatten(&self, n: Degree, v: &[S]) -> GradedMap<S> {
        hom_unflatten(&self.source, &self.target, n, v)
    }

    pub fn flatten(&self, f: &GradedMap<S>) -> (Degree, Vec<S>) {
        hom_flatten(&self.source, &self.target, f)
    }

    /// `d(f) = d_Y ∘ f - (-1)^n f ∘ d_X`, componentwise.
    pub fn differential_of(&self, f: &GradedMap<S>) -> GradedMap<S> {
        hom_differential(&self.source, &self.target, f)
    }
}

/// Blocks `(p, rank X^p, rank Y^{n+p})` of `Hom(X,Y)^n`, ascending `p`.
pub fn hom_degree_blocks<S: Scalar>(
    x: &Complex<S>,
    y: &Complex<S>,
    n: Degree,
) -> Vec<(Degree, usize, usize)> {
    x.support()
        .into_iter()
        .filter(|&p| y.rank(n + p) > 0)
        .map(|p| (p, x.rank(p), y.rank(n + p)))
        .collect()
}

/// Total rank of `Hom(X,Y)^n`.
pub fn hom_rank<S: Scalar>(x: &Complex<S>, y: &Complex<S>, n: Degree) -> usize {
    hom_degree_blocks(x, y, n).iter().map(|&(_, rx, ry)| rx * ry).sum()
}

/// Coordinates of `Hom(X,Y)^n` into one matrix `X^p -> Y^{n+p}` per block;
/// within a block the source-basis index is major.
pub fn hom_unflatten<S: Scalar>(x: &Complex<S>, y: &Complex<S>, n: Degree, v: &[S]) -> GradedMap<S> {
    let mut comps = BTreeMap::new();
    let mut off = 0;
    for (p, rx, ry) in hom_degree_blocks(x, y, n) {
        let mut m = Matrix::zero(ry, rx);
        for b in 0..rx {
            for a in 0..ry {
                m.set(a, b, v[off + b * ry + a].clone());
            }
        }
        off += rx * ry;
        if !m.is_zero() {
            comps.insert(p, m);
        }
    }
    assert_eq!(off, v.len(), "coordinate vector length mismatch");
    GradedMap { degree: n, comps }
}

pub fn hom_flatten<S: Scalar>(x: &Complex<S>, y: &Complex<S>, f: &GradedMap<S>) -> (Degree, Vec<S>) {
    let n = f.degree;
    let mut v = vec![S::zero(); hom_rank(x, y, n)];
    let mut off = 0;
    for (p, rx, ry) in hom_degree_blocks(x, y, n) {
        if let Some(m) = f.comps.get(&p) {
            assert_eq!((m.rows(), m.cols()), (ry, rx));
            for b in 0..rx {
                for a in 0..ry {
                    v[off + b * ry + a] = m.get(a, b).clone();
                }
            }
        }
        off += rx * ry;
    }
    (n, v)
}

/// `d(f) = d_Y ∘ f - (-1)^n f ∘ d_X` on raw graded maps.
pub fn hom_differential<S: Scalar>(x: &Complex<S>, y: &Complex<S>, f: &GradedMap<S>) -> GradedMap<S> {
    let n = f.degree;
    let sgn: S = sign_pow(n as i64);
    let mut comps = BTreeMap::new();
    for &p in &x.support() {
        let a = y.d(n + p).mul(&f.component_at(p, x, y));
        let b = f.component_at(p + 1, x, y).mul(&x.d(p)).scale(&sgn);
        let m = a.sub(&b);
        if !m.is_zero() {
            comps.insert(p, m);
        }
    }
    GradedMap { degree: n + 1, comps }
}

/// Composition of raw graded maps, `g` applied first:
/// `(f ∘ g)_p = f_{p + deg g} ∘ g_p`, with no sign.
pub fn compose_graded<S: Scalar>(
    f: &GradedMap<S>,
    g: &GradedMap<S>,
    x: &Complex<S>,
    y: &Complex<S>,
    z: &Complex<S>,
) -> GradedMap<S> {
    let mut comps = BTreeMap::new();
    for &p in &x.support() {
        let m = f
            .component_at(p + g.degree, y, z)
            .mul(&g.component_at(p, x, y));
        if !m.is_zero() {
            comps.insert(p, m);
        }
    }
    GradedMap {
        degree: f.degree + g.degree,
        comps,
    }
}

/// Raw graded map between complexes: one component `X^p -> Y^{p+degree}`
/// per degree; not required to satisfy any chain condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap<S: Scalar> {
    pub degree: Degree,
    pub comps: BTreeMap<Degree, Matrix<S>>,
}

impl<S: Scalar> GradedMap<S> {
    pub fn component_at(&self, p: Degree, source: &Complex<S>, target: &Complex<S>) -> Matrix<S> {
        match self.comps.get(&p) {
            Some(m) => m.clone(),
            None => Matrix::zero(target.rank(p + self.degree), source.rank(p)),
        }
    }
}

/// Presentation of `ker(d_out)/im(d_in)` with computable class coordinates.
/// Requires `im(d_in) ⊆ ker(d_out)`.
#[derive(Clone, Debug)]
pub struct CycleQuotient<S: Scalar> {
    kernel: Matrix<S>,
    u: Matrix<S>,
    divisors: Vec<S>,
    pub free_rank: usize,
    pub torsion: Vec<S>,
}

impl<S: Scalar> CycleQuotient<S> {
    pub fn new(d_out: &Matrix<S>, d_in: &Matrix<S>) -> Self {
        let kernel = snf::kernel_basis(d_out);
        let image = snf::image_basis(d_in);
        let w = snf::solve_matrix(&kernel, &image)
            .expect("incoming image must lie inside the kernel (d^2 = 0)");
        let snf_w = snf::diagonalize(&w);
        let torsion: Vec<S> = snf_w
            .divisors
            .iter()
            .filter(|d| !d.is_unit())
            .cloned()
            .collect();
        CycleQuotient {
            free_rank: kernel.cols() - snf_w.rank(),
            torsion,
            u: snf_w.u,
            divisors: snf_w.divisors,
            kernel,
        }
    }

    /// Coordinates of the class of a cycle: torsion coordinates (reduced to
    /// `[0, d)`) followed by free coordinates. `None` if `v` is not in the
    /// kernel span.
    pub fn class_coords(&self, v: &[S]) -> Option<Vec<S>> {
        let c = snf::solve(&self.kernel, v)?;
        let y = self.u.mul_vec(&c);
        let mut out = Vec::new();
        for (k, d) in self.divisors.iter().enumerate() {
            if !d.is_unit() {
                out.push(rem_euclid(&y[k], d));
            }
        }
        for yk in y.iter().skip(self.divisors.len()) {
            out.push(yk.clone());
        }
        Some(out)
    }

    pub fn is_zero_class(&self, v: &[S]) -> Option<bool> {
        self.class_coords(v)
            .map(|c| c.iter().all(Zero::is_zero))
    }

    pub fn rank(&self) -> usize {
        self.free_rank + self.torsion.len()
    }
}

fn rem_euclid<S: Scalar>(a: &S, d: &S) -> S {
    if S::RING == RingTag::Rationals {
        return S::zero();
    }
    let (_, mut r) = a.div_rem_trunc(d);
    if r < S::zero() {
        r = r + d.abs();
    }
    r
}
