//! The cube categories and cubical objects.
//!
//! Objects are the sets {0,1}^n. Morphisms are generated by inclusions
//! `eta_{n,i,eps}` (insert eps at slot i), projections `p_{n,i}` (drop
//! slot i), permutations of slots, involutions `tau_{n,i}` (flip 0/1 in
//! slot i), and, in the extended category, the multiplication `m` of
//! adjacent slots. A morphism is stored as its full value table together
//! with the generator word that produced it, so realizations in other
//! categories can be built generator by generator (automatically
//! functorial).
//!
//! A cubical object assigns to each n <= N a bounded complex and to each
//! cube morphism a chain map, contravariantly. From this the module
//! builds the associated total complex (level n placed in cochain degree
//! -n, cube differential on level k summing i = 1..k of
//! (-1)^i (eta*_{i,1} - eta*_{i,0})), the degeneracy splitting
//! A(n) = A^degn + A^0 with its projector, the nondegenerate complex,
//! the cup product, and the lambda comparison map with a truncation-safe
//! acyclicity verdict.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::complex::{cone, ChainMap, Complex, Cone, GradedMap, TensorComplex};
use crate::gen;
use crate::graded::{Degree, GradedModule};
use crate::matrix::Matrix;
use crate::ring::{sign_pow, Scalar};
use crate::snf;

/// One generator of the (extended) cube category. Slots are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CubeGen {
    /// `eta_{n,i,eps}`: n -> n+1, insert eps at slot i (1 <= i <= n+1).
    Eta { n: usize, i: usize, eps: bool },
    /// `p_{n,i}`: n -> n-1, drop slot i (1 <= i <= n).
    Proj { n: usize, i: usize },
    /// `tau_{n,i}`: n -> n, exchange 0 and 1 in slot i.
    Tau { n: usize, i: usize },
    /// Permutation: output slot j reads input slot img[j-1].
    Perm { n: usize, img: Vec<usize> },
    /// Extended category only: multiply slots i and i+1 into one slot.
    Mul { n: usize, i: usize },
}

impl CubeGen {
    pub fn arities(&self) -> (usize, usize) {
        match self {
            CubeGen::Eta { n, .. } => (*n, n + 1),
            CubeGen::Proj { n, .. } => (*n, n - 1),
            CubeGen::Tau { n, .. } | CubeGen::Perm { n, .. } => (*n, *n),
            CubeGen::Mul { n, .. } => (*n, n - 1),
        }
    }

    /// Value on a point of {0,1}^src, encoded with bit i-1 = slot i.
    pub fn apply(&self, x: u32) -> u32 {
        let mask = |k: usize| (1u32 << k) - 1;
        match *self {
            CubeGen::Eta { i, eps, .. } => {
                let low = x & mask(i - 1);
                let high = x >> (i - 1);
                low | ((eps as u32) << (i - 1)) | (high << i)
            }
            CubeGen::Proj { i, .. } => (x & mask(i - 1)) | ((x >> i) << (i - 1)),
            CubeGen::Tau { i, .. } => x ^ (1 << (i - 1)),
            CubeGen::Perm { n, ref img } => {
                let mut y = 0;
                for j in 0..n {
                    y |= ((x >> (img[j] - 1)) & 1) << j;
                }
                y
            }
            CubeGen::Mul { i, .. } => {
                let low = x & mask(i - 1);
                let bit = (x >> (i - 1)) & (x >> i) & 1;
                (x >> (i + 1) << i) | (bit << (i - 1)) | low
            }
        }
    }
}

/// A morphism of the (extended) cube category: arities, the full value
/// table on {0,1}^src, and a generator word that produces it (applied
/// left to right). Equality compares tables; words are provenance.
#[derive(Clone, Debug)]
pub struct CubeMorphism {
    pub src: usize,
    pub tgt: usize,
    table: Vec<u32>,
    word: Vec<CubeGen>,
}

impl PartialEq for CubeMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.src == other.src && self.tgt == other.tgt && self.table == other.table
    }
}
impl Eq for CubeMorphism {}

impl CubeMorphism {
    pub fn identity(n: usize) -> Self {
        CubeMorphism {
            src: n,
            tgt: n,
            table: (0..1u32 << n).collect(),
            word: Vec::new(),
        }
    }

    pub fn from_generator(g: CubeGen) -> Self {
        let (src, tgt) = g.arities();
        let table = (0..1u32 << src).map(|x| g.apply(x)).collect();
        CubeMorphism {
            src,
            tgt,
            table,
            word: alloc::vec![g],
        }
    }

    pub fn eta(n: usize, i: usize, eps: bool) -> Self {
        assert!(i >= 1 && i <= n + 1, "eta slot out of range");
        Self::from_generator(CubeGen::Eta { n, i, eps })
    }

    pub fn proj(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "projection slot out of range");
        Self::from_generator(CubeGen::Proj { n, i })
    }

    pub fn tau(n: usize, i: usize) -> Self {
        assert!(i >= 1 && i <= n, "involution slot out of range");
        Self::from_generator(CubeGen::Tau { n, i })
    }

    pub fn perm(n: usize, img: &[usize]) -> Self {
        assert_eq!(img.len(), n);
        let mut seen = alloc::vec![false; n];
        for &j in img {
            assert!(j >= 1 && j <= n && !seen[j - 1], "not a permutation");
            seen[j - 1] = true;
        }
        Self::from_generator(CubeGen::Perm { n, img: img.to_vec() })
    }

    /// Extended category: multiply slots i and i+1 into one slot.
    pub fn mul(n: usize, i: usize) -> Self {
        assert!(n >= 2 && i >= 1 && i < n, "multiplication slot out of range");
        Self::from_generator(CubeGen::Mul { n, i })
    }

    /// `i_n`: 0 -> n with image the all-zero point.
    pub fn zero_inclusion(n: usize) -> Self {
        let mut f = Self::identity(0);
        for k in 0..n {
            f = Self::eta(k, 1, false).compose_after(&f);
        }
        f
    }

    /// `p^1_{n,m}`: (n+m) -> n keeping the first n slots.
    pub fn keep_first(n: usize, m: usize) -> Self {
        let mut f = Self::identity(n + m);
        for k in ((n + 1)..=(n + m)).rev() {
            f = Self::proj(k, k).compose_after(&f);
        }
        f
    }

    /// `p^2_{n,m}`: (n+m) -> m keeping the last m slots.
    pub fn keep_last(n: usize, m: usize) -> Self {
        let mut f = Self::identity(n + m);
        for _ in 0..n {
            let k = f.tgt;
            f = Self::proj(k, 1).compose_after(&f);
        }
        f
    }

    pub fn apply(&self, x: u32) -> u32 {
        self.table[x as usize]
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    pub fn word(&self) -> &[CubeGen] {
        &self.word
    }

    /// Does the producing word use the extended-category multiplication?
    pub fn uses_mul(&self) -> bool {
        self.word.iter().any(|g| matches!(g, CubeGen::Mul { .. }))
    }

    /// `self ∘ other` (apply `other` first).
    pub fn compose_after(&self, other: &CubeMorphism) -> CubeMorphism {
        assert_eq!(self.src, other.tgt, "cube arity mismatch");
        let table = other.table.iter().map(|&y| self.table[y as usize]).collect();
        let mut word = other.word.clone();
        word.extend(self.word.iter().cloned());
        CubeMorphism {
            src: other.src,
            tgt: self.tgt,
            table,
            word,
        }
    }

    /// Monoidal product: `self` acts on the low slots, `other` on the
    /// high slots. Realized as (id ⊗ other) ∘ (self ⊗ id) so the word
    /// stays a genuine generator sequence.
    pub fn product(&self, other: &CubeMorphism) -> CubeMorphism {
        let mut word = Vec::new();
        for g in &self.word {
            word.push(lift_high(g, other.src));
        }
        for g in &other.word {
            word.push(lift_low(g, self.tgt));
        }
        let src = self.src + other.src;
        let tgt = self.tgt + other.tgt;
        let table = (0..1u32 << src)
            .map(|x| {
                let xl = x & ((1 << self.src) - 1);
                let xh = x >> self.src;
                self.table[xl as usize] | (other.table[xh as usize] << self.tgt)
            })
            .collect();
        let f = CubeMorphism { src, tgt, table, word };
        debug_assert_eq!(f.table, {
            let mut g = CubeMorphism::identity(src);
            for w in &f.word {
                g = CubeMorphism::from_generator(w.clone()).compose_after(&g);
            }
            g.table
        });
        f
    }
}

fn lift_high(g: &CubeGen, extra: usize) -> CubeGen {
    match g.clone() {
        CubeGen::Eta { n, i, eps } => CubeGen::Eta { n: n + extra, i, eps },
        CubeGen::Proj { n, i } => CubeGen::Proj { n: n + extra, i },
        CubeGen::Tau { n, i } => CubeGen::Tau { n: n + extra, i },
        CubeGen::Perm { n, mut img } => {
            for j in n + 1..=n + extra {
                img.push(j);
            }
            CubeGen::Perm { n: n + extra, img }
        }
        CubeGen::Mul { n, i } => CubeGen::Mul { n: n + extra, i },
    }
}

fn lift_low(g: &CubeGen, low: usize) -> CubeGen {
    match g.clone() {
        CubeGen::Eta { n, i, eps } => CubeGen::Eta { n: n + low, i: i + low, eps },
        CubeGen::Proj { n, i } => CubeGen::Proj { n: n + low, i: i + low },
        CubeGen::Tau { n, i } => CubeGen::Tau { n: n + low, i: i + low },
        CubeGen::Perm { n, img } => {
            let mut full: Vec<usize> = (1..=low).collect();
            full.extend(img.into_iter().map(|j| j + low));
            CubeGen::Perm { n: n + low, img: full }
        }
        CubeGen::Mul { n, i } => CubeGen::Mul { n: n + low, i: i + low },
    }
}

/// A cubical object valued in bounded complexes, truncated at level N.
/// `act` sends f: n -> m to the degree-0 chain map level(m) -> level(n),
/// contravariantly, given by its components per internal degree.
pub trait Cubical<S: Scalar> {
    fn truncation(&self) -> usize;
    fn level(&self, n: usize) -> Complex<S>;
    fn act(&self, f: &CubeMorphism) -> GradedMap<S>;
    /// Whether the action is defined on the extended category.
    fn extended(&self) -> bool {
        false
    }
}

/// Cubical abelian group given by ranks plus a matrix-valued action rule,
/// viewed as complexes concentrated in internal degree 0.
pub struct MatrixCubical<S, F> {
    pub ranks: Vec<usize>,
    pub action: F,
    pub has_mul: bool,
    _marker: core::marker::PhantomData<S>,
}

impl<S: Scalar, F: Fn(&CubeMorphism) -> Matrix<S>> MatrixCubical<S, F> {
    pub fn new(ranks: Vec<usize>, has_mul: bool, action: F) -> Self {
        assert!(!ranks.is_empty());
        MatrixCubical {
            ranks,
            action,
            has_mul,
            _marker: core::marker::PhantomData,
        }
    }
}

impl<S: Scalar, F: Fn(&CubeMorphism) -> Matrix<S>> Cubical<S> for MatrixCubical<S, F> {
    fn truncation(&self) -> usize {
        self.ranks.len() - 1
    }

    fn level(&self, n: usize) -> Complex<S> {
        Complex::concentrated(0, self.ranks[n])
    }

    fn act(&self, f: &CubeMorphism) -> GradedMap<S> {
        let m = (self.action)(f);
        assert_eq!(
            (m.rows(), m.cols()),
            (self.ranks[f.src], self.ranks[f.tgt]),
            "action matrix shape mismatch"
        );
        let mut comps = BTreeMap::new();
        if !m.is_zero() {
            comps.insert(0, m);
        }
        GradedMap { degree: 0, comps }
    }

    fn extended(&self) -> bool {
        self.has_mul
    }
}

/// The representable model A(n) = Z[{0,1}^n]: a morphism acts by sending
/// a basis point u to the sum of the points of its fiber f^{-1}(u).
pub fn free_cubical<S: Scalar>(
    n_max: usize,
) -> MatrixCubical<S, impl Fn(&CubeMorphism) -> Matrix<S>> {
    let ranks = (0..=n_max).map(|n| 1usize << n).collect();
    MatrixCubical::new(ranks, true, |f: &CubeMorphism| {
        let mut m = Matrix::zero(1 << f.src, 1 << f.tgt);
        for v in 0..1u32 << f.src {
            m.set(v as usize, f.apply(v) as usize, S::one());
        }
        m
    })
}

/// Constant cubical object: every level is the same complex, every
/// morphism acts as the identity.
pub struct ConstantCubical<S: Scalar> {
    pub n_max: usize,
    pub value: Complex<S>,
}

impl<S: Scalar> Cubical<S> for ConstantCubical<S> {
    fn truncation(&self) -> usize {
        self.n_max
    }

    fn level(&self, _n: usize) -> Complex<S> {
        self.value.clone()
    }

    fn act(&self, _f: &CubeMorphism) -> GradedMap<S> {
        GradedMap {
            degree: 0,
            comps: self
                .value
                .support()
                .into_iter()
                .map(|p| (p, Matrix::identity(self.value.rank(p))))
                .collect(),
        }
    }

    fn extended(&self) -> bool {
        true
    }
}

/// The cube differential on level k as components per internal degree:
/// `sum_{i=1..k} (-1)^i (eta*_{k-1,i,1} - eta*_{k-1,i,0})`.
pub fn cube_faces<S: Scalar, A: Cubical<S> + ?Sized>(a: &A, k: usize) -> GradedMap<S> {
    assert!(k >= 1);
    let lower = a.level(k - 1);
    let upper = a.level(k);
    let mut comps: BTreeMap<Degree, Matrix<S>> = BTreeMap::new();
    for i in 1..=k {
        let one = a.act(&CubeMorphism::eta(k - 1, i, true));
        let zero = a.act(&CubeMorphism::eta(k - 1, i, false));
        for &p in &upper.support() {
            let m1 = one.component_at(p, &upper, &lower);
            let m0 = zero.component_at(p, &upper, &lower);
            let term = m1.sub(&m0).scale(&sign_pow::<S>(i as i64));
            let entry = comps
                .entry(p)
                .or_insert_with(|| Matrix::zero(lower.rank(p), upper.rank(p)));
            *entry = entry.add(&term);
        }
    }
    comps.retain(|_, m| !m.is_zero());
    GradedMap { degree: 0, comps }
}

/// `pi^eps_{n,i} = p*_{n,i} ∘ eta*_{n-1,i,eps}` as an operator on level
/// n, with components per internal degree.
pub fn pi_projector<S: Scalar, A: Cubical<S> + ?Sized>(
    a: &A,
    n: usize,
    i: usize,
    eps: bool,
) -> GradedMap<S> {
    let here = a.level(n);
    let below = a.level(n - 1);
    let pr = a.act(&CubeMorphism::proj(n, i));
    let et = a.act(&CubeMorphism::eta(n - 1, i, eps));
    let mut comps = BTreeMap::new();
    for &p in &here.support() {
        let m = pr
            .component_at(p, &below, &here)
            .mul(&et.component_at(p, &here, &below));
        if !m.is_zero() {
            comps.insert(p, m);
        }
    }
    GradedMap { degree: 0, comps }
}

fn copy_into<S: Scalar>(m: &mut Matrix<S>, row_off: usize, col_off: usize, blk: &Matrix<S>) {
    for r in 0..blk.rows() {
        for c in 0..blk.cols() {
            let v = blk.get(r, c).clone();
            if !v.is_zero() {
                m.set(row_off + r, col_off + c, v);
            }
        }
    }
}

/// Total complex of a cubical object: level n contributes its internal
/// degree p to total degree p - n (the homological-degree embedding puts
/// a cubical group's level n in degree -n). Blocks are ordered by
/// ascending level; the total differential is d_int + (-1)^p d_cube on a
/// component of internal degree p.
pub struct TotComplex<S: Scalar> {
    pub complex: Complex<S>,
    levels: Vec<Complex<S>>,
    faces: Vec<GradedMap<S>>,
}

impl<S: Scalar> TotComplex<S> {
    /// Ordered blocks `(level, internal degree, rank)` of total degree t.
    pub fn blocks(&self, t: Degree) -> Vec<(usize, Degree, usize)> {
        let mut v = Vec::new();
        for (n, lv) in self.levels.iter().enumerate() {
            let p = t + n as Degree;
            let r = lv.rank(p);
            if r > 0 {
                v.push((n, p, r));
            }
        }
        v
    }

    /// Offset of the level block inside total degree t.
    pub fn offset(&self, t: Degree, level: usize) -> usize {
        self.blocks(t)
            .iter()
            .take_while(|b| b.0 < level)
            .map(|b| b.2)
            .sum()
    }

    pub fn levels(&self) -> &[Complex<S>] {
        &self.levels
    }

    /// The cube differential out of level k (components per degree).
    pub fn face(&self, k: usize) -> &GradedMap<S> {
        &self.faces[k - 1]
    }
}

pub fn tot<S: Scalar, A: Cubical<S> + ?Sized>(a: &A) -> Result<TotComplex<S>, String> {
    let n_max = a.truncation();
    let levels: Vec<Complex<S>> = (0..=n_max).map(|n| a.level(n)).collect();
    let faces: Vec<GradedMap<S>> = (1..=n_max).map(|k| cube_faces(a, k)).collect();

    let mut modules = GradedModule::new();
    let mut degrees: Vec<Degree> = Vec::new();
    for (n, lv) in levels.iter().enumerate() {
        for &p in &lv.support() {
            degrees.push(p - n as Degree);
        }
    }
    degrees.sort_unstable();
    degrees.dedup();
    for &t in &degrees {
        let r = levels
            .iter()
            .enumerate()
            .map(|(n, lv)| lv.rank(t + n as Degree))
            .sum();
        modules.set_rank(t, r);
    }

    let helper = TotComplex {
        complex: Complex::with_zero_diff(modules.clone()),
        levels: levels.clone(),
        faces: faces.clone(),
    };

    let mut diffs = BTreeMap::new();
    for &t in &degrees {
        let rows = modules.rank(t + 1);
        let cols = modules.rank(t);
        let mut m = Matrix::zero(rows, cols);
        for (n, p, _r) in helper.blocks(t) {
            let col0 = helper.offset(t, n);
            // Internal differential stays in level n.
            if levels[n].rank(p + 1) > 0 {
                copy_into(&mut m, helper.offset(t + 1, n), col0, &levels[n].d(p));
            }
            // Cube differential drops to level n-1, with sign (-1)^p.
            if n >= 1 && levels[n - 1].rank(p) > 0 {
                let face = faces[n - 1].component_at(p, &levels[n], &levels[n - 1]);
                let row0 = helper.offset(t + 1, n - 1);
                copy_into(&mut m, row0, col0, &face.scale(&sign_pow::<S>(p as i64)));
            }
        }
        diffs.insert(t, m);
    }

    let complex = Complex::new(modules, diffs).map_err(|e| format!("total complex: {e}"))?;
    Ok(TotComplex {
        complex,
        levels,
        faces,
    })
}

/// The comparison map lambda: level 0 -> Tot (inclusion of the 0-block).
pub fn lambda<S: Scalar>(t: &TotComplex<S>) -> ChainMap<S> {
    let a0 = t.levels[0].clone();
    let mut comps = BTreeMap::new();
    for &p in &a0.support() {
        let mut m = Matrix::zero(t.complex.rank(p), a0.rank(p));
        let off = t.offset(p, 0);
        for k in 0..a0.rank(p) {
            m.set(off + k, k, S::one());
        }
        comps.insert(p, m);
    }
    ChainMap::new(a0, t.complex.clone(), 0, comps).expect("lambda must be a chain map")
}

/// Lowest total degree at which homology of the truncated Tot provably
/// agrees with the untruncated one, assuming levels beyond the
/// truncation stay within the visible internal degree bound.
pub fn safe_from<S: Scalar>(t: &TotComplex<S>) -> Degree {
    let hi = t
        .levels
        .iter()
        .filter_map(|lv| lv.support().last().copied())
        .max()
        .unwrap_or(0);
    hi - t.levels.len() as Degree + 2
}

/// Acyclicity verdict for a cone, restricted to a degree window that the
/// truncation can actually certify.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WindowVerdict {
    /// All homology in [from, to] vanishes.
    Acyclic { from: Degree, to: Degree },
    /// Nonzero homology found at this degree inside the window.
    Fails { degree: Degree },
    /// The safe window misses the complex's support entirely.
    Indeterminate,
}

/// Check homology of the cone in degrees >= from (within its support).
pub fn cone_verdict_from<S: Scalar>(c: &Cone<S>, from: Degree) -> WindowVerdict {
    let sup = c.complex.support();
    let hi = match sup.last() {
        Some(&h) => h,
        None => return WindowVerdict::Acyclic { from, to: from },
    };
    if hi < from {
        return WindowVerdict::Indeterminate;
    }
    for t in from..=hi {
        if !c.complex.homology_at(t).is_zero() {
            return WindowVerdict::Fails { degree: t };
        }
    }
    WindowVerdict::Acyclic { from, to: hi }
}

/// Does the zero-section inclusion i_n induce a quasi-isomorphism
/// level(n) -> level(0)? Levels are honest bounded complexes, so this is
/// a full cone-homology check with no window caveat.
pub fn zero_section_qiso<S: Scalar, A: Cubical<S> + ?Sized>(a: &A, n: usize) -> bool {
    let f = a.act(&CubeMorphism::zero_inclusion(n));
    match ChainMap::new(a.level(n), a.level(0), 0, f.comps.clone()) {
        Ok(m) => cone(&m).complex.is_acyclic(),
        Err(_) => false,
    }
}

pub struct TotLambda<S: Scalar> {
    /// The nondegenerate complex A_* with its total complex and the
    /// degeneracy splittings that built it.
    pub nondeg: NondegData<S>,
    /// The comparison map A(0) -> Tot(A_*).
    pub lambda: ChainMap<S>,
    /// Whether every zero-section inclusion up to the truncation induces
    /// a quasi-isomorphism level(n) -> level(0) on the full levels.
    pub hypothesis_holds: bool,
    /// Cone-of-lambda acyclicity within the truncation-safe window.
    pub verdict: WindowVerdict,
}

/// Assemble Tot(A_*) for the nondegenerate complex A_* and the map
/// lambda: A(0) -> Tot(A_*), check the zero-section hypothesis by
/// homology comparison on the full levels, and judge the cone of lambda
/// inside the safe window. A window too narrow reports Indeterminate,
/// never a pass.
pub fn tot_lambda<S: Scalar, A: Cubical<S> + ?Sized>(a: &A) -> Result<TotLambda<S>, String> {
    let nondeg = nondegenerate_complex(a)?;
    let l = lambda(&nondeg.total);
    let hypothesis_holds = (1..=a.truncation()).all(|n| zero_section_qiso(a, n));
    let verdict = cone_verdict_from(&cone(&l), safe_from(&nondeg.total));
    Ok(TotLambda {
        nondeg,
        lambda: l,
        hypothesis_holds,
        verdict,
    })
}

/// Degeneracy splitting of one level at one internal degree.
pub struct SplitPart<S: Scalar> {
    /// Basis of A^0: the intersection of the kernels of the 1-faces,
    /// realized as the image of the projector.
    pub nondeg: Matrix<S>,
    /// Basis of A^degn: the span of the projection images.
    pub degen: Matrix<S>,
    /// The idempotent `(1 - pi^1_{n,n}) ... (1 - pi^1_{n,1})` projecting
    /// onto A^0 along A^degn.
    pub projector: Matrix<S>,
}

/// Degeneracy splitting of level n per internal degree, fully validated:
/// the `pi^eps` are commuting idempotents, the projector image matches
/// the joint kernel of the 1-faces, ranks add exactly, and the combined
/// basis spans the whole lattice (unit Smith divisors over Z).
pub fn splitting<S: Scalar, A: Cubical<S> + ?Sized>(
    a: &A,
    n: usize,
) -> Result<BTreeMap<Degree, SplitPart<S>>, String> {
    assert!(n >= 1);
    let here = a.level(n);
    let below = a.level(n - 1);
    let mut parts = BTreeMap::new();
    for &p in &here.support() {
        let r = here.rank(p);
        let mut pis: Vec<Matrix<S>> = Vec::new();
        let mut proj_images: Vec<Matrix<S>> = Vec::new();
        let mut one_faces: Vec<Matrix<S>> = Vec::new();
        for i in 1..=n {
            let pr = a
                .act(&CubeMorphism::proj(n, i))
                .component_at(p, &below, &here);
            let et1 = a
                .act(&CubeMorphism::eta(n - 1, i, true))
                .component_at(p, &here, &below);
            let et0 = a
                .act(&CubeMorphism::eta(n - 1, i, false))
                .component_at(p, &here, &below);
            let pi1 = pr.mul(&et1);
            let pi0 = pr.mul(&et0);
            if pi1.mul(&pi1) != pi1 || pi0.mul(&pi0) != pi0 {
                return Err(format!(
                    "pi at slot {i} not idempotent at level {n}, degree {p}"
                ));
            }
            pis.push(pi1);
            proj_images.push(pr);
            one_faces.push(et1);
        }
        for i in 0..pis.len() {
            for j in i + 1..pis.len() {
                if pis[i].mul(&pis[j]) != pis[j].mul(&pis[i]) {
                    return Err(format!(
                        "pi at slots {} and {} do not commute at level {n}, degree {p}",
                        i + 1,
                        j + 1
                    ));
                }
            }
        }
        let mut projector = Matrix::identity(r);
        for pi in &pis {
            projector = Matrix::identity(r).sub(pi).mul(&projector);
        }
        if projector.mul(&projector) != projector {
            return Err(format!("splitting projector not idempotent at degree {p}"));
        }
        let nondeg = snf::image_basis(&projector);
        let mut stacked = Matrix::zero(r, 0);
        for pr in &proj_images {
            stacked = stacked.hstack(pr);
        }
        let degen = snf::image_basis(&stacked);
        // The projector kills every degenerate generator.
        if !projector.mul(&stacked).is_zero() {
            return Err(format!("projector does not kill p*-images at degree {p}"));
        }
        // Its image lies in the joint kernel of the 1-faces and exhausts
        // it: both lattices are saturated, so equal rank forces equality.
        let mut faces = Matrix::zero(0, r);
        for et in &one_faces {
            faces = faces.vstack(et);
        }
        if !faces.mul(&nondeg).is_zero() {
            return Err(format!(
                "projector image not killed by 1-faces at degree {p}"
            ));
        }
        if snf::kernel_basis(&faces).cols() != nondeg.cols() {
            return Err(format!(
                "nondegenerate part misses kernel vectors at degree {p}"
            ));
        }
        if nondeg.cols() + degen.cols() != r {
            return Err(format!(
                "splitting ranks {} + {} != {} at degree {p}",
                nondeg.cols(),
                degen.cols(),
                r
            ));
        }
        let joint = nondeg.hstack(&degen);
        match snf::smith_normal_form(&joint) {
            Ok(d) => {
                if !(0..r).all(|k| d.divisors.get(k).map(S::is_unit).unwrap_or(false)) {
                    return Err(format!(
                        "splitting does not span the lattice at degree {p}"
                    ));
                }
            }
            Err(_) => {
                if snf::rank(&joint) != r {
                    return Err(format!("splitting not full rank at degree {p}"));
                }
            }
        }
        parts.insert(
            p,
            SplitPart {
                nondeg,
                degen,
                projector,
            },
        );
    }
    Ok(parts)
}

/// The nondegenerate complex of a cubical object.
pub struct NondegData<S: Scalar> {
    /// Total complex of the A^0 summands with restricted differentials
    /// (the subcomplex presentation, isomorphic to the quotient).
    pub total: TotComplex<S>,
    /// Inclusion of that subcomplex into the full total complex.
    pub include: ChainMap<S>,
    /// Splitting data per level 1..=N (index n-1), per internal degree.
    pub splittings: Vec<BTreeMap<Degree, SplitPart<S>>>,
}

/// Build the nondegenerate complex, verifying the degeneracy facts
/// exactly along the way: the cube differential maps A^degn into A^degn
/// (zero component in the nondegenerate summand below, hence zero in the
/// quotient) and maps A^0 into A^0; and the differential induced on the
/// quotient, written in the joint basis, coincides with the subcomplex
/// differential, which is the chain-map identity for the mutually
/// inverse quotient/subcomplex isomorphisms.
pub fn nondegenerate_complex<S: Scalar, A: Cubical<S> + ?Sized>(
    a: &A,
) -> Result<NondegData<S>, String> {
    let n_max = a.truncation();
    let full = tot(a)?;
    let mut splittings = Vec::new();
    for n in 1..=n_max {
        splittings.push(splitting(a, n)?);
    }
    let part = |n: usize, p: Degree| -> Option<&SplitPart<S>> {
        if n == 0 {
            None
        } else {
            splittings[n - 1].get(&p)
        }
    };
    let basis = |n: usize, p: Degree| -> Matrix<S> {
        match part(n, p) {
            Some(sp) => sp.nondeg.clone(),
            None => Matrix::identity(a.level(n).rank(p)),
        }
    };

    for n in 1..=n_max {
        let here = a.level(n);
        let below = a.level(n - 1);
        let face = cube_faces(a, n);
        for &p in &here.support() {
            let f = face.component_at(p, &here, &below);
            let k_here = basis(n, p);
            let k_below = basis(n - 1, p);
            let d_below = match part(n - 1, p) {
                Some(sp) => sp.degen.clone(),
                None => Matrix::zero(below.rank(p), 0),
            };
            // d(A^0) lands in A^0, with a unique induced matrix.
            let w = match snf::solve_matrix(&k_below, &f.mul(&k_here)) {
                Some(w) => w,
                None => {
                    return Err(format!(
                        "cube differential leaves the nondegenerate part at level {n}, degree {p}"
                    ))
                }
            };
            // Quotient presentation: coordinates of d in the joint basis
            // must reproduce w on the A^0 block.
            let joint = k_below.hstack(&d_below);
            let x = snf::solve_matrix(&joint, &f.mul(&k_here)).ok_or_else(|| {
                format!("joint basis does not span the d-image at level {n}, degree {p}")
            })?;
            let k_rows: Vec<usize> = (0..k_below.cols()).collect();
            let all_cols: Vec<usize> = (0..x.cols()).collect();
            if x.submatrix(&k_rows, &all_cols) != w {
                return Err(format!(
                    "quotient and subcomplex differentials disagree at level {n}, degree {p}"
                ));
            }
            if let Some(sp) = part(n, p) {
                // d(A^degn) stays degenerate: it solves against the
                // degenerate basis below and the projector kills it.
                let img = f.mul(&sp.degen);
                if snf::solve_matrix(&d_below, &img).is_none() {
                    return Err(format!(
                        "degenerate image not degenerate at level {n}, degree {p}"
                    ));
                }
                let proj_below = match part(n - 1, p) {
                    Some(b) => b.projector.clone(),
                    None => Matrix::identity(below.rank(p)),
                };
                if !proj_below.mul(&img).is_zero() {
                    return Err(format!(
                        "degenerate image survives the projector at level {n}, degree {p}"
                    ));
                }
                // Internal differential preserves both summands.
                if here.rank(p + 1) > 0 {
                    let d_int = here.d(p);
                    if snf::solve_matrix(&basis(n, p + 1), &d_int.mul(&sp.nondeg)).is_none() {
                        return Err(format!(
                            "internal differential leaves the nondegenerate part at level {n}, degree {p}"
                        ));
                    }
                    let degen_up = match part(n, p + 1) {
                        Some(up) => up.degen.clone(),
                        None => Matrix::zero(here.rank(p + 1), 0),
                    };
                    if snf::solve_matrix(&degen_up, &d_int.mul(&sp.degen)).is_none() {
                        return Err(format!(
                            "internal differential leaves the degenerate part at level {n}, degree {p}"
                        ));
                    }
                }
            }
        }
    }

    // The A^0 summands form a cubical object under the eta actions; its
    // total complex is the subcomplex presentation.
    struct Sub<'a, S: Scalar, A: Cubical<S> + ?Sized> {
        a: &'a A,
        bases: Vec<BTreeMap<Degree, Matrix<S>>>,
    }
    impl<'a, S: Scalar, A: Cubical<S> + ?Sized> Cubical<S> for Sub<'a, S, A> {
        fn truncation(&self) -> usize {
            self.a.truncation()
        }
        fn level(&self, n: usize) -> Complex<S> {
            let orig = self.a.level(n);
            let mut modules = GradedModule::new();
            for (&p, b) in &self.bases[n] {
                modules.set_rank(p, b.cols());
            }
            let mut diffs = BTreeMap::new();
            for (&p, b) in &self.bases[n] {
                if let Some(bn) = self.bases[n].get(&(p + 1)) {
                    let w = snf::solve_matrix(bn, &orig.d(p).mul(b))
                        .expect("internal differential preserves the summand");
                    diffs.insert(p, w);
                }
            }
            Complex::new(modules, diffs).expect("restricted differential squares to zero")
        }
        fn act(&self, f: &CubeMorphism) -> GradedMap<S> {
            // Only eta actions reach this; those preserve A^0 because an
            // eta after an eta-at-1 factors through an eta-at-1.
            let big = self.a.act(f);
            let src_level = self.a.level(f.tgt);
            let tgt_level = self.a.level(f.src);
            let mut comps = BTreeMap::new();
            for (&p, b) in &self.bases[f.tgt] {
                let restricted = big.component_at(p, &src_level, &tgt_level).mul(b);
                if let Some(bt) = self.bases[f.src].get(&p) {
                    let w = snf::solve_matrix(bt, &restricted)
                        .expect("action preserves the nondegenerate summand");
                    if !w.is_zero() {
                        comps.insert(p, w);
                    }
                }
            }
            GradedMap { degree: 0, comps }
        }
        fn extended(&self) -> bool {
            self.a.extended()
        }
    }

    let mut bases: Vec<BTreeMap<Degree, Matrix<S>>> = Vec::new();
    for n in 0..=n_max {
        let mut by_degree = BTreeMap::new();
        for &p in &a.level(n).support() {
            by_degree.insert(p, basis(n, p));
        }
        bases.push(by_degree);
    }
    let sub = Sub { a, bases };
    let sub_tot = tot(&sub)?;

    let mut comps = BTreeMap::new();
    for &t in &sub_tot.complex.support() {
        let mut m = Matrix::zero(full.complex.rank(t), sub_tot.complex.rank(t));
        for (n, p, _r) in sub_tot.blocks(t) {
            let b = &sub.bases[n][&p];
            copy_into(&mut m, full.offset(t, n), sub_tot.offset(t, n), b);
        }
        comps.insert(t, m);
    }
    let include = ChainMap::new(sub_tot.complex.clone(), full.complex.clone(), 0, comps)
        .map_err(|e| format!("nondegenerate inclusion: {e}"))?;

    Ok(NondegData {
        total: sub_tot,
        include,
        splittings,
    })
}

/// Diagonal tensor of two cubical objects: level n is the tensor of the
/// two level-n complexes, a morphism acts as the tensor of its actions.
pub struct DiagTensor<'a, S: Scalar, A: Cubical<S> + ?Sized, B: Cubical<S> + ?Sized> {
    pub a: &'a A,
    pub b: &'a B,
    _marker: core::marker::PhantomData<S>,
}

impl<'a, S: Scalar, A: Cubical<S> + ?Sized, B: Cubical<S> + ?Sized> DiagTensor<'a, S, A, B> {
    pub fn new(a: &'a A, b: &'a B) -> Self {
        assert_eq!(a.truncation(), b.truncation(), "truncation mismatch");
        DiagTensor {
            a,
            b,
            _marker: core::marker::PhantomData,
        }
    }
}

impl<'a, S: Scalar, A: Cubical<S> + ?Sized, B: Cubical<S> + ?Sized> Cubical<S>
    for DiagTensor<'a, S, A, B>
{
    fn truncation(&self) -> usize {
        self.a.truncation()
    }

    fn level(&self, n: usize) -> Complex<S> {
        TensorComplex::new(&self.a.level(n), &self.b.level(n)).complex
    }

    fn act(&self, f: &CubeMorphism) -> GradedMap<S> {
        let fa = self.a.act(f);
        let fb = self.b.act(f);
        let sa = self.a.level(f.tgt);
        let ta = self.a.level(f.src);
        let sb = self.b.level(f.tgt);
        let tb = self.b.level(f.src);
        let source = TensorComplex::new(&sa, &sb);
        let target = TensorComplex::new(&ta, &tb);
        let mut comps = BTreeMap::new();
        for &t in &source.complex.support() {
            let rows = target.complex.rank(t);
            let cols = source.complex.rank(t);
            if rows == 0 || cols == 0 {
                continue;
            }
            let mut m = Matrix::zero(rows, cols);
            for (i, j) in source.degree_blocks(t) {
                let ma = fa.component_at(i, &sa, &ta);
                let mb = fb.component_at(j, &sb, &tb);
                if ma.rows() == 0 || mb.rows() == 0 {
                    continue;
                }
                copy_into(
                    &mut m,
                    target.offset(t, i),
                    source.offset(t, i),
                    &ma.kronecker(&mb),
                );
            }
            if !m.is_zero() {
                comps.insert(t, m);
            }
        }
        GradedMap { degree: 0, comps }
    }

    fn extended(&self) -> bool {
        self.a.extended() && self.b.extended()
    }
}

/// The cup product assembled on the part of Tot(A) ⊗ Tot(B) whose level
/// sum stays within the truncation. That part is closed under the total
/// differential (differentials never raise levels), so it is an honest
/// subcomplex; beyond it the truncated target cannot receive the map.
pub struct Cup<S: Scalar> {
    /// The level-sum-bounded subcomplex of Tot(A) ⊗ Tot(B).
    pub source: Complex<S>,
    /// Its inclusion into the full tensor complex of the two Tots.
    pub include: ChainMap<S>,
    /// The cup chain map into Tot(A ⊗diag B), with block component
    /// A(p1_{a,b}) ⊗ B(p2_{a,b}) on the (level a, level b) block.
    pub map: ChainMap<S>,
}

pub fn cup_product<S: Scalar, A: Cubical<S> + ?Sized, B: Cubical<S> + ?Sized>(
    a: &A,
    b: &B,
) -> Result<Cup<S>, String> {
    let n_max = a.truncation();
    assert_eq!(n_max, b.truncation(), "truncation mismatch");
    let ta = tot(a)?;
    let tb = tot(b)?;
    let diag = DiagTensor::new(a, b);
    let td = tot(&diag)?;
    let full = TensorComplex::new(&ta.complex, &tb.complex);

    let a_levels: Vec<Complex<S>> = (0..=n_max).map(|n| a.level(n)).collect();
    let b_levels: Vec<Complex<S>> = (0..=n_max).map(|n| b.level(n)).collect();
    let level_tensors: Vec<TensorComplex<S>> = (0..=n_max)
        .map(|n| TensorComplex::new(&a_levels[n], &b_levels[n]))
        .collect();

    // Per basis index of Tot^u: (level, internal degree, index in block).
    let expand = |t: &TotComplex<S>, u: Degree| -> Vec<(usize, Degree, usize)> {
        let mut v = Vec::new();
        for (n, p, r) in t.blocks(u) {
            for k in 0..r {
                v.push((n, p, k));
            }
        }
        v
    };

    // Selected columns of the full tensor complex per total degree, with
    // the block data needed to emit each cup image column.
    type ColData = (usize, Degree, usize, usize, Degree, usize);
    let mut selected: BTreeMap<Degree, Vec<usize>> = BTreeMap::new();
    let mut col_data: BTreeMap<Degree, Vec<ColData>> = BTreeMap::new();
    for &t in &full.complex.support() {
        let mut sel = Vec::new();
        let mut data = Vec::new();
        for (u, v) in full.degree_blocks(t) {
            let base = full.offset(t, u);
            let xs = expand(&ta, u);
            let ys = expand(&tb, v);
            for (xi, &(la, pa, ia)) in xs.iter().enumerate() {
                for (yi, &(lb, pb, ib)) in ys.iter().enumerate() {
                    if la + lb <= n_max {
                        sel.push(base + xi * ys.len() + yi);
                        data.push((la, pa, ia, lb, pb, ib));
                    }
                }
            }
        }
        if !sel.is_empty() {
            selected.insert(t, sel);
            col_data.insert(t, data);
        }
    }

    // The restricted source complex and its inclusion.
    let mut modules = GradedModule::new();
    for (&t, sel) in &selected {
        modules.set_rank(t, sel.len());
    }
    let mut diffs = BTreeMap::new();
    for (&t, sel) in &selected {
        let d_full = full.complex.d(t);
        let up: Vec<usize> = selected.get(&(t + 1)).cloned().unwrap_or_default();
        // Closure check: unselected rows must vanish on selected columns.
        let mut in_up = alloc::vec![false; d_full.rows()];
        for &r in &up {
            in_up[r] = true;
        }
        for &c in sel {
            for r in 0..d_full.rows() {
                if !in_up[r] && !d_full.get(r, c).is_zero() {
                    return Err(format!("level-sum window is not a subcomplex at degree {t}"));
                }
            }
        }
        diffs.insert(t, d_full.submatrix(&up, sel));
    }
    let source = Complex::new(modules, diffs).map_err(|e| format!("cup source: {e}"))?;

    let mut incl_comps = BTreeMap::new();
    for (&t, sel) in &selected {
        let mut m = Matrix::zero(full.complex.rank(t), sel.len());
        for (j, &r) in sel.iter().enumerate() {
            m.set(r, j, S::one());
        }
        incl_comps.insert(t, m);
    }
    let include = ChainMap::new(source.clone(), full.complex.clone(), 0, incl_comps)
        .map_err(|e| format!("cup source inclusion: {e}"))?;

    // The cup map, column by column.
    let mut comps = BTreeMap::new();
    for (&t, data) in &col_data {
        let mut m = Matrix::zero(td.complex.rank(t), data.len());
        for (j, &(la, pa, ia, lb, pb, ib)) in data.iter().enumerate() {
            let big = la + lb;
            let ma = a
                .act(&CubeMorphism::keep_first(la, lb))
                .component_at(pa, &a_levels[la], &a_levels[big]);
            let mb = b
                .act(&CubeMorphism::keep_last(la, lb))
                .component_at(pb, &b_levels[lb], &b_levels[big]);
            if ma.rows() == 0 || mb.rows() == 0 {
                continue;
            }
            let row_base = td.offset(t, big) + level_tensors[big].offset(pa + pb, pa);
            let b_rank = b_levels[big].rank(pb);
            for ra in 0..ma.rows() {
                for rb in 0..mb.rows() {
                    let v = ma.get(ra, ia).clone() * mb.get(rb, ib).clone();
                    if !v.is_zero() {
                        m.set(row_base + ra * b_rank + rb, j, v);
                    }
                }
            }
        }
        if !m.is_zero() {
            comps.insert(t, m);
        }
    }
    let map = ChainMap::new(source.clone(), td.complex.clone(), 0, comps)
        .map_err(|e| format!("cup product is not a chain map: {e}"))?;

    Ok(Cup {
        source,
        include,
        map,
    })
}

/// Matrices of act(h) · act(g) for composable cube morphisms (g applied
/// first in the cube, so its action applies first contravariantly),
/// one per internal degree of the source level.
fn composed_action<S: Scalar, T: Cubical<S> + ?Sized>(
    obj: &T,
    g: &CubeMorphism,
    h: &CubeMorphism,
) -> BTreeMap<Degree, Matrix<S>> {
    assert_eq!(g.src, h.tgt, "cube arity mismatch");
    let from_lv = obj.level(g.tgt);
    let mid_lv = obj.level(g.src);
    let to_lv = obj.level(h.src);
    let ag = obj.act(g);
    let ah = obj.act(h);
    let mut out = BTreeMap::new();
    for &p in &from_lv.support() {
        let m = ah
            .component_at(p, &mid_lv, &to_lv)
            .mul(&ag.component_at(p, &from_lv, &mid_lv));
        out.insert(p, m);
    }
    out
}

fn single_action<S: Scalar, T: Cubical<S> + ?Sized>(
    obj: &T,
    f: &CubeMorphism,
) -> BTreeMap<Degree, Matrix<S>> {
    let from_lv = obj.level(f.tgt);
    let to_lv = obj.level(f.src);
    let af = obj.act(f);
    from_lv
        .support()
        .into_iter()
        .map(|p| (p, af.component_at(p, &from_lv, &to_lv)))
        .collect()
}

/// Associativity of the cup product, reduced factorwise: on each level
/// triple both composites factor through three keep-projection
/// composites per tensor slot, verified as cube-table identities and as
/// exact matrix identities on every internal degree. Returns the number
/// of level triples checked.
pub fn cup_associativity<S: Scalar, A, B, C>(a: &A, b: &B, c: &C) -> Result<usize, String>
where
    A: Cubical<S> + ?Sized,
    B: Cubical<S> + ?Sized,
    C: Cubical<S> + ?Sized,
{
    let n_max = a.truncation();
    assert!(b.truncation() == n_max && c.truncation() == n_max);
    let mut checked = 0;
    for la in 0..=n_max {
        for lb in 0..=n_max - la {
            for lc in 0..=n_max - la - lb {
                // First slot: keep the first la either way.
                let a_outer = CubeMorphism::keep_first(la + lb, lc);
                let a_inner = CubeMorphism::keep_first(la, lb);
                let a_whole = CubeMorphism::keep_first(la, lb + lc);
                if a_inner.compose_after(&a_outer) != a_whole {
                    return Err(format!("first-slot tables differ at ({la},{lb},{lc})"));
                }
                if composed_action(a, &a_inner, &a_outer) != single_action(a, &a_whole) {
                    return Err(format!("first-slot actions differ at ({la},{lb},{lc})"));
                }
                // Middle slot: slots la+1..la+lb either way.
                let l_inner = CubeMorphism::keep_last(la, lb);
                let l_outer = a_outer.clone();
                let r_inner = CubeMorphism::keep_first(lb, lc);
                let r_outer = CubeMorphism::keep_last(la, lb + lc);
                if l_inner.compose_after(&l_outer) != r_inner.compose_after(&r_outer) {
                    return Err(format!("middle-slot tables differ at ({la},{lb},{lc})"));
                }
                if composed_action(b, &l_inner, &l_outer) != composed_action(b, &r_inner, &r_outer)
                {
                    return Err(format!("middle-slot actions differ at ({la},{lb},{lc})"));
                }
                // Last slot: keep the last lc either way.
                let c_whole = CubeMorphism::keep_last(la + lb, lc);
                let c_inner = CubeMorphism::keep_last(lb, lc);
                let c_outer = CubeMorphism::keep_last(la, lb + lc);
                if c_inner.compose_after(&c_outer) != c_whole {
                    return Err(format!("last-slot tables differ at ({la},{lb},{lc})"));
                }
                if composed_action(c, &c_inner, &c_outer) != single_action(c, &c_whole) {
                    return Err(format!("last-slot actions differ at ({la},{lb},{lc})"));
                }
                checked += 1;
            }
        }
    }
    Ok(checked)
}

/// Validate functoriality of a cubical action: identities act as
/// identities, every generator acts as a chain map, and `samples` random
/// composable word pairs satisfy act(g ∘ f) = act(f) · act(g).
pub fn validate_cubical<S: Scalar, A: Cubical<S> + ?Sized, R: RngCore>(
    a: &A,
    rng: &mut R,
    samples: usize,
) -> Result<usize, String> {
    let n_max = a.truncation();
    for n in 0..=n_max {
        let lv = a.level(n);
        let act = a.act(&CubeMorphism::identity(n));
        for &p in &lv.support() {
            if !act.component_at(p, &lv, &lv).is_identity() {
                return Err(format!("identity does not act as identity at level {n}"));
            }
        }
    }
    for f in all_generators(n_max, a.extended()) {
        let act = a.act(&f);
        ChainMap::new(a.level(f.tgt), a.level(f.src), 0, act.comps.clone())
            .map_err(|_| format!("generator action is not a chain map: {f:?}"))?;
    }
    let mut checked = 0;
    while checked < samples {
        let f = match random_morphism(rng, n_max, a.extended(), 3) {
            Some(f) => f,
            None => continue,
        };
        let g = match random_morphism_from(rng, f.tgt, n_max, a.extended(), 3) {
            Some(g) => g,
            None => continue,
        };
        let gf = g.compose_after(&f);
        let lhs = single_action(a, &gf);
        let rhs = composed_action(a, &g, &f);
        if lhs != rhs {
            return Err(format!("functoriality fails on {gf:?}"));
        }
        checked += 1;
    }
    Ok(checked)
}

/// All generators whose arities stay within the truncation.
pub fn all_generators(n_max: usize, extended: bool) -> Vec<CubeMorphism> {
    let mut v = Vec::new();
    for n in 0..=n_max {
        if n + 1 <= n_max {
            for i in 1..=n + 1 {
                v.push(CubeMorphism::eta(n, i, false));
                v.push(CubeMorphism::eta(n, i, true));
            }
        }
        for i in 1..=n {
            v.push(CubeMorphism::proj(n, i));
            v.push(CubeMorphism::tau(n, i));
            if i < n {
                let mut img: Vec<usize> = (1..=n).collect();
                img.swap(i - 1, i);
                v.push(CubeMorphism::perm(n, &img));
                if extended {
                    v.push(CubeMorphism::mul(n, i));
                }
            }
        }
    }
    v
}

/// Random short word starting at a random arity within the truncation.
pub fn random_morphism<R: RngCore>(
    rng: &mut R,
    n_max: usize,
    extended: bool,
    len: usize,
) -> Option<CubeMorphism> {
    let n = gen::uniform(rng, n_max + 1);
    random_morphism_from(rng, n, n_max, extended, len)
}

/// Random short word starting at the given arity.
pub fn random_morphism_from<R: RngCore>(
    rng: &mut R,
    from: usize,
    n_max: usize,
    extended: bool,
    len: usize,
) -> Option<CubeMorphism> {
    let mut f = CubeMorphism::identity(from);
    let steps = 1 + gen::uniform(rng, len);
    for _ in 0..steps {
        let n = f.tgt;
        let mut options: Vec<CubeMorphism> = Vec::new();
        if n + 1 <= n_max {
            let i = 1 + gen::uniform(rng, n + 1);
            options.push(CubeMorphism::eta(n, i, gen::uniform(rng, 2) == 1));
        }
        if n >= 1 {
            options.push(CubeMorphism::proj(n, 1 + gen::uniform(rng, n)));
            options.push(CubeMorphism::tau(n, 1 + gen::uniform(rng, n)));
        }
        if n >= 2 {
            let mut img: Vec<usize> = (1..=n).collect();
            for k in (1..n).rev() {
                let j = gen::uniform(rng, k + 1);
                img.swap(k, j);
            }
            options.push(CubeMorphism::perm(n, &img));
            if extended {
                options.push(CubeMorphism::mul(n, 1 + gen::uniform(rng, n - 1)));
            }
        }
        if options.is_empty() {
            return None;
        }
        let g = options.swap_remove(gen::uniform(rng, options.len()));
        f = g.compose_after(&f);
    }
    Some(f)
}
