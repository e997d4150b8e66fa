//! Seeded random generators for matrices, complexes with known homology,
//! cycles and chain maps. All sampling is driven by a caller-supplied
//! [`RngCore`], so every generated instance is reproducible from a seed.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::complex::{ChainMap, Complex, GradedMap, Homology, HomComplex};
use crate::graded::{Degree, GradedModule};
use crate::matrix::Matrix;
use crate::ring::{RingTag, Scalar};
use crate::snf;

/// Uniform draw from `0..n` (rejection sampling, `n > 0`).
pub fn uniform<R: RngCore>(rng: &mut R, n: usize) -> usize {
    assert!(n > 0);
    let n = n as u64;
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return (v % n) as usize;
        }
    }
}

/// Uniform integer scalar in `[-bound, bound]`.
pub fn int_in<S: Scalar, R: RngCore>(rng: &mut R, bound: i64) -> S {
    let span = (2 * bound + 1) as usize;
    S::from_i64(uniform(rng, span) as i64 - bound)
}

pub fn rand_matrix<S: Scalar, R: RngCore>(
    rng: &mut R,
    rows: usize,
    cols: usize,
    bound: i64,
) -> Matrix<S> {
    let data = (0..rows * cols).map(|_| int_in(rng, bound)).collect();
    Matrix::new(rows, cols, data)
}

/// Random unimodular matrix together with its inverse, built as a product
/// of elementary shears and swaps so the inverse is exact by construction.
pub fn rand_unimodular_pair<S: Scalar, R: RngCore>(
    rng: &mut R,
    n: usize,
    steps: usize,
    bound: i64,
) -> (Matrix<S>, Matrix<S>) {
    let mut u = Matrix::identity(n);
    let mut uinv = Matrix::identity(n);
    if n < 2 {
        return (u, uinv);
    }
    for _ in 0..steps {
        let i = uniform(rng, n);
        let mut j = uniform(rng, n - 1);
        if j >= i {
            j += 1;
        }
        if uniform(rng, 4) == 0 {
            // u <- P u, so uinv <- uinv P.
            u.swap_rows(i, j);
            uinv.swap_cols(i, j);
        } else {
            // u <- (I + c e_ij) u adds c * row j to row i;
            // uinv <- uinv (I - c e_ij) subtracts c * col i from col j.
            let c: S = int_in(rng, bound);
            u.row_sub(i, j, &(S::zero() - c.clone()));
            uinv.col_sub(j, i, &c);
        }
    }
    (u, uinv)
}

/// Shape parameters for [`random_complex`].
#[derive(Clone, Debug)]
pub struct ComplexSpec {
    /// Lowest degree pieces may occupy.
    pub lo: Degree,
    /// Highest degree pieces may occupy.
    pub hi: Degree,
    /// Number of elementary pieces summed together.
    pub pieces: usize,
    /// Basis-mixing shear steps per degree (0 keeps the split basis).
    pub mix_steps: usize,
    /// Allow pieces with torsion homology.
    pub torsion: bool,
}

impl ComplexSpec {
    pub fn new(lo: Degree, hi: Degree, pieces: usize) -> Self {
        ComplexSpec {
            lo,
            hi,
            pieces,
            mix_steps: 12,
            torsion: true,
        }
    }
}

/// Random bounded complex assembled from spheres, acyclic disks and
/// torsion disks, then rewritten in a random unimodular basis per degree.
/// Returns the complex with its homology, which is exact by construction:
/// the basis change is invertible over the ring, so homology equals that
/// of the split model.
pub fn random_complex<S: Scalar, R: RngCore>(
    rng: &mut R,
    spec: &ComplexSpec,
) -> (Complex<S>, BTreeMap<Degree, Homology<S>>) {
    assert!(spec.lo <= spec.hi);
    let span = (spec.hi - spec.lo + 1) as usize;
    let mut modules = GradedModule::new();
    // Split-model differential entries: (degree n, row in n+1, col in n, m).
    let mut entries: Vec<(Degree, usize, usize, S)> = Vec::new();
    let mut free: BTreeMap<Degree, usize> = BTreeMap::new();
    let mut torsion_at: BTreeMap<Degree, Vec<S>> = BTreeMap::new();

    for _ in 0..spec.pieces {
        let kind = uniform(rng, if spec.torsion && span > 1 { 3 } else { 2 });
        match kind {
            0 => {
                // Sphere: one generator, surviving to homology.
                let n = spec.lo + uniform(rng, span) as Degree;
                modules.set_rank(n, modules.rank(n) + 1);
                *free.entry(n).or_insert(0) += 1;
            }
            1 if span > 1 => {
                // Disk: d = 1, acyclic.
                let n = spec.lo + uniform(rng, span - 1) as Degree;
                let col = modules.rank(n);
                let row = modules.rank(n + 1);
                modules.set_rank(n, col + 1);
                modules.set_rank(n + 1, row + 1);
                entries.push((n, row, col, S::one()));
            }
            _ => {
                // Torsion disk: d = m >= 2, H^{n+1} = Z/m over Z.
                let n = spec.lo + uniform(rng, span - 1) as Degree;
                let m = S::from_i64(2 + uniform(rng, 5) as i64);
                let col = modules.rank(n);
                let row = modules.rank(n + 1);
                modules.set_rank(n, col + 1);
                modules.set_rank(n + 1, row + 1);
                if S::RING == RingTag::Integers {
                    torsion_at.entry(n + 1).or_default().push(m.clone());
                }
                entries.push((n, row, col, m));
            }
        }
    }

    let mut diffs: BTreeMap<Degree, Matrix<S>> = BTreeMap::new();
    for &(n, row, col, ref m) in &entries {
        let d = diffs
            .entry(n)
            .or_insert_with(|| Matrix::zero(modules.rank(n + 1), modules.rank(n)));
        d.set(row, col, m.clone());
    }

    // Random change of basis g_n per degree: d' = g_{n+1} d g_n^{-1}.
    let mut bases: BTreeMap<Degree, (Matrix<S>, Matrix<S>)> = BTreeMap::new();
    for &n in &modules.support() {
        bases.insert(
            n,
            rand_unimodular_pair(rng, modules.rank(n), spec.mix_steps, 2),
        );
    }
    let id0 = (Matrix::identity(0), Matrix::identity(0));
    let diffs = diffs
        .into_iter()
        .map(|(n, d)| {
            let g_next = &bases.get(&(n + 1)).unwrap_or(&id0).0;
            let g_inv = &bases.get(&n).unwrap_or(&id0).1;
            (n, g_next.mul(&d).mul(g_inv))
        })
        .collect();

    let complex = Complex::new(modules, diffs).expect("split model squares to zero");

    let mut homology = BTreeMap::new();
    let degrees: Vec<Degree> = free
        .keys()
        .chain(torsion_at.keys())
        .copied()
        .collect::<alloc::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    for n in degrees {
        let free_rank = free.get(&n).copied().unwrap_or(0);
        // Normalize the collected orders to invariant-factor form.
        let ms = torsion_at.get(&n).cloned().unwrap_or_default();
        let k = ms.len();
        let mut diag = Matrix::zero(k, k);
        for (i, m) in ms.into_iter().enumerate() {
            diag.set(i, i, m);
        }
        let torsion = snf::diagonalize(&diag)
            .divisors
            .into_iter()
            .filter(|d| !d.is_unit())
            .collect::<Vec<_>>();
        if free_rank > 0 || !torsion.is_empty() {
            homology.insert(n, Homology { free_rank, torsion });
        }
    }
    (complex, homology)
}

/// Random cycle of degree `n`: an integer combination of the (saturated)
/// kernel basis of `d^n`. `None` when there are no cycles in degree `n`.
pub fn random_cycle<S: Scalar, R: RngCore>(
    rng: &mut R,
    c: &Complex<S>,
    n: Degree,
    bound: i64,
) -> Option<Vec<S>> {
    let k = snf::kernel_basis(&c.d(n));
    if k.cols() == 0 {
        return None;
    }
    let coeffs: Vec<S> = (0..k.cols()).map(|_| int_in(rng, bound)).collect();
    Some(k.mul_vec(&coeffs))
}

/// Random degree-`k` chain map `X -> Y`: an integer combination of the
/// kernel basis of the Hom-complex differential in degree `k`.
pub fn random_chain_map<S: Scalar, R: RngCore>(
    rng: &mut R,
    hom: &HomComplex<S>,
    k: Degree,
    bound: i64,
) -> ChainMap<S> {
    let v = random_cycle(rng, &hom.complex, k, bound)
        .unwrap_or_else(|| vec![S::zero(); hom.complex.rank(k)]);
    let f = hom.unflatten(k, &v);
    ChainMap::new(hom.source.clone(), hom.target.clone(), k, f.comps)
        .expect("kernel elements of the hom differential are chain maps")
}

/// Random graded map of degree `k` with no chain condition (homotopy data).
pub fn random_graded_map<S: Scalar, R: RngCore>(
    rng: &mut R,
    x: &Complex<S>,
    y: &Complex<S>,
    k: Degree,
    bound: i64,
) -> GradedMap<S> {
    let mut comps = BTreeMap::new();
    for &p in &x.support() {
        let rows = y.rank(p + k);
        if rows > 0 {
            let m = rand_matrix(rng, rows, x.rank(p), bound);
            if !m.is_zero() {
                comps.insert(p, m);
            }
        }
    }
    GradedMap { degree: k, comps }
}
