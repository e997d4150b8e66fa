//! Twisted complexes over a DG category: the objects of Pre-Tr(C).
//!
//! A twisted complex is a finite family of objects `E_i` indexed by a
//! window of integers together with twists `e_ij: E_j -> E_i` of degree
//! `j - i + 1` satisfying the Maurer-Cartan equation
//! `(-1)^i d e_ij + Σ_k e_ik ∘ e_kj = 0`.
//! Morphisms of degree `n` have components `φ_ij: E_j -> F_i` of degree
//! `j - i + n`, with differential
//! `∂(φ)_ij = (-1)^i d(φ_ij) + Σ_k f_ik ∘ φ_kj - (-1)^n Σ_k φ_ik ∘ e_kj`
//! and composition `(ψ ∘ φ)_ij = Σ_k ψ_ik ∘ φ_kj`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::complex::Complex;
use crate::dg::{Biproduct, DgCategory, Mor};
use crate::gen;
use crate::graded::{Degree, GradedModule};
use crate::matrix::Matrix;
use crate::ring::{sign_pow, Scalar};

/// Twisted complex: entries `E_i` (object ids of the ambient category) on a
/// finite set of indices, with twists `e_ij: E_j -> E_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedComplex<S: Scalar> {
    entries: BTreeMap<Degree, usize>,
    twists: BTreeMap<(Degree, Degree), Mor<S>>,
}

impl<S: Scalar> TwistedComplex<S> {
    pub fn new(entries: BTreeMap<Degree, usize>, twists: BTreeMap<(Degree, Degree), Mor<S>>) -> Self {
        TwistedComplex {
            entries,
            twists: twists.into_iter().filter(|(_, m)| !m.is_zero()).collect(),
        }
    }

    /// `i_0(X)`: the one-entry twisted complex at index 0.
    pub fn single(object: usize) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(0, object);
        TwistedComplex {
            entries,
            twists: BTreeMap::new(),
        }
    }

    pub fn entries(&self) -> &BTreeMap<Degree, usize> {
        &self.entries
    }

    pub fn entry(&self, i: Degree) -> Option<usize> {
        self.entries.get(&i).copied()
    }

    pub fn twists(&self) -> &BTreeMap<(Degree, Degree), Mor<S>> {
        &self.twists
    }

    pub fn twist(&self, c: &DgCategory<S>, i: Degree, j: Degree) -> Option<Mor<S>> {
        match (self.twists.get(&(i, j)), self.entry(i), self.entry(j)) {
            (Some(m), _, _) => Some(m.clone()),
            (None, Some(ei), Some(ej)) => Some(c.zero_mor(ej, ei, j - i + 1)),
            _ => None,
        }
    }

    pub fn window(&self) -> Option<(Degree, Degree)> {
        let lo = self.entries.keys().next()?;
        let hi = self.entries.keys().last()?;
        Some((*lo, *hi))
    }
}

/// Degree-`n` morphism of twisted complexes in componentwise coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreTrMor<S: Scalar> {
    pub degree: Degree,
    /// `(i, j) -> φ_ij: E_j -> F_i` of degree `j - i + n`.
    pub comps: BTreeMap<(Degree, Degree), Mor<S>>,
}

impl<S: Scalar> PreTrMor<S> {
    pub fn zero(degree: Degree) -> Self {
        PreTrMor {
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(Mor::is_zero)
    }

    pub fn add(&self, other: &PreTrMor<S>) -> PreTrMor<S> {
        assert_eq!(self.degree, other.degree);
        let mut comps = self.comps.clone();
        for (k, m) in &other.comps {
            match comps.get_mut(k) {
                Some(cur) => *cur = cur.add(m),
                None => {
                    comps.insert(*k, m.clone());
                }
            }
        }
        PreTrMor {
            degree: self.degree,
            comps: comps.into_iter().filter(|(_, m)| !m.is_zero()).collect(),
        }
    }

    pub fn scale(&self, s: &S) -> PreTrMor<S> {
        PreTrMor {
            degree: self.degree,
            comps: self.comps.iter().map(|(&k, m)| (k, m.scale(s))).collect(),
        }
    }

    pub fn sub(&self, other: &PreTrMor<S>) -> PreTrMor<S> {
        self.add(&other.scale(&(S::zero() - S::one())))
    }
}

/// The category Pre-Tr over an ambient DG category.
pub struct PreTr<'a, S: Scalar> {
    pub c: &'a DgCategory<S>,
}

impl<'a, S: Scalar> PreTr<'a, S> {
    pub fn new(c: &'a DgCategory<S>) -> Self {
        PreTr { c }
    }

    /// Maurer-Cartan defect `(-1)^i d e_ij + Σ_k e_ik e_kj` per slot.
    /// `Err` when a required composition is outside the ambient window.
    pub fn mc_defect(
        &self,
        e: &TwistedComplex<S>,
    ) -> Result<BTreeMap<(Degree, Degree), Mor<S>>, String> {
        let mut out = BTreeMap::new();
        let idx: Vec<Degree> = e.entries.keys().copied().collect();
        for &i in &idx {
            for &j in &idx {
                let eij = e.twist(self.c, i, j).expect("entries present");
                let mut acc = self
                    .c
                    .differential(&eij)
                    .scale(&sign_pow::<S>(i as i64));
                for &k in &idx {
                    let eik = e.twist(self.c, i, k).expect("entries present");
                    let ekj = e.twist(self.c, k, j).expect("entries present");
                    if eik.is_zero() || ekj.is_zero() {
                        continue;
                    }
                    let prod = self
                        .c
                        .compose(&eik, &ekj)
                        .ok_or_else(|| format!("twist composition ({i},{k})({k},{j}) undefined"))?;
                    acc = acc.add(&prod);
                }
                if !acc.is_zero() {
                    out.insert((i, j), acc);
                }
            }
        }
        Ok(out)
    }

    /// Does the Maurer-Cartan equation hold?
    pub fn validate_mc(&self, e: &TwistedComplex<S>) -> Result<bool, String> {
        Ok(self.mc_defect(e)?.is_empty())
    }

    /// Degrees of the twists are forced by their slots; check them.
    pub fn twists_well_typed(&self, e: &TwistedComplex<S>) -> bool {
        e.twists.iter().all(|(&(i, j), m)| {
            e.entry(i).is_some()
                && e.entry(j).is_some()
                && m.degree == j - i + 1
                && m.src == e.entry(j).unwrap()
                && m.tgt == e.entry(i).unwrap()
        })
    }

    pub fn identity(&self, e: &TwistedComplex<S>) -> PreTrMor<S> {
        PreTrMor {
            degree: 0,
            comps: e
                .entries
                .iter()
                .map(|(&i, &x)| ((i, i), self.c.unit(x)))
                .collect(),
        }
    }

    pub fn zero_mor(&self, n: Degree) -> PreTrMor<S> {
        PreTrMor::zero(n)
    }

    fn component(
        &self,
        src: &TwistedComplex<S>,
        tgt: &TwistedComplex<S>,
        phi: &PreTrMor<S>,
        i: Degree,
        j: Degree,
    ) -> Option<Mor<S>> {
        match (phi.comps.get(&(i, j)), src.entry(j), tgt.entry(i)) {
            (Some(m), _, _) => Some(m.clone()),
            (None, Some(ej), Some(fi)) => Some(self.c.zero_mor(ej, fi, j - i + phi.degree)),
            _ => None,
        }
    }

    /// `∂(φ)` for `φ: src -> tgt`.
    pub fn differential(
        &self,
        src: &TwistedComplex<S>,
        tgt: &TwistedComplex<S>,
        phi: &PreTrMor<S>,
    ) -> Result<PreTrMor<S>, String> {
        let n = phi.degree;
        let mut comps = BTreeMap::new();
        let src_idx: Vec<Degree> = src.entries.keys().copied().collect();
        let tgt_idx: Vec<Degree> = tgt.entries.keys().copied().collect();
        for &i in &tgt_idx {
            for &j in &src_idx {
                // (-1)^i d(φ_ij)
                let pij = self.component(src, tgt, phi, i, j).expect("entries present");
                let mut acc = self
                    .c
                    .differential(&pij)
                    .scale(&sign_pow::<S>(i as i64));
                // + Σ_k f_ik ∘ φ_kj
                for &k in &tgt_idx {
                    let fik = tgt.twist(self.c, i, k).expect("entries present");
                    let pkj = self.component(src, tgt, phi, k, j).expect("entries present");
                    if fik.is_zero() || pkj.is_zero() {
                        continue;
                    }
                    let t = self
                        .c
                        .compose(&fik, &pkj)
                        .ok_or_else(|| format!("composition f({i},{k})∘φ({k},{j}) undefined"))?;
                    acc = acc.add(&t);
                }
                // - (-1)^n Σ_k φ_ik ∘ e_kj
                for &k in &src_idx {
                    let pik = self.component(src, tgt, phi, i, k).expect("entries present");
                    let ekj = src.twist(self.c, k, j).expect("entries present");
                    if pik.is_zero() || ekj.is_zero() {
                        continue;
                    }
                    let t = self
                        .c
                        .compose(&pik, &ekj)
                        .ok_or_else(|| format!("composition φ({i},{k})∘e({k},{j}) undefined"))?;
                    acc = acc.add(&t.scale(&(S::zero() - sign_pow::<S>(n as i64))));
                }
                if !acc.is_zero() {
                    comps.insert((i, j), acc);
                }
            }
        }
        Ok(PreTrMor { degree: n + 1, comps })
    }

    /// `ψ ∘ φ` for `φ: e -> f`, `ψ: f -> g`.
    pub fn compose(
        &self,
        e: &TwistedComplex<S>,
        f: &TwistedComplex<S>,
        g: &TwistedComplex<S>,
        psi: &PreTrMor<S>,
        phi: &PreTrMor<S>,
    ) -> Result<PreTrMor<S>, String> {
        let mut comps = BTreeMap::new();
        for &i in g.entries.keys() {
            for &j in e.entries.keys() {
                let mut acc = self
                    .c
                    .zero_mor(e.entry(j).unwrap(), g.entry(i).unwrap(), j - i + psi.degree + phi.degree);
                for &k in f.entries.keys() {
                    let pik = self.component(f, g, psi, i, k).expect("entries present");
                    let pkj = self.component(e, f, phi, k, j).expect("entries present");
                    if pik.is_zero() || pkj.is_zero() {
                        continue;
                    }
                    let t = self
                        .c
                        .compose(&pik, &pkj)
                        .ok_or_else(|| format!("composition ψ({i},{k})∘φ({k},{j}) undefined"))?;
                    acc = acc.add(&t);
                }
                if !acc.is_zero() {
                    comps.insert((i, j), acc);
                }
            }
        }
        Ok(PreTrMor {
            degree: psi.degree + phi.degree,
            comps,
        })
    }

    /// `𝓔[n]`: entries shifted down by `n` positions, twists rescaled by
    /// `(-1)^n`.
    pub fn shift(&self, e: &TwistedComplex<S>, n: Degree) -> TwistedComplex<S> {
        let entries = e.entries.iter().map(|(&i, &x)| (i - n, x)).collect();
        let sgn: S = sign_pow(n as i64);
        let twists = e
            .twists
            .iter()
            .map(|(&(i, j), m)| ((i - n, j - n), m.scale(&sgn)))
            .collect();
        TwistedComplex { entries, twists }
    }

    /// Hom into/out of one-entry complexes agrees with the ambient homs:
    /// this is the full embedding `i_0`.
    pub fn i0(&self, object: usize) -> TwistedComplex<S> {
        TwistedComplex::single(object)
    }

    /// Promote an ambient morphism to a morphism of one-entry complexes.
    pub fn i0_mor(&self, f: &Mor<S>) -> PreTrMor<S> {
        let mut comps = BTreeMap::new();
        if !f.is_zero() {
            comps.insert((0, 0), f.clone());
        }
        PreTrMor {
            degree: f.degree,
            comps,
        }
    }

    /// Cone of a degree-0 cycle `ψ: e -> f`. Slot `i` carries `F_i ⊕ E_{i+1}`,
    /// realized by a biproduct witness of the ambient category when both
    /// summands are present, or the bare object when only one is. `Err`
    /// when an overlapping slot has no registered biproduct.
    pub fn cone(
        &self,
        e: &TwistedComplex<S>,
        f: &TwistedComplex<S>,
        psi: &PreTrMor<S>,
    ) -> Result<ConeData<S>, String> {
        assert_eq!(psi.degree, 0, "cone requires a degree-0 morphism");
        let mut slots: BTreeMap<Degree, ConeSlot<S>> = BTreeMap::new();
        let mut indices: Vec<Degree> = f.entries.keys().copied().collect();
        indices.extend(e.entries.keys().map(|&i| i - 1));
        indices.sort_unstable();
        indices.dedup();
        for &i in &indices {
            let fi = f.entry(i);
            let ei1 = e.entry(i + 1);
            let slot = match (fi, ei1) {
                (Some(a), Some(b)) => {
                    let bp = self
                        .c
                        .biproduct(a, b)
                        .ok_or_else(|| format!("no biproduct for pair ({a},{b}) at slot {i}"))?;
                    ConeSlot::from_biproduct(self.c, a, b, bp)
                }
                (Some(a), None) => ConeSlot::only_first(self.c, a),
                (None, Some(b)) => ConeSlot::only_second(self.c, b),
                (None, None) => unreachable!("index came from one of the windows"),
            };
            slots.insert(i, slot);
        }

        let entries: BTreeMap<Degree, usize> =
            slots.iter().map(|(&i, s)| (i, s.obj)).collect();
        let mut twists = BTreeMap::new();
        for &i in &indices {
            for &j in &indices {
                let si = &slots[&i];
                let sj = &slots[&j];
                let mut acc = self.c.zero_mor(sj.obj, si.obj, j - i + 1);
                // i1 ∘ f_ij ∘ p1
                if let (Some(i1), Some(p1)) = (&si.i1, &sj.p1) {
                    let fij = f.twist(self.c, i, j).expect("slot has first summand");
                    if !fij.is_zero() {
                        let t = self
                            .compose_three(i1, &fij, p1)
                            .ok_or_else(|| format!("cone twist composition undefined at ({i},{j})"))?;
                        acc = acc.add(&t);
                    }
                }
                // + i1 ∘ ψ_{i,j+1} ∘ p2
                if let (Some(i1), Some(p2)) = (&si.i1, &sj.p2) {
                    if let Some(p) = psi.comps.get(&(i, j + 1)) {
                        if !p.is_zero() {
                            let t = self
                                .compose_three(i1, p, p2)
                                .ok_or_else(|| format!("cone twist composition undefined at ({i},{j})"))?;
                            acc = acc.add(&t);
                        }
                    }
                }
                // - i2 ∘ e_{i+1,j+1} ∘ p2
                if let (Some(i2), Some(p2)) = (&si.i2, &sj.p2) {
                    let eij = e.twist(self.c, i + 1, j + 1).expect("slot has second summand");
                    if !eij.is_zero() {
                        let t = self
                            .compose_three(i2, &eij, p2)
                            .ok_or_else(|| format!("cone twist composition undefined at ({i},{j})"))?;
                        acc = acc.add(&t.scale(&(S::zero() - S::one())));
                    }
                }
                if !acc.is_zero() {
                    twists.insert((i, j), acc);
                }
            }
        }

        let cone = TwistedComplex { entries, twists };
        // Structure maps: incl = i1 slotwise, proj = p2 slotwise.
        let incl = PreTrMor {
            degree: 0,
            comps: slots
                .iter()
                .filter_map(|(&i, s)| s.i1.clone().map(|m| ((i, i), m)))
                .collect(),
        };
        let proj = PreTrMor {
            degree: 0,
            comps: slots
                .iter()
                .filter_map(|(&i, s)| s.p2.clone().map(|m| ((i, i), m)))
                .collect(),
        };
        Ok(ConeData {
            cone,
            incl,
            proj,
        })
    }

    fn compose_three(&self, a: &Mor<S>, b: &Mor<S>, c3: &Mor<S>) -> Option<Mor<S>> {
        self.c.compose(a, &self.c.compose(b, c3)?)
    }

    /// Materialized Hom complex of a pair of twisted complexes.
    pub fn hom_complex(
        &self,
        e: &TwistedComplex<S>,
        f: &TwistedComplex<S>,
    ) -> Result<PreTrHom<S>, String> {
        // Infer the degree support from the ambient hom supports per slot.
        let mut degrees: Vec<Degree> = Vec::new();
        for (&j, &ej) in &e.entries {
            for (&i, &fi) in &f.entries {
                for &d in &self.c.hom(ej, fi).support() {
                    degrees.push(d - (j - i));
                }
            }
        }
        degrees.sort_unstable();
        degrees.dedup();

        let blocks = |n: Degree| -> Vec<(Degree, Degree, usize)> {
            let mut v = Vec::new();
            for (&i, &fi) in &f.entries {
                for (&j, &ej) in &e.entries {
                    let r = self.c.hom_rank(ej, fi, j - i + n);
                    if r > 0 {
                        v.push((i, j, r));
                    }
                }
            }
            v
        };

        let mut modules = GradedModule::new();
        for &n in &degrees {
            modules.set_rank(n, blocks(n).iter().map(|b| b.2).sum());
        }

        let hom = PreTrHom {
            complex: Complex::with_zero_diff(modules.clone()),
            source: e.clone(),
            target: f.clone(),
            block_table: degrees.iter().map(|&n| (n, blocks(n))).collect(),
        };

        let mut diffs = BTreeMap::new();
        for &n in &degrees {
            let rows = modules.rank(n + 1);
            let cols = modules.rank(n);
            let mut m = Matrix::zero(rows, cols);
            for col in 0..cols {
                let mut unit = alloc::vec![S::zero(); cols];
                unit[col] = S::one();
                let phi = hom.unflatten(self.c, n, &unit);
                let dphi = self.differential(e, f, &phi)?;
                for (row, v) in hom.flatten(self.c, &dphi).into_iter().enumerate() {
                    if !num_traits::Zero::is_zero(&v) {
                        m.set(row, col, v);
                    }
                }
            }
            diffs.insert(n, m);
        }
        let complex = Complex::new(modules, diffs)
            .map_err(|err| format!("twisted hom complex: {err}"))?;
        Ok(PreTrHom { complex, ..hom })
    }
}

/// One slot of a cone: the realizing object with its four witness maps
/// (absent when the corresponding summand is absent).
struct ConeSlot<S> {
    obj: usize,
    i1: Option<Mor<S>>,
    p1: Option<Mor<S>>,
    i2: Option<Mor<S>>,
    p2: Option<Mor<S>>,
}

impl<S: Scalar> ConeSlot<S> {
    fn from_biproduct(c: &DgCategory<S>, a: usize, b: usize, bp: &Biproduct<S>) -> Self {
        ConeSlot {
            obj: bp.obj,
            i1: Some(c.mor(a, bp.obj, 0, bp.inj[0].clone())),
            p1: Some(c.mor(bp.obj, a, 0, bp.proj[0].clone())),
            i2: Some(c.mor(b, bp.obj, 0, bp.inj[1].clone())),
            p2: Some(c.mor(bp.obj, b, 0, bp.proj[1].clone())),
        }
    }

    fn only_first(c: &DgCategory<S>, a: usize) -> Self {
        ConeSlot {
            obj: a,
            i1: Some(c.unit(a)),
            p1: Some(c.unit(a)),
            i2: None,
            p2: None,
        }
    }

    fn only_second(c: &DgCategory<S>, b: usize) -> Self {
        ConeSlot {
            obj: b,
            i1: None,
            p1: None,
            i2: Some(c.unit(b)),
            p2: Some(c.unit(b)),
        }
    }
}

/// Cone of a morphism with its structure maps `incl: f -> cone` and
/// `proj: cone -> e[1]`.
pub struct ConeData<S: Scalar> {
    pub cone: TwistedComplex<S>,
    pub incl: PreTrMor<S>,
    pub proj: PreTrMor<S>,
}

/// Materialized Hom complex of a pair of twisted complexes, with the
/// block layout needed to flatten and unflatten morphisms.
pub struct PreTrHom<S: Scalar> {
    pub complex: Complex<S>,
    pub source: TwistedComplex<S>,
    pub target: TwistedComplex<S>,
    /// Per degree: ordered slots `(i, j, rank)`.
    block_table: BTreeMap<Degree, Vec<(Degree, Degree, usize)>>,
}

impl<S: Scalar> PreTrHom<S> {
    pub fn blocks(&self, n: Degree) -> &[(Degree, Degree, usize)] {
        self.block_table.get(&n).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn unflatten(&self, c: &DgCategory<S>, n: Degree, v: &[S]) -> PreTrMor<S> {
        assert_eq!(v.len(), self.complex.rank(n));
        let mut comps = BTreeMap::new();
        let mut off = 0;
        for &(i, j, r) in self.blocks(n) {
            let coords: Vec<S> = v[off..off + r].to_vec();
            off += r;
            if coords.iter().any(|x| !num_traits::Zero::is_zero(x)) {
                let ej = self.source.entry(j).unwrap();
                let fi = self.target.entry(i).unwrap();
                comps.insert((i, j), c.mor(ej, fi, j - i + n, coords));
            }
        }
        PreTrMor { degree: n, comps }
    }

    pub fn flatten(&self, _c: &DgCategory<S>, phi: &PreTrMor<S>) -> Vec<S> {
        let n = phi.degree;
        let mut v = alloc::vec![S::zero(); self.complex.rank(n)];
        let mut off = 0;
        for &(i, j, r) in self.blocks(n) {
            if let Some(m) = phi.comps.get(&(i, j)) {
                assert_eq!(m.coords.len(), r);
                v[off..off + r].clone_from_slice(&m.coords);
            }
            off += r;
        }
        v
    }

    /// Solve `∂(h) = rhs` for `h` one degree below; `None` when `rhs` is
    /// not a boundary over the coefficient ring.
    pub fn solve_boundary(&self, c: &DgCategory<S>, rhs: &PreTrMor<S>) -> Option<PreTrMor<S>> {
        let n = rhs.degree;
        let v = self.flatten(c, rhs);
        let x = crate::snf::solve(&self.complex.d(n - 1), &v)?;
        Some(self.unflatten(c, n - 1, &x))
    }

    /// Random cycle of degree `n` through the kernel basis.
    pub fn random_cycle<R: RngCore>(
        &self,
        c: &DgCategory<S>,
        rng: &mut R,
        n: Degree,
        bound: i64,
    ) -> PreTrMor<S> {
        match gen::random_cycle(rng, &self.complex, n, bound) {
            Some(v) => self.unflatten(c, n, &v),
            None => PreTrMor::zero(n),
        }
    }

    /// Random element of degree `n` (not necessarily a cycle).
    pub fn random_element<R: RngCore>(
        &self,
        c: &DgCategory<S>,
        rng: &mut R,
        n: Degree,
        bound: i64,
    ) -> PreTrMor<S> {
        let v: Vec<S> = (0..self.complex.rank(n))
            .map(|_| gen::int_in(rng, bound))
            .collect();
        self.unflatten(c, n, &v)
    }
}

/// Grow a pool of valid twisted complexes from one-entry seeds by shifting
/// and taking cones over random degree-0 cycles. Cones are always taken
/// after separating the two windows, so no biproducts are required; every
/// element of the pool satisfies Maurer-Cartan by construction.
pub fn random_pool<S: Scalar, R: RngCore>(
    pt: &PreTr<S>,
    rng: &mut R,
    seeds: &[usize],
    ops: usize,
    max_span: Degree,
) -> Vec<TwistedComplex<S>> {
    assert!(!seeds.is_empty());
    let mut pool: Vec<TwistedComplex<S>> = seeds.iter().map(|&x| pt.i0(x)).collect();
    for _ in 0..ops {
        let pick = gen::uniform(rng, pool.len());
        if gen::uniform(rng, 3) == 0 {
            let k = 1 + gen::uniform(rng, 2) as Degree;
            let k = if gen::uniform(rng, 2) == 0 { k } else { -k };
            let shifted = pt.shift(&pool[pick], k);
            if span(&shifted) <= max_span {
                pool.push(shifted);
            }
            continue;
        }
        let f = pool[pick].clone();
        let e = pool[gen::uniform(rng, pool.len())].clone();
        let (_, ehi) = e.window().unwrap();
        let (flo, _) = f.window().unwrap();
        // Slide e strictly below f so the cone slots never overlap.
        let extra = gen::uniform(rng, 2) as Degree;
        let e = pt.shift(&e, ehi - flo + 2 + extra);
        let psi = match pt.hom_complex(&e, &f) {
            Ok(hom) => hom.random_cycle(pt.c, rng, 0, 2),
            Err(_) => PreTrMor::zero(0),
        };
        if let Ok(data) = pt.cone(&e, &f, &psi) {
            if span(&data.cone) <= max_span {
                pool.push(data.cone);
            }
        }
    }
    pool
}

fn span<S: Scalar>(e: &TwistedComplex<S>) -> Degree {
    match e.window() {
        Some((lo, hi)) => hi - lo,
        None => 0,
    }
}
