//! DG categories with based hom complexes, validation of their axioms,
//! opposites, underlying `Z^0`/`H^0` categories, functors and natural
//! transformations.
//!
//! Composition is bilinear, so it is stored (or materialized) as one matrix
//! per `(x, y, z, p, q)`: the map `Hom(y,z)^p ⊗ Hom(x,y)^q -> Hom(x,z)^{p+q}`
//! in Kronecker coordinates, left factor major. A category built from a
//! truncated enrichment carries tables only inside its degree window;
//! validation skips (and counts) checks that fall outside.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::Zero;

use crate::complex::{
    compose_graded, hom_flatten, hom_unflatten, Complex, CycleQuotient, HomComplex,
};
use crate::gen::uniform;
use crate::graded::Degree;
use crate::matrix::Matrix;
use crate::ring::{sign_pow, Scalar};
use crate::snf;

/// Morphism of a [`DgCategory`]: a degree and a coordinate vector in the
/// chosen basis of `Hom(src, tgt)^degree`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mor<S> {
    pub src: usize,
    pub tgt: usize,
    pub degree: Degree,
    pub coords: Vec<S>,
}

impl<S: Scalar> Mor<S> {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Mor<S>) -> Mor<S> {
        assert_eq!(
            (self.src, self.tgt, self.degree),
            (other.src, other.tgt, other.degree),
            "morphism sum requires equal type"
        );
        Mor {
            src: self.src,
            tgt: self.tgt,
            degree: self.degree,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mor<S>) -> Mor<S> {
        self.add(&other.scale(&(S::zero() - S::one())))
    }

    pub fn scale(&self, s: &S) -> Mor<S> {
        Mor {
            src: self.src,
            tgt: self.tgt,
            degree: self.degree,
            coords: self.coords.iter().map(|a| a.clone() * s.clone()).collect(),
        }
    }
}

/// Biproduct witness for a pair of objects: an object `obj` together with
/// degree-0 cycles `inj[k]`, `proj[k]` satisfying the biproduct equations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Biproduct<S> {
    pub obj: usize,
    /// `inj[0]: a -> obj`, `inj[1]: b -> obj` (coordinates in degree 0).
    pub inj: [Vec<S>; 2],
    /// `proj[0]: obj -> a`, `proj[1]: obj -> b`.
    pub proj: [Vec<S>; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum CompositionRule<S: Scalar> {
    /// Explicit tables keyed by `(x, y, z, p, q)`.
    Tables(BTreeMap<(usize, usize, usize, Degree, Degree), Matrix<S>>),
    /// Category of complexes: compose componentwise through the objects.
    Complexes(Vec<Complex<S>>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgCategory<S: Scalar> {
    names: Vec<String>,
    homs: BTreeMap<(usize, usize), Complex<S>>,
    units: BTreeMap<usize, Vec<S>>,
    rule: CompositionRule<S>,
    biproducts: BTreeMap<(usize, usize), Biproduct<S>>,
}

impl<S: Scalar> DgCategory<S> {
    /// Category with explicit composition tables.
    pub fn from_tables(
        names: Vec<String>,
        homs: BTreeMap<(usize, usize), Complex<S>>,
        units: BTreeMap<usize, Vec<S>>,
        tables: BTreeMap<(usize, usize, usize, Degree, Degree), Matrix<S>>,
    ) -> Self {
        let n = names.len();
        for (&(x, y), c) in &homs {
            assert!(x < n && y < n, "hom pair out of range");
            let _ = c;
        }
        for (&x, u) in &units {
            assert_eq!(
                u.len(),
                homs.get(&(x, x)).map(|c| c.rank(0)).unwrap_or(0),
                "unit coordinates must live in Hom(x,x)^0"
            );
        }
        DgCategory {
            names,
            homs,
            units,
            rule: CompositionRule::Tables(tables),
            biproducts: BTreeMap::new(),
        }
    }

    /// The DG category of complexes on a finite list of objects: hom
    /// complexes are [`HomComplex`]es and composition is componentwise.
    pub fn from_complexes(objects: Vec<Complex<S>>) -> Self {
        let mut homs = BTreeMap::new();
        let mut units = BTreeMap::new();
        for (x, cx) in objects.iter().enumerate() {
            for (y, cy) in objects.iter().enumerate() {
                homs.insert((x, y), HomComplex::new(cx, cy).complex);
            }
            let id = crate::complex::GradedMap {
                degree: 0,
                comps: cx
                    .support()
                    .into_iter()
                    .map(|p| (p, Matrix::identity(cx.rank(p))))
                    .collect(),
            };
            units.insert(x, hom_flatten(cx, cx, &id).1);
        }
        let names = (0..objects.len()).map(|i| format!("C{i}")).collect();
        DgCategory {
            names,
            homs,
            units,
            rule: CompositionRule::Complexes(objects),
            biproducts: BTreeMap::new(),
        }
    }

    pub fn object_count(&self) -> usize {
        self.names.len()
    }

    pub fn object_name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn set_object_name(&mut self, x: usize, name: String) {
        self.names[x] = name;
    }

    /// Hom complex of a pair (the zero complex when the pair is absent).
    pub fn hom(&self, x: usize, y: usize) -> Complex<S> {
        self.homs.get(&(x, y)).cloned().unwrap_or_else(Complex::zero)
    }

    pub fn hom_rank(&self, x: usize, y: usize, n: Degree) -> usize {
        self.homs.get(&(x, y)).map(|c| c.rank(n)).unwrap_or(0)
    }

    pub fn unit(&self, x: usize) -> Mor<S> {
        Mor {
            src: x,
            tgt: x,
            degree: 0,
            coords: self.units.get(&x).cloned().unwrap_or_default(),
        }
    }

    pub fn zero_mor(&self, x: usize, y: usize, n: Degree) -> Mor<S> {
        Mor {
            src: x,
            tgt: y,
            degree: n,
            coords: vec![S::zero(); self.hom_rank(x, y, n)],
        }
    }

    pub fn basis_mor(&self, x: usize, y: usize, n: Degree, idx: usize) -> Mor<S> {
        let mut m = self.zero_mor(x, y, n);
        m.coords[idx] = S::one();
        m
    }

    pub fn mor(&self, x: usize, y: usize, n: Degree, coords: Vec<S>) -> Mor<S> {
        assert_eq!(coords.len(), self.hom_rank(x, y, n));
        Mor {
            src: x,
            tgt: y,
            degree: n,
            coords,
        }
    }

    /// `d(f)`, one degree up in the same hom complex.
    pub fn differential(&self, f: &Mor<S>) -> Mor<S> {
        let c = self.hom(f.src, f.tgt);
        Mor {
            src: f.src,
            tgt: f.tgt,
            degree: f.degree + 1,
            coords: c.d(f.degree).mul_vec(&f.coords),
        }
    }

    pub fn is_cycle(&self, f: &Mor<S>) -> bool {
        self.differential(f).is_zero()
    }

    /// `f ∘ g` (apply `g` first), or `None` when the composition falls
    /// outside the window of stored tables.
    pub fn compose(&self, f: &Mor<S>, g: &Mor<S>) -> Option<Mor<S>> {
        assert_eq!(g.tgt, f.src, "compose requires matching middle object");
        let (x, y, z) = (g.src, g.tgt, f.tgt);
        let (p, q) = (f.degree, g.degree);
        let out_rank = self.hom_rank(x, z, p + q);
        if f.coords.is_empty() || g.coords.is_empty() {
            return Some(self.zero_mor(x, z, p + q));
        }
        match &self.rule {
            CompositionRule::Tables(tables) => {
                let t = tables.get(&(x, y, z, p, q))?;
                Some(Mor {
                    src: x,
                    tgt: z,
                    degree: p + q,
                    coords: t.mul_vec(&Matrix::kron_vec(&f.coords, &g.coords)),
                })
            }
            CompositionRule::Complexes(objs) => {
                let (cx, cy, cz) = (&objs[x], &objs[y], &objs[z]);
                let fg = compose_graded(
                    &hom_unflatten(cy, cz, p, &f.coords),
                    &hom_unflatten(cx, cy, q, &g.coords),
                    cx,
                    cy,
                    cz,
                );
                let (_, coords) = hom_flatten(cx, cz, &fg);
                debug_assert_eq!(coords.len(), out_rank);
                Some(Mor {
                    src: x,
                    tgt: z,
                    degree: p + q,
                    coords,
                })
            }
        }
    }

    /// Is the `(x,y,z,p,q)` composition defined (inside the table window)?
    pub fn composition_defined(&self, x: usize, y: usize, z: usize, p: Degree, q: Degree) -> bool {
        if self.hom_rank(y, z, p) == 0 || self.hom_rank(x, y, q) == 0 {
            return true;
        }
        match &self.rule {
            CompositionRule::Tables(tables) => tables.contains_key(&(x, y, z, p, q)),
            CompositionRule::Complexes(_) => true,
        }
    }

    /// Composition table at a key, materializing it for functional rules.
    /// `None` when undefined; zero-column matrix when an input rank is 0.
    pub fn composition_table(
        &self,
        x: usize,
        y: usize,
        z: usize,
        p: Degree,
        q: Degree,
    ) -> Option<Matrix<S>> {
        let rp = self.hom_rank(y, z, p);
        let rq = self.hom_rank(x, y, q);
        let rows = self.hom_rank(x, z, p + q);
        if rp == 0 || rq == 0 {
            return Some(Matrix::zero(rows, rp * rq));
        }
        match &self.rule {
            CompositionRule::Tables(tables) => tables.get(&(x, y, z, p, q)).cloned(),
            CompositionRule::Complexes(_) => {
                let mut t = Matrix::zero(rows, rp * rq);
                for a in 0..rp {
                    let f = self.basis_mor(y, z, p, a);
                    for b in 0..rq {
                        let g = self.basis_mor(x, y, q, b);
                        let fg = self.compose(&f, &g).expect("complex composition is total");
                        for (r, v) in fg.coords.into_iter().enumerate() {
                            if !v.is_zero() {
                                t.set(r, a * rq + b, v);
                            }
                        }
                    }
                }
                Some(t)
            }
        }
    }

    /// Keys `(x, y, z, p, q)` at which composition is defined with both
    /// input ranks positive.
    pub fn table_keys(&self) -> Vec<(usize, usize, usize, Degree, Degree)> {
        match &self.rule {
            CompositionRule::Tables(tables) => tables
                .keys()
                .copied()
                .filter(|&(x, y, z, p, q)| {
                    self.hom_rank(y, z, p) > 0 && self.hom_rank(x, y, q) > 0
                })
                .collect(),
            CompositionRule::Complexes(objs) => {
                let n = objs.len();
                let mut keys = Vec::new();
                for x in 0..n {
                    for y in 0..n {
                        for z in 0..n {
                            for &q in &self.hom(x, y).support() {
                                for &p in &self.hom(y, z).support() {
                                    keys.push((x, y, z, p, q));
                                }
                            }
                        }
                    }
                }
                keys
            }
        }
    }

    pub fn add_biproduct(&mut self, a: usize, b: usize, bp: Biproduct<S>) {
        self.biproducts.insert((a, b), bp);
    }

    pub fn biproduct(&self, a: usize, b: usize) -> Option<&Biproduct<S>> {
        self.biproducts.get(&(a, b))
    }

    /// For a category built from complexes: append the direct sum of two
    /// objects as a new object, register the canonical block witnesses as
    /// its biproduct structure, and return its id. Reuses an existing
    /// registration when the pair already has one.
    pub fn add_direct_sum(&mut self, a: usize, b: usize) -> usize {
        if let Some(bp) = self.biproducts.get(&(a, b)) {
            return bp.obj;
        }
        let objects = match &mut self.rule {
            CompositionRule::Complexes(objs) => objs,
            CompositionRule::Tables(_) => {
                panic!("direct sums can only be synthesized for complex-backed categories")
            }
        };
        let ca = objects[a].clone();
        let cb = objects[b].clone();
        let sum = ca.direct_sum(&cb);
        let s = objects.len();
        objects.push(sum.clone());
        self.names.push(format!("{}+{}", self.names[a], self.names[b]));
        for (x, cx) in objects.iter().enumerate() {
            self.homs.insert((x, s), HomComplex::new(cx, &sum).complex);
            self.homs.insert((s, x), HomComplex::new(&sum, cx).complex);
        }
        let id = crate::complex::GradedMap {
            degree: 0,
            comps: sum
                .support()
                .into_iter()
                .map(|p| (p, Matrix::identity(sum.rank(p))))
                .collect(),
        };
        self.units.insert(s, hom_flatten(&sum, &sum, &id).1);

        // Block witnesses: degreewise [I; 0], [0; I], [I 0], [0 I].
        let support = sum.support();
        let block = |rows_of: &dyn Fn(Degree) -> Matrix<S>, src: &Complex<S>, tgt: &Complex<S>| {
            let comps = support
                .iter()
                .map(|&p| (p, rows_of(p)))
                .filter(|(_, m)| !m.is_zero())
                .collect();
            hom_flatten(src, tgt, &crate::complex::GradedMap { degree: 0, comps }).1
        };
        let ra = |p: Degree| ca.rank(p);
        let rb = |p: Degree| cb.rank(p);
        let i1 = block(
            &|p| Matrix::identity(ra(p)).vstack(&Matrix::zero(rb(p), ra(p))),
            &ca,
            &sum,
        );
        let i2 = block(
            &|p| Matrix::zero(ra(p), rb(p)).vstack(&Matrix::identity(rb(p))),
            &cb,
            &sum,
        );
        let p1 = block(
            &|p| Matrix::identity(ra(p)).hstack(&Matrix::zero(ra(p), rb(p))),
            &sum,
            &ca,
        );
        let p2 = block(
            &|p| Matrix::zero(rb(p), ra(p)).hstack(&Matrix::identity(rb(p))),
            &sum,
            &cb,
        );
        self.biproducts.insert(
            (a, b),
            Biproduct {
                obj: s,
                inj: [i1, i2],
                proj: [p1, p2],
            },
        );
        s
    }

    /// Rewrite the composition rule as explicit tables.
    pub fn materialize_tables(&self) -> DgCategory<S> {
        let mut tables = BTreeMap::new();
        for key in self.table_keys() {
            let (x, y, z, p, q) = key;
            if let Some(t) = self.composition_table(x, y, z, p, q) {
                tables.insert(key, t);
            }
        }
        DgCategory {
            names: self.names.clone(),
            homs: self.homs.clone(),
            units: self.units.clone(),
            rule: CompositionRule::Tables(tables),
            biproducts: self.biproducts.clone(),
        }
    }

    /// Opposite category: hom complexes transposed across the pair with the
    /// same grading and differential, composition `f^op ∘ g^op =
    /// (-1)^{pq} (g ∘ f)^op`, units unchanged.
    pub fn opposite(&self) -> DgCategory<S> {
        let homs: BTreeMap<(usize, usize), Complex<S>> = self
            .homs
            .iter()
            .map(|(&(x, y), c)| ((y, x), c.clone()))
            .collect();
        let mut tables = BTreeMap::new();
        for (x, y, z, p, q) in self.table_keys() {
            // Stored key composes C(y,z)^p ⊗ C(x,y)^q; in the opposite
            // category it serves the key (z, y, x, q, p) after the swap.
            let t = match self.composition_table(x, y, z, p, q) {
                Some(t) => t,
                None => continue,
            };
            let rp = self.hom_rank(y, z, p);
            let rq = self.hom_rank(x, y, q);
            // swap: e_b ⊗ e_a  ->  e_a ⊗ e_b for a < rp, b < rq.
            let mut swap = Matrix::zero(rp * rq, rq * rp);
            for a in 0..rp {
                for b in 0..rq {
                    swap.set(a * rq + b, b * rp + a, S::one());
                }
            }
            let sgn: S = sign_pow((p as i64) * (q as i64));
            tables.insert((z, y, x, q, p), t.mul(&swap).scale(&sgn));
        }
        let biproducts = self
            .biproducts
            .iter()
            .map(|(&(a, b), bp)| {
                (
                    (a, b),
                    Biproduct {
                        obj: bp.obj,
                        inj: [bp.proj[0].clone(), bp.proj[1].clone()],
                        proj: [bp.inj[0].clone(), bp.inj[1].clone()],
                    },
                )
            })
            .collect();
        DgCategory {
            names: self.names.clone(),
            homs,
            units: self.units.clone(),
            rule: CompositionRule::Tables(tables),
            biproducts,
        }
    }

    /// Basis of the degree-0 cycles of `Hom(x,y)`: the morphisms of the
    /// underlying `Z^0` category.
    pub fn z0_hom_basis(&self, x: usize, y: usize) -> Matrix<S> {
        snf::kernel_basis(&self.hom(x, y).d(0))
    }

    /// `H^0 Hom(x,y)` with computable class coordinates.
    pub fn h0_hom(&self, x: usize, y: usize) -> CycleQuotient<S> {
        let c = self.hom(x, y);
        CycleQuotient::new(&c.d(0), &c.d(-1))
    }

    pub fn validate(&self, plan: &ValidationPlan) -> ValidationReport {
        let mut rep = ValidationReport::default();
        self.check_units(plan, &mut rep);
        if rep.stop(plan) {
            return rep;
        }
        self.check_biproducts(plan, &mut rep);
        if rep.stop(plan) {
            return rep;
        }
        if plan.exhaustive {
            self.check_leibniz_exhaustive(plan, &mut rep);
            if rep.stop(plan) {
                return rep;
            }
            self.check_assoc_exhaustive(plan, &mut rep);
        }
        if plan.samples > 0 {
            self.check_sampled(plan, &mut rep);
        }
        rep
    }

    fn check_units(&self, plan: &ValidationPlan, rep: &mut ValidationReport) {
        for x in 0..self.object_count() {
            let id = self.unit(x);
            if id.coords.is_empty() && self.hom_rank(x, x, 0) > 0 {
                rep.fail(Law::UnitCycle, format!("object {x} has no unit"));
                if rep.stop(plan) {
                    return;
                }
                continue;
            }
            if !self.is_cycle(&id) {
                rep.fail(Law::UnitCycle, format!("d(id_{x}) != 0"));
            } else {
                rep.checked += 1;
            }
            if rep.stop(plan) {
                return;
            }
        }
        // Unit laws on every basis morphism, wherever the table exists.
        for (&(x, y), c) in &self.homs {
            for &q in &c.support() {
                if !self.composition_defined(x, y, y, 0, q)
                    || !self.composition_defined(x, x, y, q, 0)
                {
                    rep.skipped += 1;
                    continue;
                }
                for b in 0..c.rank(q) {
                    let f = self.basis_mor(x, y, q, b);
                    let left = self.compose(&self.unit(y), &f);
                    let right = self.compose(&f, &self.unit(x));
                    let ok = left.as_ref() == Some(&f) && right.as_ref() == Some(&f);
                    if ok {
                        rep.checked += 1;
                    } else {
                        rep.fail(Law::UnitLaw, format!("unit law fails at ({x},{y}) degree {q} basis {b}"));
                        if rep.stop(plan) {
                            return;
                        }
                    }
                }
            }
        }
    }

    fn check_biproducts(&self, plan: &ValidationPlan, rep: &mut ValidationReport) {
        for (&(a, b), bp) in &self.biproducts {
            let i = [
                self.mor(a, bp.obj, 0, bp.inj[0].clone()),
                self.mor(b, bp.obj, 0, bp.inj[1].clone()),
            ];
            let p = [
                self.mor(bp.obj, a, 0, bp.proj[0].clone()),
                self.mor(bp.obj, b, 0, bp.proj[1].clone()),
            ];
            let mut ok = i.iter().chain(&p).all(|m| self.is_cycle(m));
            let srcs = [a, b];
            for k in 0..2 {
                for l in 0..2 {
                    match self.compose(&p[k], &i[l]) {
                        Some(c) => {
                            let expect = if k == l {
                                self.unit(srcs[k])
                            } else {
                                self.zero_mor(srcs[l], srcs[k], 0)
                            };
                            ok &= c == expect;
                        }
                        None => {
                            rep.skipped += 1;
                        }
                    }
                }
            }
            match (self.compose(&i[0], &p[0]), self.compose(&i[1], &p[1])) {
                (Some(e0), Some(e1)) => {
                    ok &= e0.add(&e1) == self.unit(bp.obj);
                }
                _ => {
                    rep.skipped += 1;
                }
            }
            if ok {
                rep.checked += 1;
            } else {
                rep.fail(Law::Biproduct, format!("biproduct laws fail for pair ({a},{b})"));
                if rep.stop(plan) {
                    return;
                }
            }
        }
    }

    fn check_leibniz_exhaustive(&self, plan: &ValidationPlan, rep: &mut ValidationReport) {
        for (x, y, z, p, q) in self.table_keys() {
            let t = match self.composition_table(x, y, z, p, q) {
                Some(t) => t,
                None => {
                    rep.skipped += 1;
                    continue;
                }
            };
            // Shape first: rows must match the output rank.
            let rp = self.hom_rank(y, z, p);
            let rq = self.hom_rank(x, y, q);
            if t.rows() != self.hom_rank(x, z, p + q) || t.cols() != rp * rq {
                rep.fail(Law::TableShape, format!("table ({x},{y},{z},{p},{q}) has wrong shape"));
                if rep.stop(plan) {
                    return;
                }
                continue;
            }
            // d ∘ μ_{p,q} = μ_{p+1,q} (d ⊗ 1) + (-1)^p μ_{p,q+1} (1 ⊗ d),
            // checkable only if the higher tables are inside the window.
            // A vanishing input rank makes the corresponding term zero
            // without needing a table.
            let up_p = if self.hom_rank(y, z, p + 1) == 0 {
                Some(Matrix::zero(self.hom_rank(x, z, p + q + 1), 0))
            } else {
                self.composition_table(x, y, z, p + 1, q)
            };
            let up_q = if self.hom_rank(x, y, q + 1) == 0 {
                Some(Matrix::zero(self.hom_rank(x, z, p + q + 1), 0))
            } else {
                self.composition_table(x, y, z, p, q + 1)
            };
            let (tp, tq) = match (up_p, up_q) {
                (Some(a), Some(b)) => (a, b),
                _ => {
                    rep.skipped += 1;
                    continue;
                }
            };
            let lhs = self.hom(x, z).d(p + q).mul(&t);
            let dp = self.hom(y, z).d(p);
            let dq = self.hom(x, y).d(q);
            let term_p = if tp.cols() == 0 {
                Matrix::zero(lhs.rows(), lhs.cols())
            } else {
                tp.mul(&dp.kronecker(&Matrix::identity(rq)))
            };
            let term_q = if tq.cols() == 0 {
                Matrix::zero(lhs.rows(), lhs.cols())
            } else {
                tq.mul(&Matrix::identity(rp).kronecker(&dq))
                    .scale(&sign_pow::<S>(p as i64))
            };
            if lhs == term_p.add(&term_q) {
                rep.checked += 1;
            } else {
                rep.fail(Law::Leibniz, format!("Leibniz fails at ({x},{y},{z},{p},{q})"));
                if rep.stop(plan) {
                    return;
                }
            }
        }
    }

    fn check_assoc_exhaustive(&self, plan: &ValidationPlan, rep: &mut ValidationReport) {
        // μ(μ(f,g),h) = μ(f,μ(g,h)) over all pairs of composable tables.
        let keys = self.table_keys();
        for &(y, z, w, p, q) in &keys {
            // f ∈ C(z,w)^p, g ∈ C(y,z)^q; extend by h ∈ C(x,y)^r.
            for x in 0..self.object_count() {
                for &r in &self.hom(x, y).support() {
                    let inner = self.composition_table(x, y, w, p + q, r);
                    let gh = self.composition_table(x, y, z, q, r);
                    let fgh = self.composition_table(x, z, w, p, q + r);
                    let outer = self.composition_table(y, z, w, p, q);
                    let (Some(t_in), Some(t_gh), Some(t_fgh), Some(t_out)) =
                        (inner, gh, fgh, outer)
                    else {
                        rep.skipped += 1;
                        continue;
                    };
                    let rf = self.hom_rank(z, w, p);
                    let rh = self.hom_rank(x, y, r);
                    let left = t_in.mul(&t_out.kronecker(&Matrix::identity(rh)));
                    let right = t_fgh.mul(&Matrix::identity(rf).kronecker(&t_gh));
                    if left == right {
                        rep.checked += 1;
                    } else {
                        rep.fail(
                            Law::Associativity,
                            format!("associativity fails at ({x},{y},{z},{w}) degrees ({p},{q},{r})"),
                        );
                        if rep.stop(plan) {
                            return;
                        }
                    }
                }
            }
        }
    }

    /// Randomized checks: Leibniz on random composable basis pairs and
    /// associativity on random basis triples.
    fn check_sampled(&self, plan: &ValidationPlan, rep: &mut ValidationReport) {
        let mut rng = crate::rng_from_seed(plan.seed);
        let keys = self.table_keys();
        if keys.is_empty() {
            return;
        }
        for _ in 0..plan.samples {
            let &(x, y, z, p, q) = &keys[uniform(&mut rng, keys.len())];
            let a = uniform(&mut rng, self.hom_rank(y, z, p));
            let b = uniform(&mut rng, self.hom_rank(x, y, q));
            let f = self.basis_mor(y, z, p, a);
            let g = self.basis_mor(x, y, q, b);
            match self.sample_leibniz(&f, &g) {
                Some(true) => rep.checked += 1,
                Some(false) => {
                    rep.fail(
                        Law::Leibniz,
                        format!("Leibniz fails at ({x},{y},{z},{p},{q}) basis ({a},{b})"),
                    );
                    if rep.stop(plan) {
                        return;
                    }
                }
                None => rep.skipped += 1,
            }
            // Extend to a random triple for associativity.
            let mut candidates: Vec<(usize, Degree)> = Vec::new();
            for w in 0..self.object_count() {
                for &r in &self.hom(w, x).support() {
                    if self.hom_rank(w, x, r) > 0 {
                        candidates.push((w, r));
                    }
                }
            }
            if candidates.is_empty() {
                rep.skipped += 1;
                continue;
            }
            let (w, r) = candidates[uniform(&mut rng, candidates.len())];
            let c = uniform(&mut rng, self.hom_rank(w, x, r));
            let h = self.basis_mor(w, x, r, c);
            match self.sample_assoc(&f, &g, &h) {
                Some(true) => rep.checked += 1,
                Some(false) => {
                    rep.fail(
                        Law::Associativity,
                        format!(
                            "associativity fails at ({w},{x},{y},{z}) degrees ({p},{q},{r}) basis ({a},{b},{c})"
                        ),
                    );
                    if rep.stop(plan) {
                        return;
                    }
                }
                None => rep.skipped += 1,
            }
        }
    }

    /// `d(f∘g) = df∘g + (-1)^p f∘dg` on one pair; `None` if out of window.
    pub fn sample_leibniz(&self, f: &Mor<S>, g: &Mor<S>) -> Option<bool> {
        let lhs = self.differential(&self.compose(f, g)?);
        let t1 = self.compose(&self.differential(f), g)?;
        let t2 = self
            .compose(f, &self.differential(g))?
            .scale(&sign_pow::<S>(f.degree as i64));
        Some(lhs == t1.add(&t2))
    }

    /// `(f∘g)∘h = f∘(g∘h)` on one triple; `None` if out of window.
    pub fn sample_assoc(&self, f: &Mor<S>, g: &Mor<S>, h: &Mor<S>) -> Option<bool> {
        let left = self.compose(&self.compose(f, g)?, h)?;
        let right = self.compose(f, &self.compose(g, h)?)?;
        Some(left == right)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Law {
    DSquare,
    TableShape,
    Leibniz,
    Associativity,
    UnitCycle,
    UnitLaw,
    Biproduct,
    Functor,
    Naturality,
}

impl core::fmt::Display for Law {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let s = match self {
            Law::DSquare => "d-square",
            Law::TableShape => "table-shape",
            Law::Leibniz => "leibniz",
            Law::Associativity => "associativity",
            Law::UnitCycle => "unit-cycle",
            Law::UnitLaw => "unit-law",
            Law::Biproduct => "biproduct",
            Law::Functor => "functor",
            Law::Naturality => "naturality",
        };
        write!(f, "{s}")
    }
}

/// A falsified law together with a human-readable witness site.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub law: Law,
    pub site: String,
}

#[derive(Clone, Copy, Debug)]
pub struct ValidationPlan {
    /// Check every law over every stored table.
    pub exhaustive: bool,
    /// Additionally check this many random basis pairs/triples.
    pub samples: u64,
    pub seed: u64,
    /// Return at the first violation.
    pub stop_at_first: bool,
}

impl Default for ValidationPlan {
    fn default() -> Self {
        ValidationPlan {
            exhaustive: true,
            samples: 0,
            seed: 0,
            stop_at_first: false,
        }
    }
}

impl ValidationPlan {
    pub fn sampled(samples: u64, seed: u64) -> Self {
        ValidationPlan {
            exhaustive: false,
            samples,
            seed,
            stop_at_first: false,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub checked: u64,
    pub skipped: u64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    fn fail(&mut self, law: Law, site: String) {
        self.violations.push(Violation { law, site });
    }

    fn stop(&self, plan: &ValidationPlan) -> bool {
        plan.stop_at_first && !self.ok()
    }

    pub fn merge(&mut self, other: ValidationReport) {
        self.checked += other.checked;
        self.skipped += other.skipped;
        self.violations.extend(other.violations);
    }
}

/// DG functor presented by an object map and one matrix per hom degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DgFunctor<S: Scalar> {
    pub obj: Vec<usize>,
    /// `maps[(x,y,n)]: Hom_C(x,y)^n -> Hom_D(Fx,Fy)^n` in coordinates.
    pub maps: BTreeMap<(usize, usize, Degree), Matrix<S>>,
}

impl<S: Scalar> DgFunctor<S> {
    pub fn identity(c: &DgCategory<S>) -> Self {
        let mut maps = BTreeMap::new();
        for x in 0..c.object_count() {
            for y in 0..c.object_count() {
                for &n in &c.hom(x, y).support() {
                    maps.insert((x, y, n), Matrix::identity(c.hom_rank(x, y, n)));
                }
            }
        }
        DgFunctor {
            obj: (0..c.object_count()).collect(),
            maps,
        }
    }

    pub fn apply(&self, d: &DgCategory<S>, f: &Mor<S>) -> Mor<S> {
        let (fx, fy) = (self.obj[f.src], self.obj[f.tgt]);
        let coords = match self.maps.get(&(f.src, f.tgt, f.degree)) {
            Some(m) => m.mul_vec(&f.coords),
            None => vec![S::zero(); d.hom_rank(fx, fy, f.degree)],
        };
        Mor {
            src: fx,
            tgt: fy,
            degree: f.degree,
            coords,
        }
    }
}

/// Functor laws: componentwise chain maps, composition, units.
pub fn validate_functor<S: Scalar>(
    c: &DgCategory<S>,
    d: &DgCategory<S>,
    f: &DgFunctor<S>,
    plan: &ValidationPlan,
) -> ValidationReport {
    let mut rep = ValidationReport::default();
    // F commutes with the differentials.
    for x in 0..c.object_count() {
        for y in 0..c.object_count() {
            let hc = c.hom(x, y);
            for &n in &hc.support() {
                for b in 0..hc.rank(n) {
                    let m = c.basis_mor(x, y, n, b);
                    if f.apply(d, &c.differential(&m)) == d.differential(&f.apply(d, &m)) {
                        rep.checked += 1;
                    } else {
                        rep.fail(
                            Law::Functor,
                            format!("F does not commute with d at ({x},{y}) degree {n} basis {b}"),
                        );
                        if rep.stop(plan) {
                            return rep;
                        }
                    }
                }
            }
        }
    }
    // F preserves units.
    for x in 0..c.object_count() {
        if f.apply(d, &c.unit(x)) == d.unit(f.obj[x]) {
            rep.checked += 1;
        } else {
            rep.fail(Law::Functor, format!("F(id_{x}) != id"));
            if rep.stop(plan) {
                return rep;
            }
        }
    }
    // F preserves composition on every basis pair of every stored table.
    for (x, y, z, p, q) in c.table_keys() {
        for a in 0..c.hom_rank(y, z, p) {
            for b in 0..c.hom_rank(x, y, q) {
                let g = c.basis_mor(y, z, p, a);
                let h = c.basis_mor(x, y, q, b);
                let lhs = c.compose(&g, &h).map(|m| f.apply(d, &m));
                let rhs = d.compose(&f.apply(d, &g), &f.apply(d, &h));
                match (lhs, rhs) {
                    (Some(l), Some(r)) => {
                        if l == r {
                            rep.checked += 1;
                        } else {
                            rep.fail(
                                Law::Functor,
                                format!("F(g∘h) != F(g)∘F(h) at ({x},{y},{z},{p},{q}) basis ({a},{b})"),
                            );
                            if rep.stop(plan) {
                                return rep;
                            }
                        }
                    }
                    _ => rep.skipped += 1,
                }
            }
        }
    }
    rep
}

/// Degree-`n` transformation `θ: F -> G`: one morphism `θ_x ∈
/// Hom_D(Fx, Gx)^n` per object. Naturality is the signed relation
/// `G(f) ∘ θ_x = (-1)^{mn} θ_y ∘ F(f)` for `f` of degree `m`.
pub fn check_naturality<S: Scalar>(
    c: &DgCategory<S>,
    d: &DgCategory<S>,
    f: &DgFunctor<S>,
    g: &DgFunctor<S>,
    theta: &BTreeMap<usize, Mor<S>>,
    n: Degree,
    plan: &ValidationPlan,
) -> ValidationReport {
    let mut rep = ValidationReport::default();
    for x in 0..c.object_count() {
        for y in 0..c.object_count() {
            let hc = c.hom(x, y);
            let (Some(tx), Some(ty)) = (theta.get(&x), theta.get(&y)) else {
                rep.skipped += 1;
                continue;
            };
            for &m in &hc.support() {
                let sgn: S = sign_pow((m as i64) * (n as i64));
                for b in 0..hc.rank(m) {
                    let mor = c.basis_mor(x, y, m, b);
                    let lhs = d.compose(&g.apply(d, &mor), tx);
                    let rhs = d.compose(ty, &f.apply(d, &mor)).map(|r| r.scale(&sgn));
                    match (lhs, rhs) {
                        (Some(l), Some(r)) => {
                            if l == r {
                                rep.checked += 1;
                            } else {
                                rep.fail(
                                    Law::Naturality,
                                    format!("naturality fails at ({x},{y}) degree {m} basis {b}"),
                                );
                                if rep.stop(plan) {
                                    return rep;
                                }
                            }
                        }
                        _ => rep.skipped += 1,
                    }
                }
            }
        }
    }
    rep
}
