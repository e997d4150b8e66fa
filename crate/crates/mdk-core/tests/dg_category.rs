//! DG category axioms on the category of complexes, opposites, H^0, and
//! detection of corrupted structure.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mdk_core::complex::{hom_flatten, Complex, GradedMap};
use mdk_core::dg::{
    check_naturality, validate_functor, Biproduct, DgCategory, DgFunctor, Mor, ValidationPlan,
};
use mdk_core::gen::{self, ComplexSpec};
use mdk_core::graded::GradedModule;
use mdk_core::matrix::Matrix;

fn z(v: i64) -> BigInt {
    BigInt::from(v)
}

fn two_span() -> Complex<BigInt> {
    let modules = GradedModule::from_pairs([(0, 1), (1, 1)]);
    let mut diffs = BTreeMap::new();
    diffs.insert(0, Matrix::from_i64_rows(&[&[2]]));
    Complex::new(modules, diffs).unwrap()
}

fn random_objects(seed: u64, count: usize) -> Vec<Complex<BigInt>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| gen::random_complex(&mut rng, &ComplexSpec::new(-1, 1, 3)).0)
        .collect()
}

#[test]
fn category_of_complexes_validates() {
    let c = DgCategory::from_complexes(random_objects(41, 3));
    let rep = c.validate(&ValidationPlan::default());
    assert!(rep.ok(), "violations: {:?}", rep.violations);
    assert!(rep.checked > 50);
}

#[test]
fn materialized_tables_agree_with_functional_composition() {
    let c = DgCategory::from_complexes(random_objects(42, 2));
    let t = c.materialize_tables();
    for (x, y, zz, p, q) in c.table_keys() {
        for a in 0..c.hom_rank(y, zz, p) {
            for b in 0..c.hom_rank(x, y, q) {
                let f = c.basis_mor(y, zz, p, a);
                let g = c.basis_mor(x, y, q, b);
                assert_eq!(c.compose(&f, &g), t.compose(&f, &g));
            }
        }
    }
    let rep = t.validate(&ValidationPlan::default());
    assert!(rep.ok(), "violations: {:?}", rep.violations);
}

#[test]
fn opposite_is_an_involution_and_validates() {
    let c = DgCategory::from_complexes(random_objects(43, 2)).materialize_tables();
    let op = c.opposite();
    // Hom_{op}(x,y) = Hom(y,x) with the same differential.
    for x in 0..c.object_count() {
        for y in 0..c.object_count() {
            assert_eq!(op.hom(x, y), c.hom(y, x));
        }
    }
    let rep = op.validate(&ValidationPlan::default());
    assert!(rep.ok(), "opposite violations: {:?}", rep.violations);
    assert_eq!(op.opposite(), c);
}

#[test]
fn sampled_validation_passes_on_valid_category() {
    let c = DgCategory::from_complexes(random_objects(44, 3));
    let rep = c.validate(&ValidationPlan::sampled(300, 7));
    assert!(rep.ok(), "violations: {:?}", rep.violations);
    assert!(rep.checked >= 300);
}

#[test]
fn h0_of_two_span_endomorphisms_is_z_mod_2() {
    // Chain endomorphisms of (Z --2--> Z) are pairs (a, a); a null-homotopy
    // h contributes 2h, so H^0 End = Z/2.
    let c = DgCategory::from_complexes(vec![two_span()]);
    let q = c.h0_hom(0, 0);
    assert_eq!(q.free_rank, 0);
    assert_eq!(q.torsion, vec![z(2)]);
    let id = c.unit(0);
    assert_eq!(q.is_zero_class(&id.coords), Some(false));
    let two_id = id.scale(&z(2));
    assert_eq!(q.is_zero_class(&two_id.coords), Some(true));
}

#[test]
fn z0_basis_spans_chain_maps() {
    let c = DgCategory::from_complexes(random_objects(45, 2));
    let k = c.z0_hom_basis(0, 1);
    for j in 0..k.cols() {
        let f = c.mor(0, 1, 0, k.col(j));
        assert!(c.is_cycle(&f));
    }
}

#[test]
fn identity_functor_and_identity_transformation_validate() {
    let c = DgCategory::from_complexes(random_objects(46, 2));
    let f = DgFunctor::identity(&c);
    let rep = validate_functor(&c, &c, &f, &ValidationPlan::default());
    assert!(rep.ok(), "violations: {:?}", rep.violations);

    let theta: BTreeMap<usize, Mor<BigInt>> =
        (0..c.object_count()).map(|x| (x, c.unit(x))).collect();
    let rep = check_naturality(&c, &c, &f, &f, &theta, 0, &ValidationPlan::default());
    assert!(rep.ok(), "violations: {:?}", rep.violations);
}

#[test]
fn mismatched_transformation_is_rejected() {
    // Two copies of the same complex; scaling θ differently on each object
    // breaks naturality against the identity morphism between the copies.
    let x = two_span();
    let c = DgCategory::from_complexes(vec![x.clone(), x]);
    let f = DgFunctor::identity(&c);
    let mut theta: BTreeMap<usize, Mor<BigInt>> = BTreeMap::new();
    theta.insert(0, c.unit(0).scale(&z(2)));
    theta.insert(1, c.unit(1).scale(&z(3)));
    let rep = check_naturality(&c, &c, &f, &f, &theta, 0, &ValidationPlan::default());
    assert!(!rep.ok());
}

#[test]
fn biproduct_witnesses_validate() {
    let x = two_span();
    let y = x.shift(1);
    let sum = x.direct_sum(&y);
    let mut c = DgCategory::from_complexes(vec![x.clone(), y.clone(), sum.clone()]);

    let block = |rows: usize, cols: usize, at_top: bool, tall: bool| {
        // Inclusion/projection blocks: [I; 0], [0; I], [I 0], [0 I].
        let mut m = Matrix::zero(rows, cols);
        let k = rows.min(cols);
        for i in 0..k {
            let (r, cc) = if tall {
                (if at_top { i } else { rows - k + i }, i)
            } else {
                (i, if at_top { i } else { cols - k + i })
            };
            m.set(r, cc, z(1));
        }
        m
    };
    let gm = |src: &Complex<BigInt>, tgt: &Complex<BigInt>, top: bool, tall: bool| {
        let comps = src
            .support()
            .into_iter()
            .filter(|&p| tgt.rank(p) > 0)
            .map(|p| (p, block(tgt.rank(p), src.rank(p), top, tall)))
            .collect();
        hom_flatten(src, tgt, &GradedMap { degree: 0, comps }).1
    };
    let bp = Biproduct {
        obj: 2,
        inj: [gm(&x, &sum, true, true), gm(&y, &sum, false, true)],
        proj: [gm(&sum, &x, true, false), gm(&sum, &y, false, false)],
    };
    c.add_biproduct(0, 1, bp);
    let rep = c.validate(&ValidationPlan::default());
    assert!(rep.ok(), "violations: {:?}", rep.violations);
}

#[test]
fn corrupted_table_is_detected() {
    let c = DgCategory::from_complexes(vec![two_span()]).materialize_tables();
    // Rebuild with one sign flipped in some nonzero composition table.
    let mut tables = BTreeMap::new();
    let mut flipped = false;
    for key in c.table_keys() {
        let (x, y, zz, p, q) = key;
        let mut t = c.composition_table(x, y, zz, p, q).unwrap();
        if !flipped && !t.is_zero() && (p, q) != (0, 0) {
            let (mut fi, mut fj) = (0, 0);
            'scan: for i in 0..t.rows() {
                for j in 0..t.cols() {
                    if !num_traits::Zero::is_zero(t.get(i, j)) {
                        (fi, fj) = (i, j);
                        break 'scan;
                    }
                }
            }
            let v = t.get(fi, fj).clone();
            t.set(fi, fj, -v);
            flipped = true;
        }
        tables.insert(key, t);
    }
    assert!(flipped, "expected a nonzero higher-degree table to corrupt");
    let mut homs = BTreeMap::new();
    let mut units = BTreeMap::new();
    for x in 0..c.object_count() {
        units.insert(x, c.unit(x).coords);
        for y in 0..c.object_count() {
            homs.insert((x, y), c.hom(x, y));
        }
    }
    let names = (0..c.object_count())
        .map(|i| c.object_name(i).to_string())
        .collect();
    let bad = DgCategory::from_tables(names, homs, units, tables);
    let rep = bad.validate(&ValidationPlan::default());
    assert!(!rep.ok(), "corruption must be detected");
}
