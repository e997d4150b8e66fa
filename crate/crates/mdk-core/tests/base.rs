//! Exact linear algebra and complex operations against hand-computed
//! oracles, plus randomized invariant checks.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mdk_core::complex::{cone, ChainMap, Complex, CycleQuotient, Homology, HomComplex, TensorComplex};
use mdk_core::gen::{self, ComplexSpec};
use mdk_core::graded::GradedModule;
use mdk_core::matrix::Matrix;
use mdk_core::ring::Scalar;
use mdk_core::snf;

fn zmat(rows: &[&[i64]]) -> Matrix<BigInt> {
    Matrix::from_i64_rows(rows)
}

fn z(v: i64) -> BigInt {
    BigInt::from(v)
}

fn two_span_complex() -> Complex<BigInt> {
    // 0 -> Z --2--> Z -> 0 in degrees 0, 1.
    let modules = GradedModule::from_pairs([(0, 1), (1, 1)]);
    let mut diffs = BTreeMap::new();
    diffs.insert(0, zmat(&[&[2]]));
    Complex::new(modules, diffs).unwrap()
}

#[test]
fn snf_frozen_example() {
    // gcd of entries is 2 and |det| = 8, so the invariant factors are 2, 4.
    let a = zmat(&[&[2, 4], &[6, 8]]);
    let s = snf::smith_normal_form(&a).unwrap();
    assert_eq!(s.divisors, vec![z(2), z(4)]);
    assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    assert!(s.u.det().abs() == z(1));
    assert!(s.v.det().abs() == z(1));
}

#[test]
fn snf_rejects_rationals() {
    let a: Matrix<BigRational> = Matrix::identity(2);
    assert!(snf::smith_normal_form(&a).is_err());
}

#[test]
fn kernel_is_saturated_over_z() {
    // ker(2x - 2y) = span(1,1); saturation means (1,1) itself is reachable.
    let a = zmat(&[&[2, -2]]);
    let k = snf::kernel_basis(&a);
    assert_eq!(k.cols(), 1);
    assert!(a.mul(&k).is_zero());
    assert!(snf::solve(&k, &[z(1), z(1)]).is_some());
}

#[test]
fn solve_respects_ring() {
    let a = zmat(&[&[2, 0], &[0, 3]]);
    assert_eq!(
        snf::solve(&a, &[z(4), z(9)]),
        Some(vec![z(2), z(3)])
    );
    // 1 is not a multiple of 2 over Z...
    assert_eq!(snf::solve(&a, &[z(1), z(0)]), None);
    // ...but is over Q.
    let aq = a.map(|v| BigRational::from_integer(v.clone()));
    let b = [
        BigRational::from_integer(1.into()),
        BigRational::from_integer(0.into()),
    ];
    let x = snf::solve(&aq, &b).unwrap();
    assert_eq!(aq.mul_vec(&x), b.to_vec());
}

#[test]
fn homology_torsion_oracle() {
    let c = two_span_complex();
    assert_eq!(c.homology_at(0), Homology::free(0));
    assert_eq!(
        c.homology_at(1),
        Homology { free_rank: 0, torsion: vec![z(2)] }
    );
    // Over Q multiplication by 2 is invertible, so the complex is acyclic.
    let cq = rationalize(&c);
    assert!(cq.is_acyclic());
}

#[test]
fn homology_cokernel_oracle() {
    // 0 -> Z^2 --[[2,4],[6,8]]--> Z^2 -> 0: H^0 = 0, H^1 = Z/2 + Z/4.
    let modules = GradedModule::from_pairs([(0, 2), (1, 2)]);
    let mut diffs = BTreeMap::new();
    diffs.insert(0, zmat(&[&[2, 4], &[6, 8]]));
    let c = Complex::new(modules, diffs).unwrap();
    assert_eq!(c.homology_at(0), Homology::free(0));
    assert_eq!(
        c.homology_at(1),
        Homology { free_rank: 0, torsion: vec![z(2), z(4)] }
    );
}

#[test]
fn shift_moves_homology_and_squares_to_zero() {
    let c = two_span_complex();
    let s = c.shift(1);
    assert_eq!(s.rank(0), 1);
    assert_eq!(s.d(-1), zmat(&[&[-2]]));
    assert_eq!(s.homology_at(0), c.homology_at(1));
    assert_eq!(s.shift(-1), c);
}

#[test]
fn d_squared_is_rejected() {
    let modules = GradedModule::from_pairs([(0, 1), (1, 1), (2, 1)]);
    let mut diffs = BTreeMap::new();
    diffs.insert(0, zmat(&[&[1]]));
    diffs.insert(1, zmat(&[&[1]]));
    assert!(Complex::new(modules, diffs).is_err());
}

#[test]
fn cone_of_identity_is_acyclic() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let (c, _) = gen::random_complex::<BigInt, _>(&mut rng, &ComplexSpec::new(-2, 2, 5));
        let cn = cone(&ChainMap::identity(&c));
        assert!(cn.complex.is_acyclic());
        assert!(cn.proj.compose(&cn.incl).is_zero());
    }
}

#[test]
fn cone_oracle_multiplication_by_two() {
    // Cone of Z --2--> Z (both concentrated in degree 0) is the two-span
    // complex shifted into degrees -1, 0; its H^0 is Z/2.
    let pt = Complex::concentrated(0, 1);
    let mut comps = BTreeMap::new();
    comps.insert(0, zmat(&[&[2]]));
    let f = ChainMap::new(pt.clone(), pt.clone(), 0, comps).unwrap();
    let cn = cone(&f);
    assert_eq!(
        cn.complex.homology_at(0),
        Homology { free_rank: 0, torsion: vec![z(2)] }
    );
    assert_eq!(cn.complex.homology_at(-1), Homology::free(0));
}

#[test]
fn tensor_kunneth_oracle() {
    // X = (0 -> Z --2--> Z -> 0): H^1(X ⊗ X) and H^2(X ⊗ X) are both Z/2
    // (one from the product of the torsion classes, one from their Tor).
    let x = two_span_complex();
    let t = TensorComplex::new(&x, &x);
    let mut expected = BTreeMap::new();
    expected.insert(1, Homology { free_rank: 0, torsion: vec![z(2)] });
    expected.insert(2, Homology { free_rank: 0, torsion: vec![z(2)] });
    assert_eq!(t.complex.homology(), expected);
}

#[test]
fn tensor_symmetry_is_an_involution() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let (x, _) = gen::random_complex::<BigInt, _>(&mut rng, &ComplexSpec::new(-1, 2, 4));
        let (y, _) = gen::random_complex::<BigInt, _>(&mut rng, &ComplexSpec::new(0, 2, 4));
        let xy = TensorComplex::new(&x, &y);
        let yx = TensorComplex::new(&y, &x);
        // Constructor validates the chain-map condition of τ itself.
        let t1 = mdk_core::complex::tensor_symmetry(&xy, &yx);
        let t2 = mdk_core::complex::tensor_symmetry(&yx, &xy);
        assert_eq!(t2.compose(&t1), ChainMap::identity(&xy.complex));
    }
}

#[test]
fn hom_complex_cycles_are_chain_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let (x, _) = gen::random_complex::<BigInt, _>(&mut rng, &ComplexSpec::new(-1, 1, 3));
        let (y, _) = gen::random_complex::<BigInt, _>(&mut rng, &ComplexSpec::new(0, 2, 3));
        let hom = HomComplex::new(&x, &y);
        for k in -2..=2 {
            // random_chain_map draws from ker(d_hom) and revalidates the
            // degree-k chain condition in ChainMap::new.
            let f = gen::random_chain_map(&mut rng, &hom, k, 3);
            assert!(f.is_chain_map());
        }
    }
}

#[test]
fn identity_is_a_hom_complex_cycle() {
    let (x, _) = gen::random_complex::<BigInt, _>(
        &mut ChaCha8Rng::seed_from_u64(3),
        &ComplexSpec::new(-2, 2, 6),
    );
    let hom = HomComplex::new(&x, &x);
    let id = ChainMap::identity(&x);
    let gm = mdk_core::complex::GradedMap { degree: 0, comps: (-2..=2).map(|n| (n, id.component(n))).collect() };
    let (_, v) = hom.flatten(&gm);
    assert!(hom.complex.is_cycle(0, &v));
}

#[test]
fn chain_map_validation_rejects_non_maps() {
    let c = two_span_complex();
    let mut comps = BTreeMap::new();
    comps.insert(0, zmat(&[&[1]]));
    comps.insert(1, zmat(&[&[0]]));
    // f^1 d = 0 but d f^0 = 2: not a chain map.
    assert!(ChainMap::new(c.clone(), c.clone(), 0, comps).is_err());
}

#[test]
fn cycle_quotient_oracle() {
    // ker(0)/im(2) on Z: classes are Z/2.
    let d_out: Matrix<BigInt> = Matrix::zero(0, 1);
    let d_in = zmat(&[&[2]]);
    let q = CycleQuotient::new(&d_out, &d_in);
    assert_eq!(q.free_rank, 0);
    assert_eq!(q.torsion, vec![z(2)]);
    assert_eq!(q.class_coords(&[z(3)]), Some(vec![z(1)]));
    assert_eq!(q.is_zero_class(&[z(4)]), Some(true));
    assert_eq!(q.is_zero_class(&[z(5)]), Some(false));
}

#[test]
fn random_complex_homology_matches_construction_z() {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    for i in 0..200 {
        let spec = ComplexSpec::new(-3, 3, 3 + (i % 6));
        let (c, expected) = gen::random_complex::<BigInt, _>(&mut rng, &spec);
        assert_eq!(c.homology(), expected, "seeded instance {i}");
    }
}

#[test]
fn random_complex_homology_matches_construction_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(2027);
    for i in 0..100 {
        let spec = ComplexSpec::new(-2, 3, 3 + (i % 5));
        let (c, expected) = gen::random_complex::<BigRational, _>(&mut rng, &spec);
        assert_eq!(c.homology(), expected, "seeded instance {i}");
    }
}

fn rationalize(c: &Complex<BigInt>) -> Complex<BigRational> {
    let mut modules = GradedModule::new();
    for &n in &c.support() {
        modules.set_rank(n, c.rank(n));
    }
    let diffs = c
        .support()
        .iter()
        .map(|&n| (n, c.d(n).map(|v| BigRational::from_integer(v.clone()))))
        .collect();
    Complex::new(modules, diffs).unwrap()
}

#[test]
fn determinant_oracles() {
    assert_eq!(zmat(&[&[1, 2], &[3, 4]]).det(), z(-2));
    assert_eq!(
        zmat(&[&[2, 0, 1], &[1, 1, 0], &[0, 3, 1]]).det(),
        z(5)
    );
    let e: Matrix<BigInt> = Matrix::identity(0);
    assert_eq!(e.det(), z(1));
}

#[test]
fn unimodular_pairs_are_inverse() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..6 {
        let (u, uinv) = gen::rand_unimodular_pair::<BigInt, _>(&mut rng, n, 20, 2);
        assert!(u.mul(&uinv).is_identity());
        assert_eq!(u.det().abs(), z(1));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn snf_invariants(rows in 1usize..6, cols in 1usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Matrix<BigInt> = gen::rand_matrix(&mut rng, rows, cols, 9);
        let s = snf::smith_normal_form(&a).unwrap();
        prop_assert_eq!(s.u.mul(&a).mul(&s.v), s.d.clone());
        prop_assert_eq!(s.u.det().abs(), z(1));
        prop_assert_eq!(s.v.det().abs(), z(1));
        for w in s.divisors.windows(2) {
            prop_assert!(w[1].div_exact(&w[0]).is_some(), "divisibility chain");
        }
        for (i, d) in s.divisors.iter().enumerate() {
            prop_assert_eq!(s.d.get(i, i), d);
            prop_assert!(*d > z(0));
        }
        // Rank agrees with the rational rank.
        let aq = a.map(|v| BigRational::from_integer(v.clone()));
        prop_assert_eq!(s.divisors.len(), snf::rank(&aq));
        // Kernel and image have complementary dimensions.
        let k = snf::kernel_basis(&a);
        prop_assert_eq!(k.cols(), cols - s.divisors.len());
        prop_assert!(a.mul(&k).is_zero());
        let im = snf::image_basis(&a);
        prop_assert_eq!(im.cols(), s.divisors.len());
        for j in 0..im.cols() {
            prop_assert!(snf::in_image(&a, &im.col(j)));
        }
    }

    #[test]
    fn solve_finds_exact_preimages(rows in 1usize..5, cols in 1usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Matrix<BigInt> = gen::rand_matrix(&mut rng, rows, cols, 5);
        let x: Vec<BigInt> = (0..cols).map(|_| gen::int_in(&mut rng, 5)).collect();
        let b = a.mul_vec(&x);
        let sol = snf::solve(&a, &b).expect("constructed image vector");
        prop_assert_eq!(a.mul_vec(&sol), b);
    }

    #[test]
    fn kronecker_mixed_product(seed in any::<u64>()) {
        // (A ⊗ B)(C ⊗ D) = AC ⊗ BD.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Matrix<BigInt> = gen::rand_matrix(&mut rng, 2, 3, 4);
        let b: Matrix<BigInt> = gen::rand_matrix(&mut rng, 3, 2, 4);
        let c: Matrix<BigInt> = gen::rand_matrix(&mut rng, 3, 2, 4);
        let d: Matrix<BigInt> = gen::rand_matrix(&mut rng, 2, 3, 4);
        prop_assert_eq!(
            a.kronecker(&b).mul(&c.kronecker(&d)),
            a.mul(&c).kronecker(&b.mul(&d))
        );
    }
}
