//! Cube category and cubical object tests: generator relations, the face
//! differential, degeneracy splittings, the nondegenerate complex, cup
//! products, and the Tot/lambda comparison with its windowed verdict.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::One;

use mdk_core::complex::Complex;
use mdk_core::cube::{
    cube_faces, cup_associativity, cup_product, free_cubical, nondegenerate_complex, pi_projector,
    splitting, tot, tot_lambda, validate_cubical, ConstantCubical, CubeMorphism, Cubical,
    MatrixCubical, WindowVerdict,
};
use mdk_core::gen;
use mdk_core::graded::GradedModule;
use mdk_core::matrix::Matrix;
use mdk_core::ring::sign_pow;
use mdk_core::rng_from_seed;
use mdk_core::snf;

fn zmat(rows: &[&[i64]]) -> Matrix<BigInt> {
    Matrix::from_i64_rows(rows)
}

// Representable model conjugated by a fixed unimodular change of basis per
// level: still functorial, no longer permutation-shaped.
fn conjugated_representable(
    n_max: usize,
    seed: u64,
) -> MatrixCubical<BigInt, impl Fn(&CubeMorphism) -> Matrix<BigInt>> {
    let mut rng = rng_from_seed(seed);
    let pairs: Vec<(Matrix<BigInt>, Matrix<BigInt>)> = (0..=n_max)
        .map(|n| gen::rand_unimodular_pair::<BigInt, _>(&mut rng, 1 << n, 4, 2))
        .collect();
    let ranks: Vec<usize> = (0..=n_max).map(|n| 1 << n).collect();
    MatrixCubical::new(ranks, true, move |f: &CubeMorphism| {
        let mut m = Matrix::zero(1 << f.src, 1 << f.tgt);
        for v in 0..1u32 << f.src {
            m.set(v as usize, f.apply(v) as usize, BigInt::one());
        }
        pairs[f.src].0.mul(&m).mul(&pairs[f.tgt].1)
    })
}

#[test]
fn generator_relations_hold_on_tables() {
    for n in 1..=3 {
        for i in 1..=n {
            for eps in [false, true] {
                let pe = CubeMorphism::proj(n, i).compose_after(&CubeMorphism::eta(n - 1, i, eps));
                assert_eq!(pe, CubeMorphism::identity(n - 1));
            }
            let tt = CubeMorphism::tau(n, i).compose_after(&CubeMorphism::tau(n, i));
            assert_eq!(tt, CubeMorphism::identity(n));
        }
    }
    // Multiplying against a slot pinned to 1 is the identity: x * 1 = x.
    for slot in [1, 2] {
        let pin = CubeMorphism::eta(1, slot, true);
        let me = CubeMorphism::mul(2, 1).compose_after(&pin);
        assert_eq!(me, CubeMorphism::identity(1));
    }
    assert_eq!(CubeMorphism::mul(2, 1).apply(0b11), 1);
    assert_eq!(CubeMorphism::mul(2, 1).apply(0b01), 0);
    assert!(CubeMorphism::mul(2, 1).uses_mul());
    assert!(!CubeMorphism::eta(1, 1, true).uses_mul());
}

#[test]
fn permutations_and_products_are_cartesian() {
    let p = CubeMorphism::perm(3, &[2, 3, 1]);
    assert_eq!(p.apply(0b001), 0b100);
    assert_eq!(p.apply(0b010), 0b001);
    let q = CubeMorphism::perm(3, &[3, 1, 2]);
    assert_eq!(
        q.compose_after(&p),
        CubeMorphism::identity(3),
        "inverse permutations compose to the identity"
    );

    // Product acts slotwise: low slots through f, high slots through g.
    let f = CubeMorphism::eta(1, 1, true);
    let g = CubeMorphism::proj(2, 2);
    let fg = f.product(&g);
    assert_eq!((fg.src, fg.tgt), (3, 3));
    for x in 0..8u32 {
        let xl = x & 1;
        let xh = x >> 1;
        assert_eq!(fg.apply(x), f.apply(xl) | (g.apply(xh) << f.tgt));
    }

    // Interchange: (f2 o f1) x (g2 o g1) = (f2 x g2) o (f1 x g1).
    let f1 = CubeMorphism::eta(1, 1, true);
    let f2 = CubeMorphism::proj(2, 2);
    let g1 = CubeMorphism::tau(1, 1);
    let g2 = CubeMorphism::eta(1, 2, false);
    let lhs = f2.compose_after(&f1).product(&g2.compose_after(&g1));
    let rhs = f2.product(&g2).compose_after(&f1.product(&g1));
    assert_eq!(lhs, rhs);
}

#[test]
fn keep_and_zero_inclusion_tables() {
    assert_eq!(CubeMorphism::zero_inclusion(3).apply(0), 0);
    let kf = CubeMorphism::keep_first(1, 2);
    assert_eq!((kf.src, kf.tgt), (3, 1));
    let kl = CubeMorphism::keep_last(1, 2);
    assert_eq!((kl.src, kl.tgt), (3, 2));
    for x in 0..8u32 {
        assert_eq!(kf.apply(x), x & 1);
        assert_eq!(kl.apply(x), x >> 1);
    }
}

#[test]
fn constant_cubical_has_zero_face_differential() {
    let value = Complex::<BigInt>::concentrated(0, 2);
    let a = ConstantCubical { n_max: 3, value };
    for k in 1..=3 {
        assert!(cube_faces(&a, k).comps.is_empty());
    }
}

#[test]
fn point_point_face_map_matches_hand_computation() {
    // d on Z[{0,1}] sends a[0] + b[1] to a - b.
    let a = free_cubical::<BigInt>(1);
    let d = cube_faces(&a, 1).component_at(0, &a.level(1), &a.level(0));
    assert_eq!(d, zmat(&[&[1, -1]]));
}

#[test]
fn representable_total_complex_squares_to_zero() {
    let a = free_cubical::<BigInt>(4);
    let t = tot(&a).expect("representable Tot must assemble");
    assert_eq!(t.complex.support(), vec![-4, -3, -2, -1, 0]);
    assert_eq!(t.complex.rank(-2), 4);
    assert_eq!(t.blocks(-2), vec![(2, 0, 4)]);

    let c = conjugated_representable(3, 11);
    tot(&c).expect("conjugated representable Tot must assemble");
}

#[test]
fn functoriality_sampling_on_representables() {
    let a = free_cubical::<BigInt>(3);
    let mut rng = rng_from_seed(51);
    assert_eq!(validate_cubical(&a, &mut rng, 1000), Ok(1000));

    let c = conjugated_representable(3, 52);
    let mut rng = rng_from_seed(53);
    assert_eq!(validate_cubical(&c, &mut rng, 1000), Ok(1000));
}

#[test]
fn broken_action_rejected() {
    // Flip the sign of one eta pullback: the slot-1 projectors stop being
    // idempotent and functoriality fails under sampling.
    let flipped = CubeMorphism::eta(0, 1, true);
    let bad = MatrixCubical::new(vec![1, 2], false, move |f: &CubeMorphism| {
        let mut m = Matrix::zero(1 << f.src, 1 << f.tgt);
        for v in 0..1u32 << f.src {
            m.set(v as usize, f.apply(v) as usize, BigInt::one());
        }
        if f == &flipped {
            m = m.neg();
        }
        m
    });
    assert!(splitting(&bad, 1).is_err());
    let mut rng = rng_from_seed(54);
    assert!(validate_cubical(&bad, &mut rng, 200).is_err());
}

#[test]
fn degeneracy_splitting_level_one() {
    let a = free_cubical::<BigInt>(2);
    let parts = splitting(&a, 1).expect("splitting at level 1");
    let part = &parts[&0];
    assert_eq!(part.nondeg.cols(), 1);
    assert_eq!(part.degen.cols(), 1);
    // Degenerate part is spanned by [0] + [1], the nondegenerate by [0].
    assert!(snf::solve_matrix(&part.degen, &zmat(&[&[1], &[1]])).is_some());
    assert!(snf::solve_matrix(&zmat(&[&[1], &[1]]), &part.degen).is_some());
    assert!(snf::solve_matrix(&part.nondeg, &zmat(&[&[1], &[0]])).is_some());
}

#[test]
fn degeneracy_splitting_level_two_ranks() {
    let a = free_cubical::<BigInt>(2);
    let parts = splitting(&a, 2).expect("splitting at level 2");
    let part = &parts[&0];
    assert_eq!(part.nondeg.cols(), 1);
    assert_eq!(part.degen.cols(), 3);
    // A0 at level 2 is spanned by [(0,0)].
    let e00 = zmat(&[&[1], &[0], &[0], &[0]]);
    assert!(snf::solve_matrix(&part.nondeg, &e00).is_some());
    assert!(snf::solve_matrix(&e00, &part.nondeg).is_some());
}

#[test]
fn partial_projectors_kill_projection_images() {
    let c = conjugated_representable(3, 55);
    for n in 1..=3usize {
        let here = c.level(n);
        let below = c.level(n - 1);
        let r = here.rank(0);
        for m in 1..=n {
            let mut proj = Matrix::identity(r);
            for i in 1..=m {
                let pi = pi_projector(&c, n, i, true).component_at(0, &here, &here);
                proj = Matrix::identity(r).sub(&pi).mul(&proj);
            }
            assert_eq!(proj.mul(&proj), proj, "partial projector idempotent");
            for i in 1..=m {
                let pstar = c
                    .act(&CubeMorphism::proj(n, i))
                    .component_at(0, &below, &here);
                assert!(proj.mul(&pstar).is_zero(), "pi_{{{n},{m}}} kills p*_{i}");
                let et1 = c
                    .act(&CubeMorphism::eta(n - 1, i, true))
                    .component_at(0, &here, &below);
                assert!(et1.mul(&proj).is_zero(), "image misses ker of 1-face {i}");
            }
        }
    }
}

#[test]
fn degenerate_face_image_vanishes_only_in_the_quotient() {
    // The literal face image of the degenerate part is nonzero on the
    // representable model; what vanishes is its nondegenerate component.
    let a = free_cubical::<BigInt>(2);
    let d = cube_faces(&a, 2).component_at(0, &a.level(2), &a.level(1));
    let pstar = a
        .act(&CubeMorphism::proj(2, 1))
        .component_at(0, &a.level(1), &a.level(2));
    let img = d.mul(&pstar);
    // d(p*[u]) = (delta_{u,1} - delta_{u,0}) ([0] + [1]).
    assert_eq!(img, zmat(&[&[-1, 1], &[-1, 1]]));
    assert!(!img.is_zero(), "the literal vanishing claim fails");

    let parts1 = splitting(&a, 1).expect("level-1 splitting");
    let part = &parts1[&0];
    assert!(part.projector.mul(&img).is_zero(), "quotient component is zero");
    assert!(snf::solve_matrix(&part.degen, &img).is_some(), "image is degenerate");
}

#[test]
fn nondegenerate_complex_of_representable() {
    let a = free_cubical::<BigInt>(3);
    let nd = nondegenerate_complex(&a).expect("nondegenerate complex");
    // One nondegenerate generator [0^n] per level.
    for (n, parts) in nd.splittings.iter().enumerate() {
        assert_eq!(parts[&0].nondeg.cols(), 1, "level {} rank", n + 1);
        assert_eq!(parts[&0].degen.cols(), (1usize << (n + 1)) - 1);
    }
    // Restricted differentials alternate: iso from odd levels, zero from
    // even levels (the remark form sums i = 1..n of (-1)^(i-1)).
    let t = &nd.total;
    assert_eq!(t.complex.support(), vec![-3, -2, -1, 0]);
    for p in [-3, -1] {
        let d = t.complex.d(p);
        assert_eq!(d.rows(), 1);
        assert_eq!((d.get(0, 0) * d.get(0, 0)), BigInt::one(), "unit at {p}");
    }
    assert!(t.complex.d(-2).is_zero());
    // The inclusion into the full Tot is a chain map with full-rank
    // components (a direct summand embedding).
    for &p in &t.complex.support() {
        assert_eq!(snf::rank(&nd.include.component(p)), t.complex.rank(p));
    }
}

#[test]
fn nondegenerate_complex_of_conjugated_representable() {
    let c = conjugated_representable(3, 56);
    let nd = nondegenerate_complex(&c).expect("nondegenerate complex");
    for (n, parts) in nd.splittings.iter().enumerate() {
        let part = &parts[&0];
        assert_eq!(part.nondeg.cols() + part.degen.cols(), 1 << (n + 1));
        assert_eq!(part.nondeg.cols(), 1);
    }
    nd.total.complex.support();
}

#[test]
fn remark_form_of_differential_on_nondegenerate_part() {
    // On A0 the face differential reduces to sum_i (-1)^(i-1) eta*_{i,0}.
    let c = conjugated_representable(3, 57);
    for n in 1..=3usize {
        let here = c.level(n);
        let below = c.level(n - 1);
        let parts = splitting(&c, n).expect("splitting");
        let part = &parts[&0];
        let d = cube_faces(&c, n).component_at(0, &here, &below);
        let mut remark = Matrix::zero(below.rank(0), here.rank(0));
        for i in 1..=n {
            let e0 = c
                .act(&CubeMorphism::eta(n - 1, i, false))
                .component_at(0, &here, &below);
            remark = remark.add(&e0.scale(&sign_pow::<BigInt>((i + 1) as i64)));
        }
        assert_eq!(d.mul(&part.nondeg), remark.mul(&part.nondeg));
    }
}

#[test]
fn tot_lambda_constant_is_quasi_iso_in_window() {
    // Value with free and torsion homology: H^0 = Z, H^1 = Z/2.
    let modules = GradedModule::from_pairs([(0, 2), (1, 1)]);
    let mut diffs = BTreeMap::new();
    diffs.insert(0, zmat(&[&[2, 0]]));
    let value = Complex::new(modules, diffs).expect("value complex");
    let a = ConstantCubical { n_max: 3, value: value.clone() };

    let tl = tot_lambda(&a).expect("tot_lambda");
    assert!(tl.hypothesis_holds);
    assert!(matches!(tl.verdict, WindowVerdict::Acyclic { .. }), "{:?}", tl.verdict);
    // All higher levels are purely degenerate, so Tot(A_*) is A0 itself
    // and lambda is the identity.
    for &p in &value.support() {
        assert_eq!(tl.nondeg.total.complex.rank(p), value.rank(p));
        assert!(tl.lambda.component(p).is_identity());
    }
    for parts in &tl.nondeg.splittings {
        for part in parts.values() {
            assert_eq!(part.nondeg.cols(), 0);
        }
    }
}

#[test]
fn tot_lambda_zero_object_trivially_acyclic() {
    struct ZeroCubical;
    impl Cubical<BigInt> for ZeroCubical {
        fn truncation(&self) -> usize {
            2
        }
        fn level(&self, _n: usize) -> Complex<BigInt> {
            Complex::with_zero_diff(GradedModule::new())
        }
        fn act(&self, _f: &CubeMorphism) -> mdk_core::complex::GradedMap<BigInt> {
            mdk_core::complex::GradedMap { degree: 0, comps: BTreeMap::new() }
        }
    }
    let tl = tot_lambda(&ZeroCubical).expect("tot_lambda");
    assert!(tl.hypothesis_holds);
    assert!(matches!(tl.verdict, WindowVerdict::Acyclic { .. }));
}

#[test]
fn tot_lambda_detects_hypothesis_violation() {
    // The representable model: A(i_1): Z^2 -> Z is not a quasi-iso, and
    // lambda genuinely fails (the nondegenerate Tot is acyclic while A0
    // is not).
    let a = free_cubical::<BigInt>(3);
    let tl = tot_lambda(&a).expect("tot_lambda");
    assert!(!tl.hypothesis_holds);
    assert_eq!(tl.verdict, WindowVerdict::Fails { degree: -1 });
}

#[test]
fn tot_lambda_narrow_window_is_indeterminate() {
    // Level 1 lives in internal degree 9 with truncation 1: the safe
    // window starts above everything the cone can see.
    struct HighCubical;
    impl Cubical<BigInt> for HighCubical {
        fn truncation(&self) -> usize {
            1
        }
        fn level(&self, n: usize) -> Complex<BigInt> {
            if n == 0 {
                Complex::with_zero_diff(GradedModule::new())
            } else {
                Complex::concentrated(9, 1)
            }
        }
        fn act(&self, f: &CubeMorphism) -> mdk_core::complex::GradedMap<BigInt> {
            let mut comps = BTreeMap::new();
            if f.src == 1 && f.tgt == 1 {
                comps.insert(9, Matrix::identity(1));
            }
            mdk_core::complex::GradedMap { degree: 0, comps }
        }
    }
    let tl = tot_lambda(&HighCubical).expect("tot_lambda");
    assert_eq!(tl.verdict, WindowVerdict::Indeterminate);
}

#[test]
fn cup_product_on_representables() {
    let a = free_cubical::<BigInt>(2);
    let b = free_cubical::<BigInt>(2);
    let cup = cup_product(&a, &b).expect("cup product");

    // Window: everything through level sum 2 survives, level sum 3 dies.
    assert_eq!(cup.source.rank(0), 1);
    assert_eq!(cup.source.rank(-1), 4);
    assert_eq!(cup.source.rank(-2), 12);
    assert_eq!(cup.source.rank(-3), 0);
    assert!(cup.include.component(-1).is_identity());

    // Degree 0: the (0,0) block maps by the identity.
    assert!(cup.map.component(0).is_identity());
    // Degree -1: hand-computed images of the four basis tensors.
    assert_eq!(
        cup.map.component(-1),
        zmat(&[
            &[1, 0, 1, 0],
            &[1, 0, 0, 1],
            &[0, 1, 1, 0],
            &[0, 1, 0, 1],
        ])
    );
}

#[test]
fn cup_of_constants_collapses_to_identity_blocks() {
    let value = Complex::<BigInt>::concentrated(0, 1);
    let a = ConstantCubical { n_max: 2, value: value.clone() };
    let b = ConstantCubical { n_max: 2, value };
    let cup = cup_product(&a, &b).expect("cup product");
    assert_eq!(cup.map.component(0), zmat(&[&[1]]));
    assert_eq!(cup.map.component(-1), zmat(&[&[1, 1]]));
    assert_eq!(cup.map.component(-2), zmat(&[&[1, 1, 1]]));
}

#[test]
fn cup_associativity_on_mixed_triples() {
    let a = free_cubical::<BigInt>(3);
    let b = conjugated_representable(3, 58);
    let c = ConstantCubical { n_max: 3, value: Complex::<BigInt>::concentrated(0, 2) };
    let checked = cup_associativity(&a, &b, &c).expect("associativity");
    assert_eq!(checked, 20, "all level triples with sum <= 3");
}
