//! Finite-set correspondences: functoriality of graphs, the validated
//! cube realizations, and the explicit homotopy on Hom groups.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand_core::RngCore;

use mdk_core::cube::{
    all_generators, free_cubical, validate_cubical, CubeMorphism, Cubical, WindowVerdict,
};
use mdk_core::fincor::{
    fincor_cocube, fincor_homotopy_invariance, hom_cubical, homotopy_step, zero_collapse,
    CubeMonoid, FinCorr, FinCubeRealization, FinSetMap, FinSetObj,
};
use mdk_core::matrix::Matrix;
use mdk_core::rng_from_seed;

fn zmat(rows: &[&[i64]]) -> Matrix<BigInt> {
    Matrix::from_i64_rows(rows)
}

fn rand_map<R: RngCore>(rng: &mut R, src: usize, tgt: usize) -> FinSetMap {
    let table = (0..src).map(|_| rng.next_u32() as usize % tgt).collect();
    FinSetMap::new(src, tgt, table).unwrap()
}

fn rand_corr<R: RngCore>(rng: &mut R, src: usize, tgt: usize) -> FinCorr<BigInt> {
    let mut mat = Matrix::zero(tgt, src);
    for r in 0..tgt {
        for c in 0..src {
            let v = (rng.next_u32() % 7) as i64 - 3;
            mat.set(r, c, BigInt::from(v));
        }
    }
    FinCorr::new(FinSetObj::points(src), FinSetObj::points(tgt), mat).unwrap()
}

#[test]
fn graph_is_functorial() {
    let mut rng = rng_from_seed(11);
    for _ in 0..50 {
        let (a, b, c) = (
            1 + rng.next_u32() as usize % 4,
            1 + rng.next_u32() as usize % 4,
            1 + rng.next_u32() as usize % 4,
        );
        let (oa, ob, oc) = (FinSetObj::points(a), FinSetObj::points(b), FinSetObj::points(c));
        let f = rand_map(&mut rng, a, b);
        let g = rand_map(&mut rng, b, c);
        let gf = g.compose_after(&f).unwrap();
        let pushed = FinCorr::<BigInt>::graph(&g, &ob, &oc)
            .unwrap()
            .compose_after(&FinCorr::graph(&f, &oa, &ob).unwrap())
            .unwrap();
        // (g o f)_* = g_* o f_*
        assert_eq!(pushed.mat, FinCorr::<BigInt>::graph(&gf, &oa, &oc).unwrap().mat);
        // (g o f)^* = f^* o g^*: transposed graphs compose contravariantly.
        let pull = |m: &FinSetMap, s: &FinSetObj, t: &FinSetObj| {
            let fwd = FinCorr::<BigInt>::graph(m, s, t).unwrap();
            FinCorr::new(t.clone(), s.clone(), fwd.mat.transpose()).unwrap()
        };
        let pulled = pull(&f, &oa, &ob).compose_after(&pull(&g, &ob, &oc)).unwrap();
        assert_eq!(pulled.mat, pull(&gf, &oa, &oc).mat);
    }
    let id = FinSetMap::identity(5);
    let o = FinSetObj::points(5);
    assert!(FinCorr::<BigInt>::graph(&id, &o, &o).unwrap().mat.is_identity());
}

#[test]
fn tensor_is_functorial() {
    let mut rng = rng_from_seed(12);
    for _ in 0..30 {
        let dims: Vec<usize> = (0..6).map(|_| 1 + rng.next_u32() as usize % 3).collect();
        let f = rand_corr(&mut rng, dims[0], dims[1]);
        let f2 = rand_corr(&mut rng, dims[1], dims[2]);
        let g = rand_corr(&mut rng, dims[3], dims[4]);
        let g2 = rand_corr(&mut rng, dims[4], dims[5]);
        // (f2 (x) g2) o (f (x) g) = (f2 o f) (x) (g2 o g)
        let lhs = f2.tensor(&g2).compose_after(&f.tensor(&g)).unwrap();
        let rhs = f2.compose_after(&f).unwrap().tensor(&g2.compose_after(&g).unwrap());
        assert_eq!(lhs.mat, rhs.mat);
    }
}

#[test]
fn symmetry_is_natural_and_involutive() {
    let mut rng = rng_from_seed(13);
    for _ in 0..20 {
        let (a, b) = (
            1 + rng.next_u32() as usize % 3,
            1 + rng.next_u32() as usize % 3,
        );
        let (oa, ob) = (FinSetObj::points(a), FinSetObj::points(b));
        let roundtrip = FinCorr::<BigInt>::symmetry(&ob, &oa)
            .compose_after(&FinCorr::symmetry(&oa, &ob))
            .unwrap();
        assert!(roundtrip.mat.is_identity());

        let (c, d) = (
            1 + rng.next_u32() as usize % 3,
            1 + rng.next_u32() as usize % 3,
        );
        let f = rand_corr(&mut rng, a, c);
        let g = rand_corr(&mut rng, b, d);
        let lhs = FinCorr::symmetry(&FinSetObj::points(c), &FinSetObj::points(d))
            .compose_after(&f.tensor(&g))
            .unwrap();
        let rhs = g.tensor(&f).compose_after(&FinCorr::symmetry(&oa, &ob)).unwrap();
        assert_eq!(lhs.mat, rhs.mat);
    }
}

#[test]
fn cocube_two_validates() {
    assert!(fincor_cocube(CubeMonoid::two(), 3).is_ok());
}

#[test]
fn cocube_min3_validates() {
    assert!(fincor_cocube(CubeMonoid::min3(), 3).is_ok());
}

#[test]
fn broken_monoids_are_rejected() {
    // 0 not absorbing: 0 * 0 = 1.
    assert!(CubeMonoid::new(
        vec!["0".into(), "1".into()],
        vec![vec![1, 0], vec![0, 1]],
        vec![1, 0],
    )
    .is_err());
    // Involution fails to swap 0 and 1.
    assert!(CubeMonoid::new(
        vec!["0".into(), "1".into()],
        vec![vec![0, 0], vec![0, 1]],
        vec![0, 1],
    )
    .is_err());
    // Not commutative: left projection on the two extra elements.
    assert!(CubeMonoid::new(
        vec!["0".into(), "1".into(), "a".into(), "b".into()],
        vec![
            vec![0, 0, 0, 0],
            vec![0, 1, 2, 3],
            vec![0, 2, 2, 2],
            vec![0, 3, 3, 3],
        ],
        vec![1, 0, 2, 3],
    )
    .is_err());
}

#[test]
fn diagonal_matrix_is_frozen() {
    let real = FinCubeRealization::new(CubeMonoid::two()).unwrap();
    let delta: FinCorr<BigInt> = real.delta(1);
    assert_eq!(delta.mat, zmat(&[&[1, 0], &[0, 0], &[0, 0], &[0, 1]]));
    // Concatenation is the canonical re-indexing permutation between the
    // tensor encoding (first factor high) and digit encoding (slot 1 low).
    assert_eq!(real.mu_map(1, 1).table(), &[0, 2, 1, 3]);
}

#[test]
fn realization_restricts_to_bit_tables() {
    for monoid in [CubeMonoid::two(), CubeMonoid::min3()] {
        let real = FinCubeRealization::new(monoid).unwrap();
        for g in all_generators(3, true) {
            let r = real.realize(&g);
            for x in 0..(1u32 << g.src) {
                assert_eq!(
                    r.apply(real.embed_bits(x, g.src)),
                    real.embed_bits(g.apply(x), g.tgt),
                    "generator {:?} at bit point {x}",
                    g.word()
                );
            }
        }
    }
}

// Words with the same defining table must realize to the same set map;
// exercised on all composable generator pairs, where e.g. multiplying
// against a pinned 0 equals projecting and re-inserting.
#[test]
fn equal_words_realize_equally() {
    let real = FinCubeRealization::new(CubeMonoid::min3()).unwrap();
    let gens = all_generators(3, true);
    let mut morphisms: Vec<CubeMorphism> = Vec::new();
    for n in 0..=3 {
        morphisms.push(CubeMorphism::identity(n));
    }
    morphisms.extend(gens.iter().cloned());
    for g1 in &gens {
        for g2 in &gens {
            if g2.src == g1.tgt {
                morphisms.push(g2.compose_after(g1));
            }
        }
    }
    let mut by_table: BTreeMap<(usize, usize, Vec<u32>), Vec<FinSetMap>> = BTreeMap::new();
    for f in &morphisms {
        by_table
            .entry((f.src, f.tgt, f.table().to_vec()))
            .or_default()
            .push(real.realize(f));
    }
    let mut collisions = 0;
    for ((src, tgt, _), reals) in by_table {
        if reals.len() > 1 {
            collisions += 1;
        }
        for r in &reals {
            assert_eq!(*r, reals[0], "words {src} -> {tgt} with equal tables diverge");
        }
    }
    assert!(collisions > 0, "the canary needs at least one collision");
}

// Over M = {0,1} the Hom cubical group out of a point into a point is
// the free cubical abelian group: same ranks, same action matrices.
#[test]
fn hom_cubical_of_points_is_free() {
    let real = FinCubeRealization::new(CubeMonoid::two()).unwrap();
    let pt = FinSetObj::points(1);
    let hom = hom_cubical::<BigInt>(&real, &pt, &pt, 3);
    let free = free_cubical::<BigInt>(3);
    for n in 0..=3usize {
        assert_eq!(hom.level(n).rank(0), free.level(n).rank(0));
    }
    for g in all_generators(3, true) {
        assert_eq!(hom.act(&g).comps, free.act(&g).comps);
    }
}

#[test]
fn hom_cubical_is_a_valid_extended_cubical_object() {
    let real = FinCubeRealization::new(CubeMonoid::two()).unwrap();
    let x = FinSetObj::points(2);
    let w = FinSetObj::points(2);
    let hom = hom_cubical::<BigInt>(&real, &x, &w, 3);
    let mut rng = rng_from_seed(14);
    assert_eq!(validate_cubical(&hom, &mut rng, 200), Ok(200));
}

#[test]
fn homotopy_step_point_case_is_frozen() {
    let real = FinCubeRealization::new(CubeMonoid::two()).unwrap();
    let pt = FinSetObj::points(1);
    let h0: Matrix<BigInt> = homotopy_step(&real, &pt, &pt, 0);
    assert_eq!(h0, zmat(&[&[1, 1], &[0, 0], &[1, 0], &[0, 1]]));

    // Pre-composing the two faces of the fresh slot: inserting 1
    // retracts h, inserting 0 collapses onto the zero section.
    let w1 = pt.tensor(&real.cube_obj(1));
    let c1 = hom_cubical::<BigInt>(&real, &pt, &w1, 2);
    let top = c1.act(&CubeMorphism::eta(0, 1, true)).comps[&0].clone();
    assert!(top.mul(&h0).is_identity());
    let bottom = c1.act(&CubeMorphism::eta(0, 1, false)).comps[&0].clone();
    assert_eq!(bottom.mul(&h0), zmat(&[&[1, 1], &[0, 0]]));
    assert_eq!(bottom.mul(&h0), zero_collapse(&real, &pt, &pt, 0));
}

#[test]
fn homotopy_invariance_point_two() {
    let real = FinCubeRealization::new(CubeMonoid::two()).unwrap();
    let pt = FinSetObj::points(1);
    let report = fincor_homotopy_invariance::<BigInt>(&real, &pt, &pt, 1, 3).unwrap();
    assert!(report.passed(), "failures: {:?}", report.failures);
    assert!(matches!(report.verdict, WindowVerdict::Acyclic { from: -2, .. }));
    assert!(report.identities >= 30);
}

#[test]
fn homotopy_invariance_two_objects() {
    let real = FinCubeRealization::new(CubeMonoid::two()).unwrap();
    let x = FinSetObj::points(2);
    let y = FinSetObj::points(1);
    let report = fincor_homotopy_invariance::<BigInt>(&real, &x, &y, 2, 4).unwrap();
    assert!(report.passed(), "failures: {:?}", report.failures);
    assert!(matches!(report.verdict, WindowVerdict::Acyclic { from: -3, .. }));
}

#[test]
fn homotopy_invariance_min3() {
    let real = FinCubeRealization::new(CubeMonoid::min3()).unwrap();
    let pt = FinSetObj::points(1);
    let report = fincor_homotopy_invariance::<BigInt>(&real, &pt, &pt, 1, 3).unwrap();
    assert!(report.passed(), "failures: {:?}", report.failures);
}

#[test]
fn homotopy_invariance_needs_room() {
    let real = FinCubeRealization::new(CubeMonoid::two()).unwrap();
    let pt = FinSetObj::points(1);
    assert!(fincor_homotopy_invariance::<BigInt>(&real, &pt, &pt, 2, 3).is_err());
    assert!(fincor_homotopy_invariance::<BigInt>(&real, &pt, &pt, 0, 3).is_err());
}

#[test]
fn composition_checks_sizes() {
    let f = rand_corr(&mut rng_from_seed(15), 2, 3);
    let g = rand_corr(&mut rng_from_seed(16), 4, 2);
    // f: 2 -> 3 composes after g: 4 -> 2; the other order does not.
    assert!(f.compose_after(&g).is_ok());
    assert!(g.compose_after(&f).is_err());
}
