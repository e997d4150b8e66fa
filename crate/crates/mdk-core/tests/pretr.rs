//! Twisted complexes: Maurer-Cartan, the hom differential, composition,
//! shifts, cones, and the embedding of the ambient category.

use mdk_core::complex::Complex;
use mdk_core::dg::DgCategory;
use mdk_core::gen::{self, ComplexSpec};
use mdk_core::graded::Degree;
use mdk_core::pretr::{random_pool, PreTr, PreTrMor, TwistedComplex};
use mdk_core::rng_from_seed;
use num_bigint::BigInt;
use num_traits::One;

type Z = BigInt;

// Z -2-> Z in degrees 0, 1.
fn two_span() -> Complex<Z> {
    let mut modules = mdk_core::graded::GradedModule::new();
    modules.set_rank(0, 1);
    modules.set_rank(1, 1);
    let mut diffs = std::collections::BTreeMap::new();
    diffs.insert(0, mdk_core::matrix::Matrix::from_i64_rows(&[&[2]]));
    Complex::new(modules, diffs).unwrap()
}

fn small_category(seed: u64, objects: usize) -> DgCategory<Z> {
    let mut rng = rng_from_seed(seed);
    let objs: Vec<Complex<Z>> = (0..objects)
        .map(|_| gen::random_complex(&mut rng, &ComplexSpec::new(-1, 1, 2)).0)
        .collect();
    DgCategory::from_complexes(objs)
}

#[test]
fn random_pool_satisfies_maurer_cartan() {
    let mut rng = rng_from_seed(41);
    for case in 0..25 {
        let c = small_category(1000 + case, 3);
        let pt = PreTr::new(&c);
        let pool = random_pool(&pt, &mut rng, &[0, 1, 2], 8, 6);
        assert!(pool.len() > 3);
        for e in &pool {
            assert!(pt.twists_well_typed(e));
            assert!(pt.validate_mc(e).unwrap(), "MC failed in case {case}");
        }
    }
}

#[test]
fn hom_differential_squares_to_zero() {
    // Complex::new re-checks d^2 = 0 on the materialized hom complex, so
    // a sign error anywhere in the formula would fail construction here.
    let mut rng = rng_from_seed(42);
    let mut pairs = 0;
    for case in 0..20 {
        let c = small_category(2000 + case, 3);
        let pt = PreTr::new(&c);
        let pool = random_pool(&pt, &mut rng, &[0, 1, 2], 6, 6);
        for e in pool.iter().take(4) {
            for f in pool.iter().take(4) {
                let hom = pt.hom_complex(e, f).unwrap();
                assert!(hom.complex.support().len() <= 40);
                pairs += 1;
            }
        }
    }
    assert!(pairs >= 300);
}

#[test]
fn differential_satisfies_leibniz() {
    let mut rng = rng_from_seed(43);
    let mut checked = 0;
    for case in 0..15 {
        let c = small_category(3000 + case, 3);
        let pt = PreTr::new(&c);
        let pool = random_pool(&pt, &mut rng, &[0, 1, 2], 6, 6);
        for _ in 0..40 {
            let e = &pool[gen::uniform(&mut rng, pool.len())];
            let f = &pool[gen::uniform(&mut rng, pool.len())];
            let g = &pool[gen::uniform(&mut rng, pool.len())];
            let he = pt.hom_complex(e, f).unwrap();
            let hf = pt.hom_complex(f, g).unwrap();
            let sup_e = he.complex.support();
            let sup_f = hf.complex.support();
            if sup_e.is_empty() || sup_f.is_empty() {
                continue;
            }
            let n = sup_e[gen::uniform(&mut rng, sup_e.len())];
            let m = sup_f[gen::uniform(&mut rng, sup_f.len())];
            let phi = he.random_element(&c, &mut rng, n, 3);
            let psi = hf.random_element(&c, &mut rng, m, 3);
            let lhs = pt
                .differential(e, g, &pt.compose(e, f, g, &psi, &phi).unwrap())
                .unwrap();
            let dpsi_phi = pt
                .compose(e, f, g, &pt.differential(f, g, &psi).unwrap(), &phi)
                .unwrap();
            let psi_dphi = pt
                .compose(e, f, g, &psi, &pt.differential(e, f, &phi).unwrap())
                .unwrap();
            let sign = mdk_core::ring::sign_pow::<Z>(m as i64);
            let rhs = dpsi_phi.add(&psi_dphi.scale(&sign));
            assert_eq!(lhs, rhs, "Leibniz failed in case {case}");
            checked += 1;
        }
    }
    assert!(checked >= 200, "only {checked} Leibniz samples landed");
}

#[test]
fn composition_is_associative_and_unital() {
    let mut rng = rng_from_seed(44);
    for case in 0..10 {
        let c = small_category(4000 + case, 3);
        let pt = PreTr::new(&c);
        let pool = random_pool(&pt, &mut rng, &[0, 1, 2], 5, 6);
        for _ in 0..20 {
            let e = &pool[gen::uniform(&mut rng, pool.len())];
            let f = &pool[gen::uniform(&mut rng, pool.len())];
            let g = &pool[gen::uniform(&mut rng, pool.len())];
            let h = &pool[gen::uniform(&mut rng, pool.len())];
            let hom = |a: &TwistedComplex<Z>, b: &TwistedComplex<Z>| pt.hom_complex(a, b).unwrap();
            let pick = |hom: &mdk_core::pretr::PreTrHom<Z>, rng: &mut _| {
                let sup = hom.complex.support();
                if sup.is_empty() {
                    PreTrMor::zero(0)
                } else {
                    let n = sup[gen::uniform(rng, sup.len())];
                    hom.random_element(&c, rng, n, 3)
                }
            };
            let phi = pick(&hom(e, f), &mut rng);
            let psi = pick(&hom(f, g), &mut rng);
            let rho = pick(&hom(g, h), &mut rng);
            let ab = pt.compose(e, f, g, &psi, &phi).unwrap();
            let bc = pt.compose(f, g, h, &rho, &psi).unwrap();
            let left = pt.compose(e, g, h, &rho, &ab).unwrap();
            let right = pt.compose(e, f, h, &bc, &phi).unwrap();
            assert_eq!(left, right);

            let id_e = pt.identity(e);
            let id_f = pt.identity(f);
            assert!(pt.differential(e, e, &id_e).unwrap().is_zero());
            assert_eq!(pt.compose(e, e, f, &phi, &id_e).unwrap(), phi);
            assert_eq!(pt.compose(e, f, f, &id_f, &phi).unwrap(), phi);
        }
    }
}

#[test]
fn i0_is_fully_faithful_on_homs() {
    let c = small_category(77, 3);
    let pt = PreTr::new(&c);
    for x in 0..3 {
        for y in 0..3 {
            let hom = pt.hom_complex(&pt.i0(x), &pt.i0(y)).unwrap();
            assert_eq!(hom.complex, c.hom(x, y));
        }
    }
    // The embedding preserves differential and composition.
    let mut rng = rng_from_seed(78);
    for _ in 0..30 {
        let x = gen::uniform(&mut rng, 3);
        let y = gen::uniform(&mut rng, 3);
        let z = gen::uniform(&mut rng, 3);
        let sup_f = c.hom(x, y).support();
        let sup_g = c.hom(y, z).support();
        if sup_f.is_empty() || sup_g.is_empty() {
            continue;
        }
        let df = sup_f[gen::uniform(&mut rng, sup_f.len())];
        let dg = sup_g[gen::uniform(&mut rng, sup_g.len())];
        let f = c.mor(
            x,
            y,
            df,
            (0..c.hom_rank(x, y, df)).map(|_| gen::int_in(&mut rng, 2)).collect(),
        );
        let g = c.mor(
            y,
            z,
            dg,
            (0..c.hom_rank(y, z, dg)).map(|_| gen::int_in(&mut rng, 2)).collect(),
        );
        let ix = pt.i0(x);
        let iy = pt.i0(y);
        let iz = pt.i0(z);
        let df = pt
            .differential(&ix, &iy, &pt.i0_mor(&f))
            .unwrap();
        assert_eq!(df, pt.i0_mor(&c.differential(&f)));
        let gf = pt
            .compose(&ix, &iy, &iz, &pt.i0_mor(&g), &pt.i0_mor(&f))
            .unwrap();
        assert_eq!(gf, pt.i0_mor(&c.compose(&g, &f).unwrap()));
    }
}

#[test]
fn shift_preserves_maurer_cartan_and_is_invertible() {
    let mut rng = rng_from_seed(45);
    for case in 0..10 {
        let c = small_category(5000 + case, 3);
        let pt = PreTr::new(&c);
        for e in random_pool(&pt, &mut rng, &[0, 1, 2], 6, 6) {
            for k in [-2, -1, 1, 2, 3] {
                let s = pt.shift(&e, k);
                assert!(pt.validate_mc(&s).unwrap());
                assert_eq!(pt.shift(&s, -k), e);
            }
        }
    }
}

#[test]
fn shift_scales_hom_differentials_by_a_sign() {
    // Hom(e[k], f[k]) has the same modules as Hom(e, f) and differential
    // scaled by (-1)^k, so phi -> (-1)^{kn} phi is an isomorphism.
    let mut rng = rng_from_seed(46);
    let c = small_category(660, 3);
    let pt = PreTr::new(&c);
    let pool = random_pool(&pt, &mut rng, &[0, 1, 2], 6, 6);
    for e in pool.iter().take(3) {
        for f in pool.iter().take(3) {
            let plain = pt.hom_complex(e, f).unwrap();
            for k in [-1, 1, 2] {
                let shifted = pt
                    .hom_complex(&pt.shift(e, k), &pt.shift(f, k))
                    .unwrap();
                assert_eq!(plain.complex.modules(), shifted.complex.modules());
                let sign = mdk_core::ring::sign_pow::<Z>(k as i64);
                for &n in &plain.complex.support() {
                    assert_eq!(plain.complex.d(n).scale(&sign), shifted.complex.d(n));
                }
            }
        }
    }
}

#[test]
fn cone_preserves_maurer_cartan_with_biproducts() {
    // Overlapping windows force every slot through a registered biproduct.
    let x = two_span();
    let y = two_span();
    let mut c = DgCategory::<Z>::from_complexes(vec![x, y]);
    let sum = c.add_direct_sum(1, 0);
    assert_eq!(sum, 2);
    let pt = PreTr::new(&c);
    // e = X placed at index 1, f = Y at index 0: the single cone slot is
    // Y ⊕ X, and psi lives in Hom(X, Y)^1 which is all cycles.
    let e = pt.shift(&pt.i0(0), -1);
    let f = pt.i0(1);
    let hom = pt.hom_complex(&e, &f).unwrap();
    assert!(hom.complex.rank(0) > 0);
    let mut rng = rng_from_seed(47);
    for _ in 0..10 {
        let psi = hom.random_cycle(&c, &mut rng, 0, 3);
        assert!(pt.differential(&e, &f, &psi).unwrap().is_zero());
        let data = pt.cone(&e, &f, &psi).unwrap();
        assert_eq!(data.cone.entries().len(), 1);
        assert_eq!(data.cone.entry(0), Some(2));
        assert!(pt.validate_mc(&data.cone).unwrap());
    }
}

#[test]
fn cone_structure_maps_are_cycles_and_compose_to_zero() {
    let mut rng = rng_from_seed(48);
    for case in 0..12 {
        let c = small_category(6000 + case, 3);
        let pt = PreTr::new(&c);
        let pool = random_pool(&pt, &mut rng, &[0, 1, 2], 5, 5);
        let f = pool[gen::uniform(&mut rng, pool.len())].clone();
        let e0 = pool[gen::uniform(&mut rng, pool.len())].clone();
        let (_, ehi) = e0.window().unwrap();
        let (flo, _) = f.window().unwrap();
        let e = pt.shift(&e0, ehi - flo + 2);
        let psi = match pt.hom_complex(&e, &f) {
            Ok(h) => h.random_cycle(&c, &mut rng, 0, 2),
            Err(_) => PreTrMor::zero(0),
        };
        let data = pt.cone(&e, &f, &psi).unwrap();
        assert!(pt.validate_mc(&data.cone).unwrap());
        let e1 = pt.shift(&e, 1);
        // f -> cone and cone -> e[1] are degree-0 cycles, composing to 0.
        assert!(pt.differential(&f, &data.cone, &data.incl).unwrap().is_zero());
        assert!(pt.differential(&data.cone, &e1, &data.proj).unwrap().is_zero());
        let comp = pt
            .compose(&f, &data.cone, &e1, &data.proj, &data.incl)
            .unwrap();
        assert!(comp.is_zero());
    }
}

#[test]
fn cone_of_identity_is_null_homotopic() {
    for seed in 0..8 {
        let c = small_category(7000 + seed, 2);
        let pt = PreTr::new(&c);
        for x in 0..2 {
            if c.hom(x, x).total_ranks() == 0 {
                continue;
            }
            let e = pt.i0(x);
            let data = pt.cone(&e, &e, &pt.identity(&e)).unwrap();
            assert!(pt.validate_mc(&data.cone).unwrap());
            let endo = pt.hom_complex(&data.cone, &data.cone).unwrap();
            let id = pt.identity(&data.cone);
            let h = endo
                .solve_boundary(&c, &id)
                .expect("cone of the identity must be contractible");
            let dh = pt.differential(&data.cone, &data.cone, &h).unwrap();
            assert_eq!(dh, id);
        }
    }
}

#[test]
fn flipped_twist_signs_fail_maurer_cartan() {
    // Three copies of X = (Z -2-> Z) with twists a = id, b = 2*id and a
    // degree -1 correction h solving d(h) = -b∘a. Every term of the MC
    // equation at slot (2,0) is nonzero, so each single sign flip breaks it.
    let c = DgCategory::<Z>::from_complexes(vec![two_span()]);
    let pt = PreTr::new(&c);
    let unit = c.unit(0);
    let b1 = c.basis_mor(0, 0, -1, 0);
    let two = Z::from(2);
    let h = if c.differential(&b1) == unit.scale(&two) {
        b1.scale(&-Z::one())
    } else {
        b1.clone()
    };
    assert_eq!(c.differential(&h), unit.scale(&-two.clone()));

    let entries: std::collections::BTreeMap<Degree, usize> =
        [(0, 0), (1, 0), (2, 0)].into_iter().collect();
    let mut twists = std::collections::BTreeMap::new();
    twists.insert((1, 0), unit.clone());
    twists.insert((2, 1), unit.scale(&two));
    twists.insert((2, 0), h);
    let e = TwistedComplex::new(entries.clone(), twists.clone());
    assert!(pt.twists_well_typed(&e));
    assert!(pt.validate_mc(&e).unwrap());

    for key in [(1, 0), (2, 1), (2, 0)] {
        let mut bad_twists = twists.clone();
        let m = bad_twists[&key].clone();
        bad_twists.insert(key, m.scale(&-Z::one()));
        let bad = TwistedComplex::new(entries.clone(), bad_twists);
        assert!(
            !pt.validate_mc(&bad).unwrap(),
            "flipping twist {key:?} went undetected"
        );
    }
}

#[test]
fn hom_complex_blocks_round_trip() {
    let mut rng = rng_from_seed(49);
    let c = small_category(9000, 3);
    let pt = PreTr::new(&c);
    let pool = random_pool(&pt, &mut rng, &[0, 1, 2], 6, 6);
    for e in pool.iter().take(4) {
        for f in pool.iter().take(4) {
            let hom = pt.hom_complex(e, f).unwrap();
            for &n in &hom.complex.support() {
                let phi = hom.random_element(&c, &mut rng, n, 4);
                let v = hom.flatten(&c, &phi);
                assert_eq!(hom.unflatten(&c, n, &v), phi);
                assert!(!v.is_empty() || phi.is_zero());
                // The materialized differential agrees with the formula.
                let dv = hom.complex.d(n).mul_vec(&v);
                let dphi = pt.differential(e, f, &phi).unwrap();
                assert_eq!(hom.unflatten(&c, n + 1, &dv), dphi);
            }
        }
    }
}

trait TotalRanks {
    fn total_ranks(&self) -> usize;
}
impl TotalRanks for Complex<Z> {
    fn total_ranks(&self) -> usize {
        self.support().iter().map(|&n| self.rank(n)).sum()
    }
}
