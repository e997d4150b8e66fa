//! The cubical enrichment over finite-correspondence models: levelwise
//! composition, the assembled DG categories, the interval contraction,
//! the extended enrichment, and the two-variable comparison maps.

use num_bigint::BigInt;

use mdk_core::builder::{
    dg_category_of, dg_compose, dg_hom, dge_compose, dge_hom, functor_f, homotopy_machinery,
    multicube_complexes, validate_cocube, validate_tensor_cat,
    zero_section_map, CMor, CorCat, DgElt, HomCube, TensorCat,
};
use mdk_core::cube::{all_generators, Cubical, WindowVerdict};
use mdk_core::dg::ValidationPlan;
use mdk_core::fincor::{
    fincor_homotopy_invariance, hom_cubical, CubeMonoid, FinCubeRealization, FinSetObj,
};
use mdk_core::gen::int_in;
use mdk_core::matrix::Matrix;
use mdk_core::rng_from_seed;
use rand_core::RngCore;

type Z = BigInt;

fn two_model() -> CorCat<Z> {
    CorCat::new(FinCubeRealization::new(CubeMonoid::two()).unwrap())
}

fn min3_model() -> CorCat<Z> {
    CorCat::new(FinCubeRealization::new(CubeMonoid::min3()).unwrap())
}

fn rand_elt<R: RngCore>(rng: &mut R, rank: usize) -> Vec<Z> {
    (0..rank).map(|_| int_in(rng, 3)).collect()
}

#[test]
fn kronecker_overrides_match_columnwise_composition() {
    let model = two_model();
    let mut rng = rng_from_seed(21);
    let x = FinSetObj::points(2);
    let xp = FinSetObj::points(3);
    let y = FinSetObj::points(2);
    let yp = FinSetObj::points(3);
    for _ in 0..5 {
        let h = CMor {
            src: xp.clone(),
            tgt: x.clone(),
            coords: rand_elt(&mut rng, model.hom_rank(&xp, &x)),
        };
        let fast = model.precompose(&h, &y);
        let mut slow = Matrix::zero(model.hom_rank(&xp, &y), model.hom_rank(&x, &y));
        for j in 0..slow.cols() {
            let fj = model.compose(&model.basis_mor(&x, &y, j), &h);
            for (i, v) in fj.coords.into_iter().enumerate() {
                slow.set(i, j, v);
            }
        }
        assert_eq!(fast, slow);

        let k = CMor {
            src: y.clone(),
            tgt: yp.clone(),
            coords: rand_elt(&mut rng, model.hom_rank(&y, &yp)),
        };
        let fast = model.postcompose(&x, &k);
        let mut slow = Matrix::zero(model.hom_rank(&x, &yp), model.hom_rank(&x, &y));
        for j in 0..slow.cols() {
            let fj = model.compose(&k, &model.basis_mor(&x, &y, j));
            for (i, v) in fj.coords.into_iter().enumerate() {
                slow.set(i, j, v);
            }
        }
        assert_eq!(fast, slow);
    }
}

#[test]
fn correspondence_model_coherence() {
    let model = two_model();
    let mut rng = rng_from_seed(22);
    let objects = [
        FinSetObj::points(1),
        FinSetObj::points(2),
        model.cube(1),
    ];
    let checked = validate_tensor_cat(&model, &objects, &mut rng, 30).unwrap();
    assert!(checked >= 150);
}

#[test]
fn cocubical_laws_hold() {
    assert!(validate_cocube(&two_model(), 3).unwrap() > 40);
    assert!(validate_cocube(&min3_model(), 2).unwrap() > 20);
}

#[test]
fn hom_cube_matches_direct_realization() {
    let model = two_model();
    let x = FinSetObj::points(2);
    let y = FinSetObj::points(3);
    let via_trait = HomCube::new(&model, x.clone(), y.clone(), 3);
    let direct = hom_cubical::<Z>(&model.real, &x, &y, 3);
    for f in all_generators(3, true) {
        let a = via_trait.act(&f);
        let b = direct.act(&f);
        let src = via_trait.level(f.tgt);
        let tgt = via_trait.level(f.src);
        assert_eq!(
            a.component_at(0, &src, &tgt),
            b.component_at(0, &src, &tgt),
            "actions disagree on {:?}",
            f.word()
        );
    }
}

#[test]
fn dg_category_of_correspondences_validates() {
    let model = two_model();
    let objects = [FinSetObj::points(1), FinSetObj::points(2)];
    let cat = dg_category_of(&model, &objects, 2).unwrap();
    let report = cat.validate(&ValidationPlan::default());
    assert!(report.ok(), "violations: {:?}", report.violations);
}

#[test]
fn degree_zero_composition_matches_the_model() {
    let model = two_model();
    let mut rng = rng_from_seed(23);
    let x = FinSetObj::points(2);
    let y = FinSetObj::points(2);
    let z = FinSetObj::points(2);
    let hom_xy = dg_hom(&model, &x, &y, 2).unwrap();
    let hom_yz = dg_hom(&model, &y, &z, 2).unwrap();
    let hom_xz = dg_hom(&model, &x, &z, 2).unwrap();
    for _ in 0..10 {
        let f = DgElt {
            level: 0,
            coords: rand_elt(&mut rng, hom_yz.rank(0)),
        };
        let g = DgElt {
            level: 0,
            coords: rand_elt(&mut rng, hom_xy.rank(0)),
        };
        let fg = dg_compose(&model, &hom_yz, &hom_xy, &hom_xz, &f, &g).unwrap();
        let direct = model.compose(
            &CMor {
                src: y.clone(),
                tgt: z.clone(),
                coords: f.coords.clone(),
            },
            &CMor {
                src: x.clone(),
                tgt: y.clone(),
                coords: g.coords.clone(),
            },
        );
        assert_eq!(fg.level, 0);
        assert_eq!(fg.coords, direct.coords);
    }
}

#[test]
fn interval_contraction_certifies_homotopy_invariance() {
    let model = two_model();
    let pt = FinSetObj::points(1);
    let report = homotopy_machinery(&model, &pt, &pt, 3).unwrap();
    assert!(report.naturality_checked >= 10);
    assert!(report.top_identity);
    assert!(report.bottom_identity);
    assert!(report.raw_equation);
    assert!(report.descended_equation);
    assert!(report.retraction);
    assert!(
        matches!(report.verdict, WindowVerdict::Acyclic { .. }),
        "verdict: {:?}",
        report.verdict
    );
}

#[test]
fn interval_contraction_on_bigger_fixtures() {
    let model = two_model();
    let x = FinSetObj::points(2);
    let y = FinSetObj::points(2);
    let report = homotopy_machinery(&model, &x, &y, 2).unwrap();
    assert!(report.all_hold());

    let model3 = min3_model();
    let pt = FinSetObj::points(1);
    let report3 = homotopy_machinery(&model3, &pt, &pt, 2).unwrap();
    assert!(report3.all_hold());
}

#[test]
fn missing_multiplication_is_reported() {
    let model = CorCat::<Z>::non_extended(FinCubeRealization::new(CubeMonoid::two()).unwrap());
    let pt = FinSetObj::points(1);
    let err = match homotopy_machinery(&model, &pt, &pt, 2) {
        Err(e) => e,
        Ok(_) => panic!("expected the missing-multiplication error"),
    };
    assert!(err.contains("extended"));
}

#[test]
fn zero_section_agrees_with_the_direct_homotopy_argument() {
    let model = two_model();
    let pt = FinSetObj::points(1);
    let zs = zero_section_map(&model, &pt, &pt, 1, 3).unwrap();
    let direct = fincor_homotopy_invariance::<Z>(&model.real, &pt, &pt, 1, 3).unwrap();
    assert!(direct.passed());
    assert_eq!(zs.verdict, direct.verdict);
}

#[test]
fn extended_hom_assembles() {
    let model = two_model();
    let pt = FinSetObj::points(1);
    // Construction validates d² = 0 and the chain property of the
    // bottom projection.
    let dge = dge_hom(&model, &pt, &pt, 3).unwrap();
    // Row 0 is the plain hom complex.
    let plain = dg_hom(&model, &pt, &pt, 3).unwrap();
    assert_eq!(dge.homs[0].complex(), plain.complex());
    assert_eq!(dge.ext.rows[0].complex, *plain.complex());
    // Blocks at degree 0 include the reduced classes of every row.
    let blocks0 = dge.ext.layout(0);
    assert_eq!(blocks0.iter().map(|b| b.0).collect::<Vec<_>>(), vec![0, 1, 2, 3]);
}

#[test]
fn comparison_functor_is_a_chain_map_and_splits_pi() {
    let model = two_model();
    let pt = FinSetObj::points(1);
    let w = FinSetObj::points(2);
    let mut rng = rng_from_seed(31);
    for (x, y) in [(pt.clone(), pt.clone()), (w.clone(), pt.clone()), (pt.clone(), w.clone())] {
        let n_max = 3;
        let hom = dg_hom(&model, &x, &y, n_max).unwrap();
        let dge = dge_hom(&model, &x, &y, n_max).unwrap();
        for level in 0..=n_max {
            for _ in 0..8 {
                let f = DgElt {
                    level,
                    coords: rand_elt(&mut rng, hom.rank(level)),
                };
                let ff = functor_f(&model, &dge, &f).unwrap();
                // pi ∘ F = id.
                let back = dge
                    .ext
                    .pi
                    .component(-(level as i32))
                    .mul_vec(&ff.coords);
                assert_eq!(back, f.coords);
                // F is a chain map: F(df) = D(F f).
                if level >= 1 {
                    let df = hom.differential(&f);
                    let f_df = functor_f(&model, &dge, &df).unwrap();
                    let d_ff = dge.ext.differential(&ff);
                    assert_eq!(f_df, d_ff);
                }
            }
        }
    }
}

#[test]
fn extended_composition_is_plain_and_unital() {
    let model = two_model();
    let pt = FinSetObj::points(1);
    let w = FinSetObj::points(2);
    let mut rng = rng_from_seed(32);
    let n_max = 3;
    let dge_xx = dge_hom(&model, &w, &w, n_max).unwrap();
    let dge_xy = dge_hom(&model, &w, &pt, n_max).unwrap();
    let hom_xx = dg_hom(&model, &w, &w, n_max).unwrap();

    // The image of the identity composes as a unit on either side.
    let unit = functor_f(
        &model,
        &dge_xx,
        &hom_xx
            .project(0, &model.identity(&w).coords)
            .map(|coords| DgElt { level: 0, coords })
            .unwrap(),
    )
    .unwrap();
    for p in [-2i32, -1, 0] {
        for _ in 0..6 {
            let g = mdk_core::builder::DgeElt {
                degree: p,
                coords: rand_elt(&mut rng, dge_xy.ext.complex.rank(p)),
            };
            let gu = dge_compose(&model, &dge_xx, &dge_xy, &dge_xy, &g, &unit).unwrap();
            assert_eq!(gu, g);
            let h = mdk_core::builder::DgeElt {
                degree: p,
                coords: rand_elt(&mut rng, dge_xx.ext.complex.rank(p)),
            };
            let uh = dge_compose(&model, &dge_xx, &dge_xx, &dge_xx, &unit, &h).unwrap();
            assert_eq!(uh, h);
        }
    }
}

#[test]
fn comparison_functor_respects_composition() {
    let model = two_model();
    let pt = FinSetObj::points(1);
    let mut rng = rng_from_seed(33);
    let n_max = 3;
    let hom = dg_hom(&model, &pt, &pt, n_max).unwrap();
    let dge = dge_hom(&model, &pt, &pt, n_max).unwrap();
    for (a, b) in [(0usize, 0usize), (0, 1), (1, 0), (1, 1), (2, 1)] {
        for _ in 0..6 {
            let f = DgElt {
                level: a,
                coords: rand_elt(&mut rng, hom.rank(a)),
            };
            let g = DgElt {
                level: b,
                coords: rand_elt(&mut rng, hom.rank(b)),
            };
            let fg = dg_compose(&model, &hom, &hom, &hom, &f, &g).unwrap();
            let lhs = functor_f(&model, &dge, &fg).unwrap();
            let rhs = dge_compose(
                &model,
                &dge,
                &dge,
                &dge,
                &functor_f(&model, &dge, &f).unwrap(),
                &functor_f(&model, &dge, &g).unwrap(),
            )
            .unwrap();
            assert_eq!(lhs, rhs, "levels ({a}, {b})");
        }
    }
}

#[test]
fn two_variable_comparison_and_projections() {
    let model = two_model();
    let pt = FinSetObj::points(1);
    for n in [2usize, 3] {
        let report = multicube_complexes(&model, &pt, &pt, n).unwrap();
        assert!(report.zero_sections_ok, "truncation {n}");
        assert!(report.square_commutes, "truncation {n}");
        for (name, v) in [
            ("lambda", &report.lambda_verdict),
            ("pi1", &report.pi1_verdict),
            ("pi2", &report.pi2_verdict),
            ("lifted lambda", &report.lambda_ext_verdict),
        ] {
            assert!(
                matches!(v, WindowVerdict::Acyclic { .. }),
                "{name} at truncation {n}: {v:?}"
            );
        }
    }
}

#[test]
fn two_variable_comparison_on_other_models() {
    let pt = FinSetObj::points(1);
    let w = FinSetObj::points(2);
    for (model, x, y) in [
        (two_model(), w.clone(), pt.clone()),
        (two_model(), pt.clone(), w.clone()),
        (min3_model(), pt.clone(), pt.clone()),
    ] {
        let report = multicube_complexes(&model, &x, &y, 2).unwrap();
        assert!(report.zero_sections_ok);
        assert!(report.square_commutes);
        assert!(matches!(report.lambda_verdict, WindowVerdict::Acyclic { .. }));
        assert!(matches!(report.pi1_verdict, WindowVerdict::Acyclic { .. }));
        assert!(matches!(report.pi2_verdict, WindowVerdict::Acyclic { .. }));
        assert!(matches!(report.lambda_ext_verdict, WindowVerdict::Acyclic { .. }));
    }
}
