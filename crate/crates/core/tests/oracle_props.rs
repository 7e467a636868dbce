//! Invariant suites for the cellular local-cohomology oracle: exact
//! triangle consistency, monotonicity in the truncation degree, agreement
//! with the 0-conormal descriptor on random planar sets, and hand-checked
//! ranks for locally closed cell models.

use microsupport::cohoracle::{
    as_locally_closed, complex::unit_circle_points_16, extension_by_zero_ranks,
    local_cohomology_triangle, pair_cohomology, probe_grid_2d, CohomologyRanks, SskOracle,
};
use microsupport::conic::CotangentPoint;
use microsupport::fixtures::{half_plane_union, halfplane, open_ray, random_polyhedral_set};
use microsupport::normalcone::conormal0;
use microsupport::polyhedron::{ConvexPolyhedron, Halfspace};
use microsupport::pset::{LocallyClosedPolyhedralSet, PolyhedralSet};
use microsupport::rat::{rat, rat_i, zeros, QVec};
use microsupport::sample::rng;
use microsupport::symplectic::expr::ScalarField;

fn v(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| rat_i(x)).collect()
}

#[test]
fn triangle_euler_characteristics_are_additive() {
    let s = as_locally_closed(&half_plane_union());
    let cases = [
        (v(&[0, 0]), "(+ x1 x2)"),
        (v(&[0, 0]), "x2"),
        (v(&[-1, 0]), "x2"),
        (v(&[-1, 0]), "(neg x2)"),
        (v(&[1, 1]), "(- x1 1)"),
        (v(&[0, -2]), "x1"),
        (v(&[0, 0]), "(- x1 x2)"),
    ];
    for (x, phi_src) in cases {
        let phi_raw = ScalarField::parse(2, phi_src).unwrap();
        // anchor the test function at the base point
        let shift = phi_raw.eval(&x, &zeros(2)).unwrap();
        let phi = ScalarField::parse(2, &format!("(- {} {})", phi_src, microsupport::rat::fmt_rat(&shift))).unwrap();
        let (supported, window, restricted) =
            local_cohomology_triangle(&s, &x, &phi, &rat(1, 4)).unwrap();
        // … → H^j_Z → H^j(B) → H^j(B∖Z) → H^{j+1}_Z → …  forces
        // χ(H_Z) = χ(B) − χ(B∖Z), exactly.
        assert_eq!(
            supported.euler(),
            window.euler() - restricted.euler(),
            "triangle Euler consistency at base {x:?} with {phi_src}"
        );
    }
}

#[test]
fn membership_is_monotone_in_k() {
    let s = as_locally_closed(&half_plane_union());
    let oracle = SskOracle::new(&s).unwrap();
    let dirs = unit_circle_points_16();
    for p in probe_grid_2d(&rat_i(-1), &rat_i(1), 7, &dirs) {
        if oracle.membership(&p, 0).unwrap().is_some() {
            assert!(oracle.membership(&p, 1).unwrap().is_some());
            assert!(oracle.membership(&p, 2).unwrap().is_some());
        }
        if oracle.membership(&p, 1).unwrap().is_some() {
            assert!(oracle.membership(&p, 2).unwrap().is_some());
        }
    }
}

#[test]
fn oracle_agrees_with_conormal_descriptor_on_random_planar_sets() {
    // The full-size agreement run lives in the acceptance suite; this is
    // a faster sentinel over coarser grids.
    let mut r = rng(4242);
    let dirs = unit_circle_points_16();
    for round in 0..6 {
        let s = random_polyhedral_set(2, &mut r);
        let cone = conormal0(&s).unwrap();
        let lc = as_locally_closed(&s);
        let oracle = SskOracle::new(&lc).unwrap();
        for p in probe_grid_2d(&rat_i(-2), &rat_i(2), 9, &dirs) {
            let by_oracle = oracle.membership(&p, 0).unwrap().is_some();
            let by_cone = cone.member_exact(&p).unwrap();
            assert_eq!(by_oracle, by_cone, "round {round}: probe ({:?}; {:?})", p.base, p.fiber);
        }
    }
}

#[test]
fn stratified_formula_agrees_with_the_oracle_at_level_zero() {
    // the canonical stratification of the worked example, evaluated by
    // the formula, against direct definition-test membership on a grid
    let d = microsupport::fixtures::half_plane_union_strata();
    let s0 = microsupport::sheaf::ssk_from_strata(&d, 0).unwrap();
    let lc = as_locally_closed(&half_plane_union());
    let oracle = SskOracle::new(&lc).unwrap();
    let dirs = unit_circle_points_16();
    for p in probe_grid_2d(&rat_i(-2), &rat_i(2), 9, &dirs) {
        assert_eq!(
            oracle.membership(&p, 0).unwrap().is_some(),
            s0.member_exact(&p).unwrap(),
            "probe ({:?}; {:?})",
            p.base,
            p.fiber
        );
    }
}

#[test]
fn zero_section_probes_follow_the_support() {
    let mut r = rng(77);
    for _ in 0..4 {
        let s = random_polyhedral_set(2, &mut r);
        let lc = as_locally_closed(&s);
        let oracle = SskOracle::new(&lc).unwrap();
        for x in [v(&[0, 0]), v(&[1, 1]), v(&[-2, 1]), v(&[2, -2])] {
            let p = CotangentPoint::new(x.clone(), zeros(2)).unwrap();
            assert_eq!(oracle.membership(&p, 0).unwrap().is_some(), s.member(&x));
        }
    }
}

#[test]
fn locally_closed_cell_models_match_hand_ranks() {
    let point = |x: i64| ConvexPolyhedron::point(&[rat_i(x)]);
    let seg = |a: i64, b: i64| ConvexPolyhedron::box_window(1, rat_i(a), rat_i(b));
    let lc = |closure: Vec<ConvexPolyhedron>, removed: Vec<ConvexPolyhedron>| {
        LocallyClosedPolyhedralSet::new(
            PolyhedralSet::new(1, closure).unwrap(),
            PolyhedralSet::new(1, removed).unwrap(),
        )
        .unwrap()
    };
    let expect = |pairs: &[(i64, usize)]| -> CohomologyRanks {
        CohomologyRanks { ranks: pairs.iter().map(|&(d, r)| (d, r)).collect() }
    };
    let box2 = |a: i64, b: i64| ConvexPolyhedron::box_window(2, rat_i(a), rat_i(b));
    let lc2 = |closure: Vec<ConvexPolyhedron>, removed: Vec<ConvexPolyhedron>| {
        LocallyClosedPolyhedralSet::new(
            PolyhedralSet::new(2, closure).unwrap(),
            PolyhedralSet::new(2, removed).unwrap(),
        )
        .unwrap()
    };

    // ten hand-checkable fixtures: (set, expected extension-by-zero ranks)
    let fixtures: Vec<(LocallyClosedPolyhedralSet, CohomologyRanks, &str)> = vec![
        (lc(vec![seg(0, 1)], vec![]), expect(&[(0, 1)]), "closed interval"),
        (lc(vec![seg(0, 1)], vec![point(0), point(1)]), expect(&[(1, 1)]), "open interval"),
        (lc(vec![seg(0, 1)], vec![point(1)]), expect(&[]), "half-open interval"),
        (lc(vec![point(0)], vec![]), expect(&[(0, 1)]), "point"),
        (
            lc(vec![seg(0, 1), seg(2, 3)], vec![]),
            expect(&[(0, 2)]),
            "two closed components",
        ),
        (
            lc(vec![seg(0, 1), seg(2, 3)], vec![point(0), point(1)]),
            expect(&[(0, 1), (1, 1)]),
            "open plus closed component",
        ),
        (lc2(vec![box2(0, 1)], vec![]), expect(&[(0, 1)]), "closed square"),
        (
            // open square: all four boundary edges removed
            lc2(
                vec![box2(0, 1)],
                vec![
                    box2(0, 1).intersect(&ConvexPolyhedron::new(2, vec![Halfspace::new(v(&[-1, 0]), rat_i(0))]).unwrap()),
                    box2(0, 1).intersect(&ConvexPolyhedron::new(2, vec![Halfspace::new(v(&[1, 0]), rat_i(1))]).unwrap()),
                    box2(0, 1).intersect(&ConvexPolyhedron::new(2, vec![Halfspace::new(v(&[0, -1]), rat_i(0))]).unwrap()),
                    box2(0, 1).intersect(&ConvexPolyhedron::new(2, vec![Halfspace::new(v(&[0, 1]), rat_i(1))]).unwrap()),
                ],
            ),
            expect(&[(2, 1)]),
            "open square",
        ),
        (
            // half-open square [0,1) × [0,1]: one edge removed
            lc2(
                vec![box2(0, 1)],
                vec![box2(0, 1)
                    .intersect(&ConvexPolyhedron::new(2, vec![Halfspace::new(v(&[1, 0]), rat_i(1))]).unwrap())],
            ),
            expect(&[]),
            "half-open square",
        ),
        (
            // closed square minus two corner points: the pair sequence
            // 0 → H⁰ → k → k² → H¹ → 0 leaves exactly H¹ = k
            lc2(
                vec![box2(0, 1)],
                vec![
                    ConvexPolyhedron::point(&v(&[0, 0])),
                    ConvexPolyhedron::point(&v(&[1, 1])),
                ],
            ),
            expect(&[(1, 1)]),
            "square minus two corners",
        ),
    ];
    assert!(fixtures.len() >= 10);
    for (set, expected, label) in &fixtures {
        let direct = extension_by_zero_ranks(set).unwrap();
        assert_eq!(&direct, expected, "direct cell model: {label}");
        // the pair route (S̄, S̄∖S) must agree
        let closure = as_locally_closed(&set.closure);
        let removed = as_locally_closed(&set.removed);
        let paired = pair_cohomology(&closure, &removed).unwrap();
        assert_eq!(&paired, expected, "pair route: {label}");
    }
}

#[test]
fn pair_cohomology_degree_zero_counts_components() {
    let two = as_locally_closed(
        &PolyhedralSet::new(
            1,
            vec![
                ConvexPolyhedron::box_window(1, rat_i(0), rat_i(1)),
                ConvexPolyhedron::box_window(1, rat_i(3), rat_i(4)),
            ],
        )
        .unwrap(),
    );
    let empty = as_locally_closed(&PolyhedralSet::empty(1));
    let ranks = pair_cohomology(&two, &empty).unwrap();
    assert_eq!(ranks.rank(0), 2);
}

#[test]
fn open_ray_instability_never_masks_the_verdict() {
    // The public two-radius route agrees with the oracle on the open ray.
    let s = open_ray();
    let phi = ScalarField::parse(1, "(neg x1)").unwrap();
    let r = microsupport::cohoracle::local_cohomology(&s, &zeros(1), &phi, &rat(1, 4), &rat(1, 8))
        .unwrap();
    assert_eq!(r.rank(0), 0);
    assert_eq!(r.rank(1), 1);
    let oracle = SskOracle::new(&s).unwrap();
    let p = CotangentPoint::new(zeros(1), v(&[-1])).unwrap();
    assert_eq!(oracle.membership(&p, 1).unwrap(), Some(1));
}

#[test]
fn half_plane_boundary_probe_matches_two_routes() {
    // the worked boundary value {0:1} through both the windowed route and
    // the conic-model oracle
    let s = as_locally_closed(
        &PolyhedralSet::new(2, vec![halfplane(&[0, 1], 0)]).unwrap(),
    );
    let phi = ScalarField::parse(2, "x2").unwrap();
    let r = microsupport::cohoracle::local_cohomology(&s, &v(&[3, 0]), &phi, &rat(1, 4), &rat(1, 8))
        .unwrap();
    assert_eq!(r.rank(0), 1);
    let oracle = SskOracle::new(&s).unwrap();
    let p = CotangentPoint::new(v(&[3, 0]), v(&[0, 1])).unwrap();
    assert_eq!(oracle.membership(&p, 0).unwrap(), Some(0));
}
