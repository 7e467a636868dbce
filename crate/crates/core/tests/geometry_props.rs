//! Property suites for the exact geometry kernel: polar involution,
//! scale invariance of conic membership, the projection variational
//! inequality, and agreement of exact tangent cones with sampled
//! normal cones.

use microsupport::cone::ConvexCone;
use microsupport::conic::{ConicPiece, ConicSubset, CotangentPoint};
use microsupport::fixtures::{random_covector, random_face_point, random_polyhedral_set};
use microsupport::polyhedron::ConvexPolyhedron;
use microsupport::project::nearest_point;
use microsupport::pset::{tangent_cone, PolyhedralSet};
use microsupport::rat::{self, dot, rat, rat_i, QVec, Rat};
use microsupport::sample::{normal_cone_pair_sampled, rng};
use num::Zero;
use proptest::prelude::*;
use rand::Rng;

fn small_vec(dim: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-3i64..=3, dim)
}

fn qvec(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| rat_i(x)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn double_polar_is_identity(normals in prop::collection::vec(small_vec(3), 0..5)) {
        let rows: Vec<QVec> = normals.iter().map(|r| qvec(r)).collect();
        let cone = ConvexCone::new(3, rows).unwrap();
        prop_assert!(cone.polar().polar().same_cone(&cone));
    }

    #[test]
    fn polar_pairs_nonnegatively_with_generators(normals in prop::collection::vec(small_vec(2), 1..4)) {
        let cone = ConvexCone::new(2, normals.iter().map(|r| qvec(r)).collect()).unwrap();
        let polar = cone.polar();
        for g in cone.generating_vectors() {
            for h in polar.generating_vectors() {
                prop_assert!(dot(&g, &h) >= Rat::zero());
            }
        }
    }

    #[test]
    fn conic_membership_is_scale_invariant(
        base in small_vec(2),
        fiber in small_vec(2),
        num in 1i64..40,
        den in 1i64..40,
    ) {
        let piece = ConicPiece::new(
            ConvexPolyhedron::box_window(2, rat_i(-2), rat_i(2)),
            ConvexCone::new(2, vec![qvec(&[1, 1]), qvec(&[-1, 2])]).unwrap(),
        ).unwrap();
        let a = ConicSubset::exact(2, vec![piece]).unwrap();
        let p = CotangentPoint::new(qvec(&base), qvec(&fiber)).unwrap();
        let lambda = rat(num, den);
        let scaled = CotangentPoint::new(
            qvec(&base),
            p.fiber.iter().map(|x| x * &lambda).collect(),
        ).unwrap();
        prop_assert_eq!(a.member_exact(&p).unwrap(), a.member_exact(&scaled).unwrap());
    }
}

#[test]
fn projection_variational_inequality_on_random_data() {
    let mut r = rng(2024);
    let mut checked = 0;
    while checked < 60 {
        let s = random_polyhedral_set(2, &mut r);
        let piece = match s.pieces.iter().find(|p| !p.is_empty()) {
            Some(p) => p,
            None => continue,
        };
        let x: QVec = (0..2).map(|_| rat(r.gen_range(-40..=40), 8)).collect();
        let proj = nearest_point(&x, piece).unwrap();
        // ⟨x − y, z − y⟩ ≤ 0 for all vertices z (exact)
        for z in piece.vertices() {
            let lhs = dot(&rat::vec_sub(&x, &proj.point), &rat::vec_sub(&z, &proj.point));
            assert!(lhs <= Rat::zero());
        }
        // and the projection is a member at exact distance
        assert!(piece.member(&proj.point));
        let d2 = rat::norm_sq(&rat::vec_sub(&x, &proj.point));
        assert_eq!(d2, proj.dist_sq);
        checked += 1;
    }
}

#[test]
fn tangent_cone_matches_sampled_normal_cone() {
    // Exact tangent cones against the Monte-Carlo pair estimator on random
    // planar and spatial sets: all sampled directions are members, and a
    // 64-direction probe of the cone is angularly covered by samples.
    let mut r = rng(55);
    for dim in [2usize, 3] {
        for round in 0..25 {
            let s = random_polyhedral_set(dim, &mut r);
            let Some(x) = random_face_point(&s, &mut r) else { continue };
            let tc = tangent_cone(&s, &x).unwrap();
            let point = PolyhedralSet::from_piece(ConvexPolyhedron::point(&x));
            let sampled =
                normal_cone_pair_sampled(&s, &point, &x, 1500, 1000 + round as u64).unwrap();
            // containment one way: exact membership of every sample
            for d in &sampled.exact_differences {
                assert!(tc.member(d), "sampled direction escaped the tangent cone");
            }
            // containment the other way: probe directions of the cone are
            // approached by sampled directions within a wide angular tolerance
            let mut probes: Vec<Vec<f64>> = Vec::new();
            for cone in &tc.cones {
                let gens = cone.generating_vectors();
                if gens.is_empty() {
                    continue;
                }
                for i in 0..64 {
                    let mut v = vec![0f64; dim];
                    let mut any = false;
                    for (j, g) in gens.iter().enumerate() {
                        let w = ((i * 37 + j * 11) % 8) as f64 / 7.0;
                        if w > 0.0 {
                            any = true;
                        }
                        for (k, gk) in g.iter().enumerate() {
                            v[k] += w * rat::rat_to_f64(gk);
                        }
                    }
                    if any {
                        let norm = v.iter().map(|c| c * c).sum::<f64>().sqrt();
                        if norm > 1e-9 {
                            probes.push(v.iter().map(|c| c / norm).collect());
                        }
                    }
                }
            }
            if sampled.directions.is_empty() {
                continue;
            }
            for p in probes.iter().take(64) {
                let best = sampled
                    .directions
                    .iter()
                    .map(|d| {
                        let dp: f64 = d.iter().zip(p.iter()).map(|(a, b)| a * b).sum();
                        dp
                    })
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(
                    best > 0.55,
                    "probe direction {p:?} not covered by samples (best alignment {best})"
                );
            }
        }
    }
}

#[test]
fn conic_membership_scaling_bulk() {
    // 1000 random queries against a fixed nontrivial descriptor.
    let piece = ConicPiece::new(
        ConvexPolyhedron::box_window(2, rat_i(-2), rat_i(2)),
        ConvexCone::new(2, vec![qvec(&[2, 1]), qvec(&[-1, 3])]).unwrap(),
    )
    .unwrap();
    let a = ConicSubset::exact(2, vec![piece]).unwrap();
    let mut r = rng(808);
    for _ in 0..1000 {
        let base: QVec = (0..2).map(|_| rat(r.gen_range(-24..=24), 8)).collect();
        let fiber = random_covector(2, &mut r);
        let lambda = rat(r.gen_range(1..=50), r.gen_range(1..=50));
        let p = CotangentPoint::new(base.clone(), fiber.clone()).unwrap();
        let q = CotangentPoint::new(base, fiber.iter().map(|x| x * &lambda).collect()).unwrap();
        assert_eq!(a.member_exact(&p).unwrap(), a.member_exact(&q).unwrap());
    }
}

#[test]
fn antipodal_is_involutive_on_random_descriptors() {
    let mut r = rng(99);
    for _ in 0..10 {
        let s = random_polyhedral_set(2, &mut r);
        let cone = microsupport::normalcone::conormal0(&s).unwrap();
        let twice = cone.antipodal().antipodal();
        assert!(cone.set_eq(&twice).unwrap());
    }
}

#[test]
fn proper_cone_detection_matches_polar_interior() {
    let mut r = rng(505);
    let mut seen_proper = 0;
    let mut seen_improper = 0;
    for _ in 0..40 {
        let count = r.gen_range(0..4);
        let normals: Vec<QVec> = (0..count)
            .map(|_| {
                let mut v = rat::zeros(2);
                for c in v.iter_mut() {
                    *c = rat_i(r.gen_range(-2..=2));
                }
                v
            })
            .collect();
        let cone = ConvexCone::new(2, normals).unwrap();
        let polar = cone.polar();
        let witness = polar.interior_witness();
        assert_eq!(cone.is_proper(), witness.is_some());
        if cone.is_proper() {
            seen_proper += 1;
            // the witness may be 0 when the polar is the whole plane
            let w = witness.unwrap();
            assert!(polar.interior_member(&w));
        } else {
            seen_improper += 1;
        }
    }
    assert!(seen_proper > 0 && seen_improper > 0);
}
