//! Seeded samplers: points of polyhedral sets near a base point, sampled
//! normal cones of set pairs, and unit-covector samples of exact conic
//! descriptors. Sampled cones are under-approximations by construction
//! and are never treated as exact by any operation.

use crate::cone::ConvexCone;
use crate::conic::{ConicSubset, CotangentPoint};
use crate::error::{Error, Result};
use crate::polyhedron::ConvexPolyhedron;
use crate::pset::PolyhedralSet;
use crate::rat::{self, QVec, Rat};
use num::{Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random rational in `[-scale, scale]` with denominator 2¹⁶.
fn random_rat(rng: &mut ChaCha8Rng, scale: &Rat) -> Rat {
    let num = rng.gen_range(-(1i64 << 16)..=(1i64 << 16));
    rat::rat(num, 1 << 16) * scale
}

/// A Monte-Carlo estimate of the normal cone `C_p(S₁, S₂)`: directions of
/// scaled differences `x − y` with `x ∈ S₁`, `y ∈ S₂` sampled near `p`.
///
/// Directions are stored both as floating unit vectors and as the exact
/// rational differences that generated them, so callers can run exact
/// containment checks against the sampled data. The result is an
/// under-approximation of the true cone (up to closure).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SampledCone {
    pub dim: usize,
    /// Unit directions, floating point.
    pub directions: Vec<Vec<f64>>,
    /// The exact unscaled differences behind each direction.
    #[serde(with = "rat::q_mat")]
    pub exact_differences: Vec<QVec>,
}

impl SampledCone {
    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// Sample points of `s` within distance roughly `radius` of `p`, staying
/// on the affine hull of each piece so lower-dimensional pieces are hit.
fn sample_near(
    s: &PolyhedralSet,
    p: &[Rat],
    radius: &Rat,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<QVec> {
    let mut out = Vec::new();
    let pieces: Vec<(&ConvexPolyhedron, Vec<QVec>)> = s
        .pieces
        .iter()
        .filter(|piece| piece.member(p))
        .map(|piece| (piece, piece.direction_space()))
        .collect();
    if pieces.is_empty() {
        return out;
    }
    let mut attempts = 0;
    while out.len() < count && attempts < count * 40 {
        attempts += 1;
        let (piece, dirs) = &pieces[rng.gen_range(0..pieces.len())];
        let mut x = p.to_vec();
        if dirs.is_empty() {
            // zero-dimensional piece: the point itself
            out.push(x);
            continue;
        }
        for d in dirs {
            let c = random_rat(rng, radius);
            x = rat::vec_add(&x, &rat::vec_scale(&c, d));
        }
        if piece.member(&x) {
            out.push(x);
        }
    }
    out
}

/// Monte-Carlo estimate of `C_p(S₁, S₂)` from `budget` sampled pairs at
/// shrinking radii. Errors unless `p` lies in both closed sets.
pub fn normal_cone_pair_sampled(
    s1: &PolyhedralSet,
    s2: &PolyhedralSet,
    p: &[Rat],
    budget: usize,
    seed: u64,
) -> Result<SampledCone> {
    if s1.dim != s2.dim {
        return Err(Error::DimensionMismatch { expected: s1.dim, got: s2.dim });
    }
    if !s1.member(p) || !s2.member(p) {
        return Err(Error::NotAdherent);
    }
    let mut rng = rng(seed);
    let mut directions = Vec::new();
    let mut exact = Vec::new();
    let mut radius = rat::rat(1, 2);
    let rounds = 8usize;
    for _ in 0..rounds {
        let per_round = (budget / rounds).max(1);
        let xs = sample_near(s1, p, &radius, per_round, &mut rng);
        let ys = sample_near(s2, p, &radius, per_round, &mut rng);
        for (x, y) in xs.iter().zip(ys.iter()) {
            let d = rat::vec_sub(x, y);
            if rat::vec_is_zero(&d) {
                continue;
            }
            let df: Vec<f64> = d.iter().map(rat::rat_to_f64).collect();
            let norm = df.iter().map(|v| v * v).sum::<f64>().sqrt();
            directions.push(df.iter().map(|v| v / norm).collect());
            exact.push(d);
        }
        radius /= rat::rat_i(2);
    }
    Ok(SampledCone { dim: s1.dim, directions, exact_differences: exact })
}

// ---------------------------------------------------------------------------
// samples of exact conic descriptors

/// Draw cotangent samples from an exact descriptor: rational points of
/// each base polyhedron paired with nonnegative combinations of the fiber
/// generators. Fibers are normalized to floating unit length only when
/// the exact norm is already 1; otherwise the exact unnormalized covector
/// is kept (membership is scale-invariant).
pub fn sample_conic_subset(
    a: &ConicSubset,
    per_piece: usize,
    seed: u64,
) -> Result<Vec<CotangentPoint>> {
    if a.pieces.is_empty() {
        return Err(Error::EstimateOnly);
    }
    let mut rng = rng(seed);
    let mut out = Vec::new();
    for piece in &a.pieces {
        if piece.base.is_empty() {
            continue;
        }
        let base_points = sample_polyhedron(&piece.base, per_piece, &mut rng);
        let fibers = sample_cone(&piece.fiber, per_piece, &mut rng);
        for (b, f) in base_points.into_iter().zip(fibers) {
            out.push(CotangentPoint { base: b, fiber: f });
        }
    }
    Ok(out)
}

/// Rational points of a polyhedron: a feasible point plus random moves
/// along the direction space, projected back by rejection.
pub fn sample_polyhedron(
    p: &ConvexPolyhedron,
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<QVec> {
    let Some(center) = p.witness_point() else {
        return Vec::new();
    };
    let dirs = p.direction_space();
    let mut out = vec![center.clone()];
    let scale = rat::rat_i(2);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 40 {
        attempts += 1;
        let mut x = center.clone();
        for d in &dirs {
            let c = random_rat(rng, &scale);
            x = rat::vec_add(&x, &rat::vec_scale(&c, d));
        }
        if p.member(&x) {
            out.push(x);
        }
    }
    while out.len() < count {
        out.push(center.clone());
    }
    out
}

/// Points of a cone: nonnegative random combinations of its generators
/// (plus the lineality part with arbitrary signs). Includes the origin.
pub fn sample_cone(c: &ConvexCone, count: usize, rng: &mut ChaCha8Rng) -> Vec<QVec> {
    let (lineality, rays) = c.generators();
    let mut out = vec![rat::zeros(c.dim)];
    while out.len() < count {
        let mut v = rat::zeros(c.dim);
        for r in rays {
            let w = random_rat(rng, &rat::rat_i(1));
            let w = if w.is_negative() { Rat::zero() } else { w };
            v = rat::vec_add(&v, &rat::vec_scale(&w, r));
        }
        for l in lineality {
            let w = random_rat(rng, &rat::rat_i(1));
            v = rat::vec_add(&v, &rat::vec_scale(&w, l));
        }
        out.push(v);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::Halfspace;
    use crate::rat::{rat_i, zeros};

    fn v(xs: &[i64]) -> QVec {
        xs.iter().map(|&x| rat_i(x)).collect()
    }

    fn halfplane(n: &[i64], b: i64) -> ConvexPolyhedron {
        ConvexPolyhedron::new(n.len(), vec![Halfspace::new(v(n), rat_i(b))]).unwrap()
    }

    #[test]
    fn interior_point_sees_all_orthants() {
        let s = PolyhedralSet::full(2);
        let cone = normal_cone_pair_sampled(&s, &s, &v(&[0, 0]), 400, 7).unwrap();
        let mut quadrants = [false; 4];
        for d in &cone.directions {
            let q = match (d[0] >= 0.0, d[1] >= 0.0) {
                (true, true) => 0,
                (false, true) => 1,
                (false, false) => 2,
                (true, false) => 3,
            };
            quadrants[q] = true;
        }
        assert!(quadrants.iter().all(|&b| b));
    }

    #[test]
    fn planar_ray_differences_stay_on_the_axis() {
        // S₁ = S₂ = {(u, w) : u ≥ 0, w = 0}: all differences have w = 0
        let ray = ConvexPolyhedron::new(
            2,
            vec![
                Halfspace::new(v(&[1, 0]), rat_i(0)),
                Halfspace::new(v(&[0, 1]), rat_i(0)),
                Halfspace::new(v(&[0, -1]), rat_i(0)),
            ],
        )
        .unwrap();
        let s = PolyhedralSet::from_piece(ray);
        let cone = normal_cone_pair_sampled(&s, &s, &zeros(2), 300, 11).unwrap();
        assert!(!cone.is_empty());
        for d in &cone.exact_differences {
            assert!(d[1].is_zero());
        }
        // both axis directions appear
        assert!(cone.directions.iter().any(|d| d[0] > 0.5));
        assert!(cone.directions.iter().any(|d| d[0] < -0.5));
    }

    #[test]
    fn opposite_halflines_give_nonnegative_differences() {
        // S₁ = {x ≥ 0}, S₂ = {x ≤ 0} in R¹: differences x − y are ≥ 0, so
        // the sampled cone is the nonnegative ray.
        let s1 = PolyhedralSet::new(1, vec![halfplane(&[1], 0)]).unwrap();
        let s2 = PolyhedralSet::new(1, vec![halfplane(&[-1], 0)]).unwrap();
        let cone = normal_cone_pair_sampled(&s1, &s2, &zeros(1), 200, 3).unwrap();
        assert!(!cone.is_empty());
        for d in &cone.exact_differences {
            assert!(!d[0].is_negative());
        }
        assert!(cone.directions.iter().any(|d| d[0] > 0.5));
    }

    #[test]
    fn not_adherent_errors() {
        let s1 = PolyhedralSet::new(1, vec![halfplane(&[1], 0)]).unwrap();
        let s2 = PolyhedralSet::new(1, vec![halfplane(&[-1], 1)]).unwrap();
        assert!(matches!(
            normal_cone_pair_sampled(&s1, &s2, &zeros(1), 10, 1),
            Err(Error::NotAdherent)
        ));
    }

    #[test]
    fn conic_samples_pass_exact_membership() {
        let s = PolyhedralSet::new(2, vec![halfplane(&[1, 0], 0)]).unwrap();
        let cone = crate::normalcone::conormal0(&s).unwrap();
        let samples = sample_conic_subset(&cone, 20, 5).unwrap();
        assert!(!samples.is_empty());
        for p in &samples {
            assert!(cone.member_exact(p).unwrap());
        }
        // validated attachment works
        assert!(cone.clone().with_samples(samples).is_ok());
    }

    #[test]
    fn sampled_tangent_directions_lie_in_tangent_cone() {
        let s = PolyhedralSet::new(2, vec![halfplane(&[1, 0], 0), halfplane(&[0, 1], 0)]).unwrap();
        let x = zeros(2);
        let tc = crate::pset::tangent_cone(&s, &x).unwrap();
        let point = PolyhedralSet::from_piece(ConvexPolyhedron::point(&x));
        let cone = normal_cone_pair_sampled(&s, &point, &x, 300, 9).unwrap();
        for d in &cone.exact_differences {
            assert!(tc.member(d));
        }
    }
}
