//! Constructive search for an exterior-ball witness near a covector that
//! passes the tangent-cone test: sweep an ε-neighborhood of a translated
//! proper cone along an interior direction until it first touches the
//! set, then read the touching point and ball direction off the nearest
//! pair. The supremum parameter may be irrational; the search returns a
//! rational parameter on the empty side of an exact bisection, which is
//! enough for the witness because every claimed property of the output
//! is re-verified exactly.

use crate::cone::ConvexCone;
use crate::conic::CotangentPoint;
use crate::error::{Error, Result};
use crate::feas::LinCon;
use crate::normalcone::{conormal0_ball_test, conormal0_halfspace_test, BallTestParams};
use crate::polyhedron::{ConvexPolyhedron, Halfspace};
use crate::project::{nearest_pair, nearest_point};
use crate::pset::PolyhedralSet;
use crate::rat::{self, dot, QVec, Rat};
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Parameters of the sweeping construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepParams {
    /// The proper cone γ (full-dimensional, with `ξ₀ ∈ Int(γ°)`).
    pub cone: ConvexCone,
    /// Radius of the swept neighborhood of the cone.
    #[serde(with = "rat::q")]
    pub epsilon: Rat,
    /// Sweep direction `v ∈ Int(γ)`.
    #[serde(with = "rat::q_vec")]
    pub interior_direction: QVec,
    #[serde(with = "rat::q")]
    pub delta: Rat,
    /// Half-space cutoff: `H₋ = {⟨x − x₀, ξ₀⟩ > −ρ}`.
    #[serde(with = "rat::q")]
    pub rho: Rat,
    #[serde(default = "default_bisection_steps")]
    pub bisection_steps: usize,
}

fn default_bisection_steps() -> usize {
    48
}

/// The conic neighborhood `U ⊇ V̄ × (γ° ∖ 0)` the witness must land in.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborhoodSpec {
    pub base_window: ConvexPolyhedron,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepWitness {
    /// The witness `(x₁; ξ₁)`, with `x₁ ∈ S` and `ξ₁ = x₁ − y`.
    pub point: CotangentPoint,
    /// Center of the exterior ball `B_{‖ξ₁‖}(y)`.
    #[serde(with = "rat::q_vec")]
    pub ball_center: QVec,
    /// Exact `‖ξ₁‖²`.
    #[serde(with = "rat::q")]
    pub radius_sq: Rat,
    /// The rational sweep parameter reached by bisection.
    #[serde(with = "rat::q")]
    pub t_star: Rat,
    /// Exact re-check: the open ball misses the cut set.
    pub exterior_ball_verified: bool,
    /// Exact re-check of the exterior-ball characterization at the witness.
    pub ball_test_passed: bool,
}

/// H-representation of the translated antipodal cone `x₀ + tv + γᵃ`.
fn translated_antipode(gamma: &ConvexCone, x0: &[Rat], v: &[Rat], t: &Rat) -> ConvexPolyhedron {
    let shift = rat::vec_add(x0, &rat::vec_scale(t, v));
    let halfspaces = gamma
        .normals
        .iter()
        .map(|a| {
            let neg = rat::vec_neg(a);
            let offset = dot(&neg, &shift);
            Halfspace::new(neg, offset)
        })
        .collect();
    ConvexPolyhedron::new(gamma.dim, halfspaces).expect("dimensions agree")
}

pub fn sweep_support_search(
    s: &PolyhedralSet,
    p: &CotangentPoint,
    params: &SweepParams,
    u: &NeighborhoodSpec,
) -> Result<SweepWitness> {
    let n = s.dim;
    let x0 = &p.base;
    let xi0 = &p.fiber;
    if p.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: p.dim() });
    }
    if rat::vec_is_zero(xi0) {
        return Err(Error::HypothesisViolated(
            "zero covector: the exterior-ball test is vacuous, no sweep needed".into(),
        ));
    }
    if !conormal0_halfspace_test(s, x0, xi0)? {
        return Err(Error::HypothesisViolated(
            "tangent cone is not contained in the covector half-space".into(),
        ));
    }
    let gamma = &params.cone;
    if !gamma.is_proper() {
        return Err(Error::NotProper("sweep cone must be proper".into()));
    }
    if !gamma.is_full_dimensional() {
        return Err(Error::ParameterInconsistency("sweep cone needs nonempty interior".into()));
    }
    if !gamma.interior_member(&params.interior_direction) {
        return Err(Error::NotInterior("sweep direction must be interior to the cone".into()));
    }
    if !gamma.polar().interior_member(xi0) {
        return Err(Error::NotInterior("covector must be interior to the polar cone".into()));
    }
    if !params.epsilon.is_positive() || !params.rho.is_positive() || !params.delta.is_positive() {
        return Err(Error::ParameterInconsistency("epsilon, delta, rho must be positive".into()));
    }
    if &params.delta * dot(&params.interior_direction, xi0) >= params.rho {
        return Err(Error::ParameterInconsistency(
            "delta step escapes the half-space cutoff".into(),
        ));
    }

    // S₀ = S ∩ {⟨x − x₀, ξ₀⟩ ≥ −ρ}
    let cutoff = Halfspace::new(xi0.clone(), dot(xi0, x0) - &params.rho);
    let hbar = ConvexPolyhedron::new(n, vec![cutoff])?;
    let s0: Vec<ConvexPolyhedron> = s
        .pieces
        .iter()
        .filter(|piece| !piece.is_empty())
        .map(|piece| piece.intersect(&hbar))
        .collect();

    // The resting cone x₀ + γᵃ may only meet S₀ at x₀ itself.
    let t_zero = Rat::zero();
    let resting = translated_antipode(gamma, x0, &params.interior_direction, &t_zero);
    for piece in &s0 {
        let joint = piece.intersect(&resting).to_system();
        // feasible with some coordinate differing from x₀?
        for i in 0..n {
            for sign in [1i64, -1] {
                let mut branch = joint.clone();
                let mut e = rat::zeros(n);
                e[i] = rat::rat_i(sign);
                let rhs = rat::rat_i(sign) * &x0[i];
                branch.push(LinCon::gt(e, rhs));
                if branch.is_feasible() {
                    return Err(Error::ParameterInconsistency(
                        "rho too large: the resting cone meets the set beyond the base point".into(),
                    ));
                }
            }
        }
    }

    let eps_sq = &params.epsilon * &params.epsilon;
    let is_clear = |t: &Rat| -> Result<bool> {
        let cone_t = translated_antipode(gamma, x0, &params.interior_direction, t);
        for piece in &s0 {
            if piece.is_empty() {
                continue;
            }
            match nearest_pair(&cone_t, piece) {
                Some((_, _, d2)) => {
                    if d2 < eps_sq {
                        return Ok(false);
                    }
                }
                None => continue,
            }
        }
        Ok(true)
    };

    // Bracket the supremum: the swept neighborhood covers x₀ at t = 0.
    if is_clear(&t_zero)? {
        return Err(Error::ParameterInconsistency(
            "sweep starts clear of the set at t = 0; epsilon is too small for the data".into(),
        ));
    }
    let mut t_lo = -params.delta.clone() - rat::rat_i(1);
    let mut expansions = 0;
    while !is_clear(&t_lo)? {
        t_lo *= rat::rat_i(2);
        expansions += 1;
        if expansions > 64 {
            return Err(Error::ParameterInconsistency(
                "sweep never separates from the cut set; check rho and the cone".into(),
            ));
        }
    }
    let mut t_hi = t_zero;
    for _ in 0..params.bisection_steps {
        let mid = (&t_lo + &t_hi) / rat::rat_i(2);
        if is_clear(&mid)? {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
    }
    let t_star = t_lo;

    // Nearest pair at the resting parameter gives the witness.
    let cone_t = translated_antipode(gamma, x0, &params.interior_direction, &t_star);
    let mut best: Option<(QVec, QVec, Rat)> = None;
    for piece in &s0 {
        if piece.is_empty() {
            continue;
        }
        if let Some((q, s_pt, d2)) = nearest_pair(&cone_t, piece) {
            if best.as_ref().is_none_or(|(_, _, b)| d2 < *b) {
                best = Some((q, s_pt, d2));
            }
        }
    }
    let (y, x1, d2) = best.ok_or_else(|| {
        Error::ParameterInconsistency("the cut set is empty; nothing to sweep against".into())
    })?;
    let xi1 = rat::vec_sub(&x1, &y);
    if rat::vec_is_zero(&xi1) {
        return Err(Error::ParameterInconsistency(
            "bisection did not separate the sweep from the set".into(),
        ));
    }
    if !gamma.polar().member(&xi1) {
        return Err(Error::ParameterInconsistency(
            "witness covector escaped the polar cone; parameters are inconsistent".into(),
        ));
    }
    if !u.base_window.member(&x1) {
        return Err(Error::ParameterInconsistency(
            "witness base point left the requested neighborhood; shrink rho or epsilon".into(),
        ));
    }

    // Exact exterior ball: no cut piece comes closer to y than ‖ξ₁‖.
    let mut exterior = true;
    for piece in &s0 {
        if piece.is_empty() {
            continue;
        }
        let proj = nearest_point(&y, piece)?;
        if proj.dist_sq < d2 {
            exterior = false;
        }
    }
    let ball_test_passed = conormal0_ball_test(s, &x1, &xi1, &BallTestParams::default())?;
    Ok(SweepWitness {
        point: CotangentPoint { base: x1, fiber: xi1 },
        ball_center: y,
        radius_sq: d2,
        t_star,
        exterior_ball_verified: exterior,
        ball_test_passed,
    })
}

/// Cone and constants fitting unit-scale data: a pointed full-dimensional
/// cone spanned narrowly around the covector direction, small sweep
/// radius and cutoff. Built from the primitive integer direction so the
/// interior conditions hold regardless of the covector's scale.
pub fn default_params_for(xi0: &[Rat]) -> Result<SweepParams> {
    let n = xi0.len();
    let dir: QVec = rat::primitive(xi0, false)
        .ok_or_else(|| Error::InvalidInput("cannot build sweep parameters around 0".into()))?
        .into_iter()
        .map(Rat::from_integer)
        .collect();
    // γ = {v : ⟨dir, v⟩ ≥ ½|v_j| for all j}: pointed, full-dimensional,
    // with dir interior to both γ and γ°.
    let mut normals = Vec::new();
    for j in 0..n {
        for sign in [1i64, -1] {
            let mut a = dir.clone();
            a[j] = &a[j] - rat::rat(sign, 2);
            normals.push(a);
        }
    }
    let cone = ConvexCone::new(n, normals)?;
    Ok(SweepParams {
        cone,
        epsilon: rat::rat(1, 8),
        interior_direction: dir,
        delta: rat::rat(1, 8),
        rho: rat::rat(1, 4),
        bisection_steps: default_bisection_steps(),
    })
}
