//! The canonical symplectic calculus on `T*R^n`: Poisson bracket,
//! Hamiltonian isomorphism, and the sampled weak-involutivity harness.
//!
//! Sign convention, fixed once: `{f,g} = Σ_j (∂f/∂ξ_j ∂g/∂x_j −
//! ∂f/∂x_j ∂g/∂ξ_j)`, so `{x₁, ξ₁} = −1` and `H(df)(g) = {f,g}` with
//! `H(α dx + β dξ) = (β, −α)`. Every theorem check below depends only on
//! vanishing loci, which are convention-independent.

pub mod expr;

use crate::conic::{ConicSubset, CotangentPoint};
use crate::error::{Error, Result};
use crate::rat::{self, QVec, Rat};
use expr::{Expr, ScalarField, Sym};
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};

/// Symbolic Poisson bracket of two fields on the same `T*R^n`.
pub fn poisson_bracket(f: &ScalarField, g: &ScalarField) -> Result<ScalarField> {
    if f.dim != g.dim {
        return Err(Error::DimensionMismatch { expected: f.dim, got: g.dim });
    }
    let n = f.dim;
    let mut acc = Expr::Const(Rat::zero());
    for j in 0..n {
        let term = Expr::Sub(
            Box::new(Expr::Mul(
                Box::new(f.partial(Sym::Fiber(j)).expr),
                Box::new(g.partial(Sym::Base(j)).expr),
            )),
            Box::new(Expr::Mul(
                Box::new(f.partial(Sym::Base(j)).expr),
                Box::new(g.partial(Sym::Fiber(j)).expr),
            )),
        );
        acc = Expr::Add(Box::new(acc), Box::new(term));
    }
    Ok(ScalarField::new(n, acc))
}

/// A covector on `T*R^n` at a point: `Σ α_j dx_j + β_j dξ_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CotangentCovector {
    #[serde(with = "rat::q_vec")]
    pub dx: QVec,
    #[serde(with = "rat::q_vec")]
    pub dxi: QVec,
}

/// A tangent vector on `T*R^n`: `Σ u_j ∂/∂x_j + w_j ∂/∂ξ_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CotangentTangent {
    #[serde(with = "rat::q_vec")]
    pub dx_dir: QVec,
    #[serde(with = "rat::q_vec")]
    pub dxi_dir: QVec,
}

/// The Hamiltonian isomorphism `H: T*_p(T*X) → T_p(T*X)` in canonical
/// coordinates: `H(α dx + β dξ) = (β, −α)`.
pub fn hamiltonian_vector(theta: &CotangentCovector) -> CotangentTangent {
    CotangentTangent { dx_dir: theta.dxi.clone(), dxi_dir: rat::vec_neg(&theta.dx) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BracketVerdict {
    Pass,
    Fail,
    HypothesisViolated,
}

/// Report of a sampled involutivity check. `verdict` is `Pass` iff both
/// the hypothesis maximum and the bracket maximum are within `tol`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BracketReport {
    pub hypothesis_max: f64,
    pub bracket_max: f64,
    pub tol: f64,
    pub verdict: BracketVerdict,
    pub samples: usize,
}

/// Evaluate the weak-involutivity statement on samples of a conic subset:
/// if `f` and `g` vanish on the set (hypothesis), their Poisson bracket
/// must too (conclusion). A failure on a genuine truncated microsupport
/// would falsify the implementation, never the statement.
///
/// Hypothesis and conclusion share `tol`; use
/// [`weak_involutivity_check_tols`] to split them.
pub fn weak_involutivity_check(
    samples: &[CotangentPoint],
    f: &ScalarField,
    g: &ScalarField,
    tol: f64,
) -> Result<BracketReport> {
    weak_involutivity_check_tols(samples, f, g, tol, tol)
}

/// Same check with separate hypothesis and conclusion tolerances; the
/// report's `tol` field carries the conclusion tolerance.
pub fn weak_involutivity_check_tols(
    samples: &[CotangentPoint],
    f: &ScalarField,
    g: &ScalarField,
    hypothesis_tol: f64,
    conclusion_tol: f64,
) -> Result<BracketReport> {
    if samples.is_empty() {
        return Err(Error::InvalidInput("empty sample set".into()));
    }
    let bracket = poisson_bracket(f, g)?;
    let mut hyp_max = Rat::zero();
    let mut br_max = Rat::zero();
    for p in samples {
        let fv = f.eval(&p.base, &p.fiber)?.abs();
        let gv = g.eval(&p.base, &p.fiber)?.abs();
        let bv = bracket.eval(&p.base, &p.fiber)?.abs();
        if fv > hyp_max {
            hyp_max = fv;
        }
        if gv > hyp_max {
            hyp_max = gv;
        }
        if bv > br_max {
            br_max = bv;
        }
    }
    let as_rat = |t: f64| {
        rat::f64_to_rat(t)
            .ok_or_else(|| Error::ParameterInconsistency("tolerance must be finite".into()))
    };
    let verdict = if hyp_max > as_rat(hypothesis_tol)? {
        BracketVerdict::HypothesisViolated
    } else if br_max > as_rat(conclusion_tol)? {
        BracketVerdict::Fail
    } else {
        BracketVerdict::Pass
    };
    Ok(BracketReport {
        hypothesis_max: rat::rat_to_f64(&hyp_max),
        bracket_max: rat::rat_to_f64(&br_max),
        tol: conclusion_tol,
        verdict,
        samples: samples.len(),
    })
}

/// Convenience wrapper taking a conic subset carrying samples.
pub fn weak_involutivity_check_on(
    a: &ConicSubset,
    f: &ScalarField,
    g: &ScalarField,
    tol: f64,
) -> Result<BracketReport> {
    let samples = a
        .samples
        .as_ref()
        .ok_or_else(|| Error::InvalidInput("conic subset carries no samples".into()))?;
    weak_involutivity_check(samples, f, g, tol)
}

/// Report of the strong-involutivity failure demonstration on
/// `SS₀(k_{(0,∞)}) = {(x; ξ) : ξ = 0, x ≥ 0} ⊂ T*R`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrongInvolutivityReport {
    /// The exact descriptor: zero section over `[0, ∞)`.
    pub ss0: ConicSubset,
    /// Cellwise-oracle cross-check of the descriptor on a probe grid.
    pub oracle_agrees: bool,
    /// All sampled normal-cone directions of the pair at the origin have
    /// vanishing `dξ` component.
    pub pair_cone_in_hyperplane: bool,
    pub sampled_directions: usize,
    /// `H(−dξ)`, the candidate direction `−∂/∂x`.
    pub hamiltonian_direction: CotangentTangent,
    /// Membership of that direction in the exact normal cone of the set
    /// at the origin; `false` exhibits the failure of strong involutivity.
    pub hamiltonian_in_cone: bool,
}

impl StrongInvolutivityReport {
    /// The Remark is reproduced iff every verdict lands as stated.
    pub fn reproduced(&self) -> bool {
        self.oracle_agrees && self.pair_cone_in_hyperplane && !self.hamiltonian_in_cone
    }
}

/// Demonstrate that the truncated microsupport is not involutive in the
/// strong sense: for the constant sheaf on the open half-line, the normal
/// cone of `SS₀` at the origin lies in `{−dξ = 0}` yet `H(−dξ) = −∂/∂x`
/// is not a normal-cone direction.
pub fn strong_involutivity_demo(seed: u64) -> Result<StrongInvolutivityReport> {
    use crate::cohoracle::{probe_grid_1d, SskOracle};
    use crate::polyhedron::{ConvexPolyhedron, Halfspace};
    use crate::pset::{tangent_cone, LocallyClosedPolyhedralSet, PolyhedralSet};
    use crate::sample::normal_cone_pair_sampled;

    // SS₀(k_{(0,∞)}): the zero section over the closed half-line.
    let closure = PolyhedralSet::new(
        1,
        vec![ConvexPolyhedron::new(1, vec![Halfspace::new(vec![rat::rat_i(1)], Rat::zero())])?],
    )?;
    let ss0 = ConicSubset::zero_section(&closure);

    // Independent check against the local-cohomology oracle in dim 1.
    let open_ray = LocallyClosedPolyhedralSet::new(
        closure.clone(),
        PolyhedralSet::new(1, vec![ConvexPolyhedron::point(&rat::zeros(1))])?,
    )?;
    let oracle = SskOracle::new(&open_ray)?;
    let mut oracle_agrees = true;
    for p in probe_grid_1d(&rat::rat_i(-2), &rat::rat_i(2), 17) {
        let by_oracle = oracle.membership(&p, 0)?.is_some();
        let by_descriptor = ss0.member_exact(&p)?;
        if by_oracle != by_descriptor {
            oracle_agrees = false;
        }
    }

    // SS₀ viewed as a planar subset {(u, w) : u ≥ 0, w = 0} of T*R.
    let planar = PolyhedralSet::from_piece(ConvexPolyhedron::new(
        2,
        vec![
            Halfspace::new(vec![rat::rat_i(1), rat::rat_i(0)], Rat::zero()),
            Halfspace::new(vec![rat::rat_i(0), rat::rat_i(1)], Rat::zero()),
            Halfspace::new(vec![rat::rat_i(0), rat::rat_i(-1)], Rat::zero()),
        ],
    )?);
    let origin = rat::zeros(2);
    let sampled = normal_cone_pair_sampled(&planar, &planar, &origin, 400, seed)?;
    let pair_cone_in_hyperplane =
        !sampled.is_empty() && sampled.exact_differences.iter().all(|d| d[1].is_zero());

    // H(−dξ) = −∂/∂x, tested against the exact tangent cone at the origin.
    let theta = CotangentCovector { dx: rat::zeros(1), dxi: vec![rat::rat_i(-1)] };
    let h = hamiltonian_vector(&theta);
    let direction = vec![h.dx_dir[0].clone(), h.dxi_dir[0].clone()];
    let tc = tangent_cone(&planar, &origin)?;
    let hamiltonian_in_cone = tc.member(&direction);

    Ok(StrongInvolutivityReport {
        ss0,
        oracle_agrees,
        pair_cone_in_hyperplane,
        sampled_directions: sampled.directions.len(),
        hamiltonian_direction: h,
        hamiltonian_in_cone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat_i, zeros};

    fn sf(dim: usize, s: &str) -> ScalarField {
        ScalarField::parse(dim, s).unwrap()
    }

    #[test]
    fn canonical_pair_bracket_is_minus_one() {
        let b = poisson_bracket(&sf(1, "x1"), &sf(1, "xi1")).unwrap();
        assert_eq!(b.constant_value().unwrap(), rat_i(-1));
    }

    #[test]
    fn bracket_with_itself_vanishes() {
        let f = sf(2, "(+ (* x1 xi2) (pow x2 3))");
        let b = poisson_bracket(&f, &f).unwrap();
        for pt in [([1i64, 2], [3i64, -1]), ([0, 0], [1, 1]), ([-2, 5], [7, 2])] {
            let base: QVec = pt.0.iter().map(|&x| rat_i(x)).collect();
            let fiber: QVec = pt.1.iter().map(|&x| rat_i(x)).collect();
            assert!(b.eval(&base, &fiber).unwrap().is_zero());
        }
    }

    #[test]
    fn worked_bracket_example() {
        // f = x₁ξ₁, g = x₁² in n = 1 → {f,g} = 2x₁²
        let b = poisson_bracket(&sf(1, "(* x1 xi1)"), &sf(1, "(pow x1 2)")).unwrap();
        for x in [-3i64, 0, 2, 7] {
            let base = vec![rat_i(x)];
            let fiber = vec![rat_i(11)];
            assert_eq!(b.eval(&base, &fiber).unwrap(), rat_i(2 * x * x));
        }
    }

    #[test]
    fn hamiltonian_convention() {
        // θ = dx₁ → −∂/∂ξ₁
        let theta = CotangentCovector { dx: vec![rat_i(1), rat_i(0)], dxi: zeros(2) };
        let h = hamiltonian_vector(&theta);
        assert_eq!(h.dx_dir, zeros(2));
        assert_eq!(h.dxi_dir, vec![rat_i(-1), rat_i(0)]);
        // θ = −dξ in n = 1 → −∂/∂x
        let theta = CotangentCovector { dx: zeros(1), dxi: vec![rat_i(-1)] };
        let h = hamiltonian_vector(&theta);
        assert_eq!(h.dx_dir, vec![rat_i(-1)]);
        assert_eq!(h.dxi_dir, zeros(1));
        // θ = 0 → 0
        let zero = CotangentCovector { dx: zeros(1), dxi: zeros(1) };
        let h = hamiltonian_vector(&zero);
        assert!(rat::vec_is_zero(&h.dx_dir) && rat::vec_is_zero(&h.dxi_dir));
    }

    #[test]
    fn hamiltonian_consistency_with_bracket() {
        // H(df) applied to g as a directional derivative equals {f,g}.
        let f = sf(2, "(+ (* x1 xi1) x2)");
        let g = sf(2, "(* x2 xi2)");
        let bracket = poisson_bracket(&f, &g).unwrap();
        let base: QVec = vec![rat_i(2), rat_i(-1)];
        let fiber: QVec = vec![rat_i(3), rat_i(5)];
        let (fx, fxi) = f.gradient(&base, &fiber).unwrap();
        let h = hamiltonian_vector(&CotangentCovector { dx: fx, dxi: fxi });
        let (gx, gxi) = g.gradient(&base, &fiber).unwrap();
        let directional = rat::dot(&h.dx_dir, &gx) + rat::dot(&h.dxi_dir, &gxi);
        assert_eq!(directional, bracket.eval(&base, &fiber).unwrap());
    }

    #[test]
    fn involutivity_check_on_conormal_of_hyperplane() {
        // A = N*₀({x₁ = 0}) = {(0, y; ξ, 0)}: f = x₁ and g = ξ₂ vanish,
        // and {f, g} ≡ 0.
        let samples: Vec<CotangentPoint> = (-3..=3)
            .flat_map(|y| {
                (-2..=2).map(move |xi| {
                    CotangentPoint::new(vec![rat_i(0), rat_i(y)], vec![rat_i(xi), rat_i(0)]).unwrap()
                })
            })
            .collect();
        let report =
            weak_involutivity_check(&samples, &sf(2, "x1"), &sf(2, "xi2"), 1e-9).unwrap();
        assert_eq!(report.verdict, BracketVerdict::Pass);
        assert_eq!(report.hypothesis_max, 0.0);
        assert_eq!(report.bracket_max, 0.0);
    }

    #[test]
    fn involutivity_negative_control() {
        // g = x does not vanish on {(x; 0) : x ≥ 0}
        let samples: Vec<CotangentPoint> = (0..=4)
            .map(|x| CotangentPoint::new(vec![rat_i(x)], vec![rat_i(0)]).unwrap())
            .collect();
        let report = weak_involutivity_check(&samples, &sf(1, "xi1"), &sf(1, "x1"), 1e-9).unwrap();
        assert_eq!(report.verdict, BracketVerdict::HypothesisViolated);
    }

    #[test]
    fn strong_involutivity_demo_reproduces_the_failure() {
        let report = strong_involutivity_demo(42).unwrap();
        assert!(report.oracle_agrees);
        assert!(report.pair_cone_in_hyperplane);
        assert!(!report.hamiltonian_in_cone);
        assert!(report.reproduced());
        assert_eq!(report.hamiltonian_direction.dx_dir, vec![rat_i(-1)]);
        // the descriptor is the zero section over the closed half-line
        let inside = CotangentPoint::new(vec![rat_i(3)], vec![rat_i(0)]).unwrap();
        let outside = CotangentPoint::new(vec![rat_i(0)], vec![rat_i(1)]).unwrap();
        assert!(report.ss0.member_exact(&inside).unwrap());
        assert!(!report.ss0.member_exact(&outside).unwrap());
    }

    #[test]
    fn remark_set_is_weakly_involutive() {
        // A = {(x; ξ) : ξ = 0, x ≥ 0}, f = ξ, g = xξ: both vanish and
        // {f,g} = ξ vanishes on A.
        let samples: Vec<CotangentPoint> = (0..=6)
            .map(|x| CotangentPoint::new(vec![rat_i(x)], vec![rat_i(0)]).unwrap())
            .collect();
        let f = sf(1, "xi1");
        let g = sf(1, "(* x1 xi1)");
        let report = weak_involutivity_check(&samples, &f, &g, 1e-9).unwrap();
        assert_eq!(report.verdict, BracketVerdict::Pass);
        // and the bracket really is ξ
        let b = poisson_bracket(&f, &g).unwrap();
        assert_eq!(b.eval(&[rat_i(9)], &[rat_i(4)]).unwrap(), rat_i(4));
    }
}
