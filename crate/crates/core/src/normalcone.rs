//! The 0-conormal cone of a closed polyhedral set, through its equivalent
//! characterizations, plus the derived operations (embedding transport,
//! openness, minimum principle, proper-cone probe).
//!
//! The exact descriptor produced by [`conormal0`] decomposes the set into
//! relatively open arrangement cells on which the tangent cone is constant;
//! the fiber over a cell is the polar of that tangent cone, and closures
//! are taken piecewise (closed base × closed fiber cone).

use crate::cone::ConvexCone;
use crate::conic::{ConicPiece, ConicSubset, CotangentPoint};
use crate::error::{Error, Result};
use crate::feas::{LinCon, LinSystem};
use crate::linalg;
use crate::polyhedron::{ConvexPolyhedron, Halfspace};
use crate::project::{self, nearest_point};
use crate::pset::{tangent_cone, PolyhedralSet};
use crate::rat::{self, dot, norm_sq, QVec, Rat};
use crate::symplectic::expr::ScalarField;
use num::{BigInt, One, Signed, Zero};
use serde::{Deserialize, Serialize};

/// Exact decision of the tangent-cone characterization: does every piece
/// of the tangent cone of `S` at `x` lie in `{v : ⟨v, ξ⟩ ≥ 0}`?
///
/// Points passing this test (with `x ∈ S`) are pre-closure members of the
/// 0-conormal cone.
pub fn conormal0_halfspace_test(s: &PolyhedralSet, x: &[Rat], xi: &[Rat]) -> Result<bool> {
    if xi.len() != s.dim {
        return Err(Error::DimensionMismatch { expected: s.dim, got: xi.len() });
    }
    let tc = tangent_cone(s, x)?;
    Ok(tc.within_halfspace(xi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BallTestMode {
    /// Rational squared-distance comparisons; the default.
    Exact,
    /// Same distances compared in floating point (reporting-grade only).
    Floating,
}

/// Parameters of the exterior-ball test.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BallTestParams {
    /// Strictly decreasing positive radii scales to try.
    #[serde(with = "rat::q_vec")]
    pub t_grid: Vec<Rat>,
    pub mode: BallTestMode,
    /// When the grid is exhausted without a hit, certify with the exact
    /// tangent-cone test instead of reporting a (possibly false) negative.
    #[serde(default)]
    pub strict: bool,
}

impl Default for BallTestParams {
    fn default() -> Self {
        let mut t_grid = Vec::new();
        let mut t = rat::rat(1, 2);
        for _ in 0..20 {
            t_grid.push(t.clone());
            t /= rat::rat_i(2);
        }
        BallTestParams { t_grid, mode: BallTestMode::Exact, strict: false }
    }
}

impl BallTestParams {
    pub fn validate(&self) -> Result<()> {
        for w in self.t_grid.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::ParameterInconsistency("t_grid must be strictly decreasing".into()));
            }
        }
        if self.t_grid.iter().any(|t| !t.is_positive()) {
            return Err(Error::ParameterInconsistency("t_grid entries must be positive".into()));
        }
        Ok(())
    }
}

/// Exterior-ball characterization: true iff for some `t` in the grid the
/// open ball `B_{t‖ξ‖}(x − tξ)` misses `S`. `ξ = 0` is vacuously true.
pub fn conormal0_ball_test(
    s: &PolyhedralSet,
    x: &[Rat],
    xi: &[Rat],
    params: &BallTestParams,
) -> Result<bool> {
    params.validate()?;
    if xi.len() != s.dim {
        return Err(Error::DimensionMismatch { expected: s.dim, got: xi.len() });
    }
    if !s.member(x) {
        return Err(Error::PointNotInSet);
    }
    if rat::vec_is_zero(xi) {
        return Ok(true);
    }
    let xi_sq = norm_sq(xi);
    // Small radii first: near a face the exterior ball exists at every
    // sufficiently small scale, so positives exit quickly.
    for t in params.t_grid.iter().rev() {
        let center = rat::vec_sub(x, &rat::vec_scale(t, xi));
        let r_sq = t * t * &xi_sq;
        let mut missed = true;
        for p in &s.pieces {
            if p.is_empty() {
                continue;
            }
            if p.member(&center) {
                missed = false;
                break;
            }
            // Each violated constraint gives a lower bound on the squared
            // distance; when one already clears the radius, skip the QP.
            let mut cleared = false;
            for h in &p.halfspaces {
                let violation = &h.offset - dot(&h.normal, &center);
                if violation.is_positive() {
                    let nn = norm_sq(&h.normal);
                    if !nn.is_zero() && &violation * &violation >= &r_sq * &nn {
                        cleared = true;
                        break;
                    }
                }
            }
            if cleared {
                continue;
            }
            let proj = nearest_point(&center, p)?;
            let hit = match params.mode {
                BallTestMode::Exact => proj.dist_sq < r_sq,
                BallTestMode::Floating => rat::rat_to_f64(&proj.dist_sq) < rat::rat_to_f64(&r_sq),
            };
            if hit {
                missed = false;
                break;
            }
        }
        if missed {
            return Ok(true);
        }
    }
    if params.strict {
        // Grid exhaustion is the only source of false negatives; certify.
        return conormal0_halfspace_test(s, x, xi);
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// arrangement cells and the exact descriptor

/// An oriented hyperplane in canonical (primitive, sign-fixed) form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct CanonHyperplane {
    normal: Vec<BigInt>,
    offset: Rat,
}

struct PieceConstraint {
    hyperplane: usize,
    /// +1 when the piece requires `⟨prim, x⟩ ≥ b`, −1 for `≤`.
    orient: i8,
}

struct PieceInfo {
    cons: Vec<PieceConstraint>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CellSign {
    Zero,
    Pos,
    Neg,
}

/// Canonicalize the half-space `⟨a, x⟩ ≥ b`. Returns the hyperplane and
/// the orientation of the constraint relative to it, or `None` when the
/// normal is zero (constant constraint).
fn canonicalize(a: &[Rat], b: &Rat) -> Option<(CanonHyperplane, i8)> {
    let prim = rat::primitive(a, true)?;
    let idx = a.iter().position(|v| !v.is_zero()).unwrap();
    let scale = &a[idx] / Rat::from_integer(prim[idx].clone());
    let offset = b / &scale;
    let orient = if scale.is_positive() { 1 } else { -1 };
    Some((CanonHyperplane { normal: prim, offset }, orient))
}

struct Arrangement {
    dim: usize,
    hyperplanes: Vec<CanonHyperplane>,
    pieces: Vec<PieceInfo>,
}

impl Arrangement {
    fn build(s: &PolyhedralSet) -> Result<Arrangement> {
        let mut hyperplanes: Vec<CanonHyperplane> = Vec::new();
        let mut pieces = Vec::new();
        for p in &s.pieces {
            if p.is_empty() {
                continue;
            }
            let mut cons = Vec::new();
            for h in &p.halfspaces {
                match canonicalize(&h.normal, &h.offset) {
                    Some((hp, orient)) => {
                        let idx = match hyperplanes.iter().position(|q| *q == hp) {
                            Some(i) => i,
                            None => {
                                hyperplanes.push(hp);
                                hyperplanes.len() - 1
                            }
                        };
                        cons.push(PieceConstraint { hyperplane: idx, orient });
                    }
                    None => {
                        // zero normal: `0 ≥ b` holds (the piece is
                        // nonempty), so the constraint is vacuous
                        debug_assert!(!h.offset.is_positive());
                    }
                }
            }
            pieces.push(PieceInfo { cons });
        }
        Ok(Arrangement { dim: s.dim, hyperplanes, pieces })
    }

    fn normal_vec(&self, i: usize) -> QVec {
        self.hyperplanes[i].normal.iter().map(|v| Rat::from_integer(v.clone())).collect()
    }

    /// Visit every nonempty relatively open sign cell.
    fn for_each_cell(&self, f: &mut impl FnMut(&[CellSign])) {
        let mut signs: Vec<CellSign> = Vec::with_capacity(self.hyperplanes.len());
        let mut sys = LinSystem::new(self.dim);
        self.recurse(&mut signs, &mut sys, f);
    }

    fn recurse(
        &self,
        signs: &mut Vec<CellSign>,
        sys: &mut LinSystem,
        f: &mut impl FnMut(&[CellSign]),
    ) {
        if signs.len() == self.hyperplanes.len() {
            f(signs);
            return;
        }
        let i = signs.len();
        let n = self.normal_vec(i);
        let b = self.hyperplanes[i].offset.clone();
        let branches: [(CellSign, Vec<LinCon>); 3] = [
            (CellSign::Zero, vec![
                LinCon::ge(n.clone(), b.clone()),
                LinCon::ge(rat::vec_neg(&n), -b.clone()),
            ]),
            (CellSign::Pos, vec![LinCon::gt(n.clone(), b.clone())]),
            (CellSign::Neg, vec![LinCon::gt(rat::vec_neg(&n), -b.clone())]),
        ];
        for (sign, cons) in branches {
            let saved = sys.cons.len();
            for c in cons {
                sys.push(c);
            }
            if sys.is_feasible() {
                signs.push(sign);
                self.recurse(signs, sys, f);
                signs.pop();
            }
            sys.cons.truncate(saved);
        }
    }

    fn piece_contains_cell(&self, piece: &PieceInfo, signs: &[CellSign]) -> bool {
        piece.cons.iter().all(|c| match signs[c.hyperplane] {
            CellSign::Zero => true,
            CellSign::Pos => c.orient > 0,
            CellSign::Neg => c.orient < 0,
        })
    }

    /// Tangent cone of one piece on a cell it contains: active constraints
    /// in their original orientation.
    fn piece_tangent_cone(&self, piece: &PieceInfo, signs: &[CellSign]) -> ConvexCone {
        let normals: Vec<QVec> = piece
            .cons
            .iter()
            .filter(|c| signs[c.hyperplane] == CellSign::Zero)
            .map(|c| {
                let v = self.normal_vec(c.hyperplane);
                if c.orient > 0 {
                    v
                } else {
                    rat::vec_neg(&v)
                }
            })
            .collect();
        ConvexCone::new(self.dim, normals).expect("dimension is fixed")
    }

    /// Closure of a cell as an H-polyhedron.
    fn cell_closure(&self, signs: &[CellSign]) -> ConvexPolyhedron {
        let mut hs = Vec::new();
        for (i, sign) in signs.iter().enumerate() {
            let n = self.normal_vec(i);
            let b = self.hyperplanes[i].offset.clone();
            match sign {
                CellSign::Zero => {
                    hs.push(Halfspace::new(n.clone(), b.clone()));
                    hs.push(Halfspace::new(rat::vec_neg(&n), -b));
                }
                CellSign::Pos => hs.push(Halfspace::new(n, b)),
                CellSign::Neg => hs.push(Halfspace::new(rat::vec_neg(&n), -b)),
            }
        }
        ConvexPolyhedron::new(self.dim, hs).expect("dimension is fixed")
    }
}

/// The 0-conormal cone of a closed polyhedral set, as an exact conic
/// descriptor: the closure of `∪_{x∈S} {x} × (tangent cone at x)°`.
///
/// The base projection of the result is `S` and it contains the zero
/// section over `S` (every fiber cone contains the origin).
pub fn conormal0(s: &PolyhedralSet) -> Result<ConicSubset> {
    type PieceKey = (Vec<(Vec<BigInt>, Rat)>, Vec<Vec<BigInt>>);
    let arr = Arrangement::build(s)?;
    let mut pieces: Vec<ConicPiece> = Vec::new();
    let mut seen: Vec<PieceKey> = Vec::new();
    let mut visit = |signs: &[CellSign]| {
        let containing: Vec<&PieceInfo> =
            arr.pieces.iter().filter(|p| arr.piece_contains_cell(p, signs)).collect();
        if containing.is_empty() {
            return;
        }
        let mut fiber = arr.piece_tangent_cone(containing[0], signs).polar();
        for p in &containing[1..] {
            fiber = fiber.intersect(&arr.piece_tangent_cone(p, signs).polar());
        }
        let base = arr.cell_closure(signs);
        let key = (base.canonical_key(), fiber.canonical_key());
        if seen.contains(&key) {
            return;
        }
        seen.push(key);
        pieces.push(ConicPiece { base, fiber });
    };
    arr.for_each_cell(&mut visit);
    Ok(ConicSubset::exact(s.dim, pieces)?.pruned())
}

// ---------------------------------------------------------------------------
// affine embeddings

/// Affine map `x ↦ Lx + c` from `R^from_dim` to `R^to_dim`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineMap {
    pub from_dim: usize,
    pub to_dim: usize,
    /// Rows of `L` (length `from_dim` each, `to_dim` rows).
    #[serde(with = "rat::q_mat")]
    pub linear: Vec<QVec>,
    #[serde(with = "rat::q_vec")]
    pub translation: QVec,
}

impl AffineMap {
    pub fn identity(dim: usize) -> Self {
        AffineMap {
            from_dim: dim,
            to_dim: dim,
            linear: (0..dim).map(|i| rat::unit(dim, i)).collect(),
            translation: rat::zeros(dim),
        }
    }

    pub fn apply(&self, x: &[Rat]) -> QVec {
        let mut y = self.translation.clone();
        for (i, row) in self.linear.iter().enumerate() {
            y[i] += dot(row, x);
        }
        y
    }

    pub fn is_injective(&self) -> bool {
        linalg::rank(&self.linear) == self.from_dim
    }

    /// Columns of `L` as rows (the transpose).
    fn columns(&self) -> Vec<QVec> {
        (0..self.from_dim)
            .map(|j| self.linear.iter().map(|row| row[j].clone()).collect())
            .collect()
    }

    /// Left inverse `(LᵀL)⁻¹Lᵀ`, rows of length `to_dim`.
    fn left_inverse(&self) -> Option<Vec<QVec>> {
        let cols = self.columns(); // rows of Lᵀ
        let m = self.from_dim;
        let gram: Vec<QVec> = (0..m)
            .map(|i| (0..m).map(|j| dot(&cols[i], &cols[j])).collect())
            .collect();
        let ginv = linalg::invert(&gram)?;
        // (LᵀL)⁻¹ Lᵀ: row i = Σ_j ginv[i][j] · colsᵀ... rows of Lᵀ are cols.
        Some(
            (0..m)
                .map(|i| {
                    let mut row = rat::zeros(self.to_dim);
                    for j in 0..m {
                        row = rat::vec_add(&row, &rat::vec_scale(&ginv[i][j], &cols[j]));
                    }
                    row
                })
                .collect(),
        )
    }

    /// H-representation of the image `f(P)` for injective `f`.
    pub fn image_polyhedron(&self, p: &ConvexPolyhedron) -> Result<ConvexPolyhedron> {
        if p.dim != self.from_dim {
            return Err(Error::DimensionMismatch { expected: self.from_dim, got: p.dim });
        }
        let left = self.left_inverse().ok_or(Error::NonInjective)?;
        let mut hs = Vec::new();
        // Image flat: ⟨k, y⟩ = ⟨k, c⟩ for k spanning the left null space.
        for k in linalg::kernel_basis(&self.columns(), self.to_dim) {
            let rhs = dot(&k, &self.translation);
            hs.push(Halfspace::new(k.clone(), rhs.clone()));
            hs.push(Halfspace::new(rat::vec_neg(&k), -rhs));
        }
        for h in &p.halfspaces {
            // ⟨a, L⁺(y − c)⟩ ≥ b  ⇔  ⟨(L⁺)ᵀa, y⟩ ≥ b + ⟨(L⁺)ᵀa, c⟩
            let mut normal = rat::zeros(self.to_dim);
            for (ai, lrow) in h.normal.iter().zip(left.iter()) {
                normal = rat::vec_add(&normal, &rat::vec_scale(ai, lrow));
            }
            let offset = &h.offset + dot(&normal, &self.translation);
            hs.push(Halfspace::new(normal, offset));
        }
        ConvexPolyhedron::new(self.to_dim, hs)
    }

    pub fn image_set(&self, s: &PolyhedralSet) -> Result<PolyhedralSet> {
        let pieces = s
            .pieces
            .iter()
            .filter(|p| !p.is_empty())
            .map(|p| self.image_polyhedron(p))
            .collect::<Result<Vec<_>>>()?;
        PolyhedralSet::new(self.to_dim, pieces)
    }
}

/// Transport of the 0-conormal cone along an affine closed embedding:
/// bases map forward, fibers pull back along the transpose of the linear
/// part. For a closed embedding this equals the directly computed
/// 0-conormal cone of the image.
pub fn embed_conormal(s: &PolyhedralSet, f: &AffineMap) -> Result<ConicSubset> {
    if s.dim != f.from_dim {
        return Err(Error::DimensionMismatch { expected: f.from_dim, got: s.dim });
    }
    if !f.is_injective() {
        return Err(Error::NonInjective);
    }
    let inner = conormal0(s)?;
    let cols = f.columns(); // rows of Lᵀ: Lᵀη has entries ⟨col_j, η⟩
    let mut pieces = Vec::new();
    for piece in &inner.pieces {
        let base = f.image_polyhedron(&piece.base)?;
        // {η : Lᵀη ∈ fiber}: each fiber normal g becomes ⟨Lg, η⟩ ≥ 0, and
        // Lg has entries ⟨row_i(L), g⟩ = ⟨g, col-wise⟩; build via columns.
        let normals: Vec<QVec> = piece
            .fiber
            .normals
            .iter()
            .map(|g| {
                let mut v = rat::zeros(f.to_dim);
                for (gj, col) in g.iter().zip(cols.iter()) {
                    v = rat::vec_add(&v, &rat::vec_scale(gj, col));
                }
                v
            })
            .collect();
        pieces.push(ConicPiece { base, fiber: ConvexCone::new(f.to_dim, normals)? });
    }
    Ok(ConicSubset::exact(f.to_dim, pieces)?.pruned())
}

/// True iff every fiber of the 0-conormal cone is `{0}`; for a closed
/// polyhedral subset of connected `R^n` this forces `S ∈ {∅, R^n}`.
pub fn openness_criterion(s: &PolyhedralSet) -> Result<bool> {
    let c = conormal0(s)?;
    Ok(c.pieces.iter().all(|p| p.fiber.is_zero_cone()))
}

// ---------------------------------------------------------------------------
// minimum principle

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum MinPrincipleVerdict {
    /// A minimizer below the threshold exists and its gradient lies in the
    /// 0-conormal cone, as the minimum principle demands.
    Confirmed {
        #[serde(with = "rat::q_vec")]
        minimizer: QVec,
        #[serde(with = "rat::q_vec")]
        gradient: QVec,
        min_value: f64,
        exact: bool,
    },
    /// The minimum over the window is ≥ the threshold: nothing to check.
    Vacuous { min_value: f64 },
    /// The gradient at the located minimizer failed exact membership.
    /// Unreachable when the minimizer is exact; kept for honest reporting
    /// of the grid fallback.
    Refuted {
        #[serde(with = "rat::q_vec")]
        minimizer: QVec,
        #[serde(with = "rat::q_vec")]
        gradient: QVec,
    },
}

/// Verify the contrapositive of the minimum principle on an instance:
/// locate the minimizer of `f` on `S` (within `window` when given) and
/// check `df(x*) ∈ N*₀(S)` exactly.
///
/// Affine and convex quadratic `f` are minimized exactly; anything else
/// falls back to a refining grid search (reported with `exact: false`).
pub fn min_principle_check(
    f: &ScalarField,
    s: &PolyhedralSet,
    c: &Rat,
    window: Option<&ConvexPolyhedron>,
) -> Result<MinPrincipleVerdict> {
    if f.uses_fiber() {
        return Err(Error::InvalidInput("minimum principle expects a field on the base only".into()));
    }
    if s.is_empty() {
        return Err(Error::InvalidInput("cannot minimize over the empty set".into()));
    }
    let region: Vec<ConvexPolyhedron> = s
        .pieces
        .iter()
        .filter(|p| !p.is_empty())
        .map(|p| match window {
            Some(w) => p.intersect(w),
            None => (*p).clone(),
        })
        .collect();

    let exact_form = f.as_polynomial().and_then(|poly| quadratic_form(&poly, s.dim));
    let (x_star, min_val, exact) = match exact_form {
        Some((q, b, c0)) if psd(&q) => {
            let minimize = |pieces: &[ConvexPolyhedron]| -> Result<(QVec, Rat)> {
                let mut best: Option<(QVec, Rat)> = None;
                for p in pieces {
                    if p.is_empty() {
                        continue;
                    }
                    match project::min_quadratic(&q, &b, p) {
                        Some((y, v)) => {
                            if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                                best = Some((y, v));
                            }
                        }
                        None => return Err(Error::UnboundedBelow),
                    }
                }
                best.ok_or(Error::InvalidInput("window misses the set".into()))
            };
            let (y, v) = minimize(&region)?;
            if let Some(w) = window {
                // A window-clipped minimum is not a minimum of f on S:
                // doubling the window must not improve the value.
                let bigger = enlarge_window(w);
                let wide: Vec<ConvexPolyhedron> = s
                    .pieces
                    .iter()
                    .filter(|p| !p.is_empty())
                    .map(|p| p.intersect(&bigger))
                    .collect();
                let (_, v_wide) = minimize(&wide)?;
                if v_wide < v {
                    return Err(Error::UnboundedBelow);
                }
            }
            (y, v + c0, true)
        }
        _ => grid_minimize(f, &region)?,
    };

    if &min_val >= c {
        return Ok(MinPrincipleVerdict::Vacuous { min_value: rat::rat_to_f64(&min_val) });
    }
    let (grad, _) = f.gradient(&x_star, &rat::zeros(s.dim))?;
    let cone = conormal0(s)?;
    let p = CotangentPoint::new(x_star.clone(), grad.clone())?;
    if cone.member_exact(&p)? {
        Ok(MinPrincipleVerdict::Confirmed {
            minimizer: x_star,
            gradient: grad,
            min_value: rat::rat_to_f64(&min_val),
            exact,
        })
    } else {
        Ok(MinPrincipleVerdict::Refuted { minimizer: x_star, gradient: grad })
    }
}

/// Loosen every window constraint by its own magnitude plus one.
fn enlarge_window(w: &ConvexPolyhedron) -> ConvexPolyhedron {
    let halfspaces = w
        .halfspaces
        .iter()
        .map(|h| {
            let slack = h.offset.abs() + Rat::one();
            Halfspace::new(h.normal.clone(), &h.offset - slack)
        })
        .collect();
    ConvexPolyhedron::new(w.dim, halfspaces).expect("same dimension")
}

/// Extract `(Q, b, c)` with `f = ½xᵀQx + bᵀx + c` from a polynomial of
/// degree ≤ 2 in the base variables.
fn quadratic_form(poly: &crate::symplectic::expr::Poly, dim: usize) -> Option<(Vec<QVec>, QVec, Rat)> {
    let mut q = vec![rat::zeros(dim); dim];
    let mut b = rat::zeros(dim);
    let mut c = Rat::zero();
    for (mono, coeff) in poly {
        if mono[dim..].iter().any(|&e| e != 0) {
            return None; // fiber variable present
        }
        let support: Vec<(usize, u32)> =
            mono[..dim].iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect();
        let degree: u32 = support.iter().map(|(_, e)| e).sum();
        match degree {
            0 => c = coeff.clone(),
            1 => b[support[0].0] = coeff.clone(),
            2 => {
                if support.len() == 1 {
                    let i = support[0].0;
                    q[i][i] = coeff * rat::rat_i(2);
                } else {
                    let (i, j) = (support[0].0, support[1].0);
                    q[i][j] = coeff.clone();
                    q[j][i] = coeff.clone();
                }
            }
            _ => return None,
        }
    }
    Some((q, b, c))
}

/// Positive semidefiniteness via nonnegativity of all principal minors.
fn psd(q: &[QVec]) -> bool {
    let n = q.len();
    for mask in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<QVec> =
            idx.iter().map(|&i| idx.iter().map(|&j| q[i][j].clone()).collect()).collect();
        if linalg::det(&sub).is_negative() {
            return false;
        }
    }
    true
}

/// Refining grid search over the pieces (floating comparisons for the
/// search, exact evaluation at the final rational point).
fn grid_minimize(f: &ScalarField, region: &[ConvexPolyhedron]) -> Result<(QVec, Rat, bool)> {
    let dim = f.dim;
    let fiber = rat::zeros(dim);
    let mut best: Option<(QVec, Rat)> = None;
    for p in region {
        if p.is_empty() {
            continue;
        }
        let vertices = p.vertices();
        if vertices.is_empty() {
            return Err(Error::UnboundedBelow);
        }
        let mut lo = vertices[0].clone();
        let mut hi = vertices[0].clone();
        for v in &vertices {
            for i in 0..dim {
                if v[i] < lo[i] {
                    lo[i] = v[i].clone();
                }
                if v[i] > hi[i] {
                    hi[i] = v[i].clone();
                }
            }
        }
        let steps = 16i64;
        let mut center = rat::vec_scale(&rat::rat(1, 2), &rat::vec_add(&lo, &hi));
        let mut radius: Rat = (0..dim)
            .map(|i| &hi[i] - &lo[i])
            .max()
            .unwrap_or_else(Rat::one)
            / rat::rat_i(2);
        for _round in 0..6 {
            let mut local_best: Option<(QVec, Rat)> = None;
            let mut idx = vec![0i64; dim];
            loop {
                let pt: QVec = (0..dim)
                    .map(|i| &center[i] + &radius * rat::rat(idx[i] - steps / 2, steps / 2))
                    .collect();
                if p.member(&pt) {
                    if let Ok(v) = f.eval(&pt, &fiber) {
                        if local_best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                            local_best = Some((pt, v));
                        }
                    }
                }
                // odometer
                let mut k = 0;
                loop {
                    if k == dim {
                        break;
                    }
                    idx[k] += 1;
                    if idx[k] <= steps {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
                if k == dim {
                    break;
                }
            }
            if let Some((pt, _)) = &local_best {
                center = pt.clone();
            }
            radius /= rat::rat_i(4);
            if let Some(lb) = local_best {
                if best.as_ref().is_none_or(|(_, bv)| lb.1 < *bv) {
                    best = Some(lb);
                }
            }
        }
    }
    let (x, v) = best.ok_or(Error::InvalidInput("no feasible grid point".into()))?;
    Ok((x, v, false))
}

// ---------------------------------------------------------------------------
// proper-cone probe

/// Search for a conormal witness with covector interior to the polar of a
/// proper cone. Returns `None` when `S = ∅` (the emptiness alternative).
pub fn proper_cone_probe(s: &PolyhedralSet, gamma: &ConvexCone) -> Result<Option<CotangentPoint>> {
    if !gamma.is_proper() {
        return Err(Error::NotProper("probe requires a proper cone".into()));
    }
    if s.is_empty() {
        return Ok(None);
    }
    if !s.is_bounded() {
        return Err(Error::Unbounded);
    }
    let polar = gamma.polar();
    let v_star = polar
        .interior_witness()
        .ok_or_else(|| Error::NotProper("polar has empty interior".into()))?;
    // Minimize ⟨v*, x⟩ over S; the minimizer carries v* in its fiber.
    let zero_q: Vec<QVec> = vec![rat::zeros(s.dim); s.dim];
    let mut best: Option<(QVec, Rat)> = None;
    for p in &s.pieces {
        if p.is_empty() {
            continue;
        }
        if let Some((y, v)) = project::min_quadratic(&zero_q, &v_star, p) {
            if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                best = Some((y, v));
            }
        }
    }
    let (x_star, _) = best.expect("nonempty bounded set has a minimizer");
    let witness = CotangentPoint::new(x_star, v_star)?;
    let cone = conormal0(s)?;
    if !cone.member_exact(&witness)? {
        return Err(Error::HypothesisViolated(
            "support minimizer gradient escaped the 0-conormal cone".into(),
        ));
    }
    Ok(Some(witness))
}
