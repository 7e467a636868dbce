//! Independent local-cohomology oracle for constant sheaves on locally
//! closed polyhedral sets in dimension ≤ 2.
//!
//! Supported-section ranks `H^j_{{φ≥0}}(k_S)_x` are computed from the
//! homotopy fiber of the restriction map between two cellwise section
//! complexes: the window complex of `S` and its part on `{φ ≤ −η}`, with
//! the shift `η` placed exactly below the smallest positive breach of `φ`
//! over the arrangement vertices. Germ stabilization over shrinking radii
//! replaces the colimit; for the conic local models used by the
//! truncated-microsupport test the window is scale-invariant and a single
//! evaluation is exact.

pub mod complex;

use crate::cone::ConvexCone;
use crate::conic::CotangentPoint;
use crate::error::{Error, Result};
use crate::polyhedron::ConvexPolyhedron;
use crate::pset::{LocallyClosedPolyhedralSet, PolyhedralSet};
use crate::rat::{self, dot, QVec, Rat};
use crate::symplectic::expr::ScalarField;
use complex::{build_1d, build_2d, critical_shift, rational_ball_window, CellComplex, Line};
use num::{BigInt, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;

/// Finitely supported cohomology ranks by degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyRanks {
    pub ranks: BTreeMap<i64, usize>,
}

impl CohomologyRanks {
    pub fn from_degrees(start: i64, ranks: &[usize]) -> Self {
        let mut map = BTreeMap::new();
        for (i, &r) in ranks.iter().enumerate() {
            if r != 0 {
                map.insert(start + i as i64, r);
            }
        }
        CohomologyRanks { ranks: map }
    }

    pub fn rank(&self, degree: i64) -> usize {
        self.ranks.get(&degree).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn nonzero_at_or_below(&self, k: i64) -> Option<i64> {
        self.ranks.keys().copied().find(|&d| d <= k)
    }

    pub fn euler(&self) -> i64 {
        self.ranks
            .iter()
            .map(|(&d, &r)| if d.rem_euclid(2) == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }
}

// ---------------------------------------------------------------------------
// pair cohomology

/// Ranks of the relative cellwise complex of a pair `B ⊆ A` of bounded
/// cellular sets (cells of `A` not in `B`, ambient coboundary). For
/// closed `A` and `B` this is the singular cohomology of the pair; the
/// degree-0 rank of `(A, ∅)` counts connected components.
pub fn pair_cohomology(
    a: &LocallyClosedPolyhedralSet,
    b: &LocallyClosedPolyhedralSet,
) -> Result<CohomologyRanks> {
    let dim = a.dim();
    if b.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: b.dim() });
    }
    if !(1..=2).contains(&dim) {
        return Err(Error::InvalidInput("pair cohomology supports dimensions 1 and 2".into()));
    }
    if !b.subset_of(a) {
        return Err(Error::InvalidInput("second member of the pair must lie in the first".into()));
    }
    if !a.closure.is_bounded() || !b.closure.is_bounded() {
        return Err(Error::InvalidInput("pair cohomology expects bounded input".into()));
    }
    let cx = complex_for_sets(dim, &[a, b], None)?;
    let in_rel: Vec<bool> = cx
        .cells
        .iter()
        .map(|c| a.member(&c.witness) && !b.member(&c.witness))
        .collect();
    Ok(CohomologyRanks::from_degrees(0, &cx.ranks(&in_rel)))
}

/// Cohomology ranks of the extension by zero of the constant sheaf on a
/// bounded locally closed cellular set: the direct cell-model route,
/// equal to the relative ranks of the pair `(S̄, S̄∖S)`.
pub fn extension_by_zero_ranks(s: &LocallyClosedPolyhedralSet) -> Result<CohomologyRanks> {
    let dim = s.dim();
    if !(1..=2).contains(&dim) {
        return Err(Error::InvalidInput("cell models support dimensions 1 and 2".into()));
    }
    if !s.closure.is_bounded() {
        return Err(Error::InvalidInput("cell models expect bounded input".into()));
    }
    let cx = complex_for_sets(dim, &[s], None)?;
    let in_set: Vec<bool> = cx.cells.iter().map(|c| s.member(&c.witness)).collect();
    Ok(CohomologyRanks::from_degrees(0, &cx.ranks(&in_set)))
}

/// Arrangement complex refining the constraint hyperplanes of the given
/// sets, within either the provided window or an automatic bounding box.
fn complex_for_sets(
    dim: usize,
    sets: &[&LocallyClosedPolyhedralSet],
    window: Option<&ConvexPolyhedron>,
) -> Result<CellComplex> {
    let mut polys: Vec<&ConvexPolyhedron> = Vec::new();
    for s in sets {
        polys.extend(s.closure.pieces.iter());
        polys.extend(s.removed.pieces.iter());
    }
    let auto_window;
    let window = match window {
        Some(w) => w,
        None => {
            let mut lo = rat::rat_i(-1);
            let mut hi = rat::rat_i(1);
            for p in &polys {
                for v in p.vertices() {
                    for c in &v {
                        if *c < lo {
                            lo = c.clone();
                        }
                        if *c > hi {
                            hi = c.clone();
                        }
                    }
                }
            }
            auto_window = ConvexPolyhedron::box_window(
                dim,
                lo - rat::rat_i(1),
                hi + rat::rat_i(1),
            );
            &auto_window
        }
    };
    if dim == 1 {
        let mut breakpoints = Vec::new();
        for p in &polys {
            for h in &p.halfspaces {
                if !h.normal[0].is_zero() {
                    breakpoints.push(&h.offset / &h.normal[0]);
                }
            }
        }
        let (lo, hi) = window_interval(window)?;
        build_1d(&breakpoints, &lo, &hi)
    } else {
        let mut lines = Vec::new();
        for p in &polys {
            for h in &p.halfspaces {
                if let Some(l) = Line::canonical(&h.normal, &h.offset) {
                    lines.push(l);
                }
            }
        }
        build_2d(&lines, window)
    }
}

fn window_interval(window: &ConvexPolyhedron) -> Result<(Rat, Rat)> {
    let mut lo: Option<Rat> = None;
    let mut hi: Option<Rat> = None;
    for h in &window.halfspaces {
        let a = &h.normal[0];
        if a.is_zero() {
            continue;
        }
        let bound = &h.offset / a;
        if a.is_positive() {
            if lo.as_ref().is_none_or(|l| bound > *l) {
                lo = Some(bound);
            }
        } else if hi.as_ref().is_none_or(|h0| bound < *h0) {
            hi = Some(bound);
        }
    }
    match (lo, hi) {
        (Some(l), Some(h)) if l < h => Ok((l, h)),
        _ => Err(Error::InvalidInput("window must be a bounded interval".into())),
    }
}

// ---------------------------------------------------------------------------
// local cohomology

/// `H^j_{{φ≥0}}(k_S)_x` for affine `φ` with `φ(x) = 0`, via the exact
/// triangle for the restriction away from `{φ ≥ 0}`. Ranks are accepted
/// only when radii `eps` and `eps2` agree; otherwise the pair shrinks
/// (three retries) before reporting instability.
pub fn local_cohomology(
    s: &LocallyClosedPolyhedralSet,
    x: &[Rat],
    phi: &ScalarField,
    eps: &Rat,
    eps2: &Rat,
) -> Result<CohomologyRanks> {
    let dim = s.dim();
    if !(1..=2).contains(&dim) {
        return Err(Error::InvalidInput("local cohomology supports dimensions 1 and 2".into()));
    }
    if x.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x.len() });
    }
    let w = affine_gradient(phi, dim)?;
    if !phi.eval(x, &rat::zeros(dim))?.is_zero() {
        return Err(Error::InvalidInput("test function must vanish at the base point".into()));
    }
    if !s.closure.member(x) {
        // The germ of k_S away from the closure vanishes identically.
        return Ok(CohomologyRanks::default());
    }
    if !(eps2 < eps && eps2.is_positive()) {
        return Err(Error::ParameterInconsistency("radii must satisfy 0 < eps2 < eps".into()));
    }
    let mut r1 = eps.clone();
    let mut r2 = eps2.clone();
    for _ in 0..3 {
        let a = local_cohomology_at_radius(s, x, &w, &r1)?;
        let b = local_cohomology_at_radius(s, x, &w, &r2)?;
        if a == b {
            return Ok(a);
        }
        r1 = &r2 / rat::rat_i(2);
        r2 = &r1 / rat::rat_i(4);
    }
    Err(Error::Unstable)
}

/// Constant gradient of an affine field on the base, or an error.
fn affine_gradient(phi: &ScalarField, dim: usize) -> Result<QVec> {
    if phi.uses_fiber() {
        return Err(Error::InvalidInput("test function must depend on the base only".into()));
    }
    let poly = phi
        .as_polynomial()
        .ok_or_else(|| Error::InvalidInput("test function must be affine".into()))?;
    let mut w = rat::zeros(dim);
    for (mono, coeff) in &poly {
        let degree: u32 = mono.iter().sum();
        match degree {
            0 => {}
            1 => {
                let i = mono.iter().position(|&e| e == 1).unwrap();
                if i >= dim {
                    return Err(Error::InvalidInput("test function must depend on the base only".into()));
                }
                w[i] = coeff.clone();
            }
            _ => return Err(Error::InvalidInput("test function must be affine".into())),
        }
    }
    Ok(w)
}

/// The exact triangle data at one radius: supported ranks `H•_Z`, window
/// ranks `RΓ(B; k_S)`, and restricted ranks `RΓ(B∖Z; k_S)`. Exposed so
/// the Euler-characteristic consistency of the long exact sequence can be
/// checked on every computed instance.
pub fn local_cohomology_triangle(
    s: &LocallyClosedPolyhedralSet,
    x: &[Rat],
    phi: &ScalarField,
    r: &Rat,
) -> Result<(CohomologyRanks, CohomologyRanks, CohomologyRanks)> {
    let dim = s.dim();
    let w = affine_gradient(phi, dim)?;
    if !phi.eval(x, &rat::zeros(dim))?.is_zero() {
        return Err(Error::InvalidInput("test function must vanish at the base point".into()));
    }
    let (cx, eta) = triangle_complex(s, x, &w, r)?;
    let m1: Vec<bool> = cx.cells.iter().map(|c| s.member(&c.witness)).collect();
    let phi_at = |y: &[Rat]| -> Rat { dot(&w, y) - dot(&w, x) };
    let m2: Vec<bool> = match &eta {
        None => vec![false; cx.cells.len()],
        Some(eta) => cx
            .cells
            .iter()
            .zip(m1.iter())
            .map(|(c, &inside)| inside && phi_at(&c.witness) <= -eta.clone())
            .collect(),
    };
    let supported = CohomologyRanks::from_degrees(0, &cx.fiber_ranks(&m1, &m2));
    let window = CohomologyRanks::from_degrees(0, &cx.ranks(&m1));
    let restricted = CohomologyRanks::from_degrees(0, &cx.ranks(&m2));
    Ok((supported, window, restricted))
}

/// Arrangement complex (with the shift line placed) for the triangle at
/// one radius, plus the chosen shift.
fn triangle_complex(
    s: &LocallyClosedPolyhedralSet,
    x: &[Rat],
    w: &[Rat],
    r: &Rat,
) -> Result<(CellComplex, Option<Rat>)> {
    let dim = s.dim();
    let phi_at = |y: &[Rat]| -> Rat { dot(w, y) - dot(w, x) };
    if dim == 1 {
        let lo = &x[0] - r;
        let hi = &x[0] + r;
        let mut breakpoints = Vec::new();
        for p in s.closure.pieces.iter().chain(s.removed.pieces.iter()) {
            for h in &p.halfspaces {
                if !h.normal[0].is_zero() {
                    breakpoints.push(&h.offset / &h.normal[0]);
                }
            }
        }
        if !w[0].is_zero() {
            breakpoints.push(x[0].clone());
        }
        let prelim = build_1d(&breakpoints, &lo, &hi)?;
        let eta = shift_for(&prelim, &phi_at, w);
        if let Some(eta) = &eta {
            breakpoints.push(&x[0] - eta / &w[0]);
        }
        Ok((build_1d(&breakpoints, &lo, &hi)?, eta))
    } else {
        let window = rational_ball_window(x, r);
        let mut lines = Vec::new();
        for p in s.closure.pieces.iter().chain(s.removed.pieces.iter()) {
            for h in &p.halfspaces {
                if let Some(l) = Line::canonical(&h.normal, &h.offset) {
                    lines.push(l);
                }
            }
        }
        if let Some(l) = Line::canonical(w, &dot(w, x)) {
            lines.push(l);
        }
        let prelim = build_2d(&lines, &window)?;
        let eta = shift_for(&prelim, &phi_at, w);
        if let Some(eta) = &eta {
            if let Some(l) = Line::canonical(w, &(dot(w, x) - eta)) {
                lines.push(l);
            }
        }
        Ok((build_2d(&lines, &window)?, eta))
    }
}

fn local_cohomology_at_radius(
    s: &LocallyClosedPolyhedralSet,
    x: &[Rat],
    w: &[Rat],
    r: &Rat,
) -> Result<CohomologyRanks> {
    let phi_at = |y: &[Rat]| -> Rat { dot(w, y) - dot(w, x) };
    let (cx, eta) = triangle_complex(s, x, w, r)?;
    Ok(ranks_from_complex(&cx, |y| s.member(y), &phi_at, eta))
}

/// Exact placement of the level shift: half the smallest positive breach
/// of `φ` over the arrangement vertices (`None` when `φ ≥ 0` everywhere
/// or `φ ≡ 0`).
fn shift_for(prelim: &CellComplex, phi_at: &impl Fn(&[Rat]) -> Rat, w: &[Rat]) -> Option<Rat> {
    if rat::vec_is_zero(w) {
        return None;
    }
    let values: Vec<Rat> = prelim
        .cells
        .iter()
        .filter(|c| c.dim == 0)
        .map(|c| phi_at(&c.witness))
        .collect();
    critical_shift(&values)
}

fn ranks_from_complex(
    cx: &CellComplex,
    member: impl Fn(&[Rat]) -> bool,
    phi_at: &impl Fn(&[Rat]) -> Rat,
    eta: Option<Rat>,
) -> CohomologyRanks {
    let m1: Vec<bool> = cx.cells.iter().map(|c| member(&c.witness)).collect();
    let m2: Vec<bool> = match &eta {
        None => vec![false; cx.cells.len()],
        Some(eta) => cx
            .cells
            .iter()
            .zip(m1.iter())
            .map(|(c, &inside)| inside && phi_at(&c.witness) <= -eta.clone())
            .collect(),
    };
    CohomologyRanks::from_degrees(0, &cx.fiber_ranks(&m1, &m2))
}

// ---------------------------------------------------------------------------
// truncated-microsupport membership test

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ProbeStatus {
    /// Evidence of non-propagation at or below the truncation degree:
    /// some local stratum and nearby codirection has nonzero ranks.
    In { degree: i64 },
    Out,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProbeResult {
    pub point: CotangentPoint,
    #[serde(flatten)]
    pub status: ProbeStatus,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MembershipMap {
    pub k: i64,
    pub results: Vec<ProbeResult>,
}

impl MembershipMap {
    pub fn is_in(&self, idx: usize) -> bool {
        matches!(self.results[idx].status, ProbeStatus::In { .. })
    }
}

type ModelKey = (Vec<Vec<Vec<BigInt>>>, Vec<Vec<Vec<BigInt>>>, Vec<BigInt>);

/// Membership engine for `SS_k(k_S)` on locally closed polyhedral `S` in
/// dimension ≤ 2.
///
/// Every query reduces to exact conic local models: the germ of `S` at a
/// base point is a union of tangent cones, nearby strata are the sign
/// cells of the active hyperplanes, and the conic-neighborhood quantifier
/// over codirections is resolved by the finitely many wall directions of
/// each model. Ranks of each (model, codirection) pair are computed once
/// on a fixed window — scale invariance of conic data makes one radius
/// exact — and cached.
pub struct SskOracle<'a> {
    s: &'a LocallyClosedPolyhedralSet,
    cache: Mutex<HashMap<ModelKey, Vec<usize>>>,
}

impl<'a> SskOracle<'a> {
    pub fn new(s: &'a LocallyClosedPolyhedralSet) -> Result<Self> {
        if !(1..=2).contains(&s.dim()) {
            return Err(Error::InvalidInput("oracle supports dimensions 1 and 2".into()));
        }
        Ok(SskOracle { s, cache: Mutex::new(HashMap::new()) })
    }

    /// Decide `(x; ξ) ∈ SS_k(k_S)`, exactly, together with the smallest
    /// witnessing degree.
    pub fn membership(&self, p: &CotangentPoint, k: i64) -> Result<Option<i64>> {
        let dim = self.s.dim();
        if p.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
        }
        if k < 0 {
            return Ok(None);
        }
        let x = &p.base;
        // Active local data at x: tangent cones of the closure and of the
        // removed part, as oriented normals of active constraints.
        let mut s_active: Vec<Vec<QVec>> = Vec::new();
        for piece in &self.s.closure.pieces {
            if piece.is_empty() || !piece.member(x) {
                continue;
            }
            s_active.push(
                piece
                    .active_set(x)
                    .into_iter()
                    .map(|i| piece.halfspaces[i].normal.clone())
                    .collect(),
            );
        }
        if s_active.is_empty() {
            return Ok(None); // germ of k_S vanishes off the closure
        }
        let mut t_active: Vec<Vec<QVec>> = Vec::new();
        for piece in &self.s.removed.pieces {
            if piece.is_empty() || !piece.member(x) {
                continue;
            }
            t_active.push(
                piece
                    .active_set(x)
                    .into_iter()
                    .map(|i| piece.halfspaces[i].normal.clone())
                    .collect(),
            );
        }
        // Local central hyperplanes: canonical normals with orientations.
        let mut hyperplanes: Vec<Vec<BigInt>> = Vec::new();
        let orient_of = |normal: &[Rat], hyperplanes: &mut Vec<Vec<BigInt>>| -> Option<(usize, i8)> {
            let prim = rat::primitive(normal, true)?;
            let idx = normal.iter().position(|v| !v.is_zero()).unwrap();
            let orient = if normal[idx].is_positive() == prim[idx].is_positive() { 1 } else { -1 };
            let pos = match hyperplanes.iter().position(|h| *h == prim) {
                Some(i) => i,
                None => {
                    hyperplanes.push(prim);
                    hyperplanes.len() - 1
                }
            };
            Some((pos, orient))
        };
        let index_piece = |active: &Vec<QVec>, hyperplanes: &mut Vec<Vec<BigInt>>| -> Vec<(usize, i8, QVec)> {
            active
                .iter()
                .filter_map(|a| orient_of(a, hyperplanes).map(|(h, o)| (h, o, a.clone())))
                .collect()
        };
        let s_indexed: Vec<Vec<(usize, i8, QVec)>> =
            s_active.iter().map(|a| index_piece(a, &mut hyperplanes)).collect();
        let t_indexed: Vec<Vec<(usize, i8, QVec)>> =
            t_active.iter().map(|a| index_piece(a, &mut hyperplanes)).collect();

        // Enumerate local direction cells (sign vectors of the active
        // hyperplanes) and test each induced model.
        let mut found: Option<i64> = None;
        let mut visit = |signs: &[i8]| -> Result<bool> {
            let surviving = |indexed: &[Vec<(usize, i8, QVec)>]| -> Vec<Vec<QVec>> {
                indexed
                    .iter()
                    .filter(|cons| cons.iter().all(|(h, o, _)| signs[*h] == 0 || signs[*h] == *o))
                    .map(|cons| {
                        cons.iter()
                            .filter(|(h, _, _)| signs[*h] == 0)
                            .map(|(_, _, a)| a.clone())
                            .collect()
                    })
                    .collect()
            };
            let model_s = surviving(&s_indexed);
            if model_s.is_empty() {
                return Ok(false);
            }
            let model_t = surviving(&t_indexed);
            if let Some(d) = self.model_evidence(dim, &model_s, &model_t, &p.fiber, k)? {
                found = Some(found.map_or(d, |f: i64| f.min(d)));
            }
            Ok(found.is_some())
        };
        enumerate_sign_cells(dim, &hyperplanes, &mut visit)?;
        Ok(found)
    }

    /// Evidence for one local model: ranks at the codirection itself and,
    /// when it sits on a wall of the model fan, in both adjacent sectors.
    fn model_evidence(
        &self,
        dim: usize,
        model_s: &[Vec<QVec>],
        model_t: &[Vec<QVec>],
        xi: &[Rat],
        k: i64,
    ) -> Result<Option<i64>> {
        let mut directions: Vec<QVec> = vec![xi.to_vec()];
        if dim == 2 && !rat::vec_is_zero(xi) {
            let walls: Vec<QVec> = model_s
                .iter()
                .chain(model_t.iter())
                .flatten()
                .cloned()
                .collect();
            let on_wall = walls
                .iter()
                .any(|a| (&xi[0] * &a[1] - &xi[1] * &a[0]).is_zero());
            if on_wall {
                let rot = vec![-xi[1].clone(), xi[0].clone()];
                for sign in [1i64, -1] {
                    let mut theta = rat::rat(1, 4);
                    'shrink: loop {
                        let rep = rat::vec_add(
                            xi,
                            &rat::vec_scale(&(rat::rat_i(sign) * &theta), &rot),
                        );
                        let mut ok = true;
                        for a in &walls {
                            let before = &xi[0] * &a[1] - &xi[1] * &a[0];
                            let after = &rep[0] * &a[1] - &rep[1] * &a[0];
                            if !before.is_zero() && before.is_positive() != after.is_positive() {
                                ok = false;
                                break;
                            }
                        }
                        if ok {
                            directions.push(rep);
                            break 'shrink;
                        }
                        theta /= rat::rat_i(4);
                    }
                }
            }
        }
        for dir in &directions {
            let ranks = self.cached_ranks(dim, model_s, model_t, dir)?;
            for (j, &r) in ranks.iter().enumerate() {
                if r != 0 && (j as i64) <= k {
                    return Ok(Some(j as i64));
                }
            }
        }
        Ok(None)
    }

    fn cached_ranks(
        &self,
        dim: usize,
        model_s: &[Vec<QVec>],
        model_t: &[Vec<QVec>],
        dir: &[Rat],
    ) -> Result<Vec<usize>> {
        let canon = |cones: &[Vec<QVec>]| -> Vec<Vec<Vec<BigInt>>> {
            let mut out: Vec<Vec<Vec<BigInt>>> = cones
                .iter()
                .map(|normals| {
                    let mut c: Vec<Vec<BigInt>> =
                        normals.iter().filter_map(|a| rat::primitive(a, false)).collect();
                    c.sort();
                    c.dedup();
                    c
                })
                .collect();
            out.sort();
            out.dedup();
            out
        };
        let key: ModelKey = (
            canon(model_s),
            canon(model_t),
            rat::primitive(dir, false).unwrap_or_default(),
        );
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let ranks = model_ranks(dim, model_s, model_t, dir)?;
        self.cache.lock().unwrap().insert(key, ranks.clone());
        Ok(ranks)
    }
}

/// Supported-section ranks of a conic local model on the fixed unit
/// window: `model = (∪ S-cones) ∖ (∪ T-cones)`, test hyperplane `⟨dir,·⟩`.
fn model_ranks(
    dim: usize,
    model_s: &[Vec<QVec>],
    model_t: &[Vec<QVec>],
    dir: &[Rat],
) -> Result<Vec<usize>> {
    let s_cones: Vec<ConvexCone> = model_s
        .iter()
        .map(|n| ConvexCone::new(dim, n.clone()))
        .collect::<Result<_>>()?;
    let t_cones: Vec<ConvexCone> = model_t
        .iter()
        .map(|n| ConvexCone::new(dim, n.clone()))
        .collect::<Result<_>>()?;
    let member = |v: &[Rat]| -> bool {
        s_cones.iter().any(|c| c.member(v)) && !t_cones.iter().any(|c| c.member(v))
    };
    let phi_at = |v: &[Rat]| -> Rat { dot(dir, v) };
    if dim == 1 {
        let mut breakpoints = vec![Rat::zero()];
        let prelim = build_1d(&breakpoints, &rat::rat_i(-1), &rat::rat_i(1))?;
        let eta = shift_for(&prelim, &phi_at, dir);
        if let Some(eta) = &eta {
            breakpoints.push(-eta / &dir[0]);
        }
        let cx = build_1d(&breakpoints, &rat::rat_i(-1), &rat::rat_i(1))?;
        Ok(cx_rank_vec(&cx, member, &phi_at, eta))
    } else {
        let window = ConvexPolyhedron::box_window(2, rat::rat_i(-1), rat::rat_i(1));
        let mut lines: Vec<Line> = Vec::new();
        for cone in s_cones.iter().chain(t_cones.iter()) {
            for a in &cone.normals {
                if let Some(l) = Line::canonical(a, &Rat::zero()) {
                    lines.push(l);
                }
            }
        }
        if let Some(l) = Line::canonical(dir, &Rat::zero()) {
            lines.push(l);
        }
        let prelim = build_2d(&lines, &window)?;
        let eta = shift_for(&prelim, &phi_at, dir);
        if let Some(eta) = &eta {
            if let Some(l) = Line::canonical(dir, &(-eta.clone())) {
                lines.push(l);
            }
        }
        let cx = build_2d(&lines, &window)?;
        Ok(cx_rank_vec(&cx, member, &phi_at, eta))
    }
}

fn cx_rank_vec(
    cx: &CellComplex,
    member: impl Fn(&[Rat]) -> bool,
    phi_at: &impl Fn(&[Rat]) -> Rat,
    eta: Option<Rat>,
) -> Vec<usize> {
    let m1: Vec<bool> = cx.cells.iter().map(|c| member(&c.witness)).collect();
    let m2: Vec<bool> = match &eta {
        None => vec![false; cx.cells.len()],
        Some(eta) => cx
            .cells
            .iter()
            .zip(m1.iter())
            .map(|(c, &inside)| inside && phi_at(&c.witness) <= -eta.clone())
            .collect(),
    };
    cx.fiber_ranks(&m1, &m2)
}

/// Sign cells of a central hyperplane arrangement, visited with pruning.
/// The visitor returns `true` to stop early.
fn enumerate_sign_cells(
    dim: usize,
    hyperplanes: &[Vec<BigInt>],
    visit: &mut impl FnMut(&[i8]) -> Result<bool>,
) -> Result<()> {
    use crate::feas::{LinCon, LinSystem};
    fn rec(
        normals: &[QVec],
        signs: &mut Vec<i8>,
        sys: &mut LinSystem,
        visit: &mut impl FnMut(&[i8]) -> Result<bool>,
    ) -> Result<bool> {
        if signs.len() == normals.len() {
            return visit(signs);
        }
        let i = signs.len();
        let n = normals[i].clone();
        let branches: [(i8, Vec<LinCon>); 3] = [
            (0, vec![
                LinCon::ge(n.clone(), Rat::zero()),
                LinCon::ge(rat::vec_neg(&n), Rat::zero()),
            ]),
            (1, vec![LinCon::gt(n.clone(), Rat::zero())]),
            (-1, vec![LinCon::gt(rat::vec_neg(&n), Rat::zero())]),
        ];
        for (sign, cons) in branches {
            let saved = sys.cons.len();
            for c in cons {
                sys.push(c);
            }
            if sys.is_feasible() {
                signs.push(sign);
                let stop = rec(normals, signs, sys, visit)?;
                signs.pop();
                if stop {
                    sys.cons.truncate(saved);
                    return Ok(true);
                }
            }
            sys.cons.truncate(saved);
        }
        Ok(false)
    }
    let normals: Vec<QVec> = hyperplanes
        .iter()
        .map(|h| h.iter().map(|v| Rat::from_integer(v.clone())).collect())
        .collect();
    let mut signs = Vec::new();
    let mut sys = LinSystem::new(dim);
    rec(&normals, &mut signs, &mut sys, visit)?;
    Ok(())
}

/// Exact membership map of the truncated-microsupport test over a finite
/// probe family.
pub fn ssk_definition_test(
    s: &LocallyClosedPolyhedralSet,
    k: i64,
    probes: &[CotangentPoint],
) -> Result<MembershipMap> {
    let oracle = SskOracle::new(s)?;
    let mut results = Vec::with_capacity(probes.len());
    for p in probes {
        let status = match oracle.membership(p, k)? {
            Some(degree) => ProbeStatus::In { degree },
            None => ProbeStatus::Out,
        };
        results.push(ProbeResult { point: p.clone(), status });
    }
    Ok(MembershipMap { k, results })
}

/// Uniform probe grid over `[lo, hi]^2 × directions`.
pub fn probe_grid_2d(lo: &Rat, hi: &Rat, steps: usize, dirs: &[QVec]) -> Vec<CotangentPoint> {
    let mut out = Vec::new();
    let span = hi - lo;
    for i in 0..steps {
        for j in 0..steps {
            let x = lo + &span * rat::rat(i as i64, (steps - 1) as i64);
            let y = lo + &span * rat::rat(j as i64, (steps - 1) as i64);
            for d in dirs {
                out.push(CotangentPoint { base: vec![x.clone(), y.clone()], fiber: d.clone() });
            }
        }
    }
    out
}

/// Probe grid over an interval with covector directions −1, 0, +1.
pub fn probe_grid_1d(lo: &Rat, hi: &Rat, steps: usize) -> Vec<CotangentPoint> {
    let mut out = Vec::new();
    let span = hi - lo;
    for i in 0..steps {
        let x = lo + &span * rat::rat(i as i64, (steps - 1) as i64);
        for d in [-1i64, 0, 1] {
            out.push(CotangentPoint { base: vec![x.clone()], fiber: vec![rat::rat_i(d)] });
        }
    }
    out
}

/// Closed planar sets as locally closed data, for oracle comparisons.
pub fn as_locally_closed(s: &PolyhedralSet) -> LocallyClosedPolyhedralSet {
    LocallyClosedPolyhedralSet::closed(s.clone())
}
