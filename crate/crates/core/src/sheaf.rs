//! Truncated microsupports from stratification data, the perversity
//! formula and its converse criterion, and pruning invariance of conic
//! descriptors under removal of low-dimensional sets.
//!
//! A stratified description lists strata `Y_α` with conormal pieces
//! `Λ_α ⊆ T*_{Y_α}X` (stored as closed descriptor pieces, per the
//! polyhedral wall convention) and the set of degrees in which the stalk
//! complex `K_α` has cohomology. The truncated microsupport at level `k`
//! is the union of the `Λ_α` closures over the strata active at `k`,
//! i.e. those with some nonzero degree ≤ k.

use crate::cone::ConvexCone;
use crate::conic::ConicSubset;
use crate::error::{Error, Result};
use crate::normalcone;
use crate::pset::{LocallyClosedPolyhedralSet, PolyhedralSet};
use crate::rat;
use num::Zero;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratumDatum {
    pub id: String,
    /// The stratum `Y_α`, a locally closed polyhedral manifold piece.
    pub stratum: LocallyClosedPolyhedralSet,
    /// Closure descriptor of the conormal piece `Λ_α ⊆ T*_{Y_α}X`.
    pub lambda: ConicSubset,
    /// Degrees `j` with `H^j(K_α) ≠ 0`; nonempty.
    pub degrees: BTreeSet<i64>,
    /// Optional stalk ranks by degree (unused by the `SS_k` formula).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_by_degree: Option<BTreeMap<i64, usize>>,
}

impl StratumDatum {
    pub fn validate(&self) -> Result<()> {
        if self.degrees.is_empty() {
            return Err(Error::BadStrata(format!("stratum {}: empty degree set", self.id)));
        }
        let dim = self.stratum.dim();
        if self.lambda.dim != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: self.lambda.dim });
        }
        // Conormality: each lambda base lies in the stratum closure, and
        // the fiber annihilates the direction space of the supporting
        // closure piece.
        for piece in &self.lambda.pieces {
            if piece.base.is_empty() {
                continue;
            }
            let support = self
                .stratum
                .closure
                .pieces
                .iter()
                .find(|p| piece.base.subset_of(p))
                .ok_or_else(|| {
                    Error::BadStrata(format!(
                        "stratum {}: a conormal base escapes the stratum closure",
                        self.id
                    ))
                })?;
            let directions = support.direction_space();
            let (lineality, rays) = piece.fiber.generators();
            for g in rays.iter().chain(lineality.iter()) {
                for d in &directions {
                    if !rat::dot(g, d).is_zero() {
                        return Err(Error::BadStrata(format!(
                            "stratum {}: fiber fails to annihilate the stratum directions",
                            self.id
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn min_degree(&self) -> i64 {
        *self.degrees.iter().next().expect("validated nonempty")
    }

    pub fn max_degree(&self) -> i64 {
        *self.degrees.iter().next_back().expect("validated nonempty")
    }

    /// Closure of the full conormal bundle `T*_{Y_α}X` as a descriptor.
    pub fn conormal_bundle(&self) -> Result<ConicSubset> {
        let dim = self.stratum.dim();
        let mut pieces = Vec::new();
        for p in &self.stratum.closure.pieces {
            if p.is_empty() {
                continue;
            }
            let fiber = ConvexCone::subspace_orthogonal_to(dim, &p.direction_space());
            pieces.push(crate::conic::ConicPiece { base: p.clone(), fiber });
        }
        ConicSubset::exact(dim, pieces)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StratifiedSheafDescription {
    pub dim: usize,
    pub strata: Vec<StratumDatum>,
    /// Whether `∪ closure(Λ_α)` is asserted to contain the microsupport.
    #[serde(default)]
    pub covers_microsupport: bool,
}

impl StratifiedSheafDescription {
    pub fn validate(&self) -> Result<()> {
        let mut ids = BTreeSet::new();
        for s in &self.strata {
            if s.stratum.dim() != self.dim {
                return Err(Error::DimensionMismatch { expected: self.dim, got: s.stratum.dim() });
            }
            s.validate()?;
            if !ids.insert(s.id.clone()) {
                return Err(Error::BadStrata(format!("duplicate stratum id {}", s.id)));
            }
        }
        for i in 0..self.strata.len() {
            for j in (i + 1)..self.strata.len() {
                if !self.strata[i].stratum.disjoint_from(&self.strata[j].stratum) {
                    return Err(Error::BadStrata(format!(
                        "strata {} and {} overlap",
                        self.strata[i].id, self.strata[j].id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn max_degree(&self) -> i64 {
        self.strata.iter().map(|s| s.max_degree()).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> i64 {
        self.strata.iter().map(|s| s.min_degree()).min().unwrap_or(0)
    }
}

/// The stratified truncated-microsupport formula: the union of conormal
/// closures over the strata whose stalk complex has cohomology in some
/// degree ≤ k. Monotone in `k` by construction.
pub fn ssk_from_strata(d: &StratifiedSheafDescription, k: i64) -> Result<ConicSubset> {
    d.validate()?;
    let mut out = ConicSubset::empty(d.dim);
    for s in &d.strata {
        if s.min_degree() <= k {
            out = out.union(&s.lambda);
        }
    }
    Ok(out.pruned())
}

/// `SS₀` of the constant sheaf on a closed set: the 0-conormal cone.
pub fn ss0_constant(s: &PolyhedralSet) -> Result<ConicSubset> {
    normalcone::conormal0(s)
}

/// The perversity formula: union of conormal-bundle closures over strata
/// of declared codimension ≤ k (empty for k < 0).
pub fn perverse_ssk(
    codims: &BTreeMap<String, i64>,
    conormals: &BTreeMap<String, ConicSubset>,
    dim: usize,
    k: i64,
) -> Result<ConicSubset> {
    let mut out = ConicSubset::empty(dim);
    for (id, cone) in conormals {
        let codim = codims
            .get(id)
            .ok_or_else(|| Error::BadStrata(format!("missing codimension for stratum {id}")))?;
        if *codim < 0 {
            return Err(Error::BadStrata(format!("negative codimension for stratum {id}")));
        }
        if *codim <= k {
            out = out.union(cone);
        }
    }
    Ok(out.pruned())
}

/// The perversity criterion: for every active level `k`, the truncated
/// microsupports of the description and of its dual must lie in the
/// perversity-formula union. Declared complex codimensions are pure
/// bookkeeping.
pub fn perversity_check(
    d_f: &StratifiedSheafDescription,
    d_dual: &StratifiedSheafDescription,
    codims: &BTreeMap<String, i64>,
) -> Result<bool> {
    d_f.validate()?;
    d_dual.validate()?;
    if d_f.strata.len() != d_dual.strata.len() {
        return Err(Error::BadStrata("descriptions have different strata".into()));
    }
    for s in &d_f.strata {
        let twin = d_dual
            .strata
            .iter()
            .find(|t| t.id == s.id)
            .ok_or_else(|| Error::BadStrata(format!("stratum {} missing from the dual", s.id)))?;
        if !s.stratum.closure.set_eq(&twin.stratum.closure)
            || !s.stratum.removed.set_eq(&twin.stratum.removed)
        {
            return Err(Error::BadStrata(format!("stratum {} differs between descriptions", s.id)));
        }
    }
    let mut conormals = BTreeMap::new();
    for s in &d_f.strata {
        conormals.insert(s.id.clone(), s.conormal_bundle()?);
    }
    let max_codim = codims.values().copied().max().unwrap_or(0);
    let k_lo = d_f.min_degree().min(d_dual.min_degree());
    let k_hi = d_f.max_degree().max(d_dual.max_degree()).max(max_codim);
    for k in k_lo..=k_hi {
        let lhs = ssk_from_strata(d_f, k)?.union(&ssk_from_strata(d_dual, k)?);
        let rhs = perverse_ssk(codims, &conormals, d_f.dim, k)?;
        if !lhs.subset_of(&rhs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Pruning invariance: removing a low-dimensional exact conic set `S`
/// from `A` leaves the closure unchanged, decided by exact dimension
/// counting of polyhedral pieces.
///
/// Errors when some piece of `S` has dimension ≥ the base dimension, or
/// when `S` meets a piece of `A` in full piece dimension (then removal
/// genuinely shrinks the closure and `S` is not lower-dimensional
/// relative to `A`).
pub fn prune_invariance(a: &ConicSubset, s: &ConicSubset) -> Result<bool> {
    if !a.has_exact() || !s.has_exact() {
        return Err(Error::EstimateOnly);
    }
    let n = a.dim as i64;
    for piece in &s.pieces {
        if let Some(d) = piece.to_polyhedron().affine_dim() {
            if d as i64 >= n {
                return Err(Error::NotLowDimensional(format!(
                    "piece of dimension {d} with base dimension {n}"
                )));
            }
        }
    }
    for pa in &a.pieces {
        let poly_a = pa.to_polyhedron();
        let Some(da) = poly_a.affine_dim() else { continue };
        for ps in &s.pieces {
            let inter = poly_a.intersect(&ps.to_polyhedron());
            if let Some(di) = inter.affine_dim() {
                if di == da {
                    return Err(Error::NotLowDimensional(
                        "S is not lower-dimensional relative to A".into(),
                    ));
                }
            }
        }
    }
    Ok(true)
}
