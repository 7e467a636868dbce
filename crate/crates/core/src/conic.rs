//! Conic subsets of the cotangent space `T*R^n = R^n × R^n`.
//!
//! The exact representation is a finite union of products
//! `base polyhedron × fiber cone`; every such piece is closed and
//! fiberwise conic by construction. A subset may also carry unit-covector
//! samples; samples are validated against the exact pieces when both are
//! present.

use crate::cells::{self, Cell};
use crate::cone::ConvexCone;
use crate::error::{Error, Result};
use crate::feas::LinCon;
use crate::polyhedron::ConvexPolyhedron;
use crate::pset::PolyhedralSet;
use crate::rat::{self, QVec, Rat};
use num::Zero;
use serde::{Deserialize, Serialize};

/// A point `(x; ξ)` of `T*R^n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CotangentPoint {
    #[serde(with = "rat::q_vec")]
    pub base: QVec,
    #[serde(with = "rat::q_vec")]
    pub fiber: QVec,
}

impl CotangentPoint {
    pub fn new(base: QVec, fiber: QVec) -> Result<Self> {
        if base.len() != fiber.len() {
            return Err(Error::DimensionMismatch { expected: base.len(), got: fiber.len() });
        }
        Ok(CotangentPoint { base, fiber })
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    pub fn antipodal(&self) -> CotangentPoint {
        CotangentPoint { base: self.base.clone(), fiber: rat::vec_neg(&self.fiber) }
    }
}

/// One closed product piece `base × fiber`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConicPiece {
    pub base: ConvexPolyhedron,
    pub fiber: ConvexCone,
}

impl ConicPiece {
    pub fn new(base: ConvexPolyhedron, fiber: ConvexCone) -> Result<Self> {
        if base.dim != fiber.dim {
            return Err(Error::DimensionMismatch { expected: base.dim, got: fiber.dim });
        }
        Ok(ConicPiece { base, fiber })
    }

    pub fn member(&self, p: &CotangentPoint) -> bool {
        self.base.member(&p.base) && self.fiber.member(&p.fiber)
    }

    /// The piece as a convex cell in `R^{2n}` (base coords then fiber).
    pub fn to_cell(&self) -> Cell {
        let n = self.base.dim;
        let mut cons = Vec::new();
        for h in &self.base.halfspaces {
            let mut coeffs = h.normal.clone();
            coeffs.extend(rat::zeros(n));
            cons.push(LinCon::ge(coeffs, h.offset.clone()));
        }
        for a in &self.fiber.normals {
            let mut coeffs = rat::zeros(n);
            coeffs.extend(a.clone());
            cons.push(LinCon::ge(coeffs, Rat::zero()));
        }
        Cell { dim: 2 * n, cons }
    }

    /// Product piece as a closed polyhedron in `R^{2n}`; used for exact
    /// dimension counting.
    pub fn to_polyhedron(&self) -> ConvexPolyhedron {
        let fiber_poly = ConvexPolyhedron::new(
            self.fiber.dim,
            self.fiber
                .normals
                .iter()
                .map(|a| crate::polyhedron::Halfspace::new(a.clone(), Rat::zero()))
                .collect(),
        )
        .expect("dimensions agree");
        self.base.product(&fiber_poly)
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }
}

/// A closed conic subset of `T*R^n`: exact pieces, optional samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConicSubset {
    pub dim: usize,
    pub pieces: Vec<ConicPiece>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<CotangentPoint>>,
}

impl ConicSubset {
    pub fn exact(dim: usize, pieces: Vec<ConicPiece>) -> Result<Self> {
        for p in &pieces {
            if p.base.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.base.dim });
            }
        }
        Ok(ConicSubset { dim, pieces, samples: None })
    }

    pub fn empty(dim: usize) -> Self {
        ConicSubset { dim, pieces: Vec::new(), samples: None }
    }

    pub fn samples_only(dim: usize, samples: Vec<CotangentPoint>) -> Result<Self> {
        for s in &samples {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: s.dim() });
            }
        }
        Ok(ConicSubset { dim, pieces: Vec::new(), samples: Some(samples) })
    }

    /// Attach samples, checking each against the exact pieces.
    pub fn with_samples(mut self, samples: Vec<CotangentPoint>) -> Result<Self> {
        if !self.pieces.is_empty() {
            for s in &samples {
                if !self.member_exact(s)? {
                    return Err(Error::InvalidInput(
                        "sample fails exact membership in the descriptor".into(),
                    ));
                }
            }
        }
        self.samples = Some(samples);
        Ok(self)
    }

    /// The zero section over a polyhedral set.
    pub fn zero_section(s: &PolyhedralSet) -> Self {
        let pieces = s
            .pieces
            .iter()
            .filter(|p| !p.is_empty())
            .map(|p| ConicPiece { base: p.clone(), fiber: ConvexCone::zero(s.dim) })
            .collect();
        ConicSubset { dim: s.dim, pieces, samples: None }
    }

    pub fn has_exact(&self) -> bool {
        !self.pieces.is_empty() || self.samples.is_none()
    }

    /// Exact membership. Errors with [`Error::EstimateOnly`] on a
    /// samples-only subset.
    pub fn member_exact(&self, p: &CotangentPoint) -> Result<bool> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: p.dim() });
        }
        if self.pieces.is_empty() && self.samples.is_some() {
            return Err(Error::EstimateOnly);
        }
        Ok(self.pieces.iter().any(|piece| piece.member(p)))
    }

    /// Fiberwise negation `(x; ξ) ↦ (x; −ξ)`; an exact involution.
    pub fn antipodal(&self) -> ConicSubset {
        ConicSubset {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .map(|p| ConicPiece { base: p.base.clone(), fiber: p.fiber.negated() })
                .collect(),
            samples: self
                .samples
                .as_ref()
                .map(|ss| ss.iter().map(|s| s.antipodal()).collect()),
        }
    }

    pub fn to_cells(&self) -> Vec<Cell> {
        self.pieces
            .iter()
            .filter(|p| !p.is_empty())
            .map(|p| p.to_cell())
            .collect()
    }

    pub fn subset_of(&self, other: &ConicSubset) -> Result<bool> {
        if !self.has_exact() || !other.has_exact() {
            return Err(Error::EstimateOnly);
        }
        Ok(cells::union_subset(&self.to_cells(), &other.to_cells()))
    }

    /// Exact set equality of the underlying subsets of `T*R^n`.
    pub fn set_eq(&self, other: &ConicSubset) -> Result<bool> {
        Ok(self.subset_of(other)? && other.subset_of(self)?)
    }

    pub fn union(&self, other: &ConicSubset) -> ConicSubset {
        debug_assert_eq!(self.dim, other.dim);
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.clone());
        ConicSubset { dim: self.dim, pieces, samples: None }
    }

    /// Product descriptor in `T*R^{n₁+n₂}`: bases concatenate and fibers
    /// concatenate, matching the product of cotangent spaces.
    pub fn product(&self, other: &ConicSubset) -> ConicSubset {
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                pieces.push(ConicPiece {
                    base: a.base.product(&b.base),
                    fiber: a.fiber.product(&b.fiber),
                });
            }
        }
        ConicSubset { dim: self.dim + other.dim, pieces, samples: None }
    }

    /// Base projection `π(A)` as a polyhedral set (bases of nonempty pieces).
    pub fn base_projection(&self) -> PolyhedralSet {
        PolyhedralSet {
            dim: self.dim,
            pieces: self
                .pieces
                .iter()
                .filter(|p| !p.is_empty())
                .map(|p| p.base.clone())
                .collect(),
        }
    }

    /// Drop pieces with empty base.
    pub fn pruned(mut self) -> ConicSubset {
        self.pieces.retain(|p| !p.is_empty());
        self
    }
}

/// Fiberwise negation of the public API.
pub fn antipodal(a: &ConicSubset) -> ConicSubset {
    a.antipodal()
}

/// Exact membership test of the public API.
pub fn conic_membership(a: &ConicSubset, p: &CotangentPoint) -> Result<bool> {
    a.member_exact(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::Halfspace;
    use crate::rat::{rat, rat_i, zeros};

    fn v(xs: &[i64]) -> QVec {
        xs.iter().map(|&x| rat_i(x)).collect()
    }

    fn halfplane(n: &[i64], b: i64) -> ConvexPolyhedron {
        ConvexPolyhedron::new(n.len(), vec![Halfspace::new(v(n), rat_i(b))]).unwrap()
    }

    fn pt(b: &[i64], f: &[i64]) -> CotangentPoint {
        CotangentPoint::new(v(b), v(f)).unwrap()
    }

    #[test]
    fn zero_section_membership() {
        let s = PolyhedralSet::new(2, vec![halfplane(&[1, 0], 0)]).unwrap();
        let z = ConicSubset::zero_section(&s);
        assert!(z.member_exact(&pt(&[2, -3], &[0, 0])).unwrap());
        assert!(!z.member_exact(&pt(&[2, -3], &[0, 1])).unwrap());
        assert!(!z.member_exact(&pt(&[-1, 0], &[0, 0])).unwrap());
    }

    #[test]
    fn antipodal_is_involution() {
        let piece = ConicPiece::new(halfplane(&[1, 0], 0), ConvexCone::positive_orthant(2)).unwrap();
        let a = ConicSubset::exact(2, vec![piece]).unwrap();
        let b = a.antipodal();
        assert!(b.member_exact(&pt(&[1, 1], &[-1, -2])).unwrap());
        assert!(!b.member_exact(&pt(&[1, 1], &[1, 2])).unwrap());
        assert_eq!(a, b.antipodal());
        assert!(a.set_eq(&b.antipodal()).unwrap());
    }

    #[test]
    fn zero_section_is_fixed_by_antipodal() {
        let s = PolyhedralSet::new(2, vec![halfplane(&[0, 1], 0)]).unwrap();
        let z = ConicSubset::zero_section(&s);
        assert!(z.set_eq(&z.antipodal()).unwrap());
    }

    #[test]
    fn membership_is_scale_invariant() {
        let piece = ConicPiece::new(
            ConvexPolyhedron::point(&zeros(2)),
            ConvexCone::positive_orthant(2),
        )
        .unwrap();
        let a = ConicSubset::exact(2, vec![piece]).unwrap();
        let p = CotangentPoint::new(zeros(2), vec![rat(1, 7), rat(3, 5)]).unwrap();
        let scaled = CotangentPoint::new(zeros(2), vec![rat(2, 7), rat(6, 5)]).unwrap();
        assert_eq!(a.member_exact(&p).unwrap(), a.member_exact(&scaled).unwrap());
        assert!(a.member_exact(&p).unwrap());
    }

    #[test]
    fn samples_only_membership_errors() {
        let a = ConicSubset::samples_only(1, vec![pt(&[0], &[1])]).unwrap();
        assert!(matches!(a.member_exact(&pt(&[0], &[1])), Err(Error::EstimateOnly)));
    }

    #[test]
    fn sample_validation_against_exact() {
        let piece = ConicPiece::new(halfplane(&[1], 0), ConvexCone::positive_orthant(1)).unwrap();
        let a = ConicSubset::exact(1, vec![piece]).unwrap();
        assert!(a.clone().with_samples(vec![pt(&[2], &[1])]).is_ok());
        assert!(a.with_samples(vec![pt(&[-2], &[1])]).is_err());
    }
}
