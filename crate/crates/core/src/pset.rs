//! Finite unions of convex polyhedra (closed polyhedral sets) and their
//! locally closed variants `S = S̄ ∖ T`.

use crate::cells::{self, Cell};
use crate::cone::ConvexCone;
use crate::error::{Error, Result};
use crate::polyhedron::ConvexPolyhedron;
use crate::rat::{QVec, Rat};
use serde::{Deserialize, Serialize};

/// A closed subset of `R^dim`: a finite union of H-form polyhedra.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolyhedralSet {
    pub dim: usize,
    pub pieces: Vec<ConvexPolyhedron>,
}

impl PolyhedralSet {
    pub fn new(dim: usize, pieces: Vec<ConvexPolyhedron>) -> Result<Self> {
        for p in &pieces {
            if p.dim != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.dim });
            }
        }
        Ok(PolyhedralSet { dim, pieces })
    }

    pub fn empty(dim: usize) -> Self {
        PolyhedralSet { dim, pieces: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        PolyhedralSet { dim, pieces: vec![ConvexPolyhedron::full(dim)] }
    }

    pub fn from_piece(p: ConvexPolyhedron) -> Self {
        PolyhedralSet { dim: p.dim, pieces: vec![p] }
    }

    /// Exact membership; independent of piece order by construction.
    pub fn member(&self, x: &[Rat]) -> bool {
        self.pieces.iter().any(|p| p.member(x))
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.iter().all(|p| p.is_empty())
    }

    pub fn to_cells(&self) -> Vec<Cell> {
        self.pieces
            .iter()
            .filter(|p| !p.is_empty())
            .map(Cell::from_polyhedron)
            .collect()
    }

    pub fn subset_of(&self, other: &PolyhedralSet) -> bool {
        cells::union_subset(&self.to_cells(), &other.to_cells())
    }

    pub fn set_eq(&self, other: &PolyhedralSet) -> bool {
        self.subset_of(other) && other.subset_of(self)
    }

    pub fn union(&self, other: &PolyhedralSet) -> PolyhedralSet {
        debug_assert_eq!(self.dim, other.dim);
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.clone());
        PolyhedralSet { dim: self.dim, pieces }
    }

    pub fn intersect_polyhedron(&self, q: &ConvexPolyhedron) -> PolyhedralSet {
        PolyhedralSet {
            dim: self.dim,
            pieces: self.pieces.iter().map(|p| p.intersect(q)).collect(),
        }
    }

    pub fn product(&self, other: &PolyhedralSet) -> PolyhedralSet {
        let mut pieces = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                pieces.push(a.product(b));
            }
        }
        PolyhedralSet { dim: self.dim + other.dim, pieces }
    }

    pub fn is_bounded(&self) -> bool {
        self.pieces.iter().all(|p| p.is_bounded())
    }
}

/// `S = closure ∖ removed`, with `removed ⊆ closure` enforced exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocallyClosedPolyhedralSet {
    pub closure: PolyhedralSet,
    pub removed: PolyhedralSet,
}

impl LocallyClosedPolyhedralSet {
    pub fn new(closure: PolyhedralSet, removed: PolyhedralSet) -> Result<Self> {
        if closure.dim != removed.dim {
            return Err(Error::DimensionMismatch { expected: closure.dim, got: removed.dim });
        }
        if !removed.subset_of(&closure) {
            return Err(Error::InvalidInput("removed part must lie in the closure".into()));
        }
        Ok(LocallyClosedPolyhedralSet { closure, removed })
    }

    pub fn closed(s: PolyhedralSet) -> Self {
        let dim = s.dim;
        LocallyClosedPolyhedralSet { closure: s, removed: PolyhedralSet::empty(dim) }
    }

    pub fn dim(&self) -> usize {
        self.closure.dim
    }

    pub fn member(&self, x: &[Rat]) -> bool {
        self.closure.member(x) && !self.removed.member(x)
    }

    pub fn is_closed(&self) -> bool {
        self.removed.is_empty()
    }

    pub fn to_cells(&self) -> Vec<Cell> {
        cells::locally_closed_cells(&self.closure.to_cells(), &self.removed.to_cells())
    }

    pub fn subset_of(&self, other: &LocallyClosedPolyhedralSet) -> bool {
        cells::union_subset(&self.to_cells(), &other.to_cells())
    }

    pub fn is_empty(&self) -> bool {
        cells::union_difference_empty(&self.closure.to_cells(), &self.removed.to_cells())
    }

    pub fn disjoint_from(&self, other: &LocallyClosedPolyhedralSet) -> bool {
        let a = self.to_cells();
        let b = other.to_cells();
        for ca in &a {
            for cb in &b {
                let mut joint = ca.clone();
                joint.cons.extend(cb.cons.iter().cloned());
                if !joint.is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// The tangent cone of a polyhedral set at a member point: the union over
/// pieces containing the point of their feasible-direction cones (active
/// half-spaces only). For polyhedral sets this equals the normal cone
/// `C_x(S)` of limiting directions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TangentCone {
    pub dim: usize,
    pub cones: Vec<ConvexCone>,
}

impl TangentCone {
    pub fn member(&self, v: &[Rat]) -> bool {
        self.cones.iter().any(|c| c.member(v))
    }

    /// Does the whole union lie in `{v : ⟨v, ξ⟩ ≥ 0}`?
    pub fn within_halfspace(&self, xi: &[Rat]) -> bool {
        self.cones.iter().all(|c| c.within_halfspace(xi))
    }
}

/// Tangent cone of `S` at `x ∈ S`.
pub fn tangent_cone(s: &PolyhedralSet, x: &[Rat]) -> Result<TangentCone> {
    if x.len() != s.dim {
        return Err(Error::DimensionMismatch { expected: s.dim, got: x.len() });
    }
    if !s.member(x) {
        return Err(Error::PointNotInSet);
    }
    let mut cones = Vec::new();
    for p in &s.pieces {
        if !p.member(x) {
            continue;
        }
        let normals: Vec<QVec> = p
            .active_set(x)
            .into_iter()
            .map(|i| p.halfspaces[i].normal.clone())
            .collect();
        cones.push(ConvexCone::new(s.dim, normals)?);
    }
    Ok(TangentCone { dim: s.dim, cones })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::Halfspace;
    use crate::rat::{rat_i, zeros};

    fn hs(n: &[i64], b: i64) -> Halfspace {
        Halfspace::new(n.iter().map(|&v| rat_i(v)).collect(), rat_i(b))
    }

    fn halfplane(n: &[i64], b: i64) -> ConvexPolyhedron {
        ConvexPolyhedron::new(n.len(), vec![hs(n, b)]).unwrap()
    }

    /// `S = {x ≥ 0} ∪ {y ≥ 0} ⊂ R²`.
    fn union_s() -> PolyhedralSet {
        PolyhedralSet::new(2, vec![halfplane(&[1, 0], 0), halfplane(&[0, 1], 0)]).unwrap()
    }

    #[test]
    fn membership_examples() {
        let s = union_s();
        assert!(s.member(&[rat_i(-5), rat_i(0)]));
        assert!(s.member(&[rat_i(3), rat_i(-7)]));
        assert!(!s.member(&[rat_i(-1), rat_i(-1)]));
    }

    #[test]
    fn tangent_cone_interior_is_everything() {
        let s = union_s();
        let tc = tangent_cone(&s, &[rat_i(1), rat_i(1)]).unwrap();
        assert!(tc.member(&[rat_i(-100), rat_i(-100)]));
    }

    #[test]
    fn tangent_cone_at_origin_is_the_set_itself() {
        let s = union_s();
        let tc = tangent_cone(&s, &zeros(2)).unwrap();
        assert!(tc.member(&[rat_i(1), rat_i(-3)]));
        assert!(tc.member(&[rat_i(-3), rat_i(1)]));
        assert!(!tc.member(&[rat_i(-1), rat_i(-1)]));
    }

    #[test]
    fn tangent_cone_of_square_vertex_is_orthant() {
        let sq = ConvexPolyhedron::new(
            2,
            vec![hs(&[1, 0], 0), hs(&[0, 1], 0), hs(&[-1, 0], -1), hs(&[0, -1], -1)],
        )
        .unwrap();
        let s = PolyhedralSet::from_piece(sq);
        let tc = tangent_cone(&s, &zeros(2)).unwrap();
        assert_eq!(tc.cones.len(), 1);
        assert!(tc.cones[0].same_cone(&ConvexCone::positive_orthant(2)));
    }

    #[test]
    fn tangent_cone_rejects_outside_points() {
        let s = union_s();
        assert!(matches!(
            tangent_cone(&s, &[rat_i(-1), rat_i(-1)]),
            Err(Error::PointNotInSet)
        ));
    }

    #[test]
    fn locally_closed_validation() {
        let closure = PolyhedralSet::from_piece(halfplane(&[1], 0));
        let removed = PolyhedralSet::from_piece(ConvexPolyhedron::point(&zeros(1)));
        let lc = LocallyClosedPolyhedralSet::new(closure.clone(), removed).unwrap();
        assert!(!lc.member(&zeros(1)));
        assert!(lc.member(&[rat_i(1)]));
        let bad = PolyhedralSet::from_piece(ConvexPolyhedron::point(&[rat_i(-2)]));
        assert!(LocallyClosedPolyhedralSet::new(closure, bad).is_err());
    }
}
