//! Convex cells with mixed strict/non-strict constraints, and exact
//! emptiness of differences of finite unions. This is the engine behind
//! set equality and containment of polyhedral unions and conic descriptors.

use crate::feas::{LinCon, LinSystem};
use crate::polyhedron::ConvexPolyhedron;
use crate::rat::Rat;

/// A conjunction of linear constraints (a convex, possibly non-closed cell).
#[derive(Clone, Debug)]
pub struct Cell {
    pub dim: usize,
    pub cons: Vec<LinCon>,
}

impl Cell {
    pub fn full(dim: usize) -> Self {
        Cell { dim, cons: Vec::new() }
    }

    pub fn from_polyhedron(p: &ConvexPolyhedron) -> Self {
        Cell {
            dim: p.dim,
            cons: p
                .halfspaces
                .iter()
                .map(|h| LinCon::ge(h.normal.clone(), h.offset.clone()))
                .collect(),
        }
    }

    pub fn and(&self, c: LinCon) -> Cell {
        let mut cons = self.cons.clone();
        cons.push(c);
        Cell { dim: self.dim, cons }
    }

    pub fn to_system(&self) -> LinSystem {
        let mut sys = LinSystem::new(self.dim);
        for c in &self.cons {
            sys.push(c.clone());
        }
        sys
    }

    pub fn is_empty(&self) -> bool {
        !self.to_system().is_feasible()
    }

    pub fn member(&self, x: &[Rat]) -> bool {
        self.cons.iter().all(|c| c.satisfied_by(x))
    }
}

/// Is `∪ lhs ∖ ∪ rhs` empty?
pub fn union_difference_empty(lhs: &[Cell], rhs: &[Cell]) -> bool {
    lhs.iter().all(|l| difference_empty(l, rhs))
}

/// Is `∪ lhs ⊆ ∪ rhs`?
pub fn union_subset(lhs: &[Cell], rhs: &[Cell]) -> bool {
    union_difference_empty(lhs, rhs)
}

pub fn union_set_eq(a: &[Cell], b: &[Cell]) -> bool {
    union_subset(a, b) && union_subset(b, a)
}

fn difference_empty(cell: &Cell, rhs: &[Cell]) -> bool {
    if cell.is_empty() {
        return true;
    }
    let Some((first, rest)) = rhs.split_first() else {
        return false;
    };
    // If the cell misses `first` entirely, it subtracts nothing.
    let mut both = cell.clone();
    both.cons.extend(first.cons.iter().cloned());
    if both.is_empty() {
        return difference_empty(cell, rest);
    }
    // cell ∖ first = union over constraints of cell ∧ ¬constraint.
    for c in &first.cons {
        if !difference_empty(&cell.and(c.negation()), rest) {
            return false;
        }
    }
    true
}

/// Expand a locally closed set `(∪ closure pieces) ∖ (∪ removed pieces)`
/// into an explicit finite union of cells.
pub fn locally_closed_cells(closure: &[Cell], removed: &[Cell]) -> Vec<Cell> {
    let mut cells: Vec<Cell> = closure.iter().filter(|c| !c.is_empty()).cloned().collect();
    for r in removed {
        let mut next = Vec::new();
        for cell in &cells {
            let mut hit = cell.clone();
            hit.cons.extend(r.cons.iter().cloned());
            if hit.is_empty() {
                next.push(cell.clone());
                continue;
            }
            for c in &r.cons {
                let piece = cell.and(c.negation());
                if !piece.is_empty() {
                    next.push(piece);
                }
            }
        }
        cells = next;
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyhedron::Halfspace;
    use crate::rat::{rat_i, QVec};

    fn hs(n: &[i64], b: i64) -> Halfspace {
        Halfspace::new(n.iter().map(|&v| rat_i(v)).collect(), rat_i(b))
    }

    fn poly(dim: usize, hss: &[(&[i64], i64)]) -> ConvexPolyhedron {
        ConvexPolyhedron::new(dim, hss.iter().map(|(n, b)| hs(n, *b)).collect()).unwrap()
    }

    #[test]
    fn halfspace_union_covers_plane_minus_quadrant() {
        // {x ≥ 0} ∪ {y ≥ 0} vs complement of open third quadrant: equal sets
        let a = vec![
            Cell::from_polyhedron(&poly(2, &[(&[1, 0], 0)])),
            Cell::from_polyhedron(&poly(2, &[(&[0, 1], 0)])),
        ];
        // the same set, described redundantly
        let b = vec![
            Cell::from_polyhedron(&poly(2, &[(&[1, 0], 0), (&[0, 1], 0)])),
            Cell::from_polyhedron(&poly(2, &[(&[1, 0], 0), (&[0, -1], 0)])),
            Cell::from_polyhedron(&poly(2, &[(&[-1, 0], 0), (&[0, 1], 0)])),
        ];
        assert!(union_set_eq(&a, &b));
        let just_right = vec![Cell::from_polyhedron(&poly(2, &[(&[1, 0], 0)]))];
        assert!(union_subset(&just_right, &a));
        assert!(!union_subset(&a, &just_right));
    }

    #[test]
    fn locally_closed_expansion_membership() {
        // [0,2] ∖ {1} in R¹
        let closure = vec![Cell::from_polyhedron(&poly(1, &[(&[1], 0), (&[-1], -2)]))];
        let removed = vec![Cell::from_polyhedron(&poly(1, &[(&[1], 1), (&[-1], -1)]))];
        let cells = locally_closed_cells(&closure, &removed);
        let member = |x: i64, d: i64| {
            let pt: QVec = vec![crate::rat::rat(x, d)];
            cells.iter().any(|c| c.member(&pt))
        };
        assert!(member(0, 1));
        assert!(member(1, 2));
        assert!(!member(1, 1));
        assert!(member(2, 1));
        assert!(!member(3, 1));
    }
}
