//! Closed convex polyhedra in H-representation over exact rationals.

use crate::error::{Error, Result};
use crate::feas::{LinCon, LinSystem};
use crate::linalg;
use crate::rat::{self, dot, QVec, Rat};
use num::{BigInt, Zero};
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

/// One closed half-space `{x : ⟨normal, x⟩ ≥ offset}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Halfspace {
    #[serde(with = "rat::q_vec")]
    pub normal: QVec,
    #[serde(with = "rat::q")]
    pub offset: Rat,
}

impl Halfspace {
    pub fn new(normal: QVec, offset: Rat) -> Self {
        Halfspace { normal, offset }
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        dot(&self.normal, x) >= self.offset
    }

    pub fn boundary_contains(&self, x: &[Rat]) -> bool {
        dot(&self.normal, x) == self.offset
    }
}

/// Intersection of finitely many closed half-spaces in `R^dim`.
///
/// Emptiness is decided exactly and cached; all other predicates
/// (membership, containment, dimension) are exact as well.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexPolyhedron {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
    #[serde(skip)]
    empty: OnceLock<bool>,
}

impl Clone for ConvexPolyhedron {
    fn clone(&self) -> Self {
        ConvexPolyhedron {
            dim: self.dim,
            halfspaces: self.halfspaces.clone(),
            empty: self.empty.clone(),
        }
    }
}

impl PartialEq for ConvexPolyhedron {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.halfspaces == other.halfspaces
    }
}
impl Eq for ConvexPolyhedron {}

impl ConvexPolyhedron {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self> {
        for h in &halfspaces {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: h.normal.len() });
            }
        }
        Ok(ConvexPolyhedron { dim, halfspaces, empty: OnceLock::new() })
    }

    /// The whole space.
    pub fn full(dim: usize) -> Self {
        ConvexPolyhedron { dim, halfspaces: Vec::new(), empty: OnceLock::new() }
    }

    /// The single point `{x}`.
    pub fn point(x: &[Rat]) -> Self {
        let mut hs = Vec::new();
        for i in 0..x.len() {
            let e = rat::unit(x.len(), i);
            hs.push(Halfspace::new(e.clone(), x[i].clone()));
            hs.push(Halfspace::new(rat::vec_neg(&e), -x[i].clone()));
        }
        ConvexPolyhedron { dim: x.len(), halfspaces: hs, empty: OnceLock::new() }
    }

    /// Axis-aligned box `[lo, hi]^dim`.
    pub fn box_window(dim: usize, lo: Rat, hi: Rat) -> Self {
        let mut hs = Vec::new();
        for i in 0..dim {
            let e = rat::unit(dim, i);
            hs.push(Halfspace::new(e.clone(), lo.clone()));
            hs.push(Halfspace::new(rat::vec_neg(&e), -hi.clone()));
        }
        ConvexPolyhedron { dim, halfspaces: hs, empty: OnceLock::new() }
    }

    pub fn check_dim(&self, x: &[Rat]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(())
    }

    pub fn member(&self, x: &[Rat]) -> bool {
        x.len() == self.dim && self.halfspaces.iter().all(|h| h.contains(x))
    }

    pub fn to_system(&self) -> LinSystem {
        let mut sys = LinSystem::new(self.dim);
        for h in &self.halfspaces {
            sys.push(LinCon::ge(h.normal.clone(), h.offset.clone()));
        }
        sys
    }

    pub fn is_empty(&self) -> bool {
        *self.empty.get_or_init(|| !self.to_system().is_feasible())
    }

    pub fn witness_point(&self) -> Option<QVec> {
        self.to_system().witness()
    }

    /// Indices of constraints that hold with equality on all of the set.
    pub fn implicit_equalities(&self) -> Vec<usize> {
        if self.is_empty() {
            return (0..self.halfspaces.len()).collect();
        }
        let mut out = Vec::new();
        for (i, h) in self.halfspaces.iter().enumerate() {
            let mut sys = self.to_system();
            sys.push(LinCon::gt(h.normal.clone(), h.offset.clone()));
            if !sys.is_feasible() {
                out.push(i);
            }
        }
        out
    }

    /// Affine dimension; `None` for the empty set.
    pub fn affine_dim(&self) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        let eq_rows: Vec<QVec> = self
            .implicit_equalities()
            .into_iter()
            .map(|i| self.halfspaces[i].normal.clone())
            .collect();
        Some(self.dim - linalg::rank(&eq_rows))
    }

    /// Basis of the direction space of the affine hull.
    pub fn direction_space(&self) -> Vec<QVec> {
        let eq_rows: Vec<QVec> = self
            .implicit_equalities()
            .into_iter()
            .map(|i| self.halfspaces[i].normal.clone())
            .collect();
        linalg::kernel_basis(&eq_rows, self.dim)
    }

    /// Constraints active at a member point.
    pub fn active_set(&self, x: &[Rat]) -> Vec<usize> {
        self.halfspaces
            .iter()
            .enumerate()
            .filter(|(_, h)| h.boundary_contains(x))
            .map(|(i, _)| i)
            .collect()
    }

    /// Exact containment `self ⊆ other`.
    pub fn subset_of(&self, other: &ConvexPolyhedron) -> bool {
        for h in &other.halfspaces {
            let mut sys = self.to_system();
            sys.push(LinCon::gt(rat::vec_neg(&h.normal), -h.offset.clone()));
            if sys.is_feasible() {
                return false;
            }
        }
        true
    }

    pub fn intersect(&self, other: &ConvexPolyhedron) -> ConvexPolyhedron {
        debug_assert_eq!(self.dim, other.dim);
        let mut hs = self.halfspaces.clone();
        hs.extend(other.halfspaces.clone());
        ConvexPolyhedron { dim: self.dim, halfspaces: hs, empty: OnceLock::new() }
    }

    /// Product polyhedron in `R^{dim₁+dim₂}`.
    pub fn product(&self, other: &ConvexPolyhedron) -> ConvexPolyhedron {
        let dim = self.dim + other.dim;
        let mut hs = Vec::new();
        for h in &self.halfspaces {
            let mut n = h.normal.clone();
            n.extend(rat::zeros(other.dim));
            hs.push(Halfspace::new(n, h.offset.clone()));
        }
        for h in &other.halfspaces {
            let mut n = rat::zeros(self.dim);
            n.extend(h.normal.clone());
            hs.push(Halfspace::new(n, h.offset.clone()));
        }
        ConvexPolyhedron { dim, halfspaces: hs, empty: OnceLock::new() }
    }

    /// All vertices (0-dimensional faces), exact. Intended for bounded sets;
    /// an unbounded polyhedron simply yields whatever vertices it has.
    pub fn vertices(&self) -> Vec<QVec> {
        let m = self.halfspaces.len();
        let n = self.dim;
        if m < n || self.is_empty() {
            return Vec::new();
        }
        let mut seen: Vec<QVec> = Vec::new();
        for_each_combination(m, n, &mut |idx: &[usize]| {
            let rows: Vec<QVec> = idx.iter().map(|&i| self.halfspaces[i].normal.clone()).collect();
            if linalg::rank(&rows) < n {
                return;
            }
            let rhs: Vec<Rat> = idx.iter().map(|&i| self.halfspaces[i].offset.clone()).collect();
            if let Some(x) = linalg::solve(&rows, &rhs, n) {
                if self.member(&x) && !seen.contains(&x) {
                    seen.push(x);
                }
            }
        });
        seen
    }

    /// True iff the recession cone is trivial (so the set is bounded).
    pub fn is_bounded(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let rows: Vec<QVec> = self.halfspaces.iter().map(|h| h.normal.clone()).collect();
        // Any nonzero recession direction v satisfies ⟨a_i, v⟩ ≥ 0 for all i.
        // The recession cone is trivial iff its lineality is trivial and it
        // has no extreme rays; test by feasibility of v ≠ 0 per orthant wall.
        if !linalg::kernel_basis(&rows, self.dim).is_empty() {
            return false;
        }
        for i in 0..self.dim {
            for sign in [1i64, -1] {
                let mut sys = LinSystem::new(self.dim);
                for r in &rows {
                    sys.push(LinCon::ge(r.clone(), Rat::zero()));
                }
                let mut e = rat::zeros(self.dim);
                e[i] = rat::rat_i(sign);
                sys.push(LinCon::gt(e, Rat::zero()));
                if sys.is_feasible() {
                    return false;
                }
            }
        }
        true
    }

    /// Canonicalized constraint list (primitive integer normals, sorted).
    /// Useful as a hash/cache key; not a semantic normal form.
    pub fn canonical_key(&self) -> Vec<(Vec<BigInt>, Rat)> {
        let mut key: Vec<(Vec<BigInt>, Rat)> = self
            .halfspaces
            .iter()
            .filter_map(|h| {
                let prim = rat::primitive(&h.normal, false)?;
                let idx = h.normal.iter().position(|v| !v.is_zero()).unwrap();
                let scale = &h.normal[idx] / Rat::from_integer(prim[idx].clone());
                Some((prim, &h.offset / scale))
            })
            .collect();
        key.sort();
        key.dedup();
        key
    }
}

/// Visit every k-subset of {0..m}.
pub fn for_each_combination(m: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        let needed = k - cur.len();
        for i in start..=m.saturating_sub(needed) {
            cur.push(i);
            rec(i + 1, m, k, cur, f);
            cur.pop();
        }
    }
    if k > m {
        return;
    }
    let mut cur = Vec::new();
    rec(0, m, k, &mut cur, f);
}
