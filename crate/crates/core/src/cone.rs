//! Closed convex cones through the origin, their generators, and polars.
//!
//! A cone is stored as `{v : ⟨a_i, v⟩ ≥ 0}`. The generator decomposition
//! (lineality basis plus extreme rays of the pointed part) is the bridge
//! between H-form and the polar: the polar of a cone generated by rays
//! `r` and lines `l` is `{ξ : ⟨r, ξ⟩ ≥ 0, ⟨l, ξ⟩ = 0}`.

use crate::error::{Error, Result};
use crate::feas::{LinCon, LinSystem};
use crate::linalg;
use crate::polyhedron::for_each_combination;
use crate::rat::{self, dot, QVec, Rat};
use num::Zero;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvexCone {
    pub dim: usize,
    /// Normals of the defining half-spaces through the origin.
    #[serde(with = "rat::q_mat")]
    pub normals: Vec<QVec>,
    #[serde(skip)]
    gens: OnceLock<(Vec<QVec>, Vec<QVec>)>,
}

impl Clone for ConvexCone {
    fn clone(&self) -> Self {
        ConvexCone { dim: self.dim, normals: self.normals.clone(), gens: self.gens.clone() }
    }
}

impl PartialEq for ConvexCone {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.normals == other.normals
    }
}
impl Eq for ConvexCone {}

impl ConvexCone {
    pub fn new(dim: usize, normals: Vec<QVec>) -> Result<Self> {
        for a in &normals {
            if a.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: a.len() });
            }
        }
        let mut deduped: Vec<QVec> = Vec::with_capacity(normals.len());
        for a in normals {
            if !deduped.contains(&a) {
                deduped.push(a);
            }
        }
        Ok(ConvexCone { dim, normals: deduped, gens: OnceLock::new() })
    }

    /// The whole space as a cone.
    pub fn full(dim: usize) -> Self {
        ConvexCone { dim, normals: Vec::new(), gens: OnceLock::new() }
    }

    /// The origin alone.
    pub fn zero(dim: usize) -> Self {
        let mut normals = Vec::new();
        for i in 0..dim {
            let e = rat::unit(dim, i);
            normals.push(rat::vec_neg(&e));
            normals.push(e);
        }
        ConvexCone { dim, normals, gens: OnceLock::new() }
    }

    pub fn positive_orthant(dim: usize) -> Self {
        let normals = (0..dim).map(|i| rat::unit(dim, i)).collect();
        ConvexCone { dim, normals, gens: OnceLock::new() }
    }

    /// The linear subspace annihilating each of `rows` (an H-form subspace).
    pub fn subspace_orthogonal_to(dim: usize, rows: &[QVec]) -> Self {
        let mut normals = Vec::new();
        for r in rows {
            normals.push(r.clone());
            normals.push(rat::vec_neg(r));
        }
        ConvexCone { dim, normals, gens: OnceLock::new() }
    }

    pub fn member(&self, v: &[Rat]) -> bool {
        v.len() == self.dim && self.normals.iter().all(|a| !(dot(a, v) < Rat::zero()))
    }

    /// Lineality basis and extreme rays of the pointed part. Together they
    /// generate the cone: every element is a linear combination of the
    /// lineality basis plus a nonnegative combination of the rays.
    pub fn generators(&self) -> &(Vec<QVec>, Vec<QVec>) {
        self.gens.get_or_init(|| self.compute_generators())
    }

    fn compute_generators(&self) -> (Vec<QVec>, Vec<QVec>) {
        let n = self.dim;
        let rows: Vec<QVec> = self.normals.iter().filter(|a| !rat::vec_is_zero(a)).cloned().collect();
        let lineality = linalg::kernel_basis(&rows, n);
        let w = linalg::row_space_basis(&rows);
        let d = w.len();
        if d == 0 {
            return (lineality, Vec::new());
        }
        // Constraints in coordinates of span(w); the cone there is pointed.
        let m = rows.len();
        let prim: Vec<QVec> = rows
            .iter()
            .map(|a| w.iter().map(|wj| dot(a, wj)).collect())
            .collect();
        let feasible = |c: &[Rat]| prim.iter().all(|row| !(dot(row, c) < Rat::zero()));
        let mut rays_c: Vec<QVec> = Vec::new();
        let push_ray = |c: QVec, rays_c: &mut Vec<QVec>| {
            if let Some(p) = rat::primitive(&c, false) {
                let canon: QVec = p.into_iter().map(Rat::from_integer).collect();
                if !rays_c.contains(&canon) {
                    rays_c.push(canon);
                }
            }
        };
        if d == 1 {
            for sign in [1i64, -1] {
                let c = vec![rat::rat_i(sign)];
                if feasible(&c) {
                    push_ray(c, &mut rays_c);
                }
            }
        } else {
            for_each_combination(m, d - 1, &mut |idx: &[usize]| {
                let sub: Vec<QVec> = idx.iter().map(|&i| prim[i].clone()).collect();
                let ker = linalg::kernel_basis(&sub, d);
                if ker.len() != 1 {
                    return;
                }
                let c = ker.into_iter().next().unwrap();
                if feasible(&c) {
                    push_ray(c, &mut rays_c);
                } else {
                    let neg = rat::vec_neg(&c);
                    if feasible(&neg) {
                        push_ray(neg, &mut rays_c);
                    }
                }
            });
        }
        let rays: Vec<QVec> = rays_c
            .into_iter()
            .map(|c| {
                let mut v = rat::zeros(n);
                for (cj, wj) in c.iter().zip(w.iter()) {
                    v = rat::vec_add(&v, &rat::vec_scale(cj, wj));
                }
                rat::primitive(&v, false)
                    .map(|p| p.into_iter().map(Rat::from_integer).collect())
                    .unwrap_or(v)
            })
            .collect();
        (lineality, rays)
    }

    /// All generators as plain vectors: rays plus ± the lineality basis.
    pub fn generating_vectors(&self) -> Vec<QVec> {
        let (lin, rays) = self.generators();
        let mut out = rays.clone();
        for l in lin {
            out.push(l.clone());
            out.push(rat::vec_neg(l));
        }
        out
    }

    /// The polar cone `{ξ : ⟨v, ξ⟩ ≥ 0 for all v in the cone}`.
    pub fn polar(&self) -> ConvexCone {
        let (lin, rays) = self.generators();
        let mut normals: Vec<QVec> = rays.clone();
        for l in lin {
            normals.push(l.clone());
            normals.push(rat::vec_neg(l));
        }
        ConvexCone { dim: self.dim, normals, gens: OnceLock::new() }
    }

    /// Proper: contains 0 (always, by representation) and the polar has
    /// nonempty interior, decided by exact strict feasibility.
    pub fn is_proper(&self) -> bool {
        self.polar().is_full_dimensional()
    }

    pub fn is_full_dimensional(&self) -> bool {
        let mut sys = LinSystem::new(self.dim);
        for a in &self.normals {
            if !rat::vec_is_zero(a) {
                sys.push(LinCon::gt(a.clone(), Rat::zero()));
            }
        }
        sys.is_feasible()
    }

    /// Interior membership; meaningful only for full-dimensional cones
    /// (otherwise the interior is empty and this returns false).
    pub fn interior_member(&self, v: &[Rat]) -> bool {
        self.is_full_dimensional()
            && self
                .normals
                .iter()
                .all(|a| rat::vec_is_zero(a) || dot(a, v) > Rat::zero())
    }

    /// A point in the interior, when the cone is full-dimensional.
    pub fn interior_witness(&self) -> Option<QVec> {
        let mut sys = LinSystem::new(self.dim);
        for a in &self.normals {
            if !rat::vec_is_zero(a) {
                sys.push(LinCon::ge(a.clone(), Rat::from_integer(1.into())));
            }
        }
        sys.witness()
    }

    /// Containment decided through generators: every generating vector of
    /// `self` must satisfy the constraints of `other`.
    pub fn subset_of(&self, other: &ConvexCone) -> bool {
        self.generating_vectors().iter().all(|g| other.member(g))
    }

    pub fn same_cone(&self, other: &ConvexCone) -> bool {
        self.subset_of(other) && other.subset_of(self)
    }

    /// Does the cone lie in the half-space `{v : ⟨v, ξ⟩ ≥ 0}`?
    pub fn within_halfspace(&self, xi: &[Rat]) -> bool {
        self.generating_vectors().iter().all(|g| !(dot(g, xi) < Rat::zero()))
    }

    pub fn is_zero_cone(&self) -> bool {
        let (lin, rays) = self.generators();
        lin.is_empty() && rays.is_empty()
    }

    pub fn intersect(&self, other: &ConvexCone) -> ConvexCone {
        debug_assert_eq!(self.dim, other.dim);
        let mut normals = self.normals.clone();
        normals.extend(other.normals.clone());
        ConvexCone::new(self.dim, normals).expect("dimensions agree")
    }

    pub fn product(&self, other: &ConvexCone) -> ConvexCone {
        let dim = self.dim + other.dim;
        let mut normals = Vec::new();
        for a in &self.normals {
            let mut v = a.clone();
            v.extend(rat::zeros(other.dim));
            normals.push(v);
        }
        for a in &other.normals {
            let mut v = rat::zeros(self.dim);
            v.extend(a.clone());
            normals.push(v);
        }
        ConvexCone { dim, normals, gens: OnceLock::new() }
    }

    /// Image under `v ↦ -v`.
    pub fn negated(&self) -> ConvexCone {
        ConvexCone {
            dim: self.dim,
            normals: self.normals.iter().map(|a| rat::vec_neg(a)).collect(),
            gens: OnceLock::new(),
        }
    }

    pub fn canonical_key(&self) -> Vec<Vec<num::BigInt>> {
        let mut key: Vec<Vec<num::BigInt>> = self
            .normals
            .iter()
            .filter_map(|a| rat::primitive(a, false))
            .collect();
        key.sort();
        key.dedup();
        key
    }
}

/// The polar cone operation of the public API.
pub fn polar_cone(gamma: &ConvexCone) -> ConvexCone {
    gamma.polar()
}

/// Proper test of the public API: `0 ∈ γ` and `Int(γ°) ≠ ∅`.
pub fn is_proper_cone(gamma: &ConvexCone) -> bool {
    gamma.is_proper()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_i;

    fn v(xs: &[i64]) -> QVec {
        xs.iter().map(|&x| rat_i(x)).collect()
    }

    fn cone(normals: &[&[i64]]) -> ConvexCone {
        ConvexCone::new(normals[0].len(), normals.iter().map(|r| v(r)).collect()).unwrap()
    }

    #[test]
    fn polar_of_full_space_is_origin() {
        let full = ConvexCone::full(3);
        let p = full.polar();
        assert!(p.is_zero_cone());
        assert!(p.member(&v(&[0, 0, 0])));
        assert!(!p.member(&v(&[1, 0, 0])));
    }

    #[test]
    fn positive_orthant_is_self_dual() {
        let o = ConvexCone::positive_orthant(2);
        assert!(o.polar().same_cone(&o));
        assert!(o.is_proper());
    }

    #[test]
    fn polar_of_absolute_value_cone() {
        // {v₂ ≥ |v₁|} → polar {ξ₂ ≥ |ξ₁|}
        let c = cone(&[&[-1, 1], &[1, 1]]);
        let p = c.polar();
        let expected = cone(&[&[1, 1], &[-1, 1]]);
        assert!(p.same_cone(&expected));
        // brute-force inner products: polar members pair ≥ 0 with cone samples
        let samples = [v(&[0, 1]), v(&[1, 1]), v(&[-1, 1]), v(&[1, 3]), v(&[0, 0])];
        for xi in [v(&[0, 1]), v(&[1, 2]), v(&[-2, 3])] {
            let in_polar = p.member(&xi);
            let all_nonneg = samples.iter().all(|s| dot(s, &xi) >= Rat::zero());
            assert_eq!(in_polar, all_nonneg);
        }
    }

    #[test]
    fn double_polar_is_identity() {
        for c in [
            cone(&[&[1, 0], &[0, 1]]),
            cone(&[&[1, 0]]),
            cone(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]),
            ConvexCone::zero(2),
            ConvexCone::full(2),
        ] {
            assert!(c.polar().polar().same_cone(&c));
        }
    }

    #[test]
    fn proper_examples() {
        assert!(ConvexCone::zero(2).is_proper());
        assert!(!cone(&[&[1, 0]]).is_proper()); // half-plane: polar is a ray
        assert!(ConvexCone::positive_orthant(2).is_proper());
        // half-line in R¹ is proper
        assert!(cone(&[&[1]]).is_proper());
    }

    #[test]
    fn generators_of_halfplane() {
        let c = cone(&[&[0, 1]]); // upper half-plane
        let (lin, rays) = c.generators();
        assert_eq!(lin.len(), 1);
        assert_eq!(rays.len(), 1);
        assert!(c.member(&rays[0]));
    }

    #[test]
    fn line_cone_has_no_rays() {
        let c = ConvexCone::subspace_orthogonal_to(2, &[v(&[0, 1])]); // x-axis
        let (lin, rays) = c.generators();
        assert_eq!(lin.len(), 1);
        assert!(rays.is_empty());
        let p = c.polar();
        // polar of the x-axis is the ξ₂-axis
        assert!(p.member(&v(&[0, 5])));
        assert!(p.member(&v(&[0, -5])));
        assert!(!p.member(&v(&[1, 0])));
    }

    #[test]
    fn interior_tests() {
        let o = ConvexCone::positive_orthant(2);
        assert!(o.interior_member(&v(&[1, 1])));
        assert!(!o.interior_member(&v(&[1, 0])));
        let ray = cone(&[&[1, 0], &[-1, 0], &[0, 1]]); // {v₁=0, v₂≥0}
        assert!(!ray.interior_member(&v(&[0, 1])));
        let w = o.interior_witness().unwrap();
        assert!(o.interior_member(&w));
    }
}
