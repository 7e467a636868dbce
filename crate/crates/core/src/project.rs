//! Exact nearest points and convex quadratic minimization over polyhedra,
//! by enumeration of candidate active sets. Candidate counts are tiny at
//! the dimensions this crate targets, and every verdict stays rational:
//! distances are compared as squared norms.

use crate::error::{Error, Result};
use crate::feas::{fm_project, LinCon};
use crate::linalg;
use crate::polyhedron::{for_each_combination, ConvexPolyhedron, Halfspace};
use crate::rat::{self, dot, norm_sq, QVec, Rat};
use num::Zero;

/// Result of projecting a point onto a convex polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    /// Exact squared distance.
    pub dist_sq: Rat,
    /// The unique nearest point, exact.
    pub point: QVec,
}

/// Nearest point of a nonempty polyhedron to `x`.
///
/// The projection lies on some face; projecting `x` onto the affine span
/// of every candidate active set (subsets of ≤ n constraints taken as
/// equalities) and keeping the feasible minimizer recovers it exactly.
pub fn nearest_point(x: &[Rat], c: &ConvexPolyhedron) -> Result<Projection> {
    c.check_dim(x)?;
    if c.is_empty() {
        return Err(Error::EmptyPolyhedron);
    }
    if c.member(x) {
        return Ok(Projection { dist_sq: Rat::zero(), point: x.to_vec() });
    }
    let n = c.dim;
    let m = c.halfspaces.len();
    let mut best: Option<Projection> = None;
    for k in 1..=n.min(m) {
        for_each_combination(m, k, &mut |idx: &[usize]| {
            let rows: Vec<QVec> = idx.iter().map(|&i| c.halfspaces[i].normal.clone()).collect();
            let rhs: Vec<Rat> = idx.iter().map(|&i| c.halfspaces[i].offset.clone()).collect();
            if let Some(y) = project_onto_affine(x, &rows, &rhs) {
                if c.member(&y) {
                    let d = norm_sq(&rat::vec_sub(x, &y));
                    if best.as_ref().is_none_or(|b| d < b.dist_sq) {
                        best = Some(Projection { dist_sq: d, point: y });
                    }
                }
            }
        });
    }
    best.ok_or(Error::EmptyPolyhedron)
}

/// Orthogonal projection of `x` onto `{y : A y = b}`; `None` if the system
/// is inconsistent.
fn project_onto_affine(x: &[Rat], rows: &[QVec], rhs: &[Rat]) -> Option<QVec> {
    // Reduce to independent rows first so the Gram matrix is invertible.
    let n = x.len();
    let mut aug: Vec<QVec> = rows
        .iter()
        .zip(rhs.iter())
        .map(|(r, b)| {
            let mut v = r.clone();
            v.push(b.clone());
            v
        })
        .collect();
    let pivots = linalg::rref(&mut aug);
    if pivots.contains(&n) {
        return None; // inconsistent
    }
    aug.truncate(pivots.len());
    let red_rows: Vec<QVec> = aug.iter().map(|r| r[..n].to_vec()).collect();
    let red_rhs: Vec<Rat> = aug.iter().map(|r| r[n].clone()).collect();
    let k = red_rows.len();
    if k == 0 {
        return Some(x.to_vec());
    }
    // y = x + Aᵀλ with A y = b  ⇒  (A Aᵀ) λ = b − A x.
    let gram: Vec<QVec> = (0..k)
        .map(|i| (0..k).map(|j| dot(&red_rows[i], &red_rows[j])).collect())
        .collect();
    let target: Vec<Rat> = (0..k).map(|i| &red_rhs[i] - dot(&red_rows[i], x)).collect();
    let lambda = linalg::solve(&gram, &target, k)?;
    let mut y = x.to_vec();
    for (li, row) in lambda.iter().zip(red_rows.iter()) {
        y = rat::vec_add(&y, &rat::vec_scale(li, row));
    }
    Some(y)
}

/// Minimize the convex quadratic `½ yᵀQy + bᵀy` over a polyhedron, exactly.
/// Returns the minimizer and value; `None` when the polyhedron is empty or
/// no face yields a finite critical point (unbounded objective).
pub fn min_quadratic(q: &[QVec], b: &[Rat], c: &ConvexPolyhedron) -> Option<(QVec, Rat)> {
    let n = c.dim;
    let m = c.halfspaces.len();
    let value = |y: &[Rat]| -> Rat {
        let mut qy = rat::zeros(n);
        for i in 0..n {
            qy[i] = dot(&q[i], y);
        }
        dot(y, &qy) / rat::rat_i(2) + dot(b, y)
    };
    let mut best: Option<(QVec, Rat)> = None;
    for k in 0..=n.min(m) {
        for_each_combination(m, k, &mut |idx: &[usize]| {
            if let Some(y) = kkt_point(q, b, c, idx) {
                if c.member(&y) {
                    let v = value(&y);
                    if best.as_ref().is_none_or(|(_, bv)| v < *bv) {
                        best = Some((y, v));
                    }
                }
            }
        });
    }
    best
}

/// Critical point of the quadratic restricted to the affine span of the
/// active set `idx`: solve the KKT system `Qy + b = Aᵀλ`, `Ay = c`.
fn kkt_point(q: &[QVec], b: &[Rat], c: &ConvexPolyhedron, idx: &[usize]) -> Option<QVec> {
    let n = c.dim;
    let k = idx.len();
    let mut rows: Vec<QVec> = Vec::with_capacity(n + k);
    let mut rhs: Vec<Rat> = Vec::with_capacity(n + k);
    for i in 0..n {
        let mut row = q[i].clone();
        for &j in idx {
            row.push(-c.halfspaces[j].normal[i].clone());
        }
        rows.push(row);
        rhs.push(-b[i].clone());
    }
    for &j in idx {
        let mut row = c.halfspaces[j].normal.clone();
        row.extend(rat::zeros(k));
        rows.push(row);
        rhs.push(c.halfspaces[j].offset.clone());
    }
    let sol = linalg::solve(&rows, &rhs, n + k)?;
    Some(sol[..n].to_vec())
}

/// Nearest pair between two polyhedra: minimizes `‖p − q‖²` over `P × Q`.
/// Returns `(p, q, dist²)`; `None` if either set is empty.
pub fn nearest_pair(
    p: &ConvexPolyhedron,
    q: &ConvexPolyhedron,
) -> Option<(QVec, QVec, Rat)> {
    if p.is_empty() || q.is_empty() {
        return None;
    }
    let n = p.dim;
    let prod = p.product(q);
    // Quadratic ‖u − v‖² = yᵀ Q y with Q = 2·[[I,−I],[−I,I]] (the ½ cancels).
    let mut qmat = vec![rat::zeros(2 * n); 2 * n];
    for i in 0..n {
        qmat[i][i] = rat::rat_i(2);
        qmat[n + i][n + i] = rat::rat_i(2);
        qmat[i][n + i] = rat::rat_i(-2);
        qmat[n + i][i] = rat::rat_i(-2);
    }
    let b = rat::zeros(2 * n);
    let (y, val) = min_quadratic(&qmat, &b, &prod)?;
    Some((y[..n].to_vec(), y[n..].to_vec(), val))
}

/// H-representation of the Minkowski difference `{a − b : a ∈ A, b ∈ B}`,
/// by exact projection. `None` when either input is empty.
pub fn minkowski_difference(
    a: &ConvexPolyhedron,
    b: &ConvexPolyhedron,
) -> Option<ConvexPolyhedron> {
    let n = a.dim;
    debug_assert_eq!(n, b.dim);
    // Variables (z, a, b) with z = a − b.
    let dim = 3 * n;
    let mut cons: Vec<LinCon> = Vec::new();
    for h in &a.halfspaces {
        let mut coeffs = rat::zeros(n);
        coeffs.extend(h.normal.clone());
        coeffs.extend(rat::zeros(n));
        cons.push(LinCon::ge(coeffs, h.offset.clone()));
    }
    for h in &b.halfspaces {
        let mut coeffs = rat::zeros(2 * n);
        coeffs.extend(h.normal.clone());
        cons.push(LinCon::ge(coeffs, h.offset.clone()));
    }
    for i in 0..n {
        let mut coeffs = rat::zeros(dim);
        coeffs[i] = rat::rat_i(1);
        coeffs[n + i] = rat::rat_i(-1);
        coeffs[2 * n + i] = rat::rat_i(1);
        cons.push(LinCon::ge(coeffs.clone(), Rat::zero()));
        cons.push(LinCon::ge(rat::vec_neg(&coeffs), Rat::zero()));
    }
    let eliminate: Vec<usize> = (n..3 * n).collect();
    let projected = fm_project(cons, &eliminate)?;
    let halfspaces = projected
        .into_iter()
        .filter(|c| !c.coeffs[..n].iter().all(|v| v.is_zero()))
        .map(|c| Halfspace::new(c.coeffs[..n].to_vec(), c.rhs))
        .collect();
    Some(ConvexPolyhedron::new(n, halfspaces).expect("projection preserves dimension"))
}

/// The public distance operation: exact nearest point plus a floating
/// distance for reporting.
pub fn dist_to_convex(x: &[Rat], c: &ConvexPolyhedron) -> Result<(f64, QVec)> {
    let proj = nearest_point(x, c)?;
    Ok((rat::rat_to_f64(&proj.dist_sq).sqrt(), proj.point))
}
