//! Polyhedral cell complexes from line arrangements in a bounded window
//! (dimensions 1 and 2), with signed incidence, and exact cohomology
//! ranks of locally closed unions of cells.
//!
//! For a locally closed union of cells `L`, the subquotient cochain
//! complex spanned by the cells of `L` (with the ambient coboundary)
//! computes the cohomology of the extension by zero of the constant sheaf
//! on `L` over the window. Pairs and supported sections are derived from
//! these complexes by restriction maps and mapping cones.

use crate::error::{Error, Result};
use crate::polyhedron::ConvexPolyhedron;
use crate::rat::{self, dot, QVec, Rat};
use num::{One, Signed, Zero};

/// A hyperplane `⟨normal, x⟩ = offset` in canonical primitive form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Line {
    pub normal: QVec,
    pub offset: Rat,
}

impl Line {
    /// Canonicalize; `None` for a zero normal.
    pub fn canonical(normal: &[Rat], offset: &Rat) -> Option<Line> {
        let prim = rat::primitive(normal, true)?;
        let idx = normal.iter().position(|v| !v.is_zero()).unwrap();
        let scale = &normal[idx] / Rat::from_integer(prim[idx].clone());
        Some(Line {
            normal: prim.into_iter().map(Rat::from_integer).collect(),
            offset: offset / &scale,
        })
    }

    fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.normal, x) - &self.offset
    }
}

#[derive(Clone, Debug)]
pub struct ComplexCell {
    pub dim: usize,
    /// An exact relative-interior point.
    pub witness: QVec,
    /// Boundary cells one dimension lower, with incidence coefficients.
    pub faces: Vec<(usize, i8)>,
}

/// A regular cell complex subdividing a bounded convex window.
#[derive(Clone, Debug)]
pub struct CellComplex {
    pub ambient_dim: usize,
    pub cells: Vec<ComplexCell>,
}

impl CellComplex {
    /// Cells of each dimension, as index lists.
    fn by_dim(&self, d: usize) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| self.cells[i].dim == d).collect()
    }

    /// `∂∂ = 0` over the whole complex; used by construction tests.
    pub fn boundary_squared_is_zero(&self) -> bool {
        for (i, cell) in self.cells.iter().enumerate() {
            if cell.dim < 2 {
                continue;
            }
            let mut acc: std::collections::HashMap<usize, i64> = std::collections::HashMap::new();
            for &(e, ce) in &cell.faces {
                for &(v, cv) in &self.cells[e].faces {
                    *acc.entry(v).or_insert(0) += ce as i64 * cv as i64;
                }
            }
            if acc.values().any(|&v| v != 0) {
                eprintln!("boundary failure at cell {i}");
                return false;
            }
        }
        true
    }

    /// Cohomology ranks (degree-indexed, length `ambient_dim + 2`) of the
    /// extension-by-zero complex of the cells selected by `in_set`.
    pub fn ranks(&self, in_set: &[bool]) -> Vec<usize> {
        let max_deg = self.ambient_dim + 1;
        let mut counts = vec![0usize; max_deg + 1];
        let mut ranks = vec![0usize; max_deg + 1];
        for d in 0..=max_deg {
            let rows = self.delta_matrix(in_set, in_set, d);
            counts[d] = self.by_dim(d).iter().filter(|&&i| in_set[i]).count();
            ranks[d] = rank_small(rows);
        }
        let mut out = vec![0usize; max_deg + 1];
        for d in 0..=max_deg {
            let below = if d == 0 { 0 } else { ranks[d - 1] };
            out[d] = counts[d] - ranks[d] - below;
        }
        out
    }

    /// Matrix of the coboundary from degree `d` cells of `from` into
    /// degree `d+1` cells of `to`, as sparse rows (one per `d+1` cell).
    fn delta_matrix(&self, from: &[bool], to: &[bool], d: usize) -> Vec<Vec<(usize, i64)>> {
        let src: Vec<usize> = self.by_dim(d).into_iter().filter(|&i| from[i]).collect();
        let dst: Vec<usize> = self.by_dim(d + 1).into_iter().filter(|&i| to[i]).collect();
        let col_of: std::collections::HashMap<usize, usize> =
            src.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        dst.iter()
            .map(|&t| {
                self.cells[t]
                    .faces
                    .iter()
                    .filter_map(|&(s, c)| col_of.get(&s).map(|&col| (col, c as i64)))
                    .collect()
            })
            .collect()
    }

    /// Ranks of the homotopy fiber of the restriction `C•(m1) → C•(m2)`
    /// for cell sets `m2 ⊆ m1`: the supported-section ranks
    /// `H^j = H^j(Cone(restriction)[−1])`.
    pub fn fiber_ranks(&self, m1: &[bool], m2: &[bool]) -> Vec<usize> {
        let max_deg = self.ambient_dim + 2;
        // Fib^j = C^j(m1) ⊕ C^{j−1}(m2), d(a, b) = (δa, r(a) − δb).
        let dim_of = |j: i64| -> usize {
            let a = if j >= 0 {
                self.by_dim(j as usize).iter().filter(|&&i| m1[i]).count()
            } else {
                0
            };
            let b = if j >= 1 {
                self.by_dim((j - 1) as usize).iter().filter(|&&i| m2[i]).count()
            } else {
                0
            };
            a + b
        };
        let rank_of = |j: i64| -> usize {
            // d^j: Fib^j → Fib^{j+1}; rows indexed by target basis.
            if j < 0 {
                return 0;
            }
            let j = j as usize;
            let src_a: Vec<usize> = self.by_dim(j).into_iter().filter(|&i| m1[i]).collect();
            let src_b: Vec<usize> = if j >= 1 {
                self.by_dim(j - 1).into_iter().filter(|&i| m2[i]).collect()
            } else {
                Vec::new()
            };
            let dst_a: Vec<usize> = self.by_dim(j + 1).into_iter().filter(|&i| m1[i]).collect();
            let dst_b: Vec<usize> = self.by_dim(j).into_iter().filter(|&i| m2[i]).collect();
            let cols_a: std::collections::HashMap<usize, usize> =
                src_a.iter().enumerate().map(|(k, &i)| (i, k)).collect();
            let cols_b: std::collections::HashMap<usize, usize> =
                src_b.iter().enumerate().map(|(k, &i)| (i, src_a.len() + k)).collect();
            let mut rows: Vec<Vec<(usize, i64)>> = Vec::new();
            for &t in &dst_a {
                // (δa)_t
                let row: Vec<(usize, i64)> = self.cells[t]
                    .faces
                    .iter()
                    .filter_map(|&(s, c)| cols_a.get(&s).map(|&col| (col, c as i64)))
                    .collect();
                rows.push(row);
            }
            for &t in &dst_b {
                // (r(a) − δb)_t
                let mut row: Vec<(usize, i64)> = Vec::new();
                if let Some(&col) = cols_a.get(&t) {
                    row.push((col, 1));
                }
                for &(s, c) in &self.cells[t].faces {
                    if let Some(&col) = cols_b.get(&s) {
                        row.push((col, -(c as i64)));
                    }
                }
                rows.push(row);
            }
            rank_small(rows)
        };
        let mut out = vec![0usize; max_deg + 1];
        for (j, slot) in out.iter_mut().enumerate() {
            let dim_j = dim_of(j as i64);
            if dim_j == 0 {
                continue;
            }
            let below = rank_of(j as i64 - 1);
            let here = rank_of(j as i64);
            *slot = dim_j - here - below;
        }
        out
    }
}

/// Rank of a sparse integer matrix. Entries stay tiny for incidence-type
/// matrices; falls back to rationals if growth is ever detected.
fn rank_small(rows: Vec<Vec<(usize, i64)>>) -> usize {
    let ncols = rows
        .iter()
        .flat_map(|r| r.iter().map(|&(c, _)| c + 1))
        .max()
        .unwrap_or(0);
    let mut dense: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| {
            let mut row = vec![0i128; ncols];
            for &(c, v) in r {
                row[c] += v as i128;
            }
            row
        })
        .collect();
    dense.retain(|r| r.iter().any(|&v| v != 0));
    let mut rank = 0;
    let nrows = dense.len();
    for col in 0..ncols {
        // prefer a ±1 pivot to avoid growth
        let pick = (rank..nrows)
            .filter(|&r| dense[r][col] != 0)
            .min_by_key(|&r| dense[r][col].unsigned_abs());
        let Some(p) = pick else { continue };
        dense.swap(rank, p);
        let pivot = dense[rank][col];
        for r in 0..nrows {
            if r != rank && dense[r][col] != 0 {
                let a = dense[r][col];
                // row_r := pivot·row_r − a·row_pivot (keeps integers)
                #[allow(clippy::needless_range_loop)]
                for c2 in 0..ncols {
                    dense[r][c2] = pivot
                        .checked_mul(dense[r][c2])
                        .and_then(|x| a.checked_mul(dense[rank][c2]).map(|y| x - y))
                        .unwrap_or_else(rank_overflow);
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

fn rank_overflow() -> i128 {
    // 128-bit overflow would need astronomically unbalanced incidence
    // data; the complexes here keep entries within a few bits.
    panic!("integer overflow in incidence rank computation")
}

// ---------------------------------------------------------------------------
// construction

/// Convex polygon from counterclockwise vertices, as an H-polyhedron.
pub fn polygon_hrep(vertices: &[QVec]) -> ConvexPolyhedron {
    let n = vertices.len();
    let mut hs = Vec::new();
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        let d = rat::vec_sub(q, p);
        // inward normal for ccw order
        let normal = vec![-d[1].clone(), d[0].clone()];
        let offset = dot(&normal, p);
        hs.push(crate::polyhedron::Halfspace::new(normal, offset));
    }
    ConvexPolyhedron::new(2, hs).expect("polygon dimensions agree")
}

/// Rational 16-gon inscribed in the circle of radius `r` at `center`,
/// via rational points on the unit circle.
pub fn rational_ball_window(center: &[Rat], r: &Rat) -> ConvexPolyhedron {
    let dirs = unit_circle_points_16();
    let vertices: Vec<QVec> = dirs
        .iter()
        .map(|d| rat::vec_add(center, &rat::vec_scale(r, d)))
        .collect();
    polygon_hrep(&vertices)
}

/// Sixteen exact rational unit vectors in counterclockwise order.
pub fn unit_circle_points_16() -> Vec<QVec> {
    // (cos, sin) = ((1−t²)/(1+t²), 2t/(1+t²)) for rational t, plus (−1,0).
    let ts = [
        rat::rat(0, 1),
        rat::rat(1, 6),
        rat::rat(2, 5),
        rat::rat(3, 4),
        rat::rat(1, 1),
        rat::rat(4, 3),
        rat::rat(5, 2),
        rat::rat(6, 1),
    ];
    let mut upper: Vec<QVec> = ts
        .iter()
        .map(|t| {
            let t2 = t * t;
            let den = Rat::one() + &t2;
            vec![(Rat::one() - &t2) / &den, (rat::rat_i(2) * t) / &den]
        })
        .collect();
    let mut pts = upper.clone();
    pts.push(vec![rat::rat_i(-1), rat::rat_i(0)]);
    upper.reverse();
    for p in upper.iter().take(ts.len() - 1) {
        pts.push(vec![p[0].clone(), -p[1].clone()]);
    }
    pts
}

/// Build the arrangement complex of `lines` clipped to a bounded convex
/// `window`, in ambient dimension 2.
pub fn build_2d(lines: &[Line], window: &ConvexPolyhedron) -> Result<CellComplex> {
    let mut all: Vec<Line> = Vec::new();
    let push_line = |l: Line, all: &mut Vec<Line>| {
        if !all.contains(&l) {
            all.push(l);
        }
    };
    for l in lines {
        push_line(l.clone(), &mut all);
    }
    for h in &window.halfspaces {
        if let Some(l) = Line::canonical(&h.normal, &h.offset) {
            push_line(l, &mut all);
        }
    }
    let k = all.len();

    // vertices: pairwise intersections inside the window
    let mut vertices: Vec<QVec> = Vec::new();
    for i in 0..k {
        for j in (i + 1)..k {
            let a = &all[i];
            let b = &all[j];
            let det = &a.normal[0] * &b.normal[1] - &a.normal[1] * &b.normal[0];
            if det.is_zero() {
                continue;
            }
            let x = (&a.offset * &b.normal[1] - &a.normal[1] * &b.offset) / &det;
            let y = (&a.normal[0] * &b.offset - &a.offset * &b.normal[0]) / &det;
            let v = vec![x, y];
            if window.member(&v) && !vertices.contains(&v) {
                vertices.push(v);
            }
        }
    }

    let mut cells: Vec<ComplexCell> = Vec::new();
    for v in &vertices {
        cells.push(ComplexCell { dim: 0, witness: v.clone(), faces: Vec::new() });
    }

    // edges along each line between consecutive vertices
    let mut edge_info: Vec<(usize, QVec)> = Vec::new(); // (line idx, midpoint)
    for (li, line) in all.iter().enumerate() {
        let d = vec![-line.normal[1].clone(), line.normal[0].clone()];
        let mut on_line: Vec<(Rat, usize)> = vertices
            .iter()
            .enumerate()
            .filter(|(_, v)| line.eval(v).is_zero())
            .map(|(vi, v)| (dot(&d, v), vi))
            .collect();
        on_line.sort_by(|a, b| a.0.cmp(&b.0));
        for w in on_line.windows(2) {
            let (t0, v0) = (&w[0].0, w[0].1);
            let (t1, v1) = (&w[1].0, w[1].1);
            if t0 == t1 {
                continue;
            }
            let mid = rat::vec_scale(
                &rat::rat(1, 2),
                &rat::vec_add(&vertices[v0], &vertices[v1]),
            );
            if !window.member(&mid) {
                continue;
            }
            // midpoint must not lie on another line (else a vertex splits it)
            debug_assert!(all
                .iter()
                .enumerate()
                .all(|(lj, l)| lj == li || !l.eval(&mid).is_zero()));
            cells.push(ComplexCell {
                dim: 1,
                witness: mid.clone(),
                faces: vec![(v0, -1), (v1, 1)],
            });
            edge_info.push((li, mid));
        }
    }

    // faces from edge side-witness points, deduplicated by sign vector
    let n_vertices = vertices.len();
    let n_edges = edge_info.len();
    let sign_of = |x: &QVec| -> Vec<i8> {
        all.iter()
            .map(|l| {
                let v = l.eval(x);
                if v.is_zero() {
                    0
                } else if v.is_positive() {
                    1
                } else {
                    -1
                }
            })
            .collect()
    };
    let mut face_signs: Vec<Vec<i8>> = Vec::new();
    let mut face_witness: Vec<QVec> = Vec::new();
    for (li, mid) in &edge_info {
        let line = &all[*li];
        // largest safe step that crosses no other line from the midpoint
        let mut delta = Rat::one();
        for (lj, l) in all.iter().enumerate() {
            if lj == *li {
                continue;
            }
            let num = l.eval(mid).abs();
            let den = dot(&l.normal, &line.normal).abs();
            if den.is_zero() {
                continue;
            }
            let bound = num / den;
            if bound < delta {
                delta = bound;
            }
        }
        delta /= rat::rat_i(2);
        for sign in [1i64, -1] {
            let w = rat::vec_add(mid, &rat::vec_scale(&(rat::rat_i(sign) * &delta), &line.normal));
            if !window.member(&w) {
                continue;
            }
            let sv = sign_of(&w);
            debug_assert!(sv.iter().all(|&s| s != 0));
            if !face_signs.contains(&sv) {
                face_signs.push(sv);
                face_witness.push(w);
            }
        }
    }
    // boundary edges of each face by sign compatibility
    let edge_signs: Vec<Vec<i8>> = edge_info.iter().map(|(_, m)| sign_of(m)).collect();
    for (fi, sv) in face_signs.iter().enumerate() {
        let mut faces = Vec::new();
        for (ei, es) in edge_signs.iter().enumerate() {
            let compatible = es
                .iter()
                .zip(sv.iter())
                .all(|(&se, &sf)| se == sf || se == 0);
            if !compatible {
                continue;
            }
            let li = edge_info[ei].0;
            if es[li] != 0 {
                continue;
            }
            // orientation: +1 when the face sits on the negative side of
            // the edge's line (left of the canonical edge direction)
            let coeff = if sv[li] < 0 { 1 } else { -1 };
            faces.push((n_vertices + ei, coeff));
        }
        cells.push(ComplexCell { dim: 2, witness: face_witness[fi].clone(), faces });
    }
    let _ = n_edges;
    let complex = CellComplex { ambient_dim: 2, cells };
    debug_assert!(complex.boundary_squared_is_zero());
    Ok(complex)
}

/// One-dimensional analogue: breakpoints inside `[lo, hi]`.
pub fn build_1d(breakpoints: &[Rat], lo: &Rat, hi: &Rat) -> Result<CellComplex> {
    if lo >= hi {
        return Err(Error::InvalidInput("empty window".into()));
    }
    let mut pts: Vec<Rat> = vec![lo.clone(), hi.clone()];
    for b in breakpoints {
        if b > lo && b < hi && !pts.contains(b) {
            pts.push(b.clone());
        }
    }
    pts.sort();
    let mut cells: Vec<ComplexCell> = pts
        .iter()
        .map(|p| ComplexCell { dim: 0, witness: vec![p.clone()], faces: Vec::new() })
        .collect();
    for i in 0..pts.len() - 1 {
        let mid = (&pts[i] + &pts[i + 1]) / rat::rat_i(2);
        cells.push(ComplexCell { dim: 1, witness: vec![mid], faces: vec![(i, -1), (i + 1, 1)] });
    }
    Ok(CellComplex { ambient_dim: 1, cells })
}

/// Smallest positive breach `−φ(v) > 0` over all complex vertices; used to
/// place the shifted level line `{φ = −η}` strictly inside the first cell
/// layer of `{φ < 0}`. `None` when `φ ≥ 0` on every vertex.
pub fn critical_shift(values_at_vertices: &[Rat]) -> Option<Rat> {
    values_at_vertices
        .iter()
        .filter(|v| v.is_negative())
        .map(|v| -v.clone())
        .min()
        .map(|m| m / rat::rat_i(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::rat_i;

    fn unit_box() -> ConvexPolyhedron {
        ConvexPolyhedron::box_window(2, rat_i(-1), rat_i(1))
    }

    fn lines(ls: &[(i64, i64, i64)]) -> Vec<Line> {
        ls.iter()
            .map(|&(a, b, c)| {
                Line::canonical(&[rat_i(a), rat_i(b)], &rat_i(c)).unwrap()
            })
            .collect()
    }

    #[test]
    fn box_complex_counts() {
        let c = build_2d(&[], &unit_box()).unwrap();
        let v = c.cells.iter().filter(|x| x.dim == 0).count();
        let e = c.cells.iter().filter(|x| x.dim == 1).count();
        let f = c.cells.iter().filter(|x| x.dim == 2).count();
        assert_eq!((v, e, f), (4, 4, 1));
        assert!(c.boundary_squared_is_zero());
    }

    #[test]
    fn crossing_lines_complex() {
        let c = build_2d(&lines(&[(1, 0, 0), (0, 1, 0)]), &unit_box()).unwrap();
        let v = c.cells.iter().filter(|x| x.dim == 0).count();
        let e = c.cells.iter().filter(|x| x.dim == 1).count();
        let f = c.cells.iter().filter(|x| x.dim == 2).count();
        // 4 corners + 4 edge midpoints + center = 9 vertices,
        // 12 edges, 4 faces; Euler characteristic 1
        assert_eq!((v, e, f), (9, 12, 4));
        assert_eq!(v + f - e, 1);
    }

    #[test]
    fn full_window_is_contractible() {
        let c = build_2d(&lines(&[(1, 0, 0)]), &unit_box()).unwrap();
        let all = vec![true; c.cells.len()];
        let ranks = c.ranks(&all);
        assert_eq!(ranks[0], 1);
        assert!(ranks[1..].iter().all(|&r| r == 0));
    }

    #[test]
    fn open_interval_cohomology_sits_in_degree_one() {
        // L = (0, 1) inside [−1, 1]: extension by zero has H¹ = k
        let c = build_1d(&[rat_i(0)], &rat_i(-1), &rat_i(1)).unwrap();
        let in_set: Vec<bool> = c
            .cells
            .iter()
            .map(|cell| cell.dim == 1 && cell.witness[0] > rat_i(0))
            .collect();
        let ranks = c.ranks(&in_set);
        assert_eq!(ranks[0], 0);
        assert_eq!(ranks[1], 1);
    }

    #[test]
    fn half_open_interval_is_acyclic() {
        // L = [0, 1) inside [−1, 1] (cell model: vertex 0 plus open edge)
        let c = build_1d(&[rat_i(0)], &rat_i(-1), &rat_i(1)).unwrap();
        let in_set: Vec<bool> = c
            .cells
            .iter()
            .map(|cell| {
                (cell.dim == 0 && cell.witness[0] == rat_i(0))
                    || (cell.dim == 1 && cell.witness[0] > rat_i(0))
            })
            .collect();
        let ranks = c.ranks(&in_set);
        assert!(ranks.iter().all(|&r| r == 0));
    }

    #[test]
    fn annulus_has_first_cohomology() {
        // window minus an open middle box: H⁰ = H¹ = k
        let c = build_2d(
            &lines(&[(1, 0, 2), (1, 0, -2), (0, 1, 2), (0, 1, -2)]),
            &ConvexPolyhedron::box_window(2, rat_i(-4), rat_i(4)),
        )
        .unwrap();
        let inner = ConvexPolyhedron::box_window(2, rat_i(-2), rat_i(2));
        // open inner box = strict interior; annulus = complement cells
        let in_set: Vec<bool> = c
            .cells
            .iter()
            .map(|cell| {
                !(inner.member(&cell.witness)
                    && inner.halfspaces.iter().all(|h| !h.boundary_contains(&cell.witness)))
            })
            .collect();
        let ranks = c.ranks(&in_set);
        assert_eq!(ranks[0], 1);
        assert_eq!(ranks[1], 1);
        assert_eq!(ranks[2], 0);
    }

    #[test]
    fn sixteen_gon_is_exactly_unit_length() {
        let pts = unit_circle_points_16();
        assert_eq!(pts.len(), 16);
        for p in &pts {
            assert_eq!(rat::norm_sq(p), rat_i(1));
        }
        let window = rational_ball_window(&[rat_i(0), rat_i(0)], &rat_i(1));
        assert_eq!(window.halfspaces.len(), 16);
        assert!(window.member(&[rat_i(0), rat_i(0)]));
        assert!(!window.member(&[rat_i(1), rat_i(1)]));
    }

    #[test]
    fn fiber_ranks_of_identity_are_zero() {
        let c = build_2d(&lines(&[(1, 0, 0)]), &unit_box()).unwrap();
        let all = vec![true; c.cells.len()];
        let ranks = c.fiber_ranks(&all, &all);
        assert!(ranks.iter().all(|&r| r == 0));
    }

    #[test]
    fn fiber_ranks_with_empty_target_reduce_to_plain_ranks() {
        let c = build_2d(&[], &unit_box()).unwrap();
        let all = vec![true; c.cells.len()];
        let none = vec![false; c.cells.len()];
        assert_eq!(c.fiber_ranks(&all, &none)[0], 1);
    }
}
