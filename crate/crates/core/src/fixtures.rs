//! Built-in fixtures: the worked half-plane-union example with its
//! conormal descriptor and stratification, the open-ray example, a
//! catalog of conic sets with exact vanishing-ideal generators for the
//! involutivity suites, perversity instances, and seeded random
//! polyhedral sets for the property suites.

use crate::cone::ConvexCone;
use crate::conic::{ConicPiece, ConicSubset};
use crate::polyhedron::{ConvexPolyhedron, Halfspace};
use crate::pset::{LocallyClosedPolyhedralSet, PolyhedralSet};
use crate::rat::{self, rat_i, QVec, Rat};
use crate::sheaf::{StratifiedSheafDescription, StratumDatum};
use crate::symplectic::expr::ScalarField;
use num::Zero;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

fn v(xs: &[i64]) -> QVec {
    xs.iter().map(|&x| rat_i(x)).collect()
}

fn hs(n: &[i64], b: i64) -> Halfspace {
    Halfspace::new(v(n), rat_i(b))
}

pub fn halfplane(n: &[i64], b: i64) -> ConvexPolyhedron {
    ConvexPolyhedron::new(n.len(), vec![hs(n, b)]).expect("fixture dimensions agree")
}

/// `S = {x ≥ 0} ∪ {y ≥ 0} ⊂ R²`, the running worked example.
pub fn half_plane_union() -> PolyhedralSet {
    PolyhedralSet::new(2, vec![halfplane(&[1, 0], 0), halfplane(&[0, 1], 0)])
        .expect("fixture dimensions agree")
}

/// The expected three-part 0-conormal descriptor of [`half_plane_union`]:
/// the zero section over `S`, `{y = 0, x ≤ 0} × {ξ = 0, η ≥ 0}` and
/// `{x = 0, y ≤ 0} × {η = 0, ξ ≥ 0}`.
pub fn half_plane_union_conormal() -> ConicSubset {
    let mut out = ConicSubset::zero_section(&half_plane_union());
    out.pieces.push(
        ConicPiece::new(
            ConvexPolyhedron::new(2, vec![hs(&[-1, 0], 0), hs(&[0, 1], 0), hs(&[0, -1], 0)])
                .unwrap(),
            ConvexCone::new(2, vec![v(&[1, 0]), v(&[-1, 0]), v(&[0, 1])]).unwrap(),
        )
        .unwrap(),
    );
    out.pieces.push(
        ConicPiece::new(
            ConvexPolyhedron::new(2, vec![hs(&[0, -1], 0), hs(&[1, 0], 0), hs(&[-1, 0], 0)])
                .unwrap(),
            ConvexCone::new(2, vec![v(&[0, 1]), v(&[0, -1]), v(&[1, 0])]).unwrap(),
        )
        .unwrap(),
    );
    out
}

/// The closed positive quadrant over the origin, the extra piece of the
/// level-one truncated microsupport of the worked example.
pub fn origin_quadrant_piece() -> ConicSubset {
    ConicSubset::exact(
        2,
        vec![ConicPiece::new(
            ConvexPolyhedron::point(&rat::zeros(2)),
            ConvexCone::positive_orthant(2),
        )
        .unwrap()],
    )
    .unwrap()
}

/// `SS₁` of the constant sheaf on the worked example: the 0-conormal cone
/// plus the quadrant at the origin.
pub fn half_plane_union_ss1() -> ConicSubset {
    half_plane_union_conormal().union(&origin_quadrant_piece())
}

/// Four-stratum description of the worked example: open stratum, two
/// boundary rays in degree 0, and the origin with stalk degree 1.
pub fn half_plane_union_strata() -> StratifiedSheafDescription {
    let s = half_plane_union();
    let ray_x = ConvexPolyhedron::new(2, vec![hs(&[-1, 0], 0), hs(&[0, 1], 0), hs(&[0, -1], 0)])
        .unwrap();
    let ray_y = ConvexPolyhedron::new(2, vec![hs(&[0, -1], 0), hs(&[1, 0], 0), hs(&[-1, 0], 0)])
        .unwrap();
    let origin = ConvexPolyhedron::point(&rat::zeros(2));
    let boundary = PolyhedralSet::new(2, vec![ray_x.clone(), ray_y.clone()]).unwrap();
    let degrees = |ds: &[i64]| -> BTreeSet<i64> { ds.iter().copied().collect() };

    let open_stratum = LocallyClosedPolyhedralSet::new(s.clone(), boundary).unwrap();
    let ray_x_stratum = LocallyClosedPolyhedralSet::new(
        PolyhedralSet::from_piece(ray_x.clone()),
        PolyhedralSet::from_piece(origin.clone()),
    )
    .unwrap();
    let ray_y_stratum = LocallyClosedPolyhedralSet::new(
        PolyhedralSet::from_piece(ray_y.clone()),
        PolyhedralSet::from_piece(origin.clone()),
    )
    .unwrap();
    let origin_stratum =
        LocallyClosedPolyhedralSet::closed(PolyhedralSet::from_piece(origin.clone()));

    StratifiedSheafDescription {
        dim: 2,
        strata: vec![
            StratumDatum {
                id: "open".into(),
                stratum: open_stratum,
                lambda: ConicSubset::zero_section(&s),
                degrees: degrees(&[0]),
                rank_by_degree: None,
            },
            StratumDatum {
                id: "ray-x".into(),
                stratum: ray_x_stratum,
                lambda: ConicSubset::exact(
                    2,
                    vec![ConicPiece::new(
                        ray_x,
                        ConvexCone::new(2, vec![v(&[1, 0]), v(&[-1, 0]), v(&[0, 1])]).unwrap(),
                    )
                    .unwrap()],
                )
                .unwrap(),
                degrees: degrees(&[0]),
                rank_by_degree: None,
            },
            StratumDatum {
                id: "ray-y".into(),
                stratum: ray_y_stratum,
                lambda: ConicSubset::exact(
                    2,
                    vec![ConicPiece::new(
                        ray_y,
                        ConvexCone::new(2, vec![v(&[0, 1]), v(&[0, -1]), v(&[1, 0])]).unwrap(),
                    )
                    .unwrap()],
                )
                .unwrap(),
                degrees: degrees(&[0]),
                rank_by_degree: None,
            },
            StratumDatum {
                id: "origin".into(),
                stratum: origin_stratum,
                lambda: origin_quadrant_piece(),
                degrees: degrees(&[1]),
                rank_by_degree: None,
            },
        ],
        covers_microsupport: true,
    }
}

/// The open ray `(0, ∞) ⊂ R` as a locally closed set.
pub fn open_ray() -> LocallyClosedPolyhedralSet {
    LocallyClosedPolyhedralSet::new(
        PolyhedralSet::new(1, vec![halfplane(&[1], 0)]).unwrap(),
        PolyhedralSet::new(1, vec![ConvexPolyhedron::point(&rat::zeros(1))]).unwrap(),
    )
    .unwrap()
}

/// `SS₀(k_{(0,∞)})`: the zero section over the closed half-line.
pub fn open_ray_ss0() -> ConicSubset {
    ConicSubset::zero_section(&PolyhedralSet::new(1, vec![halfplane(&[1], 0)]).unwrap())
}

// ---------------------------------------------------------------------------
// vanishing-ideal catalog

/// A conic set with exactly known descriptor and a generating family of
/// its vanishing ideal; the involutivity suites draw random combinations
/// of the generators with polynomial coefficients.
pub struct VanishingFixture {
    pub name: &'static str,
    pub set: ConicSubset,
    pub generators: Vec<ScalarField>,
}

fn parse_fields(dim: usize, exprs: &[&str]) -> Vec<ScalarField> {
    exprs
        .iter()
        .map(|e| ScalarField::parse(dim, e).expect("fixture expressions parse"))
        .collect()
}

/// The catalog of fixtures with exactly known conic sets and vanishing
/// generators.
pub fn vanishing_catalog() -> Vec<VanishingFixture> {
    let conormal = |base: ConvexPolyhedron, annihilated: &[QVec]| -> ConicSubset {
        let dim = base.dim;
        ConicSubset::exact(
            dim,
            vec![ConicPiece::new(base, ConvexCone::subspace_orthogonal_to(dim, annihilated))
                .unwrap()],
        )
        .unwrap()
    };
    let line_x1 = ConvexPolyhedron::new(2, vec![hs(&[1, 0], 0), hs(&[-1, 0], 0)]).unwrap();
    let line_x2_3 = ConvexPolyhedron::new(2, vec![hs(&[0, 1], 3), hs(&[0, -1], -3)]).unwrap();
    let diagonal = ConvexPolyhedron::new(2, vec![hs(&[1, -1], 0), hs(&[-1, 1], 0)]).unwrap();
    let axis_3d = ConvexPolyhedron::new(
        3,
        vec![hs(&[1, 0, 0], 0), hs(&[-1, 0, 0], 0), hs(&[0, 1, 0], 0), hs(&[0, -1, 0], 0)],
    )
    .unwrap();
    let quadrant = ConvexPolyhedron::new(2, vec![hs(&[1, 0], 0), hs(&[0, 1], 0)]).unwrap();

    vec![
        VanishingFixture {
            name: "zero-section-plane",
            set: ConicSubset::zero_section(&PolyhedralSet::full(2)),
            generators: parse_fields(2, &["xi1", "xi2"]),
        },
        VanishingFixture {
            name: "conormal-line",
            set: conormal(line_x1, &[v(&[0, 1])]),
            generators: parse_fields(2, &["x1", "xi2"]),
        },
        VanishingFixture {
            name: "conormal-point",
            set: conormal(ConvexPolyhedron::point(&rat::zeros(2)), &[]),
            generators: parse_fields(2, &["x1", "x2"]),
        },
        VanishingFixture {
            name: "conormal-shifted-line",
            set: conormal(line_x2_3, &[v(&[1, 0])]),
            generators: parse_fields(2, &["(- x2 3)", "xi1"]),
        },
        VanishingFixture {
            name: "conormal-diagonal",
            set: conormal(diagonal, &[v(&[1, 1])]),
            generators: parse_fields(2, &["(- x1 x2)", "(+ xi1 xi2)"]),
        },
        VanishingFixture {
            name: "halfplane-conormal",
            set: crate::normalcone::conormal0(
                &PolyhedralSet::new(2, vec![halfplane(&[1, 0], 0)]).unwrap(),
            )
            .unwrap(),
            generators: parse_fields(2, &["xi2", "(* x1 xi1)"]),
        },
        VanishingFixture {
            name: "quadrant-conormal",
            set: crate::normalcone::conormal0(&PolyhedralSet::from_piece(quadrant)).unwrap(),
            generators: parse_fields(2, &["(* x1 xi1)", "(* x2 xi2)"]),
        },
        VanishingFixture {
            name: "halfplane-union-ss0",
            set: half_plane_union_conormal(),
            generators: parse_fields(2, &["(* xi1 xi2)", "(* x1 xi1)", "(* x2 xi2)"]),
        },
        VanishingFixture {
            name: "halfplane-union-ss1",
            set: half_plane_union_ss1(),
            generators: parse_fields(2, &["(* x1 xi1)", "(* x2 xi2)"]),
        },
        VanishingFixture {
            name: "halfline-ss0",
            set: open_ray_ss0(),
            generators: parse_fields(1, &["xi1", "(* x1 xi1)"]),
        },
        VanishingFixture {
            name: "halfline-conormal",
            set: crate::normalcone::conormal0(
                &PolyhedralSet::new(1, vec![halfplane(&[1], 0)]).unwrap(),
            )
            .unwrap(),
            generators: parse_fields(1, &["(* x1 xi1)"]),
        },
        VanishingFixture {
            name: "conormal-axis-3d",
            set: conormal(axis_3d, &[v(&[0, 0, 1])]),
            generators: parse_fields(3, &["x1", "x2", "xi3"]),
        },
    ]
}

/// Random combination `Σ aᵢ gᵢ` of generators, with affine coefficients
/// drawn from small integers. Vanishes on the fixture set by construction.
pub fn random_ideal_element(
    dim: usize,
    generators: &[ScalarField],
    rng: &mut ChaCha8Rng,
) -> ScalarField {
    use crate::symplectic::expr::{Expr, Sym};
    let mut acc = Expr::Const(Rat::zero());
    for g in generators {
        // coefficient: c₀ + Σ cⱼxⱼ + Σ dⱼξⱼ
        let mut coeff = Expr::Const(rat_i(rng.gen_range(-3..=3)));
        for j in 0..dim {
            let cx = rng.gen_range(-2..=2);
            if cx != 0 {
                coeff = Expr::Add(
                    Box::new(coeff),
                    Box::new(Expr::Mul(
                        Box::new(Expr::Const(rat_i(cx))),
                        Box::new(Expr::Var(Sym::Base(j))),
                    )),
                );
            }
            let cxi = rng.gen_range(-2..=2);
            if cxi != 0 {
                coeff = Expr::Add(
                    Box::new(coeff),
                    Box::new(Expr::Mul(
                        Box::new(Expr::Const(rat_i(cxi))),
                        Box::new(Expr::Var(Sym::Fiber(j))),
                    )),
                );
            }
        }
        acc = Expr::Add(
            Box::new(acc),
            Box::new(Expr::Mul(Box::new(coeff), Box::new(g.expr.clone()))),
        );
    }
    ScalarField::new(dim, acc)
}

// ---------------------------------------------------------------------------
// random polyhedral data

/// A random nonempty polyhedral set: one to three pieces of one to three
/// half-spaces each, with small integer data.
pub fn random_polyhedral_set(dim: usize, rng: &mut ChaCha8Rng) -> PolyhedralSet {
    loop {
        let n_pieces = rng.gen_range(1..=3);
        let mut pieces = Vec::new();
        for _ in 0..n_pieces {
            let n_halfspaces = rng.gen_range(1..=3);
            let mut halfspaces = Vec::new();
            for _ in 0..n_halfspaces {
                let mut normal = rat::zeros(dim);
                while rat::vec_is_zero(&normal) {
                    for c in normal.iter_mut() {
                        *c = rat_i(rng.gen_range(-2..=2));
                    }
                }
                let offset = rat::rat(rng.gen_range(-4..=4), 2);
                halfspaces.push(Halfspace::new(normal, offset));
            }
            pieces.push(ConvexPolyhedron::new(dim, halfspaces).unwrap());
        }
        let s = PolyhedralSet::new(dim, pieces).unwrap();
        if !s.is_empty() {
            return s;
        }
    }
}

/// A smaller random nonempty set (one or two pieces of one or two
/// half-spaces): product computations square the descriptor sizes, so
/// product-formula suites draw factors from here.
pub fn random_small_polyhedral_set(dim: usize, rng: &mut ChaCha8Rng) -> PolyhedralSet {
    loop {
        let n_pieces = rng.gen_range(1..=2);
        let mut pieces = Vec::new();
        for _ in 0..n_pieces {
            let n_halfspaces = rng.gen_range(1..=2);
            let mut halfspaces = Vec::new();
            for _ in 0..n_halfspaces {
                let mut normal = rat::zeros(dim);
                while rat::vec_is_zero(&normal) {
                    for c in normal.iter_mut() {
                        *c = rat_i(rng.gen_range(-2..=2));
                    }
                }
                halfspaces.push(Halfspace::new(normal, rat_i(rng.gen_range(-2..=2))));
            }
            pieces.push(ConvexPolyhedron::new(dim, halfspaces).unwrap());
        }
        let s = PolyhedralSet::new(dim, pieces).unwrap();
        if !s.is_empty() {
            return s;
        }
    }
}

/// A random point on a face of the set: pick a piece and turn a random
/// subset of its constraints into equalities, then solve.
pub fn random_face_point(s: &PolyhedralSet, rng: &mut ChaCha8Rng) -> Option<QVec> {
    use crate::feas::LinCon;
    let nonempty: Vec<&ConvexPolyhedron> = s.pieces.iter().filter(|p| !p.is_empty()).collect();
    if nonempty.is_empty() {
        return None;
    }
    for _ in 0..12 {
        let piece = nonempty[rng.gen_range(0..nonempty.len())];
        let mut sys = piece.to_system();
        for h in &piece.halfspaces {
            if rng.gen_bool(0.5) {
                sys.push(LinCon::ge(rat::vec_neg(&h.normal), -h.offset.clone()));
            }
        }
        // keep coordinates within a window so probes stay at desk scale
        for i in 0..s.dim {
            let mut e = rat::zeros(s.dim);
            e[i] = rat_i(1);
            sys.push(LinCon::ge(e.clone(), rat_i(-8)));
            sys.push(LinCon::ge(rat::vec_neg(&e), rat_i(-8)));
        }
        if let Some(w) = sys.witness() {
            return Some(w);
        }
    }
    piece_witness(nonempty[0])
}

fn piece_witness(p: &ConvexPolyhedron) -> Option<QVec> {
    p.witness_point()
}

/// A random covector with small integer entries (possibly zero).
pub fn random_covector(dim: usize, rng: &mut ChaCha8Rng) -> QVec {
    let mut xi = rat::zeros(dim);
    if rng.gen_bool(0.1) {
        return xi;
    }
    while rat::vec_is_zero(&xi) {
        for c in xi.iter_mut() {
            *c = rat_i(rng.gen_range(-3..=3));
        }
    }
    xi
}
