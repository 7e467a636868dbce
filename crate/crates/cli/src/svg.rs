//! Minimal SVG projections of conic descriptors: base-space slices with
//! fiber fans drawn at representative base points. Output only; byte
//! stability across runs is not promised (structure is).

use microsupport::conic::ConicSubset;
use microsupport::polyhedron::ConvexPolyhedron;
use microsupport::rat::{rat_i, rat_to_f64, QVec};

const VIEW: f64 = 3.0;
const SIZE: f64 = 480.0;

fn map(x: f64, y: f64) -> (f64, f64) {
    (
        (x + VIEW) / (2.0 * VIEW) * SIZE,
        SIZE - (y + VIEW) / (2.0 * VIEW) * SIZE,
    )
}

fn polygon_points(piece: &ConvexPolyhedron) -> Option<String> {
    let clip = ConvexPolyhedron::box_window(2, rat_i(-3), rat_i(3));
    let bounded = piece.intersect(&clip);
    let mut vertices: Vec<(f64, f64)> = bounded
        .vertices()
        .iter()
        .map(|v| (rat_to_f64(&v[0]), rat_to_f64(&v[1])))
        .collect();
    if vertices.is_empty() {
        return None;
    }
    let cx = vertices.iter().map(|v| v.0).sum::<f64>() / vertices.len() as f64;
    let cy = vertices.iter().map(|v| v.1).sum::<f64>() / vertices.len() as f64;
    vertices.sort_by(|a, b| {
        (a.1 - cy)
            .atan2(a.0 - cx)
            .partial_cmp(&(b.1 - cy).atan2(b.0 - cx))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let pts: Vec<String> = vertices
        .iter()
        .map(|&(x, y)| {
            let (px, py) = map(x, y);
            format!("{px:.1},{py:.1}")
        })
        .collect();
    Some(pts.join(" "))
}

/// Render the base polygons of each piece plus fiber-generator arrows at
/// a witness point of every base.
pub fn render_conic(subset: &ConicSubset) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    // axes
    let (x0, y0) = map(-VIEW, 0.0);
    let (x1, y1) = map(VIEW, 0.0);
    out.push_str(&format!(
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y1:.1}\" stroke=\"#ccc\"/>\n"
    ));
    let (x0, y0) = map(0.0, -VIEW);
    let (x1, y1) = map(0.0, VIEW);
    out.push_str(&format!(
        "<line x1=\"{x0:.1}\" y1=\"{y0:.1}\" x2=\"{x1:.1}\" y2=\"{y1:.1}\" stroke=\"#ccc\"/>\n"
    ));
    let palette = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"];
    for (i, piece) in subset.pieces.iter().enumerate() {
        let color = palette[i % palette.len()];
        if let Some(points) = polygon_points(&piece.base) {
            out.push_str(&format!(
                "<polygon points=\"{points}\" fill=\"{color}\" fill-opacity=\"0.18\" stroke=\"{color}\"/>\n"
            ));
        }
        // fiber fan at a witness point of the base
        if let Some(w) = piece.base.witness_point() {
            let bx = rat_to_f64(&w[0]).clamp(-VIEW, VIEW);
            let by = rat_to_f64(&w[1]).clamp(-VIEW, VIEW);
            let (px, py) = map(bx, by);
            out.push_str(&format!(
                "<circle cx=\"{px:.1}\" cy=\"{py:.1}\" r=\"3\" fill=\"{color}\"/>\n"
            ));
            for g in fan_directions(&piece.fiber.generating_vectors()) {
                let (qx, qy) = map(bx + 0.6 * g.0, by + 0.6 * g.1);
                out.push_str(&format!(
                    "<line x1=\"{px:.1}\" y1=\"{py:.1}\" x2=\"{qx:.1}\" y2=\"{qy:.1}\" stroke=\"{color}\" stroke-width=\"2\" marker-end=\"none\"/>\n"
                ));
            }
        }
    }
    out.push_str("</svg>\n");
    out
}

fn fan_directions(generators: &[QVec]) -> Vec<(f64, f64)> {
    generators
        .iter()
        .filter_map(|g| {
            let x = rat_to_f64(&g[0]);
            let y = rat_to_f64(&g[1]);
            let n = (x * x + y * y).sqrt();
            if n > 1e-12 {
                Some((x / n, y / n))
            } else {
                None
            }
        })
        .collect()
}
