//! Shape comparison: symmetric-difference area and discrete Hausdorff
//! distance between two closed, simple curves.

use std::fmt::Write as _;

use geo::{Area, BooleanOps, Coord, Distance, Euclidean, LineString, Point, Polygon, Validation};
use gptshape::C64;

use crate::curve::CurveFile;
use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapeMetrics {
    /// Area of the symmetric difference over the truth area.
    pub symmetric_difference: f64,
    /// Two-sided Hausdorff distance over the truth diameter.
    pub hausdorff: f64,
}

impl ShapeMetrics {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        writeln!(out, "symmetric_difference={}", self.symmetric_difference).unwrap();
        writeln!(out, "hausdorff={}", self.hausdorff).unwrap();
        out
    }
}

fn ring(points: &[C64]) -> LineString<f64> {
    let mut coords: Vec<Coord<f64>> = points.iter().map(|z| Coord { x: z.re, y: z.im }).collect();
    coords.push(coords[0]);
    LineString::new(coords)
}

fn polygon(label: &str, curve: &CurveFile) -> CliResult<Polygon<f64>> {
    if !curve.closed {
        return Err(CliError::InvalidCurve(format!("{label} curve is open")));
    }
    let poly = Polygon::new(ring(&curve.points()), Vec::new());
    if !poly.is_valid() {
        return Err(CliError::InvalidCurve(format!("{label} curve is not simple")));
    }
    Ok(poly)
}

/// Largest distance from a vertex of `from` to the polyline `to`.
fn directed_hausdorff(from: &LineString<f64>, to: &LineString<f64>) -> f64 {
    from.points()
        .map(|p: Point<f64>| Euclidean.distance(&p, to))
        .fold(0.0, f64::max)
}

fn diameter(points: &[C64]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            best = best.max((a - b).norm());
        }
    }
    best
}

pub fn compare(truth: &CurveFile, recon: &CurveFile) -> CliResult<ShapeMetrics> {
    let truth_poly = polygon("truth", truth)?;
    let recon_poly = polygon("reconstruction", recon)?;
    let truth_area = truth_poly.unsigned_area();
    let difference = truth_poly.xor(&recon_poly).unsigned_area();
    let hausdorff = directed_hausdorff(truth_poly.exterior(), recon_poly.exterior())
        .max(directed_hausdorff(recon_poly.exterior(), truth_poly.exterior()));
    Ok(ShapeMetrics {
        symmetric_difference: difference / truth_area,
        hausdorff: hausdorff / diameter(&truth.points()),
    })
}
