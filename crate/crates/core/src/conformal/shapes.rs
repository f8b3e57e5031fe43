use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use super::ExteriorMap;
use crate::C64;

/// A user-supplied closed curve `t -> z(t)`, `2π`-periodic.
#[derive(Clone)]
pub struct ParametricCurve {
    pub label: String,
    eval: Arc<dyn Fn(f64) -> C64 + Send + Sync>,
}

impl ParametricCurve {
    pub fn new(label: impl Into<String>, eval: impl Fn(f64) -> C64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn eval(&self, t: f64) -> C64 {
        (self.eval)(t)
    }
}

impl fmt::Debug for ParametricCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricCurve")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// Boundary descriptions understood by [`boundary_frame`](super::boundary_frame).
#[derive(Clone, Debug)]
pub enum ShapeSpec {
    /// Curve `θ -> Ψ(γ e^{iθ})` of an exterior map.
    Map(ExteriorMap),
    /// `0.311 + cos θ - 0.7 cos 2θ + i sin θ`.
    Kite,
    /// A 4 x 1 rectangle rotated by `π/9`.
    Straight,
    /// Möbius image `(5 z - 20i)/(2 z + 40i)` of the rectangle `[-30, 30] x [-2, 2]`.
    Crescent,
    Curve(ParametricCurve),
}

const CATALOG: [&str; 6] = ["disk", "ellipse", "asymmetric", "kite", "straight", "crescent"];

impl ShapeSpec {
    pub fn name(&self) -> String {
        match self {
            ShapeSpec::Map(_) => "map".into(),
            ShapeSpec::Kite => "kite".into(),
            ShapeSpec::Straight => "straight".into(),
            ShapeSpec::Crescent => "crescent".into(),
            ShapeSpec::Curve(c) => c.label.clone(),
        }
    }

    /// Named test inclusions: `disk` (unit), `ellipse` (`γ = 1, e1 = 1/2`),
    /// `asymmetric`, `kite`, `straight`, `crescent`.
    pub fn catalog() -> Vec<(&'static str, ShapeSpec)> {
        CATALOG
            .iter()
            .map(|name| (*name, Self::by_name(name).expect("catalog name")))
            .collect()
    }

    pub fn by_name(name: &str) -> Option<ShapeSpec> {
        let origin = C64::new(0.0, 0.0);
        Some(match name {
            "disk" => ShapeSpec::Map(ExteriorMap::disk(1.0, origin).ok()?),
            "ellipse" => ShapeSpec::Map(ExteriorMap::ellipse(1.0, origin, C64::new(0.5, 0.0)).ok()?),
            "asymmetric" => ShapeSpec::Map(ExteriorMap::asymmetric()),
            "kite" => ShapeSpec::Kite,
            "straight" => ShapeSpec::Straight,
            "crescent" => ShapeSpec::Crescent,
            _ => return None,
        })
    }

    pub fn exterior_map(&self) -> Option<&ExteriorMap> {
        match self {
            ShapeSpec::Map(map) => Some(map),
            _ => None,
        }
    }

    /// Boundary point at parameter `t`.
    pub fn point(&self, t: f64) -> C64 {
        match self {
            ShapeSpec::Map(map) => map.boundary_point(t),
            ShapeSpec::Kite => kite(t),
            ShapeSpec::Straight | ShapeSpec::Crescent => {
                let (side, _) = rectangle_side(t);
                self.cornered_jet(side, t).0
            }
            ShapeSpec::Curve(c) => c.eval(t),
        }
    }

    /// `n` boundary points at uniform parameter values.
    pub fn sample(&self, n: usize) -> Vec<C64> {
        (0..n).map(|j| self.point(2.0 * PI * j as f64 / n as f64)).collect()
    }

    /// Parameter values of corners; empty for smooth curves.
    pub fn corners(&self) -> Vec<f64> {
        match self {
            ShapeSpec::Straight | ShapeSpec::Crescent => (0..4).map(|k| -FRAC_PI_4 + k as f64 * FRAC_PI_2).collect(),
            _ => Vec::new(),
        }
    }

    /// Position and first two parameter derivatives on one smooth side of
    /// a cornered shape. Side `k` spans `t ∈ [-π/4 + kπ/2, π/4 + kπ/2]`.
    pub(crate) fn cornered_jet(&self, side: usize, t: f64) -> (C64, C64, C64) {
        match self {
            ShapeSpec::Straight => {
                let rot = C64::from_polar(1.0, PI / 9.0);
                let (z, d1, d2) = rectangle_jet(side, t, 1.0, 0.25);
                (rot * z, rot * d1, rot * d2)
            }
            ShapeSpec::Crescent => {
                let (z, d1, d2) = rectangle_jet(side, t, 15.0, 1.0);
                let den = 2.0 * z + C64::new(0.0, 40.0);
                let num = 5.0 * z - C64::new(0.0, 20.0);
                // d/dz of (5z - 20i)/(2z + 40i) is 240i / (2z + 40i)^2
                let g1 = C64::new(0.0, 240.0) / (den * den);
                let g2 = C64::new(0.0, -960.0) / (den * den * den);
                (num / den, g1 * d1, g2 * d1 * d1 + g1 * d2)
            }
            _ => unreachable!("cornered_jet on a smooth shape"),
        }
    }
}

fn kite(t: f64) -> C64 {
    C64::new(0.311 + t.cos() - 0.7 * (2.0 * t).cos(), t.sin())
}

/// Side index of parameter `t` on the rectangle, with `t` reduced to the
/// side's range.
pub(crate) fn rectangle_side(t: f64) -> (usize, f64) {
    let r = (t + FRAC_PI_4).rem_euclid(2.0 * PI);
    let side = ((r / FRAC_PI_2) as usize).min(3);
    (side, r - FRAC_PI_4)
}

/// The nested square roots `sqrt(2 + u² - v² ± 2√2 u)` collapse to
/// `|√2 u ± 1|` on the unit circle, so the curve
/// `a(|√2u+1| - |√2u-1|) + i b(|√2v+1| - |√2v-1|)` is the rectangle
/// `[-2a, 2a] x [-2b, 2b]`, traversed counterclockwise.
fn rectangle_jet(side: usize, t: f64, a: f64, b: f64) -> (C64, C64, C64) {
    let r = 2.0 * SQRT_2;
    let (s, c) = t.sin_cos();
    let (x, x1, x2, y, y1, y2) = match side {
        0 => (2.0, 0.0, 0.0, r * s, r * c, -r * s),
        1 => (r * c, -r * s, -r * c, 2.0, 0.0, 0.0),
        2 => (-2.0, 0.0, 0.0, r * s, r * c, -r * s),
        _ => (r * c, -r * s, -r * c, -2.0, 0.0, 0.0),
    };
    (
        C64::new(a * x, b * y),
        C64::new(a * x1, b * y1),
        C64::new(a * x2, b * y2),
    )
}
