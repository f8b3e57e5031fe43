use std::f64::consts::PI;

use rustfft::FftPlanner;

use super::shapes::ShapeSpec;
use crate::{Error, Result, C64};

/// Grading exponent used to cluster nodes at corners.
const CORNER_GRADING: i32 = 5;

/// Boundary samples with local geometry and trapezoidal weights.
///
/// All frames are counterclockwise, so `normal = -i·tangent` points out of
/// the enclosed region.
#[derive(Clone, Debug)]
pub struct BoundaryFrame {
    /// Uniform quadrature parameter, `θ_j = 2π(j + offset)/n`.
    pub theta: Vec<f64>,
    pub points: Vec<C64>,
    pub tangent: Vec<C64>,
    pub normal: Vec<C64>,
    pub curvature: Vec<f64>,
    /// `|dz/dθ|`.
    pub jacobian: Vec<f64>,
    /// `jacobian · 2π/n`.
    pub weights: Vec<f64>,
    /// `h = γ |Ψ'(γ e^{iθ})|`, present for map shapes only.
    pub scale_factor: Option<Vec<f64>>,
}

impl BoundaryFrame {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn arclength(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Enclosed area from `½ ∮ ⟨z, ν⟩ dσ`.
    pub fn area(&self) -> f64 {
        0.5 * self
            .points
            .iter()
            .zip(&self.normal)
            .zip(&self.weights)
            .map(|((z, nu), w)| (z.conj() * nu).re * w)
            .sum::<f64>()
    }

    /// Largest distance between consecutive samples.
    pub fn max_spacing(&self) -> f64 {
        let n = self.points.len();
        (0..n)
            .map(|j| (self.points[(j + 1) % n] - self.points[j]).norm())
            .fold(0.0, f64::max)
    }

    /// Integral of sampled values against arclength.
    pub fn integrate(&self, values: &[C64]) -> C64 {
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }
}

/// Sample `shape` at `n` nodes and compute its local geometry.
///
/// Smooth shapes use uniform nodes and FFT differentiation. Shapes with
/// corners are reparametrized side by side with a sigmoidal grading that
/// clusters nodes at the corners, and differentiated analytically.
pub fn boundary_frame(shape: &ShapeSpec, n: usize) -> Result<BoundaryFrame> {
    if n < 64 || !n.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "sample count must be even and at least 64, got {n}"
        )));
    }
    let (theta, mut points, mut d1, mut d2) = if shape.corners().is_empty() {
        let theta: Vec<f64> = (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect();
        let points: Vec<C64> = theta.iter().map(|&t| shape.point(t)).collect();
        let (d1, d2) = spectral_derivatives(&points);
        (theta, points, d1, d2)
    } else {
        graded_samples(shape, n)
    };
    if let Some(bad) = points.iter().position(|z| !z.is_finite()) {
        return Err(Error::Shape(format!("non-finite boundary sample at index {bad}")));
    }

    let signed_area: f64 = points.iter().zip(&d1).map(|(z, dz)| (z.conj() * dz).im).sum::<f64>() * PI / n as f64;
    let mut reversed = false;
    if signed_area < 0.0 {
        // θ -> -θ keeps the node set and flips the direction of travel.
        for v in [&mut points, &mut d1, &mut d2] {
            v[1..].reverse();
        }
        d1.iter_mut().for_each(|d| *d = -*d);
        reversed = true;
    }

    let jacobian: Vec<f64> = d1.iter().map(|d| d.norm()).collect();
    if let Some(j) = jacobian.iter().position(|&j| !(j > 0.0)) {
        return Err(Error::Shape(format!("vanishing speed at sample {j}")));
    }
    let tangent: Vec<C64> = d1.iter().zip(&jacobian).map(|(d, j)| d / *j).collect();
    let normal = tangent.iter().map(|t| C64::new(0.0, -1.0) * t).collect();
    let curvature = d1
        .iter()
        .zip(&d2)
        .zip(&jacobian)
        .map(|((a, b), j)| (a.conj() * b).im / (j * j * j))
        .collect();
    let weights = jacobian.iter().map(|j| j * 2.0 * PI / n as f64).collect();
    let scale_factor = shape.exterior_map().map(|map| {
        let mut h: Vec<f64> = theta.iter().map(|&t| map.scale_factor(t)).collect();
        if reversed {
            h[1..].reverse();
        }
        h
    });

    if let Some((i, j)) = first_self_intersection(&points) {
        return Err(Error::Shape(format!(
            "sampled curve crosses itself between segments {i} and {j}"
        )));
    }

    Ok(BoundaryFrame {
        theta,
        points,
        tangent,
        normal,
        curvature,
        jacobian,
        weights,
        scale_factor,
    })
}

/// First and second derivatives of periodic samples by trigonometric
/// interpolation. The Nyquist mode is dropped from the odd derivative.
pub(crate) fn spectral_derivatives(z: &[C64]) -> (Vec<C64>, Vec<C64>) {
    let n = z.len();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    let mut spectrum = z.to_vec();
    forward.process(&mut spectrum);
    let wavenumber = |j: usize| -> f64 {
        if j <= n / 2 {
            j as f64
        } else {
            j as f64 - n as f64
        }
    };
    let mut d1: Vec<C64> = spectrum
        .iter()
        .enumerate()
        .map(|(j, c)| {
            if 2 * j == n {
                C64::new(0.0, 0.0)
            } else {
                c * C64::new(0.0, wavenumber(j))
            }
        })
        .collect();
    let mut d2: Vec<C64> = spectrum
        .iter()
        .enumerate()
        .map(|(j, c)| c * -(wavenumber(j) * wavenumber(j)))
        .collect();
    inverse.process(&mut d1);
    inverse.process(&mut d2);
    let scale = 1.0 / n as f64;
    d1.iter_mut().for_each(|d| *d *= scale);
    d2.iter_mut().for_each(|d| *d *= scale);
    (d1, d2)
}

/// Kress's sigmoidal map of `[0, 2π]` onto itself with its first `p - 1`
/// derivatives vanishing at both ends; returns value and two derivatives.
fn sigmoidal(s: f64, p: i32) -> (f64, f64, f64) {
    let pf = p as f64;
    let c = 1.0 / pf - 0.5;
    let x = (PI - s) / PI;
    let v = c * x.powi(3) + (s - PI) / (pf * PI) + 0.5;
    let v1 = -3.0 * c * x * x / PI + 1.0 / (pf * PI);
    let v2 = 6.0 * c * x / (PI * PI);
    let a = v.powi(p);
    let b = (1.0 - v).powi(p);
    let a1 = pf * v.powi(p - 1) * v1;
    let b1 = -pf * (1.0 - v).powi(p - 1) * v1;
    let a2 = pf * (pf - 1.0) * v.powi(p - 2) * v1 * v1 + pf * v.powi(p - 1) * v2;
    let b2 = pf * (pf - 1.0) * (1.0 - v).powi(p - 2) * v1 * v1 - pf * (1.0 - v).powi(p - 1) * v2;
    let sum = a + b;
    let num = a1 * b - a * b1;
    let num1 = a2 * b - a * b2;
    let r = a / sum;
    let r1 = num / (sum * sum);
    let r2 = (num1 * sum - 2.0 * num * (a1 + b1)) / (sum * sum * sum);
    (2.0 * PI * r, 2.0 * PI * r1, 2.0 * PI * r2)
}

/// Corner-graded nodes at half-integer offsets, so no node sits on a corner.
fn graded_samples(shape: &ShapeSpec, n: usize) -> (Vec<f64>, Vec<C64>, Vec<C64>, Vec<C64>) {
    let corners = shape.corners();
    let start = corners[0];
    let sides = corners.len();
    let span = 2.0 * PI / sides as f64;
    let mut theta = Vec::with_capacity(n);
    let mut points = Vec::with_capacity(n);
    let mut d1 = Vec::with_capacity(n);
    let mut d2 = Vec::with_capacity(n);
    for j in 0..n {
        let s = 2.0 * PI * (j as f64 + 0.5) / n as f64;
        // s = 0 sits on the first corner; side k starts at corner k.
        let k = ((s / span) as usize).min(sides - 1);
        let local = (s - k as f64 * span) * (2.0 * PI / span);
        let (w, w1, w2) = sigmoidal(local, CORNER_GRADING);
        let t = start + k as f64 * span + w * span / (2.0 * PI);
        let dt = w1;
        let ddt = w2 * (2.0 * PI / span);
        let (z, z1, z2) = shape.cornered_jet(k, t);
        theta.push(s);
        points.push(z);
        d1.push(z1 * dt);
        d2.push(z2 * dt * dt + z1 * ddt);
    }
    (theta, points, d1, d2)
}

fn cross(a: C64, b: C64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_cross(p1: C64, p2: C64, q1: C64, q2: C64) -> bool {
    let d1 = cross(q2 - q1, p1 - q1);
    let d2 = cross(q2 - q1, p2 - q1);
    let d3 = cross(p2 - p1, q1 - p1);
    let d4 = cross(p2 - p1, q2 - p1);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Pairwise test of non-adjacent polygon edges.
pub(crate) fn first_self_intersection(points: &[C64]) -> Option<(usize, usize)> {
    let n = points.len();
    let boxes: Vec<(f64, f64, f64, f64)> = (0..n)
        .map(|i| {
            let (a, b) = (points[i], points[(i + 1) % n]);
            (a.re.min(b.re), a.re.max(b.re), a.im.min(b.im), a.im.max(b.im))
        })
        .collect();
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = (boxes[i], boxes[j]);
            if a.1 < b.0 || b.1 < a.0 || a.3 < b.2 || b.3 < a.2 {
                continue;
            }
            if segments_cross(points[i], points[(i + 1) % n], points[j], points[(j + 1) % n]) {
                return Some((i, j));
            }
        }
    }
    None
}
