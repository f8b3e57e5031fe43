//! Exterior conformal maps, Faber polynomials, Grunsky coefficients and the
//! sampled boundary frames built from them.

mod faber;
mod frame;
mod shapes;

pub use faber::{faber_table, grunsky, FaberTable, GrunskyMatrix};
pub use frame::{boundary_frame, BoundaryFrame};
pub use shapes::{ParametricCurve, ShapeSpec};

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::{Error, Result, C64};

/// Truncated Laurent expansion `Ψ(w) = w + a0 + a1/w + ... + aK/w^K`, mapping
/// `|w| > gamma` onto the exterior of the inclusion.
///
/// Coefficients past the stored tail are exactly zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExteriorMap {
    gamma: f64,
    a0: C64,
    coeffs: Vec<C64>,
}

impl ExteriorMap {
    pub fn new(gamma: f64, a0: C64, coeffs: Vec<C64>) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "conformal radius must be positive and finite, got {gamma}"
            )));
        }
        if !a0.is_finite() || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("non-finite Laurent coefficient".into()));
        }
        Ok(Self { gamma, a0, coeffs })
    }

    /// Disk of the given radius and center.
    pub fn disk(radius: f64, center: C64) -> Result<Self> {
        Self::new(radius, center, Vec::new())
    }

    /// `w + e0 + e1/w` on `|w| > gamma`.
    pub fn ellipse(gamma: f64, e0: C64, e1: C64) -> Result<Self> {
        Self::new(gamma, e0, vec![e1])
    }

    /// The asymmetric test inclusion, `e^{πi/5}(w + (1-2i)/7 w^-1 + ... + i/50 w^-6)`
    /// on `|w| = 1`, rewritten in the normalized form `Ψ'(∞) = 1` by the
    /// substitution `w -> e^{-πi/5} w`. The boundary curve is unchanged;
    /// `a_k = b_k e^{i(k+1)π/5}`.
    pub fn asymmetric() -> Self {
        let raw = [
            C64::new(1.0, -2.0) / 7.0,
            C64::new(-1.0, 1.0) / 6.0,
            C64::new(0.0, 1.0) / 20.0,
            C64::new(1.0, 0.0) / 20.0,
            C64::new(0.0, 1.0) / 20.0,
            C64::new(0.0, 1.0) / 50.0,
        ];
        let coeffs = raw
            .iter()
            .enumerate()
            .map(|(i, b)| b * C64::from_polar(1.0, (i as f64 + 2.0) * PI / 5.0))
            .collect();
        Self {
            gamma: 1.0,
            a0: C64::new(0.0, 0.0),
            coeffs,
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn a0(&self) -> C64 {
        self.a0
    }

    /// Stored tail `a1..aK`.
    pub fn tail(&self) -> &[C64] {
        &self.coeffs
    }

    /// `a_k` for any `k >= 0`, zero past the stored tail.
    pub fn coeff(&self, k: usize) -> C64 {
        match k {
            0 => self.a0,
            k => self.coeffs.get(k - 1).copied().unwrap_or_default(),
        }
    }

    /// Same map shifted by `shift` in the image plane.
    pub fn translated(&self, shift: C64) -> Self {
        Self {
            a0: self.a0 + shift,
            ..self.clone()
        }
    }

    /// `Ψ(w)`; fails when `|w| < gamma`.
    pub fn eval(&self, w: C64) -> Result<C64> {
        if w.norm() < self.gamma * (1.0 - 1e-12) {
            return Err(Error::Domain(format!(
                "|w| = {} lies inside the disk of radius gamma = {}",
                w.norm(),
                self.gamma
            )));
        }
        Ok(self.eval_unchecked(w))
    }

    pub(crate) fn eval_unchecked(&self, w: C64) -> C64 {
        let inv = w.inv();
        // Horner in 1/w over the tail.
        let tail = self
            .coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, a| (acc + a) * inv);
        w + self.a0 + tail
    }

    /// `Ψ'(w) = 1 - Σ k a_k w^{-k-1}`.
    pub fn derivative(&self, w: C64) -> C64 {
        let inv = w.inv();
        let mut power = inv * inv;
        let mut acc = C64::new(1.0, 0.0);
        for (i, a) in self.coeffs.iter().enumerate() {
            acc -= a * (i as f64 + 1.0) * power;
            power *= inv;
        }
        acc
    }

    /// Boundary point `Ψ(γ e^{iθ})`.
    pub fn boundary_point(&self, theta: f64) -> C64 {
        self.eval_unchecked(C64::from_polar(self.gamma, theta))
    }

    /// Scale factor `h(ρ0, θ) = γ |Ψ'(γ e^{iθ})|`.
    pub fn scale_factor(&self, theta: f64) -> f64 {
        self.gamma * self.derivative(C64::from_polar(self.gamma, theta)).norm()
    }
}
