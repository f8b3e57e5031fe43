//! Nyström discretization of the Neumann–Poincaré operator `K*`, the
//! density equation `(λI - K*)φ = g`, and single-layer evaluation.

use std::f64::consts::PI;

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conformal::BoundaryFrame;
use crate::{Error, Result, C64};

/// Conductivity `σ` of the inclusion together with
/// `λ = (σ + 1) / (2(σ - 1))`.
///
/// `σ = ∞` and `σ = 0` are stored exactly as `λ = ±1/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contrast {
    sigma: f64,
    lambda: f64,
}

impl Contrast {
    pub fn from_sigma(sigma: f64) -> Result<Self> {
        if sigma.is_nan() || sigma < 0.0 {
            return Err(Error::Contrast(format!(
                "conductivity must lie in [0, inf], got {sigma}"
            )));
        }
        if sigma == 1.0 {
            return Err(Error::Contrast("conductivity 1 gives no inclusion".into()));
        }
        let lambda = if sigma.is_infinite() {
            0.5
        } else {
            (sigma + 1.0) / (2.0 * (sigma - 1.0))
        };
        Ok(Self { sigma, lambda })
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda.abs() < 0.5 {
            return Err(Error::Contrast(format!("|lambda| must be at least 1/2, got {lambda}")));
        }
        let sigma = if lambda == 0.5 {
            f64::INFINITY
        } else {
            (2.0 * lambda + 1.0) / (2.0 * lambda - 1.0)
        };
        Ok(Self { sigma, lambda })
    }

    pub fn perfect_conductor() -> Self {
        Self {
            sigma: f64::INFINITY,
            lambda: 0.5,
        }
    }

    pub fn insulator() -> Self {
        Self {
            sigma: 0.0,
            lambda: -0.5,
        }
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `|λ| = 1/2`.
    pub fn is_extreme(&self) -> bool {
        self.lambda.abs() == 0.5
    }
}

/// Dense Nyström matrix of `K*` on a boundary frame.
#[derive(Clone, Debug)]
pub struct NpDiscretization {
    pub frame: BoundaryFrame,
    /// Row-major `n x n`.
    kstar: Vec<f64>,
}

/// Assemble `K*_{ij} = (1/2π)⟨x_i - x_j, ν_i⟩/|x_i - x_j|² w_j`, with the
/// diagonal replaced by its limit `κ_i w_i / 4π`.
pub fn assemble(frame: &BoundaryFrame) -> Result<NpDiscretization> {
    let n = frame.len();
    let scale = frame.arclength();
    let points = &frame.points;
    let rows: Vec<Result<Vec<f64>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let x = points[i];
            let nu = frame.normal[i];
            let mut row = vec![0.0; n];
            for (j, entry) in row.iter_mut().enumerate() {
                if i == j {
                    *entry = frame.curvature[i] * frame.weights[i] / (4.0 * PI);
                    continue;
                }
                let d = x - points[j];
                let r2 = d.norm_sqr();
                if r2 <= (1e-15 * scale).powi(2) {
                    return Err(Error::Assembly(format!("sample points {i} and {j} coincide")));
                }
                *entry = (d.re * nu.re + d.im * nu.im) / r2 / (2.0 * PI) * frame.weights[j];
            }
            Ok(row)
        })
        .collect();
    let mut kstar = Vec::with_capacity(n * n);
    for row in rows {
        kstar.extend(row?);
    }
    Ok(NpDiscretization {
        frame: frame.clone(),
        kstar,
    })
}

impl NpDiscretization {
    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.frame.weights
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.kstar[i * self.len() + j]
    }

    /// `K*` applied to a sampled density.
    pub fn apply(&self, density: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(density.len(), n, "density length mismatch");
        self.kstar
            .par_chunks(n)
            .map(|row| row.iter().zip(density).map(|(k, d)| k * d).sum())
            .collect()
    }

    /// `K*` applied to a complex density, real and imaginary parts separately.
    pub fn apply_complex(&self, density: &[C64]) -> Vec<C64> {
        let re: Vec<f64> = density.iter().map(|d| d.re).collect();
        let im: Vec<f64> = density.iter().map(|d| d.im).collect();
        self.apply(&re)
            .into_iter()
            .zip(self.apply(&im))
            .map(|(a, b)| C64::new(a, b))
            .collect()
    }

    /// Dense copy as an `n x n` matrix, row-major.
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.kstar.chunks(self.len()).map(|r| r.to_vec()).collect()
    }

    /// Factor the bordered system
    /// `[[λI - K*, w], [wᵀ, 0]]`, which pins the weighted mean of the
    /// density to zero. At `λ = 1/2` the plain operator has a
    /// one-dimensional kernel, and the border removes it; elsewhere the
    /// border is inert for mean-zero data.
    pub fn factor(&self, contrast: Contrast) -> Result<DensitySolver> {
        let n = self.len();
        let lambda = contrast.lambda();
        let w = self.weights();
        let system = Mat::<f64>::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
            (true, true) => (if i == j { lambda } else { 0.0 }) - self.kstar[i * n + j],
            (true, false) => w[i],
            (false, true) => w[j],
            (false, false) => 0.0,
        });
        let lu = system.partial_piv_lu();
        let u = lu.U();
        let diag: Vec<f64> = (0..=n).map(|i| u[(i, i)].abs()).collect();
        let max = diag.iter().cloned().fold(0.0, f64::max);
        let min = diag.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min > 1e-13 * max) {
            return Err(Error::Singular(format!(
                "density system pivot ratio {:.3e} at lambda = {lambda}",
                min / max
            )));
        }
        Ok(DensitySolver {
            lu,
            n,
            weights: w.to_vec(),
            lambda,
        })
    }
}

/// Factored density system, reusable across right-hand sides.
pub struct DensitySolver {
    lu: PartialPivLu<f64>,
    n: usize,
    weights: Vec<f64>,
    lambda: f64,
}

impl std::fmt::Debug for DensitySolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DensitySolver")
            .field("n", &self.n)
            .field("lambda", &self.lambda)
            .finish_non_exhaustive()
    }
}

impl DensitySolver {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Solve for several right-hand sides at once.
    pub fn solve_many(&self, rhs: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        let n = self.n;
        for g in rhs {
            if g.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "right-hand side has length {}, expected {n}",
                    g.len()
                )));
            }
            let flux: f64 = g.iter().zip(&self.weights).map(|(v, w)| v * w).sum();
            let size: f64 = g.iter().zip(&self.weights).map(|(v, w)| v.abs() * w).sum();
            if flux.abs() > 1e-8 * size {
                return Err(Error::InvalidArgument(format!(
                    "right-hand side has nonzero flux {flux:.3e} (relative {:.3e})",
                    flux.abs() / size
                )));
            }
        }
        let b = Mat::<f64>::from_fn(n + 1, rhs.len(), |i, j| if i < n { rhs[j][i] } else { 0.0 });
        let x = self.lu.solve(&b);
        Ok((0..rhs.len()).map(|j| (0..n).map(|i| x[(i, j)]).collect()).collect())
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        Ok(self.solve_many(&[rhs.to_vec()])?.remove(0))
    }

    /// Complex right-hand side, real and imaginary parts solved together.
    pub fn solve_complex(&self, rhs: &[C64]) -> Result<Vec<C64>> {
        let re = rhs.iter().map(|g| g.re).collect();
        let im = rhs.iter().map(|g| g.im).collect();
        let mut out = self.solve_many(&[re, im])?;
        let im = out.pop().unwrap();
        let re = out.pop().unwrap();
        Ok(re.into_iter().zip(im).map(|(a, b)| C64::new(a, b)).collect())
    }
}

/// `φ = (λI - K*)⁻¹ g` for a flux-free right-hand side.
pub fn solve_density(disc: &NpDiscretization, contrast: Contrast, rhs: &[f64]) -> Result<Vec<f64>> {
    disc.factor(contrast)?.solve(rhs)
}

/// `S[φ](z) = (1/2π) ∫ ln|z - y| φ(y) dσ(y)` by the trapezoidal rule.
pub fn single_layer(frame: &BoundaryFrame, density: &[f64], z: C64) -> Result<f64> {
    if density.len() != frame.len() {
        return Err(Error::InvalidArgument("density length mismatch".into()));
    }
    let tol = 1e-12 * frame.arclength();
    let mut acc = 0.0;
    for ((y, phi), w) in frame.points.iter().zip(density).zip(&frame.weights) {
        let r = (z - y).norm();
        if r <= tol {
            return Err(Error::Domain(format!("evaluation point {z} lies on the boundary")));
        }
        acc += r.ln() * phi * w;
    }
    Ok(acc / (2.0 * PI))
}
