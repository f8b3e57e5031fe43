use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::GptMatrix;
use crate::conformal::{grunsky, ExteriorMap, FaberTable, GrunskyMatrix};
use crate::potential::Contrast;
use crate::{Error, Result, C64};

/// FPTs `F^(1)`, `F^(2)` with respect to the Faber basis of `basis`.
#[derive(Clone, Debug, PartialEq)]
pub struct FptMatrix {
    pub f1: DMatrix<C64>,
    pub f2: DMatrix<C64>,
    pub lambda: f64,
    pub basis: ExteriorMap,
    /// Relative change of the returned block when the finite section is
    /// doubled; zero when the tensors did not come from a finite section.
    pub truncation_drift: f64,
}

impl FptMatrix {
    pub fn order(&self) -> usize {
        self.f1.nrows()
    }

    /// `F^(1)_{mk}`, one-based.
    pub fn f1(&self, m: usize, k: usize) -> C64 {
        self.f1[(m - 1, k - 1)]
    }

    /// `F^(2)_{mk}`, one-based.
    pub fn f2(&self, m: usize, k: usize) -> C64 {
        self.f2[(m - 1, k - 1)]
    }
}

/// `max(4M, M + 16)`.
pub fn default_truncation(order: usize) -> usize {
    (4 * order).max(order + 16)
}

fn inverse(m: DMatrix<C64>, what: &str) -> Result<DMatrix<C64>> {
    let size = m.nrows();
    let lu = m.lu();
    let inv = lu
        .try_inverse()
        .ok_or_else(|| Error::Singular(format!("{what} is singular")))?;
    if inv.iter().any(|v| !v.is_finite()) || size == 0 {
        return Err(Error::Singular(format!("{what} is numerically singular")));
    }
    Ok(inv)
}

/// `diag(γ^{-2k})`, `k = 1..size`.
fn gamma_diag(gamma: f64, size: usize, power: f64) -> DMatrix<C64> {
    DMatrix::from_fn(size, size, |i, j| {
        if i == j {
            C64::new(gamma.powf(power * (i + 1) as f64), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

fn check_contraction(g: &GrunskyMatrix, lambda: f64) -> Result<()> {
    let norm = g.spectral_norm();
    let bound = 2.0 * lambda.abs();
    if norm >= bound {
        return Err(Error::Truncation { norm, bound });
    }
    Ok(())
}

/// Full `K x K` FPT blocks from the finite section of the Grunsky matrix.
fn fpt_blocks(map: &ExteriorMap, lambda: f64, truncation: usize) -> Result<(DMatrix<C64>, DMatrix<C64>)> {
    let g = grunsky(map, truncation);
    check_contraction(&g, lambda)?;
    let c = &g.c;
    let gamma = map.gamma();
    let d2 = gamma_diag(gamma, truncation, -2.0);
    let four_l2 = 4.0 * lambda * lambda;
    let ident = DMatrix::<C64>::identity(truncation, truncation);
    // (4λ² - γ^{-2N} C̄ γ^{-2N} C)⁻¹
    let resolvent = inverse(
        &ident * C64::new(four_l2, 0.0) - &d2 * c.map(|v| v.conj()) * &d2 * c,
        "finite-section resolvent",
    )?;
    let damp = C64::new(1.0 - four_l2, 0.0);
    let core1 = c + c * &resolvent * damp;
    let core2 = &ident + &resolvent * damp;
    let f1 = DMatrix::from_fn(truncation, truncation, |m, k| {
        core1[(m, k)] * (4.0 * PI * (k + 1) as f64)
    });
    let f2 = DMatrix::from_fn(truncation, truncation, |m, k| {
        core2[(m, k)] * (8.0 * PI * (k + 1) as f64 * lambda * gamma.powi(2 * (m as i32 + 1)))
    });
    Ok((f1, f2))
}

/// FPTs of the inclusion bounded by `Ψ(γ e^{iθ})` in its own Faber basis,
/// evaluated on the `truncation x truncation` finite section.
///
/// The returned `truncation_drift` compares against a section twice as
/// large.
pub fn fpt_analytic(
    map: &ExteriorMap,
    contrast: Contrast,
    order: usize,
    truncation: Option<usize>,
) -> Result<FptMatrix> {
    if order == 0 {
        return Err(Error::InvalidArgument("FPT order must be at least 1".into()));
    }
    let truncation = truncation.unwrap_or_else(|| default_truncation(order));
    if truncation < order {
        return Err(Error::InvalidArgument(format!(
            "truncation {truncation} is smaller than the order {order}"
        )));
    }
    let lambda = contrast.lambda();
    let (f1, f2) = fpt_blocks(map, lambda, truncation)?;
    let (g1, g2) = fpt_blocks(map, lambda, 2 * truncation)?;
    let f1 = f1.view((0, 0), (order, order)).into_owned();
    let f2 = f2.view((0, 0), (order, order)).into_owned();
    let diff = (&f1 - g1.view((0, 0), (order, order))).norm() + (&f2 - g2.view((0, 0), (order, order))).norm();
    let scale = f1.norm() + f2.norm();
    Ok(FptMatrix {
        f1,
        f2,
        lambda,
        basis: map.clone(),
        truncation_drift: if scale > 0.0 { diff / scale } else { diff },
    })
}

/// Unit lower-triangular change of basis `[p_{mn}]`, `n ≥ 1`.
fn basis_block(faber: &FaberTable, order: usize) -> Result<DMatrix<C64>> {
    if faber.order() < order {
        return Err(Error::InvalidArgument(format!(
            "Faber table of order {} cannot convert order {order} tensors",
            faber.order()
        )));
    }
    Ok(faber.basis_matrix(order))
}

/// `F1 = P N1 Pᵀ`, `F2 = P̄ N2 Pᵀ`.
pub fn fpt_from_gpt(gpt: &GptMatrix, faber: &FaberTable) -> Result<FptMatrix> {
    let p = basis_block(faber, gpt.order())?;
    let pt = p.transpose();
    let pbar = p.map(|v| v.conj());
    Ok(FptMatrix {
        f1: &p * &gpt.n1 * &pt,
        f2: &pbar * &gpt.n2 * &pt,
        lambda: gpt.lambda,
        basis: faber.map().clone(),
        truncation_drift: 0.0,
    })
}

/// Inverse of [`fpt_from_gpt`] by triangular solves.
pub fn gpt_from_fpt(fpt: &FptMatrix, faber: &FaberTable) -> Result<GptMatrix> {
    let p = basis_block(faber, fpt.order())?;
    let pbar = p.map(|v| v.conj());
    let unsolvable = || Error::Singular("Faber basis block is not invertible".into());
    // X = P⁻¹ F1, then N1 = X P⁻ᵀ = (P⁻¹ Xᵀ)ᵀ.
    let x = p.solve_lower_triangular(&fpt.f1).ok_or_else(unsolvable)?;
    let n1 = p
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(unsolvable)?
        .transpose();
    let y = pbar.solve_lower_triangular(&fpt.f2).ok_or_else(unsolvable)?;
    let n2 = p
        .solve_lower_triangular(&y.transpose())
        .ok_or_else(unsolvable)?
        .transpose();
    GptMatrix::new(n1, n2, fpt.lambda)
}

/// Finite sections of the series-solution matrices
/// `A = 8λ γ^{2N} (4λ² - γ^{-2N} C γ^{-2N} C̄)⁻¹` and
/// `B = 4 C (4λ² - γ^{-2N} C̄ γ^{-2N} C)⁻¹`, which expand
/// `(λI - K*)⁻¹[ζ_m] = ½ Σ_k √(k/m) γ^{-(m+k)} (a_{mk} ζ_k + b_{mk} ζ̄_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSolver {
    pub order: usize,
    pub a: DMatrix<C64>,
    pub b: DMatrix<C64>,
}

impl SeriesSolver {
    pub fn new(map: &ExteriorMap, contrast: Contrast, order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument("series order must be at least 1".into()));
        }
        let lambda = contrast.lambda();
        let g = grunsky(map, order);
        check_contraction(&g, lambda)?;
        let c = &g.c;
        let cbar = c.map(|v| v.conj());
        let gamma = map.gamma();
        let d2 = gamma_diag(gamma, order, -2.0);
        let up2 = gamma_diag(gamma, order, 2.0);
        let scaled = DMatrix::<C64>::identity(order, order) * C64::new(4.0 * lambda * lambda, 0.0);
        let left = inverse(&scaled - &d2 * c * &d2 * &cbar, "series resolvent")?;
        let right = inverse(&scaled - &d2 * &cbar * &d2 * c, "series resolvent")?;
        Ok(Self {
            order,
            a: up2 * left * C64::new(8.0 * lambda, 0.0),
            b: c * right * C64::new(4.0, 0.0),
        })
    }
}
