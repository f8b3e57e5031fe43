//! Non-iterative shape recovery from GPTs: perturbed disk, conformal-map
//! coefficients, and perturbed equivalent ellipse.

use std::f64::consts::PI;

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::conformal::{faber_table, ExteriorMap};
use crate::potential::Contrast;
use crate::tensors::{fpt_analytic, fpt_from_gpt, GptMatrix};
use crate::{Error, Result, C64};

/// Base ellipse `Ψ_E(w) = w + e0 + e1/w` on `|w| = gamma_e`. A disk has
/// `e1 = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EllipseParams {
    pub gamma_e: f64,
    pub e0: C64,
    pub e1: C64,
}

impl EllipseParams {
    pub fn new(gamma_e: f64, e0: C64, e1: C64) -> Result<Self> {
        if !(gamma_e.is_finite() && gamma_e > 0.0) {
            return Err(Error::DegenerateInclusion(format!(
                "ellipse radius must be positive, got {gamma_e}"
            )));
        }
        let gamma_sq = gamma_e * gamma_e;
        if e1.norm() >= gamma_sq {
            return Err(Error::NonUnivalent {
                e1_abs: e1.norm(),
                gamma_sq,
            });
        }
        Ok(Self { gamma_e, e0, e1 })
    }

    pub fn map(&self) -> ExteriorMap {
        ExteriorMap::ellipse(self.gamma_e, self.e0, self.e1).expect("validated ellipse")
    }

    /// Semi-axes `(γ + |e1|/γ, γ - |e1|/γ)`.
    pub fn semi_axes(&self) -> (f64, f64) {
        let d = self.e1.norm() / self.gamma_e;
        (self.gamma_e + d, self.gamma_e - d)
    }

    pub fn aspect_ratio(&self) -> f64 {
        let (a, b) = self.semi_axes();
        a / b
    }
}

/// How the recovered modes displace the base curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Displacement {
    /// `c + (γ + f(θ)) e^{iθ}`: `f` is the outward normal offset of the disk.
    Disk,
    /// `Ψ_E(w) + (w - e1/w) f(θ)` with `w = γ_e e^{iθ}`.
    Ellipse,
}

/// Base shape plus the recovered products `εf̂_k`; entry `k` of `fhat`
/// holds mode `k`. The boundary perturbation is `f(θ) = 2 Re Σ_{k≥1}
/// εf̂_k e^{ikθ} + εf̂_0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PerturbationResult {
    pub base: EllipseParams,
    pub fhat: Vec<C64>,
    pub displacement: Displacement,
}

impl PerturbationResult {
    /// `f(θ)`.
    pub fn offset(&self, theta: f64) -> f64 {
        let mut acc = self.fhat.first().map_or(0.0, |c| c.re);
        for (k, c) in self.fhat.iter().enumerate().skip(1) {
            acc += 2.0 * (c * C64::from_polar(1.0, k as f64 * theta)).re;
        }
        acc
    }

    pub fn boundary_point(&self, theta: f64) -> C64 {
        let f = self.offset(theta);
        let EllipseParams { gamma_e, e0, e1 } = self.base;
        let w = C64::from_polar(gamma_e, theta);
        match self.displacement {
            Displacement::Disk => e0 + C64::from_polar(gamma_e + f, theta),
            Displacement::Ellipse => w + e0 + e1 / w + (w - e1 / w) * f,
        }
    }

    /// `n` samples at `θ_j = 2πj/n`.
    pub fn curve(&self, n: usize) -> Vec<C64> {
        (0..n)
            .map(|j| self.boundary_point(2.0 * PI * j as f64 / n as f64))
            .collect()
    }
}

/// Coefficients `s_m`, `t_m` for `m = 1..=order`, stored zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct StCoefficients {
    pub s: Vec<C64>,
    pub t: Vec<C64>,
}

fn check_order(gpt: &GptMatrix, order: usize, min: usize) -> Result<()> {
    if order < min {
        return Err(Error::InvalidArgument(format!(
            "recovery order must be at least {min}, got {order}"
        )));
    }
    if gpt.order() < order {
        return Err(Error::InvalidArgument(format!(
            "GPTs of order {} cannot supply order {order}",
            gpt.order()
        )));
    }
    Ok(())
}

fn check_lambda(gpt: &GptMatrix, contrast: Contrast) -> Result<()> {
    let lambda = contrast.lambda();
    if (gpt.lambda - lambda).abs() > 1e-9 * lambda.abs() {
        return Err(Error::InvalidArgument(format!(
            "GPTs were computed at lambda = {}, recovery asked for {lambda}",
            gpt.lambda
        )));
    }
    Ok(())
}

/// `N^(2)_{11}`, which must be real and nonzero.
fn leading_n2(gpt: &GptMatrix) -> Result<f64> {
    let n2 = gpt.n2(1, 1);
    if !(n2.norm() > 0.0 && n2.is_finite()) {
        return Err(Error::DegenerateInclusion(format!("N2_11 = {n2} vanishes")));
    }
    Ok(n2.re)
}

/// Center estimate `N^(2)_{12} / (2 N^(2)_{11})`.
pub fn gpt_center(gpt: &GptMatrix) -> Result<C64> {
    let n11 = leading_n2(gpt)?;
    if gpt.order() < 2 {
        return Err(Error::InvalidArgument("center needs GPTs of order 2".into()));
    }
    Ok(gpt.n2(1, 2) / (2.0 * n11))
}

/// GPTs of the same inclusion in coordinates `z - shift`.
pub fn shift_gpt(gpt: &GptMatrix, shift: C64) -> Result<GptMatrix> {
    let translation = ExteriorMap::disk(1.0, shift)?;
    let fpt = fpt_from_gpt(gpt, &faber_table(&translation, gpt.order()))?;
    GptMatrix::new(fpt.f1, fpt.f2, gpt.lambda)
}

/// `(σ - 1)/(σ + sign·γ²)`, with the `σ = ∞` limit 1.
fn sigma_ratio(sigma: f64, gamma_sq: f64, sign: f64) -> f64 {
    if sigma.is_infinite() {
        1.0
    } else {
        (sigma - 1.0) / (sigma + sign * gamma_sq)
    }
}

/// Recentered GPTs, disk radius and center.
fn disk_base(gpt: &GptMatrix, contrast: Contrast) -> Result<(GptMatrix, f64, C64)> {
    let lambda = contrast.lambda();
    let n11 = leading_n2(gpt)?;
    let gamma_sq = lambda * n11 / (2.0 * PI);
    if !(gamma_sq > 0.0) {
        return Err(Error::DegenerateInclusion(format!(
            "disk radius squared lambda N2_11 / 2pi = {gamma_sq} is not positive"
        )));
    }
    let center = gpt_center(gpt)?;
    Ok((shift_gpt(gpt, center)?, gamma_sq.sqrt(), center))
}

/// Perturbed-disk recovery from the first column of `N^(2)`: modes
/// `0..order` with `(m, n) = (k + 1, 1)`. The GPTs are first recentered on
/// `N^(2)_{12} / (2 N^(2)_{11})`, so modes 0 and 1 come out zero.
pub fn recover_disk(gpt: &GptMatrix, contrast: Contrast, order: usize) -> Result<PerturbationResult> {
    check_order(gpt, order, 2)?;
    check_lambda(gpt, contrast)?;
    let lambda = contrast.lambda();
    let (shifted, gamma, center) = disk_base(gpt, contrast)?;
    let gamma_sq = gamma * gamma;
    let ratio = sigma_ratio(contrast.sigma(), gamma_sq, 1.0);
    let fhat = (1..=order)
        .map(|m| {
            let reference = if m == 1 { 2.0 * PI * gamma_sq / lambda } else { 0.0 };
            let pref = lambda * lambda * ratio / (2.0 * PI * m as f64 * gamma.powi(m as i32 - 1));
            (shifted.n2(m, 1) - reference) * pref
        })
        .collect();
    Ok(PerturbationResult {
        base: EllipseParams::new(gamma, center, C64::new(0.0, 0.0))?,
        fhat,
        displacement: Displacement::Disk,
    })
}

/// Higher disk modes from the first column of `N^(1)`: entry `k` holds mode
/// `k` for `k = 2..=order + 1`, entries 0 and 1 are zero. Refused when
/// `|σ - γ²| ≤ 0.1 max(σ, γ²)`.
pub fn recover_disk_fplus(gpt: &GptMatrix, contrast: Contrast, order: usize) -> Result<Vec<C64>> {
    check_order(gpt, order, 1)?;
    check_lambda(gpt, contrast)?;
    let lambda = contrast.lambda();
    let sigma = contrast.sigma();
    let (shifted, gamma, _) = disk_base(gpt, contrast)?;
    let gamma_sq = gamma * gamma;
    if sigma.is_finite() {
        let gap = (sigma - gamma_sq).abs();
        let threshold = 0.1 * sigma.max(gamma_sq);
        if gap <= threshold {
            return Err(Error::NearSingular { gap, threshold });
        }
    }
    let ratio = sigma_ratio(sigma, gamma_sq, -1.0);
    let mut fhat = vec![C64::new(0.0, 0.0); order + 2];
    for m in 1..=order {
        // The centered reference disk has N^(1) = 0.
        let pref = lambda * lambda * ratio / (2.0 * PI * m as f64 * gamma.powi(m as i32 - 1));
        fhat[m + 1] = shifted.n1(m, 1).conj() * pref;
    }
    Ok(fhat)
}

/// [`recover_disk`] extended by the two extra modes `order` and
/// `order + 1` from [`recover_disk_fplus`].
pub fn recover_disk_extended(gpt: &GptMatrix, contrast: Contrast, order: usize) -> Result<PerturbationResult> {
    let mut result = recover_disk(gpt, contrast, order)?;
    let plus = recover_disk_fplus(gpt, contrast, order)?;
    result.fhat.extend_from_slice(&plus[order..]);
    Ok(result)
}

/// Exterior map `γ, a0, a1..a_order` from GPTs. Exact at `λ = ±1/2`; for
/// other contrasts the coefficients carry an `O(|λ| - 1/2)` error.
pub fn recover_conformal(gpt: &GptMatrix, contrast: Contrast, order: usize) -> Result<ExteriorMap> {
    check_order(gpt, order, 1)?;
    check_lambda(gpt, contrast)?;
    let lambda = contrast.lambda();
    let n11 = leading_n2(gpt)?;
    let gamma_sq = n11 / (8.0 * PI * lambda);
    if !(gamma_sq > 0.0) {
        return Err(Error::DegenerateInclusion(format!(
            "N2_11 / (8 pi lambda) = {gamma_sq} is not positive"
        )));
    }
    let a0 = if order >= 2 {
        gpt_center(gpt)?
    } else {
        C64::new(0.0, 0.0)
    };
    let mut map = ExteriorMap::new(gamma_sq.sqrt(), a0, Vec::new())?;
    for m in 1..=order {
        // Row m only involves a_0..a_{m-1}.
        let table = faber_table(&map, m);
        let sum: C64 = (1..=m).map(|n| table.p(m, n) * gpt.n1(n, 1)).sum();
        let mut tail = map.tail().to_vec();
        tail.push(sum / (4.0 * PI * m as f64));
        map = ExteriorMap::new(map.gamma(), a0, tail)?;
    }
    Ok(map)
}

/// Ellipse matching `N^(1)_{11}`, `N^(2)_{11}` and `N^(2)_{21}`.
pub fn equivalent_ellipse(gpt: &GptMatrix, contrast: Contrast) -> Result<EllipseParams> {
    check_order(gpt, 2, 2)?;
    check_lambda(gpt, contrast)?;
    let lambda = contrast.lambda();
    let n2 = leading_n2(gpt)?;
    let n1 = gpt.n1(1, 1);
    let n2_sq = n2 * n2;
    let n1_sq = n1.norm_sqr();
    let denominator = n2_sq - 4.0 * lambda * lambda * n1_sq;
    let threshold = 1e-8 * n2_sq;
    if denominator.abs() < threshold {
        return Err(Error::DegenerateEllipse { denominator, threshold });
    }
    let gamma_sq = lambda * n2 / (2.0 * PI) * (n2_sq - n1_sq) / denominator;
    if !(gamma_sq > 0.0) {
        return Err(Error::DegenerateInclusion(format!(
            "equivalent ellipse radius squared {gamma_sq} is not positive"
        )));
    }
    let e0 = gpt_center(gpt)?;
    let e1 = n1 * (2.0 * lambda * gamma_sq / n2);
    EllipseParams::new(gamma_sq.sqrt(), e0, e1)
}

/// First columns `Δ^(1)_{m1}`, `Δ^(2)_{m1}` for `m = 1..=order`: the FPTs of
/// the inclusion in the ellipse's Faber basis minus those of the ellipse
/// itself. The ellipse tensors are diagonal, so only `m = 1` subtracts.
pub fn modified_gpt_delta(gpt: &GptMatrix, ellipse: &EllipseParams, order: usize) -> Result<(Vec<C64>, Vec<C64>)> {
    check_order(gpt, order, 2)?;
    let map = ellipse.map();
    let table = faber_table(&map, order);
    let mut d1 = Vec::with_capacity(order);
    let mut d2 = Vec::with_capacity(order);
    for m in 1..=order {
        let mut a = C64::new(0.0, 0.0);
        let mut b = C64::new(0.0, 0.0);
        for n in 1..=m {
            let p = table.p(m, n);
            a += p * gpt.n1(n, 1);
            b += p.conj() * gpt.n2(n, 1);
        }
        d1.push(a);
        d2.push(b);
    }
    let own = fpt_analytic(&map, Contrast::from_lambda(gpt.lambda)?, 1, Some(1))?;
    d1[0] -= own.f1(1, 1);
    d2[0] -= own.f2(1, 1);
    Ok((d1, d2))
}

/// `s_m = (λγ^{2m} - |e1|^{2m}/(2γ^{2m})) / (γ^{4m} - |e1|^{2m})` and
/// `t_m = e1^m (λ - 1/2) / (γ^{4m} - |e1|^{2m})`.
pub fn st_coefficients(ellipse: &EllipseParams, contrast: Contrast, order: usize) -> StCoefficients {
    let lambda = contrast.lambda();
    let g2 = ellipse.gamma_e * ellipse.gamma_e;
    let e_sq = ellipse.e1.norm_sqr();
    let mut s = Vec::with_capacity(order);
    let mut t = Vec::with_capacity(order);
    for m in 1..=order as i32 {
        let gm = g2.powi(m);
        let em = e_sq.powi(m);
        let den = gm * gm - em;
        s.push(C64::new((lambda * gm - em / (2.0 * gm)) / den, 0.0));
        t.push(ellipse.e1.powi(m) * (lambda - 0.5) / den);
    }
    StCoefficients { s, t }
}

/// Linear response of the first-order differences `(Δ^(1)_{mn}, Δ^(2)_{mn},
/// conj Δ^(1)_{mn}, conj Δ^(2)_{mn})` to the unknowns `(εf̂_{m-n},
/// conj εf̂_{m-n}, εf̂_{m+n}, conj εf̂_{m+n})`.
///
/// Normal derivatives of the ellipse solutions carry `(s_m, t_m)`; the
/// tangential ones carry `s'_m = (λγ^{2m} + |e1|^{2m}/(2γ^{2m})) / (γ^{4m} -
/// |e1|^{2m})` and `t'_m = e1^m (λ + 1/2) / (γ^{4m} - |e1|^{2m})`.
pub fn perturbation_response(ellipse: &EllipseParams, contrast: Contrast, m: usize, n: usize) -> Matrix4<C64> {
    let lambda = contrast.lambda();
    let g2 = ellipse.gamma_e * ellipse.gamma_e;
    let e_sq = ellipse.e1.norm_sqr();
    let coeffs = |j: usize| {
        let gj = g2.powi(j as i32);
        let ej = e_sq.powi(j as i32);
        let den = gj * gj - ej;
        let ej1 = ellipse.e1.powi(j as i32);
        let d = den / (lambda * lambda - ej / (4.0 * gj * gj));
        let s = (lambda * gj - ej / (2.0 * gj)) / den;
        let sp = (lambda * gj + ej / (2.0 * gj)) / den;
        (d, s, ej1 * (lambda - 0.5) / den, sp, ej1 * (lambda + 0.5) / den)
    };
    let (dm, sm, tm, spm, tpm) = coeffs(m);
    let (dn, sn, tn, spn, tpn) = coeffs(n);
    let k = 2.0 * PI * (m * n) as f64 * dm * dn / ellipse.gamma_e.powi((m + n) as i32);
    let (p, q) = (k * (lambda + 0.5), k * (lambda - 0.5));
    let first = [
        -tm * sn * p + tpm * spn * q,
        -tn * sm * p + tpn * spm * q,
        tm * tn * p - tpm * tpn * q,
        C64::new(sm * sn * p - spm * spn * q, 0.0),
    ];
    let second = [
        C64::new(sm * sn * p + spm * spn * q, 0.0),
        tm.conj() * tn * p + tpm.conj() * tpn * q,
        -tn * sm * p - tpn * spm * q,
        -tm.conj() * sn * p - tpm.conj() * spn * q,
    ];
    let swap = |row: [C64; 4]| [row[1].conj(), row[0].conj(), row[3].conj(), row[2].conj()];
    let rows = [first, second, swap(first), swap(second)];
    Matrix4::from_fn(|i, j| rows[i][j])
}

fn ellipse_result(
    base: EllipseParams,
    order: usize,
    mode: impl Fn(usize) -> Result<C64>,
) -> Result<PerturbationResult> {
    let mut fhat = vec![C64::new(0.0, 0.0); order];
    for m in 2..=order {
        fhat[m - 1] = mode(m)?;
    }
    Ok(PerturbationResult {
        base,
        fhat,
        displacement: Displacement::Ellipse,
    })
}

/// Perturbed-ellipse recovery: modes `1..order` from the `n = 1` column by
/// inverting [`perturbation_response`], with `εf̂_0 = 0`.
pub fn recover_ellipse_perturbation(gpt: &GptMatrix, contrast: Contrast, order: usize) -> Result<PerturbationResult> {
    check_order(gpt, order, 2)?;
    let base = equivalent_ellipse(gpt, contrast)?;
    let (d1, d2) = modified_gpt_delta(gpt, &base, order)?;
    ellipse_result(base, order, |m| {
        let i = m - 1;
        let rhs = Vector4::new(d1[i], d2[i], d1[i].conj(), d2[i].conj());
        perturbation_response(&base, contrast, m, 1)
            .lu()
            .solve(&rhs)
            .map(|x| x[0])
            .ok_or_else(|| Error::Singular(format!("perturbation response for mode {} is singular", m - 1)))
    })
}

/// As [`recover_ellipse_perturbation`] but with the closed form
/// `εf̂_{m-1} = γ_e^{m+1}/(4πλm) (s_1 t̄_m Δ^(1) + s_m t_1 conj Δ^(1) + s_m s_1
/// Δ^(2) + t̄_m t_1 conj Δ^(2))`. It agrees with the full inversion only when
/// every `t_m` vanishes (`λ = 1/2` or `e1 = 0`); otherwise its error is first
/// order in the perturbation.
pub fn recover_ellipse_perturbation_closed_form(
    gpt: &GptMatrix,
    contrast: Contrast,
    order: usize,
) -> Result<PerturbationResult> {
    check_order(gpt, order, 2)?;
    let lambda = contrast.lambda();
    let base = equivalent_ellipse(gpt, contrast)?;
    let (d1, d2) = modified_gpt_delta(gpt, &base, order)?;
    let st = st_coefficients(&base, contrast, order);
    let (s, t) = (&st.s, &st.t);
    ellipse_result(base, order, |m| {
        let i = m - 1;
        let combo = s[0] * t[i].conj() * d1[i]
            + s[i] * t[0] * d1[i].conj()
            + s[i] * s[0] * d2[i]
            + t[i].conj() * t[0] * d2[i].conj();
        Ok(combo * (base.gamma_e.powi(m as i32 + 1) / (4.0 * PI * lambda * m as f64)))
    })
}
