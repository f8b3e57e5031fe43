use std::f64::consts::PI;

use nalgebra::DMatrix;

use super::{FptMatrix, GptMatrix};
use crate::conformal::{ExteriorMap, FaberTable};
use crate::{Error, Result, C64};

/// `-Σ_n Σ_m (1/4πn)(c_m X_{mn} + c̄_m Y_{mn}) t^{-n}` plus its conjugate,
/// with the inner sum over `m ≤ coeffs.len()` and `n ≤ max_n`.
fn expansion(coeffs: &[C64], x: &DMatrix<C64>, y: &DMatrix<C64>, t: C64, max_n: usize) -> f64 {
    let inv = t.inv();
    let mut power = C64::new(1.0, 0.0);
    let mut acc = C64::new(0.0, 0.0);
    for n in 0..max_n {
        power *= inv;
        let mut inner = C64::new(0.0, 0.0);
        for (m, c) in coeffs.iter().enumerate().take(x.nrows()) {
            inner += c * x[(m, n)] + c.conj() * y[(m, n)];
        }
        acc += inner * power / (4.0 * PI * (n + 1) as f64);
    }
    -2.0 * acc.re
}

/// Far-field perturbation `u - H` at `z` for the background potential
/// `H = Σ α_m z^m + c.c.`, from the GPT multipole expansion truncated at
/// the tensor order. With `far` set only the dipole terms `n = 1` are kept.
pub fn multipole_field(gpt: &GptMatrix, alpha: &[C64], z: C64, far: bool) -> f64 {
    let max_n = if far { 1 } else { gpt.order() };
    expansion(alpha, &gpt.n1, &gpt.n2, z, max_n)
}

/// `u - H` at `z = Ψ(w)` from the FPT expansion in `w^{-n}`, for
/// `H = Σ β_m F_m(z) + c.c.`. Converges everywhere outside the inclusion.
pub fn geometric_multipole_field(fpt: &FptMatrix, map: &ExteriorMap, beta: &[C64], w: C64) -> Result<f64> {
    if w.norm() <= map.gamma() {
        return Err(Error::Domain(format!(
            "|w| = {} must exceed gamma = {}",
            w.norm(),
            map.gamma()
        )));
    }
    Ok(expansion(beta, &fpt.f1, &fpt.f2, w, fpt.order()))
}

/// Faber coefficients `β_n` of `Σ α_m z^m`, dropping the constant term.
pub fn faber_beta(faber: &FaberTable, alpha: &[C64]) -> Vec<C64> {
    let order = alpha.len();
    let mut beta = vec![C64::new(0.0, 0.0); order];
    for (m, a) in alpha.iter().enumerate() {
        let q = faber.monomial_expansion(m + 1);
        for (n, qn) in q.iter().enumerate().skip(1) {
            beta[n - 1] += a * qn;
        }
    }
    beta
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::faber_table;
    use crate::potential::Contrast;
    use crate::tensors::{fpt_analytic, gpt_from_fpt};

    #[test]
    fn zero_tensors_give_zero_field() {
        let g = GptMatrix::zeros(3, 0.75);
        assert_eq!(
            multipole_field(&g, &[C64::new(1.0, 0.0)], C64::new(3.0, 1.0), false),
            0.0
        );
    }

    #[test]
    fn disk_dipole_matches_classical_solution() {
        let (r, sigma) = (0.9, 5.0);
        let contrast = Contrast::from_sigma(sigma).unwrap();
        let map = ExteriorMap::disk(r, C64::new(0.0, 0.0)).unwrap();
        let fpt = fpt_analytic(&map, contrast, 3, None).unwrap();
        let gpt = gpt_from_fpt(&fpt, &faber_table(&map, 3)).unwrap();
        let z = C64::new(2.5, -1.2);
        let got = multipole_field(&gpt, &[C64::new(0.5, 0.0)], z, false);
        let want = -((sigma - 1.0) / (sigma + 1.0) * r * r / z).re;
        assert!((got - want).abs() < 1e-13);
    }

    #[test]
    fn geometric_and_plain_expansions_agree_far_away() {
        let map = ExteriorMap::asymmetric().translated(C64::new(0.2, -0.1));
        let contrast = Contrast::from_sigma(5.0).unwrap();
        let order = 8;
        let table = faber_table(&map, order);
        let fpt = fpt_analytic(&map, contrast, order, None).unwrap();
        let gpt = gpt_from_fpt(&fpt, &table).unwrap();
        let alpha = [C64::new(0.5, 0.0), C64::new(0.0, 0.25)];
        let beta = faber_beta(&table, &alpha);
        let w = C64::from_polar(10.0 * map.gamma(), 0.8);
        let z = map.eval(w).unwrap();
        let plain = multipole_field(&gpt, &alpha, z, false);
        let geometric = geometric_multipole_field(&fpt, &map, &beta, w).unwrap();
        assert!((plain - geometric).abs() < 1e-8, "{plain} vs {geometric}");
        assert!(geometric_multipole_field(&fpt, &map, &beta, C64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn beta_reproduces_polynomial() {
        let map = ExteriorMap::asymmetric().translated(C64::new(0.3, 0.2));
        let table = faber_table(&map, 4);
        let alpha = [
            C64::new(0.5, 0.1),
            C64::new(-0.2, 0.3),
            C64::new(0.0, 0.0),
            C64::new(1.0, 0.0),
        ];
        let beta = faber_beta(&table, &alpha);
        let z = C64::new(0.7, -0.4);
        let poly: C64 = alpha.iter().enumerate().map(|(m, a)| a * z.powu(m as u32 + 1)).sum();
        let faber: C64 = beta.iter().enumerate().map(|(n, b)| b * table.eval(n + 1, z)).sum();
        let constant: C64 = alpha
            .iter()
            .enumerate()
            .map(|(m, a)| a * table.monomial_expansion(m + 1)[0])
            .sum();
        assert!((poly - faber - constant).norm() < 1e-12);
    }
}
