use nalgebra::DMatrix;

use crate::conformal::BoundaryFrame;
use crate::potential::{assemble, Contrast, NpDiscretization};
use crate::{Error, Result, C64};

/// `N^(1)_{mn} = ∫ z^n (λI - K*)⁻¹[∂z^m/∂ν]` and
/// `N^(2)_{mn} = ∫ z^n (λI - K*)⁻¹[∂z̄^m/∂ν]` for `1 ≤ m, n ≤ order`.
#[derive(Clone, Debug, PartialEq)]
pub struct GptMatrix {
    pub n1: DMatrix<C64>,
    pub n2: DMatrix<C64>,
    pub lambda: f64,
}

impl GptMatrix {
    pub fn new(n1: DMatrix<C64>, n2: DMatrix<C64>, lambda: f64) -> Result<Self> {
        if !n1.is_square() || n1.shape() != n2.shape() || n1.nrows() == 0 {
            return Err(Error::InvalidArgument(format!(
                "GPT blocks must be equal nonempty squares, got {:?} and {:?}",
                n1.shape(),
                n2.shape()
            )));
        }
        Ok(Self { n1, n2, lambda })
    }

    pub fn zeros(order: usize, lambda: f64) -> Self {
        Self {
            n1: DMatrix::zeros(order, order),
            n2: DMatrix::zeros(order, order),
            lambda,
        }
    }

    pub fn order(&self) -> usize {
        self.n1.nrows()
    }

    /// `N^(1)_{mn}`, one-based.
    pub fn n1(&self, m: usize, n: usize) -> C64 {
        self.n1[(m - 1, n - 1)]
    }

    /// `N^(2)_{mn}`, one-based.
    pub fn n2(&self, m: usize, n: usize) -> C64 {
        self.n2[(m - 1, n - 1)]
    }

    /// Leading `order x order` blocks.
    pub fn truncated(&self, order: usize) -> Result<Self> {
        if order == 0 || order > self.order() {
            return Err(Error::InvalidArgument(format!(
                "cannot truncate order {} tensors to order {order}",
                self.order()
            )));
        }
        Ok(Self {
            n1: self.n1.view((0, 0), (order, order)).into_owned(),
            n2: self.n2.view((0, 0), (order, order)).into_owned(),
            lambda: self.lambda,
        })
    }

    /// `(‖N1 - N1ᵀ‖/‖N1‖, ‖N2 - N2ᴴ‖/‖N2‖)` in the Frobenius norm; a zero
    /// block reports zero.
    pub fn symmetry_residuals(&self) -> (f64, f64) {
        let rel = |diff: f64, base: f64| if base == 0.0 { diff } else { diff / base };
        (
            rel((&self.n1 - self.n1.transpose()).norm(), self.n1.norm()),
            rel((&self.n2 - self.n2.adjoint()).norm(), self.n2.norm()),
        )
    }
}

/// GPTs of the frame's inclusion by the Nyström method.
pub fn gpt_forward(frame: &BoundaryFrame, contrast: Contrast, order: usize) -> Result<GptMatrix> {
    check_resolution(frame.len(), order)?;
    gpt_forward_with(&assemble(frame)?, contrast, order)
}

/// As [`gpt_forward`], reusing an assembled discretization.
pub fn gpt_forward_with(disc: &NpDiscretization, contrast: Contrast, order: usize) -> Result<GptMatrix> {
    check_resolution(disc.len(), order)?;
    let frame = &disc.frame;
    let solver = disc.factor(contrast)?;
    // ∂(z^m)/∂ν = m z^{m-1} ν with ν read as a complex number.
    let mut rhs = Vec::with_capacity(2 * order);
    for m in 1..=order {
        let g: Vec<C64> = frame
            .points
            .iter()
            .zip(&frame.normal)
            .map(|(z, nu)| z.powu(m as u32 - 1) * nu * m as f64)
            .collect();
        rhs.push(g.iter().map(|g| g.re).collect());
        rhs.push(g.iter().map(|g| g.im).collect());
    }
    let sol = solver.solve_many(&rhs)?;

    let powers: Vec<Vec<C64>> = (1..=order)
        .map(|n| {
            frame
                .points
                .iter()
                .zip(&frame.weights)
                .map(|(z, w)| z.powu(n as u32) * *w)
                .collect()
        })
        .collect();
    let mut n1 = DMatrix::zeros(order, order);
    let mut n2 = DMatrix::zeros(order, order);
    for m in 0..order {
        let (re, im) = (&sol[2 * m], &sol[2 * m + 1]);
        for (n, zw) in powers.iter().enumerate() {
            let mut a = C64::new(0.0, 0.0);
            let mut b = C64::new(0.0, 0.0);
            for ((zw, r), i) in zw.iter().zip(re).zip(im) {
                a += zw * C64::new(*r, *i);
                b += zw * C64::new(*r, -*i);
            }
            n1[(m, n)] = a;
            n2[(m, n)] = b;
        }
    }
    GptMatrix::new(n1, n2, contrast.lambda())
}

fn check_resolution(n: usize, order: usize) -> Result<()> {
    if order == 0 {
        return Err(Error::InvalidArgument("GPT order must be at least 1".into()));
    }
    if n < 8 * order {
        return Err(Error::InvalidArgument(format!(
            "{n} boundary samples cannot resolve order {order}; need at least {}",
            8 * order
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conformal::{boundary_frame, ExteriorMap, ShapeSpec};
    use std::f64::consts::PI;

    fn disk_frame(r: f64, c: C64, n: usize) -> BoundaryFrame {
        boundary_frame(&ShapeSpec::Map(ExteriorMap::disk(r, c).unwrap()), n).unwrap()
    }

    #[test]
    fn centered_disk_tensors() {
        let r = 1.3;
        let frame = disk_frame(r, C64::new(0.0, 0.0), 256);
        for lambda in [0.5, -0.5, 0.75, -0.75, 51.0 / 98.0] {
            let g = gpt_forward(&frame, Contrast::from_lambda(lambda).unwrap(), 5).unwrap();
            for m in 1..=5 {
                for n in 1..=5 {
                    let want = if m == n {
                        2.0 * PI * m as f64 * r.powi(2 * m as i32) / lambda
                    } else {
                        0.0
                    };
                    assert!((g.n2(m, n) - want).norm() < 1e-9 * want.abs().max(1.0));
                    assert!(g.n1(m, n).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn shifted_disk_first_column() {
        let c = C64::new(0.4, -0.3);
        let frame = disk_frame(1.0, c, 256);
        let g = gpt_forward(&frame, Contrast::from_sigma(5.0).unwrap(), 3).unwrap();
        assert!((g.n2(2, 1) - 2.0 * c.conj() * g.n2(1, 1)).norm() < 1e-10);
    }

    #[test]
    fn ellipse_first_entry() {
        let map = ExteriorMap::ellipse(1.0, C64::new(0.0, 0.0), C64::new(0.5, 0.0)).unwrap();
        let frame = boundary_frame(&ShapeSpec::Map(map), 256).unwrap();
        let g = gpt_forward(&frame, Contrast::from_lambda(0.75).unwrap(), 2).unwrap();
        assert!((g.n1(1, 1) - 3.0 * PI / 4.0).norm() < 1e-10);
    }

    #[test]
    fn kite_symmetry() {
        let frame = boundary_frame(&ShapeSpec::Kite, 256).unwrap();
        let g = gpt_forward(&frame, Contrast::from_sigma(50.0).unwrap(), 6).unwrap();
        let (s1, s2) = g.symmetry_residuals();
        assert!(s1 < 1e-8 && s2 < 1e-8);
    }

    #[test]
    fn resolution_floor() {
        let frame = disk_frame(1.0, C64::new(0.0, 0.0), 64);
        assert!(gpt_forward(&frame, Contrast::perfect_conductor(), 9).is_err());
        assert!(gpt_forward(&frame, Contrast::perfect_conductor(), 8).is_ok());
    }

    #[test]
    fn truncation_keeps_leading_block() {
        let frame = boundary_frame(&ShapeSpec::Kite, 128).unwrap();
        let g = gpt_forward(&frame, Contrast::insulator(), 4).unwrap();
        let t = g.truncated(2).unwrap();
        assert_eq!(t.order(), 2);
        assert_eq!(t.n2(2, 1), g.n2(2, 1));
        assert!(g.truncated(5).is_err());
    }
}
