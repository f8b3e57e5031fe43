use nalgebra::DMatrix;

use super::ExteriorMap;
use crate::C64;

/// Coefficients `p_{mn}` of the Faber polynomials `F_m(z) = Σ_{n≤m} p_{mn} z^n`
/// for `0 ≤ m ≤ order`.
#[derive(Clone, Debug, PartialEq)]
pub struct FaberTable {
    order: usize,
    rows: Vec<Vec<C64>>,
    map: ExteriorMap,
}

/// Faber coefficient rows from the three-term-plus-convolution recursion
/// `F_{m+1} = z F_m - m a_m - Σ_{k=0}^{m} a_k F_{m-k}`.
pub fn faber_table(map: &ExteriorMap, order: usize) -> FaberTable {
    let zero = C64::new(0.0, 0.0);
    let mut rows: Vec<Vec<C64>> = Vec::with_capacity(order + 1);
    rows.push(vec![C64::new(1.0, 0.0)]);
    for m in 0..order {
        let mut next = vec![zero; m + 2];
        // z F_m
        for (n, p) in rows[m].iter().enumerate() {
            next[n + 1] += p;
        }
        next[0] -= map.coeff(m) * m as f64;
        for k in 0..=m {
            let a = map.coeff(k);
            if a == zero {
                continue;
            }
            for (n, p) in rows[m - k].iter().enumerate() {
                next[n] -= a * p;
            }
        }
        rows.push(next);
    }
    FaberTable {
        order,
        rows,
        map: map.clone(),
    }
}

impl FaberTable {
    pub fn order(&self) -> usize {
        self.order
    }

    /// Map the table was generated from.
    pub fn map(&self) -> &ExteriorMap {
        &self.map
    }

    /// `p_{mn}`, zero for `n > m`.
    pub fn p(&self, m: usize, n: usize) -> C64 {
        self.rows[m].get(n).copied().unwrap_or_default()
    }

    /// Coefficients of `F_m` from the constant term up.
    pub fn row(&self, m: usize) -> &[C64] {
        &self.rows[m]
    }

    /// `F_m(z)` by Horner's rule.
    pub fn eval(&self, m: usize, z: C64) -> C64 {
        self.rows[m].iter().rev().fold(C64::new(0.0, 0.0), |acc, p| acc * z + p)
    }

    /// Unit lower-triangular block `[p_{mn}]_{m,n=1..size}`; the constant
    /// column `n = 0` is dropped.
    pub fn basis_matrix(&self, size: usize) -> DMatrix<C64> {
        assert!(size <= self.order, "basis block larger than table order");
        DMatrix::from_fn(size, size, |i, j| self.p(i + 1, j + 1))
    }

    /// Coefficients `q_n` with `z^m = Σ_{n=0}^{m} q_n F_n(z)`.
    pub fn monomial_expansion(&self, m: usize) -> Vec<C64> {
        assert!(m <= self.order);
        // Back substitution against the monic rows, highest degree first.
        let mut residual = vec![C64::new(0.0, 0.0); m + 1];
        residual[m] = C64::new(1.0, 0.0);
        let mut q = vec![C64::new(0.0, 0.0); m + 1];
        for deg in (0..=m).rev() {
            let coef = residual[deg];
            q[deg] = coef;
            for (n, p) in self.rows[deg].iter().enumerate() {
                residual[n] -= coef * p;
            }
        }
        q
    }
}

/// Grunsky coefficients `c_{mk}` for `1 ≤ m, k ≤ order` together with the
/// symmetrization `g_{mk} = sqrt(k/m) c_{mk} / γ^{m+k}`.
///
/// Storage is zero-based: `c[(m-1, k-1)] = c_{mk}`.
#[derive(Clone, Debug, PartialEq)]
pub struct GrunskyMatrix {
    pub order: usize,
    pub gamma: f64,
    pub c: DMatrix<C64>,
    pub g: DMatrix<C64>,
}

/// Column-by-column evaluation of
/// `c_{m,k+1} = c_{m+1,k} - a_{m+k} + Σ_{s<m} a_{m-s} c_{sk} - Σ_{s<k} a_{k-s} c_{ms}`
/// seeded with `c_{m1} = m a_m`.
///
/// Column `k` needs rows up to `2·order - k + 1`, so a `2·order` row buffer
/// makes every returned entry exact with respect to the stored Laurent tail.
pub fn grunsky(map: &ExteriorMap, order: usize) -> GrunskyMatrix {
    assert!(order >= 1, "Grunsky order must be at least 1");
    let rows = 2 * order;
    // buf[m][k], 1-based with a zero pad row/column.
    let mut buf = vec![vec![C64::new(0.0, 0.0); order + 1]; rows + 2];
    for (m, row) in buf.iter_mut().enumerate().take(rows + 1).skip(1) {
        row[1] = map.coeff(m) * m as f64;
    }
    for k in 1..order {
        for m in 1..=(rows - k) {
            let mut value = buf[m + 1][k] - map.coeff(m + k);
            for s in 1..m {
                value += map.coeff(m - s) * buf[s][k];
            }
            for s in 1..k {
                value -= map.coeff(k - s) * buf[m][s];
            }
            buf[m][k + 1] = value;
        }
    }
    let c = DMatrix::from_fn(order, order, |i, j| buf[i + 1][j + 1]);
    let gamma = map.gamma();
    let g = DMatrix::from_fn(order, order, |i, j| {
        let (m, k) = ((i + 1) as f64, (j + 1) as f64);
        c[(i, j)] * (k / m).sqrt() / gamma.powf(m + k)
    });
    GrunskyMatrix { order, gamma, c, g }
}

impl GrunskyMatrix {
    /// `c_{mk}`, one-based.
    pub fn c(&self, m: usize, k: usize) -> C64 {
        self.c[(m - 1, k - 1)]
    }

    /// Largest singular value of the finite section of `G`.
    pub fn spectral_norm(&self) -> f64 {
        self.g.clone().singular_values().iter().cloned().fold(0.0, f64::max)
    }

    /// `max |k c_{mk} - m c_{km}|` relative to `max |c|`.
    pub fn symmetry_residual(&self) -> f64 {
        let scale = self.c.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for m in 1..=self.order {
            for k in 1..=self.order {
                let diff = self.c(m, k) * k as f64 - self.c(k, m) * m as f64;
                worst = worst.max(diff.norm() / (scale * self.order as f64));
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    /// Laurent coefficients of `F_m(Ψ(w))` by truncated series composition:
    /// index `j` holds the coefficient of `w^{m - j}`.
    fn compose(table: &FaberTable, map: &ExteriorMap, m: usize, depth: usize) -> Vec<C64> {
        // psi[j] = coefficient of w^{1-j}
        let mut psi = vec![C64::new(0.0, 0.0); depth + 2];
        psi[0] = c(1.0, 0.0);
        for (j, slot) in psi.iter_mut().enumerate().skip(1) {
            *slot = map.coeff(j - 1);
        }
        // power[j] = coefficient of w^{n-j} in Ψ^n
        let mut out = vec![C64::new(0.0, 0.0); m + depth + 1];
        let mut power = vec![c(1.0, 0.0)];
        for n in 0..=m {
            let p = table.p(m, n);
            for (j, v) in power.iter().enumerate() {
                // w^{n-j} -> index (m - n + j)
                let idx = m - n + j;
                if idx < out.len() {
                    out[idx] += p * v;
                }
            }
            let mut next = vec![C64::new(0.0, 0.0); (power.len() + psi.len()).min(m + depth + 2)];
            for (i, a) in power.iter().enumerate() {
                for (j, b) in psi.iter().enumerate() {
                    if i + j < next.len() {
                        next[i + j] += a * b;
                    }
                }
            }
            power = next;
        }
        out
    }

    #[test]
    fn first_rows_match_closed_forms() {
        let map = ExteriorMap::new(1.3, c(0.2, -0.1), vec![c(0.3, 0.1), c(-0.05, 0.02)]).unwrap();
        let t = faber_table(&map, 4);
        let a0 = map.a0();
        let a1 = map.coeff(1);
        assert_eq!(t.row(0), &[c(1.0, 0.0)]);
        assert!((t.p(1, 0) + a0).norm() < 1e-15);
        assert_eq!(t.p(1, 1), c(1.0, 0.0));
        assert!((t.p(2, 0) - (a0 * a0 - 2.0 * a1)).norm() < 1e-15);
        assert!((t.p(2, 1) + 2.0 * a0).norm() < 1e-15);
        for m in 0..=4 {
            assert_eq!(t.p(m, m), c(1.0, 0.0), "F_{m} not monic");
        }
    }

    #[test]
    fn ellipse_third_faber_polynomial() {
        let a1 = c(0.5, 0.2);
        let map = ExteriorMap::ellipse(1.0, c(0.0, 0.0), a1).unwrap();
        let t = faber_table(&map, 3);
        let expected = [c(0.0, 0.0), -3.0 * a1, c(0.0, 0.0), c(1.0, 0.0)];
        for (got, want) in t.row(3).iter().zip(expected) {
            assert!((got - want).norm() < 1e-15);
        }
    }

    #[test]
    fn rows_depend_only_on_leading_coefficients() {
        let full = ExteriorMap::asymmetric().translated(c(0.1, 0.3));
        let mut tail = full.tail().to_vec();
        tail.truncate(2);
        let short = ExteriorMap::new(1.0, full.a0(), tail).unwrap();
        let a = faber_table(&full, 6);
        let b = faber_table(&short, 6);
        for m in 0..=3 {
            assert_eq!(a.row(m), b.row(m));
        }
        assert_ne!(a.row(4), b.row(4));
    }

    #[test]
    fn monomial_expansion_inverts_table() {
        let map = ExteriorMap::asymmetric().translated(c(0.3, -0.2));
        let t = faber_table(&map, 6);
        let z = c(0.7, 0.4);
        for m in 0..=6 {
            let q = t.monomial_expansion(m);
            let sum: C64 = q.iter().enumerate().map(|(n, qn)| qn * t.eval(n, z)).sum();
            assert!((sum - z.powu(m as u32)).norm() < 1e-12);
        }
    }

    #[test]
    fn grunsky_listed_entries() {
        let map = ExteriorMap::new(
            1.0,
            c(0.1, 0.0),
            vec![c(0.3, 0.1), c(0.1, -0.2), c(0.05, 0.0), c(0.0, 0.03), c(0.02, 0.01)],
        )
        .unwrap();
        let g = grunsky(&map, 3);
        let a = |k| map.coeff(k);
        let close = |x: C64, y: C64| (x - y).norm() < 1e-14;
        assert!(close(g.c(1, 1), a(1)));
        assert!(close(g.c(1, 2), a(2)));
        assert!(close(g.c(1, 3), a(3)));
        assert!(close(g.c(2, 1), 2.0 * a(2)));
        assert!(close(g.c(2, 2), 2.0 * a(3) + a(1) * a(1)));
        assert!(close(g.c(2, 3), 2.0 * a(4) + 2.0 * a(1) * a(2)));
        assert!(close(g.c(3, 1), 3.0 * a(3)));
        assert!(close(g.c(3, 2), 3.0 * a(4) + 3.0 * a(1) * a(2)));
        assert!(close(
            g.c(3, 3),
            3.0 * a(5) + 3.0 * a(1) * a(3) + 3.0 * a(2) * a(2) + a(1).powu(3)
        ));
    }

    #[test]
    fn ellipse_grunsky_is_diagonal_power() {
        let a1 = c(0.4, 0.1);
        let map = ExteriorMap::ellipse(1.2, c(0.3, 0.0), a1).unwrap();
        let g = grunsky(&map, 8);
        for m in 1..=8 {
            for k in 1..=8 {
                let want = if m == k { a1.powu(m as u32) } else { c(0.0, 0.0) };
                assert!((g.c(m, k) - want).norm() < 1e-14, "c_{m}{k}");
            }
        }
    }

    #[test]
    fn disk_grunsky_vanishes() {
        let g = grunsky(&ExteriorMap::disk(2.0, c(1.0, 1.0)).unwrap(), 5);
        assert!(g.c.iter().all(|v| v.norm() == 0.0));
        assert_eq!(g.spectral_norm(), 0.0);
    }

    #[test]
    fn grunsky_matches_series_composition() {
        let map = ExteriorMap::asymmetric().translated(c(0.2, 0.1));
        let order = 8;
        let table = faber_table(&map, order);
        let g = grunsky(&map, order);
        for m in 1..=order {
            let series = compose(&table, &map, m, order + 2);
            // series[m] is w^0, series[m + k] is w^{-k}
            assert!((series[0] - 1.0).norm() < 1e-13);
            for j in 1..=m {
                assert!(series[j].norm() < 1e-12, "positive power w^{} in F_{m}", m - j);
            }
            for k in 1..=order {
                let diff = (series[m + k] - g.c(m, k)).norm();
                assert!(diff < 1e-12, "c_{m}{k}: {diff}");
            }
        }
    }

    #[test]
    fn faber_grunsky_residual_on_circle() {
        let map = ExteriorMap::asymmetric();
        let order = 8;
        let table = faber_table(&map, order);
        let g = grunsky(&map, 64);
        let r = 1.5 * map.gamma();
        for j in 0..16 {
            let w = C64::from_polar(r, j as f64 * 0.39);
            let z = map.eval(w).unwrap();
            for m in 1..=order {
                let mut model = w.powu(m as u32);
                for k in 1..=64 {
                    model += g.c(m, k) * w.powi(-(k as i32));
                }
                assert!((table.eval(m, z) - model).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn symmetrized_grunsky_identities() {
        let g = grunsky(&ExteriorMap::asymmetric(), 12);
        assert!(g.symmetry_residual() < 1e-12);
        for m in 0..12 {
            for k in 0..12 {
                assert!((g.g[(m, k)] - g.g[(k, m)]).norm() < 1e-12);
            }
        }
        let norms: Vec<f64> = (1..=12)
            .map(|order| grunsky(&ExteriorMap::asymmetric(), order).spectral_norm())
            .collect();
        assert!(norms.iter().all(|&n| n < 1.0));
        assert!(norms.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    }
}
