use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::GptMatrix;
use crate::C64;

/// How the noise standard deviation relates to each entry.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseScale {
    /// Standard deviation `sqrt(Var)·|entry|`.
    Relative,
    /// Standard deviation `sqrt(Var)` for every entry.
    #[default]
    Absolute,
}

/// `Var = 10^{-snr/10}`.
pub fn noise_variance(snr: f64) -> f64 {
    10f64.powf(-snr / 10.0)
}

/// Gaussian perturbation of both tensors at the given SNR in decibels,
/// applied independently to real and imaginary parts, followed by
/// re-symmetrizing `N1` and re-Hermitizing `N2`. `snr = +∞` returns the
/// input unchanged.
pub fn add_noise(gpt: &GptMatrix, snr: f64, seed: u64, scale: NoiseScale) -> GptMatrix {
    if snr == f64::INFINITY {
        return gpt.clone();
    }
    let std = noise_variance(snr).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perturb = |m: &DMatrix<C64>| -> DMatrix<C64> {
        let (rows, cols) = m.shape();
        let mut out = m.clone();
        for i in 0..rows {
            for j in 0..cols {
                let v = m[(i, j)];
                let s = match scale {
                    NoiseScale::Relative => std * v.norm(),
                    NoiseScale::Absolute => std,
                };
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                out[(i, j)] = v + C64::new(re, im) * s;
            }
        }
        out
    };
    let n1 = perturb(&gpt.n1);
    let n2 = perturb(&gpt.n2);
    let half = C64::new(0.5, 0.0);
    GptMatrix {
        n1: (&n1 + n1.transpose()) * half,
        n2: (&n2 + n2.adjoint()) * half,
        lambda: gpt.lambda,
    }
}
