//! Generalized polarization tensors (GPTs) from a Nyström solve, Faber
//! polynomial polarization tensors (FPTs) from the Grunsky matrix, basis
//! changes between the two, multipole fields and measurement noise.

mod field;
mod fpt;
mod gpt;
mod noise;

pub use field::{faber_beta, geometric_multipole_field, multipole_field};
pub use fpt::{default_truncation, fpt_analytic, fpt_from_gpt, gpt_from_fpt, FptMatrix, SeriesSolver};
pub use gpt::{gpt_forward, gpt_forward_with, GptMatrix};
pub use noise::{add_noise, noise_variance, NoiseScale};
