//! Dense tensors, a reverse-mode tape, Adam, and seeded randomness.

mod adam;
mod rng;
mod tape;
mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use rng::RandomSource;
pub use tape::{log_sum_exp, softmax_in_place, Gradients, Tape, Unary, Var};
pub use tensor::Tensor;

pub(crate) use tensor::gemm;

use crate::error::Result;

/// Reparameterized draw `mu + exp(log_var / 2) ⊙ ε` with `ε ~ N(0, I)`.
///
/// ε enters the tape as a constant, so gradients reach `mu` and `log_var`.
pub fn gaussian_sample(
    tape: &mut Tape,
    mu: Var,
    log_var: Var,
    rng: &mut RandomSource,
) -> Result<Var> {
    let shape = tape.value(mu).shape().to_vec();
    let n: usize = shape.iter().product();
    let eps: Vec<f64> = (0..n).map(|_| rng.normal()).collect();
    let eps = tape.constant(Tensor::new(shape, eps)?);
    let half = tape.scale(log_var, 0.5);
    let std = tape.exp(half)?;
    let noise = tape.mul(std, eps)?;
    tape.add(mu, noise)
}
