use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::numerics::{RandomSource, Tape, Tensor, Unary, Var};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    /// `[out × in]`
    pub w: Tensor,
    /// `[out]`
    pub b: Tensor,
}

/// Fully connected network with tanh hidden layers and a linear output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    pub layers: Vec<Dense>,
}

/// Tape handles for one [`Mlp`]'s weights.
#[derive(Debug, Clone)]
pub struct BoundMlp {
    pub layers: Vec<(Var, Var)>,
}

impl Mlp {
    /// `sizes = [input, hidden..., output]`; weights drawn N(0, 1/fan_in),
    /// biases zero.
    pub fn new(sizes: &[usize], rng: &mut RandomSource) -> Self {
        let layers = sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let scale = 1.0 / (fan_in as f64).sqrt();
                let data = (0..fan_in * fan_out).map(|_| rng.normal() * scale).collect();
                Dense {
                    w: Tensor::matrix(fan_out, fan_in, data).unwrap(),
                    b: Tensor::zeros(&[fan_out]),
                }
            })
            .collect();
        Self { layers }
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.shape()[1]
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().w.shape()[0]
    }

    pub fn bind(&self, tape: &mut Tape) -> BoundMlp {
        BoundMlp {
            layers: self
                .layers
                .iter()
                .map(|d| (tape.param(d.w.clone()), tape.param(d.b.clone())))
                .collect(),
        }
    }

    /// Binds the weights as constants (no gradients).
    pub fn bind_frozen(&self, tape: &mut Tape) -> BoundMlp {
        BoundMlp {
            layers: self
                .layers
                .iter()
                .map(|d| (tape.constant(d.w.clone()), tape.constant(d.b.clone())))
                .collect(),
        }
    }

    pub fn tensors(&self) -> impl Iterator<Item = &Tensor> {
        self.layers.iter().flat_map(|d| [&d.w, &d.b])
    }

    pub fn tensors_mut(&mut self) -> impl Iterator<Item = &mut Tensor> {
        self.layers.iter_mut().flat_map(|d| [&mut d.w, &mut d.b])
    }

    /// Forward pass on plain rows, without recording gradients.
    pub fn eval(&self, x: &Tensor) -> Result<Tensor> {
        let mut tape = Tape::new();
        let bound = self.bind_frozen(&mut tape);
        let xv = tape.constant(x.clone());
        let y = bound.forward(&mut tape, xv)?;
        Ok(tape.value(y).clone())
    }
}

impl BoundMlp {
    pub fn forward(&self, tape: &mut Tape, x: Var) -> Result<Var> {
        let mut h = x;
        let last = self.layers.len() - 1;
        for (i, &(w, b)) in self.layers.iter().enumerate() {
            h = tape.affine(h, w, b)?;
            if i < last {
                h = tape.unary(h, Unary::Tanh)?;
            }
        }
        Ok(h)
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.layers.iter().flat_map(|&(w, b)| [w, b])
    }
}
