//! Speaker, listener and reconstruction decoder, with the two discrete
//! channels: VQ-VIB (Gaussian sample snapped to the nearest codebook vector)
//! and a one-hot baseline (Gumbel-softmax, straight-through).
//!
//! All network inputs are CIELAB triples divided by 100. Signal indices are
//! 0-based everywhere.

mod checkpoint;
mod mlp;

pub use checkpoint::{Checkpoint, NamedTensor, CHECKPOINT_FORMAT};
pub use mlp::{BoundMlp, Dense, Mlp};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gaussian_sample, softmax_in_place, RandomSource, Tape, Tensor, Var};
use crate::wcs::{ChipTable, NamingSystem};

/// Weight of the commitment term in the VQ auxiliary loss.
pub const COMMITMENT_WEIGHT: f64 = 0.25;
/// Gumbel-softmax temperature for the one-hot channel.
pub const GUMBEL_TEMPERATURE: f64 = 1.0;

/// K trainable embedding vectors in the communication space, `[K × dim]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Codebook {
    vectors: Tensor,
}

impl Codebook {
    pub fn new(vectors: Tensor) -> Result<Self> {
        if vectors.shape().len() != 2 || vectors.rows() == 0 || vectors.cols() == 0 {
            return Err(Error::invalid("codebook needs K ≥ 1 vectors of dim ≥ 1"));
        }
        if !vectors.is_finite() {
            return Err(Error::NonFinite("codebook vector".into()));
        }
        Ok(Self { vectors })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::invalid("codebook rows differ in length"));
        }
        Self::new(Tensor::matrix(rows.len(), dim, rows.concat())?)
    }

    /// Entries i.i.d. N(0, 0.1²).
    pub fn random(k: usize, dim: usize, rng: &mut RandomSource) -> Result<Self> {
        let data = (0..k * dim).map(|_| 0.1 * rng.normal()).collect();
        Self::new(Tensor::matrix(k, dim, data)?)
    }

    pub fn len(&self) -> usize {
        self.vectors.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        self.vectors.row(i)
    }

    pub fn tensor(&self) -> &Tensor {
        &self.vectors
    }

    pub fn tensor_mut(&mut self) -> &mut Tensor {
        &mut self.vectors
    }

    /// Index of the nearest vector to `z`; ties go to the lowest index.
    pub fn nearest(&self, z: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for i in 0..self.len() {
            let d: f64 = self
                .vector(i)
                .iter()
                .zip(z)
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }
}

/// Nearest-codebook quantization: `(index, ζ_index)`.
pub fn quantize(z: &[f64], codebook: &Codebook) -> Result<(usize, Vec<f64>)> {
    if codebook.is_empty() {
        return Err(Error::invalid("empty codebook"));
    }
    if z.len() != codebook.dim() {
        return Err(Error::invalid(format!(
            "z has dim {}, codebook dim {}",
            z.len(),
            codebook.dim()
        )));
    }
    let i = codebook.nearest(z);
    Ok((i, codebook.vector(i).to_vec()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianParams {
    pub mu: Vec<f64>,
    pub log_var: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SpeakerKind {
    VqVib(Codebook),
    OneHot { vocab: usize },
}

impl SpeakerKind {
    pub fn name(&self) -> &'static str {
        match self {
            SpeakerKind::VqVib(_) => "vqvib",
            SpeakerKind::OneHot { .. } => "onehot",
        }
    }

    /// Dimension of the signal vector c.
    pub fn comm_dim(&self) -> usize {
        match self {
            SpeakerKind::VqVib(cb) => cb.dim(),
            SpeakerKind::OneHot { vocab } => *vocab,
        }
    }

    pub fn n_signals(&self) -> usize {
        match self {
            SpeakerKind::VqVib(cb) => cb.len(),
            SpeakerKind::OneHot { vocab } => *vocab,
        }
    }

    /// Vector emitted for signal `i`: the codebook vector or a basis vector.
    pub fn embedding(&self, i: usize) -> Vec<f64> {
        match self {
            SpeakerKind::VqVib(cb) => cb.vector(i).to_vec(),
            SpeakerKind::OneHot { vocab } => {
                let mut e = vec![0.0; *vocab];
                e[i] = 1.0;
                e
            }
        }
    }

    fn encoder_outputs(&self) -> usize {
        match self {
            SpeakerKind::VqVib(cb) => 2 * cb.dim(),
            SpeakerKind::OneHot { vocab } => *vocab,
        }
    }
}

/// What one act of speaking produced.
#[derive(Debug, Clone, PartialEq)]
pub struct CommOutcome {
    pub c: Vec<f64>,
    pub index: usize,
    /// Pre-quantization sample (VQ-VIB) or Gumbel-perturbed logits (one-hot).
    pub z: Vec<f64>,
    pub params: Encoding,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Encoding {
    Gaussian(GaussianParams),
    Logits(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Speaker {
    pub encoder: Mlp,
    pub kind: SpeakerKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Listener {
    pub net: Mlp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoder {
    pub net: Mlp,
}

fn row_tensor(x: &[f64]) -> Tensor {
    Tensor::matrix(1, x.len(), x.to_vec()).unwrap()
}

fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in xs.iter().enumerate() {
        if v > xs[best] {
            best = i;
        }
    }
    best
}

impl Speaker {
    pub fn new(kind: SpeakerKind, hidden: &[usize], rng: &mut RandomSource) -> Self {
        let mut sizes = vec![3];
        sizes.extend_from_slice(hidden);
        sizes.push(kind.encoder_outputs());
        Self {
            encoder: Mlp::new(&sizes, rng),
            kind,
        }
    }

    pub fn codebook(&self) -> Option<&Codebook> {
        match &self.kind {
            SpeakerKind::VqVib(cb) => Some(cb),
            SpeakerKind::OneHot { .. } => None,
        }
    }

    /// Gaussian parameters μ(x), log σ²(x) of a VQ-VIB speaker.
    pub fn encode(&self, x: [f64; 3]) -> Result<GaussianParams> {
        let SpeakerKind::VqVib(cb) = &self.kind else {
            return Err(Error::invalid("encode: one-hot speakers emit logits"));
        };
        let out = self.encoder.eval(&row_tensor(&x))?;
        let d = cb.dim();
        Ok(GaussianParams {
            mu: out.data()[..d].to_vec(),
            log_var: out.data()[d..].to_vec(),
        })
    }

    /// Categorical logits of a one-hot speaker.
    pub fn logits(&self, x: [f64; 3]) -> Result<Vec<f64>> {
        if !matches!(self.kind, SpeakerKind::OneHot { .. }) {
            return Err(Error::invalid("logits: VQ-VIB speakers emit Gaussians"));
        }
        Ok(self.encoder.eval(&row_tensor(&x))?.into_data())
    }

    pub fn speak(&self, x: [f64; 3], rng: &mut RandomSource) -> Result<CommOutcome> {
        match &self.kind {
            SpeakerKind::VqVib(cb) => {
                let params = self.encode(x)?;
                let z: Vec<f64> = params
                    .mu
                    .iter()
                    .zip(&params.log_var)
                    .map(|(m, lv)| m + (0.5 * lv).exp() * rng.normal())
                    .collect();
                let (index, c) = quantize(&z, cb)?;
                Ok(CommOutcome {
                    c,
                    index,
                    z,
                    params: Encoding::Gaussian(params),
                })
            }
            SpeakerKind::OneHot { vocab } => {
                let logits = self.logits(x)?;
                let z: Vec<f64> = logits.iter().map(|l| l + rng.gumbel()).collect();
                let index = argmax(&z);
                let mut c = vec![0.0; *vocab];
                c[index] = 1.0;
                Ok(CommOutcome {
                    c,
                    index,
                    z,
                    params: Encoding::Logits(logits),
                })
            }
        }
    }

    /// q(c|x) for one input. VQ-VIB: Monte-Carlo frequency over
    /// `n_samples` draws. One-hot: the exact softmax.
    pub fn comm_distribution(
        &self,
        x: [f64; 3],
        n_samples: usize,
        rng: &mut RandomSource,
    ) -> Result<Vec<f64>> {
        let out = self.encoder.eval(&row_tensor(&x))?;
        self.distribution_from_output(out.data(), n_samples, rng)
    }

    fn distribution_from_output(
        &self,
        out: &[f64],
        n_samples: usize,
        rng: &mut RandomSource,
    ) -> Result<Vec<f64>> {
        if n_samples == 0 {
            return Err(Error::invalid("comm_distribution needs n_samples ≥ 1"));
        }
        match &self.kind {
            SpeakerKind::VqVib(cb) => {
                let d = cb.dim();
                let (mu, lv) = out.split_at(d);
                let std: Vec<f64> = lv.iter().map(|v| (0.5 * v).exp()).collect();
                let mut counts = vec![0usize; cb.len()];
                let mut z = vec![0.0; d];
                for _ in 0..n_samples {
                    for j in 0..d {
                        z[j] = mu[j] + std[j] * rng.normal();
                    }
                    counts[cb.nearest(&z)] += 1;
                }
                Ok(counts
                    .into_iter()
                    .map(|c| c as f64 / n_samples as f64)
                    .collect())
            }
            SpeakerKind::OneHot { .. } => {
                let mut p = out.to_vec();
                softmax_in_place(&mut p);
                Ok(p)
            }
        }
    }

    /// Naming system over every chip (uniform prior), estimated as in
    /// [`Speaker::comm_distribution`].
    pub fn naming_system(
        &self,
        chips: &ChipTable,
        n_samples: usize,
        rng: &mut RandomSource,
    ) -> Result<NamingSystem> {
        let inputs = chips_tensor(chips);
        let out = self.encoder.eval(&inputs)?;
        let mut rows = Vec::with_capacity(chips.len());
        for r in 0..out.rows() {
            rows.push(self.distribution_from_output(out.row(r), n_samples, rng)?);
        }
        NamingSystem::from_rows(rows)
    }

    /// Mean over chips of the per-input complexity bound (nats).
    pub fn mean_complexity_bound(&self, chips: &ChipTable) -> Result<f64> {
        let out = self.encoder.eval(&chips_tensor(chips))?;
        let total: f64 = (0..out.rows())
            .map(|r| match &self.kind {
                SpeakerKind::VqVib(cb) => {
                    let (mu, lv) = out.row(r).split_at(cb.dim());
                    crate::training::kl_standard_normal(mu, lv)
                }
                SpeakerKind::OneHot { .. } => crate::training::kl_uniform(out.row(r)),
            })
            .sum();
        Ok(total / out.rows() as f64)
    }
}

/// `[n × 3]` tensor of scaled CIELAB inputs, in chip order.
pub fn chips_tensor(chips: &ChipTable) -> Tensor {
    let data: Vec<f64> = chips.chips().iter().flat_map(|c| c.scaled()).collect();
    Tensor::matrix(chips.len(), 3, data).unwrap()
}

impl Listener {
    pub fn new(comm_dim: usize, hidden: &[usize], rng: &mut RandomSource) -> Self {
        let mut sizes = vec![comm_dim + 3];
        sizes.extend_from_slice(hidden);
        sizes.push(1);
        Self {
            net: Mlp::new(&sizes, rng),
        }
    }

    /// Probability that each candidate is the speaker's target. Each
    /// candidate is scored by the same network on `(c, candidate)`.
    pub fn listen(&self, c: &[f64], candidates: [[f64; 3]; 2]) -> Result<[f64; 2]> {
        let mut tape = Tape::new();
        let bound = self.net.bind_frozen(&mut tape);
        let cv = tape.constant(row_tensor(c));
        let a = tape.constant(row_tensor(&candidates[0]));
        let b = tape.constant(row_tensor(&candidates[1]));
        let p = listener_forward(&bound, &mut tape, cv, a, b)?;
        let v = tape.value(p);
        Ok([v.data()[0], v.data()[1]])
    }
}

impl Decoder {
    pub fn new(comm_dim: usize, hidden: &[usize], rng: &mut RandomSource) -> Self {
        let mut sizes = vec![comm_dim];
        sizes.extend_from_slice(hidden);
        sizes.push(3);
        Self {
            net: Mlp::new(&sizes, rng),
        }
    }

    pub fn reconstruct(&self, c: &[f64]) -> Result<[f64; 3]> {
        let out = self.net.eval(&row_tensor(c))?;
        Ok([out.data()[0], out.data()[1], out.data()[2]])
    }
}

/// Architecture of a speaker–listener–decoder team.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChannelSpec {
    Vqvib { codebook_size: usize, dim: usize },
    Onehot { vocab: usize },
}

impl ChannelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ChannelSpec::Vqvib { .. } => "vqvib",
            ChannelSpec::Onehot { .. } => "onehot",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Agents {
    pub speaker: Speaker,
    pub listener: Listener,
    pub decoder: Decoder,
}

/// Tape handles for every trainable tensor of an [`Agents`] team.
#[derive(Debug, Clone)]
pub struct BoundAgents {
    pub speaker: BoundMlp,
    pub codebook: Option<Var>,
    pub listener: BoundMlp,
    pub decoder: BoundMlp,
}

impl Agents {
    pub fn new(channel: &ChannelSpec, hidden: &[usize], rng: &mut RandomSource) -> Result<Self> {
        let kind = match *channel {
            ChannelSpec::Vqvib { codebook_size, dim } => {
                SpeakerKind::VqVib(Codebook::random(codebook_size, dim, rng)?)
            }
            ChannelSpec::Onehot { vocab } => {
                if vocab == 0 {
                    return Err(Error::invalid("one-hot vocabulary must be ≥ 1"));
                }
                SpeakerKind::OneHot { vocab }
            }
        };
        let dim = kind.comm_dim();
        let speaker = Speaker::new(kind, hidden, rng);
        let listener = Listener::new(dim, hidden, rng);
        let decoder = Decoder::new(dim, hidden, rng);
        Ok(Self {
            speaker,
            listener,
            decoder,
        })
    }

    /// Every trainable tensor with a stable name, in a fixed order.
    pub fn named_tensors(&self) -> Vec<(String, &Tensor)> {
        let mut out = Vec::new();
        push_mlp(&mut out, "speaker", &self.speaker.encoder);
        if let Some(cb) = self.speaker.codebook() {
            out.push(("codebook".to_string(), cb.tensor()));
        }
        push_mlp(&mut out, "listener", &self.listener.net);
        push_mlp(&mut out, "decoder", &self.decoder.net);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out: Vec<&mut Tensor> = self.speaker.encoder.tensors_mut().collect();
        if let SpeakerKind::VqVib(cb) = &mut self.speaker.kind {
            out.push(cb.tensor_mut());
        }
        out.extend(self.listener.net.tensors_mut());
        out.extend(self.decoder.net.tensors_mut());
        out
    }

    pub fn bind(&self, tape: &mut Tape) -> BoundAgents {
        BoundAgents {
            speaker: self.speaker.encoder.bind(tape),
            codebook: self.speaker.codebook().map(|cb| tape.param(cb.tensor().clone())),
            listener: self.listener.net.bind(tape),
            decoder: self.decoder.net.bind(tape),
        }
    }
}

fn push_mlp<'a>(out: &mut Vec<(String, &'a Tensor)>, prefix: &str, mlp: &'a Mlp) {
    for (i, d) in mlp.layers.iter().enumerate() {
        out.push((format!("{prefix}.{i}.w"), &d.w));
        out.push((format!("{prefix}.{i}.b"), &d.b));
    }
}

impl BoundAgents {
    /// Handles in the same order as [`Agents::named_tensors`].
    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = self.speaker.vars().collect();
        out.extend(self.codebook);
        out.extend(self.listener.vars());
        out.extend(self.decoder.vars());
        out
    }
}

/// Batched speaker output recorded on a tape.
#[derive(Debug, Clone)]
pub struct SpeakerBatch {
    /// Signal vectors `[B × comm_dim]`.
    pub c: Var,
    pub indices: Vec<usize>,
    /// Mean per-input complexity bound (nats).
    pub complexity: Var,
    /// Codebook + commitment loss (VQ-VIB only).
    pub vq_aux: Option<Var>,
    /// Raw encoder output `[B × outputs]`.
    pub encoder_out: Var,
    /// Pre-quantization sample `z` (VQ-VIB) or soft Gumbel sample (one-hot).
    pub pre_quantized: Var,
}

/// Speaker forward pass for a batch of inputs `x [B × 3]`.
pub fn speaker_forward(
    speaker: &Speaker,
    bound: &BoundAgents,
    tape: &mut Tape,
    x: Var,
    rng: &mut RandomSource,
) -> Result<SpeakerBatch> {
    let out = bound.speaker.forward(tape, x)?;
    let batch = tape.value(out).rows() as f64;
    match &speaker.kind {
        SpeakerKind::VqVib(cb) => {
            let d = cb.dim();
            let mu = tape.columns(out, 0, d)?;
            let lv = tape.columns(out, d, d)?;
            let z = gaussian_sample(tape, mu, lv, rng)?;
            let zv = tape.value(z);
            let indices: Vec<usize> = (0..zv.rows()).map(|r| cb.nearest(zv.row(r))).collect();
            let table = bound
                .codebook
                .ok_or_else(|| Error::invalid("VQ-VIB speaker bound without codebook"))?;
            let zeta = tape.gather_rows(table, &indices)?;
            let zeta_val = tape.value(zeta).clone();
            let c = tape.straight_through(z, zeta_val)?;

            // codebook loss ‖sg(z) − ζ‖² + β‖z − sg(ζ)‖², averaged over the batch
            let z_stop = tape.detach(z);
            let zeta_stop = tape.detach(zeta);
            let cb_diff = tape.sub(zeta, z_stop)?;
            let cb_sq = tape.square(cb_diff)?;
            let cb_loss = tape.sum(cb_sq);
            let commit_diff = tape.sub(z, zeta_stop)?;
            let commit_sq = tape.square(commit_diff)?;
            let commit = tape.sum(commit_sq);
            let commit = tape.scale(commit, COMMITMENT_WEIGHT);
            let aux = tape.add(cb_loss, commit)?;
            let aux = tape.scale(aux, 1.0 / batch);

            let complexity = kl_standard_normal_tape(tape, mu, lv)?;
            Ok(SpeakerBatch {
                c,
                indices,
                complexity,
                vq_aux: Some(aux),
                encoder_out: out,
                pre_quantized: z,
            })
        }
        SpeakerKind::OneHot { vocab } => {
            let lv = tape.value(out);
            let noise: Vec<f64> = (0..lv.len()).map(|_| rng.gumbel()).collect();
            let noise = tape.constant(Tensor::new(lv.shape().to_vec(), noise)?);
            let perturbed = tape.add(out, noise)?;
            let pv = tape.value(perturbed);
            let indices: Vec<usize> = (0..pv.rows()).map(|r| argmax(pv.row(r))).collect();
            let mut hard = vec![0.0; pv.len()];
            for (r, &i) in indices.iter().enumerate() {
                hard[r * vocab + i] = 1.0;
            }
            let hard = Tensor::new(pv.shape().to_vec(), hard)?;
            let tempered = tape.scale(perturbed, 1.0 / GUMBEL_TEMPERATURE);
            let soft = tape.softmax(tempered)?;
            let c = tape.straight_through(soft, hard)?;
            let complexity = kl_uniform_tape(tape, out)?;
            Ok(SpeakerBatch {
                c,
                indices,
                complexity,
                vq_aux: None,
                encoder_out: out,
                pre_quantized: soft,
            })
        }
    }
}

/// Batch mean of KL[N(μ, diag σ²) ‖ N(0, I)] in nats.
pub fn kl_standard_normal_tape(tape: &mut Tape, mu: Var, log_var: Var) -> Result<Var> {
    let batch = tape.value(mu).rows() as f64;
    let n = tape.value(mu).len() as f64;
    let mu2 = tape.square(mu)?;
    let var = tape.exp(log_var)?;
    let a = tape.add(mu2, var)?;
    let b = tape.sub(a, log_var)?;
    let s = tape.sum(b);
    let s = tape.add_scalar(s, -n);
    Ok(tape.scale(s, 0.5 / batch))
}

/// Batch mean of KL[softmax(logits) ‖ uniform] in nats.
pub fn kl_uniform_tape(tape: &mut Tape, logits: Var) -> Result<Var> {
    let lv = tape.value(logits);
    let (batch, vocab) = (lv.rows() as f64, lv.cols() as f64);
    let p = tape.softmax(logits)?;
    let logp = tape.log_softmax(logits)?;
    let plogp = tape.mul(p, logp)?;
    let s = tape.sum(plogp);
    let s = tape.scale(s, 1.0 / batch);
    Ok(tape.add_scalar(s, vocab.ln()))
}

/// Listener probabilities `[B × 2]` over the two candidates.
pub fn listener_forward(
    bound: &BoundMlp,
    tape: &mut Tape,
    c: Var,
    cand0: Var,
    cand1: Var,
) -> Result<Var> {
    let in0 = tape.concat_cols(c, cand0)?;
    let in1 = tape.concat_cols(c, cand1)?;
    let s0 = bound.forward(tape, in0)?;
    let s1 = bound.forward(tape, in1)?;
    let scores = tape.concat_cols(s0, s1)?;
    tape.softmax(scores)
}

/// Reconstruction `[B × 3]` from signal vectors.
pub fn decoder_forward(bound: &BoundMlp, tape: &mut Tape, c: Var) -> Result<Var> {
    bound.forward(tape, c)
}
