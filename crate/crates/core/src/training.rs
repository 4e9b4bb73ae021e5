//! The weighted objective, its loss surrogates, λ_C annealing and the
//! reference-game training loop.
//!
//! The minimized loss is
//! `λ_U·CE(listener) + λ_I·MSE(reconstruction) + λ_C·KL(speaker‖prior) + vq_aux`,
//! where the KL term upper-bounds I(X;C) and `vq_aux` is the codebook plus
//! commitment loss of the VQ-VIB channel.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::{
    chips_tensor, decoder_forward, listener_forward, speaker_forward, Agents, ChannelSpec,
    Checkpoint, CommOutcome, Encoding,
};
use crate::error::{Error, Result};
use crate::ib::{self, MeaningDistribution};
use crate::metrics;
use crate::numerics::{log_sum_exp, AdamConfig, AdamState, RandomSource, Tape, Tensor};
use crate::wcs::{sample_trial, ChipTable, NamingSystem};

/// Probabilities are floored here before taking logs.
pub const PROB_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffWeights {
    pub lambda_u: f64,
    pub lambda_i: f64,
    pub lambda_c: f64,
}

impl TradeoffWeights {
    pub fn new(lambda_u: f64, lambda_i: f64, lambda_c: f64) -> Result<Self> {
        let w = Self {
            lambda_u,
            lambda_i,
            lambda_c,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.lambda_u, self.lambda_i, self.lambda_c];
        if all.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(format!("weights must be finite and ≥ 0: {all:?}")));
        }
        if all.iter().all(|v| *v == 0.0) {
            return Err(Error::invalid("at least one weight must be positive"));
        }
        Ok(())
    }
}

/// Linear ramp of λ_C from `initial` (through `start_epoch`) to `final_value`
/// (from `end_epoch` on).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealSchedule {
    pub initial: f64,
    pub final_value: f64,
    pub start_epoch: usize,
    pub end_epoch: usize,
}

impl AnnealSchedule {
    pub fn constant(value: f64) -> Self {
        Self {
            initial: value,
            final_value: value,
            start_epoch: 0,
            end_epoch: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.initial >= 0.0 && self.final_value >= 0.0) {
            return Err(Error::invalid("λ_C endpoints must be ≥ 0"));
        }
        if self.final_value < self.initial {
            return Err(Error::invalid("λ_C schedule must be non-decreasing"));
        }
        if self.end_epoch < self.start_epoch {
            return Err(Error::invalid("anneal end precedes anneal start"));
        }
        Ok(())
    }

    pub fn lambda_c(&self, epoch: usize) -> f64 {
        if epoch <= self.start_epoch {
            self.initial
        } else if epoch >= self.end_epoch {
            self.final_value
        } else {
            let t = (epoch - self.start_epoch) as f64 / (self.end_epoch - self.start_epoch) as f64;
            self.initial + t * (self.final_value - self.initial)
        }
    }
}

/// Everything that determines a training run. Epochs are numbered from 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub seed: u64,
    pub epochs: usize,
    pub batches_per_epoch: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub lambda_u: f64,
    pub lambda_i: f64,
    pub lambda_c_initial: f64,
    pub lambda_c_final: f64,
    pub anneal_start: usize,
    pub anneal_end: usize,
    pub channel: ChannelSpec,
    pub hidden: Vec<usize>,
    /// Samples per chip for the Monte-Carlo naming distribution.
    pub eval_samples: usize,
    /// Meaning width (scaled CIELAB) for IB informativeness.
    pub meaning_sigma: f64,
    /// Checkpoint every this many epochs; 0 keeps only the final one.
    pub checkpoint_every: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            epochs: 500,
            batches_per_epoch: 50,
            batch_size: 128,
            learning_rate: 3e-4,
            lambda_u: 1.0,
            lambda_i: 1.0,
            lambda_c_initial: 0.0,
            lambda_c_final: 3.0,
            anneal_start: 100,
            anneal_end: 500,
            channel: ChannelSpec::Vqvib {
                codebook_size: 20,
                dim: 2,
            },
            hidden: vec![64, 64],
            eval_samples: 1000,
            meaning_sigma: ib::DEFAULT_MEANING_SIGMA,
            checkpoint_every: 10,
        }
    }
}

impl TrainConfig {
    /// Fixed weights for every epoch.
    pub fn fixed(weights: TradeoffWeights) -> Self {
        Self {
            lambda_u: weights.lambda_u,
            lambda_i: weights.lambda_i,
            lambda_c_initial: weights.lambda_c,
            lambda_c_final: weights.lambda_c,
            ..Self::default()
        }
    }

    pub fn schedule(&self) -> AnnealSchedule {
        AnnealSchedule {
            initial: self.lambda_c_initial,
            final_value: self.lambda_c_final,
            start_epoch: self.anneal_start,
            end_epoch: self.anneal_end,
        }
    }

    pub fn weights_at(&self, epoch: usize) -> TradeoffWeights {
        TradeoffWeights {
            lambda_u: self.lambda_u,
            lambda_i: self.lambda_i,
            lambda_c: self.schedule().lambda_c(epoch),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("epochs", self.epochs),
            ("batches_per_epoch", self.batches_per_epoch),
            ("batch_size", self.batch_size),
            ("eval_samples", self.eval_samples),
        ] {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be ≥ 1")));
            }
        }
        if self.hidden.contains(&0) {
            return Err(Error::invalid("hidden widths must be ≥ 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning_rate must be > 0"));
        }
        if !(self.meaning_sigma > 0.0 && self.meaning_sigma.is_finite()) {
            return Err(Error::invalid("meaning_sigma must be > 0"));
        }
        match self.channel {
            ChannelSpec::Vqvib { codebook_size, dim } if codebook_size == 0 || dim == 0 => {
                return Err(Error::invalid("codebook_size and dim must be ≥ 1"));
            }
            ChannelSpec::Onehot { vocab: 0 } => {
                return Err(Error::invalid("vocab must be ≥ 1"));
            }
            _ => {}
        }
        self.schedule().validate()?;
        // λ_U, λ_I are fixed; λ_C may start at 0 but the triple must not be all zero
        TradeoffWeights {
            lambda_u: self.lambda_u,
            lambda_i: self.lambda_i,
            lambda_c: self.lambda_c_final,
        }
        .validate()?;
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str::<Self>(&text)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
            .and_then(|c| c.validate().map(|_| c))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub lambda_u: f64,
    pub lambda_i: f64,
    pub lambda_c: f64,
    /// Mean listener accuracy over the epoch's training trials.
    pub utility_acc: f64,
    /// Mean reconstruction MSE over the epoch; informativeness surrogate is −mse.
    pub mse: f64,
    /// Mean complexity bound over all chips at the end of the epoch.
    pub kl_nats: f64,
    /// Plug-in I(X;C) of the end-of-epoch naming system.
    pub complexity_bits: f64,
    pub complexity_se_bits: f64,
    /// IB informativeness −E[KL[m_x‖m̂_c]] of the same naming system.
    pub informativeness_bits: f64,
}

pub const EPOCH_CSV_HEADER: &str =
    "epoch,lambda_u,lambda_i,lambda_c,utility_acc,mse,kl_nats,complexity_bits";
pub const IB_POINTS_CSV_HEADER: &str = "epoch,complexity_bits,informativeness_bits";

impl EpochRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.epoch,
            self.lambda_u,
            self.lambda_i,
            self.lambda_c,
            self.utility_acc,
            self.mse,
            self.kl_nats,
            self.complexity_bits
        )
    }

    pub fn ib_row(&self) -> String {
        format!(
            "{},{},{}",
            self.epoch, self.complexity_bits, self.informativeness_bits
        )
    }
}

pub fn epochs_csv(records: &[EpochRecord]) -> String {
    let mut s = format!("{EPOCH_CSV_HEADER}\n");
    for r in records {
        let _ = writeln!(s, "{}", r.csv_row());
    }
    s
}

pub fn ib_points_csv(records: &[EpochRecord]) -> String {
    let mut s = format!("{IB_POINTS_CSV_HEADER}\n");
    for r in records {
        let _ = writeln!(s, "{}", r.ib_row());
    }
    s
}

/// Cross-entropy −ln p(target), with p floored at [`PROB_FLOOR`].
pub fn utility_loss(listener_probs: &[f64], target_position: usize) -> Result<f64> {
    let p = listener_probs.get(target_position).ok_or_else(|| {
        Error::invalid(format!(
            "target position {target_position} with {} candidates",
            listener_probs.len()
        ))
    })?;
    Ok(-p.max(PROB_FLOOR).ln())
}

/// Mean squared difference over all dimensions.
pub fn informativeness_loss(x: &[f64], x_hat: &[f64]) -> Result<f64> {
    if x.len() != x_hat.len() || x.is_empty() {
        return Err(Error::invalid(format!(
            "reconstruction has {} dims, input {}",
            x_hat.len(),
            x.len()
        )));
    }
    Ok(x.iter().zip(x_hat).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / x.len() as f64)
}

/// KL[N(μ, diag σ²) ‖ N(0, I)] = ½ Σ (μ² + σ² − ln σ² − 1), in nats.
pub fn kl_standard_normal(mu: &[f64], log_var: &[f64]) -> f64 {
    0.5 * mu
        .iter()
        .zip(log_var)
        .map(|(m, lv)| m * m + lv.exp() - lv - 1.0)
        .sum::<f64>()
}

/// KL[softmax(logits) ‖ uniform] = ln V − H(softmax), in nats.
pub fn kl_uniform(logits: &[f64]) -> f64 {
    let lse = log_sum_exp(logits);
    let entropy_term: f64 = logits
        .iter()
        .map(|l| {
            let lp = l - lse;
            lp.exp() * lp
        })
        .sum();
    ((logits.len() as f64).ln() + entropy_term).max(0.0)
}

/// Complexity bound of one act of speaking.
pub fn complexity_loss(outcome: &CommOutcome) -> f64 {
    match &outcome.params {
        Encoding::Gaussian(g) => kl_standard_normal(&g.mu, &g.log_var),
        Encoding::Logits(l) => kl_uniform(l),
    }
}

pub fn total_loss(
    weights: &TradeoffWeights,
    utility: f64,
    informativeness: f64,
    complexity: f64,
    vq_aux: f64,
) -> f64 {
    weights.lambda_u * utility
        + weights.lambda_i * informativeness
        + weights.lambda_c * complexity
        + vq_aux
}

/// Stateful training run; one call to [`Trainer::run_epoch`] per epoch.
pub struct Trainer<'a> {
    config: TrainConfig,
    chips: &'a ChipTable,
    inputs: Tensor,
    meanings: MeaningDistribution,
    agents: Agents,
    adam: AdamState,
    batch_rng: RandomSource,
    eval_rng: RandomSource,
    epoch: usize,
    naming: Option<NamingSystem>,
}

impl<'a> Trainer<'a> {
    pub fn new(config: TrainConfig, chips: &'a ChipTable) -> Result<Self> {
        let rng = RandomSource::new(config.seed);
        Self::with_rng(config, chips, rng)
    }

    /// Initialization, batch sampling and evaluation each draw from their
    /// own stream split off `rng`.
    pub fn with_rng(config: TrainConfig, chips: &'a ChipTable, rng: RandomSource) -> Result<Self> {
        config.validate()?;
        if chips.len() < 2 {
            return Err(Error::invalid("training needs at least 2 chips"));
        }
        let mut init_rng = rng.split(1);
        let agents = Agents::new(&config.channel, &config.hidden, &mut init_rng)?;
        let params: Vec<Tensor> = agents.named_tensors().into_iter().map(|(_, t)| t.clone()).collect();
        let adam = AdamState::new(AdamConfig::with_step_size(config.learning_rate), &params);
        Ok(Self {
            meanings: ib::build_meanings(chips, config.meaning_sigma)?,
            inputs: chips_tensor(chips),
            chips,
            agents,
            adam,
            batch_rng: rng.split(2),
            eval_rng: rng.split(3),
            epoch: 0,
            naming: None,
            config,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn agents(&self) -> &Agents {
        &self.agents
    }

    pub fn into_agents(self) -> Agents {
        self.agents
    }

    /// Epochs completed so far.
    pub fn epoch(&self) -> usize {
        self.epoch
    }

    /// Naming system measured at the end of the last epoch.
    pub fn naming(&self) -> Option<&NamingSystem> {
        self.naming.as_ref()
    }

    pub fn meanings(&self) -> &MeaningDistribution {
        &self.meanings
    }

    pub fn checkpoint(&self, config_hash: &str) -> Checkpoint {
        Checkpoint::capture(
            &self.agents,
            &self.config.channel,
            &self.config.hidden,
            self.epoch,
            config_hash,
        )
    }

    pub fn run_epoch(&mut self) -> Result<EpochRecord> {
        let epoch = self.epoch + 1;
        let weights = self.config.weights_at(epoch);
        let (mut correct, mut trials, mut mse_sum) = (0usize, 0usize, 0.0);
        for batch in 1..=self.config.batches_per_epoch {
            let (acc, mse) = self
                .step(&weights)
                .map_err(|e| annotate(e, epoch, batch))?;
            correct += acc;
            trials += self.config.batch_size;
            mse_sum += mse;
        }
        self.epoch = epoch;

        let naming = self
            .agents
            .speaker
            .naming_system(self.chips, self.config.eval_samples, &mut self.eval_rng)?;
        let kl_nats = self.agents.speaker.mean_complexity_bound(self.chips)?;
        let complexity_bits = metrics::estimate_complexity(&naming);
        let complexity_se_bits = match self.config.channel {
            ChannelSpec::Vqvib { .. } => {
                metrics::complexity_standard_error(&naming, self.config.eval_samples)
            }
            ChannelSpec::Onehot { .. } => 0.0,
        };
        let (_, informativeness_bits) =
            ib::evaluate_encoder(naming.prior(), &self.meanings, naming.matrix())?;
        self.naming = Some(naming);
        Ok(EpochRecord {
            epoch,
            lambda_u: weights.lambda_u,
            lambda_i: weights.lambda_i,
            lambda_c: weights.lambda_c,
            utility_acc: correct as f64 / trials as f64,
            mse: mse_sum / self.config.batches_per_epoch as f64,
            kl_nats,
            complexity_bits,
            complexity_se_bits,
            informativeness_bits,
        })
    }

    /// One Adam step on a fresh batch. Returns (correct trials, batch MSE).
    fn step(&mut self, weights: &TradeoffWeights) -> Result<(usize, f64)> {
        let b = self.config.batch_size;
        let mut targets = Vec::with_capacity(b * 3);
        let mut cand = [Vec::with_capacity(b * 3), Vec::with_capacity(b * 3)];
        let mut positions = Vec::with_capacity(b);
        for _ in 0..b {
            let trial = sample_trial(self.chips, &mut self.batch_rng)?;
            let idx = |id: u32| self.chips.index_of(id).expect("sampled chip exists");
            targets.extend_from_slice(self.inputs.row(idx(trial.target)));
            for (slot, id) in trial.candidates().into_iter().enumerate() {
                cand[slot].extend_from_slice(self.inputs.row(idx(id)));
            }
            positions.push(trial.target_position);
        }

        let mut tape = Tape::new();
        let bound = self.agents.bind(&mut tape);
        let x = tape.constant(Tensor::matrix(b, 3, targets)?);
        let [c0, c1] = cand;
        let c0 = tape.constant(Tensor::matrix(b, 3, c0)?);
        let c1 = tape.constant(Tensor::matrix(b, 3, c1)?);

        let spoken = speaker_forward(&self.agents.speaker, &bound, &mut tape, x, &mut self.batch_rng)?;
        let probs = listener_forward(&bound.listener, &mut tape, spoken.c, c0, c1)?;
        let logp = tape.log_floor(probs, PROB_FLOOR);
        let picked = tape.pick_per_row(logp, &positions)?;
        let ce = tape.mean(picked);
        let ce = tape.scale(ce, -1.0);

        let recon = decoder_forward(&bound.decoder, &mut tape, spoken.c)?;
        let diff = tape.sub(recon, x)?;
        let sq = tape.square(diff)?;
        let mse = tape.mean(sq);

        let terms = [
            (ce, weights.lambda_u),
            (mse, weights.lambda_i),
            (spoken.complexity, weights.lambda_c),
        ];
        let mut loss = tape.scale(terms[0].0, terms[0].1);
        for &(v, w) in &terms[1..] {
            let scaled = tape.scale(v, w);
            loss = tape.add(loss, scaled)?;
        }
        if let Some(aux) = spoken.vq_aux {
            loss = tape.add(loss, aux)?;
        }

        let values = |v| tape.value(v).item();
        let aux_value = spoken.vq_aux.map_or(0.0, values);
        if !values(loss).is_finite() {
            return Err(Error::NonFinite(format!(
                "loss: utility={} mse={} kl={} vq_aux={}",
                values(ce),
                values(mse),
                values(spoken.complexity),
                aux_value
            )));
        }

        let p = tape.value(probs);
        let correct = positions
            .iter()
            .enumerate()
            .filter(|&(r, &pos)| p.get(r, pos) > p.get(r, 1 - pos))
            .count();
        let mse_value = values(mse);

        let grads = tape.backward(loss)?;
        let vars = bound.vars();
        let shapes: Vec<Vec<usize>> = vars.iter().map(|&v| tape.value(v).shape().to_vec()).collect();
        let grads: Vec<Tensor> = vars
            .iter()
            .zip(&shapes)
            .map(|(&v, s)| grads.get_or_zeros(v, s))
            .collect();
        let mut params = self.agents.tensors_mut();
        self.adam.step(&mut params, &grads)?;
        Ok((correct, mse_value))
    }
}

fn annotate(e: Error, epoch: usize, batch: usize) -> Error {
    match e {
        Error::NonFinite(msg) => Error::NonFinite(format!("epoch {epoch}, batch {batch}: {msg}")),
        other => other,
    }
}

/// Runs all configured epochs.
pub fn train(
    config: &TrainConfig,
    chips: &ChipTable,
    rng: RandomSource,
) -> Result<(Agents, Vec<EpochRecord>)> {
    let mut trainer = Trainer::with_rng(config.clone(), chips, rng)?;
    let mut records = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        records.push(trainer.run_epoch()?);
    }
    Ok((trainer.into_agents(), records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::GaussianParams;

    #[test]
    fn utility_examples() {
        assert_eq!(utility_loss(&[1.0, 0.0], 0).unwrap(), 0.0);
        assert!((utility_loss(&[0.5, 0.5], 1).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert!((utility_loss(&[0.1, 0.9], 1).unwrap() - 0.105_360_515_657_826_3).abs() < 1e-12);
        assert!((utility_loss(&[1.0, 0.0], 1).unwrap() + PROB_FLOOR.ln()).abs() < 1e-12);
        assert!(utility_loss(&[1.0, 0.0], 2).is_err());
    }

    #[test]
    fn informativeness_examples() {
        assert_eq!(informativeness_loss(&[0.2, 0.3, 0.4], &[0.2, 0.3, 0.4]).unwrap(), 0.0);
        assert_eq!(informativeness_loss(&[0.0; 3], &[1.0; 3]).unwrap(), 1.0);
        let v = informativeness_loss(&[0.5, -1.0, 2.0], &[1.0, 1.0, 1.0]).unwrap();
        assert!((v - (0.25 + 4.0 + 1.0) / 3.0).abs() < 1e-15);
        assert!(informativeness_loss(&[0.0; 3], &[0.0; 2]).is_err());
    }

    #[test]
    fn complexity_examples() {
        let outcome = |mu: Vec<f64>, lv: Vec<f64>| CommOutcome {
            c: vec![],
            index: 0,
            z: vec![],
            params: Encoding::Gaussian(GaussianParams { mu, log_var: lv }),
        };
        assert_eq!(complexity_loss(&outcome(vec![0.0, 0.0], vec![0.0, 0.0])), 0.0);
        assert!((complexity_loss(&outcome(vec![1.0, 0.0], vec![0.0, 0.0])) - 0.5).abs() < 1e-15);
        let onehot = CommOutcome {
            c: vec![],
            index: 0,
            z: vec![],
            params: Encoding::Logits(vec![0.3; 5]),
        };
        assert!(complexity_loss(&onehot).abs() < 1e-15);
        // a near-deterministic speaker pays ≈ ln V
        assert!((kl_uniform(&[50.0, 0.0, 0.0, 0.0]) - 4f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn total_loss_is_the_linear_combination() {
        let w = TradeoffWeights::new(1.0, 1.0, 1.0).unwrap();
        assert!((total_loss(&w, 0.1, 0.2, 0.3, 0.0) - 0.6).abs() < 1e-15);
        let only_u = TradeoffWeights::new(1.0, 0.0, 0.0).unwrap();
        assert_eq!(total_loss(&only_u, 0.7, 5.0, 9.0, 0.25), 0.7 + 0.25);
        let w = TradeoffWeights::new(0.3, 1.7, 0.9).unwrap();
        let w2 = TradeoffWeights::new(0.6, 3.4, 1.8).unwrap();
        let (a, b) = (total_loss(&w, 0.4, 0.5, 0.6, 0.1) - 0.1, total_loss(&w2, 0.4, 0.5, 0.6, 0.1) - 0.1);
        assert!((b - 2.0 * a).abs() < 1e-14);
        assert!(TradeoffWeights::new(0.0, 0.0, 0.0).is_err());
        assert!(TradeoffWeights::new(-1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn anneal_schedule_shape() {
        let s = TrainConfig::default().schedule();
        assert_eq!(s.lambda_c(1), 0.0);
        assert_eq!(s.lambda_c(100), 0.0);
        assert!((s.lambda_c(300) - 1.5).abs() < 1e-15);
        assert_eq!(s.lambda_c(500), 3.0);
        assert_eq!(s.lambda_c(900), 3.0);
        let mut last = 0.0;
        for e in 0..600 {
            let v = s.lambda_c(e);
            assert!(v >= last);
            last = v;
        }
        assert_eq!(AnnealSchedule::constant(0.7).lambda_c(42), 0.7);
    }

    #[test]
    fn config_toml_round_trip_and_validation() {
        let cfg = TrainConfig {
            seed: 7,
            channel: ChannelSpec::Onehot { vocab: 12 },
            ..TrainConfig::default()
        };
        let back = TrainConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
        let partial = TrainConfig::from_toml("epochs = 3\n[channel]\nkind = \"vqvib\"\ncodebook_size = 4\ndim = 2\n").unwrap();
        assert_eq!(partial.epochs, 3);
        assert_eq!(partial.batch_size, 128);
        assert!(TrainConfig::from_toml("epochs = 0").is_err());
        assert!(TrainConfig::from_toml("bogus = 1").is_err());
        assert!(TrainConfig::from_toml("lambda_c_initial = 2.0\nlambda_c_final = 1.0").is_err());
    }
}
