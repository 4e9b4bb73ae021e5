//! Independent oracles shared by the core integration tests and the
//! acceptance harness. Nothing here calls the code paths it checks except
//! to obtain the value under test.
#![allow(dead_code)]

use ibsignal_core::agents::{
    decoder_forward, listener_forward, speaker_forward, BoundAgents, BoundMlp, Codebook, Decoder,
    Listener, Speaker, SpeakerKind,
};
use ibsignal_core::ib::{self, FrontierOptions, IbOptions, MeaningDistribution};
use ibsignal_core::numerics::{Tape, Var};
use ibsignal_core::training::{kl_standard_normal, kl_uniform, PROB_FLOOR};
use ibsignal_core::wcs::{Chip, GridCode};
use ibsignal_core::{metrics, ChipTable, NamingSystem, RandomSource, Result, Tensor};

const FD_STEP: f64 = 1e-6;

/// ‖a − b‖ / max(‖a‖, ‖b‖), or 0 when both vanish.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let scale = norm(a).max(norm(b));
    if scale < 1e-300 {
        0.0
    } else {
        norm(&diff) / scale
    }
}

/// Analytic gradient of `loss` against central differences over every
/// parameter entry. Returns the norm-wise relative error.
pub fn check_gradient(
    params: &mut [Tensor],
    loss: impl Fn(&mut Tape, &[Var]) -> Result<Var>,
) -> Result<f64> {
    let eval = |params: &[Tensor]| -> Result<f64> {
        let mut tape = Tape::new();
        let vars: Vec<Var> = params.iter().map(|p| tape.param(p.clone())).collect();
        let out = loss(&mut tape, &vars)?;
        Ok(tape.value(out).item())
    };

    let mut tape = Tape::new();
    let vars: Vec<Var> = params.iter().map(|p| tape.param(p.clone())).collect();
    let out = loss(&mut tape, &vars)?;
    let grads = tape.backward(out)?;
    let analytic: Vec<f64> = vars
        .iter()
        .zip(params.iter())
        .flat_map(|(&v, p)| grads.get_or_zeros(v, p.shape()).into_data())
        .collect();

    let mut numeric = Vec::with_capacity(analytic.len());
    for i in 0..params.len() {
        for j in 0..params[i].len() {
            let orig = params[i].data()[j];
            params[i].data_mut()[j] = orig + FD_STEP;
            let up = eval(params)?;
            params[i].data_mut()[j] = orig - FD_STEP;
            let down = eval(params)?;
            params[i].data_mut()[j] = orig;
            numeric.push((up - down) / (2.0 * FD_STEP));
        }
    }
    Ok(relative_error(&analytic, &numeric))
}

fn random_tensor(rows: usize, cols: usize, scale: f64, rng: &mut RandomSource) -> Tensor {
    let data = (0..rows * cols).map(|_| scale * rng.normal()).collect();
    Tensor::matrix(rows, cols, data).unwrap()
}

fn random_hidden(rng: &mut RandomSource) -> Vec<usize> {
    (0..1 + rng.below(2)).map(|_| 3 + rng.below(6)).collect()
}

fn bind_layers(vars: &[Var]) -> BoundMlp {
    BoundMlp {
        layers: vars.chunks(2).map(|p| (p[0], p[1])).collect(),
    }
}

fn speaker_params(speaker: &Speaker) -> Vec<Tensor> {
    let mut out: Vec<Tensor> = speaker.encoder.tensors().cloned().collect();
    if let Some(cb) = speaker.codebook() {
        out.push(cb.tensor().clone());
    }
    out
}

fn speaker_bound(speaker: &Speaker, vars: &[Var]) -> BoundAgents {
    let n = 2 * speaker.encoder.layers.len();
    BoundAgents {
        speaker: bind_layers(&vars[..n]),
        codebook: vars.get(n).copied(),
        listener: BoundMlp { layers: vec![] },
        decoder: BoundMlp { layers: vec![] },
    }
}

/// VQ-VIB speaker: reparameterized sample and KL to the standard normal.
/// The codebook terms and quantized output carry stop-gradients by design,
/// so they have no finite-difference counterpart.
pub fn vqvib_instance(rng: &mut RandomSource) -> Result<f64> {
    let dim = 1 + rng.below(3);
    let cb = Codebook::random(3 + rng.below(5), dim, rng)?;
    let speaker = Speaker::new(SpeakerKind::VqVib(cb), &random_hidden(rng), rng);
    let batch = 1 + rng.below(4);
    let x = random_tensor(batch, 3, 0.5, rng);
    let w = random_tensor(batch, dim, 1.0, rng);
    let noise_seed = rng.next_u64();
    check_gradient(&mut speaker_params(&speaker), |tape, vars| {
        let bound = speaker_bound(&speaker, vars);
        let xv = tape.constant(x.clone());
        let out = speaker_forward(&speaker, &bound, tape, xv, &mut RandomSource::new(noise_seed))?;
        let wv = tape.constant(w.clone());
        let wz = tape.mul(out.pre_quantized, wv)?;
        let s = tape.sum(wz);
        tape.add(s, out.complexity)
    })
}

/// One-hot speaker: Gumbel-softmax relaxation and KL to uniform.
pub fn onehot_instance(rng: &mut RandomSource) -> Result<f64> {
    let vocab = 2 + rng.below(6);
    let speaker = Speaker::new(SpeakerKind::OneHot { vocab }, &random_hidden(rng), rng);
    let batch = 1 + rng.below(4);
    let x = random_tensor(batch, 3, 0.5, rng);
    let w = random_tensor(batch, vocab, 1.0, rng);
    let noise_seed = rng.next_u64();
    check_gradient(&mut speaker_params(&speaker), |tape, vars| {
        let bound = speaker_bound(&speaker, vars);
        let xv = tape.constant(x.clone());
        let out = speaker_forward(&speaker, &bound, tape, xv, &mut RandomSource::new(noise_seed))?;
        let wv = tape.constant(w.clone());
        let ws = tape.mul(out.pre_quantized, wv)?;
        let s = tape.sum(ws);
        tape.add(s, out.complexity)
    })
}

/// Listener cross-entropy, differentiated into the weights and the signal.
pub fn listener_instance(rng: &mut RandomSource) -> Result<f64> {
    let dim = 1 + rng.below(4);
    let listener = Listener::new(dim, &random_hidden(rng), rng);
    let batch = 1 + rng.below(4);
    let (c0, c1) = (random_tensor(batch, 3, 0.5, rng), random_tensor(batch, 3, 0.5, rng));
    let positions: Vec<usize> = (0..batch).map(|_| rng.below(2)).collect();
    let mut params: Vec<Tensor> = listener.net.tensors().cloned().collect();
    params.push(random_tensor(batch, dim, 1.0, rng));
    check_gradient(&mut params, |tape, vars| {
        let (net, c) = vars.split_at(vars.len() - 1);
        let a = tape.constant(c0.clone());
        let b = tape.constant(c1.clone());
        let probs = listener_forward(&bind_layers(net), tape, c[0], a, b)?;
        let logp = tape.log_floor(probs, PROB_FLOOR);
        let picked = tape.pick_per_row(logp, &positions)?;
        let ce = tape.mean(picked);
        Ok(tape.scale(ce, -1.0))
    })
}

/// Decoder reconstruction MSE, differentiated into the weights and the signal.
pub fn decoder_instance(rng: &mut RandomSource) -> Result<f64> {
    let dim = 1 + rng.below(4);
    let decoder = Decoder::new(dim, &random_hidden(rng), rng);
    let batch = 1 + rng.below(4);
    let x = random_tensor(batch, 3, 0.5, rng);
    let mut params: Vec<Tensor> = decoder.net.tensors().cloned().collect();
    params.push(random_tensor(batch, dim, 1.0, rng));
    check_gradient(&mut params, |tape, vars| {
        let (net, c) = vars.split_at(vars.len() - 1);
        let recon = decoder_forward(&bind_layers(net), tape, c[0])?;
        let xv = tape.constant(x.clone());
        let diff = tape.sub(recon, xv)?;
        let sq = tape.square(diff)?;
        Ok(tape.mean(sq))
    })
}

pub type Instance = fn(&mut RandomSource) -> Result<f64>;

pub const GRADIENT_CASES: [(&str, Instance); 4] = [
    ("vqvib speaker", vqvib_instance),
    ("onehot speaker", onehot_instance),
    ("listener", listener_instance),
    ("decoder", decoder_instance),
];

/// Runs `total` instances spread over the cases; worst error per case.
pub fn gradient_suite(total: usize, seed: u64) -> Result<Vec<(&'static str, f64)>> {
    let root = RandomSource::new(seed);
    let mut worst = vec![0.0f64; GRADIENT_CASES.len()];
    for i in 0..total {
        let case = i % GRADIENT_CASES.len();
        let mut rng = root.split(i as u64);
        worst[case] = worst[case].max((GRADIENT_CASES[case].1)(&mut rng)?);
    }
    Ok(GRADIENT_CASES.iter().map(|c| c.0).zip(worst).collect())
}

// ---- brute-force information quantities ----

fn entropy_nats(p: &[f64]) -> f64 {
    p.iter().filter(|&&v| v > 0.0).map(|v| -v * v.ln()).sum()
}

/// I(X;C) = H(C) − H(C|X), in bits.
pub fn mi_oracle(q: &[f64], k: usize, prior: &[f64]) -> f64 {
    let mut pc = vec![0.0; k];
    let mut h_cond = 0.0;
    for (x, &px) in prior.iter().enumerate() {
        let row = &q[x * k..(x + 1) * k];
        for c in 0..k {
            pc[c] += px * row[c];
        }
        h_cond += px * entropy_nats(row);
    }
    (entropy_nats(&pc) - h_cond) / std::f64::consts::LN_2
}

/// I(A;B) = H(A) + H(B) − H(A,B) for two labelings drawn independently
/// given the chip.
fn pair_mi(q1: &[f64], a: usize, q2: &[f64], b: usize, prior: &[f64]) -> f64 {
    let mut joint = vec![0.0; a * b];
    for (x, &px) in prior.iter().enumerate() {
        for i in 0..a {
            for j in 0..b {
                joint[i * b + j] += px * q1[x * a + i] * q2[x * b + j];
            }
        }
    }
    let pa: Vec<f64> = (0..a).map(|i| (0..b).map(|j| joint[i * b + j]).sum()).collect();
    let pb: Vec<f64> = (0..b).map(|j| (0..a).map(|i| joint[i * b + j]).sum()).collect();
    entropy_nats(&pa) + entropy_nats(&pb) - entropy_nats(&joint)
}

pub fn gnid_oracle(q1: &[f64], a: usize, q2: &[f64], b: usize, prior: &[f64]) -> Option<f64> {
    let cross = pair_mi(q1, a, q2, b, prior);
    let denom = pair_mi(q1, a, q1, a, prior).max(pair_mi(q2, b, q2, b, prior));
    (denom / std::f64::consts::LN_2 > 1e-12).then(|| 1.0 - cross / denom)
}

/// ∫ N(t; μ, σ²) ln[N(t; μ, σ²) / N(t; 0, 1)] dt by composite Simpson over ±14σ.
fn gaussian_kl_quadrature(mu: f64, log_var: f64) -> f64 {
    const STEPS: usize = 4000;
    let var = log_var.exp();
    let sd = var.sqrt();
    let (lo, hi) = (mu - 14.0 * sd, mu + 14.0 * sd);
    let h = (hi - lo) / STEPS as f64;
    let f = |t: f64| {
        let log_p = -0.5 * ((t - mu) * (t - mu) / var + log_var + (2.0 * std::f64::consts::PI).ln());
        let log_q = -0.5 * (t * t + (2.0 * std::f64::consts::PI).ln());
        log_p.exp() * (log_p - log_q)
    };
    let mut s = f(lo) + f(hi);
    for i in 1..STEPS {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(lo + i as f64 * h);
    }
    s * h / 3.0
}

fn kl_uniform_oracle(logits: &[f64]) -> f64 {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = e.iter().sum();
    let v = logits.len() as f64;
    e.iter().map(|x| x / z).filter(|&p| p > 0.0).map(|p| p * (p * v).ln()).sum()
}

fn random_stochastic(rows: usize, cols: usize, rng: &mut RandomSource) -> Vec<f64> {
    let mut out = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let mut row: Vec<f64> = (0..cols)
            .map(|_| if rng.below(4) == 0 { 0.0 } else { rng.uniform_open() })
            .collect();
        if row.iter().all(|&v| v == 0.0) {
            row[rng.below(cols)] = 1.0;
        }
        let s: f64 = row.iter().sum();
        out.extend(row.iter().map(|v| v / s));
    }
    out
}

fn random_prior(n: usize, rng: &mut RandomSource) -> Vec<f64> {
    let p: Vec<f64> = (0..n).map(|_| 0.1 + rng.uniform_open()).collect();
    let s: f64 = p.iter().sum();
    p.iter().map(|v| v / s).collect()
}

fn system(q: Vec<f64>, k: usize, prior: Vec<f64>) -> NamingSystem {
    let terms = (0..k).map(|i| i.to_string()).collect();
    NamingSystem::new(terms, q, prior).unwrap()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OracleReport {
    pub complexity: f64,
    pub gnid: f64,
    pub kl_gaussian: f64,
    pub kl_uniform: f64,
    /// gNID pairs skipped because both systems are constant.
    pub undefined: usize,
}

impl OracleReport {
    pub fn worst(&self) -> f64 {
        self.complexity.max(self.gnid).max(self.kl_gaussian).max(self.kl_uniform)
    }
}

/// Largest absolute disagreement of each closed form with its oracle over
/// `instances` random problems with ≤ 6 chips and ≤ 4 signals.
pub fn oracle_suite(instances: usize, seed: u64) -> Result<OracleReport> {
    let root = RandomSource::new(seed);
    let mut r = OracleReport::default();
    for i in 0..instances {
        let mut rng = root.split(i as u64);
        let n = 1 + rng.below(6);
        let (a, b) = (1 + rng.below(4), 1 + rng.below(4));
        let prior = random_prior(n, &mut rng);
        let q1 = random_stochastic(n, a, &mut rng);
        let q2 = random_stochastic(n, b, &mut rng);

        let s1 = system(q1.clone(), a, prior.clone());
        let got = metrics::estimate_complexity(&s1);
        r.complexity = r.complexity.max((got - mi_oracle(&q1, a, &prior)).abs());

        let s2 = system(q2.clone(), b, prior.clone());
        match (metrics::gnid(&s1, &s2, &prior), gnid_oracle(&q1, a, &q2, b, &prior)) {
            (Ok(got), Some(want)) => r.gnid = r.gnid.max((got - want).abs()),
            (Err(_), None) => r.undefined += 1,
            _ => r.gnid = f64::INFINITY,
        }

        let d = 1 + rng.below(4);
        let mu: Vec<f64> = (0..d).map(|_| 2.0 * rng.normal()).collect();
        let lv: Vec<f64> = (0..d).map(|_| -2.0 + 3.5 * rng.uniform_open()).collect();
        let want: f64 = mu.iter().zip(&lv).map(|(&m, &l)| gaussian_kl_quadrature(m, l)).sum();
        r.kl_gaussian = r.kl_gaussian.max((kl_standard_normal(&mu, &lv) - want).abs());

        let logits: Vec<f64> = (0..b).map(|_| 3.0 * rng.normal()).collect();
        r.kl_uniform = r.kl_uniform.max((kl_uniform(&logits) - kl_uniform_oracle(&logits)).abs());
    }
    Ok(r)
}

// ---- IB solver checks ----

/// Random meaning distributions over `n` points: rows of a random
/// stochastic matrix with full support.
fn random_meanings(n: usize, rng: &mut RandomSource) -> MeaningDistribution {
    let mut m = Vec::with_capacity(n * n);
    for _ in 0..n {
        let row: Vec<f64> = (0..n).map(|_| (2.0 * rng.normal()).exp()).collect();
        let s: f64 = row.iter().sum();
        m.extend(row.iter().map(|v| v / s));
    }
    MeaningDistribution::new(n, m).unwrap()
}

/// Largest per-round increase of the IB objective (bits) over `problems`
/// random toy problems, relative to the objective's magnitude.
pub fn ib_monotonicity(problems: usize, seed: u64) -> Result<f64> {
    let root = RandomSource::new(seed);
    let mut worst = f64::NEG_INFINITY;
    for i in 0..problems {
        let mut rng = root.split(i as u64);
        let n = 3 + rng.below(6);
        let k = 2 + rng.below(n);
        let meanings = random_meanings(n, &mut rng);
        let prior = random_prior(n, &mut rng);
        let beta = (rng.uniform_open() * 40f64.ln()).exp() * 0.5;
        let q0: Vec<f64> = (0..n)
            .flat_map(|_| {
                let row: Vec<f64> = (0..k).map(|_| rng.uniform_open()).collect();
                let s: f64 = row.iter().sum();
                row.into_iter().map(move |v| v / s)
            })
            .collect();
        let opts = IbOptions {
            tolerance: 1e-12,
            max_rounds: 400,
            trace: true,
        };
        let sol = ib::ib_iterate(&prior, &meanings, beta, &q0, opts)?;
        for w in sol.objective_trace.windows(2) {
            worst = worst.max((w[1] - w[0]) / (1.0 + w[0].abs()));
        }
    }
    Ok(worst)
}

/// Four chips on a line in CIELAB with overlapping meanings.
pub fn four_chip_table() -> ChipTable {
    let labs = [[50.0, 0.0, 0.0], [50.0, 15.0, 5.0], [55.0, 35.0, 5.0], [60.0, 60.0, 20.0]];
    let chips = labs
        .iter()
        .enumerate()
        .map(|(i, &lab)| Chip {
            id: i as u32 + 1,
            grid: GridCode { row: 2, col: i as u8 + 1 },
            lab,
        })
        .collect();
    ChipTable::new(chips).unwrap()
}

/// (complexity, informativeness) in bits of a deterministic encoder, from
/// the definitions: the decoder is the posterior mixture of meanings.
pub fn deterministic_point(labels: &[usize], prior: &[f64], m: &MeaningDistribution) -> (f64, f64) {
    let n = labels.len();
    let k = labels.iter().max().unwrap() + 1;
    let mut pc = vec![0.0; k];
    let mut mhat = vec![vec![0.0; n]; k];
    for (x, &c) in labels.iter().enumerate() {
        pc[c] += prior[x];
        for (acc, v) in mhat[c].iter_mut().zip(m.row(x)) {
            *acc += prior[x] * v;
        }
    }
    let complexity = entropy_nats(&pc) / std::f64::consts::LN_2;
    let mut distortion = 0.0;
    for (x, &c) in labels.iter().enumerate() {
        for (&p, &h) in m.row(x).iter().zip(&mhat[c]) {
            if p > 0.0 {
                distortion += prior[x] * p * (p * pc[c] / h).log2();
            }
        }
    }
    (complexity, -distortion)
}

/// Largest amount by which any deterministic encoder of the four-chip
/// problem exceeds the computed frontier, in bits.
pub fn four_chip_enumeration() -> Result<f64> {
    let chips = four_chip_table();
    let meanings = ib::build_meanings(&chips, 0.15)?;
    let prior = vec![0.25; 4];
    let betas = ib::log_spaced(0.1, 1e4, 400);
    let opts = FrontierOptions {
        clusters: 4,
        ..FrontierOptions::default()
    };
    let sols = ib::compute_frontier(&prior, &meanings, &betas, opts)?;
    let frontier = ib::Frontier::from_solutions(&prior, &meanings, &sols)?;
    let mut worst = f64::NEG_INFINITY;
    for code in 0..4usize.pow(4) {
        let labels: Vec<usize> = (0..4).map(|i| (code / 4usize.pow(i)) % 4).collect();
        let (c, inf) = deterministic_point(&labels, &prior, &meanings);
        worst = worst.max(frontier.excess(c, inf));
    }
    Ok(worst)
}
