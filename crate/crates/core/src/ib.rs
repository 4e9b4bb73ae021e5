//! Information-bottleneck bound for color naming.
//!
//! Meanings are Gaussian blobs over the chip universe. The bound is traced by
//! self-consistent (Blahut–Arimoto style) iteration at each β, annealing β
//! upward and warm-starting every solve from the previous encoder.
//!
//! Internally everything is in nats; reported complexity and informativeness
//! are in bits.

use std::f64::consts::LN_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{gemm, RandomSource};
use crate::wcs::ChipTable;

/// Default meaning width in scaled (÷100) CIELAB units.
pub const DEFAULT_MEANING_SIGMA: f64 = 0.08;
pub const DEFAULT_CLUSTERS: usize = 40;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
pub const DEFAULT_MAX_ROUNDS: usize = 10_000;
pub const WARM_START_NOISE: f64 = 1e-6;

const TINY: f64 = 1e-300;

/// Row-stochastic `n × n` matrix: row x is the meaning m_x over chips.
#[derive(Debug, Clone, PartialEq)]
pub struct MeaningDistribution {
    n: usize,
    m: Vec<f64>,
    /// Σ_u m_x(u) ln m_x(u), per x.
    neg_entropy: Vec<f64>,
}

impl MeaningDistribution {
    pub fn new(n: usize, m: Vec<f64>) -> Result<Self> {
        if n == 0 || m.len() != n * n {
            return Err(Error::invalid("meaning matrix must be n×n with n ≥ 1"));
        }
        for x in 0..n {
            let row = &m[x * n..(x + 1) * n];
            if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Data(format!("meaning row {x} has invalid entries")));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::Data(format!("meaning row {x} sums to {s}")));
            }
        }
        let neg_entropy = (0..n)
            .map(|x| {
                m[x * n..(x + 1) * n]
                    .iter()
                    .filter(|&&v| v > 0.0)
                    .map(|v| v * v.ln())
                    .sum()
            })
            .collect();
        Ok(Self { n, m, neg_entropy })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.m[x * self.n..(x + 1) * self.n]
    }

    pub fn matrix(&self) -> &[f64] {
        &self.m
    }
}

/// m_x(u) ∝ exp(−‖lab(u) − lab(x)‖² / 2σ²), with CIELAB scaled by 1/100.
pub fn build_meanings(chips: &ChipTable, sigma: f64) -> Result<MeaningDistribution> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("meaning sigma must be > 0, got {sigma}")));
    }
    let pts: Vec<[f64; 3]> = chips.chips().iter().map(|c| c.scaled()).collect();
    let n = pts.len();
    let mut m = vec![0.0; n * n];
    for (x, px) in pts.iter().enumerate() {
        let row = &mut m[x * n..(x + 1) * n];
        for (u, pu) in pts.iter().enumerate() {
            let d2: f64 = px.iter().zip(pu).map(|(a, b)| (a - b) * (a - b)).sum();
            row[u] = -d2 / (2.0 * sigma * sigma);
        }
        crate::numerics::softmax_in_place(row);
    }
    MeaningDistribution::new(n, m)
}

fn check_prior(prior: &[f64], n: usize) -> Result<()> {
    if prior.len() != n {
        return Err(Error::invalid(format!(
            "prior has {} entries for {} meanings",
            prior.len(),
            n
        )));
    }
    if prior.iter().any(|v| !v.is_finite() || *v < 0.0) || (prior.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(Error::invalid("prior must be a probability vector"));
    }
    Ok(())
}

fn check_encoder(q: &[f64], n: usize) -> Result<usize> {
    if n == 0 || q.is_empty() || q.len() % n != 0 {
        return Err(Error::invalid("encoder must be n×k"));
    }
    let k = q.len() / n;
    for x in 0..n {
        let row = &q[x * k..(x + 1) * k];
        if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::invalid(format!("encoder row {x} has invalid entries")));
        }
        if (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!("encoder row {x} is not stochastic")));
        }
    }
    Ok(k)
}

/// Quantities derived from an encoder: marginal, decoder meanings and the
/// divergence table D[x, c] = KL[m_x ‖ m̂_c] in nats.
struct Derived {
    marginal: Vec<f64>,
    decoder: Vec<f64>,
    divergence: Vec<f64>,
}

fn derive(prior: &[f64], meanings: &MeaningDistribution, q: &[f64], k: usize) -> Derived {
    let n = meanings.n;
    let mut marginal = vec![0.0; k];
    // joint p(x) q(c|x), stored transposed as k × n
    let mut joint_t = vec![0.0; k * n];
    for x in 0..n {
        for c in 0..k {
            let v = prior[x] * q[x * k + c];
            joint_t[c * n + x] = v;
            marginal[c] += v;
        }
    }
    let mut decoder = vec![0.0; k * n];
    gemm(k, n, n, &joint_t, false, &meanings.m, false, &mut decoder, false);
    let mean_meaning: Vec<f64> = {
        let mut mm = vec![0.0; n];
        for (x, &px) in prior.iter().enumerate() {
            for (acc, v) in mm.iter_mut().zip(meanings.row(x)) {
                *acc += px * v;
            }
        }
        mm
    };
    for c in 0..k {
        let row = &mut decoder[c * n..(c + 1) * n];
        if marginal[c] > 0.0 {
            row.iter_mut().for_each(|v| *v /= marginal[c]);
        } else {
            // unused cluster: any decoder works; the prior-weighted mean
            // meaning keeps divergences finite
            row.copy_from_slice(&mean_meaning);
        }
    }
    let log_decoder: Vec<f64> = decoder.iter().map(|v| v.max(TINY).ln()).collect();
    let mut cross = vec![0.0; n * k];
    gemm(n, n, k, &meanings.m, false, &log_decoder, true, &mut cross, false);
    let divergence = (0..n * k)
        .map(|i| (meanings.neg_entropy[i / k] - cross[i]).max(0.0))
        .collect();
    Derived {
        marginal,
        decoder,
        divergence,
    }
}

fn complexity_nats(prior: &[f64], q: &[f64], marginal: &[f64], k: usize) -> f64 {
    let mut total = 0.0;
    for (x, &px) in prior.iter().enumerate() {
        for c in 0..k {
            let v = q[x * k + c];
            if v > 0.0 && px > 0.0 {
                total += px * v * (v / marginal[c]).ln();
            }
        }
    }
    total.max(0.0)
}

fn expected_divergence(prior: &[f64], q: &[f64], divergence: &[f64], k: usize) -> f64 {
    let mut total = 0.0;
    for (x, &px) in prior.iter().enumerate() {
        for c in 0..k {
            total += px * q[x * k + c] * divergence[x * k + c];
        }
    }
    total
}

/// (complexity, informativeness) of any encoder q(c|x) `[n × k]`, in bits.
/// Informativeness is −E[KL[m_x ‖ m̂_c]], so it is ≤ 0.
pub fn evaluate_encoder(
    prior: &[f64],
    meanings: &MeaningDistribution,
    q: &[f64],
) -> Result<(f64, f64)> {
    check_prior(prior, meanings.n)?;
    let k = check_encoder(q, meanings.n)?;
    let d = derive(prior, meanings, q, k);
    Ok((
        complexity_nats(prior, q, &d.marginal, k) / LN_2,
        -expected_divergence(prior, q, &d.divergence, k) / LN_2,
    ))
}

/// IB objective I(X;C) − β·informativeness, in bits.
pub fn ib_objective(
    prior: &[f64],
    meanings: &MeaningDistribution,
    q: &[f64],
    beta: f64,
) -> Result<f64> {
    let (c, i) = evaluate_encoder(prior, meanings, q)?;
    Ok(c - beta * i)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IbOptions {
    pub tolerance: f64,
    pub max_rounds: usize,
    /// Record the objective at every round.
    pub trace: bool,
}

impl Default for IbOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            max_rounds: DEFAULT_MAX_ROUNDS,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IbSolution {
    pub beta: f64,
    pub n: usize,
    pub k: usize,
    /// q(c|x), `[n × k]`.
    pub encoder: Vec<f64>,
    /// m̂_c, `[k × n]`.
    pub decoder: Vec<f64>,
    pub marginal: Vec<f64>,
    pub complexity_bits: f64,
    pub informativeness_bits: f64,
    pub converged: bool,
    pub rounds: usize,
    /// Objective (bits) before each round, when tracing.
    pub objective_trace: Vec<f64>,
}

impl IbSolution {
    pub fn objective(&self) -> f64 {
        self.complexity_bits - self.beta * self.informativeness_bits
    }

    pub fn point(&self) -> FrontierPoint {
        FrontierPoint {
            beta: self.beta,
            complexity_bits: self.complexity_bits,
            informativeness_bits: self.informativeness_bits,
            converged: self.converged,
        }
    }
}

/// Self-consistent IB iteration at fixed β from `q_init` `[n × k]`.
///
/// Each round recomputes q(c), m̂_c and then q(c|x) ∝ q(c)·exp(−β·KL[m_x‖m̂_c]).
/// Stops when the largest encoder change is below `tolerance`, or after
/// `max_rounds` with `converged = false`.
pub fn ib_iterate(
    prior: &[f64],
    meanings: &MeaningDistribution,
    beta: f64,
    q_init: &[f64],
    opts: IbOptions,
) -> Result<IbSolution> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::invalid(format!("beta must be > 0, got {beta}")));
    }
    let n = meanings.n;
    check_prior(prior, n)?;
    let k = check_encoder(q_init, n)?;
    let mut q = q_init.to_vec();
    let mut trace = Vec::new();
    let mut converged = false;
    let mut rounds = 0;
    let mut logits = vec![0.0; k];
    while rounds < opts.max_rounds {
        rounds += 1;
        let d = derive(prior, meanings, &q, k);
        if opts.trace {
            let obj = complexity_nats(prior, &q, &d.marginal, k)
                + beta * expected_divergence(prior, &q, &d.divergence, k);
            trace.push(obj / LN_2);
        }
        let mut change: f64 = 0.0;
        for x in 0..n {
            for (c, l) in logits.iter_mut().enumerate() {
                *l = if d.marginal[c] > 0.0 {
                    d.marginal[c].ln() - beta * d.divergence[x * k + c]
                } else {
                    f64::NEG_INFINITY
                };
            }
            let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut total = 0.0;
            for v in logits.iter_mut() {
                *v = (*v - m).exp();
                total += *v;
            }
            for c in 0..k {
                let new = logits[c] / total;
                change = change.max((new - q[x * k + c]).abs());
                q[x * k + c] = new;
            }
        }
        if change < opts.tolerance {
            converged = true;
            break;
        }
    }
    let d = derive(prior, meanings, &q, k);
    let complexity = complexity_nats(prior, &q, &d.marginal, k) / LN_2;
    let informativeness = -expected_divergence(prior, &q, &d.divergence, k) / LN_2;
    if opts.trace {
        trace.push(complexity + beta * -informativeness);
    }
    Ok(IbSolution {
        beta,
        n,
        k,
        encoder: q,
        decoder: d.decoder,
        marginal: d.marginal,
        complexity_bits: complexity,
        informativeness_bits: informativeness,
        converged,
        rounds,
        objective_trace: trace,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub beta: f64,
    pub complexity_bits: f64,
    pub informativeness_bits: f64,
    pub converged: bool,
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
        .collect()
}

/// 100 values log-spaced over [2^-2, 2^10].
pub fn default_beta_schedule() -> Vec<f64> {
    log_spaced(0.25, 1024.0, 100)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierOptions {
    pub clusters: usize,
    pub iterate: IbOptions,
    pub noise: f64,
    pub seed: u64,
}

impl Default for FrontierOptions {
    fn default() -> Self {
        Self {
            clusters: DEFAULT_CLUSTERS,
            iterate: IbOptions::default(),
            noise: WARM_START_NOISE,
            seed: 0,
        }
    }
}

fn perturb(q: &mut [f64], k: usize, scale: f64, rng: &mut RandomSource) {
    for row in q.chunks_mut(k) {
        for v in row.iter_mut() {
            *v += scale * rng.uniform_open();
        }
        let s: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= s);
    }
}

/// Solves along an increasing β schedule, warm-starting each solve from the
/// previous encoder plus a small perturbation.
pub fn compute_frontier(
    prior: &[f64],
    meanings: &MeaningDistribution,
    betas: &[f64],
    opts: FrontierOptions,
) -> Result<Vec<IbSolution>> {
    if betas.is_empty() {
        return Err(Error::invalid("empty beta schedule"));
    }
    if betas.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("beta schedule must be increasing"));
    }
    if opts.clusters == 0 {
        return Err(Error::invalid("need at least one cluster"));
    }
    let n = meanings.n;
    let k = opts.clusters;
    let mut rng = RandomSource::new(opts.seed);
    let mut q = vec![1.0 / k as f64; n * k];
    let mut out = Vec::with_capacity(betas.len());
    for &beta in betas {
        perturb(&mut q, k, opts.noise, &mut rng);
        let sol = ib_iterate(prior, meanings, beta, &q, opts.iterate)?;
        q.clone_from(&sol.encoder);
        out.push(sol);
    }
    Ok(out)
}

/// Upper concave envelope of achievable (complexity, informativeness)
/// points, used as the reference curve for dominance checks.
///
/// Anchored at (0, single-cluster informativeness) and (H(X), 0); beyond the
/// last vertex the bound is 0, the largest possible informativeness.
#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    vertices: Vec<(f64, f64)>,
}

impl Frontier {
    pub fn from_points(
        prior: &[f64],
        meanings: &MeaningDistribution,
        points: impl IntoIterator<Item = (f64, f64)>,
    ) -> Result<Self> {
        let n = meanings.n;
        let single = vec![1.0; n];
        let (_, base) = evaluate_encoder(prior, meanings, &single)?;
        let entropy: f64 = prior
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum();
        let mut pts: Vec<(f64, f64)> = points
            .into_iter()
            .filter(|(c, i)| c.is_finite() && i.is_finite())
            .collect();
        pts.push((0.0, base));
        pts.push((entropy, 0.0));
        Ok(Self {
            vertices: upper_hull(pts),
        })
    }

    pub fn from_solutions(
        prior: &[f64],
        meanings: &MeaningDistribution,
        sols: &[IbSolution],
    ) -> Result<Self> {
        Self::from_points(
            prior,
            meanings,
            sols.iter().map(|s| (s.complexity_bits, s.informativeness_bits)),
        )
    }

    pub fn vertices(&self) -> &[(f64, f64)] {
        &self.vertices
    }

    /// Informativeness bound at `complexity` bits.
    pub fn bound_at(&self, complexity: f64) -> f64 {
        let v = &self.vertices;
        if complexity <= v[0].0 {
            return v[0].1;
        }
        for w in v.windows(2) {
            let ((c0, i0), (c1, i1)) = (w[0], w[1]);
            if complexity <= c1 {
                if c1 - c0 <= 0.0 {
                    return i1.max(i0);
                }
                return i0 + (i1 - i0) * (complexity - c0) / (c1 - c0);
            }
        }
        v.last().unwrap().1.max(0.0)
    }

    /// How far (bits) a point lies above the bound; ≤ 0 means dominated.
    pub fn excess(&self, complexity: f64, informativeness: f64) -> f64 {
        informativeness - self.bound_at(complexity)
    }
}

fn upper_hull(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for p in pts {
        if let Some(last) = hull.last() {
            if (p.0 - last.0).abs() < 1e-15 {
                continue; // same complexity, lower informativeness
            }
        }
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // keep the non-decreasing part: past the informativeness maximum the
    // bound is flat
    if let Some(peak) = hull
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .map(|(i, _)| i)
    {
        hull.truncate(peak + 1);
    }
    hull
}

/// Frontier CSV with header `beta,complexity_bits,informativeness_bits,converged`.
pub fn frontier_csv(points: &[FrontierPoint]) -> String {
    let mut s = String::from("beta,complexity_bits,informativeness_bits,converged\n");
    for p in points {
        s.push_str(&format!(
            "{},{},{},{}\n",
            p.beta, p.complexity_bits, p.informativeness_bits, p.converged
        ));
    }
    s
}

pub fn parse_frontier_csv(text: &str) -> Result<Vec<FrontierPoint>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some("beta,complexity_bits,informativeness_bits,converged") {
        return Err(Error::Format("frontier CSV header".into()));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Format(format!("frontier CSV value {s:?}")))
            };
            if f.len() != 4 {
                return Err(Error::Format(format!("frontier CSV row {l:?}")));
            }
            Ok(FrontierPoint {
                beta: num(f[0])?,
                complexity_bits: num(f[1])?,
                informativeness_bits: num(f[2])?,
                converged: f[3].trim() == "true",
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn line_chips(n: usize, spacing: f64) -> ChipTable {
        let text: String = (1..=n)
            .map(|i| format!("{i}\tB{i}\t{}\t0\t0\n", 10.0 + spacing * i as f64))
            .collect();
        ChipTable::parse(&text, Path::new("toy")).unwrap()
    }

    fn uniform(n: usize) -> Vec<f64> {
        vec![1.0 / n as f64; n]
    }

    #[test]
    fn meanings_limits() {
        let chips = line_chips(5, 10.0);
        let sharp = build_meanings(&chips, 1e-3).unwrap();
        for x in 0..5 {
            assert!((sharp.row(x)[x] - 1.0).abs() < 1e-12);
        }
        let flat = build_meanings(&chips, 1e6).unwrap();
        for x in 0..5 {
            for &v in flat.row(x) {
                assert!((v - 0.2).abs() < 1e-9);
            }
        }
        // chip 3 has neighbors 2 and 4 at equal distance
        let mid = build_meanings(&chips, 0.1).unwrap();
        assert!((mid.row(2)[1] - mid.row(2)[3]).abs() < 1e-15);
        assert!(build_meanings(&chips, 0.0).is_err());
    }

    #[test]
    fn tiny_beta_collapses() {
        let chips = line_chips(6, 8.0);
        let m = build_meanings(&chips, 0.1).unwrap();
        let mut rng = RandomSource::new(1);
        let mut q: Vec<f64> = (0..6 * 4).map(|_| rng.uniform_open()).collect();
        for row in q.chunks_mut(4) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        let sol = ib_iterate(&uniform(6), &m, 1e-6, &q, IbOptions::default()).unwrap();
        assert!(sol.complexity_bits < 1e-6, "{}", sol.complexity_bits);
    }

    #[test]
    fn huge_beta_is_near_deterministic() {
        let n = 8;
        let chips = line_chips(n, 10.0);
        let m = build_meanings(&chips, 0.02).unwrap();
        // start from a slightly perturbed identity with as many clusters as chips
        let mut q = vec![0.0; n * n];
        for x in 0..n {
            for c in 0..n {
                q[x * n + c] = if x == c { 0.9 } else { 0.1 / (n - 1) as f64 };
            }
        }
        let sol = ib_iterate(&uniform(n), &m, 1e4, &q, IbOptions::default()).unwrap();
        assert!((sol.complexity_bits - (n as f64).log2()).abs() < 1e-3);
        for x in 0..n {
            let mx = sol.encoder[x * n..(x + 1) * n].iter().cloned().fold(0.0, f64::max);
            assert!(mx > 0.999);
        }
    }

    #[test]
    fn objective_is_monotone_per_round() {
        let chips = line_chips(7, 6.0);
        let m = build_meanings(&chips, 0.1).unwrap();
        let mut rng = RandomSource::new(5);
        let mut q: Vec<f64> = (0..7 * 3).map(|_| rng.uniform_open()).collect();
        for row in q.chunks_mut(3) {
            let s: f64 = row.iter().sum();
            row.iter_mut().for_each(|v| *v /= s);
        }
        let opts = IbOptions {
            trace: true,
            ..IbOptions::default()
        };
        let sol = ib_iterate(&uniform(7), &m, 12.0, &q, opts).unwrap();
        for w in sol.objective_trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-10, "{} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn converged_solution_is_self_consistent() {
        let chips = line_chips(6, 7.0);
        let m = build_meanings(&chips, 0.1).unwrap();
        let p = uniform(6);
        let sols = compute_frontier(&p, &m, &log_spaced(0.5, 50.0, 15), FrontierOptions {
            clusters: 6,
            ..FrontierOptions::default()
        })
        .unwrap();
        let last = sols.last().unwrap();
        assert!(last.converged);
        let again = ib_iterate(&p, &m, last.beta, &last.encoder, IbOptions {
            max_rounds: 1,
            ..IbOptions::default()
        })
        .unwrap();
        let diff = again
            .encoder
            .iter()
            .zip(&last.encoder)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-7);
    }

    #[test]
    fn rejects_bad_inputs() {
        let chips = line_chips(3, 5.0);
        let m = build_meanings(&chips, 0.1).unwrap();
        let q = vec![1.0; 3];
        assert!(ib_iterate(&uniform(3), &m, 0.0, &q, IbOptions::default()).is_err());
        assert!(ib_iterate(&uniform(2), &m, 1.0, &q, IbOptions::default()).is_err());
        assert!(ib_iterate(&uniform(3), &m, 1.0, &[0.5, 0.5, 1.0], IbOptions::default()).is_err());
        assert!(compute_frontier(&uniform(3), &m, &[2.0, 1.0], FrontierOptions::default()).is_err());
    }

    #[test]
    fn frontier_hull_interpolates_and_saturates() {
        let chips = line_chips(4, 10.0);
        let m = build_meanings(&chips, 0.1).unwrap();
        let p = uniform(4);
        let f = Frontier::from_points(&p, &m, [(1.0, -0.2)]).unwrap();
        let (_, base) = evaluate_encoder(&p, &m, &[1.0; 4]).unwrap();
        assert!((f.bound_at(0.0) - base).abs() < 1e-12);
        assert_eq!(f.bound_at(2.0), 0.0);
        assert_eq!(f.bound_at(5.0), 0.0);
        let mid = f.bound_at(0.5);
        assert!(mid > base.min(-0.2) && mid < -0.2);
    }

    #[test]
    fn frontier_csv_round_trip() {
        let pts = vec![
            FrontierPoint {
                beta: 0.25,
                complexity_bits: 0.0,
                informativeness_bits: -1.5,
                converged: true,
            },
            FrontierPoint {
                beta: 3.5,
                complexity_bits: 1.25,
                informativeness_bits: -0.5,
                converged: false,
            },
        ];
        assert_eq!(parse_frontier_csv(&frontier_csv(&pts)).unwrap(), pts);
    }
}
