//! Synthetic stand-in for a WCS term file.
//!
//! Each language partitions color space around a handful of prototype chips
//! (spread out k-means++ style); each speaker names every chip by sampling a
//! term with probability decaying in squared CIELAB distance to the
//! prototypes. Lexicon sizes and category sharpness vary across languages.

use super::chips::ChipTable;
use super::naming::TermRecord;
use crate::numerics::RandomSource;

#[derive(Debug, Clone, Copy)]
pub struct SynthSpec {
    pub languages: u32,
    pub speakers: u32,
    pub min_terms: usize,
    pub max_terms: usize,
    /// Range of the per-language category width, in CIELAB units.
    pub width: (f64, f64),
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            languages: 110,
            speakers: 10,
            min_terms: 2,
            max_terms: 11,
            width: (8.0, 20.0),
            seed: 2009,
        }
    }
}

fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn prototypes(labs: &[[f64; 3]], k: usize, rng: &mut RandomSource) -> Vec<usize> {
    let mut protos = vec![rng.below(labs.len())];
    while protos.len() < k {
        let weights: Vec<f64> = labs
            .iter()
            .map(|x| {
                protos
                    .iter()
                    .map(|&p| dist2(x, &labs[p]))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        let total: f64 = weights.iter().sum();
        let mut u = rng.uniform_open() * total;
        let mut pick = labs.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if u < *w {
                pick = i;
                break;
            }
            u -= w;
        }
        protos.push(pick);
    }
    protos
}

pub fn synthesize_terms(chips: &ChipTable, spec: &SynthSpec) -> Vec<TermRecord> {
    let labs = chips.labs();
    let root = RandomSource::new(spec.seed);
    let mut out = Vec::new();
    for lang in 1..=spec.languages {
        let mut rng = root.split(lang as u64);
        let span = spec.max_terms - spec.min_terms + 1;
        let k = (spec.min_terms + rng.below(span)).min(labs.len());
        let protos = prototypes(&labs, k, &mut rng);
        let width = spec.width.0 + (spec.width.1 - spec.width.0) * rng.uniform_open();
        let probs: Vec<Vec<f64>> = labs
            .iter()
            .map(|x| {
                let logits: Vec<f64> = protos
                    .iter()
                    .map(|&p| -dist2(x, &labs[p]) / (2.0 * width * width))
                    .collect();
                let mut row = logits;
                crate::numerics::softmax_in_place(&mut row);
                row
            })
            .collect();
        for speaker in 1..=spec.speakers {
            for (chip, row) in chips.chips().iter().zip(&probs) {
                let mut u = rng.uniform_open();
                let mut term = row.len() - 1;
                for (t, p) in row.iter().enumerate() {
                    if u < *p {
                        term = t;
                        break;
                    }
                    u -= p;
                }
                out.push(TermRecord {
                    language: lang,
                    speaker,
                    chip: chip.id,
                    term: format!("T{term}"),
                });
            }
        }
    }
    out
}

/// Records in WCS term-file layout: `language  speaker  chip  term`.
pub fn terms_to_tsv(records: &[TermRecord]) -> String {
    let mut s = String::with_capacity(records.len() * 16);
    for r in records {
        s.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            r.language, r.speaker, r.chip, r.term
        ));
    }
    s
}
