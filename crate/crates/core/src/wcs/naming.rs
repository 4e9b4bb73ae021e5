use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::chips::ChipTable;
use crate::error::{Error, Result};

const ROW_TOLERANCE: f64 = 1e-9;

/// Conditional naming distribution q(c|x) over signals for every chip, with a
/// prior p(x) over chips.
///
/// Chips are indexed by position (chip id − 1); signals are dense ids
/// `0..n_signals`, with an optional human-readable label per signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamingSystem {
    terms: Vec<String>,
    /// Row-major `n_chips × n_signals`.
    q: Vec<f64>,
    prior: Vec<f64>,
}

impl NamingSystem {
    pub fn new(terms: Vec<String>, q: Vec<f64>, prior: Vec<f64>) -> Result<Self> {
        let n_signals = terms.len();
        if n_signals == 0 || prior.is_empty() {
            return Err(Error::invalid("naming system needs at least one chip and signal"));
        }
        if q.len() != n_signals * prior.len() {
            return Err(Error::invalid(format!(
                "q has {} entries, expected {}×{}",
                q.len(),
                prior.len(),
                n_signals
            )));
        }
        let sys = Self { terms, q, prior };
        sys.validate()?;
        Ok(sys)
    }

    /// Uniform prior over chips; signal labels are their ids.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_chips = rows.len();
        let n_signals = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_signals) {
            return Err(Error::invalid("ragged naming rows"));
        }
        let terms = (0..n_signals).map(|s| s.to_string()).collect();
        let prior = vec![1.0 / n_chips.max(1) as f64; n_chips];
        Self::new(terms, rows.concat(), prior)
    }

    /// Deterministic system: chip `x` always uses signal `labels[x]`.
    pub fn from_labels(labels: &[usize], n_signals: usize) -> Result<Self> {
        let rows = labels
            .iter()
            .map(|&l| {
                let mut r = vec![0.0; n_signals];
                if l < n_signals {
                    r[l] = 1.0;
                }
                r
            })
            .collect();
        Self::from_rows(rows)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q.iter().chain(&self.prior).any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Data("naming probabilities must be finite and ≥ 0".into()));
        }
        let psum: f64 = self.prior.iter().sum();
        if (psum - 1.0).abs() > ROW_TOLERANCE {
            return Err(Error::Data(format!("prior sums to {psum}")));
        }
        for x in 0..self.n_chips() {
            let s: f64 = self.row(x).iter().sum();
            if (s - 1.0).abs() > ROW_TOLERANCE {
                return Err(Error::Data(format!("row for chip {} sums to {s}", x + 1)));
            }
        }
        Ok(())
    }

    pub fn n_chips(&self) -> usize {
        self.prior.len()
    }

    pub fn n_signals(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn prior(&self) -> &[f64] {
        &self.prior
    }

    pub fn matrix(&self) -> &[f64] {
        &self.q
    }

    pub fn row(&self, x: usize) -> &[f64] {
        let k = self.n_signals();
        &self.q[x * k..(x + 1) * k]
    }

    pub fn prob(&self, x: usize, c: usize) -> f64 {
        self.q[x * self.n_signals() + c]
    }

    pub fn with_prior(mut self, prior: Vec<f64>) -> Result<Self> {
        if prior.len() != self.n_chips() {
            return Err(Error::invalid("prior length differs from chip count"));
        }
        self.prior = prior;
        self.validate()?;
        Ok(self)
    }

    /// Most probable signal per chip; ties go to the lowest signal id.
    pub fn modal_signals(&self) -> Vec<usize> {
        (0..self.n_chips())
            .map(|x| {
                let row = self.row(x);
                let mut best = 0;
                for (c, &p) in row.iter().enumerate() {
                    if p > row[best] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    }

    /// Marginal q(c) = Σ_x p(x) q(c|x).
    pub fn marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.n_signals()];
        for (x, &px) in self.prior.iter().enumerate() {
            for (acc, &q) in m.iter_mut().zip(self.row(x)) {
                *acc += px * q;
            }
        }
        m
    }

    /// CSV with header `chip_id,signal_id,prob`, one line per (chip, signal).
    /// Chip ids are 1-based, signal ids 0-based.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("chip_id,signal_id,prob\n");
        for x in 0..self.n_chips() {
            for (c, p) in self.row(x).iter().enumerate() {
                out.push_str(&format!("{},{},{}\n", x + 1, c, p));
            }
        }
        out
    }

    /// Inverse of [`NamingSystem::to_csv`]; the prior is uniform.
    pub fn from_csv(text: &str, path: &Path) -> Result<Self> {
        let perr = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "chip_id,signal_id,prob" => {}
            _ => return Err(perr(1, "expected header chip_id,signal_id,prob".into())),
        }
        let mut entries = Vec::new();
        let (mut n_chips, mut n_signals) = (0usize, 0usize);
        for (i, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(perr(i + 1, format!("expected 3 fields, found {}", f.len())));
            }
            let chip: usize = f[0]
                .parse()
                .map_err(|_| perr(i + 1, format!("bad chip id {:?}", f[0])))?;
            let sig: usize = f[1]
                .parse()
                .map_err(|_| perr(i + 1, format!("bad signal id {:?}", f[1])))?;
            let p: f64 = f[2]
                .parse()
                .map_err(|_| perr(i + 1, format!("bad probability {:?}", f[2])))?;
            if chip == 0 {
                return Err(perr(i + 1, "chip ids start at 1".into()));
            }
            n_chips = n_chips.max(chip);
            n_signals = n_signals.max(sig + 1);
            entries.push((chip - 1, sig, p));
        }
        if entries.is_empty() {
            return Err(perr(1, "no entries".into()));
        }
        let mut q = vec![0.0; n_chips * n_signals];
        for (x, c, p) in entries {
            q[x * n_signals + c] = p;
        }
        let terms = (0..n_signals).map(|s| s.to_string()).collect();
        Self::new(terms, q, vec![1.0 / n_chips as f64; n_chips])
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text, path)
    }
}

/// One line of a WCS term file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TermRecord {
    pub language: u32,
    pub speaker: u32,
    pub chip: u32,
    pub term: String,
}

/// WCS term token for "no response"; such records are skipped.
pub const NO_RESPONSE: &str = "*";

pub fn parse_term_records(text: &str, path: &Path) -> Result<Vec<TermRecord>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').map(str::trim).collect();
        let perr = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            msg,
        };
        if f.len() != 4 {
            return Err(perr(format!("expected 4 tab-separated fields, found {}", f.len())));
        }
        let num = |s: &str, what: &str| -> Result<u32> {
            s.parse().map_err(|_| perr(format!("bad {what} {s:?}")))
        };
        out.push(TermRecord {
            language: num(f[0], "language number")?,
            speaker: num(f[1], "speaker number")?,
            chip: num(f[2], "chip number")?,
            term: f[3].to_string(),
        });
    }
    Ok(out)
}

fn read_terms(path: &Path) -> Result<Vec<TermRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_term_records(&text, path)
}

/// q(c|x) for one language as the fraction of its speakers using each term.
///
/// Terms are interned per language in sorted token order. A chip with no
/// responses gets a uniform row. The prior is uniform over chips.
pub fn naming_from_records<'a>(
    records: impl IntoIterator<Item = &'a TermRecord>,
    chips: &ChipTable,
) -> Result<NamingSystem> {
    let mut counts: BTreeMap<(usize, &str), f64> = BTreeMap::new();
    let mut tokens: BTreeSet<&str> = BTreeSet::new();
    for r in records {
        let x = chips.index_of(r.chip).ok_or_else(|| {
            Error::Data(format!(
                "language {} speaker {} names unknown chip {}",
                r.language, r.speaker, r.chip
            ))
        })?;
        if r.term == NO_RESPONSE {
            continue;
        }
        tokens.insert(&r.term);
        *counts.entry((x, r.term.as_str())).or_default() += 1.0;
    }
    if tokens.is_empty() {
        return Err(Error::Data("no term responses".into()));
    }
    let ids: HashMap<&str, usize> = tokens.iter().enumerate().map(|(i, t)| (*t, i)).collect();
    let (n, k) = (chips.len(), tokens.len());
    let mut q = vec![0.0; n * k];
    for ((x, t), c) in counts {
        q[x * k + ids[t]] = c;
    }
    for x in 0..n {
        let row = &mut q[x * k..(x + 1) * k];
        let total: f64 = row.iter().sum();
        if total > 0.0 {
            row.iter_mut().for_each(|v| *v /= total);
        } else {
            row.iter_mut().for_each(|v| *v = 1.0 / k as f64);
        }
    }
    let terms = tokens.into_iter().map(str::to_string).collect();
    NamingSystem::new(terms, q, vec![1.0 / n as f64; n])
}

pub fn load_language_naming(
    path: impl AsRef<Path>,
    language: u32,
    chips: &ChipTable,
) -> Result<NamingSystem> {
    let records = read_terms(path.as_ref())?;
    let mut selected = records.iter().filter(|r| r.language == language).peekable();
    if selected.peek().is_none() {
        return Err(Error::NotFound(format!("language {language}")));
    }
    naming_from_records(selected, chips)
}

/// Every language in a term file, keyed by language number.
pub fn load_all_languages(
    path: impl AsRef<Path>,
    chips: &ChipTable,
) -> Result<BTreeMap<u32, NamingSystem>> {
    let records = read_terms(path.as_ref())?;
    let mut by_lang: BTreeMap<u32, Vec<&TermRecord>> = BTreeMap::new();
    for r in &records {
        by_lang.entry(r.language).or_default().push(r);
    }
    by_lang
        .into_iter()
        .map(|(lang, recs)| {
            naming_from_records(recs, chips)
                .map(|s| (lang, s))
                .map_err(|e| Error::Data(format!("language {lang}: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy_chips(n: u32) -> ChipTable {
        let text: String = (1..=n)
            .map(|i| format!("{i}\tB{i}\t{}\t1\t2\n", 10 * i))
            .collect();
        ChipTable::parse(&text, Path::new("toy")).unwrap()
    }

    fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn single_speaker_point_mass() {
        let dir = tempfile::tempdir().unwrap();
        let text: String = (1..=4).map(|c| format!("1\t1\t{c}\tA\n")).collect();
        let p = write(&dir, "term.txt", &text);
        let sys = load_language_naming(&p, 1, &toy_chips(4)).unwrap();
        assert_eq!(sys.n_signals(), 1);
        for x in 0..4 {
            assert_eq!(sys.row(x), &[1.0]);
        }
        assert_eq!(sys.prior(), &[0.25; 4]);
    }

    #[test]
    fn disagreeing_speakers_split_row() {
        let dir = tempfile::tempdir().unwrap();
        let text = "1\t1\t1\tA\n1\t1\t2\tA\n1\t2\t1\tA\n1\t2\t2\tB\n";
        let p = write(&dir, "term.txt", text);
        let sys = load_language_naming(&p, 1, &toy_chips(2)).unwrap();
        assert_eq!(sys.terms(), &["A".to_string(), "B".to_string()]);
        assert_eq!(sys.row(0), &[1.0, 0.0]);
        assert_eq!(sys.row(1), &[0.5, 0.5]);
    }

    #[test]
    fn errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = write(&dir, "term.txt", "1\t1\t9\tA\n");
        assert!(matches!(
            load_language_naming(&p, 1, &toy_chips(2)),
            Err(Error::Data(_))
        ));
        let p = write(&dir, "term2.txt", "1\t1\t1\tA\n");
        assert!(matches!(
            load_language_naming(&p, 2, &toy_chips(2)),
            Err(Error::NotFound(_))
        ));
        let p = write(&dir, "term3.txt", "1\t1\tA\n");
        assert!(matches!(
            load_language_naming(&p, 1, &toy_chips(2)),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn no_response_tokens_are_skipped() {
        let recs = parse_term_records("1\t1\t1\tA\n1\t2\t1\t*\n1\t1\t2\tB\n", Path::new("t")).unwrap();
        let sys = naming_from_records(&recs, &toy_chips(2)).unwrap();
        assert_eq!(sys.row(0), &[1.0, 0.0]);
    }

    #[test]
    fn modal_ties_break_low() {
        let sys = NamingSystem::from_rows(vec![vec![0.5, 0.5], vec![0.2, 0.8]]).unwrap();
        assert_eq!(sys.modal_signals(), vec![0, 1]);
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        assert!(NamingSystem::from_rows(vec![vec![0.5, 0.4]]).is_err());
        assert!(NamingSystem::from_rows(vec![vec![1.5, -0.5]]).is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_exact(
            raw in prop::collection::vec(prop::collection::vec(1e-6f64..1.0, 3), 1..12)
        ) {
            let rows: Vec<Vec<f64>> = raw
                .into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.into_iter().map(|v| v / s).collect()
                })
                .filter(|r: &Vec<f64>| (r.iter().sum::<f64>() - 1.0).abs() < 1e-12)
                .collect();
            prop_assume!(!rows.is_empty());
            let sys = NamingSystem::from_rows(rows).unwrap();
            let back = NamingSystem::from_csv(&sys.to_csv(), Path::new("x.csv")).unwrap();
            prop_assert_eq!(back.matrix(), sys.matrix());
        }
    }
}
