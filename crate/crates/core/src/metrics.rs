//! Evaluation of naming systems: plug-in information measures, gNID, best
//! matches against human languages, mode maps, PCA and the
//! communication-distance / color-distance regression.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wcs::{ChipTable, NamingSystem, GRID_COLS, GRID_ROWS};

fn xlog2(p: f64, q: f64) -> f64 {
    if p > 0.0 {
        p * (p / q).log2()
    } else {
        0.0
    }
}

/// Plug-in I(X;C) in bits for a row-stochastic `q [n × k]` and prior `p`.
pub fn mutual_information(q: &[f64], k: usize, prior: &[f64]) -> f64 {
    let n = prior.len();
    let mut marginal = vec![0.0; k];
    for x in 0..n {
        for c in 0..k {
            marginal[c] += prior[x] * q[x * k + c];
        }
    }
    let mut total = 0.0;
    for x in 0..n {
        for c in 0..k {
            total += prior[x] * xlog2(q[x * k + c], marginal[c]);
        }
    }
    total.max(0.0)
}

/// Plug-in complexity I(X;C) of a naming system under its own prior.
pub fn estimate_complexity(system: &NamingSystem) -> f64 {
    mutual_information(system.matrix(), system.n_signals(), system.prior())
}

/// Delta-method standard error (bits) of [`estimate_complexity`] when each
/// row was estimated from `n_samples` independent draws.
pub fn complexity_standard_error(system: &NamingSystem, n_samples: usize) -> f64 {
    let k = system.n_signals();
    let marginal = system.marginal();
    let mut var = 0.0;
    for (x, &px) in system.prior().iter().enumerate() {
        let row = system.row(x);
        let (mut m1, mut m2) = (0.0, 0.0);
        for c in 0..k {
            if row[c] > 0.0 {
                let g = (row[c] / marginal[c]).log2();
                m1 += row[c] * g;
                m2 += row[c] * g * g;
            }
        }
        var += px * px * (m2 - m1 * m1).max(0.0) / n_samples as f64;
    }
    var.sqrt()
}

/// I(W;V) in bits from a joint table `[a × b]`.
fn joint_mi(joint: &[f64], a: usize, b: usize) -> f64 {
    let mut pw = vec![0.0; a];
    let mut pv = vec![0.0; b];
    for i in 0..a {
        for j in 0..b {
            pw[i] += joint[i * b + j];
            pv[j] += joint[i * b + j];
        }
    }
    let mut total = 0.0;
    for i in 0..a {
        for j in 0..b {
            total += xlog2(joint[i * b + j], pw[i] * pv[j]);
        }
    }
    total.max(0.0)
}

fn joint(q1: &NamingSystem, q2: &NamingSystem, prior: &[f64]) -> Vec<f64> {
    let (a, b) = (q1.n_signals(), q2.n_signals());
    let mut out = vec![0.0; a * b];
    for (x, &px) in prior.iter().enumerate() {
        let (r1, r2) = (q1.row(x), q2.row(x));
        for i in 0..a {
            let w = px * r1[i];
            if w == 0.0 {
                continue;
            }
            for j in 0..b {
                out[i * b + j] += w * r2[j];
            }
        }
    }
    out
}

/// Generalized normalized information distance between two naming systems
/// over the same chips: 1 − I(W;V) / max(I(W;W′), I(V;V′)).
pub fn gnid(q1: &NamingSystem, q2: &NamingSystem, prior: &[f64]) -> Result<f64> {
    if q1.n_chips() != q2.n_chips() || prior.len() != q1.n_chips() {
        return Err(Error::invalid(format!(
            "gnid: systems over {} and {} chips, prior over {}",
            q1.n_chips(),
            q2.n_chips(),
            prior.len()
        )));
    }
    let (a, b) = (q1.n_signals(), q2.n_signals());
    let cross = joint_mi(&joint(q1, q2, prior), a, b);
    let self1 = joint_mi(&joint(q1, q1, prior), a, a);
    let self2 = joint_mi(&joint(q2, q2, prior), b, b);
    let denom = self1.max(self2);
    if denom <= 1e-12 {
        return Err(Error::Undefined(
            "gnid of two constant naming systems".into(),
        ));
    }
    Ok(1.0 - cross / denom)
}

/// A candidate agent naming system tagged with where it came from.
#[derive(Debug, Clone)]
pub struct AgentSystem {
    pub run: String,
    pub epoch: usize,
    pub system: NamingSystem,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub language_id: String,
    pub best_agent_run: String,
    pub best_epoch: usize,
    pub gnid: f64,
}

/// The agent system with the smallest gNID to `language`. Ties go to the
/// earliest epoch, then to list order. Agents for which gNID is undefined
/// are skipped.
pub fn best_match(
    language_id: &str,
    language: &NamingSystem,
    agents: &[AgentSystem],
) -> Result<MatchResult> {
    if agents.is_empty() {
        return Err(Error::invalid("best_match: empty agent set"));
    }
    let mut best: Option<(f64, &AgentSystem)> = None;
    for agent in agents {
        let g = match gnid(language, &agent.system, language.prior()) {
            Ok(g) => g,
            Err(Error::Undefined(_)) => continue,
            Err(e) => return Err(e),
        };
        let better = match best {
            None => true,
            Some((bg, ba)) => g < bg || (g == bg && agent.epoch < ba.epoch),
        };
        if better {
            best = Some((g, agent));
        }
    }
    let (g, a) = best.ok_or_else(|| {
        Error::Undefined(format!("gnid undefined for every agent vs {language_id}"))
    })?;
    Ok(MatchResult {
        language_id: language_id.to_string(),
        best_agent_run: a.run.clone(),
        best_epoch: a.epoch,
        gnid: g,
    })
}

pub fn match_table_csv(results: &[MatchResult]) -> String {
    let mut s = String::from("language_id,best_agent_run,best_epoch,gnid\n");
    for r in results {
        let _ = writeln!(s, "{},{},{},{}", r.language_id, r.best_agent_run, r.best_epoch, r.gnid);
    }
    s
}

/// WCS grid painted with modal-category centroids.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMap {
    /// Row-major `GRID_ROWS × GRID_COLS`; `(signal, CIELAB)` where a chip sits.
    pub cells: Vec<Option<(usize, [f64; 3])>>,
    /// Centroid color of every signal that is modal for some chip.
    pub legend: BTreeMap<usize, [f64; 3]>,
}

/// Mean CIELAB of the chips whose modal signal is each used signal.
pub fn modal_centroids(system: &NamingSystem, chips: &ChipTable) -> Result<BTreeMap<usize, [f64; 3]>> {
    if system.n_chips() != chips.len() {
        return Err(Error::invalid(format!(
            "naming system covers {} chips, table has {}",
            system.n_chips(),
            chips.len()
        )));
    }
    let mut sums: BTreeMap<usize, ([f64; 3], usize)> = BTreeMap::new();
    for (chip, s) in chips.chips().iter().zip(system.modal_signals()) {
        let e = sums.entry(s).or_insert(([0.0; 3], 0));
        for d in 0..3 {
            e.0[d] += chip.lab[d];
        }
        e.1 += 1;
    }
    Ok(sums
        .into_iter()
        .map(|(s, (sum, n))| (s, sum.map(|v| v / n as f64)))
        .collect())
}

pub fn mode_map(system: &NamingSystem, chips: &ChipTable) -> Result<ModeMap> {
    let legend = modal_centroids(system, chips)?;
    let mut cells = vec![None; GRID_ROWS * GRID_COLS];
    for (chip, s) in chips.chips().iter().zip(system.modal_signals()) {
        let idx = chip.grid.row as usize * GRID_COLS + chip.grid.col as usize;
        cells[idx] = Some((s, legend[&s]));
    }
    Ok(ModeMap { cells, legend })
}

pub const MODE_MAP_CELL_PX: usize = 12;

impl ModeMap {
    pub fn cell(&self, row: usize, col: usize) -> Option<(usize, [f64; 3])> {
        self.cells[row * GRID_COLS + col]
    }

    /// CSV with header `row,col,signal_id,L,a,b`, one line per chip.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,signal_id,L,a,b\n");
        for r in 0..GRID_ROWS {
            for c in 0..GRID_COLS {
                if let Some((sig, lab)) = self.cell(r, c) {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{}",
                        (b'A' + r as u8) as char,
                        c,
                        sig,
                        lab[0],
                        lab[1],
                        lab[2]
                    );
                }
            }
        }
        s
    }

    /// SVG group body (cells plus optional dashed frame) at an offset.
    fn svg_body(&self, out: &mut String, dx: usize, dashed: bool) {
        let px = MODE_MAP_CELL_PX;
        for r in 0..GRID_ROWS {
            for c in 0..GRID_COLS {
                if let Some((sig, lab)) = self.cell(r, c) {
                    let _ = writeln!(
                        out,
                        r#"<rect class="cell" x="{}" y="{}" width="{px}" height="{px}" fill="{}" data-signal="{sig}"/>"#,
                        dx + c * px,
                        r * px,
                        lab_to_hex(lab)
                    );
                }
            }
        }
        if dashed {
            let _ = writeln!(
                out,
                r#"<rect class="border" x="{}" y="0.5" width="{}" height="{}" fill="none" stroke="black" stroke-dasharray="4 3"/>"#,
                dx as f64 + 0.5,
                GRID_COLS * px - 1,
                GRID_ROWS * px - 1
            );
        }
    }

    pub fn to_svg(&self, dashed_border: bool) -> String {
        let (w, h) = (GRID_COLS * MODE_MAP_CELL_PX, GRID_ROWS * MODE_MAP_CELL_PX);
        let mut s = format!(
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
        );
        s.push('\n');
        self.svg_body(&mut s, 0, dashed_border);
        s.push_str("</svg>\n");
        s
    }
}

/// Agent map on the left, human map (dashed frame) on the right.
pub fn paired_mode_map_svg(agent: &ModeMap, human: &ModeMap) -> String {
    let gap = 2 * MODE_MAP_CELL_PX;
    let one = GRID_COLS * MODE_MAP_CELL_PX;
    let (w, h) = (2 * one + gap, GRID_ROWS * MODE_MAP_CELL_PX);
    let mut s = format!(
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    s.push('\n');
    agent.svg_body(&mut s, 0, false);
    human.svg_body(&mut s, one + gap, true);
    s.push_str("</svg>\n");
    s
}

/// CIELAB (D65 white) to an sRGB hex string, clipping out-of-gamut colors.
pub fn lab_to_hex(lab: [f64; 3]) -> String {
    let [l, a, b] = lab;
    let fy = (l + 16.0) / 116.0;
    let fx = fy + a / 500.0;
    let fz = fy - b / 200.0;
    let inv = |t: f64| {
        if t > 6.0 / 29.0 {
            t * t * t
        } else {
            3.0 * (6.0f64 / 29.0).powi(2) * (t - 4.0 / 29.0)
        }
    };
    let (x, y, z) = (0.95047 * inv(fx), inv(fy), 1.08883 * inv(fz));
    let lin = [
        3.2404542 * x - 1.5371385 * y - 0.4985314 * z,
        -0.9692660 * x + 1.8760108 * y + 0.0415560 * z,
        0.0556434 * x - 0.2040259 * y + 1.0572252 * z,
    ];
    let enc = |v: f64| {
        let v = v.clamp(0.0, 1.0);
        let s = if v <= 0.0031308 {
            12.92 * v
        } else {
            1.055 * v.powf(1.0 / 2.4) - 0.055
        };
        (s * 255.0).round() as u8
    };
    format!("#{:02x}{:02x}{:02x}", enc(lin[0]), enc(lin[1]), enc(lin[2]))
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (descending) and eigenvectors as rows.
pub fn symmetric_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<Vec<f64>>) {
    let mut m = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[i * n + j] * m[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q * n + q] - m[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k * n + p], m[k * n + q]);
                    m[k * n + p] = c * mkp - s * mkq;
                    m[k * n + q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p * n + k], m[q * n + k]);
                    m[p * n + k] = c * mpk - s * mqk;
                    m[q * n + k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k * n + p], v[k * n + q]);
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[j * n + j].total_cmp(&m[i * n + i]));
    let values = order.iter().map(|&i| m[i * n + i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut col: Vec<f64> = (0..n).map(|k| v[k * n + i]).collect();
            if let Some(first) = col.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
            col
        })
        .collect();
    (values, vectors)
}

/// Projection of mean-centered vectors onto the top two principal axes.
/// Each axis is oriented so its first nonzero coordinate is positive.
pub fn pca2(vectors: &[Vec<f64>]) -> Result<Vec<[f64; 2]>> {
    let dim = vectors.first().map_or(0, Vec::len);
    if vectors.len() < 2 || dim == 0 {
        return Err(Error::Degenerate("pca2 needs at least two vectors".into()));
    }
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::invalid("pca2: vectors differ in dimension"));
    }
    let n = vectors.len() as f64;
    let mean: Vec<f64> = (0..dim)
        .map(|d| vectors.iter().map(|v| v[d]).sum::<f64>() / n)
        .collect();
    let centered: Vec<Vec<f64>> = vectors
        .iter()
        .map(|v| v.iter().zip(&mean).map(|(a, m)| a - m).collect())
        .collect();
    let mut cov = vec![0.0; dim * dim];
    for v in &centered {
        for i in 0..dim {
            for j in 0..dim {
                cov[i * dim + j] += v[i] * v[j] / (n - 1.0);
            }
        }
    }
    let trace: f64 = (0..dim).map(|i| cov[i * dim + i]).sum();
    if trace <= 1e-300 {
        return Err(Error::Degenerate("pca2: all vectors identical".into()));
    }
    let (_, axes) = symmetric_eigen(&cov, dim);
    let proj = |v: &Vec<f64>, k: usize| -> f64 {
        axes.get(k)
            .map_or(0.0, |a| a.iter().zip(v).map(|(x, y)| x * y).sum())
    };
    Ok(centered.iter().map(|v| [proj(v, 0), proj(v, 1)]).collect())
}

/// r² of the least-squares fit of color-centroid distance on
/// communication-vector distance, over all pairs of used signals.
///
/// A signal is used if it is modal for at least one chip; its color is the
/// centroid of those chips. When all communication distances are equal
/// (one-hot basis vectors) the best linear fit is the constant mean and
/// r² is 0.
pub fn comm_color_correlation(
    system: &NamingSystem,
    chips: &ChipTable,
    embeddings: &[Vec<f64>],
) -> Result<f64> {
    let centroids = modal_centroids(system, chips)?;
    if centroids.len() < 3 {
        return Err(Error::Degenerate(format!(
            "{} used signals; a distance regression needs at least 3",
            centroids.len()
        )));
    }
    let used: Vec<(usize, [f64; 3])> = centroids.into_iter().collect();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for i in 0..used.len() {
        for j in i + 1..used.len() {
            let (si, ci) = used[i];
            let (sj, cj) = used[j];
            let (ei, ej) = (
                embeddings.get(si).ok_or_else(|| Error::invalid(format!("no embedding for signal {si}")))?,
                embeddings.get(sj).ok_or_else(|| Error::invalid(format!("no embedding for signal {sj}")))?,
            );
            xs.push(dist(ei, ej));
            ys.push(dist(&ci, &cj));
        }
    }
    Ok(r_squared(&xs, &ys))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Coefficient of determination of the simple linear regression of y on x.
pub fn r_squared(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    // relative thresholds: rounding leaves tiny variances in "equal" data
    let scale_x = xs.iter().map(|x| x * x).sum::<f64>().max(1e-300);
    if sxx <= 1e-20 * scale_x || syy <= 0.0 {
        return 0.0;
    }
    (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::path::Path;

    fn sys(rows: Vec<Vec<f64>>) -> NamingSystem {
        NamingSystem::from_rows(rows).unwrap()
    }

    fn toy_chips(n: usize) -> ChipTable {
        let text: String = (1..=n)
            .map(|i| format!("{i}\tB{i}\t{}\t{}\t{}\n", 10.0 * i as f64, 3.0 * i as f64, -2.0 * i as f64))
            .collect();
        ChipTable::parse(&text, Path::new("toy")).unwrap()
    }

    #[test]
    fn complexity_examples() {
        let constant = sys(vec![vec![1.0, 0.0]; 4]);
        assert_eq!(estimate_complexity(&constant), 0.0);
        let bij = NamingSystem::from_labels(&[0, 1, 2, 3], 4).unwrap();
        assert!((estimate_complexity(&bij) - 2.0).abs() < 1e-12);
        assert_eq!(complexity_standard_error(&bij, 1000), 0.0);
    }

    #[test]
    fn gnid_examples() {
        let q = NamingSystem::from_labels(&[0, 0, 1, 1], 2).unwrap();
        let p = vec![0.25; 4];
        assert!(gnid(&q, &q, &p).unwrap().abs() < 1e-12);
        let swapped = NamingSystem::from_labels(&[1, 1, 0, 0], 2).unwrap();
        assert!(gnid(&q, &swapped, &p).unwrap().abs() < 1e-12);
        let c = sys(vec![vec![1.0]; 4]);
        assert!(matches!(gnid(&c, &c, &p), Err(Error::Undefined(_))));
        // one constant, one informative: no shared information
        assert!((gnid(&q, &c, &p).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn best_match_prefers_identity_and_earliest() {
        let lang = NamingSystem::from_labels(&[0, 0, 1, 1], 2).unwrap();
        let other = NamingSystem::from_labels(&[0, 1, 1, 1], 2).unwrap();
        let agents = vec![
            AgentSystem { run: "r".into(), epoch: 9, system: other },
            AgentSystem { run: "r".into(), epoch: 7, system: lang.clone() },
            AgentSystem { run: "r".into(), epoch: 3, system: lang.clone() },
        ];
        let m = best_match("L1", &lang, &agents).unwrap();
        assert_eq!(m.best_epoch, 3);
        assert!(m.gnid.abs() < 1e-12);
        assert!(best_match("L1", &lang, &[]).is_err());
        let csv = match_table_csv(&[m]);
        assert!(csv.starts_with("language_id,best_agent_run,best_epoch,gnid\nL1,r,3,"));
    }

    #[test]
    fn mode_map_examples() {
        let chips = toy_chips(4);
        let single = sys(vec![vec![1.0]; 4]);
        let mm = mode_map(&single, &chips).unwrap();
        let global = [25.0, 7.5, -5.0];
        assert_eq!(mm.legend.len(), 1);
        for (_, lab) in mm.cells.iter().flatten() {
            for d in 0..3 {
                assert!((lab[d] - global[d]).abs() < 1e-12);
            }
        }
        let split = NamingSystem::from_labels(&[0, 0, 1, 1], 2).unwrap();
        let mm = mode_map(&split, &chips).unwrap();
        assert_eq!(mm.legend[&0], [15.0, 4.5, -3.0]);
        assert_eq!(mm.legend[&1], [35.0, 10.5, -7.0]);
        let svg = mm.to_svg(true);
        assert_eq!(svg.matches(r#"class="cell""#).count(), 4);
        assert!(svg.contains("stroke-dasharray"));
        assert_eq!(mm.to_csv().lines().count(), 5);
    }

    #[test]
    fn lab_hex_anchors() {
        assert_eq!(lab_to_hex([100.0, 0.0, 0.0]), "#ffffff");
        assert_eq!(lab_to_hex([0.0, 0.0, 0.0]), "#000000");
    }

    #[test]
    fn pca_examples() {
        let pts = vec![vec![0.0, 0.0], vec![3.0, 1.0], vec![-1.0, 2.0], vec![0.5, -4.0]];
        let proj = pca2(&pts).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let a = dist(&pts[i], &pts[j]);
                let b = dist(&proj[i], &proj[j]);
                assert!((a - b).abs() < 1e-9);
            }
        }
        let line: Vec<Vec<f64>> = (0..5).map(|t| vec![t as f64, 2.0 * t as f64, -t as f64]).collect();
        for p in pca2(&line).unwrap() {
            assert!(p[1].abs() < 1e-9);
        }
        assert!(matches!(pca2(&[vec![1.0, 1.0], vec![1.0, 1.0]]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn correlation_examples() {
        let chips = toy_chips(6);
        let q = NamingSystem::from_labels(&[0, 0, 1, 1, 2, 2], 3).unwrap();
        let cents = modal_centroids(&q, &chips).unwrap();
        let emb: Vec<Vec<f64>> = (0..3).map(|s| cents[&s].to_vec()).collect();
        assert!((comm_color_correlation(&q, &chips, &emb).unwrap() - 1.0).abs() < 1e-12);
        let basis: Vec<Vec<f64>> = (0..3)
            .map(|s| (0..3).map(|j| f64::from(u8::from(j == s))).collect())
            .collect();
        assert_eq!(comm_color_correlation(&q, &chips, &basis).unwrap(), 0.0);
        let two = NamingSystem::from_labels(&[0, 0, 0, 1, 1, 1], 2).unwrap();
        assert!(matches!(
            comm_color_correlation(&two, &chips, &emb),
            Err(Error::Degenerate(_))
        ));
    }

    fn stochastic(n: usize, k: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
        prop::collection::vec(prop::collection::vec(0.01f64..1.0, k), n).prop_map(|rows| {
            rows.into_iter()
                .map(|r| {
                    let s: f64 = r.iter().sum();
                    r.into_iter().map(|v| v / s).collect()
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn complexity_relabel_invariant_and_bounded(rows in stochastic(5, 3), perm in Just([2usize, 0, 1])) {
            let a = sys(rows.clone());
            let permuted: Vec<Vec<f64>> = rows.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
            let b = sys(permuted);
            let (ia, ib) = (estimate_complexity(&a), estimate_complexity(&b));
            prop_assert!((ia - ib).abs() < 1e-12);
            prop_assert!(ia <= 3f64.log2() + 1e-12);
        }

        #[test]
        fn gnid_symmetric(r1 in stochastic(4, 3), r2 in stochastic(4, 2)) {
            let (a, b) = (sys(r1), sys(r2));
            let p = vec![0.25; 4];
            let ab = gnid(&a, &b, &p).unwrap();
            let ba = gnid(&b, &a, &p).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
        }

        #[test]
        fn pca_rotation_invariant(pts in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 3), 4..8), angle in 0.0f64..std::f64::consts::TAU) {
            let Ok(p1) = pca2(&pts) else { return Ok(()); };
            let (c, s) = (angle.cos(), angle.sin());
            let rotated: Vec<Vec<f64>> = pts.iter().map(|v| vec![c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]]).collect();
            let p2 = pca2(&rotated).unwrap();
            for i in 0..pts.len() {
                for j in 0..pts.len() {
                    prop_assert!((dist(&p1[i], &p1[j]) - dist(&p2[i], &p2[j])).abs() < 1e-9);
                }
            }
        }

        #[test]
        fn correlation_scale_invariant(emb in prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 3), a in 0.1f64..10.0) {
            let chips = toy_chips(6);
            let q = NamingSystem::from_labels(&[0, 0, 1, 1, 2, 2], 3).unwrap();
            let scaled: Vec<Vec<f64>> = emb.iter().map(|v| v.iter().map(|x| a * x).collect()).collect();
            let r1 = comm_color_correlation(&q, &chips, &emb).unwrap();
            let r2 = comm_color_correlation(&q, &chips, &scaled).unwrap();
            prop_assert!((r1 - r2).abs() < 1e-9);
        }
    }
}
