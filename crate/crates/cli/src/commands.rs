use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use ibsignal_core::agents::{ChannelSpec, Checkpoint, SpeakerKind};
use ibsignal_core::ib::{self, FrontierOptions, IbOptions};
use ibsignal_core::metrics::{self, AgentSystem, MatchResult};
use ibsignal_core::training::{EPOCH_CSV_HEADER, IB_POINTS_CSV_HEADER};
use ibsignal_core::wcs::{self, synth, ChipTable, NamingSystem, WCS_CHIP_COUNT};
use ibsignal_core::{RandomSource, TrainConfig, Trainer};
use serde::{Deserialize, Serialize};

use crate::chart::{Chart, Series, Style};
use crate::manifest::{
    checkpoint_file, default_artifacts, hash_file, sha256_hex, RunManifest, CHECKPOINT_DIR,
    EPOCHS_FILE, IB_POINTS_FILE, NAMING_FILE,
};
use crate::{
    CompareArgs, FrontierArgs, IngestArgs, PlotArgs, SpeakerArg, SynthArgs, TrainArgs,
    UsageError, DATA_DIR_ENV,
};

pub const CHIP_FILE_NAMES: [&str; 2] = ["chips.tsv", "cnum-vhcm-lab-new.txt"];
const TERM_FILE_NAMES: [&str; 1] = ["term.txt"];
pub const LANGUAGE_DIR: &str = "languages";

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// An explicit path must exist; otherwise the first default name found in
/// `$IBSIGNAL_DATA_DIR` is used.
pub fn resolve_input(flag: Option<&Path>, names: &[&str], what: &str) -> Result<PathBuf> {
    if let Some(p) = flag {
        if !p.exists() {
            return Err(usage(format!("{}: file not found", p.display())));
        }
        return Ok(p.to_path_buf());
    }
    let Some(dir) = std::env::var_os(DATA_DIR_ENV) else {
        return Err(usage(format!("no {what} given and {DATA_DIR_ENV} is not set")));
    };
    let dir = PathBuf::from(dir);
    names
        .iter()
        .map(|n| dir.join(n))
        .find(|p| p.exists())
        .ok_or_else(|| usage(format!("no {what} ({}) in {}: file not found", names.join(" or "), dir.display())))
}

fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

fn write_file(path: &Path, contents: impl AsRef<[u8]>) -> Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IngestSummary {
    pub chips: usize,
    pub languages: usize,
    pub full_wcs_grid: bool,
    pub chip_source: PathBuf,
    pub term_source: PathBuf,
    pub out: PathBuf,
}

impl IngestSummary {
    pub fn line(&self) -> String {
        format!(
            "ingested {} chips{}, {} languages -> {}",
            self.chips,
            if self.full_wcs_grid { " (full WCS grid)" } else { "" },
            self.languages,
            self.out.display()
        )
    }
}

pub fn language_file(id: u32) -> String {
    format!("lang_{id:03}.csv")
}

pub fn cmd_ingest(args: &IngestArgs) -> Result<IngestSummary> {
    let chip_path = resolve_input(args.chips.as_deref(), &CHIP_FILE_NAMES, "chip table")?;
    let term_path = resolve_input(args.terms.as_deref(), &TERM_FILE_NAMES, "term file")?;
    let chips = ChipTable::load(&chip_path)?;
    let languages = wcs::load_all_languages(&term_path, &chips)?;
    if languages.is_empty() {
        return Err(usage(format!("{}: no naming data", term_path.display())));
    }

    create_dir(&args.out.join(LANGUAGE_DIR))?;
    write_file(&args.out.join("chips.csv"), chips.to_csv())?;
    write_file(&args.out.join("chips.tsv"), chips.to_tsv())?;
    for (id, system) in &languages {
        write_file(&args.out.join(LANGUAGE_DIR).join(language_file(*id)), system.to_csv())?;
    }
    let summary = IngestSummary {
        chips: chips.len(),
        languages: languages.len(),
        full_wcs_grid: chips.len() == WCS_CHIP_COUNT && chips.validate_full_grid().is_ok(),
        chip_source: chip_path,
        term_source: term_path,
        out: args.out.clone(),
    };
    write_file(
        &args.out.join("summary.json"),
        serde_json::to_string_pretty(&summary)? + "\n",
    )?;
    Ok(summary)
}

/// Applies CLI overrides to a config, recording each one.
pub fn apply_overrides(
    mut config: TrainConfig,
    args: &TrainArgs,
) -> (TrainConfig, BTreeMap<String, String>) {
    let mut seen = BTreeMap::new();
    let mut note = |flag: &str, value: String| {
        seen.insert(flag.to_string(), value);
    };
    if let Some(v) = args.seed {
        config.seed = v;
        note("--seed", v.to_string());
    }
    if let Some(v) = args.lambda_u {
        config.lambda_u = v;
        note("--lambda-u", v.to_string());
    }
    if let Some(v) = args.lambda_i {
        config.lambda_i = v;
        note("--lambda-i", v.to_string());
    }
    if let Some(v) = args.lambda_c_initial {
        config.lambda_c_initial = v;
        note("--lambda-c-initial", v.to_string());
    }
    if let Some(v) = args.lambda_c_final {
        config.lambda_c_final = v;
        note("--lambda-c-final", v.to_string());
    }
    if let Some(v) = args.epochs {
        config.epochs = v;
        note("--epochs", v.to_string());
    }
    if let Some(kind) = args.speaker {
        let size = match config.channel {
            ChannelSpec::Vqvib { codebook_size, .. } => codebook_size,
            ChannelSpec::Onehot { vocab } => vocab,
        };
        config.channel = match (kind, &config.channel) {
            (SpeakerArg::Vqvib, ChannelSpec::Vqvib { .. }) => config.channel.clone(),
            (SpeakerArg::Vqvib, _) => ChannelSpec::Vqvib {
                codebook_size: size,
                dim: 2,
            },
            (SpeakerArg::Onehot, _) => ChannelSpec::Onehot { vocab: size },
        };
        note(
            "--speaker",
            match kind {
                SpeakerArg::Vqvib => "vqvib",
                SpeakerArg::Onehot => "onehot",
            }
            .to_string(),
        );
    }
    (config, seen)
}

pub fn cmd_train(args: &TrainArgs) -> Result<Vec<PathBuf>> {
    let base = match &args.config {
        Some(p) => {
            if !p.exists() {
                return Err(usage(format!("{}: file not found", p.display())));
            }
            TrainConfig::load(p)?
        }
        None => TrainConfig::default(),
    };
    let (config, overrides) = apply_overrides(base, args);
    config.validate()?;
    if args.parallel_seeds == 0 {
        return Err(usage("--parallel-seeds must be ≥ 1"));
    }
    let chip_path = resolve_input(args.chips.as_deref(), &CHIP_FILE_NAMES, "chip table")?;
    let chips = ChipTable::load(&chip_path)?;
    let chip_input = hash_file(&chip_path)?;
    create_dir(&args.out)?;

    let configs: Vec<TrainConfig> = (0..args.parallel_seeds as u64)
        .map(|i| TrainConfig {
            seed: config.seed + i,
            ..config.clone()
        })
        .collect();
    // run ids are claimed up front so concurrent runs never collide
    let mut dirs = Vec::new();
    for cfg in &configs {
        let manifest = new_manifest(cfg, &overrides, &chip_input, &args.out, &dirs)?;
        let dir = args.out.join(&manifest.run_id);
        create_dir(&dir)?;
        manifest.save(&dir)?;
        dirs.push(dir);
    }

    let chips = &chips;
    if configs.len() == 1 {
        train_run(&configs[0], chips, &dirs[0])?;
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = configs
                .iter()
                .zip(&dirs)
                .map(|(cfg, dir)| s.spawn(move || train_run(cfg, chips, dir)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("training thread panicked"))
                .collect::<Result<Vec<()>>>()
        })?;
    }
    Ok(dirs)
}

fn new_manifest(
    config: &TrainConfig,
    overrides: &BTreeMap<String, String>,
    chips: &crate::manifest::InputFile,
    out: &Path,
    claimed: &[PathBuf],
) -> Result<RunManifest> {
    let config_hash = sha256_hex(format!("{}\n{}", config.to_toml(), chips.sha256).as_bytes());
    let stem = format!("{}-seed{}-{}", config.channel.name(), config.seed, &config_hash[..8]);
    let mut run_id = stem.clone();
    let mut n = 1;
    while out.join(&run_id).exists() || claimed.contains(&out.join(&run_id)) {
        n += 1;
        run_id = format!("{stem}-{n}");
    }
    Ok(RunManifest {
        run_id,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: config.seed,
        config: config.clone(),
        config_hash,
        overrides: overrides.clone(),
        inputs: vec![chips.clone()],
        artifacts: default_artifacts(),
    })
}

/// Trains one run into an existing run directory holding its manifest.
pub fn train_run(config: &TrainConfig, chips: &ChipTable, dir: &Path) -> Result<()> {
    let manifest = RunManifest::load(dir)?;
    let ck_dir = dir.join(CHECKPOINT_DIR);
    create_dir(&ck_dir)?;
    let open = |name: &str, header: &str| -> Result<BufWriter<fs::File>> {
        let path = dir.join(name);
        let mut w = BufWriter::new(
            fs::File::create(&path).with_context(|| format!("creating {}", path.display()))?,
        );
        writeln!(w, "{header}")?;
        Ok(w)
    };
    let mut epochs = open(EPOCHS_FILE, EPOCH_CSV_HEADER)?;
    let mut points = open(IB_POINTS_FILE, IB_POINTS_CSV_HEADER)?;

    let mut trainer = Trainer::new(config.clone(), chips)?;
    for _ in 0..config.epochs {
        let rec = trainer
            .run_epoch()
            .with_context(|| format!("run {} diverged", manifest.run_id))?;
        writeln!(epochs, "{}", rec.csv_row())?;
        writeln!(points, "{}", rec.ib_row())?;
        epochs.flush()?;
        points.flush()?;
        let every = config.checkpoint_every;
        if (every > 0 && rec.epoch % every == 0) || rec.epoch == config.epochs {
            let ck = trainer.checkpoint(&manifest.config_hash);
            ck.save(ck_dir.join(checkpoint_file(rec.epoch)))?;
        }
    }
    // same estimate compare uses for the final checkpoint
    let naming = trainer.agents().speaker.naming_system(
        chips,
        config.eval_samples,
        &mut naming_rng(manifest.seed, trainer.epoch()),
    )?;
    write_file(&dir.join(NAMING_FILE), naming.to_csv())?;
    Ok(())
}

pub fn cmd_frontier(args: &FrontierArgs) -> Result<PathBuf> {
    let chip_path = resolve_input(args.chips.as_deref(), &CHIP_FILE_NAMES, "chip table")?;
    let chips = ChipTable::load(&chip_path)?;
    let meanings = ib::build_meanings(&chips, args.sigma)?;
    let prior = vec![1.0 / chips.len() as f64; chips.len()];
    let sols = ib::compute_frontier(
        &prior,
        &meanings,
        &ib::default_beta_schedule(),
        FrontierOptions {
            clusters: args.clusters,
            iterate: IbOptions::default(),
            noise: ib::WARM_START_NOISE,
            seed: args.seed,
        },
    )?;
    let points: Vec<_> = sols.iter().map(|s| s.point()).collect();
    let stalled = points.iter().filter(|p| !p.converged).count();
    if stalled > 0 {
        eprintln!("warning: {stalled} β values hit the iteration cap (flagged in the CSV)");
    }
    create_dir(&args.out)?;
    let csv = args.out.join("frontier.csv");
    write_file(&csv, ib::frontier_csv(&points))?;
    let chart = Chart {
        title: format!("IB bound (σ = {})", args.sigma),
        x_label: "complexity (bits)".into(),
        y_label: "informativeness (bits)".into(),
        series: vec![Series {
            label: "IB bound".into(),
            style: Style::Line,
            points: points
                .iter()
                .map(|p| (p.complexity_bits, p.informativeness_bits))
                .collect(),
        }],
    };
    write_file(&args.out.join("frontier.svg"), chart.to_svg())?;
    Ok(csv)
}

/// Checkpoints of a run directory, sorted by epoch.
pub fn load_checkpoints(run_dir: &Path) -> Result<(RunManifest, Vec<Checkpoint>)> {
    if !run_dir.join(crate::manifest::MANIFEST_FILE).exists() {
        return Err(usage(format!("{}: not a run directory (no manifest)", run_dir.display())));
    }
    let manifest = RunManifest::load(run_dir)?;
    let ck_dir = run_dir.join(CHECKPOINT_DIR);
    let mut files: Vec<PathBuf> = match fs::read_dir(&ck_dir) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect(),
        Err(_) => Vec::new(),
    };
    if files.is_empty() {
        return Err(usage(format!("{}: run has no checkpoints", run_dir.display())));
    }
    files.sort();
    let mut cks = files
        .iter()
        .map(|p| Checkpoint::load(p).map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    cks.sort_by_key(|c| c.epoch);
    Ok((manifest, cks))
}

/// Naming system of one checkpoint, estimated with a stream fixed by the
/// run seed and epoch.
pub fn checkpoint_naming(
    manifest: &RunManifest,
    ck: &Checkpoint,
    chips: &ChipTable,
) -> Result<NamingSystem> {
    let agents = ck.restore()?;
    Ok(agents.speaker.naming_system(
        chips,
        manifest.config.eval_samples,
        &mut naming_rng(manifest.seed, ck.epoch),
    )?)
}

fn naming_rng(seed: u64, epoch: usize) -> RandomSource {
    RandomSource::new(seed).split(0x00c0_ffee + epoch as u64)
}

/// Signal embeddings for the distance regression: codebook vectors, or
/// basis vectors for one-hot channels.
pub fn signal_embeddings(kind: &SpeakerKind) -> Vec<Vec<f64>> {
    (0..kind.n_signals()).map(|i| kind.embedding(i)).collect()
}

/// Every checkpoint of a run as an agent system.
pub fn load_agent_systems(run_dir: &Path, chips: &ChipTable) -> Result<Vec<AgentSystem>> {
    let (manifest, cks) = load_checkpoints(run_dir)?;
    cks.iter()
        .map(|ck| {
            Ok(AgentSystem {
                run: manifest.run_id.clone(),
                epoch: ck.epoch,
                system: checkpoint_naming(&manifest, ck, chips)?,
            })
        })
        .collect()
}

/// Per-language naming CSVs (`lang_<id>.csv`) in id order.
pub fn load_languages(dir: &Path) -> Result<Vec<(String, NamingSystem)>> {
    let rd = fs::read_dir(dir).map_err(|_| usage(format!("{}: languages directory not found", dir.display())))?;
    let mut files: Vec<(String, PathBuf)> = rd
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter_map(|p| {
            let name = p.file_name()?.to_str()?;
            let id = name.strip_prefix("lang_")?.strip_suffix(".csv")?.to_string();
            Some((id, p))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(usage(format!("{}: no lang_*.csv files", dir.display())));
    }
    files
        .into_iter()
        .map(|(id, p)| Ok((id, NamingSystem::load_csv(&p)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunR2 {
    pub run_id: String,
    pub channel: String,
    pub epoch: usize,
    pub r2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub languages: usize,
    pub agent_systems: usize,
    pub median_gnid: f64,
    pub matches: Vec<MatchResult>,
    pub r2: Vec<RunR2>,
    pub out: PathBuf,
}

impl CompareSummary {
    pub fn line(&self) -> String {
        format!(
            "matched {} languages against {} agent systems; median gNID {:.4} -> {}",
            self.languages,
            self.agent_systems,
            self.median_gnid,
            self.out.display()
        )
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

pub fn cmd_compare(args: &CompareArgs) -> Result<CompareSummary> {
    let first = args.runs.first().ok_or_else(|| usage("no --run given"))?;
    let (first_manifest, _) = load_checkpoints(first)?;
    let chip_path = match &args.chips {
        Some(p) => resolve_input(Some(p), &[], "chip table")?,
        None => first_manifest
            .chips_path()
            .map(Path::to_path_buf)
            .ok_or_else(|| usage("manifest records no chip table; pass --chips"))?,
    };
    let chips = ChipTable::load(&chip_path)?;
    let lang_dir = match &args.languages {
        Some(d) => d.clone(),
        None => std::env::var_os(DATA_DIR_ENV)
            .map(|d| PathBuf::from(d).join(LANGUAGE_DIR))
            .ok_or_else(|| usage(format!("no --languages given and {DATA_DIR_ENV} is not set")))?,
    };
    let languages = load_languages(&lang_dir)?;

    let mut agents = Vec::new();
    let mut r2 = Vec::new();
    for run in &args.runs {
        let (manifest, cks) = load_checkpoints(run)?;
        for ck in &cks {
            agents.push(AgentSystem {
                run: manifest.run_id.clone(),
                epoch: ck.epoch,
                system: checkpoint_naming(&manifest, ck, &chips)?,
            });
        }
        let last = cks.last().expect("non-empty");
        let kind = last.restore()?.speaker.kind;
        let system = &agents.last().expect("non-empty").system;
        r2.push(RunR2 {
            run_id: manifest.run_id.clone(),
            channel: kind.name().to_string(),
            epoch: last.epoch,
            r2: metrics::comm_color_correlation(system, &chips, &signal_embeddings(&kind)).ok(),
        });
    }

    create_dir(&args.out.join("modemaps"))?;
    let mut matches = Vec::with_capacity(languages.len());
    for (id, lang) in &languages {
        if lang.n_chips() != chips.len() {
            bail!(UsageError(format!(
                "language {id} covers {} chips, chip table has {}",
                lang.n_chips(),
                chips.len()
            )));
        }
        let m = metrics::best_match(id, lang, &agents)?;
        let agent = agents
            .iter()
            .find(|a| a.run == m.best_agent_run && a.epoch == m.best_epoch)
            .expect("match comes from the set");
        let svg = metrics::paired_mode_map_svg(
            &metrics::mode_map(&agent.system, &chips)?,
            &metrics::mode_map(lang, &chips)?,
        );
        write_file(&args.out.join("modemaps").join(format!("lang_{id}.svg")), svg)?;
        matches.push(m);
    }
    write_file(&args.out.join("matches.csv"), metrics::match_table_csv(&matches))?;

    let mut r2_csv = String::from("run_id,channel,epoch,r2\n");
    for r in &r2 {
        let v = r.r2.map_or_else(|| "NA".to_string(), |v| v.to_string());
        r2_csv.push_str(&format!("{},{},{},{}\n", r.run_id, r.channel, r.epoch, v));
    }
    write_file(&args.out.join("r2.csv"), r2_csv)?;
    let mut summary_csv = String::from("channel,runs,mean_r2,sd_r2\n");
    let mut by_channel: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    for r in &r2 {
        if let Some(v) = r.r2 {
            by_channel.entry(&r.channel).or_default().push(v);
        }
    }
    for (ch, vals) in &by_channel {
        let (mean, sd) = mean_sd(vals);
        summary_csv.push_str(&format!("{ch},{},{mean},{sd}\n", vals.len()));
    }
    write_file(&args.out.join("r2_summary.csv"), summary_csv)?;

    let mut g: Vec<f64> = matches.iter().map(|m| m.gnid).collect();
    Ok(CompareSummary {
        languages: matches.len(),
        agent_systems: agents.len(),
        median_gnid: median(&mut g),
        matches,
        r2,
        out: args.out.clone(),
    })
}

/// Sample mean and standard deviation (n − 1 denominator; 0 for n = 1).
pub fn mean_sd(vals: &[f64]) -> (f64, f64) {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    if vals.len() < 2 {
        return (mean, 0.0);
    }
    let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

struct SeriesSpec {
    path: PathBuf,
    x: String,
    y: String,
}

fn parse_series_spec(spec: &str) -> Result<SeriesSpec> {
    let mut parts = spec.rsplitn(3, ':');
    let (y, x, path) = (parts.next(), parts.next(), parts.next());
    match (path, x, y) {
        (Some(p), Some(x), Some(y)) if !p.is_empty() && !x.is_empty() && !y.is_empty() => {
            Ok(SeriesSpec {
                path: PathBuf::from(p),
                x: x.to_string(),
                y: y.to_string(),
            })
        }
        _ => Err(usage(format!("series {spec:?}: expected PATH:XCOL:YCOL"))),
    }
}

/// Reads two named numeric columns; an empty file yields no points.
pub fn read_columns(path: &Path, x: &str, y: &str) -> Result<Vec<(f64, f64)>> {
    let text = fs::read_to_string(path)
        .map_err(|_| usage(format!("{}: file not found", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let Some(header) = lines.next() else {
        return Ok(Vec::new());
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let find = |name: &str| {
        cols.iter().position(|c| *c == name).ok_or_else(|| {
            usage(format!(
                "{}: unknown column {name:?} (have {})",
                path.display(),
                cols.join(", ")
            ))
        })
    };
    let (xi, yi) = (find(x)?, find(y)?);
    lines
        .enumerate()
        .map(|(i, line)| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            let num = |j: usize| -> Result<f64> {
                f.get(j).and_then(|s| s.parse().ok()).ok_or_else(|| {
                    usage(format!("{}:{}: non-numeric value", path.display(), i + 2))
                })
            };
            Ok((num(xi)?, num(yi)?))
        })
        .collect()
}

pub fn cmd_plot(args: &PlotArgs) -> Result<PathBuf> {
    let mut series = Vec::new();
    let mut first_cols = None;
    for (specs, style) in [(&args.lines, Style::Line), (&args.points, Style::Points)] {
        for spec in specs {
            let s = parse_series_spec(spec)?;
            let points = read_columns(&s.path, &s.x, &s.y)?;
            first_cols.get_or_insert((s.x.clone(), s.y.clone()));
            let stem = s
                .path
                .file_stem()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            let parent = s
                .path
                .parent()
                .and_then(Path::file_name)
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned());
            let label = if parent.is_empty() { stem } else { format!("{parent}/{stem}") };
            series.push(Series {
                label,
                style,
                points,
            });
        }
    }
    let (fx, fy) = first_cols.unwrap_or_default();
    let chart = Chart {
        title: args.title.clone(),
        x_label: args.x_label.clone().unwrap_or(fx),
        y_label: args.y_label.clone().unwrap_or(fy),
        series,
    };
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_file(&args.out, chart.to_svg())?;
    Ok(args.out.clone())
}

pub fn cmd_synth(args: &SynthArgs) -> Result<PathBuf> {
    let chip_path = resolve_input(args.chips.as_deref(), &CHIP_FILE_NAMES, "chip table")?;
    let chips = ChipTable::load(&chip_path)?;
    let spec = synth::SynthSpec {
        languages: args.languages,
        seed: args.seed,
        ..synth::SynthSpec::default()
    };
    let records = synth::synthesize_terms(&chips, &spec);
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_file(&args.out, synth::terms_to_tsv(&records))?;
    Ok(args.out.clone())
}
