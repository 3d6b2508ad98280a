//! Command-line orchestration: `score`, `rank`, `sample`, `eval`, `hist`.
//!
//! Every command writes its outputs plus a `manifest.json` (command line,
//! config snapshot, SHA-256 digests of inputs, tool version, per-stage
//! timings) into `--out-dir`. Outputs are deterministic for identical
//! inputs and flags; manifests differ only in the timing fields.
//!
//! Exit codes: 0 on success with all outputs written and validated, 2 for
//! unreadable or malformed inputs (and usage errors), 3 for well-formed
//! inputs that fail validation (mismatched counts, missing score files for
//! a strategy, non-finite values, and similar).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{self, DatasetError, VectorDataset};
use crate::eval::{self, EvalError, SvmConfig};
use crate::gini::{self, GiniError, GiniScoreSet, GiniWarning, RankDirection, RankQuery};
use crate::numfmt;
use crate::sampling::{self, SampleError, SelectionConfig, Strategy};
use crate::similarity::DEFAULT_BAND_ROWS;

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

/// A command failure carrying the process exit code.
#[derive(Debug)]
pub struct CliFailure {
    pub code: i32,
    pub message: String,
}

impl CliFailure {
    fn parse(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_PARSE,
            message: message.into(),
        }
    }

    fn validation(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<DatasetError> for CliFailure {
    fn from(e: DatasetError) -> Self {
        let code = match e {
            DatasetError::CountMismatch { .. }
            | DatasetError::NonFiniteValue { .. }
            | DatasetError::DuplicateId(_)
            | DatasetError::WrongKind { .. } => EXIT_VALIDATION,
            _ => EXIT_PARSE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<GiniError> for CliFailure {
    fn from(e: GiniError) -> Self {
        let code = match e {
            GiniError::BadScoreFile(_) | GiniError::Csv(_) | GiniError::Io(_) => EXIT_PARSE,
            _ => EXIT_VALIDATION,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<SampleError> for CliFailure {
    fn from(e: SampleError) -> Self {
        match e {
            SampleError::Gini(inner) => inner.into(),
            SampleError::Json(_) | SampleError::Io(_) => CliFailure::parse(e.to_string()),
            _ => CliFailure::validation(e.to_string()),
        }
    }
}

impl From<EvalError> for CliFailure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Sample(inner) => inner.into(),
            EvalError::Gini(inner) => inner.into(),
            EvalError::Csv(_) | EvalError::BadCurveFile(_) | EvalError::Io(_) => {
                CliFailure::parse(e.to_string())
            }
            _ => CliFailure::validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliFailure {
    fn from(e: std::io::Error) -> Self {
        CliFailure::parse(e.to_string())
    }
}

/// Gini-coefficient similarity scoring and subset-selection toolkit.
#[derive(Debug, Parser)]
#[command(name = "ginisim", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Directory for output files (created if absent).
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Worker thread count (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Rows per dissimilarity band; caps peak memory at band * n reals.
    #[arg(long, global = true, default_value_t = DEFAULT_BAND_ROWS)]
    pub band_rows: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute per-item Gini scores and write scores.csv.
    Score(ScoreArgs),
    /// Rank top/bottom items per class from a scores.csv.
    Rank(RankArgs),
    /// Select training items per class and write plan.json.
    Sample(SampleArgs),
    /// Sweep selection strategies across subset sizes and write curve.csv.
    Eval(EvalArgs),
    /// Export binned histograms of selected-versus-test score distributions.
    Hist(HistArgs),
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// IDX image file (gzip accepted), paired with --labels.
    #[arg(long, requires = "labels", conflicts_with = "csv")]
    pub images: Option<PathBuf>,

    /// IDX label file (gzip accepted), paired with --images.
    #[arg(long, requires = "images", conflicts_with = "csv")]
    pub labels: Option<PathBuf>,

    /// CSV embedding file with header id,label,x0,...,x{d-1}.
    #[arg(long, required_unless_present = "images")]
    pub csv: Option<PathBuf>,

    /// MinMax-normalize within each class; false normalizes across the set.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub per_class: bool,

    /// Output file name within --out-dir.
    #[arg(long, default_value = "scores.csv")]
    pub out: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Direction {
    Highest,
    Lowest,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// scores.csv produced by `score`.
    #[arg(long)]
    pub scores: PathBuf,

    /// Items per class.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub k: u64,

    #[arg(long, value_enum)]
    pub direction: Direction,

    /// Restrict to one class (default: every class).
    #[arg(long)]
    pub class: Option<String>,

    /// Output file name within --out-dir.
    #[arg(long, default_value = "rank.csv")]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// scores.csv for the pool being sampled.
    #[arg(long)]
    pub train_scores: PathBuf,

    /// scores.csv holding the target distribution (kde_match/emd_match).
    #[arg(long)]
    pub test_scores: Option<PathBuf>,

    #[arg(long)]
    pub strategy: Strategy,

    /// Items per class.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: u64,

    /// Selection seed; required for random, kde_match, and emd_match.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Candidate subsets per class for the matching strategies.
    #[arg(long, default_value_t = sampling::DEFAULT_ITERATIONS, value_parser = clap::value_parser!(u64).range(1..))]
    pub iterations: u64,

    /// Output file name within --out-dir.
    #[arg(long, default_value = "plan.json")]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Training IDX image file, paired with --train-labels.
    #[arg(long, requires = "train_labels", conflicts_with = "train_csv")]
    pub train_images: Option<PathBuf>,
    #[arg(long, requires = "train_images", conflicts_with = "train_csv")]
    pub train_labels: Option<PathBuf>,
    /// Training CSV embedding file.
    #[arg(long, required_unless_present = "train_images")]
    pub train_csv: Option<PathBuf>,

    /// Test IDX image file, paired with --test-labels.
    #[arg(long, requires = "test_labels", conflicts_with = "test_csv")]
    pub test_images: Option<PathBuf>,
    #[arg(long, requires = "test_images", conflicts_with = "test_csv")]
    pub test_labels: Option<PathBuf>,
    /// Test CSV embedding file.
    #[arg(long, required_unless_present = "test_images")]
    pub test_csv: Option<PathBuf>,

    /// Reuse a precomputed training scores.csv instead of scoring in-process.
    #[arg(long)]
    pub train_scores: Option<PathBuf>,
    /// Reuse a precomputed test scores.csv instead of scoring in-process.
    #[arg(long)]
    pub test_scores: Option<PathBuf>,

    /// Comma-separated strategies to sweep.
    #[arg(long, value_delimiter = ',', required = true)]
    pub strategies: Vec<Strategy>,

    /// Comma-separated samples-per-class grid, strictly ascending.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sizes: Vec<usize>,

    /// Comma-separated selection seeds (random averages over all of them).
    #[arg(long, value_delimiter = ',', default_values_t = [1u64, 2, 3])]
    pub seeds: Vec<u64>,

    /// Candidate subsets per class for the matching strategies.
    #[arg(long, default_value_t = sampling::DEFAULT_ITERATIONS, value_parser = clap::value_parser!(u64).range(1..))]
    pub iterations: u64,

    #[arg(long, default_value_t = 1e-4)]
    pub svm_lambda: f64,

    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u64).range(1..))]
    pub svm_epochs: u64,

    #[arg(long, default_value_t = 0)]
    pub svm_seed: u64,

    /// Append a constant-1 bias feature.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub svm_bias: bool,

    /// Output file name within --out-dir.
    #[arg(long, default_value = "curve.csv")]
    pub out: String,
}

#[derive(Debug, Args)]
pub struct HistArgs {
    /// scores.csv for the pool the plan selected from.
    #[arg(long)]
    pub train_scores: PathBuf,

    /// scores.csv for the full test set.
    #[arg(long)]
    pub test_scores: PathBuf,

    /// plan.json produced by `sample`.
    #[arg(long)]
    pub plan: PathBuf,

    /// Class tag to plot.
    #[arg(long)]
    pub class: String,

    /// Equal-width bins over [0, 1].
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub bins: u64,

    /// Output file name within --out-dir.
    #[arg(long, default_value = "hist.csv")]
    pub out: String,
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: Vec<String>,
    pub config: serde_json::Value,
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<String>,
    pub timings_ms: BTreeMap<String, u64>,
}

struct Stages {
    started: Instant,
    last: Instant,
    timings: BTreeMap<String, u64>,
}

impl Stages {
    fn new() -> Self {
        let now = Instant::now();
        Self {
            started: now,
            last: now,
            timings: BTreeMap::new(),
        }
    }

    fn mark(&mut self, label: &str) {
        let now = Instant::now();
        self.timings
            .insert(label.to_string(), (now - self.last).as_millis() as u64);
        self.last = now;
    }

    fn finish(mut self) -> BTreeMap<String, u64> {
        self.timings.insert(
            "total".to_string(),
            self.started.elapsed().as_millis() as u64,
        );
        self.timings
    }
}

fn sha256_hex(path: &Path) -> Result<String, CliFailure> {
    let bytes = fs::read(path)
        .map_err(|e| CliFailure::parse(format!("{}: {e}", path.display())))?;
    Ok(format!("{:x}", Sha256::digest(&bytes)))
}

fn write_manifest(
    out_dir: &Path,
    config: serde_json::Value,
    inputs: &[&Path],
    outputs: &[&str],
    stages: Stages,
) -> Result<(), CliFailure> {
    let mut digests = BTreeMap::new();
    for path in inputs {
        digests.insert(path.display().to_string(), sha256_hex(path)?);
    }
    let manifest = RunManifest {
        tool: "ginisim".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: std::env::args().collect(),
        config,
        inputs: digests,
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        timings_ms: stages.finish(),
    };
    let path = out_dir.join("manifest.json");
    let mut file = fs::File::create(&path)?;
    serde_json::to_writer_pretty(&mut file, &manifest)
        .map_err(|e| CliFailure::parse(e.to_string()))?;
    file.write_all(b"\n")?;
    Ok(())
}

fn print_warnings(warnings: &[GiniWarning]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn load_vector_input(
    images: &Option<PathBuf>,
    labels: &Option<PathBuf>,
    csv: &Option<PathBuf>,
) -> Result<(VectorDataset, Vec<PathBuf>), CliFailure> {
    match (images, labels, csv) {
        (Some(i), Some(l), None) => {
            let ds = dataset::load_idx_pair(i, l)?;
            Ok((ds, vec![i.clone(), l.clone()]))
        }
        (None, None, Some(c)) => {
            let ds = dataset::load_csv_vectors(c)?;
            Ok((ds, vec![c.clone()]))
        }
        _ => Err(CliFailure::parse(
            "provide either --images with --labels, or --csv",
        )),
    }
}

fn read_scores(path: &Path) -> Result<GiniScoreSet, CliFailure> {
    let file = fs::File::open(path)
        .map_err(|e| CliFailure::parse(format!("{}: {e}", path.display())))?;
    Ok(gini::read_scores_csv(file)?)
}

impl Cli {
    pub fn run(&self) -> Result<(), CliFailure> {
        if let Some(threads) = self.threads {
            // Ignore the error when a global pool already exists: only
            // possible if run() is called twice in-process.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global();
        }
        fs::create_dir_all(&self.out_dir)?;
        match &self.command {
            Command::Score(args) => self.cmd_score(args),
            Command::Rank(args) => self.cmd_rank(args),
            Command::Sample(args) => self.cmd_sample(args),
            Command::Eval(args) => self.cmd_eval(args),
            Command::Hist(args) => self.cmd_hist(args),
        }
    }

    fn cmd_score(&self, args: &ScoreArgs) -> Result<(), CliFailure> {
        let mut stages = Stages::new();
        let (ds, input_paths) = load_vector_input(&args.images, &args.labels, &args.csv)?;
        stages.mark("load");

        let (scores, warnings) = gini::score_dataset(&ds, self.band_rows, args.per_class)?;
        print_warnings(&warnings);
        stages.mark("score");

        let out_path = self.out_dir.join(&args.out);
        let file = fs::File::create(&out_path)?;
        gini::write_scores_csv(file, &scores)?;
        // Validate the artifact we just wrote.
        read_scores(&out_path)?;
        stages.mark("write");

        let inputs: Vec<&Path> = input_paths.iter().map(PathBuf::as_path).collect();
        write_manifest(
            &self.out_dir,
            serde_json::json!({
                "command": "score",
                "inputs": inputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
                "per_class": args.per_class,
                "band_rows": self.band_rows,
                "out": args.out,
            }),
            &inputs,
            &[&args.out],
            stages,
        )?;
        println!(
            "wrote {} ({} items, {} classes)",
            out_path.display(),
            scores.len(),
            scores.class_indices().len()
        );
        Ok(())
    }

    fn cmd_rank(&self, args: &RankArgs) -> Result<(), CliFailure> {
        let mut stages = Stages::new();
        let scores = read_scores(&args.scores)?;
        stages.mark("load");

        let query = RankQuery {
            k: args.k as usize,
            direction: match args.direction {
                Direction::Highest => RankDirection::Highest,
                Direction::Lowest => RankDirection::Lowest,
            },
            class_tag: args.class.clone(),
        };
        let (items, warnings) = gini::rank_extremes(&scores, &query)?;
        print_warnings(&warnings);
        stages.mark("rank");

        let out_path = self.out_dir.join(&args.out);
        {
            let mut w = csv::Writer::from_writer(fs::File::create(&out_path)?);
            w.write_record(["id", "class", "gini_norm"])
                .map_err(|e| CliFailure::parse(e.to_string()))?;
            for item in &items {
                w.write_record([
                    item.id.as_str(),
                    item.class_tag.as_str(),
                    &numfmt::full(item.normalized),
                ])
                .map_err(|e| CliFailure::parse(e.to_string()))?;
            }
            w.flush()?;
        }
        stages.mark("write");

        write_manifest(
            &self.out_dir,
            serde_json::json!({
                "command": "rank",
                "scores": args.scores.display().to_string(),
                "k": args.k,
                "direction": match args.direction {
                    Direction::Highest => "highest",
                    Direction::Lowest => "lowest",
                },
                "class": args.class,
                "out": args.out,
            }),
            &[args.scores.as_path()],
            &[&args.out],
            stages,
        )?;
        println!("wrote {} ({} rows)", out_path.display(), items.len());
        Ok(())
    }

    fn cmd_sample(&self, args: &SampleArgs) -> Result<(), CliFailure> {
        let mut stages = Stages::new();

        let needs_seed = matches!(
            args.strategy,
            Strategy::Random | Strategy::KdeMatch | Strategy::EmdMatch
        );
        let seed = match (args.seed, needs_seed) {
            (Some(s), _) => s,
            (None, false) => 0,
            (None, true) => {
                return Err(CliFailure::validation(format!(
                    "strategy {} requires an explicit --seed",
                    args.strategy
                )))
            }
        };
        if args.strategy.needs_target() && args.test_scores.is_none() {
            return Err(CliFailure::validation(format!(
                "strategy {} requires --test-scores",
                args.strategy
            )));
        }

        let train_scores = read_scores(&args.train_scores)?;
        let test_scores = match &args.test_scores {
            Some(path) => Some(read_scores(path)?),
            None => None,
        };
        stages.mark("load");

        let mut cfg = SelectionConfig::new(args.strategy, args.n as usize, seed);
        cfg.iterations = args.iterations;
        let plan = sampling::select(&train_scores, test_scores.as_ref(), &cfg)?;
        stages.mark("select");

        let out_path = self.out_dir.join(&args.out);
        sampling::write_plan_json(fs::File::create(&out_path)?, &plan)?;
        sampling::read_plan_json(fs::File::open(&out_path)?)?;
        stages.mark("write");

        let mut inputs = vec![args.train_scores.as_path()];
        if let Some(ts) = &args.test_scores {
            inputs.push(ts.as_path());
        }
        write_manifest(
            &self.out_dir,
            serde_json::json!({
                "command": "sample",
                "train_scores": args.train_scores.display().to_string(),
                "test_scores": args.test_scores.as_ref().map(|p| p.display().to_string()),
                "config": serde_json::to_value(&cfg).map_err(|e| CliFailure::parse(e.to_string()))?,
                "out": args.out,
            }),
            &inputs,
            &[&args.out],
            stages,
        )?;
        let selected: usize = plan.chosen.values().map(Vec::len).sum();
        println!(
            "wrote {} ({} ids across {} classes)",
            out_path.display(),
            selected,
            plan.chosen.len()
        );
        Ok(())
    }

    fn cmd_eval(&self, args: &EvalArgs) -> Result<(), CliFailure> {
        let mut stages = Stages::new();

        let (train_ds, train_inputs) =
            load_vector_input(&args.train_images, &args.train_labels, &args.train_csv)?;
        let (test_ds, test_inputs) =
            load_vector_input(&args.test_images, &args.test_labels, &args.test_csv)?;
        stages.mark("load");

        let needs_train_scores = args.strategies.iter().any(|&s| s != Strategy::Random);
        let needs_test_scores = args.strategies.iter().any(|&s| s.needs_target());

        let train_scores = if needs_train_scores {
            Some(match &args.train_scores {
                Some(path) => read_scores(path)?,
                None => {
                    let (scores, warnings) = gini::score_dataset(&train_ds, self.band_rows, true)?;
                    print_warnings(&warnings);
                    scores
                }
            })
        } else {
            None
        };
        stages.mark("score_train");

        let test_scores = if needs_test_scores {
            Some(match &args.test_scores {
                Some(path) => read_scores(path)?,
                None => {
                    let (scores, warnings) = gini::score_dataset(&test_ds, self.band_rows, true)?;
                    print_warnings(&warnings);
                    scores
                }
            })
        } else {
            None
        };
        stages.mark("score_test");

        let svm = SvmConfig {
            lambda: args.svm_lambda,
            epochs: args.svm_epochs as usize,
            seed: args.svm_seed,
            bias: args.svm_bias,
        };
        let curve = eval::run_curve(
            &train_ds,
            &test_ds,
            train_scores.as_ref(),
            test_scores.as_ref(),
            &args.strategies,
            &args.sizes,
            &args.seeds,
            &svm,
            args.iterations,
        )?;
        stages.mark("sweep");

        let out_path = self.out_dir.join(&args.out);
        eval::write_curve_csv(fs::File::create(&out_path)?, &curve)?;
        eval::read_curve_csv(fs::File::open(&out_path)?)?;
        stages.mark("write");

        let mut inputs: Vec<&Path> = Vec::new();
        for p in train_inputs.iter().chain(test_inputs.iter()) {
            inputs.push(p.as_path());
        }
        for p in [&args.train_scores, &args.test_scores].into_iter().flatten() {
            inputs.push(p.as_path());
        }
        write_manifest(
            &self.out_dir,
            serde_json::json!({
                "command": "eval",
                "strategies": args.strategies.iter().map(|s| s.name()).collect::<Vec<_>>(),
                "sizes": args.sizes,
                "seeds": args.seeds,
                "iterations": args.iterations,
                "svm": {
                    "lambda": args.svm_lambda,
                    "epochs": args.svm_epochs,
                    "seed": args.svm_seed,
                    "bias": args.svm_bias,
                },
                "band_rows": self.band_rows,
                "out": args.out,
            }),
            &inputs,
            &[&args.out],
            stages,
        )?;
        println!("wrote {} ({} records)", out_path.display(), curve.records.len());
        Ok(())
    }

    fn cmd_hist(&self, args: &HistArgs) -> Result<(), CliFailure> {
        let mut stages = Stages::new();
        let train_scores = read_scores(&args.train_scores)?;
        let test_scores = read_scores(&args.test_scores)?;
        let plan = sampling::read_plan_json(
            fs::File::open(&args.plan)
                .map_err(|e| CliFailure::parse(format!("{}: {e}", args.plan.display())))?,
        )?;
        stages.mark("load");

        let bins = args.bins as usize;
        let train_norm = train_scores.normalized()?;
        let test_norm = test_scores.normalized()?;

        let mut selected_counts = vec![0u64; bins];
        if let Some(ids) = plan.chosen.get(&args.class) {
            for id in ids {
                let idx = train_scores
                    .ids
                    .iter()
                    .position(|x| x == id)
                    .ok_or_else(|| {
                        CliFailure::validation(format!(
                            "plan id {id:?} not present in --train-scores"
                        ))
                    })?;
                selected_counts[bin_index(train_norm[idx], bins)] += 1;
            }
        }

        let mut test_counts = vec![0u64; bins];
        for (i, tag) in test_scores.class_tags.iter().enumerate() {
            if *tag == args.class {
                test_counts[bin_index(test_norm[i], bins)] += 1;
            }
        }
        stages.mark("bin");

        let out_path = self.out_dir.join(&args.out);
        {
            let mut w = csv::Writer::from_writer(fs::File::create(&out_path)?);
            w.write_record(["bin_lo", "bin_hi", "count_selected", "count_test"])
                .map_err(|e| CliFailure::parse(e.to_string()))?;
            for b in 0..bins {
                let lo = b as f64 / bins as f64;
                let hi = (b + 1) as f64 / bins as f64;
                w.write_record([
                    numfmt::full(lo).as_str(),
                    numfmt::full(hi).as_str(),
                    &selected_counts[b].to_string(),
                    &test_counts[b].to_string(),
                ])
                .map_err(|e| CliFailure::parse(e.to_string()))?;
            }
            w.flush()?;
        }
        stages.mark("write");

        write_manifest(
            &self.out_dir,
            serde_json::json!({
                "command": "hist",
                "train_scores": args.train_scores.display().to_string(),
                "test_scores": args.test_scores.display().to_string(),
                "plan": args.plan.display().to_string(),
                "class": args.class,
                "bins": args.bins,
                "out": args.out,
            }),
            &[
                args.train_scores.as_path(),
                args.test_scores.as_path(),
                args.plan.as_path(),
            ],
            &[&args.out],
            stages,
        )?;
        println!("wrote {}", out_path.display());
        Ok(())
    }
}

/// Bin index for a value in [0, 1] over `bins` equal-width bins; 1.0 lands
/// in the last bin.
fn bin_index(value: f64, bins: usize) -> usize {
    let clamped = value.clamp(0.0, 1.0);
    ((clamped * bins as f64) as usize).min(bins - 1)
}
