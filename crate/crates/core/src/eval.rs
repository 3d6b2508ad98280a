//! One-vs-rest linear SVM harness producing accuracy-versus-samples-per-class
//! curves for the selection strategies.
//!
//! The per-class binary classifiers train by stochastic subgradient descent
//! on the hinge loss with step `1/(lambda * t)`, data reshuffled each epoch
//! by a generator seeded from `(seed, class index)`. Every classifier owns
//! its generator, so the one-vs-rest problems can train in parallel without
//! changing results.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::dataset::VectorDataset;
use crate::gini::{GiniError, GiniScoreSet};
use crate::matrix::Matrix;
use crate::numfmt;
use crate::rng::{shuffle, SplitMix64, GOLDEN_GAMMA};
use crate::sampling::{select, SampleError, SelectionConfig, SelectionPlan, Strategy};
use crate::similarity::{dot, l2_normalize, SimilarityError};
use crate::tags::tag_cmp;

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("training data has a single class")]
    SingleClass,
    #[error("row {row} has norm {norm}, expected unit length")]
    NonUnitRow { row: usize, norm: f64 },
    #[error("input has {actual} columns, model expects {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("prediction and truth lengths differ ({pred} vs {truth})")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("empty input")]
    Empty,
    #[error("sizes must be non-empty and strictly ascending")]
    BadSizes,
    #[error("random strategy needs at least 3 seeds, got {0}")]
    NeedThreeSeeds(usize),
    #[error("strategy {0} needs {1} scores")]
    MissingScores(Strategy, &'static str),
    #[error("selected id {0:?} not present in the training dataset")]
    UnknownId(String),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Gini(#[from] GiniError),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("curve CSV: {0}")]
    BadCurveFile(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Hinge-loss SGD configuration. The defaults are fixed so accuracy
/// tolerances stay meaningful across runs.
#[derive(Debug, Clone)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
    pub seed: u64,
    pub bias: bool,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self {
            lambda: 1e-4,
            epochs: 30,
            seed: 0,
            bias: true,
        }
    }
}

/// One weight row per class; columns are the input dimensions plus a
/// trailing bias weight when `bias` is set.
#[derive(Debug, Clone)]
pub struct LinearModel {
    pub class_order: Vec<String>,
    pub weights: Matrix,
    pub bias: bool,
}

impl LinearModel {
    pub fn input_dim(&self) -> usize {
        self.weights.n_cols() - usize::from(self.bias)
    }
}

/// Train one-vs-rest binary hinge classifiers on unit-norm rows.
pub fn train(x: &Matrix, labels: &[String], cfg: &SvmConfig) -> Result<LinearModel, EvalError> {
    let n = x.n_rows();
    if n == 0 {
        return Err(EvalError::Empty);
    }
    if labels.len() != n {
        return Err(EvalError::LengthMismatch {
            pred: n,
            truth: labels.len(),
        });
    }
    for i in 0..n {
        let row = x.row(i);
        let norm = dot(row, row).sqrt();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(EvalError::NonUnitRow { row: i, norm });
        }
    }

    let mut class_order: Vec<String> = labels.to_vec();
    class_order.sort_by(|a, b| tag_cmp(a, b));
    class_order.dedup();
    if class_order.len() < 2 {
        return Err(EvalError::SingleClass);
    }

    let d = x.n_cols();
    let weight_dim = d + usize::from(cfg.bias);

    let rows: Vec<Vec<f64>> = class_order
        .par_iter()
        .enumerate()
        .map(|(class_index, class)| {
            let mut rng =
                SplitMix64::new(cfg.seed ^ (class_index as u64 + 1).wrapping_mul(GOLDEN_GAMMA));
            let targets: Vec<f64> = labels
                .iter()
                .map(|l| if l == class { 1.0 } else { -1.0 })
                .collect();

            let mut w = vec![0.0_f64; weight_dim];
            let mut order: Vec<usize> = (0..n).collect();
            let mut t: u64 = 0;
            for _ in 0..cfg.epochs {
                shuffle(&mut order, &mut rng);
                for &i in &order {
                    t += 1;
                    let eta = 1.0 / (cfg.lambda * t as f64);
                    let xi = x.row(i);
                    let mut score = dot(&w[..d], xi);
                    if cfg.bias {
                        score += w[d];
                    }
                    let violated = targets[i] * score < 1.0;
                    let keep = 1.0 - 1.0 / t as f64;
                    for v in w.iter_mut() {
                        *v *= keep;
                    }
                    if violated {
                        let step = eta * targets[i];
                        for (wv, &xv) in w[..d].iter_mut().zip(xi) {
                            *wv += step * xv;
                        }
                        if cfg.bias {
                            w[d] += step;
                        }
                    }
                }
            }
            w
        })
        .collect();

    let mut weights = Matrix::zeros(class_order.len(), weight_dim);
    for (i, row) in rows.into_iter().enumerate() {
        weights.row_mut(i).copy_from_slice(&row);
    }

    Ok(LinearModel {
        class_order,
        weights,
        bias: cfg.bias,
    })
}

/// Argmax of the per-class scores; ties go to the earlier class in
/// `class_order`.
pub fn predict(model: &LinearModel, x: &Matrix) -> Result<Vec<String>, EvalError> {
    let d = model.input_dim();
    if x.n_cols() != d {
        return Err(EvalError::DimensionMismatch {
            expected: d,
            actual: x.n_cols(),
        });
    }

    let predictions: Vec<String> = (0..x.n_rows())
        .into_par_iter()
        .map(|i| {
            let row = x.row(i);
            let mut best_class = 0usize;
            let mut best_score = f64::NEG_INFINITY;
            for c in 0..model.class_order.len() {
                let class_weights = model.weights.row(c);
                let mut score = dot(&class_weights[..d], row);
                if model.bias {
                    score += class_weights[d];
                }
                if score > best_score {
                    best_score = score;
                    best_class = c;
                }
            }
            model.class_order[best_class].clone()
        })
        .collect();
    Ok(predictions)
}

/// Fraction of exact matches.
pub fn accuracy(pred: &[String], truth: &[String]) -> Result<f64, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    let correct = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / pred.len() as f64)
}

/// The seed column of a curve record: a concrete seed, or the aggregate of
/// the random strategy's per-seed runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedLabel {
    Value(u64),
    Mean,
}

impl fmt::Display for SeedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeedLabel::Value(v) => write!(f, "{v}"),
            SeedLabel::Mean => f.write_str("mean"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub strategy: Strategy,
    pub samples_per_class: usize,
    pub seed: SeedLabel,
    pub accuracy: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvalCurve {
    pub records: Vec<CurveRecord>,
}

/// Sweep (strategy, samples-per-class) cells: select a subset, train, and
/// evaluate on the fixed test set.
///
/// The random strategy runs once per seed and appends a mean record; the
/// other strategies run once with `seeds[0]`. Gini-guided strategies require
/// `train_scores`; the matching strategies additionally require
/// `test_scores`.
#[allow(clippy::too_many_arguments)]
pub fn run_curve(
    train_ds: &VectorDataset,
    test_ds: &VectorDataset,
    train_scores: Option<&GiniScoreSet>,
    test_scores: Option<&GiniScoreSet>,
    strategies: &[Strategy],
    sizes: &[usize],
    seeds: &[u64],
    svm: &SvmConfig,
    iterations: u64,
) -> Result<EvalCurve, EvalError> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::BadSizes);
    }
    if strategies.is_empty() || seeds.is_empty() {
        return Err(EvalError::Empty);
    }
    if strategies.contains(&Strategy::Random) && seeds.len() < 3 {
        return Err(EvalError::NeedThreeSeeds(seeds.len()));
    }
    for &strategy in strategies {
        if strategy != Strategy::Random && train_scores.is_none() {
            return Err(EvalError::MissingScores(strategy, "training"));
        }
        if strategy.needs_target() && test_scores.is_none() {
            return Err(EvalError::MissingScores(strategy, "test"));
        }
    }

    // The random strategy ignores score values; selection only needs the
    // id/class layout, which the dataset itself provides.
    let shim;
    let scores_for_random: &GiniScoreSet = match train_scores {
        Some(s) => s,
        None => {
            shim = GiniScoreSet {
                ids: train_ds.ids.clone(),
                class_tags: train_ds.labels.clone(),
                raw: vec![0.0; train_ds.len()],
                normalized: Some(vec![0.0; train_ds.len()]),
            };
            &shim
        }
    };

    let test_unit = l2_normalize(&test_ds.vectors)?;
    let row_of_id: HashMap<&str, usize> = train_ds
        .ids
        .iter()
        .enumerate()
        .map(|(i, id)| (id.as_str(), i))
        .collect();

    let evaluate_plan = |plan: &SelectionPlan| -> Result<f64, EvalError> {
        let mut class_tags: Vec<&String> = plan.chosen.keys().collect();
        class_tags.sort_by(|a, b| tag_cmp(a, b));

        let mut indices = Vec::new();
        let mut labels = Vec::new();
        for tag in class_tags {
            for id in &plan.chosen[tag] {
                let &row = row_of_id
                    .get(id.as_str())
                    .ok_or_else(|| EvalError::UnknownId(id.clone()))?;
                indices.push(row);
                labels.push(tag.clone());
            }
        }
        let subset = train_ds.vectors.gather_rows(&indices);
        let unit = l2_normalize(&subset)?;
        let model = train(unit.as_matrix(), &labels, svm)?;
        let predictions = predict(&model, test_unit.as_matrix())?;
        accuracy(&predictions, &test_ds.labels)
    };

    let mut curve = EvalCurve::default();
    for &strategy in strategies {
        for &size in sizes {
            if strategy == Strategy::Random {
                let mut sum = 0.0;
                for &seed in seeds {
                    let cfg = SelectionConfig::new(strategy, size, seed);
                    let plan = select(scores_for_random, None, &cfg)?;
                    let acc = evaluate_plan(&plan)?;
                    sum += acc;
                    curve.records.push(CurveRecord {
                        strategy,
                        samples_per_class: size,
                        seed: SeedLabel::Value(seed),
                        accuracy: acc,
                    });
                }
                curve.records.push(CurveRecord {
                    strategy,
                    samples_per_class: size,
                    seed: SeedLabel::Mean,
                    accuracy: sum / seeds.len() as f64,
                });
            } else {
                let mut cfg = SelectionConfig::new(strategy, size, seeds[0]);
                cfg.iterations = iterations;
                let plan = select(
                    train_scores.expect("checked above"),
                    test_scores,
                    &cfg,
                )?;
                let acc = evaluate_plan(&plan)?;
                curve.records.push(CurveRecord {
                    strategy,
                    samples_per_class: size,
                    seed: SeedLabel::Value(seeds[0]),
                    accuracy: acc,
                });
            }
        }
    }
    Ok(curve)
}

/// Write `strategy,samples_per_class,seed,accuracy` rows; accuracy carries
/// 17 significant digits for lossless round-trips.
pub fn write_curve_csv<W: Write>(writer: W, curve: &EvalCurve) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["strategy", "samples_per_class", "seed", "accuracy"])?;
    for r in &curve.records {
        w.write_record([
            r.strategy.name(),
            &r.samples_per_class.to_string(),
            &r.seed.to_string(),
            &numfmt::full(r.accuracy),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curve_csv<R: Read>(reader: R) -> Result<EvalCurve, EvalError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = r.headers()?;
    if headers.len() != 4
        || &headers[0] != "strategy"
        || &headers[1] != "samples_per_class"
        || &headers[2] != "seed"
        || &headers[3] != "accuracy"
    {
        return Err(EvalError::BadCurveFile(
            "header must be strategy,samples_per_class,seed,accuracy".into(),
        ));
    }
    let mut curve = EvalCurve::default();
    for (row_idx, record) in r.records().enumerate() {
        let record = record?;
        let row = row_idx + 2;
        let bad = |what: &str| EvalError::BadCurveFile(format!("row {row}: {what}"));
        let strategy: Strategy = record[0].parse().map_err(|_| bad("unknown strategy"))?;
        let samples_per_class: usize = record[1].parse().map_err(|_| bad("bad size"))?;
        let seed = if &record[2] == "mean" {
            SeedLabel::Mean
        } else {
            SeedLabel::Value(record[2].parse().map_err(|_| bad("bad seed"))?)
        };
        let accuracy: f64 = record[3].parse().map_err(|_| bad("bad accuracy"))?;
        curve.records.push(CurveRecord {
            strategy,
            samples_per_class,
            seed,
            accuracy,
        });
    }
    Ok(curve)
}
