//! Training-subset selection: per-class random sampling, Gini extremes, and
//! distribution matching against a target score distribution by KDE
//! likelihood or 1-D earth-mover's distance.
//!
//! Matching strategies run a best-of-N search: N independent uniform
//! candidate subsets per class, each drawn from its own seeded generator, so
//! candidates can be scored in parallel and the winner is independent of
//! scheduling. Candidate 0 draws exactly the subset the random strategy
//! would pick for the same seed, which makes the search objective at least
//! as good as seeded random selection by construction.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::gini::{rank_extremes, GiniError, GiniScoreSet, RankDirection, RankQuery};
use crate::rng::{candidate_seed, draw_without_replacement, SplitMix64};
use crate::tags::fnv1a64;

#[derive(Debug, thiserror::Error)]
pub enum SampleError {
    #[error("no items to select from")]
    EmptyClass,
    #[error("strategy needs a target score set{}", .class.as_ref().map(|c| format!(" covering class {c:?} with at least 2 items")).unwrap_or_default())]
    MissingTarget { class: Option<String> },
    #[error("class {class:?}: reference distribution has zero spread")]
    DegenerateReference { class: String },
    #[error("invalid selection config: {0}")]
    BadConfig(&'static str),
    #[error(transparent)]
    Gini(#[from] GiniError),
    #[error("plan JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Random,
    HighestGini,
    LowestGini,
    KdeMatch,
    EmdMatch,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::Random,
        Strategy::HighestGini,
        Strategy::LowestGini,
        Strategy::KdeMatch,
        Strategy::EmdMatch,
    ];

    /// Distribution-matching strategies need test-set scores as the target.
    pub fn needs_target(self) -> bool {
        matches!(self, Strategy::KdeMatch | Strategy::EmdMatch)
    }

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Random => "random",
            Strategy::HighestGini => "highest_gini",
            Strategy::LowestGini => "lowest_gini",
            Strategy::KdeMatch => "kde_match",
            Strategy::EmdMatch => "emd_match",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(Strategy::Random),
            "highest_gini" => Ok(Strategy::HighestGini),
            "lowest_gini" => Ok(Strategy::LowestGini),
            "kde_match" => Ok(Strategy::KdeMatch),
            "emd_match" => Ok(Strategy::EmdMatch),
            other => Err(format!(
                "unknown strategy {other:?} (expected one of: random, highest_gini, lowest_gini, kde_match, emd_match)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandwidthRule {
    Scott,
}

/// Default candidate count for the matching strategies' best-of-N search.
pub const DEFAULT_ITERATIONS: u64 = 1000;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionConfig {
    pub strategy: Strategy,
    pub per_class_count: usize,
    pub seed: u64,
    pub iterations: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bandwidth_rule: Option<BandwidthRule>,
}

impl SelectionConfig {
    pub fn new(strategy: Strategy, per_class_count: usize, seed: u64) -> Self {
        Self {
            strategy,
            per_class_count,
            seed,
            iterations: DEFAULT_ITERATIONS,
            bandwidth_rule: match strategy {
                Strategy::KdeMatch => Some(BandwidthRule::Scott),
                _ => None,
            },
        }
    }
}

/// The outcome of a selection run: chosen ids per class, plus the search
/// objective actually achieved (0 for the non-iterative strategies).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SelectionPlan {
    pub config: SelectionConfig,
    pub chosen: BTreeMap<String, Vec<String>>,
    pub achieved_score: BTreeMap<String, f64>,
}

/// First Wasserstein distance between the empirical distributions of `a` and
/// `b`: the integral of `|F_a - F_b|`, computed exactly by the sorted-merge
/// quantile method. Supports unequal sizes.
///
/// ```
/// assert_eq!(ginisim::sampling::emd_1d(&[0.0, 1.0], &[1.0, 2.0]), 1.0);
/// ```
pub fn emd_1d(a: &[f64], b: &[f64]) -> f64 {
    assert!(!a.is_empty() && !b.is_empty(), "emd_1d needs nonempty inputs");
    let mut sa = a.to_vec();
    let mut sb = b.to_vec();
    sa.sort_unstable_by(f64::total_cmp);
    sb.sort_unstable_by(f64::total_cmp);

    let mut all = Vec::with_capacity(sa.len() + sb.len());
    all.extend_from_slice(&sa);
    all.extend_from_slice(&sb);
    all.sort_unstable_by(f64::total_cmp);

    let (p, q) = (sa.len() as f64, sb.len() as f64);
    let mut ia = 0usize;
    let mut ib = 0usize;
    let mut distance = 0.0;
    for k in 0..all.len() - 1 {
        let x = all[k];
        while ia < sa.len() && sa[ia] <= x {
            ia += 1;
        }
        while ib < sb.len() && sb[ib] <= x {
            ib += 1;
        }
        let delta = all[k + 1] - x;
        if delta > 0.0 {
            distance += (ia as f64 / p - ib as f64 / q).abs() * delta;
        }
    }
    distance
}

/// Scott-rule bandwidth: sample standard deviation (m-1 denominator) times
/// `m^(-1/5)`. Errors when the reference has fewer than 2 points or zero
/// spread.
fn scott_bandwidth(reference: &[f64]) -> Option<f64> {
    let m = reference.len();
    if m < 2 {
        return None;
    }
    let mean = reference.iter().sum::<f64>() / m as f64;
    let var = reference
        .iter()
        .map(|&x| (x - mean) * (x - mean))
        .sum::<f64>()
        / (m as f64 - 1.0);
    let sigma = var.sqrt();
    if sigma > 0.0 {
        Some(sigma * (m as f64).powf(-0.2))
    } else {
        None
    }
}

/// Sum over eval points of the log Gaussian-KDE density fit to
/// `ref_points` with the Scott bandwidth:
/// `sum_x log( (1/(m h)) * sum_j phi((x - r_j)/h) )`.
///
/// May return negative infinity when an eval point is so far from every
/// reference point that the kernel sum underflows; such a value simply
/// loses the best-of-N search.
pub fn kde_log_density(eval_points: &[f64], ref_points: &[f64]) -> Result<f64, SampleError> {
    let h = scott_bandwidth(ref_points).ok_or_else(|| SampleError::DegenerateReference {
        class: String::new(),
    })?;
    Ok(kde_log_density_with_bandwidth(eval_points, ref_points, h))
}

fn kde_log_density_with_bandwidth(eval_points: &[f64], ref_points: &[f64], h: f64) -> f64 {
    let m = ref_points.len() as f64;
    let norm = 1.0 / (m * h * (2.0 * std::f64::consts::PI).sqrt());
    let mut total = 0.0;
    for &x in eval_points {
        let mut kernel_sum = 0.0;
        for &r in ref_points {
            let z = (x - r) / h;
            kernel_sum += (-0.5 * z * z).exp();
        }
        total += (kernel_sum * norm).ln();
    }
    total
}

struct ClassItems<'a> {
    tag: String,
    /// Indices into the score set, in stored order.
    indices: Vec<usize>,
    ids: Vec<&'a str>,
    values: Vec<f64>,
}

/// Select `per_class_count` items per class by the configured strategy.
///
/// Random and candidate draws are pure functions of `(seed, class_tag)` and
/// the candidate index, so plans are identical on any machine and any
/// worker count.
pub fn select(
    train_scores: &GiniScoreSet,
    test_scores: Option<&GiniScoreSet>,
    cfg: &SelectionConfig,
) -> Result<SelectionPlan, SampleError> {
    if cfg.per_class_count == 0 {
        return Err(SampleError::BadConfig("per_class_count must be at least 1"));
    }
    if cfg.iterations == 0 {
        return Err(SampleError::BadConfig("iterations must be at least 1"));
    }
    if train_scores.is_empty() {
        return Err(SampleError::EmptyClass);
    }

    let normalized = train_scores.normalized()?;
    let classes: Vec<ClassItems<'_>> = train_scores
        .class_indices()
        .into_iter()
        .map(|(tag, indices)| ClassItems {
            ids: indices.iter().map(|&i| train_scores.ids[i].as_str()).collect(),
            values: indices.iter().map(|&i| normalized[i]).collect(),
            tag,
            indices,
        })
        .collect();

    let mut chosen = BTreeMap::new();
    let mut achieved = BTreeMap::new();

    match cfg.strategy {
        Strategy::Random => {
            for class in &classes {
                let mut rng = class_rng(cfg.seed, &class.tag);
                let picks =
                    draw_without_replacement(&mut rng, class.indices.len(), cfg.per_class_count);
                let ids: Vec<String> =
                    picks.iter().map(|&p| class.ids[p].to_string()).collect();
                chosen.insert(class.tag.clone(), ids);
                achieved.insert(class.tag.clone(), 0.0);
            }
        }
        Strategy::HighestGini | Strategy::LowestGini => {
            let direction = if cfg.strategy == Strategy::HighestGini {
                RankDirection::Highest
            } else {
                RankDirection::Lowest
            };
            let query = RankQuery {
                k: cfg.per_class_count,
                direction,
                class_tag: None,
            };
            let (items, _truncation_warnings) = rank_extremes(train_scores, &query)?;
            for class in &classes {
                chosen.insert(class.tag.clone(), Vec::new());
                achieved.insert(class.tag.clone(), 0.0);
            }
            for item in items {
                chosen
                    .get_mut(&item.class_tag)
                    .expect("rank classes come from the same score set")
                    .push(item.id);
            }
        }
        Strategy::KdeMatch | Strategy::EmdMatch => {
            let target = test_scores.ok_or(SampleError::MissingTarget { class: None })?;
            let target_normalized = target.normalized()?;
            let mut target_by_class: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
            for (i, tag) in target.class_tags.iter().enumerate() {
                target_by_class
                    .entry(tag.as_str())
                    .or_default()
                    .push(target_normalized[i]);
            }

            for class in &classes {
                let reference = target_by_class
                    .get(class.tag.as_str())
                    .filter(|r| r.len() >= 2)
                    .ok_or_else(|| SampleError::MissingTarget {
                        class: Some(class.tag.clone()),
                    })?;

                let (best_picks, best_objective) = match cfg.strategy {
                    Strategy::KdeMatch => {
                        let h = scott_bandwidth(reference).ok_or_else(|| {
                            SampleError::DegenerateReference {
                                class: class.tag.clone(),
                            }
                        })?;
                        search_candidates(cfg, class, |values| {
                            // Higher likelihood is better; negate into a cost.
                            -kde_log_density_with_bandwidth(values, reference, h)
                        })
                    }
                    Strategy::EmdMatch => {
                        search_candidates(cfg, class, |values| emd_1d(values, reference))
                    }
                    _ => unreachable!(),
                };

                let ids: Vec<String> = best_picks
                    .iter()
                    .map(|&p| class.ids[p].to_string())
                    .collect();
                chosen.insert(class.tag.clone(), ids);
                let objective = match cfg.strategy {
                    Strategy::KdeMatch => -best_objective,
                    _ => best_objective,
                };
                achieved.insert(class.tag.clone(), objective);
            }
        }
    }

    Ok(SelectionPlan {
        config: cfg.clone(),
        chosen,
        achieved_score: achieved,
    })
}

fn class_rng(seed: u64, class_tag: &str) -> SplitMix64 {
    SplitMix64::new(seed ^ fnv1a64(class_tag.as_bytes()))
}

/// Best-of-N candidate search minimizing `cost`. Ties prefer the lower
/// candidate index; the reduction is order-independent, so candidates may be
/// scored in parallel.
fn search_candidates(
    cfg: &SelectionConfig,
    class: &ClassItems<'_>,
    cost: impl Fn(&[f64]) -> f64 + Sync,
) -> (Vec<usize>, f64) {
    let best = (0..cfg.iterations)
        .into_par_iter()
        .map(|t| {
            let mut rng = SplitMix64::new(
                candidate_seed(cfg.seed, t) ^ fnv1a64(class.tag.as_bytes()),
            );
            let picks =
                draw_without_replacement(&mut rng, class.indices.len(), cfg.per_class_count);
            let values: Vec<f64> = picks.iter().map(|&p| class.values[p]).collect();
            (cost(&values), t, picks)
        })
        .reduce_with(|a, b| {
            match a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) {
                std::cmp::Ordering::Greater => b,
                _ => a,
            }
        })
        .expect("iterations >= 1");
    (best.2, best.0)
}

pub fn write_plan_json<W: Write>(writer: W, plan: &SelectionPlan) -> Result<(), SampleError> {
    let mut writer = writer;
    serde_json::to_writer_pretty(&mut writer, plan)?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn read_plan_json<R: Read>(reader: R) -> Result<SelectionPlan, SampleError> {
    Ok(serde_json::from_reader(reader)?)
}
