//! Per-row Gini coefficients over dissimilarity rows, MinMax normalization,
//! and extreme ranking.
//!
//! A row of pairwise dissimilarities is treated like an income distribution:
//! sort ascending, build the Lorenz curve of cumulative shares, and measure
//! the area between the curve and the line of equality. An item whose row is
//! very unequal (high Gini) sits close to most of its class; an item with a
//! flat row (low Gini) is far from everything equally.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};

use rayon::prelude::*;

use crate::dataset::{group_by_class, VectorDataset};
use crate::numfmt;
use crate::similarity::{
    dissimilarity_blocks, l2_normalize, BlockKind, SimilarityBlock, SimilarityError,
};
use crate::tags::tag_cmp;

#[derive(Debug, thiserror::Error)]
pub enum GiniError {
    #[error("empty value list")]
    Empty,
    #[error("negative value {value} at position {index}")]
    NegativeValue { index: usize, value: f64 },
    #[error("all values are zero; Lorenz curve undefined")]
    AllZero,
    #[error("row {row} covered by more than one block")]
    DuplicateRow { row: usize },
    #[error("row {row} not covered by any block")]
    MissingRow { row: usize },
    #[error("expected dissimilarity blocks")]
    WrongBlockKind,
    #[error("block spans {actual} columns, expected {expected}")]
    BlockShape { expected: usize, actual: usize },
    #[error("ids/classes/rows disagree in length")]
    LengthMismatch,
    #[error("normalized scores not filled; run minmax_scale first")]
    NotNormalized,
    #[error("k must be at least 1")]
    ZeroK,
    #[error("unknown class {0:?}")]
    UnknownClass(String),
    #[error(transparent)]
    Normalize(#[from] SimilarityError),
    #[error("score CSV: {0}")]
    BadScoreFile(String),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Non-fatal conditions surfaced alongside results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GiniWarning {
    /// A row identical to every other row in its class; Gini pinned to 0.
    AllZeroRow { id: String },
    /// All raw scores in the class are equal; normalized scores pinned to 0.
    DegenerateClass { class: String },
    /// A rank query asked for more items than the class holds.
    Truncated {
        class: String,
        requested: usize,
        available: usize,
    },
}

impl fmt::Display for GiniWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GiniWarning::AllZeroRow { id } => {
                write!(f, "item {id:?}: dissimilarity row is all zero; gini set to 0")
            }
            GiniWarning::DegenerateClass { class } => {
                write!(f, "class {class:?}: all raw ginis equal; normalized set to 0")
            }
            GiniWarning::Truncated {
                class,
                requested,
                available,
            } => write!(
                f,
                "class {class:?}: requested {requested} items, only {available} available"
            ),
        }
    }
}

/// Gini coefficient of a nonnegative distribution, in `[0, (n-1)/n]`.
///
/// Computed by the closed form of the trapezoidal Lorenz area ratio:
/// `G = sum_i (2i - n - 1) * x_(i) / (n * sum_i x_(i))` with `x_(i)` sorted
/// ascending and `i = 1..n`.
///
/// ```
/// let g = ginisim::gini::gini_coefficient(&[0.0, 0.0, 0.0, 1.0]).unwrap();
/// assert_eq!(g, 0.75);
/// ```
pub fn gini_coefficient(values: &[f64]) -> Result<f64, GiniError> {
    let sorted = validated_ascending(values)?;
    Ok(gini_of_sorted(&sorted))
}

/// Closed form on values already sorted ascending and validated.
fn gini_of_sorted(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if sorted[0] == sorted[n - 1] {
        return 0.0;
    }
    let mut total = 0.0;
    let mut weighted = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        total += x;
        weighted += ((2 * (i + 1)) as f64 - n as f64 - 1.0) * x;
    }
    let g = weighted / (n as f64 * total);
    g.clamp(0.0, (n as f64 - 1.0) / n as f64)
}

fn validated_ascending(values: &[f64]) -> Result<Vec<f64>, GiniError> {
    if values.is_empty() {
        return Err(GiniError::Empty);
    }
    let mut any_positive = false;
    for (index, &value) in values.iter().enumerate() {
        if value < 0.0 || value.is_nan() {
            return Err(GiniError::NegativeValue { index, value });
        }
        any_positive |= value > 0.0;
    }
    if !any_positive {
        return Err(GiniError::AllZero);
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    Ok(sorted)
}

/// Lorenz curve of a distribution: `n + 1` points from (0,0) to (1,1), where
/// point `i` is (i/n, share of total held by the i smallest values).
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzCurve {
    pub points: Vec<(f64, f64)>,
}

pub fn lorenz_points(values: &[f64]) -> Result<LorenzCurve, GiniError> {
    let sorted = validated_ascending(values)?;
    let n = sorted.len();
    let total: f64 = sorted.iter().sum();
    let mut points = Vec::with_capacity(n + 1);
    points.push((0.0, 0.0));
    let mut cumulative = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        cumulative += x;
        points.push(((i + 1) as f64 / n as f64, cumulative / total));
    }
    Ok(LorenzCurve { points })
}

/// Per-item Gini scores: raw, plus MinMax-normalized once
/// [`minmax_scale`] has run.
#[derive(Debug, Clone)]
pub struct GiniScoreSet {
    pub ids: Vec<String>,
    pub class_tags: Vec<String>,
    pub raw: Vec<f64>,
    pub normalized: Option<Vec<f64>>,
}

impl GiniScoreSet {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn normalized(&self) -> Result<&[f64], GiniError> {
        self.normalized
            .as_deref()
            .ok_or(GiniError::NotNormalized)
    }

    /// Item indices grouped by class, classes in ascending tag order,
    /// indices in stored order.
    pub fn class_indices(&self) -> Vec<(String, Vec<usize>)> {
        let mut map: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
        for (i, tag) in self.class_tags.iter().enumerate() {
            map.entry(tag).or_default().push(i);
        }
        let mut groups: Vec<(String, Vec<usize>)> = map
            .into_iter()
            .map(|(tag, idx)| (tag.to_string(), idx))
            .collect();
        groups.sort_by(|a, b| tag_cmp(&a.0, &b.0));
        groups
    }
}

/// Raw Gini per row of a streamed dissimilarity matrix, with the self entry
/// (the diagonal zero) excluded from each row.
///
/// Blocks must cover rows `0..ids.len()` exactly once. A row identical to
/// every other row (all-zero after exclusion) gets raw 0 and a warning, as
/// does the single row of a size-1 class.
pub fn row_ginis(
    blocks: impl Iterator<Item = SimilarityBlock>,
    ids: &[String],
    class_tags: &[String],
) -> Result<(GiniScoreSet, Vec<GiniWarning>), GiniError> {
    let n = ids.len();
    if class_tags.len() != n {
        return Err(GiniError::LengthMismatch);
    }

    let mut raw = vec![0.0_f64; n];
    let mut covered = vec![false; n];
    let mut warnings = Vec::new();

    for block in blocks {
        if block.kind != BlockKind::Dissimilarity {
            return Err(GiniError::WrongBlockKind);
        }
        if block.values.n_cols() != n {
            return Err(GiniError::BlockShape {
                expected: n,
                actual: block.values.n_cols(),
            });
        }
        let lo = block.row_range.start;
        let rows = block.row_range.end - lo;
        if block.row_range.end > n || block.values.n_rows() != rows {
            return Err(GiniError::BlockShape {
                expected: n,
                actual: block.row_range.end,
            });
        }
        for r in 0..rows {
            let i = lo + r;
            if covered[i] {
                return Err(GiniError::DuplicateRow { row: i });
            }
            covered[i] = true;
        }

        let computed: Vec<Result<(f64, bool), GiniError>> = (0..rows)
            .into_par_iter()
            .map(|r| {
                let i = lo + r;
                let row = block.values.row(r);
                let mut others = Vec::with_capacity(n.saturating_sub(1));
                others.extend_from_slice(&row[..i]);
                others.extend_from_slice(&row[i + 1..]);
                if others.is_empty() {
                    return Ok((0.0, false));
                }
                match gini_coefficient(&others) {
                    Ok(g) => Ok((g, false)),
                    Err(GiniError::AllZero) => Ok((0.0, true)),
                    Err(e) => Err(e),
                }
            })
            .collect();

        for (r, item) in computed.into_iter().enumerate() {
            let i = lo + r;
            let (g, all_zero) = item?;
            raw[i] = g;
            if all_zero {
                warnings.push(GiniWarning::AllZeroRow { id: ids[i].clone() });
            }
        }
    }

    if let Some(row) = covered.iter().position(|&c| !c) {
        return Err(GiniError::MissingRow { row });
    }

    Ok((
        GiniScoreSet {
            ids: ids.to_vec(),
            class_tags: class_tags.to_vec(),
            raw,
            normalized: None,
        },
        warnings,
    ))
}

/// Fill `normalized` as `(raw - min) / (max - min)` within each class (or
/// globally when `per_class` is false). A degenerate group (all raw equal)
/// normalizes to all zeros with a warning.
pub fn minmax_scale(mut scores: GiniScoreSet, per_class: bool) -> (GiniScoreSet, Vec<GiniWarning>) {
    let groups: Vec<(String, Vec<usize>)> = if per_class {
        scores.class_indices()
    } else {
        vec![("<all>".to_string(), (0..scores.len()).collect())]
    };

    let mut normalized = vec![0.0_f64; scores.len()];
    let mut warnings = Vec::new();

    for (class, indices) in groups {
        let lo = indices
            .iter()
            .map(|&i| scores.raw[i])
            .fold(f64::INFINITY, f64::min);
        let hi = indices
            .iter()
            .map(|&i| scores.raw[i])
            .fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            for &i in &indices {
                normalized[i] = (scores.raw[i] - lo) / (hi - lo);
            }
        } else {
            // Values already zeroed.
            warnings.push(GiniWarning::DegenerateClass { class });
        }
    }

    scores.normalized = Some(normalized);
    (scores, warnings)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankDirection {
    Highest,
    Lowest,
}

/// A top-k request against one class or all classes.
#[derive(Debug, Clone)]
pub struct RankQuery {
    pub k: usize,
    pub direction: RankDirection,
    pub class_tag: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedItem {
    pub id: String,
    pub class_tag: String,
    pub normalized: f64,
}

/// Top or bottom `k` items per class by normalized Gini; ties break by
/// ascending id. Requests larger than a class return the whole class plus a
/// warning.
pub fn rank_extremes(
    scores: &GiniScoreSet,
    query: &RankQuery,
) -> Result<(Vec<RankedItem>, Vec<GiniWarning>), GiniError> {
    if query.k == 0 {
        return Err(GiniError::ZeroK);
    }
    let normalized = scores.normalized()?;

    let mut groups = scores.class_indices();
    if let Some(ref wanted) = query.class_tag {
        groups.retain(|(tag, _)| tag == wanted);
        if groups.is_empty() {
            return Err(GiniError::UnknownClass(wanted.clone()));
        }
    }

    let mut items = Vec::new();
    let mut warnings = Vec::new();
    for (class, mut indices) in groups {
        indices.sort_by(|&a, &b| {
            let by_score = match query.direction {
                RankDirection::Highest => normalized[b].total_cmp(&normalized[a]),
                RankDirection::Lowest => normalized[a].total_cmp(&normalized[b]),
            };
            by_score.then_with(|| tag_cmp(&scores.ids[a], &scores.ids[b]))
        });
        if indices.len() < query.k {
            warnings.push(GiniWarning::Truncated {
                class: class.clone(),
                requested: query.k,
                available: indices.len(),
            });
        }
        for &i in indices.iter().take(query.k) {
            items.push(RankedItem {
                id: scores.ids[i].clone(),
                class_tag: class.clone(),
                normalized: normalized[i],
            });
        }
    }
    Ok((items, warnings))
}

/// Full scoring pipeline for a dataset: per-class L2 normalization, banded
/// dissimilarity, per-row Gini, MinMax normalization.
pub fn score_dataset(
    ds: &VectorDataset,
    band_rows: usize,
    per_class: bool,
) -> Result<(GiniScoreSet, Vec<GiniWarning>), GiniError> {
    let mut raw = vec![0.0_f64; ds.len()];
    let mut warnings = Vec::new();

    for view in group_by_class(ds) {
        let sub = ds.vectors.gather_rows(&view.row_indices);
        let unit = l2_normalize(&sub)?;
        let ids: Vec<String> = view.row_indices.iter().map(|&i| ds.ids[i].clone()).collect();
        let tags: Vec<String> = vec![view.class_tag.clone(); view.row_indices.len()];
        let (class_scores, class_warnings) =
            row_ginis(dissimilarity_blocks(&unit, band_rows), &ids, &tags)?;
        warnings.extend(class_warnings);
        for (local, &global) in view.row_indices.iter().enumerate() {
            raw[global] = class_scores.raw[local];
        }
    }

    let scores = GiniScoreSet {
        ids: ds.ids.clone(),
        class_tags: ds.labels.clone(),
        raw,
        normalized: None,
    };
    let (scores, mut scale_warnings) = minmax_scale(scores, per_class);
    warnings.append(&mut scale_warnings);
    Ok((scores, warnings))
}

/// Write `id,class,gini_raw,gini_norm` rows in stored order, values rendered
/// with 17 significant digits so the CSV round-trips losslessly.
pub fn write_scores_csv<W: Write>(writer: W, scores: &GiniScoreSet) -> Result<(), GiniError> {
    let normalized = scores.normalized()?;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["id", "class", "gini_raw", "gini_norm"])?;
    for (i, &norm) in normalized.iter().enumerate() {
        w.write_record([
            scores.ids[i].as_str(),
            scores.class_tags[i].as_str(),
            &numfmt::full(scores.raw[i]),
            &numfmt::full(norm),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_scores_csv<R: Read>(reader: R) -> Result<GiniScoreSet, GiniError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(reader);
    let headers = r.headers()?;
    if headers.len() != 4
        || &headers[0] != "id"
        || &headers[1] != "class"
        || &headers[2] != "gini_raw"
        || &headers[3] != "gini_norm"
    {
        return Err(GiniError::BadScoreFile(
            "header must be id,class,gini_raw,gini_norm".into(),
        ));
    }

    let mut scores = GiniScoreSet {
        ids: Vec::new(),
        class_tags: Vec::new(),
        raw: Vec::new(),
        normalized: Some(Vec::new()),
    };
    for (row_idx, record) in r.records().enumerate() {
        let record = record?;
        let row = row_idx + 2;
        if record.len() != 4 {
            return Err(GiniError::BadScoreFile(format!(
                "row {row}: expected 4 columns, got {}",
                record.len()
            )));
        }
        let parse = |token: &str| -> Result<f64, GiniError> {
            let v: f64 = token
                .trim()
                .parse()
                .map_err(|_| GiniError::BadScoreFile(format!("row {row}: bad number {token:?}")))?;
            if !v.is_finite() {
                return Err(GiniError::BadScoreFile(format!(
                    "row {row}: non-finite value {token:?}"
                )));
            }
            Ok(v)
        };
        scores.ids.push(record[0].to_string());
        scores.class_tags.push(record[1].to_string());
        scores.raw.push(parse(&record[2])?);
        scores
            .normalized
            .as_mut()
            .expect("initialized above")
            .push(parse(&record[3])?);
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;

    /// Independent oracle: numeric trapezoid integration of the Lorenz
    /// polyline, G = 1 - 2 * area under the curve.
    pub(crate) fn trapezoid_gini(values: &[f64]) -> f64 {
        let curve = lorenz_points(values).unwrap();
        let mut area = 0.0;
        for pair in curve.points.windows(2) {
            let (x0, y0) = pair[0];
            let (x1, y1) = pair[1];
            area += (x1 - x0) * (y0 + y1) / 2.0;
        }
        1.0 - 2.0 * area
    }

    #[test]
    fn equal_values_have_zero_gini() {
        assert_eq!(gini_coefficient(&[1.0, 1.0, 1.0, 1.0]).unwrap(), 0.0);
    }

    #[test]
    fn single_holder_reaches_upper_bound() {
        assert_eq!(gini_coefficient(&[0.0, 0.0, 0.0, 1.0]).unwrap(), 0.75);
    }

    #[test]
    fn one_two_three_matches_trapezoid_oracle() {
        let g = gini_coefficient(&[1.0, 2.0, 3.0]).unwrap();
        assert!((g - 2.0 / 9.0).abs() < 1e-15);
        assert!((g - trapezoid_gini(&[1.0, 2.0, 3.0])).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(gini_coefficient(&[]), Err(GiniError::Empty)));
        assert!(matches!(
            gini_coefficient(&[1.0, -0.5]),
            Err(GiniError::NegativeValue { index: 1, .. })
        ));
        assert!(matches!(
            gini_coefficient(&[0.0, 0.0]),
            Err(GiniError::AllZero)
        ));
    }

    #[test]
    fn lorenz_known_points() {
        let c = lorenz_points(&[1.0, 1.0]).unwrap();
        assert_eq!(c.points, vec![(0.0, 0.0), (0.5, 0.5), (1.0, 1.0)]);
        let c = lorenz_points(&[0.0, 1.0]).unwrap();
        assert_eq!(c.points, vec![(0.0, 0.0), (0.5, 0.0), (1.0, 1.0)]);
        let c = lorenz_points(&[1.0, 3.0]).unwrap();
        assert_eq!(c.points, vec![(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]);
    }

    fn block(lo: usize, hi: usize, n: usize, rows: Vec<Vec<f64>>) -> SimilarityBlock {
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        SimilarityBlock {
            row_range: lo..hi,
            values: Matrix::from_vec(hi - lo, n, flat),
            kind: BlockKind::Dissimilarity,
        }
    }

    fn tags(n: usize) -> (Vec<String>, Vec<String>) {
        let ids = (0..n).map(|i| i.to_string()).collect();
        let cls = vec!["c".to_string(); n];
        (ids, cls)
    }

    #[test]
    fn pair_class_scores_zero() {
        let (ids, cls) = tags(2);
        let b = block(0, 2, 2, vec![vec![0.0, 0.4], vec![0.4, 0.0]]);
        let (scores, warnings) = row_ginis([b].into_iter(), &ids, &cls).unwrap();
        assert_eq!(scores.raw, vec![0.0, 0.0]);
        assert!(warnings.is_empty());
    }

    #[test]
    fn equal_row_scores_zero() {
        let (ids, cls) = tags(3);
        let b = block(
            0,
            3,
            3,
            vec![
                vec![0.0, 0.2, 0.2],
                vec![0.2, 0.0, 0.2],
                vec![0.2, 0.2, 0.0],
            ],
        );
        let (scores, _) = row_ginis([b].into_iter(), &ids, &cls).unwrap();
        assert_eq!(scores.raw[0], 0.0);
    }

    #[test]
    fn skewed_row_matches_closed_form() {
        let (ids, cls) = tags(3);
        let b = block(
            0,
            3,
            3,
            vec![
                vec![0.0, 0.1, 0.3],
                vec![0.1, 0.0, 0.2],
                vec![0.3, 0.2, 0.0],
            ],
        );
        let (scores, _) = row_ginis([b].into_iter(), &ids, &cls).unwrap();
        assert!((scores.raw[0] - 0.25).abs() < 1e-15);
        assert!((scores.raw[0] - trapezoid_gini(&[0.1, 0.3])).abs() < 1e-12);
    }

    #[test]
    fn duplicate_and_missing_rows_are_rejected() {
        let (ids, cls) = tags(2);
        let b1 = block(0, 1, 2, vec![vec![0.0, 0.4]]);
        let b2 = block(0, 1, 2, vec![vec![0.0, 0.4]]);
        assert!(matches!(
            row_ginis([b1.clone(), b2].into_iter(), &ids, &cls),
            Err(GiniError::DuplicateRow { row: 0 })
        ));
        assert!(matches!(
            row_ginis([b1].into_iter(), &ids, &cls),
            Err(GiniError::MissingRow { row: 1 })
        ));
    }

    #[test]
    fn all_zero_row_warns() {
        let ids = vec!["a".to_string(), "b".to_string()];
        let cls = vec!["c".to_string(); 2];
        let b = block(0, 2, 2, vec![vec![0.0, 0.0], vec![0.0, 0.0]]);
        let (scores, warnings) = row_ginis([b].into_iter(), &ids, &cls).unwrap();
        assert_eq!(scores.raw, vec![0.0, 0.0]);
        assert_eq!(warnings.len(), 2);
        assert!(matches!(&warnings[0], GiniWarning::AllZeroRow { id } if id == "a"));
    }

    fn scored(raw: Vec<f64>, classes: Vec<&str>) -> GiniScoreSet {
        let n = raw.len();
        GiniScoreSet {
            ids: (0..n).map(|i| i.to_string()).collect(),
            class_tags: classes.into_iter().map(String::from).collect(),
            raw,
            normalized: None,
        }
    }

    #[test]
    fn minmax_scales_to_unit_range() {
        let s = scored(vec![0.2, 0.5, 0.8], vec!["c", "c", "c"]);
        let (s, warnings) = minmax_scale(s, true);
        let normalized = s.normalized.unwrap();
        assert_eq!(normalized[0], 0.0);
        assert!((normalized[1] - 0.5).abs() < 1e-15);
        assert_eq!(normalized[2], 1.0);
        assert!(warnings.is_empty());
    }

    #[test]
    fn minmax_is_order_preserving_not_identity() {
        let s = scored(vec![3.0, 1.0, 2.0], vec!["c", "c", "c"]);
        let (s, _) = minmax_scale(s, true);
        assert_eq!(s.normalized.unwrap(), vec![1.0, 0.0, 0.5]);
    }

    #[test]
    fn degenerate_class_pins_to_zero_with_warning() {
        let s = scored(vec![0.4, 0.4], vec!["c", "c"]);
        let (s, warnings) = minmax_scale(s, true);
        assert_eq!(s.normalized.unwrap(), vec![0.0, 0.0]);
        assert_eq!(
            warnings,
            vec![GiniWarning::DegenerateClass {
                class: "c".to_string()
            }]
        );
    }

    #[test]
    fn global_scaling_spans_classes() {
        let s = scored(vec![0.0, 1.0, 2.0, 4.0], vec!["a", "a", "b", "b"]);
        let (s, _) = minmax_scale(s, false);
        assert_eq!(s.normalized.unwrap(), vec![0.0, 0.25, 0.5, 1.0]);
    }

    fn named_scores(pairs: &[(&str, f64)]) -> GiniScoreSet {
        GiniScoreSet {
            ids: pairs.iter().map(|(id, _)| id.to_string()).collect(),
            class_tags: vec!["c".to_string(); pairs.len()],
            raw: pairs.iter().map(|(_, v)| *v).collect(),
            normalized: Some(pairs.iter().map(|(_, v)| *v).collect()),
        }
    }

    #[test]
    fn rank_takes_highest() {
        let s = named_scores(&[("a", 0.1), ("b", 0.9), ("c", 0.5)]);
        let q = RankQuery {
            k: 1,
            direction: RankDirection::Highest,
            class_tag: None,
        };
        let (items, warnings) = rank_extremes(&s, &q).unwrap();
        assert_eq!(items.len(), 1);
        assert_eq!(items[0].id, "b");
        assert!(warnings.is_empty());
    }

    #[test]
    fn rank_breaks_ties_by_ascending_id() {
        let s = named_scores(&[("b", 0.5), ("a", 0.5)]);
        let q = RankQuery {
            k: 1,
            direction: RankDirection::Highest,
            class_tag: None,
        };
        let (items, _) = rank_extremes(&s, &q).unwrap();
        assert_eq!(items[0].id, "a");
    }

    #[test]
    fn oversized_rank_returns_all_with_warning() {
        let s = named_scores(&[("a", 0.1), ("b", 0.9)]);
        let q = RankQuery {
            k: 50,
            direction: RankDirection::Lowest,
            class_tag: None,
        };
        let (items, warnings) = rank_extremes(&s, &q).unwrap();
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].id, "a");
        assert_eq!(
            warnings,
            vec![GiniWarning::Truncated {
                class: "c".to_string(),
                requested: 50,
                available: 2
            }]
        );
    }

    #[test]
    fn top_and_bottom_ranks_are_disjoint() {
        let pairs: Vec<(String, f64)> = (0..9).map(|i| (i.to_string(), i as f64 / 8.0)).collect();
        let borrowed: Vec<(&str, f64)> =
            pairs.iter().map(|(id, v)| (id.as_str(), *v)).collect();
        let s = named_scores(&borrowed);
        let k = 4; // 9 distinct scores > 2k
        let top = rank_extremes(
            &s,
            &RankQuery {
                k,
                direction: RankDirection::Highest,
                class_tag: None,
            },
        )
        .unwrap()
        .0;
        let bottom = rank_extremes(
            &s,
            &RankQuery {
                k,
                direction: RankDirection::Lowest,
                class_tag: None,
            },
        )
        .unwrap()
        .0;
        for t in &top {
            assert!(bottom.iter().all(|b| b.id != t.id));
        }
    }

    #[test]
    fn rank_unknown_class_is_an_error() {
        let s = named_scores(&[("a", 0.1)]);
        let q = RankQuery {
            k: 1,
            direction: RankDirection::Highest,
            class_tag: Some("missing".to_string()),
        };
        assert!(matches!(
            rank_extremes(&s, &q),
            Err(GiniError::UnknownClass(_))
        ));
    }

    #[test]
    fn scores_csv_round_trips_bitwise() {
        let s = named_scores(&[("a", 0.1), ("b", 1.0 / 3.0)]);
        let mut buf = Vec::new();
        write_scores_csv(&mut buf, &s).unwrap();
        let back = read_scores_csv(buf.as_slice()).unwrap();
        assert_eq!(back.ids, s.ids);
        assert_eq!(back.raw, s.raw);
        assert_eq!(back.normalized.unwrap(), s.normalized.unwrap());
    }

    #[test]
    fn score_dataset_end_to_end_on_tiny_input() {
        // Three 2-D points in one class, one point in another.
        let ds = VectorDataset {
            ids: (0..4).map(|i| i.to_string()).collect(),
            vectors: Matrix::from_vec(
                4,
                2,
                vec![1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 2.0, 0.1],
            ),
            labels: vec!["x".into(), "x".into(), "x".into(), "y".into()],
            source_note: String::new(),
        };
        let (scores, _) = score_dataset(&ds, 2, true).unwrap();
        let normalized = scores.normalized.as_ref().unwrap();
        // Size-1 class "y" is degenerate: raw and normalized 0.
        assert_eq!(scores.raw[3], 0.0);
        assert_eq!(normalized[3], 0.0);
        // Class "x" normalization hits 0 and 1.
        let xs = [normalized[0], normalized[1], normalized[2]];
        assert_eq!(xs.iter().cloned().fold(f64::INFINITY, f64::min), 0.0);
        assert_eq!(xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max), 1.0);
    }
}
