//! L2 normalization and banded rows of the dissimilarity matrix `1 - V Vᵀ`.
//!
//! Dot products accumulate strictly left-to-right over the dimensions, so a
//! block's values are bitwise identical no matter how rows are scheduled
//! across threads or how the band size slices the matrix.

use std::ops::Range;

use rayon::prelude::*;

use crate::matrix::Matrix;

/// Band height for block iteration; caps peak memory at `band * n` reals.
pub const DEFAULT_BAND_ROWS: usize = 512;

#[derive(Debug, thiserror::Error)]
pub enum SimilarityError {
    #[error("row {row} has near-zero norm and no direction")]
    ZeroVector { row: usize },
    #[error("bad row range [{lo}, {hi}) for {n} rows")]
    BadRange { lo: usize, hi: usize, n: usize },
}

/// Sequential left-to-right dot product; never reassociated, so the result
/// is bitwise identical for any thread count or band size.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

/// A matrix whose rows all have unit Euclidean norm.
#[derive(Debug, Clone)]
pub struct UnitMatrix {
    rows: Matrix,
}

impl UnitMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.n_rows()
    }

    pub fn dim(&self) -> usize {
        self.rows.n_cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.rows.row(i)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.rows
    }
}

/// Divide each row by its Euclidean norm.
///
/// A row with norm below 1e-300 (e.g. an all-black image) has no direction
/// and is rejected as [`SimilarityError::ZeroVector`].
pub fn l2_normalize(m: &Matrix) -> Result<UnitMatrix, SimilarityError> {
    let mut rows = m.clone();
    for i in 0..rows.n_rows() {
        let row = rows.row_mut(i);
        let norm = dot(row, row).sqrt();
        if norm < 1e-300 {
            return Err(SimilarityError::ZeroVector { row: i });
        }
        for v in row.iter_mut() {
            *v /= norm;
        }
    }
    Ok(UnitMatrix { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    Similarity,
    Dissimilarity,
}

/// A contiguous band of rows of the dissimilarity matrix: `values[r][j]`
/// holds `1 - <u_{lo+r}, u_j>` for the full column range `0..n`.
#[derive(Debug, Clone)]
pub struct SimilarityBlock {
    pub row_range: Range<usize>,
    pub values: Matrix,
    pub kind: BlockKind,
}

/// Compute rows `[lo, hi)` of `1 - U Uᵀ`, with each raw dot product clamped
/// to `[-1, 1]` before the subtraction so dissimilarities stay in `[0, 2]`.
pub fn dissimilarity_block(
    u: &UnitMatrix,
    lo: usize,
    hi: usize,
) -> Result<SimilarityBlock, SimilarityError> {
    let n = u.n_rows();
    if lo >= hi || hi > n {
        return Err(SimilarityError::BadRange { lo, hi, n });
    }

    let mut values = Matrix::zeros(hi - lo, n);
    values
        .par_rows_mut()
        .enumerate()
        .for_each(|(r, out_row)| {
            let left = u.row(lo + r);
            for (j, out) in out_row.iter_mut().enumerate() {
                let s = dot(left, u.row(j)).clamp(-1.0, 1.0);
                *out = 1.0 - s;
            }
        });

    Ok(SimilarityBlock {
        row_range: lo..hi,
        values,
        kind: BlockKind::Dissimilarity,
    })
}

/// Iterate bands of `band_rows` rows covering the whole matrix in ascending
/// order. Concatenating the blocks of any band size reproduces the
/// `band_rows = n` matrix bitwise.
pub fn dissimilarity_blocks(
    u: &UnitMatrix,
    band_rows: usize,
) -> impl Iterator<Item = SimilarityBlock> + '_ {
    assert!(band_rows >= 1, "band_rows must be at least 1");
    let n = u.n_rows();
    (0..n).step_by(band_rows).map(move |lo| {
        let hi = (lo + band_rows).min(n);
        dissimilarity_block(u, lo, hi).expect("in-range band")
    })
}
