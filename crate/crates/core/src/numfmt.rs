//! Number rendering for CSV exports.

/// Render with 17 significant digits (1 + 16 in scientific notation), enough
/// to round-trip any finite f64 through text losslessly.
pub fn full(x: f64) -> String {
    format!("{x:.16e}")
}
