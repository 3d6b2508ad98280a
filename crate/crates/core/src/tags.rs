//! Ordering and hashing for opaque string tags (item ids and class labels).
//!
//! Tags are opaque strings, but digit-only tags are common (MNIST classes,
//! row-index ids), so ordering compares numerically when both sides parse as
//! unsigned integers and falls back to byte order otherwise. Hashing uses
//! FNV-1a, which is stable across platforms and Rust versions; the standard
//! library hasher is not.

use std::cmp::Ordering;

/// Total order on tags: numeric when both parse as `u64`, else lexicographic.
/// Numeric ties (e.g. "007" vs "7") fall back to byte order so the result is
/// a strict total order on distinct strings.
pub fn tag_cmp(a: &str, b: &str) -> Ordering {
    match (a.parse::<u64>(), b.parse::<u64>()) {
        (Ok(x), Ok(y)) => x.cmp(&y).then_with(|| a.cmp(b)),
        _ => a.cmp(b),
    }
}

/// FNV-1a over the tag bytes. Stable across platforms; used to derive
/// per-class generator streams.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
