//! The one-sided building blocks the counting protocol is assembled from.

/// Epidemic: `(u, v) -> (max{u, v}, v)`.
#[inline]
pub fn epidemic_step(u: u64, v: u64) -> u64 {
    u.max(v)
}

/// Countdown with higher value propagation: `(u, v) -> (max{u, v} - 1, v)`.
#[inline]
pub fn chvp_step(u: i64, v: i64) -> i64 {
    u.max(v) - 1
}

/// Count-up with lower value propagation: `(x, y) -> (min{x, y} + 1, y)`.
#[inline]
pub fn clvp_step(x: u64, y: u64) -> u64 {
    x.min(y) + 1
}
