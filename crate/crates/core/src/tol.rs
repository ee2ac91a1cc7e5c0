//! Centralized comparison tolerances.
//!
//! Every approximate comparison in the crate goes through these helpers so
//! the tolerances live in one place.

/// Relative tolerance for metric comparisons (stretch, closure equality,
/// triangle inequality slack).
pub const REL_TOL: f64 = 1e-9;

/// Scaled tolerance for the Gabriel open-ball dot-product test. A witness
/// excludes an edge only when its dot product is below `-GABRIEL_TOL * |uv|^2`,
/// so points on the diameter sphere do not exclude.
pub const GABRIEL_TOL: f64 = 1e-12;

/// `a == b` up to `tol` relative to the larger magnitude. Exact equality
/// (including infinities) short-circuits.
#[must_use]
pub fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// `a <= b` up to `tol` relative slack.
#[must_use]
pub fn rel_le(a: f64, b: f64, tol: f64) -> bool {
    a <= b + tol * a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_eq_handles_zero_and_inf() {
        assert!(rel_eq(0.0, 0.0, REL_TOL));
        assert!(rel_eq(f64::INFINITY, f64::INFINITY, REL_TOL));
        assert!(!rel_eq(1.0, f64::INFINITY, REL_TOL));
        assert!(rel_eq(1.0, 1.0 + 1e-13, REL_TOL));
        assert!(!rel_eq(1.0, 1.0 + 1e-6, REL_TOL));
    }

    #[test]
    fn rel_le_allows_slack() {
        assert!(rel_le(1.0 + 1e-12, 1.0, REL_TOL));
        assert!(!rel_le(1.0 + 1e-6, 1.0, REL_TOL));
        assert!(rel_le(0.0, 0.0, REL_TOL));
    }
}
