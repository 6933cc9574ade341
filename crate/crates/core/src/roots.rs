//! Bracketing bisection for monotone scalar equations.

use crate::error::{Error, Result};

/// Iteration cap shared by every root solve in the crate.
pub const MAX_ITER: usize = 200;

/// Solves `f(x) = target` for a nondecreasing `f` on `[lo, hi]`.
///
/// Requires `f(lo) <= target <= f(hi)`. Stops once the bracket width is below
/// `rel_tol * |x|` (or below `rel_tol` when the root is at zero).
pub fn bisect_increasing<F: FnMut(f64) -> f64>(
    mut f: F,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
) -> Result<f64> {
    let flo = f(lo);
    let fhi = f(hi);
    if !(flo <= target && target <= fhi) {
        return Err(Error::DomainError(format!(
            "target {target:e} not bracketed by f({lo:e})={flo:e}, f({hi:e})={fhi:e}"
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * mid.abs().max(f64::MIN_POSITIVE) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mid = 0.5 * (lo + hi);
    if hi - lo <= rel_tol * mid.abs() {
        Ok(mid)
    } else {
        Err(Error::NotConverged(format!("bisection bracket [{lo:e}, {hi:e}] after {MAX_ITER} iterations")))
    }
}

/// Locates the boundary of a predicate that holds on `[lo, t)` and fails on
/// `[t, hi]`. Returns the final bracket `(last_true, first_false)` with width
/// at most `width`.
pub fn bisect_predicate<P: FnMut(f64) -> bool>(
    mut holds: P,
    mut lo: f64,
    mut hi: f64,
    width: f64,
) -> Result<(f64, f64)> {
    if !holds(lo) || holds(hi) {
        return Err(Error::DomainError(format!("predicate not bracketed on [{lo:e}, {hi:e}]")));
    }
    for _ in 0..MAX_ITER {
        if hi - lo <= width {
            return Ok((lo, hi));
        }
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NotConverged(format!("predicate bracket [{lo:e}, {hi:e}]")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cube_root() {
        let x = bisect_increasing(|x| x * x * x, 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((x - 2f64.cbrt()).abs() < 1e-13);
    }

    #[test]
    fn unbracketed_target_rejected() {
        assert!(bisect_increasing(|x| x, 5.0, 0.0, 1.0, 1e-10).is_err());
    }

    #[test]
    fn predicate_boundary() {
        let (a, b) = bisect_predicate(|x| x < 0.3, 0.0, 1.0, 1e-12).unwrap();
        assert!(a < 0.3 && b >= 0.3 && b - a <= 1e-12);
    }
}
