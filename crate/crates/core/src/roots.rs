//! Bracketed root finding for convex increasing functions.
//!
//! The Laplace exponent is strictly convex with psi(theta) -> infinity, so
//! every equation psi(theta) = q solved here has a bracket on which the
//! function is increasing. Newton steps are taken from the right end of the
//! bracket (monotone convergence for convex functions) and fall back to
//! bisection whenever a step would leave the bracket. Function evaluations
//! are fallible because some jump families evaluate their Laplace transform
//! by quadrature.

use crate::error::{Error, Result};

const MAX_ITER: usize = 200;

/// Solve f(x) = target on [lo, hi] where f is increasing on the bracket and
/// f(lo) <= target <= f(hi). `df` is the derivative. Iteration stops when
/// |f(x) - target| <= resid_tol or the bracket collapses to machine width.
pub fn newton_bisect<F, D>(
    f: F,
    df: D,
    lo: f64,
    hi: f64,
    target: f64,
    resid_tol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
    D: Fn(f64) -> Result<f64>,
{
    let mut lo = lo;
    let mut hi = hi;
    let f_lo = f(lo)? - target;
    let f_hi = f(hi)? - target;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::RootFind(format!(
            "bracket [{lo:.6e}, {hi:.6e}] does not straddle target {target:.6e} \
             (f-target: {f_lo:.3e}, {f_hi:.3e})"
        )));
    }
    if f_lo == 0.0 && f_hi == 0.0 {
        // flat stretch at the target level: the sup convention picks hi
        return Ok(hi);
    }
    let mut x = hi;
    let mut fx = f_hi;
    for _ in 0..MAX_ITER {
        if fx.abs() <= resid_tol {
            return Ok(x);
        }
        if fx > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let d = df(x)?;
        let mut next = if d > 0.0 { x - fx / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (hi - lo) <= f64::EPSILON * (1.0 + x.abs()) {
            return Ok(x);
        }
        x = next;
        fx = f(x)? - target;
    }
    Err(Error::RootFind(format!(
        "no convergence after {MAX_ITER} iterations; bracket [{lo:.6e}, {hi:.6e}], \
         residual {fx:.3e}"
    )))
}

/// Expand [start, 2*start, ...] geometrically until f(hi) >= target.
pub fn expand_upper<F>(f: F, start: f64, target: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut hi = start.max(f64::MIN_POSITIVE);
    for _ in 0..2100 {
        if f(hi)? >= target {
            return Ok(hi);
        }
        hi *= 2.0;
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::RootFind(format!(
        "could not bracket target {target:.6e} by geometric expansion from {start:.6e}"
    )))
}
