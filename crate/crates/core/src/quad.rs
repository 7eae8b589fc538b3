//! Adaptive Gauss-Kronrod quadrature over finite, semi-infinite and
//! power-singular intervals.
//!
//! The core rule is the classical (G7, K15) pair; adaptivity is recursive
//! bisection with the tolerance budget split between halves. Integrands may
//! fail (e.g. an inner evaluation did not converge), so they return `Result`
//! and errors propagate out of the integrator.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Kronrod-15 abscissae on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

/// Kronrod-15 weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Gauss-7 weights for the embedded rule (nodes are XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

const MAX_DEPTH: usize = 50;
const MAX_PANELS: usize = 30_000;

/// One (G7, K15) application on [a, b]. Returns (kronrod, |kronrod - gauss|).
fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = 0.0;
    let mut gauss = 0.0;
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let v = if i == 7 {
            f(c)?
        } else {
            f(c - h * x)? + f(c + h * x)?
        };
        kronrod += wk * v;
        // odd indices (and the centre, i == 7) are the embedded Gauss nodes
        if i % 2 == 1 || i == 7 {
            gauss += WG[i / 2] * v;
        }
    }
    Ok((kronrod * h, (kronrod - gauss).abs() * h))
}

/// Work-queue bisection driver. Returns the integral estimate and the total
/// unresolved error of panels that exhausted the depth or panel budget.
fn adapt<F>(f: &F, a: f64, b: f64, tol: f64) -> Result<(f64, f64)>
where
    F: Fn(f64) -> Result<f64>,
{
    let mut stack = vec![(a, b, tol, 0usize)];
    let mut total = 0.0;
    let mut unresolved = 0.0;
    let mut panels = 0usize;
    while let Some((a, b, tol, depth)) = stack.pop() {
        let (val, err) = gk15(f, a, b)?;
        panels += 1;
        let converged = err <= tol || err <= 64.0 * f64::EPSILON * val.abs();
        if converged || depth >= MAX_DEPTH || panels >= MAX_PANELS {
            total += val;
            if !converged {
                unresolved += err;
            }
            continue;
        }
        let c = 0.5 * (a + b);
        stack.push((a, c, 0.5 * tol, depth + 1));
        stack.push((c, b, 0.5 * tol, depth + 1));
    }
    Ok((total, unresolved))
}

/// Integrate `f` over the finite interval [a, b] to the given tolerances.
///
/// The tolerance actually enforced is `atol + rtol * |estimate|`, refined in
/// two sweeps so the relative part tracks the true magnitude.
pub fn integrate<F>(f: F, a: f64, b: f64, rtol: f64, atol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if a == b {
        return Ok(0.0);
    }
    let (rough, _) = gk15(&f, a, b)?;
    let tol = atol + rtol * rough.abs();
    let (val, unresolved) = adapt(&f, a, b, tol.max(1e-300))?;
    let final_tol = atol + rtol * val.abs();
    if unresolved > final_tol.max(1e-300) * 4.0 {
        return Err(Error::QuadratureNoConvergence {
            achieved: unresolved,
            requested: final_tol,
        });
    }
    Ok(val)
}

/// Integrate `f` over [a, inf) by the substitution u = a + t/(1-t).
pub fn integrate_to_inf<F>(f: F, a: f64, rtol: f64, atol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    integrate(
        |t| {
            let den = 1.0 - t;
            let u = a + t / den;
            if !u.is_finite() {
                return Ok(0.0);
            }
            Ok(f(u)? / (den * den))
        },
        0.0,
        1.0,
        rtol,
        atol,
    )
}

/// Integrate `f` over [a, b] where the integrand behaves like
/// (u - a)^(gamma - 1) near `a` with gamma in (0, 1]; the substitution
/// u = a + v^m with m >= 1/gamma makes the transformed integrand bounded.
pub fn integrate_power_singular<F>(
    f: F,
    a: f64,
    b: f64,
    gamma: f64,
    rtol: f64,
    atol: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let m = (2.0 / gamma.max(0.05)).ceil().min(64.0);
    let width = b - a;
    if width <= 0.0 {
        return Ok(0.0);
    }
    let vmax = width.powf(1.0 / m);
    integrate(
        |v| {
            let u = (a + v.powf(m)).min(b);
            if u <= a {
                return Ok(0.0);
            }
            Ok(f(u)? * m * v.powf(m - 1.0))
        },
        0.0,
        vmax,
        rtol,
        atol,
    )
}

/// Complex-valued (G7, K15) pair on [a, b] along the real axis.
fn gk15_complex<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = Complex64::new(0.0, 0.0);
    let mut gauss = Complex64::new(0.0, 0.0);
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let v = if i == 7 {
            f(c)?
        } else {
            f(c - h * x)? + f(c + h * x)?
        };
        kronrod += wk * v;
        if i % 2 == 1 || i == 7 {
            gauss += WG[i / 2] * v;
        }
    }
    Ok((kronrod * h, (kronrod - gauss).norm() * h))
}

/// Integrate a complex-valued function of a real variable over [a, b].
pub fn integrate_complex<F>(f: F, a: f64, b: f64, rtol: f64, atol: f64) -> Result<Complex64>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let (rough, _) = gk15_complex(&f, a, b)?;
    let tol = (atol + rtol * rough.norm()).max(1e-300);
    let mut stack = vec![(a, b, tol, 0usize)];
    let mut total = Complex64::new(0.0, 0.0);
    let mut unresolved = 0.0;
    let mut panels = 0usize;
    while let Some((a, b, tol, depth)) = stack.pop() {
        let (val, err) = gk15_complex(&f, a, b)?;
        panels += 1;
        let converged = err <= tol || err <= 64.0 * f64::EPSILON * val.norm();
        if converged || depth >= MAX_DEPTH || panels >= MAX_PANELS {
            total += val;
            if !converged {
                unresolved += err;
            }
            continue;
        }
        let c = 0.5 * (a + b);
        stack.push((a, c, 0.5 * tol, depth + 1));
        stack.push((c, b, 0.5 * tol, depth + 1));
    }
    let final_tol = atol + rtol * total.norm();
    if unresolved > final_tol.max(1e-300) * 4.0 {
        return Err(Error::QuadratureNoConvergence {
            achieved: unresolved,
            requested: final_tol,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_is_exact() {
        let v = integrate(|x| Ok(x * x * x - 2.0 * x + 1.0), -1.0, 3.0, 1e-12, 0.0).unwrap();
        // antiderivative x^4/4 - x^2 + x
        assert_relative_eq!(v, (81.0 / 4.0 - 9.0 + 3.0) - (0.25 - 1.0 - 1.0), epsilon = 1e-12);
    }

    #[test]
    fn exponential_tail() {
        let v = integrate_to_inf(|x| Ok((-x).exp()), 1.0, 1e-12, 1e-14).unwrap();
        assert_relative_eq!(v, (-1.0f64).exp(), epsilon = 1e-11);
    }

    #[test]
    fn algebraic_singularity() {
        // int_0^1 x^{-0.9} dx = 10
        let v = integrate_power_singular(|x| Ok(x.powf(-0.9)), 0.0, 1.0, 0.1, 1e-10, 0.0).unwrap();
        assert_relative_eq!(v, 10.0, max_relative = 1e-8);
    }

    #[test]
    fn oscillatory_complex() {
        // int_0^pi e^{ix} dx = 2i
        let v = integrate_complex(
            |x| Ok(Complex64::new(0.0, x).exp()),
            0.0,
            std::f64::consts::PI,
            1e-12,
            0.0,
        )
        .unwrap();
        assert_relative_eq!(v.re, 0.0, epsilon = 1e-10);
        assert_relative_eq!(v.im, 2.0, epsilon = 1e-10);
    }

    #[test]
    fn reports_nonconvergence() {
        // 1/x is not integrable near 0; depth exhaustion must be reported.
        let r = integrate(|x| Ok(1.0 / x), 0.0, 1.0, 1e-10, 0.0);
        assert!(r.is_err());
    }
}
