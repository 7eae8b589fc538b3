//! Marchaud fractional differentiation of Laplace transforms and the
//! passage-time moments built on it.
//!
//! For kappa in (0,1) the Marchaud derivative at z is
//!
//!   D^kappa f(z) = kappa/Gamma(1-kappa) int_z^inf (f(z)-f(u)) (u-z)^{-kappa-1} du,
//!
//! and applied at z = 0 to a Laplace transform it returns the kappa-th moment
//! of the underlying nonnegative variable. For kappa >= 1 with n = floor(kappa)
//! the definition composes an n-th derivative with the fractional remainder;
//! here that derivative is taken by one-sided finite differences over a
//! shrinking offset ladder with extrapolation.
//!
//! Quadrature cannot certify divergence, so the integrand is scanned first:
//! the local exponent gamma of f(z) - f(u) ~ (u-z)^gamma is fitted on a
//! geometric ladder and the integral is declared +infinity when gamma falls
//! at or below kappa (within a small safety margin). Likewise the integral
//! keeps genuine mass at scales far below what f64 evaluation of the
//! difference can resolve, so the near-singularity piece is carried by the
//! fitted power model analytically and only the resolvable range is
//! integrated directly.

use crate::error::{Error, Result};
use crate::inverse::InverseExponent;
use crate::model::Regime;
use crate::quad;
use crate::scale::ScaleEvaluator;
use crate::special::gamma;

/// Tuning for the Marchaud integral and the kappa >= 1 derivative ladder.
#[derive(Debug, Clone)]
pub struct MarchaudConfig {
    /// Truncation point U of the integral; the remainder beyond U is added
    /// analytically. Doubled (up to 1e9) while the tail bound is too large.
    pub upper_cut: f64,
    /// Partial integrals above this value are declared divergent.
    pub divergence_threshold: f64,
    /// Relative tolerance for quadrature and extrapolation acceptance.
    pub rel_tol: f64,
    /// Offsets for the q -> 0+ derivative ladder, strictly decreasing.
    pub eps_ladder: Vec<f64>,
}

impl Default for MarchaudConfig {
    fn default() -> Self {
        Self {
            upper_cut: 1e6,
            divergence_threshold: 1e12,
            rel_tol: 1e-8,
            eps_ladder: vec![1e-2, 1e-3, 1e-4],
        }
    }
}

impl MarchaudConfig {
    fn validate(&self) -> Result<()> {
        if !(self.upper_cut > 1.0) {
            return Err(Error::Domain(format!(
                "upper cut must exceed 1, got {}",
                self.upper_cut
            )));
        }
        if !(self.divergence_threshold > 0.0) {
            return Err(Error::Domain("divergence threshold must be positive".into()));
        }
        if self.eps_ladder.is_empty()
            || self.eps_ladder.windows(2).any(|w| w[1] >= w[0])
            || self.eps_ladder.iter().any(|&e| !(e > 0.0))
        {
            return Err(Error::Domain(
                "offset ladder must be positive and strictly decreasing".into(),
            ));
        }
        Ok(())
    }
}

/// Local behaviour of f(z) - f(z+h) for small h.
enum Scan {
    /// Differences below resolution on the whole ladder.
    Flat,
    /// d(h) ~ coeff * h^gamma.
    Power { gamma: f64, coeff: f64 },
}

/// Fit the local exponent on a geometric ladder h = 1e-2 .. 1e-7.
fn scan_local_exponent<F>(f: &F, z: f64, fz: f64) -> Result<Scan>
where
    F: Fn(f64) -> Result<f64>,
{
    let scale = 1.0 + fz.abs();
    let mut hs = Vec::new();
    let mut ds = Vec::new();
    let mut h = 1e-2;
    while h >= 0.99e-7 {
        let d = fz - f(z + h)?;
        if d < -1e-9 * scale {
            return Err(Error::Unsupported(format!(
                "function increases by {:.3e} just right of z = {z}; the Marchaud \
                 operator here expects a nonincreasing input",
                -d
            )));
        }
        if d > 1e-13 * scale {
            hs.push(h);
            ds.push(d);
        }
        h /= 10.0;
    }
    if hs.len() < 3 {
        return Ok(Scan::Flat);
    }
    // pairwise exponent estimates, finest scales last
    let g: Vec<f64> = ds
        .windows(2)
        .zip(hs.windows(2))
        .map(|(d, h)| (d[0] / d[1]).ln() / (h[0] / h[1]).ln())
        .collect();
    // Aitken extrapolation of the last three estimates removes the leading
    // finite-h bias; fall back to the finest raw estimate if it misbehaves
    let fine = *g.last().unwrap();
    let gamma_hat = if g.len() >= 3 {
        let (a, b, c) = (g[g.len() - 3], g[g.len() - 2], g[g.len() - 1]);
        let (d1, d2) = (b - a, c - b);
        if d1.abs() > 1e-14 && (d2 / d1).abs() < 0.9 {
            let rho = d2 / d1;
            c + d2 * rho / (1.0 - rho)
        } else {
            fine
        }
    } else {
        fine
    };
    let gamma_hat = gamma_hat.clamp(0.01, 1.25);
    // coefficient from the finest usable rung
    let coeff = ds.last().unwrap() / hs.last().unwrap().powf(gamma_hat);
    Ok(Scan::Power { gamma: gamma_hat, coeff })
}

/// Marchaud fractional derivative D^kappa f(z) for kappa in (0,1).
///
/// `f` must be bounded and nonincreasing on [z, inf) (the Laplace-transform
/// use case). Returns +infinity when the integrability scan or the running
/// integral certifies divergence.
pub fn marchaud<F>(f: F, kappa: f64, z: f64, cfg: &MarchaudConfig) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Domain(format!(
            "marchaud derivative is defined here for kappa in (0,1), got {kappa}"
        )));
    }
    if z < 0.0 {
        return Err(Error::Domain(format!("evaluation point must be >= 0, got {z}")));
    }
    cfg.validate()?;
    let fz = f(z)?;
    let scan = scan_local_exponent(&f, z, fz)?;

    // near-singularity handling: analytic power-model piece on [z, z+u_s]
    const U_SWITCH: f64 = 1e-10;
    let (model_piece, gamma_hat) = match scan {
        Scan::Flat => (0.0, 1.0),
        Scan::Power { gamma, coeff } => {
            if gamma < 0.985 && gamma <= kappa + 0.02 {
                // integrand ~ (u-z)^{gamma-kappa-1} is not integrable at z
                return Ok(f64::INFINITY);
            }
            (coeff * U_SWITCH.powf(gamma - kappa) / (gamma - kappa), gamma)
        }
    };

    let diff = |u: f64| -> Result<f64> { Ok((fz - f(u)?).max(0.0)) };

    // resolvable range [z+u_s, z+1]: power substitution keeps the integrand
    // bounded near the singular end
    let m = (3.0 / (gamma_hat - kappa)).ceil().clamp(4.0, 64.0);
    let near = if matches!(scan, Scan::Flat) {
        0.0
    } else {
        quad::integrate(
            |v| {
                let t = v.powf(m);
                Ok(diff(z + t)? * t.powf(-kappa - 1.0) * m * v.powf(m - 1.0))
            },
            U_SWITCH.powf(1.0 / m),
            1.0,
            cfg.rel_tol,
            1e-300,
        )?
    };

    // [z+1, z+U]: logarithmic substitution t = e^w
    let mut u_cut = cfg.upper_cut;
    let far_piece = |a: f64, b: f64| -> Result<f64> {
        quad::integrate(
            |w: f64| {
                let t = w.exp();
                Ok(diff(z + t)? * t.powf(-kappa))
            },
            a.ln(),
            b.ln(),
            cfg.rel_tol,
            1e-300,
        )
    };
    let mut far = far_piece(1.0, u_cut)?;
    let mut acc = model_piece + near + far;
    if acc > cfg.divergence_threshold {
        return Ok(f64::INFINITY);
    }

    // analytic tail: f(z) part exactly, the f(u) part by its monotone bound;
    // keep doubling U until the bound is negligible next to the result
    loop {
        let f_cut = f(z + u_cut)?;
        let tail = (fz - f_cut) * u_cut.powf(-kappa) / kappa;
        let tail_uncertainty = f_cut.abs() * u_cut.powf(-kappa) / kappa;
        if tail_uncertainty <= cfg.rel_tol * (acc + tail).abs() || u_cut >= 1e9 {
            let value = (acc + tail) * kappa / gamma(1.0 - kappa);
            return Ok(value.max(0.0));
        }
        far = far_piece(u_cut, 2.0 * u_cut)?;
        u_cut *= 2.0;
        acc += far;
        if acc > cfg.divergence_threshold {
            return Ok(f64::INFINITY);
        }
    }
}

/// Behaviour of the derivative ladder D_eps as eps decreases.
fn extrapolate_ladder(d: &[f64], rel_tol: f64) -> Result<f64> {
    let n = d.len();
    if d.iter().any(|v| v.is_infinite()) {
        return Ok(f64::INFINITY);
    }
    if n < 2 {
        return Ok(d[0]);
    }
    let last = d[n - 1];
    let d2 = last - d[n - 2];
    let scale = last.abs().max(1e-300);
    if d2.abs() <= rel_tol * scale {
        return Ok(last);
    }
    if n < 3 {
        return Err(Error::Unstable(format!(
            "derivative ladder moved by {d2:.3e} on the final refinement and is too \
             short to extrapolate"
        )));
    }
    let d1 = d[n - 2] - d[n - 3];
    if d1.abs() <= 1e-15 * scale {
        return Err(Error::Unstable(format!(
            "derivative ladder moved by {d2:.3e} on the final refinement with no \
             usable trend before it"
        )));
    }
    let rho = d2 / d1;
    if rho > 0.0 && rho < 0.6 {
        // geometric error decay: Aitken extrapolation with the observed rate
        return Ok(last + d2 * rho / (1.0 - rho));
    }
    if (0.6..=1.6).contains(&rho) && d2.abs() > 10.0 * rel_tol * scale {
        // near-constant increments: logarithmic divergence
        return Ok(if d2 > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY });
    }
    if rho > 1.6 {
        // accelerating increments: power divergence
        return Ok(if d2 > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY });
    }
    Err(Error::Unstable(format!(
        "derivative ladder increments alternate (ratio {rho:.3}); refusing to report \
         a value"
    )))
}

/// kappa-th moment of the nonnegative (possibly defective) law with Laplace
/// transform `g`: E[T^kappa] = D^kappa g(0). Returns +infinity on divergence.
pub fn moment_from_laplace<G>(g: G, kappa: f64, cfg: &MarchaudConfig) -> Result<f64>
where
    G: Fn(f64) -> Result<f64>,
{
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("moment order must be positive, got {kappa}")));
    }
    cfg.validate()?;
    if kappa < 1.0 {
        return marchaud(g, kappa, 0.0, cfg);
    }
    let n = kappa.floor() as u32;
    let frac = kappa - n as f64;

    // m(z) = D^frac g(z); plain g when kappa is an integer
    let m_of = |z: f64| -> Result<f64> {
        if frac == 0.0 {
            g(z)
        } else {
            marchaud(&g, frac, z, cfg)
        }
    };
    if frac > 0.0 && m_of(0.0)?.is_infinite() {
        return Ok(f64::INFINITY);
    }

    // one-sided n-th differences on stencil points 0, eps, ..., n eps with
    // sign (-1)^n, over the shrinking offset ladder
    let mut ladder = Vec::with_capacity(cfg.eps_ladder.len());
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    for &eps in &cfg.eps_ladder {
        let mut acc = 0.0;
        let mut c = 1.0; // (-1)^j binom(n, j)
        for j in 0..=n {
            let v = m_of((n - j) as f64 * eps)?;
            if v.is_infinite() {
                return Ok(f64::INFINITY);
            }
            acc += c * v;
            c *= -((n - j) as f64) / (j as f64 + 1.0);
        }
        ladder.push(sign * acc / eps.powi(n as i32));
    }
    extrapolate_ladder(&ladder, 10.0 * cfg.rel_tol)
}

/// Conditional moment E[(tau_x^-)^kappa | tau_x^- < inf], computed as the
/// Marchaud moment of the passage-time transform divided by the ruin
/// probability. +infinity on divergence.
pub fn passage_moment(
    ev: &ScaleEvaluator,
    x: f64,
    kappa: f64,
    cfg: &MarchaudConfig,
) -> Result<f64> {
    let p_ruin = ev.ruin_probability(x)?;
    if p_ruin <= 0.0 {
        return Err(Error::Domain(format!(
            "passage below level -{x} has probability zero"
        )));
    }
    let m = moment_from_laplace(|q| ev.passage_lt(q, x), kappa, cfg)?;
    Ok(m / p_ruin)
}

/// kappa-th moment of the unit upward passage time, kappa in (0,1):
///
///   E[(tau_1^+)^kappa] = kappa/Gamma(1-kappa) int_0^inf (1-e^{-Phi(u)}) u^{-kappa-1} du,
///
/// which is the Marchaud derivative of u -> e^{-Phi(u)} at zero. Requires a
/// nonnegative mean so that Phi(0) = 0.
pub fn upward_passage_moment(
    inv: &InverseExponent,
    kappa: f64,
    cfg: &MarchaudConfig,
) -> Result<f64> {
    if inv.model().regime() == Regime::DriftsDown {
        return Err(Error::Domain(
            "upward passage times are defective when the process drifts to -inf; \
             the subordinator representation needs psi'(0+) >= 0"
                .into(),
        ));
    }
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Domain(format!(
            "upward passage moments are computed for kappa in (0,1), got {kappa}"
        )));
    }
    marchaud(|u| Ok((-inv.phi(u)?).exp()), kappa, 0.0, cfg)
}
