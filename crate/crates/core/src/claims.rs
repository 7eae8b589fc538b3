//! Claim size distributions for compound Poisson jump families.
//!
//! Each family exposes the pieces the analytic engines need: tail function,
//! exact moments with a symbolic finiteness bound, Laplace transform (real
//! and complex argument), and a sampler driven by explicit inverse-CDF or
//! normal transforms so sample streams are reproducible.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::quad;
use crate::special::normal_cdf;

/// Relative tolerance for quadrature-evaluated Laplace transforms.
const LT_RTOL: f64 = 1e-10;
/// Standard-normal quantile of 1e-14: lognormal integrals truncate here.
const LOGNORMAL_CUT: f64 = 7.650_628_717_144_824;
/// e^{-w} is below 3e-20 past this point.
const EXP_CUT: f64 = 45.0;

/// Positive claim size distribution of a compound Poisson jump family.
#[derive(Debug, Clone, PartialEq)]
pub enum ClaimDistribution {
    /// Exponential with rate `mu` (mean 1/mu).
    Exponential { mu: f64 },
    /// Pareto with tail exponent `alpha` (> 1) and minimum `xm` (> 0).
    Pareto { alpha: f64, xm: f64 },
    /// Lognormal: log S ~ Normal(location, shape^2).
    LogNormal { location: f64, shape: f64 },
    /// Point mass at `a`.
    Deterministic { a: f64 },
}

impl ClaimDistribution {
    pub(crate) fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        match *self {
            Self::Exponential { mu } => {
                if !(mu > 0.0 && mu.is_finite()) {
                    return bad(format!("exponential claim rate mu must be positive, got {mu}"));
                }
            }
            Self::Pareto { alpha, xm } => {
                if !(alpha > 1.0 && alpha.is_finite()) {
                    return bad(format!("pareto tail exponent must exceed 1, got {alpha}"));
                }
                if !(xm > 0.0 && xm.is_finite()) {
                    return bad(format!("pareto minimum must be positive, got {xm}"));
                }
            }
            Self::LogNormal { location, shape } => {
                if !location.is_finite() {
                    return bad(format!("lognormal location must be finite, got {location}"));
                }
                if !(shape > 0.0 && shape.is_finite()) {
                    return bad(format!("lognormal shape must be positive, got {shape}"));
                }
            }
            Self::Deterministic { a } => {
                if !(a > 0.0 && a.is_finite()) {
                    return bad(format!("deterministic claim size must be positive, got {a}"));
                }
            }
        }
        Ok(())
    }

    /// sup{ r >= 0 : E[S^r] < infinity }. Infinite for every family except
    /// Pareto, where it equals the tail exponent.
    pub fn moment_order_sup(&self) -> f64 {
        match *self {
            Self::Pareto { alpha, .. } => alpha,
            _ => f64::INFINITY,
        }
    }

    /// E[S^r] for r > 0; +infinity where the moment diverges.
    pub fn moment(&self, r: f64) -> f64 {
        match *self {
            Self::Exponential { mu } => crate::special::gamma(r + 1.0) / mu.powf(r),
            Self::Pareto { alpha, xm } => {
                if r >= alpha {
                    f64::INFINITY
                } else {
                    alpha * xm.powf(r) / (alpha - r)
                }
            }
            Self::LogNormal { location, shape } => {
                (r * location + 0.5 * r * r * shape * shape).exp()
            }
            Self::Deterministic { a } => a.powf(r),
        }
    }

    pub fn mean(&self) -> f64 {
        self.moment(1.0)
    }

    /// E[S * 1_{S < 1}]: the truncated mean that converts between the
    /// compensated drift and the premium-rate parametrisation.
    pub fn mean_below_one(&self) -> f64 {
        match *self {
            Self::Exponential { mu } => (1.0 - (-mu).exp() * (1.0 + mu)) / mu,
            Self::Pareto { alpha, xm } => {
                if xm >= 1.0 {
                    0.0
                } else {
                    // int_{xm}^1 y alpha xm^alpha y^{-alpha-1} dy
                    alpha / (alpha - 1.0) * (xm - xm.powf(alpha))
                }
            }
            Self::LogNormal { location, shape } => {
                let m = location;
                let s = shape;
                (m + 0.5 * s * s).exp() * normal_cdf(-(m + s * s) / s)
            }
            Self::Deterministic { a } => {
                if a < 1.0 {
                    a
                } else {
                    0.0
                }
            }
        }
    }

    /// Survival function P(S > y).
    pub fn tail(&self, y: f64) -> f64 {
        if y < 0.0 {
            return 1.0;
        }
        match *self {
            Self::Exponential { mu } => (-mu * y).exp(),
            Self::Pareto { alpha, xm } => {
                if y < xm {
                    1.0
                } else {
                    (xm / y).powf(alpha)
                }
            }
            Self::LogNormal { location, shape } => {
                if y <= 0.0 {
                    1.0
                } else {
                    normal_cdf(-(y.ln() - location) / shape)
                }
            }
            Self::Deterministic { a } => {
                if y < a {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Integrated tail E[(S - y)^+] = int_y^inf P(S > u) du.
    pub fn expected_excess(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return self.mean() - y;
        }
        match *self {
            Self::Exponential { mu } => (-mu * y).exp() / mu,
            Self::Pareto { alpha, xm } => {
                if y <= xm {
                    (xm - y) + xm / (alpha - 1.0)
                } else {
                    xm.powf(alpha) * y.powf(1.0 - alpha) / (alpha - 1.0)
                }
            }
            Self::LogNormal { location, shape } => {
                let m = location;
                let s = shape;
                let z = (y.ln() - m) / s;
                (m + 0.5 * s * s).exp() * normal_cdf(s - z) - y * normal_cdf(-z)
            }
            Self::Deterministic { a } => (a - y).max(0.0),
        }
    }

    /// Laplace transform E[e^{-theta S}] for real theta >= 0.
    ///
    /// Closed form for exponential and deterministic claims; Pareto and
    /// lognormal are evaluated by adaptive quadrature and report an error if
    /// it fails to converge.
    pub fn laplace(&self, theta: f64) -> Result<f64> {
        if theta < 0.0 {
            return Err(Error::Domain(format!(
                "claim Laplace transform needs theta >= 0, got {theta}"
            )));
        }
        if theta == 0.0 {
            return Ok(1.0);
        }
        match *self {
            Self::Exponential { mu } => Ok(mu / (mu + theta)),
            Self::Deterministic { a } => Ok((-theta * a).exp()),
            Self::Pareto { .. } | Self::LogNormal { .. } => self.weighted_transform(theta, 0),
        }
    }

    /// E[S^k e^{-theta S}] for integer k >= 0 (sign left to the caller).
    ///
    /// At theta = 0 this is the plain k-th moment, possibly +infinity.
    pub fn laplace_moment(&self, theta: f64, k: u32) -> Result<f64> {
        if theta < 0.0 {
            return Err(Error::Domain(format!(
                "claim Laplace transform needs theta >= 0, got {theta}"
            )));
        }
        if k == 0 {
            return self.laplace(theta);
        }
        match *self {
            Self::Exponential { mu } => {
                let mut fact = 1.0;
                for i in 2..=k {
                    fact *= i as f64;
                }
                Ok(fact * mu / (mu + theta).powi(k as i32 + 1))
            }
            Self::Deterministic { a } => Ok(a.powi(k as i32) * (-theta * a).exp()),
            Self::Pareto { .. } => {
                if theta == 0.0 {
                    return Ok(self.moment(k as f64));
                }
                self.weighted_transform(theta, k)
            }
            Self::LogNormal { .. } => {
                if theta == 0.0 {
                    return Ok(self.moment(k as f64));
                }
                self.weighted_transform(theta, k)
            }
        }
    }

    /// Quadrature backend for E[S^k e^{-theta S}] on the families without a
    /// closed transform.
    fn weighted_transform(&self, theta: f64, k: u32) -> Result<f64> {
        match *self {
            Self::Pareto { alpha, xm } => {
                // substitute w = theta (y - xm): smooth decaying integrand
                let pref = (-theta * xm).exp();
                let v = quad::integrate(
                    |w| {
                        let y = xm + w / theta;
                        Ok((-w).exp() * y.powi(k as i32) * alpha * xm.powf(alpha)
                            / y.powf(alpha + 1.0))
                    },
                    0.0,
                    EXP_CUT,
                    LT_RTOL,
                    1e-300,
                )?;
                Ok(pref * v / theta)
            }
            Self::LogNormal { location, shape } => {
                // y = exp(location + shape v), v standard normal
                let inv_sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt().recip();
                quad::integrate(
                    |v| {
                        let y = (location + shape * v).exp();
                        Ok((-theta * y).exp()
                            * y.powi(k as i32)
                            * inv_sqrt_2pi
                            * (-0.5 * v * v).exp())
                    },
                    -LOGNORMAL_CUT,
                    LOGNORMAL_CUT,
                    LT_RTOL,
                    1e-300,
                )
            }
            _ => unreachable!("closed-form families do not use the quadrature backend"),
        }
    }

    /// Laplace transform at complex argument with Re(beta) > 0, as needed by
    /// the scale-function inversion contour.
    pub fn laplace_complex(&self, beta: Complex64) -> Result<Complex64> {
        match *self {
            Self::Exponential { mu } => Ok(mu / (beta + mu)),
            Self::Deterministic { a } => Ok((-beta * a).exp()),
            Self::Pareto { alpha, xm } => {
                if beta.re <= 0.0 {
                    return Err(Error::Domain(
                        "pareto transform needs Re(beta) > 0 off the real axis".into(),
                    ));
                }
                // rotate the contour onto w = beta (y - xm), w real:
                // E[e^{-beta S}] = e^{-beta xm}/beta int_0^inf e^{-w}
                //                  alpha xm^alpha (xm + w/beta)^{-alpha-1} dw
                let v = quad::integrate_complex(
                    |w| {
                        let y = xm + w / beta;
                        Ok((-w).exp() * alpha * xm.powf(alpha) * y.powc(Complex64::from(-alpha - 1.0)))
                    },
                    0.0,
                    EXP_CUT,
                    LT_RTOL,
                    1e-300,
                )?;
                Ok((-beta * xm).exp() * v / beta)
            }
            Self::LogNormal { location, shape } => {
                if beta.re <= 0.0 {
                    return Err(Error::Domain(
                        "lognormal transform needs Re(beta) > 0 off the real axis".into(),
                    ));
                }
                let inv_sqrt_2pi = (2.0 * std::f64::consts::PI).sqrt().recip();
                quad::integrate_complex(
                    |v| {
                        let y = (location + shape * v).exp();
                        Ok((-beta * y).exp() * inv_sqrt_2pi * (-0.5 * v * v).exp())
                    },
                    -LOGNORMAL_CUT,
                    LOGNORMAL_CUT,
                    1e-9,
                    1e-300,
                )
            }
        }
    }

    /// Draw one claim. Exponential and Pareto use inverse-CDF on a single
    /// uniform; lognormal uses one standard normal; deterministic uses none.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Self::Exponential { mu } => {
                let u: f64 = rng.random();
                -(-u).ln_1p() / mu
            }
            Self::Pareto { alpha, xm } => {
                let u: f64 = rng.random();
                xm * (1.0 - u).powf(-1.0 / alpha)
            }
            Self::LogNormal { location, shape } => {
                let n: f64 = StandardNormal.sample(rng);
                (location + shape * n).exp()
            }
            Self::Deterministic { a } => a,
        }
    }

    /// Short stable name for digests and reports.
    pub fn label(&self) -> String {
        match *self {
            Self::Exponential { mu } => format!("exp(mu={mu})"),
            Self::Pareto { alpha, xm } => format!("pareto(alpha={alpha},xm={xm})"),
            Self::LogNormal { location, shape } => format!("lognormal(m={location},s={shape})"),
            Self::Deterministic { a } => format!("det(a={a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_moments_and_transform() {
        let c = ClaimDistribution::Exponential { mu: 1.0 };
        assert_relative_eq!(c.moment(1.0), 1.0);
        assert_relative_eq!(c.moment(2.0), 2.0);
        assert_relative_eq!(c.moment(0.5), crate::special::gamma(1.5), max_relative = 1e-12);
        assert_relative_eq!(c.laplace(1.0).unwrap(), 0.5);
        assert_relative_eq!(c.laplace_moment(0.0, 2).unwrap(), 2.0);
        assert!(c.moment_order_sup().is_infinite());
    }

    #[test]
    fn pareto_moment_boundary() {
        let c = ClaimDistribution::Pareto { alpha: 2.5, xm: 1.0 };
        assert!(c.moment(2.5).is_infinite());
        assert!(c.moment(3.0).is_infinite());
        assert_relative_eq!(c.moment(1.0), 2.5 / 1.5, max_relative = 1e-12);
        assert_relative_eq!(c.moment_order_sup(), 2.5);
    }

    #[test]
    fn pareto_transform_matches_direct_quadrature() {
        let c = ClaimDistribution::Pareto { alpha: 2.5, xm: 1.0 };
        for &theta in &[0.1, 1.0, 10.0] {
            let direct = quad::integrate_to_inf(
                |y| Ok((-theta * y).exp() * 2.5 * y.powf(-3.5)),
                1.0,
                1e-11,
                1e-300,
            )
            .unwrap();
            assert_relative_eq!(c.laplace(theta).unwrap(), direct, max_relative = 1e-8);
        }
    }

    #[test]
    fn pareto_complex_transform_agrees_on_real_axis() {
        let c = ClaimDistribution::Pareto { alpha: 2.5, xm: 1.0 };
        for &theta in &[0.5, 3.0] {
            let z = c.laplace_complex(Complex64::new(theta, 0.0)).unwrap();
            assert_relative_eq!(z.re, c.laplace(theta).unwrap(), max_relative = 1e-8);
            assert!(z.im.abs() < 1e-12);
        }
    }

    #[test]
    fn lognormal_transform_and_truncated_mean() {
        let c = ClaimDistribution::LogNormal { location: 0.0, shape: 1.0 };
        // E[S] = e^{1/2}
        assert_relative_eq!(c.mean(), (0.5f64).exp(), max_relative = 1e-12);
        // transform is within (0,1) and decreasing
        let l1 = c.laplace(0.5).unwrap();
        let l2 = c.laplace(2.0).unwrap();
        assert!(l1 > l2 && l2 > 0.0 && l1 < 1.0);
        // truncated mean by direct quadrature
        let direct = quad::integrate(
            |v: f64| {
                let y = v.exp();
                if y < 1.0 {
                    Ok(y * (-0.5 * v * v).exp() / (2.0 * std::f64::consts::PI).sqrt())
                } else {
                    Ok(0.0)
                }
            },
            -12.0,
            0.0,
            1e-11,
            1e-300,
        )
        .unwrap();
        assert_relative_eq!(c.mean_below_one(), direct, max_relative = 1e-9);
    }

    #[test]
    fn deterministic_point_mass() {
        let c = ClaimDistribution::Deterministic { a: 2.0 };
        assert_relative_eq!(c.laplace(1.0).unwrap(), (-2.0f64).exp());
        assert_relative_eq!(c.moment(3.0), 8.0);
        assert_relative_eq!(c.tail(1.99), 1.0);
        assert_relative_eq!(c.tail(2.0), 0.0);
        assert_relative_eq!(c.mean_below_one(), 0.0);
    }

    #[test]
    fn excess_matches_tail_integral() {
        let cases = [
            ClaimDistribution::Exponential { mu: 2.0 },
            ClaimDistribution::Pareto { alpha: 2.5, xm: 0.5 },
            ClaimDistribution::LogNormal { location: 0.2, shape: 0.8 },
            ClaimDistribution::Deterministic { a: 1.5 },
        ];
        for c in cases {
            for &y in &[0.25, 1.0, 3.0] {
                let direct =
                    quad::integrate_to_inf(|u| Ok(c.tail(u)), y, 1e-10, 1e-12).unwrap();
                assert_relative_eq!(c.expected_excess(y), direct, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(ClaimDistribution::Exponential { mu: 0.0 }.validate().is_err());
        assert!(ClaimDistribution::Pareto { alpha: 1.0, xm: 1.0 }.validate().is_err());
        assert!(ClaimDistribution::Pareto { alpha: 2.0, xm: 0.0 }.validate().is_err());
        assert!(ClaimDistribution::LogNormal { location: 0.0, shape: -1.0 }.validate().is_err());
        assert!(ClaimDistribution::Deterministic { a: 0.0 }.validate().is_err());
    }
}
