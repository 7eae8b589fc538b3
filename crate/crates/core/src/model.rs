//! Parametric spectrally negative Levy models and their Laplace exponents.
//!
//! A model is the triplet (gaussian variance, linear drift, jump family) with
//! the exponent written as
//!
//!   psi(theta) = b theta + sigma^2 theta^2 / 2 + J(theta),
//!
//! where J is the jump contribution in its family-native form: compound
//! Poisson jumps contribute lambda (L_S(theta) - 1) so that b is the premium
//! rate of the risk-process parametrisation, and the stable family is
//! normalised so that a pure stable model has psi(theta) = scale theta^alpha.
//! `compensated_drift` converts b to the drift of the small-jump-compensated
//! representation when the classical triplet is wanted.

use num_complex::Complex64;
use sha2::{Digest, Sha256};

use crate::claims::ClaimDistribution;
use crate::error::{Error, Result};
use crate::quad;
use crate::special::gamma;

/// Long-run behaviour of the process, decided by the sign of psi'(0+).
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum Regime {
    DriftsUp,
    Oscillates,
    DriftsDown,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::DriftsUp => write!(f, "drifts to +inf"),
            Regime::Oscillates => write!(f, "oscillates"),
            Regime::DriftsDown => write!(f, "drifts to -inf"),
        }
    }
}

/// Downward jump structure of the model.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpFamily {
    /// No jumps (Brownian motion with drift).
    None,
    /// Finite-activity jumps: Poisson arrivals of `rate` with i.i.d. claims.
    CompoundPoisson { rate: f64, claim: ClaimDistribution },
    /// Spectrally negative stable jumps with index alpha in (1,2),
    /// normalised so the pure jump part contributes scale * theta^alpha.
    Stable { alpha: f64, scale: f64 },
}

/// A spectrally negative Levy process given by its parametric triplet.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyModel {
    gaussian_var: f64,
    drift: f64,
    jumps: JumpFamily,
}

impl LevyModel {
    /// General constructor; prefer the named family constructors below.
    pub fn new(gaussian_var: f64, drift: f64, jumps: JumpFamily) -> Result<Self> {
        if !(gaussian_var >= 0.0 && gaussian_var.is_finite()) {
            return Err(Error::InvalidModel(format!(
                "gaussian variance must be finite and nonnegative, got {gaussian_var}"
            )));
        }
        if !drift.is_finite() {
            return Err(Error::InvalidModel(format!("drift must be finite, got {drift}")));
        }
        match &jumps {
            JumpFamily::None => {
                if gaussian_var == 0.0 {
                    return Err(Error::InvalidModel(
                        "pure drift is excluded: need gaussian_var > 0 or jumps".into(),
                    ));
                }
            }
            JumpFamily::CompoundPoisson { rate, claim } => {
                if !(*rate > 0.0 && rate.is_finite()) {
                    return Err(Error::InvalidModel(format!(
                        "jump rate must be positive, got {rate}"
                    )));
                }
                claim.validate()?;
                if gaussian_var == 0.0 && drift <= 0.0 {
                    // monotone paths fall outside the fluctuation identities
                    return Err(Error::InvalidModel(
                        "compound Poisson model without a gaussian part needs a positive \
                         premium rate, otherwise all paths are nonincreasing"
                            .into(),
                    ));
                }
            }
            JumpFamily::Stable { alpha, scale } => {
                if !(*alpha > 1.0 && *alpha < 2.0) {
                    return Err(Error::InvalidModel(format!(
                        "stable index must lie in (1,2), got {alpha}"
                    )));
                }
                if !(*scale > 0.0 && scale.is_finite()) {
                    return Err(Error::InvalidModel(format!(
                        "stable scale must be positive, got {scale}"
                    )));
                }
            }
        }
        Ok(Self { gaussian_var, drift, jumps })
    }

    /// Brownian motion with drift `p` and variance `sigma2` per unit time.
    pub fn brownian(p: f64, sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidModel(format!(
                "brownian model needs sigma2 > 0, got {sigma2}"
            )));
        }
        Self::new(sigma2, p, JumpFamily::None)
    }

    /// Classical risk process: premium rate `p`, claim arrivals of `rate`.
    pub fn cramer_lundberg(p: f64, rate: f64, claim: ClaimDistribution) -> Result<Self> {
        Self::new(0.0, p, JumpFamily::CompoundPoisson { rate, claim })
    }

    /// Diffusion plus compound Poisson jumps.
    pub fn jump_diffusion(p: f64, sigma2: f64, rate: f64, claim: ClaimDistribution) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidModel(format!(
                "jump diffusion needs sigma2 > 0, got {sigma2}"
            )));
        }
        Self::new(sigma2, p, JumpFamily::CompoundPoisson { rate, claim })
    }

    /// Pure spectrally negative stable process, psi(theta) = scale theta^alpha.
    pub fn stable(alpha: f64, scale: f64) -> Result<Self> {
        Self::new(0.0, 0.0, JumpFamily::Stable { alpha, scale })
    }

    pub fn gaussian_var(&self) -> f64 {
        self.gaussian_var
    }

    /// Coefficient of theta in psi (premium rate for compound Poisson models).
    pub fn drift(&self) -> f64 {
        self.drift
    }

    pub fn jumps(&self) -> &JumpFamily {
        &self.jumps
    }

    /// Drift c of the small-jump-compensated representation
    /// psi(theta) = c theta + sigma^2 theta^2/2
    ///              + int (e^{-theta y} - 1 + theta y 1_{y<1}) Pi(dy).
    ///
    /// For compound Poisson jumps c = b - lambda E[S 1_{S<1}]; for the stable
    /// family the built-in full compensation is reduced to the truncated one,
    /// c = b + scale * alpha / Gamma(2 - alpha).
    pub fn compensated_drift(&self) -> f64 {
        match &self.jumps {
            JumpFamily::None => self.drift,
            JumpFamily::CompoundPoisson { rate, claim } => {
                self.drift - rate * claim.mean_below_one()
            }
            JumpFamily::Stable { alpha, scale } => {
                self.drift + scale * alpha / gamma(2.0 - alpha)
            }
        }
    }

    /// Density coefficient K of the stable Levy measure K y^{-alpha-1}.
    fn stable_density_coeff(alpha: f64, scale: f64) -> f64 {
        scale * alpha * (alpha - 1.0) / gamma(2.0 - alpha)
    }

    /// Laplace exponent psi(theta) for theta >= 0.
    pub fn laplace_exponent(&self, theta: f64) -> Result<f64> {
        if theta < 0.0 {
            return Err(Error::Domain(format!(
                "laplace exponent is evaluated on theta >= 0, got {theta}"
            )));
        }
        let mut v = self.drift * theta + 0.5 * self.gaussian_var * theta * theta;
        match &self.jumps {
            JumpFamily::None => {}
            JumpFamily::CompoundPoisson { rate, claim } => {
                v += rate * (claim.laplace(theta)? - 1.0);
            }
            JumpFamily::Stable { alpha, scale } => {
                v += scale * theta.powf(*alpha);
            }
        }
        Ok(v)
    }

    /// psi at a complex argument with Re(beta) >= 0 (inversion contour).
    pub fn laplace_exponent_complex(&self, beta: Complex64) -> Result<Complex64> {
        let mut v = beta * self.drift + beta * beta * (0.5 * self.gaussian_var);
        match &self.jumps {
            JumpFamily::None => {}
            JumpFamily::CompoundPoisson { rate, claim } => {
                v += (claim.laplace_complex(beta)? - 1.0) * *rate;
            }
            JumpFamily::Stable { alpha, scale } => {
                v += beta.powc(Complex64::from(*alpha)) * *scale;
            }
        }
        Ok(v)
    }

    /// k-th derivative of psi at theta >= 0, where theta = 0 means the right
    /// limit. May be +/-infinity at 0+ exactly when the k-th jump moment
    /// diverges; the sign is (-1)^k.
    pub fn laplace_exponent_derivative(&self, theta: f64, k: u32) -> Result<f64> {
        if k == 0 {
            return self.laplace_exponent(theta);
        }
        if theta < 0.0 {
            return Err(Error::Domain(format!(
                "derivative needs theta >= 0, got {theta}"
            )));
        }
        let poly = match k {
            1 => self.drift + self.gaussian_var * theta,
            2 => self.gaussian_var,
            _ => 0.0,
        };
        let jump = match &self.jumps {
            JumpFamily::None => 0.0,
            JumpFamily::CompoundPoisson { rate, claim } => {
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                let m = if theta == 0.0 {
                    claim.moment(k as f64)
                } else {
                    claim.laplace_moment(theta, k)?
                };
                if m.is_infinite() {
                    return Ok(sign * f64::INFINITY);
                }
                sign * rate * m
            }
            JumpFamily::Stable { alpha, scale } => {
                // falling factorial alpha (alpha-1) ... (alpha-k+1)
                let mut ff = 1.0;
                for i in 0..k {
                    ff *= alpha - i as f64;
                }
                if theta == 0.0 {
                    match k {
                        1 => 0.0,
                        _ => {
                            // theta^{alpha-k} -> +inf; the falling factorial
                            // alternates in sign from k = 2 onwards
                            return Ok(if ff > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY });
                        }
                    }
                } else {
                    scale * ff * theta.powf(alpha - k as f64)
                }
            }
        };
        Ok(poly + jump)
    }

    /// int_{[1,inf)} y^kappa Pi(dy); +infinity exactly when kappa reaches the
    /// family's moment order bound (decided symbolically, never by
    /// quadrature).
    pub fn jump_moment(&self, kappa: f64) -> Result<f64> {
        if !(kappa > 0.0) {
            return Err(Error::Domain(format!(
                "jump moment order must be positive, got {kappa}"
            )));
        }
        match &self.jumps {
            JumpFamily::None => Ok(0.0),
            JumpFamily::CompoundPoisson { rate, claim } => {
                if kappa >= claim.moment_order_sup() {
                    return Ok(f64::INFINITY);
                }
                let v = match claim {
                    ClaimDistribution::Pareto { alpha, xm } => {
                        let lower = xm.max(1.0);
                        alpha * xm.powf(*alpha) * lower.powf(kappa - alpha) / (alpha - kappa)
                    }
                    ClaimDistribution::LogNormal { location, shape } => {
                        // E[S^kappa; S >= 1] in closed form
                        let m = location + kappa * shape * shape;
                        claim.moment(kappa) * crate::special::normal_cdf(m / shape)
                    }
                    ClaimDistribution::Deterministic { a } => {
                        if *a >= 1.0 {
                            a.powf(kappa)
                        } else {
                            0.0
                        }
                    }
                    ClaimDistribution::Exponential { mu } => {
                        let mu = *mu;
                        quad::integrate_to_inf(
                            |y| Ok(y.powf(kappa) * mu * (-mu * y).exp()),
                            1.0,
                            1e-11,
                            1e-300,
                        )?
                    }
                };
                Ok(rate * v)
            }
            JumpFamily::Stable { alpha, scale } => {
                if kappa >= *alpha {
                    Ok(f64::INFINITY)
                } else {
                    Ok(Self::stable_density_coeff(*alpha, *scale) / (alpha - kappa))
                }
            }
        }
    }

    /// Tail mass Pi((y, inf)) of the jump measure.
    pub fn jump_tail(&self, y: f64) -> f64 {
        match &self.jumps {
            JumpFamily::None => 0.0,
            JumpFamily::CompoundPoisson { rate, claim } => rate * claim.tail(y),
            JumpFamily::Stable { alpha, scale } => {
                Self::stable_density_coeff(*alpha, *scale) / alpha * y.powf(-alpha)
            }
        }
    }

    /// Integrated tail int_y^inf Pi((u, inf)) du for y > 0.
    pub fn jump_tail_integral(&self, y: f64) -> f64 {
        match &self.jumps {
            JumpFamily::None => 0.0,
            JumpFamily::CompoundPoisson { rate, claim } => rate * claim.expected_excess(y),
            JumpFamily::Stable { alpha, scale } => {
                Self::stable_density_coeff(*alpha, *scale) / (alpha * (alpha - 1.0))
                    * y.powf(1.0 - alpha)
            }
        }
    }

    /// Mean of the process per unit time, psi'(0+) = E[X_1], computed in
    /// closed form from the parameters (this is what regime detection
    /// compares against zero, so no quadrature is involved).
    pub fn mean(&self) -> f64 {
        match &self.jumps {
            JumpFamily::None => self.drift,
            JumpFamily::CompoundPoisson { rate, claim } => self.drift - rate * claim.mean(),
            JumpFamily::Stable { .. } => self.drift,
        }
    }

    /// Trichotomy of long-run behaviour by the exact sign of the mean.
    pub fn regime(&self) -> Regime {
        let m = self.mean();
        if m > 0.0 {
            Regime::DriftsUp
        } else if m == 0.0 {
            Regime::Oscillates
        } else {
            Regime::DriftsDown
        }
    }

    /// True when paths have unbounded variation (gaussian part or stable
    /// jumps); governs the x = 0 conventions for scale functions.
    pub fn unbounded_variation(&self) -> bool {
        self.gaussian_var > 0.0 || matches!(self.jumps, JumpFamily::Stable { .. })
    }

    /// Finiteness of psi''(0+), decided symbolically: the gaussian part is
    /// always finite, so this is finiteness of the second jump moment.
    pub fn second_derivative_finite(&self) -> bool {
        match &self.jumps {
            JumpFamily::None => true,
            JumpFamily::CompoundPoisson { claim, .. } => claim.moment_order_sup() > 2.0,
            JumpFamily::Stable { .. } => false,
        }
    }

    /// Canonical one-line description of the parameters.
    pub fn label(&self) -> String {
        match &self.jumps {
            JumpFamily::None => format!("brownian(p={},sigma2={})", self.drift, self.gaussian_var),
            JumpFamily::CompoundPoisson { rate, claim } => {
                if self.gaussian_var == 0.0 {
                    format!("cramer-lundberg(p={},lambda={},{})", self.drift, rate, claim.label())
                } else {
                    format!(
                        "jump-diffusion(p={},sigma2={},lambda={},{})",
                        self.drift,
                        self.gaussian_var,
                        rate,
                        claim.label()
                    )
                }
            }
            JumpFamily::Stable { alpha, scale } => {
                if self.drift == 0.0 && self.gaussian_var == 0.0 {
                    format!("stable(alpha={alpha},scale={scale})")
                } else {
                    format!(
                        "stable(alpha={alpha},scale={scale},p={},sigma2={})",
                        self.drift, self.gaussian_var
                    )
                }
            }
        }
    }

    /// Short content hash of the parameters, for reports and sample files.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.label().as_bytes());
        let out = hasher.finalize();
        out[..6].iter().map(|b| format!("{b:02x}")).collect()
    }
}
