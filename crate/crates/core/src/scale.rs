//! q-scale functions W and Z, the passage-time Laplace transform, and ruin
//! probabilities.
//!
//! W^(q) is defined through its Laplace transform 1/(psi(beta) - q) on
//! beta > Phi(q); Brownian and Cramer-Lundberg-exponential models use exact
//! partial-fraction inversion, every other family goes through the numerical
//! contour inversion (which the closed forms also validate). Z^(q) is the
//! normalised integral of W, evaluated by adaptive quadrature over the W
//! evaluator.

use crate::claims::ClaimDistribution;
use crate::error::{Error, Result};
use crate::inverse::InverseExponent;
use crate::invlap;
use crate::model::{JumpFamily, LevyModel};
use crate::quad;
use crate::special::gamma;

/// Tuning of the numerical inversion path.
#[derive(Debug, Clone)]
pub struct InversionParams {
    /// Number of contour terms M; the node count is 2M + 1.
    pub contour_terms: usize,
    /// Accepted inversion residual, relative to 1 + |value|.
    pub target: f64,
}

impl Default for InversionParams {
    fn default() -> Self {
        // 1e-5 sits above the roundoff floor of the 65-node contour sum in
        // f64 while still far below every consumer's tolerance
        Self { contour_terms: 32, target: 1e-5 }
    }
}

/// Which evaluation route backs scale-function values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Route {
    Brownian,
    ClExponential,
    Inversion,
}

/// Evaluator for W^(q), Z^(q) and the identities built from them.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug)]
pub struct ScaleEvaluator {
    model: LevyModel,
    inverse: InverseExponent,
    params: InversionParams,
    route: Route,
}

impl ScaleEvaluator {
    pub fn new(model: LevyModel) -> Self {
        Self::with_params(model, InversionParams::default())
    }

    pub fn with_params(model: LevyModel, params: InversionParams) -> Self {
        let route = match model.jumps() {
            JumpFamily::None => Route::Brownian,
            JumpFamily::CompoundPoisson { claim, .. }
                if model.gaussian_var() == 0.0
                    && matches!(claim, ClaimDistribution::Exponential { .. }) =>
            {
                Route::ClExponential
            }
            _ => Route::Inversion,
        };
        let inverse = InverseExponent::new(model.clone());
        Self { model, inverse, params, route }
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn inverse(&self) -> &InverseExponent {
        &self.inverse
    }

    /// Method tag for reports: how W values are produced.
    pub fn method(&self) -> &'static str {
        match self.route {
            Route::Brownian | Route::ClExponential => "closed-form",
            Route::Inversion => "inversion",
        }
    }

    /// Stable scale functions lose digits near x = 0; callers surface this.
    pub fn experimental(&self) -> bool {
        matches!(self.model.jumps(), JumpFamily::Stable { .. })
    }

    /// W^(q)(x). Zero for x < 0; at x = 0 the right limit is positive for
    /// bounded variation (1/drift) and zero for unbounded variation.
    pub fn scale_w(&self, q: f64, x: f64) -> Result<f64> {
        if q < 0.0 {
            return Err(Error::Domain(format!("scale functions need q >= 0, got {q}")));
        }
        if x < 0.0 {
            return Ok(0.0);
        }
        if x == 0.0 {
            return Ok(if self.model.unbounded_variation() {
                0.0
            } else {
                1.0 / self.model.drift()
            });
        }
        match self.route {
            Route::Brownian => self.w_brownian(q, x),
            Route::ClExponential => self.w_cl_exponential(q, x),
            Route::Inversion => self.w_inversion(q, x),
        }
    }

    /// Partial-fraction inversion for psi = p beta + sigma^2 beta^2 / 2.
    fn w_brownian(&self, q: f64, x: f64) -> Result<f64> {
        let p = self.model.drift();
        let s2 = self.model.gaussian_var();
        let disc = (p * p + 2.0 * q * s2).sqrt();
        if disc == 0.0 {
            // driftless at q = 0: 1/psi = 2/(sigma^2 beta^2)
            return Ok(2.0 * x / s2);
        }
        let b_plus = (-p + disc) / s2;
        let b_minus = (-p - disc) / s2;
        Ok(((b_plus * x).exp() - (b_minus * x).exp()) / disc)
    }

    /// Two-pole partial fractions for the compound Poisson exponential-claim
    /// model: 1/(psi(beta) - q) = (mu + beta) / (p (beta - b1)(beta - b2)).
    fn w_cl_exponential(&self, q: f64, x: f64) -> Result<f64> {
        let p = self.model.drift();
        let (rate, mu) = match self.model.jumps() {
            JumpFamily::CompoundPoisson { rate, claim: ClaimDistribution::Exponential { mu } } => {
                (*rate, *mu)
            }
            _ => unreachable!("route is only chosen for CL-exponential"),
        };
        // roots of p b^2 + (p mu - rate - q) b - q mu = 0
        let half_b = 0.5 * (p * mu - rate - q) / p;
        let disc = (half_b * half_b + q * mu / p).sqrt();
        let b1 = -half_b + disc;
        let b2 = -half_b - disc;
        if b1 - b2 < 1e-13 * (1.0 + b1.abs()) {
            // double root at 0: exactly oscillating model at q = 0
            return Ok((mu * x + 1.0) / p);
        }
        let a = (mu + b1) / (p * (b1 - b2));
        let b = (mu + b2) / (p * (b2 - b1));
        Ok(a * (b1 * x).exp() + b * (b2 * x).exp())
    }

    /// Numerical contour inversion of 1/(psi - q), shifted right of Phi(q).
    fn w_inversion(&self, q: f64, x: f64) -> Result<f64> {
        let shift = self.inverse.phi(q)?;
        let transform = |s: num_complex::Complex64| {
            let denom = self.model.laplace_exponent_complex(s)? - q;
            Ok(1.0 / denom)
        };
        let (value, err) =
            invlap::euler_shifted_with_error(&transform, x, shift, self.params.contour_terms)?;
        if err > self.params.target * (1.0 + value.abs()) {
            return Err(Error::InversionAccuracy { achieved: err, target: self.params.target });
        }
        // W is nonnegative; clip inversion noise
        Ok(value.max(0.0))
    }

    /// Exponential-sum form W^(q)(x) = c1 e^{b1 x} + c2 e^{b2 x} of the
    /// closed-form routes, for q > 0 (both roots are then simple, with
    /// b1 = Phi(q) > 0 > b2).
    fn closed_modes(&self, q: f64) -> [(f64, f64); 2] {
        match self.route {
            Route::Brownian => {
                let p = self.model.drift();
                let s2 = self.model.gaussian_var();
                let disc = (p * p + 2.0 * q * s2).sqrt();
                let b_plus = (-p + disc) / s2;
                let b_minus = (-p - disc) / s2;
                [(1.0 / disc, b_plus), (-1.0 / disc, b_minus)]
            }
            Route::ClExponential => {
                let p = self.model.drift();
                let (rate, mu) = match self.model.jumps() {
                    JumpFamily::CompoundPoisson {
                        rate,
                        claim: ClaimDistribution::Exponential { mu },
                    } => (*rate, *mu),
                    _ => unreachable!(),
                };
                let half_b = 0.5 * (p * mu - rate - q) / p;
                let disc = (half_b * half_b + q * mu / p).sqrt();
                let b1 = -half_b + disc;
                let b2 = -half_b - disc;
                let c1 = (mu + b1) / (p * (b1 - b2));
                let c2 = (mu + b2) / (p * (b2 - b1));
                [(c1, b1), (c2, b2)]
            }
            Route::Inversion => unreachable!("modes exist only on closed-form routes"),
        }
    }

    /// Z^(q)(x) = 1 + q int_0^x W^(q)(y) dy; identically 1 for x <= 0 or q = 0.
    ///
    /// On the closed-form routes the integral of the exponential modes is
    /// taken analytically; otherwise adaptive quadrature runs over the W
    /// evaluator.
    pub fn scale_z(&self, q: f64, x: f64) -> Result<f64> {
        if q < 0.0 {
            return Err(Error::Domain(format!("scale functions need q >= 0, got {q}")));
        }
        if x <= 0.0 || q == 0.0 {
            return Ok(1.0);
        }
        if self.route != Route::Inversion {
            let modes = self.closed_modes(q);
            let mut integral = 0.0;
            for (c, b) in modes {
                integral += c * ((b * x).exp() - 1.0) / b;
            }
            return Ok(1.0 + q * integral);
        }
        let integral = quad::integrate(|y| self.scale_w(q, y), 0.0, x, 1e-9, 1e-12)?;
        Ok(1.0 + q * integral)
    }

    fn check_barrier(&self, x: f64) -> Result<()> {
        if x < 0.0 {
            return Err(Error::Domain(format!("barrier level must be nonnegative, got {x}")));
        }
        if x == 0.0 && self.model.unbounded_variation() {
            return Err(Error::Domain(
                "x = 0 is excluded for unbounded-variation models (passage is immediate)".into(),
            ));
        }
        Ok(())
    }

    /// E[e^{-q tau_x^-}; tau_x^- < infinity] = Z^(q)(x) - eta(q) W^(q)(x).
    ///
    /// The raw difference cancels catastrophically once Phi(q) x is large
    /// (both terms grow like e^{Phi(q) x} while the result stays in [0,1]),
    /// so the closed-form routes use the analytically cancelled form and the
    /// numerical route inverts the bounded transform of x -> E[e^{-q tau_x^-}]
    /// directly.
    pub fn passage_lt(&self, q: f64, x: f64) -> Result<f64> {
        self.check_barrier(x)?;
        if q < 0.0 {
            return Err(Error::Domain(format!("passage transform needs q >= 0, got {q}")));
        }
        if q == 0.0 {
            return self.ruin_probability(x);
        }
        if self.route != Route::Inversion {
            // with W = sum_i c_i e^{b_i x}, b_1 = Phi(q):
            //   Z - (q/b_1) W = 1 - q sum_i c_i/b_i
            //                   + q sum_{i>=2} c_i e^{b_i x} (1/b_i - 1/b_1),
            // and the e^{b_1 x} terms cancel exactly
            let modes = self.closed_modes(q);
            let b1 = modes[0].1;
            let mut v = 1.0;
            for (c, b) in modes {
                v -= q * c / b;
            }
            for (c, b) in &modes[1..] {
                v += q * c * (b * x).exp() * (1.0 / b - 1.0 / b1);
            }
            return Ok(v.clamp(0.0, 1.0));
        }
        if x == 0.0 {
            // bounded variation: Z(0) = 1 and W(0+) = 1/drift
            let w0 = 1.0 / self.model.drift();
            let eta = self.inverse.eta(q)?;
            return Ok((1.0 - eta * w0).clamp(0.0, 1.0));
        }
        // x -> E[e^{-q tau_x^-}] is bounded by 1 and its transform
        //   1/beta - q (beta - Phi) / (beta Phi (psi(beta) - q))
        // is analytic on Re > 0 (the point beta = Phi is removable)
        let phi_q = self.inverse.phi(q)?;
        let slope_at_phi = self.model.laplace_exponent_derivative(phi_q, 1)?;
        let transform = |s: num_complex::Complex64| {
            let denom = self.model.laplace_exponent_complex(s)? - q;
            let ratio = if denom.norm() < 1e-10 * (1.0 + q) {
                num_complex::Complex64::from(1.0 / slope_at_phi)
            } else {
                (s - phi_q) / denom
            };
            Ok(1.0 / s - ratio * q / (s * phi_q))
        };
        let (value, err) = invlap::euler_with_error(&transform, x, self.params.contour_terms)?;
        if err > self.params.target * (1.0 + value.abs()) {
            return Err(Error::InversionAccuracy { achieved: err, target: self.params.target });
        }
        Ok(value.clamp(0.0, 1.0))
    }

    /// P(tau_x^- < infinity) = 1 - (0 v psi'(0+)) W^(0)(x); identically 1
    /// unless the process drifts to +infinity.
    pub fn ruin_probability(&self, x: f64) -> Result<f64> {
        self.check_barrier(x)?;
        let mean = self.model.mean();
        if mean <= 0.0 {
            return Ok(1.0);
        }
        let w0 = self.scale_w(0.0, x)?;
        Ok((1.0 - mean * w0).clamp(0.0, 1.0))
    }
}
