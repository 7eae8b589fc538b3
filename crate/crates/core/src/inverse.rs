//! The right inverse Phi of the Laplace exponent and derived quantities:
//! higher derivatives of Phi through the Faa di Bruno / Bell-polynomial
//! recursion, the ratio eta(q) = q / Phi(q), and the conjugate subordinator
//! exponent phi(theta).

use std::sync::atomic::{AtomicU64, Ordering};

use crate::bell::{partial_bell, MAX_ORDER};
use crate::error::{Error, Result};
use crate::model::{JumpFamily, LevyModel, Regime};
use crate::quad;
use crate::roots;

/// Default relative tolerance on the root residual psi(Phi(q)) - q.
const DEFAULT_TOL: f64 = 1e-12;

/// Cached evaluator for Phi(q) and everything built on it.
///
/// Immutable after construction; the only interior state is a lock-free seed
/// for the root bracketing, which is purely a performance hint.
#[derive(Debug)]
pub struct InverseExponent {
    model: LevyModel,
    tolerance: f64,
    root_seed: AtomicU64,
}

impl InverseExponent {
    pub fn new(model: LevyModel) -> Self {
        Self::with_tolerance(model, DEFAULT_TOL)
    }

    pub fn with_tolerance(model: LevyModel, tolerance: f64) -> Self {
        Self {
            model,
            tolerance,
            root_seed: AtomicU64::new(1.0f64.to_bits()),
        }
    }

    pub fn model(&self) -> &LevyModel {
        &self.model
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    fn psi(&self, theta: f64) -> Result<f64> {
        self.model.laplace_exponent(theta)
    }

    fn dpsi(&self, theta: f64) -> Result<f64> {
        self.model.laplace_exponent_derivative(theta, 1)
    }

    /// Location of the minimum of psi for a model drifting to -infinity:
    /// the root of psi'(theta) = 0, which lies in (0, Phi(0)).
    pub(crate) fn argmin_psi(&self) -> Result<f64> {
        if self.model.regime() != Regime::DriftsDown {
            return Err(Error::Domain(
                "psi attains an interior minimum only when psi'(0+) < 0".into(),
            ));
        }
        let d2 = |t: f64| self.model.laplace_exponent_derivative(t, 2);
        let hi = roots::expand_upper(|t| self.dpsi(t), 1.0, 0.0)?;
        let resid_tol = self.tolerance * self.model.mean().abs();
        roots::newton_bisect(|t| self.dpsi(t), d2, 0.0, hi, 0.0, resid_tol)
    }

    /// Phi(q) = sup{ theta >= 0 : psi(theta) = q }, the largest root.
    pub fn phi(&self, q: f64) -> Result<f64> {
        if q < 0.0 {
            return Err(Error::Domain(format!("phi needs q >= 0, got {q}")));
        }
        let drifts_down = self.model.regime() == Regime::DriftsDown;
        if q == 0.0 && !drifts_down {
            return Ok(0.0);
        }
        // left end of the increasing branch of psi
        let lo = if drifts_down { self.argmin_psi()? } else { 0.0 };
        // residual scale: q itself, or the minimum depth when hunting the
        // positive root of psi = 0
        let resid_scale = if q > 0.0 { q } else { -self.psi(lo)? };
        let seed = f64::from_bits(self.root_seed.load(Ordering::Relaxed));
        let start = seed.max(2.0 * lo).max(1.0);
        let hi = roots::expand_upper(|t| self.psi(t), start, q)?;
        let root = roots::newton_bisect(
            |t| self.psi(t),
            |t| self.dpsi(t),
            lo,
            hi,
            q,
            self.tolerance * resid_scale,
        )?;
        self.root_seed.store(root.to_bits(), Ordering::Relaxed);
        Ok(root)
    }

    /// n-th derivative of Phi at q > 0, or at q = 0+ for models drifting to
    /// +infinity. Returns +/-infinity at 0+ when the matching psi-derivative
    /// limit is infinite (the sign alternates as (-1)^{n+1}, Phi being a
    /// Bernstein function).
    pub fn phi_derivative(&self, q: f64, n: u32) -> Result<f64> {
        if n == 0 {
            return self.phi(q);
        }
        let n = n as usize;
        if n > MAX_ORDER {
            return Err(Error::Unsupported(format!(
                "phi derivatives are supported up to order {MAX_ORDER}, requested {n}"
            )));
        }
        if q < 0.0 {
            return Err(Error::Domain(format!("phi derivative needs q >= 0, got {q}")));
        }
        let theta0 = if q == 0.0 {
            if self.model.regime() != Regime::DriftsUp {
                return Err(Error::Domain(
                    "phi derivatives at q = 0+ require psi'(0+) > 0; in the oscillating \
                     and downward-drifting regimes the limit is not given by the recursion"
                        .into(),
                ));
            }
            // the limit is finite iff psi^{(n)}(0+) is finite, i.e. iff the
            // n-th jump moment converges
            if n >= 2 && !self.model.jump_moment(n as f64)?.is_finite() {
                let sign = if n % 2 == 0 { -1.0 } else { 1.0 };
                return Ok(sign * f64::INFINITY);
            }
            0.0
        } else {
            self.phi(q)?
        };

        let mut psi_d = vec![0.0; n + 1]; // psi_d[k] = psi^{(k)}(theta0)
        for (k, slot) in psi_d.iter_mut().enumerate().skip(1) {
            *slot = self.model.laplace_exponent_derivative(theta0, k as u32)?;
        }
        let mut phi_d = vec![0.0; n + 1]; // phi_d[m] = Phi^{(m)}
        phi_d[1] = 1.0 / psi_d[1];
        for m in 2..=n {
            let mut sum = 0.0;
            for j in 1..m {
                sum += psi_d[m + 1 - j] * partial_bell(m, m + 1 - j, &phi_d[1..=j]);
            }
            phi_d[m] = -phi_d[1] * sum;
        }
        Ok(phi_d[n])
    }

    /// eta(q) = q / Phi(q), extended by continuity at q = 0 to psi'(0+) when
    /// the mean is nonnegative and to 0 otherwise.
    pub fn eta(&self, q: f64) -> Result<f64> {
        if q < 0.0 {
            return Err(Error::Domain(format!("eta needs q >= 0, got {q}")));
        }
        if q == 0.0 {
            let m = self.model.mean();
            return Ok(if m >= 0.0 { m } else { 0.0 });
        }
        Ok(q / self.phi(q)?)
    }

    /// Laplace exponent of the conjugate (killed) subordinator,
    ///
    ///   phi(theta) = psi'(0+) + sigma^2/2 theta
    ///                + int_0^inf (1 - e^{-theta y}) Pi((y,inf)) dy,
    ///
    /// evaluated by quadrature of the integrated jump tail. Requires
    /// psi'(0+) >= 0 and satisfies theta * phi(theta) = psi(theta).
    pub fn conjugate_exponent(&self, theta: f64) -> Result<f64> {
        if theta < 0.0 {
            return Err(Error::Domain(format!(
                "conjugate exponent needs theta >= 0, got {theta}"
            )));
        }
        if self.model.regime() == Regime::DriftsDown {
            return Err(Error::Domain(
                "the conjugate subordinator exists only when psi'(0+) >= 0".into(),
            ));
        }
        let mean = self.model.mean();
        if theta == 0.0 {
            return Ok(mean);
        }
        let mut v = mean + 0.5 * self.model.gaussian_var() * theta;
        v += self.jump_tail_transform(theta)?;
        Ok(v)
    }

    /// int_0^inf (1 - e^{-theta y}) Pi((y,inf)) dy for theta > 0.
    fn jump_tail_transform(&self, theta: f64) -> Result<f64> {
        let model = &self.model;
        let integrand = |y: f64| -> Result<f64> {
            Ok((-(-theta * y).exp_m1()) * model.jump_tail(y))
        };
        match model.jumps() {
            JumpFamily::None => Ok(0.0),
            JumpFamily::CompoundPoisson { claim, .. } => {
                // split at the jump-tail kinks, then cut to an analytic tail
                let cut = (45.0 / theta).max(2.0);
                let mut bps = vec![0.0, 1.0f64.min(cut), cut];
                match claim {
                    crate::claims::ClaimDistribution::Deterministic { a } => bps.push(*a),
                    crate::claims::ClaimDistribution::Pareto { xm, .. } => bps.push(*xm),
                    _ => {}
                }
                bps.retain(|&b| b <= cut);
                bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
                bps.dedup();
                let mut total = 0.0;
                for w in bps.windows(2) {
                    total += quad::integrate(integrand, w[0], w[1], 1e-11, 1e-14)?;
                }
                // beyond the cut, 1 - e^{-theta y} = 1 to 3e-20
                total += model.jump_tail_integral(cut);
                Ok(total)
            }
            JumpFamily::Stable { alpha, .. } => {
                // near zero the integrand behaves like theta y^{1-alpha}
                let cut = (45.0 / theta).max(2.0);
                let mut total = quad::integrate_power_singular(
                    integrand,
                    0.0,
                    1.0f64.min(cut),
                    2.0 - alpha,
                    1e-11,
                    1e-14,
                )?;
                if cut > 1.0 {
                    total += quad::integrate(integrand, 1.0, cut, 1e-11, 1e-14)?;
                }
                total += model.jump_tail_integral(cut);
                Ok(total)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claims::ClaimDistribution;
    use approx::assert_relative_eq;

    fn brownian(p: f64) -> InverseExponent {
        InverseExponent::new(LevyModel::brownian(p, 1.0).unwrap())
    }

    fn cl_exp(p: f64, rate: f64, mu: f64) -> InverseExponent {
        InverseExponent::new(
            LevyModel::cramer_lundberg(p, rate, ClaimDistribution::Exponential { mu }).unwrap(),
        )
    }

    #[test]
    fn brownian_phi_closed_form() {
        // psi = p theta + theta^2/2, Phi(q) = sqrt(p^2 + 2q) - p
        let inv = brownian(1.0);
        assert_relative_eq!(inv.phi(4.0).unwrap(), 2.0, max_relative = 1e-11);
        for &q in &[0.01, 0.5, 3.0, 40.0] {
            assert_relative_eq!(
                inv.phi(q).unwrap(),
                (1.0 + 2.0 * q).sqrt() - 1.0,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn phi_at_zero_follows_the_regime() {
        assert_eq!(brownian(1.0).phi(0.0).unwrap(), 0.0);
        assert_eq!(brownian(0.0).phi(0.0).unwrap(), 0.0);
        // drifting down: largest root of -theta + theta^2/2 = 0 is 2
        assert_relative_eq!(brownian(-1.0).phi(0.0).unwrap(), 2.0, max_relative = 1e-10);
    }

    #[test]
    fn phi_zero_for_drift_down_cl() {
        // p=1, lambda=2, Exp(1): psi(theta) = theta - 2 theta/(1+theta),
        // roots of psi = 0: theta = 0 and theta = 1; the sup is 1.
        let inv = cl_exp(1.0, 2.0, 1.0);
        assert_relative_eq!(inv.phi(0.0).unwrap(), 1.0, max_relative = 1e-10);
    }

    #[test]
    fn round_trip_identities() {
        let cases = [brownian(1.0), brownian(0.0), brownian(-1.0), cl_exp(2.0, 1.0, 1.0)];
        for inv in &cases {
            for &q in &[0.0, 0.1, 1.0, 10.0, 100.0] {
                let phi = inv.phi(q).unwrap();
                let back = inv.model().laplace_exponent(phi).unwrap();
                assert!(
                    (back - q).abs() <= 1e-10 * (1.0 + q),
                    "psi(Phi({q})) = {back} for {}",
                    inv.model().label()
                );
            }
        }
    }

    #[test]
    fn first_derivative_is_reciprocal_slope() {
        // CL p=2, lambda=1, Exp(1): psi'(0+) = 1 so Phi'(0+) = 1
        let inv = cl_exp(2.0, 1.0, 1.0);
        assert_relative_eq!(inv.phi_derivative(0.0, 1).unwrap(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn second_derivative_at_zero_brownian() {
        // Phi''(0+) = -psi''(0+)/psi'(0+)^3 = -1 for p = 1, sigma^2 = 1
        let inv = brownian(1.0);
        assert_relative_eq!(inv.phi_derivative(0.0, 2).unwrap(), -1.0, max_relative = 1e-10);
    }

    #[test]
    fn third_derivative_matches_finite_differences() {
        // Richardson-extrapolated central differences of phi at q = 0.5
        let inv = brownian(1.0);
        let d3 = inv.phi_derivative(0.5, 3).unwrap();
        let fd = |h: f64| {
            let p = |dq: f64| inv.phi(0.5 + dq).unwrap();
            (p(2.0 * h) - 2.0 * p(h) + 2.0 * p(-h) - p(-2.0 * h)) / (2.0 * h * h * h)
        };
        let (c1, c2) = (fd(1e-4), fd(5e-5));
        let extrapolated = (4.0 * c2 - c1) / 3.0;
        assert_relative_eq!(d3, extrapolated, max_relative = 1e-6);
        // exact value: 3 (1 + 2q)^{-5/2}
        assert_relative_eq!(d3, 3.0 * (2.0f64).powf(-2.5), max_relative = 1e-9);
    }

    #[test]
    fn derivative_limits_with_infinite_jump_moments() {
        // Pareto(2.5) claims: third moment diverges, so Phi'''(0+) = +inf
        // and Phi''(0+) is finite
        let inv = InverseExponent::new(
            LevyModel::cramer_lundberg(3.0, 1.0, ClaimDistribution::Pareto { alpha: 2.5, xm: 1.0 })
                .unwrap(),
        );
        assert!(inv.phi_derivative(0.0, 2).unwrap().is_finite());
        assert_eq!(inv.phi_derivative(0.0, 3).unwrap(), f64::INFINITY);
        assert_eq!(inv.phi_derivative(0.0, 4).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn derivative_preconditions() {
        assert!(brownian(0.0).phi_derivative(0.0, 1).is_err());
        assert!(brownian(-1.0).phi_derivative(0.0, 2).is_err());
        assert!(brownian(1.0).phi_derivative(1.0, 11).is_err());
        assert!(brownian(1.0).phi_derivative(-1.0, 1).is_err());
    }

    #[test]
    fn eta_examples() {
        // driftless Brownian: eta(q) = sqrt(q/2)
        let inv = brownian(0.0);
        assert_relative_eq!(inv.eta(2.0).unwrap(), 1.0, max_relative = 1e-10);
        assert_relative_eq!(inv.eta(0.5).unwrap(), 0.5, max_relative = 1e-10);
        // continuity at zero
        assert_eq!(inv.eta(0.0).unwrap(), 0.0);
        assert_relative_eq!(cl_exp(2.0, 1.0, 1.0).eta(0.0).unwrap(), 1.0);
        assert_eq!(brownian(-1.0).eta(0.0).unwrap(), 0.0);
    }

    #[test]
    fn conjugate_exponent_brownian() {
        // no jumps: phi(theta) = p + theta/2
        let inv = brownian(1.0);
        for &theta in &[0.0, 0.5, 2.0] {
            assert_relative_eq!(
                inv.conjugate_exponent(theta).unwrap(),
                1.0 + 0.5 * theta,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn conjugacy_identity_cl_exponential() {
        // theta phi(theta) = psi(theta) via quadrature of the tail integral
        let inv = cl_exp(2.0, 1.0, 1.0);
        let phi1 = inv.conjugate_exponent(1.0).unwrap();
        assert_relative_eq!(1.0 * phi1, 1.5, max_relative = 1e-9);
        for &theta in &[0.1, 1.0, 7.0] {
            let lhs = theta * inv.conjugate_exponent(theta).unwrap();
            let rhs = inv.model().laplace_exponent(theta).unwrap();
            assert_relative_eq!(lhs, rhs, max_relative = 1e-9);
        }
    }

    #[test]
    fn conjugate_of_phi_is_eta() {
        let cases = [
            brownian(1.0),
            brownian(0.0),
            cl_exp(2.0, 1.0, 1.0),
            InverseExponent::new(LevyModel::stable(1.5, 1.0).unwrap()),
        ];
        for inv in &cases {
            for &q in &[0.1, 1.0, 10.0] {
                let phi_q = inv.phi(q).unwrap();
                assert_relative_eq!(
                    inv.conjugate_exponent(phi_q).unwrap(),
                    inv.eta(q).unwrap(),
                    max_relative = 1e-8
                );
            }
        }
    }

    #[test]
    fn conjugate_rejects_downward_drift() {
        assert!(brownian(-1.0).conjugate_exponent(1.0).is_err());
    }
}
