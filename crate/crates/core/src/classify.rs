//! Exact moment-existence classification for downward passage times.
//!
//! The decision is purely symbolic on the model parameters: the regime
//! trichotomy, finiteness of jump moments via each family's moment order
//! bound, finiteness of psi''(0+), and the closed-form thresholds known for
//! the driftless Brownian and pure stable families. No quadrature or
//! sampling is consulted, so verdicts are exact and the numerical engines
//! defer to them on any disagreement.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::inverse::InverseExponent;
use crate::model::{JumpFamily, LevyModel, Regime};

/// Existence verdict for E[(tau_x^-)^kappa | tau_x^- < inf].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Finite,
    Infinite,
    Unknown,
}

/// Which rule produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clause {
    /// Downward drift: the passage time even has finite exponential moments.
    ExponentialMoments,
    /// Upward drift: kappa-th moment finite iff the (kappa+1)-th jump moment is.
    JumpMomentCriterion,
    /// Oscillating: no integer moment exists.
    OscillatingInteger,
    /// Oscillating with finite psi''(0+): nothing above order 1/2 exists.
    OscillatingFiniteVariance,
    /// Oscillating with a divergent (kappa*+1)-th jump moment, kappa* <= 1.
    OscillatingHeavyJumps,
    /// Driftless Brownian motion: threshold exactly 1/2.
    BrownianThreshold,
    /// Pure stable: threshold exactly 1 - 1/alpha.
    StableThreshold,
    /// Oscillating case the theory leaves open.
    Open,
}

impl Clause {
    pub fn as_str(&self) -> &'static str {
        match self {
            Clause::ExponentialMoments => "exponential-moments",
            Clause::JumpMomentCriterion => "jump-moment",
            Clause::OscillatingInteger => "oscillating-integer",
            Clause::OscillatingFiniteVariance => "oscillating-finite-variance",
            Clause::OscillatingHeavyJumps => "oscillating-heavy-jumps",
            Clause::BrownianThreshold => "brownian-threshold",
            Clause::StableThreshold => "stable-index-threshold",
            Clause::Open => "open",
        }
    }
}

impl Serialize for Clause {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Classification result with its justification.
#[derive(Debug, Clone, Serialize)]
pub struct MomentVerdict {
    pub verdict: Verdict,
    pub clause: Clause,
    /// sup{kappa' : moment finite} when it is known exactly.
    pub threshold: Option<f64>,
    pub detail: String,
}

impl MomentVerdict {
    fn new(verdict: Verdict, clause: Clause, threshold: Option<f64>, detail: String) -> Self {
        Self { verdict, clause, threshold, detail }
    }
}

/// Moment order bound of the jump measure: sup{r : jump_moment(r) < inf}.
fn jump_order_sup(model: &LevyModel) -> f64 {
    match model.jumps() {
        JumpFamily::None => f64::INFINITY,
        JumpFamily::CompoundPoisson { claim, .. } => claim.moment_order_sup(),
        JumpFamily::Stable { alpha, .. } => *alpha,
    }
}

/// Closed-form moment threshold when the family has one: 1/2 for driftless
/// Brownian motion, 1 - 1/alpha for the pure stable normalisation.
fn special_threshold(model: &LevyModel) -> Option<(f64, Clause)> {
    if model.regime() != Regime::Oscillates {
        return None;
    }
    match model.jumps() {
        JumpFamily::None => Some((0.5, Clause::BrownianThreshold)),
        JumpFamily::Stable { alpha, .. }
            if model.gaussian_var() == 0.0 && model.drift() == 0.0 =>
        {
            Some((1.0 - 1.0 / alpha, Clause::StableThreshold))
        }
        _ => None,
    }
}

/// Classify existence of the kappa-th conditional passage-time moment.
///
/// The barrier level `x` only enters through its validity (x = 0 is excluded
/// for unbounded variation); the verdict itself does not depend on it.
pub fn classify_moment(model: &LevyModel, kappa: f64, x: f64) -> Result<MomentVerdict> {
    if !(kappa > 0.0) {
        return Err(Error::Domain(format!("moment order must be positive, got {kappa}")));
    }
    if x < 0.0 {
        return Err(Error::Domain(format!("barrier level must be nonnegative, got {x}")));
    }
    if x == 0.0 && model.unbounded_variation() {
        return Err(Error::Domain(
            "x = 0 is excluded for unbounded-variation models (passage is immediate)".into(),
        ));
    }

    let special = special_threshold(model);
    let threshold = special.map(|(t, _)| t);

    match model.regime() {
        Regime::DriftsDown => Ok(MomentVerdict::new(
            Verdict::Finite,
            Clause::ExponentialMoments,
            None,
            "the process drifts to -inf, so the passage time has some finite \
             exponential moment and therefore moments of every order"
                .to_string(),
        )),
        Regime::DriftsUp => {
            let sup = jump_order_sup(model);
            let threshold = if sup.is_finite() { Some(sup - 1.0) } else { None };
            if kappa + 1.0 < sup {
                Ok(MomentVerdict::new(
                    Verdict::Finite,
                    Clause::JumpMomentCriterion,
                    threshold,
                    format!(
                        "profitable case: the jump measure has finite moments up to \
                         order {sup}, and kappa + 1 = {} stays below it",
                        kappa + 1.0
                    ),
                ))
            } else {
                Ok(MomentVerdict::new(
                    Verdict::Infinite,
                    Clause::JumpMomentCriterion,
                    threshold,
                    format!(
                        "profitable case: the (kappa+1)-th jump moment diverges \
                         (kappa + 1 = {} >= moment order bound {sup})",
                        kappa + 1.0
                    ),
                ))
            }
        }
        Regime::Oscillates => {
            if kappa >= 1.0 {
                return Ok(MomentVerdict::new(
                    Verdict::Infinite,
                    Clause::OscillatingInteger,
                    threshold,
                    "oscillating case: no moment of order >= 1 exists".to_string(),
                ));
            }
            if model.second_derivative_finite() && kappa > 0.5 {
                return Ok(MomentVerdict::new(
                    Verdict::Infinite,
                    Clause::OscillatingFiniteVariance,
                    threshold,
                    "oscillating case with psi''(0+) < inf: moments above order 1/2 \
                     diverge"
                        .to_string(),
                ));
            }
            let sup = jump_order_sup(model);
            let kappa_star = sup - 1.0;
            if kappa_star > 0.0 && kappa_star <= 1.0 && kappa >= kappa_star {
                return Ok(MomentVerdict::new(
                    Verdict::Infinite,
                    Clause::OscillatingHeavyJumps,
                    threshold,
                    format!(
                        "oscillating case: the jump measure loses its moments at order \
                         {sup}, so every passage moment of order >= {kappa_star} diverges"
                    ),
                ));
            }
            if let Some((t, clause)) = special {
                let verdict = if kappa < t { Verdict::Finite } else { Verdict::Infinite };
                let relation = if kappa < t { "below" } else { "at or above" };
                return Ok(MomentVerdict::new(
                    verdict,
                    clause,
                    Some(t),
                    format!("closed-form threshold {t}: kappa = {kappa} lies {relation} it"),
                ));
            }
            Ok(MomentVerdict::new(
                Verdict::Unknown,
                Clause::Open,
                None,
                format!(
                    "oscillating case with kappa = {kappa} below every applicable \
                     divergence bound; no general finiteness criterion is known here"
                ),
            ))
        }
    }
}

/// Supremum of q such that E[exp(q tau_x^-)] is finite, for models drifting
/// to -infinity: q_sup = -psi(theta_min) where theta_min minimises psi.
pub fn exponential_moment_abscissa(model: &LevyModel) -> Result<f64> {
    if model.regime() != Regime::DriftsDown {
        return Err(Error::Domain(
            "exponential moments of the passage time require psi'(0+) < 0".into(),
        ));
    }
    let inv = InverseExponent::new(model.clone());
    let theta_min = inv.argmin_psi()?;
    Ok(-model.laplace_exponent(theta_min)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::claims::ClaimDistribution;
    use approx::assert_relative_eq;

    fn cl_pareto(p: f64, alpha: f64) -> LevyModel {
        LevyModel::cramer_lundberg(p, 1.0, ClaimDistribution::Pareto { alpha, xm: 1.0 }).unwrap()
    }

    #[test]
    fn drift_up_pareto_boundary() {
        // alpha_P = 2.5 with positive mean: finite iff kappa + 1 < 2.5
        let m = cl_pareto(2.5, 2.5);
        assert_eq!(m.regime(), Regime::DriftsUp);
        let v = classify_moment(&m, 1.0, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Finite);
        assert_eq!(v.clause, Clause::JumpMomentCriterion);
        assert_relative_eq!(v.threshold.unwrap(), 1.5);
        // boundary kappa + 1 = alpha_P is divergent
        let v = classify_moment(&m, 1.5, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Infinite);
        let v = classify_moment(&m, 2.0, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Infinite);
    }

    #[test]
    fn drift_up_light_tails_always_finite() {
        let m = LevyModel::cramer_lundberg(2.0, 1.0, ClaimDistribution::Exponential { mu: 1.0 })
            .unwrap();
        for &kappa in &[0.3, 1.0, 5.0, 20.0] {
            let v = classify_moment(&m, kappa, 1.0).unwrap();
            assert_eq!(v.verdict, Verdict::Finite);
            assert!(v.threshold.is_none());
        }
    }

    #[test]
    fn drift_down_everything_finite() {
        let m = LevyModel::brownian(-1.0, 1.0).unwrap();
        for &kappa in &[0.5, 1.0, 7.0] {
            let v = classify_moment(&m, kappa, 0.5).unwrap();
            assert_eq!(v.verdict, Verdict::Finite);
            assert_eq!(v.clause, Clause::ExponentialMoments);
        }
    }

    #[test]
    fn driftless_brownian_threshold() {
        let m = LevyModel::brownian(0.0, 1.0).unwrap();
        let v = classify_moment(&m, 0.4, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Finite);
        assert_eq!(v.clause, Clause::BrownianThreshold);
        assert_relative_eq!(v.threshold.unwrap(), 0.5);
        // kappa = 1/2 is already divergent
        let v = classify_moment(&m, 0.5, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Infinite);
        assert_eq!(v.clause, Clause::BrownianThreshold);
        // above 1/2 the finite-variance rule fires first
        let v = classify_moment(&m, 0.7, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Infinite);
        assert_eq!(v.clause, Clause::OscillatingFiniteVariance);
        let v = classify_moment(&m, 2.0, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Infinite);
        assert_eq!(v.clause, Clause::OscillatingInteger);
    }

    #[test]
    fn stable_threshold() {
        let m = LevyModel::stable(1.5, 1.0).unwrap();
        // threshold 1 - 1/alpha = 1/3, finite strictly below
        let v = classify_moment(&m, 0.2, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Finite);
        assert_eq!(v.clause, Clause::StableThreshold);
        assert_relative_eq!(v.threshold.unwrap(), 1.0 / 3.0);
        let v = classify_moment(&m, 1.0 / 3.0, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Infinite);
        // kappa >= alpha - 1 = 0.5 is caught by the heavy-jump rule
        let v = classify_moment(&m, 0.6, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Infinite);
        assert_eq!(v.clause, Clause::OscillatingHeavyJumps);
        assert_relative_eq!(v.threshold.unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn oscillating_light_tails_are_open_below_one_half() {
        // p mu = lambda: oscillating risk process with every jump moment finite
        let m = LevyModel::cramer_lundberg(1.0, 1.0, ClaimDistribution::Exponential { mu: 1.0 })
            .unwrap();
        let v = classify_moment(&m, 0.3, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Unknown);
        assert_eq!(v.clause, Clause::Open);
        // exactly 1/2 is not covered by the strict inequality either
        let v = classify_moment(&m, 0.5, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Unknown);
        // above 1/2 the finite-variance rule applies
        let v = classify_moment(&m, 0.51, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Infinite);
        assert_eq!(v.clause, Clause::OscillatingFiniteVariance);
    }

    #[test]
    fn oscillating_heavy_pareto_with_kappa_star_above_one_is_open() {
        // alpha_P = 2.2: kappa* = 1.2 > 1 so the heavy-jump rule cannot be
        // used, and psi''(0+) is finite so only kappa > 1/2 diverges
        let claim = ClaimDistribution::Pareto { alpha: 2.2, xm: 1.0 };
        let p = claim.mean(); // exact oscillation
        let m = LevyModel::cramer_lundberg(p, 1.0, claim).unwrap();
        assert_eq!(m.regime(), Regime::Oscillates);
        let v = classify_moment(&m, 0.3, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Unknown);
        let v = classify_moment(&m, 0.7, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Infinite);
        assert_eq!(v.clause, Clause::OscillatingFiniteVariance);
    }

    #[test]
    fn oscillating_very_heavy_pareto_uses_heavy_jump_rule() {
        // alpha_P = 1.5: kappa* = 0.5, psi''(0+) = inf
        let claim = ClaimDistribution::Pareto { alpha: 1.5, xm: 1.0 };
        let p = claim.mean();
        let m = LevyModel::cramer_lundberg(p, 1.0, claim).unwrap();
        assert_eq!(m.regime(), Regime::Oscillates);
        let v = classify_moment(&m, 0.7, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Infinite);
        assert_eq!(v.clause, Clause::OscillatingHeavyJumps);
        let v = classify_moment(&m, 0.3, 1.0).unwrap();
        assert_eq!(v.verdict, Verdict::Unknown);
    }

    #[test]
    fn monotonicity_in_kappa() {
        let models = [
            LevyModel::brownian(0.0, 1.0).unwrap(),
            LevyModel::stable(1.5, 1.0).unwrap(),
            cl_pareto(2.5, 2.5),
        ];
        for m in &models {
            let mut seen_infinite = false;
            for i in 1..=40 {
                let kappa = 0.05 * i as f64;
                let v = classify_moment(m, kappa, 1.0).unwrap();
                if seen_infinite {
                    assert_eq!(
                        v.verdict,
                        Verdict::Infinite,
                        "verdict must stay infinite at kappa = {kappa} for {}",
                        m.label()
                    );
                }
                if v.verdict == Verdict::Infinite {
                    seen_infinite = true;
                }
            }
        }
    }

    #[test]
    fn verdict_is_independent_of_x() {
        let m = cl_pareto(2.5, 2.5);
        let a = classify_moment(&m, 1.2, 0.0).unwrap();
        let b = classify_moment(&m, 1.2, 7.0).unwrap();
        assert_eq!(a.verdict, b.verdict);
        assert_eq!(a.clause, b.clause);
    }

    #[test]
    fn barrier_validity_is_enforced() {
        let m = LevyModel::brownian(0.0, 1.0).unwrap();
        assert!(classify_moment(&m, 0.3, 0.0).is_err());
        assert!(classify_moment(&m, 0.3, -1.0).is_err());
        assert!(classify_moment(&m, 0.0, 1.0).is_err());
        // bounded variation admits x = 0
        let cl = cl_pareto(2.5, 2.5);
        assert!(classify_moment(&cl, 0.5, 0.0).is_ok());
    }

    #[test]
    fn abscissa_brownian_closed_form() {
        // psi = -theta + theta^2/2 has minimum -1/2 at theta = 1
        let m = LevyModel::brownian(-1.0, 1.0).unwrap();
        assert_relative_eq!(exponential_moment_abscissa(&m).unwrap(), 0.5, max_relative = 1e-10);
    }

    #[test]
    fn abscissa_drift_down_cl_is_positive() {
        let m = LevyModel::cramer_lundberg(1.0, 2.0, ClaimDistribution::Exponential { mu: 1.0 })
            .unwrap();
        assert!(m.mean() < 0.0);
        let q = exponential_moment_abscissa(&m).unwrap();
        assert!(q > 0.0, "abscissa must be positive, got {q}");
    }

    #[test]
    fn abscissa_needs_downward_drift() {
        let m = LevyModel::brownian(1.0, 1.0).unwrap();
        assert!(exponential_moment_abscissa(&m).is_err());
    }

    #[test]
    fn verdict_serialises_with_clause_tag() {
        let m = cl_pareto(2.5, 2.5);
        let v = classify_moment(&m, 1.0, 1.0).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        assert_eq!(json["verdict"], "Finite");
        assert_eq!(json["clause"], "jump-moment");
        assert_eq!(json["threshold"], 1.5);
        assert!(json["detail"].is_string());
    }
}
