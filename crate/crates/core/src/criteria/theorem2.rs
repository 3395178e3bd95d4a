use serde::{Deserialize, Serialize};

use super::verdict::{CriterionVerdict, Verdict};
use crate::error::{Error, Result};

/// Placeholder defaults for the theorems' unnamed absolute constants. They
/// carry no normative value.
pub const DEFAULT_C0_UPPER: f64 = std::f64::consts::E;
pub const DEFAULT_C0_LOWER: f64 = 0.5;
pub const DEFAULT_C_BUDGET: f64 = 10.0;

/// Which theorem a preset is meant for. Set explicitly, never inferred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremKind {
    /// Bounded `int div xi` between the maximum and a point further out.
    Pointwise,
    /// Exponent conditions on `U`, `M L` and `L`.
    Exponent,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingScenario {
    pub name: String,
    /// `U_xi + U_n M L <~ (T-t)^{-alpha}`
    pub alpha: f64,
    /// `L >~ (T-t)^beta`
    pub beta: f64,
    /// `Omega ~ (T-t)^{-gamma}`; informational.
    pub gamma: f64,
    /// Bound on `M L`.
    #[serde(rename = "C0")]
    pub c0_upper: f64,
    /// `||omega||_{L_t} >= c0 Omega`
    pub c0: f64,
    pub kind: TheoremKind,
    pub notes: String,
}

impl ScalingScenario {
    pub fn new(name: &str, alpha: f64, beta: f64, gamma: f64) -> Self {
        Self {
            name: name.to_string(),
            alpha,
            beta,
            gamma,
            c0_upper: DEFAULT_C0_UPPER,
            c0: DEFAULT_C0_LOWER,
            kind: TheoremKind::Exponent,
            notes: String::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) {
            return Err(Error::Domain(format!("beta = {} must be non-negative", self.beta)));
        }
        if !(self.c0_upper > 0.0) {
            return Err(Error::Domain(format!("C0 = {} must be positive", self.c0_upper)));
        }
        if !(self.c0 > 0.0 && self.c0 <= 1.0) {
            return Err(Error::Domain(format!("c0 = {} must lie in (0, 1]", self.c0)));
        }
        Ok(())
    }
}

/// `delta = ((1 - alpha)/beta - 1)/2`
pub fn delta_exponent(alpha: f64, beta: f64) -> Result<f64> {
    if !(beta > 0.0) {
        return Err(Error::Domain(format!("beta = {beta} must be positive")));
    }
    Ok(((1.0 - alpha) / beta - 1.0) / 2.0)
}

/// Exponent conditions: `alpha` in the open interval `(0, 1)`, `beta < 1 - alpha`
/// strictly, `C0` finite. `alpha <= 0` is inconclusive: the theorem is stated
/// on the open interval only and is not extrapolated to its boundary.
pub fn theorem2_check(s: &ScalingScenario) -> CriterionVerdict {
    let mut v = CriterionVerdict::new();
    v.margin("alpha_in_unit_interval", s.alpha.min(1.0 - s.alpha));
    v.margin("beta_below_one_minus_alpha", (1.0 - s.alpha) - s.beta);
    v.margin("c0_upper_finite", if s.c0_upper.is_finite() { 0.0 } else { f64::NEG_INFINITY });

    if !(s.beta >= 0.0) || !(s.c0 > 0.0 && s.c0 <= 1.0) || !(s.c0_upper > 0.0) {
        v.fail("scenario_invariants");
        v.note("beta must be >= 0, C0 > 0 and c0 in (0, 1]");
    }
    if !(s.beta < 1.0 - s.alpha) {
        v.fail("beta_below_one_minus_alpha");
    }
    if !s.c0_upper.is_finite() {
        v.fail("c0_upper_finite");
    }
    if s.alpha >= 1.0 || s.alpha.is_nan() {
        v.fail("alpha_in_unit_interval");
    } else if s.alpha <= 0.0 {
        v.undecided("alpha_in_unit_interval");
        v.note("alpha must lie in the open interval (0, 1); the boundary alpha = 0 is not covered and is not extrapolated");
    }
    if s.kind == TheoremKind::Pointwise {
        v.undecided("pointwise_preset");
        v.note("preset is tagged for the pointwise criterion; use the div-integral check instead of exponents");
    }
    v
}

/// The four literature scenarios with the exponents they are quoted with.
pub fn scenario_library() -> Vec<ScalingScenario> {
    let mut pelz = ScalingScenario::new("pelz", 0.0, 0.5, 1.0);
    pelz.kind = TheoremKind::Pointwise;
    pelz.notes = "tubes of length scale (T-t)^{1/2} with div xi of order (T-t)^{-1/2}: the div-xi integral across \
                  the inner region stays bounded; a pointwise-criterion case, not an exponent check"
        .into();

    let mut cfm = ScalingScenario::new("cfm", 0.0, 0.5, 1.0);
    cfm.notes = "bounded velocity and M << (T-t)^{-1/2} on a Lagrangian region, quoted as alpha = 0, beta = 1/2; \
                 alpha = 0 is the boundary of the open interval"
        .into();

    let mut cf = ScalingScenario::new("cf", 0.5, 0.0, 1.0);
    cf.notes = "fixed cube, L ~ 1 (beta = 0) with bounded M; velocity growth algebraic, alpha = 0.5 as a \
                representative value, any alpha < 1 passes"
        .into();

    let mut kerr = ScalingScenario::new("kerr", 0.01, 0.5, 1.0);
    kerr.notes = "L ~ (T-t)^{1/2}, M <~ (T-t)^{-1/2}, U_xi, U_n ~ (T-t)^0; the quoted alpha = 0 sits on the boundary, \
                  alpha = 0.01 is a representative interior value"
        .into();
    vec![pelz, cfm, cf, kerr]
}

pub fn scenario_preset(name: &str) -> Result<ScalingScenario> {
    scenario_library()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::Config(format!("unknown preset {name:?}; expected pelz, cfm, cf or kerr")))
}

impl ScalingScenario {
    pub fn verdict(&self) -> Verdict {
        theorem2_check(self).verdict
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn condition_arithmetic() {
        assert_eq!(ScalingScenario::new("a", 0.5, 0.25, 1.0).verdict(), Verdict::NoBlowupExcluded);
        let v = theorem2_check(&ScalingScenario::new("b", 0.5, 0.5, 1.0));
        assert_eq!(v.verdict, Verdict::ConditionsViolated);
        assert_eq!(v.failed_conditions, vec!["beta_below_one_minus_alpha".to_string()]);
        assert_eq!(ScalingScenario::new("c", 1.0, 0.0, 1.0).verdict(), Verdict::ConditionsViolated);
        let mut inf = ScalingScenario::new("d", 0.5, 0.25, 1.0);
        inf.c0_upper = f64::INFINITY;
        assert_eq!(inf.verdict(), Verdict::ConditionsViolated);
    }

    #[test]
    fn delta_examples() {
        assert!((delta_exponent(1.0 / 3.0, 1.0 / 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((delta_exponent(0.0, 0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(delta_exponent(0.25, 0.75).unwrap(), 0.0);
        assert!(delta_exponent(0.2, 0.0).is_err());
    }

    #[test]
    fn presets() {
        let lib = scenario_library();
        assert_eq!(lib.len(), 4);
        let kerr = scenario_preset("kerr").unwrap();
        assert_eq!(kerr.verdict(), Verdict::NoBlowupExcluded);
        let cfm = theorem2_check(&scenario_preset("cfm").unwrap());
        assert_eq!(cfm.verdict, Verdict::Inconclusive);
        assert!(cfm.notes.contains("open interval"));
        assert_eq!(scenario_preset("cf").unwrap().verdict(), Verdict::NoBlowupExcluded);
        let pelz = scenario_preset("pelz").unwrap();
        assert_eq!(pelz.kind, TheoremKind::Pointwise);
        assert_eq!(pelz.verdict(), Verdict::Inconclusive);
        assert!(scenario_preset("nope").is_err());
    }
}
