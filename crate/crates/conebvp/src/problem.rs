//! Problem definition and parameter-region classification.
//!
//! The boundary value problem is
//!
//! ```text
//! u''(t) + a(t) f(u(t)) = 0,   0 < t < T,
//! u(0) = beta u(eta),          u(T) = alpha * integral of u over [0, eta],
//! ```
//!
//! with `0 < eta < T`, `alpha > 0`, `beta >= 0`. Existence of positive
//! solutions holds on the region `0 < alpha < 2T/eta^2`,
//! `0 <= beta < (2T - alpha eta^2)/(alpha eta^2 - 2 eta + 2T)`; above the
//! alpha bound no positive solutions exist. The denominator
//!
//! ```text
//! D = (2T - alpha eta^2) - beta (alpha eta^2 - 2 eta + 2T)
//! ```
//!
//! is positive exactly on the admissible region and vanishing D breaks
//! uniqueness of the associated linear problem.

use crate::expr::Expr;
use serde::Serialize;
use std::fmt;

/// Relative tolerance at which the denominator counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-12;

/// A full problem instance: parameters plus the symbolic `a(t)` and `f(u)`.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    t_end: f64,
    eta: f64,
    alpha: f64,
    beta: f64,
    a: Expr,
    f: Expr,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemError {
    NonFinite(String),
    EtaOutOfRange { eta: f64, t_end: f64 },
    NonPositiveAlpha(f64),
    NegativeBeta(f64),
    NotAdmissible { region: Region },
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::NonFinite(name) => write!(f, "parameter `{name}` must be finite"),
            ProblemError::EtaOutOfRange { eta, t_end } => {
                write!(f, "eta = {eta} must lie strictly inside (0, {t_end})")
            }
            ProblemError::NonPositiveAlpha(a) => write!(f, "alpha = {a} must be positive"),
            ProblemError::NegativeBeta(b) => write!(f, "beta = {b} must be nonnegative"),
            ProblemError::NotAdmissible { region } => {
                write!(f, "operation requires the admissible region, got {region}")
            }
        }
    }
}

impl std::error::Error for ProblemError {}

/// Verdict of the parameter classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `0 < alpha < 2T/eta^2` and `0 <= beta < beta_bound`: the existence
    /// theory applies and the cone constant is defined.
    Admissible,
    /// `alpha > 2T/eta^2`: the linear problem admits no positive solution
    /// for any nontrivial nonnegative forcing.
    NoPositiveSolution,
    /// `|D|` vanishes within tolerance: the linear problem is singular.
    DenominatorDegenerate,
    /// Everything else (e.g. `beta >= beta_bound`, or alpha exactly at the
    /// bound); the theory is silent there.
    OutsideTheory,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Region::Admissible => "Admissible",
            Region::NoPositiveSolution => "NoPositiveSolutionRegion",
            Region::DenominatorDegenerate => "DenominatorDegenerate",
            Region::OutsideTheory => "OutsideTheory",
        };
        write!(f, "{name}")
    }
}

/// Classification record: region verdict, denominator and parameter bounds.
#[derive(Debug, Clone, Serialize)]
pub struct ParamClassification {
    pub region: Region,
    /// `D = (2T - alpha eta^2) - beta (alpha eta^2 - 2 eta + 2T)`.
    pub denominator: f64,
    /// `2T / eta^2`, the upper bound on alpha.
    pub alpha_bound: f64,
    /// `(2T - alpha eta^2) / (alpha eta^2 - 2 eta + 2T)`, the bound on beta.
    pub beta_bound: f64,
    /// Cone constant, present only on the admissible region.
    pub gamma: Option<f64>,
}

impl ProblemSpec {
    pub fn new(
        t_end: f64,
        eta: f64,
        alpha: f64,
        beta: f64,
        a: Expr,
        f: Expr,
    ) -> Result<Self, ProblemError> {
        for (name, v) in [("T", t_end), ("eta", eta), ("alpha", alpha), ("beta", beta)] {
            if !v.is_finite() {
                return Err(ProblemError::NonFinite(name.into()));
            }
        }
        if !(eta > 0.0 && eta < t_end) {
            return Err(ProblemError::EtaOutOfRange { eta, t_end });
        }
        if alpha <= 0.0 {
            return Err(ProblemError::NonPositiveAlpha(alpha));
        }
        if beta < 0.0 {
            return Err(ProblemError::NegativeBeta(beta));
        }
        Ok(Self {
            t_end,
            eta,
            alpha,
            beta,
            a,
            f,
        })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn a(&self) -> &Expr {
        &self.a
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }

    /// The denominator `D`, positive exactly on the admissible region.
    pub fn denominator(&self) -> f64 {
        let ae2 = self.alpha * self.eta * self.eta;
        (2.0 * self.t_end - ae2) - self.beta * (ae2 - 2.0 * self.eta + 2.0 * self.t_end)
    }

    /// `2T / eta^2`.
    pub fn alpha_bound(&self) -> f64 {
        2.0 * self.t_end / (self.eta * self.eta)
    }

    /// `(2T - alpha eta^2) / (alpha eta^2 - 2 eta + 2T)`. The divisor is
    /// positive for every valid spec, so this is always finite (it goes
    /// negative once alpha exceeds its bound).
    pub fn beta_bound(&self) -> f64 {
        let ae2 = self.alpha * self.eta * self.eta;
        (2.0 * self.t_end - ae2) / (ae2 - 2.0 * self.eta + 2.0 * self.t_end)
    }

    /// Classifies the parameters. Degeneracy of `D` takes priority: at the
    /// exact boundary `beta = beta_bound` (or `alpha` at its bound with
    /// `beta = 0`) the linear problem is singular, which matters more than
    /// which side of the existence region the point nominally sits on.
    pub fn classify(&self) -> ParamClassification {
        let denominator = self.denominator();
        let alpha_bound = self.alpha_bound();
        let beta_bound = self.beta_bound();
        let ae2 = self.alpha * self.eta * self.eta;
        let degenerate = denominator.abs() <= DEGENERACY_TOL * (1.0 + (2.0 * self.t_end - ae2).abs());

        let region = if degenerate {
            Region::DenominatorDegenerate
        } else if self.alpha > alpha_bound {
            Region::NoPositiveSolution
        } else if self.alpha < alpha_bound && self.beta < beta_bound {
            Region::Admissible
        } else {
            Region::OutsideTheory
        };

        let gamma = if region == Region::Admissible {
            let g = self.gamma_unchecked();
            debug_assert!(denominator > 0.0 && g > 0.0 && g < 1.0);
            Some(g)
        } else {
            None
        };

        ParamClassification {
            region,
            denominator,
            alpha_bound,
            beta_bound,
            gamma,
        }
    }

    /// Cone constant
    /// `gamma = min(eta/T, alpha(beta+1)eta^2/(2T),
    ///              alpha(beta+1)eta(T-eta)/(2T - alpha(beta+1)eta^2))`,
    /// defined on the admissible region where the third denominator is
    /// guaranteed positive.
    pub fn cone_gamma(&self) -> Result<f64, ProblemError> {
        let region = self.classify().region;
        if region != Region::Admissible {
            return Err(ProblemError::NotAdmissible { region });
        }
        Ok(self.gamma_unchecked())
    }

    fn gamma_unchecked(&self) -> f64 {
        let (t, eta) = (self.t_end, self.eta);
        let ab1 = self.alpha * (self.beta + 1.0);
        let term1 = eta / t;
        let term2 = ab1 * eta * eta / (2.0 * t);
        let term3 = ab1 * eta * (t - eta) / (2.0 * t - ab1 * eta * eta);
        term1.min(term2).min(term3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn spec(t_end: f64, eta: f64, alpha: f64, beta: f64) -> ProblemSpec {
        ProblemSpec::new(
            t_end,
            eta,
            alpha,
            beta,
            parse_expr("1", "t").unwrap(),
            parse_expr("1", "u").unwrap(),
        )
        .unwrap()
    }

    fn rel_close(got: f64, want: f64, tol: f64) -> bool {
        (got - want).abs() <= tol * want.abs().max(1.0)
    }

    #[test]
    fn denominator_worked_cases() {
        assert_eq!(spec(2.0, 1.5, 1.0, 0.5).denominator(), 0.125);
        assert_eq!(spec(1.0, 0.5, 1.0, 0.0).denominator(), 1.75);
        // beta placed exactly at its bound
        let d = spec(1.0, 0.5, 1.0, 1.4).denominator();
        assert!(d.abs() < 1e-15, "expected vanishing denominator, got {d}");
    }

    #[test]
    fn denominator_matches_negated_original_form() {
        // The same quantity written with the opposite sign convention.
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1_000_000 {
            let t = 0.2 + 3.0 * next();
            let eta = t * (0.05 + 0.9 * next());
            let alpha = 0.05 + 5.0 * next();
            let beta = 3.0 * next();
            let ae2 = alpha * eta * eta;
            let ours = (2.0 * t - ae2) - beta * (ae2 - 2.0 * eta + 2.0 * t);
            let negated = -((ae2 - 2.0 * t) - beta * (2.0 * eta - ae2 - 2.0 * t));
            assert_eq!(ours, negated, "t={t} eta={eta} alpha={alpha} beta={beta}");
        }
    }

    #[test]
    fn classify_worked_cases() {
        let c = spec(2.0, 1.5, 1.0, 0.5).classify();
        assert_eq!(c.region, Region::Admissible);
        assert!(rel_close(c.alpha_bound, 16.0 / 9.0, 1e-15));
        assert!(rel_close(c.beta_bound, 7.0 / 13.0, 1e-15));

        let c = spec(1.0, 0.5, 9.0, 0.0).classify();
        assert_eq!(c.region, Region::NoPositiveSolution);
        assert_eq!(c.alpha_bound, 8.0);
        assert!(c.gamma.is_none());

        let c = spec(1.0, 1.0 / 3.0, 2.0, 1.0).classify();
        assert_eq!(c.region, Region::Admissible);
        assert!(rel_close(c.alpha_bound, 18.0, 1e-12));
        assert!(rel_close(c.beta_bound, 8.0 / 7.0, 1e-12));

        let c = spec(0.75, 0.25, 20.0, 0.1).classify();
        assert_eq!(c.region, Region::Admissible);
        assert!(rel_close(c.alpha_bound, 24.0, 1e-12));
        assert!(rel_close(c.beta_bound, 1.0 / 9.0, 1e-12));
    }

    #[test]
    fn beta_at_bound_is_degenerate_and_beyond_is_outside() {
        let c = spec(1.0, 0.5, 1.0, 1.4).classify();
        assert_eq!(c.region, Region::DenominatorDegenerate);
        let c = spec(1.0, 0.5, 1.0, 1.6).classify();
        assert_eq!(c.region, Region::OutsideTheory);
        assert!(c.denominator < 0.0);
    }

    #[test]
    fn alpha_exactly_at_bound_is_not_admissible() {
        // with beta > 0 the denominator stays negative, so OutsideTheory
        let c = spec(1.0, 0.5, 8.0, 0.5).classify();
        assert_eq!(c.region, Region::OutsideTheory);
        // with beta = 0 the denominator itself vanishes
        let c = spec(1.0, 0.5, 8.0, 0.0).classify();
        assert_eq!(c.region, Region::DenominatorDegenerate);
    }

    #[test]
    fn gamma_worked_cases() {
        let g = spec(2.0, 1.5, 1.0, 0.5).cone_gamma().unwrap();
        assert!(rel_close(g, 0.75, 1e-15), "{g}");
        let g = spec(1.0, 1.0 / 3.0, 2.0, 1.0).cone_gamma().unwrap();
        assert!(rel_close(g, 2.0 / 9.0, 1e-14), "{g}");
        let g = spec(2.0, 1.0, 1.0, 0.5).cone_gamma().unwrap();
        assert!(rel_close(g, 0.375, 1e-15), "{g}");
    }

    #[test]
    fn gamma_requires_admissible_region() {
        let err = spec(1.0, 0.5, 9.0, 0.0).cone_gamma().unwrap_err();
        assert!(matches!(
            err,
            ProblemError::NotAdmissible {
                region: Region::NoPositiveSolution
            }
        ));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let a = parse_expr("1", "t").unwrap();
        let f = parse_expr("1", "u").unwrap();
        assert!(ProblemSpec::new(1.0, 1.0, 1.0, 0.0, a.clone(), f.clone()).is_err());
        assert!(ProblemSpec::new(1.0, 0.5, 0.0, 0.0, a.clone(), f.clone()).is_err());
        assert!(ProblemSpec::new(1.0, 0.5, 1.0, -0.1, a.clone(), f.clone()).is_err());
        assert!(ProblemSpec::new(f64::NAN, 0.5, 1.0, 0.0, a, f).is_err());
    }

    #[test]
    fn admissible_region_has_positive_denominator_and_unit_interval_gamma() {
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20_000 {
            let t = 0.3 + 2.5 * next();
            let eta = t * (0.1 + 0.8 * next());
            let s = spec(t, eta, 1.0, 0.0); // placeholder to get bounds
            let alpha = s.alpha_bound() * (0.05 + 0.9 * next());
            let s = spec(t, eta, alpha, 0.0);
            let beta = s.beta_bound() * (0.9 * next());
            let s = spec(t, eta, alpha, beta);
            let c = s.classify();
            assert_eq!(c.region, Region::Admissible, "{t} {eta} {alpha} {beta}");
            assert!(c.denominator > 0.0);
            let g = c.gamma.unwrap();
            assert!(g > 0.0 && g < 1.0, "gamma {g}");
        }
    }

    #[test]
    fn classification_is_monotone_in_beta() {
        for (t, eta, alpha) in [(1.0, 0.5, 1.0), (2.0, 1.5, 1.0), (0.75, 0.25, 20.0)] {
            let bound = spec(t, eta, alpha, 0.0).beta_bound();
            let mut left_admissible = true;
            for k in 0..200 {
                let beta = bound * 1.5 * k as f64 / 199.0;
                let region = spec(t, eta, alpha, beta).classify().region;
                match region {
                    Region::Admissible => {
                        assert!(left_admissible, "admissible after leaving the region");
                        assert!(beta < bound);
                    }
                    _ => {
                        left_admissible = false;
                        assert!(beta >= bound * (1.0 - 1e-9));
                    }
                }
            }
        }
    }
}
