use serde::{Deserialize, Serialize};

/// Per-stage transition (or terminal survival) law.
///
/// `probability(x)` is the fraction of the `x` individuals in a stage that
/// move on (or survive, for the terminal stage) in one step; `flow(x)` is the
/// resulting number of individuals, `x * probability(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub enum TransitionRule {
    /// Density-independent probability `t`.
    #[serde(rename = "const")]
    Constant(f64),
    /// `t(x) = b / (1 + c x)`, so that the flow `b x / (1 + c x)` saturates
    /// at `b / c`.
    #[serde(rename = "beverton_holt")]
    BevertonHolt(BevertonHolt),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BevertonHolt {
    pub b: f64,
    pub c: f64,
}

impl TransitionRule {
    pub fn constant(t: f64) -> Self {
        TransitionRule::Constant(t)
    }

    pub fn beverton_holt(b: f64, c: f64) -> Self {
        TransitionRule::BevertonHolt(BevertonHolt { b, c })
    }

    pub fn probability(&self, x: f64) -> f64 {
        match *self {
            TransitionRule::Constant(t) => t,
            TransitionRule::BevertonHolt(BevertonHolt { b, c }) => b / (1.0 + c * x),
        }
    }

    pub fn flow(&self, x: f64) -> f64 {
        match *self {
            TransitionRule::Constant(t) => t * x,
            TransitionRule::BevertonHolt(BevertonHolt { b, c }) => b * x / (1.0 + c * x),
        }
    }

    /// Probability in the limit of vanishing density, `t(0)`.
    pub fn at_zero(&self) -> f64 {
        self.probability(0.0)
    }

    /// Supremum of `flow` over the nonnegative half-line; `None` when the
    /// flow is unbounded (constant rules with `t > 0`).
    pub fn flow_bound(&self) -> Option<f64> {
        match *self {
            TransitionRule::Constant(0.0) => Some(0.0),
            TransitionRule::Constant(_) => None,
            TransitionRule::BevertonHolt(BevertonHolt { b, c }) => Some(b / c),
        }
    }

    pub fn is_density_dependent(&self) -> bool {
        matches!(self, TransitionRule::BevertonHolt(_))
    }

    /// Same rule with its low-density probability replaced; for
    /// Beverton–Holt this rescales `b` and keeps `c`.
    pub fn with_scale(&self, value: f64) -> Self {
        match *self {
            TransitionRule::Constant(_) => TransitionRule::Constant(value),
            TransitionRule::BevertonHolt(BevertonHolt { c, .. }) => TransitionRule::beverton_holt(value, c),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beverton_holt_values() {
        let r = TransitionRule::beverton_holt(0.5, 1.0);
        assert_eq!(r.probability(1.0), 0.25);
        assert_eq!(r.flow(1.0), 0.25);
        assert_eq!(r.at_zero(), 0.5);
        assert_eq!(r.flow_bound(), Some(0.5));
    }

    #[test]
    fn beverton_holt_is_decreasing_with_increasing_bounded_flow() {
        let r = TransitionRule::beverton_holt(0.8, 0.3);
        let xs: Vec<f64> = (0..200).map(|k| 0.05 * k as f64).collect();
        for w in xs.windows(2) {
            assert!(r.probability(w[1]) < r.probability(w[0]));
            assert!(r.flow(w[1]) > r.flow(w[0]));
            assert!(r.flow(w[1]) <= 0.8 / 0.3);
            assert!(r.probability(w[1]) > 0.0 && r.probability(w[1]) <= 0.8);
        }
    }

    #[test]
    fn beverton_holt_flow_is_strongly_sublinear() {
        let r = TransitionRule::beverton_holt(0.5, 1.0);
        let lam = 0.5;
        assert_eq!(lam * r.flow(1.0), 0.125);
        assert!((r.flow(lam) - 0.25 / 1.5).abs() < 1e-15);
        assert!(lam * r.flow(1.0) < r.flow(lam));
    }

    #[test]
    fn constant_rule_ignores_density() {
        let r = TransitionRule::constant(0.3);
        assert_eq!(r.probability(0.0), r.probability(1e6));
        assert_eq!(r.flow(2.0), 0.6);
        assert_eq!(r.flow_bound(), None);
        assert_eq!(TransitionRule::constant(0.0).flow_bound(), Some(0.0));
    }

    #[test]
    fn rescaling_keeps_density_coefficient() {
        let r = TransitionRule::beverton_holt(0.5, 2.0).with_scale(0.7);
        assert_eq!(r, TransitionRule::beverton_holt(0.7, 2.0));
    }
}
