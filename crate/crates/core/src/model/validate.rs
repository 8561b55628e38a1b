use std::fmt;

use serde::Serialize;

use super::rule::{BevertonHolt, TransitionRule};
use super::spec::{IsolatedSpec, ModelSpec, Population};
use crate::error::{Error, Result};

/// What went wrong with a spec. Stage and fecundity indices are one-based,
/// matching the usual `t_i` / `f_j` labels.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    TooFewStages {
        population: Population,
        stages: usize,
    },
    FecundityCount {
        population: Population,
        expected: usize,
        found: usize,
    },
    ProbabilityOutOfRange {
        population: Population,
        stage: usize,
        value: f64,
    },
    BevertonHoltScale {
        population: Population,
        stage: usize,
        b: f64,
    },
    BevertonHoltDensity {
        population: Population,
        stage: usize,
        c: f64,
    },
    /// `t_i(0) = 0` for a non-terminal stage breaks irreducibility.
    Irreducible {
        population: Population,
        stage: usize,
    },
    /// `t_n(0) = 1` makes `I - T` singular.
    TerminalSurvivalOne {
        population: Population,
        stage: usize,
    },
    NegativeFecundity {
        population: Population,
        stage: usize,
        value: f64,
    },
    LastFecundityZero {
        population: Population,
        stage: usize,
    },
    AllocationOutOfRange {
        name: &'static str,
        value: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            TooFewStages { population, stages } => {
                write!(f, "{population}: at least 2 stages required, found {stages}")
            }
            FecundityCount {
                population,
                expected,
                found,
            } => write!(
                f,
                "{population}: expected {expected} fecundities (f_2..f_n), found {found}"
            ),
            ProbabilityOutOfRange {
                population,
                stage,
                value,
            } => write!(f, "{population}: t_{stage} = {value} is not in [0, 1]"),
            BevertonHoltScale {
                population,
                stage,
                b,
            } => write!(f, "{population}: t_{stage} Beverton-Holt b = {b} is not in (0, 1]"),
            BevertonHoltDensity {
                population,
                stage,
                c,
            } => write!(f, "{population}: t_{stage} Beverton-Holt c = {c} is not positive"),
            Irreducible { population, stage } => write!(
                f,
                "{population}: t_{stage}(0) = 0 breaks irreducibility (non-terminal transitions must be positive)"
            ),
            TerminalSurvivalOne { population, stage } => write!(
                f,
                "{population}: t_{stage}(0) = 1 makes I - T singular (terminal survival must be < 1)"
            ),
            NegativeFecundity {
                population,
                stage,
                value,
            } => write!(f, "{population}: f_{stage} = {value} is negative or not finite"),
            LastFecundityZero { population, stage } => {
                write!(f, "{population}: last-stage fecundity f_{stage} must be positive")
            }
            AllocationOutOfRange { name, value } => {
                write!(f, "allocation {name} = {value} is not in [0, 1]")
            }
        }
    }
}

/// Every violated invariant of a spec; empty iff the spec is admissible.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidSpec(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

fn validate_population(population: Population, spec: &IsolatedSpec, out: &mut Vec<Violation>) {
    let n = spec.stages();
    if n < 2 {
        out.push(Violation::TooFewStages {
            population,
            stages: n,
        });
    }
    if spec.fecundities.len() + 1 != n.max(1) {
        out.push(Violation::FecundityCount {
            population,
            expected: n.saturating_sub(1),
            found: spec.fecundities.len(),
        });
    }

    for (i, rule) in spec.transitions.iter().enumerate() {
        let stage = i + 1;
        let terminal = stage == n;
        match *rule {
            TransitionRule::Constant(t) => {
                if !(t.is_finite() && (0.0..=1.0).contains(&t)) {
                    out.push(Violation::ProbabilityOutOfRange {
                        population,
                        stage,
                        value: t,
                    });
                    continue;
                }
            }
            TransitionRule::BevertonHolt(BevertonHolt { b, c }) => {
                let mut ok = true;
                if !(b.is_finite() && b > 0.0 && b <= 1.0) {
                    out.push(Violation::BevertonHoltScale { population, stage, b });
                    ok = false;
                }
                if !(c.is_finite() && c > 0.0) {
                    out.push(Violation::BevertonHoltDensity { population, stage, c });
                    ok = false;
                }
                if !ok {
                    continue;
                }
            }
        }
        let a = rule.at_zero();
        if !terminal && a <= 0.0 {
            out.push(Violation::Irreducible { population, stage });
        }
        if terminal && a >= 1.0 {
            out.push(Violation::TerminalSurvivalOne { population, stage });
        }
    }

    for (k, &f) in spec.fecundities.iter().enumerate() {
        let stage = k + 2;
        if !(f.is_finite() && f >= 0.0) {
            out.push(Violation::NegativeFecundity {
                population,
                stage,
                value: f,
            });
        } else if stage == n && f == 0.0 {
            out.push(Violation::LastFecundityZero { population, stage });
        }
    }
}

fn check_allocation(name: &'static str, value: f64, out: &mut Vec<Violation>) {
    if !(value.is_finite() && (0.0..=1.0).contains(&value)) {
        out.push(Violation::AllocationOutOfRange { name, value });
    }
}

/// Checks every structural invariant of a spec. Never fails; the report
/// lists each violation with the offending stage.
///
/// Allocations are accepted on the closed interval `[0, 1]` so that
/// boundary values can be analysed for the linear models; operations that
/// need irreducibility of a coupled model additionally check
/// [`ModelSpec::has_interior_allocation`].
pub fn validate(spec: &ModelSpec) -> ValidationReport {
    let mut violations = Vec::new();
    for (population, member) in spec.populations() {
        validate_population(population, member, &mut violations);
    }
    match spec {
        ModelSpec::Isolated(_) => {}
        ModelSpec::SingleEgg(s) => check_allocation("phi", s.phi, &mut violations),
        ModelSpec::TwoEgg(s) => {
            check_allocation("phi_s", s.phi_s, &mut violations);
            check_allocation("phi_r", s.phi_r, &mut violations);
        }
    }
    ValidationReport { violations }
}

impl ModelSpec {
    pub fn validate(&self) -> ValidationReport {
        validate(self)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        validate(self).into_result()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iso(t: &[f64], f: &[f64]) -> ModelSpec {
        IsolatedSpec::linear(t, f).into()
    }

    #[test]
    fn simple_spec_is_valid() {
        assert!(iso(&[0.5, 0.5], &[2.0]).validate().is_valid());
    }

    #[test]
    fn zero_first_transition_breaks_irreducibility() {
        let report = iso(&[0.0, 0.5], &[2.0]).validate();
        assert_eq!(
            report.violations,
            vec![Violation::Irreducible {
                population: Population::Migrant,
                stage: 1
            }]
        );
        assert!(report.to_string().contains("irreducib"));
    }

    #[test]
    fn terminal_survival_one_is_rejected() {
        let report = iso(&[0.5, 1.0], &[2.0]).validate();
        assert_eq!(
            report.violations,
            vec![Violation::TerminalSurvivalOne {
                population: Population::Migrant,
                stage: 2
            }]
        );
    }

    #[test]
    fn beverton_holt_terminal_with_unit_scale_is_rejected() {
        let spec: ModelSpec = IsolatedSpec::new(
            vec![
                TransitionRule::beverton_holt(0.5, 1.0),
                TransitionRule::beverton_holt(1.0, 1.0),
            ],
            vec![2.0],
        )
        .into();
        assert!(matches!(
            spec.validate().violations.as_slice(),
            [Violation::TerminalSurvivalOne { stage: 2, .. }]
        ));
    }

    #[test]
    fn fecundity_violations() {
        let report = iso(&[0.5, 0.5, 0.5], &[-1.0, 0.0]).validate();
        assert_eq!(report.violations.len(), 2);
        assert!(matches!(
            report.violations[0],
            Violation::NegativeFecundity { stage: 2, .. }
        ));
        assert!(matches!(
            report.violations[1],
            Violation::LastFecundityZero { stage: 3, .. }
        ));
    }

    #[test]
    fn stage_count_and_fecundity_length() {
        let report = iso(&[0.5], &[]).validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::TooFewStages { stages: 1, .. })));
        let report = iso(&[0.5, 0.5, 0.5], &[1.0]).validate();
        assert!(matches!(
            report.violations.as_slice(),
            [Violation::FecundityCount {
                expected: 2,
                found: 1,
                ..
            }]
        ));
    }

    #[test]
    fn bad_beverton_holt_parameters() {
        let spec: ModelSpec = IsolatedSpec::new(
            vec![
                TransitionRule::beverton_holt(1.5, 1.0),
                TransitionRule::beverton_holt(0.5, 0.0),
            ],
            vec![2.0],
        )
        .into();
        let v = spec.validate().violations;
        assert!(matches!(v[0], Violation::BevertonHoltScale { stage: 1, .. }));
        assert!(matches!(v[1], Violation::BevertonHoltDensity { stage: 2, .. }));
    }

    #[test]
    fn coupled_specs_check_members_and_allocations() {
        let good = IsolatedSpec::linear(&[0.5, 0.5], &[2.0]);
        let bad = IsolatedSpec::linear(&[0.0, 0.5], &[2.0]);
        let spec = ModelSpec::single_egg(good.clone(), bad, 1.5);
        let v = spec.validate().violations;
        assert!(matches!(
            v[0],
            Violation::Irreducible {
                population: Population::Resident,
                stage: 1
            }
        ));
        assert!(matches!(
            v[1],
            Violation::AllocationOutOfRange { name: "phi", .. }
        ));

        let boundary = ModelSpec::two_egg(good.clone(), good, 1.0, 0.0);
        assert!(boundary.validate().is_valid());
        assert!(!boundary.has_interior_allocation());
    }
}
