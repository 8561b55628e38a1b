use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use super::r0::r0;
use crate::error::{Error, Result};
use crate::model::{ModelSpec, Population};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rate {
    /// Low-density transition probability `t_i(0)` (the `b` of a
    /// Beverton–Holt rule).
    Transition,
    Fecundity,
}

/// Names one demographic rate: `t3`, `f2`, `resident.t1`, `migrant.f4`.
/// Stages are one-based. A bare name refers to the migrant (or only)
/// population.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamHandle {
    pub population: Population,
    pub rate: Rate,
    pub stage: usize,
}

impl ParamHandle {
    pub fn transition(population: Population, stage: usize) -> Self {
        ParamHandle {
            population,
            rate: Rate::Transition,
            stage,
        }
    }

    pub fn fecundity(population: Population, stage: usize) -> Self {
        ParamHandle {
            population,
            rate: Rate::Fecundity,
            stage,
        }
    }

    /// Every transition and fecundity parameter of a spec, in a stable
    /// order.
    pub fn all_for(spec: &ModelSpec) -> Vec<ParamHandle> {
        let mut out = Vec::new();
        for (population, member) in spec.populations() {
            let n = member.stages();
            out.extend((1..=n).map(|i| ParamHandle::transition(population, i)));
            out.extend((2..=n).map(|i| ParamHandle::fecundity(population, i)));
        }
        out
    }

    pub fn value(&self, spec: &ModelSpec) -> Result<f64> {
        let member = spec
            .population(self.population)
            .ok_or_else(|| Error::UnknownParameter(self.to_string()))?;
        let n = member.stages();
        match self.rate {
            Rate::Transition if (1..=n).contains(&self.stage) => {
                Ok(member.transitions[self.stage - 1].at_zero())
            }
            Rate::Fecundity if (2..=n).contains(&self.stage) => Ok(member.fecundities[self.stage - 2]),
            _ => Err(Error::UnknownParameter(self.to_string())),
        }
    }

    /// Copy of `spec` with this parameter set to `value`. The result is
    /// validated; leaving the admissible region is an error.
    pub fn with_value(&self, spec: &ModelSpec, value: f64) -> Result<ModelSpec> {
        self.value(spec)?;
        let mut out = spec.clone();
        let member = out.population_mut(self.population).expect("checked above");
        match self.rate {
            Rate::Transition => {
                let rule = &mut member.transitions[self.stage - 1];
                *rule = rule.with_scale(value);
            }
            Rate::Fecundity => member.fecundities[self.stage - 2] = value,
        }
        let report = out.validate();
        if !report.is_valid() {
            return Err(Error::Perturbation {
                param: self.to_string(),
                reason: format!("value {value} leaves the admissible region ({report})"),
            });
        }
        Ok(out)
    }
}

impl fmt::Display for ParamHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letter = match self.rate {
            Rate::Transition => 't',
            Rate::Fecundity => 'f',
        };
        write!(f, "{}.{}{}", self.population, letter, self.stage)
    }
}

impl FromStr for ParamHandle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownParameter(s.to_string());
        let (population, name) = match s.split_once('.') {
            Some(("migrant" | "s", rest)) => (Population::Migrant, rest),
            Some(("resident" | "r", rest)) => (Population::Resident, rest),
            Some(_) => return Err(bad()),
            None => (Population::Migrant, s),
        };
        let rate = match name.chars().next() {
            Some('t') => Rate::Transition,
            Some('f') => Rate::Fecundity,
            _ => return Err(bad()),
        };
        let stage: usize = name[1..].parse().map_err(|_| bad())?;
        Ok(ParamHandle {
            population,
            rate,
            stage,
        })
    }
}

impl Serialize for ParamHandle {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Central finite difference of the reproduction number with respect to one
/// parameter, with absolute step `step`.
pub fn sensitivity(spec: &ModelSpec, param: ParamHandle, step: f64) -> Result<f64> {
    spec.ensure_valid()?;
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::Perturbation {
            param: param.to_string(),
            reason: format!("step {step} must be positive"),
        });
    }
    let theta = param.value(spec)?;
    let up = r0(&param.with_value(spec, theta + step)?)?;
    let down = r0(&param.with_value(spec, theta - step)?)?;
    Ok((up - down) / (2.0 * step))
}

/// Step relative to the parameter magnitude, `max(rel * |theta|, floor)`.
pub fn relative_step(theta: f64, rel: f64, floor: f64) -> f64 {
    (rel * theta.abs()).max(floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::IsolatedSpec;

    #[test]
    fn parse_and_display() {
        let p: ParamHandle = "resident.t3".parse().unwrap();
        assert_eq!(p, ParamHandle::transition(Population::Resident, 3));
        assert_eq!(p.to_string(), "resident.t3");
        let q: ParamHandle = "f2".parse().unwrap();
        assert_eq!(q, ParamHandle::fecundity(Population::Migrant, 2));
        assert!("x2".parse::<ParamHandle>().is_err());
        assert!("bird.t2".parse::<ParamHandle>().is_err());
        assert!("t".parse::<ParamHandle>().is_err());
    }

    #[test]
    fn derivative_in_fecundity() {
        let spec = IsolatedSpec::linear(&[0.5, 0.5], &[2.0]).into();
        let d = sensitivity(&spec, "f2".parse().unwrap(), 1e-6).unwrap();
        assert!((d - 1.0).abs() < 1e-8);
    }

    #[test]
    fn derivative_in_transition() {
        let spec = IsolatedSpec::linear(&[0.5, 0.5], &[2.0]).into();
        let d = sensitivity(&spec, "t1".parse().unwrap(), 1e-6).unwrap();
        assert!((d - 4.0).abs() < 1e-7);
    }

    #[test]
    fn leaving_the_valid_region_is_an_error() {
        let spec = IsolatedSpec::linear(&[0.5, 0.999_999_5], &[2.0]).into();
        let err = sensitivity(&spec, "t2".parse().unwrap(), 1e-6).unwrap_err();
        assert!(matches!(err, Error::Perturbation { .. }));
        let spec = IsolatedSpec::linear(&[0.5, 0.5], &[2.0]).into();
        assert!(sensitivity(&spec, "f3".parse().unwrap(), 1e-6).is_err());
        assert!(sensitivity(&spec, "resident.f2".parse().unwrap(), 1e-6).is_err());
    }

    #[test]
    fn all_parameters_listed() {
        let spec = ModelSpec::single_egg(
            IsolatedSpec::linear(&[0.5, 0.4, 0.2], &[3.0, 10.0]),
            IsolatedSpec::linear(&[0.25, 0.2], &[2.0]),
            0.5,
        );
        let all = ParamHandle::all_for(&spec);
        assert_eq!(all.len(), 3 + 2 + 2 + 1);
        for p in all {
            let d = sensitivity(&spec, p, relative_step(p.value(&spec).unwrap(), 1e-6, 1e-9)).unwrap();
            assert!(d >= -1e-8, "{p}: {d}");
        }
    }
}
