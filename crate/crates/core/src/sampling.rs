//! Seeded random generation of valid model specs.

use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{IsolatedSpec, ModelSpec, TransitionRule, TwoEggSpec};
use crate::spectral::{member_r0s, r0};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleFamily {
    Constant,
    BevertonHolt,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SamplerOptions {
    pub stages: RangeInclusive<usize>,
    pub family: RuleFamily,
    /// Range of `t` (constant rules) or `b` (Beverton–Holt rules).
    pub transition: (f64, f64),
    /// Range of the Beverton–Holt density coefficient `c`.
    pub density: (f64, f64),
    pub fecundity: (f64, f64),
    /// Probability that a fecundity other than the last is zero.
    pub zero_fecundity: f64,
    /// Range for coupled allocation parameters.
    pub allocation: (f64, f64),
}

impl Default for SamplerOptions {
    fn default() -> Self {
        SamplerOptions {
            stages: 2..=10,
            family: RuleFamily::Constant,
            transition: (0.05, 0.95),
            density: (0.1, 2.0),
            fecundity: (0.1, 10.0),
            zero_fecundity: 0.2,
            allocation: (0.01, 0.99),
        }
    }
}

impl SamplerOptions {
    /// All Beverton–Holt rules with positive fecundities.
    pub fn density_dependent() -> Self {
        SamplerOptions {
            family: RuleFamily::BevertonHolt,
            zero_fecundity: 0.0,
            ..Default::default()
        }
    }
}

pub struct SpecSampler {
    rng: ChaCha8Rng,
    pub options: SamplerOptions,
}

impl SpecSampler {
    pub fn new(seed: u64, options: SamplerOptions) -> Self {
        SpecSampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
            options,
        }
    }

    fn uniform(&mut self, (lo, hi): (f64, f64)) -> f64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        self.uniform((lo, hi))
    }

    fn rule(&mut self) -> TransitionRule {
        let scale = self.uniform(self.options.transition);
        match self.options.family {
            RuleFamily::Constant => TransitionRule::constant(scale),
            RuleFamily::BevertonHolt => {
                let c = self.uniform(self.options.density);
                TransitionRule::beverton_holt(scale, c)
            }
        }
    }

    pub fn isolated(&mut self) -> IsolatedSpec {
        let n = self.rng.random_range(self.options.stages.clone());
        let transitions = (0..n).map(|_| self.rule()).collect();
        let fecundities = (2..=n)
            .map(|k| {
                if k < n && self.rng.random_bool(self.options.zero_fecundity) {
                    0.0
                } else {
                    self.uniform(self.options.fecundity)
                }
            })
            .collect();
        IsolatedSpec::new(transitions, fecundities)
    }

    pub fn single_egg(&mut self) -> ModelSpec {
        let (migrant, resident) = (self.isolated(), self.isolated());
        let phi = self.uniform(self.options.allocation);
        ModelSpec::single_egg(migrant, resident, phi)
    }

    pub fn two_egg(&mut self) -> ModelSpec {
        let (migrant, resident) = (self.isolated(), self.isolated());
        let phi_s = self.uniform(self.options.allocation);
        let phi_r = self.uniform(self.options.allocation);
        ModelSpec::two_egg(migrant, resident, phi_s, phi_r)
    }

    /// Two-egg spec whose members have the same reproduction number.
    pub fn two_egg_balanced(&mut self) -> Result<ModelSpec> {
        let spec = self.two_egg();
        let (rs, rr) = member_r0s(&spec)?.expect("coupled spec");
        let ModelSpec::TwoEgg(TwoEggSpec {
            migrant,
            resident,
            phi_s,
            phi_r,
        }) = spec
        else {
            unreachable!()
        };
        Ok(ModelSpec::two_egg(
            migrant,
            resident.scale_fecundities(rs / rr),
            phi_s,
            phi_r,
        ))
    }
}

/// Rescales fecundities so that the reproduction number equals `target`.
pub fn with_r0(spec: &ModelSpec, target: f64) -> Result<ModelSpec> {
    let current = r0(spec)?;
    Ok(spec.scale_fecundities(target / current))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_valid_and_seeded() {
        let mut a = SpecSampler::new(3, SamplerOptions::default());
        let mut b = SpecSampler::new(3, SamplerOptions::default());
        for _ in 0..50 {
            let (x, y) = (a.two_egg(), b.two_egg());
            assert_eq!(x, y);
            assert!(x.validate().is_valid(), "{}", x.validate());
        }
    }

    #[test]
    fn density_dependent_family() {
        let mut s = SpecSampler::new(1, SamplerOptions::density_dependent());
        for _ in 0..20 {
            let spec = s.single_egg();
            assert!(spec.is_density_dependent());
            assert!(spec.validate().is_valid());
        }
    }

    #[test]
    fn rescaling_hits_target() {
        let mut s = SpecSampler::new(9, SamplerOptions::default());
        for spec in [s.isolated().into(), s.single_egg(), s.two_egg()] {
            let scaled = with_r0(&spec, 0.7).unwrap();
            assert!((r0(&scaled).unwrap() - 0.7).abs() < 1e-12);
        }
        let balanced = s.two_egg_balanced().unwrap();
        let (rs, rr) = member_r0s(&balanced).unwrap().unwrap();
        assert!((rs - rr).abs() <= 1e-12 * rs);
    }
}
