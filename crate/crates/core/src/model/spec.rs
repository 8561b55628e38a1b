use std::fmt;

use serde::{Deserialize, Serialize};

use super::rule::TransitionRule;

/// Which life history a parameter or sub-model belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Population {
    Migrant,
    Resident,
}

impl fmt::Display for Population {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Population::Migrant => "migrant",
            Population::Resident => "resident",
        })
    }
}

/// Single stage-structured population with `n` stages.
///
/// Stage 1 holds newborns (eggs). `transitions[i]` moves stage `i + 1` into
/// stage `i + 2`; the last entry is the survival of the final stage.
/// `fecundities[k]` is the per-capita egg output of stage `k + 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsolatedSpec {
    pub transitions: Vec<TransitionRule>,
    pub fecundities: Vec<f64>,
}

impl IsolatedSpec {
    pub fn new(transitions: Vec<TransitionRule>, fecundities: Vec<f64>) -> Self {
        IsolatedSpec {
            transitions,
            fecundities,
        }
    }

    /// All-constant spec from plain probabilities.
    pub fn linear(transitions: &[f64], fecundities: &[f64]) -> Self {
        IsolatedSpec::new(
            transitions.iter().map(|&t| TransitionRule::Constant(t)).collect(),
            fecundities.to_vec(),
        )
    }

    pub fn stages(&self) -> usize {
        self.transitions.len()
    }

    /// Low-density transition probabilities `t_i(0)`.
    pub fn transitions_at_zero(&self) -> Vec<f64> {
        self.transitions.iter().map(TransitionRule::at_zero).collect()
    }

    pub fn is_density_dependent(&self) -> bool {
        self.transitions.iter().all(TransitionRule::is_density_dependent)
    }

    /// Copy with every fecundity multiplied by `factor`.
    pub fn scale_fecundities(&self, factor: f64) -> Self {
        IsolatedSpec {
            transitions: self.transitions.clone(),
            fecundities: self.fecundities.iter().map(|f| f * factor).collect(),
        }
    }
}

/// Migrants and residents sharing one egg pool; a fraction `phi` of the
/// eggs enters the migrant life history.
#[derive(Clone, Debug, PartialEq)]
pub struct SingleEggSpec {
    pub migrant: IsolatedSpec,
    pub resident: IsolatedSpec,
    pub phi: f64,
}

/// Separate migrant and resident egg pools. A fraction `phi_s` of migrant
/// offspring stay migrants; a fraction `phi_r` of resident offspring stay
/// residents.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoEggSpec {
    pub migrant: IsolatedSpec,
    pub resident: IsolatedSpec,
    pub phi_s: f64,
    pub phi_r: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Isolated(IsolatedSpec),
    SingleEgg(SingleEggSpec),
    TwoEgg(TwoEggSpec),
}

impl From<IsolatedSpec> for ModelSpec {
    fn from(spec: IsolatedSpec) -> Self {
        ModelSpec::Isolated(spec)
    }
}

impl From<SingleEggSpec> for ModelSpec {
    fn from(spec: SingleEggSpec) -> Self {
        ModelSpec::SingleEgg(spec)
    }
}

impl From<TwoEggSpec> for ModelSpec {
    fn from(spec: TwoEggSpec) -> Self {
        ModelSpec::TwoEgg(spec)
    }
}

impl ModelSpec {
    pub fn single_egg(migrant: IsolatedSpec, resident: IsolatedSpec, phi: f64) -> Self {
        ModelSpec::SingleEgg(SingleEggSpec {
            migrant,
            resident,
            phi,
        })
    }

    pub fn two_egg(migrant: IsolatedSpec, resident: IsolatedSpec, phi_s: f64, phi_r: f64) -> Self {
        ModelSpec::TwoEgg(TwoEggSpec {
            migrant,
            resident,
            phi_s,
            phi_r,
        })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ModelSpec::Isolated(_) => "isolated",
            ModelSpec::SingleEgg(_) => "single_egg",
            ModelSpec::TwoEgg(_) => "two_egg",
        }
    }

    /// Length of the state vector.
    pub fn dim(&self) -> usize {
        match self {
            ModelSpec::Isolated(s) => s.stages(),
            ModelSpec::SingleEgg(s) => s.migrant.stages() + s.resident.stages() - 1,
            ModelSpec::TwoEgg(s) => s.migrant.stages() + s.resident.stages(),
        }
    }

    /// Member populations, labelled. An isolated spec is reported as a
    /// migrant population.
    pub fn populations(&self) -> Vec<(Population, &IsolatedSpec)> {
        match self {
            ModelSpec::Isolated(s) => vec![(Population::Migrant, s)],
            ModelSpec::SingleEgg(SingleEggSpec {
                migrant, resident, ..
            })
            | ModelSpec::TwoEgg(TwoEggSpec {
                migrant, resident, ..
            }) => vec![(Population::Migrant, migrant), (Population::Resident, resident)],
        }
    }

    pub fn population(&self, which: Population) -> Option<&IsolatedSpec> {
        self.populations()
            .into_iter()
            .find(|(p, _)| *p == which)
            .map(|(_, s)| s)
    }

    pub fn population_mut(&mut self, which: Population) -> Option<&mut IsolatedSpec> {
        match (self, which) {
            (ModelSpec::Isolated(s), Population::Migrant) => Some(s),
            (ModelSpec::Isolated(_), Population::Resident) => None,
            (ModelSpec::SingleEgg(s), Population::Migrant) => Some(&mut s.migrant),
            (ModelSpec::SingleEgg(s), Population::Resident) => Some(&mut s.resident),
            (ModelSpec::TwoEgg(s), Population::Migrant) => Some(&mut s.migrant),
            (ModelSpec::TwoEgg(s), Population::Resident) => Some(&mut s.resident),
        }
    }

    /// True when every transition of every member population is
    /// density-dependent.
    pub fn is_density_dependent(&self) -> bool {
        self.populations().iter().all(|(_, s)| s.is_density_dependent())
    }

    /// Allocation parameters strictly inside `(0, 1)` (vacuous for isolated
    /// specs). Needed for irreducibility of coupled models.
    pub fn has_interior_allocation(&self) -> bool {
        let open = |p: f64| p > 0.0 && p < 1.0;
        match self {
            ModelSpec::Isolated(_) => true,
            ModelSpec::SingleEgg(s) => open(s.phi),
            ModelSpec::TwoEgg(s) => open(s.phi_s) && open(s.phi_r),
        }
    }

    /// Zero-based indices of the egg (newborn) coordinates.
    pub fn egg_indices(&self) -> Vec<usize> {
        match self {
            ModelSpec::Isolated(_) | ModelSpec::SingleEgg(_) => vec![0],
            ModelSpec::TwoEgg(s) => vec![0, s.migrant.stages()],
        }
    }

    /// Copy with every fecundity of every population multiplied by `factor`.
    /// Every reproduction number is homogeneous of degree one in the
    /// fecundities, so this rescales them by `factor` too.
    pub fn scale_fecundities(&self, factor: f64) -> Self {
        match self {
            ModelSpec::Isolated(s) => ModelSpec::Isolated(s.scale_fecundities(factor)),
            ModelSpec::SingleEgg(s) => ModelSpec::SingleEgg(SingleEggSpec {
                migrant: s.migrant.scale_fecundities(factor),
                resident: s.resident.scale_fecundities(factor),
                phi: s.phi,
            }),
            ModelSpec::TwoEgg(s) => ModelSpec::TwoEgg(TwoEggSpec {
                migrant: s.migrant.scale_fecundities(factor),
                resident: s.resident.scale_fecundities(factor),
                phi_s: s.phi_s,
                phi_r: s.phi_r,
            }),
        }
    }
}
