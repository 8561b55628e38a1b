//! One step of the density-dependent maps, written coordinate by coordinate.
//!
//! For a population with stages `1..n` (stage 1 = eggs) and flows
//! `s_i(x) = x t_i(x)`:
//!
//! ```text
//! eggs'     = sum_j f_j x_j
//! x_2'      = (allocation) * s_1(eggs)
//! x_i'      = s_{i-1}(x_{i-1})                 2 < i < n
//! x_n'      = s_{n-1}(x_{n-1}) + s_n(x_n)
//! ```
//!
//! The coupled models share or split the egg pool as described on
//! [`ModelSpec`]. The matrix route `A(x) x` is kept as an independent
//! cross-check ([`step_via_matrix`]).

use crate::error::{Error, Result};
use crate::model::{IsolatedSpec, ModelSpec, SingleEggSpec, TwoEggSpec};

/// A map of the nonnegative orthant into itself.
pub trait PopulationMap: Sync {
    fn dim(&self) -> usize;

    fn apply(&self, x: &[f64]) -> Vec<f64>;

    /// Coordinates whose image is linear in the state (egg pools).
    fn linear_coordinates(&self) -> Vec<usize> {
        Vec::new()
    }

    /// `r`-fold composition.
    fn iterate(&self, x: &[f64], r: usize) -> Vec<f64> {
        let mut y = x.to_vec();
        for _ in 0..r {
            y = self.apply(&y);
        }
        y
    }
}

/// Stages `2..n` of one population after a step. `entry` is the flow out of
/// the egg pool into stage 2; `stages` holds stages `2..n` before the step.
fn advance_chain(member: &IsolatedSpec, entry: f64, stages: &[f64], out: &mut Vec<f64>) {
    let t = &member.transitions;
    let last = stages.len() - 1;
    for k in 0..=last {
        let inflow = if k == 0 { entry } else { t[k].flow(stages[k - 1]) };
        let survivors = if k == last { t[k + 1].flow(stages[k]) } else { 0.0 };
        out.push(inflow + survivors);
    }
}

fn egg_output(member: &IsolatedSpec, stages: &[f64]) -> f64 {
    member.fecundities.iter().zip(stages).map(|(f, x)| f * x).sum()
}

pub(crate) fn step_unchecked(spec: &ModelSpec, x: &[f64]) -> Vec<f64> {
    let mut y = Vec::with_capacity(x.len());
    match spec {
        ModelSpec::Isolated(s) => {
            let z = &x[1..];
            y.push(egg_output(s, z));
            advance_chain(s, s.transitions[0].flow(x[0]), z, &mut y);
        }
        ModelSpec::SingleEgg(SingleEggSpec {
            migrant,
            resident,
            phi,
        }) => {
            let n = migrant.stages();
            let (zs, zr) = (&x[1..n], &x[n..]);
            y.push(egg_output(migrant, zs) + egg_output(resident, zr));
            advance_chain(migrant, phi * migrant.transitions[0].flow(x[0]), zs, &mut y);
            advance_chain(
                resident,
                (1.0 - phi) * resident.transitions[0].flow(x[0]),
                zr,
                &mut y,
            );
        }
        ModelSpec::TwoEgg(TwoEggSpec {
            migrant,
            resident,
            phi_s,
            phi_r,
        }) => {
            let n = migrant.stages();
            let (zs, zr) = (&x[1..n], &x[n + 1..]);
            let from_migrants = egg_output(migrant, zs);
            let from_residents = egg_output(resident, zr);
            y.push(phi_s * from_migrants + (1.0 - phi_r) * from_residents);
            advance_chain(migrant, migrant.transitions[0].flow(x[0]), zs, &mut y);
            y.push((1.0 - phi_s) * from_migrants + phi_r * from_residents);
            advance_chain(resident, resident.transitions[0].flow(x[n]), zr, &mut y);
        }
    }
    #[cfg(debug_assertions)]
    {
        let via_matrix = spec.layout().assemble(x).mul_vec(x).expect("dimension checked");
        for (a, b) in y.iter().zip(&via_matrix) {
            debug_assert!(
                (a - b).abs() <= 1e-14 * a.abs().max(b.abs()) + f64::MIN_POSITIVE,
                "coordinate map and matrix route disagree: {a} vs {b}"
            );
        }
    }
    y
}

pub(crate) fn check_state(spec: &ModelSpec, x: &[f64]) -> Result<()> {
    if x.len() != spec.dim() {
        return Err(Error::DimensionMismatch {
            expected: spec.dim(),
            found: x.len(),
        });
    }
    match x.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        Some(index) => Err(Error::InvalidState {
            index,
            value: x[index],
        }),
        None => Ok(()),
    }
}

/// One step of the model, `x -> A(x) x`.
pub fn step(spec: &ModelSpec, x: &[f64]) -> Result<Vec<f64>> {
    spec.ensure_valid()?;
    check_state(spec, x)?;
    Ok(step_unchecked(spec, x))
}

/// One step through the assembled matrix, `A(x) x`.
pub fn step_via_matrix(spec: &ModelSpec, x: &[f64]) -> Result<Vec<f64>> {
    check_state(spec, x)?;
    spec.assemble(x)?.mul_vec(x)
}

impl PopulationMap for ModelSpec {
    fn dim(&self) -> usize {
        ModelSpec::dim(self)
    }

    /// Callers must pass a valid spec and a nonnegative state of the right
    /// length; [`step`] checks both.
    fn apply(&self, x: &[f64]) -> Vec<f64> {
        step_unchecked(self, x)
    }

    fn linear_coordinates(&self) -> Vec<usize> {
        self.egg_indices()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::TransitionRule as R;

    fn bh_pair(f2: f64) -> ModelSpec {
        IsolatedSpec::new(vec![R::beverton_holt(0.5, 1.0); 2], vec![f2]).into()
    }

    #[test]
    fn origin_is_fixed() {
        for spec in [
            bh_pair(8.0),
            ModelSpec::two_egg(
                IsolatedSpec::linear(&[0.5, 0.4, 0.2], &[3.0, 10.0]),
                IsolatedSpec::linear(&[0.25, 0.2], &[2.0]),
                0.3,
                0.6,
            ),
        ] {
            assert!(step(&spec, &vec![0.0; spec.dim()])
                .unwrap()
                .iter()
                .all(|&v| v == 0.0));
        }
    }

    #[test]
    fn beverton_holt_hand_value() {
        // (8 * 1, s1(1) + s2(1)) with s(x) = 0.5 x / (1 + x)
        assert_eq!(step(&bh_pair(8.0), &[1.0, 1.0]).unwrap(), vec![8.0, 0.5]);
    }

    #[test]
    fn constant_rules_recover_linear_model() {
        let spec: ModelSpec = IsolatedSpec::linear(&[0.5, 0.4, 0.2], &[3.0, 10.0]).into();
        let x = [1.0, 2.0, 3.0];
        let a = spec.linearization().unwrap();
        assert_eq!(step(&spec, &x).unwrap(), a.mul_vec(&x).unwrap());
    }

    #[test]
    fn routes_agree_on_coupled_models() {
        let mig = IsolatedSpec::new(
            vec![
                R::beverton_holt(0.6, 0.5),
                R::beverton_holt(0.7, 2.0),
                R::beverton_holt(0.3, 0.1),
            ],
            vec![1.5, 4.0],
        );
        let res = IsolatedSpec::new(
            vec![
                R::beverton_holt(0.4, 1.0),
                R::beverton_holt(0.9, 0.2),
                R::beverton_holt(0.5, 0.3),
                R::beverton_holt(0.2, 3.0),
            ],
            vec![0.0, 2.0, 6.0],
        );
        let single = ModelSpec::single_egg(mig.clone(), res.clone(), 0.35);
        let two = ModelSpec::two_egg(mig, res, 0.2, 0.7);
        for spec in [single, two] {
            let x: Vec<f64> = (0..spec.dim()).map(|k| 0.3 + 1.7 * k as f64).collect();
            let a = step(&spec, &x).unwrap();
            let b = step_via_matrix(&spec, &x).unwrap();
            for (u, v) in a.iter().zip(&b) {
                assert!((u - v).abs() <= 1e-14 * u.abs().max(1.0));
            }
        }
    }

    #[test]
    fn rejects_bad_states() {
        let spec = bh_pair(8.0);
        assert!(matches!(
            step(&spec, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            step(&spec, &[1.0, -1.0]),
            Err(Error::InvalidState { index: 1, .. })
        ));
        assert!(matches!(
            step(&spec, &[f64::NAN, 1.0]),
            Err(Error::InvalidState { index: 0, .. })
        ));
    }
}
