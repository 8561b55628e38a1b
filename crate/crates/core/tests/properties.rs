mod common;

use common::{projection, r0_oracle, rel_err, two_pool};
use partial_migration::dynamics::{step, step_via_matrix};
use partial_migration::sampling::{SamplerOptions, SpecSampler};
use partial_migration::spectral::{classify, r0, two_pool_gradient, two_pool_r0};
use partial_migration::{ModelSpec, Population};
use proptest::prelude::*;

fn spec_from(seed: u64, kind: u8, density: bool) -> ModelSpec {
    let options = if density {
        SamplerOptions::density_dependent()
    } else {
        SamplerOptions::default()
    };
    let mut s = SpecSampler::new(seed, options);
    match kind % 3 {
        0 => s.isolated().into(),
        1 => s.single_egg(),
        _ => s.two_egg(),
    }
}

fn any_spec() -> impl Strategy<Value = ModelSpec> {
    (any::<u64>(), 0u8..3, any::<bool>()).prop_map(|(seed, kind, dd)| spec_from(seed, kind, dd))
}

fn state(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0..1e3f64], dim)
}

fn spec_and_state() -> impl Strategy<Value = (ModelSpec, Vec<f64>)> {
    any_spec().prop_flat_map(|spec| {
        let d = spec.dim();
        (Just(spec), state(d))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sampled_specs_are_valid(spec in any_spec()) {
        prop_assert!(spec.validate().is_valid(), "{}", spec.validate());
    }

    #[test]
    fn json_round_trip(spec in any_spec()) {
        let back = ModelSpec::from_json(&spec.to_json_pretty()).unwrap();
        prop_assert_eq!(&back, &spec);
        prop_assert_eq!(back.digest(), spec.digest());
    }

    #[test]
    fn step_keeps_states_nonnegative((spec, x) in spec_and_state()) {
        let y = step(&spec, &x).unwrap();
        prop_assert!(y.iter().all(|&v| v >= 0.0 && v.is_finite()));
    }

    #[test]
    fn step_is_dominated_by_the_linearization((spec, x) in spec_and_state()) {
        let (a0, _) = projection(&spec);
        let y = step(&spec, &x).unwrap();
        for i in 0..spec.dim() {
            let bound: f64 = (0..spec.dim()).map(|j| a0[(i, j)] * x[j]).sum();
            prop_assert!(y[i] <= bound * (1.0 + 1e-14) + 1e-300, "coordinate {}: {} > {}", i, y[i], bound);
        }
    }

    #[test]
    fn coordinate_and_matrix_steps_agree((spec, x) in spec_and_state()) {
        let a = step(&spec, &x).unwrap();
        let b = step_via_matrix(&spec, &x).unwrap();
        for (u, v) in a.iter().zip(&b) {
            prop_assert!((u - v).abs() <= 1e-14 * u.abs().max(v.abs()).max(1.0));
        }
    }

    #[test]
    fn r0_matches_oracle(spec in any_spec()) {
        prop_assert!(rel_err(r0(&spec).unwrap(), r0_oracle(&spec)) <= 1e-10);
    }

    #[test]
    fn raising_a_fecundity_never_lowers_growth(spec in any_spec(), which in any::<prop::sample::Index>(), bump in 0.01..5.0f64) {
        let mut bigger = spec.clone();
        let pops: Vec<Population> = spec.populations().into_iter().map(|(p, _)| p).collect();
        let pop = bigger.population_mut(pops[which.index(pops.len())]).unwrap();
        let k = which.index(pop.fecundities.len());
        pop.fecundities[k] += bump;
        let (before, after) = (classify(&spec).unwrap(), classify(&bigger).unwrap());
        prop_assert!(after.r0 >= before.r0 * (1.0 - 1e-12));
        prop_assert!(after.lambda >= before.lambda * (1.0 - 1e-9));
    }

    #[test]
    fn single_pool_r0_between_members(seed in any::<u64>()) {
        let mut s = SpecSampler::new(seed, SamplerOptions::default());
        let spec = s.single_egg();
        let ModelSpec::SingleEgg(ref inner) = spec else { unreachable!() };
        let rs = r0(&inner.migrant.clone().into()).unwrap();
        let rr = r0(&inner.resident.clone().into()).unwrap();
        let v = r0(&spec).unwrap();
        prop_assert!(v >= rs.min(rr) * (1.0 - 1e-12) && v <= rs.max(rr) * (1.0 + 1e-12));
    }

    #[test]
    fn two_pool_swaps_symmetrically(rs in 0.01..20.0f64, rr in 0.01..20.0f64, ps in 0.0..=1.0f64, pr in 0.0..=1.0f64) {
        let a = two_pool_r0(rs, rr, ps, pr).unwrap();
        let b = two_pool_r0(rr, rs, pr, ps).unwrap();
        prop_assert!(rel_err(a, b) <= 1e-13);
        prop_assert!(rel_err(a, two_pool(rs, rr, ps, pr)) <= 1e-13);
        prop_assert!(a <= rs.max(rr) * (1.0 + 1e-13));
    }

    #[test]
    fn gradient_swaps_symmetrically(rs in 0.01..20.0f64, rr in 0.01..20.0f64, ps in 0.01..0.99f64, pr in 0.01..0.99f64) {
        prop_assume!((rs - rr).abs() > 1e-3);
        let (ds, dr) = two_pool_gradient(rs, rr, ps, pr).unwrap();
        let (es, er) = two_pool_gradient(rr, rs, pr, ps).unwrap();
        prop_assert!((ds - er).abs() <= 1e-12 * ds.abs().max(1.0));
        prop_assert!((dr - es).abs() <= 1e-12 * dr.abs().max(1.0));
    }
}
