//! Sampled checks of the order-theoretic hypotheses behind the
//! extinction / fixed-point / unbounded trichotomy. Every check is seeded
//! and draws coordinates log-uniformly from `[1e-3, 1e3]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::bounds::upper_bound_vector;
use super::simulate::sup_norm;
use super::step::PopulationMap;
use super::trichotomy::{log_uniform, log_uniform_vector, STRICT_MARGIN};
use crate::error::{Error, Result};
use crate::model::ModelSpec;

/// Relative slack for comparisons that hold exactly in real arithmetic.
pub const ROUNDING_SLACK: f64 = 1e-14;

/// At most this many violations are stored; all are counted.
const MAX_RECORDED: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyViolation {
    pub sample: usize,
    pub coordinate: usize,
    /// Amount by which the inequality failed.
    pub margin: f64,
    pub x: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    pub samples: usize,
    pub violation_count: usize,
    pub violations: Vec<PropertyViolation>,
    /// Coordinates where the compared quantities were equal (to rounding)
    /// in every sample.
    pub equal_coordinates: Vec<usize>,
    pub verdict: Verdict,
}

impl PropertyReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

struct Collector {
    property: String,
    samples: usize,
    violation_count: usize,
    violations: Vec<PropertyViolation>,
}

impl Collector {
    fn new(property: impl Into<String>) -> Self {
        Collector {
            property: property.into(),
            samples: 0,
            violation_count: 0,
            violations: Vec::new(),
        }
    }

    fn record(&mut self, coordinate: usize, margin: f64, x: &[f64]) {
        self.violation_count += 1;
        if self.violations.len() < MAX_RECORDED {
            self.violations.push(PropertyViolation {
                sample: self.samples,
                coordinate,
                margin,
                x: x.to_vec(),
            });
        }
    }

    fn finish(self, equal_coordinates: Vec<usize>) -> PropertyReport {
        PropertyReport {
            verdict: if self.violation_count == 0 {
                Verdict::Pass
            } else {
                Verdict::Fail
            },
            property: self.property,
            samples: self.samples,
            violation_count: self.violation_count,
            violations: self.violations,
            equal_coordinates,
        }
    }
}

/// `x <= y` implies `F(x) <= F(y)`. Pairs are `y = x + d` with each
/// coordinate of `d` either zero or log-uniform; the first pair is `x = 0`.
pub fn check_monotone_map<M: PopulationMap>(map: &M, samples: usize, seed: u64) -> PropertyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::new("monotone");
    let dim = map.dim();
    for s in 0..samples {
        let x = if s == 0 {
            vec![0.0; dim]
        } else {
            log_uniform_vector(&mut rng, dim)
        };
        let y: Vec<f64> = x
            .iter()
            .map(|&v| {
                if rng.random_bool(0.5) {
                    v + log_uniform(&mut rng)
                } else {
                    v
                }
            })
            .collect();
        let (fx, fy) = (map.apply(&x), map.apply(&y));
        for (i, (a, b)) in fx.iter().zip(&fy).enumerate() {
            if a - b > ROUNDING_SLACK * b.abs() {
                c.record(i, a - b, &x);
            }
        }
        c.samples += 1;
    }
    c.finish(Vec::new())
}

/// `lambda F^r(x) << F^r(lambda x)` for `x >> 0`, `0 < lambda < 1`, with
/// strictness margin `1e-12` relative. Coordinates where the two sides agree
/// to rounding in every sample are listed in `equal_coordinates`.
pub fn check_strong_sublinear_map<M: PopulationMap>(
    map: &M,
    r: usize,
    samples: usize,
    seed: u64,
) -> PropertyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::new(format!("strongly_sublinear_r{r}"));
    let dim = map.dim();
    let mut equal = vec![samples > 0; dim];
    for _ in 0..samples {
        let x = log_uniform_vector(&mut rng, dim);
        let lambda = rng.random_range(0.01..0.99);
        let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        let lhs: Vec<f64> = map.iterate(&x, r).iter().map(|v| lambda * v).collect();
        let rhs = map.iterate(&scaled, r);
        for (i, (a, b)) in lhs.iter().zip(&rhs).enumerate() {
            let gap = b - a;
            if gap.abs() > ROUNDING_SLACK * b.abs() {
                equal[i] = false;
            }
            if gap <= STRICT_MARGIN * b.abs() {
                c.record(i, -gap, &x);
            }
        }
        c.samples += 1;
    }
    let equal_coordinates = (0..dim).filter(|&i| equal[i]).collect();
    c.finish(equal_coordinates)
}

/// `F^r(x) >> 0` for `x > 0`. Starts are every unit vector followed by
/// `samples` sparse positive vectors.
pub fn check_eventual_positivity_map<M: PopulationMap>(
    map: &M,
    r: usize,
    samples: usize,
    seed: u64,
) -> PropertyReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::new(format!("eventually_positive_r{r}"));
    let dim = map.dim();
    let density = (2.0 / dim as f64).min(1.0);
    let mut starts: Vec<Vec<f64>> = (0..dim)
        .map(|k| {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            e
        })
        .collect();
    for _ in 0..samples {
        let mut x: Vec<f64> = (0..dim)
            .map(|_| {
                if rng.random_bool(density) {
                    log_uniform(&mut rng)
                } else {
                    0.0
                }
            })
            .collect();
        if x.iter().all(|&v| v == 0.0) {
            x[rng.random_range(0..dim)] = log_uniform(&mut rng);
        }
        starts.push(x);
    }
    for x in &starts {
        let y = map.iterate(x, r);
        let floor = STRICT_MARGIN * sup_norm(&y);
        for (i, &v) in y.iter().enumerate() {
            if v.is_nan() || v <= floor {
                c.record(i, floor - v, x);
            }
        }
        c.samples += 1;
    }
    c.finish(Vec::new())
}

fn require_density_dependent(spec: &ModelSpec) -> Result<()> {
    spec.ensure_valid()?;
    if spec.is_density_dependent() {
        Ok(())
    } else {
        Err(Error::NotDensityDependent)
    }
}

pub fn check_monotone(spec: &ModelSpec, samples: usize, seed: u64) -> Result<PropertyReport> {
    spec.ensure_valid()?;
    Ok(check_monotone_map(spec, samples, seed))
}

pub fn check_strong_sublinear(
    spec: &ModelSpec,
    r: usize,
    samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    require_density_dependent(spec)?;
    if r == 0 {
        return Err(Error::Config("r must be at least 1".into()));
    }
    Ok(check_strong_sublinear_map(spec, r, samples, seed))
}

/// `r = None` uses the state dimension.
pub fn check_eventual_positivity(
    spec: &ModelSpec,
    r: Option<usize>,
    samples: usize,
    seed: u64,
) -> Result<PropertyReport> {
    spec.ensure_valid()?;
    Ok(check_eventual_positivity_map(
        spec,
        r.unwrap_or(spec.dim()),
        samples,
        seed,
    ))
}

/// Largest relative deviation from `lambda F_e(x) = F_e(lambda x)` over the
/// egg coordinates `e`: the egg update is linear, so one step of the map is
/// never strongly sublinear there.
pub fn egg_linearity_defect(spec: &ModelSpec, samples: usize, seed: u64) -> Result<f64> {
    spec.ensure_valid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eggs = spec.egg_indices();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let x = log_uniform_vector(&mut rng, spec.dim());
        let lambda = rng.random_range(0.01..0.99);
        let scaled: Vec<f64> = x.iter().map(|v| lambda * v).collect();
        let (fx, fl) = (spec.apply(&x), spec.apply(&scaled));
        for &e in &eggs {
            worst = worst.max((lambda * fx[e] - fl[e]).abs() / fl[e].abs().max(f64::MIN_POSITIVE));
        }
    }
    Ok(worst)
}

/// `F(F(x)) <= a` for the order-interval bound `a`.
pub fn check_order_bound(spec: &ModelSpec, samples: usize, seed: u64) -> Result<PropertyReport> {
    let a = upper_bound_vector(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::new("order_bound");
    for _ in 0..samples {
        let x = log_uniform_vector(&mut rng, spec.dim());
        let y = spec.iterate(&x, 2);
        for (i, (v, bound)) in y.iter().zip(&a).enumerate() {
            if v - bound > ROUNDING_SLACK * bound {
                c.record(i, v - bound, &x);
            }
        }
        c.samples += 1;
    }
    Ok(c.finish(Vec::new()))
}

/// `F(x) <= A_0 x`: density only ever lowers the transition rates.
pub fn check_linear_dominance(spec: &ModelSpec, samples: usize, seed: u64) -> Result<PropertyReport> {
    spec.ensure_valid()?;
    let a0 = spec.linearization()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c = Collector::new("linear_dominance");
    for _ in 0..samples {
        let x = log_uniform_vector(&mut rng, spec.dim());
        let (fx, lx) = (spec.apply(&x), a0.mul_vec(&x)?);
        for (i, (a, b)) in fx.iter().zip(&lx).enumerate() {
            if a - b > ROUNDING_SLACK * b.abs() {
                c.record(i, a - b, &x);
            }
        }
        c.samples += 1;
    }
    Ok(c.finish(Vec::new()))
}
