use crate::error::{Error, Result};
use crate::model::ModelSpec;

/// Vector `a` with `step(step(x)) <= a` for every `x >= 0`.
///
/// A non-egg coordinate is a sum of bounded flows `s(x) <= b / c`, so it is
/// at most the weighted sum of the bounds feeding it. After one more step an
/// egg coordinate is a fecundity-weighted sum of non-egg coordinates. For an
/// isolated spec this is
/// `(f_n m_n + sum_i f_i m_{i-1}, m_1, ..., m_{n-2}, m_{n-1} + m_n)`.
pub fn upper_bound_vector(spec: &ModelSpec) -> Result<Vec<f64>> {
    spec.ensure_valid()?;
    let layout = spec.layout();
    let mut a = vec![0.0; layout.dim];
    for entry in &layout.transitions {
        let m = match entry.rule.flow_bound() {
            Some(m) if entry.rule.is_density_dependent() => m,
            _ => return Err(Error::NotDensityDependent),
        };
        a[entry.row] += entry.weight * m;
    }
    for entry in &layout.fecundities {
        debug_assert!(!layout.egg_rows.contains(&entry.col));
        a[entry.row] += entry.value * a[entry.col];
    }
    Ok(a)
}
