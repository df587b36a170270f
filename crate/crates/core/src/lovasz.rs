//! Evaluation of the piecewise-linear extension `h(x)` on the unit cube,
//! by the sorted telescoping form and by the Möbius min-monomial expansion.

use thiserror::Error;

use crate::capacity::{Capacity, MoebiusRepresentation};

/// Möbius coefficients below this magnitude are skipped during evaluation;
/// transforms of sparse capacities produce exact-zero fill.
const COEFF_CUTOFF: f64 = 1e-15;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("point has {got} coordinates, capacity has {expected} players")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coordinate {index} = {value} outside [0, 1]")]
    CoordinateOutOfRange { index: usize, value: f64 },
}

/// A point of `[0,1]^n`. Evaluation outside the cube is rejected.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluationPoint {
    coords: Vec<f64>,
}

impl EvaluationPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self, EvalError> {
        for (index, &value) in coords.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(EvalError::CoordinateOutOfRange { index, value });
            }
        }
        Ok(EvaluationPoint { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

fn check_dims(n: usize, x: &EvaluationPoint) -> Result<(), EvalError> {
    if x.len() != n {
        return Err(EvalError::DimensionMismatch {
            expected: n,
            got: x.len(),
        });
    }
    Ok(())
}

/// Evaluates `h(x)` by sorting the coordinates into their canonical simplex
/// and telescoping along the corresponding maximal chain. Ties are broken
/// by ascending original index; any consistent rule gives the same value.
pub fn eval_sorted(v: &Capacity, x: &EvaluationPoint) -> Result<f64, EvalError> {
    check_dims(v.n(), x)?;
    let mut idx: Vec<usize> = (0..v.n()).collect();
    Ok(eval_sorted_unchecked(v, x.coords(), &mut idx))
}

/// Hot-path variant without validation; `idx` is scratch of length `n`.
pub(crate) fn eval_sorted_unchecked(v: &Capacity, coords: &[f64], idx: &mut [usize]) -> f64 {
    for (i, slot) in idx.iter_mut().enumerate() {
        *slot = i;
    }
    // stable sort keeps tied coordinates in ascending index order
    idx.sort_by(|&a, &b| coords[b].total_cmp(&coords[a]));
    let values = v.values();
    let mut mask = 0usize;
    let mut prev = 0.0;
    let mut acc = 0.0;
    for &i in idx.iter() {
        mask |= 1 << i;
        let h = values[mask];
        acc += (h - prev) * coords[i];
        prev = h;
    }
    acc
}

/// Evaluates the telescoping form along an explicit permutation of `1..=n`
/// instead of the sorted one. Used to certify that tie-breaking is harmless.
pub fn eval_with_permutation(
    v: &Capacity,
    x: &EvaluationPoint,
    sigma: &[usize],
) -> Result<f64, EvalError> {
    check_dims(v.n(), x)?;
    let profile = crate::capacity::knot_profile(v, sigma)
        .map_err(|_| EvalError::DimensionMismatch {
            expected: v.n(),
            got: sigma.len(),
        })?;
    let h = profile.values();
    let mut acc = 0.0;
    for (i, &player) in sigma.iter().enumerate() {
        acc += (h[i + 1] - h[i]) * x.coords()[player - 1];
    }
    Ok(acc)
}

/// Evaluates `h(x) = Σ_A m(A) · min_{i∈A} x_i` from the Möbius expansion.
pub fn eval_moebius(m: &MoebiusRepresentation, x: &EvaluationPoint) -> Result<f64, EvalError> {
    check_dims(m.n(), x)?;
    let coords = x.coords();
    let mut acc = 0.0;
    for mask in 1..m.coeffs().len() {
        let c = m.coeffs()[mask];
        if c.abs() < COEFF_CUTOFF {
            continue;
        }
        let mut min = f64::INFINITY;
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            min = min.min(coords[i]);
            rest &= rest - 1;
        }
        acc += c * min;
    }
    Ok(acc)
}
