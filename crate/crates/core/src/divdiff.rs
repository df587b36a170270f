//! Divided differences of truncated power functions and B-splines with
//! arbitrary, possibly repeated knots.
//!
//! The workhorse is the de Boor / Varsi recurrence: split the knots at the
//! evaluation point `y` into `b_1..b_r < y` and `c_1..c_s ≥ y`, then fill
//! the tableau
//!
//! ```text
//! alpha[k][l] = ((c_l - y) * alpha[k-1][l] + (y - b_k) * alpha[k][l-1]) / (c_l - b_k)
//! ```
//!
//! All numerators and denominators are nonnegative by construction, so the
//! recursion is subtraction-free and stable even when knots coincide. Three
//! initializations are used:
//!
//! * plus, density degree: `alpha[1][1] = 1/(c_1 - b_1)`, zero edges, giving
//!   `Δ[(· - y)_+^{n-1} : a_0..a_n]` at the corner;
//! * plus, full degree: unit top edge, zero left edge, giving
//!   `Δ[(· - y)_+^n : a_0..a_n]`;
//! * minus: unit left edge, zero top edge, giving `Δ[(· - y)_-^n : a_0..a_n]`.
//!
//! A knot exactly equal to `y` is assigned to the `c` side, which makes the
//! truncated-power values right-sided at knots.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum DivDiffError {
    #[error("need at least 2 knots, got {0}")]
    TooFewKnots(usize),
    #[error("knot {index} = {value} is not finite")]
    NonFiniteKnot { index: usize, value: f64 },
    #[error("coincident knots require a polynomial integrand")]
    CoincidentKnots,
    #[error("empty knot vector")]
    EmptyKnots,
}

fn check_knots(knots: &[f64], min_len: usize) -> Result<(), DivDiffError> {
    if knots.len() < min_len {
        return Err(if knots.is_empty() {
            DivDiffError::EmptyKnots
        } else {
            DivDiffError::TooFewKnots(knots.len())
        });
    }
    for (index, &value) in knots.iter().enumerate() {
        if !value.is_finite() {
            return Err(DivDiffError::NonFiniteKnot { index, value });
        }
    }
    Ok(())
}

/// Classical recursive divided difference of an arbitrary function over
/// *distinct* knots. This is the reference oracle; coincident knots are
/// rejected (use [`divdiff_recursive_poly`] for those).
pub fn divdiff_recursive(
    g: impl Fn(f64) -> f64,
    knots: &[f64],
) -> Result<f64, DivDiffError> {
    check_knots(knots, 1)?;
    let n = knots.len();
    let mut col: Vec<f64> = knots.iter().map(|&a| g(a)).collect();
    for j in 1..n {
        for i in 0..n - j {
            let denom = knots[i + j] - knots[i];
            if denom == 0.0 {
                return Err(DivDiffError::CoincidentKnots);
            }
            col[i] = (col[i + 1] - col[i]) / denom;
        }
    }
    Ok(col[0])
}

/// Divided difference of the polynomial with the given coefficients
/// (ascending powers), supporting repeated knots through the derivative
/// branch of the inductive definition.
pub fn divdiff_recursive_poly(coeffs: &[f64], knots: &[f64]) -> Result<f64, DivDiffError> {
    check_knots(knots, 1)?;
    let mut sorted = knots.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();

    // derivative coefficient tables p, p', p'', ...
    let mut derivs: Vec<Vec<f64>> = vec![coeffs.to_vec()];
    for j in 1..n {
        let prev = &derivs[j - 1];
        let next: Vec<f64> = prev
            .iter()
            .enumerate()
            .skip(1)
            .map(|(d, &c)| c * d as f64)
            .collect();
        derivs.push(next);
    }
    let horner = |cs: &[f64], x: f64| cs.iter().rev().fold(0.0, |acc, &c| acc * x + c);

    let mut col: Vec<f64> = sorted.iter().map(|&a| horner(&derivs[0], a)).collect();
    let mut fact = 1.0;
    for j in 1..n {
        fact *= j as f64;
        for i in 0..n - j {
            let denom = sorted[i + j] - sorted[i];
            col[i] = if denom == 0.0 {
                horner(&derivs[j], sorted[i]) / fact
            } else {
                (col[i + 1] - col[i]) / denom
            };
        }
    }
    Ok(col[0])
}

/// `h_0, h_1, …, h_max` of the knots: the complete homogeneous symmetric
/// polynomials, built by a one-pass prefix recurrence.
pub(crate) fn complete_homogeneous(knots: &[f64], max_degree: usize) -> Vec<f64> {
    let mut h = vec![0.0; max_degree + 1];
    h[0] = 1.0;
    for &a in knots {
        for j in 1..=max_degree {
            h[j] += a * h[j - 1];
        }
    }
    h
}

/// Divided difference of the pure power `x^degree` over the knots:
/// zero when `degree < n`, and the complete homogeneous symmetric
/// polynomial `h_{degree-n}` of the knots otherwise (`n + 1` knots).
pub fn divdiff_power_sym(degree: usize, knots: &[f64]) -> f64 {
    assert!(!knots.is_empty(), "divided difference needs at least one knot");
    let n = knots.len() - 1;
    if degree < n {
        return 0.0;
    }
    let r = degree - n;
    if r == 0 {
        return 1.0;
    }
    complete_homogeneous(knots, r)[r]
}

/// Which truncated-power divided difference the tableau produces.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub(crate) enum TruncKind {
    /// `Δ[(· - y)_+^{n-1}]`, the density pairing.
    PlusDensity,
    /// `Δ[(· - y)_+^n]`, one degree higher, for the plus-form CDF.
    PlusFull,
    /// `Δ[(· - y)_-^n]`, the minus-form CDF pairing.
    Minus,
}

/// Reusable buffers for tableau evaluation; keeps the permutation-sum hot
/// loop allocation-free.
pub(crate) struct VarsiScratch {
    b: Vec<f64>,
    c: Vec<f64>,
    grid: Vec<f64>,
}

impl VarsiScratch {
    pub(crate) fn new() -> Self {
        VarsiScratch {
            b: Vec::with_capacity(24),
            c: Vec::with_capacity(24),
            grid: Vec::with_capacity(24 * 24),
        }
    }

    fn partition(&mut self, y: f64, knots: &[f64]) {
        self.b.clear();
        self.c.clear();
        for &a in knots {
            if a < y {
                self.b.push(a);
            } else {
                self.c.push(a);
            }
        }
    }

    /// Evaluates one divided difference. `knots.len()` is `n + 1`.
    pub(crate) fn eval(&mut self, y: f64, knots: &[f64], kind: TruncKind) -> f64 {
        self.partition(y, knots);
        self.fill(y, kind)
    }

    /// Evaluates the full-degree plus and density-degree plus differences in
    /// one pass over a shared knot partition: `(Δ_+^n, Δ_+^{n-1})`.
    pub(crate) fn eval_cdf_pdf(&mut self, y: f64, knots: &[f64]) -> (f64, f64) {
        self.partition(y, knots);
        let full = self.fill(y, TruncKind::PlusFull);
        let dens = self.fill(y, TruncKind::PlusDensity);
        (full, dens)
    }

    fn fill(&mut self, y: f64, kind: TruncKind) -> f64 {
        let r = self.b.len();
        let s = self.c.len();
        if r == 0 {
            return match kind {
                TruncKind::PlusFull => 1.0,
                _ => 0.0,
            };
        }
        if s == 0 {
            return match kind {
                TruncKind::PlusDensity => 0.0,
                TruncKind::PlusFull => 0.0,
                TruncKind::Minus => 1.0,
            };
        }
        let cols = s + 1;
        self.grid.clear();
        self.grid.resize((r + 1) * cols, 0.0);
        match kind {
            TruncKind::PlusDensity => {}
            TruncKind::PlusFull => {
                for l in 1..=s {
                    self.grid[l] = 1.0;
                }
            }
            TruncKind::Minus => {
                for k in 1..=r {
                    self.grid[k * cols] = 1.0;
                }
            }
        }
        for k in 1..=r {
            let bk = self.b[k - 1];
            let row = k * cols;
            let prev = row - cols;
            for l in 1..=s {
                let cl = self.c[l - 1];
                let v = if kind == TruncKind::PlusDensity && k == 1 && l == 1 {
                    1.0 / (cl - bk)
                } else {
                    ((cl - y) * self.grid[prev + l] + (y - bk) * self.grid[row + l - 1])
                        / (cl - bk)
                };
                debug_assert!(
                    kind == TruncKind::Minus || v >= 0.0,
                    "plus tableau entry went negative"
                );
                self.grid[row + l] = v;
            }
        }
        self.grid[r * cols + s]
    }
}

/// `Δ[(· - y)_+^{n-1} : a_0, …, a_n]` for `n + 1` knots: the density-degree
/// plus truncated power difference. Returns 0 when all knots lie on one
/// side of `y`.
pub fn varsi_plus(y: f64, knots: &[f64]) -> Result<f64, DivDiffError> {
    check_knots(knots, 2)?;
    Ok(VarsiScratch::new().eval(y, knots, TruncKind::PlusDensity))
}

/// `Δ[(· - y)_-^n : a_0, …, a_n]`: the full-degree minus truncated power
/// difference. Returns 0 when all knots are `≥ y` and 1 when all are `< y`.
pub fn varsi_minus(y: f64, knots: &[f64]) -> Result<f64, DivDiffError> {
    check_knots(knots, 2)?;
    Ok(VarsiScratch::new().eval(y, knots, TruncKind::Minus))
}

/// Full-degree plus difference `Δ[(· - y)_+^n]`; internal complement of
/// [`varsi_minus`], used by the plus-form CDF.
pub(crate) fn varsi_plus_full(y: f64, knots: &[f64]) -> Result<f64, DivDiffError> {
    check_knots(knots, 2)?;
    Ok(VarsiScratch::new().eval(y, knots, TruncKind::PlusFull))
}

/// The B-spline `M(t | a_0, …, a_n) = n · Δ[(· - t)_+^{n-1} : a_0, …, a_n]`:
/// a nonnegative bump supported on the knot hull with unit integral.
pub fn bspline(t: f64, knots: &[f64]) -> Result<f64, DivDiffError> {
    check_knots(knots, 2)?;
    let n = (knots.len() - 1) as f64;
    Ok(n * VarsiScratch::new().eval(t, knots, TruncKind::PlusDensity))
}

/// Which initialization a [`VarsiTableau`] was built with.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TableauVariant {
    /// Entries `Δ[(· - y)_+^{k+l-2} : b_1..b_k, c_1..c_l]`.
    Plus,
    /// Entries `Δ[(· - y)_-^{k+l-1} : b_1..b_k, c_1..c_l]`.
    Minus,
}

/// A fully retained recurrence tableau, for inspection and tests. The hot
/// paths use [`VarsiScratch`] instead; values agree.
#[derive(Clone, Debug)]
pub struct VarsiTableau {
    y: f64,
    b: Vec<f64>,
    c: Vec<f64>,
    alpha: Vec<f64>,
    variant: TableauVariant,
}

impl VarsiTableau {
    /// Partitions and sorts the knots around `y` and fills the whole grid.
    /// For the plus variant every entry is checked nonnegative.
    pub fn build(y: f64, knots: &[f64], variant: TableauVariant) -> Result<Self, DivDiffError> {
        check_knots(knots, 2)?;
        let mut b: Vec<f64> = knots.iter().copied().filter(|&a| a < y).collect();
        let mut c: Vec<f64> = knots.iter().copied().filter(|&a| a >= y).collect();
        b.sort_by(f64::total_cmp);
        c.sort_by(f64::total_cmp);
        let (r, s) = (b.len(), c.len());
        let cols = s + 1;
        let mut alpha = vec![0.0; (r + 1) * cols];
        match variant {
            TableauVariant::Plus => {}
            TableauVariant::Minus => {
                for k in 1..=r {
                    alpha[k * cols] = 1.0;
                }
            }
        }
        for k in 1..=r {
            for l in 1..=s {
                let (bk, cl) = (b[k - 1], c[l - 1]);
                let v = if variant == TableauVariant::Plus && k == 1 && l == 1 {
                    1.0 / (cl - bk)
                } else {
                    ((cl - y) * alpha[(k - 1) * cols + l] + (y - bk) * alpha[k * cols + l - 1])
                        / (cl - bk)
                };
                if variant == TableauVariant::Plus {
                    assert!(v >= 0.0, "plus tableau entry alpha[{k}][{l}] = {v} < 0");
                }
                alpha[k * cols + l] = v;
            }
        }
        Ok(VarsiTableau {
            y,
            b,
            c,
            alpha,
            variant,
        })
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// Knots strictly below `y`, sorted.
    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Knots `≥ y`, sorted.
    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn r(&self) -> usize {
        self.b.len()
    }

    pub fn s(&self) -> usize {
        self.c.len()
    }

    pub fn variant(&self) -> TableauVariant {
        self.variant
    }

    pub fn alpha(&self, k: usize, l: usize) -> f64 {
        self.alpha[k * (self.s() + 1) + l]
    }

    /// The corner value `alpha[r][s]`.
    pub fn corner(&self) -> f64 {
        self.alpha(self.r(), self.s())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::divdiff_distinct;
    use proptest::prelude::*;
    use rand_chacha::rand_core::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unif(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * ((rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0))
    }

    pub(crate) fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
        let h = (hi - lo) / panels as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..panels {
            let x = lo + i as f64 * h;
            acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        // odd panel counts are rounded up by the caller; assume even here
        acc * h / 3.0
    }

    #[test]
    fn recursive_on_monomials() {
        assert_eq!(divdiff_recursive(|x| x * x, &[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(divdiff_recursive(|x| x * x, &[0.0, 1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(
            divdiff_recursive(|x| x * x * x, &[0.0, 1.0, 2.0]).unwrap(),
            3.0
        );
    }

    #[test]
    fn recursive_rejects_coincident_knots() {
        assert!(matches!(
            divdiff_recursive(|x| x.exp(), &[0.0, 1.0, 1.0]),
            Err(DivDiffError::CoincidentKnots)
        ));
    }

    #[test]
    fn poly_recursive_handles_repeats() {
        // p(x) = (x - 0.3)^2 = 0.09 - 0.6 x + x^2 over knots (0, 1, 1, 1)
        let p = [0.09, -0.6, 1.0];
        let got = divdiff_recursive_poly(&p, &[0.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((got - 0.09).abs() < 1e-14);

        // all-equal knots: Δ = p^{(k)}(a)/k!
        let cubic = [0.0, 0.0, 0.0, 1.0];
        let got = divdiff_recursive_poly(&cubic, &[0.5, 0.5, 0.5]).unwrap();
        assert!((got - 3.0 * 0.5 / 1.0).abs() < 1e-14); // p''(0.5)/2! = 3·0.5
    }

    #[test]
    fn poly_recursive_matches_plain_on_distinct_knots() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let deg = 1 + (rng.next_u64() % 5) as usize;
            let coeffs: Vec<f64> = (0..=deg).map(|_| unif(&mut rng, -2.0, 2.0)).collect();
            let m = 1 + (rng.next_u64() % 5) as usize;
            let knots: Vec<f64> = (0..=m).map(|i| i as f64 + unif(&mut rng, 0.0, 0.5)).collect();
            let horner =
                |x: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
            let a = divdiff_recursive(horner, &knots).unwrap();
            let b = divdiff_recursive_poly(&coeffs, &knots).unwrap();
            assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn power_sym_examples() {
        assert_eq!(divdiff_power_sym(3, &[0.0, 1.0, 2.0]), 3.0);
        assert_eq!(divdiff_power_sym(2, &[0.0, 0.5, 1.0]), 1.0);
        assert!((divdiff_power_sym(4, &[0.0, 0.5, 1.0]) - 1.75).abs() < 1e-15);
    }

    #[test]
    fn power_sym_annihilation_is_exact() {
        let knots = [0.3, -0.2, 0.9, 0.1, 0.5];
        for d in 0..4 {
            assert_eq!(divdiff_power_sym(d, &knots), 0.0);
        }
        assert_eq!(divdiff_power_sym(4, &knots), 1.0);
    }

    #[test]
    fn power_sym_matches_multiset_enumeration() {
        // brute force over 0 ≤ i_1 ≤ … ≤ i_r ≤ n
        fn brute(r: usize, knots: &[f64]) -> f64 {
            fn rec(r: usize, start: usize, prod: f64, knots: &[f64], acc: &mut f64) {
                if r == 0 {
                    *acc += prod;
                    return;
                }
                for i in start..knots.len() {
                    rec(r - 1, i, prod * knots[i], knots, acc);
                }
            }
            let mut acc = 0.0;
            rec(r, 0, 1.0, knots, &mut acc);
            acc
        }
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..30 {
            let m = 1 + (rng.next_u64() % 4) as usize;
            let knots: Vec<f64> = (0..=m).map(|_| unif(&mut rng, -1.0, 1.0)).collect();
            for r in 0..=4usize {
                let got = divdiff_power_sym(m + r, &knots);
                let want = brute(r, &knots);
                assert!((got - want).abs() < 1e-12 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn power_sym_is_recursive_divdiff_of_power() {
        let knots = [0.1, 0.4, 0.75, 0.9];
        for degree in 3..8usize {
            let a = divdiff_power_sym(degree, &knots);
            let b = divdiff_recursive(|x| x.powi(degree as i32), &knots).unwrap();
            assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn varsi_plus_examples() {
        assert!((varsi_plus(0.5, &[0.0, 0.5, 1.0]).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(varsi_plus(2.0, &[0.0, 0.5, 1.0]).unwrap(), 0.0);
        assert_eq!(varsi_plus(-1.0, &[0.0, 0.5, 1.0]).unwrap(), 0.0);
        // repeated knots: Δ[(· - 0.3)^2_+ : 0, 1, 1, 1] by hand recursion
        let got = varsi_plus(0.3, &[0.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((got - 0.09).abs() < 1e-14, "got {got}");
        // and against the polynomial oracle: all knots above y, so the
        // truncation is inactive on the hull
        let oracle = divdiff_recursive_poly(&[0.09, -0.6, 1.0], &[0.0, 1.0, 1.0, 1.0]).unwrap();
        assert!((got - oracle).abs() < 1e-14);
        // distinct-knot quotient value 2/3
        let got = varsi_plus(0.5, &[0.0, 0.25, 0.75, 1.0]).unwrap();
        assert!((got - 2.0 / 3.0).abs() < 1e-14, "got {got}");
    }

    #[test]
    fn varsi_minus_examples() {
        assert_eq!(varsi_minus(2.0, &[0.0, 0.5, 1.0]).unwrap(), 1.0);
        assert_eq!(varsi_minus(-1.0, &[0.0, 0.5, 1.0]).unwrap(), 0.0);
        // complementarity at the same point and knots
        let plus_full = varsi_plus_full(0.5, &[0.0, 0.5, 1.0]).unwrap();
        let minus = varsi_minus(0.5, &[0.0, 0.5, 1.0]).unwrap();
        assert!((plus_full + minus - 1.0).abs() < 1e-14);
        assert!((minus - 0.5).abs() < 1e-14);
    }

    #[test]
    fn too_few_knots_is_an_error() {
        assert!(matches!(
            varsi_plus(0.5, &[1.0]),
            Err(DivDiffError::TooFewKnots(1))
        ));
        assert!(matches!(
            varsi_minus(0.5, &[]),
            Err(DivDiffError::EmptyKnots)
        ));
        assert!(matches!(
            bspline(0.5, &[f64::NAN, 1.0]),
            Err(DivDiffError::NonFiniteKnot { index: 0, .. })
        ));
    }

    #[test]
    fn bspline_examples() {
        assert!((bspline(0.5, &[0.0, 0.5, 1.0]).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(bspline(-1.0, &[0.0, 0.25, 1.0]).unwrap(), 0.0);
        assert_eq!(bspline(0.25, &[0.0, 1.0]).unwrap(), 1.0);
    }

    #[test]
    fn bspline_integrates_to_one() {
        let cases: &[&[f64]] = &[
            &[0.0, 1.0],
            &[0.0, 0.5, 1.0],
            &[0.0, 0.1, 0.1, 0.9],
            &[-0.5, 0.2, 0.2, 0.2, 1.5],
            &[0.0, 0.3, 0.35, 0.4, 0.8, 1.0],
        ];
        for knots in cases {
            let lo = knots.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = knots.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mass = simpson(|t| bspline(t, knots).unwrap(), lo, hi, 10_000);
            assert!((mass - 1.0).abs() < 1e-6, "knots {knots:?} mass {mass}");
        }
    }

    #[test]
    fn peano_representation_cross_check() {
        // (1/n!) ∫ g^{(n)}(t) M(t | knots) dt = Δ[g : knots] for g = x^{n+1}
        let cases: &[&[f64]] = &[&[0.0, 0.4, 1.0], &[0.1, 0.3, 0.6, 0.9]];
        for knots in cases {
            let n = knots.len() - 1;
            let lo = knots.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = knots.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            // g^{(n)}(t) for g = x^{n+1} is (n+1)! t
            let fact_n: f64 = (1..=n).map(|k| k as f64).product();
            let integral = simpson(
                |t| (fact_n * (n as f64 + 1.0)) * t * bspline(t, knots).unwrap(),
                lo,
                hi,
                10_000,
            ) / fact_n;
            let direct = divdiff_power_sym(n + 1, knots);
            assert!((integral - direct).abs() < 1e-6, "knots {knots:?}");
        }
    }

    #[test]
    fn hermite_genocchi_cross_check() {
        // Δ[g : a_0, a_1, a_2] = ∫_{1 ≥ x1 ≥ x2 ≥ 0} g''(a_0 + (a_1-a_0)x1 + (a_2-a_1)x2)
        let knots = [0.2, 0.9, 0.5];
        let g_second = |x: f64| 12.0 * x * x; // g = x^4
        let m = 400;
        let mut acc = 0.0;
        let h = 1.0 / m as f64;
        for i in 0..m {
            let x1 = (i as f64 + 0.5) * h;
            for j in 0..m {
                let x2 = (j as f64 + 0.5) * h;
                if x2 <= x1 {
                    acc += g_second(knots[0] + (knots[1] - knots[0]) * x1 + (knots[2] - knots[1]) * x2);
                }
            }
        }
        acc *= h * h;
        let direct = divdiff_power_sym(4, &knots);
        assert!((acc - direct).abs() < 2e-3, "quadrature {acc} direct {direct}");
    }

    #[test]
    fn oracle_equivalence_on_distinct_knots() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for trial in 0..200usize {
            let n = 1 + trial % 8;
            let mut knots: Vec<f64> = (0..=n).map(|_| unif(&mut rng, -1.0, 1.0)).collect();
            knots.sort_by(f64::total_cmp);
            knots.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
            if knots.len() < 2 {
                continue;
            }
            let y = unif(&mut rng, -1.1, 1.1);
            if knots.iter().any(|&a| (a - y).abs() < 1e-9) {
                continue;
            }
            let m = knots.len() - 1;
            let quot = divdiff_distinct(
                |x| {
                    let d = x - y;
                    if d > 0.0 {
                        d.powi(m as i32 - 1)
                    } else {
                        0.0
                    }
                },
                &knots,
            )
            .unwrap();
            let got = varsi_plus(y, &knots).unwrap();
            assert!(
                (got - quot).abs() <= 1e-10 * (1.0 + quot.abs()),
                "n={m} y={y} got={got} quot={quot}"
            );
        }
    }

    #[test]
    fn tableau_positivity_and_corner() {
        let t = VarsiTableau::build(0.5, &[0.0, 0.25, 0.75, 1.0], TableauVariant::Plus).unwrap();
        assert_eq!(t.r(), 2);
        assert_eq!(t.s(), 2);
        for k in 0..=t.r() {
            for l in 0..=t.s() {
                assert!(t.alpha(k, l) >= 0.0);
            }
        }
        assert!((t.corner() - 2.0 / 3.0).abs() < 1e-14);
        assert_eq!(
            t.corner(),
            varsi_plus(0.5, &[0.0, 0.25, 0.75, 1.0]).unwrap()
        );
        let tm = VarsiTableau::build(0.5, &[0.0, 0.25, 0.75, 1.0], TableauVariant::Minus).unwrap();
        assert_eq!(tm.corner(), varsi_minus(0.5, &[0.0, 0.25, 0.75, 1.0]).unwrap());
    }

    proptest! {
        #[test]
        fn knot_order_is_irrelevant(
            knots in proptest::collection::vec(-1.0f64..1.0, 2..9),
            y in -1.2f64..1.2,
            seed in 0u64..1000,
        ) {
            let mut shuffled = knots.clone();
            // cheap deterministic shuffle
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(1);
            for i in (1..shuffled.len()).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                shuffled.swap(i, j);
            }
            let a = varsi_plus(y, &knots).unwrap();
            let b = varsi_plus(y, &shuffled).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
            let a = varsi_minus(y, &knots).unwrap();
            let b = varsi_minus(y, &shuffled).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
        }

        #[test]
        fn plus_minus_complementarity(
            knots in proptest::collection::vec(-1.0f64..1.0, 2..9),
            y in -1.2f64..1.2,
        ) {
            prop_assume!(knots.iter().all(|&a| (a - y).abs() > 1e-7));
            let plus = varsi_plus_full(y, &knots).unwrap();
            let minus = varsi_minus(y, &knots).unwrap();
            prop_assert!((plus + minus - 1.0).abs() <= 1e-10);
        }
    }
}
