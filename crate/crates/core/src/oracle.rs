//! Independent ground truth: seeded Monte Carlo simulation, brute-force
//! enumerations, quotient-formula divided differences, and classical closed
//! forms. Everything here exists to validate the exact routines, not to
//! replace them.
//!
//! Sampling uses ChaCha8, a counter-based stream cipher RNG: the seed fully
//! determines the stream, and sample `i` always reads the fixed word range
//! `[2ni, 2n(i+1))`, so batches are bit-identical regardless of how the work
//! is chunked across threads.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::capacity::Capacity;
use crate::distribution::{cdf_batch, DistributionError};
use crate::divdiff::DivDiffError;
use crate::lovasz::eval_sorted_unchecked;
use crate::numeric::{binomial, factorial};
use crate::par::map_indexed;

/// Cap on Monte Carlo batch size.
pub const MAX_SAMPLES: usize = 100_000_000;

/// Caps for the literal chain-moment enumeration.
pub const BRUTE_MAX_PLAYERS: usize = 4;
pub const BRUTE_MAX_ORDER: usize = 3;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("empty sample batch")]
    EmptyBatch,
    #[error("sample count {0} exceeds cap {MAX_SAMPLES}")]
    SampleCap(usize),
    #[error("brute-force chain moment limited to n <= {BRUTE_MAX_PLAYERS}, r in 1..={BRUTE_MAX_ORDER}")]
    BruteCap,
    #[error("chain knots are not distinct for every permutation")]
    RepeatedChainKnots,
    #[error(transparent)]
    Distribution(#[from] DistributionError),
}

/// Sorted realizations of `Y = h(X)`, fully determined by `(capacity, count,
/// seed)`.
#[derive(Clone, Debug)]
pub struct SampleBatch {
    seed: u64,
    values: Vec<f64>,
}

impl SampleBatch {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Realizations in ascending order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn u64_to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / 9007199254740992.0)
}

/// Draws `count` i.i.d. uniform points on the cube, evaluates `h`, and
/// returns the sorted batch. Chunks are generated at fixed stream offsets,
/// so the result does not depend on the number of workers.
pub fn sample(v: &Capacity, count: usize, seed: u64) -> Result<SampleBatch, OracleError> {
    if count > MAX_SAMPLES {
        return Err(OracleError::SampleCap(count));
    }
    let n = v.n();
    let words_per_sample = 2 * n as u128;
    const CHUNK: usize = 1 << 14;
    let chunks = count.div_ceil(CHUNK).max(1);
    let parts: Vec<Vec<f64>> = map_indexed(chunks, |chunk| {
        let start = chunk * CHUNK;
        let len = CHUNK.min(count - start);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos(start as u128 * words_per_sample);
        let mut coords = vec![0.0f64; n];
        let mut idx = vec![0usize; n];
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            for c in coords.iter_mut() {
                *c = u64_to_unit(rng.next_u64());
            }
            out.push(eval_sorted_unchecked(v, &coords, &mut idx));
        }
        out
    });
    let mut values: Vec<f64> = parts.into_iter().flatten().collect();
    values.sort_by(f64::total_cmp);
    Ok(SampleBatch { seed, values })
}

/// Two-sided Kolmogorov-Smirnov distance between the batch's empirical CDF
/// and the exact CDF of the capacity.
pub fn ks_statistic(batch: &SampleBatch, v: &Capacity) -> Result<f64, OracleError> {
    if batch.is_empty() {
        return Err(OracleError::EmptyBatch);
    }
    let n = batch.len() as f64;
    let exact = cdf_batch(v, batch.values())?;
    let mut sup: f64 = 0.0;
    for (i, &f) in exact.iter().enumerate() {
        let below = f - i as f64 / n;
        let above = (i + 1) as f64 / n - f;
        sup = sup.max(below).max(above);
    }
    Ok(sup)
}

/// The 99.9%-confidence Kolmogorov critical value `1.95 / sqrt(N)`.
pub fn ks_critical_value(count: usize) -> f64 {
    1.95 / (count as f64).sqrt()
}

/// Literal nested-chain sum for `E[Y^r]`: every tower
/// `A_r ⊆ … ⊆ A_1 ⊆ A_0 = [n]` contributes `Π_i v(A_i)/C(|A_{i-1}|,|A_i|)`.
/// Exponential cost, hence the tight caps; reference only.
pub fn brute_chain_moment(v: &Capacity, r: usize) -> Result<f64, OracleError> {
    let n = v.n();
    if n > BRUTE_MAX_PLAYERS || r < 1 || r > BRUTE_MAX_ORDER {
        return Err(OracleError::BruteCap);
    }
    fn rec(values: &[f64], level: usize, sup: usize, prod: f64, acc: &mut f64) {
        if level == 0 {
            *acc += prod;
            return;
        }
        let csup = (sup as u32).count_ones() as usize;
        let mut b = sup;
        loop {
            let cb = (b as u32).count_ones() as usize;
            rec(
                values,
                level - 1,
                b,
                prod * values[b] / binomial(csup, cb),
                acc,
            );
            if b == 0 {
                break;
            }
            b = (b - 1) & sup;
        }
    }
    let mut acc = 0.0;
    rec(v.values(), r, v.num_subsets() - 1, 1.0, &mut acc);
    Ok(acc / binomial(n + r, r))
}

/// Seeded random capacity with entries uniform on `[-1, 1]` (empty set 0);
/// the standard validation corpus generator.
pub fn random_capacity(n: usize, seed: u64) -> Capacity {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<f64> = (0..1usize << n)
        .map(|mask| {
            if mask == 0 {
                0.0
            } else {
                2.0 * u64_to_unit(rng.next_u64()) - 1.0
            }
        })
        .collect();
    Capacity::new(n, values).expect("generated table is complete and finite")
}

/// The explicit quotient formula for divided differences over distinct
/// knots: `Σ_i g(a_i) / Π_{j≠i}(a_i - a_j)`. Cancellation-prone for
/// clustered knots; test oracle only.
pub fn divdiff_distinct(
    g: impl Fn(f64) -> f64,
    knots: &[f64],
) -> Result<f64, DivDiffError> {
    let mut acc = 0.0;
    for (i, &ai) in knots.iter().enumerate() {
        let mut denom = 1.0;
        for (j, &aj) in knots.iter().enumerate() {
            if i != j {
                if ai == aj {
                    return Err(DivDiffError::CoincidentKnots);
                }
                denom *= ai - aj;
            }
        }
        acc += g(ai) / denom;
    }
    Ok(acc)
}

/// Plus-form CDF through the distinct-knot quotient formula,
/// `F(y) = 1 - (1/n!) Σ_σ Σ_i (h_i^σ - y)^n_+ / Π_{j≠i}(h_i^σ - h_j^σ)`.
/// Requires all chain values distinct for every permutation.
pub fn cdf_distinct_formula(v: &Capacity, y: f64) -> Result<f64, OracleError> {
    let n = v.n();
    if n > crate::distribution::MAX_ENUM_PLAYERS {
        return Err(DistributionError::PlayerCountCap {
            n,
            cap: crate::distribution::MAX_ENUM_PLAYERS,
        }
        .into());
    }
    let mut sum = 0.0;
    let mut bad = false;
    crate::distribution::for_each_chain(v.values(), n, &mut |knots| {
        for (i, &hi) in knots.iter().enumerate() {
            let up = hi - y;
            if up <= 0.0 {
                continue;
            }
            let mut denom = 1.0;
            for (j, &hj) in knots.iter().enumerate() {
                if i != j {
                    if hi == hj {
                        bad = true;
                        return;
                    }
                    denom *= hi - hj;
                }
            }
            sum += up.powi(n as i32) / denom;
        }
    });
    if bad {
        return Err(OracleError::RepeatedChainKnots);
    }
    Ok(1.0 - sum / factorial(n))
}

/// CDF of the mean of `n` independent uniforms (Bates), by the scaled
/// Irwin-Hall alternating sum.
pub fn bates_cdf(n: usize, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let x = n as f64 * y;
    let mut acc = 0.0;
    for j in 0..=(x.floor() as usize) {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(n, j) * (x - j as f64).powi(n as i32);
    }
    acc / factorial(n)
}

/// CDF of the k-th smallest of `n` uniforms: the regularized incomplete
/// Beta `I_y(k, n - k + 1)`, written as the exact binomial tail.
pub fn beta_order_statistic_cdf(n: usize, k: usize, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    let mut acc = 0.0;
    for j in k..=n {
        acc += binomial(n, j) * y.powi(j as i32) * (1.0 - y).powi((n - j) as i32);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{Capacity, SubsetIndex};
    use crate::distribution::raw_moment;
    use crate::testfix::demo3;

    #[test]
    fn sampling_is_deterministic() {
        let v = demo3();
        let a = sample(&v, 10_000, 7).unwrap();
        let b = sample(&v, 10_000, 7).unwrap();
        assert_eq!(a.values(), b.values());
        let c = sample(&v, 10_000, 8).unwrap();
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn chunking_does_not_shift_the_stream() {
        // a prefix of a larger batch equals the smaller batch, element-wise
        // before sorting; compare through order statistics of the overlap
        let v = demo3();
        let small = sample(&v, 1 << 14, 99).unwrap(); // exactly one chunk
        let large = sample(&v, (1 << 14) + 123, 99).unwrap();
        // every small value must appear in the large batch
        for x in small.values().iter().take(50) {
            assert!(large.values().binary_search_by(|p| p.total_cmp(x)).is_ok());
        }
    }

    #[test]
    fn sample_mean_of_min_polynomial() {
        for n in 2..=4usize {
            let v = Capacity::min_polynomial(n).unwrap();
            let batch = sample(&v, 100_000, 1000 + n as u64).unwrap();
            let mean: f64 = batch.values().iter().sum::<f64>() / batch.len() as f64;
            let want = 1.0 / (n as f64 + 1.0);
            // Var(min) = n/((n+1)^2 (n+2)); 3 sigma / sqrt(N) band
            let sigma = (n as f64 / ((n as f64 + 1.0).powi(2) * (n as f64 + 2.0))).sqrt();
            assert!(
                (mean - want).abs() < 3.0 * sigma / (batch.len() as f64).sqrt(),
                "n={n} mean={mean}"
            );
        }
    }

    #[test]
    fn sample_values_stay_in_hull() {
        let v = random_capacity(4, 4242);
        let (lo, hi) = v.value_range();
        let batch = sample(&v, 20_000, 5).unwrap();
        assert!(batch.values().iter().all(|&y| y >= lo - 1e-12 && y <= hi + 1e-12));
    }

    #[test]
    fn sample_count_cap() {
        let v = demo3();
        assert!(matches!(
            sample(&v, MAX_SAMPLES + 1, 0),
            Err(OracleError::SampleCap(_))
        ));
    }

    #[test]
    fn ks_accepts_own_samples_and_rejects_mismatch() {
        let v = demo3();
        let batch = sample(&v, 100_000, 2024).unwrap();
        let ks = ks_statistic(&batch, &v).unwrap();
        assert!(ks < ks_critical_value(batch.len()), "KS = {ks}");

        // deliberately break the capacity: bump v([n]) by 0.3
        let mut values = v.values().to_vec();
        let last = values.len() - 1;
        values[last] += 0.3;
        let wrong = Capacity::new(3, values).unwrap();
        let ks = ks_statistic(&batch, &wrong).unwrap();
        assert!(ks > 0.05, "mismatch KS = {ks}");
    }

    #[test]
    fn ks_rejects_empty_batches() {
        let v = demo3();
        let empty = sample(&v, 0, 1).unwrap();
        assert!(matches!(
            ks_statistic(&empty, &v),
            Err(OracleError::EmptyBatch)
        ));
    }

    #[test]
    fn brute_chain_moment_on_demo() {
        let v = demo3();
        let m1 = brute_chain_moment(&v, 1).unwrap();
        assert!((m1 - 73.0 / 120.0).abs() < 1e-14);
        assert!((m1 - raw_moment(&v, 1).unwrap()).abs() < 1e-14);
        let m2 = brute_chain_moment(&v, 2).unwrap();
        assert!((m2 - raw_moment(&v, 2).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn brute_chain_moment_of_zero_capacity() {
        let zero = Capacity::from_fn(3, |_| 0.0).unwrap();
        for r in 1..=3 {
            assert_eq!(brute_chain_moment(&zero, r).unwrap(), 0.0);
        }
    }

    #[test]
    fn brute_chain_moment_against_quadrature() {
        // E[(0.3 U1 + 0.7 U2)^2] by 2-D midpoint quadrature
        let v = Capacity::additive(&[0.3, 0.7]).unwrap();
        let m = 2000usize;
        let h = 1.0 / m as f64;
        let mut acc = 0.0;
        for i in 0..m {
            let x = (i as f64 + 0.5) * h;
            for j in 0..m {
                let y = (j as f64 + 0.5) * h;
                acc += (0.3 * x + 0.7 * y).powi(2);
            }
        }
        acc *= h * h;
        let brute = brute_chain_moment(&v, 2).unwrap();
        assert!((brute - acc).abs() < 1e-6, "brute {brute} quad {acc}");
    }

    #[test]
    fn brute_caps() {
        let v = random_capacity(5, 1);
        assert!(matches!(brute_chain_moment(&v, 1), Err(OracleError::BruteCap)));
        let v = random_capacity(3, 1);
        assert!(matches!(brute_chain_moment(&v, 4), Err(OracleError::BruteCap)));
    }

    #[test]
    fn quotient_formula_matches_recursive() {
        let knots = [0.0, 0.3, 0.7, 1.1];
        let g = |x: f64| (x * 1.7 - 0.3).powi(3);
        let a = divdiff_distinct(g, &knots).unwrap();
        let b = crate::divdiff::divdiff_recursive(g, &knots).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(matches!(
            divdiff_distinct(g, &[0.0, 0.5, 0.5]),
            Err(DivDiffError::CoincidentKnots)
        ));
    }

    #[test]
    fn distinct_formula_cdf_matches_varsi_path() {
        for seed in 0..6u64 {
            let n = 2 + (seed as usize) % 4;
            let v = random_capacity(n, 91 + seed);
            for j in 0..=20 {
                let y = -1.1 + 2.2 * j as f64 / 20.0;
                let a = cdf_distinct_formula(&v, y).unwrap();
                let b = crate::distribution::cdf_general(&v, y).unwrap();
                assert!((a - b).abs() < 1e-8, "n={n} y={y}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn distinct_formula_rejects_repeated_chain_knots() {
        let v = Capacity::max_polynomial(3).unwrap();
        assert!(matches!(
            cdf_distinct_formula(&v, 0.5),
            Err(OracleError::RepeatedChainKnots)
        ));
    }

    #[test]
    fn closed_forms_sanity() {
        // Bates(1) is the uniform CDF
        for j in 0..=10 {
            let y = j as f64 / 10.0;
            assert!((bates_cdf(1, y) - y).abs() < 1e-12);
        }
        // Bates(2) below one half is 2 y^2
        assert!((bates_cdf(2, 0.25) - 0.125).abs() < 1e-12);
        // first order statistic of n: 1 - (1-y)^n
        for n in 1..=6 {
            let y = 0.37;
            let want = 1.0 - (1.0 - y).powi(n as i32);
            assert!((beta_order_statistic_cdf(n, 1, y) - want).abs() < 1e-12);
        }
        // symmetry: I_y(k, n-k+1) + I_{1-y}(n-k+1, k) = 1
        for k in 1..=5usize {
            let (n, y) = (5, 0.3);
            let a = beta_order_statistic_cdf(n, k, y);
            let b = beta_order_statistic_cdf(n, n - k + 1, 1.0 - y);
            assert!((a + b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn empirical_moments_converge_at_monte_carlo_rate() {
        let v = demo3();
        let exact = raw_moment(&v, 1).unwrap();
        let rms_error = |count: usize, base_seed: u64| -> f64 {
            let mut acc = 0.0;
            let reps = 24;
            for s in 0..reps {
                let batch = sample(&v, count, base_seed + s).unwrap();
                let mean: f64 = batch.values().iter().sum::<f64>() / count as f64;
                acc += (mean - exact).powi(2);
            }
            (acc / reps as f64).sqrt()
        };
        let e4 = rms_error(10_000, 100);
        let e6 = rms_error(1_000_000, 200);
        let ratio = e4 / e6;
        assert!(
            ratio > 10.0 / 3.0 && ratio < 30.0,
            "error ratio {ratio} (e4 = {e4}, e6 = {e6})"
        );
    }

    #[test]
    fn random_capacity_is_grounded_and_seed_stable() {
        let a = random_capacity(5, 77);
        let b = random_capacity(5, 77);
        assert_eq!(a.values(), b.values());
        assert_eq!(a.value(SubsetIndex::EMPTY), 0.0);
        assert!(a.values().iter().all(|&x| (-1.0..=1.0).contains(&x)));
    }
}
