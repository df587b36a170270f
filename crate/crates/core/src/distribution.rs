//! Exact CDF, density, and moments of `Y = h(X)` for `X` uniform on the
//! cube.
//!
//! The general path sums one truncated-power divided difference per
//! permutation of `[n]`, walking the `n!` maximal chains of the subset
//! lattice depth-first so each knot profile is updated incrementally. For
//! cardinality-based capacities the knots do not depend on the permutation
//! and a single divided difference per query suffices, which extends the
//! reachable `n` from 10 to 20.
//!
//! Permutation sums are split into fixed blocks (one block per ordered pair
//! of leading players) that are reduced in block order, so results are
//! bit-identical regardless of thread count.

use thiserror::Error;

use crate::capacity::{classify, Capacity};
use crate::divdiff::{TruncKind, VarsiScratch};
use crate::numeric::{factorial, pascal_table};
use crate::par::map_indexed;

/// Cap on `n` for anything that enumerates all `n!` permutations.
pub const MAX_ENUM_PLAYERS: usize = 10;

/// Cap on the moment order `r`.
pub const MAX_MOMENT_ORDER: usize = 12;

/// Cap on the number of grid / batch evaluation points.
pub const MAX_GRID_POINTS: usize = 100_000;

#[derive(Debug, Error)]
pub enum DistributionError {
    #[error("player count {n} exceeds the permutation-sum cap {cap}")]
    PlayerCountCap { n: usize, cap: usize },
    #[error("moment order {r} outside 1..={cap}")]
    MomentOrderCap { r: usize, cap: usize },
    #[error("capacity is not cardinality-based")]
    NotCardinalityBased,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

fn clamp01(x: f64) -> f64 {
    x.clamp(0.0, 1.0)
}

fn check_enum_cap(n: usize) -> Result<(), DistributionError> {
    if n > MAX_ENUM_PLAYERS {
        return Err(DistributionError::PlayerCountCap {
            n,
            cap: MAX_ENUM_PLAYERS,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// permutation-chain machinery

fn chain_blocks(n: usize) -> usize {
    if n < 2 {
        1
    } else {
        n * (n - 1)
    }
}

fn dfs_chains(
    values: &[f64],
    n: usize,
    depth: usize,
    mask: usize,
    knots: &mut [f64; 21],
    f: &mut impl FnMut(&[f64]),
) {
    if depth == n {
        f(&knots[..=n]);
        return;
    }
    for p in 0..n {
        let bit = 1usize << p;
        if mask & bit == 0 {
            let next = mask | bit;
            knots[depth + 1] = values[next];
            dfs_chains(values, n, depth + 1, next, knots, f);
        }
    }
}

/// Runs `f` over the knot profile of every chain whose first two players
/// match `block`; blocks are ordered lexicographically by that pair.
fn for_each_chain_in_block(values: &[f64], n: usize, block: usize, f: &mut impl FnMut(&[f64])) {
    let mut knots = [0.0f64; 21];
    if n < 2 {
        knots[1] = values[1];
        f(&knots[..=n]);
        return;
    }
    let first = block / (n - 1);
    let j = block % (n - 1);
    let second = if j < first { j } else { j + 1 };
    let m1 = 1usize << first;
    let m2 = m1 | (1usize << second);
    knots[1] = values[m1];
    knots[2] = values[m2];
    dfs_chains(values, n, 2, m2, &mut knots, f);
}

/// Serial walk over all `n!` chains, for reference paths.
pub(crate) fn for_each_chain(values: &[f64], n: usize, f: &mut impl FnMut(&[f64])) {
    for block in 0..chain_blocks(n) {
        for_each_chain_in_block(values, n, block, f);
    }
}

/// `Σ_σ Δ[(· - y)^·_± : h_0^σ..h_n^σ]` at every query point.
fn chain_sums(v: &Capacity, ys: &[f64], kind: TruncKind) -> Vec<f64> {
    let n = v.n();
    let values = v.values();
    let partials = map_indexed(chain_blocks(n), |block| {
        let mut acc = vec![0.0; ys.len()];
        let mut scratch = VarsiScratch::new();
        for_each_chain_in_block(values, n, block, &mut |knots| {
            for (slot, &y) in acc.iter_mut().zip(ys) {
                *slot += scratch.eval(y, knots, kind);
            }
        });
        acc
    });
    reduce_in_order(partials, ys.len())
}

/// One pass computing both the full-degree plus sums (CDF) and the
/// density-degree plus sums (PDF).
fn chain_sums_cdf_pdf(v: &Capacity, ys: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = v.n();
    let values = v.values();
    let m = ys.len();
    let partials = map_indexed(chain_blocks(n), |block| {
        let mut acc = vec![0.0; 2 * m];
        let mut scratch = VarsiScratch::new();
        for_each_chain_in_block(values, n, block, &mut |knots| {
            for (j, &y) in ys.iter().enumerate() {
                let (full, dens) = scratch.eval_cdf_pdf(y, knots);
                acc[2 * j] += full;
                acc[2 * j + 1] += dens;
            }
        });
        acc
    });
    let merged = reduce_in_order(partials, 2 * m);
    let mut cdf = Vec::with_capacity(m);
    let mut pdf = Vec::with_capacity(m);
    for j in 0..m {
        cdf.push(merged[2 * j]);
        pdf.push(merged[2 * j + 1]);
    }
    (cdf, pdf)
}

fn reduce_in_order(partials: Vec<Vec<f64>>, m: usize) -> Vec<f64> {
    let mut total = vec![0.0; m];
    for p in &partials {
        for (t, x) in total.iter_mut().zip(p) {
            *t += x;
        }
    }
    total
}

fn symmetric_knots(v: &Capacity) -> Vec<f64> {
    let n = v.n();
    (0..=n)
        .map(|i| v.values()[(1usize << i) - 1])
        .collect()
}

// ---------------------------------------------------------------------------
// CDF and PDF

/// `F(y) = P[Y ≤ y]`. Dispatches to the single-divided-difference path when
/// the capacity is cardinality-based, otherwise to the `n!` plus-form sum.
pub fn cdf(v: &Capacity, y: f64) -> Result<f64, DistributionError> {
    if classify(v).is_cardinality_based {
        cdf_symmetric(v, y)
    } else {
        cdf_general(v, y)
    }
}

/// Plus-form CDF over all permutations:
/// `F(y) = 1 - (1/n!) Σ_σ Δ[(· - y)^n_+ : h_0^σ..h_n^σ]`.
pub fn cdf_general(v: &Capacity, y: f64) -> Result<f64, DistributionError> {
    check_enum_cap(v.n())?;
    let sum = chain_sums(v, &[y], TruncKind::PlusFull)[0];
    Ok(clamp01(1.0 - sum / factorial(v.n())))
}

/// Minus-form CDF, an independent second path:
/// `F(y) = (1/n!) Σ_σ Δ[(· - y)^n_- : h_0^σ..h_n^σ]`.
pub fn cdf_minus(v: &Capacity, y: f64) -> Result<f64, DistributionError> {
    check_enum_cap(v.n())?;
    let sum = chain_sums(v, &[y], TruncKind::Minus)[0];
    Ok(clamp01(sum / factorial(v.n())))
}

/// Single-divided-difference CDF for cardinality-based capacities:
/// `F(y) = Δ[(· - y)^n_- : h_0..h_n]`. Valid for any `n ≤ 20`.
pub fn cdf_symmetric(v: &Capacity, y: f64) -> Result<f64, DistributionError> {
    if !classify(v).is_cardinality_based {
        return Err(DistributionError::NotCardinalityBased);
    }
    let knots = symmetric_knots(v);
    Ok(clamp01(
        VarsiScratch::new().eval(y, &knots, TruncKind::Minus),
    ))
}

/// Density `f(y)`, right-side evaluated at knots. Dispatches like [`cdf`].
pub fn pdf(v: &Capacity, y: f64) -> Result<f64, DistributionError> {
    if classify(v).is_cardinality_based {
        pdf_symmetric(v, y)
    } else {
        pdf_general(v, y)
    }
}

/// `f(y) = (1/(n-1)!) Σ_σ Δ[(· - y)^{n-1}_+ : h_0^σ..h_n^σ]`, nonnegative
/// by construction.
pub fn pdf_general(v: &Capacity, y: f64) -> Result<f64, DistributionError> {
    check_enum_cap(v.n())?;
    let sum = chain_sums(v, &[y], TruncKind::PlusDensity)[0];
    Ok(sum / factorial(v.n() - 1))
}

/// `f(y) = M(y | h_0..h_n)` for cardinality-based capacities.
pub fn pdf_symmetric(v: &Capacity, y: f64) -> Result<f64, DistributionError> {
    if !classify(v).is_cardinality_based {
        return Err(DistributionError::NotCardinalityBased);
    }
    let knots = symmetric_knots(v);
    let n = v.n() as f64;
    Ok(n * VarsiScratch::new().eval(y, &knots, TruncKind::PlusDensity))
}

// ---------------------------------------------------------------------------
// moments

fn check_moment_order(r: usize) -> Result<(), DistributionError> {
    if r < 1 || r > MAX_MOMENT_ORDER {
        return Err(DistributionError::MomentOrderCap {
            r,
            cap: MAX_MOMENT_ORDER,
        });
    }
    Ok(())
}

/// Raw moments `E[Y^r]` for `r = 0..=order` in one sweep of the down-set
/// recursion `F_k(A) = Σ_{B⊆A} v(B) F_{k-1}(B null) / C(|A|,|B|)`, each layer
/// costing `O(3^n)`.
fn raw_moments_upto(v: &Capacity, order: usize) -> Vec<f64> {
    let n = v.n();
    let values = v.values();
    let size = values.len();
    let pascal = pascal_table(n + order);
    let mut out = Vec::with_capacity(order + 1);
    out.push(1.0);
    let mut layer = vec![1.0f64; size];
    for k in 1..=order {
        let mut next = vec![0.0f64; size];
        for (a, slot) in next.iter_mut().enumerate() {
            let ca = (a as u32).count_ones() as usize;
            let row = &pascal[ca];
            let mut acc = 0.0;
            let mut b = a;
            loop {
                let cb = (b as u32).count_ones() as usize;
                acc += values[b] * layer[b] / row[cb];
                if b == 0 {
                    break;
                }
                b = (b - 1) & a;
            }
            *slot = acc;
        }
        layer = next;
        out.push(layer[size - 1] / pascal[n + k][k]);
    }
    out
}

/// `E[Y^r]` by the nested chain recursion, `O(r · 3^n)`.
pub fn raw_moment(v: &Capacity, r: usize) -> Result<f64, DistributionError> {
    check_moment_order(r)?;
    Ok(raw_moments_upto(v, r)[r])
}

/// Raw and central moments up to a given order.
#[derive(Clone, Debug)]
pub struct MomentTable {
    order: usize,
    raw: Vec<f64>,
    central: Vec<f64>,
    mean: f64,
    std_dev: f64,
}

impl MomentTable {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `E[Y^r]`; `raw(0) = 1`.
    pub fn raw(&self, r: usize) -> f64 {
        self.raw[r]
    }

    /// `E[(Y - mean)^r]`; `central(1) = 0` exactly.
    pub fn central(&self, r: usize) -> f64 {
        self.central[r]
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn std_dev(&self) -> f64 {
        self.std_dev
    }
}

/// Raw moments by the chain recursion and central moments by the binomial
/// expansion of `E[(Y - mean)^r]` in raw moments.
pub fn moment_table(v: &Capacity, order: usize) -> Result<MomentTable, DistributionError> {
    check_moment_order(order)?;
    let raw = raw_moments_upto(v, order);
    let mean = raw[1];
    let pascal = pascal_table(order);
    let mut central = vec![0.0; order + 1];
    central[0] = 1.0;
    for r in 2..=order {
        let mut acc = 0.0;
        let mut neg_mu_pow = 1.0; // (-mean)^{r-j}, built from j = r down
        for j in (0..=r).rev() {
            acc += pascal[r][j] * raw[j] * neg_mu_pow;
            neg_mu_pow *= -mean;
        }
        central[r] = acc;
    }
    if order >= 2 {
        central[2] = central[2].max(0.0);
    }
    let std_dev = if order >= 2 { central[2].sqrt() } else { f64::NAN };
    Ok(MomentTable {
        order,
        raw,
        central,
        mean,
        std_dev,
    })
}

/// `E[g^{(n)}(Y)] = Σ_σ Δ[g : h_0^σ..h_n^σ]` for a polynomial `g` given by
/// ascending coefficients. The per-chain divided difference reduces to a
/// weighted sum of complete homogeneous symmetric polynomials of the knots.
pub fn expectation_functional(
    v: &Capacity,
    g_coeffs: &[f64],
) -> Result<f64, DistributionError> {
    let n = v.n();
    check_enum_cap(n)?;
    if g_coeffs.len() <= n {
        return Ok(0.0); // degree < n: every divided difference vanishes
    }
    let rmax = g_coeffs.len() - 1 - n;
    let values = v.values();
    let partials = map_indexed(chain_blocks(n), |block| {
        let mut h = vec![0.0f64; rmax + 1];
        let mut acc = 0.0;
        for_each_chain_in_block(values, n, block, &mut |knots| {
            h.fill(0.0);
            h[0] = 1.0;
            for &a in knots {
                for j in 1..=rmax {
                    h[j] += a * h[j - 1];
                }
            }
            for (d, hv) in h.iter().enumerate() {
                acc += g_coeffs[n + d] * hv;
            }
        });
        vec![acc]
    });
    Ok(reduce_in_order(partials, 1)[0])
}

// ---------------------------------------------------------------------------
// grids and batch evaluation

/// Evaluation grid request: `points` equally spaced values on `[lo, hi]`.
#[derive(Copy, Clone, Debug)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

/// CDF and PDF sampled on a grid. `knot[j]` marks grid points that coincide
/// with a subset value, where the density is right-side evaluated and may
/// jump. For the all-zero capacity `Y ≡ 0`; that is reported as
/// `point_mass = Some(0.0)` with a step CDF and a zero PDF column instead of
/// a density.
#[derive(Clone, Debug)]
pub struct DistributionGrid {
    pub grid: Vec<f64>,
    pub cdf: Vec<f64>,
    pub pdf: Vec<f64>,
    pub knot: Vec<bool>,
    pub point_mass: Option<f64>,
}

const KNOT_FLAG_TOL: f64 = 1e-12;

fn sorted_subset_values(v: &Capacity) -> Vec<f64> {
    let mut vals = v.values().to_vec();
    vals.sort_by(f64::total_cmp);
    vals.dedup();
    vals
}

/// Vectorized [`cdf`] and [`pdf`] over an equally spaced grid; knot profiles
/// are computed once per permutation and reused across all grid points.
pub fn distribution_grid(
    v: &Capacity,
    spec: &GridSpec,
) -> Result<DistributionGrid, DistributionError> {
    if !spec.lo.is_finite() || !spec.hi.is_finite() || spec.lo >= spec.hi {
        return Err(DistributionError::InvalidGrid(format!(
            "range [{}, {}] is not an interval",
            spec.lo, spec.hi
        )));
    }
    if spec.points < 2 || spec.points > MAX_GRID_POINTS {
        return Err(DistributionError::InvalidGrid(format!(
            "point count {} outside 2..={MAX_GRID_POINTS}",
            spec.points
        )));
    }
    let m = spec.points;
    let step = (spec.hi - spec.lo) / (m - 1) as f64;
    let grid: Vec<f64> = (0..m)
        .map(|j| {
            if j == m - 1 {
                spec.hi
            } else {
                spec.lo + j as f64 * step
            }
        })
        .collect();

    let knots = sorted_subset_values(v);
    let knot: Vec<bool> = grid
        .iter()
        .map(|&y| {
            let i = knots.partition_point(|&t| t < y);
            (i < knots.len() && (knots[i] - y).abs() <= KNOT_FLAG_TOL)
                || (i > 0 && (y - knots[i - 1]).abs() <= KNOT_FLAG_TOL)
        })
        .collect();

    if v.is_degenerate() {
        let cdf: Vec<f64> = grid.iter().map(|&y| if y >= 0.0 { 1.0 } else { 0.0 }).collect();
        return Ok(DistributionGrid {
            pdf: vec![0.0; m],
            cdf,
            grid,
            knot,
            point_mass: Some(0.0),
        });
    }

    let n = v.n();
    let (mut cdf, mut pdf) = if classify(v).is_cardinality_based {
        let chain = symmetric_knots(v);
        let mut scratch = VarsiScratch::new();
        let mut cdf = Vec::with_capacity(m);
        let mut pdf = Vec::with_capacity(m);
        for &y in &grid {
            cdf.push(scratch.eval(y, &chain, TruncKind::Minus));
            pdf.push(n as f64 * scratch.eval(y, &chain, TruncKind::PlusDensity));
        }
        (cdf, pdf)
    } else {
        check_enum_cap(n)?;
        let (full, dens) = chain_sums_cdf_pdf(v, &grid);
        let fact_n = factorial(n);
        let fact_n1 = factorial(n - 1);
        (
            full.iter().map(|s| 1.0 - s / fact_n).collect(),
            dens.iter().map(|s| s / fact_n1).collect(),
        )
    };

    for x in cdf.iter_mut() {
        *x = clamp01(*x);
    }
    for j in 1..m {
        if cdf[j] < cdf[j - 1] {
            cdf[j] = cdf[j - 1]; // absorb sub-ulp rounding dips
        }
    }
    for x in pdf.iter_mut() {
        debug_assert!(*x >= -1e-9);
        *x = x.max(0.0);
    }

    Ok(DistributionGrid {
        grid,
        cdf,
        pdf,
        knot,
        point_mass: None,
    })
}

/// Exact CDF at many points.
///
/// Between consecutive subset values `F` is a polynomial of degree at most
/// `n`, so on each such interval it is reconstructed exactly from `n + 1`
/// Chebyshev nodes (evaluated by the permutation sum) and a barycentric
/// interpolation; queries at breakpoints, in near-degenerate intervals, or
/// outside the hull are answered directly. This keeps large batches, such as
/// Kolmogorov-Smirnov scans of 10^5 sample points, at a few hundred
/// permutation sums total.
pub fn cdf_batch(v: &Capacity, ys: &[f64]) -> Result<Vec<f64>, DistributionError> {
    if ys.is_empty() {
        return Ok(Vec::new());
    }
    if classify(v).is_cardinality_based {
        let chain = symmetric_knots(v);
        let mut scratch = VarsiScratch::new();
        return Ok(ys
            .iter()
            .map(|&y| clamp01(scratch.eval(y, &chain, TruncKind::Minus)))
            .collect());
    }
    let n = v.n();
    check_enum_cap(n)?;
    let fact = factorial(n);
    let breaks = sorted_subset_values(v);
    let lo = breaks[0];
    let hi = breaks[breaks.len() - 1];
    let nodes_per_interval = n + 1;

    const TINY_INTERVAL: f64 = 1e-6;

    // classify queries
    #[derive(Clone, Copy)]
    enum Plan {
        Constant(f64),
        Direct(usize),              // index into the direct-evaluation list
        Interpolate { interval: usize }, // index into the active-interval list
    }
    let mut direct_points: Vec<f64> = Vec::new();
    let mut active: Vec<usize> = Vec::new(); // interval index -> break index
    let mut interval_slot = vec![usize::MAX; breaks.len()];
    let mut plans = Vec::with_capacity(ys.len());
    for &y in ys {
        if y < lo {
            plans.push(Plan::Constant(0.0));
            continue;
        }
        if y >= hi {
            plans.push(Plan::Constant(1.0));
            continue;
        }
        let i = breaks.partition_point(|&t| t < y);
        let at_break = (i < breaks.len() && (breaks[i] - y).abs() == 0.0)
            || (i > 0 && (y - breaks[i - 1]).abs() == 0.0);
        let interval = if i == 0 { 0 } else { i - 1 };
        if at_break || breaks[interval + 1] - breaks[interval] < TINY_INTERVAL {
            plans.push(Plan::Direct(direct_points.len()));
            direct_points.push(y);
        } else {
            if interval_slot[interval] == usize::MAX {
                interval_slot[interval] = active.len();
                active.push(interval);
            }
            plans.push(Plan::Interpolate {
                interval: interval_slot[interval],
            });
        }
    }

    // Chebyshev nodes for every active interval, all evaluated in one pass
    let mut thetas = Vec::with_capacity(nodes_per_interval);
    for j in 0..nodes_per_interval {
        thetas.push(std::f64::consts::PI * (2.0 * j as f64 + 1.0) / (2.0 * nodes_per_interval as f64));
    }
    let weights: Vec<f64> = thetas
        .iter()
        .enumerate()
        .map(|(j, t)| if j % 2 == 0 { t.sin() } else { -t.sin() })
        .collect();

    let mut node_points: Vec<f64> = Vec::with_capacity(active.len() * nodes_per_interval);
    for &iv in &active {
        let (a, b) = (breaks[iv], breaks[iv + 1]);
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        for t in &thetas {
            node_points.push(mid + half * t.cos());
        }
    }

    let mut all_points = node_points;
    let split = all_points.len();
    all_points.extend_from_slice(&direct_points);
    let sums = if all_points.is_empty() {
        Vec::new()
    } else {
        chain_sums(v, &all_points, TruncKind::PlusFull)
    };
    let node_f: Vec<f64> = sums[..split].iter().map(|s| 1.0 - s / fact).collect();
    let direct_f: Vec<f64> = sums[split..].iter().map(|s| clamp01(1.0 - s / fact)).collect();

    let mut out = Vec::with_capacity(ys.len());
    for (&y, plan) in ys.iter().zip(&plans) {
        let value = match *plan {
            Plan::Constant(c) => c,
            Plan::Direct(i) => direct_f[i],
            Plan::Interpolate { interval } => {
                let base = interval * nodes_per_interval;
                let nodes = &all_points[base..base + nodes_per_interval];
                let fvals = &node_f[base..base + nodes_per_interval];
                clamp01(barycentric(nodes, fvals, &weights, y))
            }
        };
        out.push(value);
    }
    Ok(out)
}

fn barycentric(nodes: &[f64], fvals: &[f64], weights: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&t, &f), &w) in nodes.iter().zip(fvals).zip(weights) {
        let d = x - t;
        if d == 0.0 {
            return f;
        }
        let q = w / d;
        num += q * f;
        den += q;
    }
    num / den
}
