//! Set functions on the power set of `[n] = {1, …, n}`: representation,
//! the capacity file format, the Möbius/zeta transform pair, structural
//! classification, and knot profiles along maximal chains.

use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer};
use thiserror::Error;

/// Hard cap on the number of players a capacity may have (2^20 stored values).
pub const MAX_PLAYERS: usize = 20;

/// Absolute tolerance for the equality checks used by [`classify`].
pub const CLASSIFY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum CapacityError {
    #[error("invalid capacity file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("player count {0} outside supported range 1..={MAX_PLAYERS}")]
    PlayerCount(i64),
    #[error("malformed subset key {key:?}: {reason}")]
    MalformedKey { key: String, reason: String },
    #[error("subset key {key:?} references player {player} outside 1..={n}")]
    IndexOutOfRange { key: String, player: usize, n: usize },
    #[error("duplicate entry for subset {{{key}}}")]
    DuplicateSubset { key: String },
    #[error("missing value for subset {{{key}}}")]
    MissingSubset { key: String },
    #[error("the empty set must have value 0, got {0}")]
    NonzeroEmptySet(f64),
    #[error("non-finite value {value} for subset {{{key}}}")]
    NonFiniteValue { key: String, value: f64 },
    #[error("expected {expected} subset values for n = {n}, got {got}")]
    LengthMismatch { n: usize, expected: usize, got: usize },
    #[error("sigma is not a permutation of 1..={0}")]
    InvalidPermutation(usize),
}

/// A subset of `[n]` encoded as a bitmask: bit `i - 1` set means player `i`
/// is a member. `0` is the empty set, `2^n - 1` is `[n]` itself.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetIndex(u32);

impl SubsetIndex {
    pub const EMPTY: SubsetIndex = SubsetIndex(0);

    pub fn new(bits: u32) -> Self {
        SubsetIndex(bits)
    }

    /// The full set `[n]`.
    pub fn full(n: usize) -> Self {
        SubsetIndex(((1u64 << n) - 1) as u32)
    }

    /// The singleton `{player}`, `player` in `1..=n`.
    pub fn singleton(player: usize) -> Self {
        SubsetIndex(1 << (player - 1))
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn cardinality(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, player: usize) -> bool {
        player >= 1 && self.0 & (1 << (player - 1)) != 0
    }

    pub fn with(self, player: usize) -> Self {
        SubsetIndex(self.0 | (1 << (player - 1)))
    }

    pub fn is_subset_of(self, other: SubsetIndex) -> bool {
        self.0 & !other.0 == 0
    }

    /// Members in ascending order (1-based players).
    pub fn players(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32u32).filter_map(move |i| (bits & (1 << i) != 0).then_some(i as usize + 1))
    }

    /// Canonical file key: comma-separated ascending players, `""` for the
    /// empty set.
    pub fn key(self) -> String {
        let mut out = String::new();
        for p in self.players() {
            if !out.is_empty() {
                out.push(',');
            }
            out.push_str(&p.to_string());
        }
        out
    }

    /// Parses a file key. Accepts the canonical form only: strictly
    /// ascending players in `1..=n`, no whitespace.
    pub fn parse_key(key: &str, n: usize) -> Result<Self, CapacityError> {
        if key.is_empty() {
            return Ok(SubsetIndex::EMPTY);
        }
        let mut bits = 0u32;
        let mut last = 0usize;
        for part in key.split(',') {
            if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
                return Err(CapacityError::MalformedKey {
                    key: key.to_string(),
                    reason: format!("component {part:?} is not a positive integer"),
                });
            }
            let player: usize = part.parse().map_err(|_| CapacityError::MalformedKey {
                key: key.to_string(),
                reason: format!("component {part:?} does not fit an integer"),
            })?;
            if player < 1 || player > n {
                return Err(CapacityError::IndexOutOfRange {
                    key: key.to_string(),
                    player,
                    n,
                });
            }
            if player <= last {
                return Err(CapacityError::MalformedKey {
                    key: key.to_string(),
                    reason: "players must be strictly ascending".to_string(),
                });
            }
            last = player;
            bits |= 1 << (player - 1);
        }
        Ok(SubsetIndex(bits))
    }
}

impl fmt::Debug for SubsetIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.key())
    }
}

/// A real-valued set function on all `2^n` subsets of `[n]`, grounded at the
/// empty set. Monotonicity and normalization are *not* required; arbitrary
/// linear combinations of lattice polynomials are represented this way.
#[derive(Clone, Debug, PartialEq)]
pub struct Capacity {
    n: usize,
    values: Vec<f64>,
}

impl Capacity {
    /// Builds a capacity from the complete value table, indexed by subset
    /// bitmask. `values[0]` must be exactly 0.
    pub fn new(n: usize, values: Vec<f64>) -> Result<Self, CapacityError> {
        if n < 1 || n > MAX_PLAYERS {
            return Err(CapacityError::PlayerCount(n as i64));
        }
        let expected = 1usize << n;
        if values.len() != expected {
            return Err(CapacityError::LengthMismatch {
                n,
                expected,
                got: values.len(),
            });
        }
        if values[0] != 0.0 {
            return Err(CapacityError::NonzeroEmptySet(values[0]));
        }
        for (mask, &v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(CapacityError::NonFiniteValue {
                    key: SubsetIndex(mask as u32).key(),
                    value: v,
                });
            }
        }
        Ok(Capacity { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(SubsetIndex) -> f64) -> Result<Self, CapacityError> {
        if n < 1 || n > MAX_PLAYERS {
            return Err(CapacityError::PlayerCount(n as i64));
        }
        let mut values: Vec<f64> = (0..1usize << n)
            .map(|m| f(SubsetIndex(m as u32)))
            .collect();
        values[0] = 0.0;
        Capacity::new(n, values)
    }

    /// Additive capacity `v(A) = Σ_{i∈A} w_i` (a weighted sum).
    pub fn additive(weights: &[f64]) -> Result<Self, CapacityError> {
        let n = weights.len();
        Capacity::from_fn(n, |s| s.players().map(|p| weights[p - 1]).sum())
    }

    /// Capacity depending only on `|A|`: `by_card[k]` is the value of any
    /// subset of size `k` (`by_card[0]` is forced to 0).
    pub fn cardinality_based(n: usize, by_card: &[f64]) -> Result<Self, CapacityError> {
        assert_eq!(by_card.len(), n + 1, "need one value per cardinality 0..=n");
        Capacity::from_fn(n, |s| by_card[s.cardinality()])
    }

    /// `v(A) = 1` iff `A = [n]`: the minimum of the coordinates.
    pub fn min_polynomial(n: usize) -> Result<Self, CapacityError> {
        Capacity::from_fn(n, |s| if s.cardinality() == n { 1.0 } else { 0.0 })
    }

    /// `v(A) = 1` for every nonempty `A`: the maximum of the coordinates.
    pub fn max_polynomial(n: usize) -> Result<Self, CapacityError> {
        Capacity::from_fn(n, |s| if s.cardinality() > 0 { 1.0 } else { 0.0 })
    }

    /// `v(A) = 1` iff `|A| ≥ n - k + 1`: the k-th smallest coordinate.
    pub fn order_statistic(n: usize, k: usize) -> Result<Self, CapacityError> {
        assert!(k >= 1 && k <= n, "order statistic index out of range");
        Capacity::from_fn(n, |s| if s.cardinality() >= n - k + 1 { 1.0 } else { 0.0 })
    }

    /// Equal-weight additive capacity: the arithmetic mean.
    pub fn uniform_mean(n: usize) -> Result<Self, CapacityError> {
        Capacity::from_fn(n, |s| s.cardinality() as f64 / n as f64)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn num_subsets(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, s: SubsetIndex) -> f64 {
        self.values[s.index()]
    }

    /// Complete table indexed by subset bitmask.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `v([n])`.
    pub fn grand_value(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    /// Smallest and largest subset value; `Y_h` is supported inside this
    /// interval.
    pub fn value_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for &v in &self.values {
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }

    /// True when every subset value is exactly zero, i.e. `Y_h ≡ 0`.
    pub fn is_degenerate(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    /// Serializes to the capacity file format.
    pub fn to_json(&self) -> String {
        let mut map = serde_json::Map::new();
        map.insert("n".to_string(), serde_json::json!(self.n));
        let mut values = serde_json::Map::new();
        for mask in 1..self.values.len() {
            values.insert(
                SubsetIndex(mask as u32).key(),
                serde_json::json!(self.values[mask]),
            );
        }
        map.insert("values".to_string(), serde_json::Value::Object(values));
        serde_json::Value::Object(map).to_string()
    }
}

/// Entries of the `values` object in file order, duplicates preserved so
/// they can be rejected.
struct KeyValueList(Vec<(String, f64)>);

impl<'de> Deserialize<'de> for KeyValueList {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = KeyValueList;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map of subset keys to numbers")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut entries = Vec::with_capacity(access.size_hint().unwrap_or(0));
                while let Some((k, v)) = access.next_entry::<String, f64>()? {
                    entries.push((k, v));
                }
                Ok(KeyValueList(entries))
            }
        }
        deserializer.deserialize_map(V)
    }
}

#[derive(Deserialize)]
struct CapacityFile {
    n: i64,
    values: KeyValueList,
}

/// Parses the capacity file format:
///
/// ```json
/// { "n": 3, "values": { "1": 0.1, "2": 0.6, "1,2": 0.9, ... } }
/// ```
///
/// Keys are comma-separated strictly ascending players in `1..=n`; all
/// `2^n - 1` nonempty subsets must be present. The empty set may appear as
/// `""` but only with value 0; it is inserted as 0 otherwise.
pub fn load_capacity(text: &str) -> Result<Capacity, CapacityError> {
    let file: CapacityFile = serde_json::from_str(text)?;
    if file.n < 1 || file.n > MAX_PLAYERS as i64 {
        return Err(CapacityError::PlayerCount(file.n));
    }
    let n = file.n as usize;
    let size = 1usize << n;
    let mut values = vec![f64::NAN; size];
    for (key, value) in &file.values.0 {
        let subset = SubsetIndex::parse_key(key, n)?;
        if !values[subset.index()].is_nan() {
            return Err(CapacityError::DuplicateSubset { key: subset.key() });
        }
        if subset == SubsetIndex::EMPTY && *value != 0.0 {
            return Err(CapacityError::NonzeroEmptySet(*value));
        }
        if !value.is_finite() {
            return Err(CapacityError::NonFiniteValue {
                key: key.clone(),
                value: *value,
            });
        }
        values[subset.index()] = *value;
    }
    values[0] = 0.0;
    for (mask, v) in values.iter().enumerate() {
        if v.is_nan() {
            return Err(CapacityError::MissingSubset {
                key: SubsetIndex(mask as u32).key(),
            });
        }
    }
    Capacity::new(n, values)
}

/// Möbius transform coefficients of a capacity: the weights of its
/// expansion into min-monomials.
#[derive(Clone, Debug, PartialEq)]
pub struct MoebiusRepresentation {
    n: usize,
    coeffs: Vec<f64>,
}

impl MoebiusRepresentation {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coeff(&self, s: SubsetIndex) -> f64 {
        self.coeffs[s.index()]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }
}

/// Möbius transform `m(A) = Σ_{B⊆A} (-1)^{|A|-|B|} v(B)`, computed by the
/// in-place subset-sum algorithm in O(n·2^n).
pub fn moebius_transform(v: &Capacity) -> MoebiusRepresentation {
    let n = v.n();
    let mut coeffs = v.values().to_vec();
    for i in 0..n {
        let bit = 1usize << i;
        for mask in 0..coeffs.len() {
            if mask & bit != 0 {
                coeffs[mask] -= coeffs[mask ^ bit];
            }
        }
    }
    MoebiusRepresentation { n, coeffs }
}

/// Zeta transform `v(A) = Σ_{B⊆A} m(B)`, the inverse of
/// [`moebius_transform`].
pub fn zeta_transform(m: &MoebiusRepresentation) -> Capacity {
    let mut values = m.coeffs.clone();
    for i in 0..m.n {
        let bit = 1usize << i;
        for mask in 0..values.len() {
            if mask & bit != 0 {
                let lower = values[mask ^ bit];
                values[mask] += lower;
            }
        }
    }
    values[0] = 0.0;
    Capacity {
        n: m.n,
        values,
    }
}

/// Structural flags of a capacity. Equality checks use [`CLASSIFY_TOL`];
/// the `{0,1}`-valued check is exact.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// `v(A) ≤ v(B)` whenever `A ⊆ B`.
    pub is_monotone: bool,
    /// Monotone, `{0,1}`-valued, and `v([n]) = 1`: a pure min/max expression.
    pub is_lattice_polynomial: bool,
    /// `v(A)` depends only on `|A|`: a linear combination of order statistics.
    pub is_cardinality_based: bool,
    /// `v(A) = Σ_{i∈A} v({i})`: a weighted sum.
    pub is_additive: bool,
}

pub fn classify(v: &Capacity) -> Classification {
    let n = v.n();
    let values = v.values();

    let mut is_monotone = true;
    'outer: for mask in 0..values.len() {
        for i in 0..n {
            let bit = 1usize << i;
            if mask & bit == 0 && values[mask] > values[mask | bit] {
                is_monotone = false;
                break 'outer;
            }
        }
    }

    let zero_one = values.iter().all(|&x| x == 0.0 || x == 1.0);
    let is_lattice_polynomial = is_monotone && zero_one && v.grand_value() == 1.0;

    let mut lo_by_card = vec![f64::INFINITY; n + 1];
    let mut hi_by_card = vec![f64::NEG_INFINITY; n + 1];
    for (mask, &x) in values.iter().enumerate() {
        let c = (mask as u32).count_ones() as usize;
        lo_by_card[c] = lo_by_card[c].min(x);
        hi_by_card[c] = hi_by_card[c].max(x);
    }
    let is_cardinality_based = (0..=n).all(|c| hi_by_card[c] - lo_by_card[c] <= CLASSIFY_TOL);

    let mut is_additive = true;
    for mask in 0..values.len() {
        let mut sum = 0.0;
        let mut rest = mask;
        while rest != 0 {
            let bit = rest & rest.wrapping_neg();
            sum += values[bit];
            rest ^= bit;
        }
        if (values[mask] - sum).abs() > CLASSIFY_TOL {
            is_additive = false;
            break;
        }
    }

    Classification {
        is_monotone,
        is_lattice_polynomial,
        is_cardinality_based,
        is_additive,
    }
}

/// Values of a capacity along the maximal chain generated by prefixes of a
/// permutation: the knots of the per-simplex spline.
#[derive(Clone, Debug)]
pub struct KnotProfile {
    values: Vec<f64>,
    prefixes: Vec<SubsetIndex>,
}

impl KnotProfile {
    /// `(h_0, …, h_n)` with `h_0 = 0` and `h_n = v([n])`.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// The chain `∅ ⊂ {σ(1)} ⊂ … ⊂ [n]`.
    pub fn prefixes(&self) -> &[SubsetIndex] {
        &self.prefixes
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Knot profile of `v` along `sigma`, a permutation of `1..=n` given as the
/// order in which players enter the chain.
pub fn knot_profile(v: &Capacity, sigma: &[usize]) -> Result<KnotProfile, CapacityError> {
    let n = v.n();
    if sigma.len() != n {
        return Err(CapacityError::InvalidPermutation(n));
    }
    let mut seen = 0u32;
    for &p in sigma {
        if p < 1 || p > n || seen & (1 << (p - 1)) != 0 {
            return Err(CapacityError::InvalidPermutation(n));
        }
        seen |= 1 << (p - 1);
    }
    let mut values = Vec::with_capacity(n + 1);
    let mut prefixes = Vec::with_capacity(n + 1);
    let mut mask = SubsetIndex::EMPTY;
    values.push(0.0);
    prefixes.push(mask);
    for &p in sigma {
        mask = mask.with(p);
        values.push(v.value(mask));
        prefixes.push(mask);
    }
    Ok(KnotProfile { values, prefixes })
}
