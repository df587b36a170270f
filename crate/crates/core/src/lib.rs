//! Exact distributions of discrete Choquet integrals.
//!
//! A linear combination of lattice polynomials (equivalently, the Lovász
//! extension of a set function, or, when monotone, a discrete Choquet
//! integral) is the continuous function on the unit cube that is linear on
//! each canonical simplex and interpolates a capacity's values at the cube
//! vertices. For uniform random inputs this crate computes the exact
//! distribution function, density, and moments of the aggregated value,
//! driven by divided differences of truncated power functions evaluated with
//! the stable de Boor / Varsi recurrence.
//!
//! ```
//! use lovex::{load_capacity, cdf, moment_table};
//!
//! let v = load_capacity(r#"{ "n": 2, "values": {"1": 0.5, "2": 0.5, "1,2": 1} }"#).unwrap();
//! let t = moment_table(&v, 2).unwrap();
//! assert!((t.mean() - 0.5).abs() < 1e-12);
//! assert!((cdf(&v, 0.25).unwrap() - 0.125).abs() < 1e-12);
//! ```

pub mod capacity;
pub mod distribution;
pub mod divdiff;
pub mod lovasz;
mod numeric;
pub mod oracle;
mod par;

pub use capacity::{
    classify, knot_profile, load_capacity, Capacity, CapacityError, Classification, KnotProfile,
    MoebiusRepresentation, SubsetIndex, MAX_PLAYERS,
};
pub use capacity::{moebius_transform, zeta_transform};
pub use distribution::{
    cdf, cdf_batch, cdf_general, cdf_minus, cdf_symmetric, distribution_grid,
    expectation_functional, moment_table, pdf, pdf_general, pdf_symmetric, raw_moment,
    DistributionError, DistributionGrid, GridSpec, MomentTable, MAX_ENUM_PLAYERS,
    MAX_MOMENT_ORDER,
};
pub use divdiff::{
    bspline, divdiff_power_sym, divdiff_recursive, divdiff_recursive_poly, varsi_minus,
    varsi_plus, DivDiffError, TableauVariant, VarsiTableau,
};
pub use lovasz::{eval_moebius, eval_sorted, eval_with_permutation, EvalError, EvaluationPoint};
pub use oracle::{
    bates_cdf, beta_order_statistic_cdf, brute_chain_moment, cdf_distinct_formula,
    divdiff_distinct, ks_critical_value, ks_statistic, random_capacity, sample, OracleError,
    SampleBatch,
};
