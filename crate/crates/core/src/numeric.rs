//! Small exact-integer combinatorics in f64.

/// `n!` as f64; exact for `n ≤ 18` and used only for `n ≤ 20`.
pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Binomial coefficient by the multiplicative rule; every intermediate is an
/// exactly representable integer for the sizes used here (`n ≤ 32`).
pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 1..=k {
        c = c * (n - k + i) as f64 / i as f64;
    }
    c
}

/// Pascal triangle rows `0..=max_n`, `table[n][k] = C(n, k)`.
pub(crate) fn pascal_table(max_n: usize) -> Vec<Vec<f64>> {
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n {
        let mut row = vec![1.0; n + 1];
        for k in 1..n {
            row[k] = table[n - 1][k - 1] + table[n - 1][k];
        }
        table.push(row);
    }
    table
}
