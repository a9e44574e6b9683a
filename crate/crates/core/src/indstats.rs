//! Exact mean and variance of copula support when all items are
//! independent, and the resulting `z_ind` score.

use crate::error::{Error, Result};

/// Null-model moments for an itemset of size `m` over `n` rows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndModel {
    pub m: usize,
    pub n: usize,
    /// `E[U] = 2^-m`.
    pub mu: f64,
    /// `Var(sqrt(n) * U)`.
    pub var_sqrt_n: f64,
}

/// Closed-form moments of copula support under independence.
///
/// With `a = E[S^2] = (2n-1) / (6(n-1))`, `b = E[S S'] = (n-2)(3n-1) /
/// (12(n-1)^2)` and `q = 1/4`, the variance is `a^m + (n-1) b^m - n q^m`.
/// Since `a - q = d` and `b - q = -d/(n-1)` with `d = (n+1) / (12(n-1))`,
/// the variance factors as
///
/// ```text
/// d^2 n/(n-1) * sum_{i=1}^{m-1} q^(m-1-i) * sum_{j=0}^{i-1} a^j b^(i-1-j)
/// ```
///
/// which is a sum of non-negative terms: no cancellation, no overflow, and
/// exactly zero for `m = 1`.
pub fn ind_model(m: usize, n: usize) -> Result<IndModel> {
    if m < 1 {
        return Err(Error::InvalidConfig("itemset size must be at least 1".into()));
    }
    if n < 3 {
        return Err(Error::TooFewRows(n));
    }
    let nf = n as f64;
    let a = (2.0 * nf - 1.0) / (6.0 * (nf - 1.0));
    let b = (nf - 2.0) * (3.0 * nf - 1.0) / (12.0 * (nf - 1.0) * (nf - 1.0));
    let q: f64 = 0.25;
    let d = (nf + 1.0) / (12.0 * (nf - 1.0));

    // inner(i) = sum_{j<i} a^j b^(i-1-j), built incrementally:
    // inner(i+1) = a^i + b * inner(i).
    let mut total = 0.0;
    let mut inner = 0.0;
    let mut a_pow = 1.0;
    for i in 1..m {
        inner = a_pow + b * inner;
        a_pow *= a;
        total += q.powi((m - 1 - i) as i32) * inner;
    }
    let var_sqrt_n = d * d * nf / (nf - 1.0) * total;
    if var_sqrt_n < 0.0 || !var_sqrt_n.is_finite() {
        return Err(Error::Numeric(format!("variance {var_sqrt_n} for m={m}, n={n}")));
    }
    Ok(IndModel { m, n, mu: 0.5f64.powi(m as i32), var_sqrt_n })
}

/// `sqrt(n) * (support - 2^-m) / sigma`.
pub fn z_ind(support: f64, m: usize, n: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::Degenerate(
            "z_ind is undefined for single items (zero variance)".into(),
        ));
    }
    let model = ind_model(m, n)?;
    Ok((n as f64).sqrt() * (support - model.mu) / model.var_sqrt_n.sqrt())
}
