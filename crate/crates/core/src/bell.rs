//! Partial (incomplete) exponential Bell polynomials.
//!
//! Evaluated by the standard recurrence
//!
//!   B_{n,k}(x_1,...,x_{n-k+1})
//!     = sum_{i=1}^{n-k+1} C(n-1, i-1) x_i B_{n-i,k-1}(x_1,...),
//!
//! with B_{0,0} = 1 and B_{n,0} = B_{0,k} = 0 otherwise. Binomial
//! coefficients are exact integers; the supported range n <= 10 keeps them
//! tiny, so evaluation in f64 is exact apart from the x-arithmetic itself.

/// Largest derivative order the evaluator supports.
pub const MAX_ORDER: usize = 10;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut v = 1u64;
    for i in 0..k.min(n - k) {
        v = v * (n - i) as u64 / (i + 1) as u64;
    }
    v as f64
}

/// Evaluate B_{n,k} at x = (x_1, ..., x_m) with m >= n - k + 1.
///
/// Panics if n exceeds `MAX_ORDER`; callers gate on that before reaching
/// here.
pub fn partial_bell(n: usize, k: usize, x: &[f64]) -> f64 {
    assert!(n <= MAX_ORDER, "bell polynomial order {n} exceeds {MAX_ORDER}");
    if n == 0 && k == 0 {
        return 1.0;
    }
    if n == 0 || k == 0 || k > n {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 1..=(n - k + 1) {
        sum += binomial(n - 1, i - 1) * x[i - 1] * partial_bell(n - i, k - 1, x);
    }
    sum
}
