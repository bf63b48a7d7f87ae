//! Small combinatorial helpers shared by the spin and boson code.

/// `sqrt(C(n, k))` for `k = 0..=n`, built by the multiplicative recurrence so
/// that large `n` never forms the (overflowing) binomial itself. The lower
/// half is mirrored, so the table is exactly symmetric with unit ends.
pub fn sqrt_binomials(n: usize) -> Vec<f64> {
    let mut out = vec![1.0_f64; n + 1];
    let mut s = 1.0_f64;
    for k in 0..n / 2 {
        s *= (((n - k) as f64) / ((k + 1) as f64)).sqrt();
        out[k + 1] = s;
        out[n - k - 1] = s;
    }
    out
}

/// `ln(k!)` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(acc);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Binomial coefficient as `f64` (exact for the sizes used here).
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0_f64;
    for i in 0..k {
        c = c * ((n - i) as f64) / ((i + 1) as f64);
    }
    c.round()
}
