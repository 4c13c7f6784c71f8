//! Truncated exponential series and the Poisson probabilities built from them.

use crate::error::{Error, Result};
use crate::num::{ln_factorial, Real};

/// Marks an infinite requirement level (`S_∞(x) = e^x`).
pub const UNBOUNDED: usize = usize::MAX;

/// `S_m(x) = Σ_{i<m} x^i / i!`, with `S_0 = 0` and `S_∞ = e^x`.
pub fn partial_exp_sum<T: Real>(m: usize, x: T) -> Result<T> {
    if x < T::zero() || x.is_nan() {
        return Err(Error::Domain(format!("S_m(x) needs x >= 0, got {x}")));
    }
    if m == UNBOUNDED {
        return Ok(x.exp());
    }
    let mut term = T::one();
    let mut acc = T::zero();
    for i in 0..m {
        acc = acc + term;
        term = term * x / T::of(i + 1);
    }
    Ok(acc)
}

/// `P(Pois(x) = k)`, started in log space.
pub fn poisson_pmf<T: Real>(k: usize, x: T) -> T {
    if x == T::zero() {
        return if k == 0 { T::one() } else { T::zero() };
    }
    (T::of(k) * x.ln() - x - ln_factorial::<T>(k)).exp()
}

/// `(S_hi(x) - S_lo(x)) e^{-x} = P(lo <= Pois(x) < hi)`, for `hi >= lo`;
/// `hi` may be [`UNBOUNDED`].
pub fn poisson_band<T: Real>(hi: usize, lo: usize, x: T) -> Result<T> {
    if x < T::zero() || x.is_nan() {
        return Err(Error::Domain(format!("Poisson mean must be >= 0, got {x}")));
    }
    if hi < lo {
        return Err(Error::Param(format!("band [{lo}, {hi}) is empty")));
    }
    Ok(band_with(hi, lo, x, |k| ln_factorial::<T>(k)))
}

pub(crate) fn band_with<T: Real>(hi: usize, lo: usize, x: T, ln_fact: impl Fn(usize) -> T) -> T {
    if hi == lo {
        return T::zero();
    }
    if x == T::zero() {
        return if lo == 0 { T::one() } else { T::zero() };
    }
    let ln_x = x.ln();
    let start = |k: usize| (T::of(k) * ln_x - x - ln_fact(k)).exp();
    let sum_range = |from: usize, to: usize| {
        let mut t = start(from);
        let mut acc = T::zero();
        for k in from..to {
            acc = acc + t;
            t = t * x / T::of(k + 1);
        }
        acc
    };
    if hi != UNBOUNDED {
        return sum_range(lo, hi);
    }
    if lo == 0 {
        return T::one();
    }
    if x > T::of(lo) {
        // the lower tail is the smaller side
        return (T::one() - sum_range(0, lo)).max(T::zero());
    }
    let mut t = start(lo);
    let mut acc = T::zero();
    let mut k = lo;
    while t > acc * T::epsilon() * T::lit(0.01) && t > T::min_positive_value() {
        acc = acc + t;
        t = t * x / T::of(k + 1);
        k += 1;
    }
    acc
}
