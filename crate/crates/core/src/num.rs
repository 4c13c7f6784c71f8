use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};

/// Floating point scalar used by the analytical engine: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + NumCast + Sum + Debug + Display + Send + Sync + 'static
{
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable as a float")
    }

    fn of(k: usize) -> Self {
        Self::from_usize(k).expect("count representable as a float")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `ln(k!)`
pub fn ln_factorial<T: Real>(k: usize) -> T {
    (2..=k).map(|i| T::of(i).ln()).sum()
}

pub fn ln_binomial<T: Real>(n: usize, k: usize) -> T {
    debug_assert!(k <= n);
    ln_factorial::<T>(n) - ln_factorial::<T>(k) - ln_factorial::<T>(n - k)
}

/// Table of `ln(i!)` for `i = 0..=n`.
pub fn ln_factorial_table<T: Real>(n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = T::zero();
    out.push(acc);
    for i in 1..=n {
        acc = acc + T::of(i).ln();
        out.push(acc);
    }
    out
}
