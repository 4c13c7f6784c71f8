use crate::num::Real;

/// Closed-form estimate of the coded packets a generation of size `g` needs
/// once `x` of its members are resolved. Zero for `x >= g`, and floored at zero
/// where the logarithm turns it negative just below `g`.
pub fn eta<T: Real>(g: usize, x: T, q: T) -> T {
    let r = T::of(g) - x;
    if r <= T::zero() {
        return T::zero();
    }
    let qi = q.recip();
    let val = r + qi / (T::one() - qi) + ((T::one() - q.powf(-r)) / (T::one() - qi)).log(q);
    val.max(T::zero())
}

/// Exact expected number of uniform random vectors over GF(q) needed to span
/// a space of dimension `unresolved`.
pub fn eta_exact<T: Real>(unresolved: usize, q: T) -> T {
    let r = unresolved as i32;
    (0..r).map(|j| (T::one() - q.powi(j - r)).recip()).sum()
}
