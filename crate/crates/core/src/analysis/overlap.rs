use serde::Serialize;

use crate::error::{Error, Result};
use crate::layout::{CodeParams, GenerationLayout};
use crate::num::{ln_binomial, Real};

/// Expected overlap `Ω(s)` between the union of `s` generations and another one.
pub fn omega<T: Real>(params: &CodeParams, s: usize) -> T {
    let n = params.generations();
    if n < 2 || params.annex == 0 || s == 0 {
        return T::zero();
    }
    let h = T::of(params.base);
    let g = T::of(params.generation_size());
    let pi = T::of(params.annex) / (T::of(n - 1) * h);
    let keep = (T::one() - pi).powi(s as i32);
    g * (T::one() - keep) + T::of(s) * h * pi * keep
}

/// Large-`n` limit of `Ω(s)` with `l / h -> alpha` and `s / n -> beta`.
pub fn omega_asymptotic<T: Real>(h: T, alpha: T, beta: T) -> T {
    let decay = (-alpha * beta).exp();
    h * ((T::one() + alpha) * (T::one() - decay) + alpha * beta * decay)
}

/// `Ω(0..n-1)` for one parameter set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OverlapProfile<T> {
    pub params: CodeParams,
    pub omega: Vec<T>,
}

impl<T: Real> OverlapProfile<T> {
    pub fn random_annex(params: CodeParams) -> Self {
        let omega = (0..params.generations()).map(|s| omega(&params, s)).collect();
        Self { params, omega }
    }

    /// Unresolved members `g - Ω(s)` of the next generation, per `s`.
    pub fn remaining(&self) -> Vec<T> {
        let g = T::of(self.params.generation_size());
        self.omega.iter().map(|&w| g - w).collect()
    }
}

/// Exact `E|(∪_{i∈I} G_i) ∩ G_j|` for a fixed layout, averaged over a uniform
/// random set `I` of `s` generations and a uniform `j ∉ I`.
///
/// A member `p` of `G_j` lies in the union unless all `c_p` other generations
/// containing it avoid `I`, which happens with probability
/// `C(n-1-c_p, s) / C(n-1, s)`.
pub fn layout_overlap_profile<T: Real>(layout: &GenerationLayout) -> Result<OverlapProfile<T>> {
    let n = layout.generations();
    if n == 0 {
        return Err(Error::Param("layout has no generations".into()));
    }
    // histogram over (j, p ∈ G_j) of c_p
    let mut counts = vec![0usize; n];
    for j in 0..n {
        for &p in layout.members(j) {
            counts[layout.degree(p) - 1] += 1;
        }
    }
    let omega = (0..n)
        .map(|s| {
            let mut acc = T::zero();
            for (c, &freq) in counts.iter().enumerate() {
                if freq == 0 || c == 0 {
                    continue;
                }
                let miss = if n - 1 < c + s {
                    T::zero()
                } else {
                    (ln_binomial::<T>(n - 1 - c, s) - ln_binomial::<T>(n - 1, s)).exp()
                };
                acc = acc + T::of(freq) * (T::one() - miss);
            }
            acc / T::of(n)
        })
        .collect();
    Ok(OverlapProfile { params: *layout.params(), omega })
}
