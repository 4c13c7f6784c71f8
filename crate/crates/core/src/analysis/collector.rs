//! Expected waiting time for the generalized coupon collector.
//!
//! Draws land on `n` generations uniformly. The profile asks that, for each
//! level `j`, at least `k_j` generations hold `m_j` or more draws. Under
//! Poissonization each generation's count at time `x` is `Pois(x)`, so the
//! probability the goal is still unmet at `x` is a finite sum over how many
//! generations fall into each band `[m_{j+1}, m_j)`; the expected number of
//! draws is `n` times the integral of that probability.

use serde::Serialize;

use super::poisson::{band_with, UNBOUNDED};
use super::quadrature::integrate;
use crate::error::{Error, Result};
use crate::num::{ln_factorial_table, Real};

const REL_TOL: f64 = 1e-8;
const TAIL_CUTOFF: f64 = 1e-12;
const OVERSHOOT: f64 = 1e-9;

/// Requirement levels: `thresholds` strictly increasing from 1, `requirements`
/// strictly decreasing and positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CollectorProfile {
    thresholds: Vec<usize>,
    requirements: Vec<usize>,
}

impl CollectorProfile {
    pub fn new(thresholds: Vec<usize>, requirements: Vec<usize>) -> Result<Self> {
        if thresholds.len() != requirements.len() {
            return Err(Error::Param("thresholds and requirements differ in length".into()));
        }
        if thresholds.first().is_some_and(|&k| k == 0) || thresholds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Param(format!("thresholds {thresholds:?} must increase strictly from 1")));
        }
        if requirements.last().is_some_and(|&m| m == 0) || requirements.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Param(format!("requirements {requirements:?} must decrease strictly and stay positive")));
        }
        Ok(Self { thresholds, requirements })
    }

    pub fn empty() -> Self {
        Self { thresholds: Vec::new(), requirements: Vec::new() }
    }

    pub fn levels(&self) -> usize {
        self.thresholds.len()
    }

    pub fn thresholds(&self) -> &[usize] {
        &self.thresholds
    }

    pub fn requirements(&self) -> &[usize] {
        &self.requirements
    }

    fn check_population(&self, n: usize) -> Result<()> {
        match self.thresholds.last() {
            Some(&k) if k > n => Err(Error::Param(format!("threshold {k} exceeds {n} generations"))),
            _ if n == 0 => Err(Error::Param("need at least one generation".into())),
            _ => Ok(()),
        }
    }
}

/// Groups a nonincreasing per-step requirement list into levels: each distinct
/// positive value, with the step index of its last occurrence. Zero
/// requirements are always met and are dropped.
pub fn condense(per_step: &[usize]) -> Result<CollectorProfile> {
    if let Some(i) = per_step.windows(2).position(|w| w[0] < w[1]) {
        return Err(Error::Param(format!(
            "requirements must not increase (step {} has {}, step {} has {})",
            i + 1,
            per_step[i],
            i + 2,
            per_step[i + 1]
        )));
    }
    let mut thresholds = Vec::new();
    let mut requirements = Vec::new();
    for (i, &m) in per_step.iter().enumerate() {
        if m == 0 {
            break;
        }
        if per_step.get(i + 1) != Some(&m) {
            thresholds.push(i + 1);
            requirements.push(m);
        }
    }
    CollectorProfile::new(thresholds, requirements)
}

/// Probability that the profile is still unmet at Poissonized time `x`.
pub struct CollectionIntegrand<T> {
    n: usize,
    profile: CollectorProfile,
    ln_fact: Vec<T>,
}

impl<T: Real> CollectionIntegrand<T> {
    pub fn new(n: usize, profile: &CollectorProfile) -> Result<Self> {
        profile.check_population(n)?;
        let top = profile.requirements.first().copied().unwrap_or(0).max(n);
        Ok(Self { n, profile: profile.clone(), ln_fact: ln_factorial_table(top + 1) })
    }

    pub fn eval(&self, x: T) -> T {
        self.eval_with_work(x).0
    }

    /// Also returns the number of binomial terms summed.
    pub fn eval_with_work(&self, x: T) -> (T, u64) {
        let levels = self.profile.levels();
        if levels == 0 {
            return (T::zero(), 0);
        }
        let n = self.n;
        let k = &self.profile.thresholds;
        let m = &self.profile.requirements;
        let band = |hi: usize, lo: usize| band_with(hi, lo, x, |i| self.ln_fact[i]);

        // φ_{j,w} is stored scaled as ψ_{j,w} = φ_{j,w} / s_j^w, where s_j is
        // the probability of landing in bands 0..=j; the binomial weights then
        // become a binomial pmf and every intermediate stays in [0, 1].
        let mut s = band(UNBOUNDED, m[0]);
        let mut psi = vec![T::zero(); n + 1];
        if s > T::zero() {
            psi[k[0]..=n].iter_mut().for_each(|v| *v = T::one());
        }
        let mut next = vec![T::zero(); n + 1];
        let mut work = 0u64;
        for j in 1..=levels {
            let lower = if j < levels { m[j] } else { 0 };
            let p = band(m[j - 1], lower);
            let s_prev = s;
            s = s_prev + p;
            let from = k[j - 1];
            let until = if j < levels { k[j] } else { n };
            next.iter_mut().for_each(|v| *v = T::zero());
            if s > T::zero() && s_prev > T::zero() {
                let ln_a = (p / s).ln();
                let ln_b = (s_prev / s).ln();
                for kk in until..=n {
                    let mut acc = T::zero();
                    for w in from..=kk {
                        if psi[w] == T::zero() {
                            continue;
                        }
                        let mut ln_w = self.ln_fact[kk] - self.ln_fact[w] - self.ln_fact[kk - w] + T::of(w) * ln_b;
                        if kk > w {
                            ln_w = ln_w + T::of(kk - w) * ln_a;
                        }
                        acc = acc + ln_w.exp() * psi[w];
                    }
                    work += (kk + 1 - from) as u64;
                    next[kk] = acc;
                }
            }
            std::mem::swap(&mut psi, &mut next);
        }
        let phi = s.powi(n as i32) * psi[n];
        let value = T::one() - phi;
        let slack = T::lit(OVERSHOOT).max(T::epsilon() * T::lit(64.0));
        assert!(
            value >= -slack && value <= T::one() + slack,
            "collection integrand left [0, 1] at x = {x}: {value}"
        );
        (value.max(T::zero()).min(T::one()), work)
    }

    /// Smallest point of a geometric scan where the integrand drops below 1e-12.
    pub fn truncation_point(&self) -> Result<T> {
        let mut x = T::one();
        let limit = T::lit(1e9);
        while self.eval(x) >= T::lit(TAIL_CUTOFF) {
            x = x * T::lit(1.25);
            if x > limit {
                return Err(Error::Domain("collection integrand does not decay".into()));
            }
        }
        Ok(x)
    }
}

/// `1 - φ_{A,n}(x)`.
pub fn integrand<T: Real>(n: usize, profile: &CollectorProfile, x: T) -> Result<T> {
    if x < T::zero() || x.is_nan() {
        return Err(Error::Domain(format!("integrand needs x >= 0, got {x}")));
    }
    Ok(CollectionIntegrand::new(n, profile)?.eval(x))
}

/// Expected number of uniform draws over `n` generations until the profile is met.
pub fn expected_collection<T: Real>(n: usize, profile: &CollectorProfile) -> Result<T> {
    let f = CollectionIntegrand::<T>::new(n, profile)?;
    if profile.levels() == 0 {
        return Ok(T::zero());
    }
    let upper = f.truncation_point()?;
    let tol = T::lit(REL_TOL).max(T::epsilon() * T::lit(100.0));
    let integral = integrate(|x| f.eval(x), T::zero(), upper, tol);
    Ok(T::of(n) * integral.value)
}
