//! Mean-value throughput predictor.
//!
//! 1. overlap `Ω(s-1)` for each decoding step `s = 1..n`;
//! 2. requirement `m'_s = ceil(η(Ω(s-1)))`;
//! 3. condense the requirements into collector levels;
//! 4. expected draws until all levels are met.

use serde::Serialize;

use super::collector::{condense, expected_collection, CollectorProfile};
use super::eta::eta;
use super::overlap::OverlapProfile;
use crate::error::{Error, Result};
use crate::layout::CodeParams;
use crate::num::Real;

// keeps an analytically integral value such as 25 + 1e-12 from rounding up
const CEIL_NUDGE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Prediction<T> {
    pub expected_packets: T,
    pub overlap: Vec<T>,
    pub requirements: Vec<usize>,
    pub profile: CollectorProfile,
}

/// Step 2: per-step requirements from an overlap profile; must come out nonincreasing.
pub fn requirements<T: Real>(generation_size: usize, field_size: u32, overlap: &[T]) -> Result<Vec<usize>> {
    let q = T::from_u32(field_size).expect("field size fits");
    let req: Vec<usize> = overlap
        .iter()
        .map(|&w| {
            let v = (eta(generation_size, w, q) - T::lit(CEIL_NUDGE)).ceil().max(T::zero());
            v.to_usize().expect("finite requirement")
        })
        .collect();
    if let Some(i) = req.windows(2).position(|w| w[0] < w[1]) {
        return Err(Error::Domain(format!(
            "requirements increase at step {}: {} -> {} (overlap profile not monotone)",
            i + 1,
            req[i],
            req[i + 1]
        )));
    }
    Ok(req)
}

/// Steps 2 to 4 for an arbitrary overlap profile `Ω(0..n-1)`.
pub fn predict_from_overlap<T: Real>(generation_size: usize, field_size: u32, overlap: &[T]) -> Result<Prediction<T>> {
    let req = requirements(generation_size, field_size, overlap)?;
    let profile = condense(&req)?;
    let expected_packets = expected_collection(overlap.len(), &profile)?;
    Ok(Prediction { expected_packets, overlap: overlap.to_vec(), requirements: req, profile })
}

/// Full pipeline for the random annex ensemble.
pub fn predict<T: Real>(params: &CodeParams) -> Result<Prediction<T>> {
    params.validate()?;
    let profile = OverlapProfile::<T>::random_annex(*params);
    predict_from_overlap(params.generation_size(), params.field_size, &profile.omega)
}

pub fn predict_expected_packets<T: Real>(params: &CodeParams) -> Result<T> {
    Ok(predict::<T>(params)?.expected_packets)
}
