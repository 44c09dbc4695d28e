//! Reconstruction of multinomial parameters and densities from privatized
//! records, plus the non-private baselines.
//!
//! Every estimator also exposes a `*_from_sums` form taking the coordinate
//! sums of the payloads; the record-based functions validate the records and
//! delegate to it, and Monte Carlo code that draws the sums directly uses it.

mod density;
mod multinomial;

pub use density::{
    classical_histogram_estimate, classical_series_estimate, histogram_density_estimate,
    histogram_from_sums, naive_series_density_estimate, series_density_estimate, series_from_sums,
};
pub use multinomial::{
    laplace_multinomial_estimate, laplace_multinomial_partial, laplace_partial_from_sums,
    mle_multinomial_estimate, rr_multinomial_estimate, rr_multinomial_partial, rr_partial_from_sums,
};

use crate::channels::{Mechanism, PrivatizedRecord};
use crate::error::{Error, Result};

/// Checks that all records come from `mechanism` with `dims` coordinates and a
/// common ε, and returns (n, ε, payload sums).
pub(crate) fn summarize(records: &[PrivatizedRecord], mechanism: Mechanism, dims: usize) -> Result<(usize, f64, Vec<f64>)> {
    let first = records
        .first()
        .ok_or_else(|| Error::InsufficientData("no records to estimate from".into()))?;
    let eps = first.epsilon;
    let mut sums = vec![0.0; dims];
    for (i, r) in records.iter().enumerate() {
        if r.mechanism != mechanism {
            return Err(Error::MixedRecords(format!(
                "record {i} comes from {}, expected {mechanism}",
                r.mechanism
            )));
        }
        if r.payload.len() != dims {
            return Err(Error::MixedRecords(format!(
                "record {i} has {} coordinates, expected {dims}",
                r.payload.len()
            )));
        }
        if r.epsilon != eps {
            return Err(Error::MixedRecords(format!(
                "record {i} has epsilon {}, record 0 has {eps}",
                r.epsilon
            )));
        }
        sums.iter_mut().zip(&r.payload).for_each(|(s, z)| *s += z);
    }
    Ok((records.len(), eps, sums))
}
