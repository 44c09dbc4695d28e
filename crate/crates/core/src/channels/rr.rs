use super::config::{ChannelConfig, Mechanism, PrivatizedRecord};
use crate::domain::RngStream;
use crate::error::{Error, Result};

/// Probability that randomized response keeps a bit: e^{ε/2}/(1+e^{ε/2}).
pub fn rr_keep_probability(epsilon: f64) -> f64 {
    // logistic(ε/2), written to stay accurate for large ε
    1.0 / (1.0 + (-epsilon / 2.0).exp())
}

/// Randomized response on the one-hot encoding of category `x ∈ {1..d}`:
/// each bit is kept with probability e^{ε/2}/(1+e^{ε/2}) and flipped otherwise.
pub fn randomized_response(x: usize, cfg: &ChannelConfig, rng: &mut RngStream) -> Result<PrivatizedRecord> {
    cfg.expect(Mechanism::RandomizedResponse)?;
    let d = cfg.dims;
    if x == 0 || x > d {
        return Err(Error::OutOfRange(format!("category {x} not in 1..={d}")));
    }
    let keep = rr_keep_probability(cfg.eps());
    let payload = (1..=d)
        .map(|j| {
            let bit = j == x;
            let out = if rng.bernoulli(keep) { bit } else { !bit };
            if out {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    Ok(PrivatizedRecord {
        mechanism: Mechanism::RandomizedResponse,
        epsilon: cfg.eps(),
        payload,
        amplitude: None,
    })
}
