//! ε-locally private channels: each call maps one raw sample to a
//! [`PrivatizedRecord`] using a caller-owned [`RngStream`].
//!
//! [`RngStream`]: crate::domain::RngStream

mod audit;
mod config;
mod constant;
mod halfspace;
mod laplace;
mod rr;

pub use audit::{audit_channel, default_audit_grid, AuditGrid, AuditReport, Witness, DEFAULT_ENUMERATION_CAP};
pub use config::{ChannelConfig, Mechanism, PrivatizedRecord};
pub use constant::{compute_ck, compute_ck_by_enumeration, ChannelConstant};
pub use halfspace::{halfspace_series_channel, halfspace_series_channel_rejection, HalfspaceSampler};
pub use laplace::{
    histogram_bin, laplace_histogram_channel, laplace_perturb, naive_laplace_series_channel,
    naive_series_rate, sample_laplace,
};
pub use rr::{randomized_response, rr_keep_probability};
