//! Shared inputs for the benchmarks.

use fdcell_core::{Link, NetworkParams, OutageQuery, Suppression};

/// Reference network with residual loop interference at -20 dB.
pub fn reference_params() -> NetworkParams {
    NetworkParams::default().with_sigma_l2(1e-2)
}

pub fn reference_query(link: Link) -> OutageQuery {
    OutageQuery::new(0.1, reference_params(), Suppression::On, link)
}
