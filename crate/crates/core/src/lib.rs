//! Performance evaluation of full-duplex cellular networks with sectorized
//! antennas and passive loop-interference suppression.
//!
//! Two independent engines compute the same metrics:
//!
//! * [`analytic`] evaluates the outage and average-rate integrals with the
//!   adaptive quadrature in [`numerics`];
//! * [`montecarlo`] samples the Poisson network directly and estimates the
//!   same quantities with standard errors.
//!
//! Agreement between the two is the main correctness check of the crate.

pub mod analytic;
pub mod error;
pub mod estimate;
pub mod model;
pub mod montecarlo;
pub mod numerics;

pub use error::{Error, Result};
pub use estimate::{rate_threshold, Method, MetricEstimate, OutageQuery};
pub use model::{
    antenna_gains, db_to_linear, li_angle_model, linear_to_db, passive_suppression_fraction,
    thinning_table, AntennaPattern, LiAngleModel, Link, NetworkParams, Node, Suppression,
    ThinningCase, ThinningTable,
};
pub use montecarlo::{Architecture, NearestBsMode, SimConfig};
pub use numerics::{integrate_finite, integrate_semi_infinite, Quadrature, QuadratureSpec};
