//! Direct simulation of the marked Poisson network.
//!
//! Each trial places a typical receiver at the origin, draws its serving link
//! and the interfering users and BSs out to a finite window, marks every
//! interferer with an orientation case and a Rayleigh fading power, and
//! records the resulting signal and interference components. Trials draw
//! from counter-based streams keyed by `(seed, trial index)`, so results do
//! not depend on how trials are scheduled across threads.

mod estimate;
mod sampling;
mod trial;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::Suppression;

pub use estimate::{
    estimate_outage, estimate_sum_rate, simulate_link, LinkSamples, SumRateEstimate,
};
pub use sampling::{draw_li_term, sample_nearest_distance, sample_ppp, Point, TrialStreams};
pub use trial::{
    downlink_sinr_trial, two_node_sinr_trial, uplink_sinr_trial, Interferer, LiFixture,
    TrialFixture, TrialOutcome,
};

/// Which nodes operate in full duplex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Architecture {
    /// Both the BS and its single user are full duplex.
    TwoNode,
    /// A full-duplex BS serves one half-duplex uplink and one half-duplex
    /// downlink user.
    #[default]
    ThreeNode,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::TwoNode => "two-node",
            Architecture::ThreeNode => "three-node",
        })
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two-node" => Ok(Architecture::TwoNode),
            "three-node" => Ok(Architecture::ThreeNode),
            other => Err(domain("arch", format!("expected two-node|three-node, got `{other}`"))),
        }
    }
}

/// Which other BSs interfere at the uplink BS (and, in the two-node
/// downlink, which other users interfere at the user).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum NearestBsMode {
    /// Only nodes strictly farther than the nearest one interfere; the
    /// nearest defines the exclusion radius.
    #[default]
    BeyondNearest,
    /// Every other node interferes.
    AllOther,
}

impl fmt::Display for NearestBsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NearestBsMode::BeyondNearest => "beyond-nearest",
            NearestBsMode::AllOther => "all-other",
        })
    }
}

impl FromStr for NearestBsMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "beyond-nearest" => Ok(NearestBsMode::BeyondNearest),
            "all-other" => Ok(NearestBsMode::AllOther),
            other => Err(domain(
                "nearest_bs_mode",
                format!("expected beyond-nearest|all-other, got `{other}`"),
            )),
        }
    }
}

/// Simulation controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Radius of the sampling disk. `None` uses `20 / sqrt(pi lambda)`.
    pub window_radius: Option<f64>,
    pub trials: u64,
    pub seed: u64,
    pub architecture: Architecture,
    pub suppression: Suppression,
    pub nearest_bs_mode: NearestBsMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            window_radius: None,
            trials: 100_000,
            seed: 1,
            architecture: Architecture::ThreeNode,
            suppression: Suppression::On,
            nearest_bs_mode: NearestBsMode::BeyondNearest,
        }
    }
}

impl SimConfig {
    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_architecture(mut self, architecture: Architecture) -> Self {
        self.architecture = architecture;
        self
    }

    pub fn with_suppression(mut self, suppression: Suppression) -> Self {
        self.suppression = suppression;
        self
    }

    pub fn with_window_radius(mut self, radius: f64) -> Self {
        self.window_radius = Some(radius);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(domain("trials", "need at least one trial"));
        }
        if let Some(w) = self.window_radius {
            if !(w.is_finite() && w > 0.0) {
                return Err(domain("window_radius", format!("must be > 0, got {w}")));
            }
        }
        Ok(())
    }

    /// Window radius in effect at density `lambda`.
    pub fn window(&self, lambda: f64) -> f64 {
        self.window_radius
            .unwrap_or_else(|| default_window_radius(lambda))
    }
}

/// `20 / sqrt(pi lambda)`: the disk holds about 400 points of each process.
pub fn default_window_radius(lambda: f64) -> f64 {
    20.0 / (std::f64::consts::PI * lambda).sqrt()
}
