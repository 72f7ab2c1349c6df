use rayon::prelude::*;

use super::trial::{TrialContext, TrialOutcome};
use super::{Architecture, SimConfig, TrialStreams};
use crate::error::{domain, Result};
use crate::estimate::{rate_threshold, Method, MetricEstimate};
use crate::model::{Link, NetworkParams};

/// Per-trial outcomes of one link, kept so that outage at several rates or
/// loop-interference levels can be read off a single simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSamples {
    pub link: Link,
    pub sim: SimConfig,
    /// Outcomes in trial-index order.
    pub outcomes: Vec<TrialOutcome>,
    sigma_l2: f64,
}

/// Runs `sim.trials` independent trials of `link`.
pub fn simulate_link(link: Link, params: &NetworkParams, sim: &SimConfig) -> Result<LinkSamples> {
    let ctx = TrialContext::new(params, sim)?;
    let outcomes = (0..sim.trials)
        .into_par_iter()
        .map(|i| ctx.run(link, None, &TrialStreams::new(sim.seed, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LinkSamples {
        link,
        sim: *sim,
        outcomes,
        sigma_l2: params.sigma_l2,
    })
}

impl LinkSamples {
    /// Fraction of trials with `log2(1 + SINR) < rate`.
    pub fn outage(&self, rate: f64) -> Result<MetricEstimate> {
        self.outage_with_sigma_l2(rate, self.sigma_l2)
    }

    /// Outage with the loop channel variance replaced by `sigma_l2`; every
    /// other draw is shared with the original run.
    pub fn outage_with_sigma_l2(&self, rate: f64, sigma_l2: f64) -> Result<MetricEstimate> {
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(domain("rate", format!("target rate must be >= 0, got {rate}")));
        }
        if !(sigma_l2.is_finite() && sigma_l2 >= 0.0) {
            return Err(domain("sigma_l2", format!("must be finite and >= 0, got {sigma_l2}")));
        }
        let threshold = rate_threshold(rate);
        let failures = self
            .outcomes
            .iter()
            .filter(|o| o.sinr_with_sigma_l2(sigma_l2) < threshold)
            .count();
        let n = self.outcomes.len() as f64;
        let p = failures as f64 / n;
        Ok(self
            .estimate(p, (p * (1.0 - p) / n).sqrt())
            .with_meta("rate", rate)
            .with_meta("sigma_l2", sigma_l2))
    }

    /// Mean of `log2(1 + SINR)` with its standard error.
    pub fn mean_rate(&self) -> MetricEstimate {
        let rates: Vec<f64> = self.outcomes.iter().map(TrialOutcome::rate).collect();
        let (mean, se) = mean_and_stderr(&rates);
        self.estimate(mean, se)
    }

    fn estimate(&self, value: f64, uncertainty: f64) -> MetricEstimate {
        MetricEstimate::new(value, Method::MonteCarlo, uncertainty)
            .with_meta("link", self.link)
            .with_meta("arch", self.sim.architecture)
            .with_meta("trials", self.outcomes.len())
            .with_meta("seed", self.sim.seed)
            .with_meta("suppression", self.sim.suppression)
            .with_meta("nearest_bs_mode", self.sim.nearest_bs_mode)
    }
}

/// Sequential sum in trial order, so the result does not depend on scheduling.
fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let ss = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0) / n).sqrt())
}

/// Simulated outage probability of `link` at target rate `rate`.
pub fn estimate_outage(
    arch: Architecture,
    link: Link,
    rate: f64,
    params: &NetworkParams,
    sim: &SimConfig,
) -> Result<MetricEstimate> {
    let sim = sim.with_architecture(arch);
    simulate_link(link, params, &sim)?.outage(rate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SumRateEstimate {
    pub uplink: MetricEstimate,
    pub downlink: MetricEstimate,
    /// Mean of the paired per-trial sums; its standard error accounts for
    /// the pairing.
    pub total: MetricEstimate,
}

/// Simulated `E[log2(1 + SINR_u)] + E[log2(1 + SINR_d)]`.
pub fn estimate_sum_rate(
    arch: Architecture,
    params: &NetworkParams,
    sim: &SimConfig,
) -> Result<SumRateEstimate> {
    let sim = sim.with_architecture(arch);
    let up = simulate_link(Link::Uplink, params, &sim)?;
    let down = simulate_link(Link::Downlink, params, &sim)?;
    let sums: Vec<f64> = up
        .outcomes
        .iter()
        .zip(&down.outcomes)
        .map(|(u, d)| u.rate() + d.rate())
        .collect();
    let (mean, se) = mean_and_stderr(&sums);
    let total = MetricEstimate::new(mean, Method::MonteCarlo, se)
        .with_meta("arch", arch)
        .with_meta("trials", sim.trials)
        .with_meta("seed", sim.seed)
        .with_meta("suppression", sim.suppression)
        .with_meta("nearest_bs_mode", sim.nearest_bs_mode);
    Ok(SumRateEstimate {
        uplink: up.mean_rate(),
        downlink: down.mean_rate(),
        total,
    })
}
