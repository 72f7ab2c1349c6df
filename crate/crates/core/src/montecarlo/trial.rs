use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::sampling::{draw_li, uniform_open, CaseMarker, LiDraw, RadialPpp, Substream};
use super::{Architecture, NearestBsMode, SimConfig, TrialStreams};
use crate::error::{domain, Error, Result};
use crate::model::{Link, LiAngleModel, NetworkParams, Node};
use crate::montecarlo::sampling::sample_nearest_distance;

/// Interferer injected by a [`TrialFixture`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interferer {
    pub distance: f64,
    /// Orientation case, 1 to 4.
    pub case: usize,
    /// Channel power of the interfering link.
    pub fading: f64,
}

/// Injected loop-interference draw.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiFixture {
    /// Position in the BS's antenna-angle grid (see [`LiAngleModel`]).
    pub index: usize,
    /// Unit-mean fading multiplier; the loop channel power is
    /// `sigma_l2 * fading`.
    pub fading: f64,
}

/// Overrides for the random draws of a single trial. Unset fields are drawn
/// as usual; interferer lists, when given, replace the sampled process
/// entirely (no exclusion is applied to them).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialFixture {
    pub distance: Option<f64>,
    pub fading: Option<f64>,
    /// Uplink users (at a BS) or uplink users seen by a downlink user.
    pub users: Option<Vec<Interferer>>,
    pub bss: Option<Vec<Interferer>>,
    pub li: Option<LiFixture>,
}

impl TrialFixture {
    /// Fixture with empty interferer sets and no loop-interference fading.
    pub fn isolated(distance: f64, fading: f64) -> Self {
        TrialFixture {
            distance: Some(distance),
            fading: Some(fading),
            users: Some(Vec::new()),
            bss: Some(Vec::new()),
            li: Some(LiFixture {
                index: 0,
                fading: 0.0,
            }),
        }
    }

    pub fn validate(&self, params: &NetworkParams) -> Result<()> {
        if let Some(d) = self.distance {
            if !(d.is_finite() && d > 0.0) {
                return Err(domain("distance", format!("link distance must be > 0, got {d}")));
            }
        }
        if let Some(h) = self.fading {
            if !(h.is_finite() && h >= 0.0) {
                return Err(domain("fading", format!("fading must be >= 0, got {h}")));
            }
        }
        for list in [&self.users, &self.bss].into_iter().flatten() {
            for i in list {
                if !(i.distance.is_finite() && i.distance > 0.0) {
                    return Err(domain("distance", format!("interferer distance must be > 0, got {}", i.distance)));
                }
                if !(1..=4).contains(&i.case) {
                    return Err(domain("case", format!("orientation case must be 1..=4, got {}", i.case)));
                }
                if !(i.fading.is_finite() && i.fading >= 0.0) {
                    return Err(domain("fading", format!("fading must be >= 0, got {}", i.fading)));
                }
            }
        }
        if let Some(li) = self.li {
            if li.index >= params.m_b as usize {
                return Err(domain("li.index", format!("angle index {} outside grid of {}", li.index, params.m_b)));
            }
            if !(li.fading.is_finite() && li.fading >= 0.0) {
                return Err(domain("li.fading", format!("fading must be >= 0, got {}", li.fading)));
            }
        }
        Ok(())
    }
}

/// Received powers of one trial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub signal: f64,
    pub noise: f64,
    pub user_interference: f64,
    pub bs_interference: f64,
    pub loop_interference: f64,
    /// Loop interference per unit `sigma_l2`.
    pub li_unit: f64,
    /// Number of multiuser interferers in each orientation case.
    pub case_counts: [u32; 4],
}

impl TrialOutcome {
    pub fn sinr(&self) -> f64 {
        ratio(
            self.signal,
            self.noise + self.user_interference + self.bs_interference + self.loop_interference,
        )
    }

    /// SINR with the loop channel variance replaced by `sigma_l2`.
    pub fn sinr_with_sigma_l2(&self, sigma_l2: f64) -> f64 {
        ratio(
            self.signal,
            self.noise + self.user_interference + self.bs_interference + sigma_l2 * self.li_unit,
        )
    }

    /// `log2(1 + SINR)`.
    pub fn rate(&self) -> f64 {
        self.sinr().ln_1p() / std::f64::consts::LN_2
    }
}

fn ratio(signal: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        f64::INFINITY
    } else {
        signal / denominator
    }
}

fn path_loss(d: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        let d2 = d * d;
        1.0 / (d2 * d2)
    } else {
        d.powf(-alpha)
    }
}

/// Precomputed per-simulation quantities.
pub(crate) struct TrialContext {
    params: NetworkParams,
    window: f64,
    sim: SimConfig,
    g_b: f64,
    g_u: f64,
    bu: CaseMarker,
    bb: CaseMarker,
    ub: CaseMarker,
    uu: CaseMarker,
    /// Three-node LI gain per grid index under the configured suppression.
    li_gains: Vec<f64>,
}

impl TrialContext {
    pub(crate) fn new(params: &NetworkParams, sim: &SimConfig) -> Result<Self> {
        params.validate()?;
        sim.validate()?;
        let bs = params.antenna(Node::Bs)?;
        let user = params.antenna(Node::User)?;
        let grid = LiAngleModel::new(params.m_b)?;
        let li_gains = (0..grid.len())
            .map(|i| grid.li_gain(i, &bs, sim.suppression))
            .collect();
        Ok(TrialContext {
            params: params.clone(),
            window: sim.window(params.lambda),
            sim: *sim,
            g_b: bs.main_lobe(),
            g_u: user.main_lobe(),
            bu: CaseMarker::new(&params.thinning(Node::Bs, Node::User)?),
            bb: CaseMarker::new(&params.thinning(Node::Bs, Node::Bs)?),
            ub: CaseMarker::new(&params.thinning(Node::User, Node::Bs)?),
            uu: CaseMarker::new(&params.thinning(Node::User, Node::User)?),
            li_gains,
        })
    }

    pub(crate) fn run(
        &self,
        link: Link,
        fixture: Option<&TrialFixture>,
        streams: &TrialStreams,
    ) -> Result<TrialOutcome> {
        match (self.sim.architecture, link) {
            (Architecture::ThreeNode, Link::Uplink) => self.uplink(fixture, streams, false),
            (Architecture::ThreeNode, Link::Downlink) => self.downlink(fixture, streams, false),
            (Architecture::TwoNode, Link::Uplink) => self.uplink(fixture, streams, true),
            (Architecture::TwoNode, Link::Downlink) => self.downlink(fixture, streams, true),
        }
    }

    fn serving_link(
        &self,
        fixture: Option<&TrialFixture>,
        streams: &TrialStreams,
        sub: Substream,
    ) -> Result<(f64, f64)> {
        let mut rng = streams.rng(sub);
        let u = uniform_open(&mut rng);
        let h: f64 = rng.sample::<f64, _>(Exp1) / self.params.mu;
        let r = match fixture.and_then(|f| f.distance) {
            Some(d) => d,
            None => sample_nearest_distance(self.params.lambda, u)?,
        };
        if r > self.window {
            return Err(Error::Configuration(format!(
                "link distance {r} exceeds the sampling window {}",
                self.window
            )));
        }
        Ok((r, fixture.and_then(|f| f.fading).unwrap_or(h)))
    }

    /// Sum of `power * gain * fading * d^-alpha` over a marked PPP beyond
    /// `start`; with `skip_first` the nearest point only sets the exclusion
    /// radius.
    #[allow(clippy::too_many_arguments)]
    fn field(
        &self,
        injected: Option<&Vec<Interferer>>,
        marker: &CaseMarker,
        power: f64,
        alpha: f64,
        start: f64,
        skip_first: bool,
        streams: &TrialStreams,
        sub: Substream,
        counts: &mut [u32; 4],
    ) -> f64 {
        if let Some(list) = injected {
            return list
                .iter()
                .map(|i| {
                    counts[i.case - 1] += 1;
                    power * marker.gain(i.case - 1) * i.fading * path_loss(i.distance, alpha)
                })
                .sum();
        }
        let mu = self.params.mu;
        let mut rng = streams.rng(sub);
        let mut points = RadialPpp::new(self.params.lambda, start, self.window).iter(&mut rng);
        if skip_first && points.next().is_none() {
            return 0.0;
        }
        let mut total = 0.0;
        while let Some(d) = points.next() {
            let rng = points.rng();
            let case = marker.pick(rng.random());
            let fading: f64 = rng.sample::<f64, _>(Exp1) / mu;
            counts[case] += 1;
            total += power * marker.gain(case) * fading * path_loss(d, alpha);
        }
        total
    }

    fn li_draw(&self, fixture: Option<&TrialFixture>, streams: &TrialStreams, sub: Substream) -> LiDraw {
        let draw = draw_li(self.params.m_b, &mut streams.rng(sub));
        match fixture.and_then(|f| f.li) {
            Some(li) => LiDraw {
                index: li.index,
                fading: li.fading,
            },
            None => draw,
        }
    }

    fn uplink(&self, fixture: Option<&TrialFixture>, streams: &TrialStreams, two_node: bool) -> Result<TrialOutcome> {
        if let Some(f) = fixture {
            f.validate(&self.params)?;
        }
        let p = &self.params;
        let (r, h) = self.serving_link(fixture, streams, Substream::UplinkLink)?;
        let signal = p.p_u * self.g_b * self.g_u * h * path_loss(r, p.alpha1);
        let mut counts = [0; 4];
        let user_interference = self.field(
            fixture.and_then(|f| f.users.as_ref()),
            &self.bu,
            p.p_u,
            p.alpha1,
            r,
            false,
            streams,
            Substream::UplinkUsers,
            &mut counts,
        );
        let bs_interference = self.field(
            fixture.and_then(|f| f.bss.as_ref()),
            &self.bb,
            p.p_b,
            p.alpha2,
            0.0,
            self.sim.nearest_bs_mode == NearestBsMode::BeyondNearest,
            streams,
            Substream::UplinkBss,
            &mut counts,
        );
        let li = self.li_draw(fixture, streams, Substream::UplinkLi);
        // Two-node BSs cannot separate their antennas, so the loop channel
        // always couples main lobe to main lobe.
        let gain = if two_node {
            self.g_b * self.g_b
        } else {
            self.li_gains[li.index]
        };
        let li_unit = p.p_b * gain * li.fading;
        Ok(TrialOutcome {
            signal,
            noise: p.sigma_n2,
            user_interference,
            bs_interference,
            loop_interference: p.sigma_l2 * li_unit,
            li_unit,
            case_counts: counts,
        })
    }

    fn downlink(&self, fixture: Option<&TrialFixture>, streams: &TrialStreams, two_node: bool) -> Result<TrialOutcome> {
        if let Some(f) = fixture {
            f.validate(&self.params)?;
        }
        let p = &self.params;
        let (r, h) = self.serving_link(fixture, streams, Substream::DownlinkLink)?;
        let signal = p.p_b * self.g_b * self.g_u * h * path_loss(r, p.alpha1);
        let mut counts = [0; 4];
        let bs_interference = self.field(
            fixture.and_then(|f| f.bss.as_ref()),
            &self.ub,
            p.p_b,
            p.alpha1,
            r,
            false,
            streams,
            Substream::DownlinkBss,
            &mut counts,
        );
        // A half-duplex downlink user hears every uplink user, including the
        // one in its own cell. Other two-node users are treated like the
        // other BSs at an uplink BS.
        let skip_nearest = two_node && self.sim.nearest_bs_mode == NearestBsMode::BeyondNearest;
        let user_interference = self.field(
            fixture.and_then(|f| f.users.as_ref()),
            &self.uu,
            p.p_u,
            p.alpha2,
            0.0,
            skip_nearest,
            streams,
            Substream::DownlinkUsers,
            &mut counts,
        );
        let li_unit = if two_node {
            let li = self.li_draw(fixture, streams, Substream::DownlinkLi);
            p.p_u * self.g_u * self.g_u * li.fading
        } else {
            0.0
        };
        Ok(TrialOutcome {
            signal,
            noise: p.sigma_n2,
            user_interference,
            bs_interference,
            loop_interference: p.sigma_l2 * li_unit,
            li_unit,
            case_counts: counts,
        })
    }
}

/// One realization of the uplink at a three-node BS.
pub fn uplink_sinr_trial(
    params: &NetworkParams,
    sim: &SimConfig,
    fixture: Option<&TrialFixture>,
    streams: &TrialStreams,
) -> Result<TrialOutcome> {
    let sim = sim.with_architecture(Architecture::ThreeNode);
    TrialContext::new(params, &sim)?.run(Link::Uplink, fixture, streams)
}

/// One realization of the downlink at a half-duplex three-node user.
pub fn downlink_sinr_trial(
    params: &NetworkParams,
    sim: &SimConfig,
    fixture: Option<&TrialFixture>,
    streams: &TrialStreams,
) -> Result<TrialOutcome> {
    let sim = sim.with_architecture(Architecture::ThreeNode);
    TrialContext::new(params, &sim)?.run(Link::Downlink, fixture, streams)
}

/// One realization of either link of a two-node cell, where both ends are
/// full duplex and suffer unsuppressed loop interference.
pub fn two_node_sinr_trial(
    params: &NetworkParams,
    sim: &SimConfig,
    fixture: Option<&TrialFixture>,
    streams: &TrialStreams,
    link: Link,
) -> Result<TrialOutcome> {
    let sim = sim.with_architecture(Architecture::TwoNode);
    TrialContext::new(params, &sim)?.run(link, fixture, streams)
}
