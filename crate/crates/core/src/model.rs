//! Network parameters, the sectorized antenna model, interference thinning and
//! the loop-interference angle model.
//!
//! All quantities here are linear. Conversion from decibels happens at the
//! edges of the program through [`db_to_linear`].

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// The two kinds of node in the network.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Node {
    Bs,
    User,
}

/// Direction of a cellular link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Link {
    /// User to base station; received at the full-duplex BS.
    Uplink,
    /// Base station to user.
    Downlink,
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Link::Uplink => "uplink",
            Link::Downlink => "downlink",
        })
    }
}

impl FromStr for Link {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uplink" => Ok(Link::Uplink),
            "downlink" => Ok(Link::Downlink),
            other => Err(domain("link", format!("expected uplink|downlink, got `{other}`"))),
        }
    }
}

/// How the BS's own transmission couples back into its receive antenna.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suppression {
    /// Transmit and receive antennas are separated by the grid angle and the
    /// angle-dependent passive suppression fraction is applied.
    On,
    /// No passive suppression: the loop channel sees both antennas at
    /// boresight (main-lobe gain squared, no angular attenuation). This is
    /// the situation of a bidirectional node whose antennas share a direction.
    Off,
    /// Antennas are separated by the grid angle, so non-zero angles see the
    /// side-lobe gain, but no angular suppression fraction is applied.
    SideLobeOnly,
}

impl fmt::Display for Suppression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suppression::On => "on",
            Suppression::Off => "off",
            Suppression::SideLobeOnly => "side-lobe-only",
        })
    }
}

impl FromStr for Suppression {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "on" => Ok(Suppression::On),
            "off" => Ok(Suppression::Off),
            "side-lobe-only" => Ok(Suppression::SideLobeOnly),
            other => Err(domain(
                "suppression",
                format!("expected on|off|side-lobe-only, got `{other}`"),
            )),
        }
    }
}

/// Physical and model parameters of the network.
///
/// `Default` gives the reference configuration: density 1e-2, unit fading
/// rate and powers, path-loss exponents 4, no thermal noise, 4 sectors with
/// side-lobe ratio 0.2 on both node types and residual loop interference of
/// -30 dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// Density of both the BS and the user process, per unit area.
    pub lambda: f64,
    /// Rate of the exponential channel power (mean `1 / mu`).
    pub mu: f64,
    pub p_b: f64,
    pub p_u: f64,
    /// Path-loss exponent of BS-user channels.
    pub alpha1: f64,
    /// Path-loss exponent of BS-BS and user-user channels.
    pub alpha2: f64,
    pub sigma_n2: f64,
    /// Variance of the residual loop-interference channel.
    pub sigma_l2: f64,
    pub m_b: u32,
    pub m_u: u32,
    pub gamma_b: f64,
    pub gamma_u: f64,
}

impl Default for NetworkParams {
    fn default() -> Self {
        NetworkParams {
            lambda: 1e-2,
            mu: 1.0,
            p_b: 1.0,
            p_u: 1.0,
            alpha1: 4.0,
            alpha2: 4.0,
            sigma_n2: 0.0,
            sigma_l2: 1e-3,
            m_b: 4,
            m_u: 4,
            gamma_b: 0.2,
            gamma_u: 0.2,
        }
    }
}

impl NetworkParams {
    /// Sets both sector counts.
    pub fn with_sectors(mut self, m: u32) -> Self {
        self.m_b = m;
        self.m_u = m;
        self
    }

    /// Sets both side-lobe ratios.
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma_b = gamma;
        self.gamma_u = gamma;
        self
    }

    pub fn with_sigma_l2(mut self, sigma_l2: f64) -> Self {
        self.sigma_l2 = sigma_l2;
        self
    }

    pub fn validate(&self) -> Result<()> {
        positive("lambda", self.lambda)?;
        positive("mu", self.mu)?;
        positive("p_b", self.p_b)?;
        positive("p_u", self.p_u)?;
        for (field, alpha) in [("alpha1", self.alpha1), ("alpha2", self.alpha2)] {
            if !(alpha.is_finite() && alpha > 2.0) {
                return Err(domain(field, format!("path-loss exponent must be > 2, got {alpha}")));
            }
        }
        non_negative("sigma_n2", self.sigma_n2)?;
        non_negative("sigma_l2", self.sigma_l2)?;
        sector_count("m_b", self.m_b)?;
        sector_count("m_u", self.m_u)?;
        ratio("gamma_b", self.gamma_b)?;
        ratio("gamma_u", self.gamma_u)?;
        Ok(())
    }

    pub fn power(&self, node: Node) -> f64 {
        match node {
            Node::Bs => self.p_b,
            Node::User => self.p_u,
        }
    }

    pub fn antenna(&self, node: Node) -> Result<AntennaPattern> {
        match node {
            Node::Bs => AntennaPattern::new(self.m_b, self.gamma_b),
            Node::User => AntennaPattern::new(self.m_u, self.gamma_u),
        }
    }

    /// Thinning table for interference received at `rx` from transmitters of
    /// kind `tx`.
    pub fn thinning(&self, rx: Node, tx: Node) -> Result<ThinningTable> {
        thinning_table(self.lambda, &self.antenna(tx)?, &self.antenna(rx)?)
    }
}

fn positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(domain(field, format!("must be a finite positive number, got {v}")))
    }
}

fn non_negative(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(domain(field, format!("must be finite and >= 0, got {v}")))
    }
}

fn sector_count(field: &'static str, m: u32) -> Result<()> {
    if m >= 1 {
        Ok(())
    } else {
        Err(domain(field, "sector count must be at least 1"))
    }
}

fn ratio(field: &'static str, gamma: f64) -> Result<()> {
    if (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(domain(field, format!("side-lobe ratio must lie in [0, 1], got {gamma}")))
    }
}

/// Circular-sector antenna with `m` sectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    m: u32,
    gamma: f64,
    g: f64,
    h: f64,
}

impl AntennaPattern {
    /// Main-lobe gain `m / (1 + gamma (m - 1))`, side-lobe gain `gamma` times that.
    pub fn new(m: u32, gamma: f64) -> Result<Self> {
        sector_count("m", m)?;
        ratio("gamma", gamma)?;
        let mf = f64::from(m);
        let g = if m == 1 { 1.0 } else { mf / (1.0 + gamma * (mf - 1.0)) };
        Ok(AntennaPattern {
            m,
            gamma,
            g,
            h: gamma * g,
        })
    }

    pub fn sectors(&self) -> u32 {
        self.m
    }

    pub fn side_lobe_ratio(&self) -> f64 {
        self.gamma
    }

    pub fn main_lobe(&self) -> f64 {
        self.g
    }

    pub fn side_lobe(&self) -> f64 {
        self.h
    }
}

/// Convenience wrapper around [`AntennaPattern::new`].
pub fn antenna_gains(m: u32, gamma: f64) -> Result<AntennaPattern> {
    AntennaPattern::new(m, gamma)
}

/// One orientation case of an interfering link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThinningCase {
    pub density: f64,
    pub gain: f64,
}

/// Split of an interfering process into the four orientation cases.
///
/// Index 0 holds case 1 (transmitter pointing at the receiver, inside the
/// receiver's main sector) through index 3 for case 4 (pointing away, outside
/// the main sector). With receiver side `i` and transmitter side `j`:
///
/// | case | density                    | gain     |
/// |------|----------------------------|----------|
/// | 1    | λ / (MiMj)                 | Gi Gj    |
/// | 2    | λ (Mj - 1) / (MiMj)        | Gi Hj    |
/// | 3    | λ (Mi - 1) / (MiMj)        | Gj Hi    |
/// | 4    | λ (Mi - 1)(Mj - 1) / (MiMj)| Hi Hj    |
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThinningTable {
    cases: [ThinningCase; 4],
    lambda: f64,
}

impl ThinningTable {
    pub fn cases(&self) -> &[ThinningCase; 4] {
        &self.cases
    }

    /// Density of the unthinned process.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Sum of the case densities, added in case order. Equal to `lambda()`.
    pub fn total_density(&self) -> f64 {
        self.cases.iter().map(|c| c.density).sum()
    }

    /// Gain of the strongest orientation (case 1).
    pub fn boresight_gain(&self) -> f64 {
        self.cases[0].gain
    }
}

/// Builds the orientation split for interference at `rx` from `tx`.
pub fn thinning_table(
    lambda: f64,
    tx: &AntennaPattern,
    rx: &AntennaPattern,
) -> Result<ThinningTable> {
    positive("lambda", lambda)?;
    let mi = f64::from(rx.m);
    let mj = f64::from(tx.m);
    let mm = mi * mj;
    let mut densities = [
        lambda / mm,
        lambda * (mj - 1.0) / mm,
        lambda * (mi - 1.0) / mm,
        lambda * (mi - 1.0) * (mj - 1.0) / mm,
    ];
    conserve_total(&mut densities, lambda);
    let gains = [rx.g * tx.g, rx.g * tx.h, tx.g * rx.h, rx.h * tx.h];
    let mut cases = [ThinningCase {
        density: 0.0,
        gain: 0.0,
    }; 4];
    for (case, (density, gain)) in cases.iter_mut().zip(densities.into_iter().zip(gains)) {
        *case = ThinningCase { density, gain };
    }
    Ok(ThinningTable { cases, lambda })
}

/// Recomputes the largest entry by subtraction and nudges it until the
/// in-order sum reproduces `total` bit for bit.
///
/// A rounding tie can make every candidate for the largest entry miss
/// `total`; the next largest entry is then moved by one ulp and the search
/// repeated.
fn conserve_total(values: &mut [f64; 4], total: f64) {
    let slack = (0..4)
        .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    for _ in 0..8 {
        let others: f64 = (0..4).filter(|&k| k != slack).map(|k| values[k]).sum();
        values[slack] = total - others;
        let mut last_direction = 0i8;
        for _ in 0..16 {
            let sum: f64 = values.iter().sum();
            if sum == total {
                return;
            }
            let direction = if sum > total { -1 } else { 1 };
            if direction == -last_direction {
                break;
            }
            last_direction = direction;
            values[slack] = if direction < 0 {
                values[slack].next_down()
            } else {
                values[slack].next_up()
            };
        }
        let Some(nudge) = (0..4)
            .filter(|&k| k != slack && values[k] > 0.0)
            .max_by(|&a, &b| values[a].total_cmp(&values[b]))
        else {
            break;
        };
        values[nudge] = values[nudge].next_up();
    }
    debug_assert!(false, "thinning densities failed to reproduce lambda");
}

/// Fraction of the loop interference left after passive suppression at
/// antenna separation `theta`: `exp(-cos(|theta| - 2 pi / 3) - 1/2)`.
///
/// `theta` must lie in `[-pi, pi)`; callers are expected to wrap angles.
pub fn passive_suppression_fraction(theta: f64) -> Result<f64> {
    if !(-PI..PI).contains(&theta) {
        return Err(domain("theta", format!("angle must lie in [-pi, pi), got {theta}")));
    }
    Ok((-(theta.abs() - 2.0 * PI / 3.0).cos() - 0.5).exp())
}

/// Distribution of the angle between the BS's transmit and receive antennas.
///
/// The grid holds the `m_b` multiples of `2 pi / m_b` folded into
/// `[-pi, pi)`, in ascending order; each has probability `1 / m_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiAngleModel {
    grid: Vec<f64>,
    zero_index: usize,
}

impl LiAngleModel {
    pub fn new(m_b: u32) -> Result<Self> {
        sector_count("m_b", m_b)?;
        let m = i64::from(m_b);
        let lo = -(m / 2);
        let hi = (m + 1) / 2;
        let grid = (lo..hi)
            .map(|k| PI * ((2 * k) as f64 / m as f64))
            .collect::<Vec<_>>();
        Ok(LiAngleModel {
            grid,
            zero_index: (-lo) as usize,
        })
    }

    pub fn angles(&self) -> &[f64] {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Index of the zero angle in [`angles`](Self::angles).
    pub fn zero_index(&self) -> usize {
        self.zero_index
    }

    /// Probability of each grid angle.
    pub fn probability(&self) -> f64 {
        1.0 / self.grid.len() as f64
    }

    /// Loop-channel power gain at grid position `index` (before the LI fading
    /// and transmit power).
    pub fn li_gain(&self, index: usize, bs: &AntennaPattern, suppression: Suppression) -> f64 {
        let g = bs.main_lobe();
        if index == self.zero_index || suppression == Suppression::Off {
            return g * g;
        }
        let side = g * bs.side_lobe();
        match suppression {
            Suppression::On => {
                // Grid angles are in range by construction.
                side * passive_suppression_fraction(self.grid[index]).unwrap_or(1.0)
            }
            _ => side,
        }
    }

    /// Mean of [`li_gain`](Self::li_gain) over the grid.
    pub fn mean_li_gain(&self, bs: &AntennaPattern, suppression: Suppression) -> f64 {
        (0..self.len())
            .map(|i| self.li_gain(i, bs, suppression))
            .sum::<f64>()
            * self.probability()
    }
}

pub fn li_angle_model(m_b: u32) -> Result<LiAngleModel> {
    LiAngleModel::new(m_b)
}

/// `10^(x / 10)`.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `10 log10(x)`. Zero maps to negative infinity, negative inputs to NaN.
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}
