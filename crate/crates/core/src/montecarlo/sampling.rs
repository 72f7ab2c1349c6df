use std::f64::consts::PI;

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::error::{domain, Result};
use crate::model::{LiAngleModel, NetworkParams, Suppression, ThinningTable};

/// Independent random streams of one trial.
///
/// Stream `(seed, trial)` of ChaCha8 is split into word-offset substreams,
/// one per random component, so overriding one component (or changing how
/// many numbers another consumes) leaves the rest untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialStreams {
    seed: u64,
    trial: u64,
}

#[derive(Debug, Clone, Copy)]
pub(crate) enum Substream {
    UplinkLink = 0,
    UplinkUsers = 1,
    UplinkBss = 2,
    UplinkLi = 3,
    DownlinkLink = 4,
    DownlinkBss = 5,
    DownlinkUsers = 6,
    DownlinkLi = 7,
}

impl TrialStreams {
    pub fn new(seed: u64, trial: u64) -> Self {
        TrialStreams { seed, trial }
    }

    pub fn trial(&self) -> u64 {
        self.trial
    }

    pub(crate) fn rng(&self, sub: Substream) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.trial);
        rng.set_word_pos((sub as u128) << 40);
        rng
    }
}

/// Inverse CDF of the nearest-neighbour distance `2 pi lambda r exp(-lambda pi r^2)`.
pub fn sample_nearest_distance(lambda: f64, u: f64) -> Result<f64> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(domain("lambda", format!("density must be > 0, got {lambda}")));
    }
    if !(u > 0.0 && u < 1.0) {
        return Err(domain("u", format!("uniform draw must lie in (0, 1), got {u}")));
    }
    Ok((-u.ln() / (PI * lambda)).sqrt())
}

/// Point of a planar process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Homogeneous PPP of intensity `density` on the disk of radius
/// `window_radius` around the origin, ordered by distance.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, window_radius: f64, rng: &mut R) -> Result<Vec<Point>> {
    if !(density.is_finite() && density >= 0.0) {
        return Err(domain("density", format!("must be finite and >= 0, got {density}")));
    }
    if !(window_radius.is_finite() && window_radius >= 0.0) {
        return Err(domain("window_radius", format!("must be >= 0, got {window_radius}")));
    }
    if density == 0.0 {
        return Ok(Vec::new());
    }
    let mut points = Vec::new();
    let mut radii = RadialPpp::new(density, 0.0, window_radius).iter(rng);
    while let Some(r) = radii.next() {
        let phi = 2.0 * PI * radii.rng().random::<f64>();
        points.push(Point {
            x: r * phi.cos(),
            y: r * phi.sin(),
        });
    }
    Ok(points)
}

/// Distances of PPP points beyond `start`, generated outward: successive
/// squared radii differ by independent `Exp(pi density)` steps. Truncating at
/// a larger window only appends points, so windows of different sizes share
/// their inner points.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialPpp {
    step_scale: f64,
    start2: f64,
    limit2: f64,
}

impl RadialPpp {
    pub(crate) fn new(density: f64, start: f64, limit: f64) -> Self {
        RadialPpp {
            step_scale: 1.0 / (PI * density),
            start2: start * start,
            limit2: limit * limit,
        }
    }

    pub(crate) fn iter<'a, R: Rng + ?Sized>(&self, rng: &'a mut R) -> RadialIter<'a, R> {
        RadialIter {
            rng,
            step_scale: self.step_scale,
            r2: self.start2,
            limit2: self.limit2,
        }
    }
}

pub(crate) struct RadialIter<'a, R: ?Sized> {
    rng: &'a mut R,
    step_scale: f64,
    r2: f64,
    limit2: f64,
}

impl<R: Rng + ?Sized> Iterator for RadialIter<'_, R> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if !self.step_scale.is_finite() {
            return None;
        }
        let step: f64 = self.rng.sample(Exp1);
        self.r2 += step * self.step_scale;
        (self.r2 <= self.limit2).then(|| self.r2.sqrt())
    }
}

impl<'a, R: Rng + ?Sized> RadialIter<'a, R> {
    pub(crate) fn rng(&mut self) -> &mut R {
        self.rng
    }
}

/// Draws an orientation case (0-based) with probability density / lambda.
/// Cases with zero density are never chosen.
#[derive(Debug, Clone, Copy)]
pub(crate) struct CaseMarker {
    thresholds: [f64; 4],
    cases: [usize; 4],
    len: usize,
    gains: [f64; 4],
}

impl CaseMarker {
    pub(crate) fn new(table: &ThinningTable) -> Self {
        let mut thresholds = [f64::INFINITY; 4];
        let mut cases = [0; 4];
        let mut len = 0;
        let mut acc = 0.0;
        for (k, case) in table.cases().iter().enumerate() {
            if case.density > 0.0 {
                acc += case.density / table.lambda();
                thresholds[len] = acc;
                cases[len] = k;
                len += 1;
            }
        }
        // The last live case absorbs rounding in the cumulative sums.
        if len > 0 {
            thresholds[len - 1] = f64::INFINITY;
        }
        CaseMarker {
            thresholds,
            cases,
            len,
            gains: table.cases().map(|c| c.gain),
        }
    }

    pub(crate) fn pick(&self, u: f64) -> usize {
        for i in 0..self.len {
            if u < self.thresholds[i] {
                return self.cases[i];
            }
        }
        self.cases[0]
    }

    pub(crate) fn gain(&self, case: usize) -> f64 {
        self.gains[case]
    }
}

/// One loop-interference draw: grid index of the antenna angle and the
/// unit-mean fading multiplier (`h_l = sigma_l2 * fading`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct LiDraw {
    pub(crate) index: usize,
    pub(crate) fading: f64,
}

pub(crate) fn draw_li<R: Rng + ?Sized>(m_b: u32, rng: &mut R) -> LiDraw {
    let index = rng.random_range(0..m_b as usize);
    let fading: f64 = rng.sample(Exp1);
    LiDraw { index, fading }
}

/// Residual loop-interference power at a three-node BS:
/// `P_b * gain(theta) * h_l` with the angle uniform on the sector grid and
/// `h_l` exponential with mean `sigma_l2`.
pub fn draw_li_term<R: Rng + ?Sized>(
    params: &NetworkParams,
    suppression: Suppression,
    rng: &mut R,
) -> Result<f64> {
    params.validate()?;
    let grid = LiAngleModel::new(params.m_b)?;
    let bs = params.antenna(crate::model::Node::Bs)?;
    let draw = draw_li(params.m_b, rng);
    Ok(params.p_b * grid.li_gain(draw.index, &bs, suppression) * params.sigma_l2 * draw.fading)
}

pub(crate) fn uniform_open<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(Open01)
}
