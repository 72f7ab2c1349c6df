//! Globally adaptive Gauss-Kronrod quadrature.
//!
//! Each interval is integrated with the 21-point Kronrod rule and its
//! embedded 10-point Gauss rule; the interval with the largest error estimate
//! is bisected until the summed estimate meets the tolerance. Semi-infinite
//! ranges `[a, inf)` are mapped onto `[0, 1)` with `x = a + L t / (1 - t)`,
//! where `L` is the length scale from [`QuadratureSpec::scale`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{domain, Error, Result};

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_914_860,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd Kronrod abscissae XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and limits for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of bisections applied to any one interval.
    pub max_depth: u32,
    /// Maximum number of live subintervals.
    pub max_intervals: usize,
    /// Length scale `L` of the semi-infinite substitution.
    pub scale: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            abs_tol: 1e-12,
            max_depth: 64,
            max_intervals: 2000,
            scale: 1.0,
        }
    }
}

impl QuadratureSpec {
    /// Same limits with both tolerances an order of magnitude tighter; used
    /// for integrals nested inside another integrand.
    pub fn tighter(&self) -> Self {
        QuadratureSpec {
            rel_tol: self.rel_tol / 10.0,
            abs_tol: self.abs_tol / 10.0,
            ..*self
        }
    }

    pub fn with_scale(self, scale: f64) -> Self {
        QuadratureSpec { scale, ..self }
    }

    pub fn with_tolerances(self, rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec {
            rel_tol,
            abs_tol,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(domain("rel_tol", "tolerance must be positive"));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(domain("abs_tol", "tolerance must be positive"));
        }
        if self.max_depth < 1 {
            return Err(domain("max_depth", "depth must be at least 1"));
        }
        if self.max_intervals < 1 {
            return Err(domain("max_intervals", "need at least one interval"));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(domain("scale", "semi-infinite scale must be positive"));
        }
        Ok(())
    }
}

/// Value of an integral together with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod21<F, E>(f: &mut F, a: f64, b: f64) -> Result<(f64, f64), E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<Error>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<f64, E> {
        let y = f(x)?;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(Error::NonFiniteIntegrand { at: x, value: y }.into())
        }
    };

    let mut fv = [0.0; 21];
    fv[10] = eval(center)?;
    for j in 0..10 {
        let dx = half * XGK[j];
        fv[j] = eval(center - dx)?;
        fv[20 - j] = eval(center + dx)?;
    }

    let mut kronrod = WGK[10] * fv[10];
    let mut gauss = 0.0;
    let mut abs_sum = WGK[10] * fv[10].abs();
    for j in 0..10 {
        let pair = fv[j] + fv[20 - j];
        kronrod += WGK[j] * pair;
        abs_sum += WGK[j] * (fv[j].abs() + fv[20 - j].abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (fv[10] - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv[j] - mean).abs() + (fv[20 - j] - mean).abs());
    }

    let value = kronrod * half;
    let abs_sum = abs_sum * half.abs();
    let asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if asc != 0.0 && error != 0.0 {
        error = asc * (200.0 * error / asc).powf(1.5).min(1.0);
    }
    if abs_sum > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * abs_sum);
    }
    Ok((value, error))
}

/// Fallible-integrand form of [`integrate_finite`], for nesting integrals.
pub fn try_integrate_finite<F, E>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<Error>,
{
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) {
        return Err(domain("interval", format!("finite limits required, got [{a}, {b}]")).into());
    }
    if a > b {
        return Err(domain("interval", format!("lower limit {a} exceeds upper limit {b}")).into());
    }
    if a == b {
        return Ok(Quadrature {
            value: 0.0,
            error: 0.0,
        });
    }

    let (value, error) = kronrod21(&mut f, a, b)?;
    let mut live = BinaryHeap::new();
    live.push(Segment {
        a,
        b,
        value,
        error,
        depth: 0,
    });
    let mut settled: Vec<Segment> = Vec::new();
    let mut total = value;
    let mut total_error = error;

    loop {
        if total_error <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            break;
        }
        let Some(worst) = live.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        let splittable = worst.depth < spec.max_depth
            && live.len() + settled.len() + 2 <= spec.max_intervals
            && worst.a < mid
            && mid < worst.b;
        if !splittable {
            settled.push(worst);
            continue;
        }
        let (v1, e1) = kronrod21(&mut f, worst.a, mid)?;
        let (v2, e2) = kronrod21(&mut f, mid, worst.b)?;
        total += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        let depth = worst.depth + 1;
        live.push(Segment { a: worst.a, b: mid, value: v1, error: e1, depth });
        live.push(Segment { a: mid, b: worst.b, value: v2, error: e2, depth });
    }

    let mut segments: Vec<Segment> = live.into_vec();
    segments.append(&mut settled);
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = neumaier_sum(segments.iter().map(|s| s.value));
    let error = segments.iter().map(|s| s.error).sum::<f64>();
    if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
        Ok(Quadrature { value, error })
    } else {
        Err(Error::Convergence {
            estimate: value,
            error_estimate: error,
        }
        .into())
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate_finite<F>(mut f: F, a: f64, b: f64, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_finite(|x| Ok::<_, Error>(f(x)), a, b, spec)
}

/// Fallible-integrand form of [`integrate_semi_infinite`].
pub fn try_integrate_semi_infinite<F, E>(
    mut f: F,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<Quadrature, E>
where
    F: FnMut(f64) -> Result<f64, E>,
    E: From<Error>,
{
    spec.validate()?;
    if !a.is_finite() {
        return Err(domain("interval", format!("finite lower limit required, got {a}")).into());
    }
    let scale = spec.scale;
    try_integrate_finite(
        |t: f64| {
            let one_minus = 1.0 - t;
            let x = a + scale * t / one_minus;
            if x.is_infinite() {
                // Nodes of deeply bisected end intervals can round onto t = 1.
                return Ok(0.0);
            }
            Ok(f(x)? * scale / (one_minus * one_minus))
        },
        0.0,
        1.0,
        spec,
    )
}

/// Integrates `f` over `[a, inf)`.
pub fn integrate_semi_infinite<F>(mut f: F, a: f64, spec: &QuadratureSpec) -> Result<Quadrature>
where
    F: FnMut(f64) -> f64,
{
    try_integrate_semi_infinite(|x| Ok::<_, Error>(f(x)), a, spec)
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
