//! Quadrature evaluation of the three-node outage probabilities, the average
//! sum rate and their many-antenna limits.
//!
//! Every interference term is a Laplace transform of a thinned Poisson field
//! seen through Rayleigh fading. For a case with density `d` and normalized
//! strength `A` the probability generating functional reduces to
//!
//! ```text
//! exp(-2 pi d * int_lower^inf A / (A + x^alpha / r^alpha1) x dx)
//! ```
//!
//! and with `b = A r^alpha1` the integral equals
//! `b^(2/alpha) * K_alpha(lower / b^(1/alpha))` where
//! `K_alpha(u) = int_u^inf t / (1 + t^alpha) dt`. `K_4` has the closed form
//! `atan(1 / u^2) / 2`; other exponents use quadrature.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::estimate::{rate_threshold, Method, MetricEstimate, OutageQuery};
use crate::model::{
    passive_suppression_fraction, LiAngleModel, Link, NetworkParams, Node, Suppression,
    ThinningTable,
};
use crate::numerics::{
    integrate_finite, try_integrate_finite, try_integrate_semi_infinite, QuadratureSpec,
};

/// How the radial kernel `K_alpha` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelMode {
    /// Closed form for `alpha = 4`, quadrature otherwise.
    #[default]
    Auto,
    /// Always integrate numerically.
    Quadrature,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalyticOptions {
    /// Tolerances of the outermost integral; nested integrals tighten by a
    /// factor of ten per level.
    pub quadrature: QuadratureSpec,
    pub kernel: KernelMode,
}

impl AnalyticOptions {
    fn nested(&self) -> Self {
        AnalyticOptions {
            quadrature: self.quadrature.tighter(),
            kernel: self.kernel,
        }
    }
}

/// `int_u^inf t / (1 + t^alpha) dt` for `u >= 0`, `alpha > 2`.
pub fn radial_kernel(alpha: f64, u: f64, options: &AnalyticOptions) -> Result<f64> {
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(domain("alpha", format!("kernel exponent must be > 2, got {alpha}")));
    }
    if !(u >= 0.0 && u.is_finite()) {
        return Err(domain("lower", format!("kernel lower limit must be >= 0, got {u}")));
    }
    if options.kernel == KernelMode::Auto && alpha == 4.0 {
        return Ok(0.5 * f64::atan2(1.0, u * u));
    }
    let spec = options.quadrature.with_scale(u.max(1.0));
    let q = crate::numerics::integrate_semi_infinite(|t| t / (1.0 + t.powf(alpha)), u, &spec)?;
    Ok(q.value)
}

/// Interference exponent `2 pi sum_k d_k int_lower^inf A_k / (A_k + x^alpha / r^alpha1) x dx`
/// with `A_k = power_ratio * (gain_k / reference_gain) * threshold`.
#[allow(clippy::too_many_arguments)]
fn pgfl_exponent(
    table: &ThinningTable,
    reference_gain: f64,
    power_ratio: f64,
    threshold: f64,
    r: f64,
    alpha1: f64,
    alpha: f64,
    lower: f64,
    options: &AnalyticOptions,
) -> Result<f64> {
    let r_alpha1 = r.powf(alpha1);
    let mut sum = 0.0;
    for case in table.cases() {
        let strength = power_ratio * (case.gain / reference_gain) * threshold;
        if case.density == 0.0 || strength == 0.0 {
            continue;
        }
        let b = strength * r_alpha1;
        let scale = b.powf(1.0 / alpha);
        sum += case.density * scale * scale * radial_kernel(alpha, lower / scale, options)?;
    }
    Ok(2.0 * PI * sum)
}

fn check_point(r: f64, threshold: f64, params: &NetworkParams) -> Result<()> {
    params.validate()?;
    if !(r.is_finite() && r > 0.0) {
        return Err(domain("r", format!("link distance must be > 0, got {r}")));
    }
    if !(threshold.is_finite() && threshold >= 0.0) {
        return Err(domain("threshold", format!("SINR threshold must be >= 0, got {threshold}")));
    }
    Ok(())
}

/// Laplace transform of the residual loop interference at the uplink BS,
/// evaluated at `s = mu T r^alpha1 / (P_u G_b G_u)`.
pub fn laplace_li_uplink(
    r: f64,
    threshold: f64,
    params: &NetworkParams,
    suppression: Suppression,
) -> Result<f64> {
    check_point(r, threshold, params)?;
    let bs = params.antenna(Node::Bs)?;
    let user = params.antenna(Node::User)?;
    // LI strength relative to the desired link, before antenna gains.
    let k = params.p_b / (params.p_u * user.main_lobe())
        * params.mu
        * params.sigma_l2
        * threshold
        * r.powf(params.alpha1);
    let boresight = 1.0 / (1.0 + bs.main_lobe() * k);
    if suppression == Suppression::Off {
        return Ok(boresight);
    }
    let grid = LiAngleModel::new(params.m_b)?;
    let mut sum = 0.0;
    for (i, &theta) in grid.angles().iter().enumerate() {
        if i == grid.zero_index() {
            sum += boresight;
            continue;
        }
        let residual = match suppression {
            Suppression::On => passive_suppression_fraction(theta)?,
            _ => 1.0,
        };
        sum += 1.0 / (1.0 + bs.side_lobe() * k * residual);
    }
    Ok(sum * grid.probability())
}

/// BS-interference factor of the uplink outage integral in its unnormalized
/// form `int_0^inf rho exp(-lambda pi rho^2) E[exp(-s I_b) | rho] d rho`.
///
/// It tends to `1 / (2 pi lambda)` as the threshold vanishes; see
/// [`laplace_ib_uplink_normalized`] for the transform itself.
pub fn laplace_ib_uplink(
    r: f64,
    threshold: f64,
    params: &NetworkParams,
    options: &AnalyticOptions,
) -> Result<f64> {
    Ok(laplace_ib_uplink_normalized(r, threshold, params, options)? / (2.0 * PI * params.lambda))
}

/// `E[exp(-s I_b)]` at the uplink BS, averaging over the distance `rho` to the
/// nearest other BS; only BSs beyond `rho` interfere.
pub fn laplace_ib_uplink_normalized(
    r: f64,
    threshold: f64,
    params: &NetworkParams,
    options: &AnalyticOptions,
) -> Result<f64> {
    check_point(r, threshold, params)?;
    let bb = params.thinning(Node::Bs, Node::Bs)?;
    let bu = params.thinning(Node::Bs, Node::User)?;
    let reference = bu.boresight_gain();
    let ratio = params.p_b / params.p_u;
    let lambda = params.lambda;
    let inner = options.nested();
    let spec = options.quadrature.with_scale(1.0 / (PI * lambda).sqrt());
    let q = try_integrate_semi_infinite(
        |rho: f64| -> Result<f64> {
            let exponent = pgfl_exponent(
                &bb, reference, ratio, threshold, r, params.alpha1, params.alpha2, rho, &inner,
            )?;
            Ok(2.0 * PI * lambda * rho * (-lambda * PI * rho * rho - exponent).exp())
        },
        0.0,
        &spec,
    )?;
    Ok(q.value)
}

/// Laplace transform of the uplink-user interference at the BS; users closer
/// than the served user at `r` are excluded.
pub fn laplace_iu_uplink(
    r: f64,
    threshold: f64,
    params: &NetworkParams,
    options: &AnalyticOptions,
) -> Result<f64> {
    check_point(r, threshold, params)?;
    let bu = params.thinning(Node::Bs, Node::User)?;
    let exponent = pgfl_exponent(
        &bu,
        bu.boresight_gain(),
        1.0,
        threshold,
        r,
        params.alpha1,
        params.alpha1,
        r,
        options,
    )?;
    Ok((-exponent).exp())
}

/// Laplace transform of the BS interference at the downlink user; BSs closer
/// than the serving BS at `r` are excluded.
pub fn laplace_ib_downlink(
    r: f64,
    threshold: f64,
    params: &NetworkParams,
    options: &AnalyticOptions,
) -> Result<f64> {
    check_point(r, threshold, params)?;
    let ub = params.thinning(Node::User, Node::Bs)?;
    let exponent = pgfl_exponent(
        &ub,
        ub.boresight_gain(),
        1.0,
        threshold,
        r,
        params.alpha1,
        params.alpha1,
        r,
        options,
    )?;
    Ok((-exponent).exp())
}

/// Laplace transform of the uplink-user interference at the downlink user.
/// Uplink users may be arbitrarily close, so the integral starts at zero.
pub fn laplace_iu_downlink(
    r: f64,
    threshold: f64,
    params: &NetworkParams,
    options: &AnalyticOptions,
) -> Result<f64> {
    check_point(r, threshold, params)?;
    let uu = params.thinning(Node::User, Node::User)?;
    let ub = params.thinning(Node::User, Node::Bs)?;
    let exponent = pgfl_exponent(
        &uu,
        ub.boresight_gain(),
        params.p_u / params.p_b,
        threshold,
        r,
        params.alpha1,
        params.alpha2,
        0.0,
        options,
    )?;
    Ok((-exponent).exp())
}

/// Coverage `P[SINR >= threshold]` with its quadrature error.
fn coverage(
    link: Link,
    threshold: f64,
    params: &NetworkParams,
    suppression: Suppression,
    options: &AnalyticOptions,
) -> Result<(f64, f64)> {
    params.validate()?;
    if threshold == 0.0 {
        return Ok((1.0, 0.0));
    }
    let lambda = params.lambda;
    let gains = params.antenna(Node::Bs)?.main_lobe() * params.antenna(Node::User)?.main_lobe();
    let tx_power = match link {
        Link::Uplink => params.p_u,
        Link::Downlink => params.p_b,
    };
    let inner = options.nested();
    let spec = options.quadrature.with_scale(1.0 / (PI * lambda).sqrt());
    let q = try_integrate_semi_infinite(
        |r: f64| -> Result<f64> {
            if r == 0.0 {
                return Ok(0.0);
            }
            let s = params.mu * threshold * r.powf(params.alpha1) / (tx_power * gains);
            let mut value = 2.0 * PI * lambda * r * (-lambda * PI * r * r - s * params.sigma_n2).exp();
            if value == 0.0 {
                return Ok(0.0);
            }
            match link {
                Link::Uplink => {
                    value *= laplace_li_uplink(r, threshold, params, suppression)?;
                    value *= laplace_iu_uplink(r, threshold, params, &inner)?;
                    if value != 0.0 {
                        value *= laplace_ib_uplink_normalized(r, threshold, params, &inner)?;
                    }
                }
                Link::Downlink => {
                    value *= laplace_ib_downlink(r, threshold, params, &inner)?;
                    value *= laplace_iu_downlink(r, threshold, params, &inner)?;
                }
            }
            Ok(value)
        },
        0.0,
        &spec,
    )?;
    Ok((q.value, q.error))
}

fn outage_estimate(query: &OutageQuery, options: &AnalyticOptions) -> Result<MetricEstimate> {
    query.validate()?;
    let (cov, err) = coverage(
        query.link,
        query.threshold(),
        &query.params,
        query.suppression,
        options,
    )?;
    Ok(MetricEstimate::new((1.0 - cov).clamp(0.0, 1.0), Method::Analytic, err)
        .with_meta("link", query.link)
        .with_meta("rate", query.rate)
        .with_meta("suppression", query.suppression))
}

/// Uplink outage probability at the full-duplex BS of a three-node cell.
pub fn outage_uplink(query: &OutageQuery, options: &AnalyticOptions) -> Result<MetricEstimate> {
    if query.link != Link::Uplink {
        return Err(domain("link", "outage_uplink needs an uplink query"));
    }
    outage_estimate(query, options)
}

/// Downlink outage probability. The downlink user is half-duplex, so the
/// suppression setting has no effect.
pub fn outage_downlink(query: &OutageQuery, options: &AnalyticOptions) -> Result<MetricEstimate> {
    if query.link != Link::Downlink {
        return Err(domain("link", "outage_downlink needs a downlink query"));
    }
    outage_estimate(query, options)
}

/// Dispatches on `query.link`.
pub fn outage(query: &OutageQuery, options: &AnalyticOptions) -> Result<MetricEstimate> {
    outage_estimate(query, options)
}

/// Average rates of the three-node cell in bits per channel use.
#[derive(Debug, Clone, PartialEq)]
pub struct SumRate {
    pub uplink: MetricEstimate,
    pub downlink: MetricEstimate,
    pub total: MetricEstimate,
}

/// Coverage below which the rate integral is truncated.
const RATE_TAIL_COVERAGE: f64 = 1e-4;

/// `int_0^inf P[log2(1 + SINR) > t] dt` for one link.
fn average_rate(
    link: Link,
    params: &NetworkParams,
    suppression: Suppression,
    options: &AnalyticOptions,
) -> Result<MetricEstimate> {
    let inner = options.nested();
    let cov_at = |t: f64| coverage(link, rate_threshold(t), params, suppression, &inner).map(|c| c.0);

    let mut cutoff = 0.5;
    let mut cov_cut = cov_at(cutoff)?;
    while cov_cut >= RATE_TAIL_COVERAGE {
        if cutoff >= 1024.0 {
            return Err(Error::Convergence {
                estimate: f64::NAN,
                error_estimate: f64::INFINITY,
            });
        }
        cutoff *= 2.0;
        cov_cut = cov_at(cutoff)?;
    }
    let body = try_integrate_finite(|t| cov_at(t), 0.0, cutoff, &options.quadrature)?;

    // Coverage decays geometrically in t; extrapolate the remaining mass from
    // the local decay rate at the cutoff.
    let step = cutoff / 8.0;
    let cov_before = cov_at(cutoff - step)?;
    let tail = if cov_cut > 0.0 && cov_before > cov_cut {
        cov_cut * step / (cov_before / cov_cut).ln()
    } else {
        0.0
    };
    Ok(MetricEstimate::new(body.value + tail, Method::Analytic, body.error + tail)
        .with_meta("link", link)
        .with_meta("truncation_rate", cutoff)
        .with_meta("tail", tail))
}

/// Average uplink, downlink and total rate of the three-node cell.
pub fn sum_rate(
    params: &NetworkParams,
    suppression: Suppression,
    options: &AnalyticOptions,
) -> Result<SumRate> {
    params.validate()?;
    let uplink = average_rate(Link::Uplink, params, suppression, options)?;
    let downlink = average_rate(Link::Downlink, params, suppression, options)?;
    let total = MetricEstimate::new(
        uplink.value + downlink.value,
        Method::Analytic,
        uplink.uncertainty + downlink.uncertainty,
    )
    .with_meta("suppression", suppression);
    Ok(SumRate {
        uplink,
        downlink,
        total,
    })
}

/// Downlink outage as the number of sectors grows without bound:
/// `1 - 1 / (1 + g sqrt(T) (atan(g sqrt(T)) + pi / 2))`. Independent of the
/// density.
pub fn asymptotic_outage_downlink(rate: f64, gamma: f64) -> Result<f64> {
    if !(rate.is_finite() && rate >= 0.0) {
        return Err(domain("rate", format!("target rate must be >= 0, got {rate}")));
    }
    if !(0.0..=1.0).contains(&gamma) {
        return Err(domain("gamma", format!("side-lobe ratio must lie in [0, 1], got {gamma}")));
    }
    let a = gamma * rate_threshold(rate).sqrt();
    Ok(1.0 - 1.0 / (1.0 + a * (a.atan() + PI / 2.0)))
}

fn check_asymptotic_regime(params: &NetworkParams) -> Result<()> {
    params.validate()?;
    if params.alpha1 != 4.0 || params.alpha2 != 4.0 {
        return Err(domain("alpha1", "many-antenna limit needs alpha1 = alpha2 = 4"));
    }
    if params.p_b != params.p_u {
        return Err(domain("p_b", "many-antenna limit needs p_b = p_u"));
    }
    if params.sigma_n2 != 0.0 {
        return Err(domain("sigma_n2", "many-antenna limit is interference limited (sigma_n2 = 0)"));
    }
    if params.gamma_b != params.gamma_u {
        return Err(domain("gamma_b", "many-antenna limit needs gamma_b = gamma_u"));
    }
    Ok(())
}

/// Angular average of the suppressed loop-interference transform at
/// `z = r^2` in the many-antenna limit, with passive suppression on.
///
/// Nonzero angles see the side-lobe to main-lobe ratio `gamma` relative to the
/// desired link; the boresight angle has vanishing weight.
pub fn asymptotic_li_term(
    z: f64,
    threshold: f64,
    params: &NetworkParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let k = params.gamma_b * params.mu * params.sigma_l2 * threshold * z * z;
    if k == 0.0 {
        return Ok(1.0);
    }
    let f = |theta: f64| 1.0 / (1.0 + k * (-(theta - 2.0 * PI / 3.0).cos() - 0.5).exp());
    // Even in theta; split at the suppression minimum.
    let a = integrate_finite(f, 0.0, 2.0 * PI / 3.0, spec)?;
    let b = integrate_finite(f, 2.0 * PI / 3.0, PI, spec)?;
    Ok((a.value + b.value) / PI)
}

/// BS-interference term `int_0^inf exp(-pi lambda (w + c atan(c / w))) dw`
/// with `c = z gamma sqrt(T)`.
pub fn asymptotic_ib_term(
    z: f64,
    threshold: f64,
    params: &NetworkParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let lambda = params.lambda;
    let c = z * params.gamma_b * threshold.sqrt();
    if c == 0.0 {
        return Ok(1.0 / (PI * lambda));
    }
    let q = crate::numerics::integrate_semi_infinite(
        |w| (-PI * lambda * (w + c * f64::atan2(c, w))).exp(),
        0.0,
        &spec.with_scale(1.0 / (PI * lambda)),
    )?;
    Ok(q.value)
}

/// User-interference term `exp(-pi lambda z sqrt(T) gamma atan(gamma sqrt(T)))`.
pub fn asymptotic_iu_term(z: f64, threshold: f64, params: &NetworkParams) -> f64 {
    let a = params.gamma_u * threshold.sqrt();
    (-PI * params.lambda * z * a * a.atan()).exp()
}

/// Uplink outage with passive suppression in the many-antenna limit.
///
/// Requires `alpha1 = alpha2 = 4`, `p_b = p_u`, `sigma_n2 = 0` and equal
/// side-lobe ratios; sector counts are ignored.
pub fn asymptotic_outage_uplink(
    rate: f64,
    params: &NetworkParams,
    options: &AnalyticOptions,
) -> Result<MetricEstimate> {
    if !(rate.is_finite() && rate > 0.0) {
        return Err(domain("rate", format!("target rate must be > 0, got {rate}")));
    }
    check_asymptotic_regime(params)?;
    let threshold = rate_threshold(rate);
    let lambda = params.lambda;
    let inner = options.quadrature.tighter();
    let q = try_integrate_semi_infinite(
        |z: f64| -> Result<f64> {
            let weight = (-lambda * PI * z).exp();
            if weight == 0.0 {
                return Ok(0.0);
            }
            Ok(weight
                * asymptotic_li_term(z, threshold, params, &inner)?
                * asymptotic_ib_term(z, threshold, params, &inner)?
                * asymptotic_iu_term(z, threshold, params))
        },
        0.0,
        &options.quadrature.with_scale(1.0 / (PI * lambda)),
    )?;
    let pl = PI * lambda;
    let value = 1.0 - pl * pl * q.value;
    Ok(MetricEstimate::new(value.clamp(0.0, 1.0), Method::Asymptotic, pl * pl * q.error)
        .with_meta("link", Link::Uplink)
        .with_meta("rate", rate))
}
