use fdcell_core::analytic::{self, AnalyticOptions};
use fdcell_core::montecarlo::{estimate_sum_rate, simulate_link, LinkSamples};
use fdcell_core::{
    linear_to_db, Architecture, Link, MetricEstimate, NetworkParams, OutageQuery, SimConfig,
};

use crate::config::{MethodArg, Metric, SweepSpec, SweepVar};
use crate::output::Row;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Engine {
    Analytic,
    MonteCarlo,
    Asymptotic,
}

impl Engine {
    fn name(self) -> &'static str {
        match self {
            Engine::Analytic => "analytic",
            Engine::MonteCarlo => "montecarlo",
            Engine::Asymptotic => "asymptotic",
        }
    }
}

fn engines(method: MethodArg) -> &'static [Engine] {
    match method {
        MethodArg::Analytic => &[Engine::Analytic],
        MethodArg::Montecarlo => &[Engine::MonteCarlo],
        MethodArg::Asymptotic => &[Engine::Asymptotic],
        MethodArg::Both => &[Engine::Analytic, Engine::MonteCarlo],
    }
}

/// Simulations already run, keyed by link and every parameter except
/// `sigma_l2`, which can be rescaled after the fact.
#[derive(Default)]
struct SampleCache {
    entries: Vec<(Link, NetworkParams, LinkSamples)>,
}

impl SampleCache {
    fn get(&mut self, link: Link, params: &NetworkParams, sim: &SimConfig) -> fdcell_core::Result<&LinkSamples> {
        let key = params.clone().with_sigma_l2(0.0);
        let pos = match self.entries.iter().position(|(l, p, _)| *l == link && *p == key) {
            Some(pos) => pos,
            None => {
                let samples = simulate_link(link, &key, sim)?;
                self.entries.push((link, key, samples));
                self.entries.len() - 1
            }
        };
        Ok(&self.entries[pos].2)
    }
}

struct Point<'a> {
    spec: &'a SweepSpec,
    params: NetworkParams,
    rate: f64,
    swept: Option<(SweepVar, f64)>,
}

impl Point<'_> {
    fn row(&self, link: &str, engine: Engine, result: fdcell_core::Result<MetricEstimate>) -> Row {
        let p = &self.params;
        let sim = &self.spec.sim;
        let simulated = engine == Engine::MonteCarlo;
        let arch = if simulated { sim.architecture } else { Architecture::ThreeNode };
        let (value, uncertainty, error) = match result {
            Ok(e) => (e.value, e.uncertainty, None),
            Err(e) => (f64::NAN, f64::NAN, Some(e.to_string())),
        };
        Row {
            arch: arch.to_string(),
            link: link.to_owned(),
            metric: self.spec.metric.name().to_owned(),
            method: engine.name().to_owned(),
            swept_var: self.swept.map(|(v, _)| v.name().to_owned()),
            swept_value: self.swept.map(|(_, x)| x),
            rate: self.rate,
            lambda: p.lambda,
            m_b: p.m_b,
            m_u: p.m_u,
            gamma: p.gamma_b,
            alpha1: p.alpha1,
            alpha2: p.alpha2,
            p_b: p.p_b,
            p_u: p.p_u,
            sigma_n2_db: self.spec.sigma_n2_db,
            sigma_l2_db: match self.swept {
                Some((SweepVar::SigmaL2Db, x)) => x,
                _ => self.spec.sigma_l2_db,
            },
            suppression: sim.suppression.to_string(),
            nearest_bs_mode: sim.nearest_bs_mode.to_string(),
            value,
            uncertainty,
            trials: simulated.then_some(sim.trials),
            seed: simulated.then_some(sim.seed),
            error,
        }
    }
}

fn evaluate(point: &Point<'_>, engine: Engine, cache: &mut SampleCache) -> Row {
    let spec = point.spec;
    let p = &point.params;
    let opts = AnalyticOptions::default();
    let link = match spec.metric {
        Metric::OutageUplink => Link::Uplink,
        Metric::OutageDownlink => Link::Downlink,
        Metric::SumRate => {
            let result = match engine {
                Engine::Analytic => analytic::sum_rate(p, spec.sim.suppression, &opts).map(|s| s.total),
                Engine::MonteCarlo => {
                    estimate_sum_rate(spec.sim.architecture, p, &spec.sim).map(|s| s.total)
                }
                Engine::Asymptotic => unreachable!("rejected when the spec was parsed"),
            };
            return point.row("sum", engine, result);
        }
    };
    let result = match engine {
        Engine::Analytic => {
            analytic::outage(&OutageQuery::new(point.rate, p.clone(), spec.sim.suppression, link), &opts)
        }
        Engine::Asymptotic => match link {
            Link::Uplink => analytic::asymptotic_outage_uplink(point.rate, p, &opts),
            Link::Downlink => analytic::asymptotic_outage_downlink(point.rate, p.gamma_b).map(|v| {
                MetricEstimate::new(v, fdcell_core::Method::Asymptotic, 0.0)
            }),
        },
        Engine::MonteCarlo => cache
            .get(link, p, &spec.sim)
            .and_then(|s| s.outage_with_sigma_l2(point.rate, p.sigma_l2)),
    };
    point.row(&link.to_string(), engine, result)
}

/// Evaluates every sweep point with every requested engine. Failed
/// evaluations become rows with a NaN value and an error message.
pub fn run_sweep(spec: &SweepSpec) -> Vec<Row> {
    let points: Vec<Option<(SweepVar, f64)>> = match &spec.sweep {
        Some((var, values)) => values.iter().map(|&v| Some((*var, v))).collect(),
        None => vec![None],
    };
    let mut cache = SampleCache::default();
    let mut rows = Vec::new();
    for swept in points {
        let (params, rate) = match swept {
            Some((var, v)) => SweepSpec::apply_point(&spec.params, spec.rate, var, v)
                .expect("sweep points are checked when the spec is parsed"),
            None => (spec.params.clone(), spec.rate),
        };
        let point = Point {
            spec,
            params,
            rate,
            swept,
        };
        for &engine in engines(spec.method) {
            rows.push(evaluate(&point, engine, &mut cache));
        }
    }
    rows
}

/// Outcome of one analytic/simulation comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub analytic: f64,
    pub montecarlo: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Compares both engines on the reference grid: `m` in {1, 2, 4, 8},
/// `sigma_l2` off or -30/-20/-10 dB, `R` in {0.01, 0.1, 1}, both links.
/// Other parameters come from `spec`.
pub fn validate(spec: &SweepSpec) -> (Vec<Row>, Vec<Check>) {
    let mut spec = spec.clone();
    spec.method = MethodArg::Both;
    spec.sim.architecture = Architecture::ThreeNode;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    let mut cache = SampleCache::default();
    for m in [1u32, 2, 4, 8] {
        for metric in [Metric::OutageUplink, Metric::OutageDownlink] {
            for sigma_l2 in [0.0, 1e-3, 1e-2, 1e-1] {
                for rate in [0.01, 0.1, 1.0] {
                    let mut point_spec = spec.clone();
                    point_spec.metric = metric;
                    point_spec.sigma_l2_db = linear_to_db(sigma_l2);
                    let params = spec.params.clone().with_sectors(m).with_sigma_l2(sigma_l2);
                    let point = Point {
                        spec: &point_spec,
                        params,
                        rate,
                        swept: None,
                    };
                    let a = evaluate(&point, Engine::Analytic, &mut cache);
                    let mc = evaluate(&point, Engine::MonteCarlo, &mut cache);
                    let tolerance = (3.0 * mc.uncertainty).max(0.01);
                    let pass = a.error.is_none()
                        && mc.error.is_none()
                        && (a.value - mc.value).abs() <= tolerance;
                    checks.push(Check {
                        label: format!(
                            "m={m} {} sigma_l2_db={} R={rate}",
                            metric.name(),
                            point_spec.sigma_l2_db
                        ),
                        analytic: a.value,
                        montecarlo: mc.value,
                        tolerance,
                        pass,
                    });
                    rows.push(a);
                    rows.push(mc);
                }
            }
        }
    }
    (rows, checks)
}
