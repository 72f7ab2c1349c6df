//! Laplace transforms and outage probabilities against simulated averages.

use fdcell_core::analytic::{self, AnalyticOptions};
use fdcell_core::montecarlo::{
    downlink_sinr_trial, estimate_outage, estimate_sum_rate, uplink_sinr_trial, TrialFixture,
    TrialOutcome, TrialStreams,
};
use fdcell_core::{
    rate_threshold, Architecture, Link, NetworkParams, Node, OutageQuery, SimConfig, Suppression,
};

const TRIALS: u64 = 100_000;
const R: f64 = 5.0;

fn params() -> NetworkParams {
    NetworkParams::default()
}

/// Mean and standard error of `exp(-s * pick(outcome))` with the serving
/// distance pinned at `R`.
fn laplace_mc(link: Link, s: f64, pick: impl Fn(&TrialOutcome) -> f64) -> (f64, f64) {
    let p = params();
    let sim = SimConfig::default();
    let fixture = TrialFixture {
        distance: Some(R),
        ..Default::default()
    };
    let values: Vec<f64> = (0..TRIALS)
        .map(|i| {
            let streams = TrialStreams::new(2024, i);
            let out = match link {
                Link::Uplink => uplink_sinr_trial(&p, &sim, Some(&fixture), &streams),
                Link::Downlink => downlink_sinr_trial(&p, &sim, Some(&fixture), &streams),
            }
            .unwrap();
            (-s * pick(&out)).exp()
        })
        .collect();
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn s_param(tx_power: f64) -> f64 {
    let p = params();
    let g = p.antenna(Node::Bs).unwrap().main_lobe() * p.antenna(Node::User).unwrap().main_lobe();
    p.mu * rate_threshold(0.1) * R.powf(p.alpha1) / (tx_power * g)
}

fn within(label: &str, analytic: f64, (mean, se): (f64, f64)) {
    assert!(
        (analytic - mean).abs() <= 3.0 * se,
        "{label}: analytic {analytic} vs simulated {mean} +- {se}"
    );
}

#[test]
fn uplink_bs_interference_transform() {
    let p = params();
    let t = rate_threshold(0.1);
    let a = analytic::laplace_ib_uplink_normalized(R, t, &p, &AnalyticOptions::default()).unwrap();
    within("L_Ib uplink", a, laplace_mc(Link::Uplink, s_param(p.p_u), |o| o.bs_interference));
}

#[test]
fn uplink_user_interference_transform() {
    let p = params();
    let t = rate_threshold(0.1);
    let a = analytic::laplace_iu_uplink(R, t, &p, &AnalyticOptions::default()).unwrap();
    within("L_Iu uplink", a, laplace_mc(Link::Uplink, s_param(p.p_u), |o| o.user_interference));
}

#[test]
fn downlink_bs_interference_transform() {
    let p = params();
    let t = rate_threshold(0.1);
    let a = analytic::laplace_ib_downlink(R, t, &p, &AnalyticOptions::default()).unwrap();
    within("L_Ib downlink", a, laplace_mc(Link::Downlink, s_param(p.p_b), |o| o.bs_interference));
}

#[test]
fn downlink_user_interference_transform() {
    let p = params();
    let t = rate_threshold(0.1);
    let a = analytic::laplace_iu_downlink(R, t, &p, &AnalyticOptions::default()).unwrap();
    within("L_Iu downlink", a, laplace_mc(Link::Downlink, s_param(p.p_b), |o| o.user_interference));
}

#[test]
fn outage_at_reference_point() {
    let p = params();
    let sim = SimConfig::default().with_trials(TRIALS);
    for link in [Link::Uplink, Link::Downlink] {
        let q = OutageQuery::new(0.1, p.clone(), Suppression::On, link);
        let a = analytic::outage(&q, &AnalyticOptions::default()).unwrap();
        let mc = estimate_outage(Architecture::ThreeNode, link, 0.1, &p, &sim).unwrap();
        let tol = (3.0 * mc.uncertainty).max(0.01);
        assert!((a.value - mc.value).abs() <= tol, "{link}: {} vs {}", a.value, mc.value);
    }
}

#[test]
fn unequal_powers_follow_the_simulator() {
    // With P_b != P_u the uplink desired power uses P_u; the simulator decides.
    let p = NetworkParams {
        p_b: 4.0,
        ..params()
    };
    let sim = SimConfig::default().with_trials(TRIALS);
    for link in [Link::Uplink, Link::Downlink] {
        let q = OutageQuery::new(0.1, p.clone(), Suppression::On, link);
        let a = analytic::outage(&q, &AnalyticOptions::default()).unwrap();
        let mc = estimate_outage(Architecture::ThreeNode, link, 0.1, &p, &sim).unwrap();
        let tol = (3.0 * mc.uncertainty).max(0.01);
        assert!((a.value - mc.value).abs() <= tol, "{link}: {} vs {}", a.value, mc.value);
    }
}

#[test]
fn general_path_loss_exponents() {
    let p = NetworkParams {
        alpha1: 3.5,
        alpha2: 3.0,
        sigma_n2: 1e-6,
        ..params()
    };
    let sim = SimConfig::default().with_trials(TRIALS);
    for link in [Link::Uplink, Link::Downlink] {
        let q = OutageQuery::new(0.5, p.clone(), Suppression::On, link);
        let a = analytic::outage(&q, &AnalyticOptions::default()).unwrap();
        let mc = estimate_outage(Architecture::ThreeNode, link, 0.5, &p, &sim).unwrap();
        let tol = (3.0 * mc.uncertainty).max(0.01);
        assert!((a.value - mc.value).abs() <= tol, "{link}: {} vs {}", a.value, mc.value);
    }
}

#[test]
fn sum_rate_at_reference_point() {
    let p = params();
    let a = analytic::sum_rate(&p, Suppression::On, &AnalyticOptions::default()).unwrap();
    let mc = estimate_sum_rate(Architecture::ThreeNode, &p, &SimConfig::default().with_trials(TRIALS))
        .unwrap();
    let tol = 3.0 * mc.total.uncertainty + a.total.uncertainty;
    assert!((a.total.value - mc.total.value).abs() <= tol, "{} vs {}", a.total.value, mc.total.value);
    assert!(a.total.value >= a.downlink.value && a.downlink.value >= 0.0);
    assert!(a.total.metadata.contains_key("suppression"));
    assert!(a.uplink.metadata.contains_key("truncation_rate"));
}
