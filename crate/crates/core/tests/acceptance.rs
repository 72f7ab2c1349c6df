//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;

use fdcell_core::analytic::{self, AnalyticOptions};
use fdcell_core::montecarlo::{
    draw_li_term, estimate_sum_rate, sample_nearest_distance, sample_ppp, simulate_link,
    uplink_sinr_trial, TrialStreams,
};
use fdcell_core::{
    antenna_gains, passive_suppression_fraction, rate_threshold, thinning_table, Architecture,
    LiAngleModel, Link, NetworkParams, Node, OutageQuery, SimConfig, Suppression,
};
use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TRIALS: u64 = 100_000;

type Outcome = Result<String, String>;

fn opts() -> AnalyticOptions {
    AnalyticOptions::default()
}

fn outage(p: &NetworkParams, rate: f64, s: Suppression, link: Link) -> f64 {
    analytic::outage(&OutageQuery::new(rate, p.clone(), s, link), &opts())
        .unwrap()
        .value
}

fn engine_grid() -> Outcome {
    let mut checked = 0;
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for m in [1, 2, 4, 8] {
        let base = NetworkParams::default().with_sectors(m);
        for link in [Link::Uplink, Link::Downlink] {
            let sim = SimConfig::default().with_trials(TRIALS).with_seed(1000 + u64::from(m));
            let samples = simulate_link(link, &base, &sim).map_err(|e| e.to_string())?;
            for sigma_l2 in [0.0, 1e-3, 1e-2, 1e-1] {
                let p = base.clone().with_sigma_l2(sigma_l2);
                for rate in [0.01, 0.1, 1.0] {
                    let a = outage(&p, rate, Suppression::On, link);
                    let mc = samples.outage_with_sigma_l2(rate, sigma_l2).unwrap();
                    let tol = (3.0 * mc.uncertainty).max(0.01);
                    let ratio = (a - mc.value).abs() / tol;
                    worst = worst.max(ratio);
                    checked += 1;
                    if ratio > 1.0 {
                        failures.push(format!(
                            "m={m} {link} sigma_l2={sigma_l2} R={rate}: analytic {a:.5} vs simulated {:.5}",
                            mc.value
                        ));
                    }
                }
            }
        }
    }
    let summary = format!("{checked} points, worst |diff|/tol = {worst:.3}");
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; {}", failures.join("; ")))
    }
}

fn eq19_values() -> Outcome {
    // Reference values from a 50-digit evaluation of the closed form.
    let cases = [(0.1, 0.080_064_940_568_791_85, 0.080066), (1.0, 0.261_250_259_487_150_88, 0.261249)];
    let mut notes = Vec::new();
    for (rate, oracle, printed) in cases {
        let v = analytic::asymptotic_outage_downlink(rate, 0.2).map_err(|e| e.to_string())?;
        if (v - oracle).abs() > 1e-6 {
            return Err(format!("R={rate}: {v} vs oracle {oracle}"));
        }
        notes.push(format!("R={rate}: {v:.9} (listed {printed}, off by {:.2e})", (v - printed).abs()));
    }
    let dense = NetworkParams { lambda: 1.0, ..NetworkParams::default() };
    let sparse = NetworkParams { lambda: 1e-6, ..NetworkParams::default() };
    let a = analytic::asymptotic_outage_downlink(0.3, dense.gamma_b).unwrap();
    let b = analytic::asymptotic_outage_downlink(0.3, sparse.gamma_b).unwrap();
    if a.to_bits() != b.to_bits() {
        return Err("value depends on lambda".into());
    }
    Ok(format!("{}; lambda-independent", notes.join(", ")))
}

fn asymptotic_consistency() -> Outcome {
    let mut out = Vec::new();
    for rate in [0.1, 1.0] {
        let limit = analytic::asymptotic_outage_downlink(rate, 0.2).unwrap();
        let gaps: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&m| {
                let p = NetworkParams::default().with_sectors(m);
                (outage(&p, rate, Suppression::On, Link::Downlink) - limit).abs()
            })
            .collect();
        if gaps[3] > 0.05 {
            return Err(format!("R={rate}: gap at m=64 is {}", gaps[3]));
        }
        if gaps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(format!("R={rate}: gaps not shrinking {gaps:?}"));
        }
        out.push(format!(
            "R={rate} gaps {}",
            gaps.iter().map(|g| format!("{g:.5}")).collect::<Vec<_>>().join(" > ")
        ));
    }
    Ok(out.join("; "))
}

fn suppression_reduction() -> Outcome {
    let p = NetworkParams::default().with_sigma_l2(0.01);
    let on = outage(&p, 0.1, Suppression::On, Link::Uplink);
    let off = outage(&p, 0.1, Suppression::Off, Link::Uplink);
    let side = outage(&p, 0.1, Suppression::SideLobeOnly, Link::Uplink);
    let reduction = (off - on) / off;
    let msg = format!(
        "on {on:.5}, off {off:.5}, reduction {:.1}% (side-lobe-only baseline {side:.5}: {:.1}%)",
        100.0 * reduction,
        100.0 * (side - on) / side
    );
    if (0.5..=0.85).contains(&reduction) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn sum_rate_limits() -> Outcome {
    let sim = SimConfig::default().with_trials(TRIALS).with_seed(77);
    let strong = NetworkParams::default().with_sigma_l2(1e8);
    let weak = NetworkParams::default().with_sigma_l2(1e-8);
    let err = |e: fdcell_core::Error| e.to_string();

    let a = analytic::sum_rate(&strong, Suppression::On, &opts()).map_err(err)?;
    let a_gap = (a.total.value - a.downlink.value) / a.downlink.value;
    let three = estimate_sum_rate(Architecture::ThreeNode, &strong, &sim).map_err(err)?;
    let mc_gap = (three.total.value - three.downlink.value) / three.downlink.value;
    let two = estimate_sum_rate(Architecture::TwoNode, &strong, &sim).map_err(err)?;
    let two_weak = estimate_sum_rate(Architecture::TwoNode, &weak, &sim).map_err(err)?;
    let three_weak = estimate_sum_rate(Architecture::ThreeNode, &weak, &sim).map_err(err)?;

    let msg = format!(
        "+80 dB: three-node total/downlink excess {:.3}% analytic, {:.3}% simulated; two-node {:.2e} bpcu; \
         -80 dB: two-node {:.4} >= three-node {:.4}",
        100.0 * a_gap,
        100.0 * mc_gap,
        two.total.value,
        two_weak.total.value,
        three_weak.total.value
    );
    let ok = a_gap <= 0.05
        && mc_gap <= 0.05
        && two.total.value < 0.1
        && two_weak.total.value >= three_weak.total.value;
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn invariant_suites() -> Outcome {
    let mut passed = Vec::new();
    let mut check = |name: &str, ok: bool| -> Result<(), String> {
        if ok {
            passed.push(name.to_owned());
            Ok(())
        } else {
            Err(format!("{name} violated"))
        }
    };

    // Antenna power normalization.
    let mut ok = true;
    for m in 1..=256u32 {
        for k in 0..=20 {
            let pat = antenna_gains(m, f64::from(k) / 20.0).unwrap();
            let mean = (pat.main_lobe() + f64::from(m - 1) * pat.side_lobe()) / f64::from(m);
            ok &= (mean - 1.0).abs() <= 4.0 * f64::EPSILON;
        }
    }
    check("antenna normalization", ok)?;

    // Thinning density conservation.
    let mut ok = true;
    for lambda in [1e-6, 1e-2, 0.3, 7.0, 807.667] {
        for mi in 1..=64u32 {
            for mj in [1u32, 2, 3, 8, 57, 64] {
                let t = thinning_table(lambda, &antenna_gains(mj, 0.2).unwrap(), &antenna_gains(mi, 0.2).unwrap())
                    .unwrap();
                ok &= t.total_density() == lambda;
            }
        }
    }
    check("thinning density conservation", ok)?;

    // Suppression fraction bounds, symmetry and extrema.
    let mut ok = true;
    let n = 20_000;
    for i in 1..n {
        let theta = -PI + 2.0 * PI * f64::from(i) / f64::from(n);
        let f = passive_suppression_fraction(theta).unwrap();
        ok &= ((-1.5f64).exp()..=1.0).contains(&f);
        ok &= f == passive_suppression_fraction(-theta).unwrap();
    }
    let peak = passive_suppression_fraction(0.0).unwrap();
    ok &= (peak - 1.0).abs() <= 4.0 * f64::EPSILON;
    ok &= (1..n).all(|i| {
        let theta = -PI + 2.0 * PI * f64::from(i) / f64::from(n);
        passive_suppression_fraction(theta).unwrap() <= peak
    });
    ok &= (passive_suppression_fraction(2.0 * PI / 3.0).unwrap() - (-1.5f64).exp()).abs() < 1e-15;
    ok &= passive_suppression_fraction(PI).is_err();
    check("suppression fraction bounds/symmetry/extrema", ok)?;

    // Laplace transforms lie in (0, 1], equal 1 at T = 0, decrease in T.
    let mut ok = true;
    for m in [1, 4, 16] {
        let p = NetworkParams::default().with_sectors(m).with_sigma_l2(0.01);
        for r in [0.5, 2.0, 5.0, 15.0] {
            let transforms: [&dyn Fn(f64) -> f64; 5] = [
                &|t| analytic::laplace_li_uplink(r, t, &p, Suppression::On).unwrap(),
                &|t| analytic::laplace_ib_uplink_normalized(r, t, &p, &opts()).unwrap(),
                &|t| analytic::laplace_iu_uplink(r, t, &p, &opts()).unwrap(),
                &|t| analytic::laplace_ib_downlink(r, t, &p, &opts()).unwrap(),
                &|t| analytic::laplace_iu_downlink(r, t, &p, &opts()).unwrap(),
            ];
            for l in transforms {
                ok &= l(0.0) == 1.0;
                let mut last = 1.0;
                for t in [0.01, 0.1, 1.0, 10.0] {
                    let v = l(t);
                    ok &= v > 0.0 && v <= last;
                    last = v;
                }
            }
        }
    }
    check("Laplace range and T=0 identity", ok)?;

    // Outage monotone in R and in sigma_l2.
    let mut ok = true;
    let p = NetworkParams::default();
    for link in [Link::Uplink, Link::Downlink] {
        let mut last = 0.0;
        for rate in [0.01, 0.05, 0.1, 0.3, 1.0, 2.0] {
            let v = outage(&p, rate, Suppression::On, link);
            ok &= (0.0..=1.0).contains(&v) && v >= last;
            last = v;
        }
    }
    let mut last = 0.0;
    for sigma_l2 in [0.0, 1e-4, 1e-3, 1e-2, 1e-1, 1.0] {
        let v = outage(&p.clone().with_sigma_l2(sigma_l2), 0.1, Suppression::On, Link::Uplink);
        ok &= v >= last;
        last = v;
    }
    check("outage monotone in R and sigma_l2", ok)?;

    // Suppression dominance: analytic and per-trial with common draws.
    let mut ok = true;
    for m in [2, 4, 8] {
        for sigma_l2 in [1e-3, 1e-2, 1e-1] {
            let p = NetworkParams::default().with_sectors(m).with_sigma_l2(sigma_l2);
            ok &= outage(&p, 0.1, Suppression::On, Link::Uplink)
                <= outage(&p, 0.1, Suppression::Off, Link::Uplink);
        }
    }
    let p = NetworkParams::default().with_sigma_l2(0.01);
    let on = SimConfig::default();
    let off = SimConfig::default().with_suppression(Suppression::Off);
    for t in 0..20_000 {
        let s = TrialStreams::new(5, t);
        ok &= uplink_sinr_trial(&p, &on, None, &s).unwrap().sinr()
            >= uplink_sinr_trial(&p, &off, None, &s).unwrap().sinr();
    }
    check("suppression dominance", ok)?;

    // Omnidirectional reduction.
    let mut ok = true;
    let omni = |gamma: f64| NetworkParams::default().with_sectors(1).with_gamma(gamma).with_sigma_l2(0.01);
    for link in [Link::Uplink, Link::Downlink] {
        let a = outage(&omni(0.2), 0.1, Suppression::On, link);
        let b = outage(&omni(0.9), 0.1, Suppression::Off, link);
        ok &= a.to_bits() == b.to_bits();
    }
    let sqrt_t = rate_threshold(0.1).sqrt();
    let classic = 1.0 - 1.0 / (1.0 + sqrt_t * (sqrt_t.atan() + PI / 2.0));
    ok &= (outage(&omni(0.2), 0.1, Suppression::On, Link::Downlink) - classic).abs() < 1e-8;
    let sim = SimConfig::default().with_trials(2_000);
    for link in [Link::Uplink, Link::Downlink] {
        let s = simulate_link(link, &omni(0.2), &sim).unwrap();
        ok &= s.outcomes.iter().all(|o| o.case_counts[1..] == [0, 0, 0]);
    }
    check("omnidirectional reduction", ok)?;

    // Seed determinism, including across thread counts.
    let p = NetworkParams::default();
    let sim = SimConfig::default().with_trials(5_000).with_seed(99);
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| simulate_link(Link::Uplink, &p, &sim).unwrap())
    };
    let (a, b, c) = (run(1), run(1), run(3));
    let bits = |s: &fdcell_core::montecarlo::LinkSamples| -> Vec<u64> {
        s.outcomes.iter().map(|o| o.sinr().to_bits()).collect()
    };
    check("seed determinism", bits(&a) == bits(&b) && bits(&a) == bits(&c) && a == c)?;

    // Standard error falls like n^-1/2.
    let ns = [1_000u64, 10_000, 100_000];
    let ses: Vec<f64> = ns
        .iter()
        .map(|&n| {
            let sim = SimConfig::default().with_trials(n).with_seed(n);
            simulate_link(Link::Downlink, &p, &sim).unwrap().outage(0.1).unwrap().uncertainty
        })
        .collect();
    let slope = (ses[2].ln() - ses[0].ln()) / ((ns[2] as f64).ln() - (ns[0] as f64).ln());
    check("stderr slope", (slope + 0.5).abs() <= 0.1)?;

    // Window sufficiency under doubling.
    let mut ok = true;
    let sim = SimConfig::default().with_trials(20_000).with_seed(3);
    let window = sim.window(p.lambda);
    for link in [Link::Uplink, Link::Downlink] {
        let base = simulate_link(link, &p, &sim).unwrap().outage(0.1).unwrap();
        let wide = simulate_link(link, &p, &sim.with_window_radius(2.0 * window))
            .unwrap()
            .outage(0.1)
            .unwrap();
        ok &= (base.value - wide.value).abs() < base.uncertainty;
    }
    check("window sufficiency", ok)?;

    Ok(format!("{} suites; stderr slope {slope:.3}", passed.len()))
}

fn distributional_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    let mut notes = Vec::new();

    let lambda: f64 = 1e-2;
    let n = 1_000_000;
    let draws: Vec<f64> = (0..n)
        .map(|_| sample_nearest_distance(lambda, rng.sample(Open01)).unwrap())
        .collect();
    let (mean, se) = mean_se(&draws);
    let want = 1.0 / (2.0 * lambda.sqrt());
    if (mean - want).abs() > 3.0 * se {
        return Err(format!("nearest distance mean {mean} vs {want}"));
    }
    notes.push(format!("nearest mean {mean:.4} vs {want:.4}"));

    let window = 30.0;
    let counts: Vec<f64> = (0..10_000)
        .map(|_| sample_ppp(lambda, window, &mut rng).unwrap().len() as f64)
        .collect();
    let (mean, se) = mean_se(&counts);
    let expect = lambda * PI * window * window;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (counts.len() as f64 - 1.0);
    let var_se = ((expect + 2.0 * expect * expect) / counts.len() as f64).sqrt();
    if (mean - expect).abs() > 3.0 * se || (var - expect).abs() > 5.0 * var_se {
        return Err(format!("PPP count mean {mean}, variance {var}, expected {expect}"));
    }
    notes.push(format!("PPP count mean {mean:.3}, var {var:.3} vs {expect:.3}"));

    for suppression in [Suppression::On, Suppression::Off, Suppression::SideLobeOnly] {
        let p = NetworkParams::default().with_sigma_l2(0.01);
        let draws: Vec<f64> = (0..n)
            .map(|_| draw_li_term(&p, suppression, &mut rng).unwrap())
            .collect();
        let (mean, se) = mean_se(&draws);
        let bs = p.antenna(Node::Bs).unwrap();
        let want = p.p_b * p.sigma_l2 * LiAngleModel::new(p.m_b).unwrap().mean_li_gain(&bs, suppression);
        if (mean - want).abs() > 3.0 * se {
            return Err(format!("LI mean ({suppression}) {mean} vs {want}"));
        }
    }
    notes.push("LI means match".into());
    Ok(notes.join("; "))
}

fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("engine cross-validation grid", engine_grid),
        ("asymptotic downlink spot values", eq19_values),
        ("asymptotic consistency", asymptotic_consistency),
        ("passive suppression gain at -20 dB", suppression_reduction),
        ("sum-rate limits", sum_rate_limits),
        ("invariant suites", invariant_suites),
        ("distributional oracles", distributional_oracles),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
