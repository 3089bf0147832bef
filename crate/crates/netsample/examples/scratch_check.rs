// Temporary calibration harness; deleted before release.
use netsample::pipeline::campaign::run_synthetic_campaign;
use netsample::pipeline::config::ExperimentConfig;
use netsample::samplers::SampleMethod;
use netsample::stats::{build_design_matrix, ols_fit, ResponseKind};

fn assess(name: &str, make: impl Fn(u64) -> ExperimentConfig) {
    let mut all_pass = true;
    let mut lines = Vec::new();
    for master in [20170403u64, 1, 7, 99, 12345] {
        let config = make(master);
        let result = run_synthetic_campaign(&config).unwrap();
        let err = |r: &netsample::metrics::MetricRecord| r.log_ncgr_minority.abs() + r.log_ncgr_majority.abs();

        let mut pass9 = true;
        let mut detail = String::new();
        for method in SampleMethod::ALL {
            let subset: Vec<_> = result.records.iter().filter(|r| r.method == method).cloned().collect();
            for kind in [ResponseKind::AbsLogNcgrSum, ResponseKind::BiasTopk] {
                let fit = ols_fit(&build_design_matrix(&subset, kind).unwrap()).unwrap();
                let want = matches!(method, SampleMethod::Node | SampleMethod::Snowball);
                let inter_ok = if want {
                    fit.coefficients[3] > 0.0 && fit.t_stats[3].abs() >= 2.58
                } else {
                    fit.t_stats[3].abs() < 2.58
                };
                if !(inter_ok && fit.t_stats[4] < -2.58 && fit.t_stats[5] >= 2.58) {
                    pass9 = false;
                }
                detail.push_str(&format!(
                    " {}{}:{:+.1}",
                    method.name().chars().next().unwrap(),
                    if kind == ResponseKind::BiasTopk { "b" } else { "n" },
                    fit.t_stats[3]
                ));
            }
        }

        let mut pass7 = true;
        for method in SampleMethod::ALL {
            let mean_at = |h: f64| {
                let vals: Vec<f64> = result.records.iter().filter(|r| r.method == method && (r.h - h).abs() < 1e-9).map(err).collect();
                vals.iter().sum::<f64>() / vals.len() as f64
            };
            if mean_at(0.25) <= mean_at(0.75) {
                pass7 = false;
            }
        }

        let stats_for = |method| {
            let vals: Vec<f64> = result.records.iter().filter(|r| r.method == method && r.f <= 0.2 + 1e-9).map(err).collect();
            let n = vals.len() as f64;
            let mean = vals.iter().sum::<f64>() / n;
            let sd = (vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)).sqrt();
            (mean, sd / n.sqrt())
        };
        let (rw_mean, rw_se) = stats_for(SampleMethod::RandomWalk);
        let mut pass8 = true;
        for method in [SampleMethod::Node, SampleMethod::Edge, SampleMethod::Snowball] {
            let (m, se) = stats_for(method);
            if rw_mean > m + (rw_se * rw_se + se * se).sqrt() {
                pass8 = false;
            }
        }
        if !(pass7 && pass8 && pass9) {
            all_pass = false;
        }
        lines.push(format!("  master {master}: 7={pass7} 8={pass8} 9={pass9} |{detail}"));
    }
    println!("== {name}: {}", if all_pass { "ALL PASS" } else { "fail" });
    for l in lines {
        println!("{l}");
    }
}

fn main() {
    assess("G1: h 0.05..0.95", |master| ExperimentConfig {
        h_values: vec![0.05, 0.25, 0.5, 0.75, 0.95],
        f_values: vec![0.1, 0.2, 0.35, 0.5],
        sample_fractions: vec![0.05, 0.1, 0.25, 0.5],
        k_values: vec![10, 25, 50, 100],
        networks_per_cell: 5,
        samples_per_network: 2,
        master_seed: master,
        ..ExperimentConfig::default()
    });
    assess("G2: f down to 0.05", |master| ExperimentConfig {
        h_values: vec![0.1, 0.25, 0.5, 0.75, 0.9],
        f_values: vec![0.05, 0.1, 0.2, 0.35, 0.5],
        sample_fractions: vec![0.05, 0.1, 0.25, 0.5],
        k_values: vec![10, 25, 50, 100],
        networks_per_cell: 4,
        samples_per_network: 2,
        master_seed: master,
        ..ExperimentConfig::default()
    });
    assess("G3: both extremes", |master| ExperimentConfig {
        h_values: vec![0.05, 0.25, 0.5, 0.75, 0.95],
        f_values: vec![0.05, 0.1, 0.2, 0.35, 0.5],
        sample_fractions: vec![0.05, 0.1, 0.25, 0.5],
        k_values: vec![10, 25, 50, 100],
        networks_per_cell: 4,
        samples_per_network: 2,
        master_seed: master,
        ..ExperimentConfig::default()
    });
}
