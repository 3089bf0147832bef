// Temporary calibration harness; deleted before release.
use netsample::pipeline::campaign::run_synthetic_campaign;
use netsample::pipeline::config::ExperimentConfig;
use netsample::samplers::SampleMethod;
use netsample::stats::{build_design_matrix, ols_fit, ResponseKind};

fn main() {
    for master in [20170403u64, 1, 7, 99, 12345, 555, 31337] {
        let t0 = std::time::Instant::now();
        let config = ExperimentConfig { master_seed: master, ..ExperimentConfig::default() };
        let result = run_synthetic_campaign(&config).unwrap();
        let err = |r: &netsample::metrics::MetricRecord| r.log_ncgr_minority.abs() + r.log_ncgr_majority.abs();

        let mut pass7 = true;
        for method in SampleMethod::ALL {
            let mean_at = |h: f64| {
                let vals: Vec<f64> = result.records.iter().filter(|r| r.method == method && (r.h - h).abs() < 1e-9).map(err).collect();
                vals.iter().sum::<f64>() / vals.len() as f64
            };
            if mean_at(0.25) <= mean_at(0.75) { pass7 = false; }
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
        let mut means = format!("rw {:.3}±{:.3}", rw_mean, rw_se);
        for method in [SampleMethod::Node, SampleMethod::Edge, SampleMethod::Snowball] {
            let (m, se) = stats_for(method);
            means.push_str(&format!(" {} {:.3}", method.name(), m));
            if rw_mean > m + (rw_se * rw_se + se * se).sqrt() { pass8 = false; }
        }

        let mut pass9 = true;
        for method in SampleMethod::ALL {
            let subset: Vec<_> = result.records.iter().filter(|r| r.method == method).cloned().collect();
            for kind in [ResponseKind::AbsLogNcgrSum, ResponseKind::BiasTopk] {
                let fit = ols_fit(&build_design_matrix(&subset, kind).unwrap()).unwrap();
                let want = matches!(method, SampleMethod::Node | SampleMethod::Snowball);
                let inter_ok = if want { fit.coefficients[3] > 0.0 && fit.t_stats[3].abs() >= 2.58 } else { fit.t_stats[3].abs() < 2.58 };
                if !(inter_ok && fit.t_stats[4] < -2.58 && fit.t_stats[5] >= 2.58) { pass9 = false; }
            }
        }
        println!("master {master}: 7={pass7} 8={pass8} 9={pass9} | {means} | {:?}", t0.elapsed());
    }
}
