use std::f64::consts::PI;

use mtc_traffic::config::{ExperimentConfig, Preset};
use mtc_traffic::sim::{run_experiment, sweep, Scenario, SweepAxis, TrafficModel};
use mtc_traffic::traffic::MarkovParams;

fn small() -> Scenario {
    Scenario {
        n_trials: 60,
        n_slots: 20,
        ..Scenario::table1()
    }
}

#[test]
fn identical_scenarios_give_identical_stats() {
    let s = Scenario {
        model: TrafficModel::Markov(MarkovParams::new(0.7).unwrap()),
        ..small()
    };
    assert_eq!(run_experiment(&s).unwrap(), run_experiment(&s).unwrap());
    let other = Scenario { seed: 99, ..s.clone() };
    assert_ne!(
        run_experiment(&s).unwrap().mean_rate,
        run_experiment(&other).unwrap().mean_rate
    );
}

#[test]
fn single_value_sweep_matches_experiment() {
    let s = small();
    for axis in [SweepAxis::LambdaE, SweepAxis::Q] {
        let value = if axis == SweepAxis::Q { 0.3 } else { s.lambda_e };
        let sw = sweep(&s, axis, &[value]);
        assert_eq!(sw.points[0].outcome.as_ref().unwrap(), &run_experiment(&s).unwrap());
    }
}

#[test]
fn saturation_endpoints() {
    let s = Scenario {
        n_trials: 200,
        ..small()
    };
    let sw = sweep(&s, SweepAxis::LambdaE, &[1e-5, 10.0]);
    let mass = 0.1 * PI * 400.0;
    let low = sw.points[0].outcome.as_ref().unwrap().mean_rate;
    let high = sw.points[1].outcome.as_ref().unwrap().mean_rate;
    assert!((low / (0.01 * mass) - 1.0).abs() < 0.03, "{low}");
    assert!((high / mass - 1.0).abs() < 0.01, "{high}");
}

#[test]
fn bernoulli_ignores_q() {
    let s = Scenario {
        n_trials: 200,
        ..small()
    };
    let sw = sweep(&s, SweepAxis::Q, &[0.0, 0.3, 0.6, 0.9]);
    let target = 0.1 * PI * 400.0 * (1.0 - 0.99 * (-0.02 * PI).exp());
    for p in &sw.points {
        let st = p.outcome.as_ref().unwrap();
        assert_eq!(
            st.closed_form.as_ref().unwrap().value,
            sw.points[0]
                .outcome
                .as_ref()
                .unwrap()
                .closed_form
                .as_ref()
                .unwrap()
                .value
        );
        assert!((st.mean_rate - target).abs() <= 4.0 * st.std_error);
        assert!(st.approx_markov.is_none());
    }
}

#[test]
fn failed_points_do_not_stop_the_sweep() {
    let s = small();
    let sw = sweep(&s, SweepAxis::LambdaE, &[0.01, -1.0, f64::NAN, 0.02]);
    assert!(sw.is_partial());
    let ok: Vec<bool> = sw.points.iter().map(|p| p.outcome.is_ok()).collect();
    assert_eq!(ok, vec![true, false, false, true]);
    assert!(sw.points[1].outcome.as_ref().unwrap_err().is_validation());
}

#[test]
fn doubling_trials_shrinks_std_error() {
    // Averaged over several seeds to damp the noise in each SE estimate.
    let mut ratios = Vec::new();
    for seed in 1..=6 {
        let a = run_experiment(&Scenario {
            seed,
            n_trials: 100,
            ..small()
        })
        .unwrap();
        let b = run_experiment(&Scenario {
            seed,
            n_trials: 200,
            ..small()
        })
        .unwrap();
        ratios.push(b.std_error / a.std_error);
    }
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let target = 0.5f64.sqrt();
    assert!((mean / target - 1.0).abs() < 0.2, "{ratios:?}");
}

#[test]
fn markov_mean_stays_below_approximation() {
    for q in [0.1, 0.5, 0.9] {
        let s = Scenario {
            model: TrafficModel::Markov(MarkovParams::new(q).unwrap()),
            n_trials: 200,
            ..small()
        };
        let st = run_experiment(&s).unwrap();
        assert!(st.mean_rate <= st.approx_markov.unwrap() + 4.0 * st.std_error, "q={q}");
    }
}

#[test]
fn fig4_report_shape() {
    let mut cfg = ExperimentConfig::from_preset(Preset::Fig4);
    cfg.n_trials = 3;
    cfg.n_slots = 2;
    let report = cfg.run().unwrap();
    let labels: Vec<&str> = report.curves.iter().map(|c| c.label.as_str()).collect();
    assert_eq!(
        labels,
        [
            "bernoulli;lambda_e=0.01",
            "markov;lambda_e=0.01",
            "bernoulli;lambda_e=0.001",
            "markov;lambda_e=0.001"
        ]
    );
    assert!(report.curves.iter().all(|c| c.result.points.len() == 10));
}
