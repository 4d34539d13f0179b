//! Monte Carlo mean total rate for Bernoulli traffic over the event-density
//! grid, next to the closed form. Pass a trial count to change the default.

use mtc_traffic::config::LAMBDA_E_GRID;
use mtc_traffic::sim::{sweep, Scenario, SweepAxis};

fn main() {
    let n_trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let scenario = Scenario {
        n_trials,
        ..Scenario::table1()
    };
    let result = sweep(&scenario, SweepAxis::LambdaE, &LAMBDA_E_GRID);

    println!(
        "{:>9} {:>10} {:>8} {:>10} {:>7}",
        "lambda_e", "mc_mean", "stderr", "closed", "z"
    );
    for point in &result.points {
        match &point.outcome {
            Ok(s) => {
                let cf = s.closed_form.as_ref().map_or(f64::NAN, |c| c.value);
                let z = (s.mean_rate - cf) / s.std_error;
                println!(
                    "{:>9.0e} {:>10.4} {:>8.4} {:>10.4} {z:>7.2}",
                    point.value, s.mean_rate, s.std_error, cf
                );
            }
            Err(e) => println!("{:>9.0e} error: {e}", point.value),
        }
    }
}
