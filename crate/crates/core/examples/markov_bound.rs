//! Markov traffic against the holding parameter q: the Monte Carlo mean, the
//! steady-state approximation above it, and the q-independent Bernoulli mean.

use mtc_traffic::sim::{sweep, Scenario, SweepAxis, TrafficModel};
use mtc_traffic::traffic::MarkovParams;

fn main() -> mtc_traffic::Result<()> {
    let qs: Vec<f64> = (0..10).map(|i| i as f64 / 10.0).collect();
    for lambda_e in [1e-2, 1e-3] {
        let bernoulli = Scenario {
            lambda_e,
            n_trials: 200,
            ..Scenario::table1()
        };
        let markov = Scenario {
            model: TrafficModel::Markov(MarkovParams::new(0.5)?),
            ..bernoulli.clone()
        };
        let b = sweep(&bernoulli, SweepAxis::Q, &qs);
        let m = sweep(&markov, SweepAxis::Q, &qs);
        println!("lambda_e = {lambda_e}");
        println!("{:>5} {:>10} {:>10} {:>10}", "q", "bernoulli", "markov", "approx");
        for ((q, bp), mp) in qs.iter().zip(&b.points).zip(&m.points) {
            let bs = bp.outcome.as_ref().expect("valid point");
            let ms = mp.outcome.as_ref().expect("valid point");
            println!(
                "{q:>5.1} {:>10.4} {:>10.4} {:>10.4}",
                bs.mean_rate,
                ms.mean_rate,
                ms.approx_markov.unwrap_or(f64::NAN)
            );
        }
        println!();
    }
    Ok(())
}
