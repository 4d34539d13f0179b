//! One two-state device: steady state, holding times and the geometric decay
//! of its state autocorrelation.

use mtc_traffic::analytics::{sample_autocovariance_with, AcfConvention};
use mtc_traffic::rng::{stream, StreamRole};
use mtc_traffic::traffic::{markov_transition_matrix, sample_markov_states, steady_state, MarkovParams};

fn main() -> mtc_traffic::Result<()> {
    let p = 0.2;
    for q in [0.1, 0.5, 0.9] {
        let mp = MarkovParams::new(q)?;
        let m = markov_transition_matrix(p, mp)?;
        let pi = steady_state(p, mp)?;
        let seq = sample_markov_states(p, mp, 200_000, 0, &mut stream(11, 0, StreamRole::States))?;
        let runs = seq.alarm_runs();
        let mean_run = runs.iter().sum::<usize>() as f64 / runs.len() as f64;
        let x: Vec<f64> = seq.states.iter().map(|s| f64::from(u8::from(s.is_alarm()))).collect();
        let acf = sample_autocovariance_with(&x, 3, AcfConvention::Textbook)?;

        println!("q = {q}: P = {:?}", m.0);
        println!(
            "  π_A = {:.4}, observed alarm fraction {:.4}",
            pi.alarm,
            seq.alarm_fraction()
        );
        println!(
            "  mean holding time {:.3}, observed {mean_run:.3}",
            mp.mean_holding_time()
        );
        for k in 1..=3 {
            println!(
                "  lag {k}: ACF {:+.4}, (q - p)^k = {:+.4}",
                acf.values[k],
                (q - p).powi(k as i32)
            );
        }
    }
    Ok(())
}
