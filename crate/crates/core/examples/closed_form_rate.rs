//! Mean total rate against event density, and the steady-state Markov
//! approximation for a few holding parameters.

use mtc_traffic::analytics::{approx_total_rate_markov, expected_total_rate};
use mtc_traffic::atpf::AtpfSpec;
use mtc_traffic::traffic::{MarkovParams, RateParams};

fn main() -> mtc_traffic::Result<()> {
    let atpf = AtpfSpec::exponential(1.0)?;
    let rates = RateParams::table1();
    let (lambda_m, radius) = (0.1, 20.0);

    println!(
        "{:>10} {:>10} {:>10} {:>10} {:>10}",
        "lambda_e", "bernoulli", "q=0.1", "q=0.5", "q=0.9"
    );
    for k in -10..=2 {
        let lambda_e = 10f64.powf(k as f64 / 2.0);
        let r = expected_total_rate(lambda_m, lambda_e, radius, &rates, &atpf)?;
        let markov: Vec<String> = [0.1, 0.5, 0.9]
            .iter()
            .map(|&q| {
                let v =
                    approx_total_rate_markov(lambda_m, lambda_e, radius, &rates, &atpf, MarkovParams::new(q).unwrap());
                format!("{:>10.4}", v.unwrap())
            })
            .collect();
        println!("{lambda_e:>10.1e} {:>10.4} {}", r.value, markov.join(" "));
    }
    Ok(())
}
