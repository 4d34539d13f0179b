//! Trial-averaged autocorrelation of the total rate for three holding
//! parameters. Larger q keeps devices in alarm longer and the correlation
//! decays more slowly.

use mtc_traffic::analytics::AcfConvention;
use mtc_traffic::sim::{run_experiment, AcfSettings, Scenario, TrafficModel};
use mtc_traffic::traffic::MarkovParams;

fn main() -> mtc_traffic::Result<()> {
    let lags = [0, 1, 2, 5, 10, 20, 50];
    println!(
        "{:>5} {}",
        "q",
        lags.map(|k| format!("{:>9}", format!("lag {k}"))).join("")
    );
    for q in [0.1, 0.5, 0.9] {
        let scenario = Scenario {
            lambda_m: 1e-2,
            lambda_e: 1e-2,
            model: TrafficModel::Markov(MarkovParams::new(q)?),
            n_slots: 5000,
            n_trials: 50,
            acf: Some(AcfSettings {
                max_lag: 50,
                convention: AcfConvention::AsPrinted,
            }),
            ..Scenario::table1()
        };
        let stats = run_experiment(&scenario)?;
        let acf = stats.acf.expect("ACF requested");
        let row: String = lags.iter().map(|&k| format!("{:>9.4}", acf.values[k])).collect();
        println!(
            "{q:>5} {row}   ({} constant trials skipped)",
            stats.degenerate_acf_trials
        );
    }
    Ok(())
}
