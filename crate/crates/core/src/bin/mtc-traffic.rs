use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mtc_traffic::config::{Entry, ExperimentConfig};
use mtc_traffic::output::emit_results;

/// Run a traffic experiment from a preset, a config file and flag overrides.
///
/// Flags override the config file, which overrides the preset.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// table1-defaults, fig3, fig4 or fig5.
    #[arg(long)]
    preset: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    slots: Option<usize>,
    /// Device density, per m².
    #[arg(long)]
    lambda_m: Option<f64>,
    /// Event density, per m².
    #[arg(long)]
    lambda_e: Option<f64>,
    /// Cell radius, m.
    #[arg(long)]
    cell_radius: Option<f64>,
    #[arg(long)]
    rate_regular: Option<f64>,
    #[arg(long)]
    rate_alarm: Option<f64>,
    /// exponential:<scale>, disk_step:<threshold>:<level> or table:<r>:<p>,...
    #[arg(long)]
    atpf: Option<String>,
    /// Two-column CSV (distance, probability) with a header row.
    #[arg(long)]
    atpf_table: Option<PathBuf>,
    /// Comma-separated list of bernoulli, markov, markov_matched.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    q: Option<f64>,
    /// auto, auto:<epsilon> or fixed:<extent>.
    #[arg(long)]
    event_window: Option<String>,
    /// poisson or a fixed count.
    #[arg(long)]
    device_count: Option<String>,
    /// rate or packets.
    #[arg(long)]
    emission: Option<String>,
    /// Largest ACF lag, or none.
    #[arg(long)]
    max_lag: Option<String>,
    /// as_printed or textbook.
    #[arg(long)]
    acf_convention: Option<String>,
    /// lambda_e, q or none.
    #[arg(long)]
    sweep_axis: Option<String>,
    #[arg(long)]
    sweep_values: Option<String>,
    #[arg(long)]
    series_axis: Option<String>,
    #[arg(long)]
    series_values: Option<String>,
}

impl Cli {
    fn entries(&self) -> Vec<Entry> {
        let mut out = Vec::new();
        let mut push = |key: &str, flag: &str, value: Option<String>| {
            if let Some(v) = value {
                out.push(Entry::new(key, v, format!("--{flag}")));
            }
        };
        let s = |v: &Option<String>| v.clone();
        let d = |v: &Option<f64>| v.map(|x| x.to_string());
        push("preset", "preset", s(&self.preset));
        push("seed", "seed", self.seed.map(|x| x.to_string()));
        push("output", "out", self.out.as_ref().map(|p| p.display().to_string()));
        push("format", "format", s(&self.format));
        push("n_trials", "trials", self.trials.map(|x| x.to_string()));
        push("n_slots", "slots", self.slots.map(|x| x.to_string()));
        push("lambda_m", "lambda-m", d(&self.lambda_m));
        push("lambda_e", "lambda-e", d(&self.lambda_e));
        push("cell_radius", "cell-radius", d(&self.cell_radius));
        push("rate_regular", "rate-regular", d(&self.rate_regular));
        push("rate_alarm", "rate-alarm", d(&self.rate_alarm));
        push("atpf", "atpf", s(&self.atpf));
        push(
            "atpf_table",
            "atpf-table",
            self.atpf_table.as_ref().map(|p| p.display().to_string()),
        );
        push("model", "model", s(&self.model));
        push("q", "q", d(&self.q));
        push("event_window", "event-window", s(&self.event_window));
        push("device_count", "device-count", s(&self.device_count));
        push("emission", "emission", s(&self.emission));
        push("max_lag", "max-lag", s(&self.max_lag));
        push("acf_convention", "acf-convention", s(&self.acf_convention));
        push("sweep_axis", "sweep-axis", s(&self.sweep_axis));
        push("sweep_values", "sweep-values", s(&self.sweep_values));
        push("series_axis", "series-axis", s(&self.series_axis));
        push("series_values", "series-values", s(&self.series_values));
        out
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let result = ExperimentConfig::parse_config(cli.config.as_deref(), &cli.entries())
        .and_then(|cfg| cfg.run().map(|report| (cfg, report)))
        .and_then(|(cfg, report)| {
            let files = emit_results(&report, &cfg)?;
            Ok((report.is_partial(), files))
        });
    match result {
        Ok((partial, files)) => {
            for f in files {
                log::info!("wrote {}", f.display());
            }
            if partial {
                log::warn!("some sweep points failed; see the status column");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
