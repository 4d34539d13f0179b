//! Load a preset, override a few keys the way a config file would, run it and
//! write CSV and JSON results into a temporary directory.

use mtc_traffic::config::{parse_entries, Entry, ExperimentConfig, OutputFormat, Preset};
use mtc_traffic::output::emit_results;

fn main() -> mtc_traffic::Result<()> {
    for p in Preset::ALL {
        let cfg = p.config();
        println!(
            "{:<16} models {:?}, sweep {:?} x{}, series {:?}",
            p.name(),
            cfg.models,
            cfg.sweep_axis,
            cfg.sweep_values.len(),
            cfg.series_axis
        );
    }

    let text = "preset = fig5\nn_trials = 10\nn_slots = 2000\nmax_lag = 20\n";
    let mut entries = parse_entries(text, "example.cfg")?;
    entries.push(Entry::new("seed", "42", "inline"));
    let mut cfg = ExperimentConfig::from_entries(&entries)?;
    println!("\nconfig as text:\n{}", cfg.to_config_text());

    let dir = std::env::temp_dir().join("mtc-traffic-example");
    std::fs::create_dir_all(&dir).map_err(|source| mtc_traffic::Error::Io {
        path: dir.clone(),
        source,
    })?;
    let report = cfg.run()?;
    cfg.output = Some(dir.join("fig5.csv"));
    for path in emit_results(&report, &cfg)? {
        println!("wrote {}", path.display());
    }
    cfg.output = Some(dir.join("fig5.json"));
    cfg.format = OutputFormat::Json;
    for path in emit_results(&report, &cfg)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
