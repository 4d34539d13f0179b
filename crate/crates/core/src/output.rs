//! CSV and JSON result files.
//!
//! The rate table has one row per curve and axis value; autocorrelation runs
//! add a second table with one row per curve, axis value and lag. CSV output
//! goes to `<path>` and `<stem>.acf.csv`; JSON puts both tables in one
//! document next to the config that produced them.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::{ExperimentConfig, OutputFormat, Report};
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

pub const RATE_COLUMNS: [&str; 11] = [
    "series",
    "model",
    "axis_value",
    "mc_mean",
    "mc_stderr",
    "closed_form",
    "approx_markov",
    "n_trials",
    "n_slots",
    "truncation_warnings",
    "status",
];

pub const ACF_COLUMNS: [&str; 5] = ["series", "axis_value", "lag", "acf_mean", "acf_stderr"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub series: String,
    pub model: &'static str,
    pub axis_value: f64,
    pub mc_mean: Option<f64>,
    pub mc_stderr: Option<f64>,
    pub closed_form: Option<f64>,
    pub approx_markov: Option<f64>,
    pub n_trials: usize,
    pub n_slots: usize,
    pub truncation_warnings: usize,
    /// `ok`, or the error that stopped this point.
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcfRow {
    pub series: String,
    pub axis_value: f64,
    pub lag: usize,
    pub acf_mean: f64,
    pub acf_stderr: Option<f64>,
}

pub fn rate_rows(report: &Report, config: &ExperimentConfig) -> Vec<RateRow> {
    let mut rows = Vec::new();
    for curve in &report.curves {
        for point in &curve.result.points {
            let row = match &point.outcome {
                Ok(s) => RateRow {
                    series: curve.label.clone(),
                    model: curve.model.name(),
                    axis_value: point.value,
                    mc_mean: Some(s.mean_rate),
                    mc_stderr: s.std_error_defined.then_some(s.std_error),
                    closed_form: s.closed_form.as_ref().map(|c| c.value),
                    approx_markov: s.approx_markov,
                    n_trials: s.n_trials,
                    n_slots: s.n_slots,
                    truncation_warnings: s.truncation_warnings,
                    status: "ok".into(),
                },
                Err(e) => RateRow {
                    series: curve.label.clone(),
                    model: curve.model.name(),
                    axis_value: point.value,
                    mc_mean: None,
                    mc_stderr: None,
                    closed_form: None,
                    approx_markov: None,
                    n_trials: config.n_trials,
                    n_slots: config.n_slots,
                    truncation_warnings: 0,
                    status: format!("error: {e}"),
                },
            };
            rows.push(row);
        }
    }
    rows
}

pub fn acf_rows(report: &Report) -> Vec<AcfRow> {
    let mut rows = Vec::new();
    for curve in &report.curves {
        for point in &curve.result.points {
            let Some(acf) = point.outcome.as_ref().ok().and_then(|s| s.acf.as_ref()) else {
                continue;
            };
            for (i, (&lag, &value)) in acf.lags.iter().zip(&acf.values).enumerate() {
                rows.push(AcfRow {
                    series: curve.label.clone(),
                    axis_value: point.value,
                    lag,
                    acf_mean: value,
                    acf_stderr: acf.std_errors.as_ref().map(|se| se[i]),
                });
            }
        }
    }
    rows
}

fn cell(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

pub fn write_rates_csv<W: Write>(w: W, rows: &[RateRow]) -> csv::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(RATE_COLUMNS)?;
    for r in rows {
        out.write_record([
            r.series.clone(),
            r.model.to_string(),
            r.axis_value.to_string(),
            cell(r.mc_mean),
            cell(r.mc_stderr),
            cell(r.closed_form),
            cell(r.approx_markov),
            r.n_trials.to_string(),
            r.n_slots.to_string(),
            r.truncation_warnings.to_string(),
            r.status.clone(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_acf_csv<W: Write>(w: W, rows: &[AcfRow]) -> csv::Result<()> {
    let mut out = csv_writer(w);
    out.write_record(ACF_COLUMNS)?;
    for r in rows {
        out.write_record([
            r.series.clone(),
            r.axis_value.to_string(),
            r.lag.to_string(),
            r.acf_mean.to_string(),
            cell(r.acf_stderr),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    schema_version: u32,
    config: String,
    axis: &'static str,
    series_axis: Option<&'static str>,
    rates: &'a [RateRow],
    acf: &'a [AcfRow],
}

pub fn write_json<W: Write>(w: W, report: &Report, config: &ExperimentConfig) -> Result<()> {
    let rates = rate_rows(report, config);
    let acf = acf_rows(report);
    let doc = JsonDocument {
        schema_version: SCHEMA_VERSION,
        config: config.to_config_text(),
        axis: report.axis.name(),
        series_axis: report.series_axis.map(|a| a.name()),
        rates: &rates,
        acf: &acf,
    };
    let mut w = w;
    serde_json::to_writer_pretty(&mut w, &doc)?;
    writeln!(w).map_err(|source| Error::Io {
        path: PathBuf::from("<output>"),
        source,
    })?;
    Ok(())
}

/// `results.csv` becomes `results.acf.csv`.
pub fn acf_path(rates: &Path) -> PathBuf {
    let stem = rates
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    rates.with_file_name(format!("{stem}.acf.csv"))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes the report where the config says; returns the files written
/// (empty when printing to standard output).
pub fn emit_results(report: &Report, config: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let rates = rate_rows(report, config);
    let acf = acf_rows(report);
    let csv_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| Error::Csv { path, source }
    };
    match (&config.output, config.format) {
        (Some(path), OutputFormat::Csv) => {
            write_rates_csv(create(path)?, &rates).map_err(csv_err(path))?;
            let mut written = vec![path.clone()];
            if !acf.is_empty() {
                let acf_file = acf_path(path);
                write_acf_csv(create(&acf_file)?, &acf).map_err(csv_err(&acf_file))?;
                written.push(acf_file);
            }
            Ok(written)
        }
        (Some(path), OutputFormat::Json) => {
            let mut w = create(path)?;
            write_json(&mut w, report, config)?;
            w.flush().map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            Ok(vec![path.clone()])
        }
        (None, OutputFormat::Csv) => {
            let stdout = io::stdout().lock();
            let path = Path::new("<stdout>");
            write_rates_csv(stdout, &rates).map_err(csv_err(path))?;
            if !acf.is_empty() {
                println!();
                write_acf_csv(io::stdout().lock(), &acf).map_err(csv_err(path))?;
            }
            Ok(Vec::new())
        }
        (None, OutputFormat::Json) => {
            write_json(io::stdout().lock(), report, config)?;
            Ok(Vec::new())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentConfig;

    fn small(text: &str) -> (ExperimentConfig, Report) {
        let cfg = ExperimentConfig::parse_str(text).unwrap();
        let report = cfg.run().unwrap();
        (cfg, report)
    }

    #[test]
    fn rate_csv_layout() {
        let (cfg, report) = small("preset = fig3\nn_trials = 3\nn_slots = 2\nsweep_values = 0.001,0.1\n");
        let mut buf = Vec::new();
        write_rates_csv(&mut buf, &rate_rows(&report, &cfg)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], RATE_COLUMNS.join(","));
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[3], "");
        assert!(lines[1].starts_with("bernoulli,bernoulli,0.001,"));
        assert!(lines[1].ends_with(",3,2,0,ok"));
        assert!(!text.contains('\r'));
    }

    #[test]
    fn acf_rows_follow_lags() {
        let (_, report) = small("preset = fig5\nn_trials = 2\nn_slots = 50\nmax_lag = 3\nseries_values = 0.5\n");
        let rows = acf_rows(&report);
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].lag, 0);
        assert_eq!(rows[3].lag, 3);
        assert_eq!(rows[0].series, "markov;q=0.5");
    }

    #[test]
    fn json_has_schema_version() {
        let (cfg, report) = small("n_trials = 2\nn_slots = 2\n");
        let mut buf = Vec::new();
        write_json(&mut buf, &report, &cfg).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["rates"].as_array().unwrap().len(), 1);
        assert_eq!(v["axis"], "lambda_e");
        let back = ExperimentConfig::parse_str(v["config"].as_str().unwrap()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn acf_path_naming() {
        assert_eq!(acf_path(Path::new("out/run.csv")), PathBuf::from("out/run.acf.csv"));
        assert_eq!(acf_path(Path::new("run")), PathBuf::from("run.acf.csv"));
    }

    #[test]
    fn io_error_names_the_path() {
        let (mut cfg, report) = small("n_trials = 2\nn_slots = 2\n");
        cfg.output = Some(PathBuf::from("/nonexistent-dir/x/out.csv"));
        let e = emit_results(&report, &cfg).unwrap_err();
        assert!(e.to_string().contains("/nonexistent-dir/x/out.csv"));
        assert!(!e.is_validation());
    }
}
