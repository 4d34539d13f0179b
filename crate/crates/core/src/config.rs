//! Experiment configuration: a flat `key = value` text format, named presets,
//! and command-line overrides.
//!
//! Sources apply in order preset, file, flags. A preset fills every field; any
//! later key that changes a preset field is reported through `log`.
//!
//! ```text
//! # comment
//! preset = fig3
//! seed = 7
//! n_trials = 200
//! ```

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::analytics::AcfConvention;
use crate::atpf::AtpfSpec;
use crate::error::{Error, Result};
use crate::sim::{
    sweep, AcfSettings, Deployment, Emission, EventWindowPolicy, Scenario, SweepAxis, SweepResult, TrafficModel,
};
use crate::traffic::{MarkovParams, RateParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Baseline parameters with the event-density sweep.
    Table1Defaults,
    /// Bernoulli traffic, Monte Carlo against the closed form over event density.
    Fig3,
    /// Bernoulli and Markov traffic against `q`, two event densities.
    Fig4,
    /// Autocorrelation of the total rate for three values of `q`.
    Fig5,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Table1Defaults, Preset::Fig3, Preset::Fig4, Preset::Fig5];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Table1Defaults => "table1-defaults",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
        }
    }

    pub fn config(self) -> ExperimentConfig {
        let base = ExperimentConfig {
            preset: Some(self),
            ..ExperimentConfig::default()
        };
        match self {
            Preset::Table1Defaults | Preset::Fig3 => ExperimentConfig {
                sweep_axis: Some(SweepAxis::LambdaE),
                sweep_values: LAMBDA_E_GRID.to_vec(),
                ..base
            },
            Preset::Fig4 => ExperimentConfig {
                models: vec![ModelKind::Bernoulli, ModelKind::Markov],
                sweep_axis: Some(SweepAxis::Q),
                sweep_values: (0..10).map(|i| i as f64 / 10.0).collect(),
                series_axis: Some(SweepAxis::LambdaE),
                series_values: vec![1e-2, 1e-3],
                ..base
            },
            Preset::Fig5 => ExperimentConfig {
                lambda_m: 1e-2,
                lambda_e: 1e-2,
                models: vec![ModelKind::Markov],
                n_slots: 10_000,
                n_trials: 100,
                acf_max_lag: Some(100),
                series_axis: Some(SweepAxis::Q),
                series_values: vec![0.1, 0.5, 0.9],
                ..base
            },
        }
    }
}

/// Event densities of the baseline sweep, per m².
pub const LAMBDA_E_GRID: [f64; 7] = [1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0, 10.0];

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset '{s}' (table1-defaults, fig3, fig4, fig5)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Bernoulli,
    Markov,
    MarkovMatched,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Bernoulli => "bernoulli",
            ModelKind::Markov => "markov",
            ModelKind::MarkovMatched => "markov_matched",
        }
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "bernoulli" => Ok(ModelKind::Bernoulli),
            "markov" => Ok(ModelKind::Markov),
            "markov_matched" => Ok(ModelKind::MarkovMatched),
            _ => Err(format!("unknown model '{s}' (bernoulli, markov, markov_matched)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(format!("unknown format '{s}' (csv, json)")),
        }
    }
}

/// One `key = value` assignment and where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub origin: String,
}

impl Entry {
    pub fn new(key: impl Into<String>, value: impl Into<String>, origin: impl Into<String>) -> Self {
        Self {
            key: key.into(),
            value: value.into(),
            origin: origin.into(),
        }
    }
}

/// Splits config text into entries. Blank lines and `#` comments are skipped.
pub fn parse_entries(text: &str, source: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let origin = format!("{source}:{}", i + 1);
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            origin: origin.clone(),
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        out.push(Entry::new(key.trim(), value.trim(), origin));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub preset: Option<Preset>,
    pub lambda_m: f64,
    pub lambda_e: f64,
    pub cell_radius: f64,
    pub rates: RateParams,
    pub atpf: AtpfSpec,
    /// Each listed model runs as its own curve.
    pub models: Vec<ModelKind>,
    /// Holding parameter for the `markov` model when `q` is not swept.
    pub q: Option<f64>,
    pub n_slots: usize,
    pub n_trials: usize,
    pub event_window: EventWindowPolicy,
    pub seed: u64,
    pub deployment: Deployment,
    pub emission: Emission,
    pub acf_max_lag: Option<usize>,
    pub acf_convention: AcfConvention,
    pub sweep_axis: Option<SweepAxis>,
    pub sweep_values: Vec<f64>,
    /// Outer loop: one curve per value (and per model).
    pub series_axis: Option<SweepAxis>,
    pub series_values: Vec<f64>,
    /// `None` writes to standard output.
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ExperimentConfig {
    /// The baseline scenario at a single event density, without a preset.
    fn default() -> Self {
        let s = Scenario::table1();
        Self {
            preset: None,
            lambda_m: s.lambda_m,
            lambda_e: s.lambda_e,
            cell_radius: s.cell_radius,
            rates: s.rates,
            atpf: s.atpf,
            models: vec![ModelKind::Bernoulli],
            q: None,
            n_slots: s.n_slots,
            n_trials: s.n_trials,
            event_window: s.event_window,
            seed: s.seed,
            deployment: s.deployment,
            emission: s.emission,
            acf_max_lag: None,
            acf_convention: AcfConvention::default(),
            sweep_axis: None,
            sweep_values: Vec::new(),
            series_axis: None,
            series_values: Vec::new(),
            output: None,
            format: OutputFormat::Csv,
        }
    }
}

/// Keys that never count as overriding a preset.
const RUN_KEYS: [&str; 3] = ["seed", "output", "format"];

fn parse_num<T: FromStr>(v: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("'{v}': {e}"))
}

fn parse_list(v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',').map(|t| parse_num::<f64>(t.trim())).collect()
}

fn parse_axis(v: &str) -> std::result::Result<Option<SweepAxis>, String> {
    match v {
        "none" => Ok(None),
        "lambda_e" => Ok(Some(SweepAxis::LambdaE)),
        "q" => Ok(Some(SweepAxis::Q)),
        _ => Err(format!("unknown axis '{v}' (lambda_e, q, none)")),
    }
}

fn join(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    pub fn from_preset(preset: Preset) -> Self {
        preset.config()
    }

    /// Builds a config from entries applied in order, after the last `preset`
    /// entry (wherever it appears) has set the starting point.
    pub fn from_entries(entries: &[Entry]) -> Result<Self> {
        let preset_entry = entries.iter().rev().find(|e| e.key == "preset");
        let mut cfg = match preset_entry {
            Some(e) => e
                .value
                .parse::<Preset>()
                .map(Preset::config)
                .map_err(|message| Error::Config {
                    origin: e.origin.clone(),
                    message,
                })?,
            None => Self::default(),
        };
        for e in entries.iter().filter(|e| e.key != "preset") {
            let before = cfg.clone();
            cfg.set(&e.key, &e.value).map_err(|message| Error::Config {
                origin: e.origin.clone(),
                message,
            })?;
            if let Some(p) = cfg.preset {
                if !RUN_KEYS.contains(&e.key.as_str()) && cfg != before {
                    log::info!("{}: '{}' overrides preset {p}", e.origin, e.key);
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        Self::from_entries(&parse_entries(text, "config")?)
    }

    /// Reads an optional config file, then applies `overrides` on top.
    pub fn parse_config(path: Option<&Path>, overrides: &[Entry]) -> Result<Self> {
        let mut entries = match path {
            Some(p) => {
                let text = fs::read_to_string(p).map_err(|source| Error::Io {
                    path: p.to_path_buf(),
                    source,
                })?;
                parse_entries(&text, &p.display().to_string())?
            }
            None => Vec::new(),
        };
        entries.extend_from_slice(overrides);
        Self::from_entries(&entries)
    }

    /// Applies one key. Range checks that involve several keys wait for
    /// [`validate`](Self::validate).
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        match key {
            "lambda_m" => self.lambda_m = parse_num(value)?,
            "lambda_e" => self.lambda_e = parse_num(value)?,
            "cell_radius" => self.cell_radius = parse_num(value)?,
            "rate_regular" => self.rates.regular = parse_num(value)?,
            "rate_alarm" => self.rates.alarm = parse_num(value)?,
            "atpf" => self.atpf = value.parse().map_err(|e: Error| e.to_string())?,
            "atpf_table" => self.atpf = AtpfSpec::from_csv_path(value).map_err(|e| e.to_string())?,
            "model" => {
                self.models = value
                    .split(',')
                    .map(|m| m.trim().parse())
                    .collect::<std::result::Result<_, _>>()?
            }
            "q" => self.q = if value == "none" { None } else { Some(parse_num(value)?) },
            "n_slots" => self.n_slots = parse_num(value)?,
            "n_trials" => self.n_trials = parse_num(value)?,
            "event_window" => {
                self.event_window = match value.split_once(':') {
                    None if value == "auto" => EventWindowPolicy::default(),
                    Some(("auto", eps)) => EventWindowPolicy::Auto {
                        epsilon: parse_num(eps)?,
                    },
                    Some(("fixed", extent)) => EventWindowPolicy::Fixed {
                        extent: parse_num(extent)?,
                    },
                    _ => return Err(format!("'{value}': expected auto, auto:<epsilon> or fixed:<extent>")),
                }
            }
            "seed" => self.seed = parse_num(value)?,
            "device_count" => {
                self.deployment = if value == "poisson" {
                    Deployment::Poisson
                } else {
                    Deployment::FixedCount(parse_num(value)?)
                }
            }
            "emission" => {
                self.emission = match value {
                    "rate" => Emission::ExpectedRate,
                    "packets" => Emission::Packets,
                    _ => return Err(format!("'{value}': expected rate or packets")),
                }
            }
            "max_lag" => self.acf_max_lag = if value == "none" { None } else { Some(parse_num(value)?) },
            "acf_convention" => {
                self.acf_convention = match value {
                    "as_printed" => AcfConvention::AsPrinted,
                    "textbook" => AcfConvention::Textbook,
                    _ => return Err(format!("'{value}': expected as_printed or textbook")),
                }
            }
            "sweep_axis" => self.sweep_axis = parse_axis(value)?,
            "sweep_values" => {
                self.sweep_values = if value.is_empty() {
                    Vec::new()
                } else {
                    parse_list(value)?
                }
            }
            "series_axis" => self.series_axis = parse_axis(value)?,
            "series_values" => {
                self.series_values = if value.is_empty() {
                    Vec::new()
                } else {
                    parse_list(value)?
                }
            }
            "output" => self.output = if value == "-" { None } else { Some(PathBuf::from(value)) },
            "format" => self.format = value.parse()?,
            _ => return Err(format!("unknown key '{key}'")),
        }
        Ok(())
    }

    /// Checks every scenario this config would run.
    pub fn validate(&self) -> Result<()> {
        let err = |message: String| Error::Config {
            origin: "config".into(),
            message,
        };
        if self.models.is_empty() {
            return Err(err("model list is empty".into()));
        }
        let has_markov = self.models.contains(&ModelKind::Markov);
        let q_swept = self.sweep_axis == Some(SweepAxis::Q) || self.series_axis == Some(SweepAxis::Q);
        if let Some(q) = self.q {
            if !has_markov {
                return Err(err("q only applies to the markov model".into()));
            }
            MarkovParams::new(q)?;
        } else if has_markov && !q_swept {
            return Err(err("the markov model needs q, or a sweep or series over q".into()));
        }
        for (what, axis, values) in [
            ("sweep", self.sweep_axis, &self.sweep_values),
            ("series", self.series_axis, &self.series_values),
        ] {
            match (axis, values.is_empty()) {
                (Some(_), true) => return Err(err(format!("{what}_axis is set but {what}_values is empty"))),
                (None, false) => return Err(err(format!("{what}_values given without {what}_axis"))),
                _ => {}
            }
        }
        if self.sweep_axis.is_some() && self.sweep_axis == self.series_axis {
            return Err(err("sweep_axis and series_axis must differ".into()));
        }
        for scenario in self.scenarios()? {
            scenario.validate()?;
            for (axis, values) in self.axes() {
                for &v in values {
                    axis.apply(&scenario, v)?.validate()?;
                }
            }
        }
        Ok(())
    }

    fn axes(&self) -> impl Iterator<Item = (SweepAxis, &Vec<f64>)> {
        [
            self.sweep_axis.map(|a| (a, &self.sweep_values)),
            self.series_axis.map(|a| (a, &self.series_values)),
        ]
        .into_iter()
        .flatten()
    }

    /// One base scenario per model, before sweep and series values apply.
    pub fn scenarios(&self) -> Result<Vec<Scenario>> {
        self.models.iter().map(|&m| self.scenario_for(m)).collect()
    }

    pub fn scenario_for(&self, model: ModelKind) -> Result<Scenario> {
        let model = match model {
            ModelKind::Bernoulli => TrafficModel::Bernoulli,
            ModelKind::MarkovMatched => TrafficModel::MarkovMatched,
            ModelKind::Markov => {
                // A swept q replaces this placeholder before anything runs.
                let q = self
                    .q
                    .or_else(|| self.axes().find(|(a, _)| *a == SweepAxis::Q).map(|(_, v)| v[0]))
                    .unwrap_or(0.0);
                TrafficModel::Markov(MarkovParams::new(q)?)
            }
        };
        Ok(Scenario {
            lambda_m: self.lambda_m,
            lambda_e: self.lambda_e,
            cell_radius: self.cell_radius,
            rates: self.rates,
            atpf: self.atpf.clone(),
            model,
            n_slots: self.n_slots,
            n_trials: self.n_trials,
            event_window: self.event_window,
            seed: self.seed,
            deployment: self.deployment,
            emission: self.emission,
            acf: self.acf_max_lag.map(|max_lag| AcfSettings {
                max_lag,
                convention: self.acf_convention,
            }),
        })
    }

    /// Text that [`parse_str`](Self::parse_str) turns back into this config.
    pub fn to_config_text(&self) -> String {
        let axis = |a: Option<SweepAxis>| a.map_or("none", SweepAxis::name);
        let mut lines = Vec::new();
        let mut put = |k: &str, v: String| lines.push(format!("{k} = {v}").trim_end().to_string());
        if let Some(p) = self.preset {
            put("preset", p.name().into());
        }
        put("lambda_m", self.lambda_m.to_string());
        put("lambda_e", self.lambda_e.to_string());
        put("cell_radius", self.cell_radius.to_string());
        put("rate_regular", self.rates.regular.to_string());
        put("rate_alarm", self.rates.alarm.to_string());
        put("atpf", self.atpf.to_string());
        put(
            "model",
            self.models.iter().map(|m| m.name()).collect::<Vec<_>>().join(","),
        );
        put("q", self.q.map_or("none".into(), |q| q.to_string()));
        put("n_slots", self.n_slots.to_string());
        put("n_trials", self.n_trials.to_string());
        put(
            "event_window",
            match self.event_window {
                EventWindowPolicy::Auto { epsilon } => format!("auto:{epsilon}"),
                EventWindowPolicy::Fixed { extent } => format!("fixed:{extent}"),
            },
        );
        put("seed", self.seed.to_string());
        put(
            "device_count",
            match self.deployment {
                Deployment::Poisson => "poisson".into(),
                Deployment::FixedCount(n) => n.to_string(),
            },
        );
        put(
            "emission",
            match self.emission {
                Emission::ExpectedRate => "rate",
                Emission::Packets => "packets",
            }
            .into(),
        );
        put("max_lag", self.acf_max_lag.map_or("none".into(), |l| l.to_string()));
        put(
            "acf_convention",
            match self.acf_convention {
                AcfConvention::AsPrinted => "as_printed",
                AcfConvention::Textbook => "textbook",
            }
            .into(),
        );
        put("sweep_axis", axis(self.sweep_axis).into());
        put("sweep_values", join(&self.sweep_values));
        put("series_axis", axis(self.series_axis).into());
        put("series_values", join(&self.series_values));
        put(
            "output",
            self.output.as_ref().map_or("-".into(), |p| p.display().to_string()),
        );
        put(
            "format",
            match self.format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            }
            .into(),
        );
        lines.push(String::new());
        lines.join("\n")
    }

    /// Runs every curve: models × series values, each swept along the sweep
    /// axis (or at the configured event density when there is no sweep).
    pub fn run(&self) -> Result<Report> {
        self.validate()?;
        let (axis, values) = match self.sweep_axis {
            Some(a) => (a, self.sweep_values.clone()),
            None => (SweepAxis::LambdaE, vec![self.lambda_e]),
        };
        let series: Vec<Option<f64>> = match self.series_axis {
            Some(_) => self.series_values.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        let mut curves = Vec::new();
        for sv in series {
            for &model in &self.models {
                let mut template = self.scenario_for(model)?;
                let mut label = model.name().to_string();
                if let (Some(axis), Some(v)) = (self.series_axis, sv) {
                    template = axis.apply(&template, v)?;
                    label = format!("{label};{}={v}", axis.name());
                }
                log::info!("running {label} over {} {} values", values.len(), axis.name());
                curves.push(Curve {
                    label,
                    model,
                    series_value: sv,
                    result: sweep(&template, axis, &values),
                });
            }
        }
        Ok(Report {
            axis,
            series_axis: self.series_axis,
            curves,
        })
    }
}

/// Results for one model at one series value.
#[derive(Debug)]
pub struct Curve {
    pub label: String,
    pub model: ModelKind,
    pub series_value: Option<f64>,
    pub result: SweepResult,
}

#[derive(Debug)]
pub struct Report {
    pub axis: SweepAxis,
    pub series_axis: Option<SweepAxis>,
    pub curves: Vec<Curve>,
}

impl Report {
    pub fn is_partial(&self) -> bool {
        self.curves.iter().any(|c| c.result.is_partial())
    }
}
