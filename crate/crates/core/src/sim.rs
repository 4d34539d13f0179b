//! Monte Carlo orchestration.
//!
//! A trial draws one device realization in the cell and one event realization
//! on the event window, computes every device's alarm probability once (events
//! are static), then runs the per-device state process for `n_slots` slots and
//! records the total rate per slot. Trials own their random streams, so they
//! run in parallel and reduce in trial order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::alarm_field::{field_for_realization_with_tolerance, required_event_window, DEFAULT_TRUNCATION_EPSILON};
use crate::analytics::{
    approx_total_rate_markov, averaged_acf, expected_total_rate, sample_autocovariance_with, AcfConvention,
    AcfEstimate, ClosedFormRate,
};
use crate::atpf::AtpfSpec;
use crate::error::{ensure_non_negative, ensure_positive, Error, Result};
use crate::point_process::{sample_fixed_count, sample_ppp, Point, Window};
use crate::rng::{StreamKey, StreamRole, MAX_POINTS, MAX_TRIALS};
use crate::stats::mean_and_std_error;
use crate::traffic::{bernoulli_alarms, markov_alarms, packetize, MarkovParams, RateParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TrafficModel {
    /// i.i.d. Bernoulli states with per-device probability `p_x`.
    Bernoulli,
    /// Two-state Markov chain with a common holding parameter.
    Markov(MarkovParams),
    /// Markov chain with each device's `q` set to its own `p_x`; equal in law
    /// to the Bernoulli model.
    MarkovMatched,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EventWindowPolicy {
    /// Disk reaching the truncation radius for tolerance `epsilon` beyond the cell.
    Auto { epsilon: f64 },
    /// Square of side `extent` centered on the cell.
    Fixed { extent: f64 },
}

impl Default for EventWindowPolicy {
    fn default() -> Self {
        EventWindowPolicy::Auto {
            epsilon: DEFAULT_TRUNCATION_EPSILON,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Deployment {
    /// Poisson device count with mean `λ_M π R²`.
    #[default]
    Poisson,
    /// Exactly this many devices, i.i.d. uniform in the cell.
    FixedCount(usize),
}

/// How a device's state becomes traffic in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Emission {
    /// The state's rate itself (expected packets per slot).
    #[default]
    ExpectedRate,
    /// Integer packets drawn by [`packetize`].
    Packets,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AcfSettings {
    pub max_lag: usize,
    pub convention: AcfConvention,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    /// Device density, per m².
    pub lambda_m: f64,
    /// Event density, per m².
    pub lambda_e: f64,
    /// Cell radius, m.
    pub cell_radius: f64,
    pub rates: RateParams,
    pub atpf: AtpfSpec,
    pub model: TrafficModel,
    pub n_slots: usize,
    pub n_trials: usize,
    pub event_window: EventWindowPolicy,
    pub seed: u64,
    pub deployment: Deployment,
    pub emission: Emission,
    pub acf: Option<AcfSettings>,
}

pub const DEFAULT_TRIALS: usize = 500;
pub const DEFAULT_SLOTS: usize = 200;
pub const DEFAULT_SEED: u64 = 1;

impl Scenario {
    /// Baseline parameters: λ_M = 0.1 /m², R = 20 m, R_A = 1, R_R = 0.01,
    /// exponential ATPF with unit scale, Bernoulli traffic, λ_E = 0.01 /m².
    pub fn table1() -> Self {
        Self {
            lambda_m: 0.1,
            lambda_e: 1e-2,
            cell_radius: 20.0,
            rates: RateParams::table1(),
            atpf: AtpfSpec::exponential(1.0).expect("unit scale is valid"),
            model: TrafficModel::Bernoulli,
            n_slots: DEFAULT_SLOTS,
            n_trials: DEFAULT_TRIALS,
            event_window: EventWindowPolicy::default(),
            seed: DEFAULT_SEED,
            deployment: Deployment::Poisson,
            emission: Emission::ExpectedRate,
            acf: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_non_negative("lambda_m", self.lambda_m)?;
        ensure_non_negative("lambda_e", self.lambda_e)?;
        ensure_positive("cell_radius", self.cell_radius)?;
        RateParams::new(self.rates.regular, self.rates.alarm)?;
        if let TrafficModel::Markov(mp) = self.model {
            MarkovParams::new(mp.q())?;
        }
        if self.n_slots == 0 {
            return Err(Error::invalid("n_slots", "need at least one slot"));
        }
        if self.n_trials == 0 || self.n_trials as u64 >= MAX_TRIALS {
            return Err(Error::invalid("n_trials", format!("{} is out of range", self.n_trials)));
        }
        match self.event_window {
            EventWindowPolicy::Auto { epsilon } => {
                ensure_positive("truncation epsilon", epsilon)?;
            }
            EventWindowPolicy::Fixed { extent } => {
                ensure_positive("event window extent", extent)?;
            }
        }
        if let Some(acf) = self.acf {
            if self.n_slots <= acf.max_lag + 1 {
                return Err(Error::invalid(
                    "max_lag",
                    format!("{} slots cannot support lag {}", self.n_slots, acf.max_lag),
                ));
            }
        }
        Ok(())
    }

    pub fn cell(&self) -> Result<Window> {
        Window::disk(Point::ORIGIN, self.cell_radius)
    }

    /// The window events are drawn on under the configured policy.
    pub fn event_window(&self) -> Result<Window> {
        let cell = self.cell()?;
        match self.event_window {
            EventWindowPolicy::Auto { epsilon } => required_event_window(&cell, &self.atpf, self.lambda_e, epsilon),
            EventWindowPolicy::Fixed { extent } => Window::square(cell.reference_point(), extent),
        }
    }

    fn truncation_epsilon(&self) -> f64 {
        match self.event_window {
            EventWindowPolicy::Auto { epsilon } => epsilon,
            EventWindowPolicy::Fixed { .. } => DEFAULT_TRUNCATION_EPSILON,
        }
    }

    pub fn closed_form(&self) -> Result<ClosedFormRate> {
        expected_total_rate(self.lambda_m, self.lambda_e, self.cell_radius, &self.rates, &self.atpf)
    }

    /// Steady-state approximation, for the common-`q` Markov model only.
    pub fn approx_markov(&self) -> Result<Option<f64>> {
        match self.model {
            TrafficModel::Markov(mp) => approx_total_rate_markov(
                self.lambda_m,
                self.lambda_e,
                self.cell_radius,
                &self.rates,
                &self.atpf,
                mp,
            )
            .map(Some),
            _ => Ok(None),
        }
    }
}

/// Total rate per slot for one trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSeries {
    pub trial_index: usize,
    pub values: Vec<f64>,
    pub device_count: usize,
    pub event_count: usize,
    /// False when the event window was too small for the truncation tolerance.
    pub truncation_sound: bool,
}

impl RateSeries {
    pub fn time_average(&self) -> f64 {
        crate::stats::mean(&self.values)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    /// Time- and trial-averaged total rate, packets/slot.
    pub mean_rate: f64,
    /// Standard error of `mean_rate` across trials; zero when undefined.
    pub std_error: f64,
    /// False for a single trial, where no spread can be estimated.
    pub std_error_defined: bool,
    pub n_trials: usize,
    pub n_slots: usize,
    pub mean_device_count: f64,
    pub closed_form: Option<ClosedFormRate>,
    pub approx_markov: Option<f64>,
    pub acf: Option<AcfEstimate>,
    /// Trials left out of the ACF average because their series was constant.
    pub degenerate_acf_trials: usize,
    /// Trials whose event window violated the truncation tolerance.
    pub truncation_warnings: usize,
}

pub fn run_trial(scenario: &Scenario, trial_index: usize) -> Result<RateSeries> {
    scenario.validate()?;
    let event_window = scenario.event_window()?;
    simulate_trial(scenario, &event_window, 0, trial_index)
}

fn simulate_trial(scenario: &Scenario, event_window: &Window, point: u64, trial: usize) -> Result<RateSeries> {
    let key = |role| StreamKey::new(scenario.seed, point, trial as u64, role).rng();
    let cell = scenario.cell()?;

    let devices = match scenario.deployment {
        Deployment::Poisson => sample_ppp(scenario.lambda_m, &cell, &mut key(StreamRole::Devices))?,
        Deployment::FixedCount(n) => sample_fixed_count(n, &cell, &mut key(StreamRole::Devices)),
    };
    let events = sample_ppp(scenario.lambda_e, event_window, &mut key(StreamRole::Events))?;
    let field = field_for_realization_with_tolerance(&devices, &events, &scenario.atpf, scenario.truncation_epsilon())?;

    let n = scenario.n_slots;
    let RateParams { regular, alarm } = scenario.rates;
    let mut totals = vec![0.0; n];
    let mut state_rng = key(StreamRole::States);
    let mut packet_rng = key(StreamRole::Packets);
    for &p in &field.per_device_p {
        let alarms: Box<dyn Iterator<Item = bool>> = match scenario.model {
            TrafficModel::Bernoulli => Box::new(bernoulli_alarms(p, &mut state_rng)),
            TrafficModel::Markov(mp) => Box::new(markov_alarms(p, mp.q(), &mut state_rng)),
            TrafficModel::MarkovMatched => Box::new(markov_alarms(p, p, &mut state_rng)),
        };
        for (total, is_alarm) in totals.iter_mut().zip(alarms.take(n)) {
            let rate = if is_alarm { alarm } else { regular };
            *total += match scenario.emission {
                Emission::ExpectedRate => rate,
                Emission::Packets => packetize(rate, &mut packet_rng) as f64,
            };
        }
    }
    Ok(RateSeries {
        trial_index: trial,
        values: totals,
        device_count: devices.len(),
        event_count: events.len(),
        truncation_sound: field.is_truncation_sound(),
    })
}

struct TrialSummary {
    mean: f64,
    devices: usize,
    acf: Option<AcfEstimate>,
    degenerate: bool,
    sound: bool,
}

pub fn run_experiment(scenario: &Scenario) -> Result<SummaryStats> {
    run_point(scenario, 0)
}

/// Runs all trials of `scenario` on the streams of sweep point `point`.
fn run_point(scenario: &Scenario, point: u64) -> Result<SummaryStats> {
    scenario.validate()?;
    if point >= MAX_POINTS {
        return Err(Error::invalid("sweep", "too many sweep points"));
    }
    let event_window = scenario.event_window()?;
    let trials: Vec<TrialSummary> = (0..scenario.n_trials)
        .into_par_iter()
        .map(|t| {
            let series = simulate_trial(scenario, &event_window, point, t)?;
            let (acf, degenerate) = match scenario.acf {
                Some(cfg) => match sample_autocovariance_with(&series.values, cfg.max_lag, cfg.convention) {
                    Ok(est) => (Some(est), false),
                    Err(Error::DegenerateSeries) => (None, true),
                    Err(e) => return Err(e),
                },
                None => (None, false),
            };
            Ok(TrialSummary {
                mean: series.time_average(),
                devices: series.device_count,
                acf,
                degenerate,
                sound: series.truncation_sound,
            })
        })
        .collect::<Result<_>>()?;

    let means: Vec<f64> = trials.iter().map(|t| t.mean).collect();
    let (mean_rate, se) = mean_and_std_error(&means);
    let device_counts: Vec<f64> = trials.iter().map(|t| t.devices as f64).collect();
    let estimates: Vec<AcfEstimate> = trials.iter().filter_map(|t| t.acf.clone()).collect();
    let acf = if estimates.is_empty() {
        None
    } else {
        Some(averaged_acf(&estimates)?)
    };
    Ok(SummaryStats {
        mean_rate,
        std_error: se.unwrap_or(0.0),
        std_error_defined: se.is_some(),
        n_trials: scenario.n_trials,
        n_slots: scenario.n_slots,
        mean_device_count: crate::stats::mean(&device_counts),
        closed_form: Some(scenario.closed_form()?),
        approx_markov: scenario.approx_markov()?,
        acf,
        degenerate_acf_trials: trials.iter().filter(|t| t.degenerate).count(),
        truncation_warnings: trials.iter().filter(|t| !t.sound).count(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepAxis {
    LambdaE,
    Q,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::LambdaE => "lambda_e",
            SweepAxis::Q => "q",
        }
    }

    /// Copy of `template` with this axis set to `value`. A `q` value leaves
    /// Bernoulli and matched-Markov models unchanged.
    pub fn apply(self, template: &Scenario, value: f64) -> Result<Scenario> {
        let mut s = template.clone();
        match self {
            SweepAxis::LambdaE => s.lambda_e = ensure_non_negative("lambda_e", value)?,
            SweepAxis::Q => {
                let mp = MarkovParams::new(value)?;
                if let TrafficModel::Markov(_) = s.model {
                    s.model = TrafficModel::Markov(mp);
                }
            }
        }
        Ok(s)
    }
}

#[derive(Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: Result<SummaryStats>,
}

#[derive(Debug)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    /// True when at least one point failed.
    pub fn is_partial(&self) -> bool {
        self.points.iter().any(|p| p.outcome.is_err())
    }
}

/// One experiment per value, in input order; point `i` uses stream offset `i`,
/// so a one-value sweep reproduces [`run_experiment`].
pub fn sweep(template: &Scenario, axis: SweepAxis, values: &[f64]) -> SweepResult {
    let points = values
        .iter()
        .enumerate()
        .map(|(i, &value)| SweepPoint {
            value,
            outcome: axis.apply(template, value).and_then(|s| run_point(&s, i as u64)),
        })
        .collect();
    SweepResult { axis, points }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(lambda_e: f64) -> Scenario {
        Scenario {
            lambda_e,
            n_trials: 40,
            n_slots: 20,
            ..Scenario::table1()
        }
    }

    #[test]
    fn no_devices_no_traffic() {
        let s = Scenario {
            lambda_m: 0.0,
            ..quick(1e-2)
        };
        let series = run_trial(&s, 0).unwrap();
        assert_eq!(series.device_count, 0);
        assert!(series.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn no_events_means_regular_only() {
        let s = quick(0.0);
        for t in 0..5 {
            let series = run_trial(&s, t).unwrap();
            let expected = series.device_count as f64 * 0.01;
            assert!(series.values.iter().all(|v| (v - expected).abs() < 1e-12));
            assert_eq!(series.event_count, 0);
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let s = quick(1e-2);
        assert_eq!(run_trial(&s, 3).unwrap(), run_trial(&s, 3).unwrap());
        assert_ne!(run_trial(&s, 3).unwrap(), run_trial(&s, 4).unwrap());
        assert_eq!(run_experiment(&s).unwrap(), run_experiment(&s).unwrap());
    }

    #[test]
    fn single_trial_single_slot() {
        let s = Scenario {
            n_trials: 1,
            n_slots: 1,
            ..quick(1e-2)
        };
        let stats = run_experiment(&s).unwrap();
        let series = run_trial(&s, 0).unwrap();
        assert_eq!(stats.mean_rate, series.values[0]);
        assert_eq!(stats.std_error, 0.0);
        assert!(!stats.std_error_defined);
    }

    #[test]
    fn mean_tracks_closed_form() {
        let s = Scenario {
            n_trials: 200,
            ..quick(1e-2)
        };
        let stats = run_experiment(&s).unwrap();
        let cf = stats.closed_form.unwrap().value;
        assert!(
            (stats.mean_rate - cf).abs() <= 4.0 * stats.std_error,
            "{} vs {cf}",
            stats.mean_rate
        );
        assert_eq!(stats.truncation_warnings, 0);
    }

    #[test]
    fn invalid_scenarios() {
        let bad = [
            Scenario {
                n_slots: 0,
                ..quick(0.1)
            },
            Scenario {
                n_trials: 0,
                ..quick(0.1)
            },
            Scenario {
                lambda_m: -1.0,
                ..quick(0.1)
            },
            Scenario {
                cell_radius: 0.0,
                ..quick(0.1)
            },
            Scenario {
                event_window: EventWindowPolicy::Fixed { extent: 0.0 },
                ..quick(0.1)
            },
            Scenario {
                acf: Some(AcfSettings {
                    max_lag: 19,
                    convention: AcfConvention::AsPrinted,
                }),
                ..quick(0.1)
            },
        ];
        for s in bad {
            assert!(run_experiment(&s).is_err(), "{s:?}");
        }
    }

    #[test]
    fn too_dense_is_reported() {
        let s = Scenario {
            lambda_m: 1.0e7,
            ..quick(0.0)
        };
        assert!(matches!(run_trial(&s, 0), Err(Error::TooDense { .. })));
    }

    #[test]
    fn fixed_window_policy() {
        let s = Scenario {
            event_window: EventWindowPolicy::Fixed { extent: 100.0 },
            ..quick(0.1)
        };
        assert_eq!(s.event_window().unwrap().area(), 1.0e4);
        let stats = run_experiment(&s).unwrap();
        assert_eq!(stats.truncation_warnings, 0);
        let tight = Scenario {
            event_window: EventWindowPolicy::Fixed { extent: 42.0 },
            ..quick(0.1)
        };
        assert_eq!(run_experiment(&tight).unwrap().truncation_warnings, tight.n_trials);
    }

    #[test]
    fn fixed_deployment_and_packets() {
        let s = Scenario {
            deployment: Deployment::FixedCount(50),
            emission: Emission::Packets,
            ..quick(0.05)
        };
        let series = run_trial(&s, 0).unwrap();
        assert_eq!(series.device_count, 50);
        assert!(series.values.iter().all(|v| v.fract() == 0.0 && *v <= 50.0));
    }

    #[test]
    fn one_value_sweep_equals_experiment() {
        let s = quick(1e-2);
        let sw = sweep(&s, SweepAxis::LambdaE, &[1e-2]);
        assert_eq!(sw.points[0].outcome.as_ref().unwrap(), &run_experiment(&s).unwrap());
    }

    #[test]
    fn sweep_collects_errors() {
        let s = Scenario {
            model: TrafficModel::Markov(MarkovParams::new(0.5).unwrap()),
            ..quick(1e-2)
        };
        let sw = sweep(&s, SweepAxis::Q, &[0.2, 1.0, 0.4]);
        assert!(sw.is_partial());
        assert!(sw.points[0].outcome.is_ok());
        assert!(sw.points[1].outcome.is_err());
        assert!(sw.points[2].outcome.is_ok());
        assert_eq!(sw.points[2].value, 0.4);
    }

    #[test]
    fn acf_is_attached() {
        let s = Scenario {
            model: TrafficModel::Markov(MarkovParams::new(0.9).unwrap()),
            n_slots: 500,
            n_trials: 10,
            acf: Some(AcfSettings {
                max_lag: 5,
                convention: AcfConvention::AsPrinted,
            }),
            ..quick(1e-2)
        };
        let stats = run_experiment(&s).unwrap();
        let acf = stats.acf.unwrap();
        assert_eq!(acf.lags, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(acf.n_trials + stats.degenerate_acf_trials, 10);
        assert!(stats.approx_markov.is_some());
    }
}
