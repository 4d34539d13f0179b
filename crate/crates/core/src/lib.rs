//! Traffic modeling for machine-type devices that react to spatially
//! correlated events.
//!
//! Devices sit in a circular cell as a Poisson point process. Events fall on
//! the plane as an independent Poisson process, and an event at distance `d`
//! pushes a device into the alarm state with probability `f(d)` given by an
//! alarm trigger probability function ([`atpf::AtpfSpec`]). Each device then
//! emits traffic at its regular or alarm rate, either i.i.d. per slot or through
//! a two-state Markov chain that makes alarms bursty.
//!
//! The crate provides the sampling pieces, the closed-form mean rate and the
//! Markov approximation, a Monte Carlo engine with sweeps and autocorrelation
//! estimates, and a flat config format with presets. The `examples/` directory
//! has one runnable program per capability:
//!
//! | example | shows |
//! |---|---|
//! | `poisson_deployment` | drawing devices and checking the mean count |
//! | `atpf_integrals` | ATPF shapes, first moments and tails |
//! | `alarm_field` | per-device alarm probabilities and truncation |
//! | `markov_source` | two-state chain, steady state and burst lengths |
//! | `closed_form_rate` | mean total rate against event density |
//! | `bernoulli_sweep` | Monte Carlo vs closed form over event density |
//! | `markov_bound` | memory in the states against the Bernoulli mean |
//! | `acf_memory` | autocorrelation of the aggregate rate |
//! | `config_presets` | loading presets and writing CSV/JSON results |
//!
//! ```
//! use mtc_traffic::sim::{run_experiment, Scenario};
//!
//! let scenario = Scenario { n_trials: 20, n_slots: 10, ..Scenario::table1() };
//! let stats = run_experiment(&scenario).unwrap();
//! let closed = stats.closed_form.unwrap().value;
//! assert!((stats.mean_rate - closed).abs() < 6.0 * stats.std_error + 1e-9);
//! ```

pub mod alarm_field;
pub mod analytics;
pub mod atpf;
pub mod config;
pub mod error;
pub mod output;
pub mod point_process;
pub mod quadrature;
pub mod rng;
pub mod sim;
pub mod stats;
pub mod traffic;

pub use error::{Error, Result};
