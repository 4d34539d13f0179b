//! Closed-form expectations of the total rate and the sample autocovariance.
//!
//! By Campbell's theorem the expected device count in the cell is
//! `λ_M π R²`, and by the PGFL of the event process every device escapes all
//! events with probability `exp(−2π λ_E I_f)`. The expected total rate is the
//! product of the two, mixed between the alarm and regular rates.

mod acf;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

pub use acf::{averaged_acf, sample_autocovariance, sample_autocovariance_with, AcfConvention, AcfEstimate};

use crate::atpf::AtpfSpec;
use crate::error::{ensure_non_negative, ensure_positive, Result};
use crate::traffic::{MarkovParams, RateParams};

/// Expected total rate with its decomposition into alarm and regular traffic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormRate {
    pub value: f64,
    /// Expected number of devices in the cell, `λ_M π R²`.
    pub device_mass: f64,
    pub alarm_term: f64,
    pub regular_term: f64,
}

/// `exp(−2π λ_E I_f)`: the probability that a device escapes every event.
pub fn escape_probability(lambda_e: f64, atpf: &AtpfSpec) -> Result<f64> {
    ensure_non_negative("lambda_e", lambda_e)?;
    Ok((-2.0 * PI * lambda_e * atpf.first_moment_integral()).exp())
}

/// `p̄ = E[p_x] = 1 − exp(−2π λ_E I_f)`.
pub fn mean_alarm_probability(lambda_e: f64, atpf: &AtpfSpec) -> Result<f64> {
    ensure_non_negative("lambda_e", lambda_e)?;
    Ok(-(-2.0 * PI * lambda_e * atpf.first_moment_integral()).exp_m1())
}

pub fn device_mass(lambda_m: f64, cell_radius: f64) -> Result<f64> {
    ensure_non_negative("lambda_m", lambda_m)?;
    ensure_positive("cell radius", cell_radius)?;
    Ok(lambda_m * PI * cell_radius * cell_radius)
}

/// `λ_M π R² (R_A + (R_R − R_A) exp(−2π λ_E I_f))`, the expected total rate of
/// the Bernoulli model averaged over both point processes.
pub fn expected_total_rate(
    lambda_m: f64,
    lambda_e: f64,
    cell_radius: f64,
    rates: &RateParams,
    atpf: &AtpfSpec,
) -> Result<ClosedFormRate> {
    let mass = device_mass(lambda_m, cell_radius)?;
    let escape = escape_probability(lambda_e, atpf)?;
    let p_bar = mean_alarm_probability(lambda_e, atpf)?;
    Ok(ClosedFormRate {
        value: mass * (rates.alarm + (rates.regular - rates.alarm) * escape),
        device_mass: mass,
        alarm_term: mass * rates.alarm * p_bar,
        regular_term: mass * rates.regular * escape,
    })
}

/// Steady-state approximation of the Markov model's total rate: every `p_x`
/// replaced by `p̄` in the stationary alarm probability.
pub fn approx_total_rate_markov(
    lambda_m: f64,
    lambda_e: f64,
    cell_radius: f64,
    rates: &RateParams,
    atpf: &AtpfSpec,
    mp: MarkovParams,
) -> Result<f64> {
    let mass = device_mass(lambda_m, cell_radius)?;
    let p_bar = mean_alarm_probability(lambda_e, atpf)?;
    let q = mp.q();
    let denom = 1.0 + p_bar - q;
    Ok(mass * (p_bar / denom * rates.alarm + (1.0 - q) / denom * rates.regular))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp1() -> AtpfSpec {
        AtpfSpec::exponential(1.0).unwrap()
    }

    fn table1_rate(lambda_e: f64) -> f64 {
        expected_total_rate(0.1, lambda_e, 20.0, &RateParams::table1(), &exp1())
            .unwrap()
            .value
    }

    #[test]
    fn limits() {
        let mass = 40.0 * PI;
        assert!((table1_rate(0.0) - mass * 0.01).abs() < 1e-12);
        assert!((table1_rate(0.0) - 1.2566).abs() < 1e-4);
        assert!((table1_rate(1.0e6) - mass).abs() < 1e-12);
        assert!((table1_rate(1.0e6) - 125.664).abs() < 1e-3);
    }

    #[test]
    fn intermediate_density() {
        // Direct evaluation of λ_M π R² (R_A + (R_R − R_A) e^{−2π λ_E}).
        let direct = 40.0 * PI * (1.0 - 0.99 * (-0.02 * PI).exp());
        let got = expected_total_rate(0.1, 1e-2, 20.0, &RateParams::table1(), &exp1()).unwrap();
        assert!((got.value - direct).abs() < 1e-12);
        assert!((got.value - 8.832_857).abs() < 1e-6, "{}", got.value);
        assert!((got.alarm_term + got.regular_term - got.value).abs() < 1e-12);
        assert_eq!(got.device_mass, 40.0 * PI);
    }

    #[test]
    fn saturation_regions() {
        let lo = table1_rate(1e-5);
        let hi = table1_rate(10.0);
        assert!((lo / (40.0 * PI * 0.01) - 1.0).abs() < 0.01);
        assert!((hi / (40.0 * PI) - 1.0).abs() < 0.01);
    }

    #[test]
    fn rate_is_bounded_and_monotone() {
        let mass = 40.0 * PI;
        let mut prev = 0.0;
        for k in -60..=20 {
            let v = table1_rate(10f64.powf(k as f64 / 10.0));
            assert!(v >= mass * 0.01 - 1e-12 && v <= mass + 1e-12);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn mean_alarm_probability_values() {
        assert_eq!(mean_alarm_probability(0.0, &exp1()).unwrap(), 0.0);
        let p = mean_alarm_probability(1e-2, &exp1()).unwrap();
        assert!((p - (1.0 - (-0.02 * PI).exp())).abs() < 1e-15);
        assert!((p - 0.060_898_633).abs() < 1e-9);
        assert_eq!(mean_alarm_probability(1e6, &exp1()).unwrap(), 1.0);
        assert!(mean_alarm_probability(-1.0, &exp1()).is_err());
    }

    #[test]
    fn markov_approximation() {
        let rp = RateParams::table1();
        let p_bar = mean_alarm_probability(1e-2, &exp1()).unwrap();
        // q = p̄ collapses to the Bernoulli mixture.
        let at_pbar =
            approx_total_rate_markov(0.1, 1e-2, 20.0, &rp, &exp1(), MarkovParams::new(p_bar).unwrap()).unwrap();
        let bern = 40.0 * PI * (p_bar * 1.0 + (1.0 - p_bar) * 0.01);
        assert!((at_pbar - bern).abs() < 1e-12);
        let half = approx_total_rate_markov(0.1, 1e-2, 20.0, &rp, &exp1(), MarkovParams::new(0.5).unwrap()).unwrap();
        let pi_a = p_bar / (0.5 + p_bar);
        assert!((pi_a - 0.108_573_330).abs() < 1e-9);
        assert!((half - 40.0 * PI * (pi_a + (1.0 - pi_a) * 0.01)).abs() < 1e-12);
        assert!((half - 14.763_927).abs() < 1e-6, "{half}");
        let quiet = approx_total_rate_markov(0.1, 0.0, 20.0, &rp, &exp1(), MarkovParams::new(0.0).unwrap()).unwrap();
        assert!((quiet - 40.0 * PI * 0.01).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs() {
        let rp = RateParams::table1();
        assert!(expected_total_rate(-0.1, 0.0, 20.0, &rp, &exp1()).is_err());
        assert!(expected_total_rate(0.1, 0.0, 0.0, &rp, &exp1()).is_err());
        assert!(expected_total_rate(0.1, f64::NAN, 20.0, &rp, &exp1()).is_err());
    }
}
