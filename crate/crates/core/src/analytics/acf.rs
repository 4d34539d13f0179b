use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::{compensated_sum, mean, sample_variance};

/// Which products enter the lag-`k` sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum AcfConvention {
    /// Sum over `i = 1 ..= N_S − k − 1` (one-based), `N_S − k − 1` products.
    #[default]
    AsPrinted,
    /// Sum over all `N_S − k` products.
    Textbook,
}

/// Normalized autocovariance on the lag grid `0, 1, ..., max_lag`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfEstimate {
    pub lags: Vec<usize>,
    pub values: Vec<f64>,
    /// Standard error per lag across trials; present after averaging two or more.
    pub std_errors: Option<Vec<f64>>,
    pub n_trials: usize,
    pub n_slots: usize,
}

impl AcfEstimate {
    pub fn at_lag(&self, lag: usize) -> Option<f64> {
        self.lags.iter().position(|&l| l == lag).map(|i| self.values[i])
    }

    pub fn std_error_at_lag(&self, lag: usize) -> Option<f64> {
        let i = self.lags.iter().position(|&l| l == lag)?;
        self.std_errors.as_ref().map(|se| se[i])
    }
}

pub fn sample_autocovariance(series: &[f64], max_lag: usize) -> Result<AcfEstimate> {
    sample_autocovariance_with(series, max_lag, AcfConvention::AsPrinted)
}

/// `Ĉ(k) = 1/((N_S − k) σ̂²) Σ_i (R(i) − μ̂)(R(i + k) − μ̂)` with the sample mean
/// and the `N_S − 1` sample variance.
pub fn sample_autocovariance_with(series: &[f64], max_lag: usize, convention: AcfConvention) -> Result<AcfEstimate> {
    let n = series.len();
    if n <= max_lag + 1 {
        return Err(Error::invalid(
            "max_lag",
            format!("series of {n} slots is too short for lag {max_lag}"),
        ));
    }
    let mu = mean(series);
    let var = sample_variance(series);
    if var.is_nan() || var <= 0.0 {
        return Err(Error::DegenerateSeries);
    }
    let centered: Vec<f64> = series.iter().map(|r| r - mu).collect();
    let values = (0..=max_lag)
        .map(|k| {
            let terms = match convention {
                AcfConvention::AsPrinted => n - k - 1,
                AcfConvention::Textbook => n - k,
            };
            let s = compensated_sum((0..terms).map(|i| centered[i] * centered[i + k]));
            s / ((n - k) as f64 * var)
        })
        .collect();
    Ok(AcfEstimate {
        lags: (0..=max_lag).collect(),
        values,
        std_errors: None,
        n_trials: 1,
        n_slots: n,
    })
}

/// Pointwise mean over per-trial estimates that share a lag grid and length.
pub fn averaged_acf(per_trial: &[AcfEstimate]) -> Result<AcfEstimate> {
    let first = per_trial
        .first()
        .ok_or_else(|| Error::MismatchedAcf("no estimates to average".into()))?;
    if let Some(bad) = per_trial
        .iter()
        .find(|e| e.lags != first.lags || e.n_slots != first.n_slots)
    {
        return Err(Error::MismatchedAcf(format!(
            "lag grid/length {}x{} differs from {}x{}",
            bad.lags.len(),
            bad.n_slots,
            first.lags.len(),
            first.n_slots
        )));
    }
    let m = per_trial.len();
    let column = |j: usize| per_trial.iter().map(move |e| e.values[j]).collect::<Vec<_>>();
    let values: Vec<f64> = (0..first.lags.len()).map(|j| mean(&column(j))).collect();
    let std_errors = (m >= 2).then(|| {
        (0..first.lags.len())
            .map(|j| (sample_variance(&column(j)) / m as f64).sqrt())
            .collect()
    });
    Ok(AcfEstimate {
        lags: first.lags.clone(),
        values,
        std_errors,
        n_trials: per_trial.iter().map(|e| e.n_trials).sum(),
        n_slots: first.n_slots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, StreamRole};
    use crate::traffic::{sample_markov_states, MarkovParams};
    use rand::Rng;

    fn white_noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = stream(seed, 0, StreamRole::Auxiliary);
        (0..n)
            .map(|_| if rng.random::<f64>() < 0.3 { 1.0 } else { 0.01 })
            .collect()
    }

    #[test]
    fn alternating_series_is_anticorrelated() {
        let s: Vec<f64> = (0..100).map(|i| (i % 2) as f64).collect();
        let acf = sample_autocovariance(&s, 2).unwrap();
        assert!(acf.values[1] < 0.0);
        assert!(acf.values[2] > 0.0);
    }

    #[test]
    fn lag_zero_closed_forms() {
        let s = white_noise(3, 1000);
        let n = s.len() as f64;
        let mu = mean(&s);
        let var = sample_variance(&s);
        let text = sample_autocovariance_with(&s, 3, AcfConvention::Textbook).unwrap();
        assert!((text.values[0] - (n - 1.0) / n).abs() < 1e-12);
        let printed = sample_autocovariance(&s, 3).unwrap();
        let last = s[s.len() - 1] - mu;
        let expected = (n - 1.0) / n - last * last / (n * var);
        assert!((printed.values[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn conventions_differ_by_one_term() {
        let s = white_noise(4, 500);
        let a = sample_autocovariance_with(&s, 5, AcfConvention::AsPrinted).unwrap();
        let b = sample_autocovariance_with(&s, 5, AcfConvention::Textbook).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 10.0 / 500.0);
        }
    }

    #[test]
    fn white_noise_is_uncorrelated() {
        let n = 100_000;
        let acf = sample_autocovariance(&white_noise(5, n), 10).unwrap();
        let bound = 4.0 / (n as f64).sqrt();
        for k in [1, 5, 10] {
            assert!(acf.values[k].abs() <= bound, "lag {k}: {}", acf.values[k]);
        }
    }

    #[test]
    fn markov_series_decays_geometrically() {
        let (p, q) = (0.1, 0.9);
        let n = 1_000_000;
        let mut rng = stream(6, 0, StreamRole::States);
        let states = sample_markov_states(p, MarkovParams::new(q).unwrap(), n, 0, &mut rng).unwrap();
        let series: Vec<f64> = states
            .states
            .iter()
            .map(|s| if s.is_alarm() { 1.0 } else { 0.01 })
            .collect();
        let acf = sample_autocovariance(&series, 5).unwrap();
        let rho: f64 = q - p;
        for k in [1usize, 2, 5] {
            // Bartlett variance for a geometric ACF ρ^k.
            let r2 = rho * rho;
            let var =
                ((1.0 + r2) * (1.0 - r2.powi(k as i32)) / (1.0 - r2) - 2.0 * k as f64 * r2.powi(k as i32)) / n as f64;
            let se = var.sqrt();
            assert!(
                (acf.values[k] - rho.powi(k as i32)).abs() <= 4.0 * se,
                "lag {k}: {} vs {}",
                acf.values[k],
                rho.powi(k as i32)
            );
        }
    }

    #[test]
    fn degenerate_and_short_series() {
        assert!(matches!(
            sample_autocovariance(&[2.0; 50], 3),
            Err(Error::DegenerateSeries)
        ));
        assert!(sample_autocovariance(&[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn averaging() {
        let one = sample_autocovariance(&white_noise(7, 200), 4).unwrap();
        let avg = averaged_acf(std::slice::from_ref(&one)).unwrap();
        assert_eq!(avg.values, one.values);
        assert!(avg.std_errors.is_none());
        let two = averaged_acf(&[one.clone(), one.clone()]).unwrap();
        for (a, b) in two.values.iter().zip(&one.values) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(two.n_trials, 2);
        assert!(two.std_errors.unwrap().iter().all(|&s| s < 1e-15));
        let other = sample_autocovariance(&white_noise(8, 200), 3).unwrap();
        assert!(averaged_acf(&[one, other]).is_err());
        assert!(averaged_acf(&[]).is_err());
    }

    #[test]
    fn averaging_shrinks_noise() {
        let n = 2000;
        let per: Vec<AcfEstimate> = (0..100)
            .map(|t| sample_autocovariance(&white_noise(100 + t, n), 10).unwrap())
            .collect();
        let avg = averaged_acf(&per).unwrap();
        let se = 1.0 / (n as f64).sqrt() / 10.0;
        for k in 1..=10 {
            assert!(
                avg.values[k].abs() <= 4.0 * se + 1.0 / n as f64,
                "lag {k}: {}",
                avg.values[k]
            );
        }
    }
}
