//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! The interval with the largest error estimate is bisected until the summed
//! estimate drops below the absolute tolerance or the interval budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

// Kronrod abscissae on [-1, 1] (positive half, descending); odd indices are
// the 7-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

pub const DEFAULT_ABS_TOL: f64 = 1.0e-10;
pub const DEFAULT_MAX_INTERVALS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub intervals: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QuadratureError {
    #[error("error estimate {abs_error:.3e} above tolerance {tol:.3e} after {intervals} intervals")]
    NotConverged { abs_error: f64, tol: f64, intervals: usize },
    #[error("integrand is not finite at x = {0}")]
    NonFinite(f64),
    #[error("bad interval [{0}, {1}]")]
    BadInterval(f64, f64),
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        let y = f(x);
        if y.is_finite() {
            Ok(y)
        } else {
            Err(QuadratureError::NonFinite(x))
        }
    };
    let fc = eval(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (i, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = eval(center - dx)? + eval(center + dx)?;
        kronrod += w * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over `[a, b]` to absolute tolerance `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<Integral, QuadratureError> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(QuadratureError::BadInterval(a, b));
    }
    if a == b {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            intervals: 0,
        });
    }
    let mut heap = BinaryHeap::new();
    heap.push(kronrod15(&f, a, b)?);
    loop {
        let total_error: f64 = heap.iter().map(|s| s.error).sum();
        if total_error <= abs_tol {
            break;
        }
        if heap.len() >= max_intervals {
            return Err(QuadratureError::NotConverged {
                abs_error: total_error,
                tol: abs_tol,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval cannot be split further in double precision.
            heap.push(worst);
            return Err(QuadratureError::NotConverged {
                abs_error: total_error,
                tol: abs_tol,
                intervals: heap.len(),
            });
        }
        heap.push(kronrod15(&f, worst.a, mid)?);
        heap.push(kronrod15(&f, mid, worst.b)?);
    }
    let mut segs = heap.into_vec();
    // Sum left to right so the result does not depend on heap layout.
    segs.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(Integral {
        value: segs.iter().map(|s| s.value).sum(),
        abs_error: segs.iter().map(|s| s.error).sum(),
        intervals: segs.len(),
    })
}

/// Integrates over consecutive pieces `[b0, b1], [b1, b2], ...`, splitting the
/// tolerance evenly. Use when `f` has kinks or jumps at known breakpoints.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    breakpoints: &[f64],
    abs_tol: f64,
) -> Result<Integral, QuadratureError> {
    let pieces = breakpoints.len().saturating_sub(1).max(1);
    let tol = abs_tol / pieces as f64;
    let mut acc = Integral {
        value: 0.0,
        abs_error: 0.0,
        intervals: 0,
    };
    for w in breakpoints.windows(2) {
        let part = integrate(&f, w[0], w[1], tol, DEFAULT_MAX_INTERVALS)?;
        acc.value += part.value;
        acc.abs_error += part.abs_error;
        acc.intervals += part.intervals;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        // K15 integrates degree <= 22 exactly.
        let r = integrate(|x| x.powi(7) - 3.0 * x * x, -1.0, 2.0, 1e-12, 100).unwrap();
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0);
        assert!((r.value - exact).abs() < 1e-12);
        assert_eq!(r.intervals, 1);
    }

    #[test]
    fn gamma_two_integral() {
        let r = integrate(|x| x * (-x).exp(), 0.0, 60.0, 1e-12, 1000).unwrap();
        assert!((r.value - 1.0).abs() < 1e-11, "{}", r.value);
    }

    #[test]
    fn sqrt_singularity_converges() {
        let r = integrate(|x: f64| x.sqrt(), 0.0, 1.0, 1e-10, 1000).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn empty_and_bad_intervals() {
        assert_eq!(integrate(|x| x, 1.0, 1.0, 1e-10, 10).unwrap().value, 0.0);
        assert!(integrate(|x| x, 2.0, 1.0, 1e-10, 10).is_err());
        assert!(integrate(|x| x, 0.0, f64::INFINITY, 1e-10, 10).is_err());
    }

    #[test]
    fn non_finite_integrand_is_reported() {
        let r = integrate(|x| 1.0 / x, 0.0, 1.0, 1e-10, 50);
        assert!(matches!(
            r,
            Err(QuadratureError::NonFinite(_)) | Err(QuadratureError::NotConverged { .. })
        ));
    }

    #[test]
    fn budget_exhaustion() {
        let r = integrate(|x: f64| (1.0 / (x + 1e-9)).sin(), 0.0, 1.0, 1e-14, 8);
        assert!(matches!(r, Err(QuadratureError::NotConverged { .. })));
    }

    #[test]
    fn piecewise_handles_a_jump() {
        let step = |x: f64| if x <= 2.0 { 1.0 } else { 0.0 };
        let r = integrate_piecewise(step, &[0.0, 2.0, 5.0], 1e-12).unwrap();
        assert!((r.value - 2.0).abs() < 1e-14);
    }
}
