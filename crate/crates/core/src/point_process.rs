//! Homogeneous Poisson point processes on bounded planar windows.
//!
//! A realization is drawn constructively: the point count is Poisson with mean
//! `density * area`, and given the count the points are i.i.d. uniform on the
//! window. Disk and annulus windows use inverse-CDF radial sampling, so no
//! rejection loop is involved.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{ensure_non_negative, ensure_positive, Error, Result};

/// Upper limit on the expected number of points in one realization.
pub const MAX_EXPECTED_POINTS: f64 = 1.0e9;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_squared(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.distance_squared(other).sqrt()
    }

    fn offset_polar(&self, r: f64, theta: f64) -> Point {
        let (s, c) = theta.sin_cos();
        Point::new(self.x + r * c, self.y + r * s)
    }
}

/// A bounded planar sampling window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Window {
    Disk { center: Point, radius: f64 },
    Annulus { center: Point, inner: f64, outer: f64 },
    Rectangle { min: Point, max: Point },
}

impl Window {
    pub fn disk(center: Point, radius: f64) -> Result<Self> {
        ensure_positive("disk radius", radius)?;
        check_point("disk center", center)?;
        Ok(Window::Disk { center, radius })
    }

    pub fn annulus(center: Point, inner: f64, outer: f64) -> Result<Self> {
        check_point("annulus center", center)?;
        ensure_non_negative("annulus inner radius", inner)?;
        ensure_positive("annulus outer radius", outer)?;
        if outer <= inner {
            return Err(Error::invalid(
                "annulus",
                format!("outer radius {outer} must exceed inner radius {inner}"),
            ));
        }
        Ok(Window::Annulus { center, inner, outer })
    }

    pub fn rectangle(min: Point, max: Point) -> Result<Self> {
        check_point("rectangle corner", min)?;
        check_point("rectangle corner", max)?;
        if !(max.x > min.x && max.y > min.y) {
            return Err(Error::invalid(
                "rectangle",
                format!("corner {max:?} must strictly dominate {min:?}"),
            ));
        }
        Ok(Window::Rectangle { min, max })
    }

    /// Axis-aligned square of side `side` centered on `center`.
    pub fn square(center: Point, side: f64) -> Result<Self> {
        ensure_positive("square side", side)?;
        let h = side / 2.0;
        Window::rectangle(
            Point::new(center.x - h, center.y - h),
            Point::new(center.x + h, center.y + h),
        )
    }

    pub fn area(&self) -> f64 {
        match *self {
            Window::Disk { radius, .. } => PI * radius * radius,
            Window::Annulus { inner, outer, .. } => PI * (outer * outer - inner * inner),
            Window::Rectangle { min, max } => (max.x - min.x) * (max.y - min.y),
        }
    }

    /// Boundary-inclusive membership test.
    pub fn contains(&self, p: &Point) -> bool {
        match *self {
            Window::Disk { center, radius } => p.distance_squared(&center) <= radius * radius,
            Window::Annulus { center, inner, outer } => {
                let d2 = p.distance_squared(&center);
                d2 >= inner * inner && d2 <= outer * outer
            }
            Window::Rectangle { min, max } => p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y,
        }
    }

    /// Radius of the largest disk around `p` that lies inside the window, or
    /// zero when `p` is outside it.
    pub fn clearance(&self, p: &Point) -> f64 {
        let c = match *self {
            Window::Disk { center, radius } => radius - p.distance(&center),
            Window::Annulus { center, inner, outer } => {
                let d = p.distance(&center);
                (d - inner).min(outer - d)
            }
            Window::Rectangle { min, max } => (p.x - min.x).min(max.x - p.x).min(p.y - min.y).min(max.y - p.y),
        };
        c.max(0.0)
    }

    /// Smallest clearance over every point of `cell`, i.e. how far the window
    /// reaches beyond the cell in the worst direction. Zero if `cell` pokes out.
    pub fn clearance_around(&self, cell: &Window) -> f64 {
        match (*self, *cell) {
            (Window::Disk { center, radius }, Window::Disk { center: c, radius: r }) => {
                (radius - center.distance(&c) - r).max(0.0)
            }
            (Window::Rectangle { min, max }, Window::Disk { center: c, radius: r }) => {
                ((c.x - min.x).min(max.x - c.x).min(c.y - min.y).min(max.y - c.y) - r).max(0.0)
            }
            (Window::Annulus { center, inner, outer }, Window::Disk { center: c, radius: r }) => {
                // Only a disk lying entirely in the ring has positive clearance.
                let d = center.distance(&c);
                ((d - r - inner).min(outer - d - r)).max(0.0)
            }
            (_, other) => {
                let (lo, hi) = other.bounding_box();
                [lo, hi, Point::new(lo.x, hi.y), Point::new(hi.x, lo.y)]
                    .iter()
                    .map(|p| self.clearance(p))
                    .fold(f64::INFINITY, f64::min)
                    .min(self.clearance(&other.reference_point()))
            }
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        match *self {
            Window::Disk { center, radius }
            | Window::Annulus {
                center, outer: radius, ..
            } => (
                Point::new(center.x - radius, center.y - radius),
                Point::new(center.x + radius, center.y + radius),
            ),
            Window::Rectangle { min, max } => (min, max),
        }
    }

    /// Center for disks and annuli, midpoint for rectangles.
    pub fn reference_point(&self) -> Point {
        match *self {
            Window::Disk { center, .. } | Window::Annulus { center, .. } => center,
            Window::Rectangle { min, max } => Point::new((min.x + max.x) / 2.0, (min.y + max.y) / 2.0),
        }
    }

    /// One point uniformly distributed on the window.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match *self {
            Window::Disk { center, radius } => sample_ring(center, 0.0, radius, rng),
            Window::Annulus { center, inner, outer } => sample_ring(center, inner, outer, rng),
            Window::Rectangle { min, max } => Point::new(
                min.x + (max.x - min.x) * rng.random::<f64>(),
                min.y + (max.y - min.y) * rng.random::<f64>(),
            ),
        }
    }
}

fn sample_ring<R: Rng + ?Sized>(center: Point, inner: f64, outer: f64, rng: &mut R) -> Point {
    let u: f64 = rng.random();
    let r = (u * (outer * outer - inner * inner) + inner * inner).sqrt();
    let theta = 2.0 * PI * rng.random::<f64>();
    center.offset_polar(r.min(outer), theta)
}

fn check_point(name: &'static str, p: Point) -> Result<()> {
    if p.x.is_finite() && p.y.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{p:?} has non-finite coordinates")))
    }
}

/// A sampled set of locations together with the window and density it was drawn from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRealization {
    pub points: Vec<Point>,
    pub window: Window,
    pub density: f64,
}

impl PointRealization {
    pub fn empty(window: Window) -> Self {
        Self {
            points: Vec::new(),
            window,
            density: 0.0,
        }
    }

    /// Wraps explicit points, checking they lie in the window.
    pub fn from_points(points: Vec<Point>, window: Window, density: f64) -> Result<Self> {
        ensure_non_negative("density", density)?;
        if let Some(p) = points.iter().find(|p| !window.contains(p)) {
            return Err(Error::invalid("point", format!("{p:?} lies outside {window:?}")));
        }
        Ok(Self {
            points,
            window,
            density,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points that also fall inside `sub`; the restriction of a PPP to a
    /// subwindow is again a PPP with the same density.
    pub fn restricted_to(&self, sub: Window) -> Self {
        Self {
            points: self.points.iter().copied().filter(|p| sub.contains(p)).collect(),
            window: sub,
            density: self.density,
        }
    }
}

/// Draws a homogeneous PPP with the given density on `window`.
pub fn sample_ppp<R: Rng + ?Sized>(density: f64, window: &Window, rng: &mut R) -> Result<PointRealization> {
    ensure_non_negative("density", density)?;
    let mean = density * window.area();
    if mean.is_nan() || mean > MAX_EXPECTED_POINTS {
        return Err(Error::TooDense {
            expected: mean,
            limit: MAX_EXPECTED_POINTS,
        });
    }
    let count = if mean > 0.0 {
        // `mean` is bounded above, so the sample fits in a usize exactly.
        Poisson::new(mean)
            .map_err(|e| Error::invalid("density", e.to_string()))?
            .sample(rng) as usize
    } else {
        0
    };
    let points = (0..count).map(|_| window.sample_uniform(rng)).collect();
    Ok(PointRealization {
        points,
        window: *window,
        density,
    })
}

/// Binomial point process: exactly `count` i.i.d. uniform points.
pub fn sample_fixed_count<R: Rng + ?Sized>(count: usize, window: &Window, rng: &mut R) -> PointRealization {
    let points = (0..count).map(|_| window.sample_uniform(rng)).collect();
    PointRealization {
        points,
        window: *window,
        density: count as f64 / window.area(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, StreamRole};

    fn cell() -> Window {
        Window::disk(Point::ORIGIN, 20.0).unwrap()
    }

    #[test]
    fn areas() {
        assert!((cell().area() - 400.0 * PI).abs() < 1e-9);
        let sq = Window::rectangle(Point::new(0.0, 0.0), Point::new(100.0, 100.0)).unwrap();
        assert_eq!(sq.area(), 1.0e4);
        let ring = Window::annulus(Point::ORIGIN, 20.0, 60.0).unwrap();
        assert!((ring.area() - 3200.0 * PI).abs() < 1e-9);
    }

    #[test]
    fn invalid_windows_are_rejected() {
        assert!(Window::disk(Point::ORIGIN, 0.0).is_err());
        assert!(Window::disk(Point::ORIGIN, f64::NAN).is_err());
        assert!(Window::annulus(Point::ORIGIN, 5.0, 5.0).is_err());
        assert!(Window::annulus(Point::ORIGIN, -1.0, 5.0).is_err());
        assert!(Window::rectangle(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).is_err());
        assert!(Window::disk(Point::new(f64::INFINITY, 0.0), 1.0).is_err());
    }

    #[test]
    fn zero_density_is_empty() {
        let mut rng = stream(1, 0, StreamRole::Devices);
        let r = sample_ppp(0.0, &cell(), &mut rng).unwrap();
        assert!(r.is_empty());
        assert_eq!(r.density, 0.0);
    }

    #[test]
    fn bad_densities() {
        let mut rng = stream(1, 0, StreamRole::Devices);
        assert!(matches!(
            sample_ppp(f64::NAN, &cell(), &mut rng),
            Err(Error::InvalidParameter { .. })
        ));
        assert!(sample_ppp(-0.1, &cell(), &mut rng).is_err());
        assert!(matches!(
            sample_ppp(1.0e8, &cell(), &mut rng),
            Err(Error::TooDense { .. })
        ));
        assert!(matches!(
            sample_ppp(f64::INFINITY, &cell(), &mut rng),
            Err(Error::InvalidParameter { .. })
        ));
    }

    #[test]
    fn points_stay_inside_every_window_kind() {
        let windows = [
            cell(),
            Window::annulus(Point::new(3.0, -2.0), 20.0, 60.0).unwrap(),
            Window::rectangle(Point::new(-5.0, 10.0), Point::new(7.0, 12.0)).unwrap(),
        ];
        let mut rng = stream(3, 0, StreamRole::Events);
        for w in windows {
            let r = sample_ppp(0.5, &w, &mut rng).unwrap();
            assert!(!r.is_empty());
            assert!(r.points.iter().all(|p| w.contains(p)), "{w:?}");
        }
    }

    #[test]
    fn same_seed_same_realization() {
        let a = sample_ppp(0.1, &cell(), &mut stream(9, 4, StreamRole::Devices)).unwrap();
        let b = sample_ppp(0.1, &cell(), &mut stream(9, 4, StreamRole::Devices)).unwrap();
        assert_eq!(a, b);
    }

    // Mean and equidispersion of the count, via Campbell's formula E[N] = lambda |W|.
    fn count_moments(density: f64, window: Window, draws: u64) -> (f64, f64) {
        let counts: Vec<f64> = (0..draws)
            .map(|t| {
                let mut rng = stream(11, t, StreamRole::Devices);
                sample_ppp(density, &window, &mut rng).unwrap().len() as f64
            })
            .collect();
        let n = counts.len() as f64;
        let mean = counts.iter().sum::<f64>() / n;
        let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (mean, var)
    }

    #[test]
    fn disk_count_matches_campbell() {
        let expected = 0.1 * PI * 400.0;
        let (mean, var) = count_moments(0.1, cell(), 10_000);
        let se = (var / 10_000.0).sqrt();
        assert!((mean - expected).abs() <= 4.0 * se, "{mean} vs {expected}");
        assert!((var / mean - 1.0).abs() < 0.1, "var {var} mean {mean}");
    }

    #[test]
    fn annulus_count_matches_campbell() {
        let ring = Window::annulus(Point::ORIGIN, 20.0, 60.0).unwrap();
        let expected = 0.01 * PI * 3200.0;
        let (mean, var) = count_moments(0.01, ring, 10_000);
        let se = (var / 10_000.0).sqrt();
        assert!((mean - expected).abs() <= 4.0 * se, "{mean} vs {expected}");
        assert!((var / mean - 1.0).abs() < 0.1);
    }

    #[test]
    fn equal_area_halves_are_balanced() {
        // Inner disk of radius R/sqrt(2) and the outer ring have equal area.
        let split = 20.0 / 2f64.sqrt();
        let (mut inner, mut outer) = (0u64, 0u64);
        for t in 0..10_000 {
            let r = sample_ppp(0.1, &cell(), &mut stream(5, t, StreamRole::Devices)).unwrap();
            for p in &r.points {
                if p.distance(&Point::ORIGIN) < split {
                    inner += 1;
                } else {
                    outer += 1;
                }
            }
        }
        let total = (inner + outer) as f64;
        let e = total / 2.0;
        let chi2 = ((inner as f64 - e).powi(2) + (outer as f64 - e).powi(2)) / e;
        // chi-square(1) upper 0.001 quantile
        assert!(chi2 < 10.828, "chi2 = {chi2}");
    }

    #[test]
    fn clearance_of_concentric_disks() {
        let big = Window::disk(Point::ORIGIN, 35.0).unwrap();
        assert!((big.clearance_around(&cell()) - 15.0).abs() < 1e-12);
        let sq = Window::square(Point::ORIGIN, 100.0).unwrap();
        assert!((sq.clearance_around(&cell()) - 30.0).abs() < 1e-12);
        assert_eq!(cell().clearance_around(&big), 0.0);
        assert!((big.clearance(&Point::new(20.0, 0.0)) - 15.0).abs() < 1e-12);
    }

    #[test]
    fn fixed_count_mode() {
        let mut rng = stream(2, 0, StreamRole::Devices);
        let r = sample_fixed_count(126, &cell(), &mut rng);
        assert_eq!(r.len(), 126);
        assert!(r.points.iter().all(|p| cell().contains(p)));
    }

    #[test]
    fn restriction_keeps_inner_points() {
        let big = Window::disk(Point::ORIGIN, 40.0).unwrap();
        let r = sample_ppp(0.05, &big, &mut stream(2, 1, StreamRole::Events)).unwrap();
        let sub = r.restricted_to(cell());
        assert!(sub.points.iter().all(|p| cell().contains(p)));
        let inside = r.points.iter().filter(|p| cell().contains(p)).count();
        assert_eq!(sub.len(), inside);
    }
}
