//! Per-device alarm probabilities from an event realization.
//!
//! A device at `x` escapes every event independently, so its alarm
//! probability is `p_x = 1 - ∏_y (1 - f(|x - y|))`. The product runs over an
//! event process that in principle covers the whole plane; the simulation
//! draws events on a finite window that reaches `r_trunc` beyond the cell,
//! where `r_trunc` is chosen so that the expected omitted trigger mass
//! `2π λ_E ∫_{r_trunc}^∞ f(r) r dr` stays below a tolerance ε.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::atpf::AtpfSpec;
use crate::error::{ensure_non_negative, Error, Result};
use crate::point_process::{Point, PointRealization, Window};

pub const DEFAULT_TRUNCATION_EPSILON: f64 = 1.0e-6;
/// Hard cap on the truncation radius, in metres.
pub const MAX_TRUNCATION_RADIUS: f64 = 1.0e4;

// Once ln(1 - p) drops below this, 1 - exp(ln(1 - p)) rounds to exactly 1.0.
const SATURATED_LOG_SURVIVAL: f64 = -40.0;

/// `∏_y (1 - f(|x - y|))`, the probability that no event triggers `device`.
pub fn survival_probability(device: &Point, events: &PointRealization, atpf: &AtpfSpec) -> f64 {
    let mut log_survival = 0.0;
    for y in &events.points {
        let f = atpf.value_at(device.distance(y));
        if f >= 1.0 {
            return 0.0;
        }
        log_survival += (-f).ln_1p();
    }
    log_survival.exp()
}

/// Alarm probability of a single device, evaluated in the log domain.
pub fn alarm_probability(device: &Point, events: &PointRealization, atpf: &AtpfSpec) -> f64 {
    let mut log_survival = 0.0;
    for y in &events.points {
        let f = atpf.value_at(device.distance(y));
        if f >= 1.0 {
            return 1.0;
        }
        log_survival += (-f).ln_1p();
    }
    -log_survival.exp_m1()
}

/// Expected alarm mass contributed by events farther than `radius` from a device.
pub fn omitted_mass_bound(atpf: &AtpfSpec, event_density: f64, radius: f64) -> Result<f64> {
    if event_density == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * PI * event_density * atpf.tail_mass(radius)?)
}

/// Smallest radius `r` with `2π λ_E tail_mass(r) <= epsilon`.
///
/// Finite-support ATPFs return their support radius, where the omitted mass is
/// exactly zero.
pub fn truncation_radius(atpf: &AtpfSpec, event_density: f64, epsilon: f64) -> Result<f64> {
    ensure_non_negative("event density", event_density)?;
    if !(epsilon.is_finite() && epsilon > 0.0) {
        return Err(Error::invalid("truncation epsilon", format!("{epsilon} must be > 0")));
    }
    if event_density == 0.0 {
        return Ok(0.0);
    }
    let bound = |r: f64| omitted_mass_bound(atpf, event_density, r);
    if let Some(support) = atpf.support_radius() {
        if support <= MAX_TRUNCATION_RADIUS {
            return Ok(support);
        }
    }
    if bound(0.0)? <= epsilon {
        return Ok(0.0);
    }
    let at_cap = bound(MAX_TRUNCATION_RADIUS)?;
    if at_cap > epsilon {
        return Err(Error::TruncationImpossible {
            bound: at_cap,
            epsilon,
            cap: MAX_TRUNCATION_RADIUS,
        });
    }
    // tail_mass is non-increasing in r, so feasibility is monotone.
    let (mut lo, mut hi) = (0.0, MAX_TRUNCATION_RADIUS);
    for _ in 0..200 {
        if hi - lo <= 1e-12 * hi.max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if bound(mid)? <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Event disk that covers every device in the disk-shaped `cell` out to the
/// truncation radius.
pub fn required_event_window(cell: &Window, atpf: &AtpfSpec, event_density: f64, epsilon: f64) -> Result<Window> {
    let Window::Disk { center, radius } = *cell else {
        return Err(Error::invalid("cell", "the cell must be a disk"));
    };
    let r_trunc = truncation_radius(atpf, event_density, epsilon)?;
    Window::disk(center, radius + r_trunc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlarmProbabilityField {
    /// Alarm probability per device, aligned with the device realization.
    pub per_device_p: Vec<f64>,
    /// How far the event window reaches beyond the device window (worst case).
    pub truncation_radius: f64,
    /// Upper bound on the expected alarm mass of events outside the window.
    pub truncation_error_bound: f64,
    pub epsilon: f64,
    pub warnings: Vec<String>,
}

impl AlarmProbabilityField {
    pub fn is_truncation_sound(&self) -> bool {
        self.warnings.is_empty()
    }
}

pub fn field_for_realization(
    devices: &PointRealization,
    events: &PointRealization,
    atpf: &AtpfSpec,
) -> Result<AlarmProbabilityField> {
    field_for_realization_with_tolerance(devices, events, atpf, DEFAULT_TRUNCATION_EPSILON)
}

/// Alarm probabilities for every device; a too-small event window is reported
/// in `warnings` rather than failing.
pub fn field_for_realization_with_tolerance(
    devices: &PointRealization,
    events: &PointRealization,
    atpf: &AtpfSpec,
    epsilon: f64,
) -> Result<AlarmProbabilityField> {
    let reach = events.window.clearance_around(&devices.window);
    let bound = omitted_mass_bound(atpf, events.density, reach)?;
    let mut warnings = Vec::new();
    if bound > epsilon * (1.0 + 1e-9) {
        warnings.push(format!(
            "event window reaches only {reach:.3} m beyond the device window; omitted alarm mass up to {bound:.3e} exceeds epsilon {epsilon:.1e}"
        ));
    }
    let per_device_p = if events.is_empty() {
        vec![0.0; devices.len()]
    } else {
        let grid = EventGrid::new(events);
        let support = atpf.support_radius();
        devices
            .points
            .iter()
            .map(|x| grid.alarm_probability(x, atpf, support))
            .collect()
    };
    Ok(AlarmProbabilityField {
        per_device_p,
        truncation_radius: reach,
        truncation_error_bound: bound,
        epsilon,
        warnings,
    })
}

/// Uniform bucket grid over the event window, visited in square rings around
/// each device so that nearby events come first.
struct EventGrid {
    origin: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    // CSR layout: events of bucket b are points[starts[b]..starts[b + 1]].
    starts: Vec<usize>,
    points: Vec<Point>,
}

const TARGET_PER_BUCKET: f64 = 4.0;
const MAX_BUCKETS_PER_AXIS: usize = 512;

impl EventGrid {
    fn new(events: &PointRealization) -> Self {
        let (lo, hi) = events.window.bounding_box();
        let extent = (hi.x - lo.x).max(hi.y - lo.y);
        let mean_spacing = if events.density > 0.0 {
            (TARGET_PER_BUCKET / events.density).sqrt()
        } else {
            extent
        };
        let cell = mean_spacing.clamp(extent / MAX_BUCKETS_PER_AXIS as f64, extent.max(f64::MIN_POSITIVE));
        let nx = (((hi.x - lo.x) / cell).ceil() as usize).clamp(1, MAX_BUCKETS_PER_AXIS);
        let ny = (((hi.y - lo.y) / cell).ceil() as usize).clamp(1, MAX_BUCKETS_PER_AXIS);
        let mut grid = Self {
            origin: lo,
            cell,
            nx,
            ny,
            starts: vec![0; nx * ny + 1],
            points: vec![Point::ORIGIN; events.len()],
        };
        let buckets: Vec<usize> = events.points.iter().map(|p| grid.bucket_of(p)).collect();
        for &b in &buckets {
            grid.starts[b + 1] += 1;
        }
        for b in 0..nx * ny {
            grid.starts[b + 1] += grid.starts[b];
        }
        let mut fill = grid.starts.clone();
        for (p, &b) in events.points.iter().zip(&buckets) {
            grid.points[fill[b]] = *p;
            fill[b] += 1;
        }
        grid
    }

    fn index_of(&self, p: &Point) -> (usize, usize) {
        let i = ((p.x - self.origin.x) / self.cell).floor();
        let j = ((p.y - self.origin.y) / self.cell).floor();
        (
            (i.max(0.0) as usize).min(self.nx - 1),
            (j.max(0.0) as usize).min(self.ny - 1),
        )
    }

    fn bucket_of(&self, p: &Point) -> usize {
        let (i, j) = self.index_of(p);
        j * self.nx + i
    }

    fn bucket(&self, i: usize, j: usize) -> &[Point] {
        let b = j * self.nx + i;
        &self.points[self.starts[b]..self.starts[b + 1]]
    }

    fn alarm_probability(&self, x: &Point, atpf: &AtpfSpec, support: Option<f64>) -> f64 {
        let (ci, cj) = self.index_of(x);
        let max_ring = ci.max(self.nx - 1 - ci).max(cj).max(self.ny - 1 - cj);
        let mut log_survival = 0.0;
        for ring in 0..=max_ring {
            if let Some(s) = support {
                // Every bucket in this ring is at least (ring - 1) cells away.
                if ring >= 2 && (ring - 1) as f64 * self.cell > s {
                    break;
                }
            }
            for (i, j) in ring_cells(ci, cj, ring, self.nx, self.ny) {
                for y in self.bucket(i, j) {
                    let f = atpf.value_at(x.distance(y));
                    if f >= 1.0 {
                        return 1.0;
                    }
                    log_survival += (-f).ln_1p();
                }
            }
            if log_survival < SATURATED_LOG_SURVIVAL {
                return 1.0;
            }
        }
        -log_survival.exp_m1()
    }
}

/// Bucket coordinates at Chebyshev distance exactly `ring` from `(ci, cj)`,
/// clipped to the grid.
fn ring_cells(ci: usize, cj: usize, ring: usize, nx: usize, ny: usize) -> impl Iterator<Item = (usize, usize)> {
    let (ci, cj, r) = (ci as isize, cj as isize, ring as isize);
    let (nx, ny) = (nx as isize, ny as isize);
    let in_grid = move |(i, j): (isize, isize)| i >= 0 && j >= 0 && i < nx && j < ny;
    let rows = if r == 0 { vec![cj] } else { vec![cj - r, cj + r] };
    let top_bottom = rows
        .into_iter()
        .flat_map(move |j| (ci - r..=ci + r).map(move |i| (i, j)));
    let sides = (cj - r + 1..=cj + r - 1)
        .filter(move |_| r > 0)
        .flat_map(move |j| [(ci - r, j), (ci + r, j)]);
    top_bottom
        .chain(sides)
        .filter(move |&c| in_grid(c))
        .map(|(i, j)| (i as usize, j as usize))
}
