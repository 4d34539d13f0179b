//! Alarm-triggering probability functions (ATPFs).
//!
//! An ATPF maps the distance between a device and an event epicenter to the
//! probability that the event pushes the device into alarm mode. Everything
//! the closed forms need from `f` is its radial first moment
//! `I_f = ∫₀^∞ f(r) r dr` and the tail of that integral beyond a radius.

use std::fmt;
use std::io::Read;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, ensure_probability, Error, Result};
use crate::quadrature::{self, QuadratureError, DEFAULT_ABS_TOL};

/// Tail mass left outside the quadrature range for infinite-support kinds.
const NEGLIGIBLE_TAIL: f64 = 1.0e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AtpfKind {
    /// `f(d) = exp(-d / scale)`.
    Exponential { scale: f64 },
    /// `f(d) = level` for `d <= threshold`, zero beyond.
    DiskStep { threshold: f64, level: f64 },
    /// Linear interpolation between knots; `values[0]` below the first knot,
    /// zero past the last one.
    Table { radii: Vec<f64>, values: Vec<f64> },
}

/// An ATPF with its first-moment integral computed at construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtpfSpec {
    kind: AtpfKind,
    first_moment: f64,
}

impl AtpfSpec {
    pub fn exponential(scale: f64) -> Result<Self> {
        ensure_positive("exponential ATPF scale", scale)?;
        Self::with_kind(AtpfKind::Exponential { scale })
    }

    pub fn disk_step(threshold: f64, level: f64) -> Result<Self> {
        ensure_positive("disk-step ATPF threshold", threshold)?;
        ensure_probability("disk-step ATPF level", level)?;
        Self::with_kind(AtpfKind::DiskStep { threshold, level })
    }

    /// Tabulated ATPF; values must be non-increasing in radius.
    pub fn custom_table(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_table(&radii, &values)?;
        if let Some(w) = values.windows(2).find(|w| w[1] > w[0]) {
            return Err(Error::invalid(
                "ATPF table",
                format!(
                    "values must be non-increasing ({} then {}); use custom_table_unchecked to allow this",
                    w[0], w[1]
                ),
            ));
        }
        Self::with_kind(AtpfKind::Table { radii, values })
    }

    /// Tabulated ATPF without the monotonicity requirement.
    pub fn custom_table_unchecked(radii: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        check_table(&radii, &values)?;
        Self::with_kind(AtpfKind::Table { radii, values })
    }

    /// Reads a two-column CSV (`radius_m,probability`) with a header row.
    pub fn from_csv_reader<R: Read>(reader: R) -> std::result::Result<Self, TableReadError> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 {
            return Err(TableReadError::Format(format!(
                "expected 2 header columns, found {}",
                headers.len()
            )));
        }
        let (mut radii, mut values) = (Vec::new(), Vec::new());
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let field = |j: usize| -> std::result::Result<f64, TableReadError> {
                rec.get(j)
                    .ok_or_else(|| TableReadError::Format(format!("row {}: missing column", i + 2)))?
                    .parse::<f64>()
                    .map_err(|e| TableReadError::Format(format!("row {}: {e}", i + 2)))
            };
            radii.push(field(0)?);
            values.push(field(1)?);
        }
        Ok(Self::custom_table(radii, values)?)
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_csv_reader(file).map_err(|e| match e {
            TableReadError::Csv(source) => Error::Csv {
                path: path.to_path_buf(),
                source,
            },
            TableReadError::Format(msg) => Error::invalid("ATPF table", format!("{}: {msg}", path.display())),
            TableReadError::Invalid(err) => err,
        })
    }

    fn with_kind(kind: AtpfKind) -> Result<Self> {
        let first_moment = match &kind {
            AtpfKind::Exponential { scale } => scale * scale,
            AtpfKind::DiskStep { threshold, level } => level * threshold * threshold / 2.0,
            AtpfKind::Table { .. } => 0.0,
        };
        let mut spec = Self { kind, first_moment };
        if matches!(spec.kind, AtpfKind::Table { .. }) {
            spec.first_moment = spec.tail_mass_by_quadrature(0.0)?;
        }
        Ok(spec)
    }

    pub fn kind(&self) -> &AtpfKind {
        &self.kind
    }

    /// `f(distance)`, rejecting negative or non-finite distances.
    pub fn evaluate(&self, distance: f64) -> Result<f64> {
        if !(distance.is_finite() && distance >= 0.0) {
            return Err(Error::invalid(
                "distance",
                format!("{distance} must be finite and >= 0"),
            ));
        }
        Ok(self.value_at(distance))
    }

    /// Unchecked evaluation for the inner loops.
    #[inline]
    pub(crate) fn value_at(&self, d: f64) -> f64 {
        match &self.kind {
            AtpfKind::Exponential { scale } => (-d / scale).exp(),
            AtpfKind::DiskStep { threshold, level } => {
                if d <= *threshold {
                    *level
                } else {
                    0.0
                }
            }
            AtpfKind::Table { radii, values } => interpolate(radii, values, d),
        }
    }

    /// `I_f = ∫₀^∞ f(r) r dr`, in m².
    pub fn first_moment_integral(&self) -> f64 {
        self.first_moment
    }

    /// `∫_{r0}^∞ f(r) r dr`, in m².
    pub fn tail_mass(&self, r0: f64) -> Result<f64> {
        check_radius(r0)?;
        match &self.kind {
            AtpfKind::Exponential { scale } => Ok(scale * (scale + r0) * (-r0 / scale).exp()),
            AtpfKind::DiskStep { threshold, level } => Ok(if r0 < *threshold {
                level * (threshold * threshold - r0 * r0) / 2.0
            } else {
                0.0
            }),
            AtpfKind::Table { .. } => self.tail_mass_by_quadrature(r0),
        }
    }

    /// Radius beyond which `f` vanishes, if any.
    pub fn support_radius(&self) -> Option<f64> {
        match &self.kind {
            AtpfKind::Exponential { .. } => None,
            AtpfKind::DiskStep { threshold, .. } => Some(*threshold),
            AtpfKind::Table { radii, .. } => radii.last().copied(),
        }
    }

    /// First moment by numerical quadrature only, ignoring any closed form.
    pub fn first_moment_by_quadrature(&self) -> Result<f64> {
        self.tail_mass_by_quadrature(0.0)
    }

    /// Tail mass by adaptive quadrature over `[r0, r_cut]`, where the part
    /// beyond `r_cut` is below 1e-12.
    pub fn tail_mass_by_quadrature(&self, r0: f64) -> Result<f64> {
        check_radius(r0)?;
        let mut breaks = vec![r0];
        match &self.kind {
            AtpfKind::Exponential { scale } => {
                // s(s + r)e^{-r/s} bounds the tail; step out until it is negligible.
                let mut cut = r0;
                while scale * (scale + cut) * (-cut / scale).exp() > NEGLIGIBLE_TAIL {
                    cut += scale;
                    breaks.push(cut);
                }
            }
            AtpfKind::DiskStep { threshold, .. } => {
                if r0 < *threshold {
                    breaks.push(*threshold);
                }
            }
            AtpfKind::Table { radii, .. } => {
                breaks.extend(radii.iter().copied().filter(|&r| r > r0));
            }
        }
        if breaks.len() < 2 {
            return Ok(0.0);
        }
        let f = |r: f64| self.value_at(r) * r;
        quadrature::integrate_piecewise(f, &breaks, DEFAULT_ABS_TOL)
            .map(|i| i.value)
            .map_err(|e: QuadratureError| Error::NonIntegrable(e.to_string()))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TableReadError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Format(String),
    #[error(transparent)]
    Invalid(#[from] Error),
}

fn check_radius(r0: f64) -> Result<()> {
    if r0.is_finite() && r0 >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid("radius", format!("{r0} must be finite and >= 0")))
    }
}

fn check_table(radii: &[f64], values: &[f64]) -> Result<()> {
    if radii.is_empty() || radii.len() != values.len() {
        return Err(Error::invalid(
            "ATPF table",
            format!(
                "need matching non-empty columns, got {} radii and {} values",
                radii.len(),
                values.len()
            ),
        ));
    }
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::invalid("ATPF table", "radii must be finite and >= 0"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("ATPF table", "radii must be strictly ascending"));
    }
    for &v in values {
        ensure_probability("ATPF table value", v)?;
    }
    Ok(())
}

fn interpolate(radii: &[f64], values: &[f64], d: f64) -> f64 {
    let last = radii.len() - 1;
    if d > radii[last] {
        return 0.0;
    }
    if d <= radii[0] {
        return values[0];
    }
    // First knot strictly greater than d; d lies in (radii[i-1], radii[i]].
    let i = radii.partition_point(|&r| r < d);
    let (r0, r1) = (radii[i - 1], radii[i]);
    let t = (d - r0) / (r1 - r0);
    values[i - 1] + t * (values[i] - values[i - 1])
}

impl fmt::Display for AtpfSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            AtpfKind::Exponential { scale } => write!(f, "exponential:{scale}"),
            AtpfKind::DiskStep { threshold, level } => write!(f, "disk_step:{threshold}:{level}"),
            AtpfKind::Table { radii, values } => {
                f.write_str("table:")?;
                for (i, (r, v)) in radii.iter().zip(values).enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{r}:{v}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses `exponential:<scale>`, `disk_step:<threshold>:<level>` or
/// `table:<r>:<p>,<r>:<p>,...`.
impl FromStr for AtpfSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::invalid("ATPF", format!("'{s}': {why}"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| bad(&e.to_string()));
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        match name.trim() {
            "exponential" | "exp" => {
                let scale = if rest.trim().is_empty() { 1.0 } else { num(rest)? };
                Self::exponential(scale)
            }
            "disk_step" | "step" => {
                let (t, l) = rest
                    .split_once(':')
                    .ok_or_else(|| bad("expected disk_step:<threshold>:<level>"))?;
                Self::disk_step(num(t)?, num(l)?)
            }
            "table" => {
                let mut radii = Vec::new();
                let mut values = Vec::new();
                for knot in rest.split(',').filter(|k| !k.trim().is_empty()) {
                    let (r, v) = knot.split_once(':').ok_or_else(|| bad("expected table:<r>:<p>,..."))?;
                    radii.push(num(r)?);
                    values.push(num(v)?);
                }
                Self::custom_table(radii, values)
            }
            _ => Err(bad("unknown kind (exponential, disk_step, table)")),
        }
    }
}
