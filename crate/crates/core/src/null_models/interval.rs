//! Interval-duration null hypotheses: i.i.d. draws from one of a few
//! densities on `[0, inf)`.

use std::fmt;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use serde::Serialize;
use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::ratio::IntervalSequence;

/// Minimum number of rows in a tabulated density.
pub const MIN_TABLE_ROWS: usize = 8;

/// Multiples of the scale beyond which the remaining mass is below 1e-10.
const EXP_TRUNCATION: f64 = 40.0;
const HALF_NORMAL_TRUNCATION: f64 = 9.0;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NullModel {
    /// Poisson process with the given rate; density `rate * exp(-rate * i)`.
    Exponential {
        rate: f64,
    },
    /// Flat density on `[a, b]`.
    Uniform {
        a: f64,
        b: f64,
    },
    /// `sqrt(2/pi) / scale * exp(-i^2 / (2 scale^2))` on `[0, inf)`.
    HalfNormal {
        scale: f64,
    },
    Tabulated(TabulatedDensity),
}

impl NullModel {
    pub fn exponential(rate: f64) -> Result<Self> {
        let m = NullModel::Exponential { rate };
        m.validate()?;
        Ok(m)
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        let m = NullModel::Uniform { a, b };
        m.validate()?;
        Ok(m)
    }

    pub fn half_normal(scale: f64) -> Result<Self> {
        let m = NullModel::HalfNormal { scale };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NullModel::Exponential { rate } if !(rate > 0.0 && rate.is_finite()) => Err(
                Error::domain(format!("exponential rate must be > 0, got {rate}")),
            ),
            NullModel::Uniform { a, b } if !(a >= 0.0 && a < b && b.is_finite()) => {
                Err(Error::domain(format!(
                    "uniform bounds must satisfy 0 <= a < b, got a={a}, b={b}"
                )))
            }
            NullModel::HalfNormal { scale } if !(scale > 0.0 && scale.is_finite()) => Err(
                Error::domain(format!("half-normal scale must be > 0, got {scale}")),
            ),
            _ => Ok(()),
        }
    }

    /// Whether exact formulas for the ratio distributions exist.
    pub fn has_closed_form(&self) -> bool {
        matches!(
            self,
            NullModel::Exponential { .. } | NullModel::Uniform { .. }
        )
    }

    pub fn interval_pdf(&self, i: f64) -> Result<f64> {
        if !(i >= 0.0) {
            return Err(Error::domain(format!(
                "interval density needs i >= 0, got {i}"
            )));
        }
        Ok(self.pdf(i))
    }

    /// Density without the domain check; zero for negative arguments.
    pub(crate) fn pdf(&self, i: f64) -> f64 {
        if i < 0.0 {
            return 0.0;
        }
        match self {
            NullModel::Exponential { rate } => rate * (-rate * i).exp(),
            NullModel::Uniform { a, b } => {
                if i >= *a && i <= *b {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            NullModel::HalfNormal { scale } => {
                let z = i / scale;
                (2.0 / std::f64::consts::PI).sqrt() / scale * (-0.5 * z * z).exp()
            }
            NullModel::Tabulated(t) => t.pdf(i),
        }
    }

    pub fn interval_cdf(&self, i: f64) -> f64 {
        if i <= 0.0 {
            return 0.0;
        }
        match self {
            NullModel::Exponential { rate } => -(-rate * i).exp_m1(),
            NullModel::Uniform { a, b } => ((i - a) / (b - a)).clamp(0.0, 1.0),
            NullModel::HalfNormal { scale } => erf(i / (scale * std::f64::consts::SQRT_2)),
            NullModel::Tabulated(t) => t.cdf(i),
        }
    }

    /// Duration beyond which the model puts less than 1e-10 of its mass.
    /// Integrals over the unbounded supports stop here.
    pub fn truncation(&self) -> f64 {
        match self {
            NullModel::Exponential { rate } => EXP_TRUNCATION / rate,
            NullModel::Uniform { b, .. } => *b,
            NullModel::HalfNormal { scale } => HALF_NORMAL_TRUNCATION * scale,
            NullModel::Tabulated(t) => t.upper(),
        }
    }

    /// Durations where the density jumps or has a kink.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            NullModel::Uniform { a, b } => vec![*a, *b],
            NullModel::Tabulated(t) => t.durations().to_vec(),
            _ => Vec::new(),
        }
    }

    /// One strictly positive draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        loop {
            let x = match self {
                NullModel::Exponential { rate } => {
                    Exp::new(*rate).expect("validated rate").sample(rng)
                }
                NullModel::Uniform { a, b } => {
                    // (0, 1] keeps a = 0 from yielding a zero interval
                    let u = 1.0 - rng.random::<f64>();
                    a + (b - a) * u
                }
                NullModel::HalfNormal { scale } => {
                    let z: f64 = StandardNormal.sample(rng);
                    scale * z.abs()
                }
                NullModel::Tabulated(t) => t.sample(rng),
            };
            if x > 0.0 {
                return x;
            }
        }
    }

    /// `n` i.i.d. draws as a sequence labelled `source_id`.
    pub fn sample_sequence<R: Rng + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
        source_id: impl Into<String>,
    ) -> Result<IntervalSequence> {
        self.validate()?;
        if n < 2 {
            return Err(Error::domain(format!("need at least 2 intervals, got {n}")));
        }
        let intervals = (0..n).map(|_| self.sample(rng)).collect();
        IntervalSequence::new(source_id, intervals)
    }

    /// Command-line style descriptor, e.g. `uniform:0,1`.
    pub fn label(&self) -> String {
        match self {
            NullModel::Exponential { rate } => format!("exponential:{rate}"),
            NullModel::Uniform { a, b } => format!("uniform:{a},{b}"),
            NullModel::HalfNormal { scale } => format!("halfnormal:{scale}"),
            NullModel::Tabulated(t) => format!("table:{}", t.label),
        }
    }
}

impl fmt::Display for NullModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Piecewise-linear density through `(duration, density)` points, zero
/// outside the grid and rescaled to unit mass.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedDensity {
    label: String,
    durations: Vec<f64>,
    densities: Vec<f64>,
    #[serde(skip)]
    cumulative: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(label: impl Into<String>, durations: Vec<f64>, densities: Vec<f64>) -> Result<Self> {
        if durations.len() != densities.len() {
            return Err(Error::invalid("durations and densities differ in length"));
        }
        if durations.len() < MIN_TABLE_ROWS {
            return Err(Error::invalid(format!(
                "tabulated density needs at least {MIN_TABLE_ROWS} rows, got {}",
                durations.len()
            )));
        }
        if durations.iter().chain(&densities).any(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "tabulated density contains non-finite values",
            ));
        }
        if durations[0] < 0.0 {
            return Err(Error::invalid("tabulated durations must be >= 0"));
        }
        if let Some(k) = durations.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::invalid(format!(
                "tabulated durations not strictly increasing at row {}",
                k + 1
            )));
        }
        if densities.iter().any(|&d| d < 0.0) {
            return Err(Error::invalid("tabulated densities must be >= 0"));
        }

        let mut cumulative = Vec::with_capacity(durations.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for k in 1..durations.len() {
            acc += 0.5 * (densities[k] + densities[k - 1]) * (durations[k] - durations[k - 1]);
            cumulative.push(acc);
        }
        if !(acc > 0.0) {
            return Err(Error::invalid("tabulated density has zero mass"));
        }
        let densities = densities.into_iter().map(|d| d / acc).collect();
        cumulative.iter_mut().for_each(|c| *c /= acc);
        *cumulative.last_mut().expect("non-empty") = 1.0;

        Ok(Self {
            label: label.into(),
            durations,
            densities,
            cumulative,
        })
    }

    /// Reads a `duration_s,density` CSV.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_path(path)?;
        let headers = reader.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "duration_s" || &headers[1] != "density" {
            return Err(Error::invalid(format!(
                "{}: expected header 'duration_s,density'",
                path.display()
            )));
        }
        let mut durations = Vec::new();
        let mut densities = Vec::new();
        for record in reader.records() {
            let record = record?;
            let line = record.position().map_or(0, |p| p.line());
            let parse = |k: usize| -> Result<f64> {
                record
                    .get(k)
                    .and_then(|s| s.parse::<f64>().ok())
                    .ok_or_else(|| Error::Row {
                        line,
                        message: format!("column {} is not a number", k + 1),
                    })
            };
            durations.push(parse(0)?);
            densities.push(parse(1)?);
        }
        Self::new(path.display().to_string(), durations, densities)
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    pub fn densities(&self) -> &[f64] {
        &self.densities
    }

    fn upper(&self) -> f64 {
        *self.durations.last().expect("non-empty")
    }

    // index k with durations[k] <= x < durations[k + 1], for x inside the grid
    fn segment(&self, x: f64) -> usize {
        let k = self.durations.partition_point(|&d| d <= x);
        k.saturating_sub(1).min(self.durations.len() - 2)
    }

    fn pdf(&self, x: f64) -> f64 {
        if x < self.durations[0] || x > self.upper() {
            return 0.0;
        }
        let k = self.segment(x);
        let (x0, x1) = (self.durations[k], self.durations[k + 1]);
        let (y0, y1) = (self.densities[k], self.densities[k + 1]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= self.durations[0] {
            return 0.0;
        }
        if x >= self.upper() {
            return 1.0;
        }
        let k = self.segment(x);
        let x0 = self.durations[k];
        let y0 = self.densities[k];
        let slope = (self.densities[k + 1] - y0) / (self.durations[k + 1] - x0);
        let d = x - x0;
        (self.cumulative[k] + y0 * d + 0.5 * slope * d * d).min(1.0)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let k = self
            .cumulative
            .partition_point(|&c| c <= u)
            .saturating_sub(1)
            .min(self.durations.len() - 2);
        let x0 = self.durations[k];
        let h = self.durations[k + 1] - x0;
        let y0 = self.densities[k];
        let slope = (self.densities[k + 1] - y0) / h;
        let need = u - self.cumulative[k];
        // root of 0.5 * slope * d^2 + y0 * d - need = 0 in cancellation-free form
        let disc = (y0 * y0 + 2.0 * slope * need).max(0.0);
        let denom = y0 + disc.sqrt();
        let d = if denom > 0.0 { 2.0 * need / denom } else { 0.0 };
        x0 + d.clamp(0.0, h)
    }
}
