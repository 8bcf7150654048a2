//! Null density curves for plotting: the analytic density of the chosen
//! transform next to a histogram of ratios from one simulated sequence.

use std::fs;
use std::path::Path;

use serde::Serialize;

use super::analysis::{write_json, REPORT_SCHEMA};
use crate::error::{Error, Result};
use crate::null_models::{EvalMode, NullModel, RatioDistribution};
use crate::parallel::map_indexed;
use crate::ratio::{sequence_ratios, RatioTransform};
use crate::rng::seeded_rng;

pub const MIN_GRID_SIZE: usize = 64;
/// Upper end of the plotted range for the unbounded fraction `q`.
pub const Q_AXIS_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Q,
    R,
    S,
}

impl Axis {
    pub fn of(transform: &RatioTransform) -> Self {
        match transform {
            RatioTransform::FractionQ => Axis::Q,
            RatioTransform::StandardR => Axis::R,
            _ => Axis::S,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    Histogram {
        n_samples: usize,
        n_bins: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityCurve {
    pub axis: Axis,
    pub model: String,
    pub transform: String,
    pub provenance: Provenance,
    #[serde(skip)]
    pub points: Vec<f64>,
    #[serde(skip)]
    pub densities: Vec<f64>,
    /// Trapezoid mass over the grid; below 1 on the truncated `q` axis.
    pub mass_in_grid: f64,
}

impl DensityCurve {
    pub fn to_csv(&self) -> Result<String> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["x", "density"])?;
        for (x, d) in self.points.iter().zip(&self.densities) {
            wtr.write_record([format!("{x:.16e}"), format!("{d:.16e}")])?;
        }
        let bytes = wtr.into_inner().map_err(|e| Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(x, y)| 0.5 * (x[1] - x[0]) * (y[0] + y[1]))
        .sum()
}

fn plot_range(transform: &RatioTransform) -> (f64, f64) {
    if transform.is_bounded() {
        (0.0, 1.0)
    } else {
        (0.0, Q_AXIS_MAX)
    }
}

// Points where the density has a kink or a support edge.
fn kinks(dist: &RatioDistribution, transform: &RatioTransform) -> Vec<f64> {
    let (a, b) = match dist.model() {
        NullModel::Uniform { a, b } => (*a, *b),
        NullModel::Tabulated(t) => (t.durations()[0], t.durations()[t.durations().len() - 1]),
        _ => (0.0, f64::INFINITY),
    };
    let mut q = vec![1.0];
    if a > 0.0 && b.is_finite() {
        q.extend([a / b, b / a]);
    }
    match transform {
        RatioTransform::FractionQ => q,
        RatioTransform::StandardR => q.iter().map(|q| 1.0 / (1.0 + q)).collect(),
        other => q.iter().map(|&q| other.apply_q(q)).collect(),
    }
}

/// Density of `transform` under `dist` on `grid_size` evenly spaced points
/// of its range plus the density's kinks. Open-interval densities are
/// evaluated just inside the ends.
pub fn analytic_curve(
    dist: &RatioDistribution,
    transform: &RatioTransform,
    grid_size: usize,
) -> Result<DensityCurve> {
    if grid_size < MIN_GRID_SIZE {
        return Err(Error::invalid(format!(
            "grid size must be >= {MIN_GRID_SIZE}, got {grid_size}"
        )));
    }
    let (lo, hi) = plot_range(transform);
    let nudge = 1e-9 * (hi - lo);
    let mut points: Vec<f64> = (0..grid_size)
        .map(|k| lo + (hi - lo) * k as f64 / (grid_size - 1) as f64)
        .chain(
            kinks(dist, transform)
                .into_iter()
                .filter(|x| (lo..=hi).contains(x)),
        )
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let densities = map_indexed(points.len(), |k| {
        let x = points[k].clamp(lo + nudge, hi - nudge);
        dist.transform_pdf(transform, x)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(DensityCurve {
        axis: Axis::of(transform),
        model: dist.model().label(),
        transform: transform.label(),
        provenance: match dist.mode() {
            EvalMode::ClosedForm => Provenance::ClosedForm,
            EvalMode::Quadrature => Provenance::Quadrature,
        },
        mass_in_grid: trapezoid(&points, &densities),
        points,
        densities,
    })
}

/// Histogram density of the ratios of one simulated sequence of
/// `n_samples + 1` intervals (stream 0 of `seed`). Values are
/// `count / (N * width)` with `N` counting ratios outside the range too.
pub fn histogram_curve(
    dist: &RatioDistribution,
    transform: &RatioTransform,
    n_samples: usize,
    n_bins: usize,
    seed: u64,
) -> Result<DensityCurve> {
    if n_samples == 0 || n_bins == 0 {
        return Err(Error::invalid(
            "histogram needs at least one sample and one bin",
        ));
    }
    let seq = dist
        .model()
        .sample_sequence(n_samples + 1, &mut seeded_rng(seed, 0), "histogram")?;
    let ratios = sequence_ratios(&seq, transform)?;
    let (lo, hi) = plot_range(transform);
    let width = (hi - lo) / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for x in ratios {
        if (lo..=hi).contains(&x) {
            counts[(((x - lo) / width) as usize).min(n_bins - 1)] += 1;
        }
    }
    let n = n_samples as f64;
    let points = (0..n_bins).map(|k| lo + (k as f64 + 0.5) * width).collect();
    let densities: Vec<f64> = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    Ok(DensityCurve {
        axis: Axis::of(transform),
        model: dist.model().label(),
        transform: transform.label(),
        provenance: Provenance::Histogram {
            n_samples,
            n_bins,
            seed,
        },
        mass_in_grid: densities.iter().sum::<f64>() * width,
        points,
        densities,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveSet {
    pub analytic: DensityCurve,
    pub histogram: DensityCurve,
}

pub fn emit_density_curves(
    dist: &RatioDistribution,
    transform: &RatioTransform,
    grid_size: usize,
    n_samples: usize,
    n_bins: usize,
    seed: u64,
) -> Result<CurveSet> {
    Ok(CurveSet {
        analytic: analytic_curve(dist, transform, grid_size)?,
        histogram: histogram_curve(dist, transform, n_samples, n_bins, seed)?,
    })
}

#[derive(Serialize)]
struct CurveEntry<'a> {
    file: &'static str,
    #[serde(flatten)]
    curve: &'a DensityCurve,
}

#[derive(Serialize)]
struct CurveSidecar<'a> {
    schema: &'static str,
    curves: Vec<CurveEntry<'a>>,
}

/// Writes `analytic.csv`, `histogram.csv` and the `curves.json` metadata into `dir`.
pub fn write_curves(set: &CurveSet, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)
        .map_err(|e| Error::from(e).context(format!("creating {}", dir.display())))?;
    fs::write(dir.join("analytic.csv"), set.analytic.to_csv()?)?;
    fs::write(dir.join("histogram.csv"), set.histogram.to_csv()?)?;
    let sidecar = CurveSidecar {
        schema: REPORT_SCHEMA,
        curves: vec![
            CurveEntry {
                file: "analytic.csv",
                curve: &set.analytic,
            },
            CurveEntry {
                file: "histogram.csv",
                curve: &set.histogram,
            },
        ],
    };
    write_json(&sidecar, Some(&dir.join("curves.json")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dist(m: NullModel) -> RatioDistribution {
        RatioDistribution::new(m).unwrap()
    }

    #[test]
    fn poisson_is_flat() {
        let c = analytic_curve(
            &dist(NullModel::exponential(1.0).unwrap()),
            &RatioTransform::StandardR,
            64,
        )
        .unwrap();
        assert!(c.densities.iter().all(|&d| (d - 1.0).abs() < 1e-12));
        assert_eq!(c.provenance, Provenance::ClosedForm);
    }

    #[test]
    fn uniform_peaks_at_half() {
        let c = analytic_curve(
            &dist(NullModel::uniform(0.0, 1.0).unwrap()),
            &RatioTransform::StandardR,
            65,
        )
        .unwrap();
        assert_abs_diff_eq!(c.densities[32], 2.0, epsilon = 1e-12);
        assert!(c.densities.iter().all(|&d| d <= 2.0 + 1e-12));
    }

    #[test]
    fn uniform_support() {
        let c = analytic_curve(
            &dist(NullModel::uniform(1.0, 2.0).unwrap()),
            &RatioTransform::StandardR,
            301,
        )
        .unwrap();
        for (x, d) in c.points.iter().zip(&c.densities) {
            if *x < 1.0 / 3.0 || *x > 2.0 / 3.0 {
                assert_eq!(*d, 0.0, "x={x}");
            } else if *x > 1.0 / 3.0 + 1e-6 && *x < 2.0 / 3.0 - 1e-6 {
                assert!(*d > 0.0, "x={x}");
            }
        }
    }

    #[test]
    fn analytic_mass_near_one() {
        let models = [
            NullModel::exponential(2.0).unwrap(),
            NullModel::uniform(0.0, 1.0).unwrap(),
            NullModel::uniform(1.0, 2.0).unwrap(),
            NullModel::half_normal(1.0).unwrap(),
        ];
        for m in models {
            let c = analytic_curve(&dist(m.clone()), &RatioTransform::StandardR, 64).unwrap();
            assert!(
                (c.mass_in_grid - 1.0).abs() < 1e-3,
                "{m}: {}",
                c.mass_in_grid
            );
        }
        let d = std::sync::Arc::new(dist(NullModel::uniform(0.0, 1.0).unwrap()));
        let s = analytic_curve(&d, &d.plus_transform(), 64).unwrap();
        assert!((s.mass_in_grid - 1.0).abs() < 1e-3);
        assert_eq!(s.axis, Axis::S);
    }

    #[test]
    fn histogram_tracks_density() {
        let d = dist(NullModel::exponential(1.0).unwrap());
        let h = histogram_curve(&d, &RatioTransform::StandardR, 100_000, 20, 7).unwrap();
        assert_abs_diff_eq!(h.mass_in_grid, 1.0, epsilon = 1e-12);
        assert!(h.densities.iter().all(|&v| (v - 1.0).abs() < 0.1));
    }

    #[test]
    fn grid_too_small() {
        let d = dist(NullModel::exponential(1.0).unwrap());
        assert!(analytic_curve(&d, &RatioTransform::StandardR, 63).is_err());
    }

    #[test]
    fn files_written() {
        let d = dist(NullModel::uniform(0.0, 1.0).unwrap());
        let set = emit_density_curves(&d, &RatioTransform::StandardR, 64, 1000, 10, 1).unwrap();
        let tmp = tempfile::tempdir().unwrap();
        write_curves(&set, tmp.path()).unwrap();
        let csv = fs::read_to_string(tmp.path().join("analytic.csv")).unwrap();
        assert!(csv.starts_with("x,density\n"));
        assert_eq!(csv.lines().count(), 66);
        let meta: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(tmp.path().join("curves.json")).unwrap())
                .unwrap();
        assert_eq!(meta["curves"][1]["provenance"]["kind"], "histogram");
    }
}
