//! Browser bindings for the ratiokit demo page. Every entry point takes
//! spec strings as typed on the command line (`uniform:0,1`, `rescale-plus`,
//! `mass-mc:100000`, ...) and returns a JSON document for the page to draw.
//!
//! The functions are plain Rust on native targets, so they are tested with
//! `cargo test` like any other library.

use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;
use wasm_bindgen::prelude::wasm_bindgen;

use ratiokit::binning::{BinLayout, BinRole};
use ratiokit::experiment::{paired_experiment, ExperimentConfig, OffBins};
use ratiokit::io::{emit_density_curves, LayoutSpec, NormalizerSpec, NullSpec, TransformSpec};
use ratiokit::null_models::RatioDistribution;
use ratiokit::numerics::mc_bin_masses;
use ratiokit::stats::TestReport;

/// Work limits that keep a single call under a few seconds in a browser tab.
pub const MAX_GRID: usize = 4096;
pub const MAX_SAMPLES: usize = 2_000_000;
pub const MAX_SEQUENCES: usize = 2000;
pub const MAX_SEQ_LEN: usize = 5000;

type JsResult = Result<String, String>;

fn parse<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse::<T>().map_err(|e| e.to_string())
}

// tables need a file system, which the page does not have
fn null_model(spec: &str) -> Result<Arc<RatioDistribution>, String> {
    match parse::<NullSpec>(spec)? {
        NullSpec::Table(_) => Err("tabulated nulls are not available in the browser".into()),
        other => other
            .resolve()
            .and_then(RatioDistribution::shared)
            .map_err(|e| e.to_string()),
    }
}

fn limit(name: &str, value: usize, max: usize) -> Result<(), String> {
    if value > max {
        Err(format!("{name} is limited to {max} here, got {value}"))
    } else {
        Ok(())
    }
}

fn to_json<T: Serialize>(value: &T) -> JsResult {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Curve {
    x: Vec<f64>,
    density: Vec<f64>,
    mass_in_grid: f64,
}

#[derive(Serialize)]
struct Curves {
    model: String,
    transform: String,
    analytic: Curve,
    histogram: Curve,
    bin_width: f64,
}

/// Null density of `transform` on a grid, next to a histogram of
/// `samples` simulated ratios.
#[wasm_bindgen(js_name = densityCurves)]
pub fn density_curves(
    null: &str,
    transform: &str,
    grid: usize,
    samples: usize,
    bins: usize,
    seed: u32,
) -> JsResult {
    limit("grid", grid, MAX_GRID)?;
    limit("samples", samples, MAX_SAMPLES)?;
    let dist = null_model(null)?;
    let transform = parse::<TransformSpec>(transform)?
        .resolve(Some(&dist))
        .map_err(|e| e.to_string())?;
    let set = emit_density_curves(&dist, &transform, grid, samples, bins, u64::from(seed))
        .map_err(|e| e.to_string())?;
    let bin_width = match set.histogram.points.as_slice() {
        [a, b, ..] => b - a,
        _ => 1.0,
    };
    let view = |c: ratiokit::io::DensityCurve| Curve {
        x: c.points,
        density: c.densities,
        mass_in_grid: c.mass_in_grid,
    };
    to_json(&Curves {
        model: set.analytic.model.clone(),
        transform: set.analytic.transform.clone(),
        bin_width,
        analytic: view(set.analytic),
        histogram: view(set.histogram),
    })
}

#[derive(Serialize)]
struct BinConstants {
    lo: f64,
    hi: f64,
    role: BinRole,
    width: f64,
    analytic: f64,
    monte_carlo: f64,
    std_error: f64,
}

#[derive(Serialize)]
struct Constants {
    model: String,
    transform: String,
    layouts: Vec<LayoutConstants>,
}

#[derive(Serialize)]
struct LayoutConstants {
    label: String,
    bins: Vec<BinConstants>,
}

/// Analytic and Monte Carlo null mass of every bin of `layout`.
#[wasm_bindgen(js_name = normalizationConstants)]
pub fn normalization_constants(
    null: &str,
    transform: &str,
    layout: &str,
    mc_samples: usize,
    seed: u32,
) -> JsResult {
    limit("samples", mc_samples, MAX_SAMPLES)?;
    let dist = null_model(null)?;
    let transform = parse::<TransformSpec>(transform)?
        .resolve(Some(&dist))
        .map_err(|e| e.to_string())?;
    let layouts: Vec<BinLayout> = parse::<LayoutSpec>(layout)?
        .resolve()
        .map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(layouts.len());
    for l in &layouts {
        let edges: Vec<(f64, f64)> = l.bins().map(|b| (b.lo, b.hi)).collect();
        let mc = mc_bin_masses(
            dist.model(),
            &transform,
            &edges,
            mc_samples as u64,
            u64::from(seed),
        )
        .map_err(|e| e.to_string())?;
        let bins = l
            .bins()
            .zip(mc)
            .map(|(b, e)| {
                Ok(BinConstants {
                    lo: b.lo,
                    hi: b.hi,
                    role: b.role,
                    width: b.width(),
                    analytic: dist
                        .bin_mass_analytic(&transform, b.lo, b.hi)
                        .map_err(|e| e.to_string())?,
                    monte_carlo: e.mass,
                    std_error: e.std_error,
                })
            })
            .collect::<Result<_, String>>()?;
        out.push(LayoutConstants {
            label: l.label(),
            bins,
        });
    }
    to_json(&Constants {
        model: dist.model().label(),
        transform: transform.label(),
        layouts: out,
    })
}

#[derive(Serialize)]
struct PairedTest {
    report: TestReport,
    /// Per-sequence (on, off) normalized values.
    pairs: Vec<(f64, f64)>,
}

/// Simulates sequences from `data_null`, bins their ratios in the 1:1
/// layout and runs the paired on/off test. Rescaled transforms and mass
/// normalizers refer to `assumed_null`, which may differ from the data.
#[wasm_bindgen(js_name = pairedTest)]
pub fn paired_test(
    data_null: &str,
    assumed_null: &str,
    transform: &str,
    normalizer: &str,
    n_sequences: usize,
    seq_len: usize,
    seed: u32,
) -> JsResult {
    limit("sequences", n_sequences, MAX_SEQUENCES)?;
    limit("sequence length", seq_len, MAX_SEQ_LEN)?;
    let data = null_model(data_null)?;
    let assumed = null_model(assumed_null)?;
    let transform = parse::<TransformSpec>(transform)?
        .resolve(Some(&assumed))
        .map_err(|e| e.to_string())?;
    let layout = BinLayout::one_to_one();
    let normalizers = parse::<NormalizerSpec>(normalizer)?
        .resolve(Some(&assumed), &transform, u64::from(seed))
        .and_then(|n| n.resolve(&layout))
        .map_err(|e| e.to_string())?;
    let cfg = ExperimentConfig {
        model: data.model().clone(),
        transform,
        layout,
        normalizers,
        n_sequences,
        seq_len,
        seed: u64::from(seed),
        off_bins: OffBins::Combined,
    };
    let outcome = paired_experiment(&cfg).map_err(|e| e.to_string())?;
    to_json(&PairedTest {
        report: outcome.report().clone(),
        pairs: outcome.pairs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::Value;

    fn json(s: JsResult) -> Value {
        serde_json::from_str(&s.unwrap()).unwrap()
    }

    #[test]
    fn poisson_curve_is_flat() {
        let v = json(density_curves("exponential:1", "r", 64, 10_000, 20, 1));
        assert!(v["analytic"]["density"]
            .as_array()
            .unwrap()
            .iter()
            .all(|d| (d.as_f64().unwrap() - 1.0).abs() < 1e-12));
        assert_eq!(v["histogram"]["x"].as_array().unwrap().len(), 20);
        assert!((v["bin_width"].as_f64().unwrap() - 0.05).abs() < 1e-12);
    }

    #[test]
    fn uniform_constants() {
        let v = json(normalization_constants(
            "uniform:0,1",
            "r",
            "one-to-one",
            200_000,
            3,
        ));
        let bins = v["layouts"][0]["bins"].as_array().unwrap();
        assert_eq!(bins.len(), 3);
        // on bin [4/9, 5/9] holds twice the 0.1 of its left half
        assert!((bins[1]["analytic"].as_f64().unwrap() - 0.2).abs() < 1e-12);
        assert!((bins[0]["analytic"].as_f64().unwrap() - 1.0 / 15.0).abs() < 1e-12);
        for b in bins {
            let diff = (b["analytic"].as_f64().unwrap() - b["monte_carlo"].as_f64().unwrap()).abs();
            assert!(diff <= 4.0 * b["std_error"].as_f64().unwrap());
        }
    }

    #[test]
    fn mismatch_and_correction() {
        let width = json(paired_test(
            "uniform:0,1",
            "uniform:0,1",
            "r",
            "width",
            200,
            500,
            4,
        ));
        assert!(width["report"]["log10_p"].as_f64().unwrap() < -6.0);
        let mass = json(paired_test(
            "uniform:0,1",
            "uniform:0,1",
            "r",
            "mass",
            200,
            500,
            4,
        ));
        assert!(mass["report"]["p_value"].as_f64().unwrap() > 0.01);
        assert_eq!(mass["pairs"].as_array().unwrap().len(), 200);
    }

    #[test]
    fn errors_are_messages() {
        assert!(density_curves("table:x.csv", "r", 64, 100, 10, 0)
            .unwrap_err()
            .contains("browser"));
        assert!(density_curves("uniform:2,1", "r", 64, 100, 10, 0).is_err());
        assert!(paired_test(
            "exponential:1",
            "exponential:1",
            "r",
            "width",
            10_000,
            10,
            0
        )
        .unwrap_err()
        .contains("limited"));
        assert!(normalization_constants("exponential:1", "r", "edges:0.1", 100, 0).is_err());
    }
}
