//! The JSON fields the demo page reads, checked through the public API.

use ratiokit_web::{density_curves, normalization_constants, paired_test};
use serde_json::Value;

fn parse(s: Result<String, String>) -> Value {
    serde_json::from_str(&s.expect("call succeeds")).expect("valid JSON")
}

#[test]
fn curve_fields() {
    let v = parse(density_curves(
        "halfnormal:1",
        "rescale-plus",
        128,
        20_000,
        25,
        9,
    ));
    for key in ["model", "transform", "bin_width"] {
        assert!(!v[key].is_null(), "{key}");
    }
    for curve in ["analytic", "histogram"] {
        let c = &v[curve];
        assert_eq!(
            c["x"].as_array().unwrap().len(),
            c["density"].as_array().unwrap().len()
        );
        assert!(
            (c["mass_in_grid"].as_f64().unwrap() - 1.0).abs() < 0.02,
            "{curve}: {}",
            c["mass_in_grid"]
        );
    }
    // own-null rescaling is flat
    assert!(v["analytic"]["density"]
        .as_array()
        .unwrap()
        .iter()
        .all(|d| d.as_f64() == Some(1.0)));
}

#[test]
fn constants_cover_every_layout() {
    let v = parse(normalization_constants(
        "exponential:2",
        "r",
        "thirds:1:2,1:1,2:1,3:1",
        100_000,
        5,
    ));
    let layouts = v["layouts"].as_array().unwrap();
    assert_eq!(layouts.len(), 4);
    for l in layouts {
        for b in l["bins"].as_array().unwrap() {
            // flat null: mass equals width
            assert!((b["analytic"].as_f64().unwrap() - b["width"].as_f64().unwrap()).abs() < 1e-12);
            assert!(b["role"].is_string());
        }
    }
}

#[test]
fn paired_test_is_reproducible() {
    let a = paired_test(
        "halfnormal:1",
        "halfnormal:1",
        "rescale-minus",
        "width",
        50,
        200,
        3,
    )
    .unwrap();
    let b = paired_test(
        "halfnormal:1",
        "halfnormal:1",
        "rescale-minus",
        "width",
        50,
        200,
        3,
    )
    .unwrap();
    assert_eq!(a, b);
    let v = parse(Ok(a));
    let r = &v["report"];
    assert_eq!(r["method"], "wilcoxon_signed_rank");
    for key in ["statistic", "n_effective", "log10_p"] {
        assert!(r[key].is_number(), "{key}");
    }
    assert_eq!(v["pairs"].as_array().unwrap().len(), 50);
}
