//! End-to-end behaviour of the analysis pipeline on simulated files.

use std::fs;
use std::path::Path;

use ratiokit::io::{
    load_sequences, read_sequences, run_analysis, simulate_command, AnalysisConfig, AnalysisReport,
    NormalizerSpec, NullSpec, SequenceKind, TestKind, TransformSpec,
};
use ratiokit::null_models::NullModel;
use ratiokit::Error;

fn simulate(
    dir: &Path,
    name: &str,
    model: &NullModel,
    n: usize,
    len: usize,
    seed: u64,
) -> std::path::PathBuf {
    let path = dir.join(name);
    simulate_command(model, n, len, seed, &path).unwrap();
    path
}

fn wilcoxon(report: &AnalysisReport) -> &ratiokit::stats::TestReport {
    report.test_reports().next().expect("a Wilcoxon report")
}

#[test]
fn simulated_files_round_trip_exactly() {
    let tmp = tempfile::tempdir().unwrap();
    let model = NullModel::exponential(1.0).unwrap();
    let path = tmp.path().join("s.csv");
    let written = simulate_command(&model, 3, 5, 42, &path).unwrap();
    let loaded = load_sequences(&path, SequenceKind::Intervals).unwrap();
    assert_eq!(loaded.sequences, written);
    assert_eq!(loaded.sequences.len(), 3);
    assert!(loaded.sequences.iter().all(|s| s.len() == 5));

    let again = tmp.path().join("t.csv");
    simulate_command(&model, 3, 5, 42, &again).unwrap();
    assert_eq!(fs::read(&path).unwrap(), fs::read(&again).unwrap());

    let uni = simulate_command(
        &NullModel::uniform(1.0, 3.0).unwrap(),
        4,
        50,
        1,
        &tmp.path().join("u.csv"),
    )
    .unwrap();
    assert!(uni
        .iter()
        .flat_map(|s| s.intervals())
        .all(|&i| (1.0..=3.0).contains(&i)));
}

#[test]
fn onsets_are_differenced() {
    let csv = "sequence_id,onset_s\na,0\na,1\na,3\nb,0\nb,2\nb,4\nb,6\n";
    let loaded = read_sequences(csv.as_bytes(), SequenceKind::Onsets).unwrap();
    assert_eq!(loaded.sequences[0].intervals(), &[1.0, 2.0]);
    assert_eq!(loaded.sequences[1].intervals(), &[2.0, 2.0, 2.0]);
}

#[test]
fn bad_rows_name_their_line() {
    let csv = "sequence_id,interval_s\na,1\na,-1\na,2\n";
    let err = read_sequences(csv.as_bytes(), SequenceKind::Intervals).unwrap_err();
    assert!(err.to_string().contains("line 3"), "{err}");
    let err = read_sequences(
        "sequence_id,interval_s\n".as_bytes(),
        SequenceKind::Intervals,
    )
    .unwrap_err();
    assert!(err.to_string().contains("no sequences"), "{err}");
}

#[test]
fn poisson_data_is_mostly_not_significant() {
    let tmp = tempfile::tempdir().unwrap();
    let model = NullModel::exponential(2.0).unwrap();
    let significant = (0..40u64)
        .filter(|&seed| {
            let input = simulate(tmp.path(), &format!("p{seed}.csv"), &model, 60, 200, seed);
            let mut cfg = AnalysisConfig::new(input, SequenceKind::Intervals);
            cfg.seed = Some(seed);
            wilcoxon(&run_analysis(&cfg).unwrap()).significant_at(0.05)
        })
        .count();
    // about 2 of 40 expected; 8 or more would have probability < 1e-3
    assert!(significant <= 7, "{significant}/40 significant");
}

#[test]
fn uniform_data_needs_the_matching_normalizer() {
    let tmp = tempfile::tempdir().unwrap();
    let input = simulate(
        tmp.path(),
        "u.csv",
        &NullModel::uniform(0.0, 1.0).unwrap(),
        100,
        300,
        8,
    );
    let mut cfg = AnalysisConfig::new(&input, SequenceKind::Intervals);
    cfg.seed = Some(1);
    let width = run_analysis(&cfg).unwrap();
    assert!(wilcoxon(&width).log10_p < -6.0, "{:?}", wilcoxon(&width));

    cfg.null = Some(NullSpec::Uniform(0.0, 1.0));
    cfg.normalizer = NormalizerSpec::Mass;
    let mass = run_analysis(&cfg).unwrap();
    assert!(
        !wilcoxon(&mass).significant_at(0.01),
        "{:?}",
        wilcoxon(&mass)
    );

    // the rescaled space with width normalization tells the same story
    cfg.normalizer = NormalizerSpec::Width;
    cfg.transform = TransformSpec::RescalePlus;
    cfg.tests = vec![TestKind::Wilcoxon, TestKind::Ks];
    let rescaled = run_analysis(&cfg).unwrap();
    assert!(rescaled.test_reports().all(|r| !r.significant_at(0.01)));
    assert_eq!(rescaled.test_reports().count(), 2);
}

#[test]
fn report_allows_recomputing_every_value() {
    let tmp = tempfile::tempdir().unwrap();
    let input = simulate(
        tmp.path(),
        "h.csv",
        &NullModel::half_normal(1.0).unwrap(),
        12,
        80,
        3,
    );
    let mut cfg = AnalysisConfig::new(&input, SequenceKind::Intervals);
    cfg.null = Some(NullSpec::HalfNormal(1.0));
    cfg.normalizer = NormalizerSpec::MassMc(50_000);
    cfg.seed = Some(77);
    let json: serde_json::Value = serde_json::to_value(run_analysis(&cfg).unwrap()).unwrap();

    assert_eq!(json["schema"], "ratiokit_report_v1");
    assert_eq!(json["config"]["seed"], 77);
    let layout = &json["layouts"][0];
    let w: Vec<f64> = layout["normalizers"]["values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    let mc = layout["normalizers"]["monte_carlo"].as_array().unwrap();
    assert_eq!(mc.len(), w.len());
    assert!(mc.iter().all(|e| e["std_error"].as_f64().unwrap() > 0.0));

    for seq in json["sequences"].as_array().unwrap() {
        let ratios = seq["ratios"].as_array().unwrap();
        let normalized = &seq["layouts"][0]["normalized"];
        let n = normalized["total"].as_u64().unwrap();
        assert_eq!(n as usize, ratios.len());
        for (k, bin) in normalized["bins"].as_array().unwrap().iter().enumerate() {
            let (lo, hi) = (bin["lo"].as_f64().unwrap(), bin["hi"].as_f64().unwrap());
            let count = ratios
                .iter()
                .map(|r| r.as_f64().unwrap())
                .filter(|&r| r >= lo && r < hi)
                .count() as u64;
            assert_eq!(bin["count"].as_u64().unwrap(), count);
            assert_eq!(bin["normalizer"].as_f64().unwrap(), w[k]);
            let expected = count as f64 / (n as f64 * w[k]);
            assert!((bin["value"].as_f64().unwrap() - expected).abs() <= 1e-12 * expected.max(1.0));
        }
    }
}

#[test]
fn bad_configs_are_rejected_before_any_work() {
    let mut cfg = AnalysisConfig::new("/nonexistent.csv", SequenceKind::Intervals);
    cfg.normalizer = NormalizerSpec::Mass;
    assert!(matches!(run_analysis(&cfg), Err(Error::InvalidInput(_))));
    cfg.normalizer = NormalizerSpec::Width;
    cfg.transform = TransformSpec::Q;
    assert!(matches!(run_analysis(&cfg), Err(Error::InvalidInput(_))));
    cfg.transform = TransformSpec::R;
    let err = run_analysis(&cfg).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}
