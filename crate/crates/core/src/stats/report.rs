use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TestMethod {
    WilcoxonSignedRank,
    KolmogorovSmirnov,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestReport {
    pub method: TestMethod,
    pub statistic: f64,
    pub n_effective: usize,
    /// Rounds to 0 for extreme results; `log10_p` stays exact.
    pub p_value: f64,
    pub log10_p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub metadata: BTreeMap<String, Value>,
}

impl TestReport {
    pub(crate) fn new(
        method: TestMethod,
        statistic: f64,
        n_effective: usize,
        log10_p: f64,
    ) -> Self {
        let log10_p = log10_p.min(0.0);
        Self {
            method,
            statistic,
            n_effective,
            p_value: 10f64.powf(log10_p).clamp(0.0, 1.0),
            log10_p,
            seed: None,
            metadata: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_meta(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.metadata.insert(key.to_string(), value.into());
        self
    }

    pub fn significant_at(&self, alpha: f64) -> bool {
        self.log10_p < alpha.log10()
    }
}
