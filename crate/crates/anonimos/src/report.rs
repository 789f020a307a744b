//! Flat JSON run reports.

use anonimos_core::metrics::AnonymityReport;
use anonimos_core::VertexId;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SourceVerdict {
    pub source: VertexId,
    pub preserved: bool,
}

/// Report written by every command. Keys are stable; absent values are
/// `null` rather than omitted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub status: String,
    pub preservation_rate: Option<f64>,
    pub kendall_tau: Option<f64>,
    pub k_anonymity: Option<usize>,
    pub bucket_precision: f64,
    pub min_relative_distance: Option<f64>,
    pub median_relative_distance: Option<f64>,
    pub max_relative_distance: Option<f64>,
    pub rounds_used: Option<usize>,
    pub delta_used: Option<f64>,
    pub margin: Option<String>,
    pub seed: u64,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    pub constraint_rows: Option<usize>,
    pub verdicts: Vec<SourceVerdict>,
    pub failed_sources: Vec<VertexId>,
    pub violated: Vec<String>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn new(status: &str, seed: u64, bucket_precision: f64) -> Self {
        Report {
            status: status.to_string(),
            preservation_rate: None,
            kendall_tau: None,
            k_anonymity: None,
            bucket_precision,
            min_relative_distance: None,
            median_relative_distance: None,
            max_relative_distance: None,
            rounds_used: None,
            delta_used: None,
            margin: None,
            seed,
            lower_bound: None,
            upper_bound: None,
            constraint_rows: None,
            verdicts: Vec::new(),
            failed_sources: Vec::new(),
            violated: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn with_metrics(mut self, metrics: &AnonymityReport) -> Self {
        self.preservation_rate = Some(metrics.preservation_rate);
        self.kendall_tau = Some(metrics.kendall_tau);
        self.k_anonymity = Some(metrics.k_anonymity);
        self.bucket_precision = metrics.bucket_precision;
        self.min_relative_distance = Some(metrics.min_relative_distance);
        self.median_relative_distance = Some(metrics.median_relative_distance);
        self.max_relative_distance = Some(metrics.max_relative_distance);
        self.verdicts = metrics
            .verdicts
            .iter()
            .map(|&(source, preserved)| SourceVerdict { source, preserved })
            .collect();
        if let Some(p) = metrics.provenance {
            self.rounds_used = Some(p.rounds_used);
            self.delta_used = Some(p.delta_used);
            self.seed = p.seed;
        }
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
