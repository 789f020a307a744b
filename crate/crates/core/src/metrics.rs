//! What an anonymization preserved and what it scrambled.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::graph::{VertexId, WeightedGraph};
use crate::shortest_paths::{sssp_canonical, trees_equal};

#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    TopologyMismatch,
    SourceOutOfRange { source: VertexId },
    LengthMismatch { left: usize, right: usize },
    TooShort { len: usize },
    Empty,
    InvalidPrecision(f64),
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::TopologyMismatch => {
                write!(
                    f,
                    "graphs differ in vertex count, directedness or edge endpoints"
                )
            }
            MetricsError::SourceOutOfRange { source } => write!(f, "source {source} out of range"),
            MetricsError::LengthMismatch { left, right } => {
                write!(f, "sequences differ in length ({left} vs {right})")
            }
            MetricsError::TooShort { len } => {
                write!(f, "need at least 2 values, got {len}")
            }
            MetricsError::Empty => write!(f, "empty weight sequence"),
            MetricsError::InvalidPrecision(p) => write!(f, "bucket precision must be > 0, got {p}"),
        }
    }
}

impl core::error::Error for MetricsError {}

#[derive(Debug, Clone, PartialEq)]
pub struct Preservation {
    /// Fraction of sources whose canonical tree survived; 1 for no sources.
    pub rate: f64,
    pub verdicts: Vec<(VertexId, bool)>,
}

impl Preservation {
    pub fn all_preserved(&self) -> bool {
        self.verdicts.iter().all(|&(_, ok)| ok)
    }
}

pub fn preservation_rate(
    original: &WeightedGraph,
    anonymized: &WeightedGraph,
    sources: &[VertexId],
) -> Result<Preservation, MetricsError> {
    if !original.same_topology(anonymized) {
        return Err(MetricsError::TopologyMismatch);
    }
    let mut verdicts = Vec::with_capacity(sources.len());
    for &s in sources {
        let a = sssp_canonical(original, s, false)
            .map_err(|_| MetricsError::SourceOutOfRange { source: s })?;
        let b = sssp_canonical(anonymized, s, false)
            .map_err(|_| MetricsError::SourceOutOfRange { source: s })?;
        // Same source and vertex count by construction.
        verdicts.push((s, trees_equal(&a, &b).unwrap_or(false)));
    }
    let preserved = verdicts.iter().filter(|&&(_, ok)| ok).count();
    let rate = if sources.is_empty() {
        1.0
    } else {
        preserved as f64 / sources.len() as f64
    };
    Ok(Preservation { rate, verdicts })
}

/// Kendall tau-b between two equally long sequences, computed with Knight's
/// `O(n log n)` merge-sort algorithm. Returns 0 when either side is
/// constant.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64, MetricsError> {
    if a.len() != b.len() {
        return Err(MetricsError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(MetricsError::TooShort { len: n });
    }

    let mut pairs: Vec<(f64, f64)> = a.iter().copied().zip(b.iter().copied()).collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));

    let total = pair_count(n as u64);
    let ties_a = tied_pairs(&pairs, |x, y| x.0.total_cmp(&y.0));
    let ties_joint = tied_pairs(&pairs, |x, y| x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)));

    let mut seq: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let swaps = count_inversions(&mut seq);
    // `seq` is now sorted by b.
    let ties_b = tied_pairs(&seq, |x, y| x.total_cmp(y));

    let denom_a = (total - ties_a) as f64;
    let denom_b = (total - ties_b) as f64;
    if denom_a == 0.0 || denom_b == 0.0 {
        return Ok(0.0);
    }
    let numerator =
        total as f64 - ties_a as f64 - ties_b as f64 + ties_joint as f64 - 2.0 * swaps as f64;
    let tau = numerator / libm::sqrt(denom_a * denom_b);
    Ok(tau.clamp(-1.0, 1.0))
}

fn pair_count(t: u64) -> u64 {
    t * t.saturating_sub(1) / 2
}

fn tied_pairs<T>(sorted: &[T], cmp: impl Fn(&T, &T) -> Ordering) -> u64 {
    let mut total = 0;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if cmp(&w[0], &w[1]) == Ordering::Equal {
            run += 1;
        } else {
            total += pair_count(run);
            run = 1;
        }
    }
    total + pair_count(run)
}

/// Sorts `v` ascending and returns the number of strictly inverted pairs.
fn count_inversions(v: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mut buf = v.to_vec();
    let mut swaps = 0u64;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut k) = (start, mid, start);
            while i < mid && j < end {
                if v[j].total_cmp(&v[i]) == Ordering::Less {
                    buf[k] = v[j];
                    swaps += (mid - i) as u64;
                    j += 1;
                } else {
                    buf[k] = v[i];
                    i += 1;
                }
                k += 1;
            }
            buf[k..k + (mid - i)].copy_from_slice(&v[i..mid]);
            k += mid - i;
            buf[k..k + (end - j)].copy_from_slice(&v[j..end]);
            start = end;
        }
        v.copy_from_slice(&buf);
        width *= 2;
    }
    swaps
}

/// Minimum multiplicity over buckets `round(w / precision)`.
pub fn k_anonymity(weights: &[f64], precision: f64) -> Result<usize, MetricsError> {
    if !(precision > 0.0 && precision.is_finite()) {
        return Err(MetricsError::InvalidPrecision(precision));
    }
    if weights.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut buckets: BTreeMap<i64, usize> = BTreeMap::new();
    for &w in weights {
        *buckets
            .entry(libm::round(w / precision) as i64)
            .or_insert(0) += 1;
    }
    Ok(buckets.values().copied().min().unwrap_or(0))
}

/// Summary of per-edge relative displacement `|x − w| / w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceProfile {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

pub fn weight_distance_profile(
    original: &[f64],
    anonymized: &[f64],
) -> Result<DistanceProfile, MetricsError> {
    if original.len() != anonymized.len() {
        return Err(MetricsError::LengthMismatch {
            left: original.len(),
            right: anonymized.len(),
        });
    }
    if original.is_empty() {
        return Err(MetricsError::Empty);
    }
    let mut rel: Vec<f64> = original
        .iter()
        .zip(anonymized)
        .map(|(w, x)| (x - w).abs() / w)
        .collect();
    rel.sort_by(f64::total_cmp);
    let n = rel.len();
    let median = if n % 2 == 1 {
        rel[n / 2]
    } else {
        (rel[n / 2 - 1] + rel[n / 2]) / 2.0
    };
    Ok(DistanceProfile {
        min: rel[0],
        median,
        max: rel[n - 1],
    })
}

/// Provenance of the run that produced the anonymized graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunProvenance {
    pub rounds_used: usize,
    pub delta_used: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnonymityReport {
    pub preservation_rate: f64,
    pub verdicts: Vec<(VertexId, bool)>,
    pub kendall_tau: f64,
    pub k_anonymity: usize,
    pub bucket_precision: f64,
    pub min_relative_distance: f64,
    pub median_relative_distance: f64,
    pub max_relative_distance: f64,
    pub provenance: Option<RunProvenance>,
}

/// Computes every metric between `original` and `anonymized`.
///
/// Graphs with a single edge have no defined rank correlation; their tau is
/// reported as 0.
pub fn build_report(
    original: &WeightedGraph,
    anonymized: &WeightedGraph,
    sources: &[VertexId],
    bucket_precision: f64,
    provenance: Option<RunProvenance>,
) -> Result<AnonymityReport, MetricsError> {
    let preservation = preservation_rate(original, anonymized, sources)?;
    let w = original.weights();
    let x = anonymized.weights();
    let kendall_tau = match kendall_tau(&w, &x) {
        Err(MetricsError::TooShort { .. }) => 0.0,
        other => other?,
    };
    let (k_anonymity, profile) = if x.is_empty() {
        (
            0,
            DistanceProfile {
                min: 0.0,
                median: 0.0,
                max: 0.0,
            },
        )
    } else {
        (
            k_anonymity(&x, bucket_precision)?,
            weight_distance_profile(&w, &x)?,
        )
    };
    Ok(AnonymityReport {
        preservation_rate: preservation.rate,
        verdicts: preservation.verdicts,
        kendall_tau,
        k_anonymity,
        bucket_precision,
        min_relative_distance: profile.min,
        median_relative_distance: profile.median,
        max_relative_distance: profile.max,
        provenance,
    })
}
