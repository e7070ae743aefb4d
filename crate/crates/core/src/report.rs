//! Campaign reports: one record per trial plus a summary, serializable to
//! JSON and CSV.
//!
//! Field names are part of the external contract (documented in the
//! repository README). Two runs with the same configuration produce
//! byte-identical serializations except for [`Summary::wall_ms`], the one
//! timing field; [`Report::with_zero_timing`] clears it for comparisons.
//! A failing trial always carries its derived seed, so the instance can be
//! regenerated exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::campaign::CampaignConfig;
use crate::error::{Error, Result};

/// Outcome of one campaign: configuration, per-trial records in index
/// order, and aggregate counts.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Report {
    pub campaign: String,
    pub config: CampaignConfig,
    pub trials: Vec<TrialRecord>,
    pub summary: Summary,
}

/// One verified instance. `seed` is the derived per-trial seed — enough,
/// together with the config, to regenerate the instance exactly.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: usize,
    pub seed: u64,
    pub ok: bool,
    /// Human-readable description of the property violation, when `!ok`.
    pub failure: Option<String>,
    pub detail: TrialDetail,
}

/// Campaign-specific payload of a trial.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrialDetail {
    /// Rank sequence of a random skew family.
    Skew { q: usize, dims: Vec<usize>, kernel_dims: Vec<usize> },
    /// Intersection-dimension sequence of a random isotropic pair.
    Isotropic {
        r: usize,
        q_seq: Vec<usize>,
        d_seq: Vec<i64>,
        /// `Some` when the generator planted a ground-truth sequence.
        planted_matched: Option<bool>,
        /// Free rank of the intersection module (generic dimension).
        q_generic: usize,
        /// `m_1 = q_1 - q_generic`; its parity is recorded, not asserted.
        m1: usize,
        m1_even: bool,
        /// Whether the reductions intersect trivially (`q_1 = 0`).
        transverse: bool,
    },
    /// Torsion profile of the intersection complex of a random pair.
    Torsion {
        r: usize,
        free_rank: usize,
        exponents: Vec<usize>,
        m_profile: Vec<usize>,
        split: bool,
        snf_matches_rank_oracle: bool,
        /// Whether the literal determinantal-minor oracle also ran (small
        /// matrices only).
        minor_oracle_checked: bool,
        cohomology_matches_intersections: bool,
        base_change_holds: bool,
    },
    /// Base-change formulas for a random two-term complex.
    BaseChange {
        rank0: usize,
        rank1: usize,
        free_rank: usize,
        exponents: Vec<usize>,
        h1_computed: Vec<usize>,
        h1_predicted: Vec<usize>,
        h1_vanishes: bool,
        /// `Some` exactly when the cokernel vanishes over the local ring.
        h0_checked: Option<bool>,
    },
    /// Image dimension of a matrix over the square-zero plane ring.
    Counterexample {
        variant: String,
        n: usize,
        dimension: usize,
        parity: String,
        entries: Vec<String>,
    },
    /// Torsion profile of an explicit matrix read from a file.
    MatrixProfile {
        rows: usize,
        cols: usize,
        free_rank: usize,
        exponents: Vec<usize>,
        m_profile: Vec<usize>,
        split: bool,
    },
}

/// Aggregate counts. `stats` keys are campaign-specific and documented in
/// the repository README; a `BTreeMap` keeps their order deterministic.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub trials: usize,
    pub failures: usize,
    pub stats: BTreeMap<String, u64>,
    /// Wall-clock milliseconds; the only field excluded from determinism
    /// comparisons.
    pub wall_ms: u64,
}

impl Report {
    pub fn all_ok(&self) -> bool {
        self.summary.failures == 0
    }

    /// Copy with `wall_ms` zeroed, for byte-for-byte determinism checks.
    pub fn with_zero_timing(&self) -> Report {
        let mut r = self.clone();
        r.summary.wall_ms = 0;
        r
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::Usage(format!("malformed report JSON: {e}")))
    }

    /// Per-trial rows with campaign-specific columns; the summary is not
    /// part of the CSV (use JSON for the full report).
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let detail_header: &[&str] = match self.trials.first().map(|t| &t.detail) {
            Some(TrialDetail::Skew { .. }) => &["q", "dims", "kernel_dims"],
            Some(TrialDetail::Isotropic { .. }) => &[
                "r",
                "q_seq",
                "d_seq",
                "planted_matched",
                "q_generic",
                "m1",
                "m1_even",
                "transverse",
            ],
            Some(TrialDetail::Torsion { .. }) => &[
                "r",
                "free_rank",
                "exponents",
                "m_profile",
                "split",
                "snf_matches_rank_oracle",
                "minor_oracle_checked",
                "cohomology_matches_intersections",
                "base_change_holds",
            ],
            Some(TrialDetail::BaseChange { .. }) => &[
                "rank0",
                "rank1",
                "free_rank",
                "exponents",
                "h1_computed",
                "h1_predicted",
                "h1_vanishes",
                "h0_checked",
            ],
            Some(TrialDetail::Counterexample { .. }) => &["variant", "n", "dimension", "parity"],
            Some(TrialDetail::MatrixProfile { .. }) => {
                &["rows", "cols", "free_rank", "exponents", "m_profile", "split"]
            }
            None => &[],
        };
        out.push_str("index,seed,ok,failure");
        for col in detail_header {
            out.push(',');
            out.push_str(col);
        }
        out.push('\n');
        for t in &self.trials {
            out.push_str(&format!(
                "{},{},{},{}",
                t.index,
                t.seed,
                t.ok,
                csv_escape(t.failure.as_deref().unwrap_or(""))
            ));
            for cell in detail_cells(&t.detail) {
                out.push(',');
                out.push_str(&csv_escape(&cell));
            }
            out.push('\n');
        }
        out
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn opt(b: Option<bool>) -> String {
    b.map_or_else(|| "-".to_string(), |v| v.to_string())
}

fn detail_cells(detail: &TrialDetail) -> Vec<String> {
    match detail {
        TrialDetail::Skew { q, dims, kernel_dims } => {
            vec![q.to_string(), join(dims), join(kernel_dims)]
        }
        TrialDetail::Isotropic {
            r,
            q_seq,
            d_seq,
            planted_matched,
            q_generic,
            m1,
            m1_even,
            transverse,
        } => vec![
            r.to_string(),
            join(q_seq),
            join(d_seq),
            opt(*planted_matched),
            q_generic.to_string(),
            m1.to_string(),
            m1_even.to_string(),
            transverse.to_string(),
        ],
        TrialDetail::Torsion {
            r,
            free_rank,
            exponents,
            m_profile,
            split,
            snf_matches_rank_oracle,
            minor_oracle_checked,
            cohomology_matches_intersections,
            base_change_holds,
        } => vec![
            r.to_string(),
            free_rank.to_string(),
            join(exponents),
            join(m_profile),
            split.to_string(),
            snf_matches_rank_oracle.to_string(),
            minor_oracle_checked.to_string(),
            cohomology_matches_intersections.to_string(),
            base_change_holds.to_string(),
        ],
        TrialDetail::BaseChange {
            rank0,
            rank1,
            free_rank,
            exponents,
            h1_computed,
            h1_predicted,
            h1_vanishes,
            h0_checked,
        } => vec![
            rank0.to_string(),
            rank1.to_string(),
            free_rank.to_string(),
            join(exponents),
            join(h1_computed),
            join(h1_predicted),
            h1_vanishes.to_string(),
            opt(*h0_checked),
        ],
        TrialDetail::Counterexample { variant, n, dimension, parity, entries: _ } => vec![
            variant.clone(),
            n.to_string(),
            dimension.to_string(),
            parity.clone(),
        ],
        TrialDetail::MatrixProfile { rows, cols, free_rank, exponents, m_profile, split } => vec![
            rows.to_string(),
            cols.to_string(),
            free_rank.to_string(),
            join(exponents),
            join(m_profile),
            split.to_string(),
        ],
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::campaign::{CampaignConfig, FieldChoice};

    fn sample_report() -> Report {
        Report {
            campaign: "skew".into(),
            config: CampaignConfig { field: FieldChoice::Prime { p: 7 }, ..Default::default() },
            trials: vec![TrialRecord {
                index: 0,
                seed: 42,
                ok: true,
                failure: None,
                detail: TrialDetail::Skew {
                    q: 2,
                    dims: vec![0, 2, 4],
                    kernel_dims: vec![2, 2, 2],
                },
            }],
            summary: Summary {
                trials: 1,
                failures: 0,
                stats: BTreeMap::from([("max-image-dim".to_string(), 4u64)]),
                wall_ms: 17,
            },
        }
    }

    #[test]
    fn json_round_trips() {
        let r = sample_report();
        let back = Report::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn zero_timing_is_the_only_difference() {
        let r = sample_report();
        let mut later = r.clone();
        later.summary.wall_ms = 99_999;
        assert_ne!(r.to_json(), later.to_json());
        assert_eq!(r.with_zero_timing().to_json(), later.with_zero_timing().to_json());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let csv = sample_report().to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "index,seed,ok,failure,q,dims,kernel_dims");
        assert_eq!(lines.next().unwrap(), "0,42,true,,2,0 2 4,2 2 2");
        assert_eq!(lines.next(), None);
    }

    #[test]
    fn csv_escapes_failure_text() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    }

    #[test]
    fn malformed_json_is_a_usage_error() {
        assert!(matches!(Report::from_json("{nope"), Err(Error::Usage(_))));
    }
}
