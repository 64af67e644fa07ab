//! Audits of correctness and `T`-privacy.

mod correctness;
mod exact;
mod statistical;

use std::fmt::Write;

pub use correctness::{correctness_suite, random_db, Corruption, CorrectnessReport, Counterexample};
pub use exact::{enumerate_query_distribution, enumerate_tables, privacy_exact_check, DistributionTable, ENUMERATION_LIMIT};
pub use statistical::{privacy_statistical_check, StatConfig};

use oneshot_pir::linalg::combinations;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    /// Not enough information to test; does not count as a failure.
    Inconclusive,
    Fail,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Inconclusive => "inconclusive",
            Status::Fail => "fail",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub check: String,
    pub scope: String,
    pub status: Status,
    pub statistic: Option<f64>,
    pub p_value: Option<f64>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AuditReport {
    pub rows: Vec<CheckRow>,
}

impl AuditReport {
    /// Worst status over all rows; an empty report is inconclusive.
    pub fn status(&self) -> Status {
        self.rows.iter().map(|r| r.status).max().unwrap_or(Status::Inconclusive)
    }

    pub fn passed(&self) -> bool {
        self.status() != Status::Fail
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRow> {
        self.rows.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check,scope,status,statistic,p_value,detail\n");
        let num = |x: Option<f64>| x.map(|v| format!("{v:.6e}")).unwrap_or_default();
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.check,
                csv_field(&r.scope),
                r.status.name(),
                num(r.statistic),
                num(r.p_value),
                csv_field(&r.detail)
            );
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// All `t`-subsets of `0..n`, lexicographic.
pub fn collusion_sets(n: usize, t: usize) -> Vec<Vec<usize>> {
    combinations(n, t)
}

/// 1-based `{a,b}` label for a server subset.
pub fn subset_label(j: &[usize]) -> String {
    let inner = j.iter().map(|s| (s + 1).to_string()).collect::<Vec<_>>().join(" ");
    format!("{{{inner}}}")
}
