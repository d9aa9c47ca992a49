//! Verification reports: one record per grid point, in deterministic grid
//! order, serialized to a line-based structured text format.
//!
//! Identical inputs must yield byte-identical reports, so records are only
//! ever produced by iterating grids in a fixed order (or by indexed parallel
//! maps that preserve that order).

use std::fmt;

use crate::lie::Epsilon;

/// Finite verification window. The grid ranges over `|i|, |j| <= i_max`,
/// `m, n <= m_max`, `k <= k_max`; checks that need fewer coordinates ignore
/// the rest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub i_max: u32,
    pub m_max: u32,
    pub k_max: u32,
}

impl Window {
    pub fn new(i_max: u32, m_max: u32, k_max: u32) -> Self {
        Window {
            i_max,
            m_max,
            k_max,
        }
    }

    /// Signed index range `-i_max ..= i_max`.
    pub fn i_range(&self) -> impl Iterator<Item = i64> + Clone {
        -(self.i_max as i64)..=self.i_max as i64
    }
}

/// Named coordinates of one grid point, in emission order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GridPoint(pub Vec<(&'static str, i64)>);

impl GridPoint {
    pub fn empty() -> Self {
        GridPoint(Vec::new())
    }
}

impl fmt::Display for GridPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "-");
        }
        let parts: Vec<String> = self.0.iter().map(|(n, v)| format!("{n}={v}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

/// Outcome of one identity at one grid point. `diff` carries the canonical
/// rendering of the nonzero difference polynomial when the check fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRecord {
    pub check_id: &'static str,
    pub epsilon: Option<Epsilon>,
    pub point: GridPoint,
    pub pass: bool,
    pub diff: Option<String>,
}

impl CheckRecord {
    pub fn passing(check_id: &'static str, epsilon: Option<Epsilon>, point: GridPoint) -> Self {
        CheckRecord {
            check_id,
            epsilon,
            point,
            pass: true,
            diff: None,
        }
    }

    pub fn failing(
        check_id: &'static str,
        epsilon: Option<Epsilon>,
        point: GridPoint,
        diff: String,
    ) -> Self {
        CheckRecord {
            check_id,
            epsilon,
            point,
            pass: false,
            diff: Some(diff),
        }
    }

    /// Builds a record from a difference polynomial: pass iff it is zero.
    pub fn from_diff(
        check_id: &'static str,
        epsilon: Option<Epsilon>,
        point: GridPoint,
        diff: &crate::tpoly::TPoly,
    ) -> Self {
        if diff.is_zero() {
            Self::passing(check_id, epsilon, point)
        } else {
            Self::failing(check_id, epsilon, point, diff.to_string())
        }
    }
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let eps = match self.epsilon {
            Some(e) => e.to_string(),
            None => "-".to_string(),
        };
        write!(
            f,
            "check={} epsilon={} point={} status={}",
            self.check_id,
            eps,
            self.point,
            if self.pass { "pass" } else { "fail" }
        )?;
        if let Some(d) = &self.diff {
            write!(f, " diff={d}")?;
        }
        Ok(())
    }
}

/// Ordered collection of check records plus a one-line summary.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct VerificationReport {
    pub records: Vec<CheckRecord>,
}

impl VerificationReport {
    pub fn new(records: Vec<CheckRecord>) -> Self {
        VerificationReport { records }
    }

    pub fn pass(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn merge(mut self, other: VerificationReport) -> VerificationReport {
        self.records.extend(other.records);
        self
    }

    /// The structured text form: one line per record, then a summary line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        let failed = self.records.iter().filter(|r| !r.pass).count();
        out.push_str(&format!(
            "summary checks={} failed={} status={}\n",
            self.records.len(),
            failed,
            if failed == 0 { "pass" } else { "fail" }
        ));
        out
    }
}
