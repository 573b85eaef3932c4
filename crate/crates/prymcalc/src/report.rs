//! Aggregated pass/fail reports over the verification suites.

use crate::effectivity::{run_suite, EffectivityError, SuiteEntry, SuiteKind, SuiteStatus};
use crate::exec::ExecMode;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteReport {
    pub tool_version: String,
    pub timestamp: String,
    pub entries: Vec<SuiteEntry>,
}

impl SuiteReport {
    pub fn new(entries: Vec<SuiteEntry>) -> SuiteReport {
        SuiteReport {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            entries,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(SuiteEntry::passed)
    }

    pub fn counts(&self) -> (usize, usize, usize) {
        let mut pass = 0;
        let mut fail = 0;
        let mut error = 0;
        for e in &self.entries {
            match e.status {
                SuiteStatus::Pass => pass += 1,
                SuiteStatus::Fail => fail += 1,
                SuiteStatus::Error => error += 1,
            }
        }
        (pass, fail, error)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// The full sweep: every suite over its standard range, stopping at
/// `max_i` for the certificate suites and `max_g` for the decomposition
/// suite. The floors keep the ranges nonempty and inside each family's
/// domain.
pub fn verify_all(max_i: i64, max_g: i64, mode: ExecMode) -> Result<SuiteReport, EffectivityError> {
    if max_i < 2 {
        return Err(EffectivityError::InvalidParameter {
            detail: format!("max_i must be at least 2, got {max_i}"),
        });
    }
    if max_g < 6 {
        return Err(EffectivityError::InvalidParameter {
            detail: format!("max_g must be at least 6, got {max_g}"),
        });
    }
    let mut entries: Vec<SuiteEntry> = Vec::new();
    entries.extend(run_suite(SuiteKind::VanishingStandard, 2..=max_i, mode));
    entries.extend(run_suite(SuiteKind::VanishingNonstandard, 2..=max_i, mode));
    entries.extend(run_suite(SuiteKind::RigidDecomposition, 6..=max_g, mode));
    entries.extend(run_suite(SuiteKind::PeelChain, 2..=max_i, mode));
    Ok(SuiteReport::new(entries))
}
