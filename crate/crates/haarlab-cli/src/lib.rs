//! Harness library behind the `haarlab` binary: scenario schema, analysis
//! runner, and report emission. Kept as a library so integration suites can
//! drive scenarios in-process.

pub mod csvout;
pub mod runner;
pub mod scenario;

use serde::{Deserialize, Serialize};

/// Serialized certificate wrapper accepted by `haarlab verify`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CertificateFile {
    Covering(haarlab::cover::CoveringCertificate),
    Progression(haarlab::recovery::ProgressionCertificate),
}
