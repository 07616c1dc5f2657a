//! JSON report layout. Everything that changes between identical runs lives
//! in the header; the body is a pure function of the inputs and options.

use delay_margin::dde::{SimConfig, Verdict};
use delay_margin::kron::{KronDelay, KronOptions};
use delay_margin::sweep::{Crossing, DelayMargin, StableWindow, SweepConfig};
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub header: ReportHeader,
    pub body: ReportBody,
}

impl ReportDocument {
    pub fn body_json(&self) -> serde_json::Result<String> {
        serde_json::to_string(&self.body)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub tool: String,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub generated_at: u64,
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum ReportBody {
    Margin(MarginBody),
    Crossings(CrossingsBody),
    Baseline(BaselineBody),
    Simulate(SimulateBody),
    MemEstimate(MemBody),
    Validate(ValidateBody),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemFingerprint {
    pub n: usize,
    /// Frobenius norms.
    pub a0_norm: f64,
    pub a1_norm: f64,
    /// SHA-256 of the input files, lowercase hex.
    pub a0_sha256: String,
    pub a1_sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarginBody {
    pub system: SystemFingerprint,
    pub config: SweepConfig,
    /// Sorted by the first delay of each ladder.
    pub crossings: Vec<Crossing>,
    pub delay_margin: DelayMargin,
    pub windows: Vec<StableWindow>,
    pub walk_horizon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossingsBody {
    pub system: SystemFingerprint,
    pub config: SweepConfig,
    pub crossings: Vec<Crossing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineBody {
    pub system: SystemFingerprint,
    pub options: KronOptions,
    pub k_max: usize,
    /// Size of the dense companion that was factored.
    pub companion_bytes: u64,
    /// Delay families sorted by their first delay.
    pub delays: Vec<KronDelay>,
    /// Imaginary-axis roots of the Kronecker polynomial with no matching delay.
    pub spurious_omegas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateBody {
    pub system: SystemFingerprint,
    pub config: SimConfig,
    pub samples: usize,
    pub diverged: bool,
    pub final_time: f64,
    pub final_state: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MemBody {
    pub bytes_per_element: u64,
    pub rows: Vec<MemRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemRow {
    pub n: u64,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateBody {
    pub margin: MarginBody,
    pub horizon: Option<f64>,
    pub checks: Vec<ValidationCheck>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidationCheck {
    pub tau: f64,
    pub dt: f64,
    pub expected: Verdict,
    pub observed: Verdict,
}

impl ValidationCheck {
    pub fn passed(&self) -> bool {
        self.expected == self.observed
    }
}
