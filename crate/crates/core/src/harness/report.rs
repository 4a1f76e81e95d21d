//! Machine-readable run reports.

use serde::{Deserialize, Serialize};

use crate::block::{BranchTag, DispatchBranch};
use crate::greville::MpResiduals;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ShapeRecord {
    pub m: usize,
    pub n: usize,
    pub p: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BranchRecord {
    pub tag: String,
    pub k: usize,
    pub delta: usize,
}

impl From<&DispatchBranch> for BranchRecord {
    fn from(b: &DispatchBranch) -> Self {
        BranchRecord {
            tag: b.tag.as_str().to_string(),
            k: b.k_reached,
            delta: b.delta,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MpRecord {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

impl From<&MpResiduals> for MpRecord {
    fn from(r: &MpResiduals) -> Self {
        MpRecord {
            r1: r.r1,
            r2: r.r2,
            r3: r.r3,
            r4: r.r4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct InstanceReport {
    pub id: u64,
    pub shape: ShapeRecord,
    pub branches: Vec<BranchRecord>,
    pub mp: MpRecord,
    pub oracle_dev: f64,
    pub t_block_us: u64,
    pub t_oracle_us: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Summary {
    pub pass: bool,
    pub worst_residual: f64,
    pub worst_dev: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub instances: Vec<InstanceReport>,
    pub summary: Summary,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> Result<RunReport, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Aligned text table for humans.
    pub fn to_text(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        writeln!(
            out,
            "{:>6} {:>12} {:>12} {:>10} {:>10}  branches",
            "id", "mp_max", "oracle_dev", "block_us", "oracle_us"
        )
        .unwrap();
        for inst in &self.instances {
            let mp_max = inst
                .mp
                .r1
                .max(inst.mp.r2)
                .max(inst.mp.r3)
                .max(inst.mp.r4);
            let branches: Vec<String> = inst
                .branches
                .iter()
                .map(|b| format!("{}(k={},d={})", b.tag, b.k, b.delta))
                .collect();
            writeln!(
                out,
                "{:>6} {:>12.3e} {:>12.3e} {:>10} {:>10}  {}",
                inst.id,
                mp_max,
                inst.oracle_dev,
                inst.t_block_us,
                inst.t_oracle_us,
                branches.join(",")
            )
            .unwrap();
        }
        writeln!(
            out,
            "summary: pass={} worst_residual={:.3e} worst_dev={:.3e}",
            self.summary.pass, self.summary.worst_residual, self.summary.worst_dev
        )
        .unwrap();
        out
    }
}

/// Tag known to the report schema? Used by round-trip tests.
pub fn known_tag(tag: &str) -> bool {
    [
        BranchTag::CZeroDtD,
        BranchTag::CZeroDtH,
        BranchTag::CZeroHDt,
        BranchTag::FullRankCpinv,
        BranchTag::MixedRestart,
    ]
    .iter()
    .any(|t| t.as_str() == tag)
}
