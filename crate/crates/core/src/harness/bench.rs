//! Wall-clock comparison of the one-pass block update against the
//! p-iteration column recursion, on both backends.

use std::time::Instant;

use crate::block::{append_columns, append_rows, Backend};
use crate::greville::{greville_append_block, PinvState};
use crate::matrix::Tolerance;

use super::corpus::CorpusSpec;
use super::verify::VerifyError;

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub instance: u64,
    pub block_invchol_us: u64,
    pub block_chol_us: u64,
    pub oracle_us: u64,
}

#[derive(Debug, Clone)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    pub median_block_invchol_us: u64,
    pub median_block_chol_us: u64,
    pub median_oracle_us: u64,
}

fn median(mut v: Vec<u64>) -> u64 {
    v.sort_unstable();
    v[v.len() / 2]
}

/// Time `reps` repetitions over the corpus instance 0 of `spec`.
pub fn bench(spec: &CorpusSpec, reps: u64) -> Result<BenchReport, VerifyError> {
    let tol = Tolerance::default();
    let inst = spec.instance(0)?;
    let base = PinvState::from_matrix(&inst.a, &tol)?;

    let mut rows = Vec::new();
    for rep in 0..reps.max(1) {
        // The report's `elapsed` covers the update only, excluding the
        // reporting-side residual evaluation.
        let (_, rep_inv) = if spec.rows_mode {
            append_rows(&base, &inst.block, &tol, Backend::InverseCholesky)?
        } else {
            append_columns(&base, &inst.block, &tol, Backend::InverseCholesky)?
        };
        let invchol_us = rep_inv.elapsed.as_micros() as u64;

        let (_, rep_chol) = if spec.rows_mode {
            append_rows(&base, &inst.block, &tol, Backend::LibraryCholesky)?
        } else {
            append_columns(&base, &inst.block, &tol, Backend::LibraryCholesky)?
        };
        let chol_us = rep_chol.elapsed.as_micros() as u64;

        let t2 = Instant::now();
        if spec.rows_mode {
            let base_t = PinvState::new(inst.a.transpose(), base.a_plus().transpose())?;
            greville_append_block(&base_t, &inst.block.transpose(), &tol)?;
        } else {
            greville_append_block(&base, &inst.block, &tol)?;
        }
        let oracle_us = t2.elapsed().as_micros() as u64;

        rows.push(BenchRow {
            instance: rep,
            block_invchol_us: invchol_us,
            block_chol_us: chol_us,
            oracle_us,
        });
    }

    Ok(BenchReport {
        median_block_invchol_us: median(rows.iter().map(|r| r.block_invchol_us).collect()),
        median_block_chol_us: median(rows.iter().map(|r| r.block_chol_us).collect()),
        median_oracle_us: median(rows.iter().map(|r| r.oracle_us).collect()),
        rows,
    })
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("rep,block_invchol_us,block_chol_us,oracle_us\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.instance, r.block_invchol_us, r.block_chol_us, r.oracle_us
            ));
        }
        out.push_str(&format!(
            "median,{},{},{}\n",
            self.median_block_invchol_us, self.median_block_chol_us, self.median_oracle_us
        ));
        out
    }
}
