//! Verification sweeps: run the one-pass update against the
//! column-by-column oracle over a seeded corpus and report deviations.

use std::time::Instant;

use crate::block::{append_columns, append_rows, Backend};
use crate::greville::{greville_append_block, mp_residuals, PinvState};
use crate::matrix::{Matrix, MatrixError, Tolerance};

use super::corpus::{CorpusError, CorpusSpec, Instance};
use super::report::{BranchRecord, InstanceReport, MpRecord, RunReport, ShapeRecord, Summary};

#[derive(Debug, thiserror::Error)]
pub enum VerifyError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

/// Run one corpus instance through the block path and the oracle path.
pub fn verify_instance(
    spec: &CorpusSpec,
    inst: &Instance,
    tol: &Tolerance,
    backend: Backend,
) -> Result<InstanceReport, VerifyError> {
    let base = PinvState::from_matrix(&inst.a, tol)?;

    let (block_state, block_report) = if spec.rows_mode {
        append_rows(&base, &inst.block, tol, backend)?
    } else {
        append_columns(&base, &inst.block, tol, backend)?
    };
    let t_block = block_report.elapsed;

    let t1 = Instant::now();
    let oracle = if spec.rows_mode {
        // Oracle for rows: column recursion on the transposed problem.
        let base_t = PinvState::new(inst.a.transpose(), base.a_plus().transpose())?;
        let o = greville_append_block(&base_t, &inst.block.transpose(), tol)?;
        PinvState::new(o.a().transpose(), o.a_plus().transpose())?
    } else {
        greville_append_block(&base, &inst.block, tol)?
    };
    let t_oracle = t1.elapsed();

    let oracle_dev = block_state.a_plus().max_abs_diff(oracle.a_plus())?;
    let mp = block_state.residuals();

    Ok(InstanceReport {
        id: inst.id,
        shape: ShapeRecord {
            m: spec.m,
            n: spec.n,
            p: if spec.rows_mode { spec.q } else { spec.p },
        },
        branches: block_report.branches.iter().map(BranchRecord::from).collect(),
        mp: MpRecord::from(&mp),
        oracle_dev,
        t_block_us: t_block.as_micros() as u64,
        t_oracle_us: t_oracle.as_micros() as u64,
    })
}

fn instance_thresholds(spec: &CorpusSpec, inst: &Instance, tol: &Tolerance) -> (f64, f64) {
    let stacked_norm = (inst.a.frob_norm().powi(2) + inst.block.frob_norm().powi(2)).sqrt();
    let dev_limit = tol.residual_rel * (1.0 + stacked_norm);
    let mp_limit = tol.residual_rel * (1.0 + stacked_norm);
    let _ = spec;
    (dev_limit, mp_limit)
}

/// Sweep `count` instances of the corpus; `pass` means every instance met
/// the oracle-deviation and residual thresholds.
pub fn verify_sweep(
    spec: &CorpusSpec,
    count: u64,
    tol: &Tolerance,
    backend: Backend,
) -> Result<RunReport, VerifyError> {
    let mut instances = Vec::with_capacity(count as usize);
    let mut pass = true;
    let mut worst_residual: f64 = 0.0;
    let mut worst_dev: f64 = 0.0;
    for idx in 0..count {
        let inst = spec.instance(idx)?;
        let rec = verify_instance(spec, &inst, tol, backend)?;
        let (dev_limit, mp_limit) = instance_thresholds(spec, &inst, tol);
        let mp_max = rec.mp.r1.max(rec.mp.r2).max(rec.mp.r3).max(rec.mp.r4);
        if rec.oracle_dev > dev_limit || mp_max > mp_limit {
            pass = false;
        }
        worst_residual = worst_residual.max(mp_max);
        worst_dev = worst_dev.max(rec.oracle_dev);
        instances.push(rec);
    }
    instances.sort_by_key(|r| r.id);
    Ok(RunReport {
        instances,
        summary: Summary {
            pass,
            worst_residual,
            worst_dev,
        },
    })
}

/// Check a claimed (A, A⁺) pair from files against the four conditions.
pub fn verify_pair(a: &Matrix, a_plus: &Matrix, tol: &Tolerance) -> Result<RunReport, VerifyError> {
    let mp = mp_residuals(a, a_plus)?;
    let limit = tol.residual_rel * (1.0 + a.frob_norm());
    let pass = mp.max() <= limit;
    Ok(RunReport {
        instances: vec![InstanceReport {
            id: 0,
            shape: ShapeRecord {
                m: a.rows(),
                n: a.cols(),
                p: 0,
            },
            branches: Vec::new(),
            mp: MpRecord::from(&mp),
            oracle_dev: 0.0,
            t_block_us: 0,
            t_oracle_us: 0,
        }],
        summary: Summary {
            pass,
            worst_residual: mp.max(),
            worst_dev: 0.0,
        },
    })
}
