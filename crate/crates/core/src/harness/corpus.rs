//! Seeded corpus generation: base matrices plus append blocks covering
//! every rank pattern the dispatch has to handle.

use serde::{Deserialize, Serialize};

use super::rng::Xoshiro256pp;
use crate::matrix::Matrix;

/// Per-column (or per-row) construction tag for mixed patterns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColTag {
    /// Fresh random column, independent of the base with probability one.
    Fresh,
    /// A·w for random w: lies in the range of the base exactly.
    InRange,
    /// The zero column.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankPattern {
    /// All columns fresh.
    Full,
    /// All columns in range of the base.
    InRange,
    /// All columns zero.
    ZeroCols,
    /// Explicit per-column tags; an empty list means "draw tags at random".
    Mixed(Vec<ColTag>),
}

impl RankPattern {
    pub fn parse(s: &str) -> Option<RankPattern> {
        match s {
            "full" => Some(RankPattern::Full),
            "in_range" | "in-range" => Some(RankPattern::InRange),
            "zero_cols" | "zero-cols" | "zero" => Some(RankPattern::ZeroCols),
            "mixed" => Some(RankPattern::Mixed(Vec::new())),
            _ => None,
        }
    }
}

/// Deterministic description of a corpus: same spec, identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub m: usize,
    pub n: usize,
    /// Appended columns per instance (column mode).
    pub p: usize,
    /// Appended rows per instance (row mode).
    #[serde(default)]
    pub q: usize,
    pub rank_pattern: RankPattern,
    pub seed: u64,
    #[serde(default = "default_scale")]
    pub scale: f64,
    #[serde(default)]
    pub rows_mode: bool,
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub id: u64,
    pub a: Matrix,
    /// H (m x p) in column mode, Aₓ (q x n) in row mode.
    pub block: Matrix,
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("invalid corpus spec: {0}")]
    Invalid(String),
}

impl CorpusSpec {
    pub fn validate(&self) -> Result<(), CorpusError> {
        let block = if self.rows_mode { self.q } else { self.p };
        if self.m == 0 || self.n == 0 || block == 0 {
            return Err(CorpusError::Invalid(format!(
                "dimensions must be >= 1 (m={}, n={}, block={})",
                self.m, self.n, block
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(CorpusError::Invalid(format!("bad scale {}", self.scale)));
        }
        if let RankPattern::Mixed(tags) = &self.rank_pattern {
            if !tags.is_empty() && tags.len() != block {
                return Err(CorpusError::Invalid(format!(
                    "mixed tag list has {} entries for a block of {}",
                    tags.len(),
                    block
                )));
            }
        }
        Ok(())
    }

    /// Generate instance `idx` of the corpus.
    pub fn instance(&self, idx: u64) -> Result<Instance, CorpusError> {
        self.validate()?;
        let mut rng = Xoshiro256pp::for_instance(self.seed, idx);
        let a = random_matrix(&mut rng, self.m, self.n, self.scale);
        let block = if self.rows_mode {
            self.generate_rows(&mut rng, &a)
        } else {
            self.generate_cols(&mut rng, &a)
        };
        Ok(Instance { id: idx, a, block })
    }

    /// Generate the first `count` instances.
    pub fn generate(&self, count: u64) -> Result<Vec<Instance>, CorpusError> {
        (0..count).map(|i| self.instance(i)).collect()
    }

    fn tags(&self, rng: &mut Xoshiro256pp, len: usize) -> Vec<ColTag> {
        match &self.rank_pattern {
            RankPattern::Full => vec![ColTag::Fresh; len],
            RankPattern::InRange => vec![ColTag::InRange; len],
            RankPattern::ZeroCols => vec![ColTag::Zero; len],
            RankPattern::Mixed(tags) if !tags.is_empty() => tags.clone(),
            RankPattern::Mixed(_) => (0..len)
                .map(|_| match rng.next_below(3) {
                    0 => ColTag::Fresh,
                    1 => ColTag::InRange,
                    _ => ColTag::Zero,
                })
                .collect(),
        }
    }

    fn generate_cols(&self, rng: &mut Xoshiro256pp, a: &Matrix) -> Matrix {
        let tags = self.tags(rng, self.p);
        let mut h = Matrix::zeros(self.m, self.p);
        for (j, tag) in tags.iter().enumerate() {
            let col = match tag {
                ColTag::Fresh => random_matrix(rng, self.m, 1, self.scale),
                ColTag::InRange => {
                    let w = random_matrix(rng, self.n, 1, self.scale);
                    a.matmul(&w).expect("shapes by construction")
                }
                ColTag::Zero => Matrix::zeros(self.m, 1),
            };
            for i in 0..self.m {
                h.set(i, j, col.get(i, 0));
            }
        }
        h
    }

    fn generate_rows(&self, rng: &mut Xoshiro256pp, a: &Matrix) -> Matrix {
        let tags = self.tags(rng, self.q);
        let mut ax = Matrix::zeros(self.q, self.n);
        for (i, tag) in tags.iter().enumerate() {
            let row = match tag {
                ColTag::Fresh => random_matrix(rng, 1, self.n, self.scale),
                ColTag::InRange => {
                    let v = random_matrix(rng, 1, self.m, self.scale);
                    v.matmul(a).expect("shapes by construction")
                }
                ColTag::Zero => Matrix::zeros(1, self.n),
            };
            for j in 0..self.n {
                ax.set(i, j, row.get(0, j));
            }
        }
        ax
    }
}

pub fn random_matrix(rng: &mut Xoshiro256pp, rows: usize, cols: usize, scale: f64) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| scale * rng.next_signed())
}
