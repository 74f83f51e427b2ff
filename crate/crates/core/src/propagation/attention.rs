use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Result, TpcError};

/// Divisor applied to the query-key logits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AttentionScaling {
    /// Divide by the feature dimension `d`.
    #[default]
    Dim,
    /// Divide by `sqrt(d)`.
    Sqrt,
}

impl AttentionScaling {
    pub fn divisor(self, dim: usize) -> f64 {
        match self {
            AttentionScaling::Dim => dim as f64,
            AttentionScaling::Sqrt => (dim as f64).sqrt(),
        }
    }
}

impl fmt::Display for AttentionScaling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttentionScaling::Dim => "dim",
            AttentionScaling::Sqrt => "sqrt",
        })
    }
}

impl FromStr for AttentionScaling {
    type Err = TpcError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dim" => Ok(AttentionScaling::Dim),
            "sqrt" => Ok(AttentionScaling::Sqrt),
            other => Err(TpcError::InvalidConfig(format!(
                "attention scaling must be `dim` or `sqrt`, got `{other}`"
            ))),
        }
    }
}

/// Keys/values for the host cross-attention: reference rows, then
/// calibrated rows.
pub fn assemble_condition(
    reference: &DMatrix<f64>,
    calibrated: &DMatrix<f64>,
) -> Result<DMatrix<f64>> {
    if reference.shape() != calibrated.shape() {
        return Err(TpcError::DimensionMismatch(format!(
            "reference {:?} vs calibrated {:?}",
            reference.shape(),
            calibrated.shape()
        )));
    }
    let (m, d) = reference.shape();
    Ok(DMatrix::from_fn(2 * m, d, |r, c| {
        if r < m {
            reference[(r, c)]
        } else {
            calibrated[(r - m, c)]
        }
    }))
}

/// Row-stochastic matrix `softmax(Q K^T / divisor)`.
pub fn attention_weights(
    query: &DMatrix<f64>,
    keys: &DMatrix<f64>,
    scaling: AttentionScaling,
) -> Result<DMatrix<f64>> {
    if query.ncols() != keys.ncols() {
        return Err(TpcError::DimensionMismatch(format!(
            "query dim {} vs key dim {}",
            query.ncols(),
            keys.ncols()
        )));
    }
    if keys.nrows() == 0 || query.ncols() == 0 {
        return Err(TpcError::DimensionMismatch("empty keys".into()));
    }
    let divisor = scaling.divisor(query.ncols());
    let mut weights = query * keys.transpose() / divisor;
    for mut row in weights.row_iter_mut() {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        row.apply(|v| *v = (*v - max).exp());
        let total = row.sum();
        row /= total;
    }
    Ok(weights)
}

pub fn cross_attention(
    query: &DMatrix<f64>,
    keys: &DMatrix<f64>,
    values: &DMatrix<f64>,
    scaling: AttentionScaling,
) -> Result<DMatrix<f64>> {
    if keys.nrows() != values.nrows() {
        return Err(TpcError::DimensionMismatch(format!(
            "{} keys vs {} values",
            keys.nrows(),
            values.nrows()
        )));
    }
    Ok(attention_weights(query, keys, scaling)? * values)
}
