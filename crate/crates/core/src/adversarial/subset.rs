use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Real values a_1..a_d summing to zero and a subset size 1 ≤ k ≤ d/3.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSelectionProblem {
    values: Vec<f64>,
    k: usize,
}

impl SubsetSelectionProblem {
    pub fn new(values: Vec<f64>, k: usize) -> Result<Self> {
        Self::new_with(values, k, &Tolerances::DEFAULT)
    }

    /// The zero-sum check is relative to max(1, Σ|a_n|).
    pub fn new_with(values: Vec<f64>, k: usize, tol: &Tolerances) -> Result<Self> {
        let d = values.len();
        if k == 0 {
            return Err(Error::InvalidSubsetSize { k, d, reason: "k must be positive" });
        }
        if 3 * k > d {
            return Err(Error::InvalidSubsetSize { k, d, reason: "k exceeds d/3" });
        }
        if values.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidParameter("values must be finite".into()));
        }
        let sum: f64 = values.iter().sum();
        let scale = values.iter().map(|a| a.abs()).sum::<f64>().max(1.0);
        if sum.abs() > tol.zero_sum * scale {
            return Err(Error::NonZeroSum(sum));
        }
        Ok(Self { values, k })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn d(&self) -> usize {
        self.values.len()
    }

    /// (k/d) Σ|a_n|, the guaranteed size of the selected sum.
    pub fn threshold(&self) -> f64 {
        self.k as f64 / self.d() as f64 * self.values.iter().map(|a| a.abs()).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionCase {
    /// k ≤ N: the k largest values.
    TopK,
    /// N < k: every positive value plus the k − N largest of the rest.
    PositivesPlusTopUp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSelection {
    /// Selected indices, ascending.
    pub indices: Vec<usize>,
    pub case: SelectionCase,
    /// Whether all signs were flipped because more than half the values
    /// were positive.
    pub flipped: bool,
    /// Σ_j a_{n_j} in the original signs.
    pub sum: f64,
}

/// Picks k indices with |Σ_j a_{n_j}| ≥ (k/d) Σ|a_n|.
///
/// Values are sorted in descending order; if more than d/2 are strictly
/// positive all signs are flipped first. With N strictly positive values,
/// the selection is the top k when k ≤ N and otherwise all N positives
/// followed by the next k − N values in descending order.
pub fn select_subset(prob: &SubsetSelectionProblem) -> SubsetSelection {
    let a = prob.values();
    let d = a.len();
    let k = prob.k();
    let positives = a.iter().filter(|&&x| x > 0.0).count();
    let flipped = 2 * positives > d;
    let sign = if flipped { -1.0 } else { 1.0 };
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| (sign * a[j]).total_cmp(&(sign * a[i])).then(i.cmp(&j)));
    let n = order.iter().filter(|&&i| sign * a[i] > 0.0).count();
    let case = if k <= n {
        SelectionCase::TopK
    } else {
        SelectionCase::PositivesPlusTopUp
    };
    // In both cases the selection is a prefix of the descending order.
    let mut indices = order[..k].to_vec();
    indices.sort_unstable();
    let sum = indices.iter().map(|&i| a[i]).sum();
    SubsetSelection {
        indices,
        case,
        flipped,
        sum,
    }
}
