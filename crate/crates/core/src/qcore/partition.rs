use serde::{Deserialize, Serialize};

use super::hermitian_eigenvalues;
use super::operator::{CMatrix, CVector, DensityMatrix, C64};
use crate::error::{Error, Result};

/// Which tensor factor of the full space is the observed subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SubsystemOrder {
    /// Full space is S ⊗ B; index = s · dim_b + b.
    #[default]
    SubsystemFirst,
    /// Full space is B ⊗ S; index = b · dim_s + s.
    SubsystemLast,
}

/// Split of the full Hilbert space into an observed subsystem and a bath.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubsystemPartition {
    dim_s: usize,
    dim_b: usize,
    order: SubsystemOrder,
}

impl SubsystemPartition {
    pub fn new(dim_s: usize, dim_b: usize, order: SubsystemOrder) -> Result<Self> {
        if dim_s == 0 || dim_b == 0 {
            return Err(Error::EmptyDimension);
        }
        Ok(Self { dim_s, dim_b, order })
    }

    /// Subsystem of dimension `dim_s` as the first factor of a `total`-dim space.
    pub fn leading(dim_s: usize, total: usize) -> Result<Self> {
        if dim_s == 0 || !total.is_multiple_of(dim_s) {
            return Err(Error::InvalidParameter(format!(
                "subsystem dimension {dim_s} does not divide {total}"
            )));
        }
        Self::new(dim_s, total / dim_s, SubsystemOrder::SubsystemFirst)
    }

    pub fn dim_s(&self) -> usize {
        self.dim_s
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn order(&self) -> SubsystemOrder {
        self.order
    }

    pub fn total_dim(&self) -> usize {
        self.dim_s * self.dim_b
    }

    #[inline]
    pub fn index(&self, s: usize, b: usize) -> usize {
        match self.order {
            SubsystemOrder::SubsystemFirst => s * self.dim_b + b,
            SubsystemOrder::SubsystemLast => b * self.dim_s + s,
        }
    }

    fn check(&self, dim: usize) -> Result<()> {
        if dim != self.total_dim() {
            return Err(Error::DimensionMismatch(dim, self.total_dim()));
        }
        Ok(())
    }
}

/// tr_B ρ.
pub fn partial_trace(rho: &DensityMatrix, part: &SubsystemPartition) -> Result<DensityMatrix> {
    part.check(rho.dim())?;
    let m = rho.matrix();
    let ds = part.dim_s();
    let out = CMatrix::from_fn(ds, ds, |a, c| {
        (0..part.dim_b())
            .map(|b| m[(part.index(a, b), part.index(c, b))])
            .sum::<C64>()
    });
    Ok(DensityMatrix::from_trusted(out))
}

/// tr_B |ψ⟩⟨ψ| without forming the full projector.
pub fn partial_trace_pure(psi: &CVector, part: &SubsystemPartition) -> Result<CMatrix> {
    part.check(psi.len())?;
    let ds = part.dim_s();
    let mut out = CMatrix::zeros(ds, ds);
    for a in 0..ds {
        for c in a..ds {
            let v: C64 = (0..part.dim_b())
                .map(|b| psi[part.index(a, b)] * psi[part.index(c, b)].conj())
                .sum();
            out[(a, c)] = v;
            out[(c, a)] = v.conj();
        }
        out[(a, a)].im = 0.0;
    }
    Ok(out)
}

/// tr_B |u⟩⟨v| for two vectors on the full space.
pub(crate) fn partial_trace_cross(u: &CVector, v: &CVector, part: &SubsystemPartition) -> Result<CMatrix> {
    part.check(u.len())?;
    part.check(v.len())?;
    let ds = part.dim_s();
    Ok(CMatrix::from_fn(ds, ds, |a, c| {
        (0..part.dim_b())
            .map(|b| u[part.index(a, b)] * v[part.index(c, b)].conj())
            .sum()
    }))
}

/// ½ Σ|λ_i| over the eigenvalues of ρ − σ, clamped to [0, 1].
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    Ok(trace_distance_raw(&(rho.matrix() - sigma.matrix())))
}

pub(crate) fn trace_distance_raw(diff: &CMatrix) -> f64 {
    let half_norm: f64 = 0.5 * hermitian_eigenvalues(diff).iter().map(|x| x.abs()).sum::<f64>();
    half_norm.clamp(0.0, 1.0)
}
