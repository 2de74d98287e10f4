use crate::error::{Error, Result};
use crate::qcore::{CMatrix, CVector, DensityMatrix, SpectralSystem, C64};

/// e^{−iHt} ρ0 e^{iHt}, with ħ = 1.
pub fn evolve(rho0: &DensityMatrix, sys: &SpectralSystem, t: f64) -> Result<DensityMatrix> {
    let frame = EnergyFrame::from_state(rho0, sys)?;
    Ok(frame.state_at(t))
}

/// An initial state expressed in the energy eigenbasis, so that ρ(t)
/// only needs phases: C_mn(t) = C_mn e^{−i(E_m − E_n)t}.
#[derive(Debug, Clone)]
pub struct EnergyFrame<'a> {
    sys: &'a SpectralSystem,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Pure(CVector),
    Mixed(CMatrix),
}

impl<'a> EnergyFrame<'a> {
    pub fn from_state(rho0: &DensityMatrix, sys: &'a SpectralSystem) -> Result<Self> {
        if rho0.dim() != sys.dim() {
            return Err(Error::DimensionMismatch(sys.dim(), rho0.dim()));
        }
        let v = sys.eigenvectors();
        Ok(Self {
            sys,
            repr: Repr::Mixed(v.adjoint() * rho0.matrix() * v),
        })
    }

    pub fn from_vector(psi: &CVector, sys: &'a SpectralSystem) -> Result<Self> {
        if psi.len() != sys.dim() {
            return Err(Error::DimensionMismatch(sys.dim(), psi.len()));
        }
        let norm = psi.norm();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        Ok(Self {
            sys,
            repr: Repr::Pure(sys.eigenvectors().adjoint() * psi.unscale(norm)),
        })
    }

    fn phases(&self, t: f64) -> Vec<C64> {
        self.sys.energies().iter().map(|&e| C64::from_polar(1.0, -e * t)).collect()
    }

    /// ρ(t) in the energy eigenbasis.
    pub fn energy_basis_state_at(&self, t: f64) -> CMatrix {
        let ph = self.phases(t);
        match &self.repr {
            Repr::Pure(c) => {
                let ct = CVector::from_fn(c.len(), |n, _| c[n] * ph[n]);
                &ct * ct.adjoint()
            }
            Repr::Mixed(c) => CMatrix::from_fn(c.nrows(), c.ncols(), |m, n| c[(m, n)] * ph[m] * ph[n].conj()),
        }
    }

    /// Energy-basis amplitudes at time t, if the initial state is pure.
    pub fn energy_basis_vector_at(&self, t: f64) -> Option<CVector> {
        match &self.repr {
            Repr::Pure(c) => {
                let ph = self.phases(t);
                Some(CVector::from_fn(c.len(), |n, _| c[n] * ph[n]))
            }
            Repr::Mixed(_) => None,
        }
    }

    /// ρ(t) in the computational basis.
    pub fn state_at(&self, t: f64) -> DensityMatrix {
        let v = self.sys.eigenvectors();
        match self.energy_basis_vector_at(t) {
            Some(c) => {
                let psi = v * c;
                DensityMatrix::from_trusted(&psi * psi.adjoint())
            }
            None => DensityMatrix::from_trusted(v * self.energy_basis_state_at(t) * v.adjoint()),
        }
    }

    /// |ψ(t)⟩ in the computational basis, if the initial state is pure.
    pub fn vector_at(&self, t: f64) -> Option<CVector> {
        self.energy_basis_vector_at(t).map(|c| self.sys.eigenvectors() * c)
    }

    pub fn system(&self) -> &SpectralSystem {
        self.sys
    }
}
