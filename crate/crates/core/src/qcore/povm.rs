use super::hermitian_eigenvalues;
use super::operator::{trace_product, CMatrix, CVector, DensityMatrix, HermitianOperator};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// One POVM outcome operator.
///
/// Rank-one effects and their complements are stored as a vector so that
/// measurement sets built from eigenstates stay O(d) in memory.
#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    Dense(HermitianOperator),
    /// |v⟩⟨v| with ‖v‖ = 1.
    Rank1(CVector),
    /// 𝕀 − |v⟩⟨v| with ‖v‖ = 1.
    Rank1Complement(CVector),
}

impl Effect {
    pub fn dim(&self) -> usize {
        match self {
            Effect::Dense(op) => op.dim(),
            Effect::Rank1(v) | Effect::Rank1Complement(v) => v.len(),
        }
    }

    /// tr(E ρ) for a Hermitian `rho`.
    pub fn expectation(&self, rho: &CMatrix) -> f64 {
        match self {
            Effect::Dense(op) => trace_product(op.matrix(), rho).re,
            Effect::Rank1(v) => v.dotc(&(rho * v)).re,
            Effect::Rank1Complement(v) => {
                let tr: f64 = rho.diagonal().iter().map(|z| z.re).sum();
                tr - v.dotc(&(rho * v)).re
            }
        }
    }

    /// ⟨ψ|E|ψ⟩.
    pub fn expectation_vector(&self, psi: &CVector) -> f64 {
        match self {
            Effect::Dense(op) => psi.dotc(&(op.matrix() * psi)).re,
            Effect::Rank1(v) => v.dotc(psi).norm_sqr(),
            Effect::Rank1Complement(v) => psi.norm_squared() - v.dotc(psi).norm_sqr(),
        }
    }

    pub fn to_operator(&self) -> HermitianOperator {
        match self {
            Effect::Dense(op) => op.clone(),
            Effect::Rank1(v) => HermitianOperator::outer(v),
            Effect::Rank1Complement(v) => {
                let n = v.len();
                HermitianOperator::from_trusted(CMatrix::identity(n, n) - v * v.adjoint())
            }
        }
    }

    /// V† E V for a change of basis with unitary `v`.
    pub fn in_basis(&self, v: &CMatrix) -> CMatrix {
        match self {
            Effect::Dense(op) => v.adjoint() * op.matrix() * v,
            Effect::Rank1(u) => {
                let w = v.adjoint() * u;
                &w * w.adjoint()
            }
            Effect::Rank1Complement(u) => {
                let w = v.adjoint() * u;
                let n = v.ncols();
                CMatrix::identity(n, n) - &w * w.adjoint()
            }
        }
    }

    fn min_eigenvalue(&self) -> f64 {
        match self {
            Effect::Dense(op) => hermitian_eigenvalues(op.matrix())[0],
            Effect::Rank1(_) | Effect::Rank1Complement(_) => 0.0,
        }
    }
}

/// A positive operator valued measure: PSD outcomes summing to identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    outcomes: Vec<Effect>,
}

impl Povm {
    /// Fully validated construction from dense outcome operators.
    pub fn new(outcomes: Vec<HermitianOperator>) -> Result<Self> {
        Self::from_effects(outcomes.into_iter().map(Effect::Dense).collect())
    }

    pub fn from_effects(outcomes: Vec<Effect>) -> Result<Self> {
        let povm = Self { outcomes };
        povm.check_invariants(&Tolerances::DEFAULT)?;
        Ok(povm)
    }

    /// Outcomes that are PSD by construction; only completeness is checked
    /// in debug builds.
    pub(crate) fn from_trusted(outcomes: Vec<Effect>) -> Self {
        let povm = Self { outcomes };
        debug_assert!(povm.completeness_error() < 1e-8);
        povm
    }

    /// {|v⟩⟨v|, 𝕀 − |v⟩⟨v|} for the normalized direction of `v`.
    pub fn binary_projective(v: &CVector) -> Result<Self> {
        let norm = v.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter("projector direction has zero norm".into()));
        }
        let u = v.unscale(norm);
        Ok(Self {
            outcomes: vec![Effect::Rank1(u.clone()), Effect::Rank1Complement(u)],
        })
    }

    /// The one-outcome trivial measurement {𝕀}.
    pub fn trivial(dim: usize) -> Self {
        Self {
            outcomes: vec![Effect::Dense(HermitianOperator::identity(dim))],
        }
    }

    pub fn outcomes(&self) -> &[Effect] {
        &self.outcomes
    }

    pub fn n_outcomes(&self) -> usize {
        self.outcomes.len()
    }

    pub fn dim(&self) -> usize {
        self.outcomes.first().map_or(0, Effect::dim)
    }

    /// Outcome probabilities tr(M_r ρ).
    pub fn probabilities(&self, rho: &DensityMatrix) -> Vec<f64> {
        self.outcomes.iter().map(|e| e.expectation(rho.matrix())).collect()
    }

    /// Max |(Σ_r M_r − 𝕀)_ij|.
    pub fn completeness_error(&self) -> f64 {
        let n = self.dim();
        let mut sum = CMatrix::zeros(n, n);
        for e in &self.outcomes {
            match e {
                Effect::Dense(op) => sum += op.matrix(),
                Effect::Rank1(v) => sum += v * v.adjoint(),
                Effect::Rank1Complement(v) => {
                    sum += CMatrix::identity(n, n);
                    sum -= v * v.adjoint();
                }
            }
        }
        sum -= CMatrix::identity(n, n);
        sum.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn check_invariants(&self, tol: &Tolerances) -> Result<()> {
        let Some(first) = self.outcomes.first() else {
            return Err(Error::TooFewOutcomes { required: 1, got: 0 });
        };
        let n = first.dim();
        if n == 0 {
            return Err(Error::EmptyDimension);
        }
        for (index, e) in self.outcomes.iter().enumerate() {
            if e.dim() != n {
                return Err(Error::DimensionMismatch(n, e.dim()));
            }
            let min = e.min_eigenvalue();
            if min < -tol.psd {
                return Err(Error::OutcomeNotPositive {
                    index,
                    min_eigenvalue: min,
                });
            }
        }
        let dev = self.completeness_error();
        if dev > tol.completeness {
            return Err(Error::NotComplete(dev));
        }
        Ok(())
    }
}

/// A finite collection of POVMs on one Hilbert space.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSet {
    povms: Vec<Povm>,
    total_outcomes: usize,
}

impl MeasurementSet {
    pub fn new(povms: Vec<Povm>) -> Result<Self> {
        if let Some(first) = povms.first() {
            let n = first.dim();
            if let Some(bad) = povms.iter().find(|p| p.dim() != n) {
                return Err(Error::DimensionMismatch(n, bad.dim()));
            }
        }
        let total_outcomes = povms.iter().map(Povm::n_outcomes).sum();
        Ok(Self {
            povms,
            total_outcomes,
        })
    }

    pub fn povms(&self) -> &[Povm] {
        &self.povms
    }

    pub fn len(&self) -> usize {
        self.povms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.povms.is_empty()
    }

    /// N_M = Σ_M N(M).
    pub fn total_outcomes(&self) -> usize {
        self.total_outcomes
    }

    pub fn dim(&self) -> usize {
        self.povms.first().map_or(0, Povm::dim)
    }

    /// Starting offset of each POVM in a flattened outcome list.
    pub fn outcome_offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.povms
            .iter()
            .map(|p| {
                let start = acc;
                acc += p.n_outcomes();
                start
            })
            .collect()
    }

    /// Every outcome operator, POVM by POVM.
    pub fn effects(&self) -> impl Iterator<Item = &Effect> {
        self.povms.iter().flat_map(|p| p.outcomes().iter())
    }
}
