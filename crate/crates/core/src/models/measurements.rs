use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::qcore::{eig_hermitian, CMatrix, Effect, HermitianOperator, MeasurementSet, Povm, SpectralSystem, C64};
use crate::rng::{derive_seed, seeded};
use crate::thermal::EnergyBand;

/// One binary POVM {ρ_n, 𝕀 − ρ_n} per band eigenstate.
pub fn build_eigenbasis_measurements(band: &EnergyBand, sys: &SpectralSystem) -> Result<MeasurementSet> {
    band.check_for(sys)?;
    build_eigenbasis_measurements_in(&sys.basis_columns(band.indices()))
}

/// One binary POVM {|v⟩⟨v|, 𝕀 − |v⟩⟨v|} per column of `vectors`.
pub fn build_eigenbasis_measurements_in(vectors: &CMatrix) -> Result<MeasurementSet> {
    let povms = vectors
        .column_iter()
        .map(|c| {
            let v = c.into_owned();
            Povm::from_trusted(vec![Effect::Rank1(v.clone()), Effect::Rank1Complement(v)])
        })
        .collect();
    MeasurementSet::new(povms)
}

const MAX_RESEEDS: u64 = 16;

/// Random POVMs: M_r = S^{-1/2} A_r S^{-1/2} with A_r = G_r G_r† for complex
/// Gaussian G_r and S = Σ_r A_r.
pub fn build_random_coarse_measurements(
    dim: usize,
    n_povms: usize,
    outcomes_per_povm: usize,
    seed: u64,
) -> Result<MeasurementSet> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    if outcomes_per_povm < 2 {
        return Err(Error::TooFewOutcomes {
            required: 2,
            got: outcomes_per_povm,
        });
    }
    if n_povms == 0 {
        return Err(Error::InvalidParameter("n_povms must be positive".into()));
    }
    let mut povms = Vec::with_capacity(n_povms);
    for index in 0..n_povms {
        let stream = derive_seed(seed, index as u64);
        let mut built = None;
        for attempt in 0..MAX_RESEEDS {
            match random_povm(dim, outcomes_per_povm, derive_seed(stream, attempt))? {
                Some(p) => {
                    built = Some(p);
                    break;
                }
                None => log::warn!("POVM {index}: singular normalization on attempt {attempt}, reseeding"),
            }
        }
        povms.push(built.ok_or(Error::SingularNormalization(index))?);
    }
    MeasurementSet::new(povms)
}

fn random_povm(dim: usize, n_outcomes: usize, seed: u64) -> Result<Option<Povm>> {
    let mut rng = seeded(seed);
    let mut draws = Vec::with_capacity(n_outcomes);
    let mut s = CMatrix::zeros(dim, dim);
    for _ in 0..n_outcomes {
        let g = CMatrix::from_fn(dim, dim, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im)
        });
        let a = &g * g.adjoint();
        s += &a;
        draws.push(a);
    }
    let sys = eig_hermitian(&HermitianOperator::from_trusted(s))?;
    let evals = sys.energies();
    let max = evals[dim - 1];
    if evals[0] <= 1e-12 * max.max(f64::MIN_POSITIVE) {
        return Ok(None);
    }
    let w = sys.eigenvectors();
    let mut scaled = w.clone();
    for (j, &e) in evals.iter().enumerate() {
        scaled.column_mut(j).scale_mut(e.sqrt().recip());
    }
    let s_inv_sqrt = scaled * w.adjoint();
    let outcomes = draws
        .iter()
        .map(|a| Effect::Dense(HermitianOperator::from_trusted(&s_inv_sqrt * a * &s_inv_sqrt)))
        .collect();
    Povm::from_effects(outcomes).map(Some)
}
