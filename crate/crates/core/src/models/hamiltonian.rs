use rand::seq::index::sample;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::states::haar_unitary;
use crate::error::{Error, Result};
use crate::qcore::{eig_hermitian, CMatrix, HermitianOperator, SpectralSystem, C64};
use crate::rng::{derive_seed, seeded};
use crate::tolerance::Tolerances;

/// Largest Hilbert-space dimension the dense routines are meant for.
pub const MAX_DIM: usize = 1024;

/// Transverse field h_x of the Ising chain, in units of the ZZ coupling.
pub const DEFAULT_TRANSVERSE_FIELD: f64 = 0.9045;
/// Longitudinal field h_z of the Ising chain, in units of the ZZ coupling.
pub const DEFAULT_LONGITUDINAL_FIELD: f64 = 0.8090;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// GUE matrix: H_ii ~ N(0, 1), Re/Im H_ij ~ N(0, 1/2) for i < j.
    /// The spectrum fills roughly [−2√dim, 2√dim].
    #[default]
    RandomGue,
    /// H = J Σ Z_i Z_{i+1} + h_x Σ X_i + h_z Σ Z_i, open boundaries.
    /// Site 0 is the most significant bit of the basis index.
    SpinChain,
    /// GUE whose `scar_count` central eigenvectors are replaced by
    /// computational basis states.
    Scarred,
    /// Diagonal Hamiltonian with the given spectrum (or 0, 1, …, dim−1).
    ExplicitDiagonal,
    /// Block m of `degeneracy_profile` sits at energy m·J, rotated by a
    /// seeded Haar unitary.
    DegenerateBlock,
}

/// Parameters of a generated Hamiltonian. Unused fields are ignored by
/// kinds that do not need them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub dim: Option<usize>,
    pub chain_length: Option<usize>,
    /// ZZ coupling J for the chain; level spacing for degenerate blocks.
    pub coupling: f64,
    pub transverse_field: f64,
    pub longitudinal_field: f64,
    pub spectrum: Option<Vec<f64>>,
    pub scar_count: usize,
    pub degeneracy_profile: Vec<usize>,
    pub seed: u64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            kind: ModelKind::RandomGue,
            dim: None,
            chain_length: None,
            coupling: 1.0,
            transverse_field: DEFAULT_TRANSVERSE_FIELD,
            longitudinal_field: DEFAULT_LONGITUDINAL_FIELD,
            spectrum: None,
            scar_count: 0,
            degeneracy_profile: Vec::new(),
            seed: 0,
        }
    }
}

impl ModelSpec {
    pub fn gue(dim: usize, seed: u64) -> Self {
        Self {
            kind: ModelKind::RandomGue,
            dim: Some(dim),
            seed,
            ..Self::default()
        }
    }

    pub fn spin_chain(chain_length: usize) -> Self {
        Self {
            kind: ModelKind::SpinChain,
            chain_length: Some(chain_length),
            ..Self::default()
        }
    }

    pub fn scarred(dim: usize, scar_count: usize, seed: u64) -> Self {
        Self {
            kind: ModelKind::Scarred,
            dim: Some(dim),
            scar_count,
            seed,
            ..Self::default()
        }
    }

    pub fn explicit_diagonal(spectrum: Vec<f64>) -> Self {
        Self {
            kind: ModelKind::ExplicitDiagonal,
            dim: Some(spectrum.len()),
            spectrum: Some(spectrum),
            ..Self::default()
        }
    }

    pub fn degenerate_block(profile: Vec<usize>, seed: u64) -> Self {
        Self {
            kind: ModelKind::DegenerateBlock,
            degeneracy_profile: profile,
            seed,
            ..Self::default()
        }
    }

    /// Hilbert-space dimension implied by the spec.
    pub fn system_dim(&self) -> Result<usize> {
        let dim = match self.kind {
            ModelKind::RandomGue | ModelKind::Scarred => self
                .dim
                .ok_or_else(|| Error::InvalidParameter("`dim` is required".into()))?,
            ModelKind::SpinChain => {
                let n = self
                    .chain_length
                    .ok_or_else(|| Error::InvalidParameter("`chain_length` is required".into()))?;
                if n < 2 {
                    return Err(Error::InvalidParameter(format!("chain_length {n} < 2")));
                }
                if n > 10 {
                    return Err(Error::InvalidParameter(format!(
                        "chain_length {n} exceeds the dense limit of 10 sites"
                    )));
                }
                1usize << n
            }
            ModelKind::ExplicitDiagonal => match (&self.spectrum, self.dim) {
                (Some(s), _) => s.len(),
                (None, Some(d)) => d,
                (None, None) => {
                    return Err(Error::InvalidParameter("`spectrum` or `dim` is required".into()))
                }
            },
            ModelKind::DegenerateBlock => {
                if self.degeneracy_profile.is_empty() || self.degeneracy_profile.contains(&0) {
                    return Err(Error::InvalidParameter(
                        "`degeneracy_profile` must be non-empty with positive block sizes".into(),
                    ));
                }
                self.degeneracy_profile.iter().sum()
            }
        };
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if dim > MAX_DIM {
            return Err(Error::InvalidParameter(format!("dimension {dim} exceeds {MAX_DIM}")));
        }
        Ok(dim)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.system_dim()?;
        for (name, v) in [
            ("coupling", self.coupling),
            ("transverse_field", self.transverse_field),
            ("longitudinal_field", self.longitudinal_field),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("`{name}` must be finite")));
            }
        }
        if let Some(s) = &self.spectrum {
            if s.iter().any(|e| !e.is_finite()) {
                return Err(Error::InvalidParameter("spectrum contains non-finite values".into()));
            }
        }
        if self.kind == ModelKind::Scarred && (self.scar_count == 0 || 2 * self.scar_count > dim / 2) {
            return Err(Error::InvalidParameter(format!(
                "scar_count {} must be in 1..={} for dim {dim}",
                self.scar_count,
                dim / 4
            )));
        }
        Ok(())
    }
}

/// Builds and diagonalizes the Hamiltonian described by `spec`.
pub fn build_hamiltonian(spec: &ModelSpec) -> Result<SpectralSystem> {
    spec.validate()?;
    let dim = spec.system_dim()?;
    match spec.kind {
        ModelKind::RandomGue => eig_hermitian(&gue_matrix(dim, spec.seed)),
        ModelKind::SpinChain => eig_hermitian(&ising_chain(
            spec.chain_length.unwrap_or(2),
            spec.coupling,
            spec.transverse_field,
            spec.longitudinal_field,
        )),
        ModelKind::ExplicitDiagonal => {
            let spectrum = spec
                .spectrum
                .clone()
                .unwrap_or_else(|| (0..dim).map(|n| n as f64).collect());
            SpectralSystem::from_eigenpairs(spectrum, CMatrix::identity(dim, dim), &Tolerances::DEFAULT)
        }
        ModelKind::DegenerateBlock => {
            let mut energies = Vec::with_capacity(dim);
            for (m, &size) in spec.degeneracy_profile.iter().enumerate() {
                energies.extend(std::iter::repeat_n(m as f64 * spec.coupling, size));
            }
            let mut rng = seeded(derive_seed(spec.seed, 1));
            let u = haar_unitary(dim, &mut rng);
            let mut scaled = u.clone();
            for (j, &e) in energies.iter().enumerate() {
                scaled.column_mut(j).scale_mut(e);
            }
            let h = HermitianOperator::from_trusted(scaled * u.adjoint());
            eig_hermitian(&h)
        }
        ModelKind::Scarred => scarred(spec, dim),
    }
}

/// Eigenstate indices that a scarred spec replaces, evenly spaced through
/// the central half of the spectrum.
pub fn scar_indices(spec: &ModelSpec) -> Result<Vec<usize>> {
    spec.validate()?;
    if spec.kind != ModelKind::Scarred {
        return Ok(Vec::new());
    }
    let dim = spec.system_dim()?;
    let lo = dim / 4;
    let width = dim / 2;
    let s = spec.scar_count;
    Ok((1..=s).map(|j| lo + j * width / (s + 1)).collect())
}

fn gue_matrix(dim: usize, seed: u64) -> HermitianOperator {
    let mut rng = seeded(seed);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in i..dim {
            let x: f64 = StandardNormal.sample(&mut rng);
            if i == j {
                m[(i, i)] = C64::new(x, 0.0);
            } else {
                let y: f64 = StandardNormal.sample(&mut rng);
                let z = C64::new(x * inv_sqrt2, y * inv_sqrt2);
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
    }
    HermitianOperator::from_trusted(m)
}

fn ising_chain(n: usize, coupling: f64, hx: f64, hz: f64) -> HermitianOperator {
    let dim = 1usize << n;
    let mut m = CMatrix::zeros(dim, dim);
    // site i ↔ bit (n − 1 − i)
    let z = |state: usize, site: usize| -> f64 {
        if state >> (n - 1 - site) & 1 == 0 {
            1.0
        } else {
            -1.0
        }
    };
    for s in 0..dim {
        let mut diag = 0.0;
        for i in 0..n {
            diag += hz * z(s, i);
            if i + 1 < n {
                diag += coupling * z(s, i) * z(s, i + 1);
            }
        }
        m[(s, s)] = C64::new(diag, 0.0);
        for i in 0..n {
            let flipped = s ^ (1 << (n - 1 - i));
            m[(flipped, s)] += C64::new(hx, 0.0);
        }
    }
    HermitianOperator::from_trusted(m)
}

/// Replaces the scar eigenvectors with computational basis states and
/// Löwdin-orthonormalizes the remaining eigenvectors in the complement.
fn scarred(spec: &ModelSpec, dim: usize) -> Result<SpectralSystem> {
    let base = eig_hermitian(&gue_matrix(dim, spec.seed))?;
    let scars = scar_indices(spec)?;
    let mut rng = seeded(derive_seed(spec.seed, 2));
    let sites: Vec<usize> = sample(&mut rng, dim, scars.len()).into_vec();

    let v = base.eigenvectors();
    let rest: Vec<usize> = (0..dim).filter(|n| !scars.contains(n)).collect();
    // Project the kept eigenvectors off the scar sites.
    let mut x = CMatrix::zeros(dim, rest.len());
    for (col, &n) in rest.iter().enumerate() {
        let mut c = v.column(n).into_owned();
        for &site in &sites {
            c[site] = C64::new(0.0, 0.0);
        }
        x.set_column(col, &c);
    }
    // Löwdin: X (X†X)^{-1/2}
    let overlap = HermitianOperator::from_trusted(x.adjoint() * &x);
    let overlap_sys = eig_hermitian(&overlap)?;
    let min = overlap_sys.energies()[0];
    if min <= 1e-10 {
        return Err(Error::InvalidParameter(format!(
            "scar replacement left a singular complement (min overlap eigenvalue {min:e})"
        )));
    }
    let w = overlap_sys.eigenvectors();
    let mut scaled = w.clone();
    for (j, &e) in overlap_sys.energies().iter().enumerate() {
        scaled.column_mut(j).scale_mut(1.0 / e.sqrt());
    }
    let inv_sqrt = scaled * w.adjoint();
    let kept = x * inv_sqrt;

    let mut vectors = CMatrix::zeros(dim, dim);
    for (col, &n) in rest.iter().enumerate() {
        vectors.set_column(n, &kept.column(col));
    }
    for (&n, &site) in scars.iter().zip(&sites) {
        let mut e = nalgebra::DVector::zeros(dim);
        e[site] = C64::new(1.0, 0.0);
        vectors.set_column(n, &e);
    }
    SpectralSystem::from_eigenpairs(base.energies().to_vec(), vectors, &Tolerances::DEFAULT)
}
