use crate::error::{Error, Result};
use crate::qcore::{partial_trace_cross, trace_distance_raw};
use crate::qcore::{
    partial_trace, partial_trace_pure, CMatrix, CVector, DensityMatrix, MeasurementSet, Povm, SubsystemPartition, C64,
};

/// What an observer can measure: a finite set of POVMs, or every POVM on
/// one tensor factor.
#[derive(Debug, Clone, Copy)]
pub enum Probe<'a> {
    Set(&'a MeasurementSet),
    Subsystem(SubsystemPartition),
}

impl Probe<'_> {
    /// N_M for a finite set, d_S for a subsystem.
    pub fn capacity(&self) -> usize {
        match self {
            Probe::Set(ms) => ms.total_outcomes(),
            Probe::Subsystem(p) => p.dim_s(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Probe::Set(ms) => ms.dim(),
            Probe::Subsystem(p) => p.total_dim(),
        }
    }

    pub fn is_subsystem(&self) -> bool {
        matches!(self, Probe::Subsystem(_))
    }
}

/// ½ Σ_r |tr(M_r(ρ − σ))| for one POVM.
pub fn dist_single(rho: &DensityMatrix, sigma: &DensityMatrix, m: &Povm) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    if m.dim() != rho.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), m.dim()));
    }
    let diff = rho.matrix() - sigma.matrix();
    Ok(povm_distance(m, |e| e.expectation(&diff)))
}

fn povm_distance(m: &Povm, mut expectation: impl FnMut(&crate::qcore::Effect) -> f64) -> f64 {
    let s: f64 = m.outcomes().iter().map(|e| expectation(e).abs()).sum();
    (0.5 * s).min(1.0)
}

/// The maximizing value and the first POVM attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SetDistance {
    pub value: f64,
    pub povm_index: usize,
}

/// max over the set of `dist_single`; ties go to the lowest index.
pub fn dist_set(rho: &DensityMatrix, sigma: &DensityMatrix, ms: &MeasurementSet) -> Result<SetDistance> {
    if ms.is_empty() {
        return Err(Error::EmptyMeasurementSet);
    }
    let mut best = SetDistance {
        value: f64::NEG_INFINITY,
        povm_index: 0,
    };
    for (i, m) in ms.povms().iter().enumerate() {
        let v = dist_single(rho, sigma, m)?;
        if v > best.value {
            best = SetDistance { value: v, povm_index: i };
        }
    }
    Ok(best)
}

/// Trace distance of the reduced states on the subsystem.
pub fn subsystem_distance(rho: &DensityMatrix, sigma: &DensityMatrix, part: &SubsystemPartition) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let a = partial_trace(rho, part)?;
    let b = partial_trace(sigma, part)?;
    Ok(trace_distance_raw(&(a.matrix() - b.matrix())))
}

/// D(ρ, σ) under the probe.
pub fn distance(rho: &DensityMatrix, sigma: &DensityMatrix, probe: &Probe) -> Result<f64> {
    match probe {
        Probe::Set(ms) => dist_set(rho, sigma, ms).map(|d| d.value),
        Probe::Subsystem(p) => subsystem_distance(rho, sigma, p),
    }
}

/// A fixed second argument σ with its outcome statistics precomputed, for
/// evaluating D(·, σ) on many states.
#[derive(Debug, Clone)]
pub struct Reference<'a> {
    probe: Probe<'a>,
    dim: usize,
    kind: RefKind,
}

#[derive(Debug, Clone)]
enum RefKind {
    /// tr(M_r σ) for every effect, POVM by POVM.
    Set(Vec<Vec<f64>>),
    Subsystem(CMatrix),
}

impl<'a> Reference<'a> {
    pub fn new(sigma: &DensityMatrix, probe: Probe<'a>) -> Result<Self> {
        if probe.dim() != sigma.dim() {
            return Err(Error::DimensionMismatch(probe.dim(), sigma.dim()));
        }
        let kind = match &probe {
            Probe::Set(ms) => {
                if ms.is_empty() {
                    return Err(Error::EmptyMeasurementSet);
                }
                RefKind::Set(
                    ms.povms()
                        .iter()
                        .map(|m| m.outcomes().iter().map(|e| e.expectation(sigma.matrix())).collect())
                        .collect(),
                )
            }
            Probe::Subsystem(p) => RefKind::Subsystem(partial_trace(sigma, p)?.into_matrix()),
        };
        Ok(Self {
            probe,
            dim: sigma.dim(),
            kind,
        })
    }

    pub fn probe(&self) -> &Probe<'a> {
        &self.probe
    }

    fn check(&self, dim: usize) -> Result<()> {
        if dim != self.dim {
            return Err(Error::DimensionMismatch(self.dim, dim));
        }
        Ok(())
    }

    fn set_max(&self, ms: &MeasurementSet, probs: &[Vec<f64>], mut f: impl FnMut(&crate::qcore::Effect) -> f64) -> SetDistance {
        let mut best = SetDistance {
            value: f64::NEG_INFINITY,
            povm_index: 0,
        };
        for (i, (m, ref_probs)) in ms.povms().iter().zip(probs).enumerate() {
            let mut k = 0;
            let v = povm_distance(m, |e| {
                let p = f(e) - ref_probs[k];
                k += 1;
                p
            });
            if v > best.value {
                best = SetDistance { value: v, povm_index: i };
            }
        }
        best
    }

    /// D(|ψ⟩⟨ψ|, σ) for a unit vector ψ.
    pub fn distance_to_vector(&self, psi: &CVector) -> Result<f64> {
        self.check(psi.len())?;
        Ok(match (&self.probe, &self.kind) {
            (Probe::Set(ms), RefKind::Set(probs)) => self.set_max(ms, probs, |e| e.expectation_vector(psi)).value,
            (Probe::Subsystem(p), RefKind::Subsystem(sigma_s)) => {
                trace_distance_raw(&(partial_trace_pure(psi, p)? - sigma_s))
            }
            _ => unreachable!("reference kind always matches its probe"),
        })
    }

    /// D(ρ, σ).
    pub fn distance_to_state(&self, rho: &DensityMatrix) -> Result<f64> {
        self.distance_to_state_indexed(rho).map(|d| d.value)
    }

    /// D(ρ, σ) with the maximizing POVM index (0 for subsystem probes).
    pub fn distance_to_state_indexed(&self, rho: &DensityMatrix) -> Result<SetDistance> {
        self.check(rho.dim())?;
        Ok(match (&self.probe, &self.kind) {
            (Probe::Set(ms), RefKind::Set(probs)) => self.set_max(ms, probs, |e| e.expectation(rho.matrix())),
            (Probe::Subsystem(p), RefKind::Subsystem(sigma_s)) => SetDistance {
                value: trace_distance_raw(&(partial_trace(rho, p)?.matrix() - sigma_s)),
                povm_index: 0,
            },
            _ => unreachable!("reference kind always matches its probe"),
        })
    }
}

/// ⟨x|M|x⟩ for a 2×2 Hermitian M stored as (M₀₀, M₁₁, M₀₁).
#[derive(Debug, Clone, Copy)]
pub(crate) struct Form2(f64, f64, C64);

impl Form2 {
    fn eval(&self, x: [C64; 2]) -> f64 {
        self.0 * x[0].norm_sqr() + self.1 * x[1].norm_sqr() + 2.0 * (x[0].conj() * self.2 * x[1]).re
    }
}

/// D(·, σ) restricted to unit vectors x₀w₀ + x₁w₁ in the span of two
/// orthonormal vectors; evaluation no longer touches the full space.
#[derive(Debug, Clone)]
pub(crate) enum PairReference {
    Set {
        /// Per POVM: (form of each effect, tr(M_r σ)).
        povms: Vec<Vec<(Form2, f64)>>,
    },
    Subsystem {
        /// tr_B |w_p⟩⟨w_q| for (p, q) = (0, 0), (1, 1), (0, 1).
        blocks: [CMatrix; 3],
        sigma_s: CMatrix,
    },
}

impl PairReference {
    pub(crate) fn distance(&self, x: [C64; 2]) -> f64 {
        match self {
            PairReference::Set { povms } => povms
                .iter()
                .map(|m| {
                    let s: f64 = m.iter().map(|(f, r)| (f.eval(x) - r).abs()).sum();
                    (0.5 * s).min(1.0)
                })
                .fold(f64::NEG_INFINITY, f64::max),
            PairReference::Subsystem { blocks, sigma_s } => {
                let [t00, t11, t01] = blocks;
                let c = x[0] * x[1].conj();
                let (n0, n1) = (x[0].norm_sqr(), x[1].norm_sqr());
                if sigma_s.nrows() == 2 {
                    // Closed form for a qubit: eigenvalues m ± r of the difference.
                    let entry = |i: usize, j: usize| {
                        t00[(i, j)] * n0 + t11[(i, j)] * n1 + t01[(i, j)] * c + (t01[(j, i)] * c).conj()
                            - sigma_s[(i, j)]
                    };
                    let (a, b, off) = (entry(0, 0).re, entry(1, 1).re, entry(0, 1));
                    let m = 0.5 * (a + b);
                    let r = (0.25 * (a - b) * (a - b) + off.norm_sqr()).sqrt();
                    return 0.5 * ((m + r).abs() + (m - r).abs());
                }
                let reduced = t00 * C64::from(n0) + t11 * C64::from(n1) + t01 * c + t01.adjoint() * c.conj();
                trace_distance_raw(&(reduced - sigma_s))
            }
        }
    }
}

impl Reference<'_> {
    pub(crate) fn pair(&self, w0: &CVector, w1: &CVector) -> Result<PairReference> {
        self.check(w0.len())?;
        self.check(w1.len())?;
        Ok(match (&self.probe, &self.kind) {
            (Probe::Set(ms), RefKind::Set(probs)) => {
                let w = CMatrix::from_columns(&[w0.clone(), w1.clone()]);
                let povms = ms
                    .povms()
                    .iter()
                    .zip(probs)
                    .map(|(m, refs)| {
                        m.outcomes()
                            .iter()
                            .zip(refs)
                            .map(|(e, &r)| {
                                let f = e.in_basis(&w);
                                (Form2(f[(0, 0)].re, f[(1, 1)].re, f[(0, 1)]), r)
                            })
                            .collect()
                    })
                    .collect();
                PairReference::Set { povms }
            }
            (Probe::Subsystem(p), RefKind::Subsystem(sigma_s)) => PairReference::Subsystem {
                blocks: [
                    partial_trace_pure(w0, p)?,
                    partial_trace_pure(w1, p)?,
                    partial_trace_cross(w0, w1, p)?,
                ],
                sigma_s: sigma_s.clone(),
            },
            _ => unreachable!("reference kind always matches its probe"),
        })
    }
}
