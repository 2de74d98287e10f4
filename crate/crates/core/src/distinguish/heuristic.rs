use std::f64::consts::{FRAC_PI_2, TAU};

use super::stats::distances_in_basis;
use super::metrics::PairReference;
use super::{Probe, Reference};
use crate::error::Result;
use crate::models::haar_unitary;
use crate::qcore::{CMatrix, CVector, SpectralSystem, C64};
use crate::rng::{derive_seed, seeded};
use crate::thermal::{microcanonical, DegeneracyStructure, EnergyBand};

/// A basis of the band, rotated within degenerate blocks, and the mean
/// eigenstate distinguishability it achieves.
#[derive(Debug, Clone, PartialEq)]
pub struct MeanMaxEstimate {
    /// Best mean found; a lower bound on the maximum over block bases.
    pub value: f64,
    /// Mean in the system's own eigenbasis.
    pub unrotated_mean: f64,
    /// Achieving basis, one column per band index.
    pub basis: CMatrix,
    pub per_eigenstate: Vec<f64>,
}

const THETA_GRID: usize = 17;
const PHI_GRID: usize = 32;
const MAX_SWEEPS: usize = 30;
const SWEEP_TOL: f64 = 1e-10;
const STEP_TOL: f64 = 1e-9;

/// Maximizes the mean band-eigenstate distinguishability over unitary
/// rotations inside each degenerate block, by Givens-rotation coordinate
/// ascent with random restarts. Restart 0 starts from the unrotated basis,
/// so the result never falls below the plain mean.
pub fn dmean_max_heuristic(
    band: &EnergyBand,
    sys: &SpectralSystem,
    degeneracy: &DegeneracyStructure,
    probe: &Probe,
    n_restarts: usize,
    seed: u64,
) -> Result<MeanMaxEstimate> {
    band.check_for(sys)?;
    let mut basis = sys.basis_columns(band.indices());
    let mut values = distances_in_basis(band, &basis, probe)?;
    let d = band.d() as f64;
    let unrotated_mean = values.iter().sum::<f64>() / d;

    let omega = microcanonical(band);
    let reference = Reference::new(&omega, *probe)?;
    for (m, class) in degeneracy.classes().iter().enumerate() {
        if class.len() < 2 || !band.contains(class.start) {
            continue;
        }
        let offset = class.start - band.index_lo();
        let g = class.len();
        let block = basis.columns(offset, g).into_owned();
        let mut best_cols = block.clone();
        let mut best_vals = values[offset..offset + g].to_vec();
        let mut best_sum: f64 = best_vals.iter().sum();
        for restart in 0..n_restarts.max(1) {
            let start = if restart == 0 {
                block.clone()
            } else {
                let mut rng = seeded(derive_seed(derive_seed(seed, m as u64), restart as u64));
                &block * haar_unitary(g, &mut rng)
            };
            let (cols, vals) = ascend(&reference, start)?;
            let sum: f64 = vals.iter().sum();
            if sum > best_sum {
                best_sum = sum;
                best_cols = cols;
                best_vals = vals;
            }
        }
        basis.columns_mut(offset, g).copy_from(&best_cols);
        values[offset..offset + g].copy_from_slice(&best_vals);
    }
    let value = values.iter().sum::<f64>() / d;
    Ok(MeanMaxEstimate {
        value: value.max(unrotated_mean),
        unrotated_mean,
        basis,
        per_eigenstate: values,
    })
}

fn rotate(wj: &CVector, wk: &CVector, theta: f64, phi: f64) -> (CVector, CVector) {
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(1.0, phi);
    let a = wj * C64::new(c, 0.0) + wk * (e * s);
    let b = wk * C64::new(c, 0.0) - wj * (e.conj() * s);
    (a, b)
}

/// Coordinates of the rotated pair in the (w_j, w_k) basis.
fn rotation_coords(theta: f64, phi: f64) -> ([C64; 2], [C64; 2]) {
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(1.0, phi);
    ([C64::new(c, 0.0), e * s], [-(e.conj() * s), C64::new(c, 0.0)])
}

fn pair_value(pair: &PairReference, theta: f64, phi: f64) -> f64 {
    let (a, b) = rotation_coords(theta, phi);
    pair.distance(a) + pair.distance(b)
}

/// Coordinate ascent over Givens rotations of column pairs.
fn ascend(r: &Reference, mut cols: CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    let g = cols.ncols();
    let mut vals: Vec<f64> = (0..g)
        .map(|j| r.distance_to_vector(&cols.column(j).into_owned()))
        .collect::<Result<_>>()?;
    for sweep in 0..MAX_SWEEPS {
        let mut gained = 0.0;
        for j in 0..g {
            for k in j + 1..g {
                let wj = cols.column(j).into_owned();
                let wk = cols.column(k).into_owned();
                let current = vals[j] + vals[k];
                let (theta, phi, best) = optimize_pair(r, &wj, &wk, current, sweep == 0)?;
                if best > current + SWEEP_TOL * 1e-2 {
                    let (a, b) = rotate(&wj, &wk, theta, phi);
                    vals[j] = r.distance_to_vector(&a)?;
                    vals[k] = r.distance_to_vector(&b)?;
                    cols.set_column(j, &a);
                    cols.set_column(k, &b);
                    gained += vals[j] + vals[k] - current;
                }
            }
        }
        if gained < SWEEP_TOL * vals.iter().sum::<f64>().max(1.0) {
            break;
        }
    }
    Ok((cols, vals))
}

/// Compass search in (θ, φ), seeded by a coarse grid on the first sweep.
/// Later sweeps start from the identity rotation, since the pair is
/// already near a local optimum.
fn optimize_pair(r: &Reference, wj: &CVector, wk: &CVector, current: f64, grid: bool) -> Result<(f64, f64, f64)> {
    let pair = r.pair(wj, wk)?;
    let (mut theta, mut phi, mut best) = (0.0, 0.0, current);
    for a in (0..THETA_GRID).filter(|_| grid) {
        let t = FRAC_PI_2 * a as f64 / (THETA_GRID - 1) as f64;
        for b in 0..PHI_GRID {
            let p = TAU * b as f64 / PHI_GRID as f64;
            let v = pair_value(&pair, t, p);
            if v > best {
                (theta, phi, best) = (t, p, v);
            }
        }
    }
    let mut dt = FRAC_PI_2 / (THETA_GRID - 1) as f64;
    let mut dp = TAU / PHI_GRID as f64;
    while dt > STEP_TOL || dp > STEP_TOL {
        let mut moved = false;
        for (st, sp) in [(dt, 0.0), (-dt, 0.0), (0.0, dp), (0.0, -dp)] {
            let (t, p) = (theta + st, phi + sp);
            let v = pair_value(&pair, t, p);
            if v > best {
                (theta, phi, best) = (t, p, v);
                moved = true;
                break;
            }
        }
        if !moved {
            dt *= 0.5;
            dp *= 0.5;
        }
    }
    Ok((theta, phi, best))
}
