use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::qcore::{CMatrix, CVector, SpectralSystem, C64};
use crate::thermal::EnergyBand;

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

/// Haar-random unit vector.
pub fn haar_vector<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(dim, |_, _| complex_normal(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix,
/// with the phases of R's diagonal absorbed into Q.
pub fn haar_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        if n > 0.0 {
            let phase = rjj / n;
            q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
    }
    q
}

/// Haar-random pure state supported on the band.
pub fn random_band_vector<R: Rng + ?Sized>(band: &EnergyBand, sys: &SpectralSystem, rng: &mut R) -> Result<CVector> {
    band.check_for(sys)?;
    let c = haar_vector(band.d(), rng);
    Ok(sys.basis_columns(band.indices()) * c)
}

/// Weights drawn uniformly from the probability simplex.
pub fn random_simplex_weights<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    for x in &mut w {
        *x /= s;
    }
    w
}

/// Random pure state with a Gaussian energy profile centred on the band.
///
/// Populations are |c_n|² ∝ exp(−(E_n − E_c)²/(2σ²)) · Exp(1) with σ the
/// band half-width, rescaled so that exactly `tail_weight` of the norm sits
/// outside the band. Phases are uniform.
pub fn gaussian_profile_vector<R: Rng + ?Sized>(
    sys: &SpectralSystem,
    band: &EnergyBand,
    tail_weight: f64,
    rng: &mut R,
) -> Result<CVector> {
    band.check_for(sys)?;
    if !(0.0..1.0).contains(&tail_weight) {
        return Err(Error::InvalidParameter(format!("tail weight {tail_weight} not in [0, 1)")));
    }
    let dim = sys.dim();
    let centre = 0.5 * (band.e_min() + band.e_max());
    let sigma = (0.5 * (band.e_max() - band.e_min())).max(f64::EPSILON);
    let energies = sys.energies();
    let mut pops: Vec<f64> = energies
        .iter()
        .map(|&e| {
            let z = (e - centre) / sigma;
            let x: f64 = Exp1.sample(rng);
            (-0.5 * z * z).exp() * x
        })
        .collect();
    let inside: f64 = band.indices().map(|n| pops[n]).sum();
    let outside: f64 = pops.iter().sum::<f64>() - inside;
    if tail_weight > 0.0 && outside <= 0.0 {
        return Err(Error::InvalidParameter(
            "no out-of-band population available for the requested tail weight".into(),
        ));
    }
    for (n, p) in pops.iter_mut().enumerate() {
        *p *= if band.contains(n) {
            (1.0 - tail_weight) / inside
        } else if tail_weight > 0.0 {
            tail_weight / outside
        } else {
            0.0
        };
    }
    let coeffs = CVector::from_fn(dim, |n, _| {
        let phase: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        C64::from_polar(pops[n].sqrt(), phase)
    });
    Ok(sys.eigenvectors() * coeffs)
}
