use super::operator::{trace_product, CMatrix, HermitianOperator, C64};
use crate::error::{Error, Result};

/// Hilbert–Schmidt orthonormal Hermitian basis of the d×d operators.
///
/// Order: I/√d, then for each pair j < k the symmetric (E_jk + E_kj)/√2 and
/// antisymmetric i(E_kj − E_jk)/√2 elements, then the traceless diagonal
/// elements diag(1,…,1,−l,0,…)/√(l(l+1)). For d = 2 this is the Pauli
/// basis {I, X, Y, Z}/√2.
pub fn hermitian_operator_basis(dim_s: usize) -> Result<Vec<HermitianOperator>> {
    if dim_s == 0 {
        return Err(Error::EmptyDimension);
    }
    let d = dim_s;
    let mut out = Vec::with_capacity(d * d);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;

    out.push(HermitianOperator::identity(d).scaled(1.0 / (d as f64).sqrt()));
    for j in 0..d {
        for k in (j + 1)..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = C64::new(inv_sqrt2, 0.0);
            sym[(k, j)] = C64::new(inv_sqrt2, 0.0);
            out.push(HermitianOperator::from_trusted(sym));

            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = C64::new(0.0, -inv_sqrt2);
            anti[(k, j)] = C64::new(0.0, inv_sqrt2);
            out.push(HermitianOperator::from_trusted(anti));
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(d, d);
        for i in 0..l {
            diag[(i, i)] = C64::new(norm, 0.0);
        }
        diag[(l, l)] = C64::new(-(l as f64) * norm, 0.0);
        out.push(HermitianOperator::from_trusted(diag));
    }
    Ok(out)
}

/// Real coefficients tr(A e_i) of a Hermitian `a` in `basis`.
pub fn expand_in_basis(a: &HermitianOperator, basis: &[HermitianOperator]) -> Vec<f64> {
    basis.iter().map(|e| trace_product(a.matrix(), e.matrix()).re).collect()
}

/// Σ c_i e_i.
pub fn resum_from_basis(coeffs: &[f64], basis: &[HermitianOperator]) -> HermitianOperator {
    let d = basis[0].dim();
    let mut acc = CMatrix::zeros(d, d);
    for (c, e) in coeffs.iter().zip(basis) {
        acc += e.matrix() * C64::new(*c, 0.0);
    }
    HermitianOperator::from_trusted(acc)
}
