use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{jacobi_theta, ThetaRequest};
use crate::error::{Error, Result};
use crate::lattice::{exact, PrimitiveSublattice};
use crate::realspace::GrassmannianPoint;

/// `Θ_{L,M}(τ; η; u^⊥)` as a `|D_L| × |D_M|` matrix: entry `(γ, δ)` is the
/// coefficient of `e_γ ⊗ e*_δ`.
///
/// Every class of `L*/M` splits as `d_δ + p` with `d_δ ∈ M*` and `p` in the dual
/// of `M^⊥_L`; summing over `p` in a fixed coset `ε` of `D_{M^⊥_L}` gives a theta
/// component of the complement, and `(δ, ε)` determines the coset of `D_L`.
pub fn theta_lm(
    m: &PrimitiveSublattice,
    u_perp: &GrassmannianPoint,
    tau: Complex64,
    eta: &DVector<Complex64>,
    tol: f64,
) -> Result<DMatrix<Complex64>> {
    if u_perp.lattice() != &m.complement {
        return Err(Error::WrongDimension("u_perp must live on the complement of M".into()));
    }
    let table = coset_table(m);
    let th = jacobi_theta(&ThetaRequest::new(u_perp, tau).zeta(eta.clone()).tolerance(tol))?;
    let dl = m.ambient.discriminant().order();
    let dm = m.lattice.discriminant().order();
    let mut out = DMatrix::zeros(dl, dm);
    for (delta, row) in table.iter().enumerate() {
        for (eps, gamma) in row.iter().enumerate() {
            if let Some(gamma) = gamma {
                out[(*gamma, delta)] += th.coeffs[eps];
            }
        }
    }
    Ok(out)
}

/// `table[δ][ε]`: the coset of `d_δ + r_ε` in `D_L` when it lies in `L*`.
pub(crate) fn coset_table(m: &PrimitiveSublattice) -> Vec<Vec<Option<usize>>> {
    let dm = m.lattice.discriminant();
    let dc = m.complement.discriminant();
    let dl = m.ambient.discriminant();
    (0..dm.order())
        .map(|delta| {
            let a = exact::mat_vec_q(&m.basis, dm.rep(delta));
            (0..dc.order())
                .map(|eps| {
                    let b = exact::mat_vec_q(&m.complement_basis, dc.rep(eps));
                    let x: Vec<_> = a.iter().zip(&b).map(|(p, q)| *p + *q).collect();
                    dl.coset_of(&x)
                })
                .collect()
        })
        .collect()
}
