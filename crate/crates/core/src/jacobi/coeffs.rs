use std::f64::consts::PI;

use num_complex::Complex64;

use super::form::FormKind;
use super::lift::ThetaLift;
use crate::error::{Error, Result};
use crate::lattice::{Lattice, Q};
use crate::realspace::GrassmannianPoint;

/// One entry of the Fourier table of `Φ^F` at height `y`:
/// `Φ = Σ c_{m,λ}(y) e(mx + (λ, ζ)) exp(-π(λ²_{v+} - λ²_{v-})y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierEntry {
    pub m: Q,
    pub lambda: Vec<Q>,
    pub coset: usize,
    /// `n = m - λ²/2`, the index of `a_{n,γ}`.
    pub n: Q,
    pub c: Complex64,
    /// `c̃_{m,λ}(y) = c_{m,λ}(y) e^{2πny}`.
    pub c_tilde: Complex64,
}

/// `(m + (σ, λ) + σ²/2, λ + σ)`: the index carrying the same coefficient.
pub fn shift_index(l: &Lattice, m: Q, lambda: &[Q], sigma: &[i64]) -> (Q, Vec<Q>) {
    let s: Vec<Q> = sigma.iter().map(|&x| Q::from_integer(x as i128)).collect();
    let m2 = m + l.pair_q(&s, lambda) + l.pair_q(&s, &s) / Q::from_integer(2);
    let lam2 = lambda.iter().zip(&s).map(|(a, b)| *a + *b).collect();
    (m2, lam2)
}

/// `a_{n,γ}(y)` and `ã_{n,γ}(y)` for a q-expansion input.
pub fn a_coefficient(lift: &ThetaLift, y: f64, n: Q, coset: usize) -> Result<(Complex64, Complex64)> {
    let FormKind::QExpansion(terms) = &lift.form().kind else {
        return Err(Error::UnsupportedInput);
    };
    let mut tilde = Complex64::new(0.0, 0.0);
    for t in terms.iter().filter(|t| t.coset == coset && t.exponent == n) {
        tilde += t.coeff * y.powi(t.ypow);
    }
    let nf = crate::lattice::exact::to_f64(&n);
    Ok((tilde * (-2.0 * PI * nf * y).exp(), tilde))
}

/// `c_{m,λ}(y)` for the requested indices, with `a_{n,γ} = c_{n+λ²/2,λ}`.
pub fn jacobi_fourier_coeffs(lift: &ThetaLift, y: f64, index: &[(Q, Vec<Q>)]) -> Result<Vec<FourierEntry>> {
    if !matches!(lift.form().kind, FormKind::QExpansion(_)) {
        return Err(Error::UnsupportedInput);
    }
    let v: &GrassmannianPoint = super::lift::JacobiForm::point(lift);
    let l = v.lattice();
    let d = l.discriminant();
    index
        .iter()
        .map(|(m, lambda)| {
            if lambda.len() != l.rank() {
                return Err(Error::WrongDimension("lambda".into()));
            }
            let coset = d
                .coset_of(lambda)
                .ok_or_else(|| Error::WrongDimension("lambda is not in the dual lattice".into()))?;
            let n = *m - l.pair_q(lambda, lambda) / Q::from_integer(2);
            let (c, c_tilde) = a_coefficient(lift, y, n, coset)?;
            Ok(FourierEntry { m: *m, lambda: lambda.clone(), coset, n, c, c_tilde })
        })
        .collect()
}
