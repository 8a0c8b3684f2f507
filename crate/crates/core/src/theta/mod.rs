//! Siegel and Jacobi-Siegel theta functions with characteristics, and the
//! composite theta function of a primitive sublattice.

mod composite;
pub mod enumerate;
mod heat;

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::metaplectic::GroupRingVector;
use crate::realspace::GrassmannianPoint;
use crate::tolerances::{POINT_BUDGET, THETA_TOL};

pub use composite::theta_lm;
pub use heat::{heat_residual_termwise, HeatOperator};
pub use enumerate::{enumerate_shifted, tail_radius, tail_radius_for, Ellipsoid};

/// `e(z) = exp(2πi z)`.
pub fn e(z: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * z).exp()
}

pub fn real_to_complex(x: &DVector<f64>) -> DVector<Complex64> {
    x.map(|a| Complex64::new(a, 0.0))
}

/// Inputs of a theta evaluation.
#[derive(Debug, Clone)]
pub struct ThetaRequest<'a> {
    pub tau: Complex64,
    pub zeta: DVector<Complex64>,
    pub v: &'a GrassmannianPoint,
    pub characteristics: Option<(DVector<f64>, DVector<f64>)>,
    pub tolerance: f64,
    pub hat_normalized: bool,
    pub budget: usize,
}

impl<'a> ThetaRequest<'a> {
    pub fn new(v: &'a GrassmannianPoint, tau: Complex64) -> Self {
        Self {
            tau,
            zeta: DVector::zeros(v.rank()),
            v,
            characteristics: None,
            tolerance: THETA_TOL,
            hat_normalized: false,
            budget: POINT_BUDGET,
        }
    }

    pub fn zeta(mut self, zeta: DVector<Complex64>) -> Self {
        self.zeta = zeta;
        self
    }

    pub fn characteristics(mut self, alpha: DVector<f64>, beta: DVector<f64>) -> Self {
        self.characteristics = Some((alpha, beta));
        self
    }

    pub fn tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn hat(mut self, on: bool) -> Self {
        self.hat_normalized = on;
        self
    }

    pub fn budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

/// Theta values plus truncation bookkeeping.
#[derive(Debug, Clone)]
pub struct ThetaValue {
    pub values: GroupRingVector,
    pub radius: f64,
    pub points: usize,
}

/// `Θ_L(τ, ζ; (α, β); v)` component-wise.
pub fn jacobi_theta(req: &ThetaRequest<'_>) -> Result<GroupRingVector> {
    jacobi_theta_detailed(req).map(|t| t.values)
}

pub fn jacobi_theta_detailed(req: &ThetaRequest<'_>) -> Result<ThetaValue> {
    let mut out = GroupRingVector::zeros(req.v.lattice().discriminant().order(), false);
    let (radius, points) = for_each_term(req, |gamma, _, ex| out.coeffs[gamma] += e(ex))?;
    Ok(ThetaValue { values: out, radius, points })
}

/// Visits every retained term with its coset, `μ = λ + β` and the exponent `E`
/// (the term is `e(E)`). Returns the truncation radius and the point count.
pub(crate) fn for_each_term<F: FnMut(usize, &DVector<f64>, Complex64)>(
    req: &ThetaRequest<'_>,
    mut f: F,
) -> Result<(f64, usize)> {
    let v = req.v;
    let n = v.rank();
    if !(req.tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane);
    }
    if !(req.tolerance > 0.0) {
        return Err(Error::BadConfig("theta tolerance must be positive".into()));
    }
    if req.zeta.len() != n {
        return Err(Error::WrongDimension(format!("zeta has length {}, rank is {n}", req.zeta.len())));
    }
    let (alpha, beta) = match &req.characteristics {
        Some((a, b)) => {
            if a.len() != n || b.len() != n {
                return Err(Error::WrongDimension("characteristics".into()));
            }
            (a.clone(), b.clone())
        }
        None => (DVector::zeros(n), DVector::zeros(n)),
    };
    let d = v.lattice().discriminant();
    let g = v.gram();
    let y = req.tau.im;
    let eta = req.zeta.map(|z| z.im);
    let c = enumerate::twist_center(v, y, &eta);
    let energy = if n == 0 { 0.0 } else { c.dot(&(v.majorant() * &c)) };
    let radius = tail_radius_for(v.majorant(), y, energy, req.tolerance);
    let ell = Ellipsoid::new(v.majorant()).expect("majorant is positive definite");

    let g_c = g.map(|x| Complex64::new(x, 0.0));
    let g_zeta = &g_c * &req.zeta;
    let g_alpha = g * &alpha;
    let beta_alpha = beta.dot(&g_alpha);
    // unhatted: -(λ + β/2, α) = -(μ, α) + (β, α)/2 with μ = λ + β
    let constant = if req.hat_normalized { 0.0 } else { 0.5 * beta_alpha };
    let qp = v.q_plus();
    let qm = v.q_minus();
    let tau = req.tau;
    let tau_bar = tau.conj();

    let mut points = 0usize;
    for gamma in 0..d.order() {
        let base = d.rep_f64(gamma) + &beta;
        let shift: Vec<f64> = (&base + &c).iter().copied().collect();
        points += ell.visit(&shift, radius * radius, req.budget.saturating_sub(points), |x| {
            let mu = DVector::from_iterator(n, x.iter().map(|&a| a as f64)) + &base;
            let sp = mu.dot(&(qp * &mu));
            let sm = mu.dot(&(qm * &mu));
            let lin: Complex64 = mu.iter().zip(g_zeta.iter()).map(|(a, b)| b * *a).sum();
            let ph = mu.dot(&g_alpha);
            let ex = tau * (0.5 * sp) + tau_bar * (0.5 * sm) + lin - ph + constant;
            f(gamma, &mu, ex);
        })?;
    }
    Ok((radius, points))
}

/// Convenience: `Θ_L(τ, ζ; v)` at the default tolerance.
pub fn theta(v: &GrassmannianPoint, tau: Complex64, zeta: &DVector<Complex64>) -> Result<GroupRingVector> {
    jacobi_theta(&ThetaRequest::new(v, tau).zeta(zeta.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    #[test]
    fn rank_zero_is_one() {
        let v = GrassmannianPoint::standard(&Lattice::trivial());
        let t = theta(&v, Complex64::new(0.1, 0.7), &DVector::zeros(0)).unwrap();
        assert_eq!(t.coeffs, vec![Complex64::new(1.0, 0.0)]);
    }

    #[test]
    fn a2_at_i() {
        let v = GrassmannianPoint::standard(&Lattice::a2(1));
        let t = theta(&v, Complex64::new(0.0, 1.0), &DVector::zeros(1)).unwrap();
        let direct0: f64 = (-30i32..=30).map(|k| (-2.0 * PI * (k * k) as f64).exp()).sum();
        let direct1: f64 = (-30i32..=30)
            .map(|k| (-2.0 * PI * (k as f64 + 0.5).powi(2)).exp())
            .sum();
        assert!((t.coeffs[0].re - direct0).abs() < 1e-14);
        assert!((t.coeffs[1].re - direct1).abs() < 1e-14);
    }

    #[test]
    fn rejects_lower_half_plane() {
        let v = GrassmannianPoint::standard(&Lattice::a2(1));
        let err = theta(&v, Complex64::new(0.0, -1.0), &DVector::zeros(1)).unwrap_err();
        assert_eq!(err, Error::NotInUpperHalfPlane);
    }
}
