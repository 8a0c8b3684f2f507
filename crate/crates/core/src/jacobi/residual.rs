use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::lift::JacobiForm;
use crate::error::{Error, Result};
use crate::metaplectic::MetaplecticElement;
use crate::theta::{e, HeatOperator};

/// Which functional equation to test.
#[derive(Debug, Clone)]
pub enum Functional {
    /// Translation by `τσ_{v+} + τ̄σ_{v-} + ν` with `σ, ν ∈ L`.
    PerJac { sigma: DVector<f64>, nu: DVector<f64> },
    /// The metaplectic transformation law with the form's own weight.
    ModJac { g: MetaplecticElement },
    /// Twisted translation law for a lift with characteristics `(α, β)`.
    CharPer { sigma: DVector<f64>, nu: DVector<f64>, alpha: DVector<f64>, beta: DVector<f64> },
}

fn cvec(x: &DVector<f64>) -> DVector<Complex64> {
    x.map(|a| Complex64::new(a, 0.0))
}

fn rel(lhs: Complex64, rhs: Complex64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

/// `|LHS - RHS| / max(1, |RHS|)` for the chosen equation at `(τ, ζ)`.
pub fn functional_residual(
    phi: &dyn JacobiForm,
    which: &Functional,
    tau: Complex64,
    zeta: &DVector<Complex64>,
) -> Result<f64> {
    let v = phi.point();
    let gc = v.gram().map(|x| Complex64::new(x, 0.0));
    let pair = |a: &DVector<Complex64>, b: &DVector<Complex64>| a.dot(&(&gc * b));
    match which {
        Functional::PerJac { sigma, nu } | Functional::CharPer { sigma, nu, .. } => {
            let n = v.rank();
            if sigma.len() != n || nu.len() != n {
                return Err(Error::WrongDimension("translation vectors".into()));
            }
            let (sp, sm) = v.project(sigma);
            let shift = cvec(&sp) * tau + cvec(&sm) * tau.conj() + cvec(nu);
            let lhs = phi.eval(tau, &(zeta + shift))?;
            let s = cvec(sigma);
            let mut ex = -tau * pair(&cvec(&sp), &cvec(&sp)) * 0.5
                - tau.conj() * pair(&cvec(&sm), &cvec(&sm)) * 0.5
                - pair(&s, zeta);
            if let Functional::CharPer { alpha, beta, .. } = which {
                ex += v.lattice().pair_f64(nu, beta) + v.lattice().pair_f64(sigma, alpha);
            }
            let rhs = e(ex) * phi.eval(tau, zeta)?;
            Ok(rel(lhs, rhs))
        }
        Functional::ModJac { g } => {
            let j = g.j(tau);
            let (zp, zm) = v.project_c(zeta);
            let arg = zp.map(|x| x / j) + zm.map(|x| x / j.conj());
            let lhs = phi.eval(g.act(tau), &arg)?;
            let c = g.c as f64;
            let phi_t = g.phi(tau);
            let (k2, l2) = phi.weight2();
            let pre = phi_t.powi(k2)
                * phi_t.conj().powi(l2)
                * e(pair(&zp, &zp) * c / (j * 2.0) + pair(&zm, &zm) * c / (j.conj() * 2.0));
            let rhs = pre * phi.eval(tau, zeta)?;
            Ok(rel(lhs, rhs))
        }
    }
}

/// Central-difference `(4πi∂_τ̄ - Δ_{v-})F` or `(4πi∂_τ - Δ_{v+})F` for a vector
/// valued function of `(τ, ζ)`, relative to `max(1, max|F|)`.
pub fn heat_residual_fd<F>(
    f: F,
    v: &crate::realspace::GrassmannianPoint,
    op: HeatOperator,
    tau: Complex64,
    zeta: &DVector<Complex64>,
    h: f64,
) -> Result<f64>
where
    F: Fn(Complex64, &DVector<Complex64>) -> Result<Vec<Complex64>>,
{
    if !(h > 0.0) {
        return Err(Error::BadConfig("finite difference step must be positive".into()));
    }
    let i = Complex64::new(0.0, 1.0);
    let f0 = f(tau, zeta)?;
    let xp = f(tau + h, zeta)?;
    let xm = f(tau - h, zeta)?;
    let yp = f(tau + i * h, zeta)?;
    let ym = f(tau - i * h, zeta)?;
    let dirs = match op {
        HeatOperator::Pseudo => v.orthonormal_minus(),
        HeatOperator::Skew => v.orthonormal_plus(),
    };
    let mut lap = vec![Complex64::new(0.0, 0.0); f0.len()];
    for w in dirs.column_iter() {
        let dw = cvec(&(w.into_owned() * h));
        let p = f(tau, &(zeta + &dw))?;
        let m = f(tau, &(zeta - &dw))?;
        for k in 0..f0.len() {
            lap[k] += (p[k] - 2.0 * f0[k] + m[k]) / (h * h);
        }
    }
    let mut worst = 0.0f64;
    for k in 0..f0.len() {
        let dx = (xp[k] - xm[k]) / (2.0 * h);
        let dy = (yp[k] - ym[k]) / (2.0 * h);
        let r = match op {
            // Δ_{v-} = -Σ ∂²_w along w with (w, w) = -1
            HeatOperator::Pseudo => 4.0 * PI * i * 0.5 * (dx + i * dy) + lap[k],
            HeatOperator::Skew => 4.0 * PI * i * 0.5 * (dx - i * dy) - lap[k],
        };
        worst = worst.max(r.norm());
    }
    let scale = f0.iter().map(|z| z.norm()).fold(1.0, f64::max);
    Ok(worst / scale)
}

/// Heat residual of a Jacobi form.
pub fn diff_residual(
    phi: &dyn JacobiForm,
    op: HeatOperator,
    tau: Complex64,
    zeta: &DVector<Complex64>,
    h: f64,
) -> Result<f64> {
    heat_residual_fd(|t, z| Ok(vec![phi.eval(t, z)?]), phi.point(), op, tau, zeta, h)
}
