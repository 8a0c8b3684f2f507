use nalgebra::DVector;
use num_complex::Complex64;

use super::form::{down_form, tilde_mf, up_form, ModularForm, Rep};
use super::lift::{jacobi_from_mf, JacobiForm};
use crate::error::{Error, Result};
use crate::lattice::IsotropicSubgroupData;
use crate::metaplectic::pairing;
use crate::realspace::GrassmannianPoint;
use crate::theta::{jacobi_theta, ThetaRequest};

/// Both sides of an arrow identity.
#[derive(Debug, Clone, Copy)]
pub struct ArrowComparison {
    pub lhs: Complex64,
    pub rhs: Complex64,
}

impl ArrowComparison {
    pub fn residual(&self) -> f64 {
        (self.lhs - self.rhs).norm() / self.rhs.norm().max(1.0)
    }
}

/// `ζ ∈ L_C` in the coordinates of `Λ`.
fn to_parent(data: &IsotropicSubgroupData, zeta: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let b = data.basis_change.map(|x| Complex64::new(x as f64, 0.0));
    b.try_inverse().map(|bi| bi * zeta).ok_or(Error::Degenerate)
}

/// `(1/|H|) Σ_{α, β ∈ H} ⟨Θ̂_Λ(τ, ζ; (α, β); v), F(τ)⟩_Λ`.
fn characteristics_average(
    f: &ModularForm,
    data: &IsotropicSubgroupData,
    v_parent: &GrassmannianPoint,
    tau: Complex64,
    zeta: &DVector<Complex64>,
) -> Result<Complex64> {
    let d = data.parent.discriminant();
    let fv = f.eval(tau)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for &a in &data.h {
        for &b in &data.h {
            let req = ThetaRequest::new(v_parent, tau)
                .zeta(zeta.clone())
                .characteristics(d.rep_f64(a).clone(), d.rep_f64(b).clone())
                .hat(true)
                .tolerance(f.theta_tol);
            acc += pairing(&jacobi_theta(&req)?, &fv)?;
        }
    }
    Ok(acc / data.h_order() as f64)
}

fn parent_point(data: &IsotropicSubgroupData, v: &GrassmannianPoint) -> Result<GrassmannianPoint> {
    if v.lattice() != &data.overlattice {
        return Err(Error::SubgroupMismatch);
    }
    v.rebase(&data.parent, &data.basis_change)
}

/// `Φ^{↓F}_{L,v}(τ, ζ)` against the characteristics average over `H × H`, for a
/// `ρ_Λ*` form `F`.
pub fn downarrow_jacobi(
    f: &ModularForm,
    data: &IsotropicSubgroupData,
    v: &GrassmannianPoint,
    tau: Complex64,
    zeta: &DVector<Complex64>,
) -> Result<ArrowComparison> {
    if f.rep != Rep::RhoStar || f.lattice != data.parent {
        return Err(Error::SubgroupMismatch);
    }
    let vp = parent_point(data, v)?;
    let lhs = jacobi_from_mf(&down_form(f, data)?, &data.overlattice, v)?.eval(tau, zeta)?;
    let rhs = characteristics_average(f, data, &vp, tau, &to_parent(data, zeta)?)?;
    Ok(ArrowComparison { lhs, rhs })
}

/// Skew variant for a `ρ_Λ` form `G`: `Φ̃^{↓G}_{L,v}` against the average paired
/// with `ω_Λ(G(-τ̄))`.
pub fn downarrow_skew(
    g: &ModularForm,
    data: &IsotropicSubgroupData,
    v: &GrassmannianPoint,
    tau: Complex64,
    zeta: &DVector<Complex64>,
) -> Result<ArrowComparison> {
    if g.rep != Rep::Rho || g.lattice != data.parent {
        return Err(Error::SubgroupMismatch);
    }
    let vp = parent_point(data, v)?;
    let lhs = jacobi_from_mf(&tilde_mf(&down_form(g, data)?), &data.overlattice, v)?.eval(tau, zeta)?;
    let rhs = characteristics_average(&tilde_mf(g), data, &vp, tau, &to_parent(data, zeta)?)?;
    Ok(ArrowComparison { lhs, rhs })
}

/// `Φ^{↑F}_{Λ,v}` against `Φ^F_{L,v}` for a `ρ_L*` form `F`.
pub fn uparrow_jacobi(
    f: &ModularForm,
    data: &IsotropicSubgroupData,
    v: &GrassmannianPoint,
    tau: Complex64,
    zeta: &DVector<Complex64>,
) -> Result<ArrowComparison> {
    if f.rep != Rep::RhoStar || f.lattice != data.overlattice {
        return Err(Error::SubgroupMismatch);
    }
    let vp = parent_point(data, v)?;
    let lhs = jacobi_from_mf(&up_form(f, data)?, &data.parent, &vp)?.eval(tau, &to_parent(data, zeta)?)?;
    let rhs = jacobi_from_mf(f, &data.overlattice, v)?.eval(tau, zeta)?;
    Ok(ArrowComparison { lhs, rhs })
}

