use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;

use super::form::{Evaluator, FormKind, ModularForm, Rep};
use crate::error::{Error, Result};
use crate::lattice::PrimitiveSublattice;
use crate::metaplectic::GroupRingVector;
use crate::realspace::GrassmannianPoint;
use crate::theta::theta_lm;

fn check(f: &ModularForm, sub: &PrimitiveSublattice, u_perp: &GrassmannianPoint) -> Result<()> {
    if f.rep != Rep::RhoStar || f.lattice != sub.ambient {
        return Err(Error::RepMismatch);
    }
    if u_perp.lattice() != &sub.complement {
        return Err(Error::GrassmannianMismatch);
    }
    Ok(())
}

/// `⟨Θ_{L,M}(τ, η; u^⊥), F(τ)⟩_L`, a vector over `C[D_{M(-1)}]`.
pub fn theta_contraction(
    f: &ModularForm,
    sub: &PrimitiveSublattice,
    u_perp: &GrassmannianPoint,
    tau: Complex64,
    eta: &DVector<Complex64>,
) -> Result<GroupRingVector> {
    check(f, sub, u_perp)?;
    let th = theta_lm(sub, u_perp, tau, eta, f.theta_tol)?;
    let fv = f.eval(tau)?;
    let mut out = GroupRingVector::zeros(th.ncols(), true);
    for delta in 0..th.ncols() {
        out.coeffs[delta] = (0..th.nrows()).map(|g| th[(g, delta)] * fv.coeffs[g]).sum();
    }
    Ok(out)
}

/// `Θ_{(L,M)}(F; u^⊥)` as a `ρ_M*` form of weight `(k + (b+ - c+)/2, l + (b- - c-)/2)`.
pub fn contraction_form(f: &ModularForm, sub: &PrimitiveSublattice, u_perp: &GrassmannianPoint) -> Result<ModularForm> {
    check(f, sub, u_perp)?;
    let (ff, s, u) = (f.clone(), sub.clone(), u_perp.clone());
    let eta = DVector::zeros(sub.complement.rank());
    let ev: Evaluator = Arc::new(move |tau| Ok(theta_contraction(&ff, &s, &u, tau, &eta)?.coeffs));
    let (l, m) = (&sub.ambient, &sub.lattice);
    Ok(ModularForm {
        kind: FormKind::Evaluator(ev),
        weight2: (
            f.weight2.0 + (l.b_plus() - m.b_plus()) as i32,
            f.weight2.1 + (l.b_minus() - m.b_minus()) as i32,
        ),
        rep: Rep::RhoStar,
        level: f.level,
        lattice: m.clone(),
        theta_tol: f.theta_tol,
    })
}
