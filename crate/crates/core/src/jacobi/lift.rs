use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::form::{tilde_mf, ModularForm, Rep};
use crate::error::{Error, Result};
use crate::lattice::{Lattice, PrimitiveSublattice};
use crate::metaplectic::{pairing, GroupRingVector};
use crate::realspace::{plus_iota, split_point, GrassmannianPoint};
use crate::theta::{jacobi_theta, ThetaRequest};

/// A scalar function on `H × L_C` attached to an index `(L, v)`.
pub trait JacobiForm: Send + Sync {
    fn point(&self) -> &GrassmannianPoint;

    fn lattice(&self) -> &Lattice {
        self.point().lattice()
    }

    /// Doubled weights `(2k, 2l)`.
    fn weight2(&self) -> (i32, i32);

    fn eval(&self, tau: Complex64, zeta: &DVector<Complex64>) -> Result<Complex64>;
}

pub type JacobiFormHandle = Arc<dyn JacobiForm>;

/// `Φ^F_{L,v}(τ, ζ) = ⟨Θ_L(τ, ζ; (α, β); v), F(τ)⟩`; no characteristics by default.
#[derive(Debug, Clone)]
pub struct ThetaLift {
    form: ModularForm,
    point: GrassmannianPoint,
    tolerance: f64,
    characteristics: Option<(DVector<f64>, DVector<f64>)>,
    hat: bool,
}

pub fn jacobi_from_mf(f: &ModularForm, l: &Lattice, v: &GrassmannianPoint) -> Result<ThetaLift> {
    if v.lattice() != l {
        return Err(Error::GrassmannianMismatch);
    }
    if f.rep != Rep::RhoStar || &f.lattice != l {
        return Err(Error::RepMismatch);
    }
    Ok(ThetaLift {
        form: f.clone(),
        point: v.clone(),
        tolerance: f.theta_tol,
        characteristics: None,
        hat: false,
    })
}

/// `Φ̃^G_{L,v}`: the lift of `G̃` for a `ρ_L` form `G`.
pub fn skew_jacobi_from_mf(g: &ModularForm, l: &Lattice, v: &GrassmannianPoint) -> Result<ThetaLift> {
    if g.rep != Rep::Rho || &g.lattice != l {
        return Err(Error::RepMismatch);
    }
    jacobi_from_mf(&tilde_mf(g), l, v)
}

impl ThetaLift {
    pub fn form(&self) -> &ModularForm {
        &self.form
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn with_characteristics(mut self, alpha: DVector<f64>, beta: DVector<f64>, hat: bool) -> Self {
        self.characteristics = Some((alpha, beta));
        self.hat = hat;
        self
    }

    pub fn characteristics(&self) -> Option<&(DVector<f64>, DVector<f64>)> {
        self.characteristics.as_ref()
    }

    pub fn theta_vector(&self, tau: Complex64, zeta: &DVector<Complex64>) -> Result<GroupRingVector> {
        let mut req = ThetaRequest::new(&self.point, tau)
            .zeta(zeta.clone())
            .tolerance(self.tolerance)
            .hat(self.hat);
        if let Some((a, b)) = &self.characteristics {
            req = req.characteristics(a.clone(), b.clone());
        }
        jacobi_theta(&req)
    }

    pub fn handle(&self) -> JacobiFormHandle {
        Arc::new(self.clone())
    }
}

impl JacobiForm for ThetaLift {
    fn point(&self) -> &GrassmannianPoint {
        &self.point
    }

    fn weight2(&self) -> (i32, i32) {
        let l = self.point.lattice();
        (self.form.weight2.0 + l.b_plus() as i32, self.form.weight2.1 + l.b_minus() as i32)
    }

    fn eval(&self, tau: Complex64, zeta: &DVector<Complex64>) -> Result<Complex64> {
        let th = self.theta_vector(tau, zeta)?;
        pairing(&th, &self.form.eval(tau)?)
    }
}

pub type JacobiFn = Arc<dyn Fn(Complex64, &DVector<Complex64>) -> Result<Complex64> + Send + Sync>;

/// A Jacobi-type function given by a closure; the weight is only bookkeeping.
#[derive(Clone)]
pub struct FnJacobi {
    point: GrassmannianPoint,
    weight2: (i32, i32),
    f: JacobiFn,
}

impl FnJacobi {
    pub fn new(point: &GrassmannianPoint, weight2: (i32, i32), f: JacobiFn) -> Self {
        Self { point: point.clone(), weight2, f }
    }

    pub fn handle(self) -> JacobiFormHandle {
        Arc::new(self)
    }
}

impl fmt::Debug for FnJacobi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnJacobi({:?}, {:?})", self.point.lattice(), self.weight2)
    }
}

impl JacobiForm for FnJacobi {
    fn point(&self) -> &GrassmannianPoint {
        &self.point
    }

    fn weight2(&self) -> (i32, i32) {
        self.weight2
    }

    fn eval(&self, tau: Complex64, zeta: &DVector<Complex64>) -> Result<Complex64> {
        (self.f)(tau, zeta)
    }
}

/// `τ ↦ (Im τ) Φ(τ, ζ)`.
pub fn times_imag_tau(phi: &JacobiFormHandle) -> JacobiFormHandle {
    let inner = phi.clone();
    let f: JacobiFn = Arc::new(move |tau, zeta| Ok(inner.eval(tau, zeta)? * tau.im));
    FnJacobi::new(phi.point(), phi.weight2(), f).handle()
}

/// `Res^L_M Φ(τ, ξ) = Φ(τ, ξ + 0)`.
#[derive(Clone)]
pub struct Restriction {
    inner: JacobiFormHandle,
    embed: DMatrix<Complex64>,
    u: GrassmannianPoint,
}

pub fn restrict(phi: &JacobiFormHandle, sub: &PrimitiveSublattice) -> Result<Restriction> {
    if phi.lattice() != &sub.ambient {
        return Err(Error::NotPrimitive);
    }
    let (u, _) = split_point(sub, phi.point())?;
    Ok(Restriction {
        inner: phi.clone(),
        embed: sub.basis.map(|x| Complex64::new(x as f64, 0.0)),
        u,
    })
}

impl Restriction {
    pub fn handle(self) -> JacobiFormHandle {
        Arc::new(self)
    }
}

impl JacobiForm for Restriction {
    fn point(&self) -> &GrassmannianPoint {
        &self.u
    }

    fn weight2(&self) -> (i32, i32) {
        self.inner.weight2()
    }

    fn eval(&self, tau: Complex64, xi: &DVector<Complex64>) -> Result<Complex64> {
        if xi.len() != self.embed.ncols() {
            return Err(Error::WrongDimension("restriction argument".into()));
        }
        self.inner.eval(tau, &(&self.embed * xi))
    }
}

/// `(ΦΨ)(τ, ζ) = Φ(τ, ζ) Ψ(τ, ι_C ζ)` over `(L +_ι K, v +_ι w)`.
#[derive(Clone)]
pub struct ProductForm {
    left: JacobiFormHandle,
    right: JacobiFormHandle,
    iota: DMatrix<Complex64>,
    point: GrassmannianPoint,
}

pub fn product_pair(phi: &JacobiFormHandle, psi: &JacobiFormHandle, iota: &DMatrix<i64>) -> Result<ProductForm> {
    let (_, point) = plus_iota(phi.lattice(), psi.lattice(), iota, phi.point(), psi.point())?;
    Ok(ProductForm {
        left: phi.clone(),
        right: psi.clone(),
        iota: iota.map(|x| Complex64::new(x as f64, 0.0)),
        point,
    })
}

/// Module action of a scalar form `h` (a rank-0 Jacobi form): `(τ, ζ) ↦ h(τ) Φ(τ, ζ)`.
pub fn scalar_multiple(phi: &JacobiFormHandle, h: &ModularForm) -> Result<JacobiFormHandle> {
    if h.lattice.rank() != 0 {
        return Err(Error::RepMismatch);
    }
    let inner = phi.clone();
    let hh = h.clone();
    let f: JacobiFn = Arc::new(move |tau, zeta| Ok(inner.eval(tau, zeta)? * hh.eval(tau)?.coeffs[0]));
    let w = phi.weight2();
    Ok(FnJacobi::new(phi.point(), (w.0 + h.weight2.0, w.1 + h.weight2.1), f).handle())
}

impl ProductForm {
    pub fn handle(self) -> JacobiFormHandle {
        Arc::new(self)
    }
}

impl JacobiForm for ProductForm {
    fn point(&self) -> &GrassmannianPoint {
        &self.point
    }

    fn weight2(&self) -> (i32, i32) {
        let (a, b) = (self.left.weight2(), self.right.weight2());
        (a.0 + b.0, a.1 + b.1)
    }

    fn eval(&self, tau: Complex64, zeta: &DVector<Complex64>) -> Result<Complex64> {
        Ok(self.left.eval(tau, zeta)? * self.right.eval(tau, &(&self.iota * zeta))?)
    }
}
