//! Vector valued modular forms as inputs of the theta correspondence.

use std::fmt;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{IsotropicSubgroupData, Lattice, Q};
use crate::metaplectic::{down_arrow, omega, up_arrow, GroupRingVector, MetaplecticElement, WeilRepresentation};
use crate::realspace::GrassmannianPoint;
use crate::theta::{e, jacobi_theta, ThetaRequest};
use crate::tolerances::THETA_TOL;

/// Which representation the values transform under, relative to the form's lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rep {
    Rho,
    RhoStar,
}

impl Rep {
    pub fn is_dual(self) -> bool {
        self == Rep::RhoStar
    }

    pub fn flip(self) -> Self {
        match self {
            Rep::Rho => Rep::RhoStar,
            Rep::RhoStar => Rep::Rho,
        }
    }
}

/// One term `coeff · y^ypow · q^exponent` on the coset `coset`.
#[derive(Debug, Clone, PartialEq)]
pub struct QTerm {
    pub coset: usize,
    pub exponent: Q,
    pub coeff: Complex64,
    pub ypow: i32,
}

pub type Evaluator = Arc<dyn Fn(Complex64) -> Result<Vec<Complex64>> + Send + Sync>;

#[derive(Clone)]
pub enum FormKind {
    QExpansion(Vec<QTerm>),
    /// Siegel theta `Θ_P(τ; w)` of the point's lattice.
    BuiltinTheta(GrassmannianPoint),
    Evaluator(Evaluator),
}

impl fmt::Debug for FormKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormKind::QExpansion(t) => write!(f, "QExpansion({} terms)", t.len()),
            FormKind::BuiltinTheta(p) => write!(f, "BuiltinTheta({:?})", p.lattice()),
            FormKind::Evaluator(_) => write!(f, "Evaluator"),
        }
    }
}

/// A function `F: H → C[D_L]` (rep `ρ_L`) or `C[D_L(-1)]` (rep `ρ_L*`).
#[derive(Debug, Clone)]
pub struct ModularForm {
    pub kind: FormKind,
    /// Doubled weights `(2k, 2l)`.
    pub weight2: (i32, i32),
    pub rep: Rep,
    pub level: u32,
    pub lattice: Lattice,
    pub theta_tol: f64,
}

impl ModularForm {
    pub fn builtin_theta(w: &GrassmannianPoint) -> Self {
        let l = w.lattice().clone();
        Self {
            kind: FormKind::BuiltinTheta(w.clone()),
            weight2: (l.b_plus() as i32, l.b_minus() as i32),
            rep: Rep::Rho,
            level: 1,
            lattice: l,
            theta_tol: THETA_TOL,
        }
    }

    /// `Θ_{L(-1)}(τ; v)` read as a `ρ_L*` form for `L`.
    pub fn dual_theta(v: &GrassmannianPoint) -> Self {
        Self::builtin_theta(&v.negated())
            .as_dual_of(v.lattice())
            .expect("L(-1)(-1) = L")
    }

    pub fn q_expansion(lattice: &Lattice, rep: Rep, weight2: (i32, i32), level: u32, terms: Vec<QTerm>) -> Result<Self> {
        let n = lattice.discriminant().order();
        if terms.iter().any(|t| t.coset >= n) {
            return Err(Error::WrongDimension("coset index out of range".into()));
        }
        Ok(Self {
            kind: FormKind::QExpansion(terms),
            weight2,
            rep,
            level,
            lattice: lattice.clone(),
            theta_tol: THETA_TOL,
        })
    }

    pub fn evaluator(lattice: &Lattice, rep: Rep, weight2: (i32, i32), f: Evaluator) -> Self {
        Self {
            kind: FormKind::Evaluator(f),
            weight2,
            rep,
            level: 1,
            lattice: lattice.clone(),
            theta_tol: THETA_TOL,
        }
    }

    pub fn with_theta_tol(mut self, tol: f64) -> Self {
        self.theta_tol = tol;
        self
    }

    /// Reinterpret a `ρ_P` form as a `ρ_L*` form where `P = L(-1)`.
    pub fn as_dual_of(&self, l: &Lattice) -> Result<Self> {
        if self.rep != Rep::Rho || self.lattice.gram() != &(-l.gram()) {
            return Err(Error::RepMismatch);
        }
        Ok(Self { rep: Rep::RhoStar, lattice: l.clone(), ..self.clone() })
    }

    pub fn dim(&self) -> usize {
        self.lattice.discriminant().order()
    }

    pub fn eval(&self, tau: Complex64) -> Result<GroupRingVector> {
        if !(tau.im > 0.0) {
            return Err(Error::NotInUpperHalfPlane);
        }
        let dual = self.rep.is_dual();
        let coeffs = match &self.kind {
            FormKind::QExpansion(terms) => {
                let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
                for t in terms {
                    let ex = crate::lattice::exact::to_f64(&t.exponent);
                    out[t.coset] += t.coeff * tau.im.powi(t.ypow) * e(tau * ex);
                }
                out
            }
            FormKind::BuiltinTheta(w) => {
                let req = ThetaRequest::new(w, tau).tolerance(self.theta_tol);
                jacobi_theta(&req)?.coeffs
            }
            FormKind::Evaluator(f) => {
                let v = f(tau)?;
                if v.len() != self.dim() {
                    return Err(Error::WrongDimension("evaluator output length".into()));
                }
                v
            }
        };
        Ok(GroupRingVector::new(coeffs, dual))
    }

    /// Whether every term is holomorphic (only meaningful for q-expansions).
    pub fn is_holomorphic_expansion(&self) -> Option<bool> {
        match &self.kind {
            FormKind::QExpansion(t) => Some(t.iter().all(|x| x.ypow == 0)),
            _ => None,
        }
    }

    /// `τ ↦ (Im τ) F(τ)`; not modular, used for detection checks.
    pub fn times_imag_tau(&self) -> Self {
        match &self.kind {
            FormKind::QExpansion(terms) => {
                let terms = terms.iter().map(|t| QTerm { ypow: t.ypow + 1, ..t.clone() }).collect();
                Self { kind: FormKind::QExpansion(terms), ..self.clone() }
            }
            _ => {
                let inner = self.clone();
                let f: Evaluator = Arc::new(move |tau: Complex64| {
                    Ok(inner.eval(tau)?.coeffs.into_iter().map(|c| c * tau.im).collect())
                });
                Self { kind: FormKind::Evaluator(f), ..self.clone() }
            }
        }
    }

    /// Residual of `F(Aτ) = φ^{2k} φ̄^{2l} ρ(A, φ) F(τ)`, relative to `max(1, |RHS|)`.
    pub fn modularity_residual(&self, weil: &WeilRepresentation, g: &MetaplecticElement, tau: Complex64) -> Result<f64> {
        let lhs = self.eval(g.act(tau))?;
        let rhs0 = self.eval(tau)?;
        let phi = g.phi(tau);
        let pre = phi.powi(self.weight2.0) * phi.conj().powi(self.weight2.1);
        let rhs = weil.apply(g, &rhs0).scale(pre);
        Ok(lhs.max_abs_diff(&rhs) / rhs.max_abs().max(1.0))
    }
}

/// `G̃(τ) = ω_L(G(-τ̄))`: swaps `ρ_L` and `ρ_L*` and the two weights.
pub fn tilde_mf(g: &ModularForm) -> ModularForm {
    let inner = g.clone();
    let f: Evaluator = Arc::new(move |tau: Complex64| Ok(omega(&inner.eval(-tau.conj())?).coeffs));
    ModularForm {
        kind: FormKind::Evaluator(f),
        weight2: (g.weight2.1, g.weight2.0),
        rep: g.rep.flip(),
        level: g.level,
        lattice: g.lattice.clone(),
        theta_tol: g.theta_tol,
    }
}

/// `↓F` for a form on `Λ`; lands on `L` with the same representation type.
pub fn down_form(f: &ModularForm, data: &IsotropicSubgroupData) -> Result<ModularForm> {
    if f.lattice != data.parent {
        return Err(Error::SubgroupMismatch);
    }
    let inner = f.clone();
    let d = data.clone();
    let ev: Evaluator = Arc::new(move |tau: Complex64| Ok(down_arrow(&d, &inner.eval(tau)?)?.coeffs));
    Ok(ModularForm { kind: FormKind::Evaluator(ev), lattice: data.overlattice.clone(), ..f.clone() })
}

/// `↑F` for a form on `L`; lands on `Λ`.
pub fn up_form(f: &ModularForm, data: &IsotropicSubgroupData) -> Result<ModularForm> {
    if f.lattice != data.overlattice {
        return Err(Error::SubgroupMismatch);
    }
    let inner = f.clone();
    let d = data.clone();
    let ev: Evaluator = Arc::new(move |tau: Complex64| Ok(up_arrow(&d, &inner.eval(tau)?)?.coeffs));
    Ok(ModularForm { kind: FormKind::Evaluator(ev), lattice: data.parent.clone(), ..f.clone() })
}

/// Wire format of a q-expansion.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QExpansionJson {
    pub den: u32,
    pub weight: [i32; 2],
    pub rep: Rep,
    pub coeffs: Vec<QCoeffJson>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QCoeffJson {
    pub coset: usize,
    pub num: i64,
    pub exp_den: i64,
    pub re: f64,
    pub im: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub ypow: i32,
}

fn is_zero(x: &i32) -> bool {
    *x == 0
}

impl QExpansionJson {
    pub fn into_form(self, lattice: &Lattice) -> Result<ModularForm> {
        if self.den == 0 {
            return Err(Error::BadConfig("den must be positive".into()));
        }
        let mut terms = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if c.exp_den <= 0 {
                return Err(Error::BadConfig("exp_den must be positive".into()));
            }
            terms.push(QTerm {
                coset: c.coset,
                exponent: Q::new(c.num as i128, c.exp_den as i128),
                coeff: Complex64::new(c.re, c.im),
                ypow: c.ypow,
            });
        }
        ModularForm::q_expansion(lattice, self.rep, (self.weight[0], self.weight[1]), self.den, terms)
    }
}

/// Truncated q-expansion of the Siegel theta of a positive definite lattice,
/// `Σ_{λ ∈ L*, λ²/2 ≤ bound} q^{λ²/2} e_{λ+L}`.
pub fn theta_q_expansion(l: &Lattice, bound: i64) -> Result<ModularForm> {
    if l.b_minus() != 0 {
        return Err(Error::UnsupportedInput);
    }
    let v = GrassmannianPoint::standard(l);
    let r = ((2 * bound) as f64).sqrt() + 1e-9;
    let pts = crate::theta::enumerate_shifted(&v, &DVector::zeros(l.rank()), r, 1 << 24)?;
    let d = l.discriminant();
    let mut acc: std::collections::BTreeMap<(usize, Q), f64> = Default::default();
    let level = d
        .q_values()
        .iter()
        .map(|x| *x.denom() as u32 * 2)
        .fold(1u32, num_integer::lcm);
    for (gamma, lam) in pts {
        let x: Vec<Q> = lam
            .iter()
            .zip(d.rep_f64(gamma).iter())
            .zip(d.rep(gamma))
            .map(|((a, b), r)| Q::from_integer((a - b).round() as i128) + *r)
            .collect();
        let n = l.pair_q(&x, &x) / Q::from_integer(2);
        if n <= Q::from_integer(bound as i128) {
            *acc.entry((gamma, n)).or_insert(0.0) += 1.0;
        }
    }
    let terms = acc
        .into_iter()
        .map(|((coset, exponent), c)| QTerm { coset, exponent, coeff: Complex64::new(c, 0.0), ypow: 0 })
        .collect();
    ModularForm::q_expansion(l, Rep::Rho, (l.b_plus() as i32, 0), level, terms)
}
