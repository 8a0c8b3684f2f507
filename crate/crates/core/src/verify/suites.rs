use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde_json::json;

use super::sampling::{c_json, cvec_json, vec_json, word_string, Sampler};
use super::{CheckRecord, VerifyConfig};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::jacobi::product::{jacobi_series, product_decompose};
use crate::jacobi::QSeries;
use crate::lattice::exact::Q;
use crate::jacobi::{
    downarrow_jacobi, downarrow_skew, functional_residual, jacobi_from_mf, product_pair, restrict,
    contraction_form, theta_contraction, uparrow_jacobi, Functional, JacobiForm, ModularForm,
};
use crate::lattice::{sublattice_embed, Lattice, PrimitiveSublattice};
use crate::metaplectic::{down_arrow, fold, up_arrow, GroupRingVector, MetaplecticElement, WeilRepresentation};
use crate::realspace::{in_discriminant_kernel, join_point, GrassmannianPoint};
use crate::theta::{e, heat_residual_termwise, jacobi_theta, theta_lm, HeatOperator, ThetaRequest};

type Records = Result<Vec<CheckRecord>>;

fn cplx(x: &DVector<f64>) -> DVector<Complex64> {
    x.map(|a| Complex64::new(a, 0.0))
}

fn mat_err(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn rel(lhs: &GroupRingVector, rhs: &GroupRingVector) -> f64 {
    lhs.max_abs_diff(rhs) / rhs.max_abs().max(1.0)
}

fn theta(v: &GrassmannianPoint, tau: Complex64, zeta: &DVector<Complex64>, tol: f64) -> Result<GroupRingVector> {
    jacobi_theta(&ThetaRequest::new(v, tau).zeta(zeta.clone()).tolerance(tol))
}

#[allow(clippy::too_many_arguments)]
fn theta_char(
    v: &GrassmannianPoint,
    tau: Complex64,
    zeta: &DVector<Complex64>,
    alpha: &DVector<f64>,
    beta: &DVector<f64>,
    hat: bool,
    tol: f64,
) -> Result<GroupRingVector> {
    jacobi_theta(
        &ThetaRequest::new(v, tau)
            .zeta(zeta.clone())
            .characteristics(alpha.clone(), beta.clone())
            .hat(hat)
            .tolerance(tol),
    )
}

fn pair_c(v: &GrassmannianPoint, a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    let g = v.gram().map(|x| Complex64::new(x, 0.0));
    a.dot(&(g * b))
}

/// `(ζ_{v+}/j + ζ_{v-}/j̄, φ^{b+} φ̄^{b-} e(c ζ²_{v+}/2j + c ζ²_{v-}/2j̄))`.
fn modular_data(
    v: &GrassmannianPoint,
    g: &MetaplecticElement,
    tau: Complex64,
    zeta: &DVector<Complex64>,
) -> (DVector<Complex64>, Complex64) {
    let l = v.lattice();
    let j = g.j(tau);
    let (zp, zm) = v.project_c(zeta);
    let arg = zp.map(|x| x / j) + zm.map(|x| x / j.conj());
    let c = g.c as f64;
    let phi = g.phi(tau);
    let pre = phi.powi(l.b_plus() as i32)
        * phi.conj().powi(l.b_minus() as i32)
        * e(pair_c(v, &zp, &zp) * c / (j * 2.0) + pair_c(v, &zm, &zm) * c / (j.conj() * 2.0));
    (arg, pre)
}

pub fn weil(cfg: &VerifyConfig, s: &mut Sampler) -> Records {
    let th = cfg.threshold();
    let w = WeilRepresentation::new(&cfg.lattice);
    let n = w.dim();
    let id = DMatrix::<Complex64>::identity(n, n);
    let mut out = Vec::new();
    use MetaplecticElement as M;
    for dual in [false, true] {
        let m = |g: &M| w.matrix(g, dual).as_ref().clone();
        let (sm, tm, zm) = (m(&M::S), m(&M::T), m(&M::Z));
        let p = json!({ "dual": dual });
        out.push(CheckRecord::new("weil/S^2=Z", p.clone(), mat_err(&(&sm * &sm), &zm), th));
        let st = &sm * &tm;
        out.push(CheckRecord::new("weil/(ST)^3=Z", p.clone(), mat_err(&(&st * &st * &st), &zm), th));
        let z2 = &zm * &zm;
        out.push(CheckRecord::new("weil/Z^4=1", p.clone(), mat_err(&(&z2 * &z2), &id), th));
        for (name, u) in [("weil/unitary-S", &sm), ("weil/unitary-T", &tm)] {
            out.push(CheckRecord::new(name, p.clone(), mat_err(&(u * u.adjoint()), &id), th));
        }
    }
    for _ in 0..cfg.samples {
        let (a, b) = (s.word(cfg.word_max), s.word(cfg.word_max));
        let (ga, gb) = (fold(&a), fold(&b));
        for dual in [false, true] {
            let lhs = w.matrix(&ga, dual).as_ref() * w.matrix(&gb, dual).as_ref();
            let rhs = w.matrix(&(ga * gb), dual);
            let p = json!({ "g": word_string(&a), "h": word_string(&b), "dual": dual });
            out.push(CheckRecord::new("weil/homomorphism", p, mat_err(&lhs, &rhs), th));
        }
    }
    Ok(out)
}

pub fn periodicity(cfg: &VerifyConfig, s: &mut Sampler) -> Records {
    let v = cfg.point();
    let n = v.rank();
    let mut out = Vec::new();
    for _ in 0..cfg.samples {
        let (tau, zeta) = (s.tau(), s.zeta(n));
        let (sigma, nu) = (s.int_vec(n, 2), s.int_vec(n, 2));
        let (sp, sm) = v.project(&sigma);
        let shifted = &zeta + cplx(&sp) * tau + cplx(&sm) * tau.conj() + cplx(&nu);
        let lhs = theta(&v, tau, &shifted, cfg.theta_tolerance)?;
        let ex = -tau * pair_c(&v, &cplx(&sp), &cplx(&sp)) * 0.5
            - tau.conj() * pair_c(&v, &cplx(&sm), &cplx(&sm)) * 0.5
            - pair_c(&v, &cplx(&sigma), &zeta);
        let rhs = theta(&v, tau, &zeta, cfg.theta_tolerance)?.scale(e(ex));
        let p = json!({ "tau": c_json(tau), "zeta": cvec_json(&zeta), "sigma": vec_json(&sigma), "nu": vec_json(&nu) });
        out.push(CheckRecord::new("periodicity/theta", p, rel(&lhs, &rhs), cfg.threshold()));
    }
    Ok(out)
}

pub fn modularity(cfg: &VerifyConfig, s: &mut Sampler) -> Records {
    let v = cfg.point();
    let w = WeilRepresentation::new(&cfg.lattice);
    let mut out = Vec::new();
    for _ in 0..cfg.samples {
        let word = s.word(cfg.word_max);
        let g = fold(&word);
        for _ in 0..5 {
            let (tau, zeta) = (s.tau(), s.zeta(v.rank()));
            let (arg, pre) = modular_data(&v, &g, tau, &zeta);
            let lhs = theta(&v, g.act(tau), &arg, cfg.theta_tolerance)?;
            let rhs = w.apply(&g, &theta(&v, tau, &zeta, cfg.theta_tolerance)?).scale(pre);
            let p = json!({ "word": word_string(&word), "tau": c_json(tau), "zeta": cvec_json(&zeta) });
            out.push(CheckRecord::new("modularity/theta", p, rel(&lhs, &rhs), cfg.threshold()));
        }
    }
    Ok(out)
}

/// Second-order window for the `h → h/2` ratio of heat residuals.
pub const RATIO_WINDOW: (f64, f64) = (3.5, 4.5);

pub fn heat(cfg: &VerifyConfig, s: &mut Sampler) -> Records {
    let v = cfg.point();
    let h = cfg.fd_step;
    let mut out = Vec::new();
    for _ in 0..cfg.samples {
        let (tau, zeta) = (s.tau(), s.zeta(v.rank()));
        let req = ThetaRequest::new(&v, tau).zeta(zeta.clone()).tolerance(cfg.theta_tolerance);
        for op in [HeatOperator::Pseudo, HeatOperator::Skew] {
            let tag = match op {
                HeatOperator::Pseudo => "pseudo",
                HeatOperator::Skew => "skew",
            };
            let r1 = heat_residual_termwise(&req, op, h)?;
            let r2 = heat_residual_termwise(&req, op, h / 2.0)?;
            let ratio = r1 / r2;
            let black = crate::jacobi::heat_residual_fd(
                |t, z| Ok(theta(&v, t, z, cfg.theta_tolerance)?.coeffs),
                &v,
                op,
                tau,
                &zeta,
                h,
            )?;
            let p = json!({ "tau": c_json(tau), "zeta": cvec_json(&zeta), "h": h });
            out.push(CheckRecord::new(&format!("heat/{tag}"), p.clone(), r1, cfg.threshold()));
            out.push(CheckRecord::new(&format!("heat/{tag}-direct"), p.clone(), black, cfg.threshold()));
            let mid = 0.5 * (RATIO_WINDOW.0 + RATIO_WINDOW.1);
            let half = 0.5 * (RATIO_WINDOW.1 - RATIO_WINDOW.0);
            let mut pr = p;
            pr["ratio"] = json!(ratio);
            out.push(CheckRecord::new(&format!("heat/{tag}-ratio"), pr, (ratio - mid).abs(), half));
        }
    }
    Ok(out)
}

pub fn roundtrip(cfg: &VerifyConfig, s: &mut Sampler) -> Records {
    let v = cfg.point();
    let l = &cfg.lattice;
    let f = ModularForm::dual_theta(&v).with_theta_tol(cfg.theta_tolerance);
    let lift = jacobi_from_mf(&f, l, &v)?;
    let mut taus = vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 2.0), Complex64::new(1.0 / 3.0, 1.0)];
    taus.extend((3..cfg.samples).map(|_| s.tau()));
    let mut out = Vec::new();
    for tau in taus {
        let inv = crate::jacobi::fourier_invert(&lift, tau, &[])?;
        let direct = f.eval(tau)?;
        let p = json!({ "tau": c_json(tau), "grid": inv.grid });
        out.push(CheckRecord::new("roundtrip/form", p.clone(), rel(&inv.form, &direct), cfg.threshold()));
        out.push(CheckRecord::new("roundtrip/coset-independence", p, inv.coset_spread, cfg.threshold()));
    }
    Ok(out)
}

pub fn characteristics(cfg: &VerifyConfig, s: &mut Sampler) -> Records {
    let v = cfg.point();
    let n = v.rank();
    let l = v.lattice();
    let d = l.discriminant();
    let w = WeilRepresentation::new(l);
    let tol = cfg.theta_tolerance;
    let th = cfg.threshold();
    let mut out = Vec::new();
    for _ in 0..cfg.samples {
        let (tau, zeta) = (s.tau(), s.zeta(n));
        let (alpha, beta) = (s.real_vec(n, 1.0), s.real_vec(n, 1.0));
        let base = json!({ "tau": c_json(tau), "zeta": cvec_json(&zeta), "alpha": vec_json(&alpha), "beta": vec_json(&beta) });
        let hat0 = theta_char(&v, tau, &zeta, &alpha, &beta, true, tol)?;

        // parity, with the component flip γ ↦ -γ
        let neg = theta_char(&v, tau, &(-&zeta), &(-&alpha), &(-&beta), true, tol)?;
        let flipped = GroupRingVector::new((0..d.order()).map(|g| neg.coeffs[d.neg(g)]).collect(), false);
        out.push(CheckRecord::new("characteristics/parity", base.clone(), rel(&hat0, &flipped), th));

        // shifting the characteristics by lattice vectors
        let (sigma, nu) = (s.int_vec(n, 2), s.int_vec(n, 2));
        let lhs = theta_char(&v, tau, &zeta, &(&alpha + &nu), &(&beta + &sigma), true, tol)?;
        let rhs = hat0.scale(e(Complex64::new(-l.pair_f64(&beta, &nu), 0.0)));
        let mut p = base.clone();
        p["sigma"] = vec_json(&sigma);
        p["nu"] = vec_json(&nu);
        out.push(CheckRecord::new("characteristics/shift", p.clone(), rel(&lhs, &rhs), th));

        // twisted translation law (unhatted)
        let (sp, sm) = v.project(&sigma);
        let moved = &zeta + cplx(&sp) * tau + cplx(&sm) * tau.conj() + cplx(&nu);
        let lhs = theta_char(&v, tau, &moved, &alpha, &beta, false, tol)?;
        let ex = -tau * pair_c(&v, &cplx(&sp), &cplx(&sp)) * 0.5
            - tau.conj() * pair_c(&v, &cplx(&sm), &cplx(&sm)) * 0.5
            - pair_c(&v, &cplx(&sigma), &zeta)
            + l.pair_f64(&nu, &beta)
            + l.pair_f64(&sigma, &alpha);
        let rhs = theta_char(&v, tau, &zeta, &alpha, &beta, false, tol)?.scale(e(ex));
        out.push(CheckRecord::new("characteristics/translation", p, rel(&lhs, &rhs), th));

        // change of variable with real σ, ν
        let (sigma, nu) = (s.real_vec(n, 1.0), s.real_vec(n, 1.0));
        let (sp, sm) = v.project(&sigma);
        let lhs = theta_char(&v, tau, &zeta, &(&alpha + &nu), &(&beta + &sigma), true, tol)?;
        let moved = &zeta + cplx(&sp) * tau + cplx(&sm) * tau.conj() - cplx(&nu);
        let ex = tau * pair_c(&v, &cplx(&sp), &cplx(&sp)) * 0.5
            + tau.conj() * pair_c(&v, &cplx(&sm), &cplx(&sm)) * 0.5
            + pair_c(&v, &cplx(&sigma), &(&zeta - cplx(&alpha) - cplx(&nu)));
        let rhs = theta_char(&v, tau, &moved, &alpha, &beta, true, tol)?.scale(e(ex));
        let mut p = base.clone();
        p["sigma"] = vec_json(&sigma);
        p["nu"] = vec_json(&nu);
        out.push(CheckRecord::new("characteristics/variable-change", p, rel(&lhs, &rhs), th));

        // metaplectic law with (α, β) transformed as a column vector
        let word = s.word(cfg.word_max.min(4));
        let g = fold(&word);
        let [[a, b], [c, dd]] = g.matrix();
        let alpha2 = &alpha * a as f64 + &beta * b as f64;
        let beta2 = &alpha * c as f64 + &beta * dd as f64;
        let (arg, pre) = modular_data(&v, &g, tau, &zeta);
        let lhs = theta_char(&v, g.act(tau), &arg, &alpha2, &beta2, false, tol)?;
        let rhs = w.apply(&g, &theta_char(&v, tau, &zeta, &alpha, &beta, false, tol)?).scale(pre);
        let mut p = base;
        p["word"] = json!(word_string(&word));
        out.push(CheckRecord::new("characteristics/modularity", p, rel(&lhs, &rhs), th));
    }
    Ok(out)
}

fn perturbed(v: &GrassmannianPoint, s: &mut Sampler) -> GrassmannianPoint {
    let b = v.v_plus_basis();
    let shift = DMatrix::from_fn(b.nrows(), b.ncols(), |_, _| 0.3 * (2.0 * s.unit() - 1.0));
    GrassmannianPoint::new(v.lattice(), b + shift).unwrap_or_else(|_| v.clone())
}

pub fn arrows(cfg: &VerifyConfig, s: &mut Sampler) -> Records {
    let l = &cfg.lattice;
    let n = l.rank();
    let v = cfg.point();
    let b = DMatrix::<i64>::identity(n, n) * 2;
    let (lam, data) = sublattice_embed(l, &b)?;
    let v_lam = v.rebase(&lam, &b)?;
    let f_lam = ModularForm::dual_theta(&v_lam).with_theta_tol(cfg.theta_tolerance);
    let f_l = ModularForm::dual_theta(&v).with_theta_tol(cfg.theta_tolerance);
    // a second point, so the skew check does not collapse onto the plain one
    let w_lam = perturbed(&v_lam, s);
    let g_lam = ModularForm::builtin_theta(&w_lam).with_theta_tol(cfg.theta_tolerance);
    let th = cfg.threshold();
    let mut out = Vec::new();
    for _ in 0..cfg.samples {
        let (tau, zeta) = (s.tau(), s.zeta(n));
        let p = json!({ "tau": c_json(tau), "zeta": cvec_json(&zeta), "h_order": data.h_order() });
        let up = uparrow_jacobi(&f_l, &data, &v, tau, &zeta)?;
        out.push(CheckRecord::new("arrows/up", p.clone(), up.residual(), th));
        let down = downarrow_jacobi(&f_lam, &data, &v, tau, &zeta)?;
        out.push(CheckRecord::new("arrows/down", p.clone(), down.residual(), th));
        let skew = downarrow_skew(&g_lam, &data, &v, tau, &zeta)?;
        out.push(CheckRecord::new("arrows/down-skew", p, skew.residual(), th));
    }
    // ↓∘↑ = |H| id, entry by entry on basis vectors
    let dl = l.discriminant().order();
    let mut worst = 0.0f64;
    for gamma in 0..dl {
        for dual in [false, true] {
            let x = GroupRingVector::basis(dl, gamma, dual);
            let y = down_arrow(&data, &up_arrow(&data, &x)?)?;
            worst = worst.max(y.max_abs_diff(&x.scale(Complex64::new(data.h_order() as f64, 0.0))));
        }
    }
    out.push(CheckRecord::new("arrows/down-up", json!({ "h_order": data.h_order() }), worst, 0.0));
    Ok(out)
}

/// `M = Zx` for the first primitive `x` with `x² ≠ 0` in a small box, and
/// `v = u ⊕ u^⊥` built from the standard points of both pieces.
fn rank_one_split(l: &Lattice) -> Result<(PrimitiveSublattice, GrassmannianPoint, GrassmannianPoint, GrassmannianPoint)> {
    let n = l.rank();
    let g = l.gram();
    let mut candidates: Vec<Vec<i64>> = vec![vec![]];
    for _ in 0..n {
        candidates = candidates
            .into_iter()
            .flat_map(|c| (-2..=2).map(move |x| [c.clone(), vec![x]].concat()))
            .collect();
    }
    candidates.sort_by_key(|c| (c.iter().map(|x| x.abs()).sum::<i64>(), c.iter().rev().map(|x| -x).collect::<Vec<_>>()));
    let x = candidates
        .into_iter()
        .find(|c| {
            let x = DVector::from_vec(c.clone());
            c.iter().fold(0, |a, &b| num_integer::gcd(a, b)) == 1 && (x.transpose() * g * &x)[(0, 0)] != 0
        })
        .ok_or_else(|| Error::BadConfig("contraction suite needs a non-isotropic vector".into()))?;
    let sub = PrimitiveSublattice::new(l, DMatrix::from_vec(n, 1, x))?;
    let u = GrassmannianPoint::standard(&sub.lattice);
    let u_perp = GrassmannianPoint::standard(&sub.complement);
    let v = join_point(&sub, &u, &u_perp)?;
    Ok((sub, u, u_perp, v))
}

pub fn contraction(cfg: &VerifyConfig, s: &mut Sampler) -> Records {
    let l = &cfg.lattice;
    let n = l.rank();
    let (sub, u, u_perp, v) = rank_one_split(l)?;
    let tol = cfg.theta_tolerance;
    let th = cfg.threshold();
    let f = ModularForm::dual_theta(&v).with_theta_tol(tol);
    let phi = jacobi_from_mf(&f, l, &v)?.handle();
    let res = restrict(&phi, &sub)?;
    let cf = contraction_form(&f, &sub, &u_perp)?;
    let psi = jacobi_from_mf(&cf, &sub.lattice, &u)?;
    let joint = sub.joint_basis().map(|x| Complex64::new(x as f64, 0.0));
    let joint_inv = joint.clone().try_inverse().ok_or(Error::Degenerate)?;
    let c = sub.lattice.rank();
    let mut out = Vec::new();

    let expect_w = (
        f.weight2.0 + (l.b_plus() - sub.lattice.b_plus()) as i32,
        f.weight2.1 + (l.b_minus() - sub.lattice.b_minus()) as i32,
    );
    let werr = if cf.weight2 == expect_w { 0.0 } else { 1.0 };
    out.push(CheckRecord::new("contraction/weight", json!({ "weight2": [cf.weight2.0, cf.weight2.1] }), werr, 0.0));

    for _ in 0..cfg.samples {
        let tau = s.tau();
        let xi = s.zeta(c);
        let p = json!({ "tau": c_json(tau), "xi": cvec_json(&xi) });
        let a = res.eval(tau, &xi)?;
        let b = psi.eval(tau, &xi)?;
        out.push(CheckRecord::new("contraction/restriction", p, (a - b).norm() / b.norm().max(1.0), th));

        // Θ_L(τ, ζ) = ⟨Θ_M(τ, ζ_M; u), Θ_{L,M}(τ, ζ_{M^⊥}; u^⊥)⟩_M
        let zeta = s.zeta(n);
        let parts = &joint_inv * &zeta;
        let zm = parts.rows(0, c).into_owned();
        let zp = parts.rows(c, n - c).into_owned();
        let tm = theta(&u, tau, &zm, tol)?;
        let tlm = theta_lm(&sub, &u_perp, tau, &zp, tol)?;
        let direct = theta(&v, tau, &zeta, tol)?;
        let paired = GroupRingVector::new(
            (0..tlm.nrows())
                .map(|g| (0..tlm.ncols()).map(|d| tlm[(g, d)] * tm.coeffs[d]).sum())
                .collect(),
            false,
        );
        let p = json!({ "tau": c_json(tau), "zeta": cvec_json(&zeta) });
        out.push(CheckRecord::new("contraction/pairing", p, rel(&paired, &direct), th.min(1e-9)));

        // the generalized contraction is periodic along M^⊥
        let k = n - c;
        let eta = s.zeta(k);
        let (sigma, nu) = (s.int_vec(k, 2), s.int_vec(k, 2));
        let (sp, sm) = u_perp.project(&sigma);
        let moved = &eta + cplx(&sp) * tau + cplx(&sm) * tau.conj() + cplx(&nu);
        let lhs = theta_contraction(&f, &sub, &u_perp, tau, &moved)?;
        let ex = -tau * pair_c(&u_perp, &cplx(&sp), &cplx(&sp)) * 0.5
            - tau.conj() * pair_c(&u_perp, &cplx(&sm), &cplx(&sm)) * 0.5
            - pair_c(&u_perp, &cplx(&sigma), &eta);
        let rhs = theta_contraction(&f, &sub, &u_perp, tau, &eta)?.scale(e(ex));
        let p = json!({ "tau": c_json(tau), "eta": cvec_json(&eta), "sigma": vec_json(&sigma), "nu": vec_json(&nu) });
        out.push(CheckRecord::new("contraction/generalized-periodicity", p, rel(&lhs, &rhs), th));
    }

    // M = L returns F itself
    let whole = PrimitiveSublattice::new(l, DMatrix::identity(n, n))?;
    let trivial = GrassmannianPoint::standard(&whole.complement);
    let tau = s.tau();
    let same = theta_contraction(&f, &whole, &trivial, tau, &DVector::zeros(0))?;
    out.push(CheckRecord::new("contraction/whole-lattice", json!({ "tau": c_json(tau) }), rel(&same, &f.eval(tau)?), th));
    Ok(out)
}

pub fn product(cfg: &VerifyConfig, s: &mut Sampler) -> Records {
    let l = &cfg.lattice;
    let n = l.rank();
    let v = cfg.point();
    let f = ModularForm::dual_theta(&v).with_theta_tol(cfg.theta_tolerance);
    let phi = jacobi_from_mf(&f, l, &v)?.handle();
    let iota = DMatrix::<i64>::identity(n, n);
    let prod = product_pair(&phi, &phi, &iota)?;
    let th = cfg.threshold();
    let mut out = Vec::new();
    let w = prod.weight2();
    let werr = if w == (2 * phi.weight2().0, 2 * phi.weight2().1) { 0.0 } else { 1.0 };
    out.push(CheckRecord::new("product/weight", json!({ "weight2": [w.0, w.1] }), werr, 0.0));
    for _ in 0..cfg.samples {
        let (tau, zeta) = (s.tau(), s.zeta(n));
        let (sigma, nu) = (s.int_vec(n, 2), s.int_vec(n, 2));
        let p = json!({ "tau": c_json(tau), "zeta": cvec_json(&zeta), "sigma": vec_json(&sigma), "nu": vec_json(&nu) });
        let r = functional_residual(&prod, &Functional::PerJac { sigma, nu }, tau, &zeta)?;
        out.push(CheckRecord::new("product/periodicity", p, r, th));
        let word = s.word(cfg.word_max.min(4));
        let p = json!({ "tau": c_json(tau), "zeta": cvec_json(&zeta), "word": word_string(&word) });
        let r = functional_residual(&prod, &Functional::ModJac { g: fold(&word) }, tau, &zeta)?;
        out.push(CheckRecord::new("product/modularity", p, r, th.max(1e-8)));
    }
    // index (1,1) → 2 decomposition, exact on random integral q-series
    let prec = 12;
    let bound = Q::from_integer(prec as i128);
    let random_series = |s: &mut Sampler| -> QSeries {
        QSeries::from_terms(
            bound,
            (0..4).map(|_| {
                let e = Q::new(s.int_vec(1, 4 * prec)[0].abs() as i128, 4);
                (e, BigRational::from_integer(BigInt::from(s.int_vec(1, 5)[0] as i64)))
            }),
        )
    };
    for _ in 0..cfg.samples.min(10) {
        let f: Vec<QSeries> = (0..2).map(|_| random_series(s)).collect();
        let h: Vec<QSeries> = (0..2).map(|_| random_series(s)).collect();
        let lhs = jacobi_series(1, &f, bound)?.mul(&jacobi_series(1, &h, bound)?).truncate(bound);
        let rhs = jacobi_series(2, &product_decompose(1, 1, &f, &h, prec)?, bound)?;
        let p = json!({ "f": f.iter().map(|x| x.to_string()).collect::<Vec<_>>(), "h": h.iter().map(|x| x.to_string()).collect::<Vec<_>>() });
        out.push(CheckRecord::new("product/decomposition-exact", p, if lhs == rhs { 0.0 } else { 1.0 }, 0.0));
    }
    Ok(out)
}

/// Smallest nontrivial element of the discriminant kernel of a rank ≤ 2 lattice
/// with entries in `[-bound, bound]`, ordered by largest entry, then by the
/// number of negative entries.
pub fn find_kernel_element(l: &Lattice, v: &GrassmannianPoint, bound: i64) -> Result<Option<DMatrix<i64>>> {
    let n = l.rank();
    if n > 2 {
        return Err(Error::UnsupportedInput);
    }
    let g = l.gram();
    let id = DMatrix::<i64>::identity(n, n);
    let mut best: Option<((i64, i64), DMatrix<i64>)> = None;
    let mut consider = |a: DMatrix<i64>| -> Result<()> {
        if a == id || a.transpose() * g * &a != *g {
            return Ok(());
        }
        if in_discriminant_kernel(l, v, &a)? {
            let key = (a.iter().map(|x| x.abs()).max().unwrap_or(0), a.iter().filter(|x| **x < 0).count() as i64);
            if best.as_ref().is_none_or(|(b, _)| key < *b) {
                best = Some((key, a));
            }
        }
        Ok(())
    };
    match n {
        0 => {}
        1 => consider(DMatrix::from_element(1, 1, -1))?,
        _ => {
            let norm = |x: i64, y: i64| g[(0, 0)] * x * x + 2 * g[(0, 1)] * x * y + g[(1, 1)] * y * y;
            let range = -bound..=bound;
            let cols = |target: i64| -> Vec<(i64, i64)> {
                range.clone().flat_map(|x| range.clone().map(move |y| (x, y))).filter(|&(x, y)| norm(x, y) == target).collect()
            };
            let (c1, c2) = (cols(g[(0, 0)]), cols(g[(1, 1)]));
            for &(a, c) in &c1 {
                for &(b, d) in &c2 {
                    consider(DMatrix::from_row_slice(2, 2, &[a, b, c, d]))?;
                }
            }
        }
    }
    Ok(best.map(|(_, a)| a))
}

pub fn kernel_invariance(cfg: &VerifyConfig, s: &mut Sampler) -> Records {
    let v = cfg.point();
    let l = &cfg.lattice;
    let a = match &cfg.isometry {
        Some(a) => {
            if !in_discriminant_kernel(l, &v, a)? {
                return Err(Error::BadConfig("the given isometry is not in the discriminant kernel".into()));
            }
            a.clone()
        }
        None => find_kernel_element(l, &v, 40)?
            .ok_or_else(|| Error::BadConfig("no nontrivial kernel element within the search bound".into()))?,
    };
    let av = v.apply(&a)?;
    let ac = a.map(|x| Complex64::new(x as f64, 0.0));
    let mut out = Vec::new();
    let rows: Vec<Vec<i64>> = (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect();
    for _ in 0..cfg.samples {
        let (tau, zeta) = (s.tau(), s.zeta(v.rank()));
        let lhs = theta(&av, tau, &(&ac * &zeta), cfg.theta_tolerance)?;
        let rhs = theta(&v, tau, &zeta, cfg.theta_tolerance)?;
        let p = json!({ "isometry": rows, "tau": c_json(tau), "zeta": cvec_json(&zeta) });
        out.push(CheckRecord::new("kernel-invariance/theta", p, rel(&lhs, &rhs), cfg.threshold()));
    }
    Ok(out)
}

