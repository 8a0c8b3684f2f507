use jacobi_core::jacobi::{
    diff_residual, fourier_invert, jacobi_fourier_coeffs, jacobi_from_mf, shift_index, skew_jacobi_from_mf,
    theta_q_expansion, tilde_mf, JacobiForm, QTerm,
};
use jacobi_core::lattice::{exact::to_f64, Q};
use jacobi_core::metaplectic::{fold, Gen};
use jacobi_core::theta::{e, HeatOperator};
use jacobi_core::{Error, GrassmannianPoint, Lattice, ModularForm, Rep, WeilRepresentation};
use nalgebra::DVector;
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn neg2() -> Lattice {
    Lattice::diagonal(&[-2]).unwrap()
}

/// `Θ_{A₂(1)}` as a holomorphic `ρ*` form for `[-2]`.
fn holomorphic_dual() -> ModularForm {
    theta_q_expansion(&Lattice::a2(1), 40).unwrap().as_dual_of(&neg2()).unwrap()
}

#[test]
fn roundtrip_recovers_builtin_theta() {
    for l in [neg2(), Lattice::diagonal(&[2, -4]).unwrap()] {
        let v = GrassmannianPoint::standard(&l);
        let f = ModularForm::dual_theta(&v);
        let lift = jacobi_from_mf(&f, &l, &v).unwrap();
        for tau in [c(0.0, 1.0), c(0.0, 2.0), c(1.0 / 3.0, 1.0)] {
            let inv = fourier_invert(&lift, tau, &[]).unwrap();
            let direct = f.eval(tau).unwrap();
            assert!(inv.form.max_abs_diff(&direct) < 1e-8, "{l:?} {tau}");
            assert!(inv.coset_spread < 1e-8);
        }
    }
}

#[test]
fn q_expansion_of_theta_agrees_with_summation() {
    let l = Lattice::a2(1);
    let q = theta_q_expansion(&l, 40).unwrap();
    let b = ModularForm::builtin_theta(&GrassmannianPoint::standard(&l));
    let tau = c(0.17, 0.7);
    assert!(q.eval(tau).unwrap().max_abs_diff(&b.eval(tau).unwrap()) < 1e-12);
}

#[test]
fn q_expansion_form_is_modular() {
    let f = theta_q_expansion(&Lattice::a2(2), 60).unwrap();
    let w = WeilRepresentation::new(&Lattice::a2(2));
    for word in [vec![Gen::S], vec![Gen::T, Gen::S, Gen::T], vec![Gen::S, Gen::T, Gen::T, Gen::S]] {
        let r = f.modularity_residual(&w, &fold(&word), c(0.1, 1.3)).unwrap();
        assert!(r < 1e-10, "{word:?}: {r}");
    }
}

#[test]
fn tilde_twice_is_identity() {
    let l = Lattice::diagonal(&[2, -4]).unwrap();
    let g = ModularForm::builtin_theta(&GrassmannianPoint::standard(&l));
    let gg = tilde_mf(&tilde_mf(&g));
    assert_eq!(gg.rep, g.rep);
    assert_eq!(gg.weight2, g.weight2);
    let tau = c(-0.3, 0.8);
    let (a, b) = (gg.eval(tau).unwrap(), g.eval(tau).unwrap());
    assert_eq!(a.dual, b.dual);
    assert!(a.max_abs_diff(&b) < 1e-14);
}

#[test]
fn tilde_on_rank_zero_reflects_tau() {
    let t = Lattice::trivial();
    let terms = vec![QTerm { coset: 0, exponent: Q::from_integer(1), coeff: c(1.0, 0.0), ypow: 0 }];
    let h = ModularForm::q_expansion(&t, Rep::Rho, (24, 0), 1, terms).unwrap();
    let ht = tilde_mf(&h);
    assert_eq!(ht.weight2, (0, 24));
    assert_eq!(ht.rep, Rep::RhoStar);
    let tau = c(0.25, 0.6);
    let want = h.eval(-tau.conj()).unwrap().coeffs[0];
    assert!((ht.eval(tau).unwrap().coeffs[0] - want).norm() < 1e-15);
}

#[test]
fn rank_zero_lift_is_the_form() {
    let t = Lattice::trivial();
    let terms = vec![
        QTerm { coset: 0, exponent: Q::from_integer(0), coeff: c(1.0, 0.0), ypow: 0 },
        QTerm { coset: 0, exponent: Q::from_integer(1), coeff: c(240.0, 0.0), ypow: 0 },
    ];
    let f = ModularForm::q_expansion(&t, Rep::RhoStar, (8, 0), 1, terms).unwrap();
    let v = GrassmannianPoint::standard(&t);
    let lift = jacobi_from_mf(&f, &t, &v).unwrap();
    let tau = c(0.1, 1.1);
    let phi = lift.eval(tau, &DVector::zeros(0)).unwrap();
    assert!((phi - f.eval(tau).unwrap().coeffs[0]).norm() < 1e-14);
    assert_eq!(lift.weight2(), (8, 0));
}

#[test]
fn lift_needs_the_dual_representation() {
    let l = Lattice::a2(1);
    let v = GrassmannianPoint::standard(&l);
    let f = ModularForm::builtin_theta(&v);
    assert!(matches!(jacobi_from_mf(&f, &l, &v), Err(Error::RepMismatch)));
    let other = GrassmannianPoint::standard(&neg2());
    assert!(matches!(jacobi_from_mf(&holomorphic_dual(), &neg2(), &v), Err(Error::GrassmannianMismatch)));
    assert!(jacobi_from_mf(&holomorphic_dual(), &neg2(), &other).is_ok());
    assert!(matches!(ModularForm::builtin_theta(&v).as_dual_of(&l), Err(Error::RepMismatch)));
}

#[test]
fn lift_weight_adds_signature() {
    let l = Lattice::diagonal(&[2, -4]).unwrap();
    let v = GrassmannianPoint::standard(&l);
    let lift = jacobi_from_mf(&ModularForm::dual_theta(&v), &l, &v).unwrap();
    // F has weight (b-, b+)/2 = (1/2, 1/2); the lift adds (b+, b-)/2
    assert_eq!(lift.weight2(), (2, 2));
}

#[test]
fn pseudo_holomorphic_detection() {
    let l = neg2();
    let v = GrassmannianPoint::standard(&l);
    let tau = c(0.1, 1.2);
    let z = DVector::from_vec(vec![c(0.2, 0.1)]);
    let f = holomorphic_dual();
    let hol = jacobi_from_mf(&f, &l, &v).unwrap();
    let scaled = jacobi_from_mf(&f.times_imag_tau(), &l, &v).unwrap();
    assert!(diff_residual(&hol, HeatOperator::Pseudo, tau, &z, 1e-4).unwrap() < 1e-5);
    assert!(diff_residual(&scaled, HeatOperator::Pseudo, tau, &z, 1e-4).unwrap() > 1e-2);
}

#[test]
fn skew_holomorphic_detection() {
    let l = Lattice::a2(1);
    let v = GrassmannianPoint::standard(&l);
    let tau = c(-0.2, 1.1);
    let z = DVector::from_vec(vec![c(0.3, -0.1)]);
    let g = theta_q_expansion(&l, 40).unwrap();
    let hol = skew_jacobi_from_mf(&g, &l, &v).unwrap();
    let scaled = skew_jacobi_from_mf(&g.times_imag_tau(), &l, &v).unwrap();
    assert!(diff_residual(&hol, HeatOperator::Skew, tau, &z, 1e-4).unwrap() < 1e-5);
    assert!(diff_residual(&scaled, HeatOperator::Skew, tau, &z, 1e-4).unwrap() > 1e-2);
}

#[test]
fn fourier_table_reassembles_the_lift() {
    let l = neg2();
    let v = GrassmannianPoint::standard(&l);
    let f = holomorphic_dual();
    let lift = jacobi_from_mf(&f, &l, &v).unwrap();
    let (tau, z) = (c(0.13, 1.4), DVector::from_vec(vec![c(0.21, 0.05)]));
    let mut index = Vec::new();
    for k in -12i128..=12 {
        let lambda = vec![Q::new(k, 2)];
        for j in 0..12i128 {
            // n = j²/4 on the matching coset, m = n + λ²/2 = n - k²/4
            if (j - k).rem_euclid(2) == 0 {
                index.push((Q::new(j * j - k * k, 4), lambda.clone()));
            }
        }
    }
    let table = jacobi_fourier_coeffs(&lift, tau.im, &index).unwrap();
    let mut sum = c(0.0, 0.0);
    for entry in &table {
        let lam = to_f64(&entry.lambda[0]);
        let m = to_f64(&entry.m);
        // λ lies in v₋ for a negative definite lattice: λ²_{v-} = -2λ²
        let gauss = (-std::f64::consts::PI * 2.0 * lam * lam * tau.im).exp();
        sum += entry.c * e(c(m * tau.re, 0.0) + z[0] * (-2.0 * lam)) * gauss;
    }
    let direct = lift.eval(tau, &z).unwrap();
    assert!((sum - direct).norm() < 1e-10, "{sum} vs {direct}");
}

#[test]
fn fourier_coefficients_are_shift_invariant() {
    let l = neg2();
    let v = GrassmannianPoint::standard(&l);
    let lift = jacobi_from_mf(&holomorphic_dual(), &l, &v).unwrap();
    let base = (Q::from_integer(0), vec![Q::new(1, 2)]);
    let shifted = shift_index(&l, base.0, &base.1, &[2]);
    let t = jacobi_fourier_coeffs(&lift, 1.3, &[base.clone(), shifted]).unwrap();
    assert_eq!(t[0].n, t[1].n);
    assert!((t[0].c - t[1].c).norm() < 1e-15);
    assert!(t[0].c.norm() > 0.0);
    // c̃ does not depend on y for a holomorphic expansion
    let t2 = jacobi_fourier_coeffs(&lift, 0.4, &[base]).unwrap();
    assert!((t2[0].c_tilde - t[0].c_tilde).norm() < 1e-15);
}
