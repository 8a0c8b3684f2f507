use jacobi_core::jacobi::{
    contraction_form, downarrow_jacobi, downarrow_skew, functional_residual, jacobi_from_mf, product_pair, restrict,
    theta_contraction, uparrow_jacobi, Functional, JacobiForm,
};
use jacobi_core::lattice::sublattice_embed;
use jacobi_core::metaplectic::{down_arrow, fold, up_arrow, Gen};
use jacobi_core::realspace::{in_discriminant_kernel, split_point};
use jacobi_core::theta::{jacobi_theta, theta_lm, ThetaRequest};
use jacobi_core::verify::find_kernel_element;
use jacobi_core::{GroupRingVector, GrassmannianPoint, Lattice, ModularForm, PrimitiveSublattice};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn points() -> Vec<(Complex64, Complex64)> {
    vec![
        (c(0.0, 1.0), c(0.1, 0.0)),
        (c(0.3, 0.9), c(-0.4, 0.2)),
        (c(-0.45, 1.7), c(0.7, -0.1)),
        (c(0.12, 2.3), c(0.0, 0.25)),
        (c(-0.2, 0.85), c(0.9, 0.05)),
    ]
}

#[test]
fn arrows_on_a2_index_two() {
    let l = Lattice::a2(1);
    let b = DMatrix::from_element(1, 1, 2i64);
    let (lam, data) = sublattice_embed(&l, &b).unwrap();
    assert_eq!(lam, Lattice::a2(4));
    assert_eq!(data.h_order(), 2);
    let v = GrassmannianPoint::standard(&l);
    let v_lam = v.rebase(&lam, &b).unwrap();
    let f_l = ModularForm::dual_theta(&v);
    let f_lam = ModularForm::dual_theta(&v_lam);
    let g_lam = ModularForm::builtin_theta(&v_lam);
    for (tau, z) in points() {
        let z = DVector::from_vec(vec![z]);
        assert!(uparrow_jacobi(&f_l, &data, &v, tau, &z).unwrap().residual() < 1e-9);
        assert!(downarrow_jacobi(&f_lam, &data, &v, tau, &z).unwrap().residual() < 1e-9);
        assert!(downarrow_skew(&g_lam, &data, &v, tau, &z).unwrap().residual() < 1e-9);
    }
    for gamma in 0..l.discriminant().order() {
        let x = GroupRingVector::basis(l.discriminant().order(), gamma, false);
        let y = down_arrow(&data, &up_arrow(&data, &x).unwrap()).unwrap();
        assert_eq!(y.coeffs, x.scale(c(2.0, 0.0)).coeffs);
    }
}

#[test]
fn arrows_reject_forms_on_the_wrong_lattice() {
    let l = Lattice::a2(1);
    let (_, data) = sublattice_embed(&l, &DMatrix::from_element(1, 1, 2i64)).unwrap();
    let v = GrassmannianPoint::standard(&l);
    let f = ModularForm::dual_theta(&v);
    let z = DVector::from_vec(vec![c(0.1, 0.0)]);
    assert!(downarrow_jacobi(&f, &data, &v, c(0.0, 1.0), &z).is_err());
}

fn a2_sum() -> (Lattice, PrimitiveSublattice) {
    let l = Lattice::a2(1).direct_sum(&Lattice::a2(2)).lattice;
    let sub = PrimitiveSublattice::new(&l, DMatrix::from_column_slice(2, 1, &[1, 0])).unwrap();
    (l, sub)
}

#[test]
fn restriction_equals_lift_of_contraction() {
    let (l, sub) = a2_sum();
    let v = GrassmannianPoint::standard(&l);
    let (u, u_perp) = split_point(&sub, &v).unwrap();
    let f = ModularForm::dual_theta(&v);
    let phi = jacobi_from_mf(&f, &l, &v).unwrap().handle();
    let res = restrict(&phi, &sub).unwrap();
    let cf = contraction_form(&f, &sub, &u_perp).unwrap();
    let psi = jacobi_from_mf(&cf, &sub.lattice, &u).unwrap();
    for (tau, z) in points() {
        let xi = DVector::from_vec(vec![z]);
        let (a, b) = (res.eval(tau, &xi).unwrap(), psi.eval(tau, &xi).unwrap());
        assert!((a - b).norm() < 1e-8 * b.norm().max(1.0));
    }
}

#[test]
fn composite_theta_pairs_to_the_full_theta() {
    let (l, sub) = a2_sum();
    let v = GrassmannianPoint::standard(&l);
    let (u, u_perp) = split_point(&sub, &v).unwrap();
    for (tau, z) in points() {
        let zeta = DVector::from_vec(vec![z, z * 0.5 - 0.1]);
        let zm = DVector::from_vec(vec![zeta[0]]);
        let zp = DVector::from_vec(vec![zeta[1]]);
        let tm = jacobi_theta(&ThetaRequest::new(&u, tau).zeta(zm)).unwrap();
        let tlm = theta_lm(&sub, &u_perp, tau, &zp, 1e-13).unwrap();
        let full = jacobi_theta(&ThetaRequest::new(&v, tau).zeta(zeta)).unwrap();
        for g in 0..full.len() {
            let paired: Complex64 = (0..tm.len()).map(|d| tlm[(g, d)] * tm.coeffs[d]).sum();
            assert!((paired - full.coeffs[g]).norm() < 1e-9);
        }
    }
}

#[test]
fn contraction_over_everything_returns_the_form() {
    let l = Lattice::diagonal(&[2, -4]).unwrap();
    let v = GrassmannianPoint::standard(&l);
    let whole = PrimitiveSublattice::new(&l, DMatrix::identity(2, 2)).unwrap();
    let f = ModularForm::dual_theta(&v);
    let trivial = GrassmannianPoint::standard(&whole.complement);
    let tau = c(0.2, 1.1);
    let g = theta_contraction(&f, &whole, &trivial, tau, &DVector::zeros(0)).unwrap();
    assert!(g.max_abs_diff(&f.eval(tau).unwrap()) < 1e-13);
}

#[test]
fn contraction_weight_bookkeeping() {
    let l = Lattice::diagonal(&[2, -4]).unwrap();
    let v = GrassmannianPoint::standard(&l);
    let sub = PrimitiveSublattice::new(&l, DMatrix::from_column_slice(2, 1, &[0, 1])).unwrap();
    let (_, u_perp) = split_point(&sub, &v).unwrap();
    let f = ModularForm::dual_theta(&v);
    let cf = contraction_form(&f, &sub, &u_perp).unwrap();
    // M = <e₂> is negative: the positive weight grows by b₊ - c₊ = 1
    assert_eq!(cf.weight2, (f.weight2.0 + 1, f.weight2.1));
}

#[test]
fn kernel_element_of_diag_2_minus_4() {
    let l = Lattice::diagonal(&[2, -4]).unwrap();
    let v = GrassmannianPoint::standard(&l);
    let a = DMatrix::from_row_slice(2, 2, &[17i64, 24, 12, 17]);
    assert!(in_discriminant_kernel(&l, &v, &a).unwrap());
    assert_eq!(find_kernel_element(&l, &v, 40).unwrap(), Some(a.clone()));
    let av = v.apply(&a).unwrap();
    let ac = a.map(|x| c(x as f64, 0.0));
    for (tau, z) in points() {
        let zeta = DVector::from_vec(vec![z, c(0.3, -0.05)]);
        let lhs = jacobi_theta(&ThetaRequest::new(&av, tau).zeta(&ac * &zeta)).unwrap();
        let rhs = jacobi_theta(&ThetaRequest::new(&v, tau).zeta(zeta)).unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-8 * rhs.max_abs().max(1.0));
    }
    // -1 flips both orientations but acts as -1 on D_L = Z/2 × Z/4
    let minus = DMatrix::from_row_slice(2, 2, &[-1i64, 0, 0, -1]);
    assert!(!in_discriminant_kernel(&l, &v, &minus).unwrap());
}

#[test]
fn product_of_lifts_satisfies_the_functional_equations() {
    let l = Lattice::diagonal(&[2, -4]).unwrap();
    let v = GrassmannianPoint::standard(&l);
    let phi = jacobi_from_mf(&ModularForm::dual_theta(&v), &l, &v).unwrap().handle();
    let prod = product_pair(&phi, &phi, &DMatrix::identity(2, 2)).unwrap();
    assert_eq!(prod.weight2(), (4, 4));
    let zeta = DVector::from_vec(vec![c(0.2, 0.1), c(-0.3, 0.05)]);
    let tau = c(0.1, 1.05);
    let per = Functional::PerJac { sigma: DVector::from_vec(vec![1.0, -1.0]), nu: DVector::from_vec(vec![0.0, 2.0]) };
    assert!(functional_residual(&prod, &per, tau, &zeta).unwrap() < 1e-10);
    let g = fold(&[Gen::S, Gen::T, Gen::S]);
    assert!(functional_residual(&prod, &Functional::ModJac { g }, tau, &zeta).unwrap() < 1e-8);
}
