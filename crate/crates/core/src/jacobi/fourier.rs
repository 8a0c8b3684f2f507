use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::lift::JacobiForm;
use crate::error::{Error, Result};
use crate::lattice::{exact, Q};
use crate::metaplectic::GroupRingVector;
use crate::theta::{e, enumerate_shifted};

/// Largest number of grid points `N_grid^n` before giving up.
pub const GRID_BUDGET: usize = 2_000_000;
/// Gaussian factors below this are treated as aliasing noise.
const GAUSS_FLOOR: f64 = 1e-17;
/// Only second representatives with a Gaussian factor above this enter the spread.
const ALT_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone)]
pub struct FourierCoefficient {
    pub lambda: Vec<Q>,
    pub coset: usize,
    pub value: Complex64,
}

#[derive(Debug, Clone)]
pub struct FourierInversion {
    /// `F(τ) = Σ_γ f_γ e*_γ`.
    pub form: GroupRingVector,
    pub grid: usize,
    /// Largest `|f_λ - f_λ'|` over pairs in one coset.
    pub coset_spread: f64,
    pub coefficients: Vec<FourierCoefficient>,
}

struct Point {
    coset: usize,
    lambda: Vec<Q>,
    k: Vec<i64>,
    m: f64,
}

/// Recovers `f_λ(τ)` from values of `Φ(τ, ·)` on the grid `(Z/N)^n / Z^n` of real `ζ`.
pub fn fourier_invert(phi: &dyn JacobiForm, tau: Complex64, extra: &[Vec<Q>]) -> Result<FourierInversion> {
    if !(tau.im > 0.0) {
        return Err(Error::NotInUpperHalfPlane);
    }
    let v = phi.point();
    let l = v.lattice();
    let n = l.rank();
    let d = l.discriminant();
    if n == 0 {
        let val = phi.eval(tau, &DVector::zeros(0))?;
        return Ok(FourierInversion {
            form: GroupRingVector::new(vec![val], true),
            grid: 1,
            coset_spread: 0.0,
            coefficients: vec![FourierCoefficient { lambda: vec![], coset: 0, value: val }],
        });
    }
    let y = tau.im;
    let g = l.gram();
    let gf = v.gram();
    let to_point = |coset: usize, lambda: Vec<Q>| -> Point {
        let lf = DVector::from_iterator(n, lambda.iter().map(exact::to_f64));
        let k = (0..n)
            .map(|i| {
                let s: Q = (0..n).map(|j| Q::from_integer(g[(i, j)] as i128) * lambda[j]).sum();
                debug_assert!(s.is_integer());
                s.to_integer() as i64
            })
            .collect();
        Point { coset, lambda, k, m: v.majorant_norm(&lf) }
    };

    // best and second-best representative per coset
    let mut r = (-(GAUSS_FLOOR.ln()) / (PI * y)).sqrt();
    let mut best: Vec<Option<Point>> = (0..d.order()).map(|_| None).collect();
    let mut alt: Vec<Option<Point>> = (0..d.order()).map(|_| None).collect();
    for _ in 0..8 {
        for (coset, lf) in enumerate_shifted(v, &DVector::zeros(n), r, crate::tolerances::POINT_BUDGET)? {
            let lambda: Vec<Q> = d
                .rep(coset)
                .iter()
                .zip(lf.iter().zip(d.rep_f64(coset).iter()))
                .map(|(q, (a, b))| *q + Q::from_integer((a - b).round() as i128))
                .collect();
            let p = to_point(coset, lambda);
            let slot_best = &mut best[coset];
            match slot_best {
                Some(b) if b.m <= p.m => {
                    if alt[coset].as_ref().is_none_or(|a| p.m < a.m) && p.lambda != b.lambda {
                        alt[coset] = Some(p);
                    }
                }
                _ => {
                    alt[coset] = slot_best.take();
                    *slot_best = Some(p);
                }
            }
        }
        if best.iter().all(Option::is_some) {
            break;
        }
        r *= 2.0;
        best.iter_mut().for_each(|b| *b = None);
        alt.iter_mut().for_each(|b| *b = None);
    }
    if best.iter().any(Option::is_none) {
        return Err(Error::AliasBudget);
    }
    let mut requested: Vec<Point> = best.into_iter().flatten().collect();
    let n_best = requested.len();
    let mut alt_idx = Vec::new();
    for a in alt.into_iter().flatten() {
        if (-PI * y * a.m).exp() >= ALT_FLOOR {
            alt_idx.push(requested.len());
            requested.push(a);
        }
    }
    for lam in extra {
        if lam.len() != n {
            return Err(Error::WrongDimension("requested lambda".into()));
        }
        let coset = d
            .coset_of(lam)
            .ok_or_else(|| Error::WrongDimension("requested lambda is not in the dual lattice".into()))?;
        requested.push(to_point(coset, lam.clone()));
    }

    // k = Gλ lies in the box |k_i| ≤ r sqrt((G M^{-1} G)_ii) for m(λ) ≤ r²
    let minv = v.majorant().clone().try_inverse().ok_or(Error::Degenerate)?;
    let gmg = gf * minv * gf;
    let mut kmax = (0..n).map(|i| (r * gmg[(i, i)].sqrt()).ceil() as i64).max().unwrap_or(0);
    for p in &requested {
        kmax = kmax.max(p.k.iter().map(|x| x.abs()).max().unwrap_or(0));
    }
    let grid = (2 * kmax + 5) as usize;
    let total = grid.checked_pow(n as u32).filter(|&t| t <= GRID_BUDGET).ok_or(Error::AliasBudget)?;

    let mut samples = Vec::with_capacity(total);
    let mut idx = vec![0usize; n];
    for _ in 0..total {
        let zeta = DVector::from_iterator(n, idx.iter().map(|&a| Complex64::new(a as f64 / grid as f64, 0.0)));
        samples.push((idx.clone(), phi.eval(tau, &zeta)?));
        for slot in idx.iter_mut() {
            *slot += 1;
            if *slot < grid {
                break;
            }
            *slot = 0;
        }
    }

    let qp = v.q_plus();
    let qm = v.q_minus();
    let roots: Vec<Complex64> = (0..grid)
        .map(|a| e(Complex64::new(-(a as f64) / grid as f64, 0.0)))
        .collect();
    let coefficient = |p: &Point| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (ix, val) in &samples {
            let mut ph = 0usize;
            for (a, k) in ix.iter().zip(&p.k) {
                ph += (*a as i64 * k).rem_euclid(grid as i64) as usize;
            }
            acc += val * roots[ph % grid];
        }
        acc /= total as f64;
        let lf = DVector::from_iterator(n, p.lambda.iter().map(exact::to_f64));
        let sp = lf.dot(&(qp * &lf));
        let sm = lf.dot(&(qm * &lf));
        acc / e(tau * (0.5 * sp) + tau.conj() * (0.5 * sm))
    };
    let values: Vec<Complex64> = requested.iter().map(coefficient).collect();

    let mut form = GroupRingVector::zeros(d.order(), true);
    for (p, val) in requested[..n_best].iter().zip(&values) {
        form.coeffs[p.coset] = *val;
    }
    let spread = alt_idx
        .iter()
        .map(|&i| (values[i] - form.coeffs[requested[i].coset]).norm())
        .fold(0.0, f64::max);
    let coefficients = requested
        .into_iter()
        .zip(values)
        .map(|(p, value)| FourierCoefficient { lambda: p.lambda, coset: p.coset, value })
        .collect();
    Ok(FourierInversion { form, grid, coset_spread: spread, coefficients })
}
