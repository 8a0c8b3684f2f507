//! Fincke-Pohst enumeration of shifted lattice points in an ellipsoid and the
//! truncation radius for Gaussian sums.

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector};

use crate::error::{Error, Result};
use crate::realspace::GrassmannianPoint;
use crate::tolerances::TAIL_SAFETY;

/// Recursive bounds derived from the Cholesky factor of a positive definite form:
/// `m(z) = Σ_i d_i (z_i + Σ_{j>i} u_ij z_j)²`.
#[derive(Debug, Clone)]
pub struct Ellipsoid {
    n: usize,
    d: Vec<f64>,
    u: Vec<Vec<f64>>,
}

impl Ellipsoid {
    pub fn new(form: &DMatrix<f64>) -> Option<Self> {
        let n = form.nrows();
        if n == 0 {
            return Some(Self { n, d: vec![], u: vec![] });
        }
        let chol = Cholesky::new(form.clone())?;
        let r = chol.l().transpose();
        let d = (0..n).map(|i| r[(i, i)] * r[(i, i)]).collect();
        let u = (0..n)
            .map(|i| (0..n).map(|j| if j > i { r[(i, j)] / r[(i, i)] } else { 0.0 }).collect())
            .collect();
        Some(Self { n, d, u })
    }

    /// Visit every `x ∈ Z^n` with `m(x + shift) ≤ r2`. Returns the count.
    pub fn visit<F: FnMut(&[i64])>(
        &self,
        shift: &[f64],
        r2: f64,
        budget: usize,
        mut f: F,
    ) -> Result<usize> {
        let n = self.n;
        if n == 0 {
            f(&[]);
            return Ok(1);
        }
        let slack = 1e-9 * (1.0 + r2);
        let mut x = vec![0i64; n];
        let mut z = vec![0.0f64; n];
        let mut count = 0usize;
        self.rec(n - 1, r2 + slack, shift, &mut x, &mut z, &mut count, budget, &mut f)?;
        Ok(count)
    }

    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(&[i64])>(
        &self,
        i: usize,
        rem: f64,
        shift: &[f64],
        x: &mut [i64],
        z: &mut [f64],
        count: &mut usize,
        budget: usize,
        f: &mut F,
    ) -> Result<()> {
        let c: f64 = -(i + 1..self.n).map(|j| self.u[i][j] * z[j]).sum::<f64>();
        let half = (rem.max(0.0) / self.d[i]).sqrt();
        let lo = (c - half - shift[i]).ceil() as i64;
        let hi = (c + half - shift[i]).floor() as i64;
        for xi in lo..=hi {
            let zi = xi as f64 + shift[i];
            let t = self.d[i] * (zi - c) * (zi - c);
            if t > rem {
                continue;
            }
            x[i] = xi;
            z[i] = zi;
            if i == 0 {
                *count += 1;
                if *count > budget {
                    return Err(Error::BudgetExceeded(budget));
                }
                f(x);
            } else {
                self.rec(i - 1, rem - t, shift, x, z, count, budget, f)?;
            }
        }
        Ok(())
    }
}

/// Points of `L*` with majorant norm `m(λ - center) ≤ R²`, with their cosets.
pub fn enumerate_shifted(
    v: &GrassmannianPoint,
    center: &DVector<f64>,
    radius: f64,
    budget: usize,
) -> Result<Vec<(usize, DVector<f64>)>> {
    let ell = Ellipsoid::new(v.majorant()).expect("majorant is positive definite");
    let d = v.lattice().discriminant();
    let r2 = radius * radius;
    let mut out = Vec::new();
    let mut seen = 0usize;
    for gamma in 0..d.order() {
        let shift: Vec<f64> = (d.rep_f64(gamma) - center).iter().copied().collect();
        seen += ell.visit(&shift, r2, budget.saturating_sub(seen), |x| {
            let lam = DVector::from_iterator(x.len(), x.iter().map(|&a| a as f64)) + d.rep_f64(gamma);
            if v.majorant_norm(&(&lam - center)) <= r2 * (1.0 + 1e-12) {
                out.push((gamma, lam));
            }
        })?;
    }
    Ok(out)
}

fn unit_ball_volume(n: usize) -> f64 {
    // V_n = π^{n/2} / Γ(n/2 + 1)
    let mut v = if n % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if n % 2 == 0 { 2 } else { 3 };
    while k <= n {
        v *= 2.0 * PI / k as f64;
        k += 2;
    }
    v
}

/// Upper bound on the number of points of a translate of `Z^n` with `m ≤ r²`.
fn count_bound(n: usize, r: f64, rho: f64, sqrt_det: f64) -> f64 {
    unit_ball_volume(n) * (r + rho).powi(n as i32) / sqrt_det
}

/// Truncation radius for Gaussian sums `Σ exp(-π y m(z) + π y E)` over a translate
/// of `Z^n`: the discarded tail (times the safety factor) stays below `tol`.
pub fn tail_radius_for(majorant: &DMatrix<f64>, y: f64, energy: f64, tol: f64) -> f64 {
    let n = majorant.nrows();
    if n == 0 {
        return 0.0;
    }
    let sqrt_det = majorant.determinant().sqrt();
    let rho = 0.5 * (0..n).map(|i| majorant[(i, i)].sqrt()).sum::<f64>();
    let h = 0.25 / y.sqrt();
    let bound = |r: f64| -> f64 {
        let mut total = 0.0;
        for k in 0.. {
            let inner = r + k as f64 * h;
            let term = count_bound(n, inner + h, rho, sqrt_det)
                * (-PI * y * inner * inner + PI * y * energy).exp();
            total += term;
            if term < 1e-18 * total || k > 100_000 {
                break;
            }
        }
        TAIL_SAFETY * total
    };
    let mut hi = (energy.max(0.0)).sqrt() + 1.0;
    while bound(hi) > tol {
        hi *= 1.5;
    }
    let mut lo = 0.0;
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if bound(mid) > tol {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Radius for theta sums at `(τ, ζ)`; see [`tail_radius_for`].
pub fn tail_radius(
    v: &GrassmannianPoint,
    tau: num_complex::Complex64,
    zeta_imag: &DVector<f64>,
    tol: f64,
) -> f64 {
    let y = tau.im;
    let c = twist_center(v, y, zeta_imag);
    let energy = c.dot(&(v.majorant() * &c));
    tail_radius_for(v.majorant(), y, energy, tol)
}

/// Solution `c` of `M c = G Im ζ / y`: the sum is centred at `-c`.
pub(crate) fn twist_center(v: &GrassmannianPoint, y: f64, eta: &DVector<f64>) -> DVector<f64> {
    if eta.is_empty() {
        return eta.clone();
    }
    let rhs = v.gram() * eta / y;
    Cholesky::new(v.majorant().clone())
        .expect("majorant is positive definite")
        .solve(&rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;

    #[test]
    fn rank_one_counts() {
        let l = Lattice::a2(1);
        let v = GrassmannianPoint::standard(&l);
        let pts = enumerate_shifted(&v, &DVector::zeros(1), 10.0, 1 << 20).unwrap();
        assert_eq!(pts.len(), 29);
        let pts = enumerate_shifted(&v, &DVector::zeros(1), 1.0, 1 << 20).unwrap();
        let mut xs: Vec<f64> = pts.iter().map(|(_, p)| p[0]).collect();
        xs.sort_by(f64::total_cmp);
        assert_eq!(xs, vec![-0.5, 0.0, 0.5]);
        let pts = enumerate_shifted(&v, &DVector::zeros(1), 0.7, 1 << 20).unwrap();
        assert_eq!(pts.len(), 1);
    }

    #[test]
    fn brute_force_agreement() {
        let l = Lattice::from_rows(&[vec![2, 1], vec![1, -4]]).unwrap();
        let v = GrassmannianPoint::standard(&l);
        let center = DVector::from_vec(vec![0.3, -0.2]);
        let r = 3.0;
        let pts = enumerate_shifted(&v, &center, r, 1 << 20).unwrap();
        let d = l.discriminant();
        let mut brute = 0;
        for g in 0..d.order() {
            for a in -40..=40 {
                for b in -40..=40 {
                    let lam = DVector::from_vec(vec![a as f64, b as f64]) + d.rep_f64(g);
                    if v.majorant_norm(&(&lam - &center)) <= r * r {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(pts.len(), brute);
    }

    #[test]
    fn budget_is_enforced() {
        let v = GrassmannianPoint::standard(&Lattice::a2(1));
        let err = enumerate_shifted(&v, &DVector::zeros(1), 100.0, 10).unwrap_err();
        assert_eq!(err, Error::BudgetExceeded(10));
    }

    #[test]
    fn radius_monotone_in_y() {
        let v = GrassmannianPoint::standard(&Lattice::a2(1));
        let m = v.majorant().clone();
        let r1 = tail_radius_for(&m, 1.0, 0.0, 1e-12);
        let r2 = tail_radius_for(&m, 2.0, 0.0, 1e-12);
        assert!(r2 < r1);
        assert!(r1 > 2.9 && r1 < 4.5, "{r1}");
    }
}
