use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{e, for_each_term, ThetaRequest};
use crate::error::{Error, Result};

/// `4πi∂_τ̄ - Δ_{v-}` (pseudo) or `4πi∂_τ - Δ_{v+}` (skew).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatOperator {
    Pseudo,
    Skew,
}

/// Central-difference heat residual of the truncated theta series, with the
/// stencil applied to each term in closed form.
///
/// Shifting `τ` or `ζ` multiplies a term `e(E)` by a known exponential, so the
/// stencil becomes a factor like `sinh(2πhb)/h` or `4 sin²(πhc)/h²` per term. This
/// removes the `ε/h²` roundoff of black-box differencing and leaves only the
/// `O(h²)` truncation error. Relative to `max(1, max|Θ|)`.
pub fn heat_residual_termwise(req: &ThetaRequest<'_>, op: HeatOperator, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::BadConfig("finite difference step must be positive".into()));
    }
    let v = req.v;
    let dirs = match op {
        HeatOperator::Pseudo => v.orthonormal_minus().clone(),
        HeatOperator::Skew => v.orthonormal_plus().clone(),
    };
    let gw = v.gram() * &dirs;
    let qp = v.q_plus();
    let qm = v.q_minus();
    let n = v.lattice().discriminant().order();
    let mut res = vec![Complex64::new(0.0, 0.0); n];
    let mut val = vec![Complex64::new(0.0, 0.0); n];
    let i = Complex64::new(0.0, 1.0);
    for_each_term(req, |gamma, mu: &DVector<f64>, ex| {
        let t = e(ex);
        let sp = mu.dot(&(qp * mu));
        let sm = mu.dot(&(qm * mu));
        let a = 0.5 * (sp + sm);
        let b = 0.5 * (sp - sm);
        let dx = i * (2.0 * PI * h * a).sin() / h;
        let dy = -(2.0 * PI * h * b).sinh() / h;
        let second: f64 = (0..dirs.ncols())
            .map(|j| {
                let c = mu.dot(&gw.column(j));
                -4.0 * (PI * h * c).sin().powi(2) / (h * h)
            })
            .sum();
        let bracket = match op {
            // Δ_{v-} = -Σ ∂²_w along w with (w, w) = -1
            HeatOperator::Pseudo => 4.0 * PI * i * 0.5 * (dx + i * dy) + second,
            HeatOperator::Skew => 4.0 * PI * i * 0.5 * (dx - i * dy) - second,
        };
        res[gamma] += t * bracket;
        val[gamma] += t;
    })?;
    let scale = val.iter().map(|z| z.norm()).fold(1.0, f64::max);
    Ok(res.iter().map(|z| z.norm()).fold(0.0, f64::max) / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use crate::realspace::GrassmannianPoint;

    #[test]
    fn second_order_ratio() {
        for rows in [vec![vec![2]], vec![vec![2, 0], vec![0, -4]], vec![vec![2, 1], vec![1, -4]]] {
            let l = Lattice::from_rows(&rows).unwrap();
            let v = GrassmannianPoint::standard(&l);
            let zeta = DVector::from_fn(l.rank(), |k, _| Complex64::new(0.3 - 0.2 * k as f64, 0.1));
            let req = ThetaRequest::new(&v, Complex64::new(0.2, 1.1)).zeta(zeta);
            for op in [HeatOperator::Pseudo, HeatOperator::Skew] {
                let r1 = heat_residual_termwise(&req, op, 1e-4).unwrap();
                let r2 = heat_residual_termwise(&req, op, 5e-5).unwrap();
                assert!(r1 < 1e-5, "{rows:?} {op:?} {r1}");
                assert!((r1 / r2 - 4.0).abs() < 0.05, "{rows:?} {op:?} {}", r1 / r2);
            }
        }
    }
}
