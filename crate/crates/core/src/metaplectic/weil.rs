use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

use super::{mp_decompose, Gen, MetaplecticElement};
use crate::error::{Error, Result};
use crate::lattice::{exact::Q, IsotropicSubgroupData, Lattice};

/// `e(x) = exp(2πi x)` for a rational `x`, reduced modulo 1 first.
pub(crate) fn e_q(x: Q) -> Complex64 {
    let f = crate::lattice::exact::frac(x);
    let t = 2.0 * PI * crate::lattice::exact::to_f64(&f);
    Complex64::new(t.cos(), t.sin())
}

/// An element of `C[D_L]` (or of `C[D_L(-1)]` when `dual` is set).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRingVector {
    pub dual: bool,
    pub coeffs: Vec<Complex64>,
}

impl GroupRingVector {
    pub fn new(coeffs: Vec<Complex64>, dual: bool) -> Self {
        Self { dual, coeffs }
    }

    pub fn zeros(len: usize, dual: bool) -> Self {
        Self { dual, coeffs: vec![Complex64::zero(); len] }
    }

    /// `e_γ` (or `e*_γ`).
    pub fn basis(len: usize, i: usize, dual: bool) -> Self {
        let mut v = Self::zeros(len, dual);
        v.coeffs[i] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn apply(&self, m: &DMatrix<Complex64>) -> Self {
        let out = m * nalgebra::DVector::from_column_slice(&self.coeffs);
        Self { dual: self.dual, coeffs: out.iter().copied().collect() }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self { dual: self.dual, coeffs: self.coeffs.iter().map(|x| x * s).collect() }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Bilinear pairing `Σ U_γ V_γ` between `C[D_L]` and `C[D_L(-1)]`.
pub fn pairing(u: &GroupRingVector, v: &GroupRingVector) -> Result<Complex64> {
    if u.dual == v.dual {
        return Err(Error::DualMismatch);
    }
    if u.len() != v.len() {
        return Err(Error::WrongDimension("pairing of vectors of different length".into()));
    }
    Ok(u.coeffs.iter().zip(&v.coeffs).map(|(a, b)| a * b).sum())
}

/// `ω_L`: `e_γ ↦ e*_γ` (and back).
pub fn omega(u: &GroupRingVector) -> GroupRingVector {
    GroupRingVector { dual: !u.dual, coeffs: u.coeffs.clone() }
}

/// `↑`: `C[D_L] → C[D_Λ]`.
pub fn up_arrow(data: &IsotropicSubgroupData, u: &GroupRingVector) -> Result<GroupRingVector> {
    if u.len() != data.overlattice.discriminant().order() {
        return Err(Error::SubgroupMismatch);
    }
    let mut out = GroupRingVector::zeros(data.parent.discriminant().order(), u.dual);
    for (&delta, &gamma) in data.h_perp.iter().zip(&data.quotient) {
        out.coeffs[delta] = u.coeffs[gamma];
    }
    Ok(out)
}

/// `↓`: `C[D_Λ] → C[D_L]`.
pub fn down_arrow(data: &IsotropicSubgroupData, v: &GroupRingVector) -> Result<GroupRingVector> {
    if v.len() != data.parent.discriminant().order() {
        return Err(Error::SubgroupMismatch);
    }
    let mut out = GroupRingVector::zeros(data.overlattice.discriminant().order(), v.dual);
    for (&delta, &gamma) in data.h_perp.iter().zip(&data.quotient) {
        out.coeffs[gamma] += v.coeffs[delta];
    }
    Ok(out)
}

type Cache = HashMap<(MetaplecticElement, bool), Arc<DMatrix<Complex64>>>;

/// The Weil representation `ρ_L` (and `ρ_L* = ρ_{L(-1)}`) with memoised matrices.
#[derive(Debug)]
pub struct WeilRepresentation {
    lattice: Lattice,
    cache: Mutex<Cache>,
}

impl WeilRepresentation {
    pub fn new(lattice: &Lattice) -> Self {
        Self { lattice: lattice.clone(), cache: Mutex::new(HashMap::new()) }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn dim(&self) -> usize {
        self.lattice.discriminant().order()
    }

    /// Generator matrices; `dual` uses the form of `L(-1)` on the same cosets.
    pub fn generator(&self, g: Gen, dual: bool) -> DMatrix<Complex64> {
        let d = self.lattice.discriminant();
        let n = d.order();
        let eps = if dual { -1 } else { 1 };
        let half = Q::new(1, 2);
        match g {
            Gen::T | Gen::TInv => {
                let s = if g == Gen::T { eps } else { -eps };
                DMatrix::from_fn(n, n, |i, j| {
                    if i == j {
                        e_q(d.q_value(i) * half * Q::from_integer(s as i128))
                    } else {
                        Complex64::zero()
                    }
                })
            }
            Gen::S => {
                let (bp, bm) = self.lattice.signature();
                let sig = Q::new(eps as i128 * (bm as i128 - bp as i128), 8);
                let pre = e_q(sig) / (n as f64).sqrt();
                DMatrix::from_fn(n, n, |delta, gamma| {
                    pre * e_q(-d.bilinear(gamma, delta) * Q::from_integer(eps as i128))
                })
            }
            Gen::Z => {
                let (bp, bm) = self.lattice.signature();
                let k = (eps as i64 * (bm as i64 - bp as i64)).rem_euclid(4);
                let ik = [
                    Complex64::new(1.0, 0.0),
                    Complex64::new(0.0, 1.0),
                    Complex64::new(-1.0, 0.0),
                    Complex64::new(0.0, -1.0),
                ][k as usize];
                let mut m = DMatrix::zeros(n, n);
                for gamma in 0..n {
                    m[(d.neg(gamma), gamma)] = ik;
                }
                m
            }
        }
    }

    /// `ρ_L(g)` or `ρ_L*(g)`.
    pub fn matrix(&self, g: &MetaplecticElement, dual: bool) -> Arc<DMatrix<Complex64>> {
        if let Some(m) = self.cache.lock().expect("weil cache poisoned").get(&(*g, dual)) {
            return m.clone();
        }
        let n = self.dim();
        let mut m = DMatrix::<Complex64>::identity(n, n);
        let mut gens: HashMap<Gen, DMatrix<Complex64>> = HashMap::new();
        for w in mp_decompose(g) {
            let gm = gens.entry(w).or_insert_with(|| self.generator(w, dual));
            m = if matches!(w, Gen::T | Gen::TInv) {
                // diagonal: scale columns
                let mut out = m;
                for j in 0..n {
                    let f = gm[(j, j)];
                    for i in 0..n {
                        out[(i, j)] *= f;
                    }
                }
                out
            } else {
                &m * &*gm
            };
        }
        let m = Arc::new(m);
        self.cache
            .lock()
            .expect("weil cache poisoned")
            .insert((*g, dual), m.clone());
        m
    }

    pub fn apply(&self, g: &MetaplecticElement, u: &GroupRingVector) -> GroupRingVector {
        u.apply(&self.matrix(g, u.dual))
    }

    pub fn cache_len(&self) -> usize {
        self.cache.lock().expect("weil cache poisoned").len()
    }
}

/// One-shot `ρ_L(g)` without memoisation.
pub fn weil_matrix(l: &Lattice, g: &MetaplecticElement, dual: bool) -> DMatrix<Complex64> {
    WeilRepresentation::new(l).matrix(g, dual).as_ref().clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::sublattice_embed;
    use MetaplecticElement as M;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn a2_generators() {
        let l = Lattice::a2(1);
        let t = weil_matrix(&l, &M::T, false);
        assert!((t[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!((t[(1, 1)] - c(0.0, 1.0)).norm() < 1e-15);
        let s = weil_matrix(&l, &M::S, false);
        let pre = c((-PI / 4.0).cos(), (-PI / 4.0).sin()) / 2f64.sqrt();
        let expect = [[pre, pre], [pre, -pre]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((s[(i, j)] - expect[i][j]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn unimodular_z_is_trivial() {
        let h = Lattice::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        let z = weil_matrix(&h, &M::Z, false);
        assert_eq!(z.shape(), (1, 1));
        assert!((z[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn pairing_rules() {
        let u = GroupRingVector::basis(3, 1, false);
        let v = GroupRingVector::basis(3, 1, true);
        assert_eq!(pairing(&u, &v).unwrap(), c(1.0, 0.0));
        assert_eq!(pairing(&u, &u).unwrap_err(), Error::DualMismatch);
        let w = GroupRingVector::basis(3, 2, true);
        assert_eq!(pairing(&u, &w).unwrap(), c(0.0, 0.0));
    }

    #[test]
    fn arrows_a2() {
        let l = Lattice::a2(1);
        let (_, data) = sublattice_embed(&l, &DMatrix::from_element(1, 1, 2)).unwrap();
        let u = GroupRingVector::new(vec![c(1.0, 2.0), c(-3.0, 0.5)], false);
        let up = up_arrow(&data, &u).unwrap();
        assert_eq!(up.len(), 8);
        let back = down_arrow(&data, &up).unwrap();
        assert_eq!(back, u.scale(c(2.0, 0.0)));
        assert_eq!(
            down_arrow(&data, &u).unwrap_err(),
            Error::SubgroupMismatch
        );
    }

    #[test]
    fn cache_is_used() {
        let w = WeilRepresentation::new(&Lattice::a2(2));
        let g = M::S * M::T * M::S;
        let a = w.matrix(&g, false);
        let b = w.matrix(&g, false);
        assert!(Arc::ptr_eq(&a, &b));
        assert_eq!(w.cache_len(), 1);
    }
}
