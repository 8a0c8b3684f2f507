//! The integral metaplectic group `Mp2(Z)` and its Weil representations.

mod weil;

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerances::BRANCH_MARGIN;

pub use weil::{
    down_arrow, omega, pairing, up_arrow, weil_matrix, GroupRingVector, WeilRepresentation,
};

/// Principal square root with argument in `(-π/2, π/2]`.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    if z.im == 0.0 && z.re < 0.0 {
        Complex64::new(0.0, (-z.re).sqrt())
    } else {
        z.sqrt()
    }
}

const TAU0: Complex64 = Complex64::new(0.0, 2.0);

/// An element `(A, φ)` of `Mp2(Z)`, `φ(τ) = branch · sqrt(cτ + d)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MetaplecticElement {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: i64,
    pub branch: i8,
}

impl fmt::Debug for MetaplecticElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "([[{}, {}], [{}, {}]], {:+})",
            self.a, self.b, self.c, self.d, self.branch
        )
    }
}

/// Generators used in words.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gen {
    T,
    TInv,
    S,
    Z,
}

impl Gen {
    pub fn element(self) -> MetaplecticElement {
        match self {
            Gen::T => MetaplecticElement::T,
            Gen::TInv => MetaplecticElement::T_INV,
            Gen::S => MetaplecticElement::S,
            Gen::Z => MetaplecticElement::Z,
        }
    }
}

impl MetaplecticElement {
    pub const IDENTITY: Self = Self { a: 1, b: 0, c: 0, d: 1, branch: 1 };
    pub const T: Self = Self { a: 1, b: 1, c: 0, d: 1, branch: 1 };
    pub const T_INV: Self = Self { a: 1, b: -1, c: 0, d: 1, branch: 1 };
    /// `φ(τ) = √τ` on the principal branch.
    pub const S: Self = Self { a: 0, b: -1, c: 1, d: 0, branch: 1 };
    /// `(-I, i)`.
    pub const Z: Self = Self { a: -1, b: 0, c: 0, d: -1, branch: 1 };

    pub fn new(a: i64, b: i64, c: i64, d: i64, branch: i8) -> Result<Self> {
        if a * d - b * c != 1 {
            return Err(Error::BadConfig(format!(
                "matrix [[{a},{b}],[{c},{d}]] does not have determinant 1"
            )));
        }
        if branch != 1 && branch != -1 {
            return Err(Error::BadConfig("branch must be +1 or -1".into()));
        }
        Ok(Self { a, b, c, d, branch })
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        [[self.a, self.b], [self.c, self.d]]
    }

    /// `j(A, τ) = cτ + d`.
    pub fn j(&self, tau: Complex64) -> Complex64 {
        tau * self.c as f64 + self.d as f64
    }

    pub fn phi(&self, tau: Complex64) -> Complex64 {
        principal_sqrt(self.j(tau)) * self.branch as f64
    }

    /// Möbius action `(aτ + b)/(cτ + d)`.
    pub fn act(&self, tau: Complex64) -> Complex64 {
        (tau * self.a as f64 + self.b as f64) / self.j(tau)
    }

    fn resolve(a: i64, b: i64, c: i64, d: i64, value: Complex64) -> Result<Self> {
        let base = Self { a, b, c, d, branch: 1 };
        let r = value / base.phi(TAU0);
        let branch = if (r - 1.0).norm() < BRANCH_MARGIN {
            1
        } else if (r + 1.0).norm() < BRANCH_MARGIN {
            -1
        } else {
            return Err(Error::BranchAmbiguous);
        };
        Ok(Self { branch, ..base })
    }

    /// `(A, φ)(B, ψ) = (AB, (φ∘B)ψ)`.
    pub fn checked_mul(&self, h: &Self) -> Result<Self> {
        let (a, b, c, d) = (
            self.a * h.a + self.b * h.c,
            self.a * h.b + self.b * h.d,
            self.c * h.a + self.d * h.c,
            self.c * h.b + self.d * h.d,
        );
        Self::resolve(a, b, c, d, self.phi(h.act(TAU0)) * h.phi(TAU0))
    }

    pub fn mul(&self, h: &Self) -> Self {
        self.checked_mul(h)
            .expect("integral matrices never violate the branch margin at 2i")
    }

    pub fn inverse(&self) -> Self {
        let cand = Self { a: self.d, b: -self.b, c: -self.c, d: self.a, branch: 1 };
        if self.mul(&cand).branch == 1 {
            cand
        } else {
            Self { branch: -1, ..cand }
        }
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        (0..n.unsigned_abs()).fold(Self::IDENTITY, |acc, _| acc.mul(&base))
    }

    /// `[[a,b],[c,d]] ↦ [[a,-b],[-c,d]]` with `φ̃(τ) = conj(φ(-τ̄))`.
    pub fn involution(&self) -> Self {
        let target = self.phi(-TAU0.conj()).conj();
        Self::resolve(self.a, -self.b, -self.c, self.d, target)
            .expect("involution branch is always resolvable")
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    pub fn to_json(&self) -> MetaplecticJson {
        MetaplecticJson { matrix: self.matrix(), branch: self.branch }
    }
}

impl std::ops::Mul for MetaplecticElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        MetaplecticElement::mul(&self, &rhs)
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MetaplecticJson {
    pub matrix: [[i64; 2]; 2],
    pub branch: i8,
}

impl TryFrom<MetaplecticJson> for MetaplecticElement {
    type Error = Error;
    fn try_from(j: MetaplecticJson) -> Result<Self> {
        let [[a, b], [c, d]] = j.matrix;
        Self::new(a, b, c, d, j.branch)
    }
}

/// Multiply out a word.
pub fn fold(word: &[Gen]) -> MetaplecticElement {
    word.iter()
        .fold(MetaplecticElement::IDENTITY, |acc, g| acc.mul(&g.element()))
}

fn round_div(a: i64, c: i64) -> i64 {
    let q = a.div_euclid(c);
    let r = a - q * c;
    if 2 * r.abs() > c.abs() {
        q + c.signum()
    } else {
        q
    }
}

/// Write `g` as a word in `T, T⁻¹, S, Z` by a Euclidean reduction of the first
/// column followed by a `Z` correction of the branch.
pub fn mp_decompose(g: &MetaplecticElement) -> Vec<Gen> {
    let (mut a, mut b, mut c, mut d) = (g.a, g.b, g.c, g.d);
    let mut word = Vec::new();
    let push_t = |word: &mut Vec<Gen>, n: i64| {
        let gen = if n > 0 { Gen::T } else { Gen::TInv };
        word.extend(std::iter::repeat(gen).take(n.unsigned_abs() as usize));
    };
    while c != 0 {
        // left multiply by T^{-n} then S; record the inverses
        let n = round_div(a, c);
        push_t(&mut word, n);
        a -= n * c;
        b -= n * d;
        // S^{-1} = S Z^3
        word.extend([Gen::S, Gen::Z, Gen::Z, Gen::Z]);
        (a, b, c, d) = (-c, -d, a, b);
    }
    if a == 1 {
        push_t(&mut word, b);
    } else {
        word.push(Gen::Z);
        push_t(&mut word, -b);
    }
    let _ = d;
    let mut word = simplify(word);
    if fold(&word).branch != g.branch {
        word.extend([Gen::Z, Gen::Z]);
    }
    word
}

/// Cancel adjacent `T T⁻¹` pairs and reduce `Z` counts modulo 4 (Z is central).
fn simplify(word: Vec<Gen>) -> Vec<Gen> {
    let mut zs = 0usize;
    let mut out: Vec<Gen> = Vec::with_capacity(word.len());
    for g in word {
        match g {
            Gen::Z => zs += 1,
            _ => {
                let cancels = matches!(
                    (out.last(), g),
                    (Some(Gen::T), Gen::TInv) | (Some(Gen::TInv), Gen::T)
                );
                if cancels {
                    out.pop();
                } else {
                    out.push(g);
                }
            }
        }
    }
    out.extend(std::iter::repeat(Gen::Z).take(zs % 4));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use MetaplecticElement as M;

    #[test]
    fn relations() {
        assert_eq!(M::T * M::T_INV, M::IDENTITY);
        assert_eq!(M::S * M::S, M::Z);
        let st = M::S * M::T;
        assert_eq!(st * st * st, M::Z);
        assert_eq!(M::Z.pow(4), M::IDENTITY);
        assert_eq!(M::Z.pow(2), M { branch: -1, ..M::IDENTITY });
        assert_eq!(M::S.pow(8), M::IDENTITY);
        assert_ne!(M::S.pow(4), M::IDENTITY);
    }

    #[test]
    fn decomposition_folds_back() {
        assert!(mp_decompose(&M::IDENTITY).is_empty());
        assert_eq!(mp_decompose(&M::S), vec![Gen::S]);
        let g = M::new(1, 0, 1, 1, 1).unwrap();
        assert_eq!(fold(&mp_decompose(&g)), g);
        for (a, b, c, d) in [(2, 1, 1, 1), (5, 3, 3, 2), (-7, 2, 10, -3), (1, 0, -4, 1), (-1, 5, 0, -1)] {
            for br in [1, -1] {
                let g = M::new(a, b, c, d, br).unwrap();
                assert_eq!(fold(&mp_decompose(&g)), g);
            }
        }
    }

    #[test]
    fn involution_examples() {
        assert_eq!(M::T.involution(), M::T_INV);
        assert_eq!(M::S.involution(), M::S.inverse());
        assert_eq!(M::Z.involution(), M::Z.inverse());
        let g = M::new(5, 3, 3, 2, -1).unwrap();
        assert_eq!(g.involution().involution(), g);
        let h = M::new(2, 1, 1, 1, 1).unwrap();
        assert_eq!((g * h).involution(), g.involution() * h.involution());
    }

    #[test]
    fn phi_squares_to_j() {
        let g = M::new(-7, 2, 10, -3, -1).unwrap();
        let tau = Complex64::new(0.3, 0.7);
        assert!((g.phi(tau).powi(2) - g.j(tau)).norm() < 1e-12);
        let t = g.involution();
        assert!((t.phi(tau).powi(2) - t.j(tau)).norm() < 1e-12);
        assert!((t.phi(tau) - g.phi(-tau.conj()).conj()).norm() < 1e-12);
    }
}
