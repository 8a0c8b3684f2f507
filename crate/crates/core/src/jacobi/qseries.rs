//! Exact truncated q-series with rational exponents.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::Q;

/// `Σ c_e q^e` with exponents in `(1/den)Z`, truncated at `bound` (inclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    den: i128,
    bound: Q,
    coeffs: BTreeMap<Q, BigRational>,
}

impl QSeries {
    pub fn zero(bound: Q) -> Self {
        Self { den: 1, bound, coeffs: BTreeMap::new() }
    }

    pub fn den(&self) -> i128 {
        self.den
    }

    pub fn bound(&self) -> Q {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, e: &Q) -> BigRational {
        self.coeffs.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Q, &BigRational)> {
        self.coeffs.iter()
    }

    pub fn add_term(&mut self, e: Q, c: BigRational) {
        if e > self.bound || c.is_zero() {
            return;
        }
        self.den = self.den.lcm(e.denom());
        let slot = self.coeffs.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (Q, BigRational)>>(bound: Q, terms: I) -> Self {
        let mut s = Self::zero(bound);
        for (e, c) in terms {
            s.add_term(e, c);
        }
        s
    }

    /// Keeps only exponents `≤ bound`.
    pub fn truncate(&self, bound: Q) -> Self {
        Self::from_terms(bound.min(self.bound), self.coeffs.iter().map(|(e, c)| (*e, c.clone())))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = self.truncate(self.bound.min(other.bound));
        for (e, c) in &other.coeffs {
            s.add_term(*e, c.clone());
        }
        s
    }

    /// Product, exact up to `min` of the bounds shifted by the lowest exponents.
    pub fn mul(&self, other: &Self) -> Self {
        let lo_a = self.coeffs.keys().next().copied().unwrap_or(Q::from_integer(0));
        let lo_b = other.coeffs.keys().next().copied().unwrap_or(Q::from_integer(0));
        let bound = (self.bound + lo_b).min(other.bound + lo_a);
        let mut s = Self::zero(bound);
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &other.coeffs {
                s.add_term(*e1 + *e2, c1 * c2);
            }
        }
        s
    }

    /// `q^shift · self`.
    pub fn shift(&self, shift: Q) -> Self {
        Self::from_terms(self.bound + shift, self.coeffs.iter().map(|(e, c)| (*e + shift, c.clone())))
    }

    pub fn to_json(&self) -> QSeriesJson {
        QSeriesJson {
            den: self.den as i64,
            bound: [*self.bound.numer() as i64, *self.bound.denom() as i64],
            terms: self
                .coeffs
                .iter()
                .map(|(e, c)| QSeriesTerm {
                    exp: [*e.numer() as i64, *e.denom() as i64],
                    coeff: c.to_string(),
                })
                .collect(),
        }
    }

    pub fn from_json(j: &QSeriesJson) -> Result<Self> {
        let ratio = |[n, d]: [i64; 2]| -> Result<Q> {
            if d <= 0 {
                return Err(Error::BadConfig("exponent denominators must be positive".into()));
            }
            Ok(Q::new(n as i128, d as i128))
        };
        let mut s = Self::zero(ratio(j.bound)?);
        for t in &j.terms {
            let c: BigRational = t
                .coeff
                .parse()
                .map_err(|_| Error::BadConfig(format!("bad rational coefficient {:?}", t.coeff)))?;
            s.add_term(ratio(t.exp)?, c);
        }
        Ok(s)
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (e, c) in &self.coeffs {
            let a = c.abs();
            let mono = match (e.is_zero(), e.is_one()) {
                (true, _) => String::new(),
                (false, true) => "q".to_string(),
                _ => format!("q^{e}"),
            };
            let body = match (a.is_one(), mono.is_empty()) {
                (true, false) => mono,
                (_, true) => a.to_string(),
                _ => format!("{a}{mono}"),
            };
            parts.push((c.is_negative(), body));
        }
        if parts.is_empty() {
            return write!(f, "0 + O(q^{})", self.bound);
        }
        for (i, (neg, body)) in parts.iter().enumerate() {
            match (i, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        write!(f, " + O(q^{})", self.bound)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSeriesJson {
    pub den: i64,
    pub bound: [i64; 2],
    pub terms: Vec<QSeriesTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QSeriesTerm {
    pub exp: [i64; 2],
    pub coeff: String,
}

/// `Σ c q^a ζ^b` with rational `a` and integer `b`, truncated in `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BiSeries {
    bound: Q,
    coeffs: BTreeMap<(i64, Q), BigRational>,
}

impl BiSeries {
    pub fn zero(bound: Q) -> Self {
        Self { bound, coeffs: BTreeMap::new() }
    }

    pub fn bound(&self) -> Q {
        self.bound
    }

    pub fn add_term(&mut self, qe: Q, ze: i64, c: BigRational) {
        if qe > self.bound || c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry((ze, qe)).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&(ze, qe));
        }
    }

    /// Product of two series with non-negative q-exponents.
    pub fn mul(&self, other: &Self) -> Self {
        let mut s = Self::zero(self.bound.min(other.bound));
        for ((z1, e1), c1) in &self.coeffs {
            for ((z2, e2), c2) in &other.coeffs {
                s.add_term(*e1 + *e2, z1 + z2, c1 * c2);
            }
        }
        s
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut s = Self::zero(self.bound.min(other.bound));
        for ((z, e), c) in self.coeffs.iter().chain(&other.coeffs) {
            s.add_term(*e, *z, c.clone());
        }
        s
    }

    /// `f(τ) · self` for a series in `q` alone.
    pub fn scale(&self, f: &QSeries) -> Self {
        let mut s = Self::zero(self.bound.min(f.bound()));
        for ((z, e), c) in &self.coeffs {
            for (e2, c2) in f.terms() {
                s.add_term(*e + *e2, *z, c * c2);
            }
        }
        s
    }

    /// The q-series multiplying `ζ^k`.
    pub fn zeta_coefficient(&self, k: i64) -> QSeries {
        QSeries::from_terms(
            self.bound,
            self.coeffs.range((k, Q::new(i128::MIN, 1))..).take_while(|((z, _), _)| *z == k).map(|((_, e), c)| (*e, c.clone())),
        )
    }

    pub fn truncate(&self, bound: Q) -> Self {
        let mut s = Self::zero(bound.min(self.bound));
        for ((z, e), c) in &self.coeffs {
            s.add_term(*e, *z, c.clone());
        }
        s
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(x.into())
}

/// `θ_{r+2mZ}(τ, ζ) = Σ_{h ∈ Z + r/2m} q^{mh²} ζ^{2mh}` up to `q^bound`.
pub fn unary_jacobi_theta(m: i64, r: i64, bound: Q) -> BiSeries {
    let mut s = BiSeries::zero(bound);
    // 2mh = 2mk + r =: j, and mh² = j²/(4m)
    let jmax = ((4 * m) as f64 * crate::lattice::exact::to_f64(&bound)).sqrt() as i64 + 2;
    let r = r.rem_euclid(2 * m);
    let mut j = r - 2 * m * ((jmax + r) / (2 * m) + 1);
    while j <= jmax {
        s.add_term(Q::new((j * j) as i128, (4 * m) as i128), j, int(1));
        j += 2 * m;
    }
    s
}

/// `θ_{l+2NZ}(τ) = Σ_{h ∈ Z + l/2N} q^{Nh²}` up to `q^bound`.
pub fn unary_theta(n: i64, l: i64, bound: Q) -> QSeries {
    let b = unary_jacobi_theta(n, l, bound);
    let mut s = QSeries::zero(bound);
    for ((_, e), c) in &b.coeffs {
        s.add_term(*e, c.clone());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_theta_one() {
        let t = unary_theta(1, 0, Q::from_integer(10));
        // Σ q^{h²}: 1 + 2q + 2q^4 + 2q^9
        let expect: Vec<(Q, BigRational)> =
            [(0, 1), (1, 2), (4, 2), (9, 2)].iter().map(|&(e, c)| (Q::from_integer(e), int(c))).collect();
        assert_eq!(t, QSeries::from_terms(Q::from_integer(10), expect));
        let t1 = unary_theta(1, 1, Q::from_integer(10));
        assert_eq!(t1.coeff(&Q::new(1, 4)), int(2));
        assert_eq!(t1.coeff(&Q::new(9, 4)), int(2));
        assert_eq!(t1.den(), 4);
    }

    #[test]
    fn product_truncation() {
        let a = unary_theta(1, 0, Q::from_integer(6));
        let sq = a.mul(&a);
        // r_2(n): 1, 4, 4, 0, 4, 8
        for (n, c) in [(0, 1), (1, 4), (2, 4), (3, 0), (4, 4), (5, 8)] {
            assert_eq!(sq.coeff(&Q::from_integer(n)), int(c), "n = {n}");
        }
    }

    #[test]
    fn display() {
        let a = unary_theta(1, 0, Q::from_integer(4));
        assert_eq!(a.to_string(), "1 + 2q + 2q^4 + O(q^4)");
    }

    #[test]
    fn json_roundtrip() {
        let s = unary_theta(3, 1, Q::from_integer(10));
        assert_eq!(QSeries::from_json(&s.to_json()).unwrap(), s);
    }
}
