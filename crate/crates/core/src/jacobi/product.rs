//! The rank-one product map `e*_r ⊗ e*_s ↦ Σ_t p_{r,s,t} e*_t` for
//! `A₂(m) × A₂(n) → A₂(m+n)`, computed with exact series.

use std::collections::BTreeMap;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::qseries::{unary_jacobi_theta, unary_theta, BiSeries, QSeries};
use crate::error::{Error, Result};
use crate::lattice::Q;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PCoefficient {
    pub t: i64,
    pub series: QSeries,
}

/// `(r, s) ↦ [(t, p_{r,s,t})]`, zero coefficients omitted.
pub type PTable = BTreeMap<(i64, i64), Vec<PCoefficient>>;

/// `mn(m+n)/gcd(m,n)²`.
pub fn product_index(m: i64, n: i64) -> i64 {
    let d = m.gcd(&n);
    m * n * (m + n) / (d * d)
}

fn check_args(m: i64, n: i64, prec: i64) -> Result<()> {
    if m < 1 || n < 1 {
        return Err(Error::BadConfig("m and n must be positive".into()));
    }
    if prec < 1 {
        return Err(Error::PrecisionTooLow(format!("q precision {prec} leaves nothing to compare")));
    }
    Ok(())
}

/// The coefficients `p_{r,s,t}` up to `q^prec`.
///
/// The product `θ_{r+2mZ}(τ,ζ) θ_{s+2nZ}(τ,ζ)` is expanded as a bivariate series. Writing
/// `H = (mh₁ + nh₂)/(m+n)`, every term has `ζ`-exponent `2(m+n)H` and `q`-exponent
/// `(m+n)H² + (mn/(m+n))(h₁ - h₂)²`, so the coefficient of `θ_{t+2(m+n)Z}(τ,ζ)` is read
/// off at the representative `H₀` of `t/(2(m+n)) + Z` of least absolute value, and
/// cross-checked at `H₀ + 1`.
pub fn p_coefficients(m: i64, n: i64, prec: i64) -> Result<PTable> {
    check_args(m, n, prec)?;
    let big = m + n;
    let cut = Q::from_integer(prec as i128);
    let bound = cut + Q::new(9 * big as i128, 4) + Q::from_integer(1);
    let mut table = PTable::new();
    for r in 0..2 * m {
        let a = unary_jacobi_theta(m, r, bound);
        for s in 0..2 * n {
            let prod = a.mul(&unary_jacobi_theta(n, s, bound));
            let mut row = Vec::new();
            for t in 0..2 * big {
                let k0 = if t <= big { t } else { t - 2 * big };
                let h0 = Q::new(k0 as i128, 2 * big as i128);
                let read = |k: i64, h: Q| -> QSeries {
                    prod.zeta_coefficient(k).shift(-(h * h) * Q::from_integer(big as i128)).truncate(cut)
                };
                let p = read(k0, h0);
                let check = read(k0 + 2 * big, h0 + Q::from_integer(1));
                if p != check {
                    return Err(Error::PrecisionTooLow(format!(
                        "coefficient of t = {t} for (r, s) = ({r}, {s}) is not determined at q^{prec}"
                    )));
                }
                if !p.is_zero() {
                    row.push(PCoefficient { t, series: p });
                }
            }
            table.insert((r, s), row);
        }
    }
    Ok(table)
}

/// Smallest `l ∈ [0, N]` with `θ_{l+2NZ}(τ) = series` up to the series' bound.
pub fn match_unary_theta(series: &QSeries, index: i64) -> Option<i64> {
    (0..=index).find(|&l| unary_theta(index, l, series.bound()) == *series)
}

/// `Σ_r θ_{r+2mZ}(τ, ζ) f_r(τ)`.
pub fn jacobi_series(m: i64, f: &[QSeries], bound: Q) -> Result<BiSeries> {
    if f.len() != 2 * m as usize {
        return Err(Error::WrongDimension(format!("expected {} components", 2 * m)));
    }
    let mut s = BiSeries::zero(bound);
    for (r, fr) in f.iter().enumerate() {
        s = s.add(&unary_jacobi_theta(m, r as i64, bound).scale(fr));
    }
    Ok(s)
}

/// `P(F ⊗ H)` for q-expansions `F` on `A₂(m)` and `H` on `A₂(n)`, indexed by residues.
pub fn product_decompose(m: i64, n: i64, f: &[QSeries], h: &[QSeries], prec: i64) -> Result<Vec<QSeries>> {
    check_args(m, n, prec)?;
    if f.len() != 2 * m as usize || h.len() != 2 * n as usize {
        return Err(Error::WrongDimension("component count".into()));
    }
    let cut = Q::from_integer(prec as i128);
    let table = p_coefficients(m, n, prec)?;
    let mut out = vec![QSeries::zero(cut); 2 * (m + n) as usize];
    for ((r, s), row) in &table {
        let fh = f[*r as usize].mul(&h[*s as usize]);
        for pc in row {
            let slot = &mut out[pc.t as usize];
            *slot = slot.add(&fh.mul(&pc.series).truncate(cut));
        }
    }
    Ok(out)
}

/// Outcome of matching one `p_{r,s,t}` against unary theta series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanStatus {
    Match,
    Mismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanEntry {
    pub m: i64,
    pub n: i64,
    pub r: i64,
    pub s: i64,
    pub t: i64,
    /// `N = mn(m+n)/d²`, the index of the candidate `Λ = A₂(N)`.
    pub index: i64,
    /// `l` with `p = θ_{l+2NZ}`, canonical up to `l ↦ 2N - l`.
    pub l: Option<i64>,
    pub status: ScanStatus,
    /// `t ≡ r + s (mod 2)`.
    pub parity_ok: bool,
    /// Exponents lie in `(1/4N)Z`.
    pub denominators_ok: bool,
}

/// Evidence table for the theta-coefficient conjecture over `1 ≤ m ≤ m_max`, `1 ≤ n ≤ n_max`.
pub fn conjecture_scan(m_max: i64, n_max: i64, prec: i64) -> Result<Vec<ScanEntry>> {
    if m_max < 1 || n_max < 1 {
        return Err(Error::BadConfig("scan bounds must be positive".into()));
    }
    let mut out = Vec::new();
    for m in 1..=m_max {
        for n in 1..=n_max {
            let index = product_index(m, n);
            for ((r, s), row) in p_coefficients(m, n, prec)? {
                for pc in row {
                    let l = match_unary_theta(&pc.series, index);
                    out.push(ScanEntry {
                        m,
                        n,
                        r,
                        s,
                        t: pc.t,
                        index,
                        l,
                        status: if l.is_some() { ScanStatus::Match } else { ScanStatus::Mismatch },
                        parity_ok: (pc.t - r - s).rem_euclid(2) == 0,
                        denominators_ok: (4 * index as i128) % pc.series.den() == 0,
                    });
                }
            }
        }
    }
    Ok(out)
}
