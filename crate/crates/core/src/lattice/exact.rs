//! Exact integer and rational matrix helpers.

use nalgebra::DMatrix;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar used throughout the lattice layer.
pub type Q = Ratio<i128>;

pub fn q(n: i128) -> Q {
    Q::from_integer(n)
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: Q) -> Q {
    x - x.floor()
}

/// Reduce into `[0, m)`.
pub fn modulo(x: Q, m: Q) -> Q {
    let t = x / m;
    x - m * t.floor()
}

pub fn to_f64(x: &Q) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

pub fn identity(n: usize) -> DMatrix<i64> {
    DMatrix::identity(n, n)
}

/// Determinant by fraction-free Bareiss elimination.
pub fn det(m: &DMatrix<i64>) -> i128 {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "det of non-square matrix");
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| m[(i, j)] as i128).collect())
        .collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// Inverse over the rationals, `None` when singular.
pub fn rational_inverse(m: &DMatrix<i64>) -> Option<Vec<Vec<Q>>> {
    let n = m.nrows();
    let mut a: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            let mut row: Vec<Q> = (0..n).map(|j| q(m[(i, j)] as i128)).collect();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(p, k);
        let piv = a[k][k];
        for x in a[k].iter_mut() {
            *x /= piv;
        }
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k];
                let rk = a[k].clone();
                for (x, y) in a[i].iter_mut().zip(rk) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Inverse of a unimodular integer matrix.
pub fn unimodular_inverse(m: &DMatrix<i64>) -> Option<DMatrix<i64>> {
    let inv = rational_inverse(m)?;
    let n = m.nrows();
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if !inv[i][j].is_integer() {
                return None;
            }
            out[(i, j)] = inv[i][j].to_integer() as i64;
        }
    }
    Some(out)
}

pub fn mat_vec_q(m: &DMatrix<i64>, x: &[Q]) -> Vec<Q> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).fold(Q::zero(), |s, j| s + q(m[(i, j)] as i128) * x[j]))
        .collect()
}

pub fn bilinear_q(g: &DMatrix<i64>, x: &[Q], y: &[Q]) -> Q {
    let gy = mat_vec_q(g, y);
    x.iter().zip(gy).fold(Q::zero(), |s, (a, b)| s + *a * b)
}

/// Smith normal form `U * M * V = D`.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: DMatrix<i64>,
    pub d: DMatrix<i64>,
    pub v: DMatrix<i64>,
    pub v_inv: DMatrix<i64>,
}

impl Snf {
    /// Diagonal entries (length `min(rows, cols)`).
    pub fn diagonal(&self) -> Vec<i64> {
        (0..self.d.nrows().min(self.d.ncols())).map(|i| self.d[(i, i)]).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|&&x| x != 0).count()
    }
}

/// Smith normal form with divisor chain `d_i | d_{i+1}` and nonnegative diagonal.
///
/// Pivot choice only looks at absolute values and quotients truncate toward
/// zero, so `M` and `-M` yield the same `V`.
pub fn smith_normal_form(m: &DMatrix<i64>) -> Snf {
    let (r, c) = m.shape();
    let mut a: Vec<Vec<i128>> = (0..r)
        .map(|i| (0..c).map(|j| m[(i, j)] as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..r)
        .map(|i| (0..r).map(|j| (i == j) as i128).collect())
        .collect();
    let mut v: Vec<Vec<i128>> = (0..c)
        .map(|i| (0..c).map(|j| (i == j) as i128).collect())
        .collect();
    let mut vi = v.clone();

    'outer: for k in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in k..r {
                for j in k..c {
                    if a[i][j] != 0
                        && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break 'outer };
            a.swap(k, pi);
            u.swap(k, pi);
            for row in a.iter_mut() {
                row.swap(k, pj);
            }
            for row in v.iter_mut() {
                row.swap(k, pj);
            }
            vi.swap(k, pj);

            let mut dirty = false;
            for i in k + 1..r {
                if a[i][k] != 0 {
                    let f = a[i][k] / a[k][k];
                    for j in 0..c {
                        a[i][j] -= f * a[k][j];
                    }
                    for j in 0..r {
                        u[i][j] -= f * u[k][j];
                    }
                    dirty |= a[i][k] != 0;
                }
            }
            for j in k + 1..c {
                if a[k][j] != 0 {
                    let f = a[k][j] / a[k][k];
                    for row in a.iter_mut() {
                        row[j] -= f * row[k];
                    }
                    for row in v.iter_mut() {
                        row[j] -= f * row[k];
                    }
                    for l in 0..c {
                        vi[k][l] += f * vi[j][l];
                    }
                    dirty |= a[k][j] != 0;
                }
            }
            if dirty {
                continue;
            }
            let p = a[k][k];
            let bad = (k + 1..r).find(|&i| (k + 1..c).any(|j| a[i][j] % p != 0));
            match bad {
                Some(i) => {
                    for j in 0..c {
                        a[k][j] += a[i][j];
                    }
                    for j in 0..r {
                        u[k][j] += u[i][j];
                    }
                }
                None => break,
            }
        }
        if a[k][k] < 0 {
            for x in a[k].iter_mut() {
                *x = -*x;
            }
            for x in u[k].iter_mut() {
                *x = -*x;
            }
        }
    }
    let conv = |x: &Vec<Vec<i128>>, rr: usize, cc: usize| {
        DMatrix::from_fn(rr, cc, |i, j| i64::try_from(x[i][j]).expect("SNF entry overflow"))
    };
    Snf {
        u: conv(&u, r, r),
        d: conv(&a, r, c),
        v: conv(&v, c, c),
        v_inv: conv(&vi, c, c),
    }
}

/// Integer basis (columns) of the kernel `{x in Z^c : A x = 0}`; saturated.
pub fn integer_kernel(a: &DMatrix<i64>) -> DMatrix<i64> {
    let snf = smith_normal_form(a);
    let rank = snf.rank();
    let c = a.ncols();
    snf.v.columns(rank, c - rank).into_owned()
}

/// Result of congruent diagonalisation over the rationals.
pub struct Diagonalization {
    /// Columns are mutually orthogonal basis vectors in the original coordinates.
    pub basis: Vec<Vec<Q>>,
    pub values: Vec<Q>,
}

/// Symmetric Gaussian elimination; `None` if the form is degenerate.
pub fn congruent_diagonalize(g: &DMatrix<i64>) -> Option<Diagonalization> {
    let n = g.nrows();
    let mut a: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| q(g[(i, j)] as i128)).collect())
        .collect();
    // columns of `p` track the current basis: a = p^T g p
    let mut p: Vec<Vec<Q>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect())
        .collect();
    let add_col = |a: &mut Vec<Vec<Q>>, p: &mut Vec<Vec<Q>>, dst: usize, src: usize, f: Q| {
        // basis e_dst += f e_src, applied congruently
        for row in a.iter_mut() {
            let t = row[src];
            row[dst] += f * t;
        }
        let src_row = a[src].clone();
        for (x, y) in a[dst].iter_mut().zip(src_row) {
            *x += f * y;
        }
        for row in p.iter_mut() {
            let t = row[src];
            row[dst] += f * t;
        }
    };
    for k in 0..n {
        if a[k][k].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[j][j].is_zero()) {
                a.swap(k, j);
                for row in a.iter_mut() {
                    row.swap(k, j);
                }
                for row in p.iter_mut() {
                    row.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) {
                add_col(&mut a, &mut p, k, j, Q::one());
            }
        }
        if a[k][k].is_zero() {
            return None;
        }
        for j in k + 1..n {
            if !a[k][j].is_zero() {
                let f = -a[k][j] / a[k][k];
                add_col(&mut a, &mut p, j, k, f);
            }
        }
    }
    let basis = (0..n).map(|j| (0..n).map(|i| p[i][j]).collect()).collect();
    let values = (0..n).map(|i| a[i][i]).collect();
    Some(Diagonalization { basis, values })
}

pub fn gcd_i64(a: i64, b: i64) -> i64 {
    a.gcd(&b)
}

pub fn is_positive(x: &Q) -> bool {
    x.is_positive()
}
