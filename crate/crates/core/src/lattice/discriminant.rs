use nalgebra::{DMatrix, DVector};
use num_traits::Zero;

use super::exact::{self, frac, modulo, q, Q};

/// `D_L = L*/L` realised through the Smith normal form of the Gram matrix.
///
/// Element `i` has divisor-chain coordinates `k_j in [0, d_j)` in mixed radix,
/// most significant first; index 0 is the zero coset.
#[derive(Debug, Clone)]
pub struct DiscriminantGroup {
    gram: DMatrix<i64>,
    divisors: Vec<i64>,
    positions: Vec<usize>,
    v: DMatrix<i64>,
    v_inv: DMatrix<i64>,
    reps: Vec<Vec<Q>>,
    reps_f64: Vec<DVector<f64>>,
    q_values: Vec<Q>,
    neg: Vec<usize>,
}

impl DiscriminantGroup {
    pub(crate) fn new(gram: &DMatrix<i64>) -> Self {
        let n = gram.nrows();
        let snf = exact::smith_normal_form(gram);
        let diag = snf.diagonal();
        let positions: Vec<usize> = (0..n).filter(|&i| diag[i] > 1).collect();
        let divisors: Vec<i64> = positions.iter().map(|&i| diag[i]).collect();
        let order: usize = divisors.iter().map(|&d| d as usize).product();
        let mut g = Self {
            gram: gram.clone(),
            divisors,
            positions,
            v: snf.v,
            v_inv: snf.v_inv,
            reps: Vec::with_capacity(order),
            reps_f64: Vec::with_capacity(order),
            q_values: Vec::with_capacity(order),
            neg: Vec::with_capacity(order),
        };
        for i in 0..order {
            let k = g.coords(i);
            let mut y = vec![Q::zero(); n];
            for (j, &p) in g.positions.iter().enumerate() {
                y[p] = Q::new(k[j] as i128, g.divisors[j] as i128);
            }
            let x = exact::mat_vec_q(&g.v, &y);
            g.q_values.push(modulo(exact::bilinear_q(gram, &x, &x), q(2)));
            g.reps_f64.push(DVector::from_iterator(n, x.iter().map(exact::to_f64)));
            g.reps.push(x);
        }
        for i in 0..order {
            let k: Vec<i64> = g
                .coords(i)
                .iter()
                .zip(&g.divisors)
                .map(|(&a, &d)| (d - a) % d)
                .collect();
            let j = g.index_of_coords(&k);
            g.neg.push(j);
        }
        g
    }

    pub fn order(&self) -> usize {
        self.reps.len()
    }

    /// Invariant factors `d_i > 1`.
    pub fn elementary_divisors(&self) -> &[i64] {
        &self.divisors
    }

    pub fn coords(&self, mut i: usize) -> Vec<i64> {
        let mut k = vec![0; self.divisors.len()];
        for j in (0..self.divisors.len()).rev() {
            let d = self.divisors[j] as usize;
            k[j] = (i % d) as i64;
            i /= d;
        }
        k
    }

    pub fn index_of_coords(&self, k: &[i64]) -> usize {
        k.iter()
            .zip(&self.divisors)
            .fold(0usize, |acc, (&a, &d)| acc * d as usize + a.rem_euclid(d) as usize)
    }

    /// Coset representative in L-coordinates.
    pub fn rep(&self, i: usize) -> &[Q] {
        &self.reps[i]
    }

    pub fn rep_f64(&self, i: usize) -> &DVector<f64> {
        &self.reps_f64[i]
    }

    pub fn reps(&self) -> &[Vec<Q>] {
        &self.reps
    }

    /// `γ²` modulo 2.
    pub fn q_value(&self, i: usize) -> Q {
        self.q_values[i]
    }

    pub fn q_values(&self) -> &[Q] {
        &self.q_values
    }

    /// `(γ, δ)` modulo 1.
    pub fn bilinear(&self, i: usize, j: usize) -> Q {
        frac(exact::bilinear_q(&self.gram, &self.reps[i], &self.reps[j]))
    }

    pub fn pairing_table(&self) -> Vec<Vec<Q>> {
        (0..self.order())
            .map(|i| (0..self.order()).map(|j| self.bilinear(i, j)).collect())
            .collect()
    }

    pub fn neg(&self, i: usize) -> usize {
        self.neg[i]
    }

    pub fn add(&self, i: usize, j: usize) -> usize {
        let a = self.coords(i);
        let b = self.coords(j);
        let k: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        self.index_of_coords(&k)
    }

    /// Coset of a rational vector, `None` if it is not in `L*`.
    pub fn coset_of(&self, x: &[Q]) -> Option<usize> {
        let y = exact::mat_vec_q(&self.v_inv, x);
        let mut k = Vec::with_capacity(self.divisors.len());
        let mut pos = self.positions.iter().zip(&self.divisors).peekable();
        for (i, yi) in y.iter().enumerate() {
            match pos.peek() {
                Some(&(&p, &d)) if p == i => {
                    let t = *yi * q(d as i128);
                    if !t.is_integer() {
                        return None;
                    }
                    k.push(t.to_integer().rem_euclid(d as i128) as i64);
                    pos.next();
                }
                _ => {
                    if !yi.is_integer() {
                        return None;
                    }
                }
            }
        }
        Some(self.index_of_coords(&k))
    }

    /// Coset of an integer multiple `x / den`, convenience for callers with
    /// integer data.
    pub fn coset_of_scaled(&self, x: &[i64], den: i64) -> Option<usize> {
        let v: Vec<Q> = x.iter().map(|&a| Q::new(a as i128, den as i128)).collect();
        self.coset_of(&v)
    }

    /// Closure of a set of generators.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut members = vec![0usize];
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut frontier = vec![0usize];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.add(x, g);
                if !seen[y] {
                    seen[y] = true;
                    members.push(y);
                    frontier.push(y);
                }
            }
        }
        members.sort_unstable();
        members
    }
}
