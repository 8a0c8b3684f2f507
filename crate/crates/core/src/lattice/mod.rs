//! Even lattices: Gram matrices, signatures, discriminant groups, rescaling,
//! direct sums, sublattices and overlattices.

mod discriminant;
pub mod exact;
mod sublattice;

use std::fmt;
use std::sync::{Arc, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use discriminant::DiscriminantGroup;
pub use exact::{smith_normal_form, Snf, Q};
pub use sublattice::{
    overlattice_from_isotropic, sublattice_embed, IsotropicSubgroupData, PrimitiveSublattice,
};

/// An even non-degenerate lattice given by its Gram matrix.
#[derive(Clone)]
pub struct Lattice {
    gram: DMatrix<i64>,
    signature: (usize, usize),
    det: i128,
    positive_basis: Vec<Vec<Q>>,
    disc: Arc<OnceLock<DiscriminantGroup>>,
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<Vec<i64>> = self.gram.row_iter().map(|r| r.iter().copied().collect()).collect();
        f.debug_struct("Lattice")
            .field("gram", &rows)
            .field("signature", &self.signature)
            .finish()
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for Lattice {}

impl Lattice {
    /// Validate a Gram matrix and compute the signature exactly.
    pub fn new(gram: DMatrix<i64>) -> Result<Self> {
        let n = gram.nrows();
        if gram.ncols() != n {
            return Err(Error::NotSquare);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[(i, j)] != gram[(j, i)] {
                    return Err(Error::NotSymmetric);
                }
            }
            if gram[(i, i)] % 2 != 0 {
                return Err(Error::OddDiagonal);
            }
        }
        let det = exact::det(&gram);
        if det == 0 {
            return Err(Error::Degenerate);
        }
        let diag = exact::congruent_diagonalize(&gram).ok_or(Error::Degenerate)?;
        let mut positive_basis = Vec::new();
        let mut b_minus = 0;
        for (vec, val) in diag.basis.into_iter().zip(diag.values) {
            if val.is_positive() {
                positive_basis.push(vec);
            } else {
                b_minus += 1;
            }
        }
        Ok(Self {
            signature: (positive_basis.len(), b_minus),
            gram,
            det,
            positive_basis,
            disc: Arc::new(OnceLock::new()),
        })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// The rank-0 lattice.
    pub fn trivial() -> Self {
        Self::new(DMatrix::zeros(0, 0)).expect("rank 0 is valid")
    }

    /// `A_2(m)`: rank one, generator of norm `2m`.
    pub fn a2(m: i64) -> Self {
        Self::from_rows(&[vec![2 * m]]).expect("valid rank one lattice")
    }

    /// Diagonal lattice with the given (even) entries.
    pub fn diagonal(entries: &[i64]) -> Result<Self> {
        let n = entries.len();
        Self::new(DMatrix::from_fn(n, n, |i, j| if i == j { entries[i] } else { 0 }))
    }

    pub fn gram(&self) -> &DMatrix<i64> {
        &self.gram
    }

    pub fn gram_f64(&self) -> DMatrix<f64> {
        self.gram.map(|x| x as f64)
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.gram.row_iter().map(|r| r.iter().copied().collect()).collect()
    }

    pub fn rank(&self) -> usize {
        self.gram.nrows()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn b_plus(&self) -> usize {
        self.signature.0
    }

    pub fn b_minus(&self) -> usize {
        self.signature.1
    }

    pub fn det(&self) -> i128 {
        self.det
    }

    pub fn is_definite(&self) -> bool {
        self.signature.0 == 0 || self.signature.1 == 0
    }

    /// Rational vectors spanning a maximal positive definite subspace.
    pub fn positive_basis(&self) -> &[Vec<Q>] {
        &self.positive_basis
    }

    pub fn discriminant(&self) -> &DiscriminantGroup {
        self.disc.get_or_init(|| DiscriminantGroup::new(&self.gram))
    }

    pub fn pair_q(&self, x: &[Q], y: &[Q]) -> Q {
        exact::bilinear_q(&self.gram, x, y)
    }

    pub fn pair_f64(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(self.gram_f64() * y))
    }

    /// Multiply the form by `m` (the lattice `L(m)`).
    pub fn rescale(&self, m: i64) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroScale);
        }
        Self::new(self.gram.map(|x| x * m))
    }

    /// Orthogonal direct sum together with the coset index map.
    pub fn direct_sum(&self, other: &Lattice) -> DirectSum {
        let (n, k) = (self.rank(), other.rank());
        let mut g = DMatrix::zeros(n + k, n + k);
        g.view_mut((0, 0), (n, n)).copy_from(&self.gram);
        g.view_mut((n, n), (k, k)).copy_from(&other.gram);
        let lattice = Lattice::new(g).expect("direct sum of valid lattices is valid");
        let (da, db) = (self.discriminant(), other.discriminant());
        let sum = lattice.discriminant();
        let mut index_map = Vec::with_capacity(da.order() * db.order());
        for i in 0..da.order() {
            for j in 0..db.order() {
                let mut x = da.rep(i).to_vec();
                x.extend_from_slice(db.rep(j));
                index_map.push(sum.coset_of(&x).expect("sum of dual vectors is dual"));
            }
        }
        DirectSum {
            lattice,
            left_rank: n,
            left_order: da.order(),
            right_order: db.order(),
            index_map,
        }
    }

    pub fn to_json(&self) -> LatticeJson {
        LatticeJson { gram: self.rows() }
    }
}

/// `L ⊕ K` with `index_map[i * |D_K| + j]` the coset of `(γ_i, δ_j)`.
#[derive(Debug, Clone)]
pub struct DirectSum {
    pub lattice: Lattice,
    pub left_rank: usize,
    pub left_order: usize,
    pub right_order: usize,
    pub index_map: Vec<usize>,
}

impl DirectSum {
    pub fn index(&self, i: usize, j: usize) -> usize {
        self.index_map[i * self.right_order + j]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeJson {
    pub gram: Vec<Vec<i64>>,
}

impl TryFrom<LatticeJson> for Lattice {
    type Error = Error;
    fn try_from(j: LatticeJson) -> Result<Self> {
        Lattice::from_rows(&j.gram)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisChangeJson {
    pub basis_change: Vec<Vec<i64>>,
}

impl BasisChangeJson {
    pub fn matrix(&self) -> Result<DMatrix<i64>> {
        let r = self.basis_change.len();
        let c = self.basis_change.first().map_or(0, |x| x.len());
        if self.basis_change.iter().any(|row| row.len() != c) {
            return Err(Error::WrongDimension("ragged basis_change".into()));
        }
        Ok(DMatrix::from_fn(r, c, |i, j| self.basis_change[i][j]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_signatures() {
        assert_eq!(Lattice::a2(1).signature(), (1, 0));
        let h = Lattice::from_rows(&[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(h.signature(), (1, 1));
        assert_eq!(h.det(), -1);
        assert_eq!(h.discriminant().order(), 1);
        assert_eq!(
            Lattice::from_rows(&[vec![2, 1], vec![1, 1]]).unwrap_err(),
            Error::OddDiagonal
        );
        assert_eq!(
            Lattice::from_rows(&[vec![2, 1], vec![0, 2]]).unwrap_err(),
            Error::NotSymmetric
        );
        assert_eq!(
            Lattice::from_rows(&[vec![2, 2], vec![2, 2]]).unwrap_err(),
            Error::Degenerate
        );
        let t = Lattice::trivial();
        assert_eq!(t.signature(), (0, 0));
        assert_eq!(t.discriminant().order(), 1);
    }

    #[test]
    fn zero_diagonal_signatures() {
        let l = Lattice::from_rows(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -2]]).unwrap();
        assert_eq!(l.signature(), (1, 2));
        let l = Lattice::from_rows(&[vec![0, 3], vec![3, 0]]).unwrap();
        assert_eq!(l.signature(), (1, 1));
        let l = Lattice::from_rows(&[vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]).unwrap();
        assert_eq!(l.signature(), (1, 2));
        assert_eq!(l.det(), 2);
    }

    #[test]
    fn rescale_and_sum() {
        let l = Lattice::a2(1).rescale(-1).unwrap();
        assert_eq!(l.rows(), vec![vec![-2]]);
        assert_eq!(l.signature(), (0, 1));
        assert_eq!(Lattice::a2(1).rescale(2).unwrap().discriminant().order(), 4);
        assert_eq!(Lattice::a2(1).rescale(0).unwrap_err(), Error::ZeroScale);
        let s = Lattice::a2(1).direct_sum(&Lattice::a2(1).rescale(-1).unwrap());
        assert_eq!(s.lattice.signature(), (1, 1));
        assert_eq!(s.lattice.discriminant().order(), 4);
        let t = Lattice::a2(3).direct_sum(&Lattice::trivial());
        assert_eq!(t.lattice, Lattice::a2(3));
        assert_eq!(t.index_map, (0..6).collect::<Vec<_>>());
    }
}
