use nalgebra::DMatrix;
use num_integer::Integer;
use num_traits::Zero;

use super::exact::{self, q, Q};
use super::Lattice;
use crate::error::{Error, Result};

/// Data attached to a finite index sublattice `Λ ⊂ L`: the isotropic subgroup
/// `H = L/Λ` of `D_Λ`, its orthogonal `H^⊥` and the quotient map onto `D_L`.
#[derive(Debug, Clone)]
pub struct IsotropicSubgroupData {
    pub parent: Lattice,
    pub overlattice: Lattice,
    /// Columns are the basis of `Λ` written in the basis of `L`.
    pub basis_change: DMatrix<i64>,
    pub h_generators: Vec<usize>,
    pub h: Vec<usize>,
    pub h_perp: Vec<usize>,
    /// `quotient[i]` is the coset of `D_L` hit by `h_perp[i]`.
    pub quotient: Vec<usize>,
}

impl IsotropicSubgroupData {
    pub fn h_order(&self) -> usize {
        self.h.len()
    }

    /// Image in `D_L` of a coset of `D_Λ`, if it lies in `H^⊥`.
    pub fn quotient_of(&self, delta: usize) -> Option<usize> {
        self.h_perp
            .binary_search(&delta)
            .ok()
            .map(|i| self.quotient[i])
    }
}

/// Restrict `L` to the sublattice spanned by the columns of `b`.
pub fn sublattice_embed(l: &Lattice, b: &DMatrix<i64>) -> Result<(Lattice, IsotropicSubgroupData)> {
    let n = l.rank();
    if b.nrows() != n || b.ncols() != n {
        return Err(Error::DegenerateEmbedding);
    }
    let det_b = exact::det(b);
    if det_b == 0 {
        return Err(Error::DegenerateEmbedding);
    }
    let lambda = Lattice::new(b.transpose() * l.gram() * b)?;
    let b_inv = exact::rational_inverse(b).ok_or(Error::DegenerateEmbedding)?;
    let d_lambda = lambda.discriminant();
    let mut gens = Vec::new();
    for i in 0..n {
        let col: Vec<Q> = (0..n).map(|r| b_inv[r][i]).collect();
        let c = d_lambda
            .coset_of(&col)
            .expect("vectors of L pair integrally with Λ");
        if c != 0 && !gens.contains(&c) {
            gens.push(c);
        }
    }
    let h = d_lambda.subgroup(&gens);
    assert_eq!(h.len() as i128, det_b.abs(), "|L/Λ| must equal |det B|");
    let d_l = l.discriminant();
    let mut h_perp = Vec::new();
    let mut quotient = Vec::new();
    for delta in 0..d_lambda.order() {
        if gens.iter().all(|&g| d_lambda.bilinear(delta, g).is_zero()) {
            let x = exact::mat_vec_q(b, d_lambda.rep(delta));
            h_perp.push(delta);
            quotient.push(d_l.coset_of(&x).expect("H-perp lands in L*"));
        }
    }
    let data = IsotropicSubgroupData {
        parent: lambda.clone(),
        overlattice: l.clone(),
        basis_change: b.clone(),
        h_generators: gens,
        h,
        h_perp,
        quotient,
    };
    Ok((lambda, data))
}

/// The overlattice of `Λ` obtained by adjoining lifts of the given cosets.
pub fn overlattice_from_isotropic(
    lambda: &Lattice,
    gens: &[usize],
) -> Result<(Lattice, IsotropicSubgroupData)> {
    let d = lambda.discriminant();
    let two = q(2);
    for (a, &g) in gens.iter().enumerate() {
        if g >= d.order() || !exact::modulo(d.q_value(g), two).is_zero() {
            return Err(Error::NotIsotropic);
        }
        for &h in &gens[a + 1..] {
            if !d.bilinear(g, h).is_zero() {
                return Err(Error::NotIsotropic);
            }
        }
    }
    let n = lambda.rank();
    let den = gens
        .iter()
        .flat_map(|&g| d.rep(g).iter().map(|x| *x.denom()))
        .fold(1i128, |a, b| a.lcm(&b));
    let k = gens.len();
    let mut m = DMatrix::<i64>::zeros(n, n + k);
    for i in 0..n {
        m[(i, i)] = den as i64;
    }
    for (j, &g) in gens.iter().enumerate() {
        for i in 0..n {
            m[(i, n + j)] = (d.rep(g)[i] * q(den)).to_integer() as i64;
        }
    }
    let snf = exact::smith_normal_form(&m);
    let u_inv = exact::unimodular_inverse(&snf.u).expect("U is unimodular");
    // basis of L in Λ-coordinates: columns of U^{-1} diag(d) / den
    let c: Vec<Vec<Q>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Q::new(u_inv[(i, j)] as i128 * snf.d[(j, j)] as i128, den))
                .collect()
        })
        .collect();
    let mut gram = DMatrix::<i64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let ci: Vec<Q> = (0..n).map(|r| c[r][i]).collect();
            let cj: Vec<Q> = (0..n).map(|r| c[r][j]).collect();
            let v = lambda.pair_q(&ci, &cj);
            if !v.is_integer() {
                return Err(Error::NotIsotropic);
            }
            gram[(i, j)] = v.to_integer() as i64;
        }
    }
    let l = Lattice::new(gram).map_err(|_| Error::NotIsotropic)?;
    // B = C^{-1}: the basis of Λ in L-coordinates
    let c_num = DMatrix::from_fn(n, n, |i, j| (c[i][j] * q(den)).to_integer() as i64);
    let c_num_inv = exact::rational_inverse(&c_num).ok_or(Error::DegenerateEmbedding)?;
    let b = DMatrix::from_fn(n, n, |i, j| {
        let x = c_num_inv[i][j] * q(den);
        assert!(x.is_integer(), "Λ must sit inside L");
        x.to_integer() as i64
    });
    let (lam2, data) = sublattice_embed(&l, &b)?;
    debug_assert_eq!(&lam2, lambda);
    Ok((l, data))
}

/// A primitive non-degenerate sublattice `M ⊂ L` together with `M^⊥_L`.
#[derive(Debug, Clone)]
pub struct PrimitiveSublattice {
    pub ambient: Lattice,
    /// `n × c`, columns are a basis of `M` in L-coordinates.
    pub basis: DMatrix<i64>,
    pub lattice: Lattice,
    /// `n × (n - c)`, columns are a basis of `M^⊥_L`.
    pub complement_basis: DMatrix<i64>,
    pub complement: Lattice,
}

impl PrimitiveSublattice {
    pub fn new(l: &Lattice, basis: DMatrix<i64>) -> Result<Self> {
        let n = l.rank();
        if basis.nrows() != n || basis.ncols() > n {
            return Err(Error::WrongDimension("sublattice basis".into()));
        }
        let c = basis.ncols();
        let snf = exact::smith_normal_form(&basis);
        if snf.rank() != c || snf.diagonal().iter().any(|&x| x != 1) {
            return Err(Error::NotPrimitive);
        }
        let m = Lattice::new(basis.transpose() * l.gram() * &basis)?;
        let complement_basis = if c == 0 {
            DMatrix::identity(n, n)
        } else {
            exact::integer_kernel(&(basis.transpose() * l.gram()))
        };
        let complement =
            Lattice::new(complement_basis.transpose() * l.gram() * &complement_basis)?;
        Ok(Self {
            ambient: l.clone(),
            basis,
            lattice: m,
            complement_basis,
            complement,
        })
    }

    /// `[basis | complement_basis]`, an `n × n` matrix of full rank.
    pub fn joint_basis(&self) -> DMatrix<i64> {
        let n = self.ambient.rank();
        let c = self.basis.ncols();
        let mut j = DMatrix::zeros(n, n);
        j.view_mut((0, 0), (n, c)).copy_from(&self.basis);
        j.view_mut((0, c), (n, n - c)).copy_from(&self.complement_basis);
        j
    }

    pub fn is_split(&self) -> bool {
        exact::det(&self.joint_basis()).abs() == 1
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_one_in_a2_four() {
        let l = Lattice::a2(1);
        let (lam, data) = sublattice_embed(&l, &DMatrix::from_element(1, 1, 2)).unwrap();
        assert_eq!(lam, Lattice::a2(4));
        assert_eq!(data.h, vec![0, 4]);
        assert_eq!(data.h_perp, vec![0, 2, 4, 6]);
        assert_eq!(data.quotient, vec![0, 1, 0, 1]);
        let (back, d2) = overlattice_from_isotropic(&lam, &[4]).unwrap();
        assert_eq!(back, l);
        assert_eq!(d2.h, vec![0, 4]);
        assert_eq!(overlattice_from_isotropic(&lam, &[2]).unwrap_err(), Error::NotIsotropic);
        assert_eq!(overlattice_from_isotropic(&lam, &[1]).unwrap_err(), Error::NotIsotropic);
        let (same, d0) = overlattice_from_isotropic(&lam, &[0]).unwrap();
        assert_eq!(same, lam);
        assert_eq!(d0.h, vec![0]);
    }

    #[test]
    fn identity_embedding() {
        let l = Lattice::from_rows(&[vec![2, 1], vec![1, -4]]).unwrap();
        let (lam, data) = sublattice_embed(&l, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(lam, l);
        assert_eq!(data.h, vec![0]);
        assert_eq!(data.h_perp.len(), l.discriminant().order());
        assert_eq!(data.quotient, data.h_perp);
        let bad = DMatrix::from_row_slice(2, 2, &[1, 2, 2, 4]);
        assert_eq!(sublattice_embed(&l, &bad).unwrap_err(), Error::DegenerateEmbedding);
    }

    #[test]
    fn primitive_sublattices() {
        let a2 = Lattice::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        let m = PrimitiveSublattice::new(&a2, DMatrix::from_column_slice(2, 1, &[1, 0])).unwrap();
        assert_eq!(m.lattice, Lattice::a2(1));
        assert_eq!(m.complement.rows(), vec![vec![6]]);
        assert!(!m.is_split());
        let err = PrimitiveSublattice::new(&a2, DMatrix::from_column_slice(2, 1, &[2, 0]));
        assert_eq!(err.unwrap_err(), Error::NotPrimitive);
        let s = Lattice::a2(1).direct_sum(&Lattice::a2(2)).lattice;
        let m = PrimitiveSublattice::new(&s, DMatrix::from_column_slice(2, 1, &[1, 0])).unwrap();
        assert!(m.is_split());
        assert_eq!(m.complement, Lattice::a2(2));
    }
}
