//! Real quadratic space: Grassmannian points, projections, majorants and the
//! discriminant kernel.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{exact, DirectSum, Lattice, PrimitiveSublattice};
use crate::tolerances::REAL_TOL;

/// A point `v` of the Grassmannian of `L_R`, stored through a basis of `v+`.
#[derive(Debug, Clone)]
pub struct GrassmannianPoint {
    lattice: Lattice,
    v_plus: DMatrix<f64>,
    gram: DMatrix<f64>,
    p_plus: DMatrix<f64>,
    p_minus: DMatrix<f64>,
    q_plus: DMatrix<f64>,
    q_minus: DMatrix<f64>,
    majorant: DMatrix<f64>,
    w_plus: DMatrix<f64>,
    w_minus: DMatrix<f64>,
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn is_positive_definite(m: &DMatrix<f64>) -> bool {
    if m.nrows() == 0 {
        return true;
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let scale = eig.eigenvalues.amax().max(1.0);
    eig.eigenvalues.iter().all(|&e| e > REAL_TOL * scale)
}

/// `V C^{-T}` where `C C^T = V^T S V`; columns become orthonormal for `S`.
fn orthonormalize(v: &DMatrix<f64>, form: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    if v.ncols() == 0 {
        return Some(v.clone());
    }
    let s = symmetrize(&(v.transpose() * form * v));
    let chol = Cholesky::new(s)?;
    let l = chol.l();
    let l_inv_t = l.try_inverse()?.transpose();
    Some(v * l_inv_t)
}

impl GrassmannianPoint {
    pub fn new(lattice: &Lattice, v_plus: DMatrix<f64>) -> Result<Self> {
        let n = lattice.rank();
        let bp = lattice.b_plus();
        if v_plus.nrows() != n || v_plus.ncols() != bp {
            return Err(Error::WrongDimension(format!(
                "v_plus_basis must be {n}x{bp}, got {}x{}",
                v_plus.nrows(),
                v_plus.ncols()
            )));
        }
        let gram = lattice.gram_f64();
        let s = v_plus.transpose() * &gram * &v_plus;
        if !is_positive_definite(&s) {
            return Err(Error::NotPositiveOnVplus);
        }
        let s_inv = s.clone().try_inverse().ok_or(Error::NotPositiveOnVplus)?;
        let p_plus = &v_plus * s_inv * v_plus.transpose() * &gram;
        let p_minus = DMatrix::identity(n, n) - &p_plus;
        let q_plus = symmetrize(&(&gram * &p_plus));
        let q_minus = symmetrize(&(&gram * &p_minus));
        let majorant = &q_plus - &q_minus;
        if !is_positive_definite(&majorant) {
            return Err(Error::NotPositiveOnVplus);
        }
        let w_plus = orthonormalize(&v_plus, &gram).ok_or(Error::NotPositiveOnVplus)?;
        let w_minus = if lattice.b_minus() == 0 {
            DMatrix::zeros(n, 0)
        } else {
            let gv = &gram * &v_plus;
            let eig = SymmetricEigen::new(&gv * gv.transpose());
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
            let cols: Vec<DVector<f64>> = idx[..lattice.b_minus()]
                .iter()
                .map(|&i| eig.eigenvectors.column(i).into_owned())
                .collect();
            let null = DMatrix::from_columns(&cols);
            orthonormalize(&null, &(-&gram)).ok_or(Error::NotPositiveOnVplus)?
        };
        Ok(Self {
            lattice: lattice.clone(),
            v_plus,
            gram,
            p_plus,
            p_minus,
            q_plus,
            q_minus,
            majorant,
            w_plus,
            w_minus,
        })
    }

    /// A canonical point built from the exact diagonalisation of the Gram
    /// matrix. For definite lattices this is the unique point.
    pub fn standard(lattice: &Lattice) -> Self {
        let n = lattice.rank();
        let basis = lattice.positive_basis();
        let v = DMatrix::from_fn(n, basis.len(), |i, j| exact::to_f64(&basis[j][i]));
        Self::new(lattice, v).expect("positive diagonal vectors span a positive subspace")
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn v_plus_basis(&self) -> &DMatrix<f64> {
        &self.v_plus
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn projector_plus(&self) -> &DMatrix<f64> {
        &self.p_plus
    }

    pub fn projector_minus(&self) -> &DMatrix<f64> {
        &self.p_minus
    }

    /// `G P+`, the Gram matrix of `λ ↦ λ_{v+}²`.
    pub fn q_plus(&self) -> &DMatrix<f64> {
        &self.q_plus
    }

    pub fn q_minus(&self) -> &DMatrix<f64> {
        &self.q_minus
    }

    pub fn majorant(&self) -> &DMatrix<f64> {
        &self.majorant
    }

    /// Basis of `v+` with `w^T G w = I`.
    pub fn orthonormal_plus(&self) -> &DMatrix<f64> {
        &self.w_plus
    }

    /// Basis of `v-` with `w^T G w = -I`.
    pub fn orthonormal_minus(&self) -> &DMatrix<f64> {
        &self.w_minus
    }

    pub fn project(&self, x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        (&self.p_plus * x, &self.p_minus * x)
    }

    pub fn project_c(&self, z: &DVector<Complex64>) -> (DVector<Complex64>, DVector<Complex64>) {
        let pp = self.p_plus.map(|x| Complex64::new(x, 0.0));
        let pm = self.p_minus.map(|x| Complex64::new(x, 0.0));
        (&pp * z, &pm * z)
    }

    pub fn majorant_norm(&self, x: &DVector<f64>) -> f64 {
        x.dot(&(&self.majorant * x))
    }

    /// `(λ_{v+}², λ_{v-}²)`.
    pub fn split_norms(&self, x: &DVector<f64>) -> (f64, f64) {
        (x.dot(&(&self.q_plus * x)), x.dot(&(&self.q_minus * x)))
    }

    /// The image point `A v` for an isometry `A`.
    pub fn apply(&self, a: &DMatrix<i64>) -> Result<Self> {
        let af = a.map(|x| x as f64);
        Self::new(&self.lattice, af * &self.v_plus)
    }

    /// The same subspace expressed in a new basis whose vectors are the
    /// columns of `b` (old coordinates).
    pub fn rebase(&self, target: &Lattice, b: &DMatrix<i64>) -> Result<Self> {
        let bf = b.map(|x| x as f64);
        let inv = bf
            .try_inverse()
            .ok_or_else(|| Error::WrongDimension("singular basis change".into()))?;
        Self::new(target, inv * &self.v_plus)
    }

    /// The point of `L(-1)` whose positive part is `v-`.
    pub fn negated(&self) -> Self {
        let l = self.lattice.rescale(-1).expect("nonzero scale");
        Self::new(&l, self.w_minus.clone()).expect("v- is positive for L(-1)")
    }

    pub fn to_json(&self) -> GrassmannianJson {
        GrassmannianJson {
            v_plus_basis: self
                .v_plus
                .row_iter()
                .map(|r| r.iter().copied().collect())
                .collect(),
        }
    }

    pub fn from_json(lattice: &Lattice, j: &GrassmannianJson) -> Result<Self> {
        let n = j.v_plus_basis.len();
        let c = j.v_plus_basis.first().map_or(lattice.b_plus(), |r| r.len());
        if j.v_plus_basis.iter().any(|r| r.len() != c) {
            return Err(Error::WrongDimension("ragged v_plus_basis".into()));
        }
        Self::new(lattice, DMatrix::from_fn(n, c, |i, k| j.v_plus_basis[i][k]))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GrassmannianJson {
    pub v_plus_basis: Vec<Vec<f64>>,
}

/// Membership in the discriminant kernel `Γ_L`.
///
/// Returns `Err(NotIsometry)` when `A` does not preserve the form.
pub fn in_discriminant_kernel(l: &Lattice, v: &GrassmannianPoint, a: &DMatrix<i64>) -> Result<bool> {
    let n = l.rank();
    if a.nrows() != n || a.ncols() != n {
        return Err(Error::WrongDimension("isometry".into()));
    }
    if a.transpose() * l.gram() * a != *l.gram() {
        return Err(Error::NotIsometry);
    }
    if exact::det(a) != 1 {
        return Ok(false);
    }
    let w = v.orthonormal_plus();
    let af = a.map(|x| x as f64);
    let block = w.transpose() * v.gram() * af * w;
    if block.nrows() > 0 && block.determinant() <= 0.0 {
        return Ok(false);
    }
    let d = l.discriminant();
    for rep in d.reps() {
        let img = exact::mat_vec_q(a, rep);
        if img.iter().zip(rep).any(|(x, y)| !(*x - *y).is_integer()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `v ⊕ w` on `L ⊕ K`.
pub fn grassmannian_sum(v: &GrassmannianPoint, w: &GrassmannianPoint) -> (DirectSum, GrassmannianPoint) {
    let sum = v.lattice.direct_sum(&w.lattice);
    let (n, k) = (v.rank(), w.rank());
    let (bv, bw) = (v.v_plus.ncols(), w.v_plus.ncols());
    let mut basis = DMatrix::zeros(n + k, bv + bw);
    basis.view_mut((0, 0), (n, bv)).copy_from(&v.v_plus);
    basis.view_mut((n, bv), (k, bw)).copy_from(&w.v_plus);
    let p = GrassmannianPoint::new(&sum.lattice, basis).expect("block sum of positive subspaces");
    (sum, p)
}

/// The lattice `L +_ι K` with form `λ² + (ιλ)²` and the point `v +_ι w`.
pub fn plus_iota(
    l: &Lattice,
    k: &Lattice,
    iota: &DMatrix<i64>,
    v: &GrassmannianPoint,
    w: &GrassmannianPoint,
) -> Result<(Lattice, GrassmannianPoint)> {
    let n = l.rank();
    if k.rank() != n || iota.nrows() != n || iota.ncols() != n || exact::det(iota).abs() != 1 {
        return Err(Error::NotIsomorphism);
    }
    let io = iota.map(|x| x as f64);
    let img_plus = &io * v.v_plus_basis();
    let img_minus = &io * v.orthonormal_minus();
    let leak_plus = w.projector_minus() * &img_plus;
    let leak_minus = w.projector_plus() * &img_minus;
    let scale = img_plus.amax().max(img_minus.amax()).max(1.0);
    if leak_plus.amax() > REAL_TOL * scale || leak_minus.amax() > REAL_TOL * scale {
        return Err(Error::GrassmannianMismatch);
    }
    let sum = Lattice::new(l.gram() + iota.transpose() * k.gram() * iota)?;
    if sum.signature() != l.signature() {
        return Err(Error::GrassmannianMismatch);
    }
    let p = GrassmannianPoint::new(&sum, v.v_plus_basis().clone())?;
    Ok((sum, p))
}

/// `u ⊕ u^⊥` for a primitive sublattice `M` and its complement.
pub fn join_point(sub: &PrimitiveSublattice, u: &GrassmannianPoint, u_perp: &GrassmannianPoint) -> Result<GrassmannianPoint> {
    if u.lattice != sub.lattice || u_perp.lattice != sub.complement {
        return Err(Error::GrassmannianMismatch);
    }
    let bm = sub.basis.map(|x| x as f64);
    let bc = sub.complement_basis.map(|x| x as f64);
    let a = &bm * &u.v_plus;
    let b = &bc * &u_perp.v_plus;
    let n = sub.ambient.rank();
    let mut basis = DMatrix::zeros(n, a.ncols() + b.ncols());
    basis.view_mut((0, 0), (n, a.ncols())).copy_from(&a);
    basis.view_mut((0, a.ncols()), (n, b.ncols())).copy_from(&b);
    GrassmannianPoint::new(&sub.ambient, basis)
}

/// Splits `v = u ⊕ u^⊥`; fails with `GrassmannianMismatch` when `v+` is not
/// spanned by its intersections with `M_R` and `(M^⊥)_R`.
pub fn split_point(sub: &PrimitiveSublattice, v: &GrassmannianPoint) -> Result<(GrassmannianPoint, GrassmannianPoint)> {
    if v.lattice != sub.ambient {
        return Err(Error::GrassmannianMismatch);
    }
    let part = |b: &DMatrix<i64>, target: &Lattice| -> Result<GrassmannianPoint> {
        let bf = b.map(|x| x as f64);
        let img = &v.p_plus * &bf;
        let normal = bf.transpose() * &bf;
        let x = normal
            .try_inverse()
            .ok_or(Error::Degenerate)?
            * bf.transpose()
            * &img;
        let scale = img.amax().max(1.0);
        if (&bf * &x - &img).amax() > 1e-9 * scale {
            return Err(Error::GrassmannianMismatch);
        }
        let k = target.b_plus();
        if k == 0 {
            return GrassmannianPoint::new(target, DMatrix::zeros(target.rank(), 0));
        }
        let svd = x.svd(true, false);
        let u = svd.u.ok_or(Error::Degenerate)?;
        let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
        idx.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
        let cols: Vec<_> = idx[..k].iter().map(|&i| u.column(i).into_owned()).collect();
        GrassmannianPoint::new(target, DMatrix::from_columns(&cols))
    };
    let u = part(&sub.basis, &sub.lattice)?;
    let w = part(&sub.complement_basis, &sub.complement)?;
    if u.lattice.b_plus() + w.lattice.b_plus() != v.lattice.b_plus() {
        return Err(Error::GrassmannianMismatch);
    }
    Ok((u, w))
}
