use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gram matrix is not square")]
    NotSquare,
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("gram matrix has an odd diagonal entry (lattice is not even)")]
    OddDiagonal,
    #[error("gram matrix is degenerate")]
    Degenerate,
    #[error("rescaling by zero")]
    ZeroScale,
    #[error("basis change is singular or has the wrong shape")]
    DegenerateEmbedding,
    #[error("generators do not span an isotropic subgroup")]
    NotIsotropic,
    #[error("dimension mismatch: {0}")]
    WrongDimension(String),
    #[error("gram form is not positive definite on the proposed v+")]
    NotPositiveOnVplus,
    #[error("matrix is not an isometry of the lattice")]
    NotIsometry,
    #[error("iota is not a group isomorphism")]
    NotIsomorphism,
    #[error("iota does not map v+ onto w+ and v- onto w-")]
    GrassmannianMismatch,
    #[error("metaplectic branch could not be resolved")]
    BranchAmbiguous,
    #[error("pairing needs one vector in C[D_L] and one in C[D_L(-1)]")]
    DualMismatch,
    #[error("vector length does not match the isotropic subgroup data")]
    SubgroupMismatch,
    #[error("enumeration exceeded the point budget of {0}")]
    BudgetExceeded(usize),
    #[error("tau must have positive imaginary part")]
    NotInUpperHalfPlane,
    #[error("sublattice is not primitive")]
    NotPrimitive,
    #[error("modular form transforms under the wrong representation")]
    RepMismatch,
    #[error("fourier grid too coarse for requested coefficients")]
    AliasBudget,
    #[error("operation needs a q-expansion input")]
    UnsupportedInput,
    #[error("q precision too low: {0}")]
    PrecisionTooLow(String),
    #[error("bad configuration: {0}")]
    BadConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
