//! Jacobi forms of lattice index: lifts of vector valued modular forms, Fourier
//! inversion, functional equations, heat operators and the operator calculus
//! (tilde, contraction, restriction, products, arrows).

mod arrows;
mod coeffs;
mod contraction;
pub mod form;
mod fourier;
mod lift;
pub mod product;
pub mod qseries;
mod residual;

pub use arrows::{downarrow_jacobi, downarrow_skew, uparrow_jacobi, ArrowComparison};
pub use coeffs::{a_coefficient, jacobi_fourier_coeffs, shift_index, FourierEntry};
pub use contraction::{contraction_form, theta_contraction};
pub use form::{
    down_form, theta_q_expansion, tilde_mf, up_form, Evaluator, FormKind, ModularForm, QCoeffJson,
    QExpansionJson, QTerm, Rep,
};
pub use fourier::{fourier_invert, FourierCoefficient, FourierInversion, GRID_BUDGET};
pub use lift::{
    jacobi_from_mf, product_pair, restrict, scalar_multiple, skew_jacobi_from_mf, times_imag_tau, FnJacobi,
    JacobiFn, JacobiForm, JacobiFormHandle, ProductForm, Restriction, ThetaLift,
};
pub use product::{conjecture_scan, p_coefficients, product_decompose, PCoefficient, PTable, ScanEntry, ScanStatus};
pub use qseries::{BiSeries, QSeries};
pub use residual::{diff_residual, functional_residual, heat_residual_fd, Functional};
