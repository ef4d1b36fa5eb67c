//! Grids, banded operators, eigensolvers and the ODE integrator.

pub mod eigen;
pub mod grid;
pub mod ivp;
pub mod operator;

pub use eigen::{
    residual_bound,
    classify, conjugation_closure_error, eigen_solve, eigenvalues, real_tolerance, EigenClass, Selection, Spectrum,
};
pub use grid::Grid;
pub use ivp::{integrate_ivp, IvpOptions, Trajectory};
pub use operator::{
    first_derivative_operator, momentum_operator, second_derivative_operator, BandedComplexOperator, Boundary,
};
