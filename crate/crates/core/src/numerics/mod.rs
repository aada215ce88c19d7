//! Small numerical kernels shared by the constitutive layer and the solver.

pub mod chebyshev;
pub mod quadrature;
pub mod roots;
pub mod tridiag;
