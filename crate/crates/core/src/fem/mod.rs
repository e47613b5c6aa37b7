//! Lagrange finite elements for the mixed torsion problem.

mod assemble;
mod field;
mod quadrature;
mod space;

pub use assemble::{
    assemble, assemble_poisson, assemble_with, mass_matrix, solve, solve_torsion, solve_with_info,
    weighted_stiffness, LinearSystem, SolveInfo, SOLVE_TOLERANCE,
};
pub use field::FemField;
pub use quadrature::{triangle_degree2, triangle_degree5, triangle_rule, TriPoint};
pub use space::{EdgePoint, FemSpace, QuadPoint};
