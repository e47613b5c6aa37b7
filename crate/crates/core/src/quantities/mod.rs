//! Functionals of a solved torsion field: boundary flux, centers, the
//! Cauchy–Schwarz deficit, the integral identity, deficits and pointwise
//! bounds.

mod bounds;
mod boundary;
mod center;
mod identity;
mod report;

pub use boundary::{normal_derivative, BoundaryField, BoundaryPoint};
pub use bounds::{u_distance_bounds, DistanceBounds, FEM_TOLERANCE};
pub use center::{alternative_center, compute_center, span_of, Center};
pub use identity::{cs_deficit, h_field, identity_residual, IdentityReport};
pub use report::{deficits, DeficitReport, CSV_COLUMNS};

/// Gauss points per boundary edge for every boundary functional.
pub const EDGE_POINTS: usize = 3;

#[cfg(test)]
mod tests;
