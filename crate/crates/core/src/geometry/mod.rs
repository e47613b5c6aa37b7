//! Planar cones, radial-graph domains, and their geometric quantities.

mod domain;
mod metrics;
mod partition;
mod radius;

pub use domain::{make_sector_domain, ArcLengthTable, Cone2D, DomainSpec};
pub use metrics::{
    cone_condition_estimate, corner_angles, diameter, exterior_sphere_radius, geometry_report,
    interior_sphere_radius, orthogonal_corners, rho_extremes, serrin_radius, GeometryReport,
    InteriorSphere,
};
pub use partition::{boundary_partition, normal_span, BoundaryPartition, Segment, SpanInfo};
pub use radius::{CubicSpline, RadiusFn};
