//! Environment maps, ray/obstruction intersection and launch-direction generation.

mod bvh;
mod environment;
mod polygon;
mod tessellation;
mod vector;

pub use environment::{
    incidence_angle, reception_sphere_radius, EnvironmentMap, Hit, Obstruction, MIN_HIT_DISTANCE,
};
pub use polygon::{Aabb, Polygon, COPLANAR_TOLERANCE};
pub use tessellation::{
    direction_count, nominal_spacing, tessellate_half_icosahedron, tessellate_icosahedron,
    Tessellation, BASE_SPACING_DEG,
};
pub use vector::Vec3;
