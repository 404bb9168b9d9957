//! Two-site distance functions, sampled nearest and furthest two-site
//! Voronoi diagrams, and empirical checks of their structure against exact
//! combinatorial oracles.

pub mod arrangement;
pub mod constructions;
pub mod distances;
pub mod error;
pub mod geom;
pub mod neighbors;
pub mod points_file;
pub mod raster;
pub mod render;
pub mod verify;

pub use distances::{eval, DistanceKind, DistanceSpec, DistanceValue, SitePair};
pub use error::{GeomError, Result};
pub use geom::{Circle, Orientation, Point2};
