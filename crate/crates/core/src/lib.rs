//! Bi-Lipschitz embeddings of sampled semialgebraic sets, their extension to
//! tame ambient homeomorphisms, and the plane curve-germ constructions that
//! realize outer Lipschitz equivalence.
//!
//! Sets are finite samples ([`PointCloud`]); every map this crate builds is a
//! [`TameMap`], a composition of triangular shears and determinant-one linear
//! maps that can be evaluated, inverted, serialized and re-verified.

pub mod cli;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod germs;
pub mod json;
pub mod linalg;
pub mod lipschitz;
pub mod projection;
pub mod tame;
pub mod verify;

pub use error::{Error, Result};
pub use extension::{
    extend_embedding, extend_embedding_local, split_coordinates, ExtensionOptions,
    ExtensionResult, Mode, SplitCoordinates,
};
pub use geometry::{
    distortion, secant_directions, sin_angle, Direction, DistortionReport, PointCloud,
    SampledMap, SecantSet,
};
pub use germs::{
    ambient_curve_equivalence, contact_exponent, contact_exponent_numeric, match_halfbranches,
    stack_graphs, straighten_graph, GermCurve, PiecewiseGermMap, PuiseuxBranch,
};
pub use lipschitz::{lipschitz_constant, mcshane_extend, SampledLipschitzFunction};
pub use projection::{
    find_avoiding_direction, germ_whitney_reduce, project_cloud, whitney_reduce,
    ProjectionStep, ReductionResult,
};
pub use tame::{
    graph_transfer, isotopy_eval, projection_to_tame, sl_decompose, ShearMap, TameMap,
    UnimodularMap,
};
pub use verify::{certify_extension, hausdorff, lne_ratio};
