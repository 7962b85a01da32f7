//! Plane curve germs: Puiseux half-branches, contact exponents, and the
//! piecewise maps that realize outer Lipschitz equivalence.

mod contact;
mod equivalence;
mod piecewise;
mod puiseux;
mod series;

pub use contact::{contact_exponent, contact_exponent_numeric, contact_matrix, match_halfbranches, sphere_point};
pub use equivalence::{ambient_curve_equivalence, cone_half_angle, polar_round_trip, sphere_hausdorff};
pub use piecewise::{
    stack_graphs, straighten_graph, ConeChart, Piece, PiecewiseGermMap, Profile, ProfileCurve, QuadrantMap,
    Region, Step,
};
pub use puiseux::{eval_branch, Axis, GermCurve, PuiseuxBranch, TangentGroup};
