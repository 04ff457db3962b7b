mod checks;
mod domains;
mod euler;
mod march;

pub use domains::{count_domains, DomainDecomposition};
pub use euler::{euler_graph, singular_points, EulerReport, NodalGraph, ReflectionParity, SingularPoint};
pub use march::{extract_nodal, NodalCurveSet, Polyline};
pub use checks::{
    boundary_zero_count, faber_krahn_bound, faber_krahn_check, leading_polynomial_fit, small_ball_check, BoundaryCount,
    FaberKrahnReport, LeadingFit, SmallBallReport,
};
pub(crate) use euler::refine_critical;
