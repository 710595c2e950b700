//! Curves and the inequalities they are checked against.

mod curve;
pub mod directional;
pub mod l2;
pub mod promotion;
pub mod quasi;
pub mod ray;
mod scan;
pub mod zigzag;

pub use curve::{Curve, CurveFile, CurveGenerator, CurveSample, Tail, MAX_REFINEMENT};
pub use directional::{check_directional_curve, check_directional_sequence, DirectionalWitness, DirectionalityReport, WitnessKind};
pub use l2::{l2_breakpoints, l2_corner, l2_example_curve};
pub use promotion::{promote_constants, verify_promotion, NeighborhoodCheck, PromotionReport};
pub use quasi::{check_quasi_geodesic, QGReport};
pub use ray::{
    extract_ray_from_directional_sequence, extract_ray_from_quasi_geodesic, extraction_beta, AngleCheck, NestingResidual, RayApprox,
    RayPoint, StopCause,
};
pub use scan::{Bound, PairWitness};
pub use zigzag::{zigzag_amplitude_for, zigzag_polyline};
