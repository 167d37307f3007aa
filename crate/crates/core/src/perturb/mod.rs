//! Perturbations of an IFS and the semi-conjugacy between nearby systems.

mod cover;
mod construct;
mod semiconj;

pub use cover::{
    check_ball_cover, cover_centers, dense_cover_oracle, CenterVerdict, CoverReport, CoverViolation,
    MAX_VIOLATIONS_PER_CENTER,
};
pub use construct::{
    adjusted_points, admissible_delta, audit_bump, inverse_lipschitz, move_points_diffeo, perturbed_ifs, random_pairs,
    AdjustedPoints, BumpAudit, PerturbedIfs,
};
pub use semiconj::{build_semiconj, bump_perturbation, semiconj_residual, HSample, SemiConjugacy};
