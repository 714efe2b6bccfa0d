//! Projections used as error-analysis oracles, the space-time error
//! functional, convergence rates, condition numbers and convergence studies.

mod condition;
mod errors;
mod projection;
mod report;
mod study;

pub use condition::{
    condition_number, condition_number_1, condition_number_2, condition_of_system,
    estimate_condition, legendre_rescale, CondBasis, CondOptions, ConditionEstimate,
};
pub use errors::{error_e, error_e_with, error_final, l2_error, rates, ErrorMetric};
pub use projection::{dual_norm_pairing, project_p, project_q, Axis, ProjectionMode};
pub use report::{ErrorReport, ReportRow, StudyKind};
pub use study::{spatial_run, spatial_study, temporal_cells, temporal_study, RunParams};
