//! LDG discretization with generalized alternating fluxes and the fully
//! discrete L1 time stepper.

mod assemble;
mod bilinear;
mod flux;
mod stepper;

pub use assemble::{assemble_operators, LdgOperators};
pub use bilinear::{bilinear_form_b, VectorField};
pub use flux::{weighted_average, FluxWeights};
pub use stepper::{solve, solve_with, SolverOptions, Stepper, Trajectory};
