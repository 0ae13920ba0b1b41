pub mod bench;
pub mod color;
pub mod error;
pub mod generate;
pub mod io;
pub mod objective;
pub mod oracle;
pub mod registration;
pub mod sliced;
pub mod solver;
pub mod types;

pub use error::{Error, Result};
pub use objective::{eval_plan_cost, symmetric_shift};
pub use registration::{register, transform_error, umeyama_fit, RegistrationConfig, Transform};
pub use sliced::{sample_directions, sopt_estimate, PointCloud, SoptEstimate};
pub use solver::{solve, solve_pot, verify_optimality, PotConfig, SolverConfig};
pub use types::{CostSpec, DualPair, PartialPlan, Solution, SolveStats, SortedSamples};
