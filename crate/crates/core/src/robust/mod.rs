//! Saddle-point solver for robust budget allocation.

mod adversary;
mod ascent;
mod projection;
mod saddle;

pub use adversary::{adversary_best_response, AdversaryChain, AdversaryObjective, AdversaryResponse};
pub use ascent::{
    budget_fw_gap, max_influence_given_x, max_mixture_influence, maximize_concave, AscentOptions, AscentResult,
};
pub use projection::project_budget;
pub use saddle::{solve_robust, IterationRecord, PolyakNumerator, RobustOptions, SolveReport};
