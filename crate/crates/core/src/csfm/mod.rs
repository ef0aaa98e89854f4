//! Constrained continuous submodular minimization.

mod discretization;
mod frank_wolfe;
mod greedy;
mod oracle;
mod pav;
mod solver;
mod threshold;

pub use discretization::Discretization;
pub use frank_wolfe::{fw_solve, fw_solve_monitored, FwOptions, FwProgress, FwResult};
pub use greedy::{greedy_base_vertex, lattice_value, BaseVertex, RhoProfile};
pub use oracle::{FnObjective, FnRegularizer, GreedyChain, SeparableRegularizer, SubmodularObjective};
pub use pav::pav_isotonic;
pub use solver::{constrained_min, regularizer_coefficients, CsfmCertificate, CsfmOptions, CsfmSolution};
pub use threshold::{lambda_search, lattice_regularizer, threshold, LambdaSearch, TIE_TOLERANCE};
