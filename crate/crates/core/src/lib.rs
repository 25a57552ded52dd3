//! Adaptive influence maximization under the independent cascade model.
//!
//! Seeds are committed in batches: each batch is selected on the residual
//! graph left by the previous batches' observed cascades, so later batches
//! exploit what earlier ones revealed. Batch selection runs on reverse
//! reachable set samples with a stop rule that certifies an expected
//! `ρ_b(1-ε)` approximation per batch; exponential-time oracles back every
//! estimator at desk scale.

pub mod adaptive;
pub mod diffusion;
pub mod epic;
mod error;
pub mod graph;
pub mod maxcover;
pub mod oracle;
pub mod rng;
pub mod rrset;
pub mod synth;

pub use adaptive::{
    adapt_greedy, adapt_greedy_with, rho, worst_case_calibrate, AdaptiveTrace, BatchRecord,
    PolicyConfig, SelectionMode,
};
pub use diffusion::{
    monte_carlo_spread, observe_feedback, propagate, sample_realization, Feedback, Realization,
};
pub use epic::{
    derive_naive_params, derive_params, fixed_select, lower_bound, naive_select, select, theta_max,
    EpicParams, SelectorDiagnostics,
};
pub use error::{Error, Result};
pub use graph::{
    assign_wc_probabilities, load_edge_list, residual_subgraph, EdgeId, Graph, NodeId, NodeSet,
};
pub use maxcover::{max_cover, upper_bound_given_set, MaxCoverResult};
pub use oracle::{exact_opt, exact_spread};
pub use rrset::{sample_rr_set, sample_rr_set_from_root, RrCollection};
