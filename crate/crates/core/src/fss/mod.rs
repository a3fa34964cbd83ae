//! Finite-size-scaling analysis: collapse costs and optimizers, crossings,
//! power-law and cluster-tail fits, and the trajectory bootstrap.

mod bootstrap;
mod collapse;
mod crossing;
mod fit;

pub use bootstrap::{bootstrap, BootstrapSummary};
pub use collapse::{
    cost_function, cost_function_floored, dynamics_collapse, dynamics_cost, optimize_collapse, CollapseOptions,
    CollapsePoint, CollapseResult, Curve, DynamicsFamily, ExponentFit, Landscape, SearchDomain, DEFAULT_D_FLOOR,
};
pub use crossing::{crossing_point, Crossing, CrossingEstimate};
pub use fit::{
    fit_cluster_tail, fit_power_law, fit_power_law_weighted, linear_fit, FitResult, LinearFit, TailFit, OMEGA_RANGE,
    CORRECTION_SIGNIFICANCE, TAIL_BINS_PER_DECADE,
};
