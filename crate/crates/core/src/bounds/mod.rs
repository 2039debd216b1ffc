//! Regions, data assumptions and sampled certificates for the inequality
//! chain that ends in the lower bounds of the free solution.

mod assumptions;
mod inequalities;
mod lower;
mod region;

pub use assumptions::{check_assumption, family, AssumptionKind, DataAssumptions};
pub use inequalities::{
    verify_dtheta_bounds, verify_kernel_inequality, verify_n_factorization, verify_theta_bound,
};
pub use lower::{verify_lower_bound_even, verify_lower_bound_low, verify_lower_bound_odd};
pub use region::{Region, RegionGrid, RegionKind, RegionPoint};
