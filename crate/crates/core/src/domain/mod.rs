//! Domain types shared by every other module.

mod basis;
mod budget;
mod density;
mod rng;
mod simplex;
mod sobolev;

pub use basis::{trig_basis_eval, trig_basis_prefix, TRIG_BASIS_BOUND};
pub use budget::{PrivacyBudget, THEOREM_EPSILON_MAX};
pub use density::{
    integrate, l2_distance_squared, Density, DensityModel, QUADRATURE_PANELS,
};
pub use rng::RngStream;
pub use simplex::{project_simplex, SimplexVector, SIMPLEX_SUM_TOL};
pub use sobolev::SobolevClass;
