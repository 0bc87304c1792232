//! Numerical building blocks: Gauss-Hermite quadrature against the standard
//! normal weight, closed-form Gaussian moment identities, bisection root
//! finding, and Euler-Maruyama replication checks for closed-form strategies.

mod gaussian;
mod quadrature;
mod roots;
pub mod simulate;

pub use gaussian::{gaussian_exp_quadratic, gaussian_quadratic_mean};
pub use quadrature::{expect_standard_normal, gauss_hermite, QuadratureGrid};
pub use roots::find_root_monotone;
pub use simulate::{risk_free_control_error, simulate_replication, Measure, ReplicationReport, SimConfig};
