//! Numerical and exact tools around real multiplication.
//!
//! - [`quadfield`]: exact arithmetic in real quadratic fields, units, orders.
//! - [`pseudolattice`]: rank-two `Z`-modules in `Q(sqrt d)`, continued
//!   fractions, `GL(2, Z)` equivalence, covolume and duality.
//! - [`rmtheta`]: RM thetas, lifted lattice thetas and their functional equations.
//! - [`starkzeta`]: partial zeta functions and Stark numbers.
//! - [`qtorus`]: quantum thetas on noncommutative tori, Boca projections,
//!   Morita bimodules.
//! - [`qexp`]: the q-exponential, the pentagon identity, dilogarithm asymptotics.
//! - [`acceptance`]: the acceptance criteria shared by `rmlab selftest` and the
//!   `acceptance` test target.
//!
//! Each capability has a runnable example under `examples/`, e.g.
//! `cargo run --example stark_number`.

pub mod acceptance;
pub mod cli;
pub mod error;
pub mod pseudolattice;
pub mod qexp;
pub mod qtorus;
pub mod quad;
pub mod quadfield;
pub mod rmtheta;
pub mod special;
pub mod starkzeta;

pub use error::{Error, Result};
