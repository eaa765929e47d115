//! Discretized primal problem over spherical atoms, solved by a bounded
//! simplex with cutting-plane generation of frequency constraints.

mod extremal;
pub mod simplex;

pub use extremal::*;
pub use simplex::PivotRule;
