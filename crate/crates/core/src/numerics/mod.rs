//! Special functions and adaptive quadrature used by the channel and
//! capacity models.

mod quadrature;
mod special;

pub use quadrature::{
    integrate_finite, integrate_semi_infinite, try_integrate_finite, try_integrate_semi_infinite,
    try_integrate_semi_infinite_with_breakpoints, try_integrate_with_breakpoints, QuadResult, QuadratureSpec,
};
pub use special::{erf, erfc, ln_gamma, reg_lower_gamma};
