//! Special functions and quadrature used by the physics modules.

mod bessel;
mod quadrature;
mod special;

pub use bessel::{bessel_i_real, bessel_j, bessel_j_real};
pub use quadrature::{
    fixed_gauss_legendre, gauss_legendre_rule, integrate_adaptive, integrate_damped_semiinf,
    Quadrature, QuadratureSpec,
};
pub use special::{gamma_function, sine_integral, spherical_j1};
