//! Independent evaluation of components of the rotational average by direct
//! integration over Euler angles.

pub mod montecarlo;
pub mod quadrature;
pub mod rotation;
pub mod trig;

pub use montecarlo::{mc_component, random_rotation, McEstimate};
pub use quadrature::{gauss_legendre, quad_component, EulerQuadrature};
pub use rotation::{swap_yz, RotationSample, SWAP_YZ};
pub use trig::{dir_cosine_entry, exact_component, integrate_monomial, TrigMonomial, TrigPolynomial};
