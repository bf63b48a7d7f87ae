//! Spin coherent states, Husimi amplitudes and the zeros of the Majorana
//! polynomial on the Riemann sphere.

mod cluster;
mod husimi;
mod majorana;
mod quadrature;
mod roots;
mod sphere;

pub use cluster::{cluster_zeros, multiplicity_radius, Zero, ZeroSet, DEFAULT_CLUSTER_RADIUS};
pub use husimi::{coherent_overlap, husimi};
pub use majorana::{majorana_poly, MajoranaPoly, DEGREE_THRESHOLD};
pub use quadrature::{gauss_legendre, husimi_quadrature, husimi_quadrature_with, QuadratureRule};
pub use roots::{aberth, eigenpair_roots, poly_roots, poly_roots_with, RootOptions};
pub use sphere::SpherePoint;
