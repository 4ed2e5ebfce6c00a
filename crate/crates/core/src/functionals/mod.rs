pub mod energy;
pub mod geodesic;
pub mod ik;
pub mod isigma;
pub mod kenergy;

pub use energy::{delta_l_sigma, l_sigma_k, z_sigma_k};
pub use geodesic::{bk_geodesic, fk_prime, z_along, z_first_variation, z_second_derivative_fd, FkPrime, GeodesicInB};
pub use ik::i_k;
pub use isigma::{
    bergman_path, delta_i_sigma, i_sigma_between, i_sigma_hessian, i_sigma_k, path_integral, path_integral_between,
    path_second_derivative_fd, LinearPath, PathChoice, PathPoint, PolynomialPath, PotentialPath, SRule,
    SquaredPath, TwistedState,
};
pub use kenergy::{
    calabi, mabuchi_energy, modified_k_energy, modified_k_energy_differential, projection_pi, reduced_scalar,
    GroupSpec,
};
