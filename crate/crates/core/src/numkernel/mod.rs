//! Complex scalars, nomes, theta products and series, and the classical theta identities.

pub mod identities;
pub mod nome;
pub mod theta;

pub use identities::CubicKernel;
pub use nome::{exp_i_pi, omega, omega_pow, Nome, TruncationPolicy, C64};
pub use theta::{
    kronecker_quotient, kronecker_sum, legendre3, q_pochhammer, quintuple_lhs, quintuple_rhs, theta,
    theta_jacobi, theta_prod, theta_shifted, theta_series, ts_relations_check,
};
