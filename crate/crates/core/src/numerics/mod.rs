//! Quadrature, scalar minimization and log-domain arithmetic.

mod minimize;
mod quadrature;
mod special;

pub use minimize::{minimize_scalar, MinimizeSpec};
pub use quadrature::{gauss_legendre, integrate, integrate_real_line, integrate_with_error, QuadratureSpec};
pub use special::{
    ln_add_exp, ln_one_minus_exp, ln_sub_exp, log_gamma, log_sum_exp, std_normal_cdf, std_normal_ln_cdf,
    std_normal_ln_pdf, std_normal_ln_sf, std_normal_sf, LogSumExp,
};
