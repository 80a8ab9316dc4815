//! Brute-force and Monte Carlo checks of the moment inequalities and cost bounds.

mod gof;
mod moments;
mod suite;

pub use gof::{chi_square_test, kolmogorov_sf, ks_test, GofResult};
pub use moments::{
    bijection_report, log_moment_report, moment_report, sorted_exact_pmf, verify_geometric_moment,
    verify_lb_via_optimal_code, verify_log_moment, verify_moment_bounds, CodeBoundReport, GeometricReport,
    LogMomentReport, MomentReport, MAX_CODE_SUPPORT,
};
pub use suite::{accepted_gof, pair_matrix, run_suite, CheckKind, CheckLine, MatrixEntry, SuiteConfig, EXCLUSIONS};
