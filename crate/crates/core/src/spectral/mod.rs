//! Spectral density functions and the Betti number bounds they control.

pub mod bounds;
pub mod chebyshev;
pub mod density;
pub mod ns;

pub use bounds::{
    betti_bound_general, eig_count_bound, eig_count_trace_bound, gap_bound, j_bound, ns_bound, sublog_bound, uniform_gap_exponent, verify_gap,
    BoundReport, GapVerification, Regime, UniformGapReport,
};
pub use chebyshev::{chebyshev, luck_polynomial, luck_polynomial_exact, LuckPolynomial};
pub use density::{density_by_quotients, density_zn, symmetric_cyclic_density, DensityEstimate, Provenance};
pub use ns::{estimate_ns, NsEstimate, NsReport};
