//! The profile `g`, its closed-form integrals and the ratios built from it.

mod closed;
mod fourier;
mod mc;
mod minimizer;
mod params;
mod simplex;

pub use closed::{
    g_closed_forms, g_eval, moment_ratios, quadrature_integrals, tail_bounds, GIntegrals,
    MomentRatios, QuadratureIntegrals, TailBounds,
};
pub use fourier::{check_function, fourier_kernel_check, FourierOptions, FourierReport, TestFunction};
pub use mc::{
    simplex_mc_integrals, simplex_mc_integrals_with, Estimate, McEstimates, McOptions, Sampler,
    MIN_SAMPLES,
};
pub use minimizer::{constrained_minimizer_ratio, constrained_minimizer_ratio_with, MinimizerRatio};
pub use params::{GParams, GShape, PsiChoice};
pub use simplex::{SimplexIntegrals, SimplexProfile};
pub(crate) use simplex::ORDER as QUAD_ORDER;
