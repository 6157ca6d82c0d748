//! Numerical laboratory for the time-fractional stochastic heat equation on
//! `(0, L)` with Dirichlet boundary conditions.
//!
//! The crate is generic over the scalar type (`f32` or `f64`, see [`Real`]);
//! the aliases at the crate root fix `f64`, which is what the experiments and
//! the command line use.

pub mod cli_runner;
pub mod moment_lab;
pub mod noise_and_sde;
pub mod quad;
pub mod real;
pub mod special_fn;
pub mod spectral_kernel;

pub use moment_lab::{
    beta_convergence, continuity_modulus, exact_moments, growth_fit, lambda_profile, mc_moments, transition_scan, ContinuityFit,
    ConvergenceReport, Estimator, GrowthFit, MomentError, MomentSeries, TransitionScan, Which,
};
pub use noise_and_sde::{
    project_mode1, sample_noise, simulate, GridSpec, ModeBudget, ModelSpec, NoiseArray, SigmaSpec, SimError,
    Simulator, SolutionPath,
};
pub use real::Real;
pub use special_fn::{
    inv_sub_density, laplace_ml, ml_dt, ml_neg, stable_density, EvalPolicy, FracOrder, MittagLeffler,
    SpecialFnError, StableSubordinator,
};

pub use spectral_kernel::{
    build_basis, DomainSpec, InitialCondition, KernelError, KernelKind, Projection, SpectralBasis,
};

pub type Order = FracOrder<f64>;
pub type Policy = EvalPolicy<f64>;
pub type MittagLefflerF64 = MittagLeffler<f64>;
pub type Basis = SpectralBasis<f64>;
pub type Model = ModelSpec<f64>;
pub type Grid = GridSpec<f64>;
pub type Path = SolutionPath<f64>;
pub type Moments = MomentSeries<f64>;
