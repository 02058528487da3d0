//! Matrix-free discretization of nonlocal operators given through Fourier
//! symbols m(ω), in a shifted/dilated sinc basis on a uniform grid.
//!
//! The pipeline is: pick a [`symbols::Symbol`], build its spectral stencil
//! with [`kernel::build_kernel`] (optionally refined near the symbol's origin
//! singularity with [`kernel::apply_duffy_correction`]), wrap it together with
//! a [`grid::DomainMask`] into a [`operators::MaskedOperator`], and hand that
//! to the Krylov solvers in [`solvers`]. The [`experiments`] module drives the
//! quantitative studies (torsion benchmark, eigenvalue-vs-radius scans,
//! zero-radius bisection, self-convergence) on top of those pieces.
//!
//! All heavy inner loops are data-parallel over array chunks and accumulate
//! in a fixed order, so results are bitwise reproducible for any thread
//! count. Building with `--no-default-features` removes the rayon dependency
//! and runs the same code sequentially.

pub mod experiments;
pub mod fft;
pub mod grid;
pub mod kernel;
pub mod operators;
pub mod oracles;
pub mod par;
pub mod quadrature;
pub mod snck;
pub mod solvers;
pub mod symbols;

pub use grid::{ball_mask, box_mask, make_grid, DomainMask, GridError, GridSpec};
pub use kernel::{
    apply_duffy_correction, build_kernel, kernel_cache_key, KernelCache, KernelError,
    SpectralKernel,
};
pub use operators::{GridField, MaskedOperator, OperatorError};
pub use quadrature::{
    duffy_split_integrate, gauss_legendre_1d, graded_gauss_1d, graded_singular_integrate,
    tensorize, QuadratureError, QuadratureRule,
};
pub use solvers::{
    eigen_smallest, rayleigh_quotient, solve_dirichlet, EigenResult, SolveMethod, SolveReport,
    SolverError,
};
pub use symbols::{Symbol, SymbolError, SymbolKind};
