//! Quantitative studies on top of the solver stack: the fractional torsion
//! benchmark with analytic errors, eigenvalue-vs-radius scans of the
//! logarithmic Laplacian, zero-radius bisection, Dirichlet solves on large
//! balls, and self-convergence studies, plus empirical rate fitting.
//!
//! All studies work on the computational ball B_r (default r = 0.25,
//! centered in the unit box; the margin keeps the convolution torus away
//! from the mask) and rescale the symbol by r/R to represent the physical
//! ball B_R.

use std::time::Instant;
use thiserror::Error;

use crate::grid::{ball_mask, make_grid, GridError, GridSpec};
use crate::kernel::{KernelCache, KernelError, SpectralKernel};
use crate::operators::{apply_unmasked, GridField, MaskedOperator, OperatorError};
use crate::quadrature::QuadratureError;
use crate::solvers::{
    eigen_smallest, solve_dirichlet, SolveMethod, SolveReport, SolverError,
};
use crate::symbols::{Symbol, SymbolError};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("s must lie in (0,1)")]
    BadFractionalOrder,
    #[error("rate fit needs at least 3 points, got {0}")]
    RateNeedsThreePoints(usize),
    #[error("rate fit needs positive spacings and errors")]
    RateNeedsPositiveValues,
    #[error("fields live on different grids")]
    SpecMismatch,
    #[error("coarse grid n={coarse} does not nest in fine grid n={fine}")]
    NonNestedGrids { coarse: usize, fine: usize },
    #[error("energy seminorm needs a fractional kernel, got symbol '{id}'")]
    KernelNotFractional { id: String },
    #[error("scan radii must be strictly increasing")]
    RadiiNotIncreasing,
    #[error("bracket [{lo}, {hi}] does not straddle zero: λ(lo) = {lo_val:e}, λ(hi) = {hi_val:e}")]
    BracketDoesNotStraddle { lo: f64, hi: f64, lo_val: f64, hi_val: f64 },
    #[error("solver stalled at n = {n}: residual {residual:e} after {iterations} iterations")]
    SolverStalled { n: usize, residual: f64, iterations: usize },
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Per-level outcome of a convergence study.
#[derive(Clone, Debug)]
pub struct ErrorRecord {
    pub n: usize,
    pub h: f64,
    pub l2_error: f64,
    pub energy_error: Option<f64>,
    pub wall_time: f64,
}

/// Least-squares slope of log2(error) against log2(h).
#[derive(Clone, Debug)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<(f64, f64)>,
}

/// Eigenvalues λ^{(1..ℓ)} per scan radius.
#[derive(Clone, Debug)]
pub struct RadiusScan {
    pub radii: Vec<f64>,
    pub eigenvalues: Vec<Vec<f64>>,
}

/// Shared knobs of the studies; `Default` matches the reference runs
/// (order-7 tensor Gauss rules, computational radius 0.25, seed 42).
#[derive(Clone, Debug)]
pub struct StudyParams {
    pub quad_order: usize,
    pub comp_radius: f64,
    pub solver_tol: f64,
    pub solver_max_iter: usize,
    /// Eigenvalue residual tolerance. The zero-radius bisection resolves
    /// radii to ~1e-3, which moves eigenvalues by ~2·tol_R/R ≈ 1e-3, so
    /// 1e-6 leaves three orders of headroom.
    pub eigen_tol: f64,
    pub eigen_max_iter: usize,
    pub seed: u64,
}

impl Default for StudyParams {
    fn default() -> Self {
        StudyParams {
            quad_order: 7,
            comp_radius: 0.25,
            solver_tol: 1e-9,
            solver_max_iter: 5000,
            eigen_tol: 1e-6,
            eigen_max_iter: 800,
            seed: 42,
        }
    }
}

fn center(d: usize) -> Vec<f64> {
    vec![0.5; d]
}

// Lanczos-series coefficients for the Gamma function (g = 7, 9 terms).
const GAMMA_COEFFS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

/// Γ(x) for real arguments away from the non-positive integers; relative
/// accuracy around 1e-13 on (0, 10], which the unit tests pin down.
fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * gamma(1.0 - x))
    } else {
        let z = x - 1.0;
        let mut acc = GAMMA_COEFFS[0];
        for (i, c) in GAMMA_COEFFS.iter().enumerate().skip(1) {
            acc += c / (z + i as f64);
        }
        let t = z + 7.5;
        (2.0 * std::f64::consts::PI).sqrt() * t.powf(z + 0.5) * (-t).exp() * acc
    }
}

/// The closed-form solution of the fractional torsion problem on the unit
/// ball: C_u(d,s)·max(0, 1−|x|²)^s with
/// C_u = Γ(d/2) / (2^{2s} Γ(d/2+s) Γ(1+s)).
pub fn torsion_exact(d: usize, s: f64, x: &[f64]) -> Result<f64, ExperimentError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(ExperimentError::BadFractionalOrder);
    }
    let c_u = gamma(d as f64 / 2.0)
        / (2f64.powf(2.0 * s) * gamma(d as f64 / 2.0 + s) * gamma(1.0 + s));
    let r2: f64 = x.iter().map(|&v| v * v).sum();
    Ok(c_u * (1.0 - r2).max(0.0).powf(s))
}

/// Discrete L² distance between two coefficient fields on the same grid:
/// (h^d Σ_k (u_k − v_k)²)^{1/2}. The weight h^d is the Parseval factor of
/// the orthogonal sinc basis (∫ φ_k φ_j = N^{-d} δ_{kj}), so this equals the
/// L²(ℝ^d) distance of the interpolants.
pub fn l2_error(u: &GridField, reference: &GridField) -> Result<f64, ExperimentError> {
    if u.spec() != reference.spec() {
        return Err(ExperimentError::SpecMismatch);
    }
    let hd = u.spec().spacing().powi(u.spec().dim() as i32);
    let sum: f64 = u
        .data()
        .iter()
        .zip(reference.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok((hd * sum).sqrt())
}

/// Discrete L² distance against a reference function sampled at the grid
/// points.
pub fn l2_error_to_fn(u: &GridField, f: impl Fn(&[f64]) -> f64) -> f64 {
    let reference = GridField::from_fn(u.spec(), f);
    l2_error(u, &reference).expect("same spec by construction")
}

/// Discrete L² distance between a coarse solution and a fine reference on
/// nested dyadic lattices, sampled at the shared grid points and weighted by
/// the coarse spacing.
pub fn l2_error_nested(coarse: &GridField, fine: &GridField) -> Result<f64, ExperimentError> {
    let (cs, fs) = (coarse.spec(), fine.spec());
    if cs.dim() != fs.dim() {
        return Err(ExperimentError::SpecMismatch);
    }
    if fs.n() % cs.n() != 0 {
        return Err(ExperimentError::NonNestedGrids { coarse: cs.n(), fine: fs.n() });
    }
    let ratio = (fs.n() / cs.n()) as u32;
    let hd = cs.spacing().powi(cs.dim() as i32);
    let mut sum = 0.0;
    cs.for_each_index(|k| {
        let mut kf = *k;
        for a in 0..cs.dim() {
            kf[a] = k[a] * ratio;
        }
        let d = coarse.get(k) - fine.get(&kf);
        sum += d * d;
    });
    Ok((hd * sum).sqrt())
}

/// Discrete energy seminorm of the difference, (h^d ⟨A(u−v), u−v⟩)^{1/2},
/// with the unmasked fractional operator: the discrete realization of
/// |w|²_{H^s} = ∫ |ω|^{2s} |ŵ|².
pub fn energy_error(
    u: &GridField,
    reference: &GridField,
    frac_kernel: &SpectralKernel,
) -> Result<f64, ExperimentError> {
    if !frac_kernel.symbol_id().starts_with("frac") {
        return Err(ExperimentError::KernelNotFractional {
            id: frac_kernel.symbol_id().to_string(),
        });
    }
    if u.spec() != reference.spec() || u.spec() != frac_kernel.spec() {
        return Err(ExperimentError::SpecMismatch);
    }
    let mut diff = GridField::zeros(u.spec());
    for ((d, a), b) in diff.data_mut().iter_mut().zip(u.data()).zip(reference.data()) {
        *d = a - b;
    }
    let adiff = apply_unmasked(frac_kernel, &diff)?;
    let quad: f64 = diff.data().iter().zip(adiff.data()).map(|(a, b)| a * b).sum();
    let hd = u.spec().spacing().powi(u.spec().dim() as i32);
    Ok((hd * quad.max(0.0)).sqrt())
}

/// Least-squares slope of the (h, error) points in log2-log2 coordinates.
pub fn fit_rate(points: &[(f64, f64)]) -> Result<RateFit, ExperimentError> {
    if points.len() < 3 {
        return Err(ExperimentError::RateNeedsThreePoints(points.len()));
    }
    if points.iter().any(|&(h, e)| !(h > 0.0) || !(e > 0.0)) {
        return Err(ExperimentError::RateNeedsPositiveValues);
    }
    let logs: Vec<(f64, f64)> = points.iter().map(|&(h, e)| (h.log2(), e.log2())).collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(RateFit { slope, intercept: my - slope * mx, points: logs })
}

pub struct TorsionStudy {
    pub records: Vec<ErrorRecord>,
    /// Fitted L² rate; `None` when fewer than 3 levels were run.
    pub l2_fit: Option<RateFit>,
    pub energy_fit: Option<RateFit>,
}

/// Solve (−Δ)^s u = 1 on the unit ball (computationally: on B_r rescaled by
/// r/R with R = 1) for each grid level, compare against the closed-form
/// solution, and fit the L² and energy decay rates.
pub fn run_torsion_study(
    d: usize,
    s: f64,
    levels: &[usize],
    params: &StudyParams,
) -> Result<TorsionStudy, ExperimentError> {
    if !(s > 0.0 && s < 1.0) {
        return Err(ExperimentError::BadFractionalOrder);
    }
    let r = params.comp_radius;
    let sym = Symbol::fractional(s)?.rescale_for_domain(r, 1.0)?;
    let quad1d = crate::quadrature::gauss_legendre_1d(params.quad_order)?;
    let quad = crate::quadrature::tensorize(&quad1d, d)?;
    let c = center(d);
    let mut records = Vec::with_capacity(levels.len());
    for &n in levels {
        let start = Instant::now();
        let spec = make_grid(d, n)?;
        let mask = ball_mask(spec, &c, r)?;
        let kernel = crate::kernel::build_kernel(&sym, spec, &quad)?;
        let kernel = std::sync::Arc::new(kernel);
        let op = MaskedOperator::new(kernel.clone(), std::sync::Arc::new(mask))?;
        let rhs = GridField::constant_on(op.mask(), 1.0);
        let (u, report) =
            solve_dirichlet(&op, &rhs, SolveMethod::Cg, params.solver_tol, params.solver_max_iter)?;
        if !report.converged {
            return Err(ExperimentError::SolverStalled {
                n,
                residual: report.final_residual,
                iterations: report.iterations,
            });
        }
        let exact = GridField::from_fn(spec, |x| {
            let mapped: Vec<f64> = (0..d).map(|a| (x[a] - c[a]) / r).collect();
            torsion_exact(d, s, &mapped).expect("s validated above")
        });
        let l2 = l2_error(&u, &exact)?;
        let energy = energy_error(&u, &exact, &kernel)?;
        records.push(ErrorRecord {
            n,
            h: spec.spacing(),
            l2_error: l2,
            energy_error: Some(energy),
            wall_time: start.elapsed().as_secs_f64(),
        });
    }
    let l2_fit = if records.len() >= 3 {
        Some(fit_rate(&records.iter().map(|r| (r.h, r.l2_error)).collect::<Vec<_>>())?)
    } else {
        None
    };
    let energy_fit = if records.len() >= 3 {
        Some(fit_rate(
            &records.iter().map(|r| (r.h, r.energy_error.unwrap())).collect::<Vec<_>>(),
        )?)
    } else {
        None
    };
    Ok(TorsionStudy { records, l2_fit, energy_fit })
}

fn loglap_operator(
    big_r: f64,
    spec: GridSpec,
    params: &StudyParams,
    cache: &KernelCache,
) -> Result<MaskedOperator, ExperimentError> {
    let sym = Symbol::logarithmic().rescale_for_domain(params.comp_radius, big_r)?;
    let kernel = cache.get_or_build(&sym, spec, params.quad_order, true)?;
    let mask = ball_mask(spec, &center(spec.dim()), params.comp_radius)?;
    Ok(MaskedOperator::new(kernel, std::sync::Arc::new(mask))?)
}

/// Smallest `ell` Dirichlet eigenvalues of the logarithmic Laplacian on
/// B_R ⊂ ℝ², for each radius in the strictly increasing scan list.
pub fn run_radius_scan(
    ell: usize,
    radii: &[f64],
    n: usize,
    params: &StudyParams,
    cache: &KernelCache,
) -> Result<RadiusScan, ExperimentError> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(ExperimentError::RadiiNotIncreasing);
    }
    let spec = make_grid(2, n)?;
    let mut eigenvalues = Vec::with_capacity(radii.len());
    for &big_r in radii {
        let op = loglap_operator(big_r, spec, params, cache)?;
        let out = eigen_smallest(&op, ell, params.eigen_tol, params.eigen_max_iter, params.seed)?;
        eigenvalues.push(out.eigenvalues);
    }
    Ok(RadiusScan { radii: radii.to_vec(), eigenvalues })
}

#[derive(Clone, Debug)]
pub struct ZeroRadius {
    pub radius: f64,
    pub bisection_steps: usize,
    /// λ^{(ℓ)} at the initial bracket ends, diagnostic for bracket misuse.
    pub bracket_values: (f64, f64),
}

/// Bisect on R for the radius where the ℓ-th Dirichlet eigenvalue of the
/// logarithmic Laplacian on B_R crosses zero. The eigenvalue is decreasing
/// in R (doubling the ball shifts the whole spectrum down by 2·log 2), so
/// the lower bracket end must have a positive and the upper end a negative
/// eigenvalue; the endpoint signs are checked, not assumed.
pub fn find_zero_radius(
    ell: usize,
    bracket: (f64, f64),
    n: usize,
    tol_r: f64,
    params: &StudyParams,
    cache: &KernelCache,
) -> Result<ZeroRadius, ExperimentError> {
    let spec = make_grid(2, n)?;
    let lambda = |big_r: f64| -> Result<f64, ExperimentError> {
        let op = loglap_operator(big_r, spec, params, cache)?;
        let out = eigen_smallest(&op, ell, params.eigen_tol, params.eigen_max_iter, params.seed)?;
        Ok(out.eigenvalues[ell - 1])
    };
    let (mut lo, mut hi) = bracket;
    let mut lo_val = lambda(lo)?;
    let hi_val = lambda(hi)?;
    let bracket_values = (lo_val, hi_val);
    if lo_val == 0.0 {
        return Ok(ZeroRadius { radius: lo, bisection_steps: 0, bracket_values });
    }
    if hi_val == 0.0 {
        return Ok(ZeroRadius { radius: hi, bisection_steps: 0, bracket_values });
    }
    if lo_val.signum() == hi_val.signum() {
        return Err(ExperimentError::BracketDoesNotStraddle { lo, hi, lo_val, hi_val });
    }
    let mut steps = 0;
    while hi - lo > tol_r {
        let mid = 0.5 * (lo + hi);
        let mid_val = lambda(mid)?;
        steps += 1;
        if mid_val == 0.0 {
            return Ok(ZeroRadius { radius: mid, bisection_steps: steps, bracket_values });
        }
        if mid_val.signum() == lo_val.signum() {
            lo = mid;
            lo_val = mid_val;
        } else {
            hi = mid;
        }
    }
    Ok(ZeroRadius { radius: 0.5 * (lo + hi), bisection_steps: steps, bracket_values })
}

/// MINRES solve of the Dirichlet problem for the logarithmic Laplacian on
/// B_R ⊂ ℝ², with the right-hand side given in physical coordinates.
pub fn run_loglap_dirichlet(
    big_r: f64,
    n: usize,
    rhs_physical: impl Fn(&[f64]) -> f64,
    params: &StudyParams,
    cache: &KernelCache,
) -> Result<(GridField, SolveReport), ExperimentError> {
    let spec = make_grid(2, n)?;
    let op = loglap_operator(big_r, spec, params, cache)?;
    let r = params.comp_radius;
    let c = center(2);
    let mut rhs = GridField::zeros(spec);
    for k in op.mask().inside() {
        let x = spec.coords(k);
        let mapped: Vec<f64> = (0..2).map(|a| (x[a] - c[a]) * big_r / r).collect();
        rhs.set(k, rhs_physical(&mapped));
    }
    let (u, report) =
        solve_dirichlet(&op, &rhs, SolveMethod::Minres, params.solver_tol, params.solver_max_iter)?;
    Ok((u, report))
}

/// Self-convergence study of the logarithmic Dirichlet problem with f ≡ 1:
/// solves at each coarse level are compared against the reference solve at
/// n_ref on the shared lattice points.
pub fn run_self_convergence(
    big_r: f64,
    levels: &[usize],
    n_ref: usize,
    params: &StudyParams,
    cache: &KernelCache,
) -> Result<(Vec<ErrorRecord>, RateFit), ExperimentError> {
    for &n in levels {
        if n_ref % n != 0 || n >= n_ref {
            return Err(ExperimentError::NonNestedGrids { coarse: n, fine: n_ref });
        }
    }
    let (u_ref, ref_report) = run_loglap_dirichlet(big_r, n_ref, |_| 1.0, params, cache)?;
    if !ref_report.converged {
        return Err(ExperimentError::SolverStalled {
            n: n_ref,
            residual: ref_report.final_residual,
            iterations: ref_report.iterations,
        });
    }
    let mut records = Vec::with_capacity(levels.len());
    for &n in levels {
        let start = Instant::now();
        let (u, report) = run_loglap_dirichlet(big_r, n, |_| 1.0, params, cache)?;
        if !report.converged {
            return Err(ExperimentError::SolverStalled {
                n,
                residual: report.final_residual,
                iterations: report.iterations,
            });
        }
        let err = l2_error_nested(&u, &u_ref)?;
        records.push(ErrorRecord {
            n,
            h: 1.0 / n as f64,
            l2_error: err,
            energy_error: None,
            wall_time: start.elapsed().as_secs_f64(),
        });
    }
    let fit = fit_rate(&records.iter().map(|r| (r.h, r.l2_error)).collect::<Vec<_>>())?;
    Ok((records, fit))
}
