//! Discrete-Fourier coefficients of the operator stencil.
//!
//! For a symbol m and grid size N, the stencil Φ(κ) is the operator applied
//! to one sinc basis function and sampled at all lattice offsets; operator
//! application is discrete convolution with Φ. Its unnormalized (2N)^d-point
//! DFT has the coefficients
//!
//! ```text
//! Φ̂_k = (2N)^{-d} Σ_i α_i Σ_{j ∈ {-N..N-1}^d} m(π(j+x_i)) · Y_d(π/N·(j-k) + π/N·x_i)
//! ```
//!
//! with (x_i, α_i) a tensor quadrature rule on the unit cell and Y_d the
//! tensor product of geometric sums Y(x) = Σ_{j=-N}^{N-1} e^{ijx}. For each
//! quadrature node the inner sum is a circular correlation of the sampled
//! symbol with sampled Y_d over the (2N)^d torus; since Y_d sampled at
//! π/N·(integer + offset) has an analytically known DFT, each node costs one
//! forward FFT plus a pointwise multiply, and a single inverse FFT at the
//! end finishes the job.
//!
//! Symbols that are singular at the origin (the logarithmic family) get the
//! tensor-rule contributions of the 2^d origin-adjacent unit cubes replaced
//! by singular quadrature: Duffy-transformed rules for d ≥ 2, dyadic grading
//! for d = 1.

use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};
use thiserror::Error;

use crate::fft;
use crate::grid::GridSpec;
use crate::par;
use crate::quadrature::{self, QuadratureRule};
use crate::symbols::Symbol;

/// Default cap on the working memory of a kernel build (8 GiB).
pub const DEFAULT_MEM_LIMIT: usize = 8 << 30;

/// Number of dyadic levels used by the graded singular rule when correcting
/// one-dimensional kernels (d = 1 has no Duffy analogue that cancels a
/// logarithm).
pub const GRADED_LEVELS_1D: usize = 30;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error("quadrature rule dimension {quad} does not match grid dimension {grid}")]
    DimMismatch { quad: usize, grid: usize },
    #[error("kernel build needs about {needed} bytes, limit is {limit}")]
    MemoryLimit { needed: usize, limit: usize },
    #[error("kernel is already corrected")]
    DoubleCorrection,
    #[error("kernel payload length {got} does not match (2N)^d = {expected}")]
    BadLength { got: usize, expected: usize },
    #[error(transparent)]
    Quadrature(#[from] quadrature::QuadratureError),
}

/// The (2N)^d DFT coefficients of the stencil, in standard row-major
/// wrap-around order (per-axis storage index p holds frequency p for
/// p < N and p − 2N otherwise).
#[derive(Clone, Debug)]
pub struct SpectralKernel {
    spec: GridSpec,
    values: Vec<Complex64>,
    symbol_id: String,
    quad_order: usize,
    corrected: bool,
}

impl SpectralKernel {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn symbol_id(&self) -> &str {
        &self.symbol_id
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn corrected(&self) -> bool {
        self.corrected
    }

    /// The real-space stencil Φ(j), j in wrap-around order, via inverse DFT.
    /// The imaginary residue is discarded; the typed invariant that it stays
    /// below 1e-10·max|Φ| is exercised by the test suite.
    pub fn stencil(&self) -> Vec<f64> {
        let mut buf = self.values.clone();
        let dims = self.spec.dft_dims();
        fft::ndfft(&mut buf, &dims, true);
        let scale = 1.0 / self.spec.dft_len() as f64;
        buf.iter().map(|c| c.re * scale).collect()
    }

    pub(crate) fn from_raw_parts(
        spec: GridSpec,
        values: Vec<Complex64>,
        symbol_id: String,
        quad_order: usize,
        corrected: bool,
    ) -> Result<Self, KernelError> {
        if values.len() != spec.dft_len() {
            return Err(KernelError::BadLength { got: values.len(), expected: spec.dft_len() });
        }
        Ok(SpectralKernel { spec, values, symbol_id, quad_order, corrected })
    }
}

/// Signed frequency of a per-axis storage index on the 2n-point torus.
#[inline]
fn signed_freq(p: usize, n: usize) -> i64 {
    if p < n {
        p as i64
    } else {
        p as i64 - 2 * n as i64
    }
}

/// Y(x) = Σ_{j=-n}^{n-1} e^{ijx}, evaluated through the closed form
/// e^{-inx}(e^{2inx} − 1)/(e^{ix} − 1) with the removable singularity
/// branched to 2n when |e^{ix} − 1| < 1e-12.
pub fn eval_y(n: usize, x: f64) -> Complex64 {
    let eix = Complex64::from_polar(1.0, x);
    let den = eix - 1.0;
    if den.norm() < 1e-12 {
        return Complex64::new(2.0 * n as f64, 0.0);
    }
    let nf = n as f64;
    let num = Complex64::from_polar(1.0, -nf * x) * (Complex64::from_polar(1.0, 2.0 * nf * x) - 1.0);
    num / den
}

fn y_product(n: usize, args: impl Iterator<Item = f64>) -> Complex64 {
    args.fold(Complex64::new(1.0, 0.0), |acc, x| acc * eval_y(n, x))
}

/// Bytes of working memory a build at this grid size needs (three complex
/// buffers of (2N)^d entries: accumulator, per-node samples, FFT scratch).
pub fn build_memory_estimate(spec: GridSpec) -> usize {
    3 * spec.dft_len() * std::mem::size_of::<Complex64>()
}

/// Deterministic cache key: symbol id, dimension, grid size, quadrature
/// order, correction flag. Floating parameters inside the symbol id print in
/// shortest round-trip form.
pub fn kernel_cache_key(sym: &Symbol, spec: GridSpec, quad_order: usize, corrected: bool) -> String {
    format!(
        "{}|d={}|n={}|q={}|c={}",
        sym.canonical_id(),
        spec.dim(),
        spec.n(),
        quad_order,
        u8::from(corrected)
    )
}

/// Build the spectral kernel with the default memory limit.
pub fn build_kernel(
    sym: &Symbol,
    spec: GridSpec,
    quad: &QuadratureRule,
) -> Result<SpectralKernel, KernelError> {
    build_kernel_with_limit(sym, spec, quad, DEFAULT_MEM_LIMIT)
}

/// Build the spectral kernel, refusing when the memory estimate exceeds
/// `mem_limit`.
///
/// Quadrature nodes are processed in their given order and every
/// accumulation runs elementwise in that fixed order, so the result is
/// bitwise identical for any thread count.
pub fn build_kernel_with_limit(
    sym: &Symbol,
    spec: GridSpec,
    quad: &QuadratureRule,
    mem_limit: usize,
) -> Result<SpectralKernel, KernelError> {
    if quad.dim() != spec.dim() {
        return Err(KernelError::DimMismatch { quad: quad.dim(), grid: spec.dim() });
    }
    let needed = build_memory_estimate(spec);
    if needed > mem_limit {
        return Err(KernelError::MemoryLimit { needed, limit: mem_limit });
    }

    let d = spec.dim();
    let n = spec.n();
    let m = 2 * n;
    let dims = spec.dft_dims();
    let len = spec.dft_len();

    let mut acc = vec![Complex64::default(); len];
    let mut samples = vec![Complex64::default(); len];

    for (node, alpha) in quad.iter() {
        // a_p = m(π(signed(p) + x_i)) on the torus, via per-axis squared
        // coordinate tables and a row-wise prefix sum.
        let sq: Vec<Vec<f64>> = (0..d)
            .map(|a| {
                (0..m)
                    .map(|p| {
                        let nu = signed_freq(p, n) as f64 + node[a];
                        (PI * nu) * (PI * nu)
                    })
                    .collect()
            })
            .collect();
        par::for_each_chunk_mut(&mut samples, m, |row, line| {
            let mut prefix = 0.0;
            for a in 0..d - 1 {
                let stride = m.pow((d - 2 - a) as u32);
                prefix += sq[a][row / stride % m];
            }
            for (q, x) in line.iter_mut().enumerate() {
                *x = Complex64::new(sym.eval_sq_radius(prefix + sq[d - 1][q]), 0.0);
            }
        });

        fft::ndfft(&mut samples, &dims, false);

        // The sampled Y_d array has the analytic unnormalized inverse DFT
        // (2n)^d · Π_a e^{iπ·s(q_a)·x_a/n} with s(q) the signed residue of
        // −q; the (2n)^d cancels against the correlation normalization, so
        // only the phase tables enter here.
        let g: Vec<Vec<Complex64>> = (0..d)
            .map(|a| {
                (0..m)
                    .map(|q| {
                        let s = if q == 0 { 0 } else { signed_freq(m - q, n) };
                        Complex64::from_polar(1.0, PI * s as f64 * node[a] / n as f64)
                    })
                    .collect()
            })
            .collect();
        par::for_each_chunk_zip(&mut acc, &samples, m, |row, dst, src| {
            let mut pre = Complex64::new(alpha, 0.0);
            for a in 0..d - 1 {
                let stride = m.pow((d - 2 - a) as u32);
                pre *= g[a][row / stride % m];
            }
            let glast = &g[d - 1];
            for q in 0..dst.len() {
                dst[q] += pre * src[q] * glast[q];
            }
        });
    }

    fft::ndfft(&mut acc, &dims, true);
    let scale = 1.0 / len as f64;
    par::for_each_chunk_mut(&mut acc, m, |_, line| {
        for x in line.iter_mut() {
            *x *= scale;
        }
    });

    Ok(SpectralKernel {
        spec,
        values: acc,
        symbol_id: sym.canonical_id(),
        quad_order: quad.base_order(),
        corrected: false,
    })
}

/// Iterate the 2^d origin-adjacent cubes Q_j, j ∈ {−1,0}^d. The singularity
/// sits on the corner shared by all of them, so all are corrected.
fn origin_cubes(d: usize) -> Vec<Vec<i64>> {
    (0..1u32 << d)
        .map(|pattern| {
            (0..d)
                .map(|a| if pattern >> a & 1 == 1 { -1 } else { 0 })
                .collect()
        })
        .collect()
}

/// Tensor-rule value of ∫_{Q_j} m(πω) Y_d(π/N(ω−k)) dω for one origin cube
/// j ∈ {−1,0}^d and one coefficient index k (no (2N)^{-d} scaling). This is
/// exactly the summand the plain build put into Φ̂_k for that cube.
pub fn cube_integral_regular(
    sym: &Symbol,
    spec: GridSpec,
    cube: &[i64],
    k: &[i64],
    quad: &QuadratureRule,
) -> Complex64 {
    let n = spec.n();
    let d = spec.dim();
    let mut acc = Complex64::default();
    for (node, alpha) in quad.iter() {
        let coords: Vec<f64> = (0..d).map(|a| cube[a] as f64 + node[a]).collect();
        let omega: Vec<f64> = coords.iter().map(|&c| PI * c).collect();
        let yd = y_product(n, (0..d).map(|a| PI / n as f64 * (coords[a] - k[a] as f64)));
        acc += alpha * sym.eval(&omega) * yd;
    }
    acc
}

/// Singular-rule value of the same cube integral: the cube is reflected onto
/// [0,1]^d (coordinates with j_a = −1 negated; the symbol is even and the
/// Y_d argument keeps the true coordinate), then integrated with the Duffy
/// point set for d ≥ 2 or the graded point set for d = 1. `base` is the rule
/// the points are derived from.
pub fn cube_integral_singular(
    sym: &Symbol,
    spec: GridSpec,
    cube: &[i64],
    k: &[i64],
    base: &QuadratureRule,
) -> Result<Complex64, KernelError> {
    let n = spec.n();
    let d = spec.dim();
    let singular = if d == 1 {
        quadrature::graded_rule(GRADED_LEVELS_1D, base)?
    } else {
        quadrature::duffy_rule(base)?
    };
    let mut acc = Complex64::default();
    for (node, w) in singular.iter() {
        let coords: Vec<f64> =
            (0..d).map(|a| if cube[a] == -1 { -node[a] } else { node[a] }).collect();
        let omega: Vec<f64> = coords.iter().map(|&c| PI * c).collect();
        let yd = y_product(n, (0..d).map(|a| PI / n as f64 * (coords[a] - k[a] as f64)));
        acc += w * sym.eval(&omega) * yd;
    }
    Ok(acc)
}

struct CorrectionPoint {
    /// (2N)^{-d} · quadrature weight · m(π·coords), negated for the
    /// subtracted tensor-rule points.
    coeff: f64,
    /// True per-axis coordinates in the cube (may be negative).
    coords: Vec<f64>,
}

/// The array Δ with apply_duffy_correction(kernel) = kernel + Δ: for every k
/// and every origin cube, the tensor-rule contribution is subtracted and the
/// singular-rule value added. Exposed so tests can verify correction
/// locality and revert a correction exactly.
pub fn correction_delta(
    sym: &Symbol,
    spec: GridSpec,
    quad: &QuadratureRule,
) -> Result<Vec<Complex64>, KernelError> {
    if quad.dim() != spec.dim() {
        return Err(KernelError::DimMismatch { quad: quad.dim(), grid: spec.dim() });
    }
    let d = spec.dim();
    let n = spec.n();
    let m = 2 * n;
    let len = spec.dft_len();
    let inv_vol = 1.0 / len as f64;

    let singular = if d == 1 {
        quadrature::graded_rule(GRADED_LEVELS_1D, quad)?
    } else {
        quadrature::duffy_rule(quad)?
    };

    let mut points: Vec<CorrectionPoint> = Vec::new();
    for cube in origin_cubes(d) {
        for (node, alpha) in quad.iter() {
            let coords: Vec<f64> = (0..d).map(|a| cube[a] as f64 + node[a]).collect();
            let omega: Vec<f64> = coords.iter().map(|&c| PI * c).collect();
            points.push(CorrectionPoint {
                coeff: -inv_vol * alpha * sym.eval(&omega),
                coords,
            });
        }
        for (node, w) in singular.iter() {
            let coords: Vec<f64> =
                (0..d).map(|a| if cube[a] == -1 { -node[a] } else { node[a] }).collect();
            let omega: Vec<f64> = coords.iter().map(|&c| PI * c).collect();
            points.push(CorrectionPoint {
                coeff: inv_vol * w * sym.eval(&omega),
                coords,
            });
        }
    }

    // Per-point per-axis Y tables over all 2n frequencies; the delta is then
    // a sum of separable rank-one terms, accumulated per row in fixed point
    // order so the result does not depend on the parallel schedule.
    let np = points.len();
    let mut tables = vec![Complex64::default(); np * d * m];
    par::for_each_chunk_mut(&mut tables, d * m, |p, chunk| {
        let pt = &points[p];
        for a in 0..d {
            for q in 0..m {
                let kq = signed_freq(q, n) as f64;
                chunk[a * m + q] = eval_y(n, PI / n as f64 * (pt.coords[a] - kq));
            }
        }
    });

    let mut delta = vec![Complex64::default(); len];
    par::for_each_chunk_mut(&mut delta, m, |row, line| {
        for (p, pt) in points.iter().enumerate() {
            let t = &tables[p * d * m..(p + 1) * d * m];
            let mut pre = Complex64::new(pt.coeff, 0.0);
            for a in 0..d - 1 {
                let stride = m.pow((d - 2 - a) as u32);
                pre *= t[a * m + row / stride % m];
            }
            let tlast = &t[(d - 1) * m..d * m];
            for q in 0..line.len() {
                line[q] += pre * tlast[q];
            }
        }
    });
    Ok(delta)
}

/// Replace the tensor-rule contributions of the origin-adjacent cubes with
/// singular quadrature. `quad` must be the rule the kernel was built with,
/// so the subtraction cancels exactly what the build added.
pub fn apply_duffy_correction(
    kernel: SpectralKernel,
    sym: &Symbol,
    quad: &QuadratureRule,
) -> Result<SpectralKernel, KernelError> {
    if kernel.corrected {
        return Err(KernelError::DoubleCorrection);
    }
    let delta = correction_delta(sym, kernel.spec, quad)?;
    let mut kernel = kernel;
    let m = 2 * kernel.spec.n();
    par::for_each_chunk_zip(&mut kernel.values, &delta, m, |_, dst, src| {
        for (x, y) in dst.iter_mut().zip(src) {
            *x += y;
        }
    });
    kernel.corrected = true;
    kernel.symbol_id = sym.canonical_id();
    Ok(kernel)
}

/// In-memory kernel cache keyed by [`kernel_cache_key`]; a stencil has to be
/// computed only once per symbol, grid size and quadrature order, and the
/// zero-radius bisection revisits scales freely.
#[derive(Default)]
pub struct KernelCache {
    map: Mutex<HashMap<String, Arc<SpectralKernel>>>,
    mem_limit: Option<usize>,
}

impl KernelCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_mem_limit(limit: usize) -> Self {
        KernelCache { map: Mutex::new(HashMap::new()), mem_limit: Some(limit) }
    }

    /// Fetch or build the kernel for (symbol, spec, tensor Gauss order),
    /// correcting it when `corrected` is set.
    pub fn get_or_build(
        &self,
        sym: &Symbol,
        spec: GridSpec,
        quad_order: usize,
        corrected: bool,
    ) -> Result<Arc<SpectralKernel>, KernelError> {
        let key = kernel_cache_key(sym, spec, quad_order, corrected);
        if let Some(hit) = self.map.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let rule1d = quadrature::gauss_legendre_1d(quad_order)?;
        let quad = quadrature::tensorize(&rule1d, spec.dim())?;
        let limit = self.mem_limit.unwrap_or(DEFAULT_MEM_LIMIT);
        let mut kernel = build_kernel_with_limit(sym, spec, &quad, limit)?;
        if corrected {
            kernel = apply_duffy_correction(kernel, sym, &quad)?;
        }
        let kernel = Arc::new(kernel);
        let mut map = self.map.lock().unwrap();
        Ok(map.entry(key).or_insert(kernel).clone())
    }
}
