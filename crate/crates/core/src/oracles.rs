//! Reference implementations used by the test suites to cross-check the
//! production paths. Everything here is deliberately naive — direct
//! summation instead of FFTs, dense assembly instead of matrix-free
//! application, Jacobi sweeps instead of Lanczos — and stays independent of
//! the code it checks. Not intended for production use.

use num_complex::Complex64;

use crate::grid::{DomainMask, GridSpec};
use crate::kernel::SpectralKernel;
use crate::quadrature::QuadratureRule;
use crate::symbols::Symbol;

/// Σ_{j=-n}^{n-1} e^{ijx} by direct summation.
pub fn y_direct(n: usize, x: f64) -> Complex64 {
    (-(n as i64)..n as i64)
        .map(|j| Complex64::from_polar(1.0, j as f64 * x))
        .sum()
}

fn signed(p: usize, n: usize) -> i64 {
    if p < n {
        p as i64
    } else {
        p as i64 - 2 * n as i64
    }
}

fn decode(mut p: usize, d: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0usize; d];
    for a in (0..d).rev() {
        out[a] = p % m;
        p /= m;
    }
    out
}

/// Direct O(N^{2d}·N_Q) evaluation of the stencil coefficients
/// Φ̂_k = (2N)^{-d} Σ_i α_i Σ_j m(π(j+x_i)) Y_d(π/N(j−k) + π/N·x_i),
/// with its own Y summation. Only sensible for small N.
pub fn phi_hat_direct(sym: &Symbol, spec: GridSpec, quad: &QuadratureRule) -> Vec<Complex64> {
    let d = spec.dim();
    let n = spec.n();
    let m = 2 * n;
    let len = spec.dft_len();
    let scale = 1.0 / len as f64;
    let mut out = vec![Complex64::default(); len];
    for (pk, slot) in out.iter_mut().enumerate() {
        let k: Vec<i64> = decode(pk, d, m).into_iter().map(|p| signed(p, n)).collect();
        let mut acc = Complex64::default();
        for (node, alpha) in quad.iter() {
            for pj in 0..len {
                let j: Vec<i64> = decode(pj, d, m).into_iter().map(|p| signed(p, n)).collect();
                let omega: Vec<f64> = (0..d)
                    .map(|a| std::f64::consts::PI * (j[a] as f64 + node[a]))
                    .collect();
                let mut yd = Complex64::new(1.0, 0.0);
                for a in 0..d {
                    let arg = std::f64::consts::PI / n as f64 * ((j[a] - k[a]) as f64 + node[a]);
                    yd *= y_direct(n, arg);
                }
                acc += alpha * sym.eval(&omega) * yd;
            }
        }
        *slot = scale * acc;
    }
    out
}

/// Real-space stencil by naive inverse DFT of the kernel coefficients.
pub fn stencil_direct(kernel: &SpectralKernel) -> Vec<f64> {
    let spec = kernel.spec();
    let d = spec.dim();
    let m = 2 * spec.n();
    let len = spec.dft_len();
    let values = kernel.values();
    let mut out = vec![0.0; len];
    for (p, slot) in out.iter_mut().enumerate() {
        let pi = decode(p, d, m);
        let mut acc = Complex64::default();
        for (q, v) in values.iter().enumerate() {
            let qi = decode(q, d, m);
            let phase: f64 = pi
                .iter()
                .zip(&qi)
                .map(|(&a, &b)| (a * b % m) as f64 / m as f64)
                .sum();
            acc += v * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * phase);
        }
        *slot = (acc / len as f64).re;
    }
    out
}

/// Densely assembled collocation matrix A[i][j] = Φ(inside_i − inside_j)
/// (row-major over mask ordinals), built from the naive inverse-DFT stencil.
pub fn dense_from_kernel(kernel: &SpectralKernel, mask: &DomainMask) -> Vec<f64> {
    let spec = kernel.spec();
    let d = spec.dim();
    let m = 2 * spec.n();
    let stencil = stencil_direct(kernel);
    let nn = mask.len();
    let mut a = vec![0.0; nn * nn];
    for (i, ki) in mask.inside().iter().enumerate() {
        for (j, kj) in mask.inside().iter().enumerate() {
            let mut off = 0usize;
            for axis in 0..d {
                let diff = (ki[axis] as i64 - kj[axis] as i64).rem_euclid(m as i64) as usize;
                off = off * m + diff;
            }
            a[i * nn + j] = stencil[off];
        }
    }
    a
}

/// Ascending eigenvalues of a dense symmetric matrix by the cyclic Jacobi
/// rotation method.
pub fn jacobi_eigenvalues(matrix: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(matrix.len(), n * n);
    let mut a = matrix.to_vec();
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };
    let scale: f64 = (0..n).map(|i| a[i * n + i].abs()).fold(1.0, f64::max);
    for _sweep in 0..100 {
        if off(&a) <= 1e-14 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut vals: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    vals.sort_by(|x, y| x.partial_cmp(y).unwrap());
    vals
}
