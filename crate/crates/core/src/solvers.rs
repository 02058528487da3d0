//! Matrix-free symmetric Krylov solvers: CG and MINRES for the Dirichlet
//! collocation system, and a Lanczos eigensolver with full
//! reorthogonalization for the smallest eigenvalues of the masked operator.
//!
//! All randomness (Lanczos/power-iteration starting vectors) comes from a
//! caller-provided seed, so iteration counts and results are reproducible.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::operators::{GridField, MaskedOperator, OperatorError};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("conjugate gradient breakdown at iteration {iter}: curvature p·Ap = {curvature:e} is not positive; retry with MINRES")]
    CgIndefinite { iter: usize, curvature: f64 },
    #[error("eigensolver reached {max_iter} iterations with worst residual {worst:e} above tolerance {tol:e}")]
    EigenNoConvergence { tol: f64, max_iter: usize, worst: f64 },
    #[error("requested {count} eigenpairs from a masked subspace of dimension {dim}")]
    CountExceedsDim { count: usize, dim: usize },
    #[error("zero vector passed where a nonzero vector is required")]
    ZeroVector,
    #[error("tridiagonal QL iteration failed to converge")]
    TridiagonalNoConvergence,
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// A symmetric linear map given only through its action.
pub trait LinearMap {
    fn dim(&self) -> usize;
    fn apply_to(&self, x: &[f64], y: &mut [f64]) -> Result<(), SolverError>;
}

impl LinearMap for MaskedOperator {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn apply_to(&self, x: &[f64], y: &mut [f64]) -> Result<(), SolverError> {
        let out = self.apply_masked_vector(x)?;
        y.copy_from_slice(&out);
        Ok(())
    }
}

/// Dense symmetric matrix in row-major order; the solver test oracle.
pub struct DenseMap {
    pub n: usize,
    pub a: Vec<f64>,
}

impl LinearMap for DenseMap {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply_to(&self, x: &[f64], y: &mut [f64]) -> Result<(), SolverError> {
        for i in 0..self.n {
            y[i] = self.a[i * self.n..(i + 1) * self.n]
                .iter()
                .zip(x)
                .map(|(a, b)| a * b)
                .sum();
        }
        Ok(())
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolveMethod {
    Cg,
    Minres,
}

impl std::fmt::Display for SolveMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SolveMethod::Cg => write!(f, "cg"),
            SolveMethod::Minres => write!(f, "minres"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub iterations: usize,
    /// Euclidean norm of b − Ax over the masked indices, re-measured with
    /// one extra operator application after the iteration finished.
    pub final_residual: f64,
    pub converged: bool,
    pub method: SolveMethod,
}

/// Conjugate gradients for positive definite systems. Returns the iterate
/// with the smallest recurrence residual and the iteration count.
pub fn cg(
    a: &impl LinearMap,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize), SolverError> {
    let n = a.dim();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok((x, 0));
    }
    let mut rr = dot(&r, &r);
    let mut best = x.clone();
    let mut best_res = rr.sqrt();
    for iter in 1..=max_iter {
        a.apply_to(&p, &mut ap)?;
        let curvature = dot(&p, &ap);
        if curvature <= 0.0 {
            return Err(SolverError::CgIndefinite { iter, curvature });
        }
        let alpha = rr / curvature;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        let rr_new = dot(&r, &r);
        let res = rr_new.sqrt();
        if res < best_res {
            best_res = res;
            best.copy_from_slice(&x);
        }
        if res <= tol * b_norm {
            return Ok((x, iter));
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    Ok((best, max_iter))
}

/// MINRES for symmetric (possibly indefinite) systems, tracking the residual
/// norm through the Givens recurrence.
pub fn minres(
    a: &impl LinearMap,
    b: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<(Vec<f64>, usize), SolverError> {
    let n = a.dim();
    let mut x = vec![0.0; n];
    let beta1 = norm(b);
    if beta1 == 0.0 {
        return Ok((x, 0));
    }

    let mut v_old = vec![0.0; n];
    let mut v: Vec<f64> = b.iter().map(|&bi| bi / beta1).collect();
    let mut w_old = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut p = vec![0.0; n];

    let mut beta = 0.0f64;
    let (mut c, mut s) = (1.0f64, 0.0f64);
    let (mut c_old, mut s_old) = (1.0f64, 0.0f64);
    let mut eta = beta1;

    for iter in 1..=max_iter {
        a.apply_to(&v, &mut p)?;
        let alpha = dot(&v, &p);
        for i in 0..n {
            p[i] -= alpha * v[i] + beta * v_old[i];
        }
        let beta_new = norm(&p);

        // Apply the two previous rotations to the new tridiagonal column,
        // then form the rotation that annihilates beta_new.
        let delta = c * alpha - c_old * s * beta;
        let rho1 = delta.hypot(beta_new);
        let rho2 = s * alpha + c_old * c * beta;
        let rho3 = s_old * beta;
        let c_new = delta / rho1;
        let s_new = beta_new / rho1;

        for i in 0..n {
            let wi = (v[i] - rho2 * w[i] - rho3 * w_old[i]) / rho1;
            w_old[i] = w[i];
            w[i] = wi;
            x[i] += c_new * eta * wi;
        }
        eta = -s_new * eta;

        if eta.abs() <= tol * beta1 {
            return Ok((x, iter));
        }
        if beta_new < f64::EPSILON * beta1 {
            // Krylov space exhausted.
            return Ok((x, iter));
        }
        for i in 0..n {
            let vi = p[i] / beta_new;
            v_old[i] = v[i];
            v[i] = vi;
        }
        beta = beta_new;
        c_old = c;
        s_old = s;
        c = c_new;
        s = s_new;
    }
    Ok((x, max_iter))
}

/// Solve the Dirichlet collocation system A u = f on the mask interior;
/// the returned field is zero at exterior points. The reported residual is
/// re-measured by one extra operator application, so `converged` certifies
/// ‖b − Au‖ ≤ tol·‖b‖ independently of the iteration's own bookkeeping.
pub fn solve_dirichlet(
    op: &MaskedOperator,
    f: &GridField,
    method: SolveMethod,
    tol: f64,
    max_iter: usize,
) -> Result<(GridField, SolveReport), SolverError> {
    let b = f.masked_values(op.mask());
    let (x, iterations) = match method {
        SolveMethod::Cg => cg(op, &b, tol, max_iter)?,
        SolveMethod::Minres => minres(op, &b, tol, max_iter)?,
    };
    let mut ax = vec![0.0; b.len()];
    op.apply_to(&x, &mut ax)?;
    let final_residual = b.iter().zip(&ax).map(|(bi, ai)| (bi - ai).powi(2)).sum::<f64>().sqrt();
    let b_norm = norm(&b);
    let report = SolveReport {
        iterations,
        final_residual,
        converged: final_residual <= tol * b_norm || b_norm == 0.0,
        method,
    };
    let u = GridField::from_masked_values(op.mask(), &x)?;
    Ok((u, report))
}

/// ⟨Av,v⟩ / ⟨v,v⟩.
pub fn rayleigh_quotient(a: &impl LinearMap, v: &[f64]) -> Result<f64, SolverError> {
    let vv = dot(v, v);
    if vv == 0.0 {
        return Err(SolverError::ZeroVector);
    }
    let mut av = vec![0.0; a.dim()];
    a.apply_to(v, &mut av)?;
    Ok(dot(&av, v) / vv)
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit-shift QL
/// iteration with accumulated transforms. `z` comes in as the m×m identity
/// (row-major) and leaves holding the eigenvectors (column j ↔ d[j]).
/// Results are unsorted.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<(), SolverError> {
    let m = d.len();
    for l in 0..m {
        let mut iter = 0;
        loop {
            let mut split = m - 1;
            for i in l..m - 1 {
                let dd = d[i].abs() + d[i + 1].abs();
                if e[i].abs() <= f64::EPSILON * dd {
                    split = i;
                    break;
                }
            }
            if split == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(SolverError::TridiagonalNoConvergence);
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[split] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut underflow = false;
            let mut i = split;
            while i > l {
                i -= 1;
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[split] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..m {
                    f = z[k * m + i + 1];
                    z[k * m + i + 1] = s * z[k * m + i] + c * f;
                    z[k * m + i] = c * z[k * m + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[split] = 0.0;
        }
    }
    Ok(())
}

/// Ascending eigenvalues and the matching eigenvector matrix (row-major,
/// column j belongs to eigenvalue j) of the symmetric tridiagonal matrix
/// with diagonal `diag` and off-diagonal `off`.
pub fn symmetric_tridiagonal_eigen(
    diag: &[f64],
    off: &[f64],
) -> Result<(Vec<f64>, Vec<f64>), SolverError> {
    let m = diag.len();
    assert_eq!(off.len() + 1, m, "off-diagonal length must be diag length - 1");
    let mut d = diag.to_vec();
    let mut e = vec![0.0; m];
    e[..m - 1].copy_from_slice(off);
    let mut z = vec![0.0; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }
    tridiagonal_ql(&mut d, &mut e, &mut z)?;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let mut vectors = vec![0.0; m * m];
    for (new_j, &old_j) in order.iter().enumerate() {
        for k in 0..m {
            vectors[k * m + new_j] = z[k * m + old_j];
        }
    }
    Ok((values, vectors))
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    /// Ascending algebraically smallest eigenvalues.
    pub eigenvalues: Vec<f64>,
    /// Matching orthonormal eigenvectors over the masked indices.
    pub eigenvectors: Vec<Vec<f64>>,
    /// ‖Av − λv‖ per pair, measured against the original operator.
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

fn random_unit_vector(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let nv = norm(&v);
    for x in &mut v {
        *x /= nv;
    }
    v
}

/// The `count` algebraically smallest eigenvalues of the symmetric map,
/// via Lanczos with full reorthogonalization on the spectrally flipped
/// operator σI − A (σ an upper bound on the spectrum from 30 power
/// iterations), so the smallest eigenvalues of A become the largest of the
/// flipped map. Convergence of a Ritz pair is judged from its residual
/// estimate; when the (count+1)-th Ritz value is not separated from the
/// count-th (a degenerate cluster straddling the window), the cluster
/// member must converge as well before the iteration stops.
pub fn eigen_smallest(
    a: &impl LinearMap,
    count: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigenResult, SolverError> {
    let n = a.dim();
    if count == 0 || count > n {
        return Err(SolverError::CountExceedsDim { count, dim: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Spectral bound by power iteration. Any upper estimate keeps the flip
    // order-reversing; the bound only needs the right ballpark.
    let mut x = random_unit_vector(n, &mut rng);
    let mut y = vec![0.0; n];
    let mut bound = 0.0f64;
    for _ in 0..30 {
        a.apply_to(&x, &mut y)?;
        let ny = norm(&y);
        bound = bound.max(ny);
        if ny == 0.0 {
            break;
        }
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / ny;
        }
    }
    let sigma = 1.1 * bound + 1.0;

    let budget = max_iter.min(n);
    let mut basis: Vec<Vec<f64>> = vec![random_unit_vector(n, &mut rng)];
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let check_every = 10usize;

    let converged_window =
        |alphas: &[f64], betas: &[f64], last_beta: f64| -> Result<bool, SolverError> {
            let m = alphas.len();
            if m == n {
                // Full space spanned; the Ritz pairs are exact up to rounding.
                return Ok(true);
            }
            if m < count + 1 {
                return Ok(false);
            }
            let (theta, z) = symmetric_tridiagonal_eigen(alphas, &betas[..m - 1])?;
            let res_est = |j: usize| -> f64 { (last_beta * z[(m - 1) * m + j]).abs() };
            let mut need: Vec<usize> = (m - count..m).collect();
            let spread = (theta[m - 1] - theta[0]).abs().max(1.0);
            let gap = theta[m - count] - theta[m - count - 1];
            if gap.abs() <= 1e-6 * spread {
                need.push(m - count - 1);
            }
            Ok(need.into_iter().all(|j| res_est(j) <= tol))
        };

    let mut iterations = 0;
    for j in 0..budget {
        iterations = j + 1;
        // w = (σI − A)·v_j
        a.apply_to(&basis[j], &mut w)?;
        for (wi, vi) in w.iter_mut().zip(&basis[j]) {
            *wi = sigma * vi - *wi;
        }
        if j > 0 {
            axpy(-betas[j - 1], &basis[j - 1], &mut w);
        }
        let alpha = dot(&w, &basis[j]);
        axpy(-alpha, &basis[j], &mut w);
        for _ in 0..2 {
            for v in &basis {
                let proj = dot(&w, v);
                axpy(-proj, v, &mut w);
            }
        }
        alphas.push(alpha);
        let beta = norm(&w);

        let exhausted = beta <= 1e-12 * sigma.abs().max(1.0);
        let at_checkpoint = (j + 1) % check_every == 0 || j + 1 == budget || exhausted;
        if at_checkpoint && converged_window(&alphas, &betas, beta)? {
            break;
        }
        if j + 1 == budget || alphas.len() == n {
            break;
        }
        if exhausted {
            // The Krylov space hit an invariant subspace before enough pairs
            // converged (eigenvalue multiplicities do this). Deflate: continue
            // with a fresh random direction orthogonal to the basis; the
            // tridiagonal matrix just gains a zero coupling.
            let mut fresh = random_unit_vector(n, &mut rng);
            for _ in 0..2 {
                for v in &basis {
                    let proj = dot(&fresh, v);
                    axpy(-proj, v, &mut fresh);
                }
            }
            let nv = norm(&fresh);
            if nv < 1e-8 {
                break;
            }
            for xi in &mut fresh {
                *xi /= nv;
            }
            betas.push(0.0);
            basis.push(fresh);
        } else {
            for xi in &mut w {
                *xi /= beta;
            }
            betas.push(beta);
            basis.push(w.clone());
        }
    }

    // Ritz extraction: the largest Ritz values of the flipped operator are
    // the smallest eigenvalues of A.
    let m = alphas.len();
    if m < count {
        return Err(SolverError::CountExceedsDim { count, dim: m });
    }
    let (theta, z) = symmetric_tridiagonal_eigen(&alphas, &betas[..m - 1])?;
    let mut eigenvalues = Vec::with_capacity(count);
    let mut eigenvectors = Vec::with_capacity(count);
    for idx in 0..count {
        let j = m - 1 - idx; // largest θ first ⇒ ascending λ = σ − θ
        eigenvalues.push(sigma - theta[j]);
        let mut v = vec![0.0; n];
        for (row, basis_vec) in basis.iter().take(m).enumerate() {
            axpy(z[row * m + j], basis_vec, &mut v);
        }
        let nv = norm(&v);
        for xi in &mut v {
            *xi /= nv;
        }
        eigenvectors.push(v);
    }

    // True residuals against the original operator.
    let mut worst = 0.0f64;
    let mut residuals = Vec::with_capacity(count);
    for (lambda, v) in eigenvalues.iter().zip(&eigenvectors) {
        a.apply_to(v, &mut w)?;
        axpy(-lambda, v, &mut w);
        let r = norm(&w);
        worst = worst.max(r);
        residuals.push(r);
    }
    if worst > tol {
        return Err(SolverError::EigenNoConvergence { tol, max_iter, worst });
    }
    Ok(EigenResult { eigenvalues, eigenvectors, residuals, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dense(n: usize, entries: &[f64]) -> DenseMap {
        DenseMap { n, a: entries.to_vec() }
    }

    fn random_spd(n: usize, seed: u64) -> DenseMap {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = vec![0.0; n * n];
        for x in &mut b {
            *x = rng.gen_range(-1.0..1.0);
        }
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = (0..n).map(|k| b[k * n + i] * b[k * n + j]).sum::<f64>()
                    + if i == j { n as f64 } else { 0.0 };
            }
        }
        dense(n, &a)
    }

    #[test]
    fn cg_solves_identity_in_one_iteration() {
        let a = dense(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        let b = [3.0, -1.0, 2.0];
        let (x, iters) = cg(&a, &b, 1e-12, 10).unwrap();
        assert_eq!(iters, 1);
        for (xi, bi) in x.iter().zip(&b) {
            assert_abs_diff_eq!(*xi, *bi, epsilon = 1e-12);
        }
    }

    #[test]
    fn cg_breaks_down_on_indefinite_system() {
        let a = dense(2, &[1.0, 0.0, 0.0, -1.0]);
        let err = cg(&a, &[0.0, 1.0], 1e-10, 10).unwrap_err();
        assert!(matches!(err, SolverError::CgIndefinite { .. }));
    }

    #[test]
    fn minres_matches_cg_on_spd_system() {
        let a = random_spd(20, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let b: Vec<f64> = (0..20).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tol = 1e-12;
        let (xc, _) = cg(&a, &b, tol, 500).unwrap();
        let (xm, _) = minres(&a, &b, tol, 500).unwrap();
        for (p, q) in xc.iter().zip(&xm) {
            assert_abs_diff_eq!(*p, *q, epsilon = 1e-8);
        }
    }

    #[test]
    fn minres_handles_indefinite_system() {
        let a = dense(
            4,
            &[
                2.0, 1.0, 0.0, 0.0, //
                1.0, -3.0, 0.5, 0.0, //
                0.0, 0.5, 1.0, -1.0, //
                0.0, 0.0, -1.0, -2.0,
            ],
        );
        let x_true = [1.0, -2.0, 0.5, 3.0];
        let mut b = vec![0.0; 4];
        a.apply_to(&x_true, &mut b).unwrap();
        let (x, _) = minres(&a, &b, 1e-13, 100).unwrap();
        for (xi, ti) in x.iter().zip(&x_true) {
            assert_abs_diff_eq!(*xi, *ti, epsilon = 1e-9);
        }
    }

    #[test]
    fn tridiagonal_two_by_two_closed_form() {
        let (vals, vecs) = symmetric_tridiagonal_eigen(&[1.0, 1.0], &[0.5]).unwrap();
        assert_abs_diff_eq!(vals[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 1.5, epsilon = 1e-12);
        let dot01 = vecs[0] * vecs[1] + vecs[2] * vecs[3];
        assert_abs_diff_eq!(dot01, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn tridiagonal_matches_jacobi_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for m in [3usize, 5, 17] {
            let diag: Vec<f64> = (0..m).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let off: Vec<f64> = (0..m - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let (vals, vecs) = symmetric_tridiagonal_eigen(&diag, &off).unwrap();
            let mut dense_m = vec![0.0; m * m];
            for i in 0..m {
                dense_m[i * m + i] = diag[i];
                if i + 1 < m {
                    dense_m[i * m + i + 1] = off[i];
                    dense_m[(i + 1) * m + i] = off[i];
                }
            }
            let oracle = crate::oracles::jacobi_eigenvalues(&dense_m, m);
            for (a, b) in vals.iter().zip(&oracle) {
                assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
            }
            for j in 0..m {
                for i in 0..m {
                    let az: f64 = (0..m).map(|k| dense_m[i * m + k] * vecs[k * m + j]).sum();
                    assert_abs_diff_eq!(az, vals[j] * vecs[i * m + j], epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn eigen_two_by_two_closed_form() {
        let (a, b) = (1.3, -0.4);
        let map = dense(2, &[a, b, b, a]);
        let out = eigen_smallest(&map, 2, 1e-12, 50, 42).unwrap();
        assert_abs_diff_eq!(out.eigenvalues[0], a - b.abs(), epsilon = 1e-12);
        assert_abs_diff_eq!(out.eigenvalues[1], a + b.abs(), epsilon = 1e-12);
        for r in &out.residuals {
            assert!(*r <= 1e-12);
        }
    }

    #[test]
    fn eigen_identity_returns_ones() {
        let mut a = vec![0.0; 36];
        for i in 0..6 {
            a[i * 6 + i] = 1.0;
        }
        let out = eigen_smallest(&dense(6, &a), 3, 1e-10, 50, 1).unwrap();
        for v in &out.eigenvalues {
            assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn eigen_is_deterministic_for_fixed_seed() {
        let map = random_spd(30, 8);
        let a = eigen_smallest(&map, 4, 1e-10, 200, 42).unwrap();
        let b = eigen_smallest(&map, 4, 1e-10, 200, 42).unwrap();
        assert_eq!(a.iterations, b.iterations);
        for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
            assert!((x - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn eigen_vectors_orthonormal_and_residuals_small() {
        let map = random_spd(40, 21);
        let out = eigen_smallest(&map, 5, 1e-9, 300, 7).unwrap();
        for i in 0..5 {
            for j in 0..=i {
                let d = dot(&out.eigenvectors[i], &out.eigenvectors[j]);
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(d, want, epsilon = 1e-10);
            }
            assert!(out.residuals[i] <= 1e-9);
        }
        for w in out.eigenvalues.windows(2) {
            assert!(w[0] <= w[1] + 1e-12);
        }
    }

    #[test]
    fn rayleigh_quotient_examples() {
        let map = dense(2, &[2.0, 1.0, 1.0, 2.0]);
        let v = [std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
        assert_abs_diff_eq!(rayleigh_quotient(&map, &v).unwrap(), 3.0, epsilon = 1e-12);
        assert!(matches!(
            rayleigh_quotient(&map, &[0.0, 0.0]).unwrap_err(),
            SolverError::ZeroVector
        ));
    }

    #[test]
    fn count_bounds_are_checked() {
        let map = dense(2, &[1.0, 0.0, 0.0, 1.0]);
        assert!(matches!(
            eigen_smallest(&map, 3, 1e-10, 50, 1).unwrap_err(),
            SolverError::CountExceedsDim { .. }
        ));
    }
}
