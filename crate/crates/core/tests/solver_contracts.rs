//! End-to-end solver contracts on real discretized operators: re-verified
//! residuals, CG/MINRES agreement on definite systems, and the identity
//! solve.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sincpde::grid::{ball_mask, make_grid};
use sincpde::kernel::{apply_duffy_correction, build_kernel};
use sincpde::operators::{GridField, MaskedOperator};
use sincpde::quadrature::{gauss_legendre_1d, tensorize};
use sincpde::solvers::{solve_dirichlet, LinearMap, SolveMethod};
use sincpde::symbols::Symbol;
use std::sync::Arc;

fn operator(sym: &Symbol, n: usize, correct: bool, radius: f64) -> MaskedOperator {
    let spec = make_grid(2, n).unwrap();
    let quad = tensorize(&gauss_legendre_1d(5).unwrap(), 2).unwrap();
    let mut kernel = build_kernel(sym, spec, &quad).unwrap();
    if correct {
        kernel = apply_duffy_correction(kernel, sym, &quad).unwrap();
    }
    let mask = ball_mask(spec, &[0.5, 0.5], radius).unwrap();
    MaskedOperator::new(Arc::new(kernel), Arc::new(mask)).unwrap()
}

#[test]
fn identity_system_solves_in_one_iteration() {
    let op = operator(&Symbol::constant(1.0), 16, false, 0.3);
    let f = GridField::constant_on(op.mask(), 1.0);
    let (u, report) = solve_dirichlet(&op, &f, SolveMethod::Cg, 1e-12, 10).unwrap();
    assert!(report.converged);
    assert_eq!(report.iterations, 1);
    for k in op.mask().inside() {
        assert!((u.get(k) - 1.0).abs() < 1e-10);
    }
    // zero outside the mask
    let total: f64 = u.data().iter().map(|x| x.abs()).sum();
    assert!((total - op.dim() as f64).abs() < 1e-8);
}

#[test]
fn converged_solves_satisfy_reverified_residual() {
    let cases = [
        (Symbol::fractional(0.5).unwrap(), SolveMethod::Cg, false),
        (Symbol::fractional(0.25).unwrap(), SolveMethod::Cg, false),
        (Symbol::logarithmic(), SolveMethod::Minres, true),
    ];
    for (sym, method, correct) in cases {
        let op = operator(&sym, 32, correct, 0.25);
        let f = GridField::constant_on(op.mask(), 1.0);
        let tol = 1e-10;
        let (u, report) = solve_dirichlet(&op, &f, method, tol, 4000).unwrap();
        assert!(report.converged, "{}: {:?}", sym.canonical_id(), report);
        // One more application on top of the report's own re-check.
        let b = f.masked_values(op.mask());
        let x = u.masked_values(op.mask());
        let mut ax = vec![0.0; x.len()];
        op.apply_to(&x, &mut ax).unwrap();
        let res: f64 = b.iter().zip(&ax).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
        let bn: f64 = b.iter().map(|p| p * p).sum::<f64>().sqrt();
        assert!(res <= tol * bn, "{}: residual {res:e}", sym.canonical_id());
    }
}

#[test]
fn cg_and_minres_agree_on_positive_definite_system() {
    let op = operator(&Symbol::fractional(0.6).unwrap(), 16, false, 0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut f = GridField::zeros(op.mask().spec());
    for k in op.mask().inside() {
        f.set(k, rng.gen_range(-1.0..1.0));
    }
    let tol = 1e-11;
    let (ucg, rc) = solve_dirichlet(&op, &f, SolveMethod::Cg, tol, 2000).unwrap();
    let (umr, rm) = solve_dirichlet(&op, &f, SolveMethod::Minres, tol, 2000).unwrap();
    assert!(rc.converged && rm.converged);
    let diff: f64 = ucg
        .data()
        .iter()
        .zip(umr.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let bn: f64 = f.masked_values(op.mask()).iter().map(|p| p * p).sum::<f64>().sqrt();
    assert!(diff <= 10.0 * tol * bn / 1e-2, "solutions differ by {diff:e}");
}

#[test]
fn zero_rhs_gives_zero_solution() {
    let op = operator(&Symbol::logarithmic(), 16, true, 0.25);
    let f = GridField::zeros(op.mask().spec());
    let (u, report) = solve_dirichlet(&op, &f, SolveMethod::Minres, 1e-10, 100).unwrap();
    assert!(report.converged);
    assert_eq!(report.iterations, 0);
    assert!(u.data().iter().all(|&x| x == 0.0));
}
