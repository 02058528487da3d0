//! Cross-checks of the FFT-based kernel assembly against independent
//! reference computations: direct summation of the coefficient formula,
//! graded singular quadrature for the corrected cubes, and the structural
//! invariants (conjugate-even coefficients, real even stencil).

use num_complex::Complex64;
use sincpde::grid::make_grid;
use sincpde::kernel::{
    apply_duffy_correction, build_kernel, correction_delta, cube_integral_regular,
    cube_integral_singular, eval_y,
};
use sincpde::oracles;
use sincpde::quadrature::{gauss_legendre_1d, graded_gauss_1d, graded_singular_integrate, tensorize};
use sincpde::symbols::Symbol;

fn symbol_catalogue() -> Vec<Symbol> {
    vec![
        Symbol::fractional(0.3).unwrap(),
        Symbol::fractional(0.7).unwrap(),
        Symbol::logarithmic(),
        Symbol::laplacian(),
        Symbol::constant(1.0),
    ]
}

#[test]
fn fft_build_matches_direct_summation() {
    for d in [1usize, 2] {
        for n in [4usize, 8] {
            let spec = make_grid(d, n).unwrap();
            let quad = tensorize(&gauss_legendre_1d(4).unwrap(), d).unwrap();
            for sym in symbol_catalogue() {
                let kernel = build_kernel(&sym, spec, &quad).unwrap();
                let direct = oracles::phi_hat_direct(&sym, spec, &quad);
                let scale = direct.iter().map(|c| c.norm()).fold(0.0, f64::max);
                for (i, (a, b)) in kernel.values().iter().zip(&direct).enumerate() {
                    assert!(
                        (a - b).norm() <= 1e-11 * scale,
                        "{} d={d} n={n} index {i}: fft {a} vs direct {b}",
                        sym.canonical_id()
                    );
                }
            }
        }
    }
}

#[test]
fn eval_y_matches_direct_summation_oracle() {
    for n in [4usize, 8, 16] {
        for x in [0.0, 0.3, -2.2, 3.14, 5.8] {
            let fast = eval_y(n, x);
            let direct = oracles::y_direct(n, x);
            assert!((fast - direct).norm() < 1e-12 * (2 * n) as f64);
        }
        // Just above the removable-singularity branch the closed form loses
        // digits to cancellation in the small denominator; the error stays
        // bounded by machine-epsilon over the distance to 2π.
        let x = 6.2831853;
        let dist = (x - 2.0 * std::f64::consts::PI).abs();
        let fast = eval_y(n, x);
        let direct = oracles::y_direct(n, x);
        assert!((fast - direct).norm() < 1e-14 / dist * (2 * n) as f64);
    }
}

#[test]
fn kernel_values_are_conjugate_even_and_stencil_real_even() {
    let d = 2;
    let n = 8usize;
    let m = 2 * n;
    let spec = make_grid(d, n).unwrap();
    let quad = tensorize(&gauss_legendre_1d(5).unwrap(), d).unwrap();
    for sym in symbol_catalogue() {
        let kernel = build_kernel(&sym, spec, &quad).unwrap();
        let values = kernel.values();
        let vmax = values.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for p0 in 0..m {
            for p1 in 0..m {
                let conj_idx = ((m - p0) % m) * m + (m - p1) % m;
                let a = values[p0 * m + p1];
                let b = values[conj_idx].conj();
                assert!(
                    (a - b).norm() <= 1e-10 * vmax,
                    "{}: conjugate symmetry at ({p0},{p1})",
                    sym.canonical_id()
                );
            }
        }
        let stencil = kernel.stencil();
        let smax = stencil.iter().map(|v| v.abs()).fold(0.0, f64::max);
        // Imaginary parts of the inverse DFT below 1e-10·max|Φ|.
        let mut buf: Vec<Complex64> = values.to_vec();
        sincpde::fft::ndfft(&mut buf, &[m, m], true);
        let imax = buf.iter().map(|c| c.im.abs()).fold(0.0, f64::max) / (m * m) as f64;
        assert!(imax <= 1e-10 * smax, "{}: imag residue", sym.canonical_id());
        for p0 in 0..m {
            for p1 in 0..m {
                let refl = ((m - p0) % m) * m + (m - p1) % m;
                assert!(
                    (stencil[p0 * m + p1] - stencil[refl]).abs() <= 1e-10 * smax,
                    "{}: even stencil at ({p0},{p1})",
                    sym.canonical_id()
                );
            }
        }
    }
}

#[test]
fn correction_is_local_and_reverts_bitwise() {
    let spec = make_grid(2, 8).unwrap();
    let quad = tensorize(&gauss_legendre_1d(5).unwrap(), 2).unwrap();
    let sym = Symbol::logarithmic();
    let base = build_kernel(&sym, spec, &quad).unwrap();
    let delta = correction_delta(&sym, spec, &quad).unwrap();
    let corrected = apply_duffy_correction(base.clone(), &sym, &quad).unwrap();

    // corrected == base + delta, and subtracting delta restores base exactly
    for i in 0..delta.len() {
        let expect = base.values()[i] + delta[i];
        assert_eq!(corrected.values()[i].re.to_bits(), expect.re.to_bits());
        assert_eq!(corrected.values()[i].im.to_bits(), expect.im.to_bits());
        let reverted = corrected.values()[i] - delta[i];
        let vmax = base.values()[i].norm().max(1.0);
        assert!((reverted - base.values()[i]).norm() <= 1e-14 * vmax);
    }
}

#[test]
fn correction_delta_matches_per_cube_integrals() {
    // The separable-table accumulation must agree with the direct per-k
    // evaluation of (singular − regular) cube integrals times (2N)^{-d}.
    let spec = make_grid(1, 4).unwrap();
    let n = 4usize;
    let m = 2 * n;
    let quad = gauss_legendre_1d(6).unwrap();
    let sym = Symbol::logarithmic();
    let delta = correction_delta(&sym, spec, &quad).unwrap();
    for p in 0..m {
        let k = if p < n { p as i64 } else { p as i64 - m as i64 };
        let mut want = Complex64::default();
        for cube in [[0i64], [-1i64]] {
            let reg = cube_integral_regular(&sym, spec, &cube, &[k], &quad);
            let sing = cube_integral_singular(&sym, spec, &cube, &[k], &quad).unwrap();
            want += (sing - reg) / m as f64;
        }
        assert!(
            (delta[p] - want).norm() <= 1e-11 * want.norm().max(1.0),
            "delta at k={k}: {} vs {}",
            delta[p],
            want
        );
    }
}

#[test]
fn corrected_cube_integrals_match_graded_oracle() {
    // The Duffy-path value of ∫_{Q_j} m(πω) Y_d(π/N(ω−k)) dω for the log
    // symbol against the dyadic-grading oracle, on the cube touching the
    // origin. The Duffy base rule carries graded panels so the pulled-back
    // ω·log ω endpoint is resolved; the oracle grades the original square.
    let n = 4usize;
    let spec = make_grid(2, n).unwrap();
    let sym = Symbol::logarithmic();
    let duffy_base = tensorize(&graded_gauss_1d(10, 40).unwrap(), 2).unwrap();
    let oracle_rule = tensorize(&gauss_legendre_1d(16).unwrap(), 2).unwrap();
    for cube in [[0i64, 0], [-1, 0], [0, -1], [-1, -1]] {
        for k in [[0i64, 0], [1, 3], [-2, 1]] {
            let duffy_val = cube_integral_singular(&sym, spec, &cube, &k, &duffy_base).unwrap();
            // Independent route: same reflected integrand, graded oracle.
            let re = graded_singular_integrate(
                |w| reflected_integrand(&sym, n, &cube, &k, w).re,
                40,
                &oracle_rule,
            )
            .unwrap();
            let im = graded_singular_integrate(
                |w| reflected_integrand(&sym, n, &cube, &k, w).im,
                40,
                &oracle_rule,
            )
            .unwrap();
            let oracle = Complex64::new(re, im);
            assert!(
                (duffy_val - oracle).norm() <= 1e-8,
                "cube {cube:?} k {k:?}: duffy {duffy_val} vs graded {oracle}"
            );
        }
    }
}

/// The integrand of the origin-cube integral after reflection onto [0,1]²,
/// built from public evaluators only.
fn reflected_integrand(sym: &Symbol, n: usize, cube: &[i64], k: &[i64], w: &[f64]) -> Complex64 {
    let coords: Vec<f64> =
        (0..2).map(|a| if cube[a] == -1 { -w[a] } else { w[a] }).collect();
    let omega: Vec<f64> = coords.iter().map(|&c| std::f64::consts::PI * c).collect();
    let mut y = Complex64::new(1.0, 0.0);
    for a in 0..2 {
        y *= eval_y(n, std::f64::consts::PI / n as f64 * (coords[a] - k[a] as f64));
    }
    sym.eval(&omega) * y
}

#[test]
fn constant_symbol_correction_is_noop() {
    // Without a singularity the regular and singular rules integrate the
    // same smooth constant × Y_d integrand; they agree to quadrature
    // accuracy, which passes 1e-12 from order 10 on (order 7 leaves ~8e-11).
    let spec = make_grid(2, 4).unwrap();
    let quad = tensorize(&gauss_legendre_1d(10).unwrap(), 2).unwrap();
    let delta = correction_delta(&Symbol::constant(1.0), spec, &quad).unwrap();
    for (i, d) in delta.iter().enumerate() {
        assert!(d.norm() <= 1e-12, "delta[{i}] = {d}");
    }
}
