use sincpde::experiments::{l2_error, torsion_exact};
use sincpde::grid::{ball_mask, make_grid};
use sincpde::kernel::{build_kernel, correction_delta};
use sincpde::operators::{GridField, MaskedOperator};
use sincpde::quadrature::{gauss_legendre_1d, tensorize};
use sincpde::solvers::{solve_dirichlet, SolveMethod};
use sincpde::symbols::Symbol;
use std::sync::Arc;

fn torsion_l2(d: usize, s: f64, n: usize, order: usize) -> f64 {
    let r = 0.25;
    let spec = make_grid(d, n).unwrap();
    let quad = tensorize(&gauss_legendre_1d(order).unwrap(), d).unwrap();
    let sym = Symbol::fractional(s).unwrap().rescale_for_domain(r, 1.0).unwrap();
    let kernel = Arc::new(build_kernel(&sym, spec, &quad).unwrap());
    let c = vec![0.5; d];
    let mask = ball_mask(spec, &c, r).unwrap();
    let op = MaskedOperator::new(kernel, Arc::new(mask)).unwrap();
    let f = GridField::constant_on(op.mask(), 1.0);
    let (u, _) = solve_dirichlet(&op, &f, SolveMethod::Cg, 1e-11, 6000).unwrap();
    let exact = GridField::from_fn(spec, |x| {
        let mapped: Vec<f64> = (0..d).map(|a| (x[a] - 0.5) / r).collect();
        torsion_exact(d, s, &mapped).unwrap()
    });
    l2_error(&u, &exact).unwrap()
}

fn main() {
    // 1) fractional correction delta magnitude
    let spec = make_grid(2, 32).unwrap();
    let quad = tensorize(&gauss_legendre_1d(7).unwrap(), 2).unwrap();
    let sym = Symbol::fractional(0.5).unwrap().rescale_for_domain(0.25, 1.0).unwrap();
    let delta = correction_delta(&sym, spec, &quad).unwrap();
    let dmax = delta.iter().map(|c| c.norm()).fold(0.0, f64::max);
    println!("frac(0.5) correction: max|delta| = {dmax:.3e}");

    // 2) quadrature-order sensitivity at n=64, d=2, s=0.5
    for order in [5usize, 7, 12, 20] {
        let e = torsion_l2(2, 0.5, 64, order);
        println!("d=2 n=64 order {order:2}: l2 = {e:.6e}");
    }

    // 3) d=1 rates
    for s in [0.25, 0.5, 0.75] {
        print!("d=1 s={s}: ");
        let mut prev: Option<f64> = None;
        for n in [32usize, 64, 128, 256, 512] {
            let e = torsion_l2(1, s, n, 7);
            if let Some(p) = prev {
                print!("{:.3e} (rate {:.2})  ", e, (p / e).log2());
            } else {
                print!("{e:.3e}  ");
            }
            prev = Some(e);
        }
        println!();
    }
}
