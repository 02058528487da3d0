//! Quadrature rules on the reference cell [0,1]^d.
//!
//! Plain tensor Gauss-Legendre rules drive the regular kernel assembly; the
//! singular variants ([`duffy_rule`], [`graded_rule`]) integrate integrands
//! with a corner singularity at the origin and back the near-origin
//! correction of the kernel module. [`graded_gauss_1d`] builds a composite
//! 1-D rule with dyadically graded panels, which resolves logarithmic
//! endpoint behavior that a single Gauss panel only reaches at rate
//! order^(-4).

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("order must lie in 1..=64, got {0}")]
    OrderOutOfRange(usize),
    #[error("expected a rule of dimension {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("levels must be >= 1")]
    BadLevels,
}

/// Nodes and weights on [0,1]^dim, stored flat (chunks of `dim` per node).
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    dim: usize,
    base_order: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Order of the underlying 1-D Gauss rule this rule was derived from.
    pub fn base_order(&self) -> usize {
        self.base_order
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.nodes.chunks_exact(self.dim).zip(self.weights.iter().copied())
    }

    /// Apply the rule to an integrand on [0,1]^dim.
    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    // Returns (P_n(x), P_{n-1}(x)) by the three-term recurrence.
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 1..n {
        let p2 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p0) / (j + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    (p1, p0)
}

fn legendre_deriv(n: usize, x: f64) -> f64 {
    let (pn, pn1) = legendre_pair(n, x);
    n as f64 * (x * pn - pn1) / (x * x - 1.0)
}

/// Roots of P_n on (-1,1), found by interlacing: the roots of P_n are
/// separated by the roots of P_{n-1}, so each interval carries exactly one
/// sign change. Bisection is followed by a short Newton polish.
fn legendre_roots(n: usize) -> Vec<f64> {
    let mut roots: Vec<f64> = Vec::new();
    for m in 1..=n {
        let mut bounds = Vec::with_capacity(m + 1);
        bounds.push(-1.0);
        bounds.extend_from_slice(&roots);
        bounds.push(1.0);
        let mut next = Vec::with_capacity(m);
        for w in bounds.windows(2) {
            let (mut a, mut b) = (w[0], w[1]);
            let fa = legendre_pair(m, a).0;
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                let fm = legendre_pair(m, mid).0;
                if (fm > 0.0) == (fa > 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let mut x = 0.5 * (a + b);
            for _ in 0..3 {
                let (p, _) = legendre_pair(m, x);
                let d = legendre_deriv(m, x);
                let step = p / d;
                if step.is_finite() {
                    x = (x - step).clamp(w[0], w[1]);
                }
            }
            next.push(x);
        }
        roots = next;
    }
    // Enforce exact reflection symmetry of the node set.
    for i in 0..n / 2 {
        let s = 0.5 * (roots[n - 1 - i] - roots[i]);
        roots[i] = -s;
        roots[n - 1 - i] = s;
    }
    if n % 2 == 1 {
        roots[n / 2] = 0.0;
    }
    roots
}

/// `order`-point Gauss-Legendre rule on [0,1]; exact for polynomials of
/// degree ≤ 2·order−1.
pub fn gauss_legendre_1d(order: usize) -> Result<QuadratureRule, QuadratureError> {
    if !(1..=64).contains(&order) {
        return Err(QuadratureError::OrderOutOfRange(order));
    }
    let roots = legendre_roots(order);
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    for &x in &roots {
        let d = legendre_deriv(order, x);
        let w = 2.0 / ((1.0 - x * x) * d * d);
        nodes.push(0.5 * (x + 1.0));
        weights.push(0.5 * w);
    }
    Ok(QuadratureRule { dim: 1, base_order: order, nodes, weights })
}

/// Composite 1-D rule on [0,1] with `panels` dyadic panels [2^{-i-1}, 2^{-i}]
/// graded toward 0, each carrying an `order`-point Gauss rule, plus the
/// innermost cell [0, 2^{-panels}].
pub fn graded_gauss_1d(order: usize, panels: usize) -> Result<QuadratureRule, QuadratureError> {
    if panels == 0 {
        return Err(QuadratureError::BadLevels);
    }
    let base = gauss_legendre_1d(order)?;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut hi = 1.0f64;
    for _ in 0..panels {
        let lo = 0.5 * hi;
        for (x, w) in base.iter() {
            nodes.push(lo + (hi - lo) * x[0]);
            weights.push(w * (hi - lo));
        }
        hi = lo;
    }
    for (x, w) in base.iter() {
        nodes.push(hi * x[0]);
        weights.push(w * hi);
    }
    Ok(QuadratureRule { dim: 1, base_order: order, nodes, weights })
}

/// Tensor-product rule on [0,1]^dim built from a 1-D rule.
pub fn tensorize(rule1d: &QuadratureRule, dim: usize) -> Result<QuadratureRule, QuadratureError> {
    if rule1d.dim != 1 {
        return Err(QuadratureError::DimMismatch { expected: 1, got: rule1d.dim });
    }
    let m = rule1d.len();
    let total = m.pow(dim as u32);
    let mut nodes = Vec::with_capacity(total * dim);
    let mut weights = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    loop {
        let mut w = 1.0;
        for &i in &idx {
            nodes.push(rule1d.nodes[i]);
            w *= rule1d.weights[i];
        }
        weights.push(w);
        let mut axis = dim;
        loop {
            if axis == 0 {
                return Ok(QuadratureRule { dim, base_order: rule1d.base_order, nodes, weights });
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < m {
                break;
            }
            idx[axis] = 0;
        }
    }
}

/// Duffy point set for a corner singularity at the origin of [0,1]^dim.
///
/// The cube is split into `dim` simplices by which coordinate is largest;
/// pulling each back onto the cube gives nodes (η₁ω, …, ω, …, η_{d−1}ω) with
/// the Jacobian ω^{d−1} folded into the weight, so a factor ω multiplies the
/// integrand before any logarithm gets evaluated.
pub fn duffy_rule(rule: &QuadratureRule) -> Result<QuadratureRule, QuadratureError> {
    let d = rule.dim;
    if !(2..=4).contains(&d) {
        return Err(QuadratureError::DimMismatch { expected: 2, got: d });
    }
    let mut nodes = Vec::with_capacity(rule.len() * d * d);
    let mut weights = Vec::with_capacity(rule.len() * d);
    for (x, w) in rule.iter() {
        let omega = x[0];
        let etas = &x[1..];
        let jac = w * omega.powi(d as i32 - 1);
        for big in 0..d {
            let mut e = etas.iter();
            for axis in 0..d {
                if axis == big {
                    nodes.push(omega);
                } else {
                    nodes.push(e.next().unwrap() * omega);
                }
            }
            weights.push(jac);
        }
    }
    Ok(QuadratureRule { dim: d, base_order: rule.base_order, nodes, weights })
}

/// Integrate `f` over [0,1]^2 (or [0,1]^3) through the Duffy split of the
/// cube into simplices. `f` may carry at worst a logarithmic singularity at
/// the origin; non-finite values from elsewhere propagate.
pub fn duffy_split_integrate(
    f: impl Fn(&[f64]) -> f64,
    rule: &QuadratureRule,
) -> Result<f64, QuadratureError> {
    Ok(duffy_rule(rule)?.integrate(f))
}

fn rule_on_box(rule: &QuadratureRule, lo: &[f64], hi: &[f64], nodes: &mut Vec<f64>, weights: &mut Vec<f64>) {
    let vol: f64 = lo.iter().zip(hi).map(|(&a, &b)| b - a).product();
    for (x, w) in rule.iter() {
        for a in 0..rule.dim {
            nodes.push(lo[a] + (hi[a] - lo[a]) * x[a]);
        }
        weights.push(w * vol);
    }
}

/// Graded point set: dyadic annuli [0,2^{-l}]^d \ [0,2^{-l-1}]^d, each
/// decomposed into at most 2^d−1 boxes carrying the tensor rule, plus the
/// innermost cell [0,2^{-levels}]^d.
pub fn graded_rule(levels: usize, rule: &QuadratureRule) -> Result<QuadratureRule, QuadratureError> {
    if levels == 0 {
        return Err(QuadratureError::BadLevels);
    }
    let d = rule.dim;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut outer = 1.0f64;
    for _ in 0..levels {
        let half = 0.5 * outer;
        for pattern in 1u32..(1 << d) {
            let lo: Vec<f64> = (0..d)
                .map(|a| if pattern >> a & 1 == 1 { half } else { 0.0 })
                .collect();
            let hi: Vec<f64> = (0..d)
                .map(|a| if pattern >> a & 1 == 1 { outer } else { half })
                .collect();
            rule_on_box(rule, &lo, &hi, &mut nodes, &mut weights);
        }
        outer = half;
    }
    rule_on_box(rule, &vec![0.0; d], &vec![outer; d], &mut nodes, &mut weights);
    Ok(QuadratureRule { dim: d, base_order: rule.base_order, nodes, weights })
}

/// Independent oracle for the Duffy path: integrate `f` over [0,1]^d with
/// dyadic grading toward the singular corner at the origin.
pub fn graded_singular_integrate(
    f: impl Fn(&[f64]) -> f64,
    levels: usize,
    rule: &QuadratureRule,
) -> Result<f64, QuadratureError> {
    Ok(graded_rule(levels, rule)?.integrate(f))
}
