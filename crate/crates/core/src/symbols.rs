//! Fourier multipliers m(ω) and the rescaling calculus that maps problems on
//! a large physical ball B_R onto the computational ball B_r inside the unit
//! box: the operator with symbol m((r/R)·ω) on B_r has the same Dirichlet
//! eigenvalues as the operator with symbol m on B_R, and right-hand sides
//! transform by composition with the dilation.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SymbolError {
    #[error("s must lie in (0,1)")]
    FractionalOrderOutOfRange,
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("radii must be positive, got r={r}, R={big_r}")]
    NonPositiveRadius { r: f64, big_r: f64 },
}

/// The multiplier family. All kinds are radial (hence even) and real-valued.
#[derive(Clone, Debug, PartialEq)]
pub enum SymbolKind {
    /// |ω|^{2s}, s ∈ (0,1): the integral fractional Laplacian.
    Fractional { s: f64 },
    /// log(|ω|²): the logarithmic Laplacian.
    Logarithmic,
    /// log(|ω|²) + shift; lets the log-scaling identity be tested as an
    /// exact algebraic property rather than through the discretization.
    ShiftedLogarithmic { shift: f64 },
    /// The constant c; c = 1 makes the discrete operator the identity.
    Constant { value: f64 },
    /// |ω|²: the classical Laplacian, whose sinc stencil is known in closed
    /// form and anchors the kernel tests.
    Laplacian,
}

/// A radial multiplier together with a dilation factor ρ > 0; evaluation
/// returns m(ρω).
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    kind: SymbolKind,
    scale: f64,
}

impl Symbol {
    pub fn new(kind: SymbolKind, scale: f64) -> Result<Self, SymbolError> {
        if let SymbolKind::Fractional { s } = kind {
            if !(s > 0.0 && s < 1.0) {
                return Err(SymbolError::FractionalOrderOutOfRange);
            }
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(SymbolError::NonPositiveScale(scale));
        }
        Ok(Symbol { kind, scale })
    }

    pub fn fractional(s: f64) -> Result<Self, SymbolError> {
        Symbol::new(SymbolKind::Fractional { s }, 1.0)
    }

    pub fn logarithmic() -> Self {
        Symbol { kind: SymbolKind::Logarithmic, scale: 1.0 }
    }

    pub fn shifted_logarithmic(shift: f64) -> Self {
        Symbol { kind: SymbolKind::ShiftedLogarithmic { shift }, scale: 1.0 }
    }

    pub fn constant(value: f64) -> Self {
        Symbol { kind: SymbolKind::Constant { value }, scale: 1.0 }
    }

    pub fn laplacian() -> Self {
        Symbol { kind: SymbolKind::Laplacian, scale: 1.0 }
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Evaluate from the squared radius |ω|² (before scaling). This is the
    /// hot path of the kernel builder, which accumulates |πν|² per axis.
    #[inline]
    pub fn eval_sq_radius(&self, r2: f64) -> f64 {
        let r2s = self.scale * self.scale * r2;
        match self.kind {
            SymbolKind::Fractional { s } => r2s.powf(s),
            SymbolKind::Logarithmic => r2s.ln(),
            SymbolKind::ShiftedLogarithmic { shift } => r2s.ln() + shift,
            SymbolKind::Constant { value } => value,
            SymbolKind::Laplacian => r2s,
        }
    }

    /// m(ρω). For the logarithmic kinds ω = 0 returns −∞; Gauss nodes are
    /// interior so the regular quadrature path never samples it, and the
    /// Duffy path multiplies the Jacobian factor onto the integrand before
    /// the logarithm is taken.
    pub fn eval(&self, omega: &[f64]) -> f64 {
        self.eval_sq_radius(omega.iter().map(|&w| w * w).sum())
    }

    /// True when the symbol is singular at ω = 0 (logarithmic kinds). These
    /// require the near-origin kernel correction; for fractional symbols the
    /// correction is optional (the symbol is continuous but not smooth at 0).
    pub fn is_singular_at_origin(&self) -> bool {
        matches!(
            self.kind,
            SymbolKind::Logarithmic | SymbolKind::ShiftedLogarithmic { .. }
        )
    }

    /// Rescale so that solves/eigenproblems on the computational ball B_r
    /// represent the operator on the physical ball B_R: multiplies the
    /// dilation factor by r/R.
    pub fn rescale_for_domain(&self, r: f64, big_r: f64) -> Result<Self, SymbolError> {
        if !(r > 0.0) || !(big_r > 0.0) {
            return Err(SymbolError::NonPositiveRadius { r, big_r });
        }
        Symbol::new(self.kind.clone(), self.scale * r / big_r)
    }

    /// Canonical textual form, also used by the kernel cache key. Floating
    /// parameters print in shortest round-trip form (≤ 17 significant
    /// digits), so distinct doubles always get distinct strings.
    pub fn canonical_id(&self) -> String {
        let mut s = match &self.kind {
            SymbolKind::Fractional { s } => format!("frac:s={s}"),
            SymbolKind::Logarithmic => "log".to_string(),
            SymbolKind::ShiftedLogarithmic { shift } => format!("logshift:c={shift}"),
            SymbolKind::Constant { value } => format!("const:c={value}"),
            SymbolKind::Laplacian => "lap".to_string(),
        };
        if self.scale != 1.0 {
            s.push_str(&format!(":scale={}", self.scale));
        }
        s
    }
}
