//! Matrix-free application of the discretized operator: zero-padded (2N)^d
//! circular convolution of a coefficient field with the stencil, restricted
//! to a domain mask. The induced matrix A[i][j] = Φ(inside_i − inside_j) is
//! symmetric and is never formed except as a test oracle.

use num_complex::Complex64;
use std::sync::Arc;
use thiserror::Error;

use crate::fft;
use crate::grid::{DomainMask, GridSpec, MultiIndex};
use crate::kernel::SpectralKernel;
use crate::par;

#[derive(Debug, Error)]
pub enum OperatorError {
    #[error("kernel grid {kernel:?} does not match mask grid {mask:?}")]
    SpecMismatch { kernel: (usize, usize), mask: (usize, usize) },
    #[error("field grid does not match operator grid")]
    FieldSpecMismatch,
    #[error("masked vector has length {got}, mask has {expected} interior points")]
    LengthMismatch { got: usize, expected: usize },
    #[error("imaginary residue {max_im:e} exceeds 1e-9 of output magnitude {max_abs:e}; kernel or transform is corrupted")]
    ImaginaryResidue { max_im: f64, max_abs: f64 },
}

/// Real coefficients over the N^d collocation lattice (row-major).
#[derive(Clone, Debug)]
pub struct GridField {
    spec: GridSpec,
    data: Vec<f64>,
}

impl GridField {
    pub fn zeros(spec: GridSpec) -> Self {
        GridField { spec, data: vec![0.0; spec.lattice_points()] }
    }

    /// Fill from a function of the grid coordinates x_k.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Self {
        let mut field = GridField::zeros(spec);
        spec.for_each_index(|k| {
            let x = spec.coords(k);
            let off = spec.offset(k);
            field.data[off] = f(&x);
        });
        field
    }

    /// The constant `value` on the mask interior, zero outside.
    pub fn constant_on(mask: &DomainMask, value: f64) -> Self {
        let mut field = GridField::zeros(mask.spec());
        for k in mask.inside() {
            let off = field.spec.offset(k);
            field.data[off] = value;
        }
        field
    }

    /// Scatter a masked coefficient vector (ordered like `mask.inside()`)
    /// into a field that is zero elsewhere.
    pub fn from_masked_values(mask: &DomainMask, values: &[f64]) -> Result<Self, OperatorError> {
        if values.len() != mask.len() {
            return Err(OperatorError::LengthMismatch { got: values.len(), expected: mask.len() });
        }
        let mut field = GridField::zeros(mask.spec());
        for (k, &v) in mask.inside().iter().zip(values) {
            let off = field.spec.offset(k);
            field.data[off] = v;
        }
        Ok(field)
    }

    /// Gather the coefficients on the mask interior, in mask order.
    pub fn masked_values(&self, mask: &DomainMask) -> Vec<f64> {
        mask.inside().iter().map(|k| self.data[self.spec.offset(k)]).collect()
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn get(&self, k: &MultiIndex) -> f64 {
        self.data[self.spec.offset(k)]
    }

    pub fn set(&mut self, k: &MultiIndex, v: f64) {
        let off = self.spec.offset(k);
        self.data[off] = v;
    }
}

/// The stencil convolution restricted to lattice points inside Ω: the
/// collocation system matrix, applied matrix-free.
#[derive(Clone)]
pub struct MaskedOperator {
    kernel: Arc<SpectralKernel>,
    mask: Arc<DomainMask>,
}

impl MaskedOperator {
    pub fn new(kernel: Arc<SpectralKernel>, mask: Arc<DomainMask>) -> Result<Self, OperatorError> {
        if kernel.spec() != mask.spec() {
            return Err(OperatorError::SpecMismatch {
                kernel: (kernel.spec().dim(), kernel.spec().n()),
                mask: (mask.spec().dim(), mask.spec().n()),
            });
        }
        Ok(MaskedOperator { kernel, mask })
    }

    pub fn kernel(&self) -> &SpectralKernel {
        &self.kernel
    }

    pub fn mask(&self) -> &DomainMask {
        &self.mask
    }

    /// Number of interior points, i.e. the dimension of the masked system.
    pub fn dim(&self) -> usize {
        self.mask.len()
    }

    /// w[κ] = Σ_k u[k]·Φ(κ−k) for κ inside, zero outside. The input is
    /// read on the mask interior only, which enforces the zero-exterior
    /// precondition.
    pub fn apply(&self, u: &GridField) -> Result<GridField, OperatorError> {
        if u.spec() != self.mask.spec() {
            return Err(OperatorError::FieldSpecMismatch);
        }
        convolve(&self.kernel, u, Some(&self.mask))
    }

    /// Flat solver-facing view: scatter a masked vector, apply, gather back.
    pub fn apply_masked_vector(&self, v: &[f64]) -> Result<Vec<f64>, OperatorError> {
        let field = GridField::from_masked_values(&self.mask, v)?;
        let out = self.apply(&field)?;
        Ok(out.masked_values(&self.mask))
    }
}

/// Apply the stencil convolution on the full lattice (no mask); used by the
/// discrete energy seminorm.
pub fn apply_unmasked(kernel: &SpectralKernel, u: &GridField) -> Result<GridField, OperatorError> {
    if u.spec() != kernel.spec() {
        return Err(OperatorError::FieldSpecMismatch);
    }
    convolve(kernel, u, None)
}

fn convolve(
    kernel: &SpectralKernel,
    u: &GridField,
    mask: Option<&DomainMask>,
) -> Result<GridField, OperatorError> {
    let spec = kernel.spec();
    let dims = spec.dft_dims();
    let len = spec.dft_len();
    let m = 2 * spec.n();

    // Zero-pad the N^d field into the low corner of the (2N)^d torus. The
    // input is supported in {0..N−1}^d and outputs are read only there, so
    // the circular wrap-around cannot alias into the reads.
    let mut buf = vec![Complex64::default(); len];
    match mask {
        Some(mask) => {
            for k in mask.inside() {
                buf[dft_offset(&spec, k)] = Complex64::new(u.get(k), 0.0);
            }
        }
        None => {
            spec.for_each_index(|k| {
                buf[dft_offset(&spec, k)] = Complex64::new(u.get(k), 0.0);
            });
        }
    }

    fft::ndfft(&mut buf, &dims, false);
    par::for_each_chunk_zip(&mut buf, kernel.values(), m, |_, dst, src| {
        for (x, y) in dst.iter_mut().zip(src) {
            *x *= y;
        }
    });
    fft::ndfft(&mut buf, &dims, true);
    let scale = 1.0 / len as f64;

    let mut out = GridField::zeros(spec);
    let mut max_abs = 0.0f64;
    let mut max_im = 0.0f64;
    let mut read = |k: &MultiIndex, out: &mut GridField| {
        let c = buf[dft_offset(&spec, k)] * scale;
        max_abs = max_abs.max(c.norm());
        max_im = max_im.max(c.im.abs());
        out.set(k, c.re);
    };
    match mask {
        Some(mask) => {
            for k in mask.inside() {
                read(k, &mut out);
            }
        }
        None => {
            let mut ks = Vec::new();
            spec.for_each_index(|k| ks.push(*k));
            for k in &ks {
                read(k, &mut out);
            }
        }
    }
    // The analytic result is real; a large residue signals a corrupted
    // kernel or transform rather than something to discard silently.
    if max_im > 1e-9 * max_abs {
        return Err(OperatorError::ImaginaryResidue { max_im, max_abs });
    }
    Ok(out)
}

fn dft_offset(spec: &GridSpec, k: &MultiIndex) -> usize {
    let m = 2 * spec.n();
    let mut off = 0usize;
    for a in 0..spec.dim() {
        off = off * m + k[a] as usize;
    }
    off
}
