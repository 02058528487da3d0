//! The SNCK kernel cache file format.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "SNCK" | version u16 = 1 | d u8 | N u32 | quad_order u16
//! | corrected u8 | symbol_id length u32 | symbol_id UTF-8 bytes
//! | (2N)^d complex values as (re f64, im f64) pairs, row-major DFT order
//! ```
//!
//! Floats round-trip bitwise, so a cache hit reproduces the kernel exactly.

use num_complex::Complex64;
use std::io::{self, Read, Write};
use thiserror::Error;

use crate::grid::GridSpec;
use crate::kernel::{KernelError, SpectralKernel};

pub const MAGIC: &[u8; 4] = b"SNCK";
pub const VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum SnckError {
    #[error("bad magic bytes; not a SNCK kernel file")]
    BadMagic,
    #[error("unsupported SNCK version {0}")]
    BadVersion(u16),
    #[error("invalid header: {0}")]
    BadHeader(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub fn write_kernel<W: Write>(mut w: W, kernel: &SpectralKernel) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&[kernel.spec().dim() as u8])?;
    w.write_all(&(kernel.spec().n() as u32).to_le_bytes())?;
    w.write_all(&(kernel.quad_order() as u16).to_le_bytes())?;
    w.write_all(&[u8::from(kernel.corrected())])?;
    let id = kernel.symbol_id().as_bytes();
    w.write_all(&(id.len() as u32).to_le_bytes())?;
    w.write_all(id)?;
    for v in kernel.values() {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

fn read_exact<const K: usize>(r: &mut impl Read) -> io::Result<[u8; K]> {
    let mut buf = [0u8; K];
    r.read_exact(&mut buf)?;
    Ok(buf)
}

pub fn read_kernel<R: Read>(mut r: R) -> Result<SpectralKernel, SnckError> {
    if &read_exact::<4>(&mut r)? != MAGIC {
        return Err(SnckError::BadMagic);
    }
    let version = u16::from_le_bytes(read_exact::<2>(&mut r)?);
    if version != VERSION {
        return Err(SnckError::BadVersion(version));
    }
    let d = read_exact::<1>(&mut r)?[0] as usize;
    let n = u32::from_le_bytes(read_exact::<4>(&mut r)?) as usize;
    let quad_order = u16::from_le_bytes(read_exact::<2>(&mut r)?) as usize;
    let corrected = read_exact::<1>(&mut r)?[0] != 0;
    let spec = GridSpec::new(d, n).map_err(|e| SnckError::BadHeader(e.to_string()))?;
    let id_len = u32::from_le_bytes(read_exact::<4>(&mut r)?) as usize;
    if id_len > 4096 {
        return Err(SnckError::BadHeader(format!("symbol id length {id_len} is implausible")));
    }
    let mut id_bytes = vec![0u8; id_len];
    r.read_exact(&mut id_bytes)?;
    let symbol_id = String::from_utf8(id_bytes)
        .map_err(|e| SnckError::BadHeader(format!("symbol id is not UTF-8: {e}")))?;
    let len = spec.dft_len();
    let mut values = Vec::with_capacity(len);
    for _ in 0..len {
        let re = f64::from_le_bytes(read_exact::<8>(&mut r)?);
        let im = f64::from_le_bytes(read_exact::<8>(&mut r)?);
        values.push(Complex64::new(re, im));
    }
    Ok(SpectralKernel::from_raw_parts(spec, values, symbol_id, quad_order, corrected)?)
}
