//! Uniform collocation lattice on (0,1)^d and domain masks for
//! exterior-value conditions.
//!
//! Grid points are x_k = k/N for multi-indices k in {0,…,N−1}^d. A
//! [`DomainMask`] selects the lattice points strictly inside Ω; coefficients
//! at all other points are pinned to zero by the solvers.

use thiserror::Error;

/// Hard cap on the spatial dimension; indices are stored as fixed arrays
/// padded with zeros beyond `dim`.
pub const MAX_DIM: usize = 4;

/// A lattice multi-index, padded with zeros past the active dimension.
/// Lexicographic `Ord` on the array equals lexicographic order on the
/// active components because the padding is constant.
pub type MultiIndex = [u32; MAX_DIM];

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("dim must lie in 1..=4, got {0}")]
    DimOutOfRange(usize),
    #[error("n must be a power of two >= 4, got {0}")]
    BadGridSize(usize),
    #[error("ball (center {center:?}, radius {radius}) is not contained in the open unit box")]
    BallOutsideBox { center: Vec<f64>, radius: f64 },
    #[error("box [{lo:?}, {hi:?}] is not contained in the unit box or is empty")]
    BadBox { lo: Vec<f64>, hi: Vec<f64> },
    #[error("dimension mismatch: spec has dim {expected}, argument has dim {got}")]
    DimMismatch { expected: usize, got: usize },
}

/// Uniform grid over the unit box: `n` points per axis at spacing 1/n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GridSpec {
    dim: usize,
    n: usize,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize) -> Result<Self, GridError> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(GridError::DimOutOfRange(dim));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(GridError::BadGridSize(n));
        }
        Ok(GridSpec { dim, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Grid spacing h = 1/n. Exact in binary arithmetic since n is a power
    /// of two, so h·n == 1 holds exactly.
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Total number of lattice points n^d.
    pub fn lattice_points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Extents of the doubled DFT grid, one entry per active axis.
    pub fn dft_dims(&self) -> Vec<usize> {
        vec![2 * self.n; self.dim]
    }

    /// Number of entries of the doubled DFT grid, (2n)^d.
    pub fn dft_len(&self) -> usize {
        (2 * self.n).pow(self.dim as u32)
    }

    /// Coordinates x_k = k/n of a lattice point.
    pub fn coords(&self, k: &MultiIndex) -> Vec<f64> {
        (0..self.dim).map(|a| k[a] as f64 / self.n as f64).collect()
    }

    /// Row-major linear offset of a lattice index within the n^d array.
    pub fn offset(&self, k: &MultiIndex) -> usize {
        let mut off = 0usize;
        for a in 0..self.dim {
            off = off * self.n + k[a] as usize;
        }
        off
    }

    /// Visit all lattice indices in lexicographic order.
    pub fn for_each_index(&self, mut f: impl FnMut(&MultiIndex)) {
        let mut k: MultiIndex = [0; MAX_DIM];
        loop {
            f(&k);
            let mut axis = self.dim;
            loop {
                if axis == 0 {
                    return;
                }
                axis -= 1;
                k[axis] += 1;
                if (k[axis] as usize) < self.n {
                    break;
                }
                k[axis] = 0;
            }
        }
    }
}

/// Construct a [`GridSpec`]; `n` must be a power of two ≥ 4 so the doubled
/// DFT layout stays well formed.
pub fn make_grid(dim: usize, n: usize) -> Result<GridSpec, GridError> {
    GridSpec::new(dim, n)
}

/// Shape of the domain a mask was built from.
#[derive(Clone, Debug, PartialEq)]
pub enum MaskShape {
    Ball { center: Vec<f64>, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Every lattice point; a convenience for stencil tests and unmasked
    /// operator application.
    All,
}

/// The sorted set of lattice indices strictly inside Ω.
#[derive(Clone, Debug)]
pub struct DomainMask {
    spec: GridSpec,
    shape: MaskShape,
    inside: Vec<MultiIndex>,
}

impl DomainMask {
    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn shape(&self) -> &MaskShape {
        &self.shape
    }

    /// Interior indices, sorted lexicographically.
    pub fn inside(&self) -> &[MultiIndex] {
        &self.inside
    }

    pub fn len(&self) -> usize {
        self.inside.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inside.is_empty()
    }

    /// Position of `k` in the sorted interior list, or `None` if masked out.
    pub fn linear_index(&self, k: &MultiIndex) -> Option<usize> {
        self.inside.binary_search(k).ok()
    }

    /// Mask containing every lattice point.
    pub fn full(spec: GridSpec) -> Self {
        let mut inside = Vec::with_capacity(spec.lattice_points());
        spec.for_each_index(|k| inside.push(*k));
        DomainMask { spec, shape: MaskShape::All, inside }
    }
}

/// Mask of lattice points strictly inside the ball |x − center| < radius.
///
/// The closed ball must fit inside the open unit box. Membership is decided
/// in integer arithmetic whenever center·n and radius·n are exact integers
/// (compare |k − cN|² < (rN)²), avoiding floating-point ties on symmetric
/// configurations; otherwise an ordinary strict float comparison is used.
pub fn ball_mask(spec: GridSpec, center: &[f64], radius: f64) -> Result<DomainMask, GridError> {
    if center.len() != spec.dim() {
        return Err(GridError::DimMismatch { expected: spec.dim(), got: center.len() });
    }
    let bad = !(radius > 0.0)
        || center
            .iter()
            .any(|&c| !(c - radius > 0.0) || !(c + radius < 1.0));
    if bad {
        return Err(GridError::BallOutsideBox { center: center.to_vec(), radius });
    }

    let n = spec.n() as f64;
    let cn: Vec<f64> = center.iter().map(|&c| c * n).collect();
    let rn = radius * n;
    let exact = rn.fract() == 0.0 && cn.iter().all(|c| c.fract() == 0.0);

    let mut inside = Vec::new();
    if exact {
        let cni: Vec<i64> = cn.iter().map(|&c| c as i64).collect();
        let rn2 = (rn as i64) * (rn as i64);
        spec.for_each_index(|k| {
            let d2: i64 = (0..spec.dim())
                .map(|a| {
                    let d = k[a] as i64 - cni[a];
                    d * d
                })
                .sum();
            if d2 < rn2 {
                inside.push(*k);
            }
        });
    } else {
        let r2 = radius * radius;
        spec.for_each_index(|k| {
            let d2: f64 = (0..spec.dim())
                .map(|a| {
                    let d = k[a] as f64 / n - center[a];
                    d * d
                })
                .sum();
            if d2 < r2 {
                inside.push(*k);
            }
        });
    }
    Ok(DomainMask {
        spec,
        shape: MaskShape::Ball { center: center.to_vec(), radius },
        inside,
    })
}

/// Mask of lattice points strictly inside the axis-aligned box (lo, hi).
pub fn box_mask(spec: GridSpec, lo: &[f64], hi: &[f64]) -> Result<DomainMask, GridError> {
    if lo.len() != spec.dim() || hi.len() != spec.dim() {
        return Err(GridError::DimMismatch { expected: spec.dim(), got: lo.len().min(hi.len()) });
    }
    let bad = lo
        .iter()
        .zip(hi)
        .any(|(&a, &b)| !(0.0..1.0).contains(&a) || !(a < b) || b > 1.0);
    if bad {
        return Err(GridError::BadBox { lo: lo.to_vec(), hi: hi.to_vec() });
    }
    let n = spec.n() as f64;
    let mut inside = Vec::new();
    spec.for_each_index(|k| {
        let ok = (0..spec.dim()).all(|a| {
            let x = k[a] as f64 / n;
            lo[a] < x && x < hi[a]
        });
        if ok {
            inside.push(*k);
        }
    });
    Ok(DomainMask { spec, shape: MaskShape::Box { lo: lo.to_vec(), hi: hi.to_vec() }, inside })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spacing_is_exact() {
        let spec = make_grid(2, 8).unwrap();
        assert_eq!(spec.spacing(), 0.125);
        assert_eq!(spec.spacing() * spec.n() as f64, 1.0);
    }

    #[test]
    fn rejects_bad_sizes_and_dims() {
        assert_eq!(make_grid(2, 7).unwrap_err(), GridError::BadGridSize(7));
        assert_eq!(make_grid(2, 2).unwrap_err(), GridError::BadGridSize(2));
        assert_eq!(make_grid(0, 8).unwrap_err(), GridError::DimOutOfRange(0));
        assert_eq!(make_grid(5, 8).unwrap_err(), GridError::DimOutOfRange(5));
    }

    #[test]
    fn four_dim_lattice_count() {
        let spec = make_grid(4, 16).unwrap();
        assert_eq!(spec.lattice_points(), 65536);
    }

    #[test]
    fn small_centered_ball_keeps_only_center() {
        let spec = make_grid(2, 4).unwrap();
        let mask = ball_mask(spec, &[0.5, 0.5], 0.25).unwrap();
        // Points at distance exactly 0.25 (e.g. (1,2), (2,1)) are excluded
        // by strictness; enumerating all 16 grid points leaves only (2,2).
        assert_eq!(mask.inside(), &[[2, 2, 0, 0]]);
    }

    /// Enumeration oracle: brute-force strict membership over every point.
    fn enumerate_ball(spec: GridSpec, center: &[f64], radius: f64) -> Vec<MultiIndex> {
        let mut v = Vec::new();
        spec.for_each_index(|k| {
            let d2: f64 = (0..spec.dim())
                .map(|a| (k[a] as f64 * spec.spacing() - center[a]).powi(2))
                .sum();
            if d2 < radius * radius {
                v.push(*k);
            }
        });
        v
    }

    #[test]
    fn one_dim_ball_matches_enumeration_oracle() {
        let spec = make_grid(1, 8).unwrap();
        let mask = ball_mask(spec, &[0.5], 0.3).unwrap();
        let expect = enumerate_ball(spec, &[0.5], 0.3);
        assert_eq!(mask.inside(), expect.as_slice());
        // Frozen from the oracle: x ∈ {0.25, 0.375, 0.5, 0.625, 0.75}, all
        // with |x − 0.5| < 0.3, symmetric about the center point k = 4.
        let want: Vec<MultiIndex> =
            [2u32, 3, 4, 5, 6].iter().map(|&k| [k, 0, 0, 0]).collect();
        assert_eq!(mask.inside(), want.as_slice());
    }

    #[test]
    fn ball_leaving_box_is_rejected() {
        let spec = make_grid(2, 4).unwrap();
        let err = ball_mask(spec, &[0.5, 0.5], 0.6).unwrap_err();
        assert!(matches!(err, GridError::BallOutsideBox { .. }));
    }

    #[test]
    fn linear_index_examples() {
        let spec = make_grid(2, 4).unwrap();
        let mask = ball_mask(spec, &[0.5, 0.5], 0.25).unwrap();
        assert_eq!(mask.linear_index(&[2, 2, 0, 0]), Some(0));
        assert_eq!(mask.linear_index(&[0, 0, 0, 0]), None);

        let spec1 = make_grid(1, 8).unwrap();
        let mask1 = ball_mask(spec1, &[0.5], 0.3).unwrap();
        assert_eq!(mask1.linear_index(&[4, 0, 0, 0]), Some(2));
    }

    #[test]
    fn box_mask_is_strict() {
        let spec = make_grid(2, 8).unwrap();
        let mask = box_mask(spec, &[0.25, 0.25], &[0.75, 0.75]).unwrap();
        for k in mask.inside() {
            for a in 0..2 {
                let x = k[a] as f64 * spec.spacing();
                assert!(0.25 < x && x < 0.75);
            }
        }
        assert_eq!(mask.len(), 9); // x ∈ {0.375, 0.5, 0.625} per axis
    }

    proptest! {
        #[test]
        fn round_trip_linear_index(n_exp in 2u32..5, r in 0.05f64..0.45, cx in 0.46f64..0.54) {
            let spec = make_grid(2, 1usize << n_exp).unwrap();
            if cx - r > 0.0 && cx + r < 1.0 {
                let mask = ball_mask(spec, &[cx, 0.5], r).unwrap();
                for (i, k) in mask.inside().iter().enumerate() {
                    prop_assert_eq!(mask.linear_index(k), Some(i));
                }
            }
        }

        #[test]
        fn mask_grows_with_radius(r in 0.05f64..0.4) {
            let spec = make_grid(2, 16).unwrap();
            let small = ball_mask(spec, &[0.5, 0.5], r).unwrap();
            let big = ball_mask(spec, &[0.5, 0.5], (r + 0.05).min(0.49)).unwrap();
            for k in small.inside() {
                prop_assert!(big.linear_index(k).is_some());
            }
        }

        #[test]
        fn centered_mask_reflection_symmetry(n_exp in 2u32..6, r in 0.05f64..0.45) {
            let n = 1usize << n_exp;
            let spec = make_grid(2, n).unwrap();
            let mask = ball_mask(spec, &[0.5, 0.5], r).unwrap();
            for k in mask.inside() {
                let refl = [(n as u32 - k[0]), (n as u32 - k[1]), 0, 0];
                if refl[0] < n as u32 && refl[1] < n as u32 {
                    prop_assert!(mask.linear_index(&refl).is_some(),
                        "reflection of {:?} missing at n={} r={}", k, n, r);
                }
            }
        }
    }
}
