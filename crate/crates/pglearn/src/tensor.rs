//! Dense tensors, mode-k matricization, and mode products.
//!
//! Linearized storage is mode-0-fastest: the entry at multi-index
//! (i_0, ..., i_{K-1}) lives at i_0 + n_0 i_1 + n_0 n_1 i_2 + ....
//! Matricization follows the usual tensor-review convention: mode-k fibers
//! become columns, with lower-numbered remaining modes varying fastest.
//! Under this pairing, (U_{K-1} (x) ... (x) U_0) vec(T) equals
//! vec(T x_0 U_0 ... x_{K-1} U_{K-1}), which every product-graph operator in
//! this crate relies on.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    dims: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let expect: usize = dims.iter().product();
        if dims.is_empty() || data.len() != expect {
            return Err(Error::DimensionMismatch(format!(
                "data length {} does not match dims {:?}",
                data.len(),
                dims
            )));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: Vec<usize>) -> Self {
        let len = dims.iter().product();
        Self {
            dims,
            data: vec![0.0; len],
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    /// Vectorization along the first mode: the linearized data itself.
    pub fn as_vec(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Mode-k matricization: an n_k x (n / n_k) matrix of mode-k fibers.
    pub fn matricize(&self, mode: usize) -> Result<DMatrix<f64>> {
        check_mode(mode, self.dims.len())?;
        Ok(matricize_slice(&self.data, &self.dims, mode))
    }

    /// Mode-k product: replaces each mode-k fiber f by U f.
    pub fn mode_multiply(&self, mode: usize, u: &DMatrix<f64>) -> Result<DenseTensor> {
        check_mode(mode, self.dims.len())?;
        if u.ncols() != self.dims[mode] {
            return Err(Error::DimensionMismatch(format!(
                "mode-{mode} product: matrix has {} columns but mode has size {}",
                u.ncols(),
                self.dims[mode]
            )));
        }
        let mut out_dims = self.dims.clone();
        out_dims[mode] = u.nrows();
        let mut out = vec![0.0; out_dims.iter().product()];
        mode_multiply_slice(&self.data, &self.dims, mode, u, &mut out);
        Ok(DenseTensor {
            dims: out_dims,
            data: out,
        })
    }

    /// Elementwise (Hadamard) square.
    pub fn squared(&self) -> DenseTensor {
        DenseTensor {
            dims: self.dims.clone(),
            data: self.data.iter().map(|v| v * v).collect(),
        }
    }
}

pub(crate) fn check_mode(mode: usize, order: usize) -> Result<()> {
    if mode >= order {
        Err(Error::ModeOutOfRange { mode, order })
    } else {
        Ok(())
    }
}

/// sizes (inner, mid, outer) splitting the index space around `mode`.
fn mode_split(dims: &[usize], mode: usize) -> (usize, usize, usize) {
    let inner: usize = dims[..mode].iter().product();
    let mid = dims[mode];
    let outer: usize = dims[mode + 1..].iter().product();
    (inner, mid, outer)
}

pub(crate) fn matricize_slice(data: &[f64], dims: &[usize], mode: usize) -> DMatrix<f64> {
    let (inner, mid, outer) = mode_split(dims, mode);
    let mut m = DMatrix::zeros(mid, inner * outer);
    for o in 0..outer {
        for r in 0..mid {
            let base = (o * mid + r) * inner;
            for i in 0..inner {
                m[(r, o * inner + i)] = data[base + i];
            }
        }
    }
    m
}

/// Mode product on raw storage; `out` must have length
/// (len / dims[mode]) * u.nrows().
pub(crate) fn mode_multiply_slice(
    data: &[f64],
    dims: &[usize],
    mode: usize,
    u: &DMatrix<f64>,
    out: &mut [f64],
) {
    let (inner, mid, outer) = mode_split(dims, mode);
    let p = u.nrows();
    debug_assert_eq!(out.len(), inner * p * outer);
    out.fill(0.0);
    for o in 0..outer {
        let in_base = o * mid * inner;
        let out_base = o * p * inner;
        for c in 0..mid {
            let x = &data[in_base + c * inner..in_base + (c + 1) * inner];
            for r in 0..p {
                let coeff = u[(r, c)];
                if coeff == 0.0 {
                    continue;
                }
                let y = &mut out[out_base + r * inner..out_base + (r + 1) * inner];
                for (yi, xi) in y.iter_mut().zip(x) {
                    *yi += coeff * xi;
                }
            }
        }
    }
}

/// Applies `u` in the given mode for every listed mode in sequence,
/// reusing two scratch buffers. All matrices must be square.
pub(crate) fn multi_mode_multiply_slice(
    data: &[f64],
    dims: &[usize],
    mats: &[(usize, &DMatrix<f64>)],
) -> Vec<f64> {
    let mut cur = data.to_vec();
    let mut scratch = vec![0.0; data.len()];
    for &(mode, u) in mats {
        debug_assert_eq!(u.nrows(), u.ncols());
        debug_assert_eq!(u.ncols(), dims[mode]);
        mode_multiply_slice(&cur, dims, mode, u, &mut scratch);
        std::mem::swap(&mut cur, &mut scratch);
    }
    cur
}

/// A set of M0 signals over a common tensor-shaped node set. Stored as one
/// contiguous block, one vectorized signal after another.
#[derive(Debug, Clone)]
pub struct SignalSet {
    dims: Vec<usize>,
    data: Vec<f64>,
    m0: usize,
}

impl SignalSet {
    pub fn new(dims: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let n: usize = dims.iter().product();
        if dims.is_empty() || n == 0 {
            return Err(Error::DimensionMismatch("empty dims".into()));
        }
        if data.is_empty() {
            return Err(Error::EmptySignalSet);
        }
        if !data.len().is_multiple_of(n) {
            return Err(Error::DimensionMismatch(format!(
                "data length {} is not a multiple of signal length {}",
                data.len(),
                n
            )));
        }
        let m0 = data.len() / n;
        Ok(Self { dims, data, m0 })
    }

    pub fn from_signals(dims: Vec<usize>, signals: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(signals.len() * dims.iter().product::<usize>());
        for s in signals {
            data.extend_from_slice(s);
        }
        Self::new(dims, data)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Signal length n = prod dims.
    pub fn signal_len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn len(&self) -> usize {
        self.m0
    }

    pub fn is_empty(&self) -> bool {
        self.m0 == 0
    }

    pub fn signal(&self, m: usize) -> &[f64] {
        let n = self.signal_len();
        &self.data[m * n..(m + 1) * n]
    }

    pub fn signals(&self) -> impl Iterator<Item = &[f64]> {
        let n = self.signal_len();
        self.data.chunks_exact(n)
    }

    pub fn tensor(&self, m: usize) -> DenseTensor {
        DenseTensor {
            dims: self.dims.clone(),
            data: self.signal(m).to_vec(),
        }
    }

    /// Same data viewed under different tensor dims (same total length).
    pub fn reshaped(&self, dims: Vec<usize>) -> Result<SignalSet> {
        let n: usize = dims.iter().product();
        if n != self.signal_len() {
            return Err(Error::DimensionMismatch(format!(
                "dims product mismatch: signals have length {} but dims {:?} give {}",
                self.signal_len(),
                dims,
                n
            )));
        }
        Ok(SignalSet {
            dims,
            data: self.data.clone(),
            m0: self.m0,
        })
    }

    pub fn raw(&self) -> &[f64] {
        &self.data
    }
}

/// Kronecker-style combination of per-mode vectors with the first listed
/// vector varying fastest: out[i_0 + n_0 i_1 + ...] = prod_k v_k[i_k].
pub(crate) fn kron_vec(vecs: &[&[f64]]) -> Vec<f64> {
    let mut out = vec![1.0];
    for v in vecs {
        let mut next = Vec::with_capacity(out.len() * v.len());
        for &hi in v.iter() {
            for &lo in &out {
                next.push(lo * hi);
            }
        }
        out = next;
    }
    out
}
