//! Product-graph operators: dense construction, implicit application,
//! product eigenstructure, the product graph Fourier transform, and
//! Dirichlet energy.
//!
//! All operators share one ordering convention (see [`crate::tensor`]):
//! factor k acts on tensor mode k, and the dense product is
//! W_{K-1} (x) ... (x) W_0. The strong product is applied implicitly through
//! the identity ⊠_k W_k = ⊗_k (W_k + I) - I, which costs K mode products
//! instead of 2^K Kronecker terms.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{FactorGraphSet, ProductKind, WeightedAdjacency};
use crate::tensor::{kron_vec, multi_mode_multiply_slice, DenseTensor};

/// Default node-count cap for dense product materialization.
pub const DEFAULT_DENSE_CAP: usize = 4096;

fn kron_all(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    // W_{K-1} (x) ... (x) W_0
    let mut out = DMatrix::identity(1, 1);
    for m in mats.iter().rev() {
        out = out.kronecker(m);
    }
    out
}

fn cartesian_sum(mats: &[DMatrix<f64>]) -> DMatrix<f64> {
    let n: usize = mats.iter().map(|m| m.nrows()).product();
    let mut out = DMatrix::zeros(n, n);
    for (k, _) in mats.iter().enumerate() {
        let terms: Vec<DMatrix<f64>> = mats
            .iter()
            .enumerate()
            .map(|(i, m)| {
                if i == k {
                    m.clone()
                } else {
                    DMatrix::identity(m.nrows(), m.nrows())
                }
            })
            .collect();
        out += kron_all(&terms);
    }
    out
}

/// Dense product adjacency under the fixed ordering, respecting `cap`
/// ([`DEFAULT_DENSE_CAP`] when `None`).
pub fn product_adjacency(set: &FactorGraphSet, cap: Option<usize>) -> Result<WeightedAdjacency> {
    let cap = cap.unwrap_or(DEFAULT_DENSE_CAP);
    let n = set.node_count();
    if n > cap {
        return Err(Error::DenseCapExceeded { nodes: n, cap });
    }
    let mats: Vec<DMatrix<f64>> = set.factors().iter().map(|f| f.to_dense()).collect();
    let dense = match set.kind() {
        ProductKind::Kronecker => kron_all(&mats),
        ProductKind::Cartesian => cartesian_sum(&mats),
        ProductKind::Strong => {
            // iterated binary strong product: all nonempty adjacency/identity
            // Kronecker combinations, i.e. (x)_k (W_k + I) - I
            let plus_i: Vec<DMatrix<f64>> = mats
                .iter()
                .map(|m| m + DMatrix::<f64>::identity(m.nrows(), m.nrows()))
                .collect();
            kron_all(&plus_i) - DMatrix::<f64>::identity(n, n)
        }
    };
    WeightedAdjacency::from_dense(&dense)
}

/// Applies the product adjacency to a vectorized signal without forming it.
pub fn product_apply(set: &FactorGraphSet, x: &[f64]) -> Result<Vec<f64>> {
    let dims = set.dims();
    let n = set.node_count();
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "signal length {} does not match product size {}",
            x.len(),
            n
        )));
    }
    let dense: Vec<DMatrix<f64>> = set.factors().iter().map(|f| f.to_dense()).collect();
    match set.kind() {
        ProductKind::Kronecker => {
            let mats: Vec<(usize, &DMatrix<f64>)> = dense.iter().enumerate().collect();
            Ok(multi_mode_multiply_slice(x, &dims, &mats))
        }
        ProductKind::Cartesian => {
            let mut out = vec![0.0; n];
            for (k, m) in dense.iter().enumerate() {
                let term = multi_mode_multiply_slice(x, &dims, &[(k, m)]);
                for (o, t) in out.iter_mut().zip(&term) {
                    *o += t;
                }
            }
            Ok(out)
        }
        ProductKind::Strong => {
            let plus_i: Vec<DMatrix<f64>> = dense
                .iter()
                .map(|m| m + DMatrix::<f64>::identity(m.nrows(), m.nrows()))
                .collect();
            let mats: Vec<(usize, &DMatrix<f64>)> = plus_i.iter().enumerate().collect();
            let mut out = multi_mode_multiply_slice(x, &dims, &mats);
            for (o, xi) in out.iter_mut().zip(x) {
                *o -= xi;
            }
            Ok(out)
        }
    }
}

/// Eigenvalues of the product adjacency from per-factor eigenvalue
/// sequences, ordered consistently with the Kronecker product of the factor
/// eigenvector matrices (factor 0 varying fastest).
pub fn product_eigvals(factor_eigvals: &[Vec<f64>], kind: ProductKind) -> Vec<f64> {
    let refs: Vec<&[f64]> = factor_eigvals.iter().map(|v| v.as_slice()).collect();
    match kind {
        ProductKind::Kronecker => kron_vec(&refs),
        ProductKind::Cartesian => {
            let mut out = vec![0.0];
            for v in &refs {
                let mut next = Vec::with_capacity(out.len() * v.len());
                for &hi in v.iter() {
                    for &lo in &out {
                        next.push(lo + hi);
                    }
                }
                out = next;
            }
            out
        }
        ProductKind::Strong => {
            let shifted: Vec<Vec<f64>> = factor_eigvals
                .iter()
                .map(|v| v.iter().map(|l| l + 1.0).collect())
                .collect();
            let srefs: Vec<&[f64]> = shifted.iter().map(|v| v.as_slice()).collect();
            kron_vec(&srefs).into_iter().map(|p| p - 1.0).collect()
        }
    }
}

/// Product graph Fourier transform: vec(X x_0 U_0^T ... x_{K-1} U_{K-1}^T)
/// for per-factor eigenvector matrices U_k with orthonormal columns.
pub fn product_gft(x: &DenseTensor, factor_bases: &[DMatrix<f64>]) -> Result<Vec<f64>> {
    if factor_bases.len() != x.order() {
        return Err(Error::DimensionMismatch(format!(
            "{} factor bases for an order-{} tensor",
            factor_bases.len(),
            x.order()
        )));
    }
    for (k, u) in factor_bases.iter().enumerate() {
        if u.nrows() != u.ncols() || u.nrows() != x.dims()[k] {
            return Err(Error::DimensionMismatch(format!(
                "basis {k} is {}x{} but mode has size {}",
                u.nrows(),
                u.ncols(),
                x.dims()[k]
            )));
        }
        let gram = u.transpose() * u;
        let id = DMatrix::identity(u.ncols(), u.ncols());
        if (gram - id).amax() > 1e-10 {
            return Err(Error::InvalidConfig(format!(
                "basis {k} does not have orthonormal columns"
            )));
        }
    }
    let transposed: Vec<DMatrix<f64>> = factor_bases.iter().map(|u| u.transpose()).collect();
    let mats: Vec<(usize, &DMatrix<f64>)> = transposed.iter().enumerate().collect();
    Ok(multi_mode_multiply_slice(x.as_vec(), x.dims(), &mats))
}

/// Dirichlet energy x^T L x = x̄^T W 1 - x^T W x against a dense adjacency.
pub fn dirichlet_energy_dense(w: &WeightedAdjacency, x: &[f64]) -> Result<f64> {
    if x.len() != w.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "signal length {} vs {} nodes",
            x.len(),
            w.node_count()
        )));
    }
    let m = w.to_dense();
    let xv = DVector::from_column_slice(x);
    let wx = &m * &xv;
    let degree_term: f64 = x
        .iter()
        .zip(w.degrees().iter())
        .map(|(xi, di)| xi * xi * di)
        .sum();
    Ok(degree_term - xv.dot(&wx))
}

/// Dirichlet energy against a product graph, with both the degree and the
/// adjacency term evaluated through the implicit apply.
pub fn dirichlet_energy_product(set: &FactorGraphSet, x: &[f64]) -> Result<f64> {
    let n = set.node_count();
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "signal length {} vs product size {}",
            x.len(),
            n
        )));
    }
    let w_ones = product_apply(set, &vec![1.0; n])?;
    let degree_term: f64 = x.iter().zip(&w_ones).map(|(xi, di)| xi * xi * di).sum();
    let wx = product_apply(set, x)?;
    let adj_term: f64 = x.iter().zip(&wx).map(|(xi, yi)| xi * yi).sum();
    Ok(degree_term - adj_term)
}

/// Edge count of the product graph. Kronecker and Cartesian counts use the
/// closed-form factor expressions; the strong product is counted from the
/// dense adjacency.
pub fn edge_count(set: &FactorGraphSet, threshold: f64) -> Result<u64> {
    let factor_edges: Vec<u64> = set
        .factors()
        .iter()
        .map(|f| f.edge_count(threshold) as u64)
        .collect();
    let dims = set.dims();
    match set.kind() {
        ProductKind::Kronecker => {
            let k0 = set.order() as u32;
            Ok(2u64.pow(k0 - 1) * factor_edges.iter().product::<u64>())
        }
        ProductKind::Cartesian => {
            let mut total = 0u64;
            for (k, &e_k) in factor_edges.iter().enumerate() {
                let others: u64 = dims
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, &d)| d as u64)
                    .product();
                total += others * e_k;
            }
            Ok(total)
        }
        ProductKind::Strong => {
            let dense = product_adjacency(set, None)?;
            Ok(dense.edge_count(threshold) as u64)
        }
    }
}
