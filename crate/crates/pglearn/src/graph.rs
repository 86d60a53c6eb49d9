//! Graph value types: weighted adjacencies with packed upper-triangular
//! storage, combinatorial Laplacians, and factor-graph sets for the three
//! product structures.
//!
//! The packed vector `w` spans the full upper triangle *including* diagonal
//! slots, scanned by column and within a column by row:
//! `(0,0), (0,1), (1,1), (0,2), (1,2), (2,2), ...`. Diagonal slots are kept
//! (and pinned to zero) so the constraint-system algebra in [`crate::glp`]
//! matches its closed form.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Off-diagonal entries in `(-NEG_WEIGHT_TOL, 0)` are clamped to zero on
/// construction; anything more negative is rejected.
pub const NEG_WEIGHT_TOL: f64 = 1e-8;

/// Packed length n(n+1)/2 of the upper triangle including the diagonal.
pub fn packed_len(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Packed slot of entry (i, j) with i <= j (column-major upper triangle).
pub fn packed_slot(i: usize, j: usize) -> usize {
    debug_assert!(i <= j);
    j * (j + 1) / 2 + i
}

/// Inverse of [`packed_slot`]: (i, j) with i <= j for a slot index.
pub fn slot_to_pair(slot: usize, n: usize) -> (usize, usize) {
    debug_assert!(slot < packed_len(n));
    let mut j = 0usize;
    while (j + 1) * (j + 2) / 2 <= slot {
        j += 1;
    }
    (slot - j * (j + 1) / 2, j)
}

/// Symmetric nonnegative-weight adjacency matrix with zero diagonal.
///
/// Immutable after construction; symmetry holds exactly because only the
/// packed upper triangle is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedAdjacency {
    n: usize,
    w: Vec<f64>,
}

impl WeightedAdjacency {
    /// Builds from a packed upper-triangular vector (diagonal slots included).
    ///
    /// Diagonal slots must be zero; off-diagonal slots must be nonnegative up
    /// to [`NEG_WEIGHT_TOL`] (small negatives are clamped to zero).
    pub fn from_packed(n: usize, mut w: Vec<f64>) -> Result<Self> {
        if w.len() != packed_len(n) {
            return Err(Error::DimensionMismatch(format!(
                "packed vector of length {} does not match n = {} (expected {})",
                w.len(),
                n,
                packed_len(n)
            )));
        }
        for j in 0..n {
            for i in 0..=j {
                let s = packed_slot(i, j);
                let v = w[s];
                if !v.is_finite() {
                    return Err(Error::NonFinite("adjacency weight".into()));
                }
                if i == j {
                    if v != 0.0 {
                        return Err(Error::InvalidWeight { i, j, value: v });
                    }
                } else if v < 0.0 {
                    if v > -NEG_WEIGHT_TOL {
                        w[s] = 0.0;
                    } else {
                        return Err(Error::InvalidWeight { i, j, value: v });
                    }
                }
            }
        }
        Ok(Self { n, w })
    }

    /// Builds from a dense matrix, which must be symmetric with zero diagonal.
    pub fn from_dense(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n {
            return Err(Error::DimensionMismatch(format!(
                "adjacency must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.amax().max(1.0);
        let mut w = vec![0.0; packed_len(n)];
        for j in 0..n {
            for i in 0..=j {
                if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale {
                    return Err(Error::DimensionMismatch(format!(
                        "matrix not symmetric at ({i}, {j})"
                    )));
                }
                w[packed_slot(i, j)] = if i == j { 0.0 } else { m[(i, j)] };
            }
        }
        for i in 0..n {
            if m[(i, i)].abs() > NEG_WEIGHT_TOL {
                return Err(Error::InvalidWeight {
                    i,
                    j: i,
                    value: m[(i, i)],
                });
            }
        }
        Self::from_packed(n, w)
    }

    /// Builds from an upper-triangular edge list (i < j, 0-based).
    pub fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut w = vec![0.0; packed_len(n)];
        for &(i, j, v) in edges {
            if i >= j || j >= n {
                return Err(Error::DimensionMismatch(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            w[packed_slot(i, j)] = v;
        }
        Self::from_packed(n, w)
    }

    /// Unweighted path graph on `n` nodes.
    pub fn path(n: usize) -> Self {
        let mut w = vec![0.0; packed_len(n)];
        for i in 0..n.saturating_sub(1) {
            w[packed_slot(i, i + 1)] = 1.0;
        }
        Self { n, w }
    }

    /// Complete graph with uniform weight.
    pub fn complete(n: usize, weight: f64) -> Self {
        let mut w = vec![0.0; packed_len(n)];
        for j in 0..n {
            for i in 0..j {
                w[packed_slot(i, j)] = weight;
            }
        }
        Self { n, w }
    }

    /// Uniform complete graph trace-normalized so tr(L) equals `target`.
    /// Used as the uninformative initializer for factor estimates.
    pub fn uniform_normalized(n: usize, target: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::DegenerateGraph(format!(
                "need at least 2 nodes, got {n}"
            )));
        }
        Ok(Self::complete(n, target / (n * (n - 1)) as f64))
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Packed upper-triangular weights, diagonal slots included.
    pub fn packed(&self) -> &[f64] {
        &self.w
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.w[packed_slot(i.min(j), i.max(j))]
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n;
        DMatrix::from_fn(n, n, |i, j| self.weight(i, j))
    }

    /// Weighted degree vector d = W 1.
    pub fn degrees(&self) -> DVector<f64> {
        DVector::from_fn(self.n, |i, _| (0..self.n).map(|j| self.weight(i, j)).sum())
    }

    /// Sum of all weights, i.e. tr(L) of the associated Laplacian.
    pub fn total_weight(&self) -> f64 {
        2.0 * self.offdiag_sum()
    }

    fn offdiag_sum(&self) -> f64 {
        let mut s = 0.0;
        for j in 0..self.n {
            for i in 0..j {
                s += self.w[packed_slot(i, j)];
            }
        }
        s
    }

    /// Edges with weight strictly above `threshold`, as (i, j, w) with i < j.
    pub fn edges_above(&self, threshold: f64) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for j in 0..self.n {
            for i in 0..j {
                let v = self.w[packed_slot(i, j)];
                if v > threshold {
                    out.push((i, j, v));
                }
            }
        }
        out
    }

    pub fn edge_count(&self, threshold: f64) -> usize {
        self.edges_above(threshold).len()
    }

    pub fn max_offdiag(&self) -> f64 {
        self.edges_above(f64::NEG_INFINITY)
            .iter()
            .fold(0.0, |a, &(_, _, v)| a.max(v))
    }

    /// Combinatorial Laplacian L = diag(W 1) - W.
    pub fn laplacian(&self) -> Laplacian {
        let d = self.degrees();
        let n = self.n;
        let m = DMatrix::from_fn(n, n, |i, j| if i == j { d[i] } else { -self.weight(i, j) });
        Laplacian { m }
    }

    /// Rescales all weights so that tr(laplacian) equals `target`.
    pub fn trace_normalized(&self, target: f64) -> Result<Self> {
        let tw = self.total_weight();
        if tw <= 0.0 {
            return Err(Error::DegenerateGraph(
                "all-zero adjacency cannot be trace-normalized".into(),
            ));
        }
        let c = target / tw;
        Ok(Self {
            n: self.n,
            w: self.w.iter().map(|v| v * c).collect(),
        })
    }

    /// Copy with every off-diagonal weight <= `threshold` zeroed.
    pub fn thresholded(&self, threshold: f64) -> Self {
        let mut w = self.w.clone();
        for j in 0..self.n {
            for i in 0..j {
                let s = packed_slot(i, j);
                if w[s] <= threshold {
                    w[s] = 0.0;
                }
            }
        }
        Self { n: self.n, w }
    }
}

/// Combinatorial Laplacian L = D - W. Row sums vanish to machine precision,
/// off-diagonals are nonpositive, and L is positive semi-definite.
#[derive(Debug, Clone)]
pub struct Laplacian {
    m: DMatrix<f64>,
}

impl Laplacian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn node_count(&self) -> usize {
        self.m.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.m.trace()
    }

    /// Eigenvalues and eigenvectors (symmetric decomposition).
    pub fn eigen(&self) -> SymmetricEigen<f64, nalgebra::Dyn> {
        SymmetricEigen::new(self.m.clone())
    }

    /// Moore-Penrose pseudoinverse via the eigendecomposition, inverting
    /// eigenvalues above `rel_tol * lambda_max`.
    pub fn pseudoinverse(&self, rel_tol: f64) -> DMatrix<f64> {
        let eig = self.eigen();
        let lmax = eig.eigenvalues.amax();
        let n = self.node_count();
        let mut acc = DMatrix::zeros(n, n);
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > rel_tol * lmax {
                let u = eig.eigenvectors.column(k);
                acc += (u * u.transpose()) / lam;
            }
        }
        acc
    }
}

/// Which graph product couples the factors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductKind {
    Kronecker,
    Cartesian,
    Strong,
}

impl ProductKind {
    pub const ALL: [ProductKind; 3] = [
        ProductKind::Kronecker,
        ProductKind::Cartesian,
        ProductKind::Strong,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProductKind::Kronecker => "kronecker",
            ProductKind::Cartesian => "cartesian",
            ProductKind::Strong => "strong",
        }
    }
}

impl std::str::FromStr for ProductKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kronecker" | "kron" => Ok(ProductKind::Kronecker),
            "cartesian" | "cart" => Ok(ProductKind::Cartesian),
            "strong" => Ok(ProductKind::Strong),
            other => Err(Error::InvalidConfig(format!(
                "unknown product kind '{other}' (expected kronecker | cartesian | strong)"
            ))),
        }
    }
}

impl std::fmt::Display for ProductKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered factor adjacencies plus the product kind. Factor k acts on tensor
/// mode k (0-based), so the dense product is W_{K-1} (x) ... (x) W_0 under
/// the mode-0-fastest vectorization.
#[derive(Debug, Clone)]
pub struct FactorGraphSet {
    kind: ProductKind,
    factors: Vec<WeightedAdjacency>,
}

impl FactorGraphSet {
    pub fn new(kind: ProductKind, factors: Vec<WeightedAdjacency>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidConfig("factor set must be nonempty".into()));
        }
        Ok(Self { kind, factors })
    }

    pub fn kind(&self) -> ProductKind {
        self.kind
    }

    pub fn factors(&self) -> &[WeightedAdjacency] {
        &self.factors
    }

    pub fn factor(&self, k: usize) -> &WeightedAdjacency {
        &self.factors[k]
    }

    pub fn order(&self) -> usize {
        self.factors.len()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.factors.iter().map(|f| f.node_count()).collect()
    }

    /// Product node count n = prod n_k.
    pub fn node_count(&self) -> usize {
        self.factors.iter().map(|f| f.node_count()).product()
    }
}

/// Number of free parameters of a symmetric adjacency over the given node
/// counts: n(n+1)/2 for the flat parameterization of the product graph,
/// or the sum of per-factor counts when the product structure is kept.
pub fn param_count(dims: &[usize], structured: bool) -> u64 {
    let tri = |n: u64| n * (n + 1) / 2;
    if structured {
        dims.iter().map(|&d| tri(d as u64)).sum()
    } else {
        tri(dims.iter().map(|&d| d as u64).product())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn random_adjacency(n: usize, seed: u64) -> WeightedAdjacency {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut w = vec![0.0; packed_len(n)];
        for j in 0..n {
            for i in 0..j {
                if rng.random::<f64>() < 0.6 {
                    w[packed_slot(i, j)] = rng.random::<f64>();
                }
            }
        }
        WeightedAdjacency::from_packed(n, w).unwrap()
    }

    #[test]
    fn laplacian_of_two_node_path() {
        let w = WeightedAdjacency::path(2);
        let l = w.laplacian();
        let expect = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(l.matrix(), &expect);
    }

    #[test]
    fn laplacian_of_three_node_path() {
        let l = WeightedAdjacency::path(3).laplacian();
        let expect =
            DMatrix::from_row_slice(3, 3, &[1.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 1.0]);
        assert_eq!(l.matrix(), &expect);
    }

    #[test]
    fn laplacian_row_sums_vanish() {
        let w = random_adjacency(10, 7);
        let l = w.laplacian();
        let ones = DVector::from_element(10, 1.0);
        let r = l.matrix() * ones;
        assert!(r.amax() < 1e-12);
    }

    #[test]
    fn laplacian_is_psd_with_nonpositive_offdiag() {
        for seed in 0..5 {
            let w = random_adjacency(8, seed);
            let l = w.laplacian();
            let scale = w.to_dense().norm();
            let min_eig = l.eigen().eigenvalues.min();
            assert!(min_eig >= -1e-8 * scale.max(1.0));
            for i in 0..8 {
                for j in 0..8 {
                    if i != j {
                        assert!(l.matrix()[(i, j)] <= 0.0);
                    }
                }
            }
        }
    }

    #[test]
    fn trace_normalize_examples() {
        let w = WeightedAdjacency::path(2);
        let out = w.trace_normalized(2.0).unwrap();
        assert_eq!(out.packed(), w.packed());

        let w2 = WeightedAdjacency::from_edges(2, &[(0, 1, 2.0)]).unwrap();
        let out2 = w2.trace_normalized(2.0).unwrap();
        assert_relative_eq!(out2.weight(0, 1), 1.0);

        let zero = WeightedAdjacency::from_packed(2, vec![0.0; 3]).unwrap();
        assert!(matches!(
            zero.trace_normalized(2.0),
            Err(Error::DegenerateGraph(_))
        ));
    }

    #[test]
    fn pack_order_is_column_major_upper() {
        // n = 2, W = [[0,3],[3,0]] -> w = (0, 3, 0)
        let w = WeightedAdjacency::from_edges(2, &[(0, 1, 3.0)]).unwrap();
        assert_eq!(w.packed(), &[0.0, 3.0, 0.0]);
        // slot enumeration follows (0,0),(0,1),(1,1),(0,2),...
        assert_eq!(packed_slot(0, 0), 0);
        assert_eq!(packed_slot(0, 1), 1);
        assert_eq!(packed_slot(1, 1), 2);
        assert_eq!(packed_slot(0, 2), 3);
        assert_eq!(slot_to_pair(4, 3), (1, 2));
    }

    #[test]
    fn packed_length_mismatch_is_rejected() {
        assert!(matches!(
            WeightedAdjacency::from_packed(2, vec![0.0; 4]),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn small_negative_weights_clamp_larger_reject() {
        let w = WeightedAdjacency::from_packed(2, vec![0.0, -1e-9, 0.0]).unwrap();
        assert_eq!(w.weight(0, 1), 0.0);
        assert!(WeightedAdjacency::from_packed(2, vec![0.0, -1e-6, 0.0]).is_err());
        assert!(WeightedAdjacency::from_packed(2, vec![0.5, 1.0, 0.0]).is_err());
    }

    #[test]
    fn param_count_known_values() {
        assert_eq!(param_count(&[800], false), 320_400);
        assert_eq!(param_count(&[111, 29], true), 6_651);
        assert_eq!(param_count(&[2, 2], true), 6);
    }

    #[test]
    fn pack_unpack_roundtrip_every_n_up_to_64() {
        for n in 2..=64 {
            let w = random_adjacency(n, n as u64);
            let back = WeightedAdjacency::from_dense(&w.to_dense()).unwrap();
            assert_eq!(w.packed(), back.packed(), "n = {n}");
        }
    }

    proptest! {
        #[test]
        fn pack_unpack_roundtrip(n in 2usize..=64, seed in 0u64..1000) {
            let w = random_adjacency(n, seed);
            let dense = w.to_dense();
            let back = WeightedAdjacency::from_dense(&dense).unwrap();
            prop_assert_eq!(w.packed(), back.packed());
        }

        #[test]
        fn slot_pair_roundtrip(n in 1usize..=64) {
            for s in 0..packed_len(n) {
                let (i, j) = slot_to_pair(s, n);
                prop_assert!(i <= j && j < n);
                prop_assert_eq!(packed_slot(i, j), s);
            }
        }

        #[test]
        fn structured_param_count_never_larger(dims in proptest::collection::vec(2usize..=12, 1..=4)) {
            let s = param_count(&dims, true);
            let u = param_count(&dims, false);
            prop_assert!(s <= u);
            if dims.len() == 1 {
                prop_assert_eq!(s, u);
            }
        }
    }
}
