//! LMMSE prediction of missing values with a covariance surrogate:
//! the sample covariance, a learned graph as W + I, or an explicit matrix.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::WeightedAdjacency;
use crate::tensor::SignalSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateKind {
    Scm,
    GraphWPlusI,
    Explicit,
}

#[derive(Debug, Clone)]
pub struct CovarianceSurrogate {
    sigma: DMatrix<f64>,
    kind: SurrogateKind,
}

impl CovarianceSurrogate {
    pub fn from_matrix(sigma: DMatrix<f64>, kind: SurrogateKind) -> Result<Self> {
        if sigma.nrows() != sigma.ncols() {
            return Err(Error::DimensionMismatch("covariance must be square".into()));
        }
        if (sigma.transpose() - &sigma).amax() > 1e-8 * sigma.amax().max(1.0) {
            return Err(Error::DimensionMismatch(
                "covariance must be symmetric".into(),
            ));
        }
        Ok(Self { sigma, kind })
    }

    /// W + I of a learned graph, used in place of the data covariance.
    pub fn from_graph(w: &WeightedAdjacency) -> Self {
        let n = w.node_count();
        let sigma = w.to_dense() + DMatrix::<f64>::identity(n, n);
        Self {
            sigma,
            kind: SurrogateKind::GraphWPlusI,
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn kind(&self) -> SurrogateKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }
}

/// Sample covariance (1/M0) Σ_m x_m x_m^T; the mean is not removed since
/// the signal model is zero-mean.
pub fn scm(signals: &SignalSet) -> Result<CovarianceSurrogate> {
    if signals.is_empty() {
        return Err(Error::EmptySignalSet);
    }
    let n = signals.signal_len();
    let mut sigma = DMatrix::<f64>::zeros(n, n);
    for x in signals.signals() {
        let xv = DVector::from_column_slice(x);
        sigma.ger(1.0, &xv, &xv, 1.0);
    }
    sigma /= signals.len() as f64;
    Ok(CovarianceSurrogate {
        sigma,
        kind: SurrogateKind::Scm,
    })
}

fn gather(sigma: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| sigma[(rows[i], cols[j])])
}

/// Default ridge 1e-6 tr(Σ_oo) / |obs| keeping the observed block
/// invertible.
pub fn default_ridge(sigma_oo: &DMatrix<f64>) -> f64 {
    1e-6 * sigma_oo.trace() / sigma_oo.nrows() as f64
}

fn check_index_sets(n: usize, obs: &[usize], miss: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in obs.iter().chain(miss) {
        if i >= n {
            return Err(Error::DimensionMismatch(format!(
                "index {i} out of range for dimension {n}"
            )));
        }
        if seen[i] {
            return Err(Error::DimensionMismatch(format!(
                "index {i} appears twice across the observed/missing sets"
            )));
        }
        seen[i] = true;
    }
    if obs.is_empty() || miss.is_empty() {
        return Err(Error::DimensionMismatch(
            "observed and missing sets must both be nonempty".into(),
        ));
    }
    Ok(())
}

/// x̂_miss = Σ_mo (Σ_oo + ridge I)^{-1} x_obs. A `ridge` of `None` applies
/// the default; an explicit 0 fails on a singular observed block.
pub fn lmmse_predict(
    surrogate: &CovarianceSurrogate,
    x_obs: &[f64],
    obs_idx: &[usize],
    miss_idx: &[usize],
    ridge: Option<f64>,
) -> Result<Vec<f64>> {
    let n = surrogate.dim();
    check_index_sets(n, obs_idx, miss_idx)?;
    if x_obs.len() != obs_idx.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} observed values for {} observed indices",
            x_obs.len(),
            obs_idx.len()
        )));
    }
    let solver = LmmseSolver::new(surrogate, obs_idx, miss_idx, ridge)?;
    Ok(solver.predict(x_obs))
}

/// Factors (Σ_oo + ridge I) once so repeated predictions with the same mask
/// reuse it. An LU factorization is used because graph surrogates W + I are
/// symmetric but not always positive definite.
pub struct LmmseSolver {
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    sigma_mo: DMatrix<f64>,
}

impl LmmseSolver {
    pub fn new(
        surrogate: &CovarianceSurrogate,
        obs_idx: &[usize],
        miss_idx: &[usize],
        ridge: Option<f64>,
    ) -> Result<Self> {
        check_index_sets(surrogate.dim(), obs_idx, miss_idx)?;
        let sigma_oo = gather(surrogate.matrix(), obs_idx, obs_idx);
        let ridge = ridge.unwrap_or_else(|| default_ridge(&sigma_oo));
        let scale = sigma_oo.amax().max(ridge.abs());
        let regularized =
            &sigma_oo + DMatrix::<f64>::identity(obs_idx.len(), obs_idx.len()) * ridge;
        let lu = regularized.lu();
        let near_singular = lu
            .u()
            .diagonal()
            .iter()
            .any(|&d| d.abs() <= 1e-12 * scale.max(1e-300));
        if near_singular {
            return Err(Error::Singular(format!(
                "observed covariance block is singular at ridge {ridge}"
            )));
        }
        Ok(Self {
            lu,
            sigma_mo: gather(surrogate.matrix(), miss_idx, obs_idx),
        })
    }

    pub fn predict(&self, x_obs: &[f64]) -> Vec<f64> {
        let sol = self
            .lu
            .solve(&DVector::from_column_slice(x_obs))
            .expect("pivots checked at construction");
        (&self.sigma_mo * sol).iter().copied().collect()
    }
}

/// 20 log10(rmse_baseline / rmse_method): positive when the method beats
/// the baseline.
pub fn rmse_db_reduction(rmse_method: f64, rmse_baseline: f64) -> Result<f64> {
    if rmse_method <= 0.0 || rmse_baseline <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "RMSE values must be positive, got method {rmse_method}, baseline {rmse_baseline}"
        )));
    }
    Ok(20.0 * (rmse_baseline / rmse_method).log10())
}

/// Hyperslab mask: all entries whose `mode` index equals `index`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SlabSpec {
    pub mode: usize,
    pub index: usize,
}

impl SlabSpec {
    /// (observed, missing) linear index sets over the given dims.
    pub fn split(&self, dims: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
        crate::tensor::check_mode(self.mode, dims.len())?;
        if self.index >= dims[self.mode] {
            return Err(Error::DimensionMismatch(format!(
                "slab index {} out of range for mode of size {}",
                self.index, dims[self.mode]
            )));
        }
        let n: usize = dims.iter().product();
        let inner: usize = dims[..self.mode].iter().product();
        let mid = dims[self.mode];
        let mut obs = Vec::new();
        let mut miss = Vec::new();
        for lin in 0..n {
            if (lin / inner) % mid == self.index {
                miss.push(lin);
            } else {
                obs.push(lin);
            }
        }
        Ok((obs, miss))
    }
}

/// Masks the slab out of every test sample, predicts it via LMMSE, and
/// returns the RMSE over all masked entries. Samples are predicted in
/// parallel against one shared factorization.
pub fn holdout_rmse(
    test: &SignalSet,
    slab: SlabSpec,
    surrogate: &CovarianceSurrogate,
    ridge: Option<f64>,
) -> Result<f64> {
    if surrogate.dim() != test.signal_len() {
        return Err(Error::DimensionMismatch(format!(
            "surrogate dimension {} vs signal length {}",
            surrogate.dim(),
            test.signal_len()
        )));
    }
    let (obs_idx, miss_idx) = slab.split(test.dims())?;
    let solver = LmmseSolver::new(surrogate, &obs_idx, &miss_idx, ridge)?;

    let sq_sum: f64 = (0..test.len())
        .into_par_iter()
        .map(|m| {
            let x = test.signal(m);
            let x_obs: Vec<f64> = obs_idx.iter().map(|&i| x[i]).collect();
            let pred = solver.predict(&x_obs);
            miss_idx
                .iter()
                .zip(&pred)
                .map(|(&i, &p)| (x[i] - p) * (x[i] - p))
                .sum::<f64>()
        })
        .sum();
    Ok((sq_sum / (test.len() * miss_idx.len()) as f64).sqrt())
}
