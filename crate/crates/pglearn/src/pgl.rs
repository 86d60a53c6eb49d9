//! Block coordinate descent for product-graph learning.
//!
//! Each sweep solves one LP per factor. The factor-k subproblem minimizes
//! alpha_k tr(W_k S̃_k) over valid adjacencies with tr(L_k) = n_k, where the
//! factor score matrix S̃_k = 1 s̄_k^T - S_k couples the data to the other
//! factors through a kind-dependent operator G_k acting on the non-k modes:
//! the Kronecker product of the current estimates (Kronecker), the identity
//! (Cartesian), or the Kronecker product of (estimate + I) (strong). G_k is
//! only ever applied through mode products.
//!
//! An inner solution is accepted only if it does not increase its
//! subproblem objective, so the monitored full objective is non-increasing
//! even though the inner solver is iterative.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::glp::{
    admm_solve, auto_alpha_factor, auto_rho, cost_vector, postprocess, ConstraintSystem, GlpConfig,
    ScoreMatrix,
};
use crate::graph::{FactorGraphSet, ProductKind, WeightedAdjacency};
use crate::par::par_chunk_reduce;
use crate::product::product_apply;
use crate::tensor::{kron_vec, matricize_slice, multi_mode_multiply_slice, SignalSet};

/// How the outer loop records its objective history.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ObjectiveMonitor {
    /// Exact increments tr((W_k' - W_k) S̃_k); one full evaluation up front.
    #[default]
    Incremental,
    /// Re-evaluate the full objective from the data after every update.
    Full,
}

#[derive(Debug, Clone)]
pub struct PglConfig {
    pub kind: ProductKind,
    pub dims: Vec<usize>,
    /// Maximum outer sweeps N0.
    pub max_sweeps: usize,
    /// Stop when the relative objective decrease over a sweep falls below
    /// this.
    pub outer_tol: f64,
    /// One inner solver configuration per factor.
    pub inner: Vec<GlpConfig>,
    pub monitor: ObjectiveMonitor,
}

impl PglConfig {
    /// Rate-guided defaults: alpha_k = sqrt(n_k log n_k / (n M0)),
    /// rho = 0.75 / log M0, T0 = 20000.
    pub fn auto(kind: ProductKind, dims: &[usize], m0: usize) -> Self {
        let n: usize = dims.iter().product();
        let inner = dims
            .iter()
            .map(|&n_k| GlpConfig {
                alpha: auto_alpha_factor(n_k, n, m0),
                rho: auto_rho(m0),
                ..GlpConfig::default()
            })
            .collect();
        Self {
            kind,
            dims: dims.to_vec(),
            max_sweeps: 50,
            outer_tol: 1e-8,
            inner,
            monitor: ObjectiveMonitor::default(),
        }
    }

    fn validate(&self, signals: &SignalSet) -> Result<()> {
        let n: usize = self.dims.iter().product();
        if n != signals.signal_len() {
            return Err(Error::DimensionMismatch(format!(
                "dims product mismatch: dims {:?} give {} but signals have length {}",
                self.dims,
                n,
                signals.signal_len()
            )));
        }
        if self.dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidConfig(
                "every factor needs at least 2 nodes".into(),
            ));
        }
        if self.inner.len() != self.dims.len() {
            return Err(Error::InvalidConfig(format!(
                "{} inner configs for {} factors",
                self.inner.len(),
                self.dims.len()
            )));
        }
        if self.max_sweeps == 0 {
            return Err(Error::InvalidConfig("max_sweeps must be >= 1".into()));
        }
        Ok(())
    }
}

/// Factor estimates plus the monitored objective trail.
#[derive(Debug, Clone)]
pub struct FactorEstimates {
    pub kind: ProductKind,
    pub factors: Vec<WeightedAdjacency>,
    /// Smoothness objective (alpha = 1) before any update and after each
    /// factor update, in update order.
    pub objective_history: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
    /// Inner solutions discarded by the no-increase guard.
    pub rejected_updates: usize,
}

impl FactorEstimates {
    pub fn factor_set(&self) -> FactorGraphSet {
        FactorGraphSet::new(self.kind, self.factors.clone()).expect("nonempty factors")
    }
}

/// The coupling matrices G_k is built from, per non-k mode.
fn coupling_matrices(
    factors: &[WeightedAdjacency],
    k: usize,
    kind: ProductKind,
) -> Vec<(usize, DMatrix<f64>)> {
    match kind {
        ProductKind::Cartesian => Vec::new(),
        ProductKind::Kronecker => factors
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(i, w)| (i, w.to_dense()))
            .collect(),
        ProductKind::Strong => factors
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(i, w)| {
                let n_i = w.node_count();
                (i, w.to_dense() + DMatrix::<f64>::identity(n_i, n_i))
            })
            .collect(),
    }
}

/// G_k 1 over the non-k index space: the Kronecker combination of the
/// per-mode row sums (all ones for the Cartesian coupling).
fn coupling_degrees(
    factors: &[WeightedAdjacency],
    k: usize,
    kind: ProductKind,
    dims: &[usize],
) -> Vec<f64> {
    let rest: usize = dims
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k)
        .map(|(_, &d)| d)
        .product();
    match kind {
        ProductKind::Cartesian => vec![1.0; rest],
        ProductKind::Kronecker | ProductKind::Strong => {
            let shift = if kind == ProductKind::Strong {
                1.0
            } else {
                0.0
            };
            let per_mode: Vec<Vec<f64>> = factors
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != k)
                .map(|(_, w)| w.degrees().iter().map(|d| d + shift).collect())
                .collect();
            let refs: Vec<&[f64]> = per_mode.iter().map(|v| v.as_slice()).collect();
            kron_vec(&refs)
        }
    }
}

/// Factor-k score matrix S̃_k = 1 s̄_k^T - S_k with
/// S_k = (1/M0) Σ_m X_(k) G_k X_(k)^T and s̄_k = (1/M0) Σ_m X̄_(k) (G_k 1).
/// For the Cartesian coupling the estimates of the other factors are
/// ignored.
pub fn factor_score_matrix(
    signals: &SignalSet,
    k: usize,
    factors: &[WeightedAdjacency],
    kind: ProductKind,
) -> Result<ScoreMatrix> {
    let dims = signals.dims().to_vec();
    if k >= dims.len() {
        return Err(Error::ModeOutOfRange {
            mode: k,
            order: dims.len(),
        });
    }
    if factors.len() != dims.len() || factors.iter().zip(&dims).any(|(w, &d)| w.node_count() != d) {
        return Err(Error::DimensionMismatch(
            "factor estimates do not match signal dims".into(),
        ));
    }
    let n_k = dims[k];
    let m0 = signals.len();
    let coupling = coupling_matrices(factors, k, kind);
    let coupling_refs: Vec<(usize, &DMatrix<f64>)> =
        coupling.iter().map(|(i, m)| (*i, m)).collect();
    let dbar = DVector::from_vec(coupling_degrees(factors, k, kind, &dims));

    let parts = par_chunk_reduce(m0, 32, |range| {
        let mut s = DMatrix::<f64>::zeros(n_k, n_k);
        let mut sbar = DVector::<f64>::zeros(n_k);
        for m in range {
            let x = signals.signal(m);
            let xk = matricize_slice(x, &dims, k);
            if coupling_refs.is_empty() {
                s.gemm(1.0, &xk, &xk.transpose(), 1.0);
            } else {
                let y = multi_mode_multiply_slice(x, &dims, &coupling_refs);
                let yk = matricize_slice(&y, &dims, k);
                s.gemm(1.0, &xk, &yk.transpose(), 1.0);
            }
            let xsq: Vec<f64> = x.iter().map(|v| v * v).collect();
            let xbark = matricize_slice(&xsq, &dims, k);
            sbar.gemv(1.0, &xbark, &dbar, 1.0);
        }
        (s, sbar)
    })
    .into_iter()
    .reduce(|(s1, b1), (s2, b2)| (s1 + s2, b1 + b2))
    .ok_or(Error::EmptySignalSet)?;

    let (s, sbar) = parts;
    let scale = 1.0 / m0 as f64;
    let m = DMatrix::from_fn(n_k, n_k, |i, j| (sbar[j] - s[(i, j)]) * scale);
    ScoreMatrix::new(m)
}

/// Smoothness objective (1/M0) Σ_m [x̄^T W 1 - x^T W x] of the product graph,
/// evaluated through the implicit apply.
pub fn full_smoothness(set: &FactorGraphSet, signals: &SignalSet) -> Result<f64> {
    let n = set.node_count();
    if n != signals.signal_len() {
        return Err(Error::DimensionMismatch(format!(
            "product size {} vs signal length {}",
            n,
            signals.signal_len()
        )));
    }
    let w_ones = product_apply(set, &vec![1.0; n])?;
    let totals = par_chunk_reduce(signals.len(), 32, |range| {
        let mut acc = 0.0;
        for m in range {
            let x = signals.signal(m);
            let degree: f64 = x.iter().zip(&w_ones).map(|(xi, di)| xi * xi * di).sum();
            let wx = product_apply(set, x).expect("checked dims");
            let adj: f64 = x.iter().zip(&wx).map(|(xi, yi)| xi * yi).sum();
            acc += degree - adj;
        }
        acc
    });
    Ok(totals.into_iter().sum::<f64>() / signals.len() as f64)
}

/// alpha-scaled objective of the three product learning problems.
pub fn full_objective(set: &FactorGraphSet, signals: &SignalSet, alpha: f64) -> Result<f64> {
    Ok(alpha * full_smoothness(set, signals)?)
}

fn solve_factor(
    score: &ScoreMatrix,
    cs: &ConstraintSystem,
    cfg: &GlpConfig,
    n_k: usize,
) -> Result<Option<WeightedAdjacency>> {
    let c = cost_vector(score, cfg.alpha);
    let (w_hat, _) = admm_solve(&c, cs, cfg)?;
    let cleaned = postprocess(&w_hat, n_k)?;
    if cleaned.total_weight() <= 0.0 {
        // all weight clamped away; nothing usable came back
        return Ok(None);
    }
    Ok(Some(cleaned.trace_normalized(n_k as f64)?))
}

/// One candidate-acceptance step: keeps `candidate` only if it does not
/// increase tr(W_k S̃_k). Returns the objective delta actually applied.
fn accept_if_nonincreasing(
    current: &mut WeightedAdjacency,
    candidate: Option<WeightedAdjacency>,
    score: &ScoreMatrix,
    rejected: &mut usize,
) -> f64 {
    let Some(cand) = candidate else {
        *rejected += 1;
        return 0.0;
    };
    let delta = score.trace_against(&cand) - score.trace_against(current);
    if delta <= 0.0 {
        *current = cand;
        delta
    } else {
        *rejected += 1;
        0.0
    }
}

/// Block coordinate descent (Algorithm-2 style): initializes every factor to
/// the uniform complete graph at trace n_k, sweeps factors in ascending
/// order, and stops on small relative objective decrease or after
/// `max_sweeps`.
pub fn bpgl_learn(signals: &SignalSet, cfg: &PglConfig) -> Result<FactorEstimates> {
    cfg.validate(signals)?;
    let signals = signals.reshaped(cfg.dims.clone())?;
    let k0 = cfg.dims.len();

    let mut factors: Vec<WeightedAdjacency> = cfg
        .dims
        .iter()
        .map(|&n_k| WeightedAdjacency::uniform_normalized(n_k, n_k as f64))
        .collect::<Result<_>>()?;
    let systems: Vec<ConstraintSystem> = cfg
        .dims
        .iter()
        .map(|&n_k| ConstraintSystem::new(n_k))
        .collect::<Result<_>>()?;

    let set = FactorGraphSet::new(cfg.kind, factors.clone())?;
    let mut objective = full_smoothness(&set, &signals)?;
    let mut history = vec![objective];
    let mut rejected = 0usize;
    let mut sweeps = 0usize;
    let mut converged = false;

    for _sweep in 0..cfg.max_sweeps {
        sweeps += 1;
        let sweep_start = objective;
        for k in 0..k0 {
            let score = factor_score_matrix(&signals, k, &factors, cfg.kind)?;
            let candidate =
                solve_factor(&score, &systems[k], &cfg.inner[k], cfg.dims[k]).map_err(|e| {
                    Error::Solver(format!(
                        "inner solve diverged at sweep {sweeps}, factor {k}: {e}"
                    ))
                })?;
            let delta = accept_if_nonincreasing(&mut factors[k], candidate, &score, &mut rejected);
            objective += delta;
            let recorded = match cfg.monitor {
                ObjectiveMonitor::Incremental => objective,
                ObjectiveMonitor::Full => {
                    let set = FactorGraphSet::new(cfg.kind, factors.clone())?;
                    full_smoothness(&set, &signals)?
                }
            };
            history.push(recorded);
        }
        let decrease = sweep_start - objective;
        if decrease <= cfg.outer_tol * sweep_start.abs().max(1.0) {
            converged = true;
            break;
        }
    }

    Ok(FactorEstimates {
        kind: cfg.kind,
        factors,
        objective_history: history,
        sweeps,
        converged,
        rejected_updates: rejected,
    })
}

/// Cartesian-only path: the factor subproblems share no state, so all K
/// factors are solved concurrently from the same per-factor score matrices.
/// The result matches the sequential sweep bit for bit.
pub fn bpgl_learn_parallel_cartesian(
    signals: &SignalSet,
    cfg: &PglConfig,
) -> Result<FactorEstimates> {
    if cfg.kind != ProductKind::Cartesian {
        return Err(Error::InvalidConfig(format!(
            "parallel path requires the cartesian kind, got {}",
            cfg.kind
        )));
    }
    cfg.validate(signals)?;
    let signals = signals.reshaped(cfg.dims.clone())?;
    let k0 = cfg.dims.len();

    let mut factors: Vec<WeightedAdjacency> = cfg
        .dims
        .iter()
        .map(|&n_k| WeightedAdjacency::uniform_normalized(n_k, n_k as f64))
        .collect::<Result<_>>()?;

    let set = FactorGraphSet::new(cfg.kind, factors.clone())?;
    let mut objective = full_smoothness(&set, &signals)?;
    let mut history = vec![objective];

    let solved: Vec<(ScoreMatrix, Option<WeightedAdjacency>)> = (0..k0)
        .into_par_iter()
        .map(|k| {
            let score = factor_score_matrix(&signals, k, &factors, ProductKind::Cartesian)?;
            let cs = ConstraintSystem::new(cfg.dims[k])?;
            let cand = solve_factor(&score, &cs, &cfg.inner[k], cfg.dims[k])?;
            Ok((score, cand))
        })
        .collect::<Result<_>>()?;

    let mut rejected = 0usize;
    for (k, (score, cand)) in solved.into_iter().enumerate() {
        let delta = accept_if_nonincreasing(&mut factors[k], cand, &score, &mut rejected);
        objective += delta;
        history.push(objective);
    }

    Ok(FactorEstimates {
        kind: cfg.kind,
        factors,
        objective_history: history,
        sweeps: 1,
        converged: true,
        rejected_updates: rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glp::score_matrix;
    use crate::product::product_adjacency;
    use crate::synth::{product_ground_truth, GeneratorSpec};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_factor(n: usize, rng: &mut impl Rng) -> WeightedAdjacency {
        let mut edges = Vec::new();
        for j in 0..n {
            for i in 0..j {
                if rng.random::<f64>() < 0.7 {
                    edges.push((i, j, rng.random::<f64>() + 0.05));
                }
            }
        }
        if edges.is_empty() {
            edges.push((0, 1, 1.0));
        }
        WeightedAdjacency::from_edges(n, &edges).unwrap()
    }

    fn random_signals(dims: &[usize], m0: usize, seed: u64) -> SignalSet {
        let n: usize = dims.iter().product();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        SignalSet::new(
            dims.to_vec(),
            (0..n * m0).map(|_| rng.random::<f64>() - 0.5).collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_factor_score_reduces_to_glp_score() {
        let signals = random_signals(&[5], 20, 3);
        let w = vec![random_factor(5, &mut ChaCha8Rng::seed_from_u64(1))];
        for kind in ProductKind::ALL {
            let fs = factor_score_matrix(&signals, 0, &w, kind).unwrap();
            let gs = score_matrix(&signals).unwrap();
            assert_relative_eq!((fs.matrix() - gs.matrix()).norm(), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cartesian_score_ignores_other_factor_estimates() {
        let signals = random_signals(&[3, 4], 15, 5);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fa = vec![random_factor(3, &mut rng), random_factor(4, &mut rng)];
        let fb = vec![random_factor(3, &mut rng), random_factor(4, &mut rng)];
        let sa = factor_score_matrix(&signals, 0, &fa, ProductKind::Cartesian).unwrap();
        let sb = factor_score_matrix(&signals, 0, &fb, ProductKind::Cartesian).unwrap();
        assert_eq!(sa.matrix(), sb.matrix());
    }

    /// Brute-force W_k-dependent part of the objective: evaluate the dense
    /// full objective and subtract its value with W_k zeroed out.
    fn wk_dependent_part(
        factors: &[WeightedAdjacency],
        k: usize,
        kind: ProductKind,
        signals: &SignalSet,
        alpha: f64,
    ) -> f64 {
        let full = dense_objective(factors, kind, signals, alpha);
        let mut zeroed = factors.to_vec();
        zeroed[k] = WeightedAdjacency::from_packed(
            factors[k].node_count(),
            vec![0.0; factors[k].packed().len()],
        )
        .unwrap();
        full - dense_objective(&zeroed, kind, signals, alpha)
    }

    fn dense_objective(
        factors: &[WeightedAdjacency],
        kind: ProductKind,
        signals: &SignalSet,
        alpha: f64,
    ) -> f64 {
        let set = FactorGraphSet::new(kind, factors.to_vec()).unwrap();
        let w = product_adjacency(&set, None).unwrap().to_dense();
        let ones = DVector::from_element(w.nrows(), 1.0);
        let w_ones = &w * ones;
        let mut acc = 0.0;
        for x in signals.signals() {
            let xv = DVector::from_column_slice(x);
            let degree: f64 = x
                .iter()
                .zip(w_ones.iter())
                .map(|(xi, di)| xi * xi * di)
                .sum();
            acc += degree - (&w * &xv).dot(&xv);
        }
        alpha * acc / signals.len() as f64
    }

    #[test]
    fn factor_score_trace_matches_dense_objective_terms() {
        let dims = [3usize, 3, 2];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in ProductKind::ALL {
            for trial in 0..5 {
                let factors: Vec<WeightedAdjacency> =
                    dims.iter().map(|&d| random_factor(d, &mut rng)).collect();
                let signals = random_signals(&dims, 6, 100 + trial);
                let alpha = 0.8;
                for k in 0..dims.len() {
                    let score = factor_score_matrix(&signals, k, &factors, kind).unwrap();
                    let lhs = alpha * score.trace_against(&factors[k]);
                    let rhs = wk_dependent_part(&factors, k, kind, &signals, alpha);
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-10, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn full_objective_matches_dense_and_glp_reduction() {
        let dims = [3usize, 3, 2];
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let factors: Vec<WeightedAdjacency> =
            dims.iter().map(|&d| random_factor(d, &mut rng)).collect();
        let signals = random_signals(&dims, 8, 44);
        for kind in ProductKind::ALL {
            let set = FactorGraphSet::new(kind, factors.clone()).unwrap();
            let implicit = full_objective(&set, &signals, 0.7).unwrap();
            let dense = dense_objective(&factors, kind, &signals, 0.7);
            assert_relative_eq!(implicit, dense, max_relative = 1e-10, epsilon = 1e-12);
        }

        // K0 = 1: equals alpha tr(W S̃) from the unstructured machinery
        let signals1 = random_signals(&[6], 10, 9);
        let w = vec![random_factor(6, &mut rng)];
        let set = FactorGraphSet::new(ProductKind::Kronecker, w.clone()).unwrap();
        let obj = full_objective(&set, &signals1, 0.5).unwrap();
        let gs = score_matrix(&signals1).unwrap();
        assert_relative_eq!(obj, 0.5 * gs.trace_against(&w[0]), max_relative = 1e-10);

        // all-zero factors give zero objective
        let zeros = vec![
            WeightedAdjacency::from_packed(3, vec![0.0; 6]).unwrap(),
            WeightedAdjacency::from_packed(2, vec![0.0; 3]).unwrap(),
        ];
        let zset = FactorGraphSet::new(ProductKind::Strong, zeros).unwrap();
        let zsig = random_signals(&[3, 2], 4, 1);
        assert_eq!(full_objective(&zset, &zsig, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn bpgl_objective_history_is_monotone() {
        for kind in ProductKind::ALL {
            let specs = vec![
                GeneratorSpec::erdos_renyi(3, 0.9, 1),
                GeneratorSpec::erdos_renyi(3, 0.9, 2),
            ];
            let (_, signals) = product_ground_truth(kind, &specs, 50, 12, 0.0).unwrap();
            let mut cfg = PglConfig::auto(kind, &[3, 3], 50);
            cfg.max_sweeps = 6;
            cfg.monitor = ObjectiveMonitor::Full;
            let est = bpgl_learn(&signals, &cfg).unwrap();
            for pair in est.objective_history.windows(2) {
                assert!(
                    pair[1] <= pair[0] + 1e-10,
                    "{kind}: objective rose from {} to {}",
                    pair[0],
                    pair[1]
                );
            }
            for (f, &n_k) in est.factors.iter().zip(&[3usize, 3]) {
                assert_relative_eq!(f.total_weight(), n_k as f64, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn parallel_cartesian_equals_sequential() {
        let specs = vec![
            GeneratorSpec::erdos_renyi(3, 0.8, 5),
            GeneratorSpec::erdos_renyi(4, 0.6, 6),
            GeneratorSpec::erdos_renyi(2, 1.0, 7),
        ];
        let (_, signals) =
            product_ground_truth(ProductKind::Cartesian, &specs, 80, 21, 0.0).unwrap();
        let cfg = PglConfig::auto(ProductKind::Cartesian, &[3, 4, 2], 80);
        let seq = bpgl_learn(&signals, &cfg).unwrap();
        let par = bpgl_learn_parallel_cartesian(&signals, &cfg).unwrap();
        for (a, b) in seq.factors.iter().zip(&par.factors) {
            let diff = (a.to_dense() - b.to_dense()).amax();
            assert!(diff <= 1e-8, "factors differ by {diff}");
        }
    }

    #[test]
    fn parallel_path_rejects_other_kinds() {
        let signals = random_signals(&[2, 2], 4, 0);
        let cfg = PglConfig::auto(ProductKind::Kronecker, &[2, 2], 4);
        assert!(matches!(
            bpgl_learn_parallel_cartesian(&signals, &cfg),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn dims_mismatch_is_rejected() {
        let signals = random_signals(&[4], 5, 0);
        let cfg = PglConfig::auto(ProductKind::Cartesian, &[3, 2], 5);
        assert!(bpgl_learn(&signals, &cfg).is_err());
    }

    #[test]
    fn inner_failure_names_sweep_and_factor() {
        let signals = random_signals(&[3, 3], 10, 1);
        let mut cfg = PglConfig::auto(ProductKind::Cartesian, &[3, 3], 10);
        cfg.inner[0].rho = 0.0; // rejected by the inner solver
        match bpgl_learn(&signals, &cfg) {
            Err(Error::Solver(msg)) => {
                assert!(msg.contains("sweep 1"), "{msg}");
                assert!(msg.contains("factor 0"), "{msg}");
            }
            other => panic!("expected solver error, got {other:?}"),
        }
    }
}
