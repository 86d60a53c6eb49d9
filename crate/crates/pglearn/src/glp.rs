//! Graph learning as a linear program, solved by ADMM.
//!
//! The smoothness objective over M0 signals reduces to a linear functional
//! of the packed weights, tr(W S̃) with the data-only score matrix
//! S̃ = (Σ_m 1 x̄_m^T - Σ_m x_m x_m^T) / M0 and x̄ = x ∘ x. Laplacian validity
//! becomes the constraint set { A w = b, w >= 0 on off-diagonal slots } with
//! one trace row (coefficient 2 on off-diagonal slots, 1 on diagonal slots)
//! followed by one selector row per diagonal slot, b = (n, 0, ..., 0).
//! That row layout gives A A^T = [[2n^2 - n, 1^T], [1, I]], so the solver's
//! per-iteration inverse reduces to an O(n) Schur-complement solve through
//! (I + A^T A)^{-1} = I - A^T (I + A A^T)^{-1} A.
//!
//! The exact LP optimum over this feasible set is generically a single-edge
//! vertex; the learned graph is defined operationally as the ADMM iterate at
//! termination under the configured (alpha, rho, T0).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::{packed_len, packed_slot, slot_to_pair, WeightedAdjacency};
use crate::par::par_chunk_reduce;
use crate::tensor::SignalSet;

/// Data-derived score matrix S̃ whose inner product with W is the smoothness
/// objective: tr(W S̃) = (1/M0) Σ_m x_m^T L x_m for every valid W.
#[derive(Debug, Clone)]
pub struct ScoreMatrix {
    m: DMatrix<f64>,
}

impl ScoreMatrix {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "score matrix must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("score matrix".into()));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// tr(W S̃) for a symmetric W.
    pub fn trace_against(&self, w: &WeightedAdjacency) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                if i != j {
                    acc += w.weight(i, j) * self.m[(i, j)];
                }
            }
        }
        acc
    }
}

/// S̃ from vectorized signals. The accumulation is chunk-parallel with a
/// fixed reduction order, so results are reproducible run to run.
pub fn score_matrix(signals: &SignalSet) -> Result<ScoreMatrix> {
    let n = signals.signal_len();
    let m0 = signals.len();
    if m0 == 0 {
        return Err(Error::EmptySignalSet);
    }
    let parts = par_chunk_reduce(m0, 64, |range| {
        let mut sbar = DVector::<f64>::zeros(n);
        let mut gram = DMatrix::<f64>::zeros(n, n);
        for m in range {
            let x = signals.signal(m);
            let xv = DVector::from_column_slice(x);
            for (acc, xi) in sbar.iter_mut().zip(x) {
                *acc += xi * xi;
            }
            gram.ger(1.0, &xv, &xv, 1.0);
        }
        (sbar, gram)
    })
    .into_iter()
    .reduce(|(s1, g1), (s2, g2)| (s1 + s2, g1 + g2))
    .expect("nonempty signal set");

    let (sbar, gram) = parts;
    let scale = 1.0 / m0 as f64;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = (sbar[j] - gram[(i, j)]) * scale;
        }
    }
    ScoreMatrix::new(m)
}

/// Packed cost vector with c^T w = alpha tr(W S̃): slot (i, j) carries
/// alpha (S̃_ij + S̃_ji) off the diagonal and alpha S̃_ii on it.
pub fn cost_vector(score: &ScoreMatrix, alpha: f64) -> Vec<f64> {
    let n = score.dim();
    let s = score.matrix();
    let mut c = vec![0.0; packed_len(n)];
    for j in 0..n {
        for i in 0..=j {
            c[packed_slot(i, j)] = if i == j {
                alpha * s[(i, i)]
            } else {
                alpha * (s[(i, j)] + s[(j, i)])
            };
        }
    }
    c
}

/// Equality constraints A w = b plus the nonnegative index set F, with the
/// closed-form (I + A A^T) inverse baked in.
#[derive(Debug, Clone)]
pub struct ConstraintSystem {
    n: usize,
    p: usize,
    b: Vec<f64>,
    /// Schur complement of the leading entry of I + A A^T.
    schur: f64,
    /// slot -> (i, j), precomputed for the per-iteration operator applies.
    pairs: Vec<(usize, usize)>,
}

impl ConstraintSystem {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidConfig(format!(
                "constraint system needs n >= 2, got {n}"
            )));
        }
        let mut b = vec![0.0; n + 1];
        b[0] = n as f64;
        let c_n = (2 * n * n - n) as f64;
        let p = packed_len(n);
        let pairs = (0..p).map(|s| slot_to_pair(s, n)).collect();
        Ok(Self {
            n,
            p,
            b,
            schur: 1.0 + c_n - n as f64 / 2.0,
            pairs,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Packed length n(n+1)/2.
    pub fn packed_dim(&self) -> usize {
        self.p
    }

    /// Number of equality rows, n + 1.
    pub fn rows(&self) -> usize {
        self.n + 1
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// Off-diagonal slots of the packed vector (the set F).
    pub fn offdiag_slots(&self) -> impl Iterator<Item = usize> + '_ {
        self.pairs
            .iter()
            .enumerate()
            .filter(|(_, (i, j))| i != j)
            .map(|(s, _)| s)
    }

    fn diag_slot(&self, i: usize) -> usize {
        packed_slot(i, i)
    }

    /// out = A w. Row 0 is the trace row, rows 1..=n select diagonal slots.
    pub fn apply_a(&self, w: &[f64], out: &mut [f64]) {
        debug_assert_eq!(w.len(), self.p);
        debug_assert_eq!(out.len(), self.rows());
        let mut trace = 0.0;
        for (&v, &(i, j)) in w.iter().zip(&self.pairs) {
            trace += if i == j { v } else { 2.0 * v };
        }
        out[0] = trace;
        for i in 0..self.n {
            out[i + 1] = w[self.diag_slot(i)];
        }
    }

    /// out = A^T v.
    pub fn apply_at(&self, v: &[f64], out: &mut [f64]) {
        debug_assert_eq!(v.len(), self.rows());
        debug_assert_eq!(out.len(), self.p);
        for (o, &(i, j)) in out.iter_mut().zip(&self.pairs) {
            *o = if i == j { v[0] + v[i + 1] } else { 2.0 * v[0] };
        }
    }

    /// In-place solve of (I + A A^T) u = v using the closed block form
    /// [[1 + c_n, 1^T], [1, 2 I]] and its leading Schur complement.
    pub fn solve_i_plus_aat(&self, v: &mut [f64]) {
        debug_assert_eq!(v.len(), self.rows());
        let tail_sum: f64 = v[1..].iter().sum();
        let u0 = (v[0] - 0.5 * tail_sum) / self.schur;
        v[0] = u0;
        for vi in v[1..].iter_mut() {
            *vi = 0.5 * (*vi - u0);
        }
    }

    /// (I + A^T A)^{-1} e through the Woodbury-style identity
    /// I - A^T (I + A A^T)^{-1} A.
    pub fn solve_i_plus_ata(&self, e: &[f64]) -> Vec<f64> {
        let mut rows = vec![0.0; self.rows()];
        self.apply_a(e, &mut rows);
        self.solve_i_plus_aat(&mut rows);
        let mut back = vec![0.0; self.p];
        self.apply_at(&rows, &mut back);
        e.iter().zip(&back).map(|(ei, bi)| ei - bi).collect()
    }

    /// Dense A, for oracle checks. Entries are exact small integers.
    pub fn dense_a(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.rows(), self.p);
        for s in 0..self.p {
            let (i, j) = slot_to_pair(s, self.n);
            if i == j {
                a[(0, s)] = 1.0;
                a[(i + 1, s)] = 1.0;
            } else {
                a[(0, s)] = 2.0;
            }
        }
        a
    }

    /// Max-norm equality residual |A w - b|_inf and the most negative
    /// off-diagonal entry of w (0 when none are negative).
    pub fn feasibility(&self, w: &[f64]) -> (f64, f64) {
        let mut aw = vec![0.0; self.rows()];
        self.apply_a(w, &mut aw);
        let eq = aw
            .iter()
            .zip(&self.b)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let neg = self.offdiag_slots().map(|s| w[s]).fold(0.0, f64::min);
        (eq, neg)
    }

    /// The uniform feasible point w_ij = 1/(n-1), i.e. (J - I) scaled to
    /// trace n.
    pub fn feasible_uniform(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.p];
        let v = 1.0 / (self.n - 1) as f64;
        for s in self.offdiag_slots().collect::<Vec<_>>() {
            w[s] = v;
        }
        w
    }
}

/// Solver parameters for one LP instance.
#[derive(Debug, Clone)]
pub struct GlpConfig {
    /// Smoothness weight multiplying the score in the cost vector.
    pub alpha: f64,
    /// ADMM penalty parameter.
    pub rho: f64,
    /// Maximum iterations T0.
    pub max_iter: usize,
    /// Relative primal-feasibility tolerance.
    pub eps_feas: f64,
    /// Relative dual tolerance.
    pub eps_dual: f64,
    /// Record per-iteration residuals.
    pub trace_residuals: bool,
}

impl Default for GlpConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            rho: 1.0,
            max_iter: 20_000,
            eps_feas: 1e-6,
            eps_dual: 1e-6,
            trace_residuals: false,
        }
    }
}

impl GlpConfig {
    /// alpha = sqrt(log n / M0), rho = 0.75 / log M0 (natural logs; M0 is
    /// clamped to at least 3 so the rho rule stays positive).
    pub fn auto(n: usize, m0: usize) -> Self {
        Self {
            alpha: auto_alpha(n, m0),
            rho: auto_rho(m0),
            ..Self::default()
        }
    }
}

pub fn auto_alpha(n: usize, m0: usize) -> f64 {
    ((n as f64).ln() / m0 as f64).sqrt()
}

/// Per-factor alpha sqrt(n_k log n_k / (n M0)) for product learning.
pub fn auto_alpha_factor(n_k: usize, n: usize, m0: usize) -> f64 {
    (n_k as f64 * (n_k as f64).ln() / (n as f64 * m0 as f64)).sqrt()
}

pub fn auto_rho(m0: usize) -> f64 {
    0.75 / (m0.max(3) as f64).ln()
}

/// Why a solve stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Converged => f.write_str("converged"),
            Termination::MaxIterations => f.write_str("max-iterations"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct AdmmReport {
    pub iterations: usize,
    pub termination: Termination,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// (iteration, primal, dual) samples when residual tracing is on.
    pub residual_history: Vec<(usize, f64, f64)>,
}

/// Runs the four-step ADMM iteration for min c^T w subject to A w = b,
/// w = y, y >= 0 on F, starting from y = 0, z = 1. Returns the w iterate at
/// termination.
pub fn admm_solve(
    c: &[f64],
    cs: &ConstraintSystem,
    cfg: &GlpConfig,
) -> Result<(Vec<f64>, AdmmReport)> {
    let p = cs.packed_dim();
    let rows = cs.rows();
    if c.len() != p {
        return Err(Error::DimensionMismatch(format!(
            "cost vector length {} vs packed dim {}",
            c.len(),
            p
        )));
    }
    if cfg.rho <= 0.0 || cfg.max_iter == 0 || cfg.eps_feas <= 0.0 || cfg.eps_dual <= 0.0 {
        return Err(Error::InvalidConfig(
            "rho and the residual tolerances must be positive, max_iter >= 1".into(),
        ));
    }
    let rho = cfg.rho;
    let offdiag: Vec<usize> = cs.offdiag_slots().collect();

    let mut w = vec![0.0; p];
    let mut prev_w = vec![0.0; p];
    let mut y = vec![0.0; p];
    let mut z_w = vec![1.0; rows];
    let mut z_y = vec![1.0; p];

    let mut e = vec![0.0; p];
    let mut v_top = vec![0.0; rows];
    let mut aw = vec![0.0; rows];
    let mut atz = vec![0.0; p];
    let mut back = vec![0.0; p];

    let mut report = AdmmReport {
        iterations: 0,
        termination: Termination::MaxIterations,
        primal_residual: f64::INFINITY,
        dual_residual: f64::INFINITY,
        residual_history: Vec::new(),
    };

    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let b_norm = norm(cs.b());

    for t in 1..=cfg.max_iter {
        // e = -A^T (z_w - rho b) - (z_y - rho y) - c
        for (vt, (zi, bi)) in v_top.iter_mut().zip(z_w.iter().zip(cs.b())) {
            *vt = zi - rho * bi;
        }
        cs.apply_at(&v_top, &mut e);
        for s in 0..p {
            e[s] = -e[s] - (z_y[s] - rho * y[s]) - c[s];
        }

        // w = (1/rho) (I + A^T A)^{-1} e, via the Woodbury identity with
        // the closed-form (I + A A^T) solve
        prev_w.copy_from_slice(&w);
        cs.apply_a(&e, &mut v_top);
        cs.solve_i_plus_aat(&mut v_top);
        cs.apply_at(&v_top, &mut back);
        for s in 0..p {
            w[s] = (e[s] - back[s]) / rho;
        }

        // y = [w + z_y / rho] projected onto { y_F >= 0 }
        for s in 0..p {
            y[s] = w[s] + z_y[s] / rho;
        }
        for &s in &offdiag {
            if y[s] < 0.0 {
                y[s] = 0.0;
            }
        }

        // z += rho (A_w w + A_y y - b̃)
        cs.apply_a(&w, &mut aw);
        let mut primal_sq = 0.0;
        for i in 0..rows {
            let r = aw[i] - cs.b()[i];
            z_w[i] += rho * r;
            primal_sq += r * r;
        }
        for s in 0..p {
            let r = w[s] - y[s];
            z_y[s] += rho * r;
            primal_sq += r * r;
        }

        let primal = primal_sq.sqrt();
        let dual = rho
            * w.iter()
                .zip(&prev_w)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();

        if cfg.trace_residuals {
            report.residual_history.push((t, primal, dual));
        }

        report.iterations = t;
        report.primal_residual = primal;
        report.dual_residual = dual;

        if t % 128 == 0 && !w.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("ADMM iterate".into()));
        }

        if t >= 2 {
            let primal_scale = norm(&aw)
                .hypot(norm(&w))
                .max(b_norm.hypot(norm(&y)))
                .max(1.0);
            cs.apply_at(&z_w, &mut atz);
            for (a, zy) in atz.iter_mut().zip(&z_y) {
                *a += zy;
            }
            let dual_scale = norm(&atz).max(1.0);
            if primal <= cfg.eps_feas * primal_scale && dual <= cfg.eps_dual * dual_scale {
                report.termination = Termination::Converged;
                break;
            }
        }
    }

    if !w.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite("ADMM iterate".into()));
    }
    Ok((w, report))
}

/// Clamps negatives to zero, pins the diagonal, and unpacks.
pub fn postprocess(w_hat: &[f64], n: usize) -> Result<WeightedAdjacency> {
    let mut w = w_hat.to_vec();
    for (s, v) in w.iter_mut().enumerate() {
        let (i, j) = slot_to_pair(s, n);
        if i == j || *v < 0.0 {
            *v = 0.0;
        }
    }
    WeightedAdjacency::from_packed(n, w)
}

/// Result of a full GLP run.
#[derive(Debug, Clone)]
pub struct GlpOutcome {
    pub adjacency: WeightedAdjacency,
    pub report: AdmmReport,
    /// Set when the cost vector is identically zero (e.g. constant signals):
    /// the solver still returns a feasible point, but the objective carries
    /// no information.
    pub degenerate_objective: bool,
}

/// Learns an arbitrary graph from vectorized signals:
/// score matrix -> cost vector -> constraints -> ADMM -> postprocess.
pub fn glp_learn(signals: &SignalSet, cfg: &GlpConfig) -> Result<GlpOutcome> {
    if cfg.alpha <= 0.0 {
        return Err(Error::InvalidConfig("alpha must be positive".into()));
    }
    let n = signals.signal_len();
    let score = score_matrix(signals)?;
    let c = cost_vector(&score, cfg.alpha);
    let cs = ConstraintSystem::new(n)?;
    let degenerate = c.iter().all(|&v| v == 0.0);
    let (w_hat, report) = admm_solve(&c, &cs, cfg)?;
    Ok(GlpOutcome {
        adjacency: postprocess(&w_hat, n)?,
        report,
        degenerate_objective: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::packed_len;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_signals(n: usize, m0: usize, seed: u64) -> SignalSet {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..n * m0).map(|_| rng.random::<f64>() - 0.5).collect();
        SignalSet::new(vec![n], data).unwrap()
    }

    fn random_adjacency(n: usize, seed: u64) -> WeightedAdjacency {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for j in 0..n {
            for i in 0..j {
                if rng.random::<f64>() < 0.6 {
                    edges.push((i, j, rng.random::<f64>()));
                }
            }
        }
        WeightedAdjacency::from_edges(n, &edges).unwrap()
    }

    #[test]
    fn score_matrix_hand_cases() {
        let constant = SignalSet::new(vec![2], vec![1.0, 1.0]).unwrap();
        let s = score_matrix(&constant).unwrap();
        assert!(s.matrix().amax() == 0.0);

        let pm = SignalSet::new(vec![2], vec![1.0, -1.0]).unwrap();
        let s = score_matrix(&pm).unwrap();
        let expect = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0]);
        assert_eq!(s.matrix(), &expect);
    }

    #[test]
    fn score_trace_equals_mean_dirichlet_energy() {
        let n = 8;
        let signals = random_signals(n, 25, 4);
        let s = score_matrix(&signals).unwrap();
        let w = random_adjacency(n, 5);
        let lhs = s.trace_against(&w);
        let l = w.laplacian();
        let rhs: f64 = signals
            .signals()
            .map(|x| {
                let xv = DVector::from_column_slice(x);
                (l.matrix() * &xv).dot(&xv)
            })
            .sum::<f64>()
            / signals.len() as f64;
        assert_relative_eq!(lhs, rhs, max_relative = 1e-10);
    }

    #[test]
    fn cost_vector_cases() {
        let zero = ScoreMatrix::new(DMatrix::zeros(3, 3)).unwrap();
        assert!(cost_vector(&zero, 2.0).iter().all(|&v| v == 0.0));

        let s = ScoreMatrix::new(DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 2.0, 0.0])).unwrap();
        assert_eq!(cost_vector(&s, 1.0), vec![0.0, 4.0, 0.0]);

        // c^T pack(W) = alpha tr(W S̃)
        let n = 6;
        let signals = random_signals(n, 12, 9);
        let score = score_matrix(&signals).unwrap();
        let alpha = 0.37;
        let c = cost_vector(&score, alpha);
        let w = random_adjacency(n, 10);
        let dot: f64 = c.iter().zip(w.packed()).map(|(a, b)| a * b).sum();
        assert_relative_eq!(dot, alpha * score.trace_against(&w), max_relative = 1e-12);
    }

    #[test]
    fn constraint_system_n2_matches_hand_form() {
        let cs = ConstraintSystem::new(2).unwrap();
        let a = cs.dense_a();
        let expect = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(a, expect);
        assert_eq!(cs.b(), &[2.0, 0.0, 0.0]);
        assert_eq!(cs.offdiag_slots().collect::<Vec<_>>(), vec![1]);

        let aat = &a * a.transpose();
        let expect_aat =
            DMatrix::from_row_slice(3, 3, &[6.0, 1.0, 1.0, 1.0, 1.0, 0.0, 1.0, 0.0, 1.0]);
        assert_eq!(aat, expect_aat);
    }

    #[test]
    fn aat_closed_form_and_feasible_point() {
        for n in 2..=12 {
            let cs = ConstraintSystem::new(n).unwrap();
            let a = cs.dense_a();
            let aat = &a * a.transpose();
            let c_n = (2 * n * n - n) as f64;
            for i in 0..=n {
                for j in 0..=n {
                    let expect = match (i, j) {
                        (0, 0) => c_n,
                        (0, _) | (_, 0) => 1.0,
                        _ if i == j => 1.0,
                        _ => 0.0,
                    };
                    assert_eq!(aat[(i, j)], expect, "n={n} ({i},{j})");
                }
            }
            let w = cs.feasible_uniform();
            let (eq, neg) = cs.feasibility(&w);
            assert!(eq < 1e-12 && neg == 0.0);
        }
    }

    #[test]
    fn implicit_operators_match_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for n in [2usize, 3, 7] {
            let cs = ConstraintSystem::new(n).unwrap();
            let a = cs.dense_a();
            let p = cs.packed_dim();

            let w: Vec<f64> = (0..p).map(|_| rng.random::<f64>() - 0.5).collect();
            let mut aw = vec![0.0; cs.rows()];
            cs.apply_a(&w, &mut aw);
            let dense_aw = &a * DVector::from_column_slice(&w);
            for (x, y) in aw.iter().zip(dense_aw.iter()) {
                assert_relative_eq!(x, y, epsilon = 1e-14);
            }

            let v: Vec<f64> = (0..cs.rows()).map(|_| rng.random::<f64>() - 0.5).collect();
            let mut atv = vec![0.0; p];
            cs.apply_at(&v, &mut atv);
            let dense_atv = a.transpose() * DVector::from_column_slice(&v);
            for (x, y) in atv.iter().zip(dense_atv.iter()) {
                assert_relative_eq!(x, y, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn woodbury_solve_matches_dense_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in [2usize, 4, 9] {
            let cs = ConstraintSystem::new(n).unwrap();
            let a = cs.dense_a();
            let p = cs.packed_dim();
            let full = DMatrix::identity(p, p) + a.transpose() * &a;
            let lu = full.lu();
            for _ in 0..10 {
                let e: Vec<f64> = (0..p).map(|_| rng.random::<f64>() - 0.5).collect();
                let fast = cs.solve_i_plus_ata(&e);
                let direct = lu.solve(&DVector::from_column_slice(&e)).unwrap();
                for (x, y) in fast.iter().zip(direct.iter()) {
                    assert_relative_eq!(x, y, epsilon = 1e-12, max_relative = 1e-10);
                }
            }
        }
    }

    #[test]
    fn admm_n2_has_unique_feasible_point() {
        let cs = ConstraintSystem::new(2).unwrap();
        for seed in 0..3 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c: Vec<f64> = (0..3).map(|_| rng.random::<f64>() - 0.5).collect();
            let (w, rep) = admm_solve(&c, &cs, &GlpConfig::default()).unwrap();
            assert_eq!(rep.termination, Termination::Converged);
            let adj = postprocess(&w, 2).unwrap();
            assert_relative_eq!(adj.weight(0, 1), 1.0, epsilon = 1e-5);
        }
    }

    #[test]
    fn admm_concentrates_on_cheapest_slot() {
        // n = 3: the feasible set is a scaled simplex with total mass n/2;
        // the LP optimum is the vertex at the uniquely cheapest slot.
        let cs = ConstraintSystem::new(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..10 {
            let offdiag: Vec<usize> = cs.offdiag_slots().collect();
            let mut c = vec![0.0; cs.packed_dim()];
            loop {
                for &s in &offdiag {
                    c[s] = rng.random::<f64>();
                }
                let mut vals: Vec<f64> = offdiag.iter().map(|&s| c[s]).collect();
                vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
                if vals[1] - vals[0] > 0.1 {
                    break;
                }
            }
            let best = *offdiag
                .iter()
                .min_by(|&&a, &&b| c[a].partial_cmp(&c[b]).unwrap())
                .unwrap();
            let cfg = GlpConfig {
                max_iter: 100_000,
                eps_feas: 1e-10,
                eps_dual: 1e-10,
                ..GlpConfig::default()
            };
            let (w, _) = admm_solve(&c, &cs, &cfg).unwrap();
            assert!(w[best] >= 0.999 * 1.5, "mass {} on slot {best}", w[best]);
            let (eq, neg) = cs.feasibility(&w);
            assert!(eq <= 1e-6 && neg >= -1e-6);
        }
    }

    #[test]
    fn converged_runs_satisfy_the_feasibility_contract() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in [2usize, 3, 5, 8] {
            let cs = ConstraintSystem::new(n).unwrap();
            for _ in 0..5 {
                let c: Vec<f64> = (0..cs.packed_dim())
                    .map(|_| rng.random::<f64>() - 0.5)
                    .collect();
                let (w, rep) = admm_solve(&c, &cs, &GlpConfig::default()).unwrap();
                if rep.termination == Termination::Converged {
                    let (eq, neg) = cs.feasibility(&w);
                    let scale = (n as f64).max(1.0);
                    assert!(eq <= 1e-4 * scale, "n={n}: equality residual {eq:.2e}");
                    assert!(neg >= -1e-4, "n={n}: negative weight {neg:.2e}");
                }
            }
        }
    }

    #[test]
    fn non_finite_iterates_are_reported() {
        let cs = ConstraintSystem::new(4).unwrap();
        let mut c = vec![1.0; cs.packed_dim()];
        c[1] = f64::INFINITY;
        let cfg = GlpConfig {
            max_iter: 300,
            ..GlpConfig::default()
        };
        assert!(matches!(
            admm_solve(&c, &cs, &cfg),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn score_scales_quadratically_with_the_data() {
        let signals = random_signals(5, 9, 14);
        let beta = 3.0;
        let scaled =
            SignalSet::new(vec![5], signals.raw().iter().map(|v| beta * v).collect()).unwrap();
        let s1 = score_matrix(&signals).unwrap();
        let s2 = score_matrix(&scaled).unwrap();
        let diff = (s2.matrix() - s1.matrix() * beta * beta).amax();
        assert!(diff < 1e-12 * s2.matrix().amax());
    }

    #[test]
    fn admm_scale_invariant_argmin() {
        let cs = ConstraintSystem::new(3).unwrap();
        let mut c = vec![0.0; cs.packed_dim()];
        let offdiag: Vec<usize> = cs.offdiag_slots().collect();
        for (idx, &s) in offdiag.iter().enumerate() {
            c[s] = 1.0 + idx as f64 * 0.5;
        }
        let cheapest = offdiag[0];
        for beta in [0.25, 1.0, 16.0] {
            let scaled: Vec<f64> = c.iter().map(|v| v * beta * beta).collect();
            let cfg = GlpConfig {
                max_iter: 60_000,
                eps_feas: 1e-10,
                eps_dual: 1e-10,
                ..GlpConfig::default()
            };
            let (w, _) = admm_solve(&scaled, &cs, &cfg).unwrap();
            let best = offdiag
                .iter()
                .copied()
                .max_by(|&a, &b| w[a].partial_cmp(&w[b]).unwrap())
                .unwrap();
            assert_eq!(best, cheapest, "beta = {beta}");
        }
    }

    #[test]
    fn two_node_gmrf_learns_the_path() {
        // the constraint set pins n = 2 down to a single feasible point
        let l = WeightedAdjacency::path(2).laplacian();
        let signals = crate::synth::sample_gmrf(&l, 50, 3, 0.0).unwrap();
        let out = glp_learn(&signals, &GlpConfig::auto(2, 50)).unwrap();
        assert_relative_eq!(out.adjacency.weight(0, 1), 1.0, epsilon = 1e-5);
    }

    #[test]
    fn degenerate_objective_is_flagged() {
        let constant = SignalSet::new(vec![3], vec![2.0, 2.0, 2.0, 2.0, 2.0, 2.0]).unwrap();
        let out = glp_learn(&constant, &GlpConfig::default()).unwrap();
        assert!(out.degenerate_objective);
        let cs = ConstraintSystem::new(3).unwrap();
        let mut packed = vec![0.0; packed_len(3)];
        packed.copy_from_slice(out.adjacency.packed());
        let (eq, neg) = cs.feasibility(&packed);
        assert!(eq < 1e-4 && neg >= 0.0);
    }

    #[test]
    fn bad_inputs_are_rejected() {
        assert!(ConstraintSystem::new(1).is_err());
        let cs = ConstraintSystem::new(3).unwrap();
        assert!(admm_solve(&[0.0; 2], &cs, &GlpConfig::default()).is_err());
        let cfg = GlpConfig {
            rho: 0.0,
            ..GlpConfig::default()
        };
        assert!(admm_solve(&vec![0.0; cs.packed_dim()], &cs, &cfg).is_err());
    }
}
