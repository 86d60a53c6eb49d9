//! Synthetic graph generators and GMRF signal sampling.
//!
//! Signals are drawn from the degenerate Gaussian with the graph Laplacian
//! as (pseudo-)precision: x = U_+ Λ_+^{-1/2} z over the strictly positive
//! eigenpairs, so samples are orthogonal to the Laplacian null space (one
//! dimension per connected component). Everything is deterministic given a
//! seed.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{FactorGraphSet, Laplacian, ProductKind, WeightedAdjacency};
use crate::product::product_adjacency;
use crate::tensor::SignalSet;

/// Eigenvalues below `rel_tol * lambda_max` count as null space.
const NULL_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "law")]
pub enum WeightLaw {
    Unit,
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// |N(mean, sd)|, the stand-in for "Gaussian weights".
    GaussianAbs {
        mean: f64,
        sd: f64,
    },
}

impl Default for WeightLaw {
    fn default() -> Self {
        WeightLaw::Uniform { lo: 0.5, hi: 1.5 }
    }
}

impl WeightLaw {
    fn draw(&self, rng: &mut impl Rng) -> f64 {
        match *self {
            WeightLaw::Unit => 1.0,
            WeightLaw::Uniform { lo, hi } => lo + (hi - lo) * rng.random::<f64>(),
            WeightLaw::GaussianAbs { mean, sd } => {
                let normal = Normal::new(mean, sd).expect("valid normal parameters");
                normal.sample(rng).abs()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "family")]
pub enum GraphFamily {
    /// Each edge present independently with probability p.
    ErdosRenyi { p: f64 },
    /// Sparse support (edge probability p) with |N(1, 0.25)| weights.
    GaussianSparse { p: f64 },
    /// Scale-free growth attaching `edges_per_step` edges per new node.
    PreferentialAttachment { edges_per_step: usize },
    /// Every node has the given degree.
    RandomRegular { degree: usize },
    /// rows x cols lattice with 4-neighborhoods.
    Grid { rows: usize, cols: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub family: GraphFamily,
    pub n: usize,
    pub weights: WeightLaw,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn erdos_renyi(n: usize, p: f64, seed: u64) -> Self {
        Self {
            family: GraphFamily::ErdosRenyi { p },
            n,
            weights: WeightLaw::default(),
            seed,
        }
    }

    pub fn with_weights(mut self, weights: WeightLaw) -> Self {
        self.weights = weights;
        self
    }
}

pub(crate) fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(salt);
    rng
}

/// Generates a valid weighted adjacency, deterministic in the spec's seed.
pub fn generate(spec: &GeneratorSpec) -> Result<WeightedAdjacency> {
    let n = spec.n;
    if n < 2 {
        return Err(Error::InfeasibleSpec(format!("need n >= 2, got {n}")));
    }
    let mut rng = rng_for(spec.seed, 0);
    let support: Vec<(usize, usize)> = match spec.family {
        GraphFamily::ErdosRenyi { p } | GraphFamily::GaussianSparse { p } => {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InfeasibleSpec(format!("edge probability {p}")));
            }
            let mut edges = Vec::new();
            for j in 0..n {
                for i in 0..j {
                    if rng.random::<f64>() < p {
                        edges.push((i, j));
                    }
                }
            }
            edges
        }
        GraphFamily::PreferentialAttachment { edges_per_step } => {
            preferential_attachment(n, edges_per_step, &mut rng)?
        }
        GraphFamily::RandomRegular { degree } => random_regular(n, degree, &mut rng)?,
        GraphFamily::Grid { rows, cols } => {
            if rows * cols != n {
                return Err(Error::InfeasibleSpec(format!(
                    "grid {rows}x{cols} does not match n = {n}"
                )));
            }
            let at = |r: usize, c: usize| r * cols + c;
            let mut edges = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    if c + 1 < cols {
                        edges.push((at(r, c), at(r, c + 1)));
                    }
                    if r + 1 < rows {
                        edges.push((at(r, c), at(r + 1, c)));
                    }
                }
            }
            edges
        }
    };
    if support.is_empty() {
        return Err(Error::DegenerateGraph(
            "generated graph has no edges".into(),
        ));
    }
    let law = match spec.family {
        GraphFamily::GaussianSparse { .. } => WeightLaw::GaussianAbs {
            mean: 1.0,
            sd: 0.25,
        },
        _ => spec.weights,
    };
    let weighted: Vec<(usize, usize, f64)> = support
        .into_iter()
        .map(|(i, j)| {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            (a, b, law.draw(&mut rng))
        })
        .collect();
    WeightedAdjacency::from_edges(n, &weighted)
}

fn preferential_attachment(n: usize, m: usize, rng: &mut impl Rng) -> Result<Vec<(usize, usize)>> {
    if m == 0 || m >= n {
        return Err(Error::InfeasibleSpec(format!(
            "preferential attachment needs 0 < edges_per_step < n, got {m} with n = {n}"
        )));
    }
    // seed clique of m + 1 nodes, then attach by degree
    let mut edges = Vec::new();
    let mut stubs = Vec::new();
    for j in 0..=m {
        for i in 0..j {
            edges.push((i, j));
            stubs.push(i);
            stubs.push(j);
        }
    }
    for v in (m + 1)..n {
        let mut targets = std::collections::BTreeSet::new();
        while targets.len() < m {
            let t = stubs[rng.random_range(0..stubs.len())];
            targets.insert(t);
        }
        for &t in &targets {
            edges.push((t, v));
            stubs.push(t);
            stubs.push(v);
        }
    }
    Ok(edges)
}

fn random_regular(n: usize, d: usize, rng: &mut impl Rng) -> Result<Vec<(usize, usize)>> {
    if d == 0 || d >= n || !(n * d).is_multiple_of(2) {
        return Err(Error::InfeasibleSpec(format!(
            "random regular graph with n = {n}, degree = {d} is infeasible"
        )));
    }
    // pairing model with rejection on self loops and multi-edges
    'attempt: for _ in 0..2000 {
        let mut stubs: Vec<usize> = (0..n).flat_map(|v| std::iter::repeat_n(v, d)).collect();
        // Fisher-Yates
        for i in (1..stubs.len()).rev() {
            let j = rng.random_range(0..=i);
            stubs.swap(i, j);
        }
        let mut seen = std::collections::BTreeSet::new();
        let mut edges = Vec::with_capacity(n * d / 2);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
            if a == b || !seen.insert((a, b)) {
                continue 'attempt;
            }
            edges.push((a, b));
        }
        return Ok(edges);
    }
    Err(Error::InfeasibleSpec(format!(
        "could not realize a simple {d}-regular graph on {n} nodes"
    )))
}

/// Draws M0 signals x ~ N(0, L†) plus isotropic noise of the given standard
/// deviation. The null space of L is excluded, so noiseless samples have no
/// component along it.
pub fn sample_gmrf(l: &Laplacian, m0: usize, seed: u64, noise_sd: f64) -> Result<SignalSet> {
    if m0 == 0 {
        return Err(Error::EmptySignalSet);
    }
    let n = l.node_count();
    let eig = l.eigen();
    let lmax = eig.eigenvalues.amax();
    if lmax <= 0.0 {
        return Err(Error::DegenerateGraph(
            "Laplacian has no positive eigenvalues".into(),
        ));
    }
    let mut columns = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam < -1e-8 * lmax {
            return Err(Error::DegenerateGraph(format!(
                "Laplacian has negative eigenvalue {lam}"
            )));
        }
        if lam > NULL_REL_TOL * lmax {
            columns.push(eig.eigenvectors.column(k) / lam.sqrt());
        }
    }
    let rank = columns.len();
    let basis = DMatrix::from_columns(&columns);

    let mut rng = rng_for(seed, 1);
    let mut data = vec![0.0; m0 * n];
    let mut z = nalgebra::DVector::<f64>::zeros(rank);
    for m in 0..m0 {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(&mut rng);
        }
        let x = &basis * &z;
        let out = &mut data[m * n..(m + 1) * n];
        for (o, xi) in out.iter_mut().zip(x.iter()) {
            *o = *xi;
            if noise_sd > 0.0 {
                let e: f64 = StandardNormal.sample(&mut rng);
                *o += noise_sd * e;
            }
        }
    }
    SignalSet::new(vec![n], data)
}

/// Generates factor graphs, forms their product, and samples GMRF signals
/// from the product Laplacian. Each factor is trace-normalized to its node
/// count before the product is formed, matching the per-factor constraint
/// the learner enforces.
pub fn product_ground_truth(
    kind: ProductKind,
    factor_specs: &[GeneratorSpec],
    m0: usize,
    seed: u64,
    noise_sd: f64,
) -> Result<(FactorGraphSet, SignalSet)> {
    let mut factors = Vec::with_capacity(factor_specs.len());
    for (k, spec) in factor_specs.iter().enumerate() {
        let mut s = spec.clone();
        // one stream per factor off the run seed
        s.seed = seed.wrapping_add(k as u64).wrapping_mul(0x9e3779b97f4a7c15);
        factors.push(generate(&s)?.trace_normalized(s.n as f64)?);
    }
    let set = FactorGraphSet::new(kind, factors)?;
    let dense = product_adjacency(&set, None)?;
    let signals = sample_gmrf(&dense.laplacian(), m0, seed, noise_sd)?;
    let dims = set.dims();
    let signals = signals.reshaped(dims)?;
    Ok((set, signals))
}
