//! Learning graphs and product graphs from smooth signals.
//!
//! The library learns a graph adjacency matrix from signals that vary
//! smoothly over it, by minimizing the Dirichlet energy as a linear program
//! over valid weighted adjacencies (solved with a specialized ADMM). For
//! large graphs with Kronecker, Cartesian, or strong product structure it
//! instead learns the small factor graphs by block coordinate descent, each
//! factor update being one LP of the same family.
//!
//! Start with [`glp::glp_learn`] for arbitrary graphs and
//! [`pgl::bpgl_learn`] for product graphs, or run the `pglearn` binary. Each
//! major capability has a runnable example under `examples/`.
//!
//! ```
//! use pglearn::{glp_learn, sample_gmrf, GlpConfig, WeightedAdjacency};
//!
//! // signals that are smooth over a 2-node path pin the graph down exactly
//! let truth = WeightedAdjacency::path(2);
//! let signals = sample_gmrf(&truth.laplacian(), 100, 7, 0.0)?;
//! let learned = glp_learn(&signals, &GlpConfig::auto(2, 100))?;
//! assert!((learned.adjacency.weight(0, 1) - 1.0).abs() < 1e-4);
//! # Ok::<(), pglearn::Error>(())
//! ```

pub mod error;
pub mod eval;
pub mod glp;
pub mod graph;
pub mod io;
mod par;
pub mod pgl;
pub mod predict;
pub mod product;
pub mod synth;
pub mod tensor;

pub mod cli;

pub use error::{Error, Result};
pub use eval::{recovery_metrics, RecoveryMetrics};
pub use glp::{glp_learn, GlpConfig, GlpOutcome};
pub use graph::{FactorGraphSet, Laplacian, ProductKind, WeightedAdjacency};
pub use pgl::{bpgl_learn, bpgl_learn_parallel_cartesian, FactorEstimates, PglConfig};
pub use predict::{holdout_rmse, lmmse_predict, scm, CovarianceSurrogate, SlabSpec};
pub use synth::{generate, product_ground_truth, sample_gmrf, GeneratorSpec};
pub use tensor::{DenseTensor, SignalSet};
