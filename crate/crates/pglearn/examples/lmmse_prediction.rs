//! Missing-value prediction with a learned graph as covariance surrogate.
//!
//! Trains on few samples (fewer than nodes), learns a strong product graph,
//! and predicts a withheld slab of each test tensor with the LMMSE
//! estimator using W + I in place of the data covariance. The sample
//! covariance matrix is the baseline.
//!
//! Run with: cargo run --release --example lmmse_prediction

use pglearn::pgl::PglConfig;
use pglearn::predict::{holdout_rmse, rmse_db_reduction, scm, CovarianceSurrogate, SlabSpec};
use pglearn::product::product_adjacency;
use pglearn::synth::{product_ground_truth, sample_gmrf, GeneratorSpec};
use pglearn::{bpgl_learn, ProductKind};

fn main() -> pglearn::Result<()> {
    let dims = vec![4usize, 4];
    let m0_train = 12; // fewer training samples than the 16 product nodes
    let specs: Vec<GeneratorSpec> = dims
        .iter()
        .map(|&d| GeneratorSpec::erdos_renyi(d, 0.5, 0))
        .collect();
    let (truth, train) = product_ground_truth(ProductKind::Strong, &specs, m0_train, 7001, 0.0)?;
    let test = sample_gmrf(
        &product_adjacency(&truth, None)?.laplacian(),
        200,
        9001,
        0.0,
    )?
    .reshaped(dims.clone())?;

    // withhold the last index of the second mode from every test sample
    let slab = SlabSpec { mode: 1, index: 3 };

    let est = bpgl_learn(
        &train,
        &PglConfig::auto(ProductKind::Strong, &dims, m0_train),
    )?;
    let learned = product_adjacency(&est.factor_set(), None)?;
    let graph_surrogate = CovarianceSurrogate::from_graph(&learned);
    let scm_surrogate = scm(&train)?;

    let rmse_graph = holdout_rmse(&test, slab, &graph_surrogate, None)?;
    let rmse_scm = holdout_rmse(&test, slab, &scm_surrogate, None)?;
    println!("RMSE with learned graph (W + I): {rmse_graph:.4}");
    println!("RMSE with sample covariance:     {rmse_scm:.4}");
    println!(
        "reduction over SCM: {:+.3} dB",
        rmse_db_reduction(rmse_graph, rmse_scm)?
    );

    // with the exact covariance of the generating model for reference
    let sigma = product_adjacency(&truth, None)?
        .laplacian()
        .pseudoinverse(1e-9);
    let oracle =
        CovarianceSurrogate::from_matrix(sigma, pglearn::predict::SurrogateKind::Explicit)?;
    let rmse_oracle = holdout_rmse(&test, slab, &oracle, None)?;
    println!("RMSE with the true covariance:   {rmse_oracle:.4}");
    Ok(())
}
