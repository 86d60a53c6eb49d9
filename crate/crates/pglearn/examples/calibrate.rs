//! Re-derives the frozen thresholds recorded in tests/data/calibration.json.
//!
//! Runs the three calibrated protocols on their fixed seed schedules and
//! prints the medians that the test suite asserts against. Deterministic:
//! repeated runs print identical numbers.
//!
//! Run with: cargo run --release --example calibrate

use pglearn::eval::{median, scaling_study, ScalingStudyConfig};
use pglearn::glp::{glp_learn, GlpConfig};
use pglearn::pgl::PglConfig;
use pglearn::predict::{holdout_rmse, rmse_db_reduction, scm, CovarianceSurrogate, SlabSpec};
use pglearn::product::product_adjacency;
use pglearn::synth::{generate, product_ground_truth, sample_gmrf, GeneratorSpec};
use pglearn::{bpgl_learn, recovery_metrics, ProductKind};

fn main() -> pglearn::Result<()> {
    println!("# product_recovery: dims (4,4), M0 = 2000 noiseless, auto parameters, 20 seeds");
    for kind in ProductKind::ALL {
        let cfg = ScalingStudyConfig::new(kind, vec![4, 4], vec![2000], 20);
        let study = scaling_study(&cfg)?;
        println!(
            "  {kind}: median per-factor F = {:.6}",
            study.summary[0].median_f_measure
        );
    }

    println!("# glp_recovery: ER(16, 0.3), M0 = 10000 noiseless, auto parameters, 20 seeds");
    let m0 = 10_000;
    let mut fs = Vec::new();
    for seed in 0..20u64 {
        let truth = (0..64)
            .find_map(|salt| {
                generate(&GeneratorSpec::erdos_renyi(
                    16,
                    0.3,
                    seed + salt * 1_000_003,
                ))
                .ok()
            })
            .expect("nonempty graph")
            .trace_normalized(16.0)?;
        let signals = sample_gmrf(&truth.laplacian(), m0, seed, 0.0)?;
        let out = glp_learn(&signals, &GlpConfig::auto(16, m0))?;
        fs.push(recovery_metrics(&out.adjacency, &truth, None)?.f_measure);
    }
    println!("  median F = {:.6}", median(&mut fs));

    println!("# lmmse_gain: strong (4,4), 12 training samples, slab mode 1 index 3, 10 seeds");
    let dims = vec![4usize, 4];
    let mut dbs = Vec::new();
    for seed in 0..10u64 {
        let specs: Vec<GeneratorSpec> = dims
            .iter()
            .map(|&d| GeneratorSpec::erdos_renyi(d, 0.5, 0))
            .collect();
        let (truth, train) = (0..64)
            .find_map(|salt| {
                product_ground_truth(
                    ProductKind::Strong,
                    &specs,
                    12,
                    (7000 + seed).wrapping_add(salt * 1_000_003),
                    0.0,
                )
                .ok()
            })
            .expect("ground truth");
        let test = sample_gmrf(
            &product_adjacency(&truth, None)?.laplacian(),
            200,
            9000 + seed,
            0.0,
        )?
        .reshaped(dims.clone())?;
        let est = bpgl_learn(&train, &PglConfig::auto(ProductKind::Strong, &dims, 12))?;
        let learned = product_adjacency(&est.factor_set(), None)?;
        let slab = SlabSpec { mode: 1, index: 3 };
        let r_graph = holdout_rmse(
            &test,
            slab,
            &CovarianceSurrogate::from_graph(&learned),
            None,
        )?;
        let r_scm = holdout_rmse(&test, slab, &scm(&train)?, None)?;
        dbs.push(rmse_db_reduction(r_graph, r_scm)?);
    }
    println!("  median dB reduction over SCM = {:+.4}", median(&mut dbs));
    Ok(())
}
