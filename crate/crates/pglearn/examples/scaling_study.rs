//! Sample-complexity behavior: per-factor error against the observation
//! count, with the optional unstructured baseline.
//!
//! Run with: cargo run --release --example scaling_study

use pglearn::eval::{scaling_study, ScalingStudyConfig};
use pglearn::ProductKind;

fn main() -> pglearn::Result<()> {
    for kind in ProductKind::ALL {
        let mut cfg = ScalingStudyConfig::new(kind, vec![4, 4], vec![10, 100, 1000], 10);
        cfg.include_baseline = true;
        let study = scaling_study(&cfg)?;
        println!("{kind} on dims {:?}:", study.dims);
        println!("      M0   med error   med F   extracted-from-unstructured (err / F)");
        for row in &study.summary {
            println!(
                "  {:>6}      {:.4}   {:.3}            {:.4} / {:.3}",
                row.m0,
                row.median_error,
                row.median_f_measure,
                row.median_baseline_error.unwrap(),
                row.median_baseline_f_measure.unwrap()
            );
        }
        if let Some(ok) = study.trend_ok {
            println!(
                "  error trend non-increasing: {ok} ({} adjacent inversion(s))\n",
                study.inversions
            );
        }
    }
    Ok(())
}
