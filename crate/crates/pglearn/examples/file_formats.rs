//! The on-disk formats: adjacency CSV, weighted edge-list TSV, and the
//! PGTN binary tensor container used for signal sets.
//!
//! Run with: cargo run --release --example file_formats

use pglearn::io;
use pglearn::synth::{generate, sample_gmrf, GeneratorSpec};

fn main() -> pglearn::Result<()> {
    let dir = std::env::temp_dir().join("pglearn_file_formats");
    std::fs::create_dir_all(&dir).expect("temp dir");

    let w = generate(&GeneratorSpec::erdos_renyi(5, 0.6, 2))?;

    let csv_path = dir.join("graph.csv");
    io::write_adjacency_csv(&csv_path, &w)?;
    println!("adjacency CSV ({}):", csv_path.display());
    print!("{}", std::fs::read_to_string(&csv_path).expect("written"));

    let tsv_path = dir.join("graph.tsv");
    io::write_edge_list_tsv(&tsv_path, &w)?;
    println!("\nedge list TSV (1-based, i < j):");
    print!("{}", std::fs::read_to_string(&tsv_path).expect("written"));

    let back = io::read_edge_list_tsv(&tsv_path, Some(5))?;
    println!(
        "\nround trip through the edge list preserves the graph: {}",
        back == w
    );

    // signal sets: order-(K+1) PGTN tensor, observations in the last mode
    let signals = sample_gmrf(&w.trace_normalized(5.0)?.laplacian(), 32, 1, 0.0)?;
    let pgtn_path = dir.join("signals.pgtn");
    io::write_signal_set(&pgtn_path, &signals)?;
    let loaded = io::read_signal_set(&pgtn_path)?;
    println!(
        "PGTN: {} observations of length {} ({} bytes on disk)",
        loaded.len(),
        loaded.signal_len(),
        std::fs::metadata(&pgtn_path).expect("written").len()
    );
    println!("digest: sha256 {}", io::sha256_hex(&pgtn_path)?);
    Ok(())
}
