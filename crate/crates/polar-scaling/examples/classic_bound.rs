//! Computes the classic single-function bound on the scaling exponent:
//! one score function, the serial/parallel sandwich, and nothing else.
//!
//! Run with: cargo run --release --example classic_bound

use polar_scaling::pipeline::{cmd_classic, PipelineConfig};

fn main() -> polar_scaling::Result<()> {
    let cfg = PipelineConfig {
        ell: 2000,
        ..PipelineConfig::default()
    };
    let out = cmd_classic(&cfg)?;
    let r = &out.report;
    println!(
        "classic bound: mu <= {:.6}  (lambda = {:.9}, {} iterations, delta = {:.2e})",
        r.mu_upper, r.lambda, r.iterations, r.final_delta
    );
    println!("grid: {} Chebyshev nodes", r.ell + 1);
    Ok(())
}
