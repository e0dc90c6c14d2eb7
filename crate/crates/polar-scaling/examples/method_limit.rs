//! Computes the non-rigorous limit of the two-state method: the diagonal
//! fed to the iteration is the exact closed form x(1 + sqrt(5-4x))/2, i.e.
//! what an infinitely fine certified mesh would converge to.
//!
//! Run with: cargo run --release --example method_limit

use polar_scaling::pipeline::{cmd_mu, DiagMode, PipelineConfig};

fn main() -> polar_scaling::Result<()> {
    let cfg = PipelineConfig {
        ell: 100_000,
        diag: DiagMode::ClosedForm,
        ..PipelineConfig::default()
    };
    let out = cmd_mu(&cfg)?;
    let r = &out.report;
    println!(
        "method limit: mu <= {:.6}  (lambda_s = {:.9}, lambda_p = {:.9})",
        r.mu_upper,
        r.lambda_s.unwrap(),
        r.lambda_p.unwrap()
    );
    println!("(the certified mesh pipeline approaches this from above)");
    Ok(())
}
