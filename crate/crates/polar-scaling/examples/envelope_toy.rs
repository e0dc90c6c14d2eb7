//! Builds the discrete tri-convex envelope of g on a small mesh with both
//! convexifiers and shows that they agree, that the envelope only ever moves
//! values down, and what it does along the diagonal curve.
//!
//! Run with: cargo run --release --example envelope_toy

use polar_scaling::envelope::{
    convexity_residual, init_mesh, tc_converge, trilinear_eval, TcMethod,
};
use polar_scaling::scalar::{g_diag_closed, g_tri};

fn main() -> polar_scaling::Result<()> {
    let n = 20;
    let raw = init_mesh(n, g_tri)?;
    let (res, axis, at) = convexity_residual(&raw);
    println!("raw mesh: worst convexity violation {res:.3e} on axis {axis:?} at {at:?}");

    let graham = tc_converge(raw.clone(), 1e-13, TcMethod::GrahamAxes)?;
    let jacobi = tc_converge(raw.clone(), 1e-13, TcMethod::JacobiDescend)?;
    let disagree = graham
        .values()
        .iter()
        .zip(jacobi.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        ;
    println!("graham vs jacobi: max disagreement {disagree:.3e}");

    let lowered = raw
        .values()
        .iter()
        .zip(graham.values())
        .map(|(r, e)| r - e)
        .fold(0.0f64, f64::max);
    println!("largest lowering applied by the envelope: {lowered:.6}");

    println!("\n   x      diag envelope   closed form");
    for i in 0..=10 {
        let x = i as f64 / 10.0;
        let d = trilinear_eval(&graham, x.sqrt(), x.sqrt(), x)?;
        println!("  {x:.2}    {d:.6}        {:.6}", g_diag_closed(x));
    }
    Ok(())
}
