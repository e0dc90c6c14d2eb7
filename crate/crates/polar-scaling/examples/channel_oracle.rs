//! Exercises the exact BSC-mixture channel algebra and checks the scalar
//! closed forms against it: the algebra is the brute-force oracle behind
//! every inequality the pipeline relies on.
//!
//! Run with: cargo run --release --example channel_oracle

use polar_scaling::channel::{bhattacharyya, make_bec, make_bsc, parallel, serial};
use polar_scaling::scalar::{f_serial, g_tri_bsc};

fn main() -> polar_scaling::Result<()> {
    let bsc = make_bsc(0.1)?;
    println!("BSC(0.1):  Z = {:.6}", bhattacharyya(&bsc));

    let bec = make_bec(0.75)?;
    println!("BEC(0.75): Z = {:.6}, atoms = {:?}", bhattacharyya(&bec), bec.atoms());

    let (a, b, c) = (make_bsc(0.1)?, make_bsc(0.2)?, make_bsc(0.3)?);

    let s = serial(&a, &b);
    println!(
        "\nserial(BSC(0.1), BSC(0.2)):   Z = {:.12}   f-form = {:.12}",
        bhattacharyya(&s),
        f_serial(bhattacharyya(&a), bhattacharyya(&b))
    );

    let p = parallel(&a, &b);
    println!(
        "parallel(BSC(0.1), BSC(0.2)): Z = {:.12}   product = {:.12}",
        bhattacharyya(&p),
        bhattacharyya(&a) * bhattacharyya(&b)
    );

    let w = serial(&p, &c);
    println!(
        "serial(parallel(a,b), c):     Z = {:.12}   g-form  = {:.12}",
        bhattacharyya(&w),
        g_tri_bsc(0.1, 0.2, 0.3)
    );
    println!("\natoms of serial(parallel(a,b), c): {}", w.atoms().len());
    Ok(())
}
