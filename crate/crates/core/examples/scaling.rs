//! Dilation covariance of the barrier family and the count of eigenvalues
//! in the annulus where the guaranteed ones live.
//!
//! Run with `cargo run --release --example scaling`.

use jostlt::barrier::{box_count, calibrate_c1, enumerate_until_exit, scaling_check, BarrierSpec};
use jostlt::sums::{eval_sum, points_from_enumeration, SumSpec};

fn main() -> jostlt::Result<()> {
    let a = BarrierSpec::new(1.0, 2400.0)?;
    let b = a.dilated(2.0);
    println!("(γ, R) = ({}, {}) dilated by 2: ({}, {})", a.gamma, a.r, b.gamma, b.r);
    let (ea, eb) = (enumerate_until_exit(&a, 1e-13), enumerate_until_exit(&b, 1e-13));
    let rep = scaling_check(&ea, &eb, 2.0);
    println!("{} pairs, counts match {}, max relative difference {:.2e}", rep.pairs, rep.count_match, rep.max_rel_diff);
    let (pa, pb) = (points_from_enumeration(&ea, false), points_from_enumeration(&eb, false));
    for eps in [0.0, 0.5, 0.9] {
        let sa = eval_sum(&pa, SumSpec::SEps { eps }, false)?.value;
        let sb = eval_sum(&pb, SumSpec::SEps { eps }, false)?.value;
        println!("  ε = {eps}: S_ε ratio {:.12} vs 2^(1+ε) = {:.12}", sb / sa, 2f64.powf(1.0 + eps));
    }
    let bc = box_count(&ea, calibrate_c1(&ea));
    println!(
        "{} eigenvalues with {:.3} ≤ |λ| ≤ {:.3e}; bound γR²/(128π log R) = {:.2}: {}",
        bc.count, bc.lo, bc.hi, bc.bound, bc.meets_bound
    );
    Ok(())
}
