//! A half-line potential plus a far-shifted line barrier: the Jost function
//! approaches a product of the two factors, and its zeros converge to the
//! union of the factors' zeros.
//!
//! Run with `cargo run --release --example shift_limit`.

use jostlt::potentials::{AnalyticPotential, LinePotential, Potential};
use jostlt::spectra::{polar_grid, shift_limit_check, track_shift_roots, truncation_limit_check, Rect, SearchOptions};
use jostlt::C64;

fn main() -> jostlt::Result<()> {
    let q = Potential::barrier(1.0, 1.0);
    let line = LinePotential::symmetric_barrier(1.0, 1.0);
    let xs = [10.0, 20.0, 40.0, 80.0];
    let grid: Vec<C64> = (0..8)
        .flat_map(|a| (0..8).map(move |b| C64::new(-3.0 + 6.0 * a as f64 / 7.0, 0.5 + 2.5 * b as f64 / 7.0)))
        .collect();

    println!("shift deviation |e₊(0;q_X) − A·e₊(0;q)|:");
    for r in shift_limit_check(&q, &line, &xs, &grid)? {
        println!("  X = {:>4}: {:.3e}", r.x, r.deviation);
    }

    let tail: Potential = AnalyticPotential::gaussian_bump(C64::new(0.05, 0.05), 0.0, 30.0)?.into();
    println!("truncation deviation |e₊(0;q·χ_[0,X]) − e₊(0;q)| and its bound:");
    for r in truncation_limit_check(&tail, &xs, &polar_grid(6, 0.5, 3.0, 0.3, 2.8))? {
        println!("  X = {:>4}: {:.3e} ≤ {:.3e}", r.x, r.deviation, r.bound);
    }

    let rep = track_shift_roots(&q, &line, &xs, Rect::new(0.05, 2.5, 0.2, 2.0), &SearchOptions { tol: 1e-13, ..Default::default() })?;
    println!("factor roots: {:?}", rep.factor_roots);
    for r in &rep.rows {
        println!("  X = {:>4}: counts match {}, tracking error {:.3e}", r.x, r.count_matches, r.error);
    }
    Ok(())
}
