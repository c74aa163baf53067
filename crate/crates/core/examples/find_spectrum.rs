//! Complex eigenvalues of a step potential by argument-principle search,
//! with the spectral enclosure and any unresolved near-real region.
//!
//! Run with `cargo run --release --example find_spectrum`.

use jostlt::potentials::{Potential, StepPotential};
use jostlt::spectra::find_spectrum;
use jostlt::C64;

fn main() -> jostlt::Result<()> {
    // a complex well deep enough to bind several eigenvalues
    let q: Potential = StepPotential::new(
        vec![0.0, 1.0, 2.5, 3.0],
        vec![C64::new(-6.0, 1.0), C64::new(-3.0, -0.5), C64::new(2.0, 2.0)],
    )?
    .into();
    let rep = find_spectrum(&q, 1e-11)?;
    println!(
        "enclosure |λ| ≤ {:.4}, outer winding count {}, floor Im z ≥ {:.1e}",
        rep.enclosure.r, rep.outer_count, rep.floor
    );
    for e in &rep.eigenvalues {
        println!(
            "  λ = {:+.12} {:+.12}i   (z = {:.8}, multiplicity {}, |e₊| = {:.1e})",
            e.lambda.re, e.lambda.im, e.z, e.multiplicity, e.residual
        );
    }
    for u in &rep.unresolved {
        println!("  unresolved {:?}: {} (count {:?})", u.rect, u.reason, u.count);
    }
    println!("resolved: {}", rep.is_resolved());
    Ok(())
}
