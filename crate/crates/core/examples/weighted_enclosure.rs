//! Spectral enclosures `|λ| ≤ ‖q‖₁²` and the sharper radius from a weighted
//! norm, for the weights shipped with the crate.
//!
//! Run with `cargo run --release --example weighted_enclosure`.

use jostlt::potentials::{AnalyticPotential, Potential, WeightPair};
use jostlt::spectra::enclosure;
use jostlt::C64;

fn main() -> jostlt::Result<()> {
    let potentials: Vec<(&str, Potential)> = vec![
        ("barrier(1, 3)", Potential::barrier(1.0, 3.0)),
        ("gaussian bump", AnalyticPotential::gaussian_bump(C64::new(-2.0, 1.0), 2.0, 0.5)?.into()),
        ("log decay α = 3", AnalyticPotential::log_decay(3.0)?.into()),
    ];
    let weights = [WeightPair::unit(), WeightPair::poly(0.5), WeightPair::log_power(2.0), WeightPair::compact_support(10.0)];
    for (name, q) in &potentials {
        println!("{name}: ‖q‖₁ = {:.6}", q.l1_norm()?);
        for w in &weights {
            let norm = match q.weighted_norm(w) {
                Ok(n) => n,
                Err(jostlt::Error::Divergent(msg)) => {
                    println!("  {:<22} ‖q‖_a = ∞ ({msg})", w.name());
                    continue;
                }
                Err(e) => return Err(e),
            };
            let e = enclosure(q, Some(w))?;
            println!(
                "  {:<22} ‖q‖_a = {:>10.6}  ‖q‖₁² = {:>10.6}  ρ⁻¹ = {:>10.6}  radius {:.6}",
                w.name(),
                norm,
                e.r_fls,
                e.rho_inv.unwrap_or(f64::NAN),
                e.r
            );
        }
    }
    Ok(())
}
