//! `e₊(0, z)` by transfer matrices, the Volterra series and an ODE
//! integrator, side by side with their error estimates.
//!
//! Run with `cargo run --release --example jost_methods`.

use jostlt::jost::{jost_ode, jost_series, jost_transfer_matrix, OdeOptions};
use jostlt::potentials::{AnalyticPotential, Potential, StepPotential};
use jostlt::C64;

fn main() -> jostlt::Result<()> {
    let step: Potential = StepPotential::new(
        vec![0.0, 0.7, 1.5, 2.6, 4.0],
        vec![C64::new(0.8, 0.3), C64::new(-0.5, 0.6), C64::new(0.2, -0.4), C64::new(0.4, 0.9)],
    )?
    .into();
    let bump: Potential = AnalyticPotential::gaussian_bump(C64::new(1.0, 0.5), 2.0, 0.5)?.into();

    for (name, q) in [("4-step", &step), ("gaussian bump", &bump)] {
        let l1 = q.l1_norm()?;
        println!("{name}: ‖q‖₁ = {l1:.6}");
        for z in [C64::new(0.3, 0.2), C64::new(2.0, 1.0), C64::new(-5.0, 0.5)] {
            let evals = [
                jost_transfer_matrix(q, z)?,
                jost_series(q, z, 1e-12)?,
                jost_ode(q, z, OdeOptions::default())?,
            ];
            println!("  z = {z}, a-priori |e₊ − 1| ≤ {:.4e}", (l1 / z.norm()).exp_m1());
            for e in &evals {
                println!(
                    "    {:<16} {:+.14e} {:+.14e}i  err {:.1e}  work {}",
                    format!("{:?}", e.method),
                    e.value().re,
                    e.value().im,
                    e.error_estimate(),
                    e.work
                );
            }
        }
    }
    Ok(())
}
