//! Lieb–Thirring sums `S_ε`, the Jensen sum and `S_{α,β}` of one spectrum,
//! and the elementary comparisons between them.
//!
//! Run with `cargo run --release --example eigenvalue_sums`.

use jostlt::potentials::{Potential, StepPotential};
use jostlt::spectra::find_spectrum;
use jostlt::sums::{eval_sum, points_from_report, sandwich_checks, SumSpec};
use jostlt::C64;

fn main() -> jostlt::Result<()> {
    let q: Potential = StepPotential::new(vec![0.0, 1.0, 2.0], vec![C64::new(-5.0, 1.5), C64::new(-2.0, 0.5)])?.into();
    let l1 = q.l1_norm()?;
    let rep = find_spectrum(&q, 1e-11)?;
    let pts = points_from_report(&rep);
    println!("{} eigenvalues, ‖q‖₁ = {l1}", pts.len());

    let specs = [
        SumSpec::Jensen,
        SumSpec::SEps { eps: 0.0 },
        SumSpec::SEps { eps: 0.5 },
        SumSpec::SAlphaBeta { alpha: 1.0, beta: 1.0 },
        SumSpec::SAlphaBeta { alpha: 0.75, beta: 2.0 },
    ];
    for spec in specs {
        let s = eval_sum(&pts, spec, !rep.is_resolved())?;
        println!("  {:<44} = {:.10}", format!("{spec:?}"), s.value);
    }

    let sw = sandwich_checks(&pts, l1, &[(0.0, 0.5), (0.2, 0.9)])?;
    println!("J ≤ S₀ ≤ 2J: {} ≤ {} ≤ {}", sw.jensen, sw.s0, 2.0 * sw.jensen);
    println!("termwise violations {}, enclosure holds {}", sw.termwise_violations, sw.enclosure_holds);
    for c in &sw.eps_pairs {
        println!("  S_{} = {:.6} ≤ ‖q‖₁^(ε₂−ε₁)·S_{} = {:.6}: {}", c.eps2, c.lhs, c.eps1, c.rhs, c.holds);
    }
    Ok(())
}
