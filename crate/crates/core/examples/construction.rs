//! The staged construction: disjoint far-shifted barriers whose eigenvalues
//! survive each new stage, and the divergent series of certified Jensen
//! contributions.
//!
//! Run with `cargo run --release --example construction`.

use jostlt::construction::{build, jensen_growth_report, stage_parameters, Profile, ShiftOptions};

fn main() -> jostlt::Result<()> {
    let toy = build(Profile::Toy, 3, &ShiftOptions::default())?;
    println!("toy profile, supports disjoint: {}", toy.supports_disjoint());
    for s in &toy.stages {
        let worst = s.attempts.last().map_or(0.0, |a| a.worst_ratio);
        println!(
            "  stage {}: γ = {}, X = {}, certified {}, worst defect/tolerance {:.3}, J-partial {:.6}, half retention {}",
            s.n, s.gamma, s.x, s.certified, worst, s.jensen_partial, s.half_retention
        );
    }
    for t in toy.tracked() {
        println!("    from stage {}: λ = {:.8} → {:.8}", t.source_stage, t.original, t.current);
    }

    println!("full profile:");
    for n in 1..=4 {
        let p = stage_parameters(n)?;
        println!(
            "  n = {n}: γ = {:.6e}, R = {:.6e}, M_R = {}, contribution γR log R/(64π) = {:.4}",
            p.gamma, p.r, p.m_r, p.certified_contribution
        );
    }
    for row in jensen_growth_report(1_000_000)?.iter().filter(|r| [1, 10, 1000, 1_000_000].contains(&r.n)) {
        println!("  Σ_(n ≤ {:>7}) = {:>10.4}   ‖q‖₁ = {:.4}", row.n, row.partial_sum, row.l1_partial);
    }
    Ok(())
}
