//! Lower bounds for the barrier `iγ·χ_[0,R]`: `S₀`, the `p`-sums, the
//! two-sided Jensen bound and the `S_ε` bound at an admissible `(ε, γ, R)`.
//!
//! Run with `cargo run --release --example lower_bounds`.

use jostlt::barrier::{enumerate_spectrum, enumerate_until_exit, BarrierSpec};
use jostlt::bounds::{eps_triple_for_gamma, eps_triple_search, jensen_two_sided, lower_bounds_barrier};
use jostlt::sums::{eval_sum, points_from_enumeration, SumSpec};

fn main() -> jostlt::Result<()> {
    let spec = BarrierSpec::new(1.0, 1200.0)?;
    let en = enumerate_until_exit(&spec, 1e-13);
    let pts = points_from_enumeration(&en, false);
    let j = eval_sum(&pts, SumSpec::Jensen, false)?.value;
    println!("γ = 1, R = 1200: {} eigenvalues, J = {j:.4}", pts.len());
    for r in jensen_two_sided(&spec, j).iter().chain(&lower_bounds_barrier(&spec, Some(0.5), &[1.0, 2.0], &pts)?) {
        println!("  {:<22} {:.4} vs {:.4}  ({:?})", r.name, r.lhs, r.rhs, r.passed());
    }

    let eps = 0.9;
    let big = eps_triple_for_gamma(eps, 4000.0);
    println!("ε = {eps}, γ = 4000: needs R ≥ {:.4e} with M_R ≈ {:.3e}", big.r, big.m_r);
    let t = eps_triple_search(eps);
    println!("smallest admissible triple: γ = {:.4}, R = {:.2}, M_R ≈ {:.0}", t.gamma, t.r, t.m_r);
    let spec = BarrierSpec::new(t.gamma, t.r)?;
    let en = enumerate_spectrum(&spec, None, 1e-13);
    let pts = points_from_enumeration(&en, true);
    let r = &lower_bounds_barrier(&spec, Some(eps), &[], &pts)?[1];
    println!("  S_ε over j ≤ M_R = {:.6e} ≥ {:.6e}: {:?}", r.lhs, r.rhs, r.passed());
    Ok(())
}
