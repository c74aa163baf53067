//! `S_{α,β}/‖q‖₁` and `S_ε/‖q‖₁^{1+ε}` along barriers with growing `R`:
//! bounded ratios where a uniform inequality holds, growth where it fails.
//!
//! Run with `cargo run --release --example generalized_sums`.

use jostlt::barrier::{enumerate_until_exit, BarrierSpec};
use jostlt::bounds::{empirical_k_eps, generltsup_experiment};
use jostlt::sums::points_from_enumeration;

fn main() -> jostlt::Result<()> {
    let family: Vec<_> = [300.0, 600.0, 1200.0, 2400.0]
        .into_iter()
        .map(|r| {
            let spec = BarrierSpec::new(1.0, r)?;
            let en = enumerate_until_exit(&spec, 1e-13);
            Ok((spec, points_from_enumeration(&en, false)))
        })
        .collect::<jostlt::Result<_>>()?;

    let params = [(0.5, 1.0), (0.75, 1.0), (1.0, 1.0), (1.0, 2.0), (0.5, 0.5)];
    for row in generltsup_experiment(&params, &family)? {
        let ratios: Vec<String> = row.ratio.iter().map(|r| format!("{r:.4}")).collect();
        println!(
            "α = {:<4} β = {:<4} finite predicted {:<5} ratios [{}]  slope in R {:+.3}",
            row.alpha,
            row.beta,
            row.finite_predicted,
            ratios.join(", "),
            row.slope
        );
    }

    let by_l1: Vec<_> = family.iter().map(|(s, p)| (s.l1_norm(), p.clone())).collect();
    for eps in [0.1, 0.5, 0.9] {
        let (k, ratios) = empirical_k_eps(&by_l1, eps)?;
        println!("ε = {eps}: S_ε/‖q‖₁^(1+ε) = {ratios:.4?}, max {k:.4}");
    }
    Ok(())
}
