//! Eigenvalues of the dissipative barrier `iγ·χ_[0,R]` from the fixed-point
//! family, with a contour count confirming that none were missed.
//!
//! Run with `cargo run --release --example barrier_spectrum -- 1 1200`.

use std::time::Instant;

use jostlt::barrier::{certify_enumeration, enumerate_until_exit, BarrierSpec};

fn main() -> jostlt::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let gamma = args.first().copied().unwrap_or(1.0);
    let r = args.get(1).copied().unwrap_or(1200.0);
    let spec = BarrierSpec::new(gamma, r)?;
    println!("γ = {gamma}, R = {r}, large-R condition: {}, M_R = {}", spec.satisfies_bigr(), spec.m_r());

    let t = Instant::now();
    let en = enumerate_until_exit(&spec, 1e-12);
    let eigs: Vec<_> = en.eigenvalues().collect();
    println!(
        "{} eigenvalues from {} branches ({} in the guaranteed range), {} failures, {:.2?}",
        eigs.len(),
        en.solutions.len(),
        eigs.iter().filter(|s| s.guaranteed).count(),
        en.failures.len(),
        t.elapsed()
    );
    let worst_phi = eigs.iter().map(|s| s.residual_phi).fold(0.0, f64::max);
    let worst_contraction = en.solutions.iter().map(|s| s.contraction).fold(0.0, f64::max);
    println!("max φ residual {worst_phi:.2e}, max contraction factor {worst_contraction:.3e}");
    if let (Some(first), Some(last)) = (eigs.first(), eigs.last()) {
        println!("λ_1 = {:.6e}, last λ_{} = {:.6e}", first.lambda, last.j, last.lambda);
    }

    let t = Instant::now();
    let cert = certify_enumeration(&en, 1e-14)?;
    println!(
        "contour count {} vs enumerated {} ({} evaluations, min |f|/scale {:.2e}, {:.2?}): {}",
        cert.contour_count.count,
        cert.enumerated,
        cert.contour_count.evaluations,
        cert.contour_count.min_modulus,
        t.elapsed(),
        if cert.complete { "complete" } else { "MISMATCH" }
    );
    Ok(())
}
