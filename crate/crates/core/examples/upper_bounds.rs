//! Upper bounds for the Jensen sum: the weighted bound with the polynomial,
//! logarithmic and compact-support weights, checked against computed `J`.
//!
//! Run with `cargo run --release --example upper_bounds`.

use jostlt::bounds::{bound_compact, bound_compact_weighted, bound_ltgente, bound_poly, BoundReport};
use jostlt::potentials::{Potential, PotentialSpec, WeightPair};
use jostlt::spectra::find_spectrum;
use jostlt::sums::{eval_sum, points_from_report, SumSpec};

fn show(r: &BoundReport) {
    println!(
        "    {:<24} J = {:.6}  bound {:>12.4}  margin {:>12.4}  preconditions {}",
        r.name, r.lhs, r.rhs, r.margin, r.preconditions_met
    );
}

fn main() -> jostlt::Result<()> {
    let descriptors = [
        r#"{"kind":"step","breakpoints":[0,1,2],"values":[[-5,1.5],[-2,0.5]]}"#,
        r#"{"kind":"barrier","gamma":2,"R":3}"#,
        r#"{"kind":"gaussian","amplitude":[-3,1],"center":1,"width":0.7}"#,
    ];
    for d in descriptors {
        let q: Potential = PotentialSpec::parse(d)?.build()?;
        let rep = find_spectrum(&q, 1e-11)?;
        let j = eval_sum(&points_from_report(&rep), SumSpec::Jensen, !rep.is_resolved())?.value;
        println!("{d}\n  {} eigenvalues, J = {j:.6}", rep.eigenvalues.len());
        show(&bound_poly(&q, 0.5, j)?);
        show(&bound_ltgente(&q, &WeightPair::log_power(2.0), 0.5, j)?);
        if let Some(end) = q.support_end() {
            show(&bound_compact(&q, None, j)?);
            show(&bound_compact_weighted(&q, end.max(8.0), j)?);
        }
    }
    Ok(())
}
