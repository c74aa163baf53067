//! Property tests for the invariants the library relies on.

use jostlt::barrier::{a_of_w, b_of_w, bigr_threshold, in_sector, solve_fixed_point, BarrierSpec};
use jostlt::branchmath::{arg_minus, arg_plus, dist_to_halfline, im_sqrt_plus, sq_minus, sq_plus, Wide};
use jostlt::jost::{even_wronskian_wide, jost_series, jost_transfer_matrix, line_wronskian_sweep, line_wronskian_wide};
use jostlt::potentials::{LinePotential, Potential, StepPotential};
use jostlt::sums::{eval_sum, stable_sum, SpectralPoint, SumSpec};
use jostlt::C64;
use proptest::prelude::*;

fn complex(range: f64) -> impl Strategy<Value = C64> {
    (-range..range, -range..range).prop_map(|(re, im)| C64::new(re, im))
}

fn upper_z() -> impl Strategy<Value = C64> {
    (-6.0..6.0f64, 0.05..4.0f64).prop_map(|(re, im)| C64::new(re, im))
}

/// Off the closed half-line `[0, ∞)`.
fn spectral_lambda() -> impl Strategy<Value = C64> {
    complex(50.0).prop_filter("off the half-line", |l| !(l.im.abs() < 1e-6 && l.re >= 0.0))
}

fn step_potential(max_pieces: usize) -> impl Strategy<Value = StepPotential> {
    prop::collection::vec((0.05..1.0f64, complex(2.0)), 1..=max_pieces).prop_map(|pieces| {
        let mut bps = vec![0.0];
        let mut vals = vec![];
        for (len, v) in pieces {
            bps.push(bps.last().unwrap() + len);
            vals.push(v);
        }
        StepPotential::new(bps, vals).unwrap()
    })
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn square_roots_square_back(z in complex(1e3)) {
        for r in [sq_plus(z), sq_minus(z)] {
            prop_assert!(close(r * r, z, 1e-13), "{r}² ≠ {z}");
        }
        prop_assert!(sq_plus(z).im >= 0.0);
        prop_assert!(sq_minus(z).re >= 0.0);
    }

    #[test]
    fn argument_ranges(z in complex(1e3)) {
        let (p, m) = (arg_plus(z), arg_minus(z));
        prop_assert!((0.0..std::f64::consts::TAU).contains(&p));
        prop_assert!((-std::f64::consts::PI..std::f64::consts::PI).contains(&m));
        let d = (p - m).rem_euclid(std::f64::consts::TAU);
        prop_assert!(d < 1e-12 || std::f64::consts::TAU - d < 1e-12);
    }

    #[test]
    fn wide_products_match_plain(a in complex(1e3), b in complex(1e3), k in -2000i64..2000) {
        let (wa, wb) = (Wide::new(a), Wide::new(b));
        prop_assert!(close((wa * wb).to_c64(), a * b, 1e-14));
        prop_assert!(close((wa + wb).to_c64(), a + b, 1e-14));
        // scaling by 2^k and back is exact
        prop_assert_eq!(wa.scale2(k).scale2(-k).to_c64(), a);
        prop_assert!(((wa.scale2(k).log2_abs() - k as f64) - a.norm().log2()).abs() < 1e-9 || a.norm() == 0.0);
    }

    #[test]
    fn termwise_sandwich(l in spectral_lambda()) {
        // |λ|^{1/2} Im√λ ≤ dist(λ, ℝ₊) ≤ 2|λ|^{1/2} Im√λ
        let t = l.norm().sqrt() * im_sqrt_plus(l);
        let d = dist_to_halfline(l);
        prop_assert!(t <= d * (1.0 + 1e-12), "{t} > {d}");
        prop_assert!(d <= 2.0 * t * (1.0 + 1e-12), "{d} > 2·{t}");
    }

    #[test]
    fn jensen_and_s0_sandwich(ls in prop::collection::vec(spectral_lambda(), 1..40)) {
        let pts: Vec<SpectralPoint> = ls.iter().map(|&lambda| SpectralPoint { lambda, multiplicity: 1 }).collect();
        let j = eval_sum(&pts, SumSpec::Jensen, false).unwrap().value;
        // S₀ weights each term by |λ|^{-1/2}; compare term by term at unit modulus
        let unit: Vec<SpectralPoint> = ls.iter().map(|&l| SpectralPoint { lambda: l / l.norm(), multiplicity: 1 }).collect();
        let ju = eval_sum(&unit, SumSpec::Jensen, false).unwrap().value;
        let s0u = eval_sum(&unit, SumSpec::SEps { eps: 0.0 }, false).unwrap().value;
        prop_assert!(ju <= s0u * (1.0 + 1e-12) && s0u <= 2.0 * ju * (1.0 + 1e-12));
        prop_assert!(j >= 0.0);
    }

    #[test]
    fn sums_ignore_order(mut ls in prop::collection::vec(spectral_lambda(), 1..40), eps in 0.0..1.0f64) {
        let pts = |ls: &[C64]| ls.iter().map(|&lambda| SpectralPoint { lambda, multiplicity: 1 }).collect::<Vec<_>>();
        let a = eval_sum(&pts(&ls), SumSpec::SEps { eps }, false).unwrap().value;
        ls.reverse();
        let third = ls.len() / 3;
        ls.rotate_left(third);
        let b = eval_sum(&pts(&ls), SumSpec::SEps { eps }, false).unwrap().value;
        prop_assert_eq!(a, b);
    }

    #[test]
    fn multiplicity_counts_twice(l in spectral_lambda()) {
        let one = eval_sum(&[SpectralPoint { lambda: l, multiplicity: 1 }], SumSpec::Jensen, false).unwrap();
        let two = eval_sum(&[SpectralPoint { lambda: l, multiplicity: 2 }], SumSpec::Jensen, false).unwrap();
        prop_assert_eq!(two.value, 2.0 * one.value);
        prop_assert_eq!(two.n_terms, 2);
    }

    #[test]
    fn stable_sum_is_permutation_invariant(mut xs in prop::collection::vec(0.0..1e6f64, 0..60)) {
        let a = stable_sum(xs.clone());
        xs.reverse();
        prop_assert_eq!(a, stable_sum(xs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn refinement_leaves_jost_unchanged(q in step_potential(5), z in upper_z(), cut in 0.05..0.95f64) {
        // split one piece in two with the same value
        let bps = q.breakpoints().to_vec();
        let vals = q.values().to_vec();
        let k = vals.len() / 2;
        let mid = bps[k] + cut * (bps[k + 1] - bps[k]);
        let mut bps2 = bps.clone();
        bps2.insert(k + 1, mid);
        let mut vals2 = vals.clone();
        vals2.insert(k, vals[k]);
        let fine = StepPotential::new(bps2, vals2).unwrap();
        let a = jost_transfer_matrix(&q.into(), z).unwrap();
        let b = jost_transfer_matrix(&fine.into(), z).unwrap();
        let tol = 1e-12 + 4.0 * (a.error_estimate() + b.error_estimate()) / a.value().norm().max(1.0);
        prop_assert!(close(a.value(), b.value(), tol), "{} vs {}", a.value(), b.value());
        prop_assert!(close(a.derivative(), b.derivative(), tol));
    }

    #[test]
    fn jost_close_to_one_for_small_potentials(q in step_potential(4), z in upper_z()) {
        let p: Potential = q.into();
        let e = jost_transfer_matrix(&p, z).unwrap();
        let bound = (p.l1_norm().unwrap() / z.norm()).exp_m1();
        prop_assert!((e.value() - 1.0).norm() <= bound * (1.0 + 1e-9) + e.error_estimate());
    }

    #[test]
    fn series_agrees_with_transfer_matrix(q in step_potential(3), z in (-4.0..4.0f64, 1.0..4.0f64)) {
        let z = C64::new(z.0, z.1);
        let p: Potential = q.into();
        prop_assume!(p.l1_norm().unwrap() / z.norm() < 2.0);
        let a = jost_transfer_matrix(&p, z).unwrap();
        let b = jost_series(&p, z, 1e-13).unwrap();
        let tol = a.error_estimate() + b.error_estimate() + 1e-12 * a.value().norm().max(1.0);
        prop_assert!((a.value() - b.value()).norm() <= tol, "{} vs {}", a.value(), b.value());
    }

    #[test]
    fn free_line_wronskian(z in upper_z(), a in 0.1..3.0f64) {
        // a zero step profile on [−a, a] is the free line: W = −2iz
        let line = LinePotential::from_steps(vec![-a, a], vec![C64::new(0.0, 0.0)]).unwrap();
        let expect = C64::new(0.0, -2.0) * z;
        prop_assert!(close(line_wronskian_sweep(&line, z).unwrap().to_c64(), expect, 1e-13));
    }

    #[test]
    fn line_wronskian_methods_agree(q in step_potential(4), z in upper_z()) {
        let p: Potential = q.into();
        let line = p.even_extension();
        let w1 = line_wronskian_wide(&line, z).unwrap();
        let w2 = line_wronskian_sweep(&line, z).unwrap();
        let w3 = even_wronskian_wide(&p, z).unwrap();
        let scale = w1.abs().max(w2.abs()).max(1.0);
        prop_assert!(((w1 - w2).abs()) <= 1e-9 * scale, "{} vs {}", w1.to_c64(), w2.to_c64());
        prop_assert!(((w1 - w3).abs()) <= 1e-9 * scale);
    }

    #[test]
    fn guaranteed_fixed_points_stay_in_sector(gamma in 0.5..8.0f64, extra in 1.0..3.0f64, frac in 0.0..1.0f64) {
        let r = bigr_threshold(gamma) * extra;
        let spec = BarrierSpec::new(gamma, r).unwrap();
        let j = 1 + ((spec.m_r().max(1) - 1) as f64 * frac) as u64;
        let s = solve_fixed_point(&spec, j, 1e-13).unwrap();
        prop_assert!(s.guaranteed && s.eigenvalue);
        // B_j(w) ≥ 2|A(w)| at the fixed point
        prop_assert!(in_sector(&spec, s.w, j).unwrap());
        let (a, b) = (a_of_w(&spec, s.w).unwrap(), b_of_w(&spec, s.w, j).unwrap());
        prop_assert!(b >= 2.0 * a.abs());
        // the phase R·s ≈ 2πj carries an absolute rounding error of about ε·R|w|
        let floor = 64.0 * f64::EPSILON * (1.0 + spec.r * s.w.norm());
        prop_assert!(s.residual_phi <= floor, "φ residual {} > {floor}", s.residual_phi);
        prop_assert!(s.contraction < 1.0);
    }
}
