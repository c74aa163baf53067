//! The acceptance criteria as runnable checks, shared by `verify-all` and
//! the acceptance test. Each criterion returns one PASS/FAIL line plus
//! details; tolerances are fixed here and never relaxed by `quick`, which
//! only thins grids and sample counts.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::barrier::{
    b_of_w, certify_enumeration, enumerate_spectrum, enumerate_until_exit, in_f_infinity, phi_r, scaling_check,
    BarrierJostFn, BarrierSpec, Enumeration,
};
use crate::bounds::{
    bound_compact, bound_poly, eps_triple_for_gamma, eps_triple_search, jensen_two_sided, lower_bounds_barrier,
};
use crate::branchmath::{dist_to_halfline, im_sqrt_plus, sq_minus, sq_plus, Wide, C64};
use crate::construction::{even_extension_bridge, jensen_growth_report, stage_parameters};
use crate::error::Result;
use crate::jost::{jost_ode, jost_series, jost_transfer_matrix, line_wronskian, transfer_matrix_step, OdeOptions};
use crate::potentials::{AnalyticPotential, LinePotential, Potential, StepPotential};
use crate::spectra::{
    count_zeros_in_contour, find_spectrum, polar_grid, shift_limit_check, track_shift_roots, truncation_limit_check,
    Contour, Rect, SearchOptions,
};
use crate::sums::{eval_sum, points_from_enumeration, points_from_report, sandwich_checks, SumSpec};

/// Fixed-point tolerance used for every barrier enumeration.
pub const FP_TOL: f64 = 1e-13;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    /// Thinner grids and fewer random samples; tolerances are unchanged.
    pub quick: bool,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { quick: false, seed: 20_240_917 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub summary: String,
    pub details: Vec<String>,
    pub seconds: f64,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} ({}): {} [{:.1} s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.summary,
            self.seconds
        )
    }
}

/// Accumulates named checks.
struct Checks {
    items: Vec<(bool, String)>,
}

impl Checks {
    fn new() -> Self {
        Self { items: vec![] }
    }

    fn check(&mut self, ok: bool, msg: impl Into<String>) {
        self.items.push((ok, msg.into()));
    }

    fn info(&mut self, msg: impl Into<String>) {
        self.items.push((true, format!("info: {}", msg.into())));
    }

    fn finish(self, id: u8, title: &str, t: Instant) -> CriterionReport {
        let passed = self.items.iter().all(|(ok, _)| *ok);
        let failed: Vec<&str> = self.items.iter().filter(|(ok, _)| !ok).map(|(_, m)| m.as_str()).collect();
        let summary = if passed {
            format!("{} checks passed", self.items.iter().filter(|(_, m)| !m.starts_with("info:")).count())
        } else {
            format!("failed: {}", failed.join("; "))
        };
        let details = self.items.into_iter().map(|(ok, m)| format!("[{}] {m}", if ok { "ok" } else { "FAIL" })).collect();
        CriterionReport { id, title: title.into(), passed, summary, details, seconds: t.elapsed().as_secs_f64() }
    }
}

/// Shared state: barrier enumerations are reused across criteria.
pub struct Context {
    pub opts: VerifyOptions,
    cache: Mutex<HashMap<(u64, u64), Arc<Enumeration>>>,
}

impl Context {
    pub fn new(opts: VerifyOptions) -> Self {
        Self { opts, cache: Mutex::new(HashMap::new()) }
    }

    /// Every eigenvalue of the barrier, by fixed-point enumeration.
    pub fn barrier(&self, gamma: f64, r: f64) -> Result<Arc<Enumeration>> {
        let key = (gamma.to_bits(), r.to_bits());
        if let Some(en) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(en.clone());
        }
        let en = Arc::new(enumerate_until_exit(&BarrierSpec::new(gamma, r)?, FP_TOL));
        self.cache.lock().expect("cache lock").insert(key, en.clone());
        Ok(en)
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.opts.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }
}

pub const TITLES: [&str; 10] = [
    "Jost cross-validation",
    "barrier identity",
    "fixed-point enumeration vs contour counting",
    "two-sided Jensen bound",
    "lower bounds",
    "scaling covariance",
    "upper bounds on general potentials",
    "shift and truncation limits",
    "construction stage 1",
    "property suites",
];

pub fn run(ctx: &Context, id: u8) -> CriterionReport {
    let t = Instant::now();
    let title = TITLES[(id - 1) as usize];
    let r = match id {
        1 => criterion_1(ctx),
        2 => criterion_2(ctx),
        3 => criterion_3(ctx),
        4 => criterion_4(ctx),
        5 => criterion_5(ctx),
        6 => criterion_6(ctx),
        7 => criterion_7(ctx),
        8 => criterion_8(ctx),
        9 => criterion_9(ctx),
        _ => criterion_10(ctx),
    };
    match r {
        Ok(c) => c.finish(id, title, t),
        Err(e) => {
            let mut c = Checks::new();
            c.check(false, format!("error: {e}"));
            c.finish(id, title, t)
        }
    }
}

pub fn run_all(ctx: &Context) -> Vec<CriterionReport> {
    (1..=10).map(|id| run(ctx, id)).collect()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The five potentials of the cross-validation.
pub fn test_potentials() -> Result<Vec<(&'static str, Potential)>> {
    Ok(vec![
        ("free", Potential::zero()),
        ("barrier(1,2)", Potential::barrier(1.0, 2.0)),
        ("barrier(3,0.5)", Potential::barrier(3.0, 0.5)),
        (
            "4-step",
            StepPotential::new(
                vec![0.0, 0.7, 1.5, 2.6, 4.0],
                vec![c(0.8, 0.3), c(-0.5, 0.6), c(0.2, -0.4), c(0.4, 0.9)],
            )?
            .into(),
        ),
        ("gaussian", AnalyticPotential::gaussian_bump(c(1.0, 0.5), 2.0, 0.5)?.into()),
    ])
}

fn criterion_1(ctx: &Context) -> Result<Checks> {
    let t = Instant::now();
    let mut ch = Checks::new();
    let n = if ctx.opts.quick { 8 } else { 20 };
    let grid = polar_grid(n, 0.1, 10.0, 0.0, PI);
    for (name, q) in test_potentials()? {
        let l1 = q.l1_norm()?;
        let rows: Vec<(f64, usize, usize, f64)> = grid
            .par_iter()
            .map(|&z| {
                let tm = jost_transfer_matrix(&q, z)?;
                let se = jost_series(&q, z, 1e-12)?;
                let ode = jost_ode(&q, z, OdeOptions::default())?;
                let evals = [(tm.value(), tm.error_estimate()), (se.value(), se.error_estimate()), (ode.value(), ode.error_estimate())];
                let mut worst: f64 = 0.0;
                let mut disagree = 0;
                for a in 0..3 {
                    for b in a + 1..3 {
                        let d = (evals[a].0 - evals[b].0).norm();
                        let allowed = evals[a].1 + evals[b].1;
                        worst = worst.max(d / allowed.max(f64::MIN_POSITIVE));
                        if d > allowed {
                            disagree += 1;
                        }
                    }
                }
                let bound = (l1 / z.norm()).exp_m1();
                let violations = evals.iter().filter(|(v, _)| (v - 1.0).norm() > bound).count();
                let est = evals.iter().map(|(v, e)| e / v.norm().max(1.0)).fold(0.0, f64::max);
                Ok((worst, disagree, violations, est))
            })
            .collect::<Result<_>>()?;
        let worst = rows.iter().map(|r| r.0).fold(0.0, f64::max);
        let disagree: usize = rows.iter().map(|r| r.1).sum();
        let violations: usize = rows.iter().map(|r| r.2).sum();
        ch.check(
            disagree == 0,
            format!("{name}: {disagree} method pairs outside combined error estimate (max ratio {worst:.2e}) on {} points", grid.len()),
        );
        ch.check(violations == 0, format!("{name}: {violations} violations of |e₊ − 1| ≤ exp(‖q‖₁/|z|) − 1"));
        // agreement within the estimates means little if the estimates are loose
        let est = rows.iter().map(|r| r.3).fold(0.0, f64::max);
        ch.check(est <= 1e-6, format!("{name}: largest relative error estimate {est:.1e} ≤ 1e-6"));
    }
    let secs = t.elapsed().as_secs_f64();
    ch.check(secs < 60.0, format!("runtime {secs:.1} s < 60 s"));
    Ok(ch)
}

fn criterion_2(ctx: &Context) -> Result<Checks> {
    let mut ch = Checks::new();
    let n = if ctx.opts.quick { 100 } else { 1000 };
    for (k, (gamma, r)) in [(1.0, 1200.0), (0.25, 2400.0)].into_iter().enumerate() {
        let spec = BarrierSpec::new(gamma, r)?;
        let q = Potential::barrier(gamma, r);
        let mut rng = ctx.rng(2 + k as u64);
        let zs: Vec<C64> = (0..n)
            .map(|_| {
                let m = (rng.gen_range((0.05f64).ln()..(2.0 * gamma * r).ln())).exp();
                C64::from_polar(m, rng.gen_range(0.0..PI))
            })
            .collect();
        let worst = zs
            .par_iter()
            .map(|&z| {
                let s = sq_plus(z * z - c(0.0, gamma));
                let e = jost_transfer_matrix(&q, z)?.value_wide();
                let phi = phi_r(&spec, z);
                let lhs = phi + e * Wide::exp(c(0.0, -r) * z) * (s * 2.0);
                Ok(lhs.abs_ratio(&(Wide::ONE + phi.abs_wide())))
            })
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        ch.check(
            worst <= 1e-11,
            format!("(γ,R) = ({gamma},{r}): max |φ_R + 2s e^(−iRz) e₊|/(1+|φ_R|) = {worst:.2e} ≤ 1e-11 over {n} points"),
        );
    }
    Ok(ch)
}

/// Rectangle in the `z`-plane around the eigenvalues with `j ∈ [lo, hi]`,
/// with edges halfway to the neighbouring indices.
fn window_rect(en: &Enumeration, lo: u64, hi: u64) -> Option<Rect> {
    let z = |j: u64| en.solutions.iter().find(|s| s.j == j).map(|s| s.z);
    let (a0, a1, b0, b1) = (z(lo - 1)?, z(lo)?, z(hi)?, z(hi + 1)?);
    let inside: Vec<C64> = (lo..=hi).filter_map(z).collect();
    let gap = (a1 - a0).norm().min((b1 - b0).norm());
    let ymin = inside.iter().map(|w| w.im).fold(f64::INFINITY, f64::min);
    let ymax = inside.iter().map(|w| w.im).fold(0.0, f64::max);
    Some(Rect::new(0.5 * (a0.re + a1.re), 0.5 * (b0.re + b1.re), (ymin - gap).max(0.5 * ymin), ymax + gap))
}

fn criterion_3(ctx: &Context) -> Result<Checks> {
    let t = Instant::now();
    let mut ch = Checks::new();
    let en = ctx.barrier(1.0, 1200.0)?;
    let gamma = en.spec.gamma;
    let m_r = en.m_r;
    let in_spec: Vec<_> = en.solutions.iter().filter(|s| s.in_spectrum).collect();
    ch.info(format!("M_R = ⌊γR²/(32π log R)⌋ = {m_r} (reference value 2023)"));
    ch.check(in_spec.len() as u64 >= 2023 && in_spec.len() as u64 >= m_r, format!("{} in-spectrum fixed points ≥ 2023 and ≥ {m_r}", in_spec.len()));
    ch.check(en.failures.is_empty() && !en.capped, format!("{} fixed-point failures", en.failures.len()));
    let outside = in_spec
        .iter()
        .filter(|s| !(s.lambda.re > 0.0 && s.lambda.im >= gamma / 2.0 && s.lambda.im <= gamma))
        .count();
    ch.check(outside == 0, format!("{outside} in-spectrum eigenvalues outside {{Re λ > 0, γ/2 ≤ Im λ ≤ γ}}"));
    let worst = in_spec.iter().map(|s| s.residual_phi).fold(0.0, f64::max);
    ch.check(worst < 1e-10, format!("max normalized φ residual {worst:.2e} < 1e-10"));
    let (lo, hi) = (1000, 1049);
    let rect = window_rect(&en, lo, hi).ok_or_else(|| crate::Error::InvalidParameter("window indices missing".into()))?;
    let inside = en.eigenvalues().filter(|s| rect.contains(s.z)).count();
    let f = BarrierJostFn { spec: en.spec };
    let cc = count_zeros_in_contour(&f, &Contour::rectangle(&rect), 16, 1e-12)?;
    ch.check(
        cc.count == inside as i64,
        format!("sub-window j ∈ [{lo}, {hi}]: contour count {} = {inside} enumerated", cc.count),
    );
    let full = certify_enumeration(&en, 1e-12)?;
    ch.check(
        full.complete,
        format!("whole strip: contour count {} = {} enumerated eigenvalues", full.contour_count.count, full.enumerated),
    );
    let secs = t.elapsed().as_secs_f64();
    ch.check(secs < 600.0, format!("runtime {secs:.1} s < 600 s"));
    Ok(ch)
}

fn criterion_4(ctx: &Context) -> Result<Checks> {
    let mut ch = Checks::new();
    for r in [1200.0, 2400.0] {
        let en = ctx.barrier(1.0, r)?;
        let cert = certify_enumeration(&en, 1e-12)?;
        ch.check(cert.complete, format!("R = {r}: spectrum complete ({} eigenvalues, contour {})", cert.enumerated, cert.contour_count.count));
        let pts = points_from_enumeration(&en, false);
        let j = eval_sum(&pts, SumSpec::Jensen, !cert.complete)?.value;
        for b in jensen_two_sided(&en.spec, j) {
            ch.check(b.passed() == Some(true), format!("R = {r}: {} J = {:.4} vs {:.4} (margin {:.4e})", b.name, b.lhs, b.rhs, b.margin));
        }
        let comp = bound_compact(&Potential::barrier(1.0, r), Some(r), j)?;
        ch.check(comp.passed() == Some(true), format!("R = {r}: compact-support bound {:.4} ≥ J = {j:.4}", comp.rhs));
    }
    Ok(ch)
}

fn criterion_5(ctx: &Context) -> Result<Checks> {
    let mut ch = Checks::new();
    for r in [1200.0, 2400.0] {
        let en = ctx.barrier(1.0, r)?;
        let pts = points_from_enumeration(&en, false);
        for b in lower_bounds_barrier(&en.spec, None, &[1.0, 2.0], &pts)? {
            let tag = b.inputs.p.map_or(String::new(), |p| format!(" p = {p}"));
            ch.check(b.passed() == Some(true), format!("R = {r}: {}{tag}: {:.4} ≥ {:.4}", b.name, b.lhs, b.rhs));
        }
    }
    let eps = 0.9;
    let stated = eps_triple_for_gamma(eps, 4000.0);
    ch.info(format!(
        "ε = {eps}, γ = 4000 needs R ≥ {:.4e}, M_R ≈ {:.3e}: {}",
        stated.r,
        stated.m_r,
        if stated.feasible { "within the enumeration cap" } else { "beyond the enumeration cap" }
    ));
    let t = eps_triple_search(eps);
    ch.info(format!("fallback: tool-chosen triple γ = {:.4}, R = {:.2}, M_R ≈ {:.0}; S_ε checked on the certified subsum j ≤ M_R", t.gamma, t.r, t.m_r));
    let spec = BarrierSpec::new(t.gamma, t.r)?;
    let en = enumerate_spectrum(&spec, None, FP_TOL);
    let ok_all = en.failures.is_empty() && en.solutions.iter().all(|s| s.eigenvalue);
    ch.check(ok_all, format!("{} guaranteed fixed points, {} failures", en.solutions.len(), en.failures.len()));
    let pts = points_from_enumeration(&en, true);
    let reps = lower_bounds_barrier(&spec, Some(eps), &[], &pts)?;
    let b = &reps[1];
    ch.check(
        b.passed() == Some(true),
        format!("S_ε(subsum) = {:.6e} ≥ (γR)^(1+ε)/(256πε log^ε R) = {:.6e} (preconditions met: {})", b.lhs, b.rhs, b.preconditions_met),
    );
    Ok(ch)
}

fn criterion_6(ctx: &Context) -> Result<Checks> {
    let mut ch = Checks::new();
    let a = ctx.barrier(1.0, 2400.0)?;
    let b = ctx.barrier(4.0, 1200.0)?;
    ch.info(format!("(4,1200) meets the large-R condition: {}", b.spec.satisfies_bigr()));
    let s = 2.0;
    let rep = scaling_check(&a, &b, s);
    ch.check(rep.count_match, format!("eigenvalue counts {} and {}", a.eigenvalues().count(), b.eigenvalues().count()));
    ch.check(rep.max_rel_diff <= 1e-9, format!("max relative difference of 4λ vs λ' {:.2e} ≤ 1e-9", rep.max_rel_diff));
    let (pa, pb) = (points_from_enumeration(&a, false), points_from_enumeration(&b, false));
    for eps in [0.0, 0.5, 0.9] {
        let sa = eval_sum(&pa, SumSpec::SEps { eps }, false)?.value;
        let sb = eval_sum(&pb, SumSpec::SEps { eps }, false)?.value;
        let rel = (sb / (sa * s.powf(1.0 + eps)) - 1.0).abs();
        ch.check(rel <= 1e-8, format!("S_ε scaling ε = {eps}: relative defect {rel:.2e} ≤ 1e-8"));
    }
    Ok(ch)
}

/// A random 4-step potential on `[0, end]` with `‖q‖₁ = l1`.
pub fn random_step_potential(rng: &mut impl Rng, l1: f64) -> Result<StepPotential> {
    let end = rng.gen_range(1.0..4.0);
    let mut cuts: Vec<f64> = (0..3).map(|_| rng.gen_range(0.05..0.95) * end).collect();
    cuts.sort_by(f64::total_cmp);
    let mut bps = vec![0.0];
    bps.extend(cuts);
    bps.push(end);
    let raw: Vec<C64> = (0..4).map(|_| C64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(-PI..PI))).collect();
    let norm: f64 = raw.iter().zip(bps.windows(2)).map(|(v, w)| v.norm() * (w[1] - w[0])).sum();
    let vals = raw.iter().map(|v| v * (l1 / norm)).collect();
    StepPotential::new(bps, vals)
}

fn criterion_7(ctx: &Context) -> Result<Checks> {
    let t = Instant::now();
    let mut ch = Checks::new();
    let mut rng = ctx.rng(7);
    let count = if ctx.opts.quick { 3 } else { 10 };
    let mut total = 0;
    for k in 0..count {
        let l1 = rng.gen_range(0.3..2.0);
        let q: Potential = random_step_potential(&mut rng, l1)?.into();
        let spec = find_spectrum(&q, 1e-11)?;
        ch.check(spec.is_resolved(), format!("potential {k}: spectrum resolved ({} eigenvalues)", spec.eigenvalues.len()));
        total += spec.eigenvalues.len();
        let pts = points_from_report(&spec);
        let j = eval_sum(&pts, SumSpec::Jensen, !spec.is_resolved())?.value;
        let poly = bound_poly(&q, 0.5, j)?;
        let comp = bound_compact(&q, None, j)?;
        ch.check(poly.margin >= 0.0 && comp.margin >= 0.0, format!(
            "potential {k}: J = {j:.4e}, poly bound {:.3} (margin {:.3}), compact bound {:.3} at R = {:.3} (margin {:.3})",
            poly.rhs, poly.margin, comp.rhs, comp.inputs.r.unwrap_or(0.0), comp.margin
        ));
        let sw = sandwich_checks(&pts, l1, &[(0.1, 0.5)])?;
        ch.check(
            sw.termwise_violations == 0 && sw.j_le_s0 && sw.s0_le_2j,
            format!("potential {k}: J ≤ S₀ ≤ 2J termwise ({} violations)", sw.termwise_violations),
        );
        ch.check(sw.enclosure_holds, format!("potential {k}: |λ| ≤ ‖q‖₁² for every eigenvalue"));
    }
    ch.info(format!("{total} eigenvalues over {count} potentials"));
    let secs = t.elapsed().as_secs_f64();
    ch.check(secs < 300.0, format!("runtime {secs:.1} s < 300 s"));
    Ok(ch)
}

/// Tracked-root errors below this are at the root-finding resolution.
pub const TRACKING_FLOOR: f64 = 1e-9;

fn criterion_8(ctx: &Context) -> Result<Checks> {
    let mut ch = Checks::new();
    let q = Potential::barrier(1.0, 1.0);
    let line = LinePotential::symmetric_barrier(1.0, 1.0);
    let xs = [10.0, 20.0, 40.0, 80.0];
    let n = if ctx.opts.quick { 5 } else { 10 };
    let grid: Vec<C64> = (0..n)
        .flat_map(|a| (0..n).map(move |b| c(-3.0 + 6.0 * a as f64 / (n - 1) as f64, 0.5 + 2.5 * b as f64 / (n - 1) as f64)))
        .collect();
    let rows = shift_limit_check(&q, &line, &xs, &grid)?;
    let devs: Vec<f64> = rows.iter().map(|r| r.deviation).collect();
    ch.check(
        devs.windows(2).all(|w| w[1] < w[0]),
        format!("shift deviations strictly decreasing: {}", fmt_list(&devs)),
    );
    let lq: Potential = AnalyticPotential::gaussian_bump(c(0.05, 0.05), 0.0, 30.0)?.into();
    let trows = truncation_limit_check(&lq, &xs, &grid)?;
    let tdevs: Vec<f64> = trows.iter().map(|r| r.deviation).collect();
    ch.check(
        tdevs.windows(2).all(|w| w[1] < w[0]),
        format!("truncation deviations strictly decreasing: {}", fmt_list(&tdevs)),
    );
    ch.check(trows.iter().all(|r| r.deviation <= r.bound), "truncation deviations within the Gronwall bound");
    let region = Rect::new(0.05, 2.5, 0.2, 2.0);
    let rep = track_shift_roots(&q, &line, &xs, region, &SearchOptions { tol: 1e-13, ..Default::default() })?;
    ch.check(!rep.factor_roots.is_empty(), format!("{} factor root(s) in the region", rep.factor_roots.len()));
    ch.check(rep.rows.iter().all(|r| r.count_matches), "root count equals the factor-root count at every X");
    let errs: Vec<f64> = rep.rows.iter().map(|r| r.error).collect();
    ch.check(
        errs.windows(2).all(|w| w[1] <= 0.5 * w[0] || w[1] <= TRACKING_FLOOR),
        format!("tracking errors halve per doubling (floor {TRACKING_FLOOR:e}): {}", fmt_list(&errs)),
    );
    Ok(ch)
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| format!("{x:.3e}")).collect::<Vec<_>>().join(", ")
}

fn criterion_9(ctx: &Context) -> Result<Checks> {
    let t = Instant::now();
    let mut ch = Checks::new();
    let p = stage_parameters(1)?;
    ch.info(format!(
        "γ₁ = {:.7} (reference ≈ 0.47128), R₁ = {:.3} (reference ≈ 2110.1), M_R₁ = {} (reference ≈ 2727)",
        p.gamma, p.r, p.m_r
    ));
    ch.check(p.bigr && p.gamma < 1.0, "stage 1 meets the large-R condition with γ₁ < 1");
    let en = ctx.barrier(p.gamma, p.r)?;
    let count = en.eigenvalues().count();
    ch.check(count as u64 >= p.m_r && count >= 2727, format!("{count} eigenvalues ≥ M_R₁ = {} and ≥ 2727", p.m_r));
    let cert = certify_enumeration(&en, 1e-12)?;
    ch.check(cert.complete, format!("contour count {} = {} enumerated", cert.contour_count.count, cert.enumerated));
    let j = eval_sum(&points_from_enumeration(&en, false), SumSpec::Jensen, false)?.value;
    ch.check(
        j >= 2.0 * p.certified_contribution,
        format!("J(L₁) = {j:.4} ≥ γ₁R₁ log R₁/(32π) = {:.4}", 2.0 * p.certified_contribution),
    );
    ch.info(format!("certified contribution γ₁R₁ log R₁/(64π) = {:.4} (reference ≈ 37.9)", p.certified_contribution));
    let bridge = even_extension_bridge(&en, if ctx.opts.quick { 5000 } else { 500 })?;
    ch.check(bridge.confirmed == bridge.checked, format!(
        "even extension: {}/{} eigenvalues are line Wronskian zeros ({} near-real ones by residual)",
        bridge.confirmed, bridge.checked, bridge.by_residual
    ));
    let n_max = if ctx.opts.quick { 10_000 } else { 1_000_000 };
    let rows = jensen_growth_report(n_max)?;
    ch.check(rows.windows(2).all(|w| w[1].partial_sum > w[0].partial_sum), "partial sums strictly increasing");
    let ratios: Vec<f64> = rows.iter().filter(|r| r.n >= 10).filter_map(|r| r.log_ratio).collect();
    ch.check(
        ratios.windows(2).all(|w| w[1] < w[0]) && ratios.iter().all(|&r| r > 1.0),
        format!("log R_n/(3 log n) decreasing towards 1 ({:.4} at n = {n_max})", ratios.last().copied().unwrap_or(f64::NAN)),
    );
    let last = rows.last().expect("n_max ≥ 1");
    ch.info(format!("Σ_(n ≤ {n_max}) contributions = {:.4}, ‖q_n‖₁ = {:.4}", last.partial_sum, last.l1_partial));
    let secs = t.elapsed().as_secs_f64();
    ch.check(secs < 900.0, format!("runtime {secs:.1} s < 900 s"));
    Ok(ch)
}

fn criterion_10(ctx: &Context) -> Result<Checks> {
    let mut ch = Checks::new();
    let mut rng = ctx.rng(10);
    let n = if ctx.opts.quick { 10_000 } else { 100_000 };
    let mut bad = 0;
    for _ in 0..n {
        let zeta = C64::from_polar(rng.gen_range(-20.0f64..20.0).exp(), rng.gen_range(-PI..PI));
        let (p, m) = (sq_plus(zeta), sq_minus(zeta));
        let tol = 1e-14 * zeta.norm();
        let mut ok = (p * p - zeta).norm() <= tol && (m * m - zeta).norm() <= tol && p.im >= 0.0 && m.re >= 0.0;
        let d = dist_to_halfline(zeta);
        let s = zeta.norm().sqrt() * im_sqrt_plus(zeta);
        ok &= s <= d * (1.0 + 1e-12) && d <= 2.0 * s * (1.0 + 1e-12);
        bad += usize::from(!ok);
    }
    ch.check(bad == 0, format!("branch invariants and the distance sandwich: {bad} violations in {n} points"));

    let m = if ctx.opts.quick { 100 } else { 1000 };
    let mut bad = 0;
    for _ in 0..m {
        let l1 = rng.gen_range(0.1..3.0);
        let q = random_step_potential(&mut rng, l1)?;
        let pieces: Vec<_> = q.pieces().collect();
        let k = rng.gen_range(0..pieces.len());
        let (a, b, _) = pieces[k];
        let cut = a + rng.gen_range(0.1..0.9) * (b - a);
        let mut bps = q.breakpoints().to_vec();
        bps.insert(k + 1, cut);
        let mut vals = q.values().to_vec();
        vals.insert(k, vals[k]);
        let split = StepPotential::new(bps, vals)?;
        let z = C64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(0.0..PI));
        let (ea, eb) = (transfer_matrix_step(&q, z)?, transfer_matrix_step(&split, z)?);
        let d = (ea.value_wide() - eb.value_wide()).abs();
        bad += usize::from(d > ea.error_estimate() + eb.error_estimate());
    }
    ch.check(bad == 0, format!("refinement invariance: {bad} violations in {m} split potentials"));

    let mut bad = 0;
    for _ in 0..m {
        let z = C64::from_polar(rng.gen_range(0.1..10.0), rng.gen_range(0.0..PI));
        let free = line_wronskian(&LinePotential::zero(), z)?;
        bad += usize::from(free != c(0.0, -2.0) * z);
        let d: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&g| Ok((line_wronskian(&LinePotential::symmetric_barrier(g, 1.0), z)? + c(0.0, 2.0) * z).norm()))
            .collect::<Result<_>>()?;
        bad += usize::from(!(d[1] < d[0] && d[2] < d[1]));
    }
    ch.check(bad == 0, format!("free-case Wronskian limit W → −2iz: {bad} violations in {m} points"));

    let en = ctx.barrier(1.0, 1200.0)?;
    let spec = en.spec;
    let k = if ctx.opts.quick { 1000 } else { 10_000 };
    let mut bad = 0;
    for _ in 0..k {
        let x = -(rng.gen_range(-8.0f64..2.0).exp());
        let w = c(x, rng.gen_range(0.0..0.5) * -x);
        let j = rng.gen_range(1..=en.m_r);
        let b = b_of_w(&spec, w, j)?;
        let lo = 2.0 * PI * (j as f64 - 0.5);
        bad += usize::from(!(in_f_infinity(w) && lo <= b && b < lo + 2.0 * PI));
    }
    ch.check(bad == 0, format!("B_j sandwich on F_∞: {bad} violations in {k} samples"));
    let worst = en.solutions.iter().map(|s| s.contraction).fold(0.0, f64::max);
    ch.check(worst < 1.0, format!("contraction factor < 1 at every accepted iterate (max {worst:.3e} over {} branches)", en.solutions.len()));
    Ok(ch)
}
