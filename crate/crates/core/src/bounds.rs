//! Explicit upper and lower bounds on Jensen and Lieb–Thirring sums, each
//! evaluated against a computed left-hand side.

use std::f64::consts::PI;

use serde::Serialize;

use crate::barrier::{bigr_threshold, BarrierSpec, J_MAX_CAP};
use crate::error::{Error, Result};
use crate::potentials::{Potential, WeightPair};
use crate::sums::{eval_sum, SpectralPoint, SumSpec};

/// `κ = log(3/2)`, the cap on `log(1+δ)` in the closed-form recipes.
pub const KAPPA: f64 = 0.405_465_108_108_164_4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct BoundInputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(rename = "R", skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_l1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub norm_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub weight: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    /// `rhs − lhs` for upper bounds, `lhs − rhs` for lower bounds.
    pub margin: f64,
    pub direction: Direction,
    pub preconditions_met: bool,
    pub inputs: BoundInputs,
}

impl BoundReport {
    pub fn new(name: &str, direction: Direction, lhs: f64, rhs: f64, preconditions_met: bool, inputs: BoundInputs) -> Self {
        let margin = match direction {
            Direction::Upper => rhs - lhs,
            Direction::Lower => lhs - rhs,
        };
        Self { name: name.into(), lhs, rhs, margin, direction, preconditions_met, inputs }
    }

    /// `None` when the preconditions fail and the report is informational.
    pub fn passed(&self) -> Option<bool> {
        self.preconditions_met.then_some(self.margin >= 0.0)
    }

    pub fn failed(&self) -> bool {
        self.passed() == Some(false)
    }
}

/// Solves `â(1/y)·‖q‖_a = log(1+δ)` for `y`.
pub fn solve_y(w: &WeightPair, norm_a: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("δ must lie in (0,1), got {delta}")));
    }
    if !(norm_a > 0.0) {
        return Err(Error::InvalidParameter("‖q‖_a must be positive to determine y".into()));
    }
    let target = delta.ln_1p() / norm_a;
    let x = w
        .a_hat_inverse(target)
        .ok_or_else(|| Error::WeightCondition(format!("â stays below {target:e}; y has no bracket")))?;
    Ok(1.0 / x)
}

/// `y·log((1+δ)/(1−δ)²) + (4/π)‖q‖_a∫_{1/y}^∞ dx/(x a(x))` together with `y`.
pub fn jensen_weighted_rhs(w: &WeightPair, norm_a: f64, delta: f64) -> Result<(f64, f64)> {
    if norm_a == 0.0 {
        return Ok((0.0, 0.0));
    }
    let y = solve_y(w, norm_a, delta)?;
    let tail = w.tail_integral(1.0 / y)?;
    let rhs = y * ((1.0 + delta) / ((1.0 - delta) * (1.0 - delta))).ln() + 4.0 / PI * norm_a * tail;
    Ok((rhs, y))
}

/// The weighted Jensen bound for a given `δ ∈ (0,1)`, against the computed `J`.
pub fn bound_ltgente(q: &Potential, w: &WeightPair, delta: f64, jensen: f64) -> Result<BoundReport> {
    w.check_hypotheses()?;
    let norm_a = q.weighted_norm(w)?;
    let (rhs, y) = jensen_weighted_rhs(w, norm_a, delta)?;
    let inputs = BoundInputs {
        delta: Some(delta),
        y: Some(y),
        norm_a: Some(norm_a),
        weight: Some(w.name().into()),
        ..Default::default()
    };
    Ok(BoundReport::new("jensen_weighted", Direction::Upper, jensen, rhs, true, inputs))
}

/// `δ = exp(min(‖q‖_a/2, κ)) − 1`.
pub fn poly_delta(norm_a: f64) -> f64 {
    (0.5 * norm_a).min(KAPPA).exp_m1()
}

/// `(4/π)N log(1+N) + (9/p)N + 2` with `N = ‖q‖_a`, `a = 1 + x^p`.
pub fn poly_rhs(norm_a: f64, p: f64) -> f64 {
    4.0 / PI * norm_a * norm_a.ln_1p() + 9.0 / p * norm_a + 2.0
}

/// The polynomial-weight Jensen bound, `p ∈ (0,1)`.
pub fn bound_poly(q: &Potential, p: f64, jensen: f64) -> Result<BoundReport> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0,1), got {p}")));
    }
    let norm_a = q.weighted_norm(&WeightPair::poly(p))?;
    let delta = poly_delta(norm_a);
    let y = if norm_a > 0.0 { Some(solve_y(&WeightPair::poly(p), norm_a, delta)?) } else { None };
    let inputs = BoundInputs { p: Some(p), delta: Some(delta), y, norm_a: Some(norm_a), ..Default::default() };
    Ok(BoundReport::new("jensen_poly", Direction::Upper, jensen, poly_rhs(norm_a, p), norm_a.is_finite(), inputs))
}

/// `δ = exp(min(‖q‖₁R, κ)) − 1`.
pub fn compact_delta(l1: f64, r: f64) -> f64 {
    (l1 * r).min(KAPPA).exp_m1()
}

/// `7[1/R + ‖q‖₁(1 + log(1+‖q‖₁) + log R)]`.
pub fn compact_rhs(l1: f64, r: f64) -> f64 {
    7.0 * (1.0 / r + l1 * (1.0 + l1.ln_1p() + r.ln()))
}

/// The admissible `R` minimizing [`compact_rhs`]: `1/‖q‖₁` pushed up to the
/// support end and above 1.
pub fn optimal_compact_r(support_end: f64, l1: f64) -> f64 {
    let free = if l1 > 0.0 { 1.0 / l1 } else { 2.0 };
    free.max(support_end).max(1.0 + 1e-9)
}

/// The compact-support Jensen bound; `r = None` picks [`optimal_compact_r`].
pub fn bound_compact(q: &Potential, r: Option<f64>, jensen: f64) -> Result<BoundReport> {
    let end = q
        .support_end()
        .ok_or_else(|| Error::InvalidParameter("the compact-support bound needs a compactly supported potential".into()))?;
    let l1 = q.l1_norm()?;
    let r = r.unwrap_or_else(|| optimal_compact_r(end, l1));
    let ok = r > 1.0 && end <= r;
    let delta = compact_delta(l1, r);
    let y = (l1 > 0.0).then(|| l1 / delta.ln_1p());
    let inputs = BoundInputs { r: Some(r), delta: Some(delta), y, norm_l1: Some(l1), ..Default::default() };
    Ok(BoundReport::new("jensen_compact", Direction::Upper, jensen, compact_rhs(l1, r), ok, inputs))
}

/// The weighted bound evaluated with the compact-support weight and the
/// closed-form `δ`; never larger than [`compact_rhs`]. Since `â(x) = x` on
/// `[0, R]`, `y = ‖q‖₁/log(1+δ)` in closed form. For `R < e²` the weight's
/// `â` is not monotone just past `R` and the report is informational.
pub fn bound_compact_weighted(q: &Potential, r: f64, jensen: f64) -> Result<BoundReport> {
    let l1 = q.l1_norm()?;
    let w = WeightPair::compact_support(r);
    let delta = compact_delta(l1, r);
    let (rhs, y) = if l1 > 0.0 {
        let y = l1 / delta.ln_1p();
        let a1 = y * ((1.0 + delta) / ((1.0 - delta) * (1.0 - delta))).ln();
        (a1 + 4.0 / PI * l1 * w.tail_integral(1.0 / y)?, y)
    } else {
        (0.0, 0.0)
    };
    let ok = q.support_end().is_some_and(|e| e <= r) && r > 1.0 && w.check_hypotheses().is_ok();
    let inputs = BoundInputs {
        r: Some(r),
        delta: Some(delta),
        y: Some(y),
        norm_l1: Some(l1),
        norm_a: Some(l1),
        weight: Some(w.name().into()),
        ..Default::default()
    };
    Ok(BoundReport::new("jensen_compact_weighted", Direction::Upper, jensen, rhs, ok, inputs))
}

/// `R ≥ (4/(e²γ))(64π)^{2/ε} + 1`.
pub fn ranger1_threshold(gamma: f64, eps: f64) -> f64 {
    4.0 / (std::f64::consts::E.powi(2) * gamma) * (64.0 * PI).powf(2.0 / eps) + 1.0
}

pub fn s0_lower(spec: &BarrierSpec) -> f64 {
    spec.gamma * spec.r * spec.r.ln() / (16.0 * PI)
}

pub fn s_eps_lower(spec: &BarrierSpec, eps: f64) -> f64 {
    (spec.gamma * spec.r).powf(1.0 + eps) / (256.0 * PI * eps * spec.r.ln().powf(eps))
}

pub fn p_sum_lower(spec: &BarrierSpec, p: f64) -> f64 {
    spec.gamma.powf(p) * spec.r * spec.r.ln() / (8.0 * PI * 2f64.powf(p))
}

/// `Σ dist(λ,ℝ₊)^p/|λ|^{1/2}`.
pub fn p_sum(points: &[SpectralPoint], p: f64) -> f64 {
    let terms = points
        .iter()
        .map(|pt| crate::branchmath::dist_to_halfline(pt.lambda).powf(p) / pt.lambda.norm().sqrt() * pt.multiplicity as f64)
        .collect();
    crate::sums::stable_sum(terms)
}

/// Lower bounds for the barrier: `S₀`, `S_ε` (when `eps` is given) and the
/// `p`-sums. Any subset of the spectrum gives a valid left-hand side, since
/// every term is positive.
pub fn lower_bounds_barrier(
    spec: &BarrierSpec,
    eps: Option<f64>,
    ps: &[f64],
    points: &[SpectralPoint],
) -> Result<Vec<BoundReport>> {
    let bigr = spec.satisfies_bigr();
    let base = BoundInputs { gamma: Some(spec.gamma), r: Some(spec.r), norm_l1: Some(spec.l1_norm()), ..Default::default() };
    let mut out = vec![];
    let s0 = eval_sum(points, SumSpec::SEps { eps: 0.0 }, false)?.value;
    out.push(BoundReport::new("s0_lower", Direction::Lower, s0, s0_lower(spec), bigr, base.clone()));
    if let Some(eps) = eps {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("ε must lie in (0,1), got {eps}")));
        }
        let se = eval_sum(points, SumSpec::SEps { eps }, false)?.value;
        let ok = bigr && spec.r >= ranger1_threshold(spec.gamma, eps);
        let inputs = BoundInputs { eps: Some(eps), ..base.clone() };
        out.push(BoundReport::new("s_eps_lower", Direction::Lower, se, s_eps_lower(spec, eps), ok, inputs));
    }
    for &p in ps {
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("p must be ≥ 1, got {p}")));
        }
        let inputs = BoundInputs { p: Some(p), ..base.clone() };
        out.push(BoundReport::new("p_sum_lower", Direction::Lower, p_sum(points, p), p_sum_lower(spec, p), bigr, inputs));
    }
    Ok(out)
}

/// `γR log R/(32π) ≤ J ≤ 42·γR log R` for the barrier.
pub fn jensen_two_sided(spec: &BarrierSpec, jensen: f64) -> [BoundReport; 2] {
    let unit = spec.gamma * spec.r * spec.r.ln();
    let ok = spec.satisfies_bigr();
    let inputs = BoundInputs { gamma: Some(spec.gamma), r: Some(spec.r), norm_l1: Some(spec.l1_norm()), ..Default::default() };
    [
        BoundReport::new("jensen_barrier_lower", Direction::Lower, jensen, unit / (32.0 * PI), ok, inputs.clone()),
        BoundReport::new("jensen_barrier_upper", Direction::Upper, jensen, 42.0 * unit, ok, inputs),
    ]
}

/// A barrier meeting both the contraction threshold and the `ε`-condition.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EpsTriple {
    pub eps: f64,
    pub gamma: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub m_r: f64,
    pub ranger1: f64,
    pub bigr: f64,
    /// `M_R` fits under the enumeration cap.
    pub feasible: bool,
}

/// Smallest admissible `R` for the given `γ`.
pub fn eps_triple_for_gamma(eps: f64, gamma: f64) -> EpsTriple {
    let ranger1 = ranger1_threshold(gamma, eps);
    let bigr = bigr_threshold(gamma);
    let r = ranger1.max(bigr);
    let m_r = gamma * r * r / (32.0 * PI * r.ln());
    EpsTriple { eps, gamma, r, m_r, ranger1, bigr, feasible: m_r <= J_MAX_CAP as f64 }
}

/// The admissible triple with the fewest guaranteed eigenvalues, by a
/// logarithmic scan over `γ` followed by golden-section refinement.
pub fn eps_triple_search(eps: f64) -> EpsTriple {
    let cost = |lg: f64| eps_triple_for_gamma(eps, 10f64.powf(lg)).m_r.ln();
    let grid: Vec<f64> = (0..=360).map(|k| -6.0 + k as f64 * (18.0 / 360.0)).collect();
    let best = grid.iter().copied().min_by(|a, b| cost(*a).total_cmp(&cost(*b))).unwrap_or(0.0);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (best - 0.05, best + 0.05);
    for _ in 0..80 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if cost(c) < cost(d) {
            b = d;
        } else {
            a = c;
        }
    }
    eps_triple_for_gamma(eps, 10f64.powf(0.5 * (a + b)))
}

/// Ratios `S_ε/‖q‖₁^{1+ε}` per family member and their maximum, an
/// empirical lower estimate of the optimal constant.
pub fn empirical_k_eps(family: &[(f64, Vec<SpectralPoint>)], eps: f64) -> Result<(f64, Vec<f64>)> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("ε must be positive, got {eps}")));
    }
    let mut ratios = vec![];
    for (l1, pts) in family {
        let s = eval_sum(pts, SumSpec::SEps { eps }, false)?.value;
        ratios.push(if *l1 > 0.0 { s / l1.powf(1.0 + eps) } else { 0.0 });
    }
    Ok((ratios.iter().copied().fold(0.0, f64::max), ratios))
}

#[derive(Clone, Debug, Serialize)]
pub struct GenSumRow {
    pub alpha: f64,
    pub beta: f64,
    /// The supremum over all potentials is finite for these parameters.
    pub finite_predicted: bool,
    pub r: Vec<f64>,
    /// `S_{α,β}/‖q‖₁` per family member.
    pub ratio: Vec<f64>,
    /// `log(ratio_last/ratio_first)/log(R_last/R_first)`.
    pub slope: f64,
    /// `((γR)^{2α} log R/(16π))^{1/(2α)}/‖q‖₁` for `β = 1`, `α ≤ ½`.
    pub lower_envelope: Option<Vec<f64>>,
}

/// `S_{α,β}/‖q‖₁` across a barrier family with growing `R`.
pub fn generltsup_experiment(params: &[(f64, f64)], family: &[(BarrierSpec, Vec<SpectralPoint>)]) -> Result<Vec<GenSumRow>> {
    let mut rows = vec![];
    for &(alpha, beta) in params {
        let mut r = vec![];
        let mut ratio = vec![];
        let mut env = vec![];
        for (spec, pts) in family {
            let s = eval_sum(pts, SumSpec::SAlphaBeta { alpha, beta }, false)?.value;
            let l1 = spec.l1_norm();
            r.push(spec.r);
            ratio.push(s / l1);
            env.push(((l1).powf(2.0 * alpha) * spec.r.ln() / (16.0 * PI)).powf(1.0 / (2.0 * alpha)) / l1);
        }
        let slope = match (ratio.first(), ratio.last(), r.first(), r.last()) {
            (Some(a), Some(b), Some(ra), Some(rb)) if rb > ra => (b / a).ln() / (rb / ra).ln(),
            _ => 0.0,
        };
        rows.push(GenSumRow {
            alpha,
            beta,
            finite_predicted: alpha > 0.5 && beta >= 1.0,
            r,
            ratio,
            slope,
            lower_envelope: (beta == 1.0 && alpha <= 0.5).then_some(env),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::branchmath::C64;

    #[test]
    fn poly_integral_closed_form() {
        let w = WeightPair::poly(0.5);
        for y in [1.0f64, 3.0, 17.0] {
            let closed = (1.0 / 0.5) * (1.0 + y.powf(-0.5)).ln() + f64::ln(y);
            assert!((w.tail_integral(1.0 / y).unwrap() - closed).abs() < 1e-13 * closed);
        }
    }

    #[test]
    fn small_norm_gives_unit_y() {
        let w = WeightPair::poly(0.5);
        for n in [0.1, 0.5, 0.8] {
            let y = solve_y(&w, n, poly_delta(n)).unwrap();
            assert!((y - 1.0).abs() < 1e-12, "{n}: {y}");
        }
    }

    #[test]
    fn compact_weight_tail_is_log_r() {
        let r: f64 = 50.0;
        let w = WeightPair::compact_support(r);
        assert!((w.tail_integral(r).unwrap() - r.ln()).abs() < 1e-14);
    }

    #[test]
    fn compact_y_matches_closed_form() {
        let (l1, r) = (0.3, 20.0);
        let delta = compact_delta(l1, r);
        let y = solve_y(&WeightPair::compact_support(r), l1, delta).unwrap();
        assert!((y - l1 / delta.ln_1p()).abs() < 1e-12 * y);
    }

    #[test]
    fn zero_potential_bounds() {
        let q = Potential::zero();
        let p = bound_poly(&q, 0.5, 0.0).unwrap();
        assert_eq!(p.rhs, 2.0);
        let c = bound_compact(&q, Some(3.0), 0.0).unwrap();
        assert!((c.rhs - 7.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn s0_lower_value() {
        let spec = BarrierSpec::new(1.0, 1200.0).unwrap();
        assert!((s0_lower(&spec) - 169.27).abs() < 0.01);
        assert!((p_sum_lower(&spec, 1.0) - s0_lower(&spec)).abs() < 1e-12);
    }

    #[test]
    fn ranger1_for_half() {
        let t = ranger1_threshold(1.0, 0.5);
        assert!((t / 8.8e8 - 1.0).abs() < 0.01, "{t}");
    }

    #[test]
    fn weighted_never_exceeds_compact_closed_form() {
        let q = Potential::barrier(0.7, 2.5);
        for r in [2.5, 4.0, 30.0] {
            let w = bound_compact_weighted(&q, r, 0.0).unwrap();
            assert_eq!(w.preconditions_met, r > 7.39);
            assert!(w.rhs <= compact_rhs(0.7 * 2.5, r), "R = {r}");
        }
    }

    #[test]
    fn eps_triple_feasible_at_nine_tenths() {
        let t = eps_triple_search(0.9);
        assert!(t.feasible && t.r >= t.ranger1 && t.r >= t.bigr);
        assert!(t.m_r <= eps_triple_for_gamma(0.9, 1.0).m_r);
        assert!(t.m_r <= eps_triple_for_gamma(0.9, 4000.0).m_r);
    }

    #[test]
    fn lower_bound_precondition_gate() {
        let spec = BarrierSpec::new(1.0, 1200.0).unwrap();
        let pts = [SpectralPoint { lambda: C64::new(1.0, 0.5), multiplicity: 1 }];
        let reps = lower_bounds_barrier(&spec, Some(0.5), &[2.0], &pts).unwrap();
        assert!(reps[0].preconditions_met && reps[0].failed());
        assert_eq!(reps[1].passed(), None);
    }
}
