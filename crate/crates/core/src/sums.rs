//! Eigenvalue sums: Lieb–Thirring `S_ε`, Jensen `J`, and the two-parameter
//! family `S_{α,β}`, with the elementary inequalities between them.

use serde::{Deserialize, Serialize};

use crate::barrier::Enumeration;
use crate::branchmath::{dist_to_halfline, im_sqrt_plus, C64};
use crate::error::{Error, Result};
use crate::spectra::SpectrumReport;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SumSpec {
    /// `Σ dist(λ,ℝ₊)/|λ|^{(1−ε)/2}`.
    SEps { eps: f64 },
    /// `Σ Im √λ`.
    Jensen,
    /// `(Σ |λ|^α (dist(λ,ℝ₊)/|λ|)^β)^{1/(2α)}`.
    SAlphaBeta { alpha: f64, beta: f64 },
}

impl SumSpec {
    fn validate(&self) -> Result<()> {
        match *self {
            SumSpec::SEps { eps } if !(eps >= 0.0) => Err(Error::InvalidParameter(format!("ε must be ≥ 0, got {eps}"))),
            SumSpec::SAlphaBeta { alpha, beta } if !(alpha > 0.0 && beta > 0.0) => {
                Err(Error::InvalidParameter(format!("α, β must be positive, got ({alpha}, {beta})")))
            }
            _ => Ok(()),
        }
    }

    pub fn term(&self, lambda: C64) -> f64 {
        match *self {
            SumSpec::SEps { eps } => dist_to_halfline(lambda) / lambda.norm().powf(0.5 * (1.0 - eps)),
            SumSpec::Jensen => im_sqrt_plus(lambda),
            SumSpec::SAlphaBeta { alpha, beta } => {
                let m = lambda.norm();
                m.powf(alpha) * (dist_to_halfline(lambda) / m).powf(beta)
            }
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SumReport {
    pub spec: SumSpec,
    /// `S_ε`, `J`, or `S_{α,β}` itself.
    pub value: f64,
    /// The plain sum of terms; differs from `value` only for `S_{α,β}`.
    pub raw: f64,
    pub n_terms: u64,
    /// Part of the spectrum could not be resolved and is missing from the sum.
    pub unresolved_flag: bool,
}

/// A point of the spectrum with its algebraic multiplicity.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub lambda: C64,
    pub multiplicity: u32,
}

/// Neumaier-compensated sum of the terms in order of decreasing size, so
/// the result does not depend on the input order.
pub fn stable_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| b.abs().total_cmp(&a.abs()));
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for t in terms {
        let u = s + t;
        if s.abs() >= t.abs() {
            c += (s - u) + t;
        } else {
            c += (t - u) + s;
        }
        s = u;
    }
    s + c
}

pub fn eval_sum(points: &[SpectralPoint], spec: SumSpec, unresolved: bool) -> Result<SumReport> {
    spec.validate()?;
    let mut terms = Vec::with_capacity(points.len());
    let mut n = 0;
    for p in points {
        if p.lambda.im == 0.0 && p.lambda.re >= 0.0 {
            return Err(Error::InvalidParameter(format!("λ = {} lies on the half-line", p.lambda)));
        }
        terms.push(spec.term(p.lambda) * p.multiplicity as f64);
        n += p.multiplicity as u64;
    }
    let raw = stable_sum(terms);
    let value = match spec {
        SumSpec::SAlphaBeta { alpha, .. } => raw.powf(1.0 / (2.0 * alpha)),
        _ => raw,
    };
    Ok(SumReport { spec, value, raw, n_terms: n, unresolved_flag: unresolved })
}

pub fn points_from_report(r: &SpectrumReport) -> Vec<SpectralPoint> {
    r.eigenvalues.iter().map(|e| SpectralPoint { lambda: e.lambda, multiplicity: e.multiplicity }).collect()
}

/// Eigenvalues of a barrier enumeration; `guaranteed_only` keeps `j ≤ M_R`.
pub fn points_from_enumeration(en: &Enumeration, guaranteed_only: bool) -> Vec<SpectralPoint> {
    en.eigenvalues()
        .filter(|s| !guaranteed_only || s.guaranteed)
        .map(|s| SpectralPoint { lambda: s.lambda, multiplicity: 1 })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct EpsPairCheck {
    pub eps1: f64,
    pub eps2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub jensen: f64,
    pub s0: f64,
    /// Eigenvalues breaking `|λ|^{1/2}Im√λ ≤ dist(λ,ℝ₊) ≤ 2|λ|^{1/2}Im√λ`.
    pub termwise_violations: usize,
    pub j_le_s0: bool,
    pub s0_le_2j: bool,
    /// Every `|λ| ≤ ‖q‖₁²`; the ε-comparison needs it.
    pub enclosure_holds: bool,
    pub eps_pairs: Vec<EpsPairCheck>,
}

/// `J ≤ S₀ ≤ 2J` and `S_{ε₂} ≤ ‖q‖₁^{ε₂−ε₁}S_{ε₁}` for `ε₁ < ε₂`.
pub fn sandwich_checks(points: &[SpectralPoint], l1: f64, eps_pairs: &[(f64, f64)]) -> Result<SandwichReport> {
    let jensen = eval_sum(points, SumSpec::Jensen, false)?.value;
    let s0 = eval_sum(points, SumSpec::SEps { eps: 0.0 }, false)?.value;
    let slack = 1.0 + 1e-12;
    let termwise_violations = points
        .iter()
        .filter(|p| {
            let m = p.lambda.norm().sqrt() * im_sqrt_plus(p.lambda);
            let d = dist_to_halfline(p.lambda);
            !(m <= d * slack && d <= 2.0 * m * slack)
        })
        .count();
    let enclosure_holds = points.iter().all(|p| p.lambda.norm() <= l1 * l1 * slack);
    let mut checks = vec![];
    for &(e1, e2) in eps_pairs {
        let s1 = eval_sum(points, SumSpec::SEps { eps: e1 }, false)?.value;
        let s2 = eval_sum(points, SumSpec::SEps { eps: e2 }, false)?.value;
        let rhs = l1.powf(e2 - e1) * s1;
        checks.push(EpsPairCheck { eps1: e1, eps2: e2, lhs: s2, rhs, holds: s2 <= rhs * slack });
    }
    Ok(SandwichReport {
        jensen,
        s0,
        termwise_violations,
        j_le_s0: jensen <= s0 * slack,
        s0_le_2j: s0 <= 2.0 * jensen * slack,
        enclosure_holds,
        eps_pairs: checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(re: f64, im: f64) -> SpectralPoint {
        SpectralPoint { lambda: C64::new(re, im), multiplicity: 1 }
    }

    #[test]
    fn empty_and_single() {
        for spec in [SumSpec::Jensen, SumSpec::SEps { eps: 0.3 }, SumSpec::SAlphaBeta { alpha: 1.0, beta: 1.0 }] {
            assert_eq!(eval_sum(&[], spec, false).unwrap().value, 0.0);
        }
        let p = [pt(-1.0, 0.0)];
        assert!((eval_sum(&p, SumSpec::Jensen, false).unwrap().value - 1.0).abs() < 1e-15);
        for eps in [0.0, 0.4, 0.9] {
            assert!((eval_sum(&p, SumSpec::SEps { eps }, false).unwrap().value - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn half_line_rejected() {
        assert!(eval_sum(&[pt(2.0, 0.0)], SumSpec::Jensen, false).is_err());
    }

    #[test]
    fn multiplicity_counts() {
        let p = [SpectralPoint { lambda: C64::new(-4.0, 0.0), multiplicity: 3 }];
        let r = eval_sum(&p, SumSpec::Jensen, false).unwrap();
        assert_eq!(r.n_terms, 3);
        assert!((r.value - 6.0).abs() < 1e-14);
    }

    #[test]
    fn generalized_root() {
        let p = [pt(-4.0, 0.0)];
        let r = eval_sum(&p, SumSpec::SAlphaBeta { alpha: 1.0, beta: 1.0 }, false).unwrap();
        assert!((r.raw - 4.0).abs() < 1e-14);
        assert!((r.value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn eps_pair_equality_on_enclosure_boundary() {
        // |λ| = ‖q‖₁²: both sides agree
        let l1: f64 = 2.0;
        let p = [SpectralPoint { lambda: C64::from_polar(l1 * l1, 2.0), multiplicity: 1 }];
        let r = sandwich_checks(&p, l1, &[(0.1, 0.5)]).unwrap();
        let c = &r.eps_pairs[0];
        assert!((c.lhs - c.rhs).abs() < 1e-13 * c.rhs);
        assert!(c.holds && r.j_le_s0 && r.s0_le_2j);
    }
}
