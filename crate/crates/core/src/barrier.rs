//! The dissipative barrier `iγ·χ_[0,R]`: closed-form Jost function, the
//! fixed-point family whose solutions are its eigenvalues, enumeration with
//! the guaranteed index range, and a contour certificate of completeness.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branchmath::{arg_minus, sq_minus, sq_plus, Wide, C64};
use crate::error::{Error, Result};
use crate::jost::sinc;
use crate::spectra::{count_zeros_in_contour, AnalyticFn, Contour, ContourCount, Sample};

const C0: f64 = 600.0;
/// Cap on the number of fixed-point problems solved in one enumeration.
pub const J_MAX_CAP: u64 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BarrierSpec {
    pub gamma: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

impl BarrierSpec {
    pub fn new(gamma: f64, r: f64) -> Result<Self> {
        if !(gamma > 0.0) || !(r > 0.0) || !gamma.is_finite() || !r.is_finite() {
            return Err(Error::InvalidParameter(format!("barrier needs γ > 0 and R > 0, got γ = {gamma}, R = {r}")));
        }
        Ok(Self { gamma, r })
    }

    /// `R ≥ 600(γ^{3/4} + γ^{−3/4})`: the fixed-point maps are contractions
    /// of their sectors.
    pub fn satisfies_bigr(&self) -> bool {
        self.r >= bigr_threshold(self.gamma)
    }

    /// `M_R = ⌊γR²/(32π log R)⌋`, the guaranteed index range.
    pub fn m_r(&self) -> u64 {
        if self.r <= 1.0 {
            return 0;
        }
        (self.gamma * self.r * self.r / (32.0 * std::f64::consts::PI * self.r.ln())).floor() as u64
    }

    pub fn l1_norm(&self) -> f64 {
        self.gamma * self.r
    }

    /// The same operator after the dilation `x ↦ x/s`: `(s²γ, R/s)`.
    pub fn dilated(&self, s: f64) -> Self {
        Self { gamma: s * s * self.gamma, r: self.r / s }
    }
}

pub fn bigr_threshold(gamma: f64) -> f64 {
    C0 * (gamma.powf(0.75) + gamma.powf(-0.75))
}

fn iu() -> C64 {
    C64::new(0.0, 1.0)
}

/// `φ_R(z) = (z − s)e^{iRs} − (z + s)e^{−iRs}` with `s = sq₊(z² − iγ)`,
/// together with the size of its two terms.
pub fn phi_r_sample(spec: &BarrierSpec, z: C64) -> Sample {
    phi_r_at(spec, z, sq_plus(z * z - iu() * spec.gamma))
}

/// `φ_R` with `s` supplied. Rebuilding `s` from `z` loses about
/// `γ/|s|²` ulps when `|s|² ≪ γ`; `φ_R` is odd in `s`, so either root works.
pub fn phi_r_at(spec: &BarrierSpec, z: C64, s: C64) -> Sample {
    let ep = Wide::exp(iu() * spec.r * s);
    let em = Wide::exp(-iu() * spec.r * s);
    let a = ep * (z - s);
    let b = em * (z + s);
    Sample { value: a - b, scale: a.abs_wide() + b.abs_wide() }
}

pub fn phi_r(spec: &BarrierSpec, z: C64) -> Wide {
    phi_r_sample(spec, z).value
}

/// `e₊(0, z) = e^{iRz}[cos(Rs) − izR·sin(Rs)/(Rs)]`, entire in `z`.
pub fn jost_closed_form(spec: &BarrierSpec, z: C64) -> Sample {
    let phase = Wide::exp(iu() * spec.r * z);
    let r = reduced_jost(spec, z);
    Sample { value: r.value * phase, scale: r.scale * phase.abs() }
}

/// `cos(Rs) − iz·sin(Rs)/s`, i.e. `e^{−iRz}e₊(0, z)`: same zeros, no
/// oscillating prefactor.
pub fn reduced_jost(spec: &BarrierSpec, z: C64) -> Sample {
    let s = sq_plus(z * z - iu() * spec.gamma);
    let rs = s * spec.r;
    if rs.norm() < 1.0 {
        let c = rs.cos();
        let t = iu() * z * spec.r * sinc(rs);
        return Sample { value: Wide::new(c - t), scale: Wide::from_real(c.norm() + t.norm() + f64::MIN_POSITIVE) };
    }
    let ep = Wide::exp(iu() * rs);
    let em = Wide::exp(-iu() * rs);
    let zs = z / s;
    let a = ep * ((1.0 - zs) * 0.5);
    let b = em * ((1.0 + zs) * 0.5);
    Sample { value: a + b, scale: a.abs_wide() + b.abs_wide() }
}

/// The reduced Jost function as an [`AnalyticFn`].
pub struct BarrierJostFn {
    pub spec: BarrierSpec,
}

impl AnalyticFn for BarrierJostFn {
    fn sample(&self, z: C64) -> Result<Sample> {
        Ok(reduced_jost(&self.spec, z))
    }

    fn phase_rate(&self) -> f64 {
        self.spec.r * 1.5 + 1.0
    }

    fn phase_rate_at(&self, z: C64) -> f64 {
        // e^{±iRs} rotate at rate R·|ds/dz| = R·|z/s|
        let s = sq_plus(z * z - iu() * self.spec.gamma).norm().max(1.0 / self.spec.r);
        self.spec.r * (z.norm() / s).max(1.0) + 1.0
    }
}

/// `h(w) = (sq₋(w²+iγ) − w)/(sq₋(w²+iγ) + w) = (sq₋(w²+iγ) − w)²/(iγ)`.
fn h_of_w(spec: &BarrierSpec, w: C64) -> Result<C64> {
    let t = sq_minus(w * w + iu() * spec.gamma) - w;
    let h = t * t / (iu() * spec.gamma);
    if h.norm() == 0.0 || !h.re.is_finite() || !h.im.is_finite() {
        return Err(Error::CutCollision(w));
    }
    Ok(h)
}

/// `A(w) = log|h(w)|`.
pub fn a_of_w(spec: &BarrierSpec, w: C64) -> Result<f64> {
    Ok(h_of_w(spec, w)?.norm().ln())
}

/// `B_j(w) = arg₋ h(w) + 2πj`.
pub fn b_of_w(spec: &BarrierSpec, w: C64, j: u64) -> Result<f64> {
    Ok(arg_minus(h_of_w(spec, w)?) + std::f64::consts::TAU * j as f64)
}

/// `G_{j,R}(w) = (−B_j(w) + iA(w))/(2R)`.
pub fn g_map(spec: &BarrierSpec, j: u64, w: C64) -> Result<C64> {
    let h = h_of_w(spec, w)?;
    let a = h.norm().ln();
    let b = arg_minus(h) + std::f64::consts::TAU * j as f64;
    Ok(C64::new(-b, a) / (2.0 * spec.r))
}

/// `|dG/dw| = 1/(R·|sq₋(w²+iγ)|)`.
pub fn contraction_factor(spec: &BarrierSpec, w: C64) -> f64 {
    1.0 / (spec.r * sq_minus(w * w + iu() * spec.gamma).norm())
}

/// `Re w ≤ 0 ≤ Im w` and `|Re w| ≥ 2·Im w`.
pub fn in_f_infinity(w: C64) -> bool {
    w.re <= 0.0 && w.im >= 0.0 && -w.re >= 2.0 * w.im
}

/// `w ∈ F_∞` and `B_j(w) ≥ 2|A(w)|`.
pub fn in_sector(spec: &BarrierSpec, w: C64, j: u64) -> Result<bool> {
    if !in_f_infinity(w) {
        return Ok(false);
    }
    Ok(b_of_w(spec, w, j)? >= 2.0 * a_of_w(spec, w)?.abs())
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FixedPointSolution {
    pub j: u64,
    pub w: C64,
    /// `w² + iγ`.
    pub lambda: C64,
    /// `sq₋(λ)`, the zero of the Jost function.
    pub z: C64,
    pub iterations: usize,
    pub residual_fp: f64,
    /// `|φ_R(z)|` relative to the size of its two terms.
    pub residual_phi: f64,
    /// Largest `|dG/dw|` seen along the iteration.
    pub contraction: f64,
    /// `−γ/2 ≤ Im w² ≤ 0` and `Im λ > 0`.
    pub in_spectrum: bool,
    /// `Im w > 0` and `Im λ > 0`: λ is an eigenvalue.
    pub eigenvalue: bool,
    /// `j ≤ M_R`.
    pub guaranteed: bool,
}

/// Banach iteration `w ← G_{j,R}(w)` from `w₀ = −πj/R`.
pub fn solve_fixed_point(spec: &BarrierSpec, j: u64, tol: f64) -> Result<FixedPointSolution> {
    if j == 0 {
        return Err(Error::InvalidParameter("branch index starts at 1".into()));
    }
    let mut w = C64::new(-std::f64::consts::PI * j as f64 / spec.r, 0.0);
    let mut contraction: f64 = 0.0;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < 500 {
        contraction = contraction.max(contraction_factor(spec, w));
        let next = g_map(spec, j, w)?;
        iterations += 1;
        let step = (next - w).norm();
        w = next;
        if step <= tol * (1.0 + w.norm()) {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::FixedPointNonConvergence { j, iterations, contraction });
    }
    contraction = contraction.max(contraction_factor(spec, w));
    if !in_sector(spec, w, j)? {
        return Err(Error::SectorViolation { j, w });
    }
    let residual_fp = (g_map(spec, j, w)? - w).norm();
    let lambda = w * w + iu() * spec.gamma;
    let z = sq_minus(lambda);
    let phi = phi_r_at(spec, z, w);
    let w2 = w * w;
    Ok(FixedPointSolution {
        j,
        w,
        lambda,
        z,
        iterations,
        residual_fp,
        residual_phi: phi.normalized(),
        contraction,
        in_spectrum: -spec.gamma / 2.0 <= w2.im && w2.im <= 0.0 && lambda.im > 0.0,
        eigenvalue: w.im > 0.0 && lambda.im > 0.0,
        guaranteed: j <= spec.m_r(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    pub spec: BarrierSpec,
    pub m_r: u64,
    pub solutions: Vec<FixedPointSolution>,
    pub failures: Vec<(u64, String)>,
    /// The requested range was cut at [`J_MAX_CAP`].
    pub capped: bool,
}

impl Enumeration {
    pub fn eigenvalues(&self) -> impl Iterator<Item = &FixedPointSolution> {
        self.solutions.iter().filter(|s| s.eigenvalue)
    }

    pub fn in_spectrum_count(&self) -> usize {
        self.solutions.iter().filter(|s| s.in_spectrum).count()
    }
}

fn solve_range(spec: &BarrierSpec, lo: u64, hi: u64, tol: f64) -> (Vec<FixedPointSolution>, Vec<(u64, String)>) {
    let results: Vec<(u64, Result<FixedPointSolution>)> =
        (lo..=hi).into_par_iter().map(|j| (j, solve_fixed_point(spec, j, tol))).collect();
    let mut ok = Vec::with_capacity(results.len());
    let mut bad = vec![];
    for (j, r) in results {
        match r {
            Ok(s) => ok.push(s),
            Err(e) => bad.push((j, e.to_string())),
        }
    }
    (ok, bad)
}

/// Solutions for `j = 1 … j_max` (default `M_R`), in order of `j`.
pub fn enumerate_spectrum(spec: &BarrierSpec, j_max: Option<u64>, tol: f64) -> Enumeration {
    let m_r = spec.m_r();
    let want = j_max.unwrap_or(m_r);
    let capped = want > J_MAX_CAP;
    let (solutions, failures) = solve_range(spec, 1, want.min(J_MAX_CAP), tol);
    Enumeration { spec: *spec, m_r, solutions, failures, capped }
}

/// Solutions until the family leaves the upper half-plane: `Im λ_j`
/// decreases in `j`, so the scan stops once a block of indices past the
/// last eigenvalue has produced none.
pub fn enumerate_until_exit(spec: &BarrierSpec, tol: f64) -> Enumeration {
    let m_r = spec.m_r();
    let mut solutions = vec![];
    let mut failures = vec![];
    let mut lo = 1;
    let mut capped = false;
    loop {
        let block = (lo / 2).clamp(4096, 1 << 20);
        let hi = (lo + block - 1).min(J_MAX_CAP);
        let (ok, bad) = solve_range(spec, lo, hi, tol);
        let any = ok.iter().any(|s| s.eigenvalue);
        solutions.extend(ok);
        failures.extend(bad);
        if !any && lo > m_r {
            break;
        }
        if hi == J_MAX_CAP {
            capped = true;
            break;
        }
        lo = hi + 1;
    }
    // keep the family up to the last eigenvalue plus the first exit
    if let Some(last) = solutions.iter().rposition(|s| s.eigenvalue) {
        solutions.truncate((last + 2).min(solutions.len()));
    }
    Enumeration { spec: *spec, m_r, solutions, failures, capped }
}

/// Polygon around the part of the eigenvalue strip `{Re λ > 0, 0 < Im λ < γ}`
/// with `|z| ≤ x_max`, in the `z`-plane: the real segment `[0, x_max]`, chords
/// above the hyperbola `2xy = (1+η)γ`, and a ray slightly above the diagonal.
pub fn strip_contour(spec: &BarrierSpec, x_max: f64, chords: usize) -> Contour {
    let c = 0.5 * 1.05 * spec.gamma;
    let tilt = std::f64::consts::FRAC_PI_4 + 0.01;
    // hyperbola meets the ray where x·y = c with y = x·tan(tilt)
    let x_left = (c / tilt.tan()).sqrt();
    let x_right = x_max.max(2.0 * x_left);
    let mut v = vec![C64::new(0.0, 0.0), C64::new(x_right, 0.0)];
    // chords of the convex curve y = c/x lie above it; geometric spacing
    for k in 0..=chords {
        let x = x_right * (x_left / x_right).powf(k as f64 / chords as f64);
        v.push(C64::new(x, c / x));
    }
    Contour::polygon(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct CompletenessReport {
    pub contour_count: ContourCount,
    pub enumerated: usize,
    pub complete: bool,
}

/// Counts all zeros of the Jost function in the eigenvalue strip inside the
/// enclosure `|λ| ≤ (γR)²` and compares with the enumerated eigenvalues.
pub fn certify_enumeration(en: &Enumeration, tol: f64) -> Result<CompletenessReport> {
    let f = BarrierJostFn { spec: en.spec };
    let x_max = en.spec.l1_norm() * (1.0 + 1e-3);
    let contour = strip_contour(&en.spec, x_max, 64);
    let cc = count_zeros_in_contour(&f, &contour, 16, tol)?;
    let enumerated = en.eigenvalues().count();
    Ok(CompletenessReport { contour_count: cc, enumerated, complete: cc.count == enumerated as i64 && !en.capped })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoxCount {
    pub c1: f64,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub bound: f64,
    pub meets_bound: bool,
}

/// `C₁ = 4·max over the middle index range of (|λ_j|·log²R/R²)` or its
/// reciprocal, whichever is larger.
pub fn calibrate_c1(en: &Enumeration) -> f64 {
    let (lo, hi) = middle_range(&en.spec);
    let scale = en.spec.r.ln().powi(2) / (en.spec.r * en.spec.r);
    let m = en
        .solutions
        .iter()
        .filter(|s| s.j >= lo && s.j <= hi)
        .map(|s| {
            let t = s.lambda.norm() * scale;
            t.max(1.0 / t)
        })
        .fold(1.0, f64::max);
    4.0 * m
}

/// `⌈γR²/(64π log R)⌉ ≤ j ≤ ⌊γR²/(32π log R)⌋`.
pub fn middle_range(spec: &BarrierSpec) -> (u64, u64) {
    let phi = spec.gamma * spec.r * spec.r / spec.r.ln();
    ((phi / (64.0 * std::f64::consts::PI)).ceil() as u64, spec.m_r())
}

/// Eigenvalues in `Σ_R = {γ/2 ≤ Im λ ≤ γ, C₁⁻¹R²/log²R ≤ |λ| ≤ C₁R²/log²R}`
/// against the bound `γR²/(128π log R)`.
pub fn box_count(en: &Enumeration, c1: f64) -> BoxCount {
    let spec = en.spec;
    let base = spec.r * spec.r / spec.r.ln().powi(2);
    let (lo, hi) = (base / c1, base * c1);
    let count = en
        .eigenvalues()
        .filter(|s| {
            let m = s.lambda.norm();
            s.lambda.im >= spec.gamma / 2.0 && s.lambda.im <= spec.gamma && m >= lo && m <= hi
        })
        .count();
    let bound = spec.gamma * spec.r * spec.r / (128.0 * std::f64::consts::PI * spec.r.ln());
    BoxCount { c1, lo, hi, count, bound, meets_bound: count as f64 >= bound }
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub s: f64,
    pub pairs: usize,
    pub max_rel_diff: f64,
    pub count_match: bool,
}

/// Compares the eigenvalues of `(s²γ, R/s)` with `s²·` those of `(γ, R)`.
pub fn scaling_check(a: &Enumeration, b: &Enumeration, s: f64) -> ScalingReport {
    let ea: Vec<C64> = a.eigenvalues().map(|e| e.lambda).collect();
    let eb: Vec<C64> = b.eigenvalues().map(|e| e.lambda).collect();
    let n = ea.len().min(eb.len());
    let max_rel_diff = ea
        .iter()
        .zip(&eb)
        .map(|(x, y)| (x * (s * s) - y).norm() / y.norm())
        .fold(0.0, f64::max);
    ScalingReport { s, pairs: n, max_rel_diff, count_match: ea.len() == eb.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jost::jost_transfer_matrix;
    use crate::potentials::Potential;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn phi_identity_with_jost() {
        let spec = BarrierSpec::new(1.0, 3.0).unwrap();
        let q = Potential::barrier(1.0, 3.0);
        for z in [c(0.5, 0.2), c(-1.3, 0.7), c(2.0, 0.01)] {
            let s = sq_plus(z * z - iu());
            let e = jost_transfer_matrix(&q, z).unwrap().value_wide();
            let rhs = e * Wide::exp(-iu() * 3.0 * z) * (-2.0 * s);
            let phi = phi_r(&spec, z);
            assert!((phi - rhs).abs_ratio(&phi) < 1e-12);
            let cf = jost_closed_form(&spec, z).value;
            assert!((cf - e).abs_ratio(&e) < 1e-12);
        }
    }

    #[test]
    fn phi_vanishes_at_branch_point() {
        let spec = BarrierSpec::new(2.0, 5.0).unwrap();
        let z0 = sq_plus(c(0.0, 2.0));
        assert!(phi_r(&spec, z0).abs() < 1e-12);
        // the Jost function itself does not vanish there
        assert!(jost_closed_form(&spec, z0).normalized() > 1e-3);
    }

    #[test]
    fn a_at_origin_and_sign() {
        let spec = BarrierSpec::new(1.0, 1200.0).unwrap();
        assert!(a_of_w(&spec, c(0.0, 0.0)).unwrap().abs() < 1e-15);
        for w in [c(-1.0, 0.1), c(-0.01, 0.0), c(-5.0, 2.4)] {
            assert!(a_of_w(&spec, w).unwrap() >= 0.0);
        }
    }

    #[test]
    fn first_branch_converges() {
        let spec = BarrierSpec::new(1.0, 1200.0).unwrap();
        assert!(spec.satisfies_bigr());
        assert_eq!(spec.m_r(), 2020);
        let s = solve_fixed_point(&spec, 1, 1e-12).unwrap();
        assert!(s.residual_phi < 1e-10);
        assert!(s.in_spectrum && s.eigenvalue && s.guaranteed);
        assert!(s.iterations < 30);
        assert!(s.contraction < 1.0);
        let b = b_of_w(&spec, s.w, 1).unwrap();
        assert!(b >= std::f64::consts::PI && b < 3.0 * std::f64::consts::PI);
    }

    #[test]
    fn small_barrier_count_matches_zero_search() {
        use crate::spectra::{find_spectrum, JostFn};
        let spec = BarrierSpec::new(1.0, 3.0).unwrap();
        let q = Potential::barrier(1.0, 3.0);
        let found = find_spectrum(&q, 1e-10).unwrap();
        let f = BarrierJostFn { spec };
        let cc = count_zeros_in_contour(&f, &strip_contour(&spec, 3.01, 32), 16, 1e-12).unwrap();
        assert_eq!(cc.count as usize, found.eigenvalues.len());
        let _ = JostFn::new(&q).unwrap();
    }
}
