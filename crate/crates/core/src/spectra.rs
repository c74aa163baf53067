//! Zeros of Jost-type functions in the upper half-plane: argument-principle
//! counting on polygonal contours, quadtree localisation with Newton
//! polishing, and the shift and truncation limit experiments.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::branchmath::{Wide, C64};
use crate::error::{Error, Result};
use crate::jost::{jost_minus_step, jost_transfer_matrix, line_jost_coefficients, line_wronskian_wide};
use crate::potentials::{LinePotential, Potential, WeightPair};

/// A function value together with the size of the terms it was assembled
/// from; `|value|/scale` is small only near a zero.
#[derive(Clone, Copy, Debug)]
pub struct Sample {
    pub value: Wide,
    pub scale: Wide,
}

impl Sample {
    pub fn normalized(&self) -> f64 {
        self.value.abs_ratio(&self.scale)
    }
}

/// Something analytic in a region of the `z`-plane whose zeros we count.
pub trait AnalyticFn: Sync {
    fn sample(&self, z: C64) -> Result<Sample>;

    /// Rough upper bound for `|d arg f/dz|`, used to seed contour sampling.
    fn phase_rate(&self) -> f64;

    /// Local version of [`AnalyticFn::phase_rate`]; contour segments are
    /// bisected until their length times this rate is below `π/2`.
    fn phase_rate_at(&self, _z: C64) -> f64 {
        self.phase_rate()
    }
}

/// `e₊(0, z)` by transfer matrices.
pub struct JostFn<'a> {
    q: &'a Potential,
    rate: f64,
}

impl<'a> JostFn<'a> {
    pub fn new(q: &'a Potential) -> Result<Self> {
        let end = q.effective_end(1e-14)?;
        Ok(Self { q, rate: 2.0 * end + 2.0 * q.max_abs().sqrt() * end + 1.0 })
    }
}

impl AnalyticFn for JostFn<'_> {
    fn sample(&self, z: C64) -> Result<Sample> {
        let e = jost_transfer_matrix(self.q, z)?;
        Ok(Sample { value: e.value_wide(), scale: e.magnitude_wide() })
    }

    fn phase_rate(&self) -> f64 {
        self.rate
    }
}

/// The line Wronskian `W(z, 𝓆)`.
pub struct WronskianFn<'a> {
    line: &'a LinePotential,
    rate: f64,
}

impl<'a> WronskianFn<'a> {
    pub fn new(line: &'a LinePotential) -> Result<Self> {
        let (lo, hi) = line
            .support()
            .ok_or_else(|| Error::InvalidParameter("Wronskian zeros need compact support".into()))?;
        let vmax = line.left().max_abs().max(line.right().max_abs());
        let len = hi - lo;
        Ok(Self { line, rate: 2.0 * len + 2.0 * vmax.sqrt() * len + 1.0 })
    }
}

impl AnalyticFn for WronskianFn<'_> {
    fn sample(&self, z: C64) -> Result<Sample> {
        let r = jost_transfer_matrix(self.line.right(), z)?;
        let l = jost_transfer_matrix(self.line.left(), z)?;
        let value = line_wronskian_wide(self.line, z)?;
        let scale = r.magnitude_wide() * l.magnitude_wide() * (2.0 * (1.0 + z.norm()));
        Ok(Sample { value, scale })
    }

    fn phase_rate(&self) -> f64 {
        self.rate
    }
}

/// Closed polygon in the `z`-plane, traversed counter-clockwise.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Contour {
    pub vertices: Vec<C64>,
}

impl Contour {
    pub fn polygon(vertices: Vec<C64>) -> Self {
        Self { vertices }
    }

    pub fn rectangle(r: &Rect) -> Self {
        Self::polygon(vec![
            C64::new(r.x0, r.y0),
            C64::new(r.x1, r.y0),
            C64::new(r.x1, r.y1),
            C64::new(r.x0, r.y1),
        ])
    }

    fn edges(&self) -> impl Iterator<Item = (C64, C64)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }
}

/// Axis-parallel rectangle `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self { x0, x1, y0, y1 }
    }

    pub fn center(&self) -> C64 {
        C64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    pub fn size(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    pub fn contains(&self, z: C64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }

    /// Four children split at the fraction `t` of each side.
    fn split(&self, t: f64) -> [Rect; 4] {
        let xm = self.x0 + t * (self.x1 - self.x0);
        let ym = self.y0 + t * (self.y1 - self.y0);
        [
            Rect::new(self.x0, xm, self.y0, ym),
            Rect::new(xm, self.x1, self.y0, ym),
            Rect::new(self.x0, xm, ym, self.y1),
            Rect::new(xm, self.x1, ym, self.y1),
        ]
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ContourCount {
    pub count: i64,
    /// Smallest `|f|/scale` met on the contour.
    pub min_modulus: f64,
    pub evaluations: usize,
}

const MAX_DEPTH: u32 = 48;

fn phase_step(a: &Wide, b: &Wide) -> f64 {
    (b.mantissa() * a.mantissa().conj()).arg()
}

/// Winding of `f` along the segment from `za` to `zb`, bisecting until every
/// phase increment is below `π/2`.
fn segment_winding(
    f: &dyn AnalyticFn,
    za: C64,
    sa: Sample,
    zb: C64,
    sb: Sample,
    modulus_tol: f64,
) -> Result<(f64, f64, usize)> {
    let mut total = 0.0;
    let mut min_mod = f64::INFINITY;
    let mut evals = 0;
    let mut stack = vec![(za, sa, zb, sb, 0u32)];
    while let Some((a, fa, b, fb, depth)) = stack.pop() {
        let d = phase_step(&fa.value, &fb.value);
        let swept = (b - a).norm() * f.phase_rate_at(a).max(f.phase_rate_at(b));
        if d.abs() < std::f64::consts::FRAC_PI_2 && swept <= std::f64::consts::PI {
            total += d;
            continue;
        }
        if depth >= MAX_DEPTH {
            return Err(Error::PhaseStepFailure(0.5 * (a + b)));
        }
        let m = 0.5 * (a + b);
        let fm = f.sample(m)?;
        evals += 1;
        let nm = fm.normalized();
        min_mod = min_mod.min(nm);
        if nm <= modulus_tol {
            return Err(Error::MinModulus { z: m, modulus: nm });
        }
        // right half first so the left half is processed next
        stack.push((m, fm, b, fb, depth + 1));
        stack.push((a, fa, m, fm, depth + 1));
    }
    Ok((total, min_mod, evals))
}

/// Number of zeros of `f` inside a closed contour, counted with
/// multiplicity, by phase continuation.
///
/// `samples` is the minimum number of initial points per edge; edges are
/// sampled more densely when `f.phase_rate()` asks for it. Every sample must
/// satisfy `|f|/scale > 10·tol`.
pub fn count_zeros_in_contour(f: &dyn AnalyticFn, contour: &Contour, samples: usize, tol: f64) -> Result<ContourCount> {
    let modulus_tol = 10.0 * tol;
    let mut points = vec![];
    for (a, b) in contour.edges() {
        let len = (b - a).norm();
        let n = samples.max((len * f.phase_rate() * 2.0 / std::f64::consts::PI).ceil() as usize).max(2);
        for k in 0..n {
            points.push(a + (b - a) * (k as f64 / n as f64));
        }
    }
    if points.is_empty() {
        return Ok(ContourCount { count: 0, min_modulus: f64::INFINITY, evaluations: 0 });
    }
    let values: Vec<Sample> = points.par_iter().map(|&z| f.sample(z)).collect::<Result<_>>()?;
    let mut min_mod = f64::INFINITY;
    for (z, v) in points.iter().zip(&values) {
        let nm = v.normalized();
        if nm <= modulus_tol || !v.value.is_finite() {
            return Err(Error::MinModulus { z: *z, modulus: nm });
        }
        min_mod = min_mod.min(nm);
    }
    let n = points.len();
    let parts: Vec<(f64, f64, usize)> = (0..n)
        .into_par_iter()
        .map(|k| {
            let j = (k + 1) % n;
            segment_winding(f, points[k], values[k], points[j], values[j], modulus_tol)
        })
        .collect::<Result<_>>()?;
    let mut phase = 0.0;
    let mut evals = n;
    for (d, m, e) in parts {
        phase += d;
        min_mod = min_mod.min(m);
        evals += e;
    }
    let w = phase / std::f64::consts::TAU;
    let count = w.round();
    if (w - count).abs() > 0.1 {
        return Err(Error::NonIntegerWinding(w));
    }
    Ok(ContourCount { count: count as i64, min_modulus: min_mod, evaluations: evals })
}

/// Spectral enclosure radii.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnclosureReport {
    pub r_fls: f64,
    /// `ρ⁻¹` from the weighted norm; `Some(0)` when the weighted test proves
    /// the spectrum empty.
    pub rho_inv: Option<f64>,
    pub r: f64,
    pub empty: bool,
}

pub fn enclosure(q: &Potential, w: Option<&WeightPair>) -> Result<EnclosureReport> {
    let l1 = q.l1_norm()?;
    let r_fls = l1 * l1;
    let rho_inv = match w {
        None => None,
        Some(w) => {
            let norm = q.weighted_norm(w)?;
            if norm == 0.0 {
                Some(0.0)
            } else {
                match w.a_hat_inverse(std::f64::consts::LN_2 / norm) {
                    Some(x) => Some(1.0 / (x * x)),
                    None => Some(0.0),
                }
            }
        }
    };
    let r = rho_inv.map_or(r_fls, |ri| ri.min(r_fls));
    Ok(EnclosureReport { r_fls, rho_inv, r, empty: r == 0.0 })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub z: C64,
    pub lambda: C64,
    pub multiplicity: u32,
    /// `|f(z)|` at the refined root.
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct UnresolvedRegion {
    pub rect: Rect,
    /// Zero count inside, when the contour could be evaluated.
    pub count: Option<i64>,
    pub reason: String,
}

#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    /// Boxes smaller than this are reported as (possibly multiple) zeros.
    pub tol: f64,
    /// Lower edge of the search region; defaults to `1e−6·(1+√r)`.
    pub floor: Option<f64>,
    /// Minimum initial samples per contour edge.
    pub samples: usize,
    /// Normalized-modulus threshold for contour samples.
    pub modulus_tol: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self { tol: 1e-10, floor: None, samples: 8, modulus_tol: 1e-13 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroSearch {
    pub zeros: Vec<Eigenvalue>,
    pub total_count: i64,
    pub unresolved: Vec<UnresolvedRegion>,
    pub evaluations: usize,
}

const SPLIT_OFFSETS: [f64; 5] = [0.0137, -0.0211, 0.0307, -0.0419, 0.0583];

fn newton(f: &dyn AnalyticFn, start: C64, rect: &Rect) -> Option<(C64, f64)> {
    let mut z = start;
    for _ in 0..60 {
        let h = 1e-7 * (1.0 + z.norm());
        let fz = f.sample(z).ok()?.value;
        if fz.is_zero() {
            return Some((z, 0.0));
        }
        let fp = f.sample(z + h).ok()?.value - f.sample(z - h).ok()?.value;
        if fp.is_zero() {
            return None;
        }
        let dz = fz.ratio(&fp) * (2.0 * h);
        if !dz.re.is_finite() || !dz.im.is_finite() {
            return None;
        }
        z -= dz;
        if !rect.contains(z) {
            return None;
        }
        if dz.norm() <= 1e-14 * (1.0 + z.norm()) {
            break;
        }
    }
    let res = f.sample(z).ok()?.value.abs();
    Some((z, res))
}

enum BoxOutcome {
    Children(Vec<(Rect, i64)>),
    Zero(Eigenvalue),
    Unresolved(UnresolvedRegion),
}

fn process_box(f: &dyn AnalyticFn, rect: Rect, count: i64, opts: &SearchOptions) -> (BoxOutcome, usize) {
    let mut evals = 0;
    if count == 1 {
        if let Some((z, residual)) = newton(f, rect.center(), &rect) {
            return (BoxOutcome::Zero(Eigenvalue { z, lambda: z * z, multiplicity: 1, residual }), evals);
        }
    }
    if rect.size() < opts.tol {
        let z = rect.center();
        let residual = f.sample(z).map(|s| s.value.abs()).unwrap_or(f64::NAN);
        let eig = Eigenvalue { z, lambda: z * z, multiplicity: count as u32, residual };
        return (BoxOutcome::Zero(eig), evals);
    }
    let mut last_reason = String::new();
    'offsets: for off in SPLIT_OFFSETS {
        let children = rect.split(0.5 + off);
        let mut out = Vec::with_capacity(4);
        let mut sum = 0;
        for c in children {
            match count_zeros_in_contour(f, &Contour::rectangle(&c), opts.samples, opts.modulus_tol / 10.0) {
                Ok(cc) => {
                    evals += cc.evaluations;
                    sum += cc.count;
                    if cc.count > 0 {
                        out.push((c, cc.count));
                    }
                }
                Err(e) => {
                    last_reason = e.to_string();
                    continue 'offsets;
                }
            }
        }
        if sum == count {
            return (BoxOutcome::Children(out), evals);
        }
        last_reason = format!("children count {sum} differs from parent count {count}");
    }
    if rect.size() < opts.tol.sqrt() {
        // a cluster that double precision cannot separate further
        let z = rect.center();
        let residual = f.sample(z).map(|s| s.value.abs()).unwrap_or(f64::NAN);
        let eig = Eigenvalue { z, lambda: z * z, multiplicity: count as u32, residual };
        return (BoxOutcome::Zero(eig), evals);
    }
    (BoxOutcome::Unresolved(UnresolvedRegion { rect, count: Some(count), reason: last_reason }), evals)
}

/// All zeros of `f` inside `rect`, by recursive subdivision with winding
/// counts and Newton polishing of isolated zeros.
pub fn find_zeros_in_rect(f: &dyn AnalyticFn, rect: Rect, opts: &SearchOptions) -> Result<ZeroSearch> {
    let outer = count_zeros_in_contour(f, &Contour::rectangle(&rect), opts.samples, opts.modulus_tol / 10.0)?;
    let mut evaluations = outer.evaluations;
    let mut zeros = vec![];
    let mut unresolved = vec![];
    let mut level = if outer.count > 0 { vec![(rect, outer.count)] } else { vec![] };
    while !level.is_empty() {
        let results: Vec<(BoxOutcome, usize)> =
            level.par_iter().map(|&(r, c)| process_box(f, r, c, opts)).collect();
        let mut next = vec![];
        for (outcome, e) in results {
            evaluations += e;
            match outcome {
                BoxOutcome::Children(c) => next.extend(c),
                BoxOutcome::Zero(z) => zeros.push(z),
                BoxOutcome::Unresolved(u) => unresolved.push(u),
            }
        }
        level = next;
    }
    sort_eigenvalues(&mut zeros);
    Ok(ZeroSearch { zeros, total_count: outer.count, unresolved, evaluations })
}

pub fn sort_eigenvalues(v: &mut [Eigenvalue]) {
    v.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im)));
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Eigenvalue>,
    pub enclosure: EnclosureReport,
    pub floor: f64,
    /// Winding count of the outer contour.
    pub outer_count: i64,
    /// Zeros below the floor or in boxes that could not be separated.
    pub unresolved: Vec<UnresolvedRegion>,
}

impl SpectrumReport {
    pub fn is_resolved(&self) -> bool {
        self.unresolved.is_empty()
    }

    pub fn total_multiplicity(&self) -> i64 {
        self.eigenvalues.iter().map(|e| e.multiplicity as i64).sum()
    }
}

/// Discrete spectrum of `H_q` with the default options.
pub fn find_spectrum(q: &Potential, tol: f64) -> Result<SpectrumReport> {
    find_spectrum_with(q, &SearchOptions { tol, ..Default::default() })
}

/// Discrete spectrum of `H_q`: zeros of `e₊(0, ·)` in the half-disk
/// `|z| ≤ √r·(1+10⁻³)`, `Im z ≥ floor`, squared.
pub fn find_spectrum_with(q: &Potential, opts: &SearchOptions) -> Result<SpectrumReport> {
    let enc = enclosure(q, None)?;
    let floor = opts.floor.unwrap_or(1e-6 * (1.0 + enc.r.sqrt()));
    if enc.r == 0.0 {
        return Ok(SpectrumReport { eigenvalues: vec![], enclosure: enc, floor, outer_count: 0, unresolved: vec![] });
    }
    let f = JostFn::new(q)?;
    let rho = enc.r.sqrt() * (1.0 + 1e-3);
    let mut floor_used = floor;
    let mut search = None;
    let mut last_err = None;
    // a zero sitting on the floor edge is dodged by nudging the floor
    for k in 0..6 {
        floor_used = floor * (1.0 + 0.137 * k as f64);
        match find_zeros_in_rect(&f, Rect::new(-rho, rho, floor_used, rho), opts) {
            Ok(s) => {
                search = Some(s);
                break;
            }
            Err(e) => last_err = Some(e),
        }
    }
    let search = match search {
        Some(s) => s,
        None => return Err(last_err.expect("at least one attempt was made")),
    };
    let mut unresolved = search.unresolved;
    let strip = Rect::new(-rho, rho, floor_used * 1e-3, floor_used);
    match count_zeros_in_contour(&f, &Contour::rectangle(&strip), opts.samples, opts.modulus_tol / 10.0) {
        Ok(c) if c.count == 0 => {}
        Ok(c) => unresolved.push(UnresolvedRegion {
            rect: strip,
            count: Some(c.count),
            reason: "zeros between the floor and the real axis".into(),
        }),
        Err(e) => unresolved.push(UnresolvedRegion { rect: strip, count: None, reason: e.to_string() }),
    }
    Ok(SpectrumReport {
        eigenvalues: search.zeros,
        enclosure: enc,
        floor: floor_used,
        outer_count: search.total_count,
        unresolved,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ShiftRow {
    pub x: f64,
    /// `sup |e₊(0,z;q(·,X)) − e₊(0,z;q)·W(z,𝓆)/(−2iz)|` from the exact
    /// decomposition, free of cancellation.
    pub deviation: f64,
    /// The same quantity by direct subtraction; limited by rounding.
    pub direct_deviation: f64,
    /// Rounding level of the direct subtraction.
    pub rounding_floor: f64,
    pub overlap: bool,
}

/// Convergence of `e₊(0,·;q + 𝓆(·−X))` to `e₊(0,·;q)·W(·,𝓆)/(−2iz)`.
///
/// For disjoint supports `e₊(0;q_X) = A·e₊(0;q) + B·e^{2izX}·e₋(0;q)` with the
/// left scattering coefficients `A, B` of `𝓆`, so the deviation is
/// `|B·e^{2izX}·e₋(0;q)|`; the direct difference is reported alongside.
pub fn shift_limit_check(q: &Potential, line: &LinePotential, xs: &[f64], z_grid: &[C64]) -> Result<Vec<ShiftRow>> {
    let qs = q
        .as_step()
        .ok_or_else(|| Error::InvalidParameter("shift limit check needs a step potential".into()))?;
    let pre: Vec<(C64, Wide, Wide, Wide, Wide)> = z_grid
        .par_iter()
        .map(|&z| {
            let e = jost_transfer_matrix(q, z)?;
            let (em, _) = jost_minus_step(qs, z)?;
            let (a, b) = line_jost_coefficients(line, z)?;
            Ok((z, e.value_wide(), em, a, b))
        })
        .collect::<Result<_>>()?;
    xs.iter()
        .map(|&x| {
            let (qx, overlap) = q.shift_superpose(line, x)?;
            let rows: Vec<(f64, f64, f64)> = pre
                .par_iter()
                .map(|&(z, e, em, a, b)| {
                    let i = C64::new(0.0, 1.0);
                    let limit = a * e;
                    let exact = (b * em * Wide::exp(2.0 * i * z * x)).abs();
                    let ex = jost_transfer_matrix(&qx, z)?;
                    let direct = (ex.value_wide() - limit).abs();
                    let floor = ex.error_estimate() + 8.0 * f64::EPSILON * (a.abs() * e.abs() + ex.value_wide().abs());
                    Ok((exact, direct, floor))
                })
                .collect::<Result<_>>()?;
            let sup = |k: usize| {
                rows.iter()
                    .map(|r| match k {
                        0 => r.0,
                        1 => r.1,
                        _ => r.2,
                    })
                    .fold(0.0, f64::max)
            };
            Ok(ShiftRow { x, deviation: sup(0), direct_deviation: sup(1), rounding_floor: sup(2), overlap })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct TruncationRow {
    pub x: f64,
    /// `sup |e₊(0,z;q_X) − e₊(0,z;q)|` over the grid.
    pub deviation: f64,
    /// `exp(τ(X)/min|z|) − 1`.
    pub simple_bound: f64,
    /// `sup (exp(τ(X)/|z|) − 1)·exp(‖q‖₁/|z|)`, a Gronwall bound.
    pub bound: f64,
}

/// Convergence of `e₊(0,·;q·χ_[0,X])` to `e₊(0,·;q)`.
pub fn truncation_limit_check(q: &Potential, xs: &[f64], z_grid: &[C64]) -> Result<Vec<TruncationRow>> {
    let full: Vec<Wide> = z_grid
        .par_iter()
        .map(|&z| Ok(jost_transfer_matrix(q, z)?.value_wide()))
        .collect::<Result<_>>()?;
    let l1 = q.l1_norm()?;
    let zmin = z_grid.iter().map(|z| z.norm()).fold(f64::INFINITY, f64::min);
    xs.iter()
        .map(|&x| {
            let qx = q.truncate(x)?;
            let tau = q.tail_bound(x);
            let devs: Vec<f64> = z_grid
                .par_iter()
                .zip(&full)
                .map(|(&z, e)| Ok((jost_transfer_matrix(&qx, z)?.value_wide() - *e).abs()))
                .collect::<Result<_>>()?;
            let bound = z_grid
                .iter()
                .map(|z| (tau / z.norm()).exp_m1() * (l1 / z.norm()).exp())
                .fold(0.0, f64::max);
            Ok(TruncationRow {
                x,
                deviation: devs.iter().copied().fold(0.0, f64::max),
                simple_bound: (tau / zmin).exp_m1(),
                bound,
            })
        })
        .collect()
}

/// Regular grid of `n × n` points in `{r0 ≤ |z| ≤ r1, θ0 ≤ arg z ≤ θ1}`.
pub fn polar_grid(n: usize, r0: f64, r1: f64, th0: f64, th1: f64) -> Vec<C64> {
    let mut out = Vec::with_capacity(n * n);
    for a in 0..n {
        let r = if n == 1 { r0 } else { r0 * (r1 / r0).powf(a as f64 / (n - 1) as f64) };
        for b in 0..n {
            let th = if n == 1 { th0 } else { th0 + (th1 - th0) * b as f64 / (n - 1) as f64 };
            out.push(C64::from_polar(r, th));
        }
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct TrackingRow {
    pub x: f64,
    pub roots: Vec<C64>,
    /// Largest distance from a root of the shifted problem to the nearest
    /// root of either factor.
    pub error: f64,
    pub count_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrackingReport {
    pub region: Rect,
    pub factor_roots: Vec<C64>,
    pub rows: Vec<TrackingRow>,
}

/// Roots of `e₊(0,·;q + 𝓆(·−X))` in `region` for each `X`, compared with the
/// union of the roots of `e₊(0,·;q)` and `W(·,𝓆)`.
pub fn track_shift_roots(q: &Potential, line: &LinePotential, xs: &[f64], region: Rect, opts: &SearchOptions) -> Result<TrackingReport> {
    let fq = JostFn::new(q)?;
    let fw = WronskianFn::new(line)?;
    let mut factor_roots: Vec<C64> = find_zeros_in_rect(&fq, region, opts)?.zeros.iter().map(|e| e.z).collect();
    factor_roots.extend(find_zeros_in_rect(&fw, region, opts)?.zeros.iter().map(|e| e.z));
    let mut rows = vec![];
    for &x in xs {
        let (qx, _) = q.shift_superpose(line, x)?;
        let f = JostFn::new(&qx)?;
        let roots: Vec<C64> = find_zeros_in_rect(&f, region, opts)?.zeros.iter().map(|e| e.z).collect();
        let error = roots
            .iter()
            .map(|r| factor_roots.iter().map(|f| (r - f).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max);
        rows.push(TrackingRow { x, count_matches: roots.len() == factor_roots.len(), roots, error });
    }
    Ok(TrackingReport { region, factor_roots, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::StepPotential;

    struct Poly(Vec<C64>);

    impl AnalyticFn for Poly {
        fn sample(&self, z: C64) -> Result<Sample> {
            let v = self.0.iter().fold(C64::new(1.0, 0.0), |acc, r| acc * (z - r));
            let s = self.0.iter().fold(1.0, |acc, r| acc * (z.norm() + r.norm()));
            Ok(Sample { value: Wide::new(v), scale: Wide::from_real(s.max(1.0)) })
        }

        fn phase_rate(&self) -> f64 {
            1.0
        }
    }

    #[test]
    fn polynomial_roots_counted_and_found() {
        let roots = vec![C64::new(0.3, 0.4), C64::new(-0.5, 0.2), C64::new(0.3, 0.4), C64::new(2.0, 2.0)];
        let f = Poly(roots);
        let r = Rect::new(-1.0, 1.0, 0.1, 1.0);
        assert_eq!(count_zeros_in_contour(&f, &Contour::rectangle(&r), 8, 1e-14).unwrap().count, 3);
        let s = find_zeros_in_rect(&f, r, &SearchOptions { tol: 1e-9, ..Default::default() }).unwrap();
        assert_eq!(s.zeros.len(), 2);
        let double = s.zeros.iter().find(|e| e.multiplicity == 2).unwrap();
        assert!((double.z - C64::new(0.3, 0.4)).norm() < 1e-4);
    }

    #[test]
    fn free_potential_has_no_spectrum() {
        let s = find_spectrum(&Potential::zero(), 1e-10).unwrap();
        assert!(s.eigenvalues.is_empty());
        let zero = Potential::zero();
        let f = JostFn::new(&zero).unwrap();
        let c = count_zeros_in_contour(&f, &Contour::rectangle(&Rect::new(-1.0, 1.0, 0.1, 1.0)), 8, 1e-12).unwrap();
        assert_eq!(c.count, 0);
    }

    #[test]
    fn enclosure_radii() {
        let q = Potential::barrier(1.0, 2.0);
        let e = enclosure(&q, None).unwrap();
        assert_eq!(e.r_fls, 4.0);
        let e = enclosure(&q, Some(&WeightPair::unit())).unwrap();
        let want = (2.0 / std::f64::consts::LN_2).powi(2);
        assert!((e.rho_inv.unwrap() - want).abs() < 1e-9 * want);
        assert_eq!(e.r, 4.0);
    }

    #[test]
    fn shift_limit_for_zero_line_is_exact() {
        let q = Potential::barrier(1.0, 1.0);
        let grid = vec![C64::new(0.5, 0.5), C64::new(-1.0, 1.0)];
        let rows = shift_limit_check(&q, &LinePotential::zero(), &[10.0, 20.0], &grid).unwrap();
        for r in rows {
            assert_eq!(r.deviation, 0.0);
            assert!(r.direct_deviation <= 1e-14);
        }
    }

    #[test]
    fn truncation_beyond_support_is_exact() {
        let q: Potential = StepPotential::new(vec![0.0, 1.0, 2.0], vec![C64::new(0.0, 1.0), C64::new(0.5, 0.0)]).unwrap().into();
        let rows = truncation_limit_check(&q, &[3.0], &[C64::new(0.5, 0.7)]).unwrap();
        assert_eq!(rows[0].deviation, 0.0);
    }
}
