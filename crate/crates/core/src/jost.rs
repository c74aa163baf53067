//! The Jost function `e₊(0, z)` and its `x`-derivative, by three independent
//! methods, together with the a-priori bound on `|e₊ − 1|` and the Wronskian
//! of line Jost solutions.
//!
//! * transfer matrices: exact propagation through constant pieces;
//! * Volterra series: successive approximations for `f = e^{−izx}e₊ − 1`;
//! * RK4: fixed-step integration of `−y″ + qy = z²y` from the right.
//!
//! Values are carried as [`Wide`] numbers because `e^{izX}` and the growing
//! solutions inside long barriers leave the double range quickly.

use serde::{Deserialize, Serialize};

use crate::branchmath::{sq_plus, Wide, C64};
use crate::error::{Error, Result};
use crate::potentials::{LinePotential, Potential, StepPotential, WeightPair};

const EPS: f64 = f64::EPSILON;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JostMethod {
    TransferMatrix,
    Series,
    Ode,
}

/// `e₊(0, z)` and `∂ₓe₊(0, z)` with an absolute error estimate.
#[derive(Clone, Debug)]
pub struct JostEvaluation {
    pub z: C64,
    pub method: JostMethod,
    value: Wide,
    derivative: Wide,
    error: Wide,
    magnitude: Wide,
    /// Number of series terms or integration steps used, when meaningful.
    pub work: usize,
}

impl JostEvaluation {
    pub fn value(&self) -> C64 {
        self.value.to_c64()
    }

    pub fn derivative(&self) -> C64 {
        self.derivative.to_c64()
    }

    pub fn value_wide(&self) -> Wide {
        self.value
    }

    pub fn derivative_wide(&self) -> Wide {
        self.derivative
    }

    /// Absolute error estimate for the value.
    pub fn error_estimate(&self) -> f64 {
        self.error.abs()
    }

    pub fn error_wide(&self) -> Wide {
        self.error
    }

    /// Upper bound on the size of the contributions that cancel into the
    /// value; `|value| / magnitude` measures distance to a zero.
    pub fn magnitude_wide(&self) -> Wide {
        self.magnitude
    }

    /// `|e₊(z)| / magnitude`, a scale-free modulus in `[0, 1]`.
    pub fn normalized_modulus(&self) -> f64 {
        self.value.abs_ratio(&self.magnitude)
    }
}

fn check_z(z: C64) -> Result<()> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::ZeroSpectralParameter);
    }
    if z.im < 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidParameter(format!("spectral parameter {z} must lie in the closed upper half-plane")));
    }
    Ok(())
}

/// `sin(W)/W`, by a six-term Taylor series for `|W| < 1e−3`.
pub fn sinc(w: C64) -> C64 {
    if w.norm() < 1e-3 {
        let w2 = w * w;
        // 1 − W²/3! + W⁴/5! − W⁶/7! + W⁸/9! − W¹⁰/11!
        let mut s = C64::new(-1.0 / 39916800.0, 0.0);
        for c in [1.0 / 362880.0, -1.0 / 5040.0, 1.0 / 120.0, -1.0 / 6.0, 1.0] {
            s = s * w2 + c;
        }
        s
    } else {
        w.sin() / w
    }
}

/// Entries of the propagator over a constant piece: `cos(wℓ)`, `sin(wℓ)/w`,
/// `w·sin(wℓ)`, with `w = sq₊(z² − v)`.
struct PieceMatrix {
    c: Wide,
    s_over_w: Wide,
    w_s: Wide,
    phase: f64,
    w_abs: f64,
}

fn piece_matrix(z: C64, v: C64, len: f64) -> PieceMatrix {
    let w = sq_plus(z * z - v);
    let big_w = w * len;
    if big_w.im.abs() < 40.0 {
        PieceMatrix {
            c: Wide::new(big_w.cos()),
            s_over_w: Wide::new(sinc(big_w) * len),
            w_s: Wide::new(w * big_w.sin()),
            phase: big_w.norm(),
            w_abs: w.norm(),
        }
    } else {
        let i = C64::new(0.0, 1.0);
        let ep = Wide::exp(i * big_w);
        let em = Wide::exp(-i * big_w);
        let sin = (ep - em) * C64::new(0.0, -0.5);
        PieceMatrix {
            c: (ep + em) * 0.5,
            s_over_w: sin * (1.0 / w),
            w_s: sin * w,
            phase: big_w.norm(),
            w_abs: w.norm(),
        }
    }
}

/// State `(y, y′)` propagated from the right together with a bound `m` on
/// the 2-norm of `(y, y′/ζ)`, where `ζ` is `|w|` of the last piece. Each
/// piece multiplies `m` by the operator norm of its propagator in those
/// coordinates, so `m` bounds `|y|` and the growth of rounding errors
/// without the compounding of entrywise bounds.
struct Propagation {
    y: Wide,
    yp: Wide,
    m: Wide,
    zeta: f64,
    err_units: f64,
}

/// Largest singular value of `[[c, −(s/w)ζ], [ws/ζ, c]]`, a matrix of
/// determinant 1.
fn unimodular_norm(m: &PieceMatrix, zeta: f64) -> Wide {
    let entries = [m.c.abs_wide(), m.c.abs_wide(), m.s_over_w.abs_wide() * zeta, m.w_s.abs_wide() * (1.0 / zeta)];
    let mut top = entries[0];
    for e in &entries[1..] {
        if e.abs_ratio(&top) > 1.0 {
            top = *e;
        }
    }
    let f: f64 = entries.iter().map(|e| e.abs_ratio(&top).powi(2)).sum();
    let t = top.abs();
    if t.is_finite() && t < 1e100 {
        let frob = f * t * t;
        Wide::from_real(((frob + (frob * frob - 4.0).max(0.0).sqrt()) / 2.0).sqrt().max(1.0))
    } else {
        top * f.sqrt()
    }
}

impl Propagation {
    fn start(z: C64) -> Self {
        let iz = C64::new(-z.im, z.re);
        Self::from_state(z, Wide::ONE, Wide::new(iz))
    }

    fn from_state(z: C64, y: Wide, yp: Wide) -> Self {
        let zeta = z.norm();
        let (a, b) = (y.abs_wide(), yp.abs_wide() * (1.0 / zeta));
        let m = if a.abs_ratio(&b) >= 1.0 { a } else { b } * 2f64.sqrt();
        Self { y, yp, m, zeta, err_units: 0.0 }
    }

    /// Moves the state from `x` to `x − len` through a piece of value `v`.
    fn step_back(&mut self, z: C64, v: C64, len: f64) {
        let m = piece_matrix(z, v, len);
        let y = m.c * self.y - m.s_over_w * self.yp;
        let yp = m.w_s * self.y + m.c * self.yp;
        let zeta = m.w_abs.max(1e-8 * (1.0 + z.norm()));
        let rescale = (self.zeta / zeta).max(1.0);
        self.m = self.m * unimodular_norm(&m, zeta) * rescale;
        self.zeta = zeta;
        self.y = y;
        self.yp = yp;
        self.err_units += 6.0 + 2.0 * m.phase;
    }
}

fn finish(z: C64, x_end: f64, prop: Propagation, method: JostMethod, work: usize) -> JostEvaluation {
    let i = C64::new(0.0, 1.0);
    let scale = Wide::exp(i * z * x_end);
    let err_units = prop.err_units + 4.0 + 2.0 * z.norm() * x_end;
    let magnitude = prop.m * scale.abs_wide();
    JostEvaluation {
        z,
        method,
        value: prop.y * scale,
        derivative: prop.yp * scale,
        error: magnitude * (EPS * err_units),
        magnitude,
        work,
    }
}

/// Exact transfer-matrix evaluation for a step profile.
pub fn transfer_matrix_step(q: &StepPotential, z: C64) -> Result<JostEvaluation> {
    check_z(z)?;
    let mut prop = Propagation::start(z);
    let mut n = 0;
    for (a, b, v) in q.pieces().rev() {
        prop.step_back(z, v, b - a);
        n += 1;
    }
    Ok(finish(z, q.support_end(), prop, JostMethod::TransferMatrix, n))
}

/// The solution equal to `e^{−izx}` beyond the support of a step profile,
/// as `(value, derivative)` at 0.
pub fn jost_minus_step(q: &StepPotential, z: C64) -> Result<(Wide, Wide)> {
    check_z(z)?;
    let iz = C64::new(-z.im, z.re);
    let mut prop = Propagation::from_state(z, Wide::ONE, Wide::new(-iz));
    for (a, b, v) in q.pieces().rev() {
        prop.step_back(z, v, b - a);
    }
    let scale = Wide::exp(-iz * q.support_end());
    Ok((prop.y * scale, prop.yp * scale))
}

/// Coefficients of `𝓮₊(x) = A·e^{izx} + B·e^{−izx}` to the left of the
/// support of a step line potential. `A = W(z, 𝓆)/(−2iz)`.
pub fn line_jost_coefficients(line: &LinePotential, z: C64) -> Result<(Wide, Wide)> {
    check_z(z)?;
    let pieces = line
        .step_pieces()
        .ok_or_else(|| Error::InvalidParameter("scattering coefficients need a step line potential".into()))?;
    let (lo, hi) = line.support().expect("step pieces imply compact support");
    let iz = C64::new(-z.im, z.re);
    let mut prop = Propagation::start(z);
    for (a, b, v) in pieces.into_iter().rev() {
        prop.step_back(z, v, b - a);
    }
    // (y, y′) at lo carry the factor e^{iz·hi}
    let inv = 1.0 / (2.0 * iz);
    let a = (prop.y * iz + prop.yp) * inv * Wide::exp(iz * (hi - lo));
    let b = (prop.y * iz - prop.yp) * inv * Wide::exp(iz * (hi + lo));
    Ok((a, b))
}

/// Midpoint step discretization of an analytic profile on `[0, end]` with
/// cells no longer than `h`, respecting knots, each refined `split` times so
/// that grids for `split = 1, 2, 4` are exactly nested.
fn midpoint_steps(q: &Potential, end: f64, h: f64, split: usize) -> Vec<(f64, C64)> {
    let mut knots: Vec<f64> = q.knots().into_iter().filter(|&k| k < end).collect();
    knots.push(end);
    let mut cells = vec![];
    for seg in knots.windows(2) {
        let n = ((seg[1] - seg[0]) / h).ceil().max(1.0) as usize * split;
        let dx = (seg[1] - seg[0]) / n as f64;
        for k in 0..n {
            let mid = seg[0] + (k as f64 + 0.5) * dx;
            cells.push((dx, q.eval_on_segment(mid, seg[0], seg[1])));
        }
    }
    cells
}

fn tail_error(q: &Potential, z: C64, end: f64, l1: f64) -> f64 {
    let tau = q.tail_bound(end);
    if tau == 0.0 {
        return 0.0;
    }
    let zn = z.norm();
    (tau / zn).exp_m1() * (l1 / zn).exp()
}

/// Transfer-matrix evaluation for any potential. Step profiles are exact;
/// analytic profiles are replaced by midpoint step profiles on three nested
/// grids and Romberg-extrapolated, with the last correction as error.
pub fn jost_transfer_matrix(q: &Potential, z: C64) -> Result<JostEvaluation> {
    match q {
        Potential::Step(s) => transfer_matrix_step(s, z),
        Potential::Analytic(_) => {
            check_z(z)?;
            let l1 = q.l1_norm()?;
            let end = q.effective_end(1e-15 * z.norm().min(1.0))?;
            let h0 = (0.2 / (z.norm() + q.max_abs().sqrt() + 1.0)).min(0.05);
            let run = |split: usize| {
                let cells = midpoint_steps(q, end, h0, split);
                let mut prop = Propagation::start(z);
                for (dx, v) in cells.iter().rev() {
                    prop.step_back(z, *v, *dx);
                }
                (finish(z, end, prop, JostMethod::TransferMatrix, cells.len()), cells.len())
            };
            let (a, _) = run(1);
            let (b, _) = run(2);
            let (c, n) = run(4);
            let r1v = (b.value * 4.0 - a.value) * (1.0 / 3.0);
            let r2v = (c.value * 4.0 - b.value) * (1.0 / 3.0);
            let r1d = (b.derivative * 4.0 - a.derivative) * (1.0 / 3.0);
            let r2d = (c.derivative * 4.0 - b.derivative) * (1.0 / 3.0);
            let romberg = (r2v - r1v).abs_wide() * (2.0 / 15.0);
            let error = romberg + c.error + Wide::from_real(tail_error(q, z, end, l1));
            Ok(JostEvaluation {
                z,
                method: JostMethod::TransferMatrix,
                value: r2v + (r2v - r1v) * (1.0 / 15.0),
                derivative: r2d + (r2d - r1d) * (1.0 / 15.0),
                error,
                magnitude: c.magnitude,
                work: n,
            })
        }
    }
}

/// Grid of Simpson panels aligned with the knots of `q`.
struct PanelGrid {
    /// `x` at panel boundaries and midpoints: `2·panels + 1` entries.
    x: Vec<f64>,
    /// `q` at (left, mid, right) of each panel, one-sided at knots.
    qv: Vec<[C64; 3]>,
}

impl PanelGrid {
    fn new(q: &Potential, end: f64, max_panel: f64) -> Self {
        let mut knots: Vec<f64> = q.knots().into_iter().filter(|&k| k < end).collect();
        knots.push(end);
        let mut x = vec![0.0];
        let mut qv = vec![];
        for seg in knots.windows(2) {
            let (lo, hi) = (seg[0], seg[1]);
            let n = ((hi - lo) / max_panel).ceil().max(1.0) as usize;
            let w = (hi - lo) / n as f64;
            for k in 0..n {
                let a = lo + k as f64 * w;
                let b = if k + 1 == n { hi } else { lo + (k + 1) as f64 * w };
                let m = 0.5 * (a + b);
                x.push(m);
                x.push(b);
                qv.push([
                    q.eval_on_segment(a, lo, hi),
                    q.eval_on_segment(m, lo, hi),
                    q.eval_on_segment(b, lo, hi),
                ]);
            }
        }
        Self { x, qv }
    }

    fn panels(&self) -> usize {
        self.qv.len()
    }
}

/// `(e^{w} − 1)` without cancellation for small `w`.
fn expm1_c(w: C64) -> C64 {
    let (em1, c, s) = (w.re.exp_m1(), w.im.cos(), w.im.sin());
    let half = (0.5 * w.im).sin();
    C64::new(em1 * c - 2.0 * half * half, w.re.exp() * s)
}

/// One application of the Volterra operator `φ ↦ ∫ₓ^∞ k(t−x) q(t) φ(t) dt`
/// on the grid, returning the new function at every grid point together with
/// `∫₀^∞ e^{2izt} q φ dt`.
fn volterra_step(grid: &PanelGrid, z: C64, phi: &[C64]) -> (Vec<C64>, C64) {
    let a = C64::new(0.0, 2.0) * z;
    let kern = |d: f64| expm1_c(a * d) / a;
    let np = grid.panels();
    let mut out = vec![C64::new(0.0, 0.0); phi.len()];
    let (mut big_k, mut big_c, mut big_e) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for p in (0..np).rev() {
        let (i0, i1, i2) = (2 * p, 2 * p + 1, 2 * p + 2);
        let h = grid.x[i1] - grid.x[i0];
        let h2 = grid.x[i2] - grid.x[i1];
        let h = 0.5 * (h + h2);
        let [ql, qm, qr] = grid.qv[p];
        let (gl, gm, gr) = (ql * phi[i0], qm * phi[i1], qr * phi[i2]);
        let (k1, k2, km1) = (kern(h), kern(2.0 * h), kern(-h));
        let (e1, e2) = ((a * h).exp(), (a * 2.0 * h).exp());
        // midpoint values
        let k_mid = e1 * big_k + k1 * big_c + (h / 12.0) * (-(km1 * gl) + 5.0 * k1 * gr);
        out[i1] = k_mid;
        // left endpoint
        let k_left = e2 * big_k + k2 * big_c + (h / 3.0) * (4.0 * k1 * gm + k2 * gr);
        let c_left = big_c + (h / 3.0) * (gl + 4.0 * gm + gr);
        let e_left = e2 * big_e + (h / 3.0) * (gl + 4.0 * e1 * gm + e2 * gr);
        big_k = k_left;
        big_c = c_left;
        big_e = e_left;
        out[i0] = big_k;
    }
    (out, big_e)
}

struct SeriesResult {
    f0: C64,
    e_total: C64,
    terms: usize,
    last_term: f64,
    term_sum: f64,
}

fn series_on_grid(grid: &PanelGrid, z: C64, tol: f64, omega: f64, max_terms: usize) -> Result<SeriesResult> {
    let npts = grid.x.len();
    let mut phi = vec![C64::new(1.0, 0.0); npts];
    let mut f0 = C64::new(0.0, 0.0);
    let mut e_total = C64::new(0.0, 0.0);
    let mut prev_sup = f64::INFINITY;
    let mut term_sum = 0.0;
    for n in 1..=max_terms {
        let (next, e) = volterra_step(grid, z, &phi);
        e_total += e;
        let sup = next.iter().map(|v| v.norm()).fold(0.0, f64::max);
        f0 += next[0];
        term_sum += sup;
        phi = next;
        let decaying = sup <= 0.5 * prev_sup || sup == 0.0;
        if (sup < 0.01 * tol && decaying) || sup == 0.0 {
            return Ok(SeriesResult { f0, e_total, terms: n, last_term: sup, term_sum });
        }
        prev_sup = sup;
    }
    let mut bound = 1.0;
    for k in 1..=max_terms {
        bound *= omega / k as f64;
    }
    Err(Error::SeriesNonConvergence { terms: max_terms, partial: C64::new(1.0, 0.0) + f0, term_bound: bound })
}

/// Successive approximations for `f = e^{−izx}e₊ − 1`:
/// `f_{n+1}(x) = ∫ₓ^∞ k(t−x, z) q(t) f_n(t) dt` with
/// `k(u, z) = e^{iuz} sin(uz)/z`, evaluated by composite Simpson on a grid
/// refined at the knots of `q`. The grid is halved until two successive
/// results agree to `tol` (Richardson check).
pub fn jost_series(q: &Potential, z: C64, tol: f64) -> Result<JostEvaluation> {
    check_z(z)?;
    let iz = C64::new(-z.im, z.re);
    let l1 = q.l1_norm()?;
    if l1 == 0.0 {
        return Ok(JostEvaluation {
            z,
            method: JostMethod::Series,
            value: Wide::ONE,
            derivative: Wide::new(iz),
            error: Wide::ZERO,
            magnitude: Wide::ONE,
            work: 0,
        });
    }
    let omega = l1 / z.norm();
    let max_terms = 60 + (8.0 * omega) as usize;
    let end = q.effective_end((tol * 1e-3 * z.norm().min(1.0)) / (omega.exp()))?;
    let freq = 2.0 * z.norm() + 2.0 * q.max_abs().sqrt() + 1.0;
    let mut panel = (0.2 / freq).min(0.1);
    let run = |panel: f64| -> Result<(SeriesResult, usize)> {
        let grid = PanelGrid::new(q, end, panel);
        let n = grid.x.len();
        Ok((series_on_grid(&grid, z, tol, omega, max_terms)?, n))
    };
    let (mut coarse, _) = run(panel)?;
    loop {
        panel *= 0.5;
        let (fine, npts) = run(panel)?;
        let quad_err = (fine.f0 - coarse.f0).norm() / 15.0;
        if quad_err <= tol || npts > 4_000_000 {
            let value = C64::new(1.0, 0.0) + fine.f0;
            let derivative = iz * value - fine.e_total;
            let rounding = 16.0 * EPS * (1.0 + fine.term_sum) * (npts as f64).sqrt();
            let truncation = 2.0 * fine.last_term;
            let tail = tail_error(q, z, end, l1);
            let error = 2.0 * quad_err + rounding + truncation + tail;
            return Ok(JostEvaluation {
                z,
                method: JostMethod::Series,
                value: Wide::new(value),
                derivative: Wide::new(derivative),
                error: Wide::from_real(error),
                magnitude: Wide::from_real(1.0 + fine.term_sum),
                work: fine.terms,
            });
        }
        coarse = fine;
    }
}

/// Options for [`jost_ode`].
#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    /// Starting point; defaults to the support end or the point where the
    /// tail bound drops below `tail_tol`.
    pub x_max: Option<f64>,
    pub step: f64,
    pub tail_tol: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { x_max: None, step: 1e-3, tail_tol: 1e-14 }
    }
}

fn rk4_run(q: &Potential, z: C64, end: f64, step: f64) -> (Wide, Wide, Wide, usize) {
    let z2 = z * z;
    let mut knots: Vec<f64> = q.knots().into_iter().filter(|&k| k < end).collect();
    knots.push(end);
    let iz = C64::new(-z.im, z.re);
    let (mut y, mut yp) = (C64::new(1.0, 0.0), iz);
    let mut exp2: i64 = 0;
    let mut max_log2: f64 = z.norm().max(1.0).log2();
    let mut steps = 0;
    for seg in knots.windows(2).rev() {
        let (lo, hi) = (seg[0], seg[1]);
        let n = ((hi - lo) / step).ceil().max(1.0) as usize;
        let h = -(hi - lo) / n as f64;
        let f = |x: f64, y: C64, yp: C64| (yp, (q.eval_on_segment(x, lo, hi) - z2) * y);
        for k in 0..n {
            let x = hi + k as f64 * h;
            let (k1y, k1p) = f(x, y, yp);
            let (k2y, k2p) = f(x + 0.5 * h, y + 0.5 * h * k1y, yp + 0.5 * h * k1p);
            let (k3y, k3p) = f(x + 0.5 * h, y + 0.5 * h * k2y, yp + 0.5 * h * k2p);
            let (k4y, k4p) = f(x + h, y + h * k3y, yp + h * k3p);
            y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
            yp += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            steps += 1;
            let mag = y.norm().max(yp.norm());
            max_log2 = max_log2.max(mag.log2() + exp2 as f64);
            if mag > 1e100 {
                let k = mag.log2().floor() as i64;
                let s = crate::branchmath::ldexp(1.0, -k);
                y *= s;
                yp *= s;
                exp2 += k;
            }
        }
    }
    let i = C64::new(0.0, 1.0);
    let scale = Wide::exp(i * z * end).scale2(exp2);
    let k = max_log2.floor();
    let mag = Wide::from_real((max_log2 - k).exp2()).scale2(k as i64) * scale.abs_wide();
    (Wide::new(y) * scale, Wide::new(yp) * scale, mag, steps)
}

/// Classical fourth-order Runge–Kutta integration of `−y″ + qy = z²y` from
/// `x_max` down to 0 with initial data `(e^{izx_max}, iz·e^{izx_max})`. The
/// step is aligned with the knots of `q`; the error estimate comes from
/// repeating the run with half the step.
pub fn jost_ode(q: &Potential, z: C64, opts: OdeOptions) -> Result<JostEvaluation> {
    check_z(z)?;
    if !(opts.step > 0.0) || !opts.step.is_finite() {
        return Err(Error::StepRejected(opts.step));
    }
    let l1 = q.l1_norm()?;
    let end = match opts.x_max {
        Some(x) => {
            let t = q.tail_bound(x);
            if t > opts.tail_tol {
                return Err(Error::TailTooLarge { x, tail: t });
            }
            x
        }
        None => q.effective_end(opts.tail_tol)?,
    };
    let (y1, _, _, _) = rk4_run(q, z, end, opts.step);
    let (y2, d2, mag, steps) = rk4_run(q, z, end, opts.step / 2.0);
    let halving = (y2 - y1).abs_wide() * (3.0 / 15.0);
    let rounding = mag * (EPS * 8.0 * (steps as f64).sqrt());
    let tail = Wide::from_real(tail_error(q, z, end, l1));
    Ok(JostEvaluation {
        z,
        method: JostMethod::Ode,
        value: y2,
        derivative: d2,
        error: halving + rounding + tail,
        magnitude: mag,
        work: steps,
    })
}

/// `exp(‖q‖₁/|z|) − 1`, or `exp(â(1/|z|)·‖q‖_a) − 1` with a weight.
pub fn jost_upper_bound(q: &Potential, z: C64, weight: Option<&WeightPair>) -> Result<f64> {
    check_z(z)?;
    let zn = z.norm();
    match weight {
        None => Ok((q.l1_norm()? / zn).exp_m1()),
        Some(w) if w.is_unit() => Ok((q.l1_norm()? / zn).exp_m1()),
        Some(w) => Ok((w.a_hat(1.0 / zn) * q.weighted_norm(w)?).exp_m1()),
    }
}

fn jost_wide(q: &Potential, z: C64) -> Result<JostEvaluation> {
    jost_transfer_matrix(q, z)
}

/// `W(z, 𝓆) = 𝓮₊(0)𝓮₋′(0) − 𝓮₋(0)𝓮₊′(0)` for a compactly supported line
/// potential, from half-line Jost functions of its two halves. For even
/// potentials this is `−2e₊(0,z)e₊′(0,z)`.
pub fn line_wronskian_wide(line: &LinePotential, z: C64) -> Result<Wide> {
    check_z(z)?;
    if line.support().is_none() {
        return Err(Error::InvalidParameter("line Wronskian needs compact support".into()));
    }
    let r = jost_wide(line.right(), z)?;
    let l = jost_wide(line.left(), z)?;
    Ok(-(r.value * l.derivative) - l.value * r.derivative)
}

pub fn line_wronskian(line: &LinePotential, z: C64) -> Result<C64> {
    Ok(line_wronskian_wide(line, z)?.to_c64())
}

/// The even-case shortcut `−2e₊(0,z;q)e₊′(0,z;q)`.
pub fn even_wronskian_wide(q: &Potential, z: C64) -> Result<Wide> {
    let e = jost_wide(q, z)?;
    Ok(e.value * e.derivative * -2.0)
}

/// Line Wronskian by a single left-to-right sweep: start from
/// `𝓮₋ = e^{−izx}` at the left end of the support, propagate across every
/// piece and compare with `𝓮₊ = e^{izx}` at the right end.
pub fn line_wronskian_sweep(line: &LinePotential, z: C64) -> Result<Wide> {
    check_z(z)?;
    let pieces = line
        .step_pieces()
        .ok_or_else(|| Error::InvalidParameter("sweep needs a step line potential".into()))?;
    let (lo, hi) = line.support().expect("step pieces imply compact support");
    let i = C64::new(0.0, 1.0);
    let iz = i * z;
    // 𝓮₋ at the left end, factored as e^{−iz·lo}·(1, −iz)
    let mut y = Wide::ONE;
    let mut yp = Wide::new(-iz);
    for (a, b, v) in pieces {
        let m = piece_matrix(z, v, b - a);
        let ny = m.c * y + m.s_over_w * yp;
        let nyp = m.c * yp - m.w_s * y;
        y = ny;
        yp = nyp;
    }
    let scale = Wide::exp(-iz * lo) * Wide::exp(iz * hi);
    Ok((yp - y * iz) * scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::AnalyticPotential;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rel(a: C64, b: C64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn free_potential_is_exact() {
        for z in [c(1.0, 0.5), c(-3.0, 0.0), c(0.0, 2.0)] {
            let e = jost_transfer_matrix(&Potential::zero(), z).unwrap();
            assert_eq!(e.value(), c(1.0, 0.0));
            assert_eq!(e.derivative(), c(0.0, 1.0) * z);
            let s = jost_series(&Potential::zero(), z, 1e-10).unwrap();
            assert_eq!(s.value(), c(1.0, 0.0));
            assert_eq!(s.work, 0);
        }
        assert!(matches!(jost_transfer_matrix(&Potential::zero(), c(0.0, 0.0)), Err(Error::ZeroSpectralParameter)));
    }

    #[test]
    fn barrier_closed_form() {
        // e₊(0,z) = e^{iRz}[cos(Rs) − izR·sinc(Rs)], s = sq₊(z² − iγ)
        let (gamma, r) = (1.0, 1.0);
        let z = c(0.0, 1.0);
        let s = sq_plus(z * z - c(0.0, gamma));
        let i = c(0.0, 1.0);
        let want = (i * r * z).exp() * ((r * s).cos() - i * z * r * sinc(r * s));
        let got = jost_transfer_matrix(&Potential::barrier(gamma, r), z).unwrap();
        assert!(rel(got.value(), want) < 1e-14);
    }

    #[test]
    fn refinement_invariance() {
        let q = StepPotential::new(vec![0.0, 1.0, 2.5], vec![c(0.3, 1.0), c(-0.5, 0.2)]).unwrap();
        let split = StepPotential::new(vec![0.0, 0.4, 1.0, 2.0, 2.5], vec![c(0.3, 1.0), c(0.3, 1.0), c(-0.5, 0.2), c(-0.5, 0.2)]).unwrap();
        for z in [c(0.7, 0.3), c(2.0, 0.0), c(-1.0, 4.0)] {
            let a = transfer_matrix_step(&q, z).unwrap();
            let b = transfer_matrix_step(&split, z).unwrap();
            assert!(rel(a.value(), b.value()) < 1e-13);
            assert!(rel(a.derivative(), b.derivative()) < 1e-13);
        }
    }

    #[test]
    fn sinc_branches_agree() {
        for w in [c(9.99e-4, 0.0), c(0.0, 9.99e-4), c(7e-4, 7e-4)] {
            assert!(rel(sinc(w), w.sin() / w) < 1e-15);
        }
    }

    #[test]
    fn series_matches_transfer_matrix() {
        let q = Potential::barrier(0.5, 1.0);
        let z = c(0.0, 2.0);
        let s = jost_series(&q, z, 1e-10).unwrap();
        let t = jost_transfer_matrix(&q, z).unwrap();
        assert!((s.value() - t.value()).norm() <= 1e-8, "{} vs {}", s.value(), t.value());
        assert!((s.derivative() - t.derivative()).norm() <= 1e-7);
    }

    #[test]
    fn ode_matches_transfer_matrix() {
        let q = Potential::barrier(1.0, 2.0);
        let z = c(1.0, 1.0);
        let o = jost_ode(&q, z, OdeOptions { step: 1e-4, ..Default::default() }).unwrap();
        let t = jost_transfer_matrix(&q, z).unwrap();
        assert!((o.value() - t.value()).norm() <= 1e-8);
        let o = jost_ode(&Potential::zero(), z, OdeOptions::default()).unwrap();
        assert!((o.value() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn gaussian_methods_agree() {
        let q: Potential = AnalyticPotential::gaussian_bump(c(0.5, 0.5), 2.0, 0.7).unwrap().into();
        let z = c(0.0, 2.0);
        let s = jost_series(&q, z, 1e-10).unwrap();
        let o = jost_ode(&q, z, OdeOptions { step: 0.01, ..Default::default() }).unwrap();
        let t = jost_transfer_matrix(&q, z).unwrap();
        assert!((s.value() - o.value()).norm() <= s.error_estimate() + o.error_estimate());
        assert!((s.value() - t.value()).norm() <= s.error_estimate() + t.error_estimate());
    }

    #[test]
    fn upper_bound_examples() {
        let z = c(0.0, 2.0);
        let q = Potential::barrier(2.0 * 2f64.ln(), 1.0);
        assert!((jost_upper_bound(&q, z, None).unwrap() - 1.0).abs() < 1e-14);
        let w = WeightPair::unit();
        assert_eq!(jost_upper_bound(&q, z, Some(&w)).unwrap(), jost_upper_bound(&q, z, None).unwrap());
    }

    #[test]
    fn wronskian_free_and_even() {
        let z = c(0.4, 1.3);
        let w = line_wronskian(&LinePotential::zero(), z).unwrap();
        assert!(rel(w, c(0.0, -2.0) * z) < 1e-15);
        let line = LinePotential::symmetric_barrier(1.0, 2.0);
        let a = line_wronskian_wide(&line, z).unwrap();
        let b = line_wronskian_sweep(&line, z).unwrap();
        let e = even_wronskian_wide(&Potential::barrier(1.0, 2.0), z).unwrap();
        assert!((a - b).abs_ratio(&b) < 1e-10);
        assert!((a - e).abs_ratio(&e) < 1e-14);
        // asymmetric potential: the two constructions must agree as well
        let asym = LinePotential::from_steps(vec![-1.0, 0.3, 2.0], vec![c(0.5, 0.2), c(-0.1, 1.0)]).unwrap();
        let a = line_wronskian_wide(&asym, z).unwrap();
        let b = line_wronskian_sweep(&asym, z).unwrap();
        assert!((a - b).abs_ratio(&b) < 1e-10);
    }

    #[test]
    fn shift_covariance_of_jost_solution() {
        // 𝓮₊(0; 𝓆(·−X)) = e^{izX}·𝓮₊(−X; 𝓆): with 𝓆 supported in [0, a] the
        // latter is the free continuation of e₊(0,·;𝓆) to x = −X.
        let q = Potential::barrier(0.8, 1.5);
        let z = c(0.6, 0.9);
        let x_shift = 7.0;
        let shifted: Potential = StepPotential::new(vec![0.0, x_shift, x_shift + 1.5], vec![c(0.0, 0.0), c(0.0, 0.8)])
            .unwrap()
            .into();
        let e = jost_transfer_matrix(&q, z).unwrap();
        let i = c(0.0, 1.0);
        // free propagation of (e, e′) from 0 back to −X
        let (cw, sw) = ((z * x_shift).cos(), (z * x_shift).sin());
        let at_minus_x = e.value() * cw - e.derivative() * sw / z;
        let want = (i * z * x_shift).exp() * at_minus_x;
        let got = jost_transfer_matrix(&shifted, z).unwrap().value();
        assert!(rel(got, want) < 1e-12);
    }
}
