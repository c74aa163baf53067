//! Complex potentials on the half-line and the line, weight pairs `(a, â)`,
//! norms and structural transforms.
//!
//! Step profiles are the main representation: every barrier and every
//! superposition built in this crate is piecewise constant, which lets the
//! transfer-matrix Jost evaluation run without quadrature error. Analytic
//! profiles carry a tail bound `τ(X) ≥ ∫_X^∞ |q|` so that truncation is never
//! silent.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::branchmath::C64;
use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_tail};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type ComplexFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

/// Relative accuracy requested from adaptive quadrature of norms.
const NORM_RTOL: f64 = 1e-12;

/// Piecewise-constant potential: value `values[k]` on
/// `[breakpoints[k], breakpoints[k+1])`, zero beyond the last breakpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPotential {
    breakpoints: Vec<f64>,
    values: Vec<C64>,
}

impl StepPotential {
    pub fn new(breakpoints: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints[0] != 0.0 {
            return Err(Error::InvalidParameter("first breakpoint must be 0".into()));
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(Error::InvalidParameter(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                values.len()
            )));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0])) || breakpoints.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter("breakpoints must be finite and strictly increasing".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::InvalidParameter("potential values must be finite".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn zero() -> Self {
        Self { breakpoints: vec![0.0], values: vec![] }
    }

    /// The dissipative barrier `iγ·χ_[0,R]`.
    pub fn barrier(gamma: f64, r: f64) -> Self {
        Self { breakpoints: vec![0.0, r], values: vec![C64::new(0.0, gamma)] }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    /// Right end of the last piece.
    pub fn support_end(&self) -> f64 {
        *self.breakpoints.last().expect("at least one breakpoint")
    }

    /// Iterator over `(left, right, value)`.
    pub fn pieces(&self) -> impl DoubleEndedIterator<Item = (f64, f64, C64)> + '_ {
        self.breakpoints.windows(2).zip(&self.values).map(|(w, v)| (w[0], w[1], *v))
    }

    pub fn eval(&self, x: f64) -> C64 {
        if x < 0.0 || x >= self.support_end() {
            return C64::new(0.0, 0.0);
        }
        // first breakpoint strictly greater than x
        let k = self.breakpoints.partition_point(|&b| b <= x);
        self.values[k - 1]
    }

    pub fn l1_norm(&self) -> f64 {
        self.pieces().map(|(a, b, v)| v.norm() * (b - a)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.norm() == 0.0)
    }

    /// Same function with adjacent equal pieces merged and trailing zero
    /// pieces dropped.
    pub fn simplified(&self) -> Self {
        let mut bps = vec![0.0];
        let mut vals: Vec<C64> = vec![];
        for (_, b, v) in self.pieces() {
            if vals.last() == Some(&v) {
                *bps.last_mut().unwrap() = b;
            } else {
                vals.push(v);
                bps.push(b);
            }
        }
        while vals.last().is_some_and(|v| v.norm() == 0.0) {
            vals.pop();
            bps.pop();
        }
        Self { breakpoints: bps, values: vals }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Potential given by an evaluator, with non-smooth points and a tail bound.
#[derive(Clone)]
pub struct AnalyticPotential {
    name: String,
    eval: ComplexFn,
    knots: Vec<f64>,
    support_end: Option<f64>,
    tail: RealFn,
    log_density: Option<RealFn>,
}

impl AnalyticPotential {
    /// `knots` must start at 0 and list every point where `q` fails to be
    /// smooth. `tail(X)` must bound `∫_X^∞ |q|` and decrease to 0.
    /// `log_density(u)`, when given, is `e^u·|q(e^u)|` and lets slowly decaying
    /// tails be integrated in logarithmic coordinates.
    pub fn new(
        name: impl Into<String>,
        eval: ComplexFn,
        knots: Vec<f64>,
        support_end: Option<f64>,
        tail: RealFn,
        log_density: Option<RealFn>,
    ) -> Result<Self> {
        if knots.first() != Some(&0.0) || knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("knots must start at 0 and increase".into()));
        }
        if let Some(s) = support_end {
            if s < *knots.last().unwrap() {
                return Err(Error::InvalidParameter("support end precedes the last knot".into()));
            }
        }
        Ok(Self { name: name.into(), eval, knots, support_end, tail, log_density })
    }

    /// `A·exp(−((x−c)/w)²)` restricted to `[0, ∞)`.
    pub fn gaussian_bump(amplitude: C64, center: f64, width: f64) -> Result<Self> {
        if !(width > 0.0) {
            return Err(Error::InvalidParameter("bump width must be positive".into()));
        }
        let amp = amplitude.norm();
        let tail = move |x: f64| {
            let whole = amp * width * PI.sqrt();
            if x <= center {
                return whole;
            }
            let d = (x - center) / width;
            whole.min(amp * width * width / (2.0 * (x - center)) * (-d * d).exp())
        };
        Self::new(
            format!("gaussian({amplitude}, {center}, {width})"),
            Arc::new(move |x: f64| {
                if x < 0.0 {
                    return C64::new(0.0, 0.0);
                }
                let d = (x - center) / width;
                amplitude * (-d * d).exp()
            }),
            vec![0.0],
            None,
            Arc::new(tail),
            None,
        )
    }

    /// `i/(x·log^α x)` on `[e, ∞)`, zero before; integrable for `α > 1`.
    pub fn log_decay(alpha: f64) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(Error::InvalidParameter("log-decay potential needs α > 1".into()));
        }
        Self::new(
            format!("log_decay({alpha})"),
            Arc::new(move |x: f64| {
                if x < E {
                    C64::new(0.0, 0.0)
                } else {
                    C64::new(0.0, 1.0 / (x * x.ln().powf(alpha)))
                }
            }),
            vec![0.0, E],
            None,
            Arc::new(move |x: f64| 1.0 / ((alpha - 1.0) * x.max(E).ln().powf(alpha - 1.0))),
            Some(Arc::new(move |u: f64| if u < 1.0 { 0.0 } else { u.powf(-alpha) })),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, x: f64) -> C64 {
        match self.support_end {
            Some(s) if x > s => C64::new(0.0, 0.0),
            _ if x < 0.0 => C64::new(0.0, 0.0),
            _ => (self.eval)(x),
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn support_end(&self) -> Option<f64> {
        self.support_end
    }

    pub fn tail_bound(&self, x: f64) -> f64 {
        match self.support_end {
            Some(s) if x >= s => 0.0,
            _ => (self.tail)(x),
        }
    }

    fn integrate_weighted(&self, w: &WeightPair) -> Result<f64> {
        let f = |x: f64| w.a(x) * self.eval(x).norm();
        let mut total = 0.0;
        let mut ends: Vec<f64> = self.knots.clone();
        if let Some(s) = self.support_end {
            if s > *ends.last().unwrap() {
                ends.push(s);
            }
        }
        for seg in ends.windows(2) {
            total += integrate(f, seg[0], seg[1], NORM_RTOL, 0.0)?.0;
        }
        if self.support_end.is_some() {
            return Ok(total);
        }
        let start = ends.last().copied().unwrap().max(1.0);
        if start > *ends.last().unwrap() {
            total += integrate(f, *ends.last().unwrap(), start, NORM_RTOL, 0.0)?.0;
        }
        let tail = match &self.log_density {
            Some(ld) => {
                let ld = ld.clone();
                integrate_tail(move |u| w.a_log(u) * ld(u), start.ln(), 1.0, 1e-14)
            }
            None => integrate_tail(f, start, start.max(1.0), 1e-14),
        };
        let tail = tail.map_err(|e| match e {
            Error::Divergent(msg) => Error::Divergent(format!("{} in {} weighted by {}", msg, self.name, w.name())),
            other => other,
        })?;
        Ok(total + tail)
    }
}

impl fmt::Debug for AnalyticPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticPotential")
            .field("name", &self.name)
            .field("knots", &self.knots)
            .field("support_end", &self.support_end)
            .finish()
    }
}

/// A complex integrable potential on `[0, ∞)`.
#[derive(Clone, Debug)]
pub enum Potential {
    Step(StepPotential),
    Analytic(AnalyticPotential),
}

impl From<StepPotential> for Potential {
    fn from(s: StepPotential) -> Self {
        Potential::Step(s)
    }
}

impl From<AnalyticPotential> for Potential {
    fn from(a: AnalyticPotential) -> Self {
        Potential::Analytic(a)
    }
}

impl Potential {
    pub fn zero() -> Self {
        StepPotential::zero().into()
    }

    pub fn barrier(gamma: f64, r: f64) -> Self {
        StepPotential::barrier(gamma, r).into()
    }

    pub fn eval(&self, x: f64) -> C64 {
        match self {
            Potential::Step(s) => s.eval(x),
            Potential::Analytic(a) => a.eval(x),
        }
    }

    /// Value used on a grid segment `[lo, hi]` that contains no knot in its
    /// interior: for step profiles the value of the piece holding the midpoint,
    /// so one-sided limits at breakpoints come out right.
    pub fn eval_on_segment(&self, x: f64, lo: f64, hi: f64) -> C64 {
        match self {
            Potential::Step(s) => s.eval(0.5 * (lo + hi)),
            Potential::Analytic(a) => a.eval(x),
        }
    }

    pub fn as_step(&self) -> Option<&StepPotential> {
        match self {
            Potential::Step(s) => Some(s),
            Potential::Analytic(_) => None,
        }
    }

    /// Points where `q` may fail to be smooth, starting at 0.
    pub fn knots(&self) -> Vec<f64> {
        match self {
            Potential::Step(s) => s.breakpoints.clone(),
            Potential::Analytic(a) => a.knots.clone(),
        }
    }

    /// Right end of the support when it is known to be compact.
    pub fn support_end(&self) -> Option<f64> {
        match self {
            Potential::Step(s) => Some(s.support_end()),
            Potential::Analytic(a) => a.support_end,
        }
    }

    /// Upper bound for `∫_X^∞ |q|`.
    pub fn tail_bound(&self, x: f64) -> f64 {
        match self {
            Potential::Step(s) => s
                .pieces()
                .map(|(a, b, v)| v.norm() * (b - a.max(x)).max(0.0))
                .sum(),
            Potential::Analytic(a) => a.tail_bound(x),
        }
    }

    /// Smallest `X` of the form `x₀·2^k` beyond every knot with `τ(X) ≤ tol`.
    pub fn effective_end(&self, tol: f64) -> Result<f64> {
        if let Some(s) = self.support_end() {
            return Ok(s);
        }
        let mut x = self.knots().last().copied().unwrap_or(0.0).max(1.0);
        for _ in 0..40 {
            let t = self.tail_bound(x);
            if t <= tol {
                return Ok(x);
            }
            x *= 2.0;
        }
        Err(Error::TailTooLarge { x, tail: self.tail_bound(x) })
    }

    /// `sup |q|`, exact for step profiles and sampled otherwise.
    pub fn max_abs(&self) -> f64 {
        match self {
            Potential::Step(s) => s.max_abs(),
            Potential::Analytic(a) => {
                let end = self.effective_end(1e-16).unwrap_or(1e3);
                let n = 4000;
                let mut m: f64 = 0.0;
                for k in 0..=n {
                    m = m.max(a.eval(end * k as f64 / n as f64).norm());
                }
                for &k in &a.knots {
                    m = m.max(a.eval(k).norm());
                }
                m
            }
        }
    }

    /// `‖q‖₁ = ∫₀^∞ |q|`.
    pub fn l1_norm(&self) -> Result<f64> {
        match self {
            Potential::Step(s) => Ok(s.l1_norm()),
            Potential::Analytic(a) => a.integrate_weighted(&WeightPair::unit()),
        }
    }

    /// `‖q‖_a = ∫₀^∞ a(x)|q(x)| dx`.
    pub fn weighted_norm(&self, w: &WeightPair) -> Result<f64> {
        if w.is_unit() {
            return self.l1_norm();
        }
        match self {
            Potential::Step(s) => {
                let mut total = 0.0;
                for (a, b, v) in s.pieces() {
                    if v.norm() > 0.0 {
                        total += v.norm() * w.integral_of_a(a, b)?;
                    }
                }
                Ok(total)
            }
            Potential::Analytic(a) => a.integrate_weighted(w),
        }
    }

    /// `q·χ_[0,X]`.
    pub fn truncate(&self, x: f64) -> Result<Potential> {
        if !(x > 0.0) {
            return Err(Error::InvalidParameter("truncation level must be positive".into()));
        }
        match self {
            Potential::Step(s) => {
                if x >= s.support_end() {
                    return Ok(self.clone());
                }
                let mut bps = vec![];
                let mut vals = vec![];
                for (a, _, v) in s.pieces() {
                    if a >= x {
                        break;
                    }
                    bps.push(a);
                    vals.push(v);
                }
                bps.push(x);
                Ok(StepPotential::new(bps, vals)?.into())
            }
            Potential::Analytic(a) => {
                let end = a.support_end.map_or(x, |s| s.min(x));
                let mut knots: Vec<f64> = a.knots.iter().copied().filter(|&k| k < end).collect();
                knots.push(end);
                let inner = a.clone();
                let log_density = a.log_density.clone().map(|ld| {
                    let f: RealFn = Arc::new(move |u: f64| if u.exp() <= end { ld(u) } else { 0.0 });
                    f
                });
                Ok(AnalyticPotential::new(
                    format!("{}·χ[0,{}]", a.name, x),
                    Arc::new(move |t| inner.eval(t)),
                    knots,
                    Some(end),
                    a.tail.clone(),
                    log_density,
                )?
                .into())
            }
        }
    }

    /// `q(·) + 𝓆(·−X)` on the half-line. The flag reports whether the shifted
    /// copy overlaps the support of `q`.
    pub fn shift_superpose(&self, line: &LinePotential, x: f64) -> Result<(Potential, bool)> {
        let (lo, hi) = line.support().ok_or_else(|| {
            Error::InvalidParameter("shifted line potential must have compact support".into())
        })?;
        if line.is_zero() {
            return Ok((self.clone(), false));
        }
        if x + lo < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "shift {x} does not move the support [{lo}, {hi}] into the half-line"
            )));
        }
        let overlap = match self.support_end() {
            Some(end) => end > x + lo,
            None => true,
        };
        if let (Potential::Step(s), Some(pieces)) = (self, line.step_pieces()) {
            let mut cuts: Vec<f64> = s.breakpoints.clone();
            for &(a, b, _) in &pieces {
                cuts.push(a + x);
                cuts.push(b + x);
            }
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let vals = cuts
                .windows(2)
                .map(|w| {
                    let m = 0.5 * (w[0] + w[1]);
                    s.eval(m) + line.eval(m - x)
                })
                .collect();
            let sum = StepPotential::new(cuts, vals)?.simplified();
            return Ok((sum.into(), overlap));
        }
        let q = self.clone();
        let l = line.clone();
        let mut knots = self.knots();
        knots.extend(line.knots().into_iter().map(|k| k + x).filter(|&k| k > 0.0));
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let support_end = self.support_end().map(|e| e.max(x + hi));
        let (q2, l2) = (self.clone(), line.clone());
        let combined = AnalyticPotential::new(
            format!("superposition shifted by {x}"),
            Arc::new(move |t| q.eval(t) + l.eval(t - x)),
            knots,
            support_end,
            Arc::new(move |t| q2.tail_bound(t) + l2.right_tail_from(t - x)),
            None,
        )?;
        Ok((combined.into(), overlap))
    }

    /// Even extension to the line.
    pub fn even_extension(&self) -> LinePotential {
        LinePotential::new(self.clone(), self.clone())
    }
}

/// A potential on the whole line, stored as its two half-line restrictions:
/// `right(x) = 𝓆(x)` and `left(x) = 𝓆(−x)` for `x ≥ 0`.
#[derive(Clone, Debug)]
pub struct LinePotential {
    left: Potential,
    right: Potential,
}

impl LinePotential {
    pub fn new(left: Potential, right: Potential) -> Self {
        Self { left, right }
    }

    pub fn zero() -> Self {
        Self::new(Potential::zero(), Potential::zero())
    }

    /// `iγ·χ_[−a,a]`.
    pub fn symmetric_barrier(gamma: f64, a: f64) -> Self {
        Potential::barrier(gamma, a).even_extension()
    }

    /// Step profile on ℝ with `values[k]` on `[breakpoints[k], breakpoints[k+1])`.
    pub fn from_steps(breakpoints: Vec<f64>, values: Vec<C64>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || breakpoints.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter("line breakpoints must increase, one more than values".into()));
        }
        let eval = |x: f64| -> C64 {
            if x < breakpoints[0] || x >= *breakpoints.last().unwrap() {
                return C64::new(0.0, 0.0);
            }
            let k = breakpoints.partition_point(|&b| b <= x);
            values[k - 1]
        };
        let half = |sign: f64| -> Result<StepPotential> {
            let mut cuts: Vec<f64> = breakpoints.iter().map(|&b| sign * b).filter(|&b| b > 0.0).collect();
            cuts.push(0.0);
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            let vals = cuts.windows(2).map(|w| eval(sign * 0.5 * (w[0] + w[1]))).collect();
            Ok(StepPotential::new(cuts, vals)?.simplified())
        };
        Ok(Self::new(half(-1.0)?.into(), half(1.0)?.into()))
    }

    pub fn left(&self) -> &Potential {
        &self.left
    }

    pub fn right(&self) -> &Potential {
        &self.right
    }

    pub fn eval(&self, x: f64) -> C64 {
        if x >= 0.0 {
            self.right.eval(x)
        } else {
            self.left.eval(-x)
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!((&self.left, &self.right), (Potential::Step(l), Potential::Step(r)) if l.is_zero() && r.is_zero())
    }

    /// `∫_ℝ |𝓆|`.
    pub fn l1_norm(&self) -> Result<f64> {
        Ok(self.left.l1_norm()? + self.right.l1_norm()?)
    }

    /// Compact support `[lo, hi]` when known.
    pub fn support(&self) -> Option<(f64, f64)> {
        Some((-self.left.support_end()?, self.right.support_end()?))
    }

    fn knots(&self) -> Vec<f64> {
        let mut k: Vec<f64> = self.left.knots().into_iter().map(|x| -x).collect();
        k.extend(self.right.knots());
        k.sort_by(f64::total_cmp);
        k.dedup();
        k
    }

    /// Bound for `∫_t^∞ |𝓆|` for any real `t`.
    fn right_tail_from(&self, t: f64) -> f64 {
        if t >= 0.0 {
            self.right.tail_bound(t)
        } else {
            self.right.tail_bound(0.0) + self.left.tail_bound(0.0)
        }
    }

    /// Pieces `(a, b, v)` over ℝ in increasing order, when both halves are
    /// step profiles.
    pub fn step_pieces(&self) -> Option<Vec<(f64, f64, C64)>> {
        let (l, r) = (self.left.as_step()?, self.right.as_step()?);
        let mut out: Vec<(f64, f64, C64)> = l.pieces().rev().map(|(a, b, v)| (-b, -a, v)).collect();
        out.extend(r.pieces());
        Some(out)
    }
}

/// The pair `(a, â)` with `â(x) = x/a(x)`.
#[derive(Clone)]
pub struct WeightPair {
    name: String,
    a: RealFn,
    a_log: RealFn,
    antiderivative: Option<RealFn>,
    tail_integral: Option<RealFn>,
    unit: bool,
}

impl fmt::Debug for WeightPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightPair({})", self.name)
    }
}

impl WeightPair {
    /// A custom weight. `a_log(u)` must equal `a(e^u)`; it is used where
    /// `e^u` would overflow.
    pub fn custom(name: impl Into<String>, a: RealFn, a_log: Option<RealFn>) -> Self {
        let a2 = a.clone();
        let a_log = a_log.unwrap_or_else(|| Arc::new(move |u: f64| a2(u.exp())));
        Self { name: name.into(), a, a_log, antiderivative: None, tail_integral: None, unit: false }
    }

    /// `a ≡ 1`.
    pub fn unit() -> Self {
        Self {
            name: "unit".into(),
            a: Arc::new(|_| 1.0),
            a_log: Arc::new(|_| 1.0),
            antiderivative: Some(Arc::new(|x| x)),
            tail_integral: None,
            unit: true,
        }
    }

    /// `a(x) = 1 + x^p`.
    pub fn poly(p: f64) -> Self {
        Self {
            name: format!("1+x^{p}"),
            a: Arc::new(move |x: f64| 1.0 + x.powf(p)),
            a_log: Arc::new(move |u: f64| 1.0 + (p * u).exp()),
            antiderivative: Some(Arc::new(move |x: f64| x + x.powf(p + 1.0) / (p + 1.0))),
            tail_integral: Some(Arc::new(move |t: f64| (1.0 / p) * t.powf(-p).ln_1p())),
            unit: false,
        }
    }

    /// `a(x) = log^β x` for `x ≥ e^β` and `β^β` before (β > 1).
    pub fn log_power(beta: f64) -> Self {
        let knee = beta.exp();
        let floor = beta.powf(beta);
        Self {
            name: format!("log^{beta}"),
            a: Arc::new(move |x: f64| if x >= knee { x.ln().powf(beta) } else { floor }),
            a_log: Arc::new(move |u: f64| if u >= beta { u.powf(beta) } else { floor }),
            antiderivative: None,
            tail_integral: Some(Arc::new(move |t: f64| {
                let beyond = |s: f64| s.ln().powf(1.0 - beta) / (beta - 1.0);
                if t >= knee {
                    beyond(t)
                } else {
                    (beta - t.ln()) / floor + beyond(knee)
                }
            })),
            unit: false,
        }
    }

    /// `a = 1` on `[0, R]` and `(log x / log R)²` beyond, for `R > 1`.
    pub fn compact_support(r: f64) -> Self {
        let lr = r.ln();
        Self {
            name: format!("compact({r})"),
            a: Arc::new(move |x: f64| if x <= r { 1.0 } else { (x.ln() / lr).powi(2) }),
            a_log: Arc::new(move |u: f64| if u <= lr { 1.0 } else { (u / lr).powi(2) }),
            antiderivative: None,
            tail_integral: Some(Arc::new(move |t: f64| {
                if t >= r {
                    lr * lr / t.ln()
                } else {
                    (r / t).ln() + lr
                }
            })),
            unit: false,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_unit(&self) -> bool {
        self.unit
    }

    pub fn a(&self, x: f64) -> f64 {
        (self.a)(x)
    }

    /// `a(e^u)`.
    pub fn a_log(&self, u: f64) -> f64 {
        (self.a_log)(u)
    }

    /// `â(x) = x / a(x)`.
    pub fn a_hat(&self, x: f64) -> f64 {
        x / self.a(x)
    }

    /// `∫_lo^hi a(x) dx`.
    pub fn integral_of_a(&self, lo: f64, hi: f64) -> Result<f64> {
        match &self.antiderivative {
            Some(big_a) => Ok(big_a(hi) - big_a(lo)),
            None => Ok(integrate(|x| self.a(x), lo, hi, NORM_RTOL, 0.0)?.0),
        }
    }

    /// Smallest `x` with `â(x) ≥ c`, or `None` when `â` stays below `c`.
    pub fn a_hat_inverse(&self, c: f64) -> Option<f64> {
        if c <= 0.0 {
            return Some(0.0);
        }
        let mut hi = 1.0;
        while self.a_hat(hi) < c {
            hi *= 2.0;
            if hi > 1e300 {
                return None;
            }
        }
        let mut lo = 0.0;
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 1e-15 * hi {
                break;
            }
            if self.a_hat(mid) >= c {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(hi)
    }

    /// `∫_t^∞ dx/(x a(x))`, closed form when known and logarithmic-coordinate
    /// quadrature otherwise.
    pub fn tail_integral(&self, t: f64) -> Result<f64> {
        if let Some(f) = &self.tail_integral {
            return Ok(f(t));
        }
        if self.unit {
            return Err(Error::WeightCondition("∫ dx/(x a(x)) diverges for a ≡ 1".into()));
        }
        integrate_tail(|u| 1.0 / self.a_log(u), t.ln(), 1.0, 1e-14)
            .map_err(|e| Error::WeightCondition(format!("∫ dx/(x a(x)) for {}: {}", self.name, e)))
    }

    /// Checks monotonicity of `a` and `â` on a logarithmic grid and the
    /// convergence of `∫₁^∞ dx/(x a(x))`.
    pub fn check_hypotheses(&self) -> Result<()> {
        let grid: Vec<f64> = (-200..=200).map(|k| 10f64.powf(k as f64 * 0.05)).collect();
        for w in grid.windows(2) {
            let (a0, a1) = (self.a(w[0]), self.a(w[1]));
            if !(a0 > 0.0) || a1 < a0 {
                return Err(Error::WeightCondition(format!("a is not positive nondecreasing near x = {}", w[0])));
            }
            if !(self.a_hat(w[1]) > self.a_hat(w[0])) {
                return Err(Error::WeightCondition(format!("â is not increasing near x = {}", w[0])));
            }
        }
        let t = self.tail_integral(1.0)?;
        if !t.is_finite() {
            return Err(Error::WeightCondition("∫₁^∞ dx/(x a(x)) is infinite".into()));
        }
        Ok(())
    }
}

/// JSON descriptor of a potential.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialSpec {
    Step { breakpoints: Vec<f64>, values: Vec<[f64; 2]> },
    Barrier { gamma: f64, #[serde(rename = "R")] r: f64 },
    Gaussian { amplitude: [f64; 2], center: f64, width: f64 },
    LogDecay { alpha: f64 },
}

impl PotentialSpec {
    pub fn build(&self) -> Result<Potential> {
        Ok(match self {
            PotentialSpec::Step { breakpoints, values } => StepPotential::new(
                breakpoints.clone(),
                values.iter().map(|v| C64::new(v[0], v[1])).collect(),
            )?
            .into(),
            PotentialSpec::Barrier { gamma, r } => {
                if !(*gamma > 0.0 && *r > 0.0) {
                    return Err(Error::InvalidParameter("barrier needs γ > 0 and R > 0".into()));
                }
                Potential::barrier(*gamma, *r)
            }
            PotentialSpec::Gaussian { amplitude, center, width } => {
                AnalyticPotential::gaussian_bump(C64::new(amplitude[0], amplitude[1]), *center, *width)?.into()
            }
            PotentialSpec::LogDecay { alpha } => AnalyticPotential::log_decay(*alpha)?.into(),
        })
    }

    /// Parses inline JSON, or reads it from a file when `text` is a path.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            return Ok(serde_json::from_str(trimmed)?);
        }
        let body = std::fs::read_to_string(text)
            .map_err(|e| Error::InvalidParameter(format!("cannot read potential {text}: {e}")))?;
        Ok(serde_json::from_str(&body)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn l1_examples() {
        assert_eq!(Potential::barrier(2.0, 3.0).l1_norm().unwrap(), 6.0);
        assert_eq!(Potential::zero().l1_norm().unwrap(), 0.0);
        let lp: Potential = AnalyticPotential::log_decay(2.0).unwrap().into();
        let v = lp.l1_norm().unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn gaussian_norm_matches_erf_free_value() {
        // centred far from 0, so the half-line mass is the full-line mass
        let g: Potential = AnalyticPotential::gaussian_bump(c(0.0, 2.0), 10.0, 1.0).unwrap().into();
        assert!((g.l1_norm().unwrap() - 2.0 * PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn weighted_examples() {
        let b = Potential::barrier(1.0, 2.0);
        assert_eq!(b.weighted_norm(&WeightPair::unit()).unwrap(), b.l1_norm().unwrap());
        let want = 2.0 + (2.0 / 3.0) * 2f64.powf(1.5);
        assert!((b.weighted_norm(&WeightPair::poly(0.5)).unwrap() - want).abs() < 1e-12);
        assert!((want - 3.8856).abs() < 1e-4);
        let lp: Potential = AnalyticPotential::log_decay(1.5).unwrap().into();
        assert!(matches!(lp.weighted_norm(&WeightPair::log_power(2.0)), Err(Error::Divergent(_))));
        // α = 4: 4·∫_1^2 u^{-4} du + ∫_2^∞ u^{-2} du = 7/6 + 1/2
        let lp4: Potential = AnalyticPotential::log_decay(4.0).unwrap().into();
        let v = lp4.weighted_norm(&WeightPair::log_power(2.0)).unwrap();
        assert!((v - 5.0 / 3.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn truncation_examples() {
        let b = Potential::barrier(1.0, 5.0);
        let t = b.truncate(7.0).unwrap();
        assert_eq!(t.as_step().unwrap(), b.as_step().unwrap());
        let t = b.truncate(2.0).unwrap();
        assert_eq!(t.as_step().unwrap(), &StepPotential::barrier(1.0, 2.0));
        assert!(Potential::zero().truncate(3.0).unwrap().as_step().unwrap().is_zero());
    }

    #[test]
    fn superposition_examples() {
        let b = Potential::barrier(1.0, 1.0);
        let line = LinePotential::symmetric_barrier(2.0, 1.0);
        let (s, overlap) = b.shift_superpose(&line, 10.0).unwrap();
        assert!(!overlap);
        let s = s.as_step().unwrap().clone();
        assert_eq!(s.breakpoints(), &[0.0, 1.0, 9.0, 11.0]);
        assert_eq!(s.values(), &[c(0.0, 1.0), c(0.0, 0.0), c(0.0, 2.0)]);
        let (same, _) = b.shift_superpose(&LinePotential::zero(), 5.0).unwrap();
        assert_eq!(same.as_step().unwrap(), b.as_step().unwrap());
        let (_, overlap) = b.shift_superpose(&line, 1.5).unwrap();
        assert!(overlap);
    }

    #[test]
    fn even_extension_examples() {
        let e = Potential::barrier(1.0, 2.0).even_extension();
        assert_eq!(e.support(), Some((-2.0, 2.0)));
        assert_eq!(e.eval(-1.5), c(0.0, 1.0));
        assert_eq!(e.eval(-2.5), c(0.0, 0.0));
        assert_eq!(e.l1_norm().unwrap(), 4.0);
        let pieces = e.step_pieces().unwrap();
        assert_eq!(pieces, vec![(-2.0, -0.0, c(0.0, 1.0)), (0.0, 2.0, c(0.0, 1.0))]);
        let lp = LinePotential::from_steps(vec![-1.0, 0.5, 2.0], vec![c(1.0, 0.0), c(0.0, 3.0)]).unwrap();
        assert_eq!(lp.left().as_step().unwrap().breakpoints(), &[0.0, 1.0]);
        assert_eq!(lp.right().as_step().unwrap().breakpoints(), &[0.0, 0.5, 2.0]);
        assert!((lp.l1_norm().unwrap() - (1.5 + 4.5)).abs() < 1e-15);
    }

    #[test]
    fn weight_inverse_and_tails() {
        let w = WeightPair::poly(0.5);
        for &c in &[0.1, 0.5, 1.0, 7.0] {
            let x = w.a_hat_inverse(c).unwrap();
            assert!((w.a_hat(x) - c).abs() < 1e-12 * c);
        }
        assert!(WeightPair::poly(1.0).a_hat_inverse(2.0).is_none());
        let t = WeightPair::compact_support(50.0).tail_integral(50.0).unwrap();
        assert!((t - 50f64.ln()).abs() < 1e-14);
        // closed form against quadrature
        let p = WeightPair::poly(0.3);
        let numeric = WeightPair::custom("poly", Arc::new(|x: f64| 1.0 + x.powf(0.3)), None);
        let (a, b) = (p.tail_integral(0.7).unwrap(), numeric.tail_integral(0.7).unwrap());
        assert!((a - b).abs() < 1e-10 * a);
        assert!(WeightPair::unit().check_hypotheses().is_err());
        WeightPair::poly(0.5).check_hypotheses().unwrap();
    }

    #[test]
    fn descriptors_round_trip() {
        let s = PotentialSpec::parse(r#"{"kind":"barrier","gamma":1.5,"R":4}"#).unwrap();
        assert_eq!(s, PotentialSpec::Barrier { gamma: 1.5, r: 4.0 });
        let q = s.build().unwrap();
        assert_eq!(q.l1_norm().unwrap(), 6.0);
        let s = PotentialSpec::parse(r#"{"kind":"step","breakpoints":[0,1,2],"values":[[1,0],[0,-1]]}"#).unwrap();
        assert_eq!(s.build().unwrap().eval(1.5), c(0.0, -1.0));
        assert!(PotentialSpec::parse(r#"{"kind":"step","breakpoints":[0,1],"values":[]}"#).unwrap().build().is_err());
    }
}
