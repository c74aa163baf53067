//! Adaptive Gauss–Kronrod quadrature on finite intervals and a block scheme
//! for half-infinite tails.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for k in 0..7 {
        let x = h * XGK[k];
        let s = f(c - x) + f(c + x);
        kron += WGK[k] * s;
        if k % 2 == 1 {
            gauss += WG[k / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive G7/K15 quadrature of `f` over `[a, b]`.
///
/// Returns `(value, error_estimate)`. Stops once the summed error is below
/// `max(abs_tol, rel_tol·|value|)`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v, e) = gk15(&f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, err: e });
    let (mut total, mut total_err) = (v, e);
    for _ in 0..4000 {
        if !total.is_finite() {
            return Err(Error::QuadratureNonConvergence(format!(
                "non-finite integrand on [{a}, {b}]"
            )));
        }
        if total_err <= abs_tol.max(rel_tol * total.abs()) {
            return Ok((total, total_err));
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval cannot be split further in floating point
            heap.push(Piece { err: 0.0, ..worst });
            total_err = heap.iter().map(|p| p.err).sum();
            continue;
        }
        let (v1, e1) = gk15(&f, worst.a, mid);
        let (v2, e2) = gk15(&f, mid, worst.b);
        heap.push(Piece { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Piece { a: mid, b: worst.b, value: v2, err: e2 });
        total = heap.iter().map(|p| p.value).sum();
        total_err = heap.iter().map(|p| p.err).sum::<f64>().max(0.0);
    }
    if total_err <= abs_tol.max(rel_tol * total.abs()) * 10.0 {
        return Ok((total, total_err));
    }
    Err(Error::QuadratureNonConvergence(format!(
        "error {total_err:e} on [{a}, {b}] after 4000 subdivisions"
    )))
}

/// Integral of a nonnegative `f` over `[start, ∞)` by consecutive blocks of
/// doubling length, starting with length `first_len`.
///
/// The sum stops when a block contributes less than `stop_rel` of the running
/// total. Blocks that stop shrinking signal divergence.
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    first_len: f64,
    stop_rel: f64,
) -> Result<f64> {
    let mut lo = start;
    let mut len = first_len;
    let mut sum = 0.0;
    let mut prev_block = f64::INFINITY;
    let mut stalled = 0;
    for _ in 0..1020 {
        let hi = lo + len;
        if !hi.is_finite() {
            break;
        }
        if !f(hi).is_finite() {
            return Err(Error::Divergent(format!("tail integrand overflows at x = {hi}")));
        }
        let (block, _) = integrate(&f, lo, hi, (stop_rel * 0.1).max(1e-13), 0.0)?;
        let block = block.max(0.0);
        sum += block;
        if !sum.is_finite() {
            return Err(Error::Divergent(format!("tail sum overflowed beyond x = {lo}")));
        }
        if sum > 0.0 && block <= stop_rel * sum {
            return Ok(sum);
        }
        if block > 0.0 && block >= prev_block * (1.0 - 1e-9) {
            stalled += 1;
            if stalled >= 12 {
                return Err(Error::Divergent(format!(
                    "tail blocks stop decaying beyond x = {lo} (block {block:e})"
                )));
            }
        } else {
            stalled = 0;
        }
        if block > 0.0 {
            prev_block = block;
        }
        lo = hi;
        len *= 2.0;
    }
    if sum == 0.0 {
        return Ok(0.0);
    }
    Err(Error::QuadratureNonConvergence(format!(
        "tail integral still changing at x = {lo} (sum {sum:e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn growing_tail_is_divergent() {
        let r = integrate_tail(|u: f64| (1.5 * u).exp() / (u * u * u), 1.0, 1.0, 1e-14);
        assert!(matches!(r, Err(Error::Divergent(_))), "{r:?}");
    }

    #[test]
    fn polynomial_exact() {
        let (v, _) = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, 1e-14, 0.0).unwrap();
        assert!((v - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        let (v, _) = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1e-10, 0.0).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn tail_of_inverse_square() {
        let v = integrate_tail(|u| 1.0 / (u * u), 1.0, 1.0, 1e-14).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tail_divergence_detected() {
        let r = integrate_tail(|u| 1.0 / u, 1.0, 1.0, 1e-14);
        assert!(matches!(r, Err(Error::Divergent(_))));
        let r = integrate_tail(|u: f64| u.sqrt(), 1.0, 1.0, 1e-14);
        assert!(matches!(r, Err(Error::Divergent(_))));
    }
}
