//! Root finding for quantiles on the log scale.
//!
//! Brackets the root by doubling steps in `t = ln z`, then alternates Newton
//! steps with bisection whenever Newton would leave the bracket. Above the
//! median the survival function is used as the target so that upper-tail
//! quantiles keep full relative precision.

use crate::error::{probability, Error, Result};

pub const MAX_ITER: usize = 200;
pub const PROB_TOL: f64 = 1e-9;

/// Evaluation of a distribution at `t = ln z`: `(F, 1 − F, dF/dt)`.
pub type TailEval = (f64, f64, f64);

/// Solve `F(e^t) = p` for `t`.
pub fn solve_ln<E: Fn(f64) -> TailEval>(p: f64, eval: E, t0: f64) -> Result<f64> {
    probability(p)?;
    let upper = p > 0.5;
    let target = if upper { 1.0 - p } else { p };
    // g(t) increasing in t, root at zero.
    let g = |t: f64| -> (f64, f64) {
        let (f, s, d) = eval(t);
        if upper {
            (target - s, d)
        } else {
            (f - target, d)
        }
    };
    let mut iterations = 0;
    let (mut lo, mut hi);
    let (g0, _) = g(t0);
    if g0 == 0.0 {
        return Ok(t0);
    }
    let mut step = 1.0;
    if g0 < 0.0 {
        lo = t0;
        hi = t0 + step;
        loop {
            iterations += 1;
            if g(hi).0 >= 0.0 {
                break;
            }
            if iterations >= MAX_ITER || hi > 745.0 {
                return Err(Error::Convergence {
                    what: "quantile bracketing",
                    iterations,
                });
            }
            lo = hi;
            step *= 2.0;
            hi += step;
        }
    } else {
        hi = t0;
        lo = t0 - step;
        loop {
            iterations += 1;
            if g(lo).0 <= 0.0 {
                break;
            }
            if iterations >= MAX_ITER || lo < -745.0 {
                return Err(Error::Convergence {
                    what: "quantile bracketing",
                    iterations,
                });
            }
            hi = lo;
            step *= 2.0;
            lo -= step;
        }
    }

    let mut t = 0.5 * (lo + hi);
    let mut best = (f64::INFINITY, t);
    while iterations < MAX_ITER {
        iterations += 1;
        let (gt, d) = g(t);
        if gt.abs() < best.0 {
            best = (gt.abs(), t);
        }
        if gt == 0.0 {
            return Ok(t);
        }
        if gt < 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        if hi - lo <= 4.0 * f64::EPSILON * (1.0 + t.abs()) {
            return Ok(t);
        }
        let newton = t - gt / d;
        let next = if d > 0.0 && newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if next == t {
            return Ok(t);
        }
        t = next;
    }
    if best.0 <= PROB_TOL {
        Ok(best.1)
    } else {
        Err(Error::Convergence {
            what: "quantile search",
            iterations,
        })
    }
}
