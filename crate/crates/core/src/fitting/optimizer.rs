//! Projected limited-memory BFGS on a box.
//!
//! Minimises `f` over `[lower, upper]^k`. Search directions come from the
//! usual two-loop recursion; coordinates pinned at a bound with the gradient
//! pushing outward are frozen for that step. Step lengths are found by
//! Armijo backtracking along the projected path, halving on failure or on a
//! non-finite objective.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimOptions {
    pub memory: usize,
    pub max_iter: usize,
    /// Converged when the projected-gradient max-norm falls below
    /// `grad_tol · max(1, |f|)`.
    pub grad_tol: f64,
    pub lower: f64,
    pub upper: f64,
    /// Largest move of any coordinate in one step.
    pub max_step: f64,
}

impl Default for OptimOptions {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iter: 500,
            grad_tol: 1e-6,
            lower: -30.0,
            upper: 30.0,
            max_step: 5.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub grad: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub projected_grad_norm: f64,
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

fn project(x: &mut [f64], lo: f64, hi: f64) {
    for v in x {
        *v = v.clamp(lo, hi);
    }
}

fn projected_grad_norm(x: &[f64], g: &[f64], lo: f64, hi: f64) -> f64 {
    x.iter()
        .zip(g)
        .map(|(&xi, &gi)| ((xi - gi).clamp(lo, hi) - xi).abs())
        .fold(0.0, f64::max)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `f` returns `None` where the objective cannot be evaluated; such points are
/// treated as `+∞`.
pub fn minimize<F>(mut f: F, x0: &[f64], opts: &OptimOptions) -> Option<OptimResult>
where
    F: FnMut(&[f64]) -> Option<(f64, Vec<f64>)>,
{
    let (lo, hi) = (opts.lower, opts.upper);
    let mut x = x0.to_vec();
    project(&mut x, lo, hi);
    let (mut fx, mut g) = f(&x).filter(|(v, g)| v.is_finite() && g.iter().all(|d| d.is_finite()))?;
    let k = x.len();
    let mut mem: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut iterations = 0;
    let mut pg = projected_grad_norm(&x, &g, lo, hi);
    let mut stalls = 0;

    while iterations < opts.max_iter {
        if pg <= opts.grad_tol * fx.abs().max(1.0) {
            break;
        }
        iterations += 1;

        // Frozen coordinates: at a bound with the descent direction pointing out.
        let free: Vec<bool> = (0..k)
            .map(|i| !((x[i] <= lo && g[i] > 0.0) || (x[i] >= hi && g[i] < 0.0)))
            .collect();
        let gf: Vec<f64> = (0..k).map(|i| if free[i] { g[i] } else { 0.0 }).collect();

        // Two-loop recursion.
        let mut q = gf.clone();
        let mut alphas = Vec::with_capacity(mem.len());
        for (s, y, rho) in mem.iter().rev() {
            let a = rho * dot(s, &q);
            for i in 0..k {
                q[i] -= a * y[i];
            }
            alphas.push(a);
        }
        let h0 = mem
            .back()
            .map(|(s, y, _)| dot(s, y) / dot(y, y))
            .filter(|v| v.is_finite() && *v > 0.0)
            .unwrap_or(1.0);
        for v in &mut q {
            *v *= h0;
        }
        for ((s, y, rho), a) in mem.iter().zip(alphas.iter().rev()) {
            let b = rho * dot(y, &q);
            for i in 0..k {
                q[i] += s[i] * (a - b);
            }
        }
        let mut d: Vec<f64> = (0..k).map(|i| if free[i] { -q[i] } else { 0.0 }).collect();
        if dot(&d, &gf) >= 0.0 {
            // Not a descent direction: restart from steepest descent.
            mem.clear();
            d = gf.iter().map(|v| -v).collect();
        }
        let dmax = d.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if dmax == 0.0 {
            break;
        }
        let mut t = if mem.is_empty() { 1.0 / dmax } else { 1.0 };
        t = t.min(opts.max_step / dmax);

        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let mut xn: Vec<f64> = (0..k).map(|i| x[i] + t * d[i]).collect();
            project(&mut xn, lo, hi);
            let dir: f64 = (0..k).map(|i| g[i] * (xn[i] - x[i])).sum();
            if let Some((fnew, gnew)) = f(&xn) {
                if fnew.is_finite()
                    && gnew.iter().all(|v| v.is_finite())
                    && fnew <= fx + ARMIJO * dir.min(0.0)
                {
                    accepted = Some((xn, fnew, gnew));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((xn, fnew, gnew)) = accepted else {
            break;
        };

        let s: Vec<f64> = (0..k).map(|i| xn[i] - x[i]).collect();
        let y: Vec<f64> = (0..k).map(|i| gnew[i] - g[i]).collect();
        let sy = dot(&s, &y);
        if sy > 1e-12 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() && sy > 0.0 {
            if mem.len() == opts.memory {
                mem.pop_front();
            }
            mem.push_back((s, y, 1.0 / sy));
        }
        let decrease = fx - fnew;
        x = xn;
        fx = fnew;
        g = gnew;
        pg = projected_grad_norm(&x, &g, lo, hi);
        if decrease <= 1e-15 * fx.abs().max(1.0) {
            stalls += 1;
            if stalls >= 5 {
                break;
            }
        } else {
            stalls = 0;
        }
    }
    Some(OptimResult {
        converged: pg <= opts.grad_tol * fx.abs().max(1.0),
        x,
        value: fx,
        grad: g,
        iterations,
        projected_grad_norm: pg,
    })
}
