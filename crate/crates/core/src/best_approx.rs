//! Best uniform polynomial approximation by discrete Remez exchange, plus a
//! Chebyshev interpolant for near-best comparison. Used to compare the
//! truncated expansions against the minimax benchmark E_n(f).

use crate::error::{Error, Result};
use crate::rates::{fit_rate, RateFit};

/// A degree-n polynomial stored in second-kind barycentric form on its n+2
/// equioscillation reference points.
#[derive(Debug, Clone)]
pub struct BestApprox {
    pub degree: usize,
    /// The equioscillation magnitude: the minimax error on the grid.
    pub minimax_error: f64,
    /// The n+2 alternation points, increasing.
    pub reference: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl BestApprox {
    /// Evaluate the best polynomial.
    pub fn eval(&self, x: f64) -> f64 {
        barycentric_eval(&self.reference, &self.weights, &self.values, x)
    }
}

fn barycentric_eval(nodes: &[f64], weights: &[f64], values: &[f64], x: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&xi, &wi), &vi) in nodes.iter().zip(weights).zip(values) {
        let d = x - xi;
        if d == 0.0 {
            return vi;
        }
        let c = wi / d;
        num += c * vi;
        den += c;
    }
    num / den
}

/// Barycentric weights for a sorted node set, computed in log scale so that
/// a hundred-plus nodes on [-1,1] neither under- nor overflow.
fn log_barycentric_weights(nodes: &[f64]) -> Vec<f64> {
    let m = nodes.len();
    let mut logs = vec![0.0f64; m];
    for i in 0..m {
        let mut s = 0.0;
        for j in 0..m {
            if j != i {
                s -= (nodes[i] - nodes[j]).abs().ln();
            }
        }
        logs[i] = s;
    }
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    logs.iter()
        .enumerate()
        // Signs alternate on a sorted node set.
        .map(|(i, &l)| if (m - 1 - i) % 2 == 0 { (l - top).exp() } else { -(l - top).exp() })
        .collect()
}

/// Discrete Remez exchange for the best degree-n uniform approximation of f
/// on [-1,1], over a dense Chebyshev grid augmented with `special_points`
/// (singular points and endpoints, so the true error peaks are seen).
pub fn remez(
    f: &dyn Fn(f64) -> f64,
    n: usize,
    special_points: &[f64],
) -> Result<BestApprox> {
    let m_grid = 20 * (n + 1);
    let mut grid: Vec<f64> = (0..=m_grid)
        .map(|j| -(std::f64::consts::PI * j as f64 / m_grid as f64).cos())
        .collect();
    for &s in special_points {
        if s.abs() <= 1.0 {
            grid.push(s);
        }
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
    let fvals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    if fvals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("function is unbounded on the grid".into()));
    }

    // Initial reference: evenly spaced grid indices. The grid is
    // Chebyshev-distributed, so these sit near the alternation points of
    // T_{n+1} and are guaranteed distinct.
    let mut reference: Vec<usize> = (0..n + 2)
        .map(|j| j * (grid.len() - 1) / (n + 1))
        .collect();

    let fscale = fvals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut drop_right_on_tie = false;
    let mut result = None;
    for _ in 0..100 {
        let nodes: Vec<f64> = reference.iter().map(|&i| grid[i]).collect();
        let fr: Vec<f64> = reference.iter().map(|&i| fvals[i]).collect();
        let w = log_barycentric_weights(&nodes);
        let denom: f64 = w
            .iter()
            .enumerate()
            .map(|(i, &wi)| if i % 2 == 0 { wi } else { -wi })
            .sum();
        let h = w.iter().zip(&fr).map(|(&wi, &fi)| wi * fi).sum::<f64>() / denom;
        if !h.is_finite() {
            return Err(Error::NonIntegrable("alternation level became degenerate".into()));
        }
        let values: Vec<f64> = fr
            .iter()
            .enumerate()
            .map(|(i, &fi)| fi - if i % 2 == 0 { h } else { -h })
            .collect();

        // Error on the whole grid.
        let errs: Vec<f64> = grid
            .iter()
            .zip(&fvals)
            .map(|(&x, &fx)| fx - barycentric_eval(&nodes, &w, &values, x))
            .collect();
        let (argmax, &maxerr) = errs
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.abs().partial_cmp(&b.1.abs()).unwrap())
            .unwrap();
        let maxerr = maxerr.abs();

        // Relative levelness, with an absolute floor for the degenerate
        // case where f is itself a polynomial and the error is roundoff.
        if maxerr - h.abs() <= 1e-10 * maxerr.max(1e-300) || maxerr <= 1e-13 * fscale {
            result = Some(BestApprox {
                degree: n,
                minimax_error: maxerr,
                reference: nodes,
                weights: w,
                values,
            });
            break;
        }

        // Multi-point exchange: one extremum per maximal run of constant
        // error sign, then trim to n+2 keeping the global extremum.
        let mut cands: Vec<usize> = Vec::new();
        let mut run_best = 0usize;
        let mut run_sign = errs[0] >= 0.0;
        for i in 1..grid.len() {
            let s = if errs[i] == 0.0 { run_sign } else { errs[i] > 0.0 };
            if s != run_sign {
                cands.push(run_best);
                run_best = i;
                run_sign = s;
            } else if errs[i].abs() > errs[run_best].abs() {
                run_best = i;
            }
        }
        cands.push(run_best);
        if cands.len() < n + 2 {
            // The sign structure collapsed (f is itself a polynomial of
            // degree <= n on the grid): the current level is already best.
            result = Some(BestApprox {
                degree: n,
                minimax_error: maxerr,
                reference: nodes,
                weights: w,
                values,
            });
            break;
        }
        while cands.len() > n + 2 {
            if cands.len() == n + 3 {
                // Drop whichever end point is smaller to preserve parity;
                // near-exact ties (symmetric f) alternate sides so a
                // two-cycle between mirror references cannot persist.
                let (lo, hi) = (errs[cands[0]].abs(), errs[*cands.last().unwrap()].abs());
                let tie = (lo - hi).abs() <= 1e-6 * lo.max(hi);
                if (tie && drop_right_on_tie) || (!tie && hi < lo) {
                    cands.pop();
                } else {
                    cands.remove(0);
                }
            } else {
                // Drop the adjacent same-magnitude-lightest pair.
                let mut best_pair = 0;
                let mut best_val = f64::INFINITY;
                for i in 0..cands.len() - 1 {
                    let v = errs[cands[i]].abs().max(errs[cands[i + 1]].abs());
                    if v < best_val && cands[i] != argmax && cands[i + 1] != argmax {
                        best_val = v;
                        best_pair = i;
                    }
                }
                cands.drain(best_pair..best_pair + 2);
            }
        }
        if seen.contains(&cands) {
            // Revisiting a reference means the endpoint tie-break is
            // cycling; flip it and continue from the repeated set.
            drop_right_on_tie = !drop_right_on_tie;
            seen.clear();
        }
        seen.push(cands.clone());
        reference = cands;
    }
    result.ok_or_else(|| Error::NonIntegrable("exchange did not converge in 100 iterations".into()))
}

/// The scaled minimax errors n E_n(f) / sqrt(1-a^2) for f = |x-a|, whose
/// limit is the absolute-value approximation constant (about 0.2802).
#[derive(Debug, Clone)]
pub struct BernsteinCheck {
    /// (n, n E_n / sqrt(1-a^2)) pairs.
    pub scaled: Vec<(usize, f64)>,
    /// Log-log fit of E_n against n; the slope should be -1.
    pub fit: RateFit,
    /// The scaled value at the largest n.
    pub limit_estimate: f64,
}

pub fn bernstein_check(a: f64, degrees: &[usize]) -> Result<BernsteinCheck> {
    if !(a > -1.0 && a < 1.0) {
        return Err(Error::InvalidParams(format!("kink must be interior, got {a}")));
    }
    let f = move |x: f64| (x - a).abs();
    let scale = (1.0 - a * a).sqrt();
    let mut scaled = Vec::new();
    let mut ns = Vec::new();
    let mut es = Vec::new();
    for &n in degrees {
        let best = remez(&f, n, &[a, -1.0, 1.0])?;
        scaled.push((n, n as f64 * best.minimax_error / scale));
        ns.push(n as f64);
        es.push(best.minimax_error);
    }
    let fit = fit_rate(&ns, &es, false)?;
    let limit_estimate = scaled.last().map(|&(_, v)| v).unwrap_or(f64::NAN);
    Ok(BernsteinCheck { scaled, fit, limit_estimate })
}

/// Interpolant at the n+1 Chebyshev extreme points cos(j pi / n), in the
/// standard barycentric form (half weights at the ends, alternating signs).
/// A near-best reference: its uniform error exceeds E_n by at most a small
/// Lebesgue-constant factor.
#[derive(Debug, Clone)]
pub struct ChebyshevInterpolant {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    values: Vec<f64>,
}

impl ChebyshevInterpolant {
    pub fn new(f: &dyn Fn(f64) -> f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("need degree at least 1".into()));
        }
        let nodes: Vec<f64> = (0..=n)
            .map(|j| -(std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        let weights: Vec<f64> = (0..=n)
            .map(|j| {
                let w = if j == 0 || j == n { 0.5 } else { 1.0 };
                if j % 2 == 0 { w } else { -w }
            })
            .collect();
        let values: Vec<f64> = nodes.iter().map(|&x| f(x)).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain("function is unbounded at a node".into()));
        }
        Ok(Self { nodes, weights, values })
    }

    pub fn eval(&self, x: f64) -> f64 {
        barycentric_eval(&self.nodes, &self.weights, &self.values, x)
    }

    /// Max-norm error of the interpolant against f on a dense grid.
    pub fn sup_error(&self, f: &dyn Fn(f64) -> f64, grid_size: usize) -> f64 {
        (0..=grid_size)
            .map(|j| {
                let x = -(std::f64::consts::PI * j as f64 / grid_size as f64).cos();
                (f(x) - self.eval(x)).abs()
            })
            .fold(0.0, f64::max)
    }
}
