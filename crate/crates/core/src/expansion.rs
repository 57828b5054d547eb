//! Jacobi expansion coefficients of the singular model functions, truncated
//! sums, and the pointwise / weighted / max error functionals.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jacobi::{jacobi_eval_all, jacobi_norm, JacobiParams};
use crate::phi::{PhiFunction, PhiKind};
use crate::quadrature::{gauss_jacobi, QuadRule};

/// A piece of a split integral: an interval, a rule absorbing its algebraic
/// endpoint factors, and the remaining smooth factor.
pub(crate) struct Piece<'a> {
    pub rule: QuadRule,
    pub lo: f64,
    pub hi: f64,
    pub smooth: Box<dyn Fn(f64) -> f64 + Sync + 'a>,
}

/// Moments m_k = sum over pieces of ∫ smooth(y) P_k(y) d(rule weight),
/// for all k <= n_max in one recurrence pass per node.
pub(crate) fn piece_moments(p: JacobiParams, n_max: usize, pieces: &[Piece]) -> Vec<f64> {
    // Flatten to (point, effective weight) pairs.
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for piece in pieces {
        let half = (piece.hi - piece.lo) / 2.0;
        let mid = (piece.hi + piece.lo) / 2.0;
        let scale = half.powf(piece.rule.params.alpha() + piece.rule.params.beta() + 1.0);
        for (&t, &w) in piece.rule.nodes.iter().zip(&piece.rule.weights) {
            let y = mid + half * t;
            pts.push((y, w * scale * (piece.smooth)(y)));
        }
    }
    // Parallel over node chunks; chunk results summed in a fixed order so
    // the output is deterministic.
    let partials: Vec<Vec<f64>> = pts
        .par_chunks(64)
        .map(|chunk| {
            let mut acc = vec![0.0; n_max + 1];
            for &(y, w) in chunk {
                let vals = jacobi_eval_all(p, n_max, y).expect("node inside [-1,1]");
                for (m, v) in acc.iter_mut().zip(&vals) {
                    *m += w * v;
                }
            }
            acc
        })
        .collect();
    let mut moments = vec![0.0; n_max + 1];
    for part in partials {
        for (m, v) in moments.iter_mut().zip(&part) {
            *m += v;
        }
    }
    moments
}

/// Coefficients a_0..a_{n_max} of a Jacobi expansion.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub params: JacobiParams,
    pub coeffs: Vec<f64>,
    /// Node count of the quadrature that produced the coefficients.
    pub quad_nodes: usize,
}

impl CoefficientTable {
    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// S_n(x), the partial sum through degree n.
    pub fn truncated_eval(&self, n: usize, x: f64) -> Result<f64> {
        if n > self.n_max() {
            return Err(Error::InvalidParams(format!(
                "degree {n} exceeds the table's n_max {}",
                self.n_max()
            )));
        }
        let vals = jacobi_eval_all(self.params, n, x)?;
        Ok(vals.iter().zip(&self.coeffs).map(|(v, c)| v * c).sum())
    }

    /// All partial sums S_0(x)..S_{n_max}(x) in one pass.
    pub fn partial_sums(&self, x: f64) -> Result<Vec<f64>> {
        let vals = jacobi_eval_all(self.params, self.n_max(), x)?;
        let mut out = Vec::with_capacity(self.coeffs.len());
        let mut acc = 0.0;
        for (v, c) in vals.iter().zip(&self.coeffs) {
            acc += v * c;
            out.push(acc);
        }
        Ok(out)
    }

    /// Coefficient-wise sum of two tables over the same parameters.
    pub fn add(&self, other: &CoefficientTable) -> Result<CoefficientTable> {
        if self.params != other.params || self.coeffs.len() != other.coeffs.len() {
            return Err(Error::InvalidParams("mismatched coefficient tables".into()));
        }
        Ok(CoefficientTable {
            params: self.params,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            quad_nodes: self.quad_nodes.max(other.quad_nodes),
        })
    }

    /// CSV serialization, header `k,coeff`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,coeff\n");
        for (k, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{k},{c:.16e}\n"));
        }
        out
    }

    /// Parse the `to_csv` format back into a coefficient table.
    pub fn from_csv(text: &str, params: JacobiParams) -> Result<CoefficientTable> {
        let mut coeffs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if i == 0 {
                if line.trim() != "k,coeff" {
                    return Err(Error::InvalidParams(format!("unexpected CSV header {line:?}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (k_str, c_str) = line
                .split_once(',')
                .ok_or_else(|| Error::InvalidParams(format!("bad CSV row {line:?}")))?;
            let k: usize = k_str
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParams(format!("bad index in {line:?}")))?;
            if k != coeffs.len() {
                return Err(Error::InvalidParams(format!("non-contiguous index {k}")));
            }
            let c: f64 = c_str
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParams(format!("bad value in {line:?}")))?;
            coeffs.push(c);
        }
        if coeffs.is_empty() {
            return Err(Error::InvalidParams("empty coefficient CSV".into()));
        }
        Ok(CoefficientTable { params, coeffs, quad_nodes: 0 })
    }
}

/// Integral pieces of ∫ f P_k ω, with every algebraic factor absorbed into
/// a mapped Gauss–Jacobi weight so no singularity meets a quadrature node.
pub(crate) fn phi_pieces<'a>(
    f: &'a PhiFunction,
    p: JacobiParams,
    n_nodes: usize,
) -> Result<Vec<Piece<'a>>> {
    let (alpha, beta) = (p.alpha(), p.beta());
    let (a, l) = (f.a(), f.lambda());
    let z = f.z();
    let mut pieces = Vec::new();
    match f.kind() {
        PhiKind::InteriorPlus | PhiKind::InteriorAbs | PhiKind::Step => {
            // [a, 1]: (y-a)^l (or nothing for step) and (1-y)^alpha absorbed.
            let left_exp = if f.kind() == PhiKind::Step { 0.0 } else { l };
            pieces.push(Piece {
                rule: gauss_jacobi(JacobiParams::new(alpha, left_exp)?, n_nodes)?,
                lo: a,
                hi: 1.0,
                smooth: Box::new(move |y| z.eval(y) * (1.0 + y).powf(beta)),
            });
        }
        _ => {}
    }
    match f.kind() {
        PhiKind::InteriorMinus | PhiKind::InteriorAbs => {
            // [-1, a]: (a-y)^l and (1+y)^beta absorbed.
            pieces.push(Piece {
                rule: gauss_jacobi(JacobiParams::new(l, beta)?, n_nodes)?,
                lo: -1.0,
                hi: a,
                smooth: Box::new(move |y| z.eval(y) * (1.0 - y).powf(alpha)),
            });
        }
        PhiKind::BoundaryRight => {
            if !(l + alpha > -1.0) {
                return Err(Error::NonIntegrable(format!(
                    "(1-x)^{l} against a (1-x)^{alpha} weight is not integrable"
                )));
            }
            pieces.push(Piece {
                rule: gauss_jacobi(JacobiParams::new(l + alpha, beta)?, n_nodes)?,
                lo: -1.0,
                hi: 1.0,
                smooth: Box::new(move |y| z.eval(y)),
            });
        }
        PhiKind::BoundaryLeft => {
            if !(l + beta > -1.0) {
                return Err(Error::NonIntegrable(format!(
                    "(1+x)^{l} against a (1+x)^{beta} weight is not integrable"
                )));
            }
            pieces.push(Piece {
                rule: gauss_jacobi(JacobiParams::new(alpha, l + beta)?, n_nodes)?,
                lo: -1.0,
                hi: 1.0,
                smooth: Box::new(move |y| z.eval(y)),
            });
        }
        _ => {}
    }
    Ok(pieces)
}

/// Node count resolving a degree-n projection: the post-absorption integrand
/// is a degree-n polynomial times a smooth factor.
pub(crate) fn nodes_for_degree(n: usize) -> usize {
    n.div_ceil(2) + 64
}

/// Expansion coefficients a_k, k <= n_max, of f in the (alpha, beta) basis.
pub fn expansion_coeffs(
    f: &PhiFunction,
    p: JacobiParams,
    n_max: usize,
) -> Result<CoefficientTable> {
    let n_nodes = nodes_for_degree(n_max);
    let pieces = phi_pieces(f, p, n_nodes)?;
    let mut moments = piece_moments(p, n_max, &pieces);
    for (k, m) in moments.iter_mut().enumerate() {
        *m /= jacobi_norm(p, k);
    }
    Ok(CoefficientTable { params: p, coeffs: moments, quad_nodes: n_nodes })
}

/// e_f(n, x) = |f(x) - S_n(x)|.
pub fn pointwise_error(f: &PhiFunction, t: &CoefficientTable, n: usize, x: f64) -> Result<f64> {
    Ok((f.eval(x)? - t.truncated_eval(n, x)?).abs())
}

/// e_f(n, x) for every n <= n_max in one pass.
pub fn pointwise_error_all_n(f: &PhiFunction, t: &CoefficientTable, x: f64) -> Result<Vec<f64>> {
    let fx = f.eval(x)?;
    Ok(t.partial_sums(x)?.into_iter().map(|s| (fx - s).abs()).collect())
}

/// The damping weight (1-x)^{max{alpha/2+1/4,0}} (1+x)^{max{beta/2+1/4,0}}.
pub fn damping_weight(p: JacobiParams, x: f64) -> f64 {
    let ea = (p.alpha() / 2.0 + 0.25).max(0.0);
    let eb = (p.beta() / 2.0 + 0.25).max(0.0);
    (1.0 - x).powf(ea) * (1.0 + x).powf(eb)
}

/// Error flavors: raw |e|, the damped-and-distance-weighted |ê|, and the
/// damped-only |ẽ|.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorFlavor {
    Raw,
    WeightedHat,
    WeightedTilde,
}

fn flavor_weight(flavor: ErrorFlavor, p: JacobiParams, singular_point: f64, x: f64) -> f64 {
    match flavor {
        ErrorFlavor::Raw => 1.0,
        ErrorFlavor::WeightedHat => damping_weight(p, x) * (x - singular_point).abs(),
        ErrorFlavor::WeightedTilde => damping_weight(p, x),
    }
}

/// ê_f(n, x): the damping weight times |x - a| times the error. For the
/// boundary kinds the singular point is the endpoint, so the distance
/// factor becomes (1 -+ x).
pub fn weighted_error_hat(
    f: &PhiFunction,
    t: &CoefficientTable,
    n: usize,
    x: f64,
) -> Result<f64> {
    Ok(flavor_weight(ErrorFlavor::WeightedHat, t.params, f.singular_point(), x)
        * pointwise_error(f, t, n, x)?)
}

/// ẽ_f(n, x): the damping weight times the error (no distance factor).
pub fn weighted_error_tilde(
    f: &PhiFunction,
    t: &CoefficientTable,
    n: usize,
    x: f64,
) -> Result<f64> {
    Ok(flavor_weight(ErrorFlavor::WeightedTilde, t.params, f.singular_point(), x)
        * pointwise_error(f, t, n, x)?)
}

/// Max of the pointwise error over a grid.
pub fn max_error(f: &PhiFunction, t: &CoefficientTable, n: usize, grid: &[f64]) -> Result<f64> {
    assert!(!grid.is_empty());
    let mut best = 0.0_f64;
    for &x in grid {
        best = best.max(pointwise_error(f, t, n, x)?);
    }
    Ok(best)
}

/// Sup over the grid of the flavored error, for every n <= n_max at once.
pub fn sup_error_all_n(
    f: &PhiFunction,
    t: &CoefficientTable,
    grid: &[f64],
    flavor: ErrorFlavor,
) -> Result<Vec<f64>> {
    let maxima = grid
        .par_chunks(16)
        .map(|chunk| {
            let mut acc = vec![0.0_f64; t.n_max() + 1];
            for &x in chunk {
                let w = flavor_weight(flavor, t.params, f.singular_point(), x);
                if w == 0.0 {
                    continue;
                }
                let errs = pointwise_error_all_n(f, t, x)?;
                for (m, e) in acc.iter_mut().zip(&errs) {
                    *m = m.max(w * e);
                }
            }
            Ok(acc)
        })
        .try_reduce(
            || vec![0.0_f64; t.n_max() + 1],
            |mut a, b| {
                for (m, e) in a.iter_mut().zip(&b) {
                    *m = m.max(*e);
                }
                Ok(a)
            },
        )?;
    Ok(maxima)
}

/// The default max-norm grid: Chebyshev-distributed points, the singular
/// point, and geometric approaches to both endpoints.
pub fn default_grid(singular_point: f64) -> Vec<f64> {
    let m = 2001;
    let mut grid: Vec<f64> = (0..m)
        .map(|i| (std::f64::consts::PI * i as f64 / (m - 1) as f64).cos())
        .collect();
    grid.push(singular_point);
    for k in 2..=8 {
        let off = 10.0_f64.powi(-k);
        grid.push(1.0 - off);
        grid.push(-1.0 + off);
    }
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    grid
}
