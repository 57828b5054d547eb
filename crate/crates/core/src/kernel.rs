//! Reproducing kernel, the two-term pointwise error identity
//! e(n,x) = A_n a_n(x;g) P_{n+1}(x) - B_n a_{n+1}(x;g) P_n(x),
//! the quotient-coefficient integrals a_n(x;g) with g = (f(x)-f(y))/(x-y),
//! and the psi_2 remainder function behind the even-exponent cancellation.

use crate::error::{Error, Result};
use crate::expansion::{piece_moments, nodes_for_degree, Piece};
use crate::gamma::{falling_factorial, ln_gamma};
use crate::jacobi::{jacobi_eval_all, jacobi_norm, JacobiParams};
use crate::phi::{PhiFunction, PhiKind};
use crate::quadrature::gauss_jacobi;

/// The constants of the two-term error identity.
#[derive(Debug, Clone, Copy)]
pub struct KernelConstants {
    pub n: usize,
    pub a_n: f64,
    pub b_n: f64,
    pub rho_n: f64,
}

pub fn kernel_constants(p: JacobiParams, n: usize) -> KernelConstants {
    let (a, b) = (p.alpha(), p.beta());
    let nf = n as f64;
    let s = a + b;
    // At n = 0 with alpha + beta = -1 the raw quotient is 0/0 with limit
    // 2/(s+2); cancel the common factor there.
    let a_n = if n == 0 && s + 1.0 == 0.0 {
        2.0 / (s + 2.0)
    } else {
        2.0 * (nf + 1.0) * (nf + s + 1.0) / ((2.0 * nf + s + 2.0) * (2.0 * nf + s + 1.0))
    };
    let b_n = 2.0 * (nf + a + 1.0) * (nf + b + 1.0)
        / ((2.0 * nf + s + 2.0) * (2.0 * nf + s + 3.0));
    let rho_n = 2.0_f64.powf(-s) / (2.0 * nf + s + 2.0)
        * (ln_gamma(nf + 2.0) + ln_gamma(nf + s + 2.0)
            - ln_gamma(nf + a + 1.0)
            - ln_gamma(nf + b + 1.0))
        .exp();
    KernelConstants { n, a_n, b_n, rho_n }
}

/// Christoffel–Darboux kernel K_n(x,y) = sum_{k<=n} P_k(x)P_k(y)/sigma_k.
///
/// Quotient form away from the diagonal; plain summation within 1e-6 of it
/// (the quotient has a removable singularity there).
pub fn kernel_eval(p: JacobiParams, n: usize, x: f64, y: f64) -> Result<f64> {
    if (x - y).abs() > 1e-6 {
        let c = kernel_constants(p, n);
        let px = jacobi_eval_all(p, n + 1, x)?;
        let py = jacobi_eval_all(p, n + 1, y)?;
        Ok(c.rho_n * (px[n + 1] * py[n] - px[n] * py[n + 1]) / (x - y))
    } else {
        let px = jacobi_eval_all(p, n, x)?;
        let py = jacobi_eval_all(p, n, y)?;
        Ok(px
            .iter()
            .zip(&py)
            .enumerate()
            .map(|(k, (&vx, &vy))| vx * vy / jacobi_norm(p, k))
            .sum())
    }
}

/// Difference quotient (z(x)-z(y))/(x-y), switching to a centered finite
/// difference of z at x when the points nearly coincide.
fn stable_dq(z: &crate::phi::SmoothFn, x: f64, y: f64) -> f64 {
    if (x - y).abs() < 1e-6 {
        let h = 1e-6;
        (z.eval(x + h) - z.eval(x - h)) / (2.0 * h)
    } else {
        (z.eval(x) - z.eval(y)) / (x - y)
    }
}

/// ((x-a)^l - (y-a)^l) / (x - y), stable near y = x via the symmetric
/// expansion about the midpoint of (x-a) and (y-a).
fn stable_power_dq(a: f64, l: f64, x: f64, y: f64) -> f64 {
    let u = x - a;
    let v = y - a;
    let t = (u - v) / (u + v);
    if t.abs() < 1e-3 {
        let mid = (u + v) / 2.0;
        l * mid.powf(l - 1.0) * (1.0 + (l - 1.0) * (l - 2.0) * t * t / 6.0)
    } else {
        (u.powf(l) - v.powf(l)) / (x - y)
    }
}

/// a_k(x;g) for all k <= n_max, where g(y) = (f(x)-f(y))/(x-y).
///
/// Interior kinds only. The integral is split at the singular point and,
/// for x > a, additionally at the midpoint between a and x, so that every
/// algebraic factor is absorbed into a Gauss–Jacobi weight and the
/// removable kink of g at y = x is evaluated stably.
pub fn quotient_coeffs_upto(
    f: &PhiFunction,
    p: JacobiParams,
    x: f64,
    n_max: usize,
) -> Result<Vec<f64>> {
    if !f.kind().is_interior() {
        return Err(Error::InvalidParams(
            "quotient coefficients are defined for the interior kinds".into(),
        ));
    }
    match f.kind() {
        PhiKind::InteriorMinus => {
            // Reflect to the plus kind: a_k^{(a,b)}(x; g of f) equals
            // (-1)^{k+1} a_k^{(b,a)}(-x; g of f(-.)).
            let mut coeffs = quotient_coeffs_upto(&f.reflected(), p.swapped(), -x, n_max)?;
            for (k, c) in coeffs.iter_mut().enumerate() {
                if k % 2 == 0 {
                    *c = -*c;
                }
            }
            return Ok(coeffs);
        }
        PhiKind::InteriorAbs => {
            // g is linear in f, and |y-a|^l splits into the two sided kinds.
            let plus =
                PhiFunction::new(PhiKind::InteriorPlus, f.a(), f.lambda(), f.z().clone())?;
            let minus =
                PhiFunction::new(PhiKind::InteriorMinus, f.a(), f.lambda(), f.z().clone())?;
            let cp = quotient_coeffs_upto(&plus, p, x, n_max)?;
            let cm = quotient_coeffs_upto(&minus, p, x, n_max)?;
            return Ok(cp.iter().zip(&cm).map(|(u, v)| u + v).collect());
        }
        _ => {}
    }
    // From here: InteriorPlus or Step (f vanishes left of a).
    let (alpha, beta) = (p.alpha(), p.beta());
    let (a, l) = (f.a(), f.lambda());
    let z = f.z();
    let n_nodes = nodes_for_degree(n_max);
    let mut pieces: Vec<Piece> = Vec::new();
    if x < a {
        // f(x) = 0: g(y) = f(y)/(y-x), supported on [a,1].
        pieces.push(Piece {
            rule: gauss_jacobi(JacobiParams::new(alpha, l)?, n_nodes)?,
            lo: a,
            hi: 1.0,
            smooth: Box::new(move |y| z.eval(y) * (1.0 + y).powf(beta) / (y - x)),
        });
    } else if x == a {
        if !(l > 0.0) {
            return Err(Error::NonIntegrable(
                "the quotient at x = a needs a positive exponent".into(),
            ));
        }
        // g(y) = z(y)(y-a)^{l-1} on [a,1].
        pieces.push(Piece {
            rule: gauss_jacobi(JacobiParams::new(alpha, l - 1.0)?, n_nodes)?,
            lo: a,
            hi: 1.0,
            smooth: Box::new(move |y| z.eval(y) * (1.0 + y).powf(beta)),
        });
    } else {
        let fx = f.eval(x)?;
        // Left of a: g(y) = f(x)/(x-y).
        pieces.push(Piece {
            rule: gauss_jacobi(JacobiParams::new(0.0, beta)?, n_nodes)?,
            lo: -1.0,
            hi: a,
            smooth: Box::new(move |y| fx * (1.0 - y).powf(alpha) / (x - y)),
        });
        // On [a,1] split g into (y-a)^l (z(x)-z(y))/(x-y)
        // plus z(x) ((x-a)^l - (y-a)^l)/(x-y).
        pieces.push(Piece {
            rule: gauss_jacobi(JacobiParams::new(alpha, l)?, n_nodes)?,
            lo: a,
            hi: 1.0,
            smooth: Box::new(move |y| (1.0 + y).powf(beta) * stable_dq(z, x, y)),
        });
        if l != 0.0 {
            let zx = z.eval(x);
            let mid = (a + x) / 2.0;
            // On [a, mid] the denominator x-y stays away from zero; the two
            // numerator powers integrate separately.
            pieces.push(Piece {
                rule: gauss_jacobi(JacobiParams::new(0.0, 0.0)?, n_nodes)?,
                lo: a,
                hi: mid,
                smooth: Box::new(move |y| {
                    zx * (x - a).powf(l) * p.weight(y) / (x - y)
                }),
            });
            pieces.push(Piece {
                rule: gauss_jacobi(JacobiParams::new(0.0, l)?, n_nodes)?,
                lo: a,
                hi: mid,
                smooth: Box::new(move |y| -zx * p.weight(y) / (x - y)),
            });
            // On [mid, 1] the power quotient is analytic (removable at y=x).
            pieces.push(Piece {
                rule: gauss_jacobi(JacobiParams::new(alpha, 0.0)?, n_nodes)?,
                lo: mid,
                hi: 1.0,
                smooth: Box::new(move |y| {
                    zx * (1.0 + y).powf(beta) * stable_power_dq(a, l, x, y)
                }),
            });
        }
    }
    let mut moments = piece_moments(p, n_max, &pieces);
    for (k, m) in moments.iter_mut().enumerate() {
        *m /= jacobi_norm(p, k);
    }
    Ok(moments)
}

/// a_n(x;g) for a single degree.
pub fn quotient_coeff(f: &PhiFunction, p: JacobiParams, x: f64, n: usize) -> Result<f64> {
    Ok(quotient_coeffs_upto(f, p, x, n)?[n])
}

/// The pointwise truncation error via the two-term identity
/// A_n a_n(x;g) P_{n+1}(x) - B_n a_{n+1}(x;g) P_n(x) (signed).
///
/// The step function at its own jump has a non-integrable quotient, so that
/// one case falls back to the defining kernel integral
/// ∫ K_n(x,y) (f(x)-f(y)) ω(y) dy, whose integrand stays bounded.
pub fn error_via_kernel(f: &PhiFunction, p: JacobiParams, n: usize, x: f64) -> Result<f64> {
    if f.kind() == PhiKind::Step && x == f.a() {
        return step_error_at_jump(f, p, n);
    }
    let q = quotient_coeffs_upto(f, p, x, n + 1)?;
    let c = kernel_constants(p, n);
    let vals = jacobi_eval_all(p, n + 1, x)?;
    Ok(c.a_n * q[n] * vals[n + 1] - c.b_n * q[n + 1] * vals[n])
}

fn step_error_at_jump(f: &PhiFunction, p: JacobiParams, n: usize) -> Result<f64> {
    let (alpha, beta) = (p.alpha(), p.beta());
    let a = f.a();
    let z = f.z();
    let half_jump = z.eval(a) / 2.0;
    // K_n(a, .) as an expansion in P_k with frozen coefficients P_k(a)/sigma_k.
    let mut ka: Vec<f64> = jacobi_eval_all(p, n, a)?;
    for (k, c) in ka.iter_mut().enumerate() {
        *c /= jacobi_norm(p, k);
    }
    let kernel_at = |y: f64| -> f64 {
        let vals = jacobi_eval_all(p, n, y).expect("node inside [-1,1]");
        ka.iter().zip(&vals).map(|(c, v)| c * v).sum()
    };
    let n_nodes = nodes_for_degree(n) + n / 2; // integrands of degree ~ 2n
    let pieces = vec![
        // y < a: f(a) - f(y) = z(a)/2.
        Piece {
            rule: gauss_jacobi(JacobiParams::new(0.0, beta)?, n_nodes)?,
            lo: -1.0,
            hi: a,
            smooth: Box::new(move |y| half_jump * (1.0 - y).powf(alpha) * kernel_at(y)),
        },
        // y > a: f(a) - f(y) = z(a)/2 - z(y).
        Piece {
            rule: gauss_jacobi(JacobiParams::new(alpha, 0.0)?, n_nodes)?,
            lo: a,
            hi: 1.0,
            smooth: Box::new(move |y| {
                (half_jump - z.eval(y)) * (1.0 + y).powf(beta) * kernel_at(y)
            }),
        },
    ];
    // Only the degree-0 moment of the constant 1 is needed: the kernel
    // integral itself is the error.
    let moments = piece_moments(p, 0, &pieces);
    Ok(moments[0])
}

/// The remainder factor psi_2(x,y) of the even-exponent analysis:
/// (m+1)! (y-a)^{m+1-lambda} h(x,y) / (x-y)^{m+2} with h the order-(m+1)
/// Taylor remainder of (x-a)^lambda expanded in powers of (x-y) about y.
///
/// m = floor(lambda), except m = lambda-1 at integer lambda.
pub fn psi2_eval(a: f64, lambda: f64, x: f64, y: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::InvalidParams(format!("need a positive exponent, got {lambda}")));
    }
    if !(x > a) || !(y >= a) {
        return Err(Error::Domain(format!("need x > a and y >= a, got x={x}, y={y}, a={a}")));
    }
    let m = if lambda.fract() == 0.0 { lambda as i64 - 1 } else { lambda.floor() as i64 };
    let m = m.max(0) as usize;
    let fact_m1: f64 = (1..=m + 1).map(|k| k as f64).product();
    let u = x - a;
    let v = y - a;
    if (x - y).abs() < 0.5 * v {
        // Binomial-tail series: psi_2 = (m+1)! sum_{j>=0}
        // (lambda)_{m+2+j} / (m+2+j)! (x-y)^j v^{-1-j}.
        let r = (x - y) / v;
        let mut term = falling_factorial(lambda, m + 2)
            / (1..=m + 2).map(|k| k as f64).product::<f64>()
            / v;
        let mut acc = term;
        let mut k = m + 2;
        loop {
            k += 1;
            term *= (lambda - (k - 1) as f64) / k as f64 * r;
            acc += term;
            if term.abs() < 1e-17 * acc.abs().max(1e-300) || k > m + 200 {
                break;
            }
        }
        return Ok(fact_m1 * acc);
    }
    // Direct form with the (y-a)^{m+1-lambda} prefactor folded in, so only
    // integer powers of v appear: h_folded =
    // v^{m+1-lambda} u^lambda - sum_{k<=m+1} (lambda)_k/k! v^{m+1-k}(x-y)^k.
    let mut h = v.powf(m as f64 + 1.0 - lambda) * u.powf(lambda);
    let mut coef = 1.0;
    for k in 0..=m + 1 {
        if k > 0 {
            coef *= (lambda - (k - 1) as f64) / k as f64;
        }
        h -= coef * v.powi((m + 1 - k) as i32) * (x - y).powi(k as i32);
    }
    Ok(fact_m1 * h / (x - y).powi(m as i32 + 2))
}
