//! Gauss–Jacobi quadrature and singularity-absorbing integration.
//!
//! Rules come from the Golub–Welsch eigenproblem of the Jacobi-weight
//! recurrence, solved with an implicit-shift QL sweep that tracks first
//! eigenvector components only. Endpoint algebraic singularities are
//! absorbed into the rule's weight; oscillatory Bessel integrands are
//! handled panel-by-panel at the oscillation scale.

use crate::bessel::bessel_j;
use crate::error::{Error, Result};

use crate::jacobi::{jacobi_norm, JacobiParams};

/// A Gauss rule for integrals against (1-x)^alpha (1+x)^beta on [-1,1].
#[derive(Debug, Clone)]
pub struct QuadRule {
    pub params: JacobiParams,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadRule {
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Integrate f against the rule's weight.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// N-point Gauss–Jacobi rule, exact for polynomials of degree <= 2N-1.
pub fn gauss_jacobi(p: JacobiParams, n: usize) -> Result<QuadRule> {
    if n == 0 {
        return Err(Error::InvalidParams("quadrature rule needs at least one node".into()));
    }
    if n > 20_000 {
        return Err(Error::Resource(format!("quadrature size {n} exceeds the 20000-node cap")));
    }
    let (a, b) = (p.alpha(), p.beta());
    // Symmetric tridiagonal recurrence coefficients.
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n]; // e[k] couples rows k-1 and k
    d[0] = (b - a) / (a + b + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let den = (2.0 * kf + a + b) * (2.0 * kf + a + b + 2.0);
        d[k] = (b * b - a * a) / den;
        let e2 = if k == 1 {
            4.0 * (a + 1.0) * (b + 1.0) / ((a + b + 2.0).powi(2) * (a + b + 3.0))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + a + b)
                / ((2.0 * kf + a + b).powi(2)
                    * (2.0 * kf + a + b + 1.0)
                    * (2.0 * kf + a + b - 1.0))
        };
        e[k] = e2.sqrt();
    }
    // First components of the eigenvectors, seeded at the unit vector e_1.
    let mut q = vec![0.0; n];
    q[0] = 1.0;
    tql_first_components(&mut d, &mut e, &mut q)?;
    let sigma0 = jacobi_norm(p, 0);
    let mut pairs: Vec<(f64, f64)> = d
        .iter()
        .zip(&q)
        .map(|(&x, &c)| (x, sigma0 * c * c))
        .collect();
    pairs.sort_by(|l, r| l.0.partial_cmp(&r.0).unwrap());
    let (nodes, weights): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(QuadRule { params: p, nodes, weights })
}

/// Implicit-shift QL for a symmetric tridiagonal matrix, accumulating only
/// the first row of the eigenvector matrix into `q`. On return `d` holds
/// the eigenvalues (unsorted) and `q` the first eigenvector components.
fn tql_first_components(d: &mut [f64], e: &mut [f64], q: &mut [f64]) -> Result<()> {
    let n = d.len();
    if n == 1 {
        return Ok(());
    }
    // Shift the off-diagonals down one slot; e[n-1] becomes workspace zero.
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::NonIntegrable(
                    "eigenvalue iteration failed to converge".into(),
                ));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p_acc = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let bb = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p_acc;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p_acc;
                r = (d[i] - g) * s + 2.0 * c * bb;
                p_acc = s * r;
                d[i + 1] = g + p_acc;
                g = c * r - bb;
                // Rotate the tracked first components.
                f = q[i + 1];
                q[i + 1] = s * q[i] + c * f;
                q[i] = c * q[i] - s * f;
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            d[l] -= p_acc;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// An integrand on [lo,hi] of the form
/// (y-lo)^{left_exp} (hi-y)^{right_exp} * smooth(y).
pub struct SingularIntegrand<F: FnMut(f64) -> f64> {
    pub lo: f64,
    pub hi: f64,
    pub left_exp: f64,
    pub right_exp: f64,
    pub smooth: F,
}

/// Integrate a singular integrand by absorbing the endpoint powers into a
/// mapped Gauss–Jacobi rule.
pub fn integrate_singular<F: FnMut(f64) -> f64>(
    mut s: SingularIntegrand<F>,
    n: usize,
) -> Result<f64> {
    if !(s.left_exp > -1.0) || !(s.right_exp > -1.0) {
        return Err(Error::NonIntegrable(format!(
            "endpoint exponents must exceed -1 (left {}, right {})",
            s.left_exp, s.right_exp
        )));
    }
    if !(s.hi > s.lo) {
        return Err(Error::Domain(format!("empty interval [{}, {}]", s.lo, s.hi)));
    }
    let rule_params = JacobiParams::new(s.right_exp, s.left_exp)?;
    let rule = gauss_jacobi(rule_params, n)?;
    integrate_singular_with(&rule, s.lo, s.hi, &mut s.smooth)
}

/// Same as `integrate_singular`, reusing a prebuilt rule whose params are
/// (right_exp, left_exp).
pub fn integrate_singular_with(
    rule: &QuadRule,
    lo: f64,
    hi: f64,
    smooth: &mut dyn FnMut(f64) -> f64,
) -> Result<f64> {
    if !(hi > lo) {
        return Err(Error::Domain(format!("empty interval [{lo}, {hi}]")));
    }
    let half = (hi - lo) / 2.0;
    let mid = (hi + lo) / 2.0;
    let scale = half.powf(rule.params.alpha() + rule.params.beta() + 1.0);
    let mut acc = 0.0;
    for (&t, &w) in rule.nodes.iter().zip(&rule.weights) {
        acc += w * smooth(mid + half * t);
    }
    Ok(scale * acc)
}

/// Result of a Bessel-transform integral, with an accuracy flag raised when
/// the oscillation forced the panel count past the cap.
#[derive(Debug, Clone, Copy)]
pub struct BesselTransform {
    pub value: f64,
    pub accuracy_warning: bool,
}

const PANEL_CAP: usize = 60_000;
const PANEL_POINTS: usize = 16;

/// ∫_c^b x^alpha (b-x)^beta J_nu(omega x) psi(x) dx with 0 <= c < b.
///
/// The interval is split at the oscillation scale pi/omega; interior panels
/// use a plain 16-point Gauss rule, the end panels absorb x^alpha (only when
/// c = 0) and (b-x)^beta into mapped Gauss–Jacobi rules.
pub fn bessel_transform(
    alpha: f64,
    beta: f64,
    nu: f64,
    omega: f64,
    mut psi: impl FnMut(f64) -> f64,
    c: f64,
    b: f64,
) -> Result<BesselTransform> {
    if !(alpha + nu > -1.0) || !(beta > -1.0) {
        return Err(Error::NonIntegrable(format!(
            "need alpha+nu > -1 and beta > -1, got alpha={alpha}, nu={nu}, beta={beta}"
        )));
    }
    if !(c >= 0.0 && b > c) {
        return Err(Error::Domain(format!("need 0 <= c < b, got [{c}, {b}]")));
    }
    if omega < 0.0 {
        return Err(Error::Domain(format!("frequency must be nonnegative, got {omega}")));
    }
    let len = b - c;
    let panel_width = if omega == 0.0 {
        len
    } else {
        (std::f64::consts::PI / omega).min(len)
    };
    let mut panels = (len / panel_width).ceil() as usize;
    let mut warning = false;
    if panels > PANEL_CAP {
        panels = PANEL_CAP;
        warning = true;
    }
    let width = len / panels as f64;

    // Per-panel rules: the first panel absorbs x^alpha when the singularity
    // x = 0 is in range, the last absorbs (b-x)^beta; a single panel may
    // need both. Unabsorbed endpoint powers stay in the smooth factor.
    let mut rules: std::collections::HashMap<(bool, bool), QuadRule> = Default::default();
    let mut total = 0.0;
    for j in 0..panels {
        let lo = c + width * j as f64;
        let hi = if j + 1 == panels { b } else { c + width * (j + 1) as f64 };
        let absorb_left = j == 0 && c == 0.0 && alpha != 0.0;
        let absorb_right = j + 1 == panels && beta != 0.0;
        let rule = match rules.entry((absorb_left, absorb_right)) {
            std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
            std::collections::hash_map::Entry::Vacant(e) => {
                let right_exp = if absorb_right { beta } else { 0.0 };
                let left_exp = if absorb_left { alpha } else { 0.0 };
                let pts =
                    if absorb_left || absorb_right { PANEL_POINTS + 8 } else { PANEL_POINTS };
                e.insert(gauss_jacobi(JacobiParams::new(right_exp, left_exp)?, pts)?)
            }
        };
        let mut err: Option<Error> = None;
        let mut g = |x: f64| -> f64 {
            let bess = match bessel_j(nu, omega * x) {
                Ok(v) => v,
                Err(e) => {
                    err = Some(e);
                    return 0.0;
                }
            };
            let head = if absorb_left { 1.0 } else { x.powf(alpha) };
            let tail = if absorb_right || beta == 0.0 { 1.0 } else { (b - x).powf(beta) };
            bess * psi(x) * head * tail
        };
        let contribution = integrate_singular_with(rule, lo, hi, &mut g)?;
        if let Some(e) = err {
            return Err(e);
        }
        total += contribution;
    }
    Ok(BesselTransform { value: total, accuracy_warning: warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    use crate::gamma::ln_gamma;

    fn beta_fn(a: f64, b: f64) -> f64 {
        (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp()
    }

    #[test]
    fn classical_rules() {
        let leg = JacobiParams::new(0.0, 0.0).unwrap();
        let r1 = gauss_jacobi(leg, 1).unwrap();
        assert!(r1.nodes[0].abs() < 1e-14);
        assert_relative_eq!(r1.weights[0], 2.0, max_relative = 1e-13);

        let r2 = gauss_jacobi(leg, 2).unwrap();
        let s3 = 1.0 / 3.0_f64.sqrt();
        assert_relative_eq!(r2.nodes[0], -s3, max_relative = 1e-13);
        assert_relative_eq!(r2.nodes[1], s3, max_relative = 1e-13);
        assert_relative_eq!(r2.weights[0], 1.0, max_relative = 1e-13);
        assert_relative_eq!(r2.weights[1], 1.0, max_relative = 1e-13);

        // Chebyshev closed form.
        let cheb = JacobiParams::new(-0.5, -0.5).unwrap();
        let n = 9;
        let r = gauss_jacobi(cheb, n).unwrap();
        for (j, (&x, &w)) in r.nodes.iter().zip(&r.weights).enumerate() {
            let jr = n - j; // nodes sorted increasing
            let expect = ((2 * jr - 1) as f64 * std::f64::consts::PI / (2.0 * n as f64)).cos();
            assert_relative_eq!(x, expect, epsilon = 1e-12);
            assert_relative_eq!(w, std::f64::consts::PI / n as f64, max_relative = 1e-12);
        }
    }

    #[test]
    fn rule_invariants_and_moments() {
        for (a, b) in [(0.0, 0.0), (0.5, -0.25), (2.0, 1.5), (-0.9, 3.0)] {
            let p = JacobiParams::new(a, b).unwrap();
            for &n in &[1usize, 5, 40, 200] {
                let r = gauss_jacobi(p, n).unwrap();
                assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
                assert!(r.nodes.iter().all(|&x| x > -1.0 && x < 1.0));
                assert!(r.weights.iter().all(|&w| w > 0.0));
                let total: f64 = r.weights.iter().sum();
                assert_relative_eq!(total, jacobi_norm(p, 0), max_relative = 1e-12);
            }
            // Moments in the shifted basis (1-x)^m (1+x)^l, which spans all
            // polynomials of degree m+l and has the cancellation-free
            // closed form 2^{a+b+m+l+1} B(m+a+1, l+b+1).
            let n = 24;
            let r = gauss_jacobi(p, n).unwrap();
            for m in 0..=(2 * n - 1) {
                for l in 0..=(2 * n - 1 - m) {
                    let exact = 2.0_f64.powf(a + b + (m + l + 1) as f64)
                        * beta_fn(m as f64 + a + 1.0, l as f64 + b + 1.0);
                    let got =
                        r.integrate(|x| (1.0 - x).powi(m as i32) * (1.0 + x).powi(l as i32));
                    assert!(
                        ((got - exact) / exact).abs() < 1e-11,
                        "({a},{b}) moment ({m},{l}): got {got}, exact {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn orthogonality_against_rule() {
        use crate::jacobi::jacobi_eval_all;
        let p = JacobiParams::new(0.3, -0.4).unwrap();
        let r = gauss_jacobi(p, 200).unwrap();
        let mut gram = vec![vec![0.0; 41]; 41];
        for (&x, &w) in r.nodes.iter().zip(&r.weights) {
            let vals = jacobi_eval_all(p, 40, x).unwrap();
            for j in 0..=40 {
                for k in j..=40 {
                    gram[j][k] += w * vals[j] * vals[k];
                }
            }
        }
        for j in 0..=40usize {
            for k in j..=40 {
                if j == k {
                    assert_relative_eq!(gram[j][k], jacobi_norm(p, j), max_relative = 1e-10);
                } else {
                    assert!(gram[j][k].abs() <= 1e-10, "({j},{k}): {}", gram[j][k]);
                }
            }
        }
    }

    #[test]
    fn singular_integrals() {
        // ∫_0^1 y^{-1/2} dy = 2
        let v = integrate_singular(
            SingularIntegrand { lo: 0.0, hi: 1.0, left_exp: -0.5, right_exp: 0.0, smooth: |_| 1.0 },
            16,
        )
        .unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-13);
        // ∫_{-1}^1 (1-y)^{1/2} (1+y)^{1/2} dy = pi/2
        let v = integrate_singular(
            SingularIntegrand { lo: -1.0, hi: 1.0, left_exp: 0.5, right_exp: 0.5, smooth: |_| 1.0 },
            16,
        )
        .unwrap();
        assert_relative_eq!(v, std::f64::consts::FRAC_PI_2, max_relative = 1e-13);
        // ∫_0^1 y^{1/3} (1-y)^{-1/4} y dy = B(7/3, 3/4)
        let v = integrate_singular(
            SingularIntegrand {
                lo: 0.0,
                hi: 1.0,
                left_exp: 1.0 / 3.0,
                right_exp: -0.25,
                smooth: |y| y,
            },
            16,
        )
        .unwrap();
        assert_relative_eq!(v, beta_fn(7.0 / 3.0, 0.75), max_relative = 1e-12);
        // Non-integrable exponent flagged.
        assert!(integrate_singular(
            SingularIntegrand { lo: 0.0, hi: 1.0, left_exp: -1.0, right_exp: 0.0, smooth: |_| 1.0 },
            8
        )
        .is_err());
    }

    #[test]
    fn bessel_transform_basics() {
        // omega = 0, nu = 0 reduces to a Beta-type integral.
        let r = bessel_transform(0.5, 0.25, 0.0, 0.0, |_| 1.0, 0.0, 1.0).unwrap();
        assert!(!r.accuracy_warning);
        assert_relative_eq!(r.value, beta_fn(1.5, 1.25), max_relative = 1e-10);
        // ∫_0^b x J_1(x) dx against the reference sum of small panels.
        let b = 0.8;
        let r = bessel_transform(1.0, 0.0, 1.0, 1.0, |_| 1.0, 0.0, b).unwrap();
        let mut reference = 0.0;
        let fine = gauss_jacobi(JacobiParams::new(0.0, 0.0).unwrap(), 40).unwrap();
        let m = 50;
        for j in 0..m {
            let lo = b * j as f64 / m as f64;
            let hi = b * (j + 1) as f64 / m as f64;
            reference +=
                integrate_singular_with(&fine, lo, hi, &mut |x| x * bessel_j(1.0, x).unwrap())
                    .unwrap();
        }
        assert_relative_eq!(r.value, reference, epsilon = 1e-10);
    }

    /// Envelope-fitted decay slope of |transform| over omega in octaves
    /// [2^5, 2^13], sampled 16 points per octave (the values oscillate).
    fn transform_slope(alpha: f64, beta: f64, nu: f64, c: f64, b: f64) -> f64 {
        use crate::rates::fit_rate;
        let mut ws = Vec::new();
        let mut vals = Vec::new();
        for e in 5..13 {
            for j in 0..16 {
                let w = 2.0_f64.powf(e as f64 + j as f64 / 16.0);
                let v = bessel_transform(alpha, beta, nu, w, |_| 1.0, c, b).unwrap();
                ws.push(w);
                vals.push(v.value.abs());
            }
        }
        fit_rate(&ws, &vals, true).unwrap().slope
    }

    #[test]
    fn bessel_transform_decay_orders() {
        // (alpha,beta,nu) = (0.25,0,0) on [0,1]: slope -min{alpha+1, beta+3/2, 3/2} = -1.25
        let slope = transform_slope(0.25, 0.0, 0.0, 0.0, 1.0);
        assert!((slope + 1.25).abs() < 0.1, "interior-origin slope {slope}");
        // Away from the origin on [0.5,1], beta=0: slope -min{beta+3/2, 3/2} = -3/2.
        let slope = transform_slope(0.0, 0.0, 0.0, 0.5, 1.0);
        assert!((slope + 1.5).abs() < 0.1, "offset-interval slope {slope}");
    }

    /// Envelope-fitted decay slope of |∫_a^1 (x-a)^gamma P_n dx| for the
    /// Legendre weight, over n in octaves [2^6, 2^12].
    fn polynomial_transform_slope(a: f64, gamma: f64) -> f64 {
        use crate::jacobi::jacobi_eval;
        use crate::rates::fit_rate;
        let p = JacobiParams::new(0.0, 0.0).unwrap();
        let mut ns = Vec::new();
        let mut vals = Vec::new();
        for e in 6..12 {
            for j in 0..8 {
                let n = (2.0_f64.powf(e as f64 + j as f64 / 8.0)) as usize;
                let v = integrate_singular(
                    SingularIntegrand {
                        lo: a,
                        hi: 1.0,
                        left_exp: gamma,
                        right_exp: 0.0,
                        smooth: |x| jacobi_eval(p, n, x).unwrap(),
                    },
                    n / 2 + 40,
                )
                .unwrap();
                ns.push(n as f64);
                vals.push(v.abs());
            }
        }
        fit_rate(&ns, &vals, true).unwrap().slope
    }

    #[test]
    fn polynomial_transform_decay_order() {
        // ∫_a^1 (x-a)^gamma (1-x)^delta P_n(x) dx with delta = 0 and the
        // Legendre weight is O(n^{-min{2 delta - alpha + 2, gamma + 3/2, 3/2}}).
        //
        // gamma = -1/2 attains the bound: min{2, 1, 3/2} = 1, sharp slope -1.
        let slope = polynomial_transform_slope(0.3, -0.5);
        assert!((slope + 1.0).abs() < 0.1, "gamma=-1/2 slope {slope}");
        // gamma = 1/2 gives min{2, 2, 3/2} = 3/2, but the generic 3/2 term of
        // the bound is not sharp for smooth integrands (both endpoint
        // contributions decay like n^{-2}); verify the bound one-sidedly.
        let slope = polynomial_transform_slope(0.3, 0.5);
        assert!(slope <= -1.5 + 0.1, "gamma=1/2 slope {slope}");
        assert!((slope + 2.0).abs() < 0.2, "gamma=1/2 sharp slope {slope}");
    }
}
