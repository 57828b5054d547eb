//! Jacobi polynomials P_n^{(alpha,beta)}: evaluation, weighted L2 norms,
//! pointwise envelope bounds, and Hilb-type asymptotic approximations.

use crate::bessel::bessel_j;
use crate::error::{Error, Result};
use crate::gamma::ln_gamma;

/// The exponent pair of a Jacobi weight (1-x)^alpha (1+x)^beta.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    alpha: f64,
    beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0) || !(beta > -1.0) {
            return Err(Error::InvalidParams(format!(
                "jacobi exponents must exceed -1, got alpha={alpha}, beta={beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// The weight (1-x)^alpha (1+x)^beta.
    pub fn weight(&self, x: f64) -> f64 {
        (1.0 - x).powf(self.alpha) * (1.0 + x).powf(self.beta)
    }

    /// Swap alpha and beta (the reflection x -> -x).
    pub fn swapped(&self) -> Self {
        Self { alpha: self.beta, beta: self.alpha }
    }
}

fn check_point(x: f64) -> Result<()> {
    if !(x.abs() <= 1.0) {
        return Err(Error::Domain(format!("evaluation point must lie in [-1,1], got {x}")));
    }
    Ok(())
}

/// P_n^{(alpha,beta)}(x) by the forward three-term recurrence.
pub fn jacobi_eval(p: JacobiParams, n: usize, x: f64) -> Result<f64> {
    check_point(x)?;
    let (a, b) = (p.alpha, p.beta);
    if n == 0 {
        return Ok(1.0);
    }
    let mut pm = 1.0;
    let mut pc = 0.5 * ((a + b + 2.0) * x + a - b);
    let s = a + b;
    for k in 2..=n {
        let kf = k as f64;
        let c1 = 2.0 * kf * (kf + s) * (2.0 * kf + s - 2.0);
        let c2 = (2.0 * kf + s - 1.0)
            * ((2.0 * kf + s) * (2.0 * kf + s - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * (2.0 * kf + s);
        let pn = (c2 * pc - c3 * pm) / c1;
        pm = pc;
        pc = pn;
    }
    Ok(pc)
}

/// All of P_0..P_{n_max} at x, in one recurrence pass.
pub fn jacobi_eval_all(p: JacobiParams, n_max: usize, x: f64) -> Result<Vec<f64>> {
    check_point(x)?;
    let (a, b) = (p.alpha, p.beta);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return Ok(out);
    }
    out.push(0.5 * ((a + b + 2.0) * x + a - b));
    let s = a + b;
    for k in 2..=n_max {
        let kf = k as f64;
        let c1 = 2.0 * kf * (kf + s) * (2.0 * kf + s - 2.0);
        let c2 = (2.0 * kf + s - 1.0)
            * ((2.0 * kf + s) * (2.0 * kf + s - 2.0) * x + a * a - b * b);
        let c3 = 2.0 * (kf + a - 1.0) * (kf + b - 1.0) * (2.0 * kf + s);
        let pn = (c2 * out[k - 1] - c3 * out[k - 2]) / c1;
        out.push(pn);
    }
    Ok(out)
}

/// The squared weighted L2 norm sigma_k of P_k^{(alpha,beta)}.
///
/// At k=0 with alpha+beta=-1 the product (2k+alpha+beta+1)Gamma(k+alpha+beta+1)
/// has a removable singularity; the k=0 branch uses its limit Gamma(alpha+beta+2).
pub fn jacobi_norm(p: JacobiParams, k: usize) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    let kf = k as f64;
    if k == 0 {
        // sigma_0 = 2^{a+b+1} Gamma(a+1) Gamma(b+1) / Gamma(a+b+2)
        return ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
            - ln_gamma(a + b + 2.0))
        .exp();
    }
    ((a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(kf + a + 1.0) + ln_gamma(kf + b + 1.0)
        - ln_gamma(kf + 1.0)
        - (2.0 * kf + a + b + 1.0).ln()
        - ln_gamma(kf + a + b + 1.0))
    .exp()
}

/// The four-piece envelope E_n^{(alpha,beta)}(x) bounding |P_n| up to a constant.
///
/// Pieces, moving from x=1 inward and mirrored on the left half:
/// (n+1)^alpha near x=1, the interior (n+1)^{-1/2} weight-decay form elsewhere.
pub fn envelope_bound(p: JacobiParams, n: usize, x: f64) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    let np1 = (n + 1) as f64;
    if x >= 0.0 {
        if 1.0 - x <= 1.0 / (np1 * np1) {
            np1.powf(a)
        } else {
            np1.powf(-0.5) * (1.0 - x).powf(-a / 2.0 - 0.25)
        }
    } else if 1.0 + x <= 1.0 / (np1 * np1) {
        np1.powf(b)
    } else {
        np1.powf(-0.5) * (1.0 + x).powf(-b / 2.0 - 0.25)
    }
}

/// (n+1)^{-1/2} (1-x)^{-max{alpha/2+1/4,0}} (1+x)^{-max{beta/2+1/4,0}}.
///
/// Returns +infinity at an endpoint whose clamped exponent is positive.
pub fn pointwise_bound(p: JacobiParams, n: usize, x: f64) -> f64 {
    let ea = (p.alpha / 2.0 + 0.25).max(0.0);
    let eb = (p.beta / 2.0 + 0.25).max(0.0);
    let np1 = (n + 1) as f64;
    np1.powf(-0.5) * (1.0 - x).powf(-ea) * (1.0 + x).powf(-eb)
}

/// Regime tag for the Hilb-type remainder: theta below or above 1/n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HilbRegime {
    NearPole,
    Interior,
}

/// The Bessel main term of the Hilb-type approximation to P_n(cos theta).
#[derive(Debug, Clone, Copy)]
pub struct HilbTerms {
    pub n: usize,
    pub n_tilde: f64,
    pub theta: f64,
    pub leading: f64,
    pub regime: HilbRegime,
}

/// Hilb-type approximation
/// P_n(cos theta) ~ [Gamma(n+alpha+1)/(sqrt2 n! N~^alpha)]
///                  J_alpha(N~ theta) theta^{1/2} sin^{-alpha-1/2}(theta/2) cos^{-beta-1/2}(theta/2)
pub fn hilb_main_term(p: JacobiParams, n: usize, theta: f64) -> Result<HilbTerms> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::Domain(format!("theta must lie in (0, pi), got {theta}")));
    }
    if n < 1 {
        return Err(Error::InvalidParams("hilb approximation needs n >= 1".into()));
    }
    let (a, b) = (p.alpha, p.beta);
    let nf = n as f64;
    let n_tilde = nf + (a + b + 1.0) / 2.0;
    let ratio = (ln_gamma(nf + a + 1.0) - ln_gamma(nf + 1.0)).exp();
    let half = theta / 2.0;
    let leading = ratio / (std::f64::consts::SQRT_2 * n_tilde.powf(a))
        * bessel_j(a, n_tilde * theta)?
        * theta.sqrt()
        * half.sin().powf(-a - 0.5)
        * half.cos().powf(-b - 0.5);
    let regime = if theta < 1.0 / nf { HilbRegime::NearPole } else { HilbRegime::Interior };
    Ok(HilbTerms { n, n_tilde, theta, leading, regime })
}

/// Interior large-n asymptotic:
/// (n pi)^{-1/2} sin^{-alpha-1/2}(theta/2) cos^{-beta-1/2}(theta/2) cos(N~ theta + gamma),
/// gamma = -(2 alpha + 1) pi / 4.
pub fn interior_asymptotic(p: JacobiParams, n: usize, theta: f64) -> f64 {
    let (a, b) = (p.alpha, p.beta);
    let nf = n as f64;
    let n_tilde = nf + (a + b + 1.0) / 2.0;
    let gamma = -(2.0 * a + 1.0) * std::f64::consts::FRAC_PI_4;
    let half = theta / 2.0;
    (nf * std::f64::consts::PI).powf(-0.5)
        * half.sin().powf(-a - 0.5)
        * half.cos().powf(-b - 0.5)
        * (n_tilde * theta + gamma).cos()
}
