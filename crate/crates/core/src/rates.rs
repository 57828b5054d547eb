//! Log-log rate fitting and the claim-verification harness.

use crate::error::{Error, Result};
use crate::expansion::{
    default_grid, expansion_coeffs, pointwise_error_all_n, sup_error_all_n, CoefficientTable,
    ErrorFlavor,
};
use crate::jacobi::JacobiParams;
use crate::kernel::quotient_coeffs_upto;
use crate::phi::{PhiFunction, PhiKind, SmoothFn};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

/// Errors at or below this magnitude are double-precision noise and are
/// excluded from rate fits.
pub const ERROR_FLOOR: f64 = 1e-12;

/// Least-squares line through (x, y) points: (slope, intercept).
pub fn fit_line(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    (slope, intercept)
}

/// A fitted decay rate: errors ~ C n^{slope}.
#[derive(Debug, Clone, Copy)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub n_min: f64,
    pub n_max: f64,
    /// Whether the fit ran on per-octave maxima.
    pub envelope: bool,
}

/// Fit the decay order of an error sequence over degrees `ns`.
///
/// With `envelope` set, the fit runs on per-octave maxima: pointwise errors
/// oscillate through zeros, and the rate statements bound the envelope.
pub fn fit_rate(ns: &[f64], errors: &[f64], envelope: bool) -> Result<RateFit> {
    assert_eq!(ns.len(), errors.len());
    let mut pts: Vec<(f64, f64)> = ns
        .iter()
        .zip(errors)
        .filter(|&(&n, &e)| n > 0.0 && e > ERROR_FLOOR)
        .map(|(&n, &e)| (n, e))
        .collect();
    if envelope {
        // Group by octave of n, keep the largest error per octave.
        let mut octaves: std::collections::BTreeMap<i32, (f64, f64)> = Default::default();
        for &(n, e) in &pts {
            let key = n.log2().floor() as i32;
            let entry = octaves.entry(key).or_insert((n, e));
            if e > entry.1 {
                *entry = (n, e);
            }
        }
        pts = octaves.into_values().collect();
    }
    if pts.len() < 4 {
        return Err(Error::InsufficientData(format!(
            "rate fit needs >= 4 samples above the {ERROR_FLOOR:e} floor, got {}",
            pts.len()
        )));
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(n, e)| (n.ln(), e.ln())).collect();
    let (slope, intercept) = fit_line(&logs);
    let residual = (logs
        .iter()
        .map(|&(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / logs.len() as f64)
        .sqrt();
    Ok(RateFit {
        slope,
        intercept,
        residual,
        n_min: pts.first().unwrap().0,
        n_max: pts.last().unwrap().0,
        envelope,
    })
}

/// Which error quantity a rate claim is about.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Location {
    /// |e(n, x)| at a fixed regular interior point.
    Interior(f64),
    /// |e(n, x)| at the singular point (a, or the singular endpoint).
    SingularPoint,
    /// |e(n, 1)|.
    RightEndpoint,
    /// |e(n, -1)|.
    LeftEndpoint,
    /// sup over a dense grid of |e(n, .)|.
    MaxNorm,
    /// sup of the damped, distance-weighted error.
    WeightedHat,
    /// sup of the damped error.
    WeightedTilde,
    /// |a_n(x; g)|, the quotient coefficient at a regular point.
    QuotientInterior(f64),
    /// |a_n(a; g)| at the singular point.
    QuotientSingular,
}

fn is_even_nonneg_integer(x: f64) -> bool {
    x >= 0.0 && x.fract() == 0.0 && (x as i64) % 2 == 0
}

/// The decay exponent each rate statement predicts, as a pure function of
/// the singularity exponent, the weight parameters, and the location.
/// Positive values mean divergence.
pub fn expected_slope(kind: PhiKind, lambda: f64, p: JacobiParams, loc: Location) -> f64 {
    let (alpha, beta) = (p.alpha(), p.beta());
    if kind.is_interior() {
        match loc {
            Location::Interior(_) => -lambda - 1.0,
            Location::SingularPoint => {
                // Even integer exponents gain one extra order at a.
                if is_even_nonneg_integer(lambda) {
                    -lambda - 1.0
                } else {
                    -lambda
                }
            }
            Location::RightEndpoint => -lambda + alpha - 0.5,
            Location::LeftEndpoint => -lambda + beta - 0.5,
            Location::MaxNorm => {
                if alpha.max(beta) <= 0.5 {
                    -lambda
                } else {
                    alpha.max(beta) - 0.5 - lambda
                }
            }
            Location::WeightedHat => -lambda - 1.0,
            Location::WeightedTilde => -lambda,
            Location::QuotientInterior(_) => -lambda - 0.5,
            Location::QuotientSingular => -lambda + 0.5,
        }
    } else {
        // Boundary singularity (1 -+ x)^lambda z(x). Stated for the right
        // endpoint; the left kind mirrors alpha and beta.
        let (s, t) = if kind == PhiKind::BoundaryRight { (alpha, beta) } else { (beta, alpha) };
        match loc {
            Location::Interior(_) | Location::WeightedHat => -2.0 * lambda - s - 1.5,
            Location::SingularPoint => -2.0 * lambda,
            Location::RightEndpoint if kind == PhiKind::BoundaryRight => -2.0 * lambda,
            Location::LeftEndpoint if kind == PhiKind::BoundaryLeft => -2.0 * lambda,
            Location::MaxNorm => -2.0 * lambda + (t - s - 1.0).max(0.0),
            other => panic!("no boundary-kind rate statement for {other:?}"),
        }
    }
}

/// One verifiable convergence-rate claim.
#[derive(Debug, Clone)]
pub struct RateClaim {
    pub id: String,
    pub f: PhiFunction,
    pub params: JacobiParams,
    pub location: Location,
    pub tolerance: f64,
    /// Largest degree in the fitted range (fits run over [64, n_max)).
    pub n_max: usize,
}

impl RateClaim {
    pub fn new(
        id: impl Into<String>,
        f: PhiFunction,
        params: JacobiParams,
        location: Location,
        tolerance: f64,
        n_max: usize,
    ) -> Self {
        Self { id: id.into(), f, params, location, tolerance, n_max }
    }

    pub fn expected_slope(&self) -> f64 {
        expected_slope(self.f.kind(), self.f.lambda(), self.params, self.location)
    }

    /// Key identifying which coefficient table the claim needs.
    fn table_key(&self) -> Option<String> {
        match self.location {
            Location::QuotientInterior(_) | Location::QuotientSingular => None,
            _ => Some(format!(
                "{:?}|{}|{}|{:?}|{}|{}|{}",
                self.f.kind(),
                self.f.a(),
                self.f.lambda(),
                self.f.z(),
                self.params.alpha(),
                self.params.beta(),
                self.n_max
            )),
        }
    }
}

/// The outcome of checking one claim.
#[derive(Debug, Clone)]
pub struct ClaimReport {
    pub id: String,
    pub expected_slope: f64,
    pub measured_slope: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub failure: Option<String>,
}

impl ClaimReport {
    fn failed(claim: &RateClaim, why: String) -> Self {
        Self {
            id: claim.id.clone(),
            expected_slope: claim.expected_slope(),
            measured_slope: f64::NAN,
            residual: f64::NAN,
            tolerance: claim.tolerance,
            pass: false,
            failure: Some(why),
        }
    }
}

fn claim_error_sequence(
    claim: &RateClaim,
    table: Option<&CoefficientTable>,
) -> Result<Vec<f64>> {
    let f = &claim.f;
    match claim.location {
        Location::QuotientInterior(x) => {
            quotient_coeffs_upto(f, claim.params, x, claim.n_max)
                .map(|q| q.into_iter().map(f64::abs).collect())
        }
        Location::QuotientSingular => {
            quotient_coeffs_upto(f, claim.params, f.singular_point(), claim.n_max)
                .map(|q| q.into_iter().map(f64::abs).collect())
        }
        loc => {
            let t = table.expect("non-quotient claims carry a table");
            match loc {
                Location::Interior(x) => pointwise_error_all_n(f, t, x),
                Location::SingularPoint => pointwise_error_all_n(f, t, f.singular_point()),
                Location::RightEndpoint => pointwise_error_all_n(f, t, 1.0),
                Location::LeftEndpoint => pointwise_error_all_n(f, t, -1.0),
                Location::MaxNorm => {
                    sup_error_all_n(f, t, &default_grid(f.singular_point()), ErrorFlavor::Raw)
                }
                Location::WeightedHat => {
                    sup_error_all_n(f, t, &default_grid(f.singular_point()), ErrorFlavor::WeightedHat)
                }
                Location::WeightedTilde => sup_error_all_n(
                    f,
                    t,
                    &default_grid(f.singular_point()),
                    ErrorFlavor::WeightedTilde,
                ),
                _ => unreachable!(),
            }
        }
    }
}

/// Check one claim: compute its error sequence over [64, n_max), fit the
/// envelope, and compare against the predicted slope. Divergent claims
/// (positive predicted slope) pass when the measured slope is positive.
pub fn verify_claim_with_table(
    claim: &RateClaim,
    table: Option<&CoefficientTable>,
) -> ClaimReport {
    let expected = claim.expected_slope();
    let errors = match claim_error_sequence(claim, table) {
        Ok(e) => e,
        Err(e) => return ClaimReport::failed(claim, e.to_string()),
    };
    let lo = 64usize.min(errors.len() - 1);
    let hi = claim.n_max.min(errors.len() - 1);
    let ns: Vec<f64> = (lo..hi).map(|n| n as f64).collect();
    let es: Vec<f64> = errors[lo..hi].to_vec();
    let fit = match fit_rate(&ns, &es, true) {
        Ok(f) => f,
        Err(e) => return ClaimReport::failed(claim, e.to_string()),
    };
    let pass = if expected > 0.05 {
        fit.slope > 0.0
    } else {
        (fit.slope - expected).abs() <= claim.tolerance
    };
    ClaimReport {
        id: claim.id.clone(),
        expected_slope: expected,
        measured_slope: fit.slope,
        residual: fit.residual,
        tolerance: claim.tolerance,
        pass,
        failure: None,
    }
}

/// Self-contained single-claim check (builds the coefficient table).
pub fn verify_claim(claim: &RateClaim) -> ClaimReport {
    let table = match claim.table_key() {
        Some(_) => match expansion_coeffs(&claim.f, claim.params, claim.n_max) {
            Ok(t) => Some(t),
            Err(e) => return ClaimReport::failed(claim, e.to_string()),
        },
        None => None,
    };
    verify_claim_with_table(claim, table.as_ref())
}

/// Run many claims, sharing coefficient tables between claims that use the
/// same function and weight, and merging reports in claim-id order.
pub fn run_claims(claims: &[RateClaim]) -> Vec<ClaimReport> {
    let mut keyed: HashMap<String, &RateClaim> = HashMap::new();
    for c in claims {
        if let Some(k) = c.table_key() {
            keyed.entry(k).or_insert(c);
        }
    }
    let uniques: Vec<(&String, &&RateClaim)> = keyed.iter().collect();
    let tables: HashMap<String, Arc<Result<CoefficientTable>>> = uniques
        .par_iter()
        .map(|(k, c)| {
            ((*k).clone(), Arc::new(expansion_coeffs(&c.f, c.params, c.n_max)))
        })
        .collect();
    let mut reports: Vec<ClaimReport> = claims
        .par_iter()
        .map(|c| match c.table_key() {
            Some(k) => match tables[&k].as_ref() {
                Ok(t) => verify_claim_with_table(c, Some(t)),
                Err(e) => ClaimReport::failed(c, e.to_string()),
            },
            None => verify_claim_with_table(c, None),
        })
        .collect();
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    reports
}

/// Serialize reports as CSV: `claim_id,expected_slope,measured_slope,residual,pass`.
pub fn report_csv(reports: &[ClaimReport]) -> String {
    let mut out = String::from("claim_id,expected_slope,measured_slope,residual,pass\n");
    for r in reports {
        out.push_str(&format!(
            "{},{:.16e},{:.16e},{:.16e},{}\n",
            r.id, r.expected_slope, r.measured_slope, r.residual, r.pass
        ));
    }
    out
}

/// The canonical claim table: every pointwise, endpoint, max-norm, weighted,
/// boundary-kind, and quotient-coefficient rate statement, at the parameter
/// choices of the source experiments.
pub fn claim_suite() -> Vec<RateClaim> {
    let leg = JacobiParams::new(0.0, 0.0).unwrap();
    let cheb = JacobiParams::new(-0.5, -0.5).unwrap();
    let half = JacobiParams::new(0.5, 0.5).unwrap();
    let big = JacobiParams::new(1.5, 1.5).unwrap();
    let a = 0.25;
    let plus = |l: f64| PhiFunction::new(PhiKind::InteriorPlus, a, l, SmoothFn::One).unwrap();
    let n4k = 4096;
    let mut claims = vec![];
    // Interior pointwise rates, -lambda-1.
    for (tag, l) in [("m1o3", -1.0 / 3.0), ("1o3", 1.0 / 3.0), ("1o2", 0.5), ("1", 1.0)] {
        claims.push(RateClaim::new(
            format!("interior-leg-lam{tag}-xp"),
            plus(l),
            leg,
            Location::Interior(0.5),
            0.1,
            n4k,
        ));
    }
    claims.push(RateClaim::new(
        "interior-cheb-lam1o2-xm",
        plus(0.5),
        cheb,
        Location::Interior(-0.5),
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "interior-half-lam1o2-xm",
        plus(0.5),
        half,
        Location::Interior(-0.5),
        0.1,
        n4k,
    ));
    // Endpoint rates, -lambda+alpha-1/2.
    claims.push(RateClaim::new(
        "endpoint-leg-lam1o3",
        plus(1.0 / 3.0),
        leg,
        Location::RightEndpoint,
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "endpoint-half-lam1o2",
        plus(0.5),
        half,
        Location::RightEndpoint,
        0.1,
        n4k,
    ));
    // Singular-point rates: -lambda generically, -lambda-1 for even lambda.
    claims.push(RateClaim::new(
        "singular-leg-lam1o3",
        plus(1.0 / 3.0),
        leg,
        Location::SingularPoint,
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "singular-leg-lam1o2",
        plus(0.5),
        leg,
        Location::SingularPoint,
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "singular-leg-lam2-even",
        plus(2.0),
        leg,
        Location::SingularPoint,
        0.15,
        n4k,
    ));
    // Max-norm rates.
    claims.push(RateClaim::new(
        "maxnorm-leg-lam1o2",
        plus(0.5),
        leg,
        Location::MaxNorm,
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "maxnorm-half-lam1o2",
        plus(0.5),
        half,
        Location::MaxNorm,
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "maxnorm-big-lam1o2-divergent",
        plus(0.5),
        big,
        Location::MaxNorm,
        0.15,
        n4k,
    ));
    // Weighted sup rates.
    claims.push(RateClaim::new(
        "weighted-hat-leg-lam1o2",
        plus(0.5),
        leg,
        Location::WeightedHat,
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "weighted-tilde-leg-lam1o2",
        plus(0.5),
        leg,
        Location::WeightedTilde,
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "weighted-hat-leg-lam2",
        plus(2.0),
        leg,
        Location::WeightedHat,
        0.15,
        n4k,
    ));
    // Step function (lambda = 0 is the even case: -1 at the jump).
    let step = PhiFunction::new(PhiKind::Step, a, 0.0, SmoothFn::One).unwrap();
    claims.push(RateClaim::new(
        "step-leg-interior",
        step.clone(),
        leg,
        Location::Interior(-0.5),
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "step-leg-jump",
        step.clone(),
        leg,
        Location::SingularPoint,
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "step-leg-maxnorm-gibbs",
        step,
        leg,
        Location::MaxNorm,
        0.1,
        n4k,
    ));
    // Boundary singularity f1 = (1-x)^{1/2}.
    let f1 = PhiFunction::new(PhiKind::BoundaryRight, 0.0, 0.5, SmoothFn::One).unwrap();
    claims.push(RateClaim::new(
        "boundary-leg-interior",
        f1.clone(),
        leg,
        Location::Interior(-0.5),
        0.15,
        n4k,
    ));
    claims.push(RateClaim::new(
        "boundary-leg-endpoint",
        f1.clone(),
        leg,
        Location::RightEndpoint,
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "boundary-leg-maxnorm",
        f1.clone(),
        leg,
        Location::MaxNorm,
        0.1,
        n4k,
    ));
    claims.push(RateClaim::new(
        "boundary-leg-weighted-hat",
        f1,
        leg,
        Location::WeightedHat,
        0.15,
        n4k,
    ));
    // Quotient coefficients: -lambda-1/2 away from a, -lambda+1/2 at a.
    for (tag, l) in [("1o3", 1.0 / 3.0), ("1o2", 0.5)] {
        claims.push(RateClaim::new(
            format!("quotient-interior-lam{tag}"),
            plus(l),
            leg,
            Location::QuotientInterior(-0.5),
            0.1,
            2048,
        ));
        claims.push(RateClaim::new(
            format!("quotient-singular-lam{tag}"),
            plus(l),
            leg,
            Location::QuotientSingular,
            0.1,
            2048,
        ));
    }
    claims
}

/// Which point family a fixed-degree spatial sweep walks along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAnchor {
    /// x = a + xi.
    SingularAbove,
    /// x = a - xi.
    SingularBelow,
    /// x = 1 - xi.
    RightEnd,
    /// x = -1 + xi.
    LeftEnd,
}

/// The predicted xi-exponent of the error constant near each anchor.
pub fn sweep_expected_slope(p: JacobiParams, anchor: SweepAnchor) -> f64 {
    match anchor {
        SweepAnchor::SingularAbove | SweepAnchor::SingularBelow => -1.0,
        SweepAnchor::RightEnd => -(p.alpha() / 2.0 + 0.25).max(0.0),
        SweepAnchor::LeftEnd => -(p.beta() / 2.0 + 0.25).max(0.0),
    }
}

/// Default offsets for the sweep: dense geometric samples of xi in
/// [2^-8, 2^-3.2], enough oscillations per octave for envelope fitting at
/// n around 2000.
pub fn default_xi_grid() -> Vec<f64> {
    let per_octave = 96;
    let (lo, hi) = (-8.0f64, -3.2f64);
    let count = ((hi - lo) * per_octave as f64) as usize;
    (0..=count).map(|i| 2.0f64.powf(lo + i as f64 / per_octave as f64)).collect()
}

/// Fit how the fixed-degree error grows as x approaches an anchor point:
/// log |e(n, anchor +- xi)| against log xi, envelope over xi-octaves.
pub fn xi_sweep(
    f: &PhiFunction,
    t: &CoefficientTable,
    n: usize,
    anchor: SweepAnchor,
    xis: &[f64],
) -> Result<RateFit> {
    let a = f.singular_point();
    let mut pts = Vec::with_capacity(xis.len());
    let mut errs = Vec::with_capacity(xis.len());
    for &xi in xis {
        if !(xi > 0.0 && xi <= 0.25) {
            return Err(Error::InvalidParams(format!("offsets must lie in (0, 1/4], got {xi}")));
        }
        let x = match anchor {
            SweepAnchor::SingularAbove => a + xi,
            SweepAnchor::SingularBelow => a - xi,
            SweepAnchor::RightEnd => 1.0 - xi,
            SweepAnchor::LeftEnd => -1.0 + xi,
        };
        if x.abs() >= 1.0 {
            continue;
        }
        pts.push(xi);
        errs.push((f.eval(x)? - t.truncated_eval(n, x)?).abs());
    }
    fit_rate(&pts, &errs, true)
}

/// Boundedness check for the sharpened (log-free) interior rate: the
/// largest per-octave maximum of e(n) n^{lambda+1} over [n_lo, n_hi),
/// divided by the first octave's maximum. A ratio near 1 means no residual
/// logarithmic growth.
pub fn no_log_ratio(errors: &[f64], lambda: f64, n_lo: usize, n_hi: usize) -> f64 {
    let mut octave_max: Vec<f64> = Vec::new();
    let mut n = n_lo;
    while n < n_hi.min(errors.len()) {
        let top = (n..(2 * n).min(n_hi).min(errors.len()))
            .map(|k| errors[k] * (k as f64).powf(lambda + 1.0))
            .fold(0.0f64, f64::max);
        octave_max.push(top);
        n *= 2;
    }
    let first = octave_max[0];
    octave_max.into_iter().fold(0.0f64, f64::max) / first
}

/// The superconvergence gap: interior slope minus singular-point slope
/// (minus one when the extra order at the singularity is present).
pub fn superconvergence_gap(interior: &RateFit, singular: &RateFit) -> f64 {
    interior.slope - singular.slope
}
