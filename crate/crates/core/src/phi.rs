//! The model functions under study: a smooth factor z times a single
//! algebraic singularity, either at an interior point a or at an endpoint.

use crate::error::{Error, Result};

/// Built-in smooth factors. Evaluation only; no derivatives are ever needed
/// (quadrature computes everything downstream).
#[derive(Debug, Clone, PartialEq)]
pub enum SmoothFn {
    /// z(x) = 1
    One,
    /// z(x) = c0 + c1 x + c2 x^2 + ...
    Poly(Vec<f64>),
    /// z(x) = e^x
    Exp,
    /// z(x) = cos x
    Cos,
    /// z(x) = inner(-x); produced by reflection of non-even factors
    Reflect(Box<SmoothFn>),
}

impl SmoothFn {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SmoothFn::One => 1.0,
            SmoothFn::Poly(c) => c.iter().rev().fold(0.0, |acc, &ck| acc * x + ck),
            SmoothFn::Exp => x.exp(),
            SmoothFn::Cos => x.cos(),
            SmoothFn::Reflect(inner) => inner.eval(-x),
        }
    }
}

/// Placement of the algebraic singularity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiKind {
    /// z(x) (x-a)_+^lambda
    InteriorPlus,
    /// z(x) (a-x)_+^lambda
    InteriorMinus,
    /// z(x) |x-a|^lambda, lambda not an even integer
    InteriorAbs,
    /// z(x) for x > a, 0 for x < a, z(a)/2 at a (lambda = 0)
    Step,
    /// (1-x)^lambda z(x)
    BoundaryRight,
    /// (1+x)^lambda z(x)
    BoundaryLeft,
}

impl PhiKind {
    pub fn is_interior(self) -> bool {
        matches!(
            self,
            PhiKind::InteriorPlus | PhiKind::InteriorMinus | PhiKind::InteriorAbs | PhiKind::Step
        )
    }
}

/// A function with a single algebraic singularity of strength lambda.
#[derive(Debug, Clone)]
pub struct PhiFunction {
    kind: PhiKind,
    a: f64,
    lambda: f64,
    z: SmoothFn,
}

fn is_even_integer(x: f64) -> bool {
    x.fract() == 0.0 && (x as i64) % 2 == 0
}

impl PhiFunction {
    pub fn new(kind: PhiKind, a: f64, lambda: f64, z: SmoothFn) -> Result<Self> {
        if !(lambda > -1.0) {
            return Err(Error::InvalidParams(format!(
                "singularity exponent must exceed -1, got {lambda}"
            )));
        }
        if kind.is_interior() && !(a > -1.0 && a < 1.0) {
            return Err(Error::InvalidParams(format!(
                "interior singular point must lie in (-1,1), got {a}"
            )));
        }
        if kind == PhiKind::Step && lambda != 0.0 {
            return Err(Error::InvalidParams("step kind requires lambda = 0".into()));
        }
        if kind == PhiKind::InteriorAbs && is_even_integer(lambda) {
            return Err(Error::InvalidParams(
                "|x-a|^lambda with even integer lambda is a polynomial-smooth case; \
                 use the one-sided kinds instead"
                    .into(),
            ));
        }
        Ok(Self { kind, a, lambda, z })
    }

    pub fn kind(&self) -> PhiKind {
        self.kind
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn z(&self) -> &SmoothFn {
        &self.z
    }

    /// Where the singularity sits: a for interior kinds, the endpoint for
    /// boundary kinds.
    pub fn singular_point(&self) -> f64 {
        match self.kind {
            PhiKind::BoundaryRight => 1.0,
            PhiKind::BoundaryLeft => -1.0,
            _ => self.a,
        }
    }

    /// Function value; +infinity where a negative exponent meets its
    /// singular point exactly.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x.abs() <= 1.0) {
            return Err(Error::Domain(format!("point must lie in [-1,1], got {x}")));
        }
        let (a, l) = (self.a, self.lambda);
        Ok(match self.kind {
            PhiKind::InteriorPlus => match x.partial_cmp(&a).unwrap() {
                std::cmp::Ordering::Greater => self.z.eval(x) * (x - a).powf(l),
                std::cmp::Ordering::Equal => self.at_singularity(),
                std::cmp::Ordering::Less => 0.0,
            },
            PhiKind::InteriorMinus => match x.partial_cmp(&a).unwrap() {
                std::cmp::Ordering::Less => self.z.eval(x) * (a - x).powf(l),
                std::cmp::Ordering::Equal => self.at_singularity(),
                std::cmp::Ordering::Greater => 0.0,
            },
            PhiKind::InteriorAbs => {
                if x == a {
                    self.at_singularity()
                } else {
                    self.z.eval(x) * (x - a).abs().powf(l)
                }
            }
            PhiKind::Step => match x.partial_cmp(&a).unwrap() {
                std::cmp::Ordering::Greater => self.z.eval(x),
                std::cmp::Ordering::Equal => self.z.eval(a) / 2.0,
                std::cmp::Ordering::Less => 0.0,
            },
            PhiKind::BoundaryRight => {
                if x == 1.0 && l < 0.0 {
                    f64::INFINITY
                } else {
                    (1.0 - x).powf(l) * self.z.eval(x)
                }
            }
            PhiKind::BoundaryLeft => {
                if x == -1.0 && l < 0.0 {
                    f64::INFINITY
                } else {
                    (1.0 + x).powf(l) * self.z.eval(x)
                }
            }
        })
    }

    /// The singular-point convention for interior power kinds: 0 for
    /// lambda > 0, infinite for lambda < 0.
    fn at_singularity(&self) -> f64 {
        if self.lambda > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    /// The reflected function x -> f(-x), with its singularity mirrored.
    pub fn reflected(&self) -> PhiFunction {
        let kind = match self.kind {
            PhiKind::InteriorPlus => PhiKind::InteriorMinus,
            PhiKind::InteriorMinus => PhiKind::InteriorPlus,
            PhiKind::BoundaryRight => PhiKind::BoundaryLeft,
            PhiKind::BoundaryLeft => PhiKind::BoundaryRight,
            k => k,
        };
        let z = match &self.z {
            SmoothFn::Poly(c) => SmoothFn::Poly(
                c.iter()
                    .enumerate()
                    .map(|(k, &ck)| if k % 2 == 0 { ck } else { -ck })
                    .collect(),
            ),
            even @ (SmoothFn::One | SmoothFn::Cos) => even.clone(),
            SmoothFn::Reflect(inner) => (**inner).clone(),
            other => SmoothFn::Reflect(Box::new(other.clone())),
        };
        PhiFunction { kind, a: if self.kind.is_interior() { -self.a } else { self.a }, lambda: self.lambda, z }
    }
}
