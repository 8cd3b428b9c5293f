//! Linear seventh-order boundary value problems `y^(7) = g(x) y + q(x)`.

pub mod expr;
mod file;

use std::f64::consts::E;

use thiserror::Error;

pub use expr::{parse_expression, BinOp, EvalError, Expression, Func, ParseError};
pub use file::{load_problem, ProblemFile};

/// Endpoint at which a boundary condition is imposed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// `(side, derivative order)` of `k1 ..= k7`, in that order.
pub const BOUNDARY_CONDITIONS: [(Side, u32); 7] = [
    (Side::A, 0),
    (Side::A, 1),
    (Side::A, 2),
    (Side::A, 3),
    (Side::B, 0),
    (Side::B, 1),
    (Side::B, 2),
];

const BOUNDARY_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-8;
const RESIDUAL_PROBES: usize = 33;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("empty interval: need b > a (a = {a}, b = {b})")]
    EmptyInterval { a: f64, b: f64 },
    #[error("boundary value k{index} is not finite")]
    NonFiniteBoundary { index: usize },
    #[error("boundary condition k{index} = {given} disagrees with the exact solution ({exact})")]
    Inconsistent {
        index: usize,
        given: f64,
        exact: f64,
    },
    #[error("exact solution misses the equation at x = {x}: residual {residual:e} > {bound:e}")]
    ResidualGate { x: f64, residual: f64, bound: f64 },
    #[error("evaluating {what}: {source}")]
    Eval {
        what: &'static str,
        #[source]
        source: EvalError,
    },
    #[error("exact solution has no derivative of order {order}")]
    DerivativeUnavailable { order: u32 },
    #[error("polynomial degree {degree} exceeds 7")]
    DegreeTooHigh { degree: usize },
    #[error("malformed problem document: {0}")]
    Malformed(String),
    #[error("problem document is missing field \"{0}\"")]
    MissingField(&'static str),
    #[error("field \"{field}\": {source}")]
    Expression {
        field: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("unknown built-in problem `{0}` (expected example1 or poly0..poly7)")]
    UnknownBuiltin(String),
}

/// Polynomial `c_0 + c_1 x + ... + c_d x^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Index of the highest nonzero coefficient (0 for the zero polynomial).
    pub fn degree(&self) -> usize {
        self.coeffs.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    /// `p^(k)(x)` by Horner's rule on the differentiated coefficients.
    pub fn derivative(&self, x: f64, k: u32) -> f64 {
        let k = k as usize;
        self.coeffs
            .iter()
            .enumerate()
            .skip(k)
            .rev()
            .fold(0.0, |acc, (m, &c)| {
                let falling: f64 = ((m - k + 1)..=m).map(|v| v as f64).product();
                acc * x + c * falling
            })
    }
}

/// Closed-form solution used to measure errors.
#[derive(Debug, Clone, PartialEq)]
pub enum ExactSolution {
    /// `(1 - x) e^x`, whose k-th derivative is `(1 - x - k) e^x`.
    OneMinusXTimesExp,
    Polynomial(Polynomial),
    /// User-supplied expression; only order 0 is available.
    Expr(Expression),
}

impl ExactSolution {
    /// Highest derivative order this solution can evaluate.
    pub fn max_order(&self) -> u32 {
        match self {
            ExactSolution::OneMinusXTimesExp | ExactSolution::Polynomial(_) => 7,
            ExactSolution::Expr(_) => 0,
        }
    }

    pub fn derivative(&self, x: f64, k: u32) -> Result<f64, ProblemError> {
        if k > self.max_order() {
            return Err(ProblemError::DerivativeUnavailable { order: k });
        }
        match self {
            ExactSolution::OneMinusXTimesExp => Ok((1.0 - x - k as f64) * x.exp()),
            ExactSolution::Polynomial(p) => Ok(p.derivative(x, k)),
            ExactSolution::Expr(e) => e.eval(x).map_err(|source| ProblemError::Eval {
                what: "exact",
                source,
            }),
        }
    }

    pub fn value(&self, x: f64) -> Result<f64, ProblemError> {
        self.derivative(x, 0)
    }
}

/// `y^(7)(x) = g(x) y(x) + q(x)` on `[a, b]` with
/// `y(a), y'(a), y''(a), y'''(a), y(b), y'(b), y''(b) = k1 ..= k7`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearBvp7 {
    g: Expression,
    q: Expression,
    a: f64,
    b: f64,
    bc: [f64; 7],
    exact: Option<ExactSolution>,
}

impl LinearBvp7 {
    /// Builds the problem and, when an exact solution is given, checks that it
    /// matches every boundary value it can evaluate and satisfies the equation
    /// at 33 probe points.
    pub fn new(
        g: Expression,
        q: Expression,
        a: f64,
        b: f64,
        bc: [f64; 7],
        exact: Option<ExactSolution>,
    ) -> Result<Self, ProblemError> {
        if !(a.is_finite() && b.is_finite() && b > a) {
            return Err(ProblemError::EmptyInterval { a, b });
        }
        if let Some(i) = bc.iter().position(|k| !k.is_finite()) {
            return Err(ProblemError::NonFiniteBoundary { index: i + 1 });
        }
        let p = Self {
            g,
            q,
            a,
            b,
            bc,
            exact,
        };
        if let Some(exact) = &p.exact {
            p.check_boundary_consistency(exact)?;
            if exact.max_order() >= 7 {
                p.check_residual(exact)?;
            }
        }
        Ok(p)
    }

    fn check_boundary_consistency(&self, exact: &ExactSolution) -> Result<(), ProblemError> {
        for (i, &(side, order)) in BOUNDARY_CONDITIONS.iter().enumerate() {
            if order > exact.max_order() {
                continue;
            }
            let x = self.endpoint(side);
            let value = exact.derivative(x, order)?;
            let given = self.bc[i];
            if (value - given).abs() > BOUNDARY_TOL * given.abs().max(1.0) {
                return Err(ProblemError::Inconsistent {
                    index: i + 1,
                    given,
                    exact: value,
                });
            }
        }
        Ok(())
    }

    fn check_residual(&self, exact: &ExactSolution) -> Result<(), ProblemError> {
        let probes = (0..RESIDUAL_PROBES)
            .map(|k| self.a + (self.b - self.a) * k as f64 / (RESIDUAL_PROBES - 1) as f64);
        let mut worst = (0.0, self.a);
        let mut q_max: f64 = 0.0;
        for x in probes {
            let q = self.q(x)?;
            q_max = q_max.max(q.abs());
            let r = (exact.derivative(x, 7)? - self.g(x)? * exact.value(x)? - q).abs();
            if r > worst.0 {
                worst = (r, x);
            }
        }
        let bound = RESIDUAL_TOL * q_max;
        if worst.0 > bound {
            return Err(ProblemError::ResidualGate {
                x: worst.1,
                residual: worst.0,
                bound,
            });
        }
        Ok(())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn endpoint(&self, side: Side) -> f64 {
        match side {
            Side::A => self.a,
            Side::B => self.b,
        }
    }

    /// `k1 ..= k7`.
    pub fn boundary_values(&self) -> &[f64; 7] {
        &self.bc
    }

    pub fn g_expr(&self) -> &Expression {
        &self.g
    }

    pub fn q_expr(&self) -> &Expression {
        &self.q
    }

    pub fn g(&self, x: f64) -> Result<f64, ProblemError> {
        self.g
            .eval(x)
            .map_err(|source| ProblemError::Eval { what: "g", source })
    }

    pub fn q(&self, x: f64) -> Result<f64, ProblemError> {
        self.q
            .eval(x)
            .map_err(|source| ProblemError::Eval { what: "q", source })
    }

    pub fn exact(&self) -> Option<&ExactSolution> {
        self.exact.as_ref()
    }
}

/// `y^(7) = y - 7 e^x` on `[0, 1]` with exact solution `(1 - x) e^x`.
///
/// The boundary values are read off the exact solution:
/// `y(0) = 1, y'(0) = 0, y''(0) = -1, y'''(0) = -2, y(1) = 0, y'(1) = -e,
/// y''(1) = -2e`.
pub fn example1() -> LinearBvp7 {
    let q = parse_expression("-7*exp(x)").expect("valid literal");
    LinearBvp7::new(
        Expression::Num(1.0),
        q,
        0.0,
        1.0,
        [1.0, 0.0, -1.0, -2.0, 0.0, -E, -2.0 * E],
        Some(ExactSolution::OneMinusXTimesExp),
    )
    .expect("example 1 is self-consistent")
}

/// Manufactured problem whose exact solution is the polynomial with the given
/// coefficients (lowest order first): `g = 0`, `q = p^(7) = 5040 c_7`.
pub fn manufactured(coeffs: &[f64], a: f64, b: f64) -> Result<LinearBvp7, ProblemError> {
    let p = Polynomial::new(coeffs.to_vec());
    if p.degree() > 7 {
        return Err(ProblemError::DegreeTooHigh { degree: p.degree() });
    }
    let q = p.derivative(0.0, 7);
    let mut bc = [0.0; 7];
    for (k, &(side, order)) in bc.iter_mut().zip(BOUNDARY_CONDITIONS.iter()) {
        let x = if side == Side::A { a } else { b };
        *k = p.derivative(x, order);
    }
    let q = Expression::constant(q).ok_or(ProblemError::NonFiniteBoundary { index: 0 })?;
    LinearBvp7::new(
        Expression::Num(0.0),
        q,
        a,
        b,
        bc,
        Some(ExactSolution::Polynomial(p)),
    )
}

/// `x^k` on `[0, 1]`.
pub fn monomial(k: usize) -> Result<LinearBvp7, ProblemError> {
    if k > 7 {
        return Err(ProblemError::DegreeTooHigh { degree: k });
    }
    let mut coeffs = vec![0.0; k + 1];
    coeffs[k] = 1.0;
    manufactured(&coeffs, 0.0, 1.0)
}

/// Built-in problems: `example1` and `poly0` ..= `poly7`.
pub fn builtin(name: &str) -> Result<LinearBvp7, ProblemError> {
    if name == "example1" {
        return Ok(example1());
    }
    name.strip_prefix("poly")
        .and_then(|k| k.parse::<usize>().ok())
        .filter(|&k| k <= 7)
        .map(monomial)
        .unwrap_or_else(|| Err(ProblemError::UnknownBuiltin(name.to_string())))
}
