//! JSON problem documents.
//!
//! ```json
//! {"a": 0, "b": 1, "g": "1", "q": "-7*exp(x)",
//!  "bc": [1, 0, -1, -2, 0, -2.718281828459045, -5.43656365691809],
//!  "exact": "(1-x)*exp(x)"}
//! ```
//!
//! `exact` is optional; unknown fields are rejected.

use serde::Deserialize;

use super::{parse_expression, ExactSolution, LinearBvp7, ProblemError};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    a: Option<f64>,
    b: Option<f64>,
    g: Option<String>,
    q: Option<String>,
    bc: Option<Vec<f64>>,
    exact: Option<String>,
}

fn required<T>(v: Option<T>, name: &'static str) -> Result<T, ProblemError> {
    v.ok_or(ProblemError::MissingField(name))
}

fn expression(text: &str, field: &'static str) -> Result<super::Expression, ProblemError> {
    parse_expression(text).map_err(|source| ProblemError::Expression { field, source })
}

impl ProblemFile {
    pub fn into_problem(self) -> Result<LinearBvp7, ProblemError> {
        let a = required(self.a, "a")?;
        let b = required(self.b, "b")?;
        let g = expression(&required(self.g, "g")?, "g")?;
        let q = expression(&required(self.q, "q")?, "q")?;
        let bc = required(self.bc, "bc")?;
        let bc: [f64; 7] = bc.try_into().map_err(|v: Vec<f64>| {
            ProblemError::Malformed(format!("\"bc\" needs 7 values, got {}", v.len()))
        })?;
        let exact = self
            .exact
            .map(|text| expression(&text, "exact").map(ExactSolution::Expr))
            .transpose()?;
        LinearBvp7::new(g, q, a, b, bc, exact)
    }
}

pub fn load_problem(bytes: &[u8]) -> Result<LinearBvp7, ProblemError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| ProblemError::Malformed(format!("not UTF-8: {e}")))?;
    let doc: ProblemFile =
        serde_json::from_str(text).map_err(|e| ProblemError::Malformed(e.to_string()))?;
    doc.into_problem()
}
