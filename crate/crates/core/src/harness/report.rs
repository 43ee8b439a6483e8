//! Machine-readable output: `command`, `inputs`, `results`, `pass`, `meta`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::harness::catalog::CATALOG_VERSION;
use crate::scalar::{format_rational, Rational};
use crate::symcalc::{Poly, VarSpace};

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub catalog_version: &'static str,
    pub crate_version: &'static str,
    pub seed: u64,
    pub tolerance: f64,
}

impl Meta {
    pub fn new(seed: u64, tolerance: f64) -> Self {
        Meta { catalog_version: CATALOG_VERSION, crate_version: env!("CARGO_PKG_VERSION"), seed, tolerance }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub pass: bool,
    pub meta: Meta,
}

impl Report {
    /// Pretty JSON with keys in a fixed order.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}

/// Ordered term list `[{coeff: "p/q", exponents: [...]}]`, highest weighted degree first.
pub fn poly_json(p: &Poly<Rational>, space: &VarSpace) -> Value {
    Value::Array(
        p.sorted_terms(&space.weights)
            .into_iter()
            .map(|(m, c)| json!({ "coeff": format_rational(c), "exponents": m.padded(space.len()) }))
            .collect(),
    )
}

pub fn poly_json_f64(p: &Poly<f64>, space: &VarSpace) -> Value {
    Value::Array(
        p.sorted_terms(&space.weights)
            .into_iter()
            .map(|(m, c)| json!({ "coeff": c, "exponents": m.padded(space.len()) }))
            .collect(),
    )
}
