//! Vector fields with exact polynomial coefficients.

use std::fmt::Write as _;

use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar};
use crate::symcalc::jet::{Jet, JetError};
use crate::symcalc::poly::{term_body, CoeffFormat, Monomial, Poly, VarSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Invariance {
    Left,
    Right,
    Projected,
    None,
}

/// `Σ_i p_i ∂_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyVectorField {
    pub name: String,
    pub coeffs: Vec<Poly<Rational>>,
    pub homogeneous_degree: Option<u32>,
    pub invariance: Invariance,
}

impl PolyVectorField {
    pub fn new(name: impl Into<String>, coeffs: Vec<Poly<Rational>>) -> Self {
        PolyVectorField { name: name.into(), coeffs, homogeneous_degree: None, invariance: Invariance::None }
    }

    /// `∂_i` on an `n`-dimensional coordinate space.
    pub fn coordinate(name: impl Into<String>, n: usize, i: usize) -> Self {
        let mut coeffs = vec![Poly::zero(); n];
        coeffs[i] = Poly::one();
        Self::new(name, coeffs)
    }

    pub fn with_degree(mut self, d: u32) -> Self {
        self.homogeneous_degree = Some(d);
        self
    }

    pub fn with_invariance(mut self, inv: Invariance) -> Self {
        self.invariance = inv;
        self
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Poly::is_zero)
    }

    /// `X f` for a polynomial `f`.
    pub fn apply<S: Scalar>(&self, f: &Poly<S>) -> Poly<S> {
        let mut out = Poly::zero();
        for (i, p) in self.coeffs.iter().enumerate() {
            if p.is_zero() || !f.depends_on(i) {
                continue;
            }
            let p = p.map_coeffs(S::from_rational);
            out = out + &p * &f.derivative(i);
        }
        out
    }

    /// `X f` on jet data; the order drops by one.
    pub fn apply_to_jet<S: Scalar>(&self, j: &Jet<S>) -> Result<Jet<S>, JetError> {
        if j.order() == 0 {
            return Err(JetError::OrderExhausted);
        }
        let order = j.order() - 1;
        let center = j.center().to_vec();
        let mut acc = Jet::constant(center.clone(), order, S::zero());
        for (i, p) in self.coeffs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let d = j.partial(i)?;
            if d.poly().is_zero() {
                continue;
            }
            let pj = Jet::from_poly(&p.map_coeffs(S::from_rational), center.clone(), order);
            acc = acc.add(&pj.mul(&d));
        }
        Ok(acc)
    }

    /// Commutator `[X, Y] = XY - YX` as a field.
    pub fn bracket(&self, other: &PolyVectorField) -> PolyVectorField {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| self.apply(b) - other.apply(a)).collect();
        let degree = match (self.homogeneous_degree, other.homogeneous_degree) {
            (Some(a), Some(b)) => Some(a + b),
            _ => None,
        };
        PolyVectorField {
            name: format!("[{},{}]", self.name, other.name),
            coeffs,
            homogeneous_degree: degree,
            invariance: if self.invariance == other.invariance { self.invariance } else { Invariance::None },
        }
    }

    pub fn add(&self, other: &PolyVectorField) -> PolyVectorField {
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        PolyVectorField::new(format!("{}+{}", self.name, other.name), coeffs)
    }

    pub fn scale(&self, c: &Rational) -> PolyVectorField {
        let mut out = self.clone();
        out.coeffs = self.coeffs.iter().map(|p| p.scale(c)).collect();
        out
    }

    /// Drops the first `drop` components and sets those coordinates to zero.
    pub fn restrict(&self, drop: usize) -> PolyVectorField {
        let remap = |i: usize| i.checked_sub(drop);
        PolyVectorField {
            name: self.name.clone(),
            coeffs: self.coeffs[drop..].iter().map(|p| p.remap_vars(remap)).collect(),
            homogeneous_degree: self.homogeneous_degree,
            invariance: Invariance::Projected,
        }
    }

    pub fn eval_f64(&self, compiled: &[crate::symcalc::CompiledPoly], x: &[f64]) -> Vec<f64> {
        compiled.iter().map(|c| c.eval(x)).collect()
    }

    /// Checks `X(F∘δ_λ) = λ^d (X F)∘δ_λ` with `λ` as a formal variable.
    pub fn is_homogeneous_on(&self, f: &Poly<Rational>, weights: &[u32], d: u32) -> bool {
        let n = self.dim();
        let lambda = Poly::<Rational>::var(n);
        let dil: Vec<Poly<Rational>> = (0..n).map(|i| &lambda.pow(weights[i]) * &Poly::var(i)).collect();
        let lhs = self.apply(&f.substitute(&dil));
        let rhs = &lambda.pow(d) * &self.apply(f).substitute(&dil);
        lhs == rhs
    }

    /// Canonical text, e.g. `d/dx1 - (1/2)*x2 d/dx3`.
    pub fn to_text(&self, space: &VarSpace) -> String {
        let mut out = String::new();
        for (i, p) in self.coeffs.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let d = format!("d/d{}", space.names[i]);
            let terms = p.sorted_terms(&space.weights);
            let (neg, body) = if terms.len() == 1 {
                let (m, c) = terms[0];
                if m.is_one() && c.is_unit() {
                    (c.is_negative(), d)
                } else {
                    (c.is_negative(), format!("{} {}", term_body(m, c, &space.names), d))
                }
            } else {
                (false, format!("({}) {}", p.to_text(space), d))
            };
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }

    pub fn display_line(&self, space: &VarSpace) -> String {
        let mut s = String::new();
        let _ = write!(s, "{} = {}", self.name, self.to_text(space));
        s
    }

    /// Largest weighted degree among coefficients, as a sanity bound.
    pub fn max_coeff_wdeg(&self, weights: &[u32]) -> Option<u32> {
        self.coeffs.iter().filter_map(|p| p.wdeg(weights)).max()
    }
}

/// Parses `d/dx1 - (1/2)*x2 d/dx3`-style text back into a field. Each
/// summand is `[coeff] d/dNAME` where the coefficient is a polynomial.
pub fn parse_field(name: &str, src: &str, space: &VarSpace) -> Result<PolyVectorField, String> {
    let mut coeffs = vec![Poly::<Rational>::zero(); space.len()];
    let src = src.trim();
    if src == "0" {
        return Ok(PolyVectorField::new(name, coeffs));
    }
    // split on "d/dNAME" markers; the text before each marker is its coefficient
    let mut rest = src;
    while !rest.trim().is_empty() {
        let pos = rest.find("d/d").ok_or_else(|| format!("missing d/d in `{rest}`"))?;
        let coeff_txt = rest[..pos].trim();
        let after = &rest[pos + 3..];
        let end = after.find(|c: char| !(c.is_alphanumeric() || c == '_')).unwrap_or(after.len());
        let var = &after[..end];
        let idx = space.index_of(var).ok_or_else(|| format!("unknown coordinate `{var}`"))?;
        rest = &after[end..];
        let coeff_txt = coeff_txt.trim_start_matches('+').trim();
        let poly = match coeff_txt {
            "" => Poly::one(),
            "-" => -Poly::<Rational>::one(),
            t => {
                let (neg, body) = match t.strip_prefix('-') {
                    Some(b) => (true, b.trim()),
                    None => (false, t),
                };
                let p = crate::symcalc::parse_poly(body, space).map_err(|e| e.to_string())?;
                if neg {
                    -p
                } else {
                    p
                }
            }
        };
        coeffs[idx] = &coeffs[idx] + &poly;
    }
    Ok(PolyVectorField::new(name, coeffs))
}

/// Helper for tests and catalog checks.
pub fn monomial_poly(exps: &[u32], c: Rational) -> Poly<Rational> {
    Poly::term(Monomial::from_exponents(exps), c)
}
