//! Homogeneous polynomial differential operators in the projected frame,
//! e.g. `X1^2 + Y1^2` or `2*X1*X2 - X2*X1`.

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::field::PolyVectorField;
use crate::linalg;
use crate::quotient::QuotientModel;
use crate::scalar::{format_rational, parse_rational, Rational, Scalar};
use crate::symcalc::{Monomial, Poly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("empty operator")]
    Empty,
    #[error("unknown field `{0}`")]
    UnknownField(String),
    #[error("cannot parse `{0}`")]
    Syntax(String),
    #[error("terms have different homogeneous degrees {0} and {1}")]
    NotHomogeneous(u32, u32),
}

/// `Σ c_t X^{I_t}` with every word of the same weighted degree `σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    pub terms: Vec<(Rational, Vec<usize>)>,
    pub sigma: u32,
    pub field_names: Vec<String>,
}

impl OperatorSpec {
    /// `sublaplacian` expands to the sum of squares of the horizontal fields.
    pub fn parse(src: &str, model: &QuotientModel) -> Result<Self, OperatorError> {
        let group = model.group();
        let names: Vec<String> = (0..group.dim()).map(|b| group.field_name(b)).collect();
        let weights = group.weights();
        let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(OperatorError::Empty);
        }
        let mut terms = Vec::new();
        if compact.eq_ignore_ascii_case("sublaplacian") {
            for b in model.horizontal() {
                terms.push((Rational::one(), vec![b, b]));
            }
        } else {
            let mut rest = compact.as_str();
            while !rest.is_empty() {
                let (neg, body) = match rest.as_bytes()[0] {
                    b'+' => (false, &rest[1..]),
                    b'-' => (true, &rest[1..]),
                    _ if terms.is_empty() => (false, rest),
                    _ => return Err(OperatorError::Syntax(rest.to_string())),
                };
                let end = crate::harness::groupfile::split_point(body);
                let (c, word) = parse_term(&body[..end], &names)?;
                rest = &body[end..];
                terms.push((if neg { -c } else { c }, word));
            }
        }
        let mut sigma = None;
        for (_, w) in &terms {
            let d: u32 = w.iter().map(|&b| weights[b]).sum();
            match sigma {
                None => sigma = Some(d),
                Some(s) if s != d => return Err(OperatorError::NotHomogeneous(s, d)),
                _ => {}
            }
        }
        Ok(OperatorSpec { terms, sigma: sigma.ok_or(OperatorError::Empty)?, field_names: names })
    }

    pub fn apply<S: Scalar>(&self, frame: &[PolyVectorField], f: &Poly<S>) -> Poly<S> {
        let mut out = Poly::zero();
        for (c, word) in &self.terms {
            let mut g = f.clone();
            for &b in word.iter().rev() {
                g = frame[b].apply(&g);
            }
            out = out + g.scale(&S::from_rational(c));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, (c, w)) in self.terms.iter().enumerate() {
            if k > 0 {
                s.push_str(if c.is_negative() { " - " } else { " + " });
            } else if c.is_negative() {
                s.push('-');
            }
            let a = c.abs();
            if !a.is_one() {
                s.push_str(&format_rational(&a));
                s.push('*');
            }
            let mut i = 0;
            let mut parts = Vec::new();
            while i < w.len() {
                let mut j = i;
                while j < w.len() && w[j] == w[i] {
                    j += 1;
                }
                let name = &self.field_names[w[i]];
                parts.push(if j - i > 1 { format!("{name}^{}", j - i) } else { name.clone() });
                i = j;
            }
            s.push_str(&parts.join("*"));
        }
        s
    }

    /// Basis of `ker L` among quotient polynomials of weighted degree `≤ max_wdeg`,
    /// read off the reduced row echelon form.
    pub fn kernel(&self, model: &QuotientModel, max_wdeg: u32) -> Vec<Poly<Rational>> {
        let monomials = model.space().monomials_up_to(max_wdeg);
        let frame = model.projected_frame();
        let images: Vec<Poly<Rational>> =
            monomials.iter().map(|m| self.apply(frame, &Poly::term(m.clone(), Rational::one()))).collect();
        let mut rows_index: Vec<Monomial> = images.iter().flat_map(|p| p.terms().map(|(m, _)| m.clone())).collect();
        rows_index.sort_by(|a, b| crate::symcalc::poly::canonical_cmp(a, b, model.weights()));
        rows_index.dedup();
        let rows: Vec<Vec<Rational>> =
            rows_index.iter().map(|r| images.iter().map(|p| p.coeff(r)).collect()).collect();
        linalg::null_space(&rows, monomials.len())
            .into_iter()
            .map(|v| {
                Poly::from_terms(monomials.iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|(m, c)| (m.clone(), c)))
            })
            .collect()
    }
}

fn parse_term(src: &str, names: &[String]) -> Result<(Rational, Vec<usize>), OperatorError> {
    let mut coeff = Rational::one();
    let mut word = Vec::new();
    for factor in src.split('*') {
        let factor = factor.trim_start_matches('(').trim_end_matches(')');
        if factor.is_empty() {
            return Err(OperatorError::Syntax(src.to_string()));
        }
        if factor.as_bytes()[0].is_ascii_digit() {
            coeff *= parse_rational(factor).ok_or_else(|| OperatorError::Syntax(factor.to_string()))?;
            continue;
        }
        let (name, power) = match factor.split_once('^') {
            Some((n, e)) => (n, e.parse::<usize>().map_err(|_| OperatorError::Syntax(factor.to_string()))?),
            None => (factor, 1),
        };
        let b = names.iter().position(|n| n == name).ok_or_else(|| OperatorError::UnknownField(name.to_string()))?;
        word.extend(std::iter::repeat_n(b, power));
    }
    if word.is_empty() {
        return Err(OperatorError::Syntax(src.to_string()));
    }
    Ok((coeff, word))
}
