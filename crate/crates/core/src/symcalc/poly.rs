//! Sparse multivariate polynomials with weighted-degree bookkeeping.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::scalar::{format_rational, Rational, Scalar, Tolerance};

/// Exponent vector with trailing zeros trimmed, so the same monomial has one
/// representation whatever the ambient number of variables.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial(SmallVec<[u32; 8]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(i: usize) -> Self {
        Self::var_pow(i, 1)
    }

    pub fn var_pow(i: usize, e: u32) -> Self {
        let mut v: SmallVec<[u32; 8]> = SmallVec::from_elem(0, i + 1);
        v[i] = e;
        Monomial(v).trimmed()
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exps)).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last() == Some(&0) {
            self.0.pop();
        }
        self
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Exponents padded (or truncated) to `n` entries.
    pub fn padded(&self, n: usize) -> Vec<u32> {
        (0..n).map(|i| self.exp(i)).collect()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Weighted degree; variables beyond `weights` count with weight 1.
    pub fn wdeg(&self, weights: &[u32]) -> u32 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, e)| e * weights.get(i).copied().unwrap_or(1))
            .sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let v = (0..n).map(|i| self.exp(i) + other.exp(i)).collect();
        Monomial(v)
    }

    /// `∂/∂x_i` of the monomial as (multiplier, monomial).
    pub fn derivative(&self, i: usize) -> Option<(u32, Monomial)> {
        let e = self.exp(i);
        if e == 0 {
            return None;
        }
        let mut v = self.0.clone();
        v[i] -= 1;
        Some((e, Monomial(v).trimmed()))
    }

    pub fn num_vars(&self) -> usize {
        self.0.len()
    }
}

/// Variable names and weights for a polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarSpace {
    pub names: Vec<String>,
    pub weights: Vec<u32>,
}

impl VarSpace {
    pub fn new(names: Vec<String>, weights: Vec<u32>) -> Self {
        assert_eq!(names.len(), weights.len());
        VarSpace { names, weights }
    }

    pub fn unweighted(names: &[&str]) -> Self {
        VarSpace {
            names: names.iter().map(|s| s.to_string()).collect(),
            weights: vec![1; names.len()],
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// All monomials of weighted degree `<= k`, in canonical order.
    pub fn monomials_up_to(&self, k: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; self.len()];
        self.enumerate(0, k, &mut exps, &mut out);
        out.sort_by(|a, b| canonical_cmp(a, b, &self.weights));
        out
    }

    fn enumerate(&self, i: usize, budget: u32, exps: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if i == self.len() {
            out.push(Monomial::from_exponents(exps));
            return;
        }
        let w = self.weights[i];
        let mut e = 0;
        while e * w <= budget {
            exps[i] = e;
            self.enumerate(i + 1, budget - e * w, exps, out);
            e += 1;
        }
        exps[i] = 0;
    }
}

/// Canonical term order: descending weighted degree, then descending
/// lexicographic exponent vector (`x1` before `x2`).
pub fn canonical_cmp(a: &Monomial, b: &Monomial, weights: &[u32]) -> std::cmp::Ordering {
    b.wdeg(weights).cmp(&a.wdeg(weights)).then_with(|| b.cmp(a))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Poly<S> {
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> Default for Poly<S> {
    fn default() -> Self {
        Poly { terms: BTreeMap::new() }
    }
}

impl<S: Scalar> Poly<S> {
    pub fn constant(c: S) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(i: usize) -> Self {
        Self::term(Monomial::var(i), S::one())
    }

    pub fn term(m: Monomial, c: S) -> Self {
        let mut p = Self::default();
        p.add_term(m, c);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Monomial, S)>>(it: I) -> Self {
        let mut p = Self::default();
        for (m, c) in it {
            p.add_term(m, c);
        }
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = e.get().clone() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    /// Terms in canonical display order.
    pub fn sorted_terms(&self, weights: &[u32]) -> Vec<(&Monomial, &S)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| canonical_cmp(a.0, b.0, weights));
        v
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    pub fn constant_term(&self) -> S {
        self.coeff(&Monomial::one())
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, v)| (m.clone(), v.clone() * c.clone())))
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &S) -> Self {
        Self::from_terms(self.terms.iter().map(|(k, v)| (k.mul(m), v.clone() * c.clone())))
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::default();
        for (m, c) in &self.terms {
            if let Some((e, dm)) = m.derivative(i) {
                out.add_term(dm, c.clone() * S::from_int(e as i64));
            }
        }
        out
    }

    pub fn eval(&self, point: &[S]) -> S {
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t = t * point[i].pow(e);
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Composition: variable `i` is replaced by `map[i]`; variables with no
    /// entry in `map` are left in place.
    pub fn substitute(&self, map: &[Poly<S>]) -> Self {
        let mut powers: Vec<Vec<Poly<S>>> = vec![Vec::new(); map.len()];
        let mut out = Self::default();
        for (m, c) in &self.terms {
            let mut t = Poly::constant(c.clone());
            let mut residual: SmallVec<[u32; 8]> = SmallVec::new();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if i < map.len() {
                    let pw = &mut powers[i];
                    if pw.is_empty() {
                        pw.push(Poly::one());
                    }
                    while pw.len() <= e as usize {
                        let next = pw.last().unwrap() * &map[i];
                        pw.push(next);
                    }
                    t = &t * &pw[e as usize];
                } else {
                    if residual.len() <= i {
                        residual.resize(i + 1, 0);
                    }
                    residual[i] = e;
                }
            }
            if !residual.is_empty() {
                t = t.mul_monomial(&Monomial(residual).trimmed(), &S::one());
            }
            out = out + t;
        }
        out
    }

    /// Maximum weighted degree, `None` for the zero polynomial.
    pub fn wdeg(&self, weights: &[u32]) -> Option<u32> {
        self.terms.keys().map(|m| m.wdeg(weights)).max()
    }

    pub fn min_wdeg(&self, weights: &[u32]) -> Option<u32> {
        self.terms.keys().map(|m| m.wdeg(weights)).min()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    pub fn truncate_total(&self, r: u32) -> Self {
        Poly {
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= r).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn truncate_wdeg(&self, weights: &[u32], k: u32) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.wdeg(weights) <= k)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn homogeneous_part(&self, weights: &[u32], d: u32) -> Self {
        Poly {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.wdeg(weights) == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.terms.keys().map(Monomial::num_vars).max().unwrap_or(0)
    }

    pub fn depends_on(&self, i: usize) -> bool {
        self.terms.keys().any(|m| m.exp(i) > 0)
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Poly<T> {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }

    /// Renames variable `i` to `f(i)`; `None` sends the variable to zero.
    pub fn remap_vars(&self, f: impl Fn(usize) -> Option<usize>) -> Self {
        let mut out = Self::default();
        'terms: for (m, c) in &self.terms {
            let mut exps: SmallVec<[u32; 8]> = SmallVec::new();
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match f(i) {
                    Some(j) => {
                        if exps.len() <= j {
                            exps.resize(j + 1, 0);
                        }
                        exps[j] += e;
                    }
                    None => continue 'terms,
                }
            }
            out.add_term(Monomial(exps).trimmed(), c.clone());
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = Poly::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn approx_zero(&self, tol: &Tolerance, scale: f64) -> bool {
        self.terms.values().all(|c| c.is_negligible(tol, scale))
    }
}

impl<S: Scalar> Zero for Poly<S> {
    fn zero() -> Self {
        Self::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<S: Scalar> One for Poly<S> {
    fn one() -> Self {
        Self::constant(S::one())
    }
}

impl<'a, S: Scalar> Add<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn add(self, rhs: &'a Poly<S>) -> Poly<S> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<S: Scalar> Add for Poly<S> {
    type Output = Poly<S>;
    fn add(mut self, rhs: Poly<S>) -> Poly<S> {
        if self.terms.len() < rhs.terms.len() {
            return rhs + self;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl<S: Scalar> Neg for Poly<S> {
    type Output = Poly<S>;
    fn neg(self) -> Poly<S> {
        Poly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl<'a, S: Scalar> Sub<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: &'a Poly<S>) -> Poly<S> {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<S: Scalar> Sub for Poly<S> {
    type Output = Poly<S>;
    fn sub(self, rhs: Poly<S>) -> Poly<S> {
        &self - &rhs
    }
}

impl<'a, S: Scalar> Mul<&'a Poly<S>> for &'a Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: &'a Poly<S>) -> Poly<S> {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        out
    }
}

impl<S: Scalar> Mul for Poly<S> {
    type Output = Poly<S>;
    fn mul(self, rhs: Poly<S>) -> Poly<S> {
        &self * &rhs
    }
}

impl<S: Scalar> Scalar for Poly<S> {
    fn from_rational(q: &Rational) -> Self {
        Poly::constant(S::from_rational(q))
    }

    fn magnitude(&self) -> f64 {
        self.terms.values().map(Scalar::magnitude).fold(0.0, f64::max)
    }

    fn is_negligible(&self, tol: &Tolerance, scale: f64) -> bool {
        self.approx_zero(tol, scale)
    }

    fn try_exp(&self) -> Option<Self> {
        if self.is_constant() {
            self.constant_term().try_exp().map(Poly::constant)
        } else {
            None
        }
    }

    fn try_sin(&self) -> Option<Self> {
        if self.is_constant() {
            self.constant_term().try_sin().map(Poly::constant)
        } else {
            None
        }
    }

    fn try_cos(&self) -> Option<Self> {
        if self.is_constant() {
            self.constant_term().try_cos().map(Poly::constant)
        } else {
            None
        }
    }
}

/// Flattened `f64` copy of a polynomial for repeated evaluation.
#[derive(Clone, Debug, Default)]
pub struct CompiledPoly {
    terms: Vec<(f64, Vec<(usize, u32)>)>,
}

impl CompiledPoly {
    pub fn new(p: &Poly<Rational>) -> Self {
        CompiledPoly {
            terms: p
                .terms()
                .map(|(m, c)| {
                    let factors =
                        m.exponents().iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect();
                    (c.to_f64().unwrap_or(f64::NAN), factors)
                })
                .collect(),
        }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, factors) in &self.terms {
            let mut t = *c;
            for &(i, e) in factors {
                t *= x[i].powi(e as i32);
            }
            acc += t;
        }
        acc
    }
}

/// How a coefficient is written in canonical text.
pub trait CoeffFormat {
    fn is_negative(&self) -> bool;
    /// Text of `|c|`, and whether it is a plain integer.
    fn abs_text(&self) -> (String, bool);
    fn is_unit(&self) -> bool;
}

impl CoeffFormat for Rational {
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }

    fn abs_text(&self) -> (String, bool) {
        let a = self.abs();
        (format_rational(&a), a.is_integer())
    }

    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
}

impl CoeffFormat for f64 {
    fn is_negative(&self) -> bool {
        *self < 0.0
    }

    fn abs_text(&self) -> (String, bool) {
        (format!("{:e}", self.abs()), true)
    }

    fn is_unit(&self) -> bool {
        self.abs() == 1.0
    }
}

pub fn monomial_text(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

/// Body of a single term without its sign, e.g. `(1/6)*x1^3`.
pub fn term_body<S: CoeffFormat>(m: &Monomial, c: &S, names: &[String]) -> String {
    let (txt, integral) = c.abs_text();
    if m.is_one() {
        return txt;
    }
    let mono = monomial_text(m, names);
    if c.is_unit() {
        mono
    } else if integral {
        format!("{}*{}", txt, mono)
    } else {
        format!("({})*{}", txt, mono)
    }
}

impl<S: Scalar + CoeffFormat> Poly<S> {
    /// Canonical text, e.g. `x1^2 - (1/2)*x2 + 1`.
    pub fn to_text(&self, space: &VarSpace) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.sorted_terms(&space.weights).into_iter().enumerate() {
            let body = term_body(m, c, &space.names);
            if idx == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

/// Display helper binding a polynomial to its variable names.
pub struct PolyDisplay<'a, S> {
    pub poly: &'a Poly<S>,
    pub space: &'a VarSpace,
}

impl<S: Scalar + CoeffFormat> fmt::Display for PolyDisplay<'_, S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.poly.to_text(self.space))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    type P = Poly<Rational>;

    fn x(i: usize) -> P {
        P::var(i)
    }

    #[test]
    fn square_has_weighted_degree_two() {
        let p = &x(0) * &x(0);
        assert_eq!(p.wdeg(&[1]), Some(2));
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&x(0) + &x(1)) * &(&x(0) - &x(1));
        let expected = &(&x(0) * &x(0)) - &(&x(1) * &x(1));
        assert_eq!(p, expected);
    }

    #[test]
    fn grushin_weight_bookkeeping() {
        // x1 * x2^3 with weights (1, 4)
        let m = Monomial::from_exponents(&[1, 3]);
        assert_eq!(m.wdeg(&[1, 4]), 13);
    }

    #[test]
    fn substitute_shift() {
        let p = &x(0) * &x(0);
        let shifted = p.substitute(&[&x(0) + &P::one()]);
        let expected = P::from_terms([
            (Monomial::var_pow(0, 2), int(1)),
            (Monomial::var(0), int(2)),
            (Monomial::one(), int(1)),
        ]);
        assert_eq!(shifted, expected);
    }

    #[test]
    fn substitute_identity() {
        let p = P::from_terms([
            (Monomial::from_exponents(&[2, 1]), rat(3, 2)),
            (Monomial::var(1), int(-4)),
        ]);
        assert_eq!(p.substitute(&[x(0), x(1)]), p);
        assert_eq!(p.substitute(&[]), p);
    }

    #[test]
    fn canonical_text() {
        let space = VarSpace::new(vec!["x1".into(), "x2".into()], vec![1, 4]);
        let p = P::from_terms([
            (Monomial::var_pow(0, 3), rat(1, 6)),
            (Monomial::var(1), int(-2)),
            (Monomial::one(), int(1)),
        ]);
        assert_eq!(p.to_text(&space), "-2*x2 + (1/6)*x1^3 + 1");
        assert_eq!(P::zero().to_text(&space), "0");
    }

    #[test]
    fn monomial_enumeration_counts() {
        let space = VarSpace::new(vec!["a".into(), "b".into(), "c".into()], vec![1, 1, 2]);
        // wdeg <= 2: 1, a, b, a^2, ab, b^2, c
        assert_eq!(space.monomials_up_to(2).len(), 7);
    }

    #[test]
    fn remap_and_zero_out() {
        let p = &(&x(0) * &x(2)) + &x(1);
        let q = p.remap_vars(|i| if i == 0 { None } else { Some(i - 1) });
        assert_eq!(q, x(0));
    }
}
