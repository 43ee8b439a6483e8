//! Truncated multivariate Taylor expansions.

use num_traits::{One, Zero};
use thiserror::Error;

use super::poly::{Monomial, Poly};
use crate::scalar::{Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    #[error("jet order exhausted: cannot differentiate an order-0 jet")]
    OrderExhausted,
    #[error("value not representable in the chosen scalar type")]
    NotRepresentable,
}

/// Taylor coefficients of a function at `center`, up to total order `order`,
/// stored as a polynomial in the displacement `u = x - center`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet<S> {
    center: Vec<S>,
    order: u32,
    poly: Poly<S>,
}

impl<S: Scalar> Jet<S> {
    pub fn constant(center: Vec<S>, order: u32, c: S) -> Self {
        Jet { center, order, poly: Poly::constant(c) }
    }

    /// The coordinate function `x_i`.
    pub fn variable(center: Vec<S>, order: u32, i: usize) -> Self {
        let mut poly = Poly::constant(center[i].clone());
        if order >= 1 {
            poly = poly + Poly::var(i);
        }
        Jet { center, order, poly }
    }

    /// Jet of an everywhere-defined polynomial (given in absolute coordinates).
    pub fn from_poly(p: &Poly<S>, center: Vec<S>, order: u32) -> Self {
        let shift: Vec<Poly<S>> =
            center.iter().enumerate().map(|(i, c)| Poly::var(i) + Poly::constant(c.clone())).collect();
        let poly = p.substitute(&shift).truncate_total(order);
        Jet { center, order, poly }
    }

    /// Builds a jet directly from displacement coefficients.
    pub fn from_displacement(center: Vec<S>, order: u32, poly: Poly<S>) -> Self {
        let poly = poly.truncate_total(order);
        Jet { center, order, poly }
    }

    pub fn center(&self) -> &[S] {
        &self.center
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn num_vars(&self) -> usize {
        self.center.len()
    }

    /// Displacement polynomial.
    pub fn poly(&self) -> &Poly<S> {
        &self.poly
    }

    pub fn value(&self) -> S {
        self.poly.constant_term()
    }

    pub fn coefficient(&self, m: &Monomial) -> S {
        self.poly.coeff(m)
    }

    /// The Taylor polynomial in absolute coordinates.
    pub fn to_absolute(&self) -> Poly<S> {
        let shift: Vec<Poly<S>> =
            self.center.iter().enumerate().map(|(i, c)| Poly::var(i) - Poly::constant(c.clone())).collect();
        self.poly.substitute(&shift)
    }

    fn with(&self, order: u32, poly: Poly<S>) -> Self {
        Jet { center: self.center.clone(), order, poly: poly.truncate_total(order) }
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        self.with(order, &self.poly + &other.poly)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        self.with(order, &self.poly - &other.poly)
    }

    pub fn neg(&self) -> Self {
        Jet { center: self.center.clone(), order: self.order, poly: -self.poly.clone() }
    }

    pub fn scale(&self, c: &S) -> Self {
        Jet { center: self.center.clone(), order: self.order, poly: self.poly.scale(c) }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        let a = self.poly.truncate_total(order);
        let b = other.poly.truncate_total(order);
        self.with(order, mul_truncated(&a, &b, order))
    }

    pub fn powi(&self, e: u32) -> Self {
        let mut acc = Jet::constant(self.center.clone(), self.order, S::one());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `Σ_k coeffs[k] · h^k` where `h` is this jet minus its value.
    pub fn compose_series(&self, coeffs: &[S]) -> Self {
        let mut h = self.poly.clone();
        h.add_term(Monomial::one(), -self.value());
        let mut acc = Poly::zero();
        let mut hp = Poly::one();
        for (k, c) in coeffs.iter().enumerate() {
            if k as u32 > self.order {
                break;
            }
            acc = acc + hp.scale(c);
            hp = mul_truncated(&hp, &h, self.order);
        }
        self.with(self.order, acc)
    }

    pub fn exp(&self) -> Result<Self, JetError> {
        let e = self.value().try_exp().ok_or(JetError::NotRepresentable)?;
        let coeffs: Vec<S> =
            (0..=self.order).map(|k| e.clone() * S::from_rational(&inv_factorial(k))).collect();
        Ok(self.compose_series(&coeffs))
    }

    pub fn sin(&self) -> Result<Self, JetError> {
        let v = self.value();
        let s = v.try_sin().ok_or(JetError::NotRepresentable)?;
        let c = v.try_cos().ok_or(JetError::NotRepresentable)?;
        // derivatives of sin cycle through sin, cos, -sin, -cos
        let cycle = [s.clone(), c.clone(), -s, -c];
        self.trig_series(&cycle)
    }

    pub fn cos(&self) -> Result<Self, JetError> {
        let v = self.value();
        let s = v.try_sin().ok_or(JetError::NotRepresentable)?;
        let c = v.try_cos().ok_or(JetError::NotRepresentable)?;
        let cycle = [c.clone(), -s.clone(), -c, s];
        self.trig_series(&cycle)
    }

    fn trig_series(&self, cycle: &[S; 4]) -> Result<Self, JetError> {
        let coeffs: Vec<S> = (0..=self.order)
            .map(|k| cycle[(k % 4) as usize].clone() * S::from_rational(&inv_factorial(k)))
            .collect();
        Ok(self.compose_series(&coeffs))
    }

    /// `∂/∂x_i`; the order drops by one.
    pub fn partial(&self, i: usize) -> Result<Self, JetError> {
        if self.order == 0 {
            return Err(JetError::OrderExhausted);
        }
        Ok(self.with(self.order - 1, self.poly.derivative(i)))
    }

    /// Jet of `f ∘ φ` at `new_center`, where `φ` is a polynomial map with
    /// `φ(new_center) = self.center`. `map[i]` is the i-th component of `φ`
    /// in absolute coordinates of the new space.
    pub fn compose_map(&self, map: &[Poly<S>], new_center: Vec<S>) -> Self {
        let shift: Vec<Poly<S>> =
            new_center.iter().enumerate().map(|(i, c)| Poly::var(i) + Poly::constant(c.clone())).collect();
        let disp: Vec<Poly<S>> = map
            .iter()
            .zip(&self.center)
            .map(|(m, c)| {
                let mut d = m.substitute(&shift).truncate_total(self.order);
                d.add_term(Monomial::one(), -c.clone());
                d
            })
            .collect();
        let mut acc = Poly::zero();
        for (m, c) in self.poly.terms() {
            let mut t = Poly::constant(c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                for _ in 0..e {
                    t = mul_truncated(&t, &disp[i], self.order);
                }
            }
            acc = acc + t;
        }
        Jet { center: new_center, order: self.order, poly: acc.truncate_total(self.order) }
    }
}

pub(crate) fn inv_factorial(k: u32) -> Rational {
    let mut f = num_bigint::BigInt::from(1);
    for i in 2..=k {
        f *= i;
    }
    Rational::new(1.into(), f)
}

fn mul_truncated<S: Scalar>(a: &Poly<S>, b: &Poly<S>, order: u32) -> Poly<S> {
    let mut out = Poly::zero();
    for (m1, c1) in a.terms() {
        let d1 = m1.degree();
        if d1 > order {
            continue;
        }
        for (m2, c2) in b.terms() {
            if d1 + m2.degree() <= order {
                out.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat, Rational};

    #[test]
    fn square_jet_at_origin() {
        let x = Jet::<Rational>::variable(vec![int(0)], 3, 0);
        let j = x.mul(&x);
        assert_eq!(j.poly(), &Poly::term(Monomial::var_pow(0, 2), int(1)));
    }

    #[test]
    fn exp_jet_exact_at_zero() {
        let x = Jet::<Rational>::variable(vec![int(0)], 2, 0);
        let j = x.exp().unwrap();
        assert_eq!(j.coefficient(&Monomial::one()), int(1));
        assert_eq!(j.coefficient(&Monomial::var(0)), int(1));
        assert_eq!(j.coefficient(&Monomial::var_pow(0, 2)), rat(1, 2));
    }

    #[test]
    fn exp_not_exact_away_from_zero() {
        let x = Jet::<Rational>::variable(vec![int(1)], 2, 0);
        assert_eq!(x.exp(), Err(JetError::NotRepresentable));
    }

    #[test]
    fn partial_drops_order() {
        let x = Jet::<Rational>::variable(vec![int(0)], 3, 0);
        let j = x.mul(&x).partial(0).unwrap();
        assert_eq!(j.order(), 2);
        assert_eq!(j.poly(), &Poly::term(Monomial::var(0), int(2)));
        let c = Jet::<Rational>::constant(vec![int(0)], 0, int(1));
        assert_eq!(c.partial(0), Err(JetError::OrderExhausted));
    }

    #[test]
    fn sin_of_product_matches_finite_differences() {
        // sin(x1 x2) at (1, 1): compare first and second order coefficients
        // against central differences
        let c = vec![1.0f64, 1.0];
        let x1 = Jet::variable(c.clone(), 2, 0);
        let x2 = Jet::variable(c.clone(), 2, 1);
        let j = x1.mul(&x2).sin().unwrap();
        let f = |a: f64, b: f64| (a * b).sin();
        let h = 1e-4;
        let d1 = (f(1.0 + h, 1.0) - f(1.0 - h, 1.0)) / (2.0 * h);
        let d11 = (f(1.0 + h, 1.0) - 2.0 * f(1.0, 1.0) + f(1.0 - h, 1.0)) / (h * h);
        let d12 = (f(1.0 + h, 1.0 + h) - f(1.0 + h, 1.0 - h) - f(1.0 - h, 1.0 + h) + f(1.0 - h, 1.0 - h))
            / (4.0 * h * h);
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-12);
        assert!(rel(j.coefficient(&Monomial::var(0)), d1) < 1e-6);
        assert!(rel(2.0 * j.coefficient(&Monomial::var_pow(0, 2)), d11) < 1e-6);
        assert!(rel(j.coefficient(&Monomial::from_exponents(&[1, 1])), d12) < 1e-6);
    }

    #[test]
    fn compose_with_translation() {
        // f(x) = x^2 at center 1, composed with φ(t) = t + 1 at t = 0
        let f = Poly::<Rational>::var(0).pow(2);
        let j = Jet::from_poly(&f, vec![int(1)], 3);
        let phi = vec![Poly::var(0) + Poly::one()];
        let g = j.compose_map(&phi, vec![int(0)]);
        let expected = Jet::from_poly(&(Poly::var(0) + Poly::one()).pow(2), vec![int(0)], 3);
        assert_eq!(g, expected);
    }
}
