//! Carnot groups in exponential coordinates of the first and second kind.
//!
//! Second-kind coordinates `(y, x)` stand for
//! `exp(Σ y_i w_i) · exp(Σ x_j v_j)` where the `w_i` span the chosen
//! subalgebra and come first in the adapted basis.

use num_traits::Zero;
use thiserror::Error;

use crate::field::{Invariance, PolyVectorField};
use crate::lie::{AlgebraElement, StratifiedAlgebra};
use crate::scalar::{Rational, Scalar};
use crate::symcalc::{CompiledPoly, Poly, VarSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("adapted ordering must be a permutation of 0..{0}")]
    BadOrdering(usize),
    #[error("{0} coordinate names for a group of dimension {1}")]
    BadNames(usize, usize),
    #[error("dilation factor must be positive")]
    NonPositiveDilation,
    #[error("second-kind refactorization failed at coordinate {0}")]
    NonInvertible(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoordKind {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroupPoint<S> {
    pub kind: CoordKind,
    pub coords: Vec<S>,
}

impl<S: Scalar> GroupPoint<S> {
    pub fn second(coords: Vec<S>) -> Self {
        GroupPoint { kind: CoordKind::Second, coords }
    }

    pub fn first(coords: Vec<S>) -> Self {
        GroupPoint { kind: CoordKind::First, coords }
    }
}

#[derive(Clone, Debug)]
struct Compiled {
    product: Vec<CompiledPoly>,
    diff_first: Vec<CompiledPoly>,
    to_first: Vec<CompiledPoly>,
    to_second: Vec<CompiledPoly>,
}

/// A Carnot group with an adapted basis `w_1..w_ℓ, v_1..v_m`.
#[derive(Clone, Debug)]
pub struct CarnotGroup {
    algebra: StratifiedAlgebra,
    ell: usize,
    space: VarSpace,
    /// second kind -> first kind, `n` polynomials in `n` variables
    to_first: Vec<Poly<Rational>>,
    /// first kind -> second kind
    to_second: Vec<Poly<Rational>>,
    /// second-kind coordinates of `g h` in the `2n` variables `(g, h)`
    product: Vec<Poly<Rational>>,
    /// first-kind coordinates of `g^{-1} h` in the `2n` second-kind variables `(g, h)`
    diff_first: Vec<Poly<Rational>>,
    inverse: Vec<Poly<Rational>>,
    left: Vec<PolyVectorField>,
    right: Vec<PolyVectorField>,
    compiled: Compiled,
}

impl CarnotGroup {
    /// `order` lists original basis indices: the `ell` subalgebra vectors
    /// first, then the complement.
    pub fn new(
        algebra: &StratifiedAlgebra,
        order: &[usize],
        ell: usize,
        coord_names: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        let n = algebra.dim();
        let mut seen = vec![false; n];
        if order.len() != n || ell > n {
            return Err(GroupError::BadOrdering(n));
        }
        for &o in order {
            if o >= n || seen[o] {
                return Err(GroupError::BadOrdering(n));
            }
            seen[o] = true;
        }
        let algebra = algebra.reordered(order);
        let names = coord_names.unwrap_or_else(|| algebra.names().to_vec());
        if names.len() != n {
            return Err(GroupError::BadNames(names.len(), n));
        }
        let space = VarSpace::new(names, algebra.weights().to_vec());

        let vars = |offset: usize| -> Vec<Poly<Rational>> { (0..n).map(|i| Poly::var(i + offset)).collect() };
        let to_first = second_to_first(&algebra, ell, &vars(0));
        let to_second = invert_triangular(&algebra, &to_first)?;

        let xg = AlgebraElement::new(second_to_first(&algebra, ell, &vars(0)));
        let xh = AlgebraElement::new(second_to_first(&algebra, ell, &vars(n)));
        let z = algebra.bch(&xg, &xh);
        let product: Vec<Poly<Rational>> = to_second.iter().map(|p| p.substitute(&z.coeffs)).collect();
        let diff_first = algebra.bch(&xg.neg(), &xh).coeffs;
        let neg_first: Vec<Poly<Rational>> = to_first.iter().map(|p| -p.clone()).collect();
        let inverse = to_second.iter().map(|p| p.substitute(&neg_first)).collect();

        let compile = |ps: &[Poly<Rational>]| ps.iter().map(CompiledPoly::new).collect::<Vec<_>>();
        let compiled = Compiled {
            product: compile(&product),
            diff_first: compile(&diff_first),
            to_first: compile(&to_first),
            to_second: compile(&to_second),
        };

        let mut g = CarnotGroup {
            algebra,
            ell,
            space,
            to_first,
            to_second,
            product,
            diff_first,
            inverse,
            left: Vec::new(),
            right: Vec::new(),
            compiled,
        };
        g.left = (0..n).map(|b| g.build_left(b)).collect();
        g.right = (0..n).map(|b| g.build_right(b)).collect();
        Ok(g)
    }

    /// Group with subalgebra spanned by the basis vectors `h`, other vectors
    /// kept in their original relative order.
    pub fn with_subgroup(
        algebra: &StratifiedAlgebra,
        h: &[usize],
        coord_names: Option<Vec<String>>,
    ) -> Result<Self, GroupError> {
        let mut order = h.to_vec();
        order.extend((0..algebra.dim()).filter(|i| !h.contains(i)));
        Self::new(algebra, &order, h.len(), coord_names)
    }

    pub fn algebra(&self) -> &StratifiedAlgebra {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// Number of subalgebra coordinates.
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn weights(&self) -> &[u32] {
        self.algebra.weights()
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn to_first_polys(&self) -> &[Poly<Rational>] {
        &self.to_first
    }

    pub fn to_second_polys(&self) -> &[Poly<Rational>] {
        &self.to_second
    }

    pub fn product_polys(&self) -> &[Poly<Rational>] {
        &self.product
    }

    pub fn inverse_polys(&self) -> &[Poly<Rational>] {
        &self.inverse
    }

    fn build_left(&self, b: usize) -> PolyVectorField {
        let n = self.dim();
        let coeffs =
            self.product.iter().map(|p| p.derivative(n + b).remap_vars(|i| (i < n).then_some(i))).collect();
        PolyVectorField::new(self.field_name(b), coeffs)
            .with_degree(self.weights()[b])
            .with_invariance(Invariance::Left)
    }

    fn build_right(&self, b: usize) -> PolyVectorField {
        let n = self.dim();
        let coeffs = self.product.iter().map(|p| p.derivative(b).remap_vars(|i| i.checked_sub(n))).collect();
        PolyVectorField::new(self.field_name(b), coeffs)
            .with_degree(self.weights()[b])
            .with_invariance(Invariance::Right)
    }

    /// `X1` for coordinate `x1`.
    pub fn field_name(&self, b: usize) -> String {
        let name = &self.space.names[b];
        let mut c = name.chars();
        match c.next() {
            Some(f) => f.to_uppercase().chain(c).collect(),
            None => format!("E{b}"),
        }
    }

    pub fn left_field(&self, b: usize) -> &PolyVectorField {
        &self.left[b]
    }

    pub fn right_field(&self, b: usize) -> &PolyVectorField {
        &self.right[b]
    }

    pub fn left_frame(&self) -> &[PolyVectorField] {
        &self.left
    }

    pub fn right_frame(&self) -> &[PolyVectorField] {
        &self.right
    }

    pub fn identity<S: Scalar>(&self) -> Vec<S> {
        vec![S::zero(); self.dim()]
    }

    pub fn to_first_kind<S: Scalar>(&self, second: &[S]) -> Vec<S> {
        eval_all(&self.to_first, second)
    }

    pub fn to_second_kind<S: Scalar>(&self, first: &[S]) -> Vec<S> {
        eval_all(&self.to_second, first)
    }

    pub fn convert<S: Scalar>(&self, p: &GroupPoint<S>, kind: CoordKind) -> GroupPoint<S> {
        match (p.kind, kind) {
            (CoordKind::First, CoordKind::Second) => GroupPoint::second(self.to_second_kind(&p.coords)),
            (CoordKind::Second, CoordKind::First) => GroupPoint::first(self.to_first_kind(&p.coords)),
            _ => p.clone(),
        }
    }

    /// Product in second-kind coordinates.
    pub fn multiply<S: Scalar>(&self, g: &[S], h: &[S]) -> Vec<S> {
        let gh: Vec<S> = g.iter().chain(h).cloned().collect();
        eval_all(&self.product, &gh)
    }

    /// Product computed directly through the BCH series.
    pub fn multiply_bch<S: Scalar>(&self, g: &[S], h: &[S]) -> Vec<S> {
        let a = AlgebraElement::new(self.to_first_kind(g));
        let b = AlgebraElement::new(self.to_first_kind(h));
        self.to_second_kind(&self.algebra.bch(&a, &b).coeffs)
    }

    pub fn inverse<S: Scalar>(&self, g: &[S]) -> Vec<S> {
        eval_all(&self.inverse, g)
    }

    /// `δ_λ` on either kind of coordinates.
    pub fn dilate<S: Scalar>(&self, g: &[S], lambda: &S) -> Vec<S> {
        g.iter().zip(self.weights()).map(|(c, &w)| c.clone() * lambda.pow(w)).collect()
    }

    pub fn dilate_f64(&self, g: &[f64], lambda: f64) -> Result<Vec<f64>, GroupError> {
        if lambda.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(GroupError::NonPositiveDilation);
        }
        Ok(self.dilate(g, &lambda))
    }

    pub fn multiply_f64(&self, g: &[f64], h: &[f64]) -> Vec<f64> {
        let gh: Vec<f64> = g.iter().chain(h).copied().collect();
        self.compiled.product.iter().map(|p| p.eval(&gh)).collect()
    }

    pub fn to_first_f64(&self, g: &[f64]) -> Vec<f64> {
        self.compiled.to_first.iter().map(|p| p.eval(g)).collect()
    }

    pub fn to_second_f64(&self, xi: &[f64]) -> Vec<f64> {
        self.compiled.to_second.iter().map(|p| p.eval(xi)).collect()
    }

    /// `max_i |ξ_i|^{1/w_i}` over first-kind coordinates.
    pub fn quasi_norm_first(&self, xi: &[f64]) -> f64 {
        quasi_norm(xi, self.weights())
    }

    pub fn quasi_norm(&self, g: &[f64]) -> f64 {
        self.quasi_norm_first(&self.to_first_f64(g))
    }

    /// `d̂_G(g, h) = ‖g^{-1} h‖` for second-kind points.
    pub fn distance(&self, g: &[f64], h: &[f64]) -> f64 {
        let gh: Vec<f64> = g.iter().chain(h).copied().collect();
        let xi: Vec<f64> = self.compiled.diff_first.iter().map(|p| p.eval(&gh)).collect();
        quasi_norm(&xi, self.weights())
    }

    /// First-kind coordinates of `g^{-1} h` as exact polynomials in `(g, h)`.
    pub fn diff_first_polys(&self) -> &[Poly<Rational>] {
        &self.diff_first
    }

    /// Exact `‖·‖` on rational second-kind points, evaluated in `f64` at the end.
    pub fn distance_exact(&self, g: &[Rational], h: &[Rational]) -> f64 {
        let gh: Vec<Rational> = g.iter().chain(h).cloned().collect();
        let xi: Vec<f64> = self
            .diff_first
            .iter()
            .map(|p| num_traits::ToPrimitive::to_f64(&p.eval(&gh)).unwrap_or(f64::NAN))
            .collect();
        quasi_norm(&xi, self.weights())
    }

    /// Polynomial map `h ↦ a·h` for fixed exact `a`.
    pub fn left_translation_map(&self, a: &[Rational]) -> Vec<Poly<Rational>> {
        let n = self.dim();
        let mut sub: Vec<Poly<Rational>> = a.iter().cloned().map(Poly::constant).collect();
        sub.extend((0..n).map(Poly::var));
        self.product.iter().map(|p| p.substitute(&sub)).collect()
    }

    /// Left translation map with generic constant coefficients.
    pub fn left_translation_map_generic<S: Scalar>(&self, a: &[S]) -> Vec<Poly<S>> {
        let n = self.dim();
        let mut sub: Vec<Poly<S>> = a.iter().cloned().map(Poly::constant).collect();
        sub.extend((0..n).map(Poly::var));
        self.product.iter().map(|p| p.map_coeffs(S::from_rational).substitute(&sub)).collect()
    }
}

pub fn quasi_norm(xi: &[f64], weights: &[u32]) -> f64 {
    xi.iter().zip(weights).map(|(c, &w)| c.abs().powf(1.0 / w as f64)).fold(0.0, f64::max)
}

fn eval_all<S: Scalar>(ps: &[Poly<Rational>], x: &[S]) -> Vec<S> {
    ps.iter().map(|p| p.map_coeffs(S::from_rational).eval(x)).collect()
}

/// `bch(Σ y_i e_i, Σ x_j e_{ℓ+j})` for second-kind coordinates `c = (y, x)`.
fn second_to_first<S: Scalar>(alg: &StratifiedAlgebra, ell: usize, c: &[S]) -> Vec<S> {
    let n = alg.dim();
    let mut y = AlgebraElement::zero(n);
    let mut x = AlgebraElement::zero(n);
    for i in 0..n {
        if i < ell {
            y.coeffs[i] = c[i].clone();
        } else {
            x.coeffs[i] = c[i].clone();
        }
    }
    alg.bch(&y, &x).coeffs
}

/// Inverts `ξ = c + R(c)` where `R_i` involves only lower-weight coordinates.
fn invert_triangular(alg: &StratifiedAlgebra, to_first: &[Poly<Rational>]) -> Result<Vec<Poly<Rational>>, GroupError> {
    let n = alg.dim();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by_key(|&i| alg.weight(i));
    let mut sol: Vec<Poly<Rational>> = (0..n).map(|_| Poly::zero()).collect();
    let mut done = vec![false; n];
    for &i in &idx {
        let rest = &to_first[i] - &Poly::var(i);
        for j in 0..n {
            if rest.depends_on(j) && !done[j] {
                return Err(GroupError::NonInvertible(i));
            }
        }
        sol[i] = &Poly::var(i) - &rest.substitute(&sol);
        done[i] = true;
    }
    Ok(sol)
}

/// Exact rational check that a field is `Σ_k c_k X_k`.
pub fn is_combination(field: &PolyVectorField, frame: &[PolyVectorField], coeffs: &[(usize, Rational)]) -> bool {
    let mut acc: Vec<Poly<Rational>> = vec![Poly::zero(); field.dim()];
    for (k, c) in coeffs {
        for (a, p) in acc.iter_mut().zip(&frame[*k].coeffs) {
            *a = &*a + &p.scale(c);
        }
    }
    acc == field.coeffs
}

/// Sum `Σ c_i e_i` with scalar coefficients; zero entries allowed.
pub fn element_from<S: Scalar>(c: &[S]) -> AlgebraElement<S> {
    AlgebraElement::new(c.to_vec())
}

pub fn is_identity<S: Scalar>(g: &[S]) -> bool {
    g.iter().all(Zero::is_zero)
}
