//! Taylor polynomials on `G` and intrinsic Taylor polynomials on `H\G`.
//!
//! A Taylor polynomial of degree `k` is the unique `P` of weighted degree
//! `≤ k` with `X^I P(c) = X^I f(c)` for every word `I` with `d(I) ≤ k`.
//! The constraint matrix is exact; the right-hand side may be any scalar.

use std::collections::HashMap;

use num_traits::Zero;
use thiserror::Error;

use crate::field::PolyVectorField;
use crate::group::CarnotGroup;
use crate::linalg::{self, SolveError};
use crate::quotient::QuotientModel;
use crate::scalar::{Rational, Scalar, Tolerance};
use crate::symcalc::{Jet, JetError, Monomial, Poly, VarSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TaylorError {
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("jet order {have} is below the requested degree {need}")]
    JetTooShort { have: u32, need: u32 },
    #[error("lifted Taylor polynomial depends on subgroup coordinate {0}")]
    LiftNotInvariant(usize),
    #[error("Taylor polynomial changes when the representative moves by h = {0}")]
    Mismatch(String),
    #[error("right-invariant field of generator {generator} does not annihilate the polynomial: residual {residual}")]
    NotInvariant { generator: usize, residual: String },
}

/// Multi-index of frame letters.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    pub letters: Vec<usize>,
    pub degree: u32,
}

impl Word {
    pub fn empty() -> Self {
        Word { letters: Vec::new(), degree: 0 }
    }

    pub fn new(letters: Vec<usize>, weights: &[u32]) -> Self {
        let degree = letters.iter().map(|&l| weights[l]).sum();
        Word { letters, degree }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_horizontal(&self) -> bool {
        self.degree as usize == self.letters.len()
    }

    /// `X^I f = X_{i_1}(X_{i_2}(… X_{i_K} f))`.
    pub fn apply<S: Scalar>(&self, frame: &[PolyVectorField], f: &Poly<S>) -> Poly<S> {
        self.letters.iter().rev().fold(f.clone(), |acc, &l| frame[l].apply(&acc))
    }
}

/// Words with `d(I) ≤ k` in shortlex order, the empty word first.
pub fn enumerate_words(weights: &[u32], k: u32, horizontal_only: bool) -> Vec<Word> {
    let letters: Vec<usize> =
        (0..weights.len()).filter(|&l| !horizontal_only || weights[l] == 1).collect();
    let mut out = vec![Word::empty()];
    let mut frontier = vec![Word::empty()];
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for w in &frontier {
            for &l in &letters {
                if w.degree + weights[l] <= k {
                    let mut letters = w.letters.clone();
                    letters.push(l);
                    next.push(Word { letters, degree: w.degree + weights[l] });
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Values of `X^I` on an input for every word, sharing suffixes.
fn word_values<T: Clone, E>(
    words: &[Word],
    init: T,
    mut apply: impl FnMut(usize, &T) -> Result<T, E>,
) -> Result<Vec<T>, E> {
    let mut memo: HashMap<&[usize], T> = HashMap::new();
    memo.insert(&[], init);
    let mut out = Vec::with_capacity(words.len());
    // shortlex order guarantees the suffix was computed first
    for w in words {
        let v = match memo.get(w.letters.as_slice()) {
            Some(v) => v.clone(),
            None => {
                let tail = memo.get(&w.letters[1..]).expect("suffix before word").clone();
                let v = apply(w.letters[0], &tail)?;
                memo.insert(&w.letters, v.clone());
                v
            }
        };
        out.push(v);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Space {
    G,
    M,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorResult<S> {
    pub polynomial: Poly<S>,
    pub center: Vec<Rational>,
    pub degree: u32,
    pub constraint_count: usize,
    pub unknown_count: usize,
    pub rank: usize,
    pub space: Space,
}

/// Constraint system `X^I m (c)` for a frame, center and degree; reusable
/// across right-hand sides.
#[derive(Clone, Debug)]
pub struct TaylorSystem {
    frame: Vec<PolyVectorField>,
    words: Vec<Word>,
    monomials: Vec<Monomial>,
    matrix: Vec<Vec<Rational>>,
    center: Vec<Rational>,
    degree: u32,
}

impl TaylorSystem {
    /// `letter_weights[l]` is the degree of `frame[l]`; monomials are those
    /// of `space` with weighted degree `≤ k`.
    pub fn new(
        frame: &[PolyVectorField],
        letter_weights: &[u32],
        space: &VarSpace,
        center: &[Rational],
        k: u32,
        horizontal_only: bool,
    ) -> Self {
        let words = enumerate_words(letter_weights, k, horizontal_only);
        let monomials = space.monomials_up_to(k);
        let mut matrix = vec![vec![Rational::zero(); monomials.len()]; words.len()];
        for (col, m) in monomials.iter().enumerate() {
            let p = Poly::term(m.clone(), Rational::from_integer(1.into()));
            let vals = word_values::<_, ()>(&words, p, |l, q| Ok(frame[l].apply(q))).expect("infallible");
            for (row, v) in vals.iter().enumerate() {
                matrix[row][col] = v.eval(center);
            }
        }
        TaylorSystem { frame: frame.to_vec(), words, monomials, matrix, center: center.to_vec(), degree: k }
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    pub fn center(&self) -> &[Rational] {
        &self.center
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.matrix, self.monomials.len())
    }

    /// `X^I f(c)` for every word, from jet data at `c`.
    pub fn derivatives<S: Scalar>(&self, jet: &Jet<S>) -> Result<Vec<S>, TaylorError> {
        if jet.order() < self.degree {
            return Err(TaylorError::JetTooShort { have: jet.order(), need: self.degree });
        }
        let jet = Jet::from_displacement(jet.center().to_vec(), self.degree, jet.poly().clone());
        let vals = word_values(&self.words, jet, |l, j| self.frame[l].apply_to_jet(j))?;
        Ok(vals.iter().map(Jet::value).collect())
    }

    pub fn solve<S: Scalar>(&self, jet: &Jet<S>, space: Space, tol: &Tolerance) -> Result<TaylorResult<S>, TaylorError> {
        let rhs = self.derivatives(jet)?;
        self.solve_rhs(&rhs, space, tol)
    }

    pub fn solve_rhs<S: Scalar>(&self, rhs: &[S], space: Space, tol: &Tolerance) -> Result<TaylorResult<S>, TaylorError> {
        let sol = linalg::solve_unique(&self.matrix, rhs, tol)?;
        let polynomial = Poly::from_terms(self.monomials.iter().cloned().zip(sol.values));
        Ok(TaylorResult {
            polynomial,
            center: self.center.clone(),
            degree: self.degree,
            constraint_count: sol.constraints,
            unknown_count: self.monomials.len(),
            rank: sol.rank,
            space,
        })
    }
}

/// McLaurin systems for a group, one per degree.
#[derive(Clone, Debug)]
pub struct GroupTaylor<'a> {
    group: &'a CarnotGroup,
    system: TaylorSystem,
}

impl<'a> GroupTaylor<'a> {
    pub fn new(group: &'a CarnotGroup, k: u32) -> Self {
        Self::with_words(group, k, false)
    }

    pub fn with_words(group: &'a CarnotGroup, k: u32, horizontal_only: bool) -> Self {
        let system = TaylorSystem::new(
            group.left_frame(),
            group.weights(),
            group.space(),
            &group.identity::<Rational>(),
            k,
            horizontal_only,
        );
        GroupTaylor { group, system }
    }

    pub fn system(&self) -> &TaylorSystem {
        &self.system
    }

    pub fn degree(&self) -> u32 {
        self.system.degree
    }

    /// McLaurin polynomial from a jet at the identity.
    pub fn mclaurin<S: Scalar>(&self, jet: &Jet<S>, tol: &Tolerance) -> Result<TaylorResult<S>, TaylorError> {
        self.system.solve(jet, Space::G, tol)
    }

    /// `P̃_k(F, g₀) = P̃_k(F∘L_{g₀}, 0) ∘ L_{g₀}^{-1}` from a jet of `F` at `g₀`.
    pub fn taylor_at<S: Scalar>(&self, jet: &Jet<S>, g0: &[Rational], tol: &Tolerance) -> Result<TaylorResult<S>, TaylorError> {
        let n = self.group.dim();
        let g0s: Vec<S> = g0.iter().map(S::from_rational).collect();
        let map = self.group.left_translation_map_generic(&g0s);
        let at_zero = jet.compose_map(&map, vec![S::zero(); n]);
        let mut res = self.mclaurin(&at_zero, tol)?;
        let back = self.group.left_translation_map_generic::<S>(
            &self.group.inverse(g0).iter().map(S::from_rational).collect::<Vec<_>>(),
        );
        res.polynomial = res.polynomial.substitute(&back);
        res.center = g0.to_vec();
        Ok(res)
    }
}

/// Direct solve of the defining equations at `g₀` over absolute monomials.
pub fn taylor_direct_on_g<S: Scalar>(
    group: &CarnotGroup,
    jet: &Jet<S>,
    g0: &[Rational],
    k: u32,
    tol: &Tolerance,
) -> Result<TaylorResult<S>, TaylorError> {
    TaylorSystem::new(group.left_frame(), group.weights(), group.space(), g0, k, false).solve(jet, Space::G, tol)
}

/// Outcome of the intrinsic cross-check on `M`.
#[derive(Clone, Debug, PartialEq)]
pub enum CrossCheck {
    Agrees { rank: usize, constraints: usize },
    Disagrees { intrinsic: String },
    RankDeficient { rank: usize, unknowns: usize },
    Inconsistent { row: usize },
}

#[derive(Clone, Debug)]
pub struct TaylorOnM<S> {
    pub result: TaylorResult<S>,
    pub lifted: TaylorResult<S>,
    pub cross_check: Option<CrossCheck>,
}

/// Taylor machinery for one quotient model and degree.
#[derive(Clone, Debug)]
pub struct QuotientTaylor<'a> {
    model: &'a QuotientModel,
    group: GroupTaylor<'a>,
}

impl<'a> QuotientTaylor<'a> {
    pub fn new(model: &'a QuotientModel, k: u32) -> Self {
        QuotientTaylor { model, group: GroupTaylor::new(model.group(), k) }
    }

    pub fn degree(&self) -> u32 {
        self.group.degree()
    }

    pub fn group_taylor(&self) -> &GroupTaylor<'a> {
        &self.group
    }

    /// Jet of `f∘Π` at `(y, q)` from a jet of `f` at `q`.
    pub fn lift_jet<S: Scalar>(&self, jet: &Jet<S>, y: &[S]) -> Jet<S> {
        let mut center = y.to_vec();
        center.extend_from_slice(jet.center());
        Jet::from_displacement(center, jet.order(), self.model.lift_poly(jet.poly()))
    }

    /// Lift, solve on `G` at `ι(q)`, check `y`-independence, restrict.
    pub fn taylor<S: Scalar>(&self, jet: &Jet<S>, q: &[Rational], cross_check: bool, tol: &Tolerance) -> Result<TaylorOnM<S>, TaylorError> {
        let ell = self.model.ell();
        let g0 = self.model.iota(q);
        let lifted_jet = self.lift_jet(jet, &vec![S::zero(); ell]);
        let lifted = self.group.taylor_at(&lifted_jet, &g0, tol)?;
        if let Some(i) = (0..ell).find(|&i| lifted.polynomial.depends_on(i)) {
            return Err(TaylorError::LiftNotInvariant(i));
        }
        let result = TaylorResult {
            polynomial: self.model.restrict_poly(&lifted.polynomial),
            center: q.to_vec(),
            space: Space::M,
            ..lifted.clone()
        };
        let cross_check = if cross_check { Some(self.intrinsic_check(jet, q, &result.polynomial, tol)) } else { None };
        Ok(TaylorOnM { result, lifted, cross_check })
    }

    /// Solves the intrinsic system with the projected frame directly.
    pub fn intrinsic<S: Scalar>(&self, jet: &Jet<S>, q: &[Rational], tol: &Tolerance) -> Result<TaylorResult<S>, TaylorError> {
        self.intrinsic_system(q).solve(jet, Space::M, tol)
    }

    pub fn intrinsic_system(&self, q: &[Rational]) -> TaylorSystem {
        TaylorSystem::new(
            self.model.projected_frame(),
            self.model.group().weights(),
            self.model.space(),
            q,
            self.degree(),
            false,
        )
    }

    fn intrinsic_check<S: Scalar>(&self, jet: &Jet<S>, q: &[Rational], expected: &Poly<S>, tol: &Tolerance) -> CrossCheck {
        match self.intrinsic(jet, q, tol) {
            Ok(r) => {
                let diff = &r.polynomial - expected;
                let scale = expected.terms().map(|(_, c)| c.magnitude()).fold(1.0, f64::max);
                if diff.approx_zero(tol, scale) {
                    CrossCheck::Agrees { rank: r.rank, constraints: r.constraint_count }
                } else {
                    CrossCheck::Disagrees { intrinsic: format!("{:?}", r.polynomial) }
                }
            }
            Err(TaylorError::Solve(SolveError::RankDeficient { rank, unknowns })) => {
                CrossCheck::RankDeficient { rank, unknowns }
            }
            Err(TaylorError::Solve(SolveError::Inconsistent { row, .. })) => CrossCheck::Inconsistent { row },
            Err(e) => CrossCheck::Disagrees { intrinsic: e.to_string() },
        }
    }

    /// Recomputes the lifted polynomial at `h·ι(q)` for each `h` and requires
    /// exact equality with the one at `ι(q)`.
    pub fn representative_independence(
        &self,
        jet: &Jet<Rational>,
        q: &[Rational],
        hs: &[Vec<Rational>],
        tol: &Tolerance,
    ) -> Result<usize, TaylorError> {
        let ell = self.model.ell();
        let base = self.group.taylor_at(&self.lift_jet(jet, &vec![Rational::zero(); ell]), &self.model.iota(q), tol)?;
        for h in hs {
            let g1 = self.model.group().multiply(h, &self.model.iota(q));
            let y: Vec<Rational> = g1[..ell].to_vec();
            let other = self.group.taylor_at(&self.lift_jet(jet, &y), &g1, tol)?;
            if other.polynomial != base.polynomial {
                return Err(TaylorError::Mismatch(format!("{h:?}")));
            }
        }
        Ok(hs.len())
    }
}

/// Applies each right-invariant field of the subgroup generators.
pub fn h_invariance_check(model: &QuotientModel, p: &Poly<Rational>) -> Result<(), TaylorError> {
    for (i, y) in model.subgroup_right_fields().iter().enumerate() {
        let r = y.apply(p);
        if !r.is_zero() {
            return Err(TaylorError::NotInvariant { generator: i, residual: r.to_text(model.group().space()) });
        }
    }
    Ok(())
}

/// Jet whose displacement coefficients are independent symbols, one per
/// monomial of total degree `≤ order`. Symbol `s` stands for the coefficient
/// of `monomials[s]`.
pub fn symbolic_jet(n: usize, order: u32) -> (Jet<Poly<Rational>>, Vec<Monomial>) {
    let space = VarSpace::new((0..n).map(|i| format!("u{i}")).collect(), vec![1; n]);
    let monomials = space.monomials_up_to(order);
    let poly = Poly::from_terms(
        monomials.iter().enumerate().map(|(s, m)| (m.clone(), Poly::<Rational>::var(s))),
    );
    (Jet::from_displacement(vec![Poly::zero(); n], order, poly), monomials)
}
