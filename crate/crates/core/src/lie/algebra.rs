//! Stratified nilpotent Lie algebras given by structure constants.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use super::bch::DynkinTable;
use crate::linalg;
use crate::scalar::{Rational, Scalar};

/// Largest step accepted unless a caller raises the cap.
pub const DEFAULT_STEP_CAP: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("basis vector {0} has weight 0; weights start at 1")]
    ZeroWeight(usize),
    #[error("bracket [{0},{0}] must vanish")]
    SelfBracket(usize),
    #[error("bracket [{0},{1}] given twice with conflicting values")]
    ConflictingBracket(usize, usize),
    #[error("grading violation: [{i},{j}] has a component on {k} of the wrong weight")]
    GradingViolation { i: usize, j: usize, k: usize },
    #[error("Jacobi identity fails for ({i},{j},{k}) in component {l}")]
    JacobiViolation { i: usize, j: usize, k: usize, l: usize },
    #[error("not stratified: layer {layer} does not generate layer {next}", next = layer + 1)]
    NotStratified { layer: u32 },
    #[error("step {step} exceeds the cap {cap}")]
    StepTooLarge { step: u32, cap: u32 },
}

/// Unvalidated algebra description. Brackets may list one orientation only.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawAlgebra {
    pub names: Vec<String>,
    pub weights: Vec<u32>,
    /// `(i, j, [(k, c)])` meaning `[e_i, e_j] = Σ c e_k`.
    pub brackets: Vec<(usize, usize, Vec<(usize, Rational)>)>,
}

impl RawAlgebra {
    pub fn new(names: &[&str], weights: &[u32]) -> Self {
        RawAlgebra {
            names: names.iter().map(|s| s.to_string()).collect(),
            weights: weights.to_vec(),
            brackets: Vec::new(),
        }
    }

    pub fn index(&self, name: &str) -> usize {
        self.names.iter().position(|n| n == name).unwrap_or_else(|| panic!("unknown basis vector {name}"))
    }

    /// Adds `[a, b] = Σ c·k` by basis names.
    pub fn bracket(mut self, a: &str, b: &str, rhs: &[(&str, Rational)]) -> Self {
        let (i, j) = (self.index(a), self.index(b));
        let terms = rhs.iter().map(|(k, c)| (self.index(k), c.clone())).collect();
        self.brackets.push((i, j, terms));
        self
    }
}

/// Validated stratified algebra. Immutable; cheap to clone.
#[derive(Clone, Debug)]
pub struct StratifiedAlgebra {
    names: Vec<String>,
    weights: Vec<u32>,
    step: u32,
    /// `table[i][j]` = sparse `[e_i, e_j]`.
    table: Vec<Vec<Vec<(usize, Rational)>>>,
    dynkin: Arc<DynkinTable>,
}

impl PartialEq for StratifiedAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.weights == other.weights && self.table == other.table
    }
}

/// Element of the algebra in the fixed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement<S> {
    pub coeffs: Vec<S>,
}

impl<S: Scalar> AlgebraElement<S> {
    pub fn zero(n: usize) -> Self {
        AlgebraElement { coeffs: vec![S::zero(); n] }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut e = Self::zero(n);
        e.coeffs[i] = S::one();
        e
    }

    pub fn new(coeffs: Vec<S>) -> Self {
        AlgebraElement { coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect() }
    }

    pub fn neg(&self) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().map(|a| -a.clone()).collect() }
    }

    pub fn scale(&self, c: &S) -> Self {
        AlgebraElement { coeffs: self.coeffs.iter().map(|a| a.clone() * c.clone()).collect() }
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> AlgebraElement<T> {
        AlgebraElement { coeffs: self.coeffs.iter().map(f).collect() }
    }
}

impl StratifiedAlgebra {
    pub fn validate(raw: &RawAlgebra) -> Result<Self, AlgebraError> {
        Self::validate_with_cap(raw, DEFAULT_STEP_CAP)
    }

    pub fn validate_with_cap(raw: &RawAlgebra, cap: u32) -> Result<Self, AlgebraError> {
        let n = raw.names.len();
        if n == 0 {
            return Err(AlgebraError::DimensionMismatch("empty basis".into()));
        }
        if raw.weights.len() != n {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{} basis names but {} weights",
                n,
                raw.weights.len()
            )));
        }
        if let Some(i) = raw.weights.iter().position(|&w| w == 0) {
            return Err(AlgebraError::ZeroWeight(i));
        }
        let step = *raw.weights.iter().max().unwrap();
        if step > cap {
            return Err(AlgebraError::StepTooLarge { step, cap });
        }

        // antisymmetric closure; an orientation may be given once
        let mut given: BTreeMap<(usize, usize), Vec<Rational>> = BTreeMap::new();
        for (i, j, terms) in &raw.brackets {
            let (i, j) = (*i, *j);
            if i >= n || j >= n || terms.iter().any(|(k, _)| *k >= n) {
                return Err(AlgebraError::DimensionMismatch(format!("bracket index out of range in [{i},{j}]")));
            }
            let mut dense = vec![Rational::zero(); n];
            for (k, c) in terms {
                dense[*k] += c;
            }
            if i == j {
                if dense.iter().any(|c| !c.is_zero()) {
                    return Err(AlgebraError::SelfBracket(i));
                }
                continue;
            }
            let (key, oriented) = if i < j { ((i, j), dense) } else { ((j, i), dense.into_iter().map(|c| -c).collect()) };
            match given.get(&key) {
                Some(prev) if *prev != oriented => return Err(AlgebraError::ConflictingBracket(i, j)),
                _ => {
                    given.insert(key, oriented);
                }
            }
        }
        let mut table = vec![vec![Vec::new(); n]; n];
        for ((i, j), dense) in &given {
            for (k, c) in dense.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                if raw.weights[k] != raw.weights[*i] + raw.weights[*j] {
                    return Err(AlgebraError::GradingViolation { i: *i, j: *j, k });
                }
                table[*i][*j].push((k, c.clone()));
                table[*j][*i].push((k, -c.clone()));
            }
        }

        let alg = StratifiedAlgebra {
            names: raw.names.clone(),
            weights: raw.weights.clone(),
            step,
            table,
            dynkin: Arc::new(DynkinTable::new(step)),
        };
        alg.check_jacobi()?;
        alg.check_stratified()?;
        Ok(alg)
    }

    fn check_jacobi(&self) -> Result<(), AlgebraError> {
        let n = self.dim();
        let e = |i: usize| AlgebraElement::<Rational>::basis(n, i);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let t1 = self.bracket(&self.bracket(&e(i), &e(j)), &e(k));
                    let t2 = self.bracket(&self.bracket(&e(j), &e(k)), &e(i));
                    let t3 = self.bracket(&self.bracket(&e(k), &e(i)), &e(j));
                    let sum = t1.add(&t2).add(&t3);
                    if let Some(l) = sum.coeffs.iter().position(|c| !c.is_zero()) {
                        return Err(AlgebraError::JacobiViolation { i, j, k, l });
                    }
                }
            }
        }
        Ok(())
    }

    fn check_stratified(&self) -> Result<(), AlgebraError> {
        let n = self.dim();
        if self.layer(1).is_empty() {
            return Err(AlgebraError::NotStratified { layer: 0 });
        }
        for layer in 1..self.step {
            let next = self.layer(layer + 1);
            let mut rows = Vec::new();
            for &a in &self.layer(layer) {
                for &b in &self.layer(1) {
                    let mut row = vec![Rational::zero(); n];
                    for (k, c) in &self.table[a][b] {
                        row[*k] = c.clone();
                    }
                    rows.push(row);
                }
            }
            if linalg::rank(&rows, n) != next.len() {
                return Err(AlgebraError::NotStratified { layer });
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn step(&self) -> u32 {
        self.step
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.weights[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Basis indices of layer `j`.
    pub fn layer(&self, j: u32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weights[i] == j).collect()
    }

    /// Sparse structure constants of `[e_i, e_j]`.
    pub fn structure(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.table[i][j]
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.table[i][j].iter().find(|(kk, _)| *kk == k).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// Bilinear expansion through the structure constants.
    pub fn bracket<S: Scalar>(&self, a: &AlgebraElement<S>, b: &AlgebraElement<S>) -> AlgebraElement<S> {
        let n = self.dim();
        let mut out = AlgebraElement::<S>::zero(n);
        for (i, ai) in a.coeffs.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.coeffs.iter().enumerate() {
                if bj.is_zero() || self.table[i][j].is_empty() {
                    continue;
                }
                let ab = ai.clone() * bj.clone();
                for (k, c) in &self.table[i][j] {
                    out.coeffs[*k] = out.coeffs[*k].clone() + ab.clone() * S::from_rational(c);
                }
            }
        }
        out
    }

    /// `δ_λ`: component `i` is scaled by `λ^{w_i}`.
    pub fn dilate<S: Scalar>(&self, a: &AlgebraElement<S>, lambda: &S) -> AlgebraElement<S> {
        AlgebraElement {
            coeffs: a.coeffs.iter().zip(&self.weights).map(|(c, &w)| c.clone() * lambda.pow(w)).collect(),
        }
    }

    /// Component of weight exactly `w`.
    pub fn graded_part<S: Scalar>(&self, a: &AlgebraElement<S>, w: u32) -> AlgebraElement<S> {
        AlgebraElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&self.weights)
                .map(|(c, &wi)| if wi == w { c.clone() } else { S::zero() })
                .collect(),
        }
    }

    /// Same algebra with the basis permuted: new basis vector `p` is old
    /// basis vector `order[p]`.
    pub fn reordered(&self, order: &[usize]) -> StratifiedAlgebra {
        let n = self.dim();
        let mut inv = vec![0; n];
        for (p, &o) in order.iter().enumerate() {
            inv[o] = p;
        }
        let table = (0..n)
            .map(|p| {
                (0..n)
                    .map(|q| {
                        let mut v: Vec<(usize, Rational)> =
                            self.table[order[p]][order[q]].iter().map(|(k, c)| (inv[*k], c.clone())).collect();
                        v.sort_by_key(|(k, _)| *k);
                        v
                    })
                    .collect()
            })
            .collect();
        StratifiedAlgebra {
            names: order.iter().map(|&o| self.names[o].clone()).collect(),
            weights: order.iter().map(|&o| self.weights[o]).collect(),
            step: self.step,
            table,
            dynkin: self.dynkin.clone(),
        }
    }

    pub(crate) fn dynkin(&self) -> &DynkinTable {
        &self.dynkin
    }

    /// Brackets as `(i, j, [(k, c)])` with `i < j`, one orientation each.
    pub fn bracket_list(&self) -> Vec<(usize, usize, Vec<(usize, Rational)>)> {
        let n = self.dim();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if !self.table[i][j].is_empty() {
                    out.push((i, j, self.table[i][j].clone()));
                }
            }
        }
        out
    }

    pub fn to_raw(&self) -> RawAlgebra {
        RawAlgebra { names: self.names.clone(), weights: self.weights.clone(), brackets: self.bracket_list() }
    }
}
