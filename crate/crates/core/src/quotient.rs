//! Homogeneous quotients `H\G` realized on the slice `y = 0`.

use rand::Rng;
use thiserror::Error;

use crate::field::PolyVectorField;
use crate::group::{CarnotGroup, GroupError};
use crate::lie::StratifiedAlgebra;
use crate::optimize::{multi_start, NelderMeadConfig};
use crate::scalar::{Rational, Scalar};
use crate::symcalc::{Expr, Poly, VarSpace};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuotientError {
    #[error("generator index {0} out of range")]
    UnknownGenerator(usize),
    #[error("generator {0} listed twice")]
    NotHomogeneous(usize),
    #[error("[{0},{1}] leaves the span of the subgroup generators")]
    NotASubalgebra(usize, usize),
    #[error("the subgroup is the whole group; the quotient is a point")]
    TrivialQuotient,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Basis indices spanning `𝔥`, in the original algebra numbering.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgroupSpec {
    pub generators: Vec<usize>,
}

impl SubgroupSpec {
    pub fn new(generators: &[usize]) -> Self {
        SubgroupSpec { generators: generators.to_vec() }
    }

    pub fn trivial() -> Self {
        SubgroupSpec { generators: Vec::new() }
    }

    pub fn validate(&self, alg: &StratifiedAlgebra) -> Result<(), QuotientError> {
        let n = alg.dim();
        for (pos, &g) in self.generators.iter().enumerate() {
            if g >= n {
                return Err(QuotientError::UnknownGenerator(g));
            }
            if self.generators[..pos].contains(&g) {
                return Err(QuotientError::NotHomogeneous(g));
            }
        }
        for &a in &self.generators {
            for &b in &self.generators {
                if alg.structure(a, b).iter().any(|(k, _)| !self.generators.contains(k)) {
                    return Err(QuotientError::NotASubalgebra(a, b));
                }
            }
        }
        if self.generators.len() == n {
            return Err(QuotientError::TrivialQuotient);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrbitDistanceResult {
    pub value: f64,
    pub minimizer: Vec<f64>,
    pub converged: bool,
    pub evaluations: usize,
}

#[derive(Clone, Debug)]
pub struct OrbitConfig {
    pub nelder_mead: NelderMeadConfig,
    pub agreement_rel: f64,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        OrbitConfig { nelder_mead: NelderMeadConfig::default(), agreement_rel: 1e-6 }
    }
}

#[derive(Clone, Debug)]
pub struct QuotientModel {
    group: CarnotGroup,
    space: VarSpace,
    projected: Vec<PolyVectorField>,
}

impl QuotientModel {
    /// `order`, when given, must list the generators first.
    pub fn build(
        algebra: &StratifiedAlgebra,
        spec: &SubgroupSpec,
        order: Option<&[usize]>,
        coord_names: Option<Vec<String>>,
    ) -> Result<Self, QuotientError> {
        spec.validate(algebra)?;
        let ell = spec.generators.len();
        let group = match order {
            Some(o) => {
                let mut head = o[..ell.min(o.len())].to_vec();
                head.sort_unstable();
                let mut gens = spec.generators.clone();
                gens.sort_unstable();
                if head != gens {
                    return Err(QuotientError::Group(GroupError::BadOrdering(algebra.dim())));
                }
                CarnotGroup::new(algebra, o, ell, coord_names)?
            }
            None => CarnotGroup::with_subgroup(algebra, &spec.generators, coord_names)?,
        };
        Ok(Self::from_group(group))
    }

    pub fn from_group(group: CarnotGroup) -> Self {
        let ell = group.ell();
        let gs = group.space();
        let space = VarSpace::new(gs.names[ell..].to_vec(), gs.weights[ell..].to_vec());
        let projected = group.left_frame().iter().map(|f| f.restrict(ell)).collect();
        QuotientModel { group, space, projected }
    }

    pub fn group(&self) -> &CarnotGroup {
        &self.group
    }

    pub fn ell(&self) -> usize {
        self.group.ell()
    }

    /// Dimension `m` of the slice.
    pub fn dim(&self) -> usize {
        self.space.len()
    }

    pub fn space(&self) -> &VarSpace {
        &self.space
    }

    pub fn weights(&self) -> &[u32] {
        &self.space.weights
    }

    /// Projection of every left-invariant field, in adapted order.
    pub fn projected_frame(&self) -> &[PolyVectorField] {
        &self.projected
    }

    /// Indices of projected fields that vanish identically.
    pub fn zero_projections(&self) -> Vec<usize> {
        (0..self.projected.len()).filter(|&i| self.projected[i].is_zero()).collect()
    }

    /// Indices of projected fields coming from weight-one basis vectors.
    pub fn horizontal(&self) -> Vec<usize> {
        (0..self.projected.len()).filter(|&i| self.group.weights()[i] == 1).collect()
    }

    /// Right-invariant fields of the subgroup generators.
    pub fn subgroup_right_fields(&self) -> &[PolyVectorField] {
        &self.group.right_frame()[..self.ell()]
    }

    pub fn iota<S: Scalar>(&self, p: &[S]) -> Vec<S> {
        let mut g = vec![S::zero(); self.ell()];
        g.extend_from_slice(p);
        g
    }

    pub fn project<S: Scalar>(&self, g: &[S]) -> Vec<S> {
        g[self.ell()..].to_vec()
    }

    /// `f̃ = f ∘ Π` on polynomials.
    pub fn lift_poly<S: Scalar>(&self, f: &Poly<S>) -> Poly<S> {
        let ell = self.ell();
        f.remap_vars(|i| Some(i + ell))
    }

    pub fn lift_expr(&self, f: &Expr) -> Expr {
        let ell = self.ell();
        let map: Vec<usize> = (0..self.dim()).map(|i| i + ell).collect();
        f.remap_vars(&map)
    }

    /// Restriction to `y = 0` in slice variables.
    pub fn restrict_poly<S: Scalar>(&self, p: &Poly<S>) -> Poly<S> {
        let ell = self.ell();
        p.remap_vars(|i| i.checked_sub(ell))
    }

    /// `d̂_G(ι(p), ι(q))`.
    pub fn slice_distance(&self, p: &[f64], q: &[f64]) -> f64 {
        self.group.distance(&self.iota(p), &self.iota(q))
    }

    /// `inf_y d̂_G(ι(p), exp(Σ y_i w_i)·ι(q))`. The search variable is
    /// rescaled by the slice distance so the problem is dilation invariant.
    pub fn orbit_distance(&self, p: &[f64], q: &[f64], cfg: &OrbitConfig, hints: &[Vec<f64>]) -> OrbitDistanceResult {
        let ell = self.ell();
        let s = self.slice_distance(p, q);
        if ell == 0 || s == 0.0 {
            return OrbitDistanceResult { value: s, minimizer: vec![0.0; ell], converged: true, evaluations: 1 };
        }
        let w = &self.group.weights()[..ell];
        let scale: Vec<f64> = w.iter().map(|&wi| s.powi(wi as i32)).collect();
        let gp = self.iota(p);
        let mut h: Vec<f64> = self.iota(q);
        let mut objective = |z: &[f64]| {
            for i in 0..ell {
                h[i] = scale[i] * z[i];
            }
            self.group.distance(&gp, &h) / s
        };
        let mut starts = vec![vec![0.0; ell]];
        for i in 0..ell {
            for sign in [1.0, -1.0] {
                let mut z = vec![0.0; ell];
                z[i] = sign;
                starts.push(z);
            }
        }
        for y in hints {
            starts.push(y.iter().zip(&scale).map(|(yi, si)| yi / si).collect());
        }
        let r = multi_start(&mut objective, &starts, &cfg.nelder_mead);
        let best = r.best.value;
        let converged = r.values.iter().all(|v| (v - best).abs() <= cfg.agreement_rel * best.max(1e-300));
        OrbitDistanceResult {
            value: best * s,
            minimizer: r.best.x.iter().zip(&scale).map(|(z, si)| z * si).collect(),
            converged,
            evaluations: r.evals,
        }
    }

    /// `g = (-y*, p)`: a lift of `p` with `d̂_G(g, ι(q))` equal to the orbit value.
    pub fn lift_point(&self, p: &[f64], orbit: &OrbitDistanceResult) -> Vec<f64> {
        let mut g: Vec<f64> = orbit.minimizer.iter().map(|y| -y).collect();
        g.extend_from_slice(p);
        g
    }

    /// Uniform sample of the first-kind box `|ξ_i| ≤ r^{w_i}`, left
    /// translated by `center`. Every sample lies in the `d̂_G` ball.
    pub fn sample_group_ball<R: Rng>(&self, center: &[f64], r: f64, rng: &mut R) -> Vec<f64> {
        let xi: Vec<f64> =
            self.group.weights().iter().map(|&w| rng.gen_range(-1.0..=1.0) * r.powi(w as i32)).collect();
        let u = self.group.to_second_f64(&xi);
        self.group.multiply_f64(center, &u)
    }

    /// Random rational element of `H` in second-kind coordinates.
    pub fn random_subgroup_element<R: Rng>(&self, rng: &mut R, den: i64) -> Vec<Rational> {
        let mut h: Vec<Rational> = (0..self.ell()).map(|_| crate::scalar::rat(rng.gen_range(-3 * den..=3 * den), den)).collect();
        h.extend((0..self.dim()).map(|_| Rational::from_integer(0.into())));
        h
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::RawAlgebra;
    use crate::scalar::int;

    fn grushin(ell: usize) -> QuotientModel {
        // w1..w_ell, v1, v2
        let mut names: Vec<String> = (1..=ell).map(|j| format!("w{j}")).collect();
        names.push("v1".into());
        names.push("v2".into());
        let mut weights: Vec<u32> = (1..=ell as u32).collect();
        weights.push(1);
        weights.push(ell as u32 + 1);
        let mut raw = RawAlgebra { names, weights, brackets: vec![] };
        for j in 0..ell {
            let target = if j + 1 < ell { j + 1 } else { ell + 1 };
            raw.brackets.push((ell, j, vec![(target, int(1))]));
        }
        let alg = StratifiedAlgebra::validate(&raw).unwrap();
        let mut coords: Vec<String> = (1..=ell).map(|j| format!("y{j}")).collect();
        coords.push("x1".into());
        coords.push("x2".into());
        QuotientModel::build(&alg, &SubgroupSpec::new(&(0..ell).collect::<Vec<_>>()), None, Some(coords)).unwrap()
    }

    #[test]
    fn grushin_projection() {
        let m = grushin(2);
        let sp = m.space();
        let texts: Vec<String> = m.projected_frame().iter().map(|f| f.to_text(sp)).collect();
        // Y2 projects onto the bracket [X1, Y1], not to zero
        assert_eq!(texts, vec!["(1/2)*x1^2 d/dx2", "x1 d/dx2", "d/dx1", "d/dx2"]);
        assert!(m.zero_projections().is_empty());
    }

    #[test]
    fn central_factor_projects_to_zero() {
        // Heisenberg plus a central weight-one direction e4, quotient by e4
        let raw = RawAlgebra::new(&["e1", "e2", "e3", "e4"], &[1, 1, 2, 1]).bracket("e1", "e2", &[("e3", int(1))]);
        let alg = StratifiedAlgebra::validate(&raw).unwrap();
        let m = QuotientModel::build(&alg, &SubgroupSpec::new(&[3]), None, None).unwrap();
        assert_eq!(m.zero_projections(), vec![0]);
    }

    #[test]
    fn orbit_distance_basics() {
        let m = grushin(2);
        let cfg = OrbitConfig::default();
        let p = [0.3, -0.2];
        let r = m.orbit_distance(&p, &p, &cfg, &[]);
        assert_eq!(r.value, 0.0);
        let q = [-0.1, 0.05];
        let r = m.orbit_distance(&p, &q, &cfg, &[]);
        assert!(r.value <= m.slice_distance(&p, &q));
        let g = m.lift_point(&p, &r);
        assert_eq!(m.project(&g), p.to_vec());
        assert!((m.group().distance(&g, &m.iota(&q)) - r.value).abs() < 1e-12);
        // dilation equivariance
        let lp: Vec<f64> = m.group().dilate(&m.iota(&p), &0.5)[m.ell()..].to_vec();
        let lq: Vec<f64> = m.group().dilate(&m.iota(&q), &0.5)[m.ell()..].to_vec();
        let r2 = m.orbit_distance(&lp, &lq, &cfg, &[]);
        assert!((r2.value - 0.5 * r.value).abs() <= 1e-6 * r.value);
    }

    #[test]
    fn rejects_non_subalgebra() {
        let raw = RawAlgebra::new(&["e1", "e2", "e3"], &[1, 1, 2]).bracket("e1", "e2", &[("e3", int(1))]);
        let alg = StratifiedAlgebra::validate(&raw).unwrap();
        assert_eq!(
            QuotientModel::build(&alg, &SubgroupSpec::new(&[0, 1]), None, None).unwrap_err(),
            QuotientError::NotASubalgebra(0, 1)
        );
        assert_eq!(
            QuotientModel::build(&alg, &SubgroupSpec::new(&[0, 1, 2]), None, None).unwrap_err(),
            QuotientError::TrivialQuotient
        );
    }
}
