//! Sampled checks of the mean value, Taylor remainder, sup-transfer and
//! analyticity statements, and the exact L-harmonicity check.
//!
//! Randomness comes from `rng_stream(seed, task)` with task ids fixed by the
//! loop position, so results do not depend on thread scheduling.

use std::collections::HashMap;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::PolyVectorField;
use crate::harness::operator::OperatorSpec;
use crate::harness::rng_stream;
use crate::quotient::{OrbitConfig, QuotientModel};
use crate::scalar::{int, Rational, RealScalar, Tolerance};
use crate::symcalc::{CompiledPoly, Expr, ExprError, Jet, Poly, VarSpace};
use crate::taylor::{h_invariance_check, QuotientTaylor, TaylorError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CheckError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Taylor(#[from] TaylorError),
    #[error("center has {got} coordinates, expected {expected}")]
    CenterDimension { got: usize, expected: usize },
    #[error("function cannot be evaluated at {0}")]
    Evaluation(String),
    #[error("the function depends on subgroup coordinate {0}")]
    NotInvariant(String),
    #[error("orbit optimizer did not certify a lift of {point} within radius {radius}")]
    LiftFailed { point: String, radius: f64 },
    #[error("L(P_{n}(f_{f}, {center})) = {residual}")]
    TheoremViolation { f: usize, n: u32, center: String, residual: String },
    #[error("{0}")]
    Invalid(String),
}

/// A smooth function given as an expression, with its exact polynomial form
/// when there is one.
#[derive(Clone, Debug)]
pub struct TestFunction {
    pub source: String,
    pub expr: Expr,
    pub poly: Option<Poly<Rational>>,
}

impl TestFunction {
    pub fn parse(src: &str, space: &VarSpace) -> Result<Self, ExprError> {
        let expr = Expr::parse(src, &space.names)?;
        let poly = expr.to_poly();
        Ok(TestFunction { source: src.to_string(), expr, poly })
    }

    pub fn from_poly(p: Poly<Rational>, space: &VarSpace) -> Self {
        TestFunction { source: p.to_text(space), expr: Expr::from_poly(&p), poly: Some(p) }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.expr.eval(x).unwrap_or(f64::NAN)
    }

    /// Exact jet when the expression allows it, else `None`.
    pub fn jet_exact(&self, x: &[Rational], order: u32) -> Option<Jet<Rational>> {
        self.expr.jet(x, order).ok()
    }

    pub fn jet_f64(&self, x: &[f64], order: u32) -> Result<Jet<f64>, CheckError> {
        self.expr.jet(x, order).map_err(|e| CheckError::Evaluation(e.to_string()))
    }
}

/// Taylor polynomial, exact when the jet was exact.
#[derive(Clone, Debug, PartialEq)]
pub enum TaylorPoly {
    Exact(Poly<Rational>),
    Float(Poly<f64>),
}

impl TaylorPoly {
    pub fn to_f64(&self) -> Poly<f64> {
        match self {
            TaylorPoly::Exact(p) => p.map_coeffs(|c| c.to_f64()),
            TaylorPoly::Float(p) => p.clone(),
        }
    }

    pub fn to_text(&self, space: &VarSpace) -> String {
        match self {
            TaylorPoly::Exact(p) => p.to_text(space),
            TaylorPoly::Float(p) => p.to_text(space),
        }
    }
}

/// `P_k(f, q)` through the lifted system, exact whenever the jet is exact.
pub fn taylor_on_m(
    model: &QuotientModel,
    f: &TestFunction,
    q: &[Rational],
    k: u32,
    tol: &Tolerance,
) -> Result<TaylorPoly, CheckError> {
    check_dim(model, q.len())?;
    let qt = QuotientTaylor::new(model, k);
    if let Some(j) = f.jet_exact(q, k) {
        return Ok(TaylorPoly::Exact(qt.taylor(&j, q, false, tol)?.result.polynomial));
    }
    let qf: Vec<f64> = q.iter().map(RealScalar::to_f64).collect();
    let j = f.jet_f64(&qf, k)?;
    Ok(TaylorPoly::Float(qt.taylor(&j, q, false, tol)?.result.polynomial))
}

fn check_dim(model: &QuotientModel, got: usize) -> Result<(), CheckError> {
    if got != model.dim() {
        return Err(CheckError::CenterDimension { got, expected: model.dim() });
    }
    Ok(())
}

fn point_text(p: &[Rational]) -> String {
    p.iter().map(crate::scalar::format_rational).collect::<Vec<_>>().join(",")
}

fn to_f64s(p: &[Rational]) -> Vec<f64> {
    p.iter().map(RealScalar::to_f64).collect()
}

/// Values of `X^I f` for a fixed list of words in the projected frame.
/// Symbolic for polynomial `f`, through jets otherwise.
pub struct WordEvaluator<'a> {
    frame: &'a [PolyVectorField],
    words: Vec<Vec<usize>>,
    f: &'a TestFunction,
    compiled: Option<Vec<CompiledPoly>>,
    order: u32,
}

impl<'a> WordEvaluator<'a> {
    pub fn new(frame: &'a [PolyVectorField], words: Vec<Vec<usize>>, f: &'a TestFunction) -> Self {
        let order = words.iter().map(|w| w.len() as u32).max().unwrap_or(0);
        let compiled = f.poly.as_ref().map(|p| {
            let mut memo: HashMap<Vec<usize>, Poly<Rational>> = HashMap::new();
            words.iter().map(|w| CompiledPoly::new(&symbolic_word(frame, w, p, &mut memo))).collect()
        });
        WordEvaluator { frame, words, f, compiled, order }
    }

    pub fn words(&self) -> &[Vec<usize>] {
        &self.words
    }

    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, CheckError> {
        if let Some(c) = &self.compiled {
            return Ok(c.iter().map(|p| p.eval(x)).collect());
        }
        let base = self.f.jet_f64(x, self.order)?;
        let mut memo: HashMap<Vec<usize>, Jet<f64>> = HashMap::new();
        self.words
            .iter()
            .map(|w| Ok(jet_word(self.frame, w, &base, &mut memo)?.value()))
            .collect()
    }

    /// `max_I |X^I f(x)|`.
    pub fn max_abs(&self, x: &[f64]) -> Result<f64, CheckError> {
        Ok(self.eval(x)?.into_iter().map(f64::abs).fold(0.0, f64::max))
    }
}

fn symbolic_word(
    frame: &[PolyVectorField],
    w: &[usize],
    f: &Poly<Rational>,
    memo: &mut HashMap<Vec<usize>, Poly<Rational>>,
) -> Poly<Rational> {
    if w.is_empty() {
        return f.clone();
    }
    if let Some(p) = memo.get(w) {
        return p.clone();
    }
    let inner = symbolic_word(frame, &w[1..], f, memo);
    let out = frame[w[0]].apply(&inner);
    memo.insert(w.to_vec(), out.clone());
    out
}

fn jet_word(
    frame: &[PolyVectorField],
    w: &[usize],
    base: &Jet<f64>,
    memo: &mut HashMap<Vec<usize>, Jet<f64>>,
) -> Result<Jet<f64>, CheckError> {
    if w.is_empty() {
        return Ok(base.clone());
    }
    if let Some(j) = memo.get(w) {
        return Ok(j.clone());
    }
    let inner = jet_word(frame, &w[1..], base, memo)?;
    let out = frame[w[0]].apply_to_jet(&inner).map_err(|e| CheckError::Evaluation(e.to_string()))?;
    memo.insert(w.to_vec(), out.clone());
    Ok(out)
}

/// Horizontal words of length exactly `k`.
pub fn horizontal_words(model: &QuotientModel, k: usize) -> Vec<Vec<usize>> {
    let letters = model.horizontal();
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |&b| {
                    let mut v = w.clone();
                    v.push(b);
                    v
                })
            })
            .collect();
    }
    out
}

/// Shared sampling parameters.
#[derive(Clone, Debug, Serialize)]
pub struct SamplingConfig {
    pub seed: u64,
    /// Number of dilation rays.
    pub rays: usize,
    /// Scales are `2^-j` for these `j`.
    pub scale_exponents: Vec<u32>,
    /// Points per ball when estimating a supremum.
    pub ball_samples: usize,
    /// Ball enlargement factor.
    pub b: f64,
    /// Finest scales used in the slope fit.
    pub fit_window: usize,
    #[serde(skip)]
    pub orbit: OrbitConfig,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            seed: crate::harness::DEFAULT_SEED,
            rays: 8,
            scale_exponents: (0..=8).collect(),
            ball_samples: 200,
            b: 2.0,
            fit_window: 5,
            orbit: OrbitConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Sample {
    pub ray: usize,
    pub lambda: f64,
    /// Quotient distance proxy to the center.
    pub distance: f64,
    /// `|f(p) - f(q)|` or the remainder `|f(p) - P(p)|`.
    pub value: f64,
    pub sup_factor: Option<f64>,
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RemainderReport {
    pub check: &'static str,
    pub function: String,
    pub center: String,
    pub degree: Option<u32>,
    pub polynomial: Option<String>,
    pub samples: Vec<Sample>,
    /// Slope per ray over the finest scales; `None` when the remainder vanishes on the ray.
    pub ray_slopes: Vec<Option<f64>>,
    /// Smallest per-ray slope.
    pub min_ray_slope: Option<f64>,
    /// Slope of the per-scale maxima over rays.
    pub fitted_slope: Option<f64>,
    pub threshold: Option<f64>,
    pub identically_zero: bool,
    /// Per-scale maximum of the ratio over rays, finest scale last.
    pub scale_ratios: Vec<Option<f64>>,
    pub max_ratio: Option<f64>,
    pub median_ratio: Option<f64>,
    /// Empirical constant: largest sampled ratio.
    pub estimated_constant: Option<f64>,
    pub degenerate: bool,
    pub pass: bool,
    pub config: SamplingConfig,
}

/// Direction of a ray: a random rational group element in the unit
/// first-kind box, in second-kind coordinates.
fn ray_directions(model: &QuotientModel, cfg: &SamplingConfig) -> Vec<Vec<Rational>> {
    let mut rng = rng_stream(cfg.seed, 0);
    let g = model.group();
    (0..cfg.rays)
        .map(|_| {
            let xi: Vec<Rational> = (0..g.dim()).map(|_| crate::scalar::rat(rng.gen_range(-64..=64), 64)).collect();
            g.to_second_kind(&xi)
        })
        .collect()
}

/// `Π(ι(q)·δ_λ u)`, exact.
fn ray_point(model: &QuotientModel, q: &[Rational], u: &[Rational], lambda: &Rational) -> Vec<Rational> {
    let g = model.group();
    model.project(&g.multiply(&model.iota(q), &g.dilate(u, lambda)))
}

fn scale_lambda(j: u32) -> Rational {
    Rational::new(1.into(), num_bigint::BigInt::from(1u8) << j)
}

/// Samples of the quotient ball `d̂_M(·, q) ≤ r`: projections of group-ball
/// samples around `ι(q)`. The projection maps the group ball onto the
/// quotient ball, so no rejection is needed.
pub fn sample_quotient_ball<R: Rng>(model: &QuotientModel, q: &[f64], r: f64, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let c = model.iota(q);
    (0..n).map(|_| model.project(&model.sample_group_ball(&c, r, rng))).collect()
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>() / sxx)
}

fn median(v: &mut [f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) })
}

struct RayData {
    points: Vec<Vec<Rational>>,
    distances: Vec<f64>,
}

fn ray_data(model: &QuotientModel, q: &[Rational], cfg: &SamplingConfig) -> Vec<RayData> {
    let qf = to_f64s(q);
    ray_directions(model, cfg)
        .par_iter()
        .map(|u| {
            let points: Vec<Vec<Rational>> =
                cfg.scale_exponents.iter().map(|&j| ray_point(model, q, u, &scale_lambda(j))).collect();
            let distances = points.iter().map(|p| model.orbit_distance(&to_f64s(p), &qf, &cfg.orbit, &[]).value).collect();
            RayData { points, distances }
        })
        .collect()
}

/// Sup over `ball_samples` points of the quotient ball of radius `radius`,
/// plus the extra points given.
fn ball_sup(
    model: &QuotientModel,
    eval: &WordEvaluator,
    qf: &[f64],
    radius: f64,
    extra: &[&[f64]],
    n: usize,
    seed: u64,
    task: u64,
) -> Result<f64, CheckError> {
    let mut rng = rng_stream(seed, task);
    let mut sup: f64 = 0.0;
    for x in extra {
        sup = sup.max(eval.max_abs(x)?);
    }
    for s in sample_quotient_ball(model, qf, radius, n, &mut rng) {
        sup = sup.max(eval.max_abs(&s)?);
    }
    Ok(sup)
}

fn task_id(ray: usize, scale: usize) -> u64 {
    1_000 + (ray as u64) * 100 + scale as u64
}

/// Ratios `|f(p) - f(q)| / (d̂_M(p,q) · sup_{ball(q, b d̂)} max_j |X_j f|)` along
/// shrinking rays. Pass when the per-scale maxima stay within four times
/// their median.
pub fn check_mean_value(
    model: &QuotientModel,
    f: &TestFunction,
    q: &[Rational],
    cfg: &SamplingConfig,
) -> Result<RemainderReport, CheckError> {
    check_dim(model, q.len())?;
    let qf = to_f64s(q);
    let frame = model.projected_frame();
    let words: Vec<Vec<usize>> = model.horizontal().into_iter().map(|b| vec![b]).collect();
    let eval = WordEvaluator::new(frame, words, f);
    let fq = f.eval(&qf);
    let rays = ray_data(model, q, cfg);
    let per_ray: Vec<Vec<Sample>> = rays
        .par_iter()
        .enumerate()
        .map(|(ri, ray)| {
            ray.points
                .iter()
                .zip(&ray.distances)
                .enumerate()
                .map(|(si, (p, &d))| {
                    let pf = to_f64s(p);
                    let value = (f.eval(&pf) - fq).abs();
                    let lambda = scale_lambda(cfg.scale_exponents[si]).to_f64();
                    if value == 0.0 || d == 0.0 {
                        return Ok(Sample { ray: ri, lambda, distance: d, value, sup_factor: None, ratio: Some(0.0) });
                    }
                    let sup = ball_sup(model, &eval, &qf, cfg.b * d, &[&pf, &qf], cfg.ball_samples, cfg.seed, task_id(ri, si))?;
                    let ratio = if sup > 0.0 { Some(value / (d * sup)) } else { None };
                    Ok(Sample { ray: ri, lambda, distance: d, value, sup_factor: Some(sup), ratio })
                })
                .collect::<Result<Vec<_>, CheckError>>()
        })
        .collect::<Result<Vec<_>, CheckError>>()?;
    let degenerate = per_ray.iter().flatten().any(|s| s.ratio.is_none());
    let nscales = cfg.scale_exponents.len();
    let scale_ratios: Vec<Option<f64>> = (0..nscales)
        .map(|si| per_ray.iter().filter_map(|r| r[si].ratio).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v)))))
        .collect();
    let mut defined: Vec<f64> = scale_ratios.iter().flatten().copied().collect();
    let max_ratio = defined.iter().copied().fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let median_ratio = median(&mut defined);
    let identically_zero = per_ray.iter().flatten().all(|s| s.value == 0.0);
    let pass = identically_zero
        || match (max_ratio, median_ratio) {
            (Some(mx), Some(md)) => mx <= 4.0 * md,
            _ => degenerate,
        };
    let mut samples: Vec<Sample> = per_ray.into_iter().flatten().collect();
    sort_samples(&mut samples);
    Ok(RemainderReport {
        check: "mean-value",
        function: f.source.clone(),
        center: point_text(q),
        degree: None,
        polynomial: None,
        samples,
        ray_slopes: Vec::new(),
        min_ray_slope: None,
        fitted_slope: None,
        threshold: Some(4.0),
        identically_zero,
        scale_ratios,
        max_ratio,
        median_ratio,
        estimated_constant: max_ratio,
        degenerate,
        pass,
        config: cfg.clone(),
    })
}

fn sort_samples(s: &mut [Sample]) {
    s.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then(a.ray.cmp(&b.ray)));
}

/// Options for the remainder check.
#[derive(Clone, Debug)]
pub struct RemainderOptions {
    /// Also estimate the Lagrange-form constant (costly for non-polynomial `f`).
    pub lagrange: bool,
    pub tolerance: Tolerance,
}

impl Default for RemainderOptions {
    fn default() -> Self {
        RemainderOptions { lagrange: true, tolerance: Tolerance::default() }
    }
}

/// `R(p) = |f(p) - P_k(f,q)(p)|` along shrinking rays. The fitted slope is
/// that of `ln max_rays R` against `ln max_rays d̂_M` over the finest scales.
/// Pass when it is at least `k + 1 - 0.2`, or the remainder vanishes identically.
pub fn check_taylor_remainder(
    model: &QuotientModel,
    f: &TestFunction,
    q: &[Rational],
    k: u32,
    cfg: &SamplingConfig,
    opts: &RemainderOptions,
) -> Result<RemainderReport, CheckError> {
    check_dim(model, q.len())?;
    let qf = to_f64s(q);
    let p = taylor_on_m(model, f, q, k, &opts.tolerance)?;
    let exact_remainder = match (&p, &f.poly) {
        (TaylorPoly::Exact(p), Some(fp)) => Some(fp - p),
        _ => None,
    };
    let p_f64 = p.to_f64();
    let remainder_at = |x: &[Rational]| -> f64 {
        match &exact_remainder {
            Some(r) => r.eval(x).to_f64().abs(),
            None => {
                let xf = to_f64s(x);
                (f.eval(&xf) - p_f64.eval(&xf)).abs()
            }
        }
    };
    let identically_zero_poly = exact_remainder.as_ref().is_some_and(Poly::is_zero);
    let frame = model.projected_frame();
    let lagrange = opts.lagrange && !identically_zero_poly;
    let eval = WordEvaluator::new(frame, if lagrange { horizontal_words(model, k as usize + 1) } else { Vec::new() }, f);
    let rays = ray_data(model, q, cfg);
    let radius_factor = cfg.b.powi(k as i32);
    let per_ray: Vec<Vec<Sample>> = rays
        .par_iter()
        .enumerate()
        .map(|(ri, ray)| {
            ray.points
                .iter()
                .zip(&ray.distances)
                .enumerate()
                .map(|(si, (x, &d))| {
                    let value = remainder_at(x);
                    let lambda = scale_lambda(cfg.scale_exponents[si]).to_f64();
                    let (sup_factor, ratio) = if lagrange && d > 0.0 {
                        let xf = to_f64s(x);
                        let sup = ball_sup(model, &eval, &qf, radius_factor * d, &[&xf, &qf], cfg.ball_samples, cfg.seed, task_id(ri, si))?;
                        (Some(sup), if sup > 0.0 { Some(value / (d.powi(k as i32 + 1) * sup)) } else { None })
                    } else {
                        (None, None)
                    };
                    Ok(Sample { ray: ri, lambda, distance: d, value, sup_factor, ratio })
                })
                .collect::<Result<Vec<_>, CheckError>>()
        })
        .collect::<Result<Vec<_>, CheckError>>()?;
    let window = cfg.fit_window.max(2);
    let ray_slopes: Vec<Option<f64>> = per_ray
        .iter()
        .map(|samples| {
            let mut pts: Vec<(f64, f64)> = samples.iter().map(|s| (s.distance, s.value)).collect();
            // finest scales are last
            let start = pts.len().saturating_sub(window);
            let tail = pts.split_off(start);
            loglog_slope(&tail)
        })
        .collect();
    let min_ray_slope = ray_slopes.iter().flatten().copied().fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.min(v))));
    // sup over the sampled sphere at each scale; a single ray can dip where
    // homogeneous parts of the remainder cancel
    let sphere: Vec<(f64, f64)> = (0..cfg.scale_exponents.len())
        .map(|si| {
            let d = per_ray.iter().map(|r| r[si].distance).fold(0.0, f64::max);
            let v = per_ray.iter().map(|r| r[si].value).fold(0.0, f64::max);
            (d, v)
        })
        .collect();
    let fitted_slope = loglog_slope(&sphere[sphere.len().saturating_sub(window)..]);
    let identically_zero = identically_zero_poly || per_ray.iter().flatten().all(|s| s.value == 0.0);
    let threshold = k as f64 + 1.0 - 0.2;
    let pass = identically_zero || fitted_slope.is_some_and(|s| s >= threshold);
    let estimated_constant =
        per_ray.iter().flatten().filter_map(|s| s.ratio).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
    let mut samples: Vec<Sample> = per_ray.into_iter().flatten().collect();
    sort_samples(&mut samples);
    Ok(RemainderReport {
        check: "taylor-remainder",
        function: f.source.clone(),
        center: point_text(q),
        degree: Some(k),
        polynomial: Some(p.to_text(model.space())),
        samples,
        ray_slopes,
        min_ray_slope,
        fitted_slope,
        threshold: Some(threshold),
        identically_zero,
        scale_ratios: Vec::new(),
        max_ratio: None,
        median_ratio: None,
        estimated_constant,
        degenerate: false,
        pass,
        config: cfg.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SupTransferReport {
    pub function: String,
    pub center: String,
    pub radius: f64,
    pub samples: usize,
    /// Box draws needed to collect the quotient-side samples.
    pub attempts: usize,
    /// Largest sampled `|φ|` over the quotient ball.
    pub sampled_sup_quotient: f64,
    /// Largest sampled `|Φ|` over the group ball.
    pub sampled_sup_group: f64,
    /// Sampled suprema after local maximization from the best samples.
    pub sup_quotient: f64,
    pub sup_group: f64,
    pub relative_gap: f64,
    /// Largest `d̂_G(g, ι(q)) / r` over quotient-side lifts.
    pub max_lift_radius: f64,
    /// Largest certified `d̂_M(Π(g), q) / r` over group-side samples.
    pub max_projected_radius: f64,
    /// Largest `| |φ(p)| - |Φ(g)| |` over both sides.
    pub max_value_mismatch: f64,
    pub pass: bool,
    pub seed: u64,
}

/// Starts kept for the local maximization on each side.
const POLISH_STARTS: usize = 3;

fn keep_best<T: Clone>(best: &mut Vec<(f64, T)>, v: f64, x: &T) {
    best.push((v, x.clone()));
    best.sort_by(|a, b| b.0.total_cmp(&a.0));
    best.truncate(POLISH_STARTS);
}

/// Two-sided sampled comparison of `sup |φ|` over the quotient ball and
/// `sup |Φ|` over the group ball, where `Φ = φ ∘ Π` is given on `G`.
///
/// Group side: first-kind box samples `g = ι(q)·exp(ξ)`, each certified to
/// project into the quotient ball. Quotient side: box samples with rejection
/// by orbit distance, each lifted into the group ball. Both suprema are then
/// refined by Nelder–Mead from the best samples, over the first-kind box
/// and under the orbit-distance constraint respectively.
pub fn check_sup_transfer(
    model: &QuotientModel,
    phi_g: &Expr,
    q: &[Rational],
    r: f64,
    n: usize,
    seed: u64,
    orbit: &OrbitConfig,
) -> Result<SupTransferReport, CheckError> {
    check_dim(model, q.len())?;
    let ell = model.ell();
    match phi_g.to_poly() {
        Some(p) => h_invariance_check(model, &p)?,
        None => {
            if let Some(i) = (0..ell).find(|&i| depends_on_var(phi_g, i)) {
                return Err(CheckError::NotInvariant(model.group().space().names[i].clone()));
            }
        }
    }
    let g = model.group();
    let qf = to_f64s(q);
    let gq = model.iota(&qf);
    let phi_m = |p: &[f64]| phi_g.eval(&model.iota(p)).unwrap_or(f64::NAN);
    let phi = |x: &[f64]| phi_g.eval(x).unwrap_or(f64::NAN);
    let slack = r * (1.0 + 1e-6);
    let weights = g.weights().to_vec();
    let at_xi = |xi: &[f64]| g.multiply_f64(&gq, &g.to_second_f64(xi));

    // group side: certify d̂_M(Π g, q) ≤ d̂_G(g, ι(q)) with the candidate y = -y_g
    let mut rng = rng_stream(seed, 1);
    let mut sampled_sup_group: f64 = 0.0;
    let mut max_projected: f64 = 0.0;
    let mut mismatch: f64 = 0.0;
    let mut best_g: Vec<(f64, Vec<f64>)> = Vec::new();
    for _ in 0..n {
        let xi: Vec<f64> = weights.iter().map(|&w| rng.gen_range(-1.0..=1.0) * r.powi(w as i32)).collect();
        let x = at_xi(&xi);
        let p = model.project(&x);
        let mut h = gq.clone();
        for i in 0..ell {
            h[i] = -x[i];
        }
        let bound = g.distance(&model.iota(&p), &h);
        max_projected = max_projected.max(bound / r);
        if bound > slack {
            return Err(CheckError::Invalid(format!("projected sample at distance {bound} exceeds {r}")));
        }
        let v = phi(&x).abs();
        mismatch = mismatch.max((v - phi_m(&p).abs()).abs());
        sampled_sup_group = sampled_sup_group.max(v);
        keep_best(&mut best_g, v, &xi);
    }

    // quotient side: box sampling with rejection, then a certified lift
    let half_widths = quotient_ball_box(model, q, r);
    let mut rng = rng_stream(seed, 2);
    let mut accepted: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let mut attempts = 0;
    let max_attempts = 400 * n.max(1);
    while accepted.len() < n && attempts < max_attempts {
        let batch: Vec<Vec<f64>> = (0..n)
            .map(|_| qf.iter().zip(&half_widths).map(|(c, w)| c + w * rng.gen_range(-1.0..=1.0)).collect())
            .collect();
        attempts += batch.len();
        let lifted: Vec<Option<Vec<f64>>> = batch
            .par_iter()
            .map(|p| {
                if model.slice_distance(p, &qf) <= r {
                    return Some(model.iota(p));
                }
                let o = model.orbit_distance(p, &qf, orbit, &[]);
                (o.value <= r).then(|| model.lift_point(p, &o))
            })
            .collect();
        for (p, lift) in batch.into_iter().zip(lifted) {
            if let Some(gl) = lift {
                if accepted.len() < n {
                    accepted.push((p, gl));
                }
            }
        }
    }
    if accepted.len() < n {
        return Err(CheckError::Invalid(format!("only {} of {n} quotient samples accepted", accepted.len())));
    }
    let mut sampled_sup_quotient: f64 = 0.0;
    let mut max_lift: f64 = 0.0;
    let mut best_m: Vec<(f64, Vec<f64>)> = Vec::new();
    for (p, gl) in &accepted {
        let dg = g.distance(gl, &gq);
        max_lift = max_lift.max(dg / r);
        if dg > slack {
            return Err(CheckError::LiftFailed { point: format!("{p:?}"), radius: r });
        }
        let v = phi_m(p).abs();
        mismatch = mismatch.max((v - phi(gl).abs()).abs());
        sampled_sup_quotient = sampled_sup_quotient.max(v);
        keep_best(&mut best_m, v, p);
    }

    // local refinement; group side over ξ_i = r^{w_i} sin(t_i)
    let nm = crate::optimize::NelderMeadConfig { max_evals: 3000, initial_step: 0.1, ..Default::default() };
    let mut sup_group = sampled_sup_group;
    for (_, xi) in &best_g {
        let t0: Vec<f64> =
            xi.iter().zip(&weights).map(|(x, &w)| (x / r.powi(w as i32)).clamp(-1.0, 1.0).asin()).collect();
        let mut obj = |t: &[f64]| {
            let xi: Vec<f64> = t.iter().zip(&weights).map(|(ti, &w)| r.powi(w as i32) * ti.sin()).collect();
            -phi(&at_xi(&xi)).abs()
        };
        let m = crate::optimize::nelder_mead(&mut obj, &t0, &nm);
        sup_group = sup_group.max(-m.value);
    }
    let mut sup_quotient = sampled_sup_quotient;
    let scale: Vec<f64> = half_widths.iter().map(|w| w.max(1e-300)).collect();
    let refined: Vec<f64> = best_m
        .par_iter()
        .map(|(_, p0)| {
            let z0: Vec<f64> = p0.iter().zip(&qf).zip(&scale).map(|((p, c), s)| (p - c) / s).collect();
            let mut obj = |z: &[f64]| {
                let p: Vec<f64> = z.iter().zip(&qf).zip(&scale).map(|((zi, c), s)| c + zi * s).collect();
                let inside = model.slice_distance(&p, &qf) <= r || model.orbit_distance(&p, &qf, orbit, &[]).value <= r;
                if inside {
                    -phi_m(&p).abs()
                } else {
                    f64::INFINITY
                }
            };
            let nm = crate::optimize::NelderMeadConfig { max_evals: 600, initial_step: 0.02, ..Default::default() };
            -crate::optimize::nelder_mead(&mut obj, &z0, &nm).value
        })
        .collect();
    for v in refined {
        sup_quotient = sup_quotient.max(v);
    }

    let scale = sup_quotient.max(sup_group);
    let relative_gap = if scale == 0.0 { 0.0 } else { (sup_quotient - sup_group).abs() / scale };
    let value_ok = mismatch <= 1e-9 * scale.max(1.0);
    Ok(SupTransferReport {
        function: phi_g.display(g.space()).to_string(),
        center: point_text(q),
        radius: r,
        samples: n,
        attempts,
        sampled_sup_quotient,
        sampled_sup_group,
        sup_quotient,
        sup_group,
        relative_gap,
        max_lift_radius: max_lift,
        max_projected_radius: max_projected,
        max_value_mismatch: mismatch,
        pass: relative_gap <= 0.05 && value_ok,
        seed,
    })
}

fn depends_on_var(e: &Expr, i: usize) -> bool {
    let n = e.max_var().map_or(0, |m| m + 1);
    if i >= n {
        return false;
    }
    // rename variable i to a fresh index and compare
    let map: Vec<usize> = (0..n).map(|j| if j == i { n } else { j }).collect();
    e.remap_vars(&map) != *e
}

/// Half-widths of a coordinate box containing the quotient ball of radius
/// `r` around `q`: every point is `Π(ι(q)·u)` with `u` in the first-kind box,
/// and each coordinate is bounded term by term.
pub fn quotient_ball_box(model: &QuotientModel, q: &[Rational], r: f64) -> Vec<f64> {
    let g = model.group();
    let ell = model.ell();
    let left = g.left_translation_map(&model.iota(q));
    let to_second = g.to_second_polys();
    left[ell..]
        .iter()
        .zip(q)
        .map(|(comp, qc)| {
            let p = comp.substitute(to_second);
            let mut w = 0.0;
            for (m, c) in p.terms() {
                if m.is_one() {
                    debug_assert_eq!(c, qc);
                    continue;
                }
                w += c.to_f64().abs() * r.powi(m.wdeg(g.weights()) as i32);
            }
            w
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub function: String,
    pub center: String,
    pub rho: f64,
    pub samples: usize,
    /// `S_k` for `k = 1..=k_max`.
    pub sup_by_order: Vec<f64>,
    pub k_grid: Vec<f64>,
    /// Smallest grid value with `S_k ≤ K^k k!` for all `k`.
    pub k_found: Option<f64>,
    pub interpretation: &'static str,
    pub seed: u64,
}

/// Estimates `S_k = max |X_hor^I f|` over horizontal words of length `k` and
/// sampled points of the ball `d̂_M(·, p) < ρ`.
pub fn probe_analyticity(
    model: &QuotientModel,
    f: &TestFunction,
    p: &[Rational],
    rho: f64,
    k_grid: &[f64],
    k_max: u32,
    n: usize,
    seed: u64,
) -> Result<ProbeReport, CheckError> {
    check_dim(model, p.len())?;
    if k_max > 6 {
        return Err(CheckError::Invalid(format!("k_max {k_max} exceeds 6")));
    }
    let pf = to_f64s(p);
    let mut rng = rng_stream(seed, 3);
    let mut points = vec![pf.clone()];
    points.extend(sample_quotient_ball(model, &pf, rho, n, &mut rng));
    let frame = model.projected_frame();
    let all_words: Vec<Vec<usize>> = (1..=k_max as usize).flat_map(|k| horizontal_words(model, k)).collect();
    let eval = WordEvaluator::new(frame, all_words.clone(), f);
    let values: Vec<Vec<f64>> = points.par_iter().map(|x| eval.eval(x)).collect::<Result<_, _>>()?;
    let mut sup_by_order = vec![0.0f64; k_max as usize];
    for vals in &values {
        for (w, v) in all_words.iter().zip(vals) {
            let s = &mut sup_by_order[w.len() - 1];
            *s = s.max(v.abs());
        }
    }
    let mut grid = k_grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let k_found = grid.iter().copied().find(|&kk| {
        sup_by_order.iter().enumerate().all(|(i, &s)| {
            let k = i as i32 + 1;
            let fact: f64 = (1..=k).map(f64::from).product();
            s <= kk.powi(k) * fact
        })
    });
    Ok(ProbeReport {
        function: f.source.clone(),
        center: point_text(p),
        rho,
        samples: points.len(),
        sup_by_order,
        k_grid: grid,
        k_found,
        interpretation: "for every k and every horizontal word I of length k",
        seed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HarmonicReport {
    pub operator: String,
    pub sigma: u32,
    pub wdeg_max: u32,
    pub n_max: u32,
    pub kernel: Vec<String>,
    pub centers: Vec<String>,
    pub checks: usize,
    pub pass: bool,
}

/// Exact check that `L(P_n(f, p)) = 0` for a basis of polynomial solutions
/// of `Lf = 0` of weighted degree `≤ wdeg_max`.
pub fn check_l_harmonicity(
    model: &QuotientModel,
    op: &OperatorSpec,
    n_max: u32,
    wdeg_max: u32,
    centers: &[Vec<Rational>],
) -> Result<HarmonicReport, CheckError> {
    for c in centers {
        check_dim(model, c.len())?;
    }
    let kernel = op.kernel(model, wdeg_max);
    let frame = model.projected_frame();
    let tol = Tolerance::default();
    let systems: Vec<QuotientTaylor> = (1..=n_max).map(|n| QuotientTaylor::new(model, n)).collect();
    let tasks: Vec<(usize, usize, usize)> = (0..kernel.len())
        .flat_map(|fi| (0..systems.len()).flat_map(move |ni| (0..centers.len()).map(move |ci| (fi, ni, ci))))
        .collect();
    let results: Vec<Result<(), CheckError>> = tasks
        .par_iter()
        .map(|&(fi, ni, ci)| {
            let f = &kernel[fi];
            let c = &centers[ci];
            let n = ni as u32 + 1;
            let jet = Jet::from_poly(f, c.clone(), n);
            let p = systems[ni].taylor(&jet, c, false, &tol)?.result.polynomial;
            let residual = op.apply(frame, &p);
            if residual.is_zero() {
                Ok(())
            } else {
                Err(CheckError::TheoremViolation {
                    f: fi,
                    n,
                    center: point_text(c),
                    residual: residual.to_text(model.space()),
                })
            }
        })
        .collect();
    for r in results {
        r?;
    }
    Ok(HarmonicReport {
        operator: op.to_text(),
        sigma: op.sigma,
        wdeg_max,
        n_max,
        kernel: kernel.iter().map(|p| p.to_text(model.space())).collect(),
        centers: centers.iter().map(|c| point_text(c)).collect(),
        checks: tasks.len(),
        pass: true,
    })
}

/// Zero point of the quotient.
pub fn origin(model: &QuotientModel) -> Vec<Rational> {
    vec![int(0); model.dim()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::catalog::lookup;

    fn quick() -> SamplingConfig {
        SamplingConfig { rays: 3, ball_samples: 20, ..SamplingConfig::default() }
    }

    #[test]
    fn slope_of_exact_power() {
        let pts: Vec<(f64, f64)> = (0..6).map(|j| (0.5f64.powi(j), 3.0 * 0.5f64.powi(4 * j))).collect();
        assert!((loglog_slope(&pts).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn grushin_remainder_of_x2() {
        let m = lookup("filiform1").unwrap().build();
        let f = TestFunction::parse("x2", m.space()).unwrap();
        // x2 has weight 2 here; at k = 1 the remainder is x2 itself
        let r = check_taylor_remainder(&m, &f, &origin(&m), 1, &quick(), &RemainderOptions::default()).unwrap();
        assert!(r.pass);
        assert!((r.fitted_slope.unwrap() - 2.0).abs() < 0.05, "{:?}", r.fitted_slope);
        let r = check_taylor_remainder(&m, &f, &origin(&m), 2, &quick(), &RemainderOptions::default()).unwrap();
        assert!(r.identically_zero && r.pass);
    }

    #[test]
    fn mean_value_on_constant_and_linear() {
        let m = lookup("filiform1").unwrap().build();
        let c = TestFunction::parse("3", m.space()).unwrap();
        let r = check_mean_value(&m, &c, &origin(&m), &quick()).unwrap();
        assert!(r.pass && r.identically_zero);
        let x1 = TestFunction::parse("x1", m.space()).unwrap();
        let r = check_mean_value(&m, &x1, &origin(&m), &quick()).unwrap();
        assert!(r.pass);
        for s in &r.samples {
            assert_eq!(s.sup_factor, Some(1.0));
            assert!(s.ratio.unwrap() <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn sup_transfer_trivial_subgroup_and_constant() {
        let m = lookup("heisenberg").unwrap().build();
        let phi = Expr::parse("x1^2", &m.group().space().names).unwrap();
        let r = check_sup_transfer(&m, &phi, &origin(&m), 1.0, 400, 42, &OrbitConfig::default()).unwrap();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.max_value_mismatch, 0.0);
        let m = lookup("filiform1").unwrap().build();
        let one = Expr::parse("2", &m.group().space().names).unwrap();
        let r = check_sup_transfer(&m, &one, &origin(&m), 1.0, 50, 42, &OrbitConfig::default()).unwrap();
        assert_eq!((r.sup_group, r.sup_quotient), (2.0, 2.0));
        let y = Expr::parse("y1", &m.group().space().names).unwrap();
        assert!(check_sup_transfer(&m, &y, &origin(&m), 1.0, 5, 42, &OrbitConfig::default()).is_err());
    }

    #[test]
    fn probe_polynomial_has_finite_k() {
        let m = lookup("filiform1").unwrap().build();
        let f = TestFunction::parse("x1^2 + x2", m.space()).unwrap();
        let r = probe_analyticity(&m, &f, &origin(&m), 1.0, &[1.0, 2.0, 4.0, 8.0], 4, 20, 42).unwrap();
        assert!(r.k_found.is_some());
        assert_eq!(r.sup_by_order[3], 0.0);
    }

    #[test]
    fn harmonic_heisenberg_small() {
        let m = lookup("heisenberg").unwrap().build();
        let op = OperatorSpec::parse("sublaplacian", &m).unwrap();
        let centers = vec![origin(&m), vec![int(1), int(0), int(0)]];
        let r = check_l_harmonicity(&m, &op, 2, 3, &centers).unwrap();
        assert!(r.pass && !r.kernel.is_empty());
    }
}
