//! `carnot`: command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 on input
//! errors.

use std::fmt::Write as _;
use std::process::ExitCode;

use carnot::harness::catalog::{catalog, lookup, parse_point, CatalogEntry};
use carnot::harness::checks::{
    check_l_harmonicity, check_mean_value, check_sup_transfer, check_taylor_remainder, origin, probe_analyticity,
    CheckError, RemainderOptions, RemainderReport, SamplingConfig, TestFunction,
};
use carnot::harness::groupfile::{GroupDefinition, GroupFileError};
use carnot::lie::AlgebraError;
use carnot::harness::operator::OperatorSpec;
use carnot::harness::report::{poly_json, poly_json_f64, Meta, Report};
use carnot::quotient::{OrbitConfig, QuotientModel};
use carnot::taylor::{CrossCheck, QuotientTaylor, TaylorError, TaylorResult};
use carnot::{Expr, Jet, Poly, Rational, RealScalar, Scalar, Tolerance};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "carnot", version, about = "Carnot groups, homogeneous quotients and intrinsic Taylor polynomials")]
struct Cli {
    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = carnot::harness::DEFAULT_SEED)]
    seed: u64,
    /// Canonical JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Relative tolerance for floating-point solves.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct GroupArgs {
    /// Catalog group name.
    #[arg(long, conflicts_with = "file")]
    group: Option<String>,
    /// Group-definition file.
    #[arg(long)]
    file: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SpaceArg {
    #[value(name = "G")]
    G,
    #[value(name = "M")]
    M,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the built-in groups.
    Catalog,
    /// Parse and validate a group-definition file.
    Validate { file: String },
    /// Print the left-invariant frame on G or its projection on M.
    Fields {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, value_enum, default_value = "M")]
        space: SpaceArg,
        /// Print right-invariant fields instead (G only).
        #[arg(long)]
        right: bool,
    },
    /// Intrinsic Taylor polynomial of f at a center.
    Taylor {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        degree: u32,
        #[arg(long, value_enum, default_value = "M")]
        space: SpaceArg,
        /// Also solve the intrinsic system on M and compare.
        #[arg(long)]
        cross_check: bool,
    },
    /// Taylor remainder rate along shrinking rays.
    Remainder {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        degree: u32,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Skip the Lagrange-form constant estimate.
        #[arg(long)]
        no_lagrange: bool,
    },
    /// Mean value ratio boundedness along shrinking rays.
    Mvt {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[command(flatten)]
        sampling: SamplingArgs,
    },
    /// Exact check that Taylor polynomials of L-harmonic polynomials are L-harmonic.
    Harmonic {
        #[command(flatten)]
        group: GroupArgs,
        /// Sum of products of frame fields, e.g. "X1^2 + Y1^2", or `sublaplacian`.
        #[arg(long)]
        operator: String,
        /// Highest Taylor degree checked.
        #[arg(long)]
        nmax: u32,
        /// Kernel of L is computed on polynomials of weighted degree up to this.
        #[arg(long)]
        wdeg: u32,
        /// Semicolon-separated centers; defaults to the catalog centers.
        #[arg(long, allow_hyphen_values = true)]
        centers: Option<String>,
    },
    /// Derivative growth probe.
    Probe {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value = "1,2,4,8")]
        grid: String,
    },
    /// Two-sided sampled supremum comparison over quotient and group balls.
    Suptransfer {
        #[command(flatten)]
        group: GroupArgs,
        /// Function on G, in group coordinates.
        #[arg(long, conflicts_with = "f")]
        phi: Option<String>,
        /// Function on M, lifted to G.
        #[arg(long)]
        f: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 500)]
        samples: usize,
    },
}

#[derive(Args, Debug, Clone)]
struct SamplingArgs {
    #[arg(long, default_value_t = 8)]
    rays: usize,
    #[arg(long, default_value_t = 200)]
    ball_samples: usize,
    /// Finest scale is 2^-max_scale.
    #[arg(long, default_value_t = 8)]
    max_scale: u32,
    #[arg(long, default_value_t = 2.0)]
    b: f64,
}

enum Failure {
    Input(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

struct Outcome {
    text: String,
    inputs: Value,
    results: Value,
    pass: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let name = command_name(&cli.command);
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                let report = Report {
                    command: name.to_string(),
                    inputs: out.inputs,
                    results: out.results,
                    pass: out.pass,
                    meta: Meta::new(cli.seed, cli.tolerance),
                };
                emit(&format!("{}\n", report.to_json()));
            } else if out.text.ends_with('\n') {
                emit(&out.text);
            } else {
                emit(&format!("{}\n", out.text));
            }
            ExitCode::from(if out.pass { 0 } else { 1 })
        }
        Err(Failure::Input(msg)) => {
            if cli.json {
                let v = json!({ "command": name, "error": msg, "pass": false });
                emit(&format!("{}\n", serde_json::to_string_pretty(&v).unwrap_or_default()));
            } else {
                eprintln!("error: {msg}");
            }
            ExitCode::from(2)
        }
    }
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(s: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(s.as_bytes()).and_then(|_| out.flush());
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Catalog => "catalog",
        Command::Validate { .. } => "validate",
        Command::Fields { .. } => "fields",
        Command::Taylor { .. } => "taylor",
        Command::Remainder { .. } => "remainder",
        Command::Mvt { .. } => "mvt",
        Command::Harmonic { .. } => "harmonic",
        Command::Probe { .. } => "probe",
        Command::Suptransfer { .. } => "suptransfer",
    }
}

struct Loaded {
    model: QuotientModel,
    entry: Option<&'static CatalogEntry>,
    label: String,
}

fn load(g: &GroupArgs) -> Result<Loaded, Failure> {
    match (&g.group, &g.file) {
        (Some(name), _) => {
            let entry = lookup(name).ok_or_else(|| Failure::Input(format!("unknown group `{name}`")))?;
            Ok(Loaded { model: entry.build(), entry: Some(entry), label: name.clone() })
        }
        (None, Some(path)) => {
            let src = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?;
            let def = GroupDefinition::parse(&src)?;
            Ok(Loaded { model: def.build()?, entry: None, label: path.clone() })
        }
        (None, None) => Err(Failure::Input("one of --group or --file is required".into())),
    }
}

fn center(model: &QuotientModel, src: &str) -> Result<Vec<Rational>, Failure> {
    let c = parse_point(src).ok_or_else(|| Failure::Input(format!("cannot parse center `{src}`")))?;
    if c.len() != model.dim() {
        return Err(Failure::Input(format!("center has {} coordinates, expected {}", c.len(), model.dim())));
    }
    Ok(c)
}

fn function(model: &QuotientModel, src: &str) -> Result<TestFunction, Failure> {
    Ok(TestFunction::parse(src, model.space())?)
}

fn sampling(cli: &Cli, s: &SamplingArgs) -> SamplingConfig {
    SamplingConfig {
        seed: cli.seed,
        rays: s.rays,
        scale_exponents: (0..=s.max_scale).collect(),
        ball_samples: s.ball_samples,
        b: s.b,
        ..SamplingConfig::default()
    }
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    let tol = Tolerance::with_rel(cli.tolerance);
    match &cli.command {
        Command::Catalog => Ok(run_catalog()),
        Command::Validate { file } => run_validate(file),
        Command::Fields { group, space, right } => run_fields(group, *space, *right),
        Command::Taylor { group, f, center: c, degree, space, cross_check } => {
            run_taylor(group, f, c, *degree, *space, *cross_check, &tol)
        }
        Command::Remainder { group, f, center: c, degree, sampling: s, no_lagrange } => {
            let l = load(group)?;
            let f = function(&l.model, f)?;
            let q = center(&l.model, c)?;
            let cfg = sampling(cli, s);
            let opts = RemainderOptions { lagrange: !no_lagrange, tolerance: tol };
            let r = check_taylor_remainder(&l.model, &f, &q, *degree, &cfg, &opts).map_err(check_failure)?;
            Ok(remainder_outcome(&l, r, json!({ "degree": degree })))
        }
        Command::Mvt { group, f, center: c, sampling: s } => {
            let l = load(group)?;
            let f = function(&l.model, f)?;
            let q = center(&l.model, c)?;
            let r = check_mean_value(&l.model, &f, &q, &sampling(cli, s)).map_err(check_failure)?;
            Ok(remainder_outcome(&l, r, json!({})))
        }
        Command::Harmonic { group, operator, nmax, wdeg, centers } => run_harmonic(group, operator, *nmax, *wdeg, centers),
        Command::Probe { group, f, center: c, rho, kmax, samples, grid } => {
            let l = load(group)?;
            let f = function(&l.model, f)?;
            let p = center(&l.model, c)?;
            let grid: Vec<f64> = grid
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::Input(format!("bad grid value `{s}`"))))
                .collect::<Result<_, _>>()?;
            let r = probe_analyticity(&l.model, &f, &p, *rho, &grid, *kmax, *samples, cli.seed).map_err(check_failure)?;
            let mut text = format!("group: {}\nf = {}\ncenter: {}\nrho: {}\nsamples: {}\n", l.label, r.function, r.center, r.rho, r.samples);
            for (i, s) in r.sup_by_order.iter().enumerate() {
                let _ = writeln!(text, "S_{} = {:.6e}", i + 1, s);
            }
            let _ = writeln!(text, "K = {}", r.k_found.map_or("none found".to_string(), |k| k.to_string()));
            let _ = writeln!(text, "interpretation: {}", r.interpretation);
            Ok(Outcome {
                text,
                inputs: json!({ "group": l.label, "f": f.source, "center": c, "rho": rho, "kmax": kmax, "samples": samples, "grid": grid }),
                results: serde_json::to_value(&r)?,
                pass: true,
            })
        }
        Command::Suptransfer { group, phi, f, center: c, radius, samples } => {
            let l = load(group)?;
            let q = center(&l.model, c)?;
            let names = &l.model.group().space().names;
            let phi_g = match (phi, f) {
                (Some(p), _) => Expr::parse(p, names)?,
                (None, Some(f)) => l.model.lift_expr(&Expr::parse(f, &l.model.space().names)?),
                (None, None) => return Err(Failure::Input("one of --phi or --f is required".into())),
            };
            let r = check_sup_transfer(&l.model, &phi_g, &q, *radius, *samples, cli.seed, &OrbitConfig::default())
                .map_err(check_failure)?;
            let text = format!(
                "group: {}\nPhi = {}\ncenter: {}\nradius: {}\nsamples: {} (quotient side drew {})\nsampled sup over quotient ball: {:.9}\nsampled sup over group ball: {:.9}\nrefined sup over quotient ball: {:.9}\nrefined sup over group ball: {:.9}\nrelative gap: {:.3e}\nlargest lift radius / r: {:.9}\nlargest projected radius / r: {:.9}\nvalue mismatch: {:.3e}\nresult: {}\n",
                l.label,
                r.function,
                r.center,
                r.radius,
                r.samples,
                r.attempts,
                r.sampled_sup_quotient,
                r.sampled_sup_group,
                r.sup_quotient,
                r.sup_group,
                r.relative_gap,
                r.max_lift_radius,
                r.max_projected_radius,
                r.max_value_mismatch,
                verdict(r.pass)
            );
            Ok(Outcome {
                text,
                inputs: json!({ "group": l.label, "phi": r.function, "center": c, "radius": radius, "samples": samples }),
                pass: r.pass,
                results: serde_json::to_value(&r)?,
            })
        }
    }
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

/// Errors that stop a sampled check before it produces a report; exit code 2.
fn check_failure(e: CheckError) -> Failure {
    Failure::Input(e.to_string())
}

fn run_catalog() -> Outcome {
    let mut text = String::new();
    let mut entries = Vec::new();
    for e in catalog() {
        let m = e.build();
        let _ = writeln!(text, "{:<14} dim G = {}, dim M = {}, step {}: {}", e.name, m.group().dim(), m.dim(), m.group().algebra().step(), e.summary);
        entries.push(json!({
            "name": e.name,
            "summary": e.summary,
            "dim_g": m.group().dim(),
            "dim_m": m.dim(),
            "step": m.group().algebra().step(),
            "coordinates": m.group().space().names,
            "weights": m.group().weights(),
            "definition": e.definition().to_text(),
            "test_functions": e.test_functions,
            "centers": e.centers,
        }));
    }
    Outcome { text, inputs: json!({}), results: json!({ "groups": entries }), pass: true }
}

/// Algebra errors with basis names in place of indices.
fn named_error(def: &GroupDefinition, e: GroupFileError) -> String {
    let n = |i: usize| def.raw.names.get(i).cloned().unwrap_or_else(|| i.to_string());
    match e {
        GroupFileError::Algebra(AlgebraError::JacobiViolation { i, j, k, l }) => {
            format!("JacobiViolation: Jacobi identity fails for ({}, {}, {}) in the {} component", n(i), n(j), n(k), n(l))
        }
        GroupFileError::Algebra(AlgebraError::GradingViolation { i, j, k }) => {
            format!("GradingViolation: [{}, {}] has a component on {} of the wrong weight", n(i), n(j), n(k))
        }
        GroupFileError::Algebra(AlgebraError::ConflictingBracket(i, j)) => {
            format!("ConflictingBracket: [{}, {}] given twice with conflicting values", n(i), n(j))
        }
        other => other.to_string(),
    }
}

fn run_validate(file: &str) -> Result<Outcome, Failure> {
    let src = std::fs::read_to_string(file).map_err(|e| Failure::Input(format!("{file}: {e}")))?;
    let def = GroupDefinition::parse(&src)?;
    let m = def.build().map_err(|e| Failure::Input(named_error(&def, e)))?;
    let g = m.group();
    let text = format!(
        "valid: dim G = {}, step {}, subgroup dimension {}, dim M = {}\ncoordinates: {}\nweights: {:?}\n",
        g.dim(),
        g.algebra().step(),
        m.ell(),
        m.dim(),
        g.space().names.join(" "),
        g.weights()
    );
    Ok(Outcome {
        text,
        inputs: json!({ "file": file }),
        results: json!({
            "dim_g": g.dim(), "step": g.algebra().step(), "ell": m.ell(), "dim_m": m.dim(),
            "coordinates": g.space().names, "weights": g.weights(), "canonical": def.to_text(),
        }),
        pass: true,
    })
}

fn run_fields(group: &GroupArgs, space: SpaceArg, right: bool) -> Result<Outcome, Failure> {
    let l = load(group)?;
    let g = l.model.group();
    let (fields, sp, label) = match (space, right) {
        (SpaceArg::G, false) => (g.left_frame(), g.space(), "left-invariant"),
        (SpaceArg::G, true) => (g.right_frame(), g.space(), "right-invariant"),
        (SpaceArg::M, false) => (l.model.projected_frame(), l.model.space(), "projected"),
        (SpaceArg::M, true) => return Err(Failure::Input("--right applies to --space G only".into())),
    };
    let mut text = String::new();
    let mut list = Vec::new();
    for f in fields {
        let _ = writeln!(text, "{}", f.display_line(sp));
        list.push(json!({ "name": f.name, "text": f.to_text(sp) }));
    }
    Ok(Outcome {
        text,
        inputs: json!({ "group": l.label, "space": format!("{space:?}"), "right": right }),
        results: json!({ "kind": label, "coordinates": sp.names, "weights": sp.weights, "fields": list }),
        pass: true,
    })
}

fn audit<S>(r: &TaylorResult<S>) -> Value {
    json!({ "constraints": r.constraint_count, "unknowns": r.unknown_count, "rank": r.rank })
}

fn cross_text(c: &CrossCheck) -> (String, bool) {
    match c {
        CrossCheck::Agrees { rank, constraints } => (format!("agrees (rank {rank}, {constraints} constraints)"), true),
        CrossCheck::Disagrees { intrinsic } => (format!("DISAGREES: intrinsic solve gave {intrinsic}"), false),
        CrossCheck::RankDeficient { rank, unknowns } => (format!("intrinsic system rank deficient ({rank} of {unknowns})"), true),
        CrossCheck::Inconsistent { row } => (format!("intrinsic system inconsistent at row {row}"), true),
    }
}

trait PolyOut {
    fn text(&self, sp: &carnot::VarSpace) -> String;
    fn json(&self, sp: &carnot::VarSpace) -> Value;
}

impl PolyOut for Poly<Rational> {
    fn text(&self, sp: &carnot::VarSpace) -> String {
        self.to_text(sp)
    }
    fn json(&self, sp: &carnot::VarSpace) -> Value {
        poly_json(self, sp)
    }
}

impl PolyOut for Poly<f64> {
    fn text(&self, sp: &carnot::VarSpace) -> String {
        self.to_text(sp)
    }
    fn json(&self, sp: &carnot::VarSpace) -> Value {
        poly_json_f64(self, sp)
    }
}

fn run_taylor(
    group: &GroupArgs,
    f: &str,
    c: &str,
    degree: u32,
    space: SpaceArg,
    cross_check: bool,
    tol: &Tolerance,
) -> Result<Outcome, Failure> {
    let l = load(group)?;
    let model = &l.model;
    let inputs = json!({ "group": l.label, "f": f, "center": c, "degree": degree, "space": format!("{space:?}"), "cross_check": cross_check });
    match space {
        SpaceArg::M => {
            let func = function(model, f)?;
            let q = center(model, c)?;
            let qt = QuotientTaylor::new(model, degree);
            match func.jet_exact(&q, degree) {
                Some(j) => taylor_m_outcome(model, &qt, &j, &q, cross_check, tol, inputs, true),
                None => {
                    let qf: Vec<f64> = q.iter().map(RealScalar::to_f64).collect();
                    let j = func.jet_f64(&qf, degree).map_err(check_failure)?;
                    taylor_m_outcome(model, &qt, &j, &q, cross_check, tol, inputs, false)
                }
            }
        }
        SpaceArg::G => {
            let g = model.group();
            let e = Expr::parse(f, &g.space().names)?;
            let parsed = parse_point(c).ok_or_else(|| Failure::Input(format!("cannot parse center `{c}`")))?;
            if parsed.len() != g.dim() {
                return Err(Failure::Input(format!("center has {} coordinates, expected {}", parsed.len(), g.dim())));
            }
            let gt = carnot::taylor::GroupTaylor::new(g, degree);
            let (text, results) = match e.jet(&parsed, degree) {
                Ok(j) => taylor_g_text(g.space(), &gt.taylor_at(&j, &parsed, tol)?),
                Err(_) => {
                    let cf: Vec<f64> = parsed.iter().map(RealScalar::to_f64).collect();
                    let j: Jet<f64> = e.jet(&cf, degree)?;
                    taylor_g_text(g.space(), &gt.taylor_at(&j, &parsed, tol)?)
                }
            };
            Ok(Outcome { text, inputs, results, pass: true })
        }
    }
}

fn taylor_g_text<S: Scalar>(sp: &carnot::VarSpace, r: &TaylorResult<S>) -> (String, Value)
where
    Poly<S>: PolyOut,
{
    let text = format!(
        "P = {}\nconstraints: {}, unknowns: {}, rank: {}\n",
        r.polynomial.text(sp),
        r.constraint_count,
        r.unknown_count,
        r.rank
    );
    (text, json!({ "polynomial": r.polynomial.json(sp), "text": r.polynomial.text(sp), "audit": audit(r) }))
}

#[allow(clippy::too_many_arguments)]
fn taylor_m_outcome<S: Scalar>(
    model: &QuotientModel,
    qt: &QuotientTaylor,
    jet: &Jet<S>,
    q: &[Rational],
    cross_check: bool,
    tol: &Tolerance,
    inputs: Value,
    exact: bool,
) -> Result<Outcome, Failure>
where
    Poly<S>: PolyOut,
{
    let sp = model.space();
    let gsp = model.group().space();
    match qt.taylor(jet, q, cross_check, tol) {
        Ok(r) => {
            let mut text = format!("P = {}\n", r.result.polynomial.text(sp));
            let _ = writeln!(text, "lifted = {}", r.lifted.polynomial.text(gsp));
            let _ = writeln!(
                text,
                "audit: degree {}, {} constraints, {} unknowns, rank {}, {} arithmetic, lift independent of {}",
                r.result.degree,
                r.result.constraint_count,
                r.result.unknown_count,
                r.result.rank,
                if exact { "exact" } else { "binary64" },
                if model.ell() == 0 { "nothing (trivial subgroup)".to_string() } else { gsp.names[..model.ell()].join(", ") }
            );
            let mut pass = true;
            let cross = r.cross_check.as_ref().map(|c| {
                let (t, ok) = cross_text(c);
                pass &= ok;
                let _ = writeln!(text, "cross-check: {t}");
                t
            });
            Ok(Outcome {
                text,
                inputs,
                results: json!({
                    "polynomial": r.result.polynomial.json(sp),
                    "text": r.result.polynomial.text(sp),
                    "lifted": r.lifted.polynomial.json(gsp),
                    "lifted_text": r.lifted.polynomial.text(gsp),
                    "audit": audit(&r.result),
                    "exact": exact,
                    "cross_check": cross,
                }),
                pass,
            })
        }
        Err(TaylorError::LiftNotInvariant(i)) => {
            let text = format!(
                "lifted Taylor polynomial depends on {}: the center's slice point does not normalize the subgroup\n",
                gsp.names[i]
            );
            Ok(Outcome { text, inputs, results: json!({ "error": "LiftNotInvariant", "coordinate": gsp.names[i] }), pass: false })
        }
        Err(e) => Err(e.into()),
    }
}

fn remainder_outcome(l: &Loaded, r: RemainderReport, extra: Value) -> Outcome {
    let mut text = format!("group: {}\ncheck: {}\nf = {}\ncenter: {}\n", l.label, r.check, r.function, r.center);
    if let Some(p) = &r.polynomial {
        let _ = writeln!(text, "P = {p}");
    }
    let _ = writeln!(text, "{:>4} {:>12} {:>14} {:>14} {:>14}", "ray", "lambda", "distance", "value", "ratio");
    for s in &r.samples {
        let _ = writeln!(
            text,
            "{:>4} {:>12.6e} {:>14.6e} {:>14.6e} {:>14}",
            s.ray,
            s.lambda,
            s.distance,
            s.value,
            s.ratio.map_or("-".to_string(), |v| format!("{v:.6e}"))
        );
    }
    if r.check == "taylor-remainder" {
        let slopes: Vec<String> = r.ray_slopes.iter().map(|s| s.map_or("-".into(), |v| format!("{v:.4}"))).collect();
        let _ = writeln!(
            text,
            "ray slopes: {} (min {})",
            slopes.join(" "),
            r.min_ray_slope.map_or("-".into(), |v| format!("{v:.4}"))
        );
        let _ = writeln!(
            text,
            "fitted slope: {} (threshold {:.1}){}",
            r.fitted_slope.map_or("-".into(), |v| format!("{v:.4}")),
            r.threshold.unwrap_or(0.0),
            if r.identically_zero { ", remainder identically zero" } else { "" }
        );
        if let Some(c) = r.estimated_constant {
            let _ = writeln!(text, "Lagrange constant estimate: {c:.6e}");
        }
    } else {
        let ratios: Vec<String> = r.scale_ratios.iter().map(|s| s.map_or("-".into(), |v| format!("{v:.4}"))).collect();
        let _ = writeln!(text, "per-scale max ratio: {}", ratios.join(" "));
        let _ = writeln!(
            text,
            "max {} median {}{}",
            r.max_ratio.map_or("-".into(), |v| format!("{v:.6}")),
            r.median_ratio.map_or("-".into(), |v| format!("{v:.6}")),
            if r.degenerate { " (degenerate samples present)" } else { "" }
        );
    }
    let _ = writeln!(text, "result: {}", verdict(r.pass));
    let mut inputs = json!({ "group": l.label, "f": r.function, "center": r.center });
    if let (Value::Object(a), Value::Object(b)) = (&mut inputs, extra) {
        a.extend(b);
    }
    let pass = r.pass;
    Outcome { text, inputs, results: serde_json::to_value(&r).unwrap_or(Value::Null), pass }
}

fn run_harmonic(group: &GroupArgs, operator: &str, nmax: u32, wdeg: u32, centers: &Option<String>) -> Result<Outcome, Failure> {
    let l = load(group)?;
    let op = OperatorSpec::parse(operator, &l.model)?;
    let pts: Vec<Vec<Rational>> = match centers {
        Some(s) => s.split(';').map(|c| center(&l.model, c)).collect::<Result<_, _>>()?,
        None => match l.entry {
            Some(e) => e.center_points(),
            None => vec![origin(&l.model)],
        },
    };
    let inputs = json!({ "group": l.label, "operator": op.to_text(), "nmax": nmax, "wdeg": wdeg,
        "centers": pts.iter().map(|c| c.iter().map(carnot::scalar::format_rational).collect::<Vec<_>>().join(",")).collect::<Vec<_>>() });
    match check_l_harmonicity(&l.model, &op, nmax, wdeg, &pts) {
        Ok(r) => {
            let mut text = format!("L = {} (homogeneous of degree {})\nkernel basis, weighted degree <= {}:\n", r.operator, r.sigma, r.wdeg_max);
            for k in &r.kernel {
                let _ = writeln!(text, "  {k}");
            }
            let _ = writeln!(text, "centers: {}", r.centers.join("; "));
            let _ = writeln!(text, "{} exact checks of L(P_n(f,p)) = 0 for n <= {}: {}", r.checks, r.n_max, verdict(r.pass));
            Ok(Outcome { text, inputs, results: serde_json::to_value(&r)?, pass: r.pass })
        }
        Err(e @ CheckError::TheoremViolation { .. }) | Err(e @ CheckError::Taylor(TaylorError::LiftNotInvariant(_))) => {
            Ok(Outcome { text: format!("{e}\nresult: FAIL\n"), inputs, results: json!({ "error": e.to_string() }), pass: false })
        }
        Err(e) => Err(e.into()),
    }
}
