//! `vfinv`: command-line front end for the equivalence-group machinery.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use vfinv_core::equivalence::{
    apply_transformation, orbit_equivalent, pushforward_check, Equation, Mode, OrbitVerdict, PointTransformation,
    Sampling,
};
use vfinv_core::invariants::{
    conjectured_m2, count_first_order, count_tkl, first_order_invariants, jacobian_adjoint,
    second_order_coordinate_count, second_order_invariants_vanishing, second_order_nonpivots, second_order_pivots,
    verify_annihilated, zeroth_order_report, Invariant,
};
use vfinv_core::jet::{build_generator, determining_system, prolong, xi_decompose, DiffOperator, MixedConvention};
use vfinv_core::symbolic::XiSym;
use vfinv_core::{parse_expr, Error};

mod selfcheck;

#[derive(Parser, Debug)]
#[command(name = "vfinv", version, about = "Equivalence-group invariants of first-order linear PDEs")]
struct Cli {
    #[command(flatten)]
    config: Config,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Config {
    /// Number of independent variables.
    #[arg(long, global = true, default_value_t = 2)]
    n: usize,
    /// Prolongation order; each subcommand has its own default.
    #[arg(long, global = true)]
    order: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed of every randomized step. VFINV_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 64)]
    samples: usize,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, global = true, value_enum, default_value_t = Convention::Symmetric)]
    convention: Convention,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Convention {
    Symmetric,
    Ordered,
}

impl From<Convention> for MixedConvention {
    fn from(c: Convention) -> Self {
        match c {
            Convention::Symmetric => MixedConvention::Symmetric,
            Convention::Ordered => MixedConvention::OrderedPairs,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Symbolic,
    Numeric,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Differential invariants of the given order (default 2).
    Invariants {
        /// A pair `i:j` whose coefficient derivative A_ij vanishes; repeatable.
        #[arg(long = "vanishing", value_parser = parse_pair)]
        vanishing: Vec<(usize, usize)>,
    },
    /// The generator, or its prolongation when `--order` is given.
    Generator {
        /// Split into the operators multiplying each formal xi symbol.
        #[arg(long)]
        decompose: bool,
    },
    /// Bracket of two slot operators of the prolonged generator (default order 2).
    Commutator {
        #[arg(long, value_parser = parse_slot)]
        left: XiSym,
        #[arg(long, value_parser = parse_slot)]
        right: XiSym,
    },
    /// Applies the determining system of the given order (default 2) to an expression.
    Verify {
        #[arg(long)]
        expr: String,
    },
    /// Second-order adjoint system and its coefficient matrix.
    Adjoint,
    /// Counting formulas for dimension n.
    Count {
        /// Number of vanishing pairs.
        #[arg(long, default_value_t = 0)]
        p: usize,
    },
    /// Pushes an equation forward along a componentwise point transformation.
    Transform {
        file: PathBuf,
        #[arg(long)]
        map: PathBuf,
        /// Also compare invariants of both equations at sampled points.
        #[arg(long)]
        check: bool,
    },
    /// Same-chart orbit comparison of two equations.
    Equivalent {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Symbolic)]
        mode: ModeArg,
    },
    /// Runs the golden operator, invariant and commutator checks.
    Selfcheck,
}

/// Failure classes, mapped to exit codes 1 and 2.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Internal(String),
    /// A report that is printed as usual but exits with status 2.
    Failed(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistency(_) | Error::RankMismatch { .. } => Failure::Internal(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (i, j) = s.split_once(':').ok_or_else(|| format!("expected i:j, got `{s}`"))?;
    let i = i.trim().parse().map_err(|_| format!("bad index in `{s}`"))?;
    let j = j.trim().parse().map_err(|_| format!("bad index in `{s}`"))?;
    Ok((i, j))
}

fn parse_slot(s: &str) -> Result<XiSym, String> {
    let bad = || format!("expected xi<i>p<j>, got `{s}`");
    let (i, j) = s.strip_prefix("xi").and_then(|r| r.split_once('p')).ok_or_else(bad)?;
    let i: usize = i.parse().map_err(|_| bad())?;
    let j: usize = j.parse().map_err(|_| bad())?;
    if i == 0 {
        return Err(bad());
    }
    Ok(XiSym::new(i, j))
}

struct Ctx {
    n: usize,
    order: Option<usize>,
    format: Format,
    convention: MixedConvention,
    sampling: Sampling,
}

impl Ctx {
    fn from_config(c: &Config) -> Result<Self, Failure> {
        let seed = match std::env::var("VFINV_SEED") {
            Ok(s) => s.trim().parse().map_err(|_| Failure::Usage(format!("VFINV_SEED is not an integer: `{s}`")))?,
            Err(_) => c.seed,
        };
        if c.n < 2 {
            return Err(Failure::Usage(format!("--n must be at least 2, got {}", c.n)));
        }
        if !(c.tol > 0.0 && c.tol.is_finite()) {
            return Err(Failure::Usage(format!("--tol must be positive, got {}", c.tol)));
        }
        if c.samples == 0 {
            return Err(Failure::Usage("--samples must be at least 1".into()));
        }
        Ok(Ctx {
            n: c.n,
            order: c.order,
            format: c.format,
            convention: c.convention.into(),
            sampling: Sampling { samples: c.samples, tol: c.tol, seed },
        })
    }

    fn order_or(&self, default: usize) -> usize {
        self.order.unwrap_or(default)
    }

    fn no_latex(&self, cmd: &str) -> Result<(), Failure> {
        if self.format == Format::Latex {
            return Err(Failure::Usage(format!("latex output is not available for `{cmd}`")));
        }
        Ok(())
    }
}

fn to_json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn invariants(ctx: &Ctx, vanishing: &[(usize, usize)]) -> Outcome {
    let n = ctx.n;
    let order = ctx.order_or(2);
    let vanishing: BTreeSet<(usize, usize)> = vanishing.iter().copied().collect();
    if order == 0 {
        ctx.no_latex("invariants --order 0")?;
        let r = zeroth_order_report(n)?;
        return Ok(match ctx.format {
            Format::Json => to_json(&json!({
                "n": n, "order": 0, "count": r.invariants, "fundamental_subset": false,
                "conjectured_m2": null, "rank": r.rank, "variables": r.variables, "invariants": [],
            })),
            _ => {
                format!("n = {n}, order 0: rank {} on {} variables, {} invariants\n", r.rank, r.variables, r.invariants)
            }
        });
    }
    let (list, subset) = match order {
        1 => (first_order_invariants(n, &vanishing)?, false),
        2 => {
            let s = second_order_invariants_vanishing(n, &vanishing)?;
            (s.invariants, s.fundamental_subset)
        }
        k => return Err(Failure::Usage(format!("invariants are available for orders 0..=2, got {k}"))),
    };
    let m2 = if order == 2 && vanishing.is_empty() { Some(conjectured_m2(n)?) } else { None };
    Ok(match ctx.format {
        Format::Json => to_json(&json!({
            "n": n, "order": order, "count": list.len(), "fundamental_subset": subset,
            "conjectured_m2": m2, "invariants": list.iter().map(Invariant::to_json).collect::<Vec<_>>(),
        })),
        Format::Latex => list.iter().map(|i| i.latex() + "\n").collect(),
        Format::Text => {
            let mut out = format!("n = {n}, order {order}: {} invariants", list.len());
            if subset {
                let _ = write!(
                    out,
                    " (fundamental subset; conjectured total {})",
                    m2.map_or("?".into(), |m| m.to_string())
                );
            }
            out.push('\n');
            for inv in &list {
                let _ = writeln!(out, "{inv}");
            }
            out
        }
    })
}

fn prolonged(ctx: &Ctx, default_order: usize) -> Result<(usize, DiffOperator), Failure> {
    let order = ctx.order_or(default_order);
    let g = build_generator(ctx.n)?;
    let p = if order == 0 { g } else { prolong(&g, order, ctx.convention)? };
    Ok((order, p))
}

fn operator_out(ctx: &Ctx, op: &DiffOperator) -> String {
    match ctx.format {
        Format::Latex => op.latex() + "\n",
        _ => format!("{op}\n"),
    }
}

fn generator(ctx: &Ctx, decompose: bool) -> Outcome {
    let (order, p) = prolonged(ctx, 0)?;
    let head = json!({"n": ctx.n, "order": order, "convention": ctx.convention.name()});
    if !decompose {
        return Ok(match ctx.format {
            Format::Json => to_json(&merge(head, json!({"generator": p.to_json()}))),
            _ => operator_out(ctx, &p),
        });
    }
    let d = xi_decompose(&p)?;
    Ok(match ctx.format {
        Format::Json => {
            let slots: Vec<Value> =
                d.slots().map(|(s, op)| json!({"symbol": s.to_string(), "operator": op.to_json()})).collect();
            to_json(&merge(head, json!({"slots": slots})))
        }
        Format::Latex => {
            d.slots().map(|(s, op)| format!("\\mathcal{{V}}_{{{}}} = {}\n", s.latex(), op.latex())).collect()
        }
        Format::Text => d.slots().map(|(s, op)| format!("{s}: {op}\n")).collect(),
    })
}

fn merge(mut a: Value, b: Value) -> Value {
    if let (Value::Object(a), Value::Object(b)) = (&mut a, b) {
        a.extend(b);
    }
    a
}

fn commutator_cmd(ctx: &Ctx, left: XiSym, right: XiSym) -> Outcome {
    let (order, p) = prolonged(ctx, 2)?;
    let d = xi_decompose(&p)?;
    for s in [left, right] {
        if s.index as usize > ctx.n || s.order as usize > d.max_order() {
            return Err(Failure::Usage(format!("no slot {s} for n = {} at order {order}", ctx.n)));
        }
    }
    let l = d.get(left.index as usize, left.order as usize);
    let r = d.get(right.index as usize, right.order as usize);
    let c = vfinv_core::lie::commutator(&l, &r)?;
    Ok(match ctx.format {
        Format::Json => to_json(&json!({
            "n": ctx.n, "order": order, "convention": ctx.convention.name(),
            "left": left.to_string(), "right": right.to_string(),
            "zero": c.is_empty(), "commutator": c.to_json(),
        })),
        _ => operator_out(ctx, &c),
    })
}

fn verify(ctx: &Ctx, text: &str) -> Outcome {
    let order = ctx.order_or(2);
    let f = parse_expr(text, ctx.n)?;
    let sys = determining_system(ctx.n, order, ctx.convention)?;
    let ops: Vec<DiffOperator> = sys.iter().map(|s| s.op.clone()).collect();
    let a = verify_annihilated(&f, &ops)?;
    let residuals: Vec<(String, String)> =
        a.residuals.iter().map(|(k, r)| (sys[*k].symbol.to_string(), r.to_string())).collect();
    Ok(match ctx.format {
        Format::Json => to_json(&json!({
            "n": ctx.n, "order": order, "convention": ctx.convention.name(),
            "expression": f.to_string(), "annihilated": a.annihilated,
            "residuals": residuals.iter().map(|(s, r)| json!({"operator": s, "residual": r})).collect::<Vec<_>>(),
        })),
        Format::Latex => {
            let mut out = String::new();
            for (k, r) in &a.residuals {
                let _ = writeln!(out, "\\mathcal{{V}}_{{{}}} F = {}", sys[*k].symbol.latex(), r.latex());
            }
            if out.is_empty() {
                out.push_str("0\n");
            }
            out
        }
        Format::Text => {
            let mut out = format!("{}\n", if a.annihilated { "annihilated" } else { "not annihilated" });
            for (s, r) in &residuals {
                let _ = writeln!(out, "{s}: {r}");
            }
            out
        }
    })
}

fn adjoint(ctx: &Ctx) -> Outcome {
    let n = ctx.n;
    let ops: Vec<DiffOperator> = determining_system(n, 2, ctx.convention)?.into_iter().map(|s| s.op).collect();
    let adj = jacobian_adjoint(&ops, &second_order_pivots(n), Some(&second_order_nonpivots(n)?))?;
    if !adj.check_reconstruction(&ops)? {
        return Err(Failure::Internal("adjoint operators do not reconstruct the system".into()));
    }
    let m = adj.m_u_transpose();
    let names = |vs: &[vfinv_core::Var]| vs.iter().map(|v| v.to_string()).collect::<Vec<_>>();
    Ok(match ctx.format {
        Format::Json => to_json(&json!({
            "n": n, "convention": ctx.convention.name(),
            "pivots": names(&adj.pivots), "nonpivots": names(&adj.nonpivots),
            "m_u_transpose": m.to_json(), "reconstruction": true,
        })),
        Format::Latex => m.latex() + "\n",
        Format::Text => format!(
            "pivots: {}\nnonpivots: {}\n{}",
            names(&adj.pivots).join(", "),
            names(&adj.nonpivots).join(", "),
            m.to_text()
        ),
    })
}

fn count(ctx: &Ctx, p: usize) -> Outcome {
    ctx.no_latex("count")?;
    let n = ctx.n;
    let (first, tkl, m2, coords) =
        (count_first_order(n, p)?, count_tkl(n)?, conjectured_m2(n)?, second_order_coordinate_count(n)?);
    Ok(match ctx.format {
        Format::Json => to_json(&json!({
            "n": n, "first_order": first, "tkl": tkl, "conjectured_m2": m2, "second_order_coordinates": coords,
        })),
        _ => format!("first_order: {first}\ntkl: {tkl}\nconjectured_m2: {m2}\nsecond_order_coordinates: {coords}\n"),
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn transform(ctx: &Ctx, file: &Path, map: &Path, check: bool) -> Outcome {
    let eq = Equation::from_json(&read(file)?)?;
    let psi = PointTransformation::from_json(&read(map)?)?;
    let b = apply_transformation(&eq, &psi)?;
    let report = if check { Some(pushforward_check(&eq, &psi, ctx.sampling)?) } else { None };
    Ok(match ctx.format {
        Format::Json => {
            let mut v = b.to_json();
            if let Some(r) = &report {
                v = merge(v, json!({"check": r}));
            }
            to_json(&v)
        }
        Format::Latex => {
            b.coeffs().iter().enumerate().map(|(k, c)| format!("A_{{{}}} = {}\n", k + 1, c.latex())).collect()
        }
        Format::Text => {
            let mut out: String = b.coeffs().iter().enumerate().map(|(k, c)| format!("A{} = {c}\n", k + 1)).collect();
            if let Some(r) = &report {
                let _ = writeln!(
                    out,
                    "check: {} (samples {}, max T deviation {:e}, max K deviation {:e}, pattern preserved {})",
                    if r.consistent { "consistent" } else { "inconsistent" },
                    r.samples,
                    r.max_t_deviation,
                    r.max_k_deviation,
                    r.pattern_preserved
                );
            }
            out
        }
    })
}

fn verdict_text(v: &OrbitVerdict) -> String {
    let mut out = format!("{}\nreason: {}\n", if v.equivalent { "equivalent" } else { "not equivalent" }, v.reason);
    for p in &v.pairs {
        let evidence = match (&p.residual, p.max_deviation) {
            (Some(r), _) => format!("residual {r}"),
            (None, Some(d)) => format!("max deviation {d:e}"),
            (None, None) => "vanishing".into(),
        };
        let _ = writeln!(out, "T{}{}: {} ({evidence})", p.i, p.j, if p.agree { "agree" } else { "differ" });
    }
    for p in &v.supplementary {
        let _ = writeln!(out, "K{}{}: {}", p.i, p.j, if p.agree { "agree" } else { "differ" });
    }
    out
}

fn equivalent(ctx: &Ctx, a: &Path, b: &Path, mode: ModeArg) -> Outcome {
    ctx.no_latex("equivalent")?;
    let ea = Equation::from_json(&read(a)?)?;
    let eb = Equation::from_json(&read(b)?)?;
    let mode = match mode {
        ModeArg::Symbolic => Mode::Symbolic,
        ModeArg::Numeric => Mode::Numeric,
    };
    let v = orbit_equivalent(&ea, &eb, mode, ctx.sampling)?;
    Ok(match ctx.format {
        Format::Json => to_json(&serde_json::to_value(&v).expect("verdict serializes")),
        _ => verdict_text(&v),
    })
}

fn run(cli: &Cli) -> Outcome {
    let ctx = Ctx::from_config(&cli.config)?;
    match &cli.command {
        Command::Invariants { vanishing } => invariants(&ctx, vanishing),
        Command::Generator { decompose } => generator(&ctx, *decompose),
        Command::Commutator { left, right } => commutator_cmd(&ctx, *left, *right),
        Command::Verify { expr } => verify(&ctx, expr),
        Command::Adjoint => adjoint(&ctx),
        Command::Count { p } => count(&ctx, *p),
        Command::Transform { file, map, check } => transform(&ctx, file, map, *check),
        Command::Equivalent { a, b, mode } => equivalent(&ctx, a, b, *mode),
        Command::Selfcheck => {
            ctx.no_latex("selfcheck")?;
            let (out, passed) = selfcheck::run(ctx.format == Format::Json);
            if passed {
                Ok(out)
            } else {
                Err(Failure::Failed(out))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Failed(out)) => {
            print!("{out}");
            eprintln!("error: selfcheck failed");
            ExitCode::from(2)
        }
    }
}
