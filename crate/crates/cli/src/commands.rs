//! Subcommands. Each returns its rendered output and whether every check
//! passed; errors map to exit codes in [`exit_code`].

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use deltaiso::characters::{isocrystal_data, solve_character_lattice, verify_additivity, verify_diff_relation};
use deltaiso::crystalline::{compare_with, hodge_frobenius_intersection, kedlaya_frobenius, newton_slopes};
use deltaiso::formalgroup::{FormalGroupLaw, WeierstrassCurve};
use deltaiso::jet::verify_jet_identities;
use deltaiso::characters::verify_psi_additivity;
use deltaiso::witt::check_delta_axioms;
use deltaiso::{Check, Context, Error, Qp, Result};

use crate::expr;
use crate::report::{matrix, AnalysisReport, CheckRecord, Kedlaya, Padic, Ranks, SCHEMA};

/// Samples for the randomized p-derivation axiom check.
const DELTA_SAMPLES: usize = 500;

#[derive(Parser, Debug)]
#[command(name = "deltaiso", version, about = "Delta characters, delta isocrystals and crystalline Frobenius of elliptic curves over Z_p")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Full pipeline on a curve: characters, isocrystal, Kedlaya, comparison.
    Analyze(CurveArgs),
    /// Identity suite for a formal group.
    Verify(VerifyArgs),
    /// Evaluate a Witt vector expression.
    Witt(WittArgs),
    /// Character lattice of a given order.
    Characters(VerifyArgs),
    /// Crystalline Frobenius matrix of a curve.
    Kedlaya(CurveArgs),
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, default_value_t = 5)]
    pub p: u64,
    /// p-adic precision N.
    #[arg(long, default_value_t = 8)]
    pub prec: u32,
    /// Series truncation degree M (default 12, or enough for order 2 on curves).
    #[arg(long)]
    pub deg: Option<usize>,
    #[arg(long)]
    pub json: bool,
    /// Seed for randomized checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug, Clone)]
pub struct CurveArgs {
    #[command(flatten)]
    pub common: Common,
    /// `a4,a6` or `a1,a2,a3,a4,a6`.
    #[arg(long, allow_hyphen_values = true)]
    pub curve: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Group {
    Ga,
    Gm,
    Curve,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Group::Curve)]
    pub group: Group,
    #[arg(long, allow_hyphen_values = true)]
    pub curve: Option<String>,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub order: u8,
}

#[derive(Args, Debug, Clone)]
pub struct WittArgs {
    #[command(flatten)]
    pub common: Common,
    pub expr: String,
}

/// 2 for bad input, 3 for exhausted precision, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionExhausted(_) | Error::AmbiguousRank(_) => 3,
        Error::Parse(_)
        | Error::BadReduction
        | Error::InvalidContext(_)
        | Error::LengthMismatch
        | Error::LengthTooShort
        | Error::NonzeroConstantTerm
        | Error::NonUnitLinearCoefficient
        | Error::VariableMismatch => 2,
        _ => 1,
    }
}

pub struct Output {
    pub text: String,
    pub passed: bool,
}

pub fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Analyze(a) => {
            let r = analyze(a)?;
            let text = if a.common.json { r.to_json() } else { render_analysis(&r) };
            Ok(Output { passed: r.passed(), text })
        }
        Command::Verify(a) => verify(a),
        Command::Witt(a) => witt(a),
        Command::Characters(a) => characters(a),
        Command::Kedlaya(a) => kedlaya(a),
    }
}

/// Degree large enough for order-2 characters of a curve.
fn order_two_degree(p: u64) -> usize {
    35.max((p * p + p) as usize)
}

fn context(c: &Common, default_deg: usize) -> Result<Context> {
    Context::new(c.p, c.prec, c.deg.unwrap_or(default_deg))
}

fn group(a: &VerifyArgs, ctx: &Context) -> Result<FormalGroupLaw> {
    match a.group {
        Group::Ga => FormalGroupLaw::additive(ctx),
        Group::Gm => FormalGroupLaw::multiplicative(ctx),
        Group::Curve => {
            let spec = a.curve.as_deref().ok_or_else(|| Error::Parse("--group curve needs --curve".into()))?;
            FormalGroupLaw::from_curve(&WeierstrassCurve::parse(spec, ctx)?)
        }
    }
}

fn default_deg(a: &VerifyArgs) -> usize {
    if a.group == Group::Curve && a.order == 2 {
        order_two_degree(a.common.p)
    } else {
        12
    }
}

pub fn analyze(a: &CurveArgs) -> Result<AnalysisReport> {
    let ctx = context(&a.common, order_two_degree(a.common.p))?;
    let e = WeierstrassCurve::parse(&a.curve, &ctx)?;
    let inv = e.count_points()?;
    let f = FormalGroupLaw::from_curve(&e)?;
    let mut checks: Vec<Check> = verify_jet_identities(&f)?;
    checks.push(verify_psi_additivity(&f)?);
    let delta = isocrystal_data(&f)?;
    checks.extend(verify_diff_relation(&f, &delta.primitive)?);
    checks.extend(delta.checks.iter().cloned());
    let cmp = compare_with(&e, delta)?;
    checks.extend(cmp.checks.iter().cloned());
    let d = &cmp.delta;
    Ok(AnalysisReport {
        schema: SCHEMA,
        p: ctx.p,
        curve: e.to_string(),
        a_p: inv.a_p,
        ordinary: inv.ordinary,
        ranks: Ranks { x1: d.ranks_xn.0, x2: d.ranks_xn.1, x_prim: d.hodge_rank },
        m_u: d.m_u,
        delta_rank: d.hdelta_rank,
        is_cl: d.is_cl,
        filtration_dims: d.filtration_dims.clone(),
        frobenius_matrix: matrix(&d.frobenius_matrix),
        kedlaya: Kedlaya {
            matrix: matrix(&cmp.kedlaya.entries),
            trace: Padic::from(&cmp.kedlaya.trace()),
            det: Padic::from(&cmp.kedlaya.det()?),
        },
        checks: checks.iter().map(CheckRecord::from).collect(),
    })
}

fn fmt_padic(x: &Padic, p: u64) -> String {
    match x.valuation {
        None => format!("O({p}^{})", x.precision),
        Some(0) => format!("{} + O({p}^{})", x.unit, x.precision),
        Some(v) => format!("{}*{p}^{v} + O({p}^{})", x.unit, x.precision),
    }
}

fn fmt_matrix(m: &[Vec<Padic>], p: u64, out: &mut String) {
    for row in m {
        let cells: Vec<String> = row.iter().map(|x| fmt_padic(x, p)).collect();
        let _ = writeln!(out, "  [{}]", cells.join(", "));
    }
}

fn fmt_checks<'a>(checks: impl Iterator<Item = &'a CheckRecord>, out: &mut String) {
    for c in checks {
        let st = if c.status == crate::report::Status::Pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{st} {} (residual {} >= {})", c.name, c.residual_valuation, c.precision);
    }
}

pub fn render_analysis(r: &AnalysisReport) -> String {
    let p = r.p;
    let mut out = String::new();
    let _ = writeln!(out, "curve {} at p = {p}: a_p = {}, {}", r.curve, r.a_p, if r.ordinary { "ordinary" } else { "supersingular" });
    let _ = writeln!(out, "rk X_1 = {}, rk X_2 = {}, rk X_prim = {}", r.ranks.x1, r.ranks.x2, r.ranks.x_prim);
    let _ = writeln!(out, "m_u = {}, r_delta = {}, {}", r.m_u, r.delta_rank, if r.is_cl { "CL" } else { "not CL" });
    let _ = writeln!(out, "filtration dims {:?}", r.filtration_dims);
    let _ = writeln!(out, "f* on H_delta:");
    fmt_matrix(&r.frobenius_matrix, p, &mut out);
    let _ = writeln!(out, "Kedlaya Frobenius (basis dx/y, x dx/y):");
    fmt_matrix(&r.kedlaya.matrix, p, &mut out);
    let _ = writeln!(out, "  trace {}, det {}", fmt_padic(&r.kedlaya.trace, p), fmt_padic(&r.kedlaya.det, p));
    fmt_checks(r.checks.iter(), &mut out);
    out
}

fn render_checks(title: &str, checks: &[Check], json: bool) -> Output {
    let recs: Vec<CheckRecord> = checks.iter().map(CheckRecord::from).collect();
    let passed = checks.iter().all(Check::passed);
    let text = if json {
        serde_json::to_string_pretty(&json!({ "schema": SCHEMA, "subject": title, "checks": recs })).expect("serializes")
    } else {
        let mut out = format!("{title}\n");
        fmt_checks(recs.iter(), &mut out);
        out
    };
    Output { text, passed }
}

pub fn verify(a: &VerifyArgs) -> Result<Output> {
    let ctx = context(&a.common, default_deg(a))?;
    let f = group(a, &ctx)?;
    let n = ctx.n as i32;
    let mut checks = Vec::new();
    for (name, r) in f.verify()? {
        // the exponential has factorial denominators
        let need = if name.starts_with("exp") { n - 3 } else { n };
        checks.push(Check::new(format!("formal group {name}"), r.min(n), need));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
    let rep = check_delta_axioms(&ctx, DELTA_SAMPLES, &mut rng);
    checks.push(Check::boolean(format!("delta axioms on {} pairs", rep.checked), rep.ok()));
    checks.extend(verify_jet_identities(&f)?);
    checks.push(verify_psi_additivity(&f)?);
    let lat = solve_character_lattice(&f, a.order as usize)?;
    for (i, theta) in lat.basis.iter().enumerate() {
        for mut c in verify_diff_relation(&f, theta)?.into_iter().chain([verify_additivity(&f, theta)?]) {
            c.name = format!("character {i}: {}", c.name);
            checks.push(c);
        }
    }
    let title = format!("{:?} at p = {}, N = {}, M = {}, order {}", a.group, ctx.p, ctx.n, ctx.m, a.order);
    Ok(render_checks(&title, &checks, a.common.json))
}

pub fn witt(a: &WittArgs) -> Result<Output> {
    let ctx = context(&a.common, 12)?;
    let e = expr::parse(&a.expr)?;
    let w = expr::eval(&e, ctx.p, ctx.n)?;
    let comps: Vec<i128> = w.components().iter().map(|z| z.to_signed()).collect();
    let ghost: Vec<i128> = w.ghost(ctx.p).iter().map(|z| z.to_signed()).collect();
    let text = if a.common.json {
        serde_json::to_string_pretty(&json!({ "p": ctx.p, "prec": ctx.n, "components": comps, "ghost": ghost }))
            .expect("serializes")
    } else {
        let g: Vec<String> = ghost.iter().map(|x| x.to_string()).collect();
        format!("{w}\nghost ({})\n", g.join(", "))
    };
    Ok(Output { text, passed: true })
}

fn fmt_qp(q: &Qp) -> String {
    fmt_padic(&Padic::from(q), q.p())
}

pub fn characters(a: &VerifyArgs) -> Result<Output> {
    let ctx = context(&a.common, default_deg(a))?;
    let f = group(a, &ctx)?;
    let lat = solve_character_lattice(&f, a.order as usize)?;
    let text = if a.common.json {
        let basis: Vec<Vec<Padic>> = lat.basis.iter().map(|b| b.c.iter().map(Padic::from).collect()).collect();
        serde_json::to_string_pretty(&json!({
            "p": ctx.p, "order": lat.order, "rank": lat.rank, "exponents": lat.exponents, "basis": basis,
        }))
        .expect("serializes")
    } else {
        let mut out = format!("rk X_{} = {}\nelementary exponents {:?}\n", lat.order, lat.rank, lat.exponents);
        for b in &lat.basis {
            let cs: Vec<String> = b.c.iter().map(fmt_qp).collect();
            let _ = writeln!(out, "  c = ({})", cs.join(", "));
        }
        out
    };
    Ok(Output { text, passed: true })
}

pub fn kedlaya(a: &CurveArgs) -> Result<Output> {
    let ctx = context(&a.common, 12)?;
    let e = WeierstrassCurve::parse(&a.curve, &ctx)?;
    let a_p = e.count_points()?.a_p;
    let fm = kedlaya_frobenius(&e)?;
    let hodge = hodge_frobenius_intersection(&fm);
    let slopes: Vec<String> = newton_slopes(&fm.charpoly()?).iter().map(|s| s.to_string()).collect();
    let need = ctx.n as i32 - 2;
    let checks = [
        Check::new("trace = a_p", fm.trace().sub(&Qp::from_int(ctx.p, a_p as i128, Qp::EXACT)).val_or_abs().min(need), need),
        Check::new("det = p", fm.det()?.sub(&Qp::from_int(ctx.p, ctx.p as i128, Qp::EXACT)).val_or_abs().min(need), need),
    ];
    let passed = checks.iter().all(Check::passed);
    let text = if a.common.json {
        serde_json::to_string_pretty(&json!({
            "p": ctx.p,
            "curve": e.to_string(),
            "a_p": a_p,
            "matrix": matrix(&fm.entries),
            "precision": fm.precision,
            "trace": Padic::from(&fm.trace()),
            "det": Padic::from(&fm.det()?),
            "hodge_intersection": hodge.dim,
            "slopes": slopes,
            "checks": checks.iter().map(CheckRecord::from).collect::<Vec<_>>(),
        }))
        .expect("serializes")
    } else {
        let mut out = format!("Frobenius on H^1 of {e} at p = {} (basis dx/y, x dx/y), {} digits:\n", ctx.p, fm.precision);
        fmt_matrix(&matrix(&fm.entries), ctx.p, &mut out);
        let _ = writeln!(out, "trace {}, det {}, a_p = {a_p}", fmt_qp(&fm.trace()), fmt_qp(&fm.det()?));
        let off = hodge.off_valuation.map_or("vanishes".to_string(), |v| format!("valuation {v}"));
        let _ = writeln!(out, "dim(H0 cap F H0) = {} (off-diagonal {off})", hodge.dim);
        let _ = writeln!(out, "slopes {{{}}}", slopes.join(", "));
        fmt_checks(checks.iter().map(CheckRecord::from).collect::<Vec<_>>().iter(), &mut out);
        out
    };
    Ok(Output { text, passed })
}
