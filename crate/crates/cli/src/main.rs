//! `cartier-lab`: formal group laws, big Witt vectors, Cartier operators and
//! the Legendre congruences from the command line.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage or input error.

mod config;

use std::io::Read;
use std::process::ExitCode;
use std::time::Instant;

use cartier_core::fgl::FormalGroupLaw;
use cartier_core::legendre;
use cartier_core::value::{elem_from_json, elem_to_json, parse_elem};
use cartier_core::verify::{self, LibraryOps, DEFAULT_SEED};
use cartier_core::witt::cartier::{cartier_apply, cartier_normalize_with, CartierExpr, RewriteOrder};
use cartier_core::witt::lambda::{lambda_inv, lambda_mul, LambdaElement, NilpotentAlgebra};
use cartier_core::witt::universal::{derive_universal_polynomials, set_universal_ceiling, UniversalOp};
use cartier_core::witt::{self, WittVector};
use cartier_core::{Error, RingMap, RingSpec, RingValue, TruncatedSeries};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config::Config;

#[derive(Parser, Debug)]
#[command(name = "cartier-lab", version, about = "Exact formal groups, big Witt vectors and Cartier operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Ring: Z, Q, Z/<m>, or <base>[<var>] such as Q[l]
    #[arg(long, global = true)]
    ring: Option<String>,
    /// Series truncation degree
    #[arg(long, global = true)]
    trunc: Option<u32>,
    /// Witt vector length
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Input: inline JSON, a file path, or - for stdin
    #[arg(long = "in", global = true, value_name = "JSON|PATH|-")]
    input: Option<String>,
    /// Print canonical JSON
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Formal group laws
    #[command(subcommand)]
    Fgl(FglCmd),
    /// Big Witt vectors
    #[command(subcommand)]
    Witt(WittCmd),
    /// Cartier-ring operators in canonical form
    #[command(subcommand)]
    Cartier(CartierCmd),
    /// The Lambda functor on nilpotent algebras
    #[command(subcommand)]
    Lambda(LambdaCmd),
    /// The Legendre family and its congruences
    #[command(subcommand)]
    Legendre(LegendreCmd),
    /// Seeded property suites over every module
    Verify {
        /// Run only this suite (repeatable)
        #[arg(long)]
        suite: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Include wall times in JSON output
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Args, Debug)]
struct LawArgs {
    /// Built-in law: additive, multiplicative, legendre (otherwise --in)
    #[arg(long)]
    law: Option<String>,
    /// Dimension of the additive law
    #[arg(long)]
    dim: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum FglCmd {
    /// Check unit, commutativity and associativity
    Validate(LawArgs),
    /// Logarithm over a Q-algebra
    Log(LawArgs),
    /// The law with a given logarithm (--in: series, array of series, or {"coeffs": [...]})
    FromLog,
    /// Normalized invariant differential
    InvariantForm(LawArgs),
    /// Coefficientwise image in another ring
    BaseChange {
        #[command(flatten)]
        law: LawArgs,
        /// Target ring
        #[arg(long)]
        to: String,
        /// Image of a polynomial variable, as var=value (repeatable)
        #[arg(long)]
        assign: Vec<String>,
    },
}

#[derive(Subcommand, Debug)]
enum WittCmd {
    /// Sum of two vectors (--in: [a, b])
    Add,
    /// Product of two vectors (--in: [a, b])
    Mul,
    /// Additive inverse
    Neg,
    /// Ghost components
    Ghost,
    /// Vector from ghost components (torsion-free rings)
    FromGhost,
    /// Teichmüller lift [c] = 1 - cx
    Teich {
        #[arg(long)]
        c: String,
    },
    /// Verschiebung V_n
    Ver { n: u32 },
    /// Frobenius F_n
    Frob { n: u32 },
    /// Universal polynomials for an operation, for audit
    Universal {
        #[arg(long, value_enum)]
        op: OpName,
        /// Index of the Frobenius
        #[arg(long)]
        n: Option<u32>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OpName {
    Add,
    Mul,
    Frob,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Left,
    Right,
}

#[derive(Subcommand, Debug)]
enum CartierCmd {
    /// Canonical form sum V_n [a_nm] F_m of a word
    Normalize {
        /// Word such as "V2 [3] F2 + 1"
        #[arg(long)]
        expr: String,
        /// Keep terms V_n with n below this bound
        #[arg(long)]
        vbound: Option<usize>,
        #[arg(long, value_enum, default_value = "left")]
        order: Order,
    },
    /// Apply a word to a Witt vector
    Apply {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        vbound: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
enum LambdaCmd {
    /// Product of two elements (--in: [u, v])
    Mul {
        /// Algebra name (truncated-<r>, square-zero-<r>, dual-numbers-2) or JSON
        #[arg(long)]
        algebra: String,
    },
    /// Inverse of an element
    Inv {
        #[arg(long)]
        algebra: String,
    },
}

#[derive(Subcommand, Debug)]
enum LegendreCmd {
    /// Coefficient binom(n, n/2) A_{n/2}(l) of the invariant form
    Omega {
        #[arg(long)]
        n: u64,
    },
    /// Logarithm of the Legendre law
    Log,
    /// 4 D(omega_n) = 0 mod n + 1 for even n up to --max-n
    Sweep {
        #[arg(long)]
        max_n: Option<u64>,
    },
    /// 2F1(1/2, 1/2; 1; l) and its residual under D
    Hypergeom,
    /// binom(n, n/2) mod n + 1
    Binom {
        #[arg(long)]
        n: u64,
    },
    /// Experimental: denominators of the Legendre law
    Integrality,
}

enum Failure {
    Usage(String),
    Input(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn new(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json, ok: true }
    }

    fn checked(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

/// Flags merged over the config file.
struct Ctx {
    cli_ring: Option<String>,
    trunc: Option<u32>,
    k: Option<usize>,
    input: Option<String>,
    json: bool,
    config: Config,
}

impl Ctx {
    fn ring_given(&self) -> Option<&str> {
        self.cli_ring.as_deref().or(self.config.ring.as_deref())
    }

    fn ring(&self, default: &str) -> Result<RingSpec, Failure> {
        let text = self.ring_given().unwrap_or(default);
        RingSpec::parse(text).map_err(|e| usage(format!("--ring: {e}; expected Z, Q, Z/<m> or <base>[<var>]")))
    }

    fn trunc(&self, default: u32) -> u32 {
        self.trunc.or(self.config.trunc).unwrap_or(default)
    }

    fn k(&self) -> Option<usize> {
        self.k.or(self.config.k)
    }

    fn vbound(&self, flag: Option<usize>, default: usize) -> usize {
        flag.or(self.config.vbound).unwrap_or(default)
    }

    fn read_input(&self) -> Result<Value, Failure> {
        let src = self.input.as_deref().ok_or_else(|| usage("this command needs --in <JSON|PATH|->"))?;
        let text = if src == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| usage(format!("--in -: {e}")))?;
            s
        } else if src.trim_start().starts_with(['{', '[']) {
            src.to_string()
        } else {
            std::fs::read_to_string(src).map_err(|e| usage(format!("--in: cannot read {src}: {e}")))?
        };
        serde_json::from_str(&text).map_err(|e| usage(format!("--in is not valid JSON: {e}")))
    }

    fn witt_vector(&self, v: &Value) -> Result<WittVector, Failure> {
        let ring = self.ring("Z")?;
        Ok(WittVector::from_json_with(v, Some(&ring), self.k())?)
    }

    fn witt_input(&self) -> Result<WittVector, Failure> {
        self.witt_vector(&self.read_input()?)
    }

    fn witt_pair(&self) -> Result<(WittVector, WittVector), Failure> {
        match self.read_input()? {
            Value::Array(items) if items.len() == 2 => Ok((self.witt_vector(&items[0])?, self.witt_vector(&items[1])?)),
            _ => Err(usage("--in must be a JSON array of two Witt vectors")),
        }
    }

    fn law(&self, args: &LawArgs) -> Result<FormalGroupLaw, Failure> {
        let trunc = self.trunc(8);
        match (args.law.as_deref(), &self.input) {
            (Some("additive"), _) => Ok(FormalGroupLaw::additive(&self.ring("Q")?, args.dim.unwrap_or(1), trunc)?),
            (Some("multiplicative"), _) => Ok(FormalGroupLaw::multiplicative(&self.ring("Q")?, trunc)?),
            (Some("legendre"), _) => {
                if let Some(r) = self.ring_given() {
                    if self.ring(r)? != legendre::q_l() {
                        return Err(usage(format!("the Legendre law lives over {}, not {r}", legendre::q_l())));
                    }
                }
                Ok(legendre::legendre_law(trunc)?)
            }
            (Some(other), _) => Err(usage(format!("--law: unknown law `{other}`; expected additive, multiplicative or legendre"))),
            (None, Some(_)) => Ok(FormalGroupLaw::from_json(&self.read_input()?)?),
            (None, None) => Err(usage("give --law <additive|multiplicative|legendre> or --in <law JSON>")),
        }
    }

    fn algebra(&self, spec: &str) -> Result<NilpotentAlgebra, Failure> {
        if spec.trim_start().starts_with('{') {
            let v: Value = serde_json::from_str(spec).map_err(|e| usage(format!("--algebra is not valid JSON: {e}")))?;
            return Ok(NilpotentAlgebra::from_json(&v)?);
        }
        Ok(NilpotentAlgebra::named(&self.ring("Z/2")?, spec)?)
    }
}

fn series_list(v: &[TruncatedSeries]) -> Value {
    if v.len() == 1 {
        v[0].to_json()
    } else {
        Value::Array(v.iter().map(TruncatedSeries::to_json).collect())
    }
}

fn series_text(v: &[TruncatedSeries]) -> String {
    v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("\n")
}

fn law_text(law: &FormalGroupLaw) -> String {
    law.components().iter().enumerate().map(|(i, c)| format!("F{} = {c}", i + 1)).collect::<Vec<_>>().join("\n")
}

fn run_fgl(ctx: &Ctx, cmd: &FglCmd) -> Result<Output, Failure> {
    match cmd {
        FglCmd::Validate(args) => {
            let rep = ctx.law(args)?.validate();
            let mark = |b: bool| if b { "ok" } else { "FAILED" };
            let text = format!(
                "unit {}, commutativity {}, associativity {} (through degree {})",
                mark(rep.unit_ok),
                mark(rep.comm_ok),
                mark(rep.assoc_ok),
                rep.max_degree_checked
            );
            Ok(Output::new(text, rep.to_json()).checked(rep.ok()))
        }
        FglCmd::Log(args) => {
            let log = ctx.law(args)?.log()?;
            Ok(Output::new(series_text(&log), series_list(&log)))
        }
        FglCmd::FromLog => {
            let v = ctx.read_input()?;
            let ring = ctx.ring("Q")?;
            let log = match &v {
                Value::Array(items) => items.iter().map(|s| TruncatedSeries::from_json_in(s, &ring)).collect::<Result<Vec<_>, _>>()?,
                Value::Object(o) if o.contains_key("coeffs") => {
                    let coeffs = o["coeffs"].as_array().ok_or_else(|| usage("\"coeffs\" must be an array"))?;
                    let coeffs = coeffs.iter().map(|c| elem_from_json(&ring, c)).collect::<Result<Vec<_>, _>>()?;
                    if coeffs.is_empty() {
                        return Err(usage("\"coeffs\" is empty"));
                    }
                    let trunc = coeffs.len() as u32 - 1;
                    vec![TruncatedSeries::univariate(&ring, "x", trunc, coeffs)?]
                }
                _ => vec![TruncatedSeries::from_json_in(&v, &ring)?],
            };
            let law = FormalGroupLaw::from_log(&log)?;
            Ok(Output::new(law_text(&law), law.to_json()))
        }
        FglCmd::InvariantForm(args) => {
            let form = ctx.law(args)?.invariant_differential()?;
            let text = form
                .coeffs()
                .iter()
                .enumerate()
                .map(|(j, row)| {
                    let terms: Vec<String> = row.iter().enumerate().map(|(i, g)| format!("({g}) dx{}", i + 1)).collect();
                    format!("omega{} = {}", j + 1, terms.join(" + "))
                })
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Output::new(text, form.to_json()))
        }
        FglCmd::BaseChange { law, to, assign } => {
            let law = ctx.law(law)?;
            let target = RingSpec::parse(to).map_err(|e| usage(format!("--to: {e}")))?;
            let mut map = RingMap::new(law.ring().clone(), target.clone());
            for a in assign {
                let (var, value) = a.split_once('=').ok_or_else(|| usage(format!("--assign `{a}`: expected var=value")))?;
                map = map.assign(var.trim(), RingValue::parse(&target, value.trim())?);
            }
            let out = law.base_change(&map)?;
            Ok(Output::new(law_text(&out), out.to_json()))
        }
    }
}

fn witt_out(a: &WittVector) -> Output {
    Output::new(a.to_string(), a.to_json())
}

fn elems_json(ring: &RingSpec, v: &[cartier_core::Elem]) -> Value {
    Value::Array(v.iter().map(|x| elem_to_json(ring, x)).collect())
}

fn elems_text(ring: &RingSpec, v: &[cartier_core::Elem]) -> String {
    format!("({})", v.iter().map(|x| ring.format(x)).collect::<Vec<_>>().join(", "))
}

fn run_witt(ctx: &Ctx, cmd: &WittCmd) -> Result<Output, Failure> {
    match cmd {
        WittCmd::Add => {
            let (a, b) = ctx.witt_pair()?;
            Ok(witt_out(&witt::witt_add(&a, &b)?))
        }
        WittCmd::Mul => {
            let (a, b) = ctx.witt_pair()?;
            Ok(witt_out(&witt::witt_mul(&a, &b)?))
        }
        WittCmd::Neg => Ok(witt_out(&witt::witt_neg(&ctx.witt_input()?))),
        WittCmd::Ghost => {
            let a = ctx.witt_input()?;
            let w = witt::ghost(&a);
            let r = a.ring();
            Ok(Output::new(elems_text(r, &w), json!({"ring": r.to_string(), "ghost": elems_json(r, &w)})))
        }
        WittCmd::FromGhost => {
            let v = ctx.read_input()?;
            let ring = match v.get("ring").and_then(Value::as_str) {
                Some(s) => RingSpec::parse(s)?,
                None => ctx.ring("Z")?,
            };
            let items = v
                .get("ghost")
                .or(Some(&v))
                .and_then(Value::as_array)
                .ok_or_else(|| usage("--in must be {\"ghost\": [...]} or an array"))?;
            let w = items.iter().map(|x| elem_from_json(&ring, x)).collect::<Result<Vec<_>, _>>()?;
            Ok(witt_out(&witt::from_ghost(&w, &ring)?))
        }
        WittCmd::Teich { c } => {
            let ring = ctx.ring("Z")?;
            let c = parse_elem(&ring, c)?;
            Ok(witt_out(&witt::teichmuller(&c, &ring, ctx.k().unwrap_or(4))?))
        }
        WittCmd::Ver { n } => Ok(witt_out(&witt::verschiebung(*n, &ctx.witt_input()?)?)),
        WittCmd::Frob { n } => Ok(witt_out(&witt::frobenius(*n, &ctx.witt_input()?)?)),
        WittCmd::Universal { op, n } => {
            let op = match (op, n) {
                (OpName::Add, None) => UniversalOp::Add,
                (OpName::Mul, None) => UniversalOp::Mul,
                (OpName::Frob, Some(n)) if *n >= 1 => UniversalOp::Frobenius(*n),
                (OpName::Frob, _) => return Err(usage("--op frob needs --n <index >= 1>")),
                (_, Some(_)) => return Err(usage("--n applies only to --op frob")),
            };
            let k = ctx.k().unwrap_or(4);
            let family = derive_universal_polynomials(op, k)?;
            let text = format!(
                "{} at k = {k}: {} inputs, {} terms in total",
                op.name(),
                family.to_json()["inputs"].as_array().map_or(0, Vec::len),
                family.to_json()["polys"].as_array().map_or(0, |p| p.iter().map(|x| x.as_array().map_or(0, Vec::len)).sum())
            );
            Ok(Output::new(text, family.to_json()))
        }
    }
}

fn run_cartier(ctx: &Ctx, cmd: &CartierCmd) -> Result<Output, Failure> {
    let ring = ctx.ring("Z")?;
    match cmd {
        CartierCmd::Normalize { expr, vbound, order } => {
            let e = CartierExpr::parse(&ring, expr)?;
            let order = match order {
                Order::Left => RewriteOrder::LeftFirst,
                Order::Right => RewriteOrder::RightFirst,
            };
            let xi = cartier_normalize_with(&e, &ring, ctx.vbound(*vbound, 8), order)?;
            Ok(Output::new(xi.to_string(), xi.to_json()))
        }
        CartierCmd::Apply { expr, vbound } => {
            let a = ctx.witt_input()?;
            let e = CartierExpr::parse(a.ring(), expr)?;
            let xi = cartier_normalize_with(&e, a.ring(), ctx.vbound(*vbound, a.k() + 1), RewriteOrder::LeftFirst)?;
            Ok(witt_out(&cartier_apply(&xi, &a)?))
        }
    }
}

fn lambda_text(alg: &NilpotentAlgebra, u: &LambdaElement) -> String {
    let mut parts = vec!["1".to_string()];
    for (i, c) in u.coeffs().iter().enumerate() {
        if !alg.is_zero(c) {
            parts.push(format!("{} t^{}", elems_text(alg.ring(), c), i + 1));
        }
    }
    parts.join(" + ")
}

fn run_lambda(ctx: &Ctx, cmd: &LambdaCmd) -> Result<Output, Failure> {
    let (alg, out) = match cmd {
        LambdaCmd::Mul { algebra } => {
            let alg = ctx.algebra(algebra)?;
            let (u, v) = match ctx.read_input()? {
                Value::Array(items) if items.len() == 2 => {
                    (LambdaElement::from_json(&alg, &items[0])?, LambdaElement::from_json(&alg, &items[1])?)
                }
                _ => return Err(usage("--in must be a JSON array [u, v] of two Lambda elements")),
            };
            let w = lambda_mul(&alg, &u, &v)?;
            (alg, w)
        }
        LambdaCmd::Inv { algebra } => {
            let alg = ctx.algebra(algebra)?;
            let u = LambdaElement::from_json(&alg, &ctx.read_input()?)?;
            let w = lambda_inv(&alg, &u)?;
            (alg, w)
        }
    };
    Ok(Output::new(lambda_text(&alg, &out), out.to_json(&alg)))
}

fn run_legendre(ctx: &Ctx, cmd: &LegendreCmd) -> Result<Output, Failure> {
    match cmd {
        LegendreCmd::Omega { n } => {
            let c = legendre::legendre_omega_coeff(*n)?;
            Ok(Output::new(c.to_string(), json!({"n": n, "ring": c.spec().to_string(), "coeff": c.to_json()})))
        }
        LegendreCmd::Log => {
            let log = legendre::legendre_log(ctx.trunc(8))?;
            Ok(Output::new(log.to_string(), log.to_json()))
        }
        LegendreCmd::Sweep { max_n } => {
            let max_n = max_n.or(ctx.config.max_n).unwrap_or(legendre::DEFAULT_MAX_N);
            let rep = legendre::stienstra_sweep(max_n)?;
            let mut lines: Vec<String> = rep
                .checks
                .iter()
                .map(|c| {
                    let reduced: Vec<String> = c.reduced.iter().map(|x| x.to_string()).collect();
                    format!("n = {:>3}  mod {:>3}  {}  [{}]", c.n, c.modulus, if c.ok { "ok" } else { "FAILED" }, reduced.join(", "))
                })
                .collect();
            lines.push(format!(
                "{} of {} checks passed in {:.2?}",
                rep.checks.iter().filter(|c| c.ok).count(),
                rep.checks.len(),
                rep.elapsed
            ));
            Ok(Output::new(lines.join("\n"), rep.to_json()).checked(rep.ok()))
        }
        LegendreCmd::Hypergeom => {
            let trunc = ctx.trunc(18);
            let f = legendre::hypergeom_half(trunc)?;
            let order = legendre::hypergeom_residual_order(trunc)?;
            let text = match order {
                Some(d) => format!("{f}\nD(F) vanishes through degree {}", d as i64 - 1),
                None => format!("{f}\nD(F) vanishes through degree {}", trunc as i64 - 1),
            };
            Ok(Output::new(text, json!({"series": f.to_json(), "residual_order": order})))
        }
        LegendreCmd::Binom { n } => {
            let rep = legendre::central_binom_congruence(*n)?;
            let kind = if rep.modulus_prime { "prime" } else { "composite" };
            let verdict = if rep.is_pm_one { "+-1" } else { "not +-1" };
            let text = format!("binom({n}, {}) = {} mod {} ({kind} modulus, {verdict})", n / 2, rep.value, rep.modulus);
            Ok(Output::new(text, rep.to_json()).checked(rep.ok()))
        }
        LegendreCmd::Integrality => {
            let rep = legendre::legendre_integrality(ctx.trunc(8))?;
            let text = match &rep.first_failure {
                None => format!("coefficients lie in Z[1/2][l] through degree {}", rep.trunc),
                Some((e, c)) => format!("first coefficient outside Z[1/2][l]: x^{}y^{}: {c}", e[0], e[1]),
            };
            Ok(Output::new(text, rep.to_json()))
        }
    }
}

fn run_verify(ctx: &Ctx, suite: &[String], seed: Option<u64>, timing: bool) -> Result<Output, Failure> {
    let seed = seed.or(ctx.config.seed).unwrap_or(DEFAULT_SEED);
    let filter = (!suite.is_empty()).then_some(suite);
    let start = Instant::now();
    let rep = verify::verify(seed, filter, &LibraryOps).map_err(|e| usage(format!("--suite: {e}")))?;
    let timing = timing || ctx.config.timing.unwrap_or(false);
    let mut lines = Vec::new();
    for s in &rep.suites {
        lines.push(format!(
            "{:<12} {:>6} cases  {:>3} failures  {:.2?}",
            s.name,
            s.cases,
            s.failures.len(),
            s.elapsed
        ));
        for f in &s.failures {
            lines.push(format!("  {}: inputs {}; expected {}; got {}", f.case, f.inputs, f.expected, f.actual));
        }
    }
    lines.push(format!("seed {seed}: {} cases, {} failures in {:.2?}", rep.cases(), rep.failures().count(), start.elapsed()));
    Ok(Output::new(lines.join("\n"), rep.to_json(timing)).checked(rep.ok()))
}

fn run(cli: &Cli) -> Result<(Output, bool), Failure> {
    let config = Config::from_env().map_err(Failure::Usage)?;
    if let Some(c) = config.universal_ceiling {
        set_universal_ceiling(c);
    }
    let ctx = Ctx {
        cli_ring: cli.ring.clone(),
        trunc: cli.trunc,
        k: cli.k,
        input: cli.input.clone(),
        json: cli.json || config.json.unwrap_or(false),
        config,
    };
    let out = match &cli.command {
        Command::Fgl(c) => run_fgl(&ctx, c)?,
        Command::Witt(c) => run_witt(&ctx, c)?,
        Command::Cartier(c) => run_cartier(&ctx, c)?,
        Command::Lambda(c) => run_lambda(&ctx, c)?,
        Command::Legendre(c) => run_legendre(&ctx, c)?,
        Command::Verify { suite, seed, timing } => run_verify(&ctx, suite, *seed, *timing)?,
    };
    Ok((out, ctx.json))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, json)) => {
            if json {
                println!("{}", out.json);
            } else {
                println!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            eprintln!("run `cartier-lab --help` for the grammar");
            ExitCode::from(2)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
