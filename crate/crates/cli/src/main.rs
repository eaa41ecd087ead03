//! `gpequi`: parse -> evaluate -> analyze -> report for generalized
//! polynomials, with a scenario catalog reproducing the shipped examples.
//!
//! Exit codes: 0 on success/pass, 2 when a graded check fails, 1 on usage,
//! parse, or precision errors.

use clap::{Args, Parser, Subcommand};
use gpequi_core::dist;
use gpequi_core::gp::{self, GPExpr};
use gpequi_core::pp;
use gpequi_core::primes;
use gpequi_core::recurrence::{self, Prop68Verdict};
use gpequi_core::rewrite;
use gpequi_core::{PrecisionConfig, RealConst};
use num_rational::BigRational;
use serde_json::{json, Value as Json};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gpequi", version, about = "generalized-polynomial equidistribution toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    /// Starting working precision in bits.
    #[arg(long, global = true, default_value_t = 128)]
    bits: u32,
    /// Precision-ladder cap in bits (env GPEQUI_MAX_BITS overrides).
    #[arg(long, global = true, default_value_t = 16384)]
    max_bits: u32,
    /// Output format.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Seed for sampled verifiers.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write a (N, discrepancy) series for external plotting.
    #[arg(long, global = true)]
    emit_plot_data: Option<std::path::PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate an expression at an integer argument.
    Eval {
        expr: String,
        #[arg(long, allow_negative_numbers = true)]
        n: i64,
    },
    /// Uniform-distribution statistics of {expr * lambda} over [M, N].
    Ud {
        expr: String,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long = "N")]
        n: i64,
        #[arg(long = "M", default_value_t = 1)]
        m: i64,
        #[arg(long, default_value_t = 3)]
        h_max: i64,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Windowed well-distribution test over [-N, N].
    Wd {
        expr: String,
        #[arg(long)]
        lambda: String,
        #[arg(long = "N")]
        n: i64,
        #[arg(long)]
        window: usize,
    },
    /// Natural density of |expr(n)| < bound over [-N, N], plus a window
    /// lower bound for the upper Banach density.
    Density {
        expr: String,
        #[arg(long)]
        lt: String,
        #[arg(long = "N")]
        n: i64,
        #[arg(long)]
        window: Option<usize>,
    },
    /// Per-threshold densities of |expr(n)| < A over [-N, N].
    Adequacy {
        expr: String,
        #[arg(long, value_delimiter = ',')]
        thresholds: Vec<String>,
        #[arg(long = "N")]
        n: i64,
    },
    /// Randomized verification of one of the mod-1 identities.
    IdentityCheck {
        name: String,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1e-20)]
        tol: f64,
    },
    /// Replay the worked rewrite trace and verify each step.
    RewriteTrace,
    /// Verify a canonical-form document against direct evaluation.
    CanonicalVerify {
        #[arg(long)]
        cf: std::path::PathBuf,
        #[arg(long)]
        expr: String,
        #[arg(long, default_value_t = -10_000, allow_negative_numbers = true)]
        from: i64,
        #[arg(long, default_value_t = 10_000, allow_negative_numbers = true)]
        to: i64,
    },
    /// Prime-indexed experiments.
    Primes {
        #[command(subcommand)]
        command: PrimesCommand,
    },
    /// Recurrence experiments and the scenario catalog.
    Recurrence {
        #[command(subcommand)]
        command: RecurrenceCommand,
    },
    /// Run a named scenario (alias for `recurrence scenario`).
    Scenario {
        name: String,
        #[arg(long = "N")]
        n: Option<i64>,
    },
}

#[derive(Subcommand)]
enum PrimesCommand {
    /// Uniform-distribution statistics of {expr(p) lambda} over primes <= N.
    Ud {
        expr: String,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long = "N")]
        n: u64,
        #[arg(long, default_value_t = 20)]
        bins: usize,
    },
    /// Compare the prime average with the weighted integer average.
    CompareLambda {
        expr: String,
        #[arg(long = "N")]
        n: u64,
    },
    /// W-trick comparison; scans primorial moduli unless --w is given.
    WTrick {
        expr: String,
        #[arg(long = "N")]
        n: u64,
        #[arg(long)]
        w: Option<u64>,
        #[arg(long, default_value_t = 5)]
        m_max: u64,
    },
    /// Successive-difference decay of prime averages along an N ladder.
    Cauchy {
        expr: String,
        #[arg(long = "N-list", value_delimiter = ',')]
        n_list: Vec<u64>,
    },
}

#[derive(Subcommand)]
enum RecurrenceCommand {
    /// Density of n <= N with dist(expr(n) * alpha_i, Z) < eps for all i.
    Density {
        expr: String,
        #[arg(long, value_delimiter = ',')]
        alphas: Vec<String>,
        #[arg(long)]
        eps: String,
        #[arg(long = "N")]
        n: i64,
    },
    /// Run a named scenario against its frozen expectations.
    Scenario {
        name: String,
        #[arg(long = "N")]
        n: Option<i64>,
    },
    /// Classify a real polynomial against the recurrence-friendly shapes.
    Prop68 { poly: String },
    /// List the scenario catalog.
    List,
}

struct Failure {
    code: u8,
    msg: String,
}

fn usage_err(msg: impl Into<String>) -> Failure {
    Failure { code: 1, msg: msg.into() }
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 1, msg: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut common = cli.common.clone();
    if let Ok(v) = std::env::var("GPEQUI_MAX_BITS") {
        match v.parse::<u32>() {
            Ok(b) => common.max_bits = b,
            Err(_) => {
                eprintln!("GPEQUI_MAX_BITS must be an integer; got `{}`", v);
                return ExitCode::from(1);
            }
        }
    }
    match run(cli.command, &common) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            if f.code == 1 {
                eprintln!(
                    "expression grammar: expr := term ((+|-) term)*; term := factor ((*|/) factor)*; \
                     factor := base (^ nat)?; base := rational | sqrt(r) | pi | log(r) | \
                     liouville(j) | n | (expr) | [expr] | {{expr}}"
                );
            }
            ExitCode::from(f.code)
        }
    }
}

fn cfg_of(common: &Common) -> PrecisionConfig {
    PrecisionConfig { start_bits: common.bits.max(32), max_bits: common.max_bits.max(common.bits.max(32)) }
}

fn parse_expr(text: &str) -> Result<GPExpr, Failure> {
    gp::parse(text).map_err(|e| usage_err(format!("bad expression: {}", e)))
}

fn parse_lambda(text: &str) -> Result<RealConst, Failure> {
    gp::parse_const(text).map_err(|e| usage_err(format!("bad constant: {}", e)))
}

fn parse_rational(text: &str) -> Result<BigRational, Failure> {
    parse_lambda(text)?
        .as_exact_rational()
        .ok_or_else(|| usage_err(format!("`{}` must be rational", text)))
}

/// Prints the envelope and returns the exit code implied by `pass`.
fn emit(command: &str, config: Json, result: Json, pass: Option<bool>) -> u8 {
    let envelope = json!({
        "command": command,
        "config": config,
        "result": result,
        "pass": pass,
    });
    println!("{}", serde_json::to_string_pretty(&envelope).expect("serialize"));
    match pass {
        Some(false) => 2,
        _ => 0,
    }
}

fn emit_csv_points(points: &[f64], lo: i64) {
    println!("n,value");
    for (i, v) in points.iter().enumerate() {
        println!("{},{}", lo + i as i64, v);
    }
}

fn write_plot_series(path: &std::path::Path, series: &[(i64, f64)]) -> Result<(), Failure> {
    let mut out = String::from("N,discrepancy\n");
    for (n, d) in series {
        out.push_str(&format!("{},{}\n", n, d));
    }
    std::fs::write(path, out).map_err(|e| usage_err(format!("cannot write plot data: {}", e)))?;
    Ok(())
}

fn run(command: Command, common: &Common) -> Result<u8, Failure> {
    let cfg = cfg_of(common);
    match command {
        Command::Eval { expr, n } => {
            let e = parse_expr(&expr)?;
            let v = e.eval(n, &cfg).map_err(|err| Failure { code: 1, msg: err.to_string() })?;
            if common.format == "json" {
                let rendered = match v.as_exact() {
                    Some(r) => json!({ "exact": r.to_string(), "value": v.to_f64() }),
                    None => json!({ "value": v.to_f64(), "enclosure_width": v.width_upper() }),
                };
                Ok(emit("eval", json!({ "expr": expr, "n": n }), rendered, None))
            } else {
                match v.as_integer() {
                    Some(k) => println!("{}", k),
                    None => match v.as_exact() {
                        Some(r) => println!("{}", r),
                        None => println!("{}", v.to_f64()),
                    },
                }
                Ok(0)
            }
        }
        Command::Ud { expr, lambda, n, m, h_max, bins } => {
            let e = parse_expr(&expr)?;
            let l = lambda.as_deref().map(parse_lambda).transpose()?;
            if m > n {
                return Err(usage_err("--M must be <= --N"));
            }
            let rep = dist::ud_report(&e, l.as_ref(), m, n, h_max, bins, &cfg)?;
            if let Some(path) = &common.emit_plot_data {
                let pts = dist::frac_points(&e, l.as_ref(), m, n, &cfg)?;
                let mut series = Vec::new();
                let mut k = 1000usize.min(pts.len());
                while k <= pts.len() {
                    series.push((m + k as i64 - 1, dist::star_discrepancy_1d(&pts[..k])));
                    if k == pts.len() {
                        break;
                    }
                    k = (k * 10).min(pts.len());
                }
                write_plot_series(path, &series)?;
            }
            if common.format == "csv" {
                let pts = dist::frac_points(&e, l.as_ref(), m, n, &cfg)?;
                emit_csv_points(&pts, m);
                return Ok(0);
            }
            Ok(emit(
                "ud",
                json!({ "expr": expr, "lambda": lambda, "N": n, "M": m }),
                serde_json::to_value(&rep).expect("report"),
                None,
            ))
        }
        Command::Wd { expr, lambda, n, window } => {
            let e = parse_expr(&expr)?;
            let l = parse_lambda(&lambda)?;
            let rep = dist::wd_test(&e, &l, n, window, &cfg)?;
            Ok(emit(
                "wd",
                json!({ "expr": expr, "lambda": lambda, "N": n, "window": window }),
                serde_json::to_value(&rep).expect("report"),
                None,
            ))
        }
        Command::Density { expr, lt, n, window } => {
            let e = parse_expr(&expr)?;
            let bound = parse_rational(&lt)?;
            let d = dist::natural_density(&e, n, &cfg, |v| dist::abs_below(v, &bound))?;
            let banach = match window {
                Some(w) => {
                    Some(dist::banach_density_lower(&e, n, w, &cfg, |v| dist::abs_below(v, &bound))?)
                }
                None => None,
            };
            Ok(emit(
                "density",
                json!({ "expr": expr, "lt": lt, "N": n, "window": window }),
                json!({ "natural": d, "banach_lower": banach }),
                None,
            ))
        }
        Command::Adequacy { expr, thresholds, n } => {
            let e = parse_expr(&expr)?;
            let ts = thresholds
                .iter()
                .map(|t| parse_rational(t))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = dist::adequacy_test(&e, &ts, n, &cfg)?;
            Ok(emit(
                "adequacy",
                json!({ "expr": expr, "thresholds": thresholds, "N": n }),
                json!({ "densities": rows.iter().map(|(a, d)| json!({"threshold": a, "density": d})).collect::<Vec<_>>() }),
                None,
            ))
        }
        Command::IdentityCheck { name, trials, tol } => {
            let id = rewrite::identity_by_name(&name)
                .map_err(|e| usage_err(e.to_string()))?;
            let rep = rewrite::verify_congruence(
                &id,
                &rewrite::VerifyConfig {
                    trials,
                    tol,
                    bits: common.bits,
                    seed: common.seed,
                    boundary_share: 0.2,
                },
            )?;
            let pass = rep.pass;
            Ok(emit(
                "identity-check",
                json!({ "id": name, "trials": trials, "tol": tol, "bits": common.bits, "seed": common.seed }),
                serde_json::to_value(&rep).expect("report"),
                Some(pass),
            ))
        }
        Command::RewriteTrace => {
            let trace = rewrite::apply_worked_example()?;
            let pass = trace.pass;
            Ok(emit(
                "rewrite-trace",
                json!({}),
                serde_json::to_value(&trace).expect("trace"),
                Some(pass),
            ))
        }
        Command::CanonicalVerify { cf, expr, from, to } => {
            let text = std::fs::read_to_string(&cf)
                .map_err(|e| usage_err(format!("cannot read {}: {}", cf.display(), e)))?;
            let form = pp::canonical_form_from_json(&text)?;
            let e = parse_expr(&expr)?;
            let rep = pp::verify_canonical(&e, &form, from, to, &cfg)?;
            let pass = rep.pass;
            Ok(emit(
                "canonical-verify",
                json!({ "cf": cf.display().to_string(), "expr": expr, "from": from, "to": to }),
                serde_json::to_value(&rep).expect("report"),
                Some(pass),
            ))
        }
        Command::Primes { command } => run_primes(command, common, &cfg),
        Command::Recurrence { command } => run_recurrence(command, common, &cfg),
        Command::Scenario { name, n } => run_recurrence(
            RecurrenceCommand::Scenario { name, n },
            common,
            &cfg,
        ),
    }
}

fn run_primes(command: PrimesCommand, _common: &Common, cfg: &PrecisionConfig) -> Result<u8, Failure> {
    match command {
        PrimesCommand::Ud { expr, lambda, n, bins } => {
            let e = parse_expr(&expr)?;
            let l = lambda.as_deref().map(parse_lambda).transpose()?;
            let rep = primes::prime_seq_stats(&e, l.as_ref(), n, bins, cfg)?;
            Ok(emit(
                "primes ud",
                json!({ "expr": expr, "lambda": lambda, "N": n }),
                serde_json::to_value(&rep).expect("report"),
                None,
            ))
        }
        PrimesCommand::CompareLambda { expr, n } => {
            let e = parse_expr(&expr)?;
            let rep = primes::prime_avg_vs_lambda_avg(&e, n, cfg)?;
            Ok(emit(
                "primes compare-lambda",
                json!({ "expr": expr, "N": n }),
                serde_json::to_value(&rep).expect("report"),
                None,
            ))
        }
        PrimesCommand::WTrick { expr, n, w, m_max } => {
            let e = parse_expr(&expr)?;
            let reports = match w {
                Some(w) => vec![primes::w_trick_compare(&e, w, n, cfg)?],
                None => primes::w_trick_scan(&e, m_max, n, cfg)?,
            };
            let best = reports
                .iter()
                .min_by(|a, b| a.gap.total_cmp(&b.gap))
                .map(|r| r.w);
            Ok(emit(
                "primes w-trick",
                json!({ "expr": expr, "N": n, "W": w, "m_max": m_max }),
                json!({ "reports": reports, "best_w": best }),
                None,
            ))
        }
        PrimesCommand::Cauchy { expr, n_list } => {
            if n_list.len() < 2 {
                return Err(usage_err("--N-list needs at least two entries"));
            }
            let e = parse_expr(&expr)?;
            let rep = primes::cauchy_check_prime_avg(&e, &n_list, cfg)?;
            Ok(emit(
                "primes cauchy",
                json!({ "expr": expr, "N_list": n_list }),
                serde_json::to_value(&rep).expect("report"),
                None,
            ))
        }
    }
}

fn run_recurrence(
    command: RecurrenceCommand,
    _common: &Common,
    cfg: &PrecisionConfig,
) -> Result<u8, Failure> {
    match command {
        RecurrenceCommand::Density { expr, alphas, eps, n } => {
            let e = parse_expr(&expr)?;
            let als = alphas
                .iter()
                .map(|a| parse_lambda(a))
                .collect::<Result<Vec<_>, _>>()?;
            let eps = parse_rational(&eps)?;
            let rep = recurrence::simultaneous_smallness(&e, &als, &eps, n, cfg)?;
            Ok(emit(
                "recurrence density",
                json!({ "expr": expr, "alphas": alphas, "eps": eps.to_string(), "N": n }),
                serde_json::to_value(&rep).expect("report"),
                None,
            ))
        }
        RecurrenceCommand::Scenario { name, n } => {
            let outcome = recurrence::run_scenario(&name, n, cfg)?;
            let pass = outcome.pass;
            Ok(emit(
                "recurrence scenario",
                json!({ "name": name, "N": outcome.n }),
                serde_json::to_value(&outcome).expect("outcome"),
                Some(pass),
            ))
        }
        RecurrenceCommand::Prop68 { poly } => {
            let e = parse_expr(&poly)?;
            let coeffs = poly_coeffs_for_prop68(&e)?;
            let verdict = recurrence::prop_6_8_condition_v(&coeffs)?;
            let label = match &verdict {
                Prop68Verdict::CaseA { .. } => "CaseA",
                Prop68Verdict::CaseB { .. } => "CaseB",
                Prop68Verdict::Neither { .. } => "Neither",
            };
            Ok(emit(
                "recurrence prop68",
                json!({ "poly": poly }),
                json!({ "verdict": label, "detail": serde_json::to_value(&verdict).expect("verdict") }),
                None,
            ))
        }
        RecurrenceCommand::List => {
            let names = recurrence::scenario_names();
            Ok(emit(
                "recurrence list",
                json!({}),
                json!({ "scenarios": names.iter().map(|(n, c)| json!({"name": n, "claim": c})).collect::<Vec<_>>() }),
                None,
            ))
        }
    }
}

/// Extract ascending coefficient lists from a bracket-free polynomial
/// expression.
fn poly_coeffs_for_prop68(e: &GPExpr) -> Result<Vec<RealConst>, Failure> {
    use gpequi_core::gp::GrowthDecomposition;
    if e.has_brackets() {
        return Err(usage_err("prop68 takes a bracket-free polynomial (the outer floor is implied)"));
    }
    match gp::poly_growth_decompose(e) {
        GrowthDecomposition::Terms(terms) => {
            let deg = terms.iter().map(|(i, _)| *i).max().unwrap_or(0) as usize;
            let mut coeffs = vec![RealConst::integer(0); deg + 1];
            for (i, b) in terms {
                match b {
                    GPExpr::Const(c) => coeffs[i as usize] = c,
                    other => {
                        return Err(usage_err(format!(
                            "coefficient at degree {} is not constant: {}",
                            i, other
                        )))
                    }
                }
            }
            Ok(coeffs)
        }
        GrowthDecomposition::Unsupported => Err(usage_err("polynomial shape not supported")),
    }
}
