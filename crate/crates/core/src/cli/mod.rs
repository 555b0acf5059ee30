//! The `nrb` command-line front end.
//!
//! Every command reads one instance document (or a list of them with
//! `--batch`) and writes a report. Exit codes: 0 when the condition holds or
//! a value was computed, 1 when it is violated (a certificate is attached),
//! 2 for input errors and 3 when an enumeration cap refuses the instance. In
//! batch mode the process exits with the most severe code.

mod input;
mod report;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

pub use input::{parse_instance, pooling_to_json, rum_to_json, Instance, PoolingDocument};
pub use report::{ExitCode, RunReport, Verdict};

use crate::blockmarschak::{bm_polynomials, hoffman_ratio};
use crate::duality::{gordan_decide, min_set_distance, GordanOutcome};
use crate::error::{Error, Result};
use crate::exactnum::{format_rational, parse_rational, Rational};
use crate::oracle::{exhaustive_rum_check, grid_max_gap, vertex_distance, ExhaustiveOutcome, GridSpec};
use crate::pooling::{
    check_condition_c, check_condition_cm, check_condition_cstar, check_event_minmax, pool_min_eps_additive,
    pool_min_eps_genest, pool_min_eps_normalized, PoolingInstance, PoolingKind, PoolingReport,
};
use crate::rum::{
    build_matrix, check_eps_arsp, check_eps_arsp_star, rum_min_eps, rum_residual_min_eps, stakes_gap, ArspCheck,
    ChoiceMatrix, RumInstance, RumKind, RumReport,
};
use report::{bracket, event_label, rational, rationals};

#[derive(Debug, Parser)]
#[command(name = "nrb", version, about = "Exact bounded-arbitrage checks for opinion pools and random utility models")]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// File listing one instance path per line; replaces the positional input.
    #[arg(long, global = true, value_name = "FILE_LIST")]
    pub batch: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Args)]
pub struct InputArg {
    /// Instance document (`-` reads standard input).
    pub file: Option<PathBuf>,
}

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Minimum ℓ₁ distance between the hulls of P and Q, with optimal stakes.
    Distance(InputArg),
    /// Separation by more than ε or proximity within ε, whichever holds.
    Gordan {
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        #[command(flatten)]
        input: InputArg,
    },
    /// Linear opinion pool computations.
    #[command(subcommand)]
    Pool(PoolCommand),
    /// Random utility computations.
    #[command(subcommand)]
    Rum(RumCommand),
    /// Brute-force cross-checks against the linear programs.
    #[command(subcommand)]
    Verify(VerifyCommand),
}

#[derive(Debug, Clone, Subcommand)]
pub enum PoolCommand {
    /// Smallest ε for which P is an ε-approximate pool of Q.
    MinEps {
        /// Contamination form P = (1−ε)Q_m + εR.
        #[arg(long, conflicts_with_all = ["normalized", "free"])]
        genest: bool,
        /// Additive form with weights m ≥ 0, Σm = 1.
        #[arg(long, conflicts_with = "free")]
        normalized: bool,
        /// Additive form with unnormalised weights m ≥ 0.
        #[arg(long)]
        free: bool,
        #[command(flatten)]
        input: InputArg,
    },
    /// Decide a Pareto-style condition at level ε.
    Check {
        #[arg(long, value_enum)]
        condition: Condition,
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        #[command(flatten)]
        input: InputArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Condition {
    C,
    Cstar,
    Cm,
    Minmax,
}

#[derive(Debug, Clone, Subcommand)]
pub enum RumCommand {
    /// Smallest ε with P₀ = Aπ + e, ‖e‖₁ ≤ ε (or the residual form).
    MinEps {
        /// Residual form P₀ = (1−ε)Aπ + εR₀.
        #[arg(long)]
        residual: bool,
        #[command(flatten)]
        input: InputArg,
    },
    /// Decide ε-ARSP (or ε-ARSP* with --star).
    Check {
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        #[arg(long)]
        star: bool,
        #[command(flatten)]
        input: InputArg,
    },
    /// Block–Marschak polynomials and their negative part.
    Bm(InputArg),
}

#[derive(Debug, Clone, Subcommand)]
pub enum VerifyCommand {
    /// Vertex enumeration against the distance program.
    Distance(InputArg),
    /// Grid lower bound on the best separating stakes.
    Grid {
        #[arg(long, default_value_t = 4)]
        resolution: u32,
        #[command(flatten)]
        input: InputArg,
    },
    /// Exhaustive tagged trial sequences against the ε-ARSP decision.
    Rum {
        #[arg(long, value_parser = rational_arg)]
        eps: Rational,
        #[arg(long, default_value_t = 2)]
        max_tag: u32,
        #[command(flatten)]
        input: InputArg,
    },
}

impl Command {
    fn input(&self) -> &InputArg {
        match self {
            Command::Distance(i) | Command::Gordan { input: i, .. } => i,
            Command::Pool(PoolCommand::MinEps { input, .. } | PoolCommand::Check { input, .. }) => input,
            Command::Rum(RumCommand::MinEps { input, .. } | RumCommand::Check { input, .. } | RumCommand::Bm(input)) => {
                input
            }
            Command::Verify(
                VerifyCommand::Distance(input) | VerifyCommand::Grid { input, .. } | VerifyCommand::Rum { input, .. },
            ) => input,
        }
    }

    /// Canonical echo of the invocation, without the input path.
    pub fn describe(&self) -> String {
        let eps = |e: &Rational| format_rational(e);
        match self {
            Command::Distance(_) => "distance".into(),
            Command::Gordan { eps: e, .. } => format!("gordan --eps {}", eps(e)),
            Command::Pool(PoolCommand::MinEps {
                genest,
                normalized,
                free,
                ..
            }) => {
                let flag = if *genest {
                    " --genest"
                } else if *free {
                    " --free"
                } else if *normalized {
                    " --normalized"
                } else {
                    ""
                };
                format!("pool min-eps{flag}")
            }
            Command::Pool(PoolCommand::Check { condition, eps: e, .. }) => {
                let c = condition.to_possible_value().expect("named variant");
                format!("pool check --condition {} --eps {}", c.get_name(), eps(e))
            }
            Command::Rum(RumCommand::MinEps { residual, .. }) => {
                format!("rum min-eps{}", if *residual { " --residual" } else { "" })
            }
            Command::Rum(RumCommand::Check { eps: e, star, .. }) => {
                format!("rum check --eps {}{}", eps(e), if *star { " --star" } else { "" })
            }
            Command::Rum(RumCommand::Bm(_)) => "rum bm".into(),
            Command::Verify(VerifyCommand::Distance(_)) => "verify distance".into(),
            Command::Verify(VerifyCommand::Grid { resolution, .. }) => {
                format!("verify grid --resolution {resolution}")
            }
            Command::Verify(VerifyCommand::Rum { eps: e, max_tag, .. }) => {
                format!("verify rum --eps {} --max-tag {max_tag}", eps(e))
            }
        }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// the report. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return e.exit_code();
        }
    };
    let paths = match collect_inputs(&cli) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(err, "nrb: {e}");
            return ExitCode::InputError.code();
        }
    };
    let reports: Vec<RunReport> = paths.iter().map(|p| execute(&cli.command, p)).collect();
    let exit = reports.iter().map(|r| r.exit).max().unwrap_or(ExitCode::Success);
    let rendered = match cli.format {
        Format::Json => {
            let value = if cli.batch.is_some() {
                Value::Array(reports.iter().map(RunReport::to_json).collect())
            } else {
                reports[0].to_json()
            };
            serde_json::to_string_pretty(&value).expect("reports serialize") + "\n"
        }
        Format::Text => reports.iter().map(RunReport::to_text).collect::<Vec<_>>().join("\n"),
    };
    let _ = out.write_all(rendered.as_bytes());
    exit.code()
}

fn collect_inputs(cli: &Cli) -> Result<Vec<PathBuf>> {
    let positional = cli.command.input().file.clone();
    match (&cli.batch, positional) {
        (Some(_), Some(_)) => Err(Error::input("give either an instance file or --batch, not both")),
        (None, None) => Err(Error::input("an instance file is required (or --batch FILE_LIST)")),
        (None, Some(p)) => Ok(vec![p]),
        (Some(list), None) => {
            let text = std::fs::read_to_string(list)
                .map_err(|e| Error::input(format!("cannot read {}: {e}", list.display())))?;
            let paths: Vec<PathBuf> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(PathBuf::from)
                .collect();
            if paths.is_empty() {
                return Err(Error::input(format!("{} lists no instances", list.display())));
            }
            Ok(paths)
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Error::input(format!("cannot read standard input: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))
}

/// Runs one command on one instance file.
pub fn execute(cmd: &Command, path: &Path) -> RunReport {
    let start = Instant::now();
    let name = cmd.describe();
    let input = Some(path.display().to_string());
    let result = read_input(path)
        .and_then(|text| parse_instance(&text))
        .and_then(|inst| dispatch(cmd, inst, &name));
    let mut report = match result {
        Ok(r) => r,
        Err(e) => RunReport::failure(name, None, &e),
    };
    report.input = input;
    report.timing_ms = start.elapsed().as_millis();
    report
}

fn pooling(inst: Instance) -> Result<PoolingDocument> {
    match inst {
        Instance::Pooling(d) => Ok(d),
        Instance::Rum(_) => Err(Error::input("this command needs a pooling instance")),
    }
}

fn rum(inst: Instance) -> Result<RumInstance> {
    match inst {
        Instance::Rum(r) => Ok(r),
        Instance::Pooling(_) => Err(Error::input("this command needs a rum instance")),
    }
}

fn dispatch(cmd: &Command, inst: Instance, name: &str) -> Result<RunReport> {
    match cmd {
        Command::Distance(_) => distance(&pooling(inst)?, name),
        Command::Gordan { eps, .. } => gordan(&pooling(inst)?, eps, name),
        Command::Pool(PoolCommand::MinEps {
            genest,
            normalized,
            free,
            ..
        }) => {
            let doc = pooling(inst)?;
            let pi = doc.instance()?;
            let report = if *genest {
                pool_min_eps_genest(&pi)?
            } else if *free {
                pool_min_eps_normalized(&pi, false)?
            } else if *normalized {
                pool_min_eps_normalized(&pi, true)?
            } else {
                pool_min_eps_additive(&pi)?
            };
            Ok(pool_value(&pi, &report, *free, name))
        }
        Command::Pool(PoolCommand::Check { condition, eps, .. }) => {
            let doc = pooling(inst)?;
            pool_check(&doc.instance()?, *condition, eps, name)
        }
        Command::Rum(RumCommand::MinEps { residual, .. }) => {
            let inst = rum(inst)?;
            let a = build_matrix(&inst)?;
            let report = if *residual {
                rum_residual_min_eps(&inst, &a)?
            } else {
                rum_min_eps(&inst, &a)?
            };
            let mut r = RunReport::new(name, None, Verdict::Value);
            rum_representation(&mut r, &inst, &a, &report);
            if report.kind == RumKind::Additive {
                rum_stakes_certificate(&mut r, &inst, &a, &report);
            }
            Ok(r)
        }
        Command::Rum(RumCommand::Check { eps, star, .. }) => {
            let inst = rum(inst)?;
            let a = build_matrix(&inst)?;
            let check = if *star {
                check_eps_arsp_star(&inst, &a, eps)?
            } else {
                check_eps_arsp(&inst, &a, eps)?
            };
            Ok(rum_check(&inst, &a, &check, eps, *star, name))
        }
        Command::Rum(RumCommand::Bm(_)) => rum_bm(&rum(inst)?, name),
        Command::Verify(VerifyCommand::Distance(_)) => {
            let doc = pooling(inst)?;
            let oracle = vertex_distance(&doc.p_set, &doc.q_set)?;
            let lp = min_set_distance(&doc.p_set, &doc.q_set)?.value;
            let agree = oracle == lp;
            let mut r = RunReport::new(name, None, if agree { Verdict::Holds } else { Verdict::Violated });
            r.epsilon_min = Some(lp.clone());
            attach_comparison(&mut r, json!({"oracle": rational(&oracle), "linear_program": rational(&lp), "agree": agree}));
            r.line(format!("vertex enumeration = {}, linear program = {}", format_rational(&oracle), format_rational(&lp)));
            Ok(r)
        }
        Command::Verify(VerifyCommand::Grid { resolution, .. }) => {
            let doc = pooling(inst)?;
            let grid = grid_max_gap(&doc.p_set, &doc.q_set, GridSpec::new(*resolution)?)?;
            let lp = min_set_distance(&doc.p_set, &doc.q_set)?.value;
            let sound = grid <= lp;
            let mut r = RunReport::new(name, None, if sound { Verdict::Holds } else { Verdict::Violated });
            r.epsilon_min = Some(lp.clone());
            attach_comparison(&mut r, json!({
                "grid_lower_bound": rational(&grid),
                "linear_program": rational(&lp),
                "resolution": resolution,
                "bound_holds": sound,
            }));
            r.line(format!(
                "grid bound {} ≤ distance {} at resolution {resolution}",
                format_rational(&grid),
                format_rational(&lp)
            ));
            Ok(r)
        }
        Command::Verify(VerifyCommand::Rum { eps, max_tag, .. }) => {
            let inst = rum(inst)?;
            let a = build_matrix(&inst)?;
            let exhaustive = exhaustive_rum_check(&inst, eps, *max_tag)?;
            let lp = check_eps_arsp(&inst, &a, eps)?;
            let cert_in_range = lp
                .certificate
                .as_ref()
                .is_some_and(|c| c.tags.iter().all(|t| t <= &(*max_tag).into()));
            let (found, agree) = match &exhaustive {
                ExhaustiveOutcome::HoldsUpTo(_) => (false, !cert_in_range),
                ExhaustiveOutcome::Violation(_) => (true, !lp.holds),
            };
            let mut r = RunReport::new(name, None, if agree { Verdict::Holds } else { Verdict::Violated });
            r.epsilon_min = Some(lp.report.epsilon_min.clone());
            let mut d = Map::new();
            d.insert("exhaustive_violation_found".into(), json!(found));
            d.insert("linear_program_holds".into(), json!(lp.holds));
            d.insert("agree".into(), json!(agree));
            if let ExhaustiveOutcome::Violation(t) = &exhaustive {
                d.insert("violation".into(), tag_map(&inst, &t.tags));
            }
            attach_comparison(&mut r, Value::Object(d));
            r.line(format!(
                "exhaustive search with tags ≤ {max_tag}: {}; linear program: {}",
                if found { "violation found" } else { "no violation" },
                if lp.holds { "holds" } else { "violated" }
            ));
            Ok(r)
        }
    }
}

/// A cross-check that agrees is reported as a representation; a
/// disagreement becomes the certificate.
fn attach_comparison(r: &mut RunReport, mut comparison: Value) {
    if r.verdict == Verdict::Holds {
        r.representation = Some(comparison);
    } else {
        comparison["verified"] = json!(true);
        r.certificate = Some(comparison);
    }
}

fn distance(doc: &PoolingDocument, name: &str) -> Result<RunReport> {
    let d = min_set_distance(&doc.p_set, &doc.q_set)?;
    let mut r = RunReport::new(name, None, Verdict::Value);
    r.epsilon_min = Some(d.value.clone());
    let pm = d.p_mixture(&doc.p_set)?;
    let qm = d.q_mixture(&doc.q_set)?;
    r.representation = Some(json!({
        "p_weights": rationals(&d.p_weights),
        "q_weights": rationals(&d.q_weights),
        "p_mixture": pm,
        "q_mixture": qm,
    }));
    r.certificate = Some(json!({
        "type": "stakes",
        "stakes": d.stakes,
        "gap": rational(&d.value),
        "verified": d.verify(&doc.p_set, &doc.q_set),
    }));
    r.line(format!("min ‖P − Q‖₁ = {} at P = {}, Q = {}", format_rational(&d.value), bracket(pm.weights()), bracket(qm.weights())));
    r.line(format!("f = {} gives min_P f·P − max_Q f·Q = {}", bracket(d.stakes.values()), format_rational(&d.value)));
    Ok(r)
}

fn gordan(doc: &PoolingDocument, eps: &Rational, name: &str) -> Result<RunReport> {
    let outcome = gordan_decide(&doc.p_set, &doc.q_set, eps)?;
    let verified = outcome.verify(&doc.p_set, &doc.q_set, eps);
    Ok(match outcome {
        GordanOutcome::Separation { stakes, gap } => {
            let mut r = RunReport::new(name, None, Verdict::Violated);
            r.epsilon_min = Some(gap.clone());
            r.line(format!(
                "separation: f = {} with min_P f·P − max_Q f·Q = {} > {}",
                bracket(stakes.values()),
                format_rational(&gap),
                format_rational(eps)
            ));
            r.certificate = Some(json!({"type": "stakes", "stakes": stakes, "gap": rational(&gap), "verified": verified}));
            r
        }
        GordanOutcome::Proximity {
            p_weights,
            q_weights,
            distance,
        } => {
            let mut r = RunReport::new(name, None, Verdict::Holds);
            r.epsilon_min = Some(distance.clone());
            r.line(format!(
                "proximity: ‖P_λ − Q_μ‖₁ = {} ≤ {} with λ = {}, μ = {}",
                format_rational(&distance),
                format_rational(eps),
                bracket(&p_weights),
                bracket(&q_weights)
            ));
            r.representation = Some(json!({
                "p_weights": rationals(&p_weights),
                "q_weights": rationals(&q_weights),
                "distance": rational(&distance),
                "verified": verified,
            }));
            r
        }
    })
}

fn pool_representation(r: &mut RunReport, inst: &PoolingInstance, report: &PoolingReport) {
    let mut m = Map::new();
    m.insert("kind".into(), serde_json::to_value(report.kind).expect("kind serializes"));
    m.insert("weights".into(), rationals(&report.weights));
    if let Some(e) = &report.error {
        m.insert("error".into(), rationals(&e.weights));
    }
    if let Some(res) = &report.residual {
        m.insert("residual".into(), json!(res));
    }
    m.insert("verified".into(), json!(report.verify(inst)));
    r.representation = Some(Value::Object(m));
    let eps = format_rational(&report.epsilon_min);
    match report.kind {
        PoolingKind::Additive => r.line(format!("P = Q_m + e, ‖e‖₁ = {eps}")),
        PoolingKind::NormalizedAdditive => r.line(format!("P = Σ m_i Q_i + e, ‖e‖₁ = {eps}")),
        PoolingKind::Genest => r.line(format!("P = (1−ε)Q_m + εR, ε = {eps}")),
    }
    r.line(format!("m = {}", bracket(&report.weights)));
    if let Some(e) = &report.error {
        r.line(format!("e = {}", bracket(&e.weights)));
    }
    if let Some(res) = &report.residual {
        r.line(format!("R = {}", bracket(res.weights())));
    }
}

/// What the dual stakes of a pooling report certify, and whether they do.
fn pool_certificate(inst: &PoolingInstance, report: &PoolingReport, free: bool) -> Option<(&'static str, bool)> {
    let f = report.stakes.as_ref()?.values();
    let p = &inst.planner;
    let qs = inst.opinions.members();
    let bounded = f.iter().all(|v| v.abs() <= Rational::one());
    Some(match report.kind {
        PoolingKind::Genest => (
            "y ≥ 0, Q_j·y ≥ 1 for every j, P·y = 1 − ε",
            f.iter().all(|v| !v.is_negative())
                && qs.iter().all(|q| q.expectation(f) >= Rational::one())
                && p.expectation(f) == Rational::one() - &report.epsilon_min,
        ),
        _ if free => (
            "|f| ≤ 1, Q_i·f ≤ 0 for every i, P·f = ε",
            bounded && qs.iter().all(|q| !q.expectation(f).is_positive()) && p.expectation(f) == report.epsilon_min,
        ),
        _ => (
            "|f| ≤ 1, P·f − max_Q Q·f = ε",
            bounded && p.expectation(f) - inst.opinions.max_expectation(f) == report.epsilon_min,
        ),
    })
}

fn pool_value(inst: &PoolingInstance, report: &PoolingReport, free: bool, name: &str) -> RunReport {
    let mut r = RunReport::new(name, None, Verdict::Value);
    r.epsilon_min = Some(report.epsilon_min.clone());
    pool_representation(&mut r, inst, report);
    if let (Some(f), Some((meaning, verified))) = (&report.stakes, pool_certificate(inst, report, free)) {
        r.certificate = Some(json!({
            "type": "stakes",
            "stakes": f,
            "meaning": meaning,
            "verified": verified,
        }));
        r.line(format!("certificate {} with {meaning}", bracket(f.values())));
    }
    r
}

fn pool_check(inst: &PoolingInstance, condition: Condition, eps: &Rational, name: &str) -> Result<RunReport> {
    match condition {
        Condition::C | Condition::Cstar => {
            let check = if condition == Condition::C {
                check_condition_c(inst, eps)?
            } else {
                check_condition_cstar(inst, eps)?
            };
            if check.holds {
                let report = if condition == Condition::C {
                    pool_min_eps_additive(inst)?
                } else {
                    pool_min_eps_genest(inst)?
                };
                let mut r = RunReport::new(name, None, Verdict::Holds);
                r.epsilon_min = Some(check.epsilon_min);
                pool_representation(&mut r, inst, &report);
                return Ok(r);
            }
            let w = check.witness.ok_or_else(|| Error::Internal("violated condition without witness".into()))?;
            let mut r = RunReport::new(name, None, Verdict::Violated);
            r.epsilon_min = Some(check.epsilon_min);
            let mut cert = serde_json::to_value(&w).expect("witness serializes");
            cert["type"] = json!("pareto_pair");
            cert["verified"] = json!(w.verify(inst, eps));
            r.certificate = Some(cert);
            r.line(format!("f = {}", bracket(w.f.values())));
            r.line(format!("g = {}", bracket(w.g.values())));
            r.line(format!("premise margins f·Q − g·Q = {}", bracket(&w.premise_margins)));
            r.line(format!("conclusion fails by {}", format_rational(&w.violation_amount)));
            Ok(r)
        }
        Condition::Cm => {
            let cm = check_condition_cm(&inst.planner, &inst.opinions, eps)?;
            let labels = inst.space.labels();
            let (e1, e2) = cm.worst_pair;
            let p1 = inst.planner.event_mass(e1);
            let p2 = inst.planner.event_mass(e2);
            let normalized = pool_min_eps_normalized(inst, true)?.epsilon_min;
            let mut r = RunReport::new(name, None, if cm.holds { Verdict::Holds } else { Verdict::Violated });
            r.epsilon_min = Some(cm.min_required_eps.clone());
            r.details = Some(json!({
                "normalized_epsilon": rational(&normalized),
                "delta": rational(&(&normalized - &cm.min_required_eps)),
            }));
            let pair = json!({
                "E1": event_label(e1, labels),
                "E2": event_label(e2, labels),
                "P(E1)": rational(&p1),
                "P(E2)": rational(&p2),
            });
            if cm.holds {
                r.representation = Some(json!({"min_required_eps": rational(&cm.min_required_eps), "worst_pair": pair}));
                r.line(format!(
                    "every unanimous event ranking is kept within {} ≤ {}",
                    format_rational(&cm.min_required_eps),
                    format_rational(eps)
                ));
            } else {
                let unanimous = inst.opinions.members().iter().all(|q| q.event_mass(e1) >= q.event_mass(e2));
                let margin = &p2 - &p1 - eps;
                let mut cert = pair;
                cert["type"] = json!("event_pair");
                cert["margin"] = rational(&margin);
                cert["verified"] = json!(unanimous && margin.is_positive());
                r.certificate = Some(cert);
                r.line(format!(
                    "every opinion ranks {} over {}, yet P gives {} < {} − {}",
                    event_label(e1, labels),
                    event_label(e2, labels),
                    format_rational(&p1),
                    format_rational(&p2),
                    format_rational(eps)
                ));
            }
            Ok(r)
        }
        Condition::Minmax => {
            let mm = check_event_minmax(&inst.planner, &inst.opinions)?;
            let labels = inst.space.labels();
            let holds = eps >= &mm.eps_i;
            let mut r = RunReport::new(name, None, if holds { Verdict::Holds } else { Verdict::Violated });
            r.epsilon_min = Some(mm.eps_i.clone());
            let e = mm.worst_event_i;
            let pe = inst.planner.event_mass(e);
            let hi = inst
                .opinions
                .members()
                .iter()
                .map(|q| q.event_mass(e))
                .max()
                .expect("nonempty opinions");
            if holds {
                r.representation = Some(json!({"eps_i": rational(&mm.eps_i), "eps_ii": rational(&mm.eps_ii)}));
                r.line(format!(
                    "P(E) ≤ max_i Q_i(E) + ε/2 and P(E) ≥ min_i Q_i(E) − ε/2 for every event at ε = {}",
                    format_rational(eps)
                ));
            } else {
                let half = eps / Rational::from_integer(2.into());
                let margin = &pe - &hi - &half;
                r.certificate = Some(json!({
                    "type": "event",
                    "event": event_label(e, labels),
                    "P(E)": rational(&pe),
                    "max_Q(E)": rational(&hi),
                    "margin": rational(&margin),
                    "verified": margin.is_positive(),
                }));
                r.line(format!(
                    "P({}) = {} > max_i Q_i + ε/2 = {}",
                    event_label(e, labels),
                    format_rational(&pe),
                    format_rational(&(&hi + &half))
                ));
            }
            r.details = Some(json!({"eps_i": rational(&mm.eps_i), "eps_ii": rational(&mm.eps_ii)}));
            Ok(r)
        }
    }
}

fn pair_map(inst: &RumInstance, values: &[Rational], skip_zero: bool) -> Value {
    Value::Object(
        values
            .iter()
            .enumerate()
            .filter(|(_, v)| !(skip_zero && v.is_zero()))
            .map(|(i, v)| (inst.pair_label(i), rational(v)))
            .collect(),
    )
}

fn tag_map(inst: &RumInstance, tags: &[num_bigint::BigInt]) -> Value {
    Value::Object(
        tags.iter()
            .enumerate()
            .map(|(i, t)| (inst.pair_label(i), json!(t.to_string())))
            .collect(),
    )
}

fn rum_representation(r: &mut RunReport, inst: &RumInstance, a: &ChoiceMatrix, report: &RumReport) {
    r.epsilon_min = Some(report.epsilon_min.clone());
    let support = report.preference_support(inst, a);
    let pi: Map<String, Value> = support.iter().map(|(k, v)| (k.clone(), rational(v))).collect();
    let mut m = Map::new();
    m.insert("kind".into(), serde_json::to_value(report.kind).expect("kind serializes"));
    if report.pi.is_some() {
        m.insert("pi".into(), Value::Object(pi));
    }
    if let Some(e) = &report.error {
        m.insert("error".into(), pair_map(inst, e, true));
    }
    if let Some(res) = &report.residual {
        m.insert("residual".into(), pair_map(inst, res, false));
    }
    m.insert("verified".into(), json!(report.verify(inst, a)));
    r.representation = Some(Value::Object(m));
    let eps = format_rational(&report.epsilon_min);
    match report.kind {
        RumKind::Additive => r.line(format!("P₀ = Aπ + e, ‖e‖₁ = {eps}")),
        RumKind::Residual => r.line(format!("P₀ = (1−ε)Aπ + εR₀, ε = {eps}")),
    }
    for (label, w) in &support {
        r.line(format!("π({label}) = {}", format_rational(w)));
    }
}

fn rum_stakes_certificate(r: &mut RunReport, inst: &RumInstance, a: &ChoiceMatrix, report: &RumReport) {
    let gap = stakes_gap(inst, a, &report.stakes);
    let bounded = report.stakes.iter().all(|z| z.abs() <= Rational::one());
    r.certificate = Some(json!({
        "type": "stakes",
        "z": pair_map(inst, &report.stakes, false),
        "gap": rational(&gap),
        "meaning": "|z| ≤ 1 and P₀·z − max_≻ a_≻·z = ε",
        "verified": bounded && gap == report.epsilon_min,
    }));
}

fn rum_check(inst: &RumInstance, a: &ChoiceMatrix, check: &ArspCheck, eps: &Rational, star: bool, name: &str) -> RunReport {
    if check.holds {
        let mut r = RunReport::new(name, None, Verdict::Holds);
        rum_representation(&mut r, inst, a, &check.report);
        return r;
    }
    let mut r = RunReport::new(name, None, Verdict::Violated);
    r.epsilon_min = Some(check.report.epsilon_min.clone());
    let Some(t) = &check.certificate else {
        return RunReport::failure(name, None, &Error::Internal("violation without certificate".into()));
    };
    let ev = t.evaluate(inst, a);
    let (bound, margin) = if star {
        let menus = Rational::from_integer(inst.menu_count().into());
        let bound = (Rational::one() - eps) * &ev.best_ordering + menus * eps * Rational::from_integer(ev.max_tag.clone());
        (bound, t.arsp_star_violation(inst, a, eps))
    } else {
        let bound = &ev.best_ordering + Rational::from_integer(ev.width.clone()) * eps / Rational::from_integer(2.into());
        (bound, t.arsp_violation(inst, a, eps))
    };
    r.certificate = Some(json!({
        "type": "tagged_trial_sequence",
        "tags": tag_map(inst, &t.tags),
        "width": t.width.to_string(),
        "observed": rational(&ev.observed),
        "best_ordering": rational(&ev.best_ordering),
        "bound": rational(&bound),
        "margin": margin.as_ref().map(rational),
        "verified": margin.is_some(),
    }));
    let form = if star {
        "(1−ε) max_≻ Σ a_≻t + (2^N−1) ε max t"
    } else {
        "max_≻ Σ a_≻t + w_T ε/2"
    };
    r.line(format!(
        "Σ P₀t = {} > {form} = {}",
        format_rational(&ev.observed),
        format_rational(&bound)
    ));
    let nonzero: Vec<String> = t
        .tags
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, v)| format!("t({}) = {v}", inst.pair_label(i)))
        .collect();
    r.line(nonzero.join(", "));
    r
}

fn rum_bm(inst: &RumInstance, name: &str) -> Result<RunReport> {
    let a = build_matrix(inst)?;
    let k = bm_polynomials(inst);
    let diag = hoffman_ratio(inst, &a)?;
    let mut r = RunReport::new(name, None, Verdict::Value);
    r.epsilon_min = Some(diag.epsilon_min.clone());
    r.details = Some(json!({
        "bm": pair_map(inst, &k.values, false),
        "negative_norm": rational(&diag.negative_norm),
        "hoffman_ratio": diag.ratio.as_ref().map(rational),
    }));
    r.line(format!("‖(BP₀)⁻‖₁ = {}", format_rational(&diag.negative_norm)));
    match &diag.ratio {
        Some(ratio) => r.line(format!("‖P₀ − Aπ‖₁ / ‖(BP₀)⁻‖₁ = {}", format_rational(ratio))),
        None => r.line("no negative Block–Marschak polynomial"),
    }
    for (i, v) in k.values.iter().enumerate().filter(|(_, v)| v.is_negative()) {
        r.line(format!("K({}) = {}", inst.pair_label(i), format_rational(v)));
    }
    Ok(r)
}
