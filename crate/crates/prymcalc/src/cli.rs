//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a verification ran and failed (a proof
//! search came back empty, a replay rejected, a suite entry failed), 2 for
//! usage and parameter errors. `--json` switches every command to
//! machine-readable output; `--out FILE` redirects it.

use clap::{Args, Parser, Subcommand, ValueEnum};
use prymcalc::brill_noether::{
    divisorial_pairs, hurwitz_slope, prym_secant_expected_dim, rho, secant_expected_dim,
};
use prymcalc::divisor::{
    nonstandard_pencil_vector, solve_difference_class, srange_coefficients, standard_pencil_vector,
};
use prymcalc::effectivity::{
    check_no_moving_decomposition, peel_base_curves, prove_non_effective, replay_certificate,
    ProofOutcome, DEFAULT_MAX_DEPTH,
};
use prymcalc::exec::ExecMode;
use prymcalc::lattice::{nonstandard, standard, LatticeModel};
use prymcalc::rational::format_rat;
use prymcalc::report::verify_all;
use serde_json::{json, Value};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "prymcalc",
    version,
    about = "Exact lattice, dimension and divisor-class calculations with replayable certificates"
)]
struct Cli {
    /// Emit JSON instead of human-readable text
    #[arg(long, global = true)]
    json: bool,
    /// Write the output to FILE instead of stdout
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimension formulas for linear series and secant loci
    Bn {
        #[command(subcommand)]
        cmd: BnCmd,
    },
    /// Lattice-model pairings, membership, and certified non-effectivity
    Lattice {
        #[command(subcommand)]
        cmd: LatticeCmd,
    },
    /// Divisor-class vectors and the difference-class solver
    Class {
        #[command(subcommand)]
        cmd: ClassCmd,
    },
    /// Run every verification suite and report per-entry results
    VerifyAll {
        /// Largest lattice parameter for the certificate suites
        #[arg(long, default_value_t = 10)]
        max_i: i64,
        /// Largest genus for the decomposition suite
        #[arg(long, default_value_t = 20)]
        max_g: i64,
    },
}

#[derive(Subcommand)]
enum BnCmd {
    /// Classical dimension count g - (r+1)(g - d + r)
    Rho {
        #[arg(long)]
        g: i64,
        #[arg(long)]
        r: i64,
        #[arg(long)]
        d: i64,
    },
    /// Expected secant-locus dimension; pass --r for the plain count or
    /// --g for the rank-(g-2) count on a genus-g curve
    Expdim {
        #[arg(long)]
        e: i64,
        #[arg(long)]
        f: i64,
        #[arg(long, conflicts_with = "g")]
        r: Option<i64>,
        #[arg(long)]
        g: Option<i64>,
    },
    /// All (e, f) with a divisorial secant locus at genus g
    Pairs {
        #[arg(long)]
        g: i64,
    },
    /// Slope bound 6 + 12/(g+1)
    Slope {
        #[arg(long)]
        g: i64,
    },
}

#[derive(Subcommand)]
enum LatticeCmd {
    /// Intersection pairing of two classes (pass --class twice)
    Pair(LatticeOpts),
    /// Whether a class lies in the model's lattice
    Member(LatticeOpts),
    /// Search for a replayable non-effectivity certificate
    Prove(LatticeOpts),
    /// Subtract known base curves until the class is stable
    Peel(LatticeOpts),
    /// Check that every decomposition keeps a rigid part
    Decomp(LatticeOpts),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Standard,
    StandardHyp,
    Nonstandard,
    NonstandardHyp,
}

#[derive(Args)]
struct LatticeOpts {
    /// Which lattice family to instantiate
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Genus parameter (standard families)
    #[arg(long)]
    g: Option<i64>,
    /// Index parameter (nonstandard families)
    #[arg(long)]
    i: Option<i64>,
    /// Class expression such as "L - 2*E - e"; repeat for pairings
    #[arg(long = "class", value_name = "EXPR")]
    class: Vec<String>,
    /// Recursion budget for prove (default 3)
    #[arg(long)]
    depth: Option<u32>,
}

#[derive(Subcommand)]
enum ClassCmd {
    /// Test-curve vectors of the two pencils at genus g
    Pencils {
        #[arg(long)]
        g: i64,
    },
    /// Solve for the difference-divisor class at index i
    Solve {
        #[arg(long)]
        i: i64,
    },
    /// Leading coefficients of the secant-range expansion
    Srange {
        #[arg(long)]
        i: i64,
    },
}

struct CliError {
    message: String,
    code: i32,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            message: message.into(),
            code: EXIT_USAGE,
        }
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> CliError {
        CliError::usage(e.to_string())
    }
}

/// Text plus JSON renderings of one command's result, with the process
/// exit code it implies.
struct Outcome {
    text: String,
    json: Value,
    code: i32,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Outcome {
        Outcome {
            text,
            json,
            code: EXIT_OK,
        }
    }
}

pub fn run() -> i32 {
    let cli = Cli::parse();
    let outcome = match dispatch(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}", e.message);
            return e.code;
        }
    };
    let rendered = if cli.json {
        let mut s = serde_json::to_string_pretty(&outcome.json).expect("output serializes");
        s.push('\n');
        s
    } else {
        outcome.text
    };
    match &cli.out {
        None => print!("{rendered}"),
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return EXIT_USAGE;
            }
        }
    }
    outcome.code
}

fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Bn { cmd } => run_bn(cmd),
        Command::Lattice { cmd } => run_lattice(cmd),
        Command::Class { cmd } => run_class(cmd),
        Command::VerifyAll { max_i, max_g } => run_verify_all(*max_i, *max_g),
    }
}

fn run_bn(cmd: &BnCmd) -> Result<Outcome, CliError> {
    match cmd {
        BnCmd::Rho { g, r, d } => {
            let value = rho(*g, *r, *d);
            Ok(Outcome::ok(
                format!("rho(g={g}, r={r}, d={d}) = {value}\n"),
                json!({ "g": g, "r": r, "d": d, "rho": value }),
            ))
        }
        BnCmd::Expdim { e, f, r, g } => match (r, g) {
            (Some(r), None) => {
                let value = secant_expected_dim(*e, *f, *r)?;
                Ok(Outcome::ok(
                    format!("expdim(e={e}, f={f}, r={r}) = {value}\n"),
                    json!({ "e": e, "f": f, "r": r, "expdim": value }),
                ))
            }
            (None, Some(g)) => {
                let value = prym_secant_expected_dim(*g, *e, *f)?;
                Ok(Outcome::ok(
                    format!("expdim(g={g}, e={e}, f={f}) = {value}\n"),
                    json!({ "g": g, "e": e, "f": f, "expdim": value }),
                ))
            }
            _ => Err(CliError::usage("pass exactly one of --r or --g")),
        },
        BnCmd::Pairs { g } => {
            let pairs = divisorial_pairs(*g)?;
            let mut text = format!("divisorial pairs at g={g}:\n");
            if pairs.is_empty() {
                text.push_str("  (none)\n");
            }
            for (e, f) in &pairs {
                text.push_str(&format!("  (e, f) = ({e}, {f})\n"));
            }
            let list: Vec<Value> = pairs.iter().map(|(e, f)| json!({ "e": e, "f": f })).collect();
            Ok(Outcome::ok(text, json!({ "g": g, "pairs": list })))
        }
        BnCmd::Slope { g } => {
            let value = hurwitz_slope(*g)?;
            Ok(Outcome::ok(
                format!("slope(g={g}) = {}\n", format_rat(&value)),
                json!({ "g": g, "slope": format_rat(&value) }),
            ))
        }
    }
}

fn build_model(opts: &LatticeOpts) -> Result<LatticeModel, CliError> {
    let hyp = matches!(opts.model, ModelArg::StandardHyp | ModelArg::NonstandardHyp);
    match opts.model {
        ModelArg::Standard | ModelArg::StandardHyp => {
            if opts.i.is_some() {
                return Err(CliError::usage("standard models take --g, not --i"));
            }
            let g = opts
                .g
                .ok_or_else(|| CliError::usage("standard models need --g"))?;
            Ok(standard(g, hyp)?)
        }
        ModelArg::Nonstandard | ModelArg::NonstandardHyp => {
            if opts.g.is_some() {
                return Err(CliError::usage("nonstandard models take --i, not --g"));
            }
            let i = opts
                .i
                .ok_or_else(|| CliError::usage("nonstandard models need --i"))?;
            Ok(nonstandard(i, hyp)?)
        }
    }
}

fn one_class(opts: &LatticeOpts) -> Result<&str, CliError> {
    match opts.class.as_slice() {
        [single] => Ok(single),
        other => Err(CliError::usage(format!(
            "this subcommand takes exactly one --class, got {}",
            other.len()
        ))),
    }
}

fn reject_depth(opts: &LatticeOpts) -> Result<(), CliError> {
    if opts.depth.is_some() {
        return Err(CliError::usage("--depth only applies to `lattice prove`"));
    }
    Ok(())
}

fn run_lattice(cmd: &LatticeCmd) -> Result<Outcome, CliError> {
    match cmd {
        LatticeCmd::Pair(opts) => {
            reject_depth(opts)?;
            let model = build_model(opts)?;
            let [a, b] = opts.class.as_slice() else {
                return Err(CliError::usage(format!(
                    "pair takes exactly two --class arguments, got {}",
                    opts.class.len()
                )));
            };
            let ca = model.class_from_expr(a)?;
            let cb = model.class_from_expr(b)?;
            let value = model.pair(&ca, &cb)?;
            Ok(Outcome::ok(
                format!(
                    "pair({}, {}) = {}\n",
                    ca.display_with(&model),
                    cb.display_with(&model),
                    format_rat(&value)
                ),
                json!({
                    "model": model.name(),
                    "a": ca.display_with(&model),
                    "b": cb.display_with(&model),
                    "pair": format_rat(&value),
                }),
            ))
        }
        LatticeCmd::Member(opts) => {
            reject_depth(opts)?;
            let model = build_model(opts)?;
            let class = model.class_from_expr(one_class(opts)?)?;
            let member = model.is_member(&class)?;
            Ok(Outcome::ok(
                format!("member({}) = {member}\n", class.display_with(&model)),
                json!({
                    "model": model.name(),
                    "class": class.display_with(&model),
                    "member": member,
                }),
            ))
        }
        LatticeCmd::Prove(opts) => {
            let model = build_model(opts)?;
            let class = model.class_from_expr(one_class(opts)?)?;
            let depth = opts.depth.unwrap_or(DEFAULT_MAX_DEPTH);
            match prove_non_effective(&model, &class, depth)? {
                ProofOutcome::Proved(cert) => {
                    if let Err(e) = replay_certificate(&model, &cert) {
                        return Ok(Outcome {
                            text: format!(
                                "proof found for {} but its replay was rejected: {e}\n",
                                class.display_with(&model)
                            ),
                            json: json!({
                                "target": class.display_with(&model),
                                "replay_error": e.to_string(),
                            }),
                            code: EXIT_VERIFY_FAIL,
                        });
                    }
                    Ok(Outcome::ok(
                        format!(
                            "proved: {} is not effective (depth {}, {} direct candidate(s), \
                             {} shared subproof(s), replay ok)\n",
                            class.display_with(&model),
                            cert.depth(),
                            cert.root.candidates.len(),
                            cert.sub_certificates.len()
                        ),
                        cert.to_json(),
                    ))
                }
                ProofOutcome::NoProof(report) => {
                    let mut text = format!(
                        "no proof for {}: {}\n",
                        class.display_with(&model),
                        report.reason
                    );
                    for s in &report.surviving {
                        text.push_str(&format!(
                            "  surviving candidate {}: {}\n",
                            s.d.display_with(&model),
                            s.obstacle
                        ));
                    }
                    Ok(Outcome {
                        text,
                        json: serde_json::to_value(&report).expect("report serializes"),
                        code: EXIT_VERIFY_FAIL,
                    })
                }
            }
        }
        LatticeCmd::Peel(opts) => {
            reject_depth(opts)?;
            let model = build_model(opts)?;
            let class = model.class_from_expr(one_class(opts)?)?;
            let (peeled, steps) = peel_base_curves(&model, &class)?;
            let mut text = format!(
                "peeled {} to {} in {} step(s)\n",
                class.display_with(&model),
                peeled.display_with(&model),
                steps.len()
            );
            for step in &steps {
                text.push_str(&format!(
                    "  - {} (pairing {})\n",
                    step.curve,
                    format_rat(&step.pairing)
                ));
            }
            Ok(Outcome::ok(
                text,
                json!({
                    "model": model.name(),
                    "class": class.display_with(&model),
                    "peeled": peeled.display_with(&model),
                    "steps": serde_json::to_value(&steps).expect("steps serialize"),
                }),
            ))
        }
        LatticeCmd::Decomp(opts) => {
            reject_depth(opts)?;
            let model = build_model(opts)?;
            let class = model.class_from_expr(one_class(opts)?)?;
            let report = check_no_moving_decomposition(&model, &class, 2)?;
            let code = if report.all_have_rigid_part {
                EXIT_OK
            } else {
                EXIT_VERIFY_FAIL
            };
            Ok(Outcome {
                text: format!(
                    "inspected {} decomposition(s) of {}: all keep a rigid part = {}\n",
                    report.inspected,
                    class.display_with(&model),
                    report.all_have_rigid_part
                ),
                json: serde_json::to_value(&report).expect("report serializes"),
                code,
            })
        }
    }
}

fn run_class(cmd: &ClassCmd) -> Result<Outcome, CliError> {
    match cmd {
        ClassCmd::Pencils { g } => {
            let std_vec = standard_pencil_vector(*g)?;
            let ns_vec = if *g >= 3 && *g % 2 == 1 {
                Some(nonstandard_pencil_vector(*g)?)
            } else {
                None
            };
            let mut text = format!(
                "{} (g={}): lambda={} d0'={} d0''={} d0_ram={}\n",
                std_vec.name,
                std_vec.genus,
                format_rat(&std_vec.lambda),
                format_rat(&std_vec.d0p),
                format_rat(&std_vec.d0pp),
                format_rat(&std_vec.d0ram)
            );
            match &ns_vec {
                Some(v) => text.push_str(&format!(
                    "{} (g={}): lambda={} d0'={} d0''={} d0_ram={}\n",
                    v.name,
                    v.genus,
                    format_rat(&v.lambda),
                    format_rat(&v.d0p),
                    format_rat(&v.d0pp),
                    format_rat(&v.d0ram)
                )),
                None => text.push_str("(no nonstandard pencil: genus must be odd and >= 3)\n"),
            }
            Ok(Outcome::ok(
                text,
                json!({
                    "g": g,
                    "standard": std_vec.to_json(),
                    "nonstandard": ns_vec.map(|v| v.to_json()),
                }),
            ))
        }
        ClassCmd::Solve { i } => {
            let sol = solve_difference_class(*i)?;
            let text = format!(
                "difference class at i={} (normalized to lambda = {}):\n  lambda = {}\n  d0'    = {}\n  d0''   = undetermined\n  d0_ram = {}\nresiduals against both pencils: {}, {}\n",
                sol.i,
                format_rat(&sol.lambda),
                format_rat(&sol.lambda),
                format_rat(&sol.d0p),
                format_rat(&sol.d0ram),
                format_rat(&sol.residuals[0]),
                format_rat(&sol.residuals[1]),
            );
            Ok(Outcome::ok(text, sol.to_report_json()))
        }
        ClassCmd::Srange { i } => {
            let (a, b) = srange_coefficients(*i)?;
            Ok(Outcome::ok(
                format!(
                    "srange(i={i}) = ({}, {})\n",
                    format_rat(&a),
                    format_rat(&b)
                ),
                json!({
                    "i": i,
                    "coefficients": [format_rat(&a), format_rat(&b)],
                }),
            ))
        }
    }
}

fn run_verify_all(max_i: i64, max_g: i64) -> Result<Outcome, CliError> {
    let report = verify_all(max_i, max_g, ExecMode::Auto)?;
    let (pass, fail, error) = report.counts();
    let mut text = String::new();
    for entry in &report.entries {
        let tag = match entry.status {
            prymcalc::effectivity::SuiteStatus::Pass => "pass",
            prymcalc::effectivity::SuiteStatus::Fail => "FAIL",
            prymcalc::effectivity::SuiteStatus::Error => "ERROR",
        };
        let label = entry
            .artifact
            .get("class")
            .or_else(|| entry.artifact.get("target"))
            .or_else(|| entry.artifact.get("start"))
            .and_then(Value::as_str)
            .map(|c| format!(" [{c}]"))
            .unwrap_or_default();
        text.push_str(&format!(
            "[{tag}] {} {}={}{label}\n",
            entry.suite,
            suite_param_name(&entry.suite),
            entry.parameter
        ));
    }
    text.push_str(&format!(
        "{pass} passed, {fail} failed, {error} errored ({} entries)\n",
        report.entries.len()
    ));
    let code = if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAIL
    };
    Ok(Outcome {
        text,
        json: report.to_json(),
        code,
    })
}

fn suite_param_name(suite: &str) -> &'static str {
    match prymcalc::effectivity::SuiteKind::from_name(suite) {
        Some(kind) => kind.parameter_name(),
        None => "p",
    }
}
