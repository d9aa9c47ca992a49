//! Batch front-end: evaluate single actions, run verification suites,
//! classification probes, sequence checks, and simplicity probes.
//!
//! Exit status: 0 when everything passed (or a probe found its witness),
//! 1 when some check failed or a probe came back empty, 2 on usage errors.
//! Identical invocations produce byte-identical output.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use wepsilon::classify::{
    build_w1_base_system, build_wm1_system, derive_sequence_steps, solve_system,
    verify_closed_forms, AlphaMode,
};
use wepsilon::lie::Epsilon;
use wepsilon::omega::{
    act, action_table, action_table_to_text, check_shift_iso, ModuleParams, OmegaOracle,
};
use wepsilon::rat::{rat_from_str, Rat};
use wepsilon::report::{VerificationReport, Window};
use wepsilon::tpoly::TPoly;
use wepsilon::verify::{
    check_expansion, check_extraction_roundtrip, check_identities, check_module_axiom,
    check_oracle_equivalence, check_sequence, check_submodule_and_quotient, check_vir_reduction,
    simplicity_probe, ProbeBudget, SequenceCheck, SequenceVec,
};

#[derive(Parser)]
#[command(
    name = "wepsilon",
    version,
    about = "Exact verification suites for the W(eps) module families"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Apply a basis element to a polynomial and print the result.
    Act(ActArgs),
    /// Run a verification suite and print its report.
    Verify(VerifyArgs),
    /// Build and solve a classification system.
    Classify(ClassifyArgs),
    /// Check a sequence against the recursive compatibility condition, or
    /// print the derivation steps.
    Sequence(SequenceArgs),
    /// Search for the constant polynomial 1 in a generated submodule.
    Probe(ProbeArgs),
}

#[derive(Args)]
struct ParamFlags {
    /// Keep (lambda, alpha, beta) symbolic.
    #[arg(long, conflicts_with_all = ["lambda", "alpha", "beta"])]
    symbolic: bool,
    /// Numeric lambda (nonzero rational, e.g. 2 or -3/2).
    #[arg(long, value_parser = rat_value, requires_all = ["alpha", "beta"], allow_hyphen_values = true)]
    lambda: Option<Rat>,
    /// Numeric alpha.
    #[arg(long, value_parser = rat_value, requires_all = ["lambda", "beta"], allow_hyphen_values = true)]
    alpha: Option<Rat>,
    /// Numeric beta.
    #[arg(long, value_parser = rat_value, requires_all = ["lambda", "alpha"], allow_hyphen_values = true)]
    beta: Option<Rat>,
}

impl ParamFlags {
    /// Symbolic unless all three numerics are present; `lambda = 0` is a
    /// usage error.
    fn to_params(&self, eps: Epsilon) -> Result<ModuleParams, String> {
        match (&self.lambda, &self.alpha, &self.beta) {
            (Some(l), Some(a), Some(b)) => {
                ModuleParams::numeric(eps, l.clone(), a.clone(), b.clone())
                    .map_err(|e| e.to_string())
            }
            (None, None, None) => Ok(ModuleParams::symbolic(eps)),
            _ => Err("provide all of --lambda/--alpha/--beta or none".into()),
        }
    }
}

fn rat_value(s: &str) -> Result<Rat, String> {
    rat_from_str(s).map_err(|e| e.to_string())
}

fn eps_value(s: &str) -> Result<Epsilon, String> {
    let v: i64 = s
        .parse()
        .map_err(|_| format!("epsilon must be 1 or -1, got `{s}`"))?;
    Epsilon::from_value(v).ok_or_else(|| format!("epsilon must be 1 or -1, got `{s}`"))
}

fn poly_value(s: &str) -> Result<TPoly, String> {
    s.parse().map_err(|e: wepsilon::Error| e.to_string())
}

#[derive(Args)]
struct ActArgs {
    /// The algebra: 1 or -1.
    #[arg(long, value_parser = eps_value, allow_hyphen_values = true)]
    epsilon: Epsilon,
    /// First basis index (any integer).
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "table",
        conflicts_with = "table"
    )]
    i: Option<i64>,
    /// Second basis index (nonnegative).
    #[arg(long, required_unless_present = "table", conflicts_with = "table")]
    m: Option<u32>,
    /// The polynomial acted on, in the canonical grammar.
    #[arg(long, value_parser = poly_value, allow_hyphen_values = true, required_unless_present = "table", conflicts_with = "table")]
    poly: Option<TPoly>,
    /// Export the whole action table over the window instead of one value.
    #[arg(long)]
    table: bool,
    /// Bound on |i| for --table.
    #[arg(long, default_value_t = 2)]
    i_max: u32,
    /// Bound on m for --table.
    #[arg(long, default_value_t = 2)]
    m_max: u32,
    /// Bound on k for --table.
    #[arg(long, default_value_t = 3)]
    k_max: u32,
    #[command(flatten)]
    params: ParamFlags,
    /// Also write the output to this file.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    /// Bracket compatibility over the whole grid.
    Axioms,
    /// Invariance of t*Q(t) and triviality of the quotient at alpha = 0.
    Submodule,
    /// The shift map intertwines the alpha = 0 and alpha = 1 actions.
    ShiftIso,
    /// Closed-sum action equals derivative-form action (eps = -1).
    OracleEquiv,
    /// m = 0 slices of both families equal the Virasoro action.
    VirReduction,
    /// Action on t^k equals its combination of actions on 1.
    Expansion,
    /// Actions on 1 match their closed forms.
    ClosedForms,
    /// Alternating-sum observations and Pascal's rule.
    Identities,
    /// Parameter extraction round-trips random numeric triples.
    ExtractRoundtrip,
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(value_enum)]
    suite: Suite,
    /// The algebra: 1 or -1. Required by every suite except `identities`
    /// and `oracle-equiv`.
    #[arg(long, value_parser = eps_value, allow_hyphen_values = true)]
    epsilon: Option<Epsilon>,
    /// Bound on |i| (and |j|).
    #[arg(long, default_value_t = 3)]
    i_max: u32,
    /// Bound on m (and n).
    #[arg(long, default_value_t = 3)]
    m_max: u32,
    /// Bound on k.
    #[arg(long, default_value_t = 5)]
    k_max: u32,
    /// Trials for extract-roundtrip.
    #[arg(long, default_value_t = 20)]
    trials: u32,
    /// Seed for extract-roundtrip sampling.
    #[arg(long, default_value_t = 0xC0FFEE)]
    seed: u64,
    #[command(flatten)]
    params: ParamFlags,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// The eps = +1 base system for the degree-K ansatz.
    W1,
    /// The eps = -1 index-compatibility system for the degree-N ansatz.
    Wm1,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeFlag {
    Symbolic,
    AlphaZero,
    Sampled,
}

impl From<ModeFlag> for AlphaMode {
    fn from(m: ModeFlag) -> AlphaMode {
        match m {
            ModeFlag::Symbolic => AlphaMode::Symbolic,
            ModeFlag::AlphaZero => AlphaMode::Zero,
            ModeFlag::Sampled => AlphaMode::Sampled,
        }
    }
}

#[derive(Args)]
struct ClassifyArgs {
    /// Which family's system to build.
    #[arg(value_enum)]
    family: Family,
    /// Ansatz degree (K for w1, N >= 2 for wm1).
    #[arg(long)]
    degree: u32,
    /// How alpha is treated.
    #[arg(long, value_enum, default_value_t = ModeFlag::Symbolic)]
    mode: ModeFlag,
    /// Print provenance for each row.
    #[arg(long)]
    trace: bool,
    /// Also write the output to this file.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct SequenceArgs {
    /// Comma-separated rational values beta_0, beta_1, ...
    #[arg(long, conflicts_with_all = ["geometric", "len", "steps"], allow_hyphen_values = true)]
    values: Option<String>,
    /// Check the geometric sequence with this ratio.
    #[arg(long, value_parser = rat_value, requires = "len", allow_hyphen_values = true)]
    geometric: Option<Rat>,
    /// Length of the generated geometric sequence.
    #[arg(long)]
    len: Option<usize>,
    /// Print the derivation steps instead of checking a sequence.
    #[arg(long)]
    steps: bool,
}

#[derive(Args)]
struct ProbeArgs {
    /// The algebra: 1 or -1.
    #[arg(long, value_parser = eps_value, allow_hyphen_values = true)]
    epsilon: Epsilon,
    #[arg(long, value_parser = rat_value, allow_hyphen_values = true)]
    lambda: Rat,
    #[arg(long, value_parser = rat_value, allow_hyphen_values = true)]
    alpha: Rat,
    #[arg(long, value_parser = rat_value, allow_hyphen_values = true)]
    beta: Rat,
    /// Starting vector (rational coefficients).
    #[arg(long, value_parser = poly_value, allow_hyphen_values = true)]
    start: TPoly,
    #[arg(long, default_value_t = 2)]
    i_max: u32,
    #[arg(long, default_value_t = 2)]
    m_max: u32,
    #[arg(long, default_value_t = 2)]
    word_len: u32,
}

fn emit(text: &str, out: &Option<std::path::PathBuf>) -> Result<(), String> {
    print!("{text}");
    if let Some(path) = out {
        std::fs::File::create(path)
            .and_then(|mut f| f.write_all(text.as_bytes()))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn report_exit(
    rep: &VerificationReport,
    out: &Option<std::path::PathBuf>,
) -> Result<ExitCode, String> {
    emit(&rep.to_text(), out)?;
    Ok(if rep.pass() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn need_eps(e: Option<Epsilon>) -> Result<Epsilon, String> {
    e.ok_or_else(|| "this suite needs --epsilon".into())
}

fn run_act(args: &ActArgs) -> Result<ExitCode, String> {
    let params = args.params.to_params(args.epsilon)?;
    if args.table {
        let oracle = OmegaOracle::new(params);
        let window = Window::new(args.i_max, args.m_max, args.k_max);
        let table = action_table(&oracle, args.epsilon, &window);
        emit(&action_table_to_text(&table), &args.out)?;
        return Ok(ExitCode::SUCCESS);
    }
    let (i, m, poly) = (
        args.i.expect("required by clap"),
        args.m.expect("required by clap"),
        args.poly.as_ref().expect("required by clap"),
    );
    let result = act(i, m, poly, &params);
    let mut text = result.to_string();
    text.push('\n');
    emit(&text, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

fn run_verify(args: &VerifyArgs) -> Result<ExitCode, String> {
    let window = Window::new(args.i_max, args.m_max, args.k_max);
    let rep = match args.suite {
        Suite::Axioms => {
            let eps = need_eps(args.epsilon)?;
            let params = args.params.to_params(eps)?;
            check_module_axiom(eps, &params, &window)
        }
        Suite::Submodule => check_submodule_and_quotient(need_eps(args.epsilon)?, &window),
        Suite::ShiftIso => check_shift_iso(need_eps(args.epsilon)?, &window),
        Suite::OracleEquiv => check_oracle_equivalence(&window),
        Suite::VirReduction => check_vir_reduction(need_eps(args.epsilon)?, &window),
        Suite::Expansion => check_expansion(need_eps(args.epsilon)?, &window),
        Suite::ClosedForms => verify_closed_forms(need_eps(args.epsilon)?, &window),
        Suite::Identities => check_identities(args.k_max),
        Suite::ExtractRoundtrip => {
            check_extraction_roundtrip(need_eps(args.epsilon)?, args.trials, args.seed)
        }
    };
    report_exit(&rep, &args.out)
}

fn run_classify(args: &ClassifyArgs) -> Result<ExitCode, String> {
    let mode: AlphaMode = args.mode.into();
    let sys = match args.family {
        Family::W1 => build_w1_base_system(args.degree),
        Family::Wm1 => build_wm1_system(args.degree, mode).map_err(|e| e.to_string())?,
    };
    let solved = solve_system(&sys, mode);
    let mut text = sys.to_text(args.trace);
    text.push_str(&solved.to_text());
    for s in sys.leading_obstructions(&solved.solution) {
        text.push_str(&format!(
            "obstruction {s} = 0 contradicts a nonzero leading coefficient\n"
        ));
    }
    emit(&text, &args.out)?;
    let ok = sys.findings.is_empty()
        && solved.solution.consistent
        && solved.samples.iter().all(|s| s.agrees);
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

fn run_sequence(args: &SequenceArgs) -> Result<ExitCode, String> {
    if args.steps {
        let mut text = String::new();
        for step in derive_sequence_steps() {
            text.push_str(&format!("step {}\n", step.label));
            for eq in &step.instantiated {
                text.push_str(&format!("  using {eq}\n"));
            }
            text.push_str(&format!("  conclusion {}\n", step.conclusion));
        }
        print!("{text}");
        return Ok(ExitCode::SUCCESS);
    }
    let seq = if let Some(values) = &args.values {
        let parsed: Result<Vec<Rat>, _> =
            values.split(',').map(|v| rat_from_str(v.trim())).collect();
        SequenceVec::new(parsed.map_err(|e| e.to_string())?).map_err(|e| e.to_string())?
    } else if let (Some(ratio), Some(len)) = (&args.geometric, args.len) {
        SequenceVec::geometric(ratio, len)
    } else {
        return Err("provide --values, or --geometric with --len, or --steps".into());
    };
    match check_sequence(&seq) {
        SequenceCheck::Pass => {
            println!("sequence pass len={}", seq.len());
            Ok(ExitCode::SUCCESS)
        }
        SequenceCheck::Fail { m, n } => {
            println!("sequence fail first-violation m={m} n={n}");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn run_probe(args: &ProbeArgs) -> Result<ExitCode, String> {
    let budget = ProbeBudget {
        i_max: args.i_max,
        m_max: args.m_max,
        word_len: args.word_len,
    };
    let outcome = simplicity_probe(
        args.epsilon,
        args.lambda.clone(),
        args.alpha.clone(),
        args.beta.clone(),
        &args.start,
        &budget,
    )
    .map_err(|e| e.to_string())?;
    use wepsilon::verify::ProbeOutcome::*;
    match outcome {
        Found => {
            println!("probe found");
            Ok(ExitCode::SUCCESS)
        }
        CertifiedInTSubmodule => {
            println!("probe certified-contained-in-t-submodule");
            Ok(ExitCode::SUCCESS)
        }
        NotFoundWithinBudget => {
            println!("probe not-found-within-budget");
            Ok(ExitCode::FAILURE)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Act(a) => run_act(a),
        Command::Verify(a) => run_verify(a),
        Command::Classify(a) => run_classify(a),
        Command::Sequence(a) => run_sequence(a),
        Command::Probe(a) => run_probe(a),
    };
    match result {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
