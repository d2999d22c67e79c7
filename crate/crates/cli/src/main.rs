use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fredholm_core::{
    build_extensions, chain_defects, fold_to_pair, instance_seed, pair_defects, verify_remark_2_3,
    verify_theorem_3_2, verify_theorem_3_4, verify_theorem_3_6, verify_theorem_4_2,
    verify_theorem_4_4, ChainInstance, GenConfig, Generator, InverseMode, PairInstance, RatMatrix,
    TheoremReport,
};
use serde::Serialize;
use serde_json::{json, Value};

/// Exact defect numbers, indices and theorem checks for Fredholm pairs and
/// chains over the rationals.
#[derive(Parser)]
#[command(name = "fredholm", version)]
struct Cli {
    /// Also print a readable summary on standard error.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Defect numbers and index of a pair file.
    PairReport { file: PathBuf },
    /// Per-degree defects, index and Euler characteristic of a chain file.
    ChainReport { file: PathBuf },
    /// Run theorem verifiers on a pair or chain file.
    Verify(VerifyArgs),
    /// Verify generated instances; one JSON line each, then a summary.
    Fuzz(FuzzArgs),
    /// Moore-Penrose pseudoinverse of a matrix file.
    Pinv { file: PathBuf },
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    /// Complement transport of the quotient pair.
    #[arg(long)]
    thm32: bool,
    #[arg(long)]
    thm34: bool,
    #[arg(long)]
    thm36: bool,
    /// Chain files only.
    #[arg(long)]
    thm42: bool,
    /// Chain files only.
    #[arg(long)]
    thm44: bool,
    /// Chain index against the folded pair. Chain files only.
    #[arg(long)]
    remark23: bool,
    /// Every verifier applicable to the file; the default when no flag is given.
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    count: u64,
    #[arg(long, default_value_t = 6)]
    max_dim: usize,
    #[arg(long, default_value_t = 2)]
    rank_budget: usize,
    #[arg(long, default_value_t = 3)]
    entry_bound: u32,
    #[arg(long)]
    complex_only: bool,
    /// Where failing instances are written as standalone files.
    #[arg(long, default_value = "failures")]
    failures_dir: PathBuf,
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Passed,
    Failed,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

type CmdResult = Result<Outcome, InputError>;

enum Instance {
    Pair(PairInstance),
    Chain(ChainInstance),
}

impl Instance {
    fn kind(&self) -> &'static str {
        match self {
            Instance::Pair(_) => "pair",
            Instance::Chain(_) => "chain",
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Instance::Pair(p) => serde_json::to_value(p),
            Instance::Chain(c) => serde_json::to_value(c),
        }
        .expect("instances serialize")
    }
}

fn read_json(path: &Path) -> Result<Value, InputError> {
    let text =
        fs::read_to_string(path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn decode<T: serde::de::DeserializeOwned>(value: Value, path: &Path) -> Result<T, InputError> {
    serde_json::from_value(value).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

/// A chain file has `dims`; anything else with `s`/`t` is read as a pair.
fn read_instance(path: &Path) -> Result<Instance, InputError> {
    let value = read_json(path)?;
    let is_chain = value.get("dims").is_some() || value.get("maps").is_some();
    let is_pair = value.get("s").is_some() || value.get("dim_x").is_some();
    match (is_chain, is_pair) {
        (true, false) => Ok(Instance::Chain(decode(value, path)?)),
        (false, true) => Ok(Instance::Pair(decode(value, path)?)),
        _ => Err(InputError(format!(
            "{}: expected a pair {{dim_x, dim_y, s, t}} or a chain {{dims, maps}}",
            path.display()
        ))),
    }
}

fn emit<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string(value).expect("reports serialize")
    );
}

fn describe(reports: &[TheoremReport]) {
    for r in reports {
        eprintln!(
            "{:<14} {}",
            r.name,
            if r.passed { "passed" } else { "FAILED" }
        );
        for c in r.checks.iter().filter(|c| !c.holds) {
            eprintln!("    fails: {}", c.identity);
        }
    }
}

fn mp_theorem_3_6(p: &PairInstance) -> TheoremReport {
    let bundle = build_extensions(p, InverseMode::ChainCompatibleMp)
        .expect("pseudoinverses are normalized generalized inverses");
    verify_theorem_3_6(p, &bundle).expect("mp bundles match the pair")
}

fn pair_reports(p: &PairInstance, thm32: bool, thm34: bool, thm36: bool) -> Vec<TheoremReport> {
    let mut out = Vec::new();
    if thm32 {
        out.push(verify_theorem_3_2(p));
    }
    if thm34 {
        out.push(verify_theorem_3_4(p));
    }
    if thm36 {
        out.push(mp_theorem_3_6(p));
    }
    out
}

fn all_reports(instance: &Instance) -> Vec<TheoremReport> {
    match instance {
        Instance::Pair(p) => pair_reports(p, true, true, true),
        Instance::Chain(c) => chain_reports(c, &VerifySelection::everything()),
    }
}

struct VerifySelection {
    thm32: bool,
    thm34: bool,
    thm36: bool,
    thm42: bool,
    thm44: bool,
    remark23: bool,
}

impl VerifySelection {
    fn everything() -> Self {
        VerifySelection {
            thm32: true,
            thm34: true,
            thm36: true,
            thm42: true,
            thm44: true,
            remark23: true,
        }
    }
}

fn chain_reports(c: &ChainInstance, sel: &VerifySelection) -> Vec<TheoremReport> {
    let mut out = Vec::new();
    if sel.remark23 {
        out.push(verify_remark_2_3(c));
    }
    if sel.thm32 || sel.thm34 || sel.thm36 {
        out.extend(pair_reports(
            &fold_to_pair(c),
            sel.thm32,
            sel.thm34,
            sel.thm36,
        ));
    }
    if sel.thm42 {
        out.push(verify_theorem_4_2(c));
    }
    if sel.thm44 {
        out.push(verify_theorem_4_4(c));
    }
    out
}

fn verify(args: &VerifyArgs, human: bool) -> CmdResult {
    let instance = read_instance(&args.file)?;
    let none =
        !(args.thm32 || args.thm34 || args.thm36 || args.thm42 || args.thm44 || args.remark23);
    let sel = if args.all || none {
        VerifySelection::everything()
    } else {
        VerifySelection {
            thm32: args.thm32,
            thm34: args.thm34,
            thm36: args.thm36,
            thm42: args.thm42,
            thm44: args.thm44,
            remark23: args.remark23,
        }
    };
    let reports = match &instance {
        Instance::Pair(p) => {
            let explicit = !(args.all || none);
            if explicit && (sel.thm42 || sel.thm44 || sel.remark23) {
                return Err(InputError(
                    "--thm42, --thm44 and --remark23 need a chain file".into(),
                ));
            }
            pair_reports(p, sel.thm32, sel.thm34, sel.thm36)
        }
        Instance::Chain(c) => chain_reports(c, &sel),
    };
    emit(&reports);
    if human {
        describe(&reports);
    }
    Ok(if reports.iter().all(|r| r.passed) {
        Outcome::Passed
    } else {
        Outcome::Failed
    })
}

#[derive(Serialize)]
struct FuzzLine {
    ordinal: u64,
    seed: u64,
    kind: &'static str,
    instance: Value,
    reports: Vec<TheoremReport>,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "verifier panicked".into())
}

fn fuzz(args: &FuzzArgs, human: bool) -> CmdResult {
    let base = GenConfig::new(
        args.seed,
        args.max_dim,
        args.rank_budget,
        args.entry_bound,
        args.complex_only,
    )?;
    let mut passed = 0u64;
    for ordinal in 0..args.count {
        let seed = instance_seed(args.seed, ordinal);
        let mut generator = Generator::new(&base.with_seed(seed));
        // Even ordinals are pairs, odd ordinals chains of 1 to 5 maps.
        let instance = if ordinal % 2 == 0 {
            Instance::Pair(generator.pair())
        } else {
            let length = 1 + (seed % 5) as usize;
            Instance::Chain(generator.chain(length).expect("length is positive"))
        };
        let run = panic::catch_unwind(AssertUnwindSafe(|| all_reports(&instance)));
        let (reports, error) = match run {
            Ok(reports) => (reports, None),
            Err(payload) => (Vec::new(), Some(panic_message(payload.as_ref()))),
        };
        let ok = error.is_none() && reports.iter().all(|r| r.passed);
        if ok {
            passed += 1;
        } else {
            save_failure(&args.failures_dir, ordinal, seed, &instance)?;
        }
        if human {
            eprintln!(
                "#{ordinal} {} seed {seed:#018x}: {}",
                instance.kind(),
                if ok { "passed" } else { "FAILED" }
            );
        }
        emit(&FuzzLine {
            ordinal,
            seed,
            kind: instance.kind(),
            instance: instance.to_json(),
            reports,
            passed: ok,
            error,
        });
    }
    let failed = args.count - passed;
    emit(&json!({
        "summary": {
            "seed": args.seed,
            "count": args.count,
            "passed": passed,
            "failed": failed,
        }
    }));
    if human {
        eprintln!("{passed}/{} passed", args.count);
    }
    Ok(if failed == 0 {
        Outcome::Passed
    } else {
        Outcome::Failed
    })
}

fn save_failure(
    dir: &Path,
    ordinal: u64,
    seed: u64,
    instance: &Instance,
) -> Result<(), InputError> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{ordinal:05}-{seed:016x}-{}.json", instance.kind()));
    let text = serde_json::to_string_pretty(&instance.to_json())?;
    fs::write(&path, text + "\n")?;
    Ok(())
}

fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::PairReport { file } => {
            let p: PairInstance = decode(read_json(file)?, file)?;
            let defects = pair_defects(&p);
            emit(&defects);
            if cli.human {
                eprintln!(
                    "a={} b={} c={} d={} index={}",
                    defects.a, defects.b, defects.c, defects.d, defects.index
                );
            }
            Ok(Outcome::Passed)
        }
        Command::ChainReport { file } => {
            let c: ChainInstance = decode(read_json(file)?, file)?;
            let defects = chain_defects(&c);
            let mut value = serde_json::to_value(&defects)?;
            value["euler_characteristic"] = json!(c.euler_characteristic());
            emit(&value);
            if cli.human {
                eprintln!("d={:?} index={}", defects.d, defects.index);
            }
            Ok(Outcome::Passed)
        }
        Command::Verify(args) => verify(args, cli.human),
        Command::Fuzz(args) => fuzz(args, cli.human),
        Command::Pinv { file } => {
            let m: RatMatrix = decode(read_json(file)?, file)?;
            let pinv = m.pseudoinverse();
            emit(&pinv);
            if cli.human {
                eprintln!("{pinv}");
            }
            Ok(Outcome::Passed)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            let ok = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            return ExitCode::from(if ok { 0 } else { 2 });
        }
    };
    // A panic inside a verifier is an internal assertion failing, which the
    // exit-code contract reports as a verification failure.
    match panic::catch_unwind(AssertUnwindSafe(|| run(&cli))) {
        Ok(Ok(Outcome::Passed)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::Failed)) => ExitCode::from(1),
        Ok(Err(InputError(msg))) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(1),
    }
}
