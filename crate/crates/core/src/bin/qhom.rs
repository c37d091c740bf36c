use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_integer::Integer;
use serde::Serialize;

use qhom::apap::{equiv_related, EquivClosure};
use qhom::approximator::{
    approximate_with, certify, detect_structure, ApproxError, FindingKind, Verification,
    THEOREM_BOUND,
};
use qhom::generators::{fuzz_theorem, generate, FamilyKind, FuzzSpace, GenError, GenSpec};
use qhom::io::{certificate_from_json, certificate_to_json, window_from_json, window_to_json};
use qhom::quasihom::{delta, normalize, verify_direct, QuasiHomWindow};
use qhom::render::render_show;
use qhom::selftest::{run_suites, DEFAULT_SEED};
use qhom::SymMat;

const OK: u8 = 0;
const SEMANTIC: u8 = 1;
const INPUT: u8 = 2;
const INCONCLUSIVE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qhom",
    version,
    about = "Exact analysis of 1-quasihomomorphisms Z -> Sym(n, Q) on finite windows"
)]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct WindowArgs {
    /// Window file: {"n": .., "N": .., "values": {"<x>": <matrix>, ..}}.
    file: PathBuf,
}

#[derive(Args)]
struct SkipVerify {
    /// Skip the 1-quasihomomorphism check; output is marked unverified.
    #[arg(long)]
    skip_verify: bool,
}

impl SkipVerify {
    fn mode(&self) -> Verification {
        if self.skip_verify {
            Verification::Bypass
        } else {
            Verification::Check
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Scan every pair of the window and report the largest defect rank.
    Verify {
        #[command(flatten)]
        window: WindowArgs,
        /// Defect bound to test against.
        #[arg(long, default_value_t = 1)]
        c: usize,
    },
    /// Detect structure, synthesize A and certify rank(f(x) - xA) <= 2.
    Approximate {
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        skip: SkipVerify,
    },
    /// Certify a given A against the window.
    Certify {
        #[command(flatten)]
        window: WindowArgs,
        /// Matrix literal for A, e.g. '[[1,"1/2"],["1/2",0]]'.
        #[arg(long, conflicts_with = "cert", required_unless_present = "cert")]
        a: Option<String>,
        /// Take A (and p) from a certificate file.
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long, default_value_t = THEOREM_BOUND)]
        bound: usize,
    },
    /// Report m, p and the dim V_m table for the window's delta sequence.
    Detect {
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        skip: SkipVerify,
    },
    /// Run the approximation bound over seeded random windows.
    Fuzz {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        /// Master seed (overrides QHOM_SEED).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1)]
        n_min: usize,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 5)]
        radius_min: i64,
        #[arg(long, default_value_t = 25)]
        radius_max: i64,
        #[arg(long, default_value_t = 8)]
        max_period: i64,
        /// Families to sample (default: all verified families).
        #[arg(long, value_delimiter = ',')]
        families: Vec<FamilyArg>,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the closed-form equivalence with the union-find closure.
    Oracle {
        #[arg(long, requires = "q")]
        p: Option<i64>,
        #[arg(long, requires = "p")]
        q: Option<i64>,
        /// Largest p swept when no pair is given; upper limit for --p.
        #[arg(long, default_value_t = 12)]
        max: i64,
    },
    /// Run the property suites.
    Selftest {
        /// Base seed (overrides QHOM_SEED).
        #[arg(long)]
        seed: Option<u64>,
        /// Run a single suite, e.g. lemma-5.7.
        #[arg(long)]
        only: Option<String>,
        /// Print results as JSON instead of summary lines.
        #[arg(long)]
        json: bool,
    },
    /// ASCII diagram of the delta sequence grouped into APAP periods.
    Show {
        #[command(flatten)]
        window: WindowArgs,
        #[command(flatten)]
        skip: SkipVerify,
    },
    /// Materialize the window described by a generator spec (fuzz replay).
    Gen {
        /// GenSpec JSON file.
        spec: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Hom,
    LinePerturbed,
    PeriodicApap,
    ApapCandidate,
}

impl From<FamilyArg> for FamilyKind {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Hom => FamilyKind::Hom,
            FamilyArg::LinePerturbed => FamilyKind::LinePerturbed,
            FamilyArg::PeriodicApap => FamilyKind::PeriodicApap,
            FamilyArg::ApapCandidate => FamilyKind::ApapCandidate,
        }
    }
}

/// Error already reported to the user, carrying the exit status.
struct Exit(u8);

type Outcome = Result<u8, Exit>;

fn input_error(msg: impl std::fmt::Display) -> Exit {
    eprintln!("error: {msg}");
    Exit(INPUT)
}

fn read(path: &Path) -> Result<String, Exit> {
    fs::read_to_string(path).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn load_window(path: &Path) -> Result<QuasiHomWindow, Exit> {
    window_from_json(&read(path)?).map_err(|e| input_error(format!("{}: {e}", path.display())))
}

fn print_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("output serializes")
    );
}

fn env_seed() -> Result<Option<u64>, Exit> {
    match std::env::var("QHOM_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| input_error(format!("QHOM_SEED={s:?} is not an unsigned integer"))),
        Err(_) => Ok(None),
    }
}

/// Exit status for pipeline errors after a window parsed successfully.
fn report_approx_error(e: ApproxError) -> Exit {
    match e {
        ApproxError::NotQuasihom { report } => {
            print_json(&report);
            eprintln!(
                "not a 1-quasihomomorphism: defect rank {} at {:?}",
                report.c_measured, report.witness
            );
            Exit(SEMANTIC)
        }
        ApproxError::Inconclusive {
            m,
            radius,
            required,
        } => {
            eprintln!("inconclusive: dim V_m reaches 3 at m = {m}; window N = {radius}, needs N >= {required}");
            Exit(INCONCLUSIVE)
        }
        e @ (ApproxError::DeltaRank { .. } | ApproxError::NoApapPeriod { .. }) => {
            eprintln!("not a 1-quasihomomorphism: {e}");
            Exit(SEMANTIC)
        }
        e => input_error(e),
    }
}

fn cmd_verify(file: &Path, c: usize) -> Outcome {
    let f = load_window(file)?;
    let report = verify_direct(&f, c);
    print_json(&report);
    Ok(if report.satisfied { OK } else { SEMANTIC })
}

fn cmd_approximate(file: &Path, mode: Verification) -> Outcome {
    let f = load_window(file)?;
    let cert = approximate_with(&f, mode).map_err(report_approx_error)?;
    println!("{}", certificate_to_json(&cert));
    if mode == Verification::Bypass {
        eprintln!("unverified: quasihomomorphism check skipped");
    }
    Ok(if cert.bound_satisfied { OK } else { SEMANTIC })
}

fn cmd_certify(file: &Path, a: Option<&str>, cert: Option<&Path>, bound: usize) -> Outcome {
    let f = load_window(file)?;
    let (a, period) = match (a, cert) {
        (Some(lit), _) => {
            let a: SymMat =
                serde_json::from_str(lit).map_err(|e| input_error(format!("--a: {e}")))?;
            (a, None)
        }
        (None, Some(path)) => {
            let c = certificate_from_json(&read(path)?)
                .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
            (c.a, Some(c.period))
        }
        (None, None) => return Err(input_error("one of --a or --cert is required")),
    };
    let mut out = certify(&f, &a, bound).map_err(input_error)?;
    if let Some(p) = period {
        out.period = p;
    }
    println!("{}", certificate_to_json(&out));
    Ok(if out.bound_satisfied { OK } else { SEMANTIC })
}

fn cmd_detect(file: &Path, mode: Verification) -> Outcome {
    let f = load_window(file)?;
    let (g, _) = normalize(&f);
    let finding = detect_structure(&delta(&g), mode).map_err(report_approx_error)?;
    print_json(&finding);
    Ok(match finding.kind {
        FindingKind::Degenerate | FindingKind::Structured => OK,
        FindingKind::Inconclusive => {
            eprintln!(
                "inconclusive: window N = {} needs N >= {}",
                finding.window_n,
                finding.required_n.unwrap_or_default()
            );
            INCONCLUSIVE
        }
        FindingKind::NotQuasihom => SEMANTIC,
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_fuzz(
    trials: usize,
    seed: Option<u64>,
    n_range: (usize, usize),
    radius_range: (i64, i64),
    max_period: i64,
    families: &[FamilyArg],
    out: Option<&Path>,
) -> Outcome {
    if n_range.0 == 0 || n_range.0 > n_range.1 {
        return Err(input_error("need 1 <= --n-min <= --n-max"));
    }
    if radius_range.0 < 2 || radius_range.0 > radius_range.1 {
        return Err(input_error("need 2 <= --radius-min <= --radius-max"));
    }
    if max_period < 2 {
        return Err(input_error("--max-period must be at least 2"));
    }
    let mut space = FuzzSpace::default();
    if let Some(s) = seed.or(env_seed()?) {
        space.master_seed = s;
    }
    space.n_range = n_range;
    space.radius_range = radius_range;
    space.max_period = max_period;
    if !families.is_empty() {
        space.families = families.iter().map(|&f| f.into()).collect();
    }
    let report = fuzz_theorem(trials, &space);
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if let Some(path) = out {
        fs::write(path, &text).map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    }
    println!("{text}");
    eprintln!(
        "{} trials: {} accepted ({} structured, {} degenerate, {} inconclusive), {} rejected, {} violations",
        report.trials,
        report.accepted,
        report.structured_count,
        report.degenerate_count,
        report.inconclusive_count,
        report.rejected,
        report.violations.len()
    );
    Ok(if report.violations.is_empty() {
        OK
    } else {
        SEMANTIC
    })
}

/// Agreement count of closed form and closure over the central range.
fn oracle_pair(p: i64, q: i64) -> (usize, usize, EquivClosure) {
    let closure = EquivClosure::new(p, q, 3 * p.lcm(&q)).expect("parameters checked");
    let c = closure.central_limit();
    let mut agree = 0;
    let mut total = 0;
    for x in -c..=c {
        for y in -c..=c {
            total += 1;
            if closure.related(x, y).ok() == equiv_related(x, y, p, q).ok() {
                agree += 1;
            }
        }
    }
    (agree, total, closure)
}

fn cmd_oracle(p: Option<i64>, q: Option<i64>, max: i64) -> Outcome {
    if max < 3 {
        return Err(input_error("--max must be at least 3"));
    }
    match (p, q) {
        (Some(p), Some(q)) => {
            if !(2 <= q && q < p && p <= max) {
                return Err(input_error(format!(
                    "need 2 <= q < p <= {max}, got p = {p}, q = {q}"
                )));
            }
            let (agree, total, closure) = oracle_pair(p, q);
            let g = p.gcd(&q);
            // classes of residues mod g, read off the closure
            let mut classes: Vec<Vec<i64>> = Vec::new();
            for r in 0..g {
                match classes
                    .iter_mut()
                    .find(|cls| closure.related(cls[0], r) == Ok(true))
                {
                    Some(cls) => cls.push(r),
                    None => classes.push(vec![r]),
                }
            }
            println!("p = {p}, q = {q}, g = {g}: {agree}/{total} pairs agree");
            let shown: Vec<String> = classes
                .iter()
                .map(|c| {
                    format!(
                        "{{{}}}",
                        c.iter().map(i64::to_string).collect::<Vec<_>>().join(", ")
                    )
                })
                .collect();
            println!("{} class(es) mod {g}: {}", classes.len(), shown.join(" "));
            Ok(if agree == total { OK } else { SEMANTIC })
        }
        _ => {
            let mut all_agree = true;
            for p in 3..=max {
                for q in 2..p {
                    let (agree, total, _) = oracle_pair(p, q);
                    all_agree &= agree == total;
                    println!("p = {p:>2}, q = {q:>2}: {agree}/{total}");
                }
            }
            println!(
                "{}",
                if all_agree {
                    "full agreement"
                } else {
                    "MISMATCH"
                }
            );
            Ok(if all_agree { OK } else { SEMANTIC })
        }
    }
}

fn cmd_selftest(seed: Option<u64>, only: Option<&str>, json: bool) -> Outcome {
    let seed = match seed {
        Some(s) => s,
        None => env_seed()?.unwrap_or(DEFAULT_SEED),
    };
    let results = run_suites(seed, only).map_err(input_error)?;
    if json {
        print_json(&results);
    } else {
        for r in &results {
            println!("{}", r.summary_line());
            for s in &r.samples {
                println!("    {s}");
            }
        }
    }
    Ok(if results.iter().all(|r| r.passed()) {
        OK
    } else {
        SEMANTIC
    })
}

fn cmd_show(file: &Path, mode: Verification) -> Outcome {
    let f = load_window(file)?;
    let (kind, text) = render_show(&f, mode).map_err(report_approx_error)?;
    print!("{text}");
    Ok(match kind {
        FindingKind::Degenerate | FindingKind::Structured => OK,
        FindingKind::Inconclusive => INCONCLUSIVE,
        FindingKind::NotQuasihom => SEMANTIC,
    })
}

fn cmd_gen(path: &Path) -> Outcome {
    let spec: GenSpec = serde_json::from_str(&read(path)?)
        .map_err(|e| input_error(format!("{}: {e}", path.display())))?;
    match generate(&spec) {
        Ok(f) => {
            println!("{}", window_to_json(&f));
            Ok(OK)
        }
        Err(GenError::Rejected { report }) => {
            print_json(&report);
            eprintln!(
                "rejected: defect rank {} at {:?}",
                report.c_measured, report.witness
            );
            Ok(SEMANTIC)
        }
        Err(e) => Err(input_error(e)),
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(input_error("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(input_error)?;
    }
    match cli.command {
        Command::Verify { window, c } => cmd_verify(&window.file, c),
        Command::Approximate { window, skip } => cmd_approximate(&window.file, skip.mode()),
        Command::Certify {
            window,
            a,
            cert,
            bound,
        } => cmd_certify(&window.file, a.as_deref(), cert.as_deref(), bound),
        Command::Detect { window, skip } => cmd_detect(&window.file, skip.mode()),
        Command::Fuzz {
            trials,
            seed,
            n_min,
            n_max,
            radius_min,
            radius_max,
            max_period,
            families,
            out,
        } => cmd_fuzz(
            trials,
            seed,
            (n_min, n_max),
            (radius_min, radius_max),
            max_period,
            &families,
            out.as_deref(),
        ),
        Command::Oracle { p, q, max } => cmd_oracle(p, q, max),
        Command::Selftest { seed, only, json } => cmd_selftest(seed, only.as_deref(), json),
        Command::Show { window, skip } => cmd_show(&window.file, skip.mode()),
        Command::Gen { spec } => cmd_gen(&spec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) | Err(Exit(code)) => ExitCode::from(code),
    }
}
