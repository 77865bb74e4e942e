//! The `plucker` command line.
//!
//! Exit codes: 0 success or affirmative answer, 1 negative answer (a
//! violation or a failed identity), 2 usage error, 3 I/O error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::equations::{check_half_width, dedupe, render_system, EquationSystem, Format};
use crate::error::{Error, Result};
use crate::multiindex::GrassmannParams;
use crate::pvectors::{random_pvector, random_simple, AnyPVector, SystemChoice, Tolerance};
use crate::structure::{case3_probe, census, verify, CensusReport, ProbeReport, Verification};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "plucker",
    version,
    about = "Plücker and Plücker-like equations of Gr(p,n)"
)]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "PLUCKER_JOBS", default_value_t = 0)]
    pub jobs: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Print the equation system for (n,p) and half-width m.
    Generate(GenerateArgs),
    /// Decide whether a p-vector read as JSON is simple.
    Check(CheckArgs),
    /// Run every structural identity at (n,p).
    Verify(GridArgs),
    /// Count the Plücker-like system by case.
    Census(CensusArgs),
    /// Write LaTeX tables of both systems into a directory.
    Export(ExportArgs),
    /// Search small combinations of |q| <= p-4 equations for Plücker equations.
    Probe(ProbeArgs),
    /// Print a seeded random p-vector as JSON.
    Sample(SampleArgs),
}

#[derive(Args, Debug, Clone, Copy)]
pub struct GridArgs {
    #[arg(long)]
    pub n: u32,
    #[arg(long)]
    pub p: u32,
}

impl GridArgs {
    fn params(self) -> Result<GrassmannParams> {
        GrassmannParams::new(self.n, self.p)
    }
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// 1 for Plücker, 2 for Plücker-like; larger values need --experimental.
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Drop trivial and repeated equations.
    #[arg(long)]
    pub dedupe: bool,
    /// Print generator output without canonicalizing.
    #[arg(long, conflicts_with = "dedupe")]
    pub raw: bool,
    #[arg(long)]
    pub experimental: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// p-vector JSON file, or `-` for stdin.
    #[arg(default_value = "-")]
    pub input: String,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    /// `1e-9` or `rel:1e-9` for relative, `abs:1e-9` for absolute; floats only.
    #[arg(long, default_value = "1e-9")]
    pub tolerance: ToleranceArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExportArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Directory to write `plucker.tex`, `plucker_reduced.tex` and
    /// `plucker_like.tex` into.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ProbeArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// |j∩k| of the equations to combine.
    #[arg(long, default_value_t = 0)]
    pub q: usize,
    /// Largest number of equations per combination (2 or 3).
    #[arg(long, default_value_t = 2)]
    pub max_combination: usize,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub seed: u64,
    /// Sample a wedge of random vectors instead of random coordinates.
    #[arg(long)]
    pub simple: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ToleranceArg(pub Tolerance);

impl FromStr for ToleranceArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (kind, value) = s.split_once(':').unwrap_or(("rel", s));
        let value: f64 = value
            .parse()
            .map_err(|_| format!("bad tolerance value `{value}`"))?;
        if !(value.is_finite() && value >= 0.0) {
            return Err("tolerance must be finite and non-negative".into());
        }
        match kind {
            "rel" => Ok(ToleranceArg(Tolerance::Relative(value))),
            "abs" => Ok(ToleranceArg(Tolerance::Absolute(value))),
            _ => Err(format!("unknown tolerance kind `{kind}`, use rel or abs")),
        }
    }
}

/// Parses `args` (program name first) and runs the command, returning the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(cli.jobs)
        .build()
    {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start {} worker threads: {e}", cli.jobs);
            return EXIT_IO;
        }
    };
    match pool.install(|| dispatch(&cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => EXIT_IO,
        Error::Csv(inner) if matches!(inner.kind(), csv::ErrorKind::Io(_)) => EXIT_IO,
        Error::Json(inner) if inner.is_io() => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn dispatch(command: &Command) -> Result<i32> {
    match command {
        Command::Generate(args) => cmd_generate(args),
        Command::Check(args) => cmd_check(args),
        Command::Verify(args) => cmd_verify(*args),
        Command::Census(args) => cmd_census(args),
        Command::Export(args) => cmd_export(args),
        Command::Probe(args) => cmd_probe(args),
        Command::Sample(args) => cmd_sample(args),
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    let mut out = open_output(path)?;
    out.write_all(text.as_bytes())?;
    out.flush()?;
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<i32> {
    let params = args.grid.params()?;
    check_half_width(params, args.m)?;
    if args.m >= 3 && !args.experimental {
        return Err(Error::invalid(format!(
            "m = {} is outside the two named systems; pass --experimental",
            args.m
        )));
    }
    let raw = EquationSystem::generate(params, args.m)?;
    let mut out = open_output(args.out.as_deref())?;
    if args.dedupe {
        render_system(&mut out, &dedupe(&raw).reduced, args.format, false)?;
    } else if args.raw {
        render_system(&mut out, &raw, args.format, true)?;
    } else {
        render_system(&mut out, &raw.canonical(), args.format, true)?;
    }
    out.flush()?;
    Ok(EXIT_OK)
}

fn read_input(input: &str) -> Result<String> {
    let mut text = String::new();
    if input == "-" {
        io::stdin().read_to_string(&mut text)?;
    } else {
        File::open(input)?.read_to_string(&mut text)?;
    }
    Ok(text)
}

fn cmd_check(args: &CheckArgs) -> Result<i32> {
    let h = AnyPVector::from_json(&read_input(&args.input)?)?;
    let choice = match args.m {
        1 => SystemChoice::Plucker,
        2 => SystemChoice::PluckerLike,
        m => {
            return Err(Error::invalid(format!(
                "check supports m = 1 or 2, got {m}"
            )))
        }
    };
    // Canonical forms, so reported values match the printed equations.
    let violations = match EquationSystem::generate(h.params(), choice.half_width()) {
        Ok(system) => h.violations(&system.canonical(), args.tolerance.0)?,
        Err(_) => Vec::new(),
    };
    let mut text = String::new();
    let code = if violations.is_empty() {
        text.push_str(if h.is_zero() {
            "simple (zero vector)\n"
        } else {
            "simple\n"
        });
        EXIT_OK
    } else {
        text.push_str(&format!(
            "not simple: {} violated equations\n",
            violations.len()
        ));
        for (label, value) in &violations {
            text.push_str(&format!("{label}: {value}\n"));
        }
        EXIT_NEGATIVE
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(code)
}

fn render_verification(v: &Verification) -> String {
    let mut text = format!("verify (n,p) = ({},{})\n", v.n, v.p);
    let width = v
        .checks
        .iter()
        .map(|c| c.name.chars().count())
        .max()
        .unwrap_or(0);
    for check in &v.checks {
        let status = if check.passed { "ok" } else { "FAIL" };
        let pad = width - check.name.chars().count();
        text.push_str(&format!(
            "{status:<4}  {}{}  {:>8} checked",
            check.name,
            " ".repeat(pad),
            check.checked
        ));
        if let Some(failure) = &check.first_failure {
            text.push_str(&format!("  first failure: {failure}"));
        }
        text.push('\n');
    }
    text
}

fn cmd_verify(args: GridArgs) -> Result<i32> {
    let v = verify(args.params()?)?;
    print!("{}", render_verification(&v));
    if let Some(failure) = v.first_failure() {
        eprintln!(
            "identity failed: {}",
            failure.first_failure.as_deref().unwrap_or(&failure.name)
        );
        return Ok(EXIT_NEGATIVE);
    }
    Ok(EXIT_OK)
}

/// Aligned text table of a census.
pub fn render_census(r: &CensusReport) -> String {
    let mut rows: Vec<[String; 5]> = vec![[
        "case".into(),
        "|q|".into(),
        "equations".into(),
        "predicted".into(),
        "terms".into(),
    ]];
    let p = r.p as usize;
    rows.push([
        "i".into(),
        (p - 2).to_string(),
        r.case_i.observed.to_string(),
        r.case_i.predicted.to_string(),
        r.case_i.terms_per_equation.to_string(),
    ]);
    if p >= 3 && r.p + 3 <= r.n {
        rows.push([
            "ii".into(),
            (p - 3).to_string(),
            r.case_ii.observed.to_string(),
            r.case_ii.predicted.to_string(),
            r.case_ii.terms_per_equation.to_string(),
        ]);
        rows.push([
            "families".into(),
            (p - 3).to_string(),
            r.families_observed.to_string(),
            r.families_predicted.to_string(),
            "10".into(),
        ]);
    }
    for (q, c) in r.case_iii.iter().rev() {
        rows.push([
            "iii".into(),
            q.to_string(),
            c.observed.to_string(),
            c.predicted.to_string(),
            c.terms_per_equation.to_string(),
        ]);
    }
    rows.push([
        "total".into(),
        String::new(),
        r.total.to_string(),
        r.predicted_total.to_string(),
        String::new(),
    ]);

    let mut widths = [0usize; 5];
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut text = format!("census (n,p) = ({},{})\n", r.n, r.p);
    for row in &rows {
        let line = format!(
            "{:<w0$}  {:>w1$}  {:>w2$}  {:>w3$}  {:>w4$}",
            row[0],
            row[1],
            row[2],
            row[3],
            row[4],
            w0 = widths[0],
            w1 = widths[1],
            w2 = widths[2],
            w3 = widths[3],
            w4 = widths[4],
        );
        text.push_str(line.trim_end());
        text.push('\n');
    }
    let (num, den) = r.ratio();
    text.push_str(&format!(
        "ratio (p+2)(n-p+2)/((p-1)(n-p-1)) = {num}/{den} = {}\n",
        num as f64 / den as f64
    ));
    text.push_str(&format!(
        "distinct: {}  non-trivial: {}  holds: {}\n",
        yes_no(r.all_distinct),
        yes_no(r.all_nontrivial),
        yes_no(r.holds())
    ));
    text
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn cmd_census(args: &CensusArgs) -> Result<i32> {
    let report = census(args.grid.params()?)?;
    let text = match args.format {
        ReportFormat::Text => render_census(&report),
        ReportFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(if report.holds() {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    })
}

fn cmd_export(args: &ExportArgs) -> Result<i32> {
    let params = args.grid.params()?;
    if !(4..=9).contains(&params.n) || params.p < 2 || params.p + 2 > params.n {
        return Err(Error::invalid(format!(
            "export covers 4 <= n <= 9 and 2 <= p <= n-2, got (n,p) = {params}"
        )));
    }
    std::fs::create_dir_all(&args.out)?;
    let plucker = EquationSystem::generate(params, 1)?;
    let like = EquationSystem::generate(params, 2)?.canonical();
    let files: [(&str, &EquationSystem, bool); 3] = [
        ("plucker.tex", &plucker.canonical(), true),
        ("plucker_reduced.tex", &dedupe(&plucker).reduced, false),
        ("plucker_like.tex", &like, true),
    ];
    for (name, system, labeled) in files {
        let mut out = BufWriter::new(File::create(args.out.join(name))?);
        render_system(&mut out, system, Format::Latex, labeled)?;
        out.flush()?;
    }
    Ok(EXIT_OK)
}

fn render_probe(r: &ProbeReport) -> String {
    let mut text = format!(
        "probe (n,p) = ({},{}), |q| = {}  [{}]\n",
        r.n, r.p, r.q_size, r.note
    );
    text.push_str(&format!(
        "equations {}  coefficients in [-{b},{b}]  up to {} at a time  combinations {}\n",
        r.equations,
        r.max_combination,
        r.combinations_examined,
        b = r.coefficient_bound,
    ));
    match r.min_terms_seen {
        Some(t) => text.push_str(&format!("fewest terms in a non-zero combination: {t}\n")),
        None => text.push_str("no non-zero combination examined\n"),
    }
    text.push_str(&format!(
        "collapses to Plücker equations: {}\n",
        r.collapses.len()
    ));
    for c in &r.collapses {
        let parts: Vec<String> = c
            .members
            .iter()
            .zip(&c.coefficients)
            .map(|(l, k)| format!("{k:+}·{l}"))
            .collect();
        let targets: Vec<String> = c.plucker_labels.iter().map(|l| l.to_string()).collect();
        text.push_str(&format!("  {} -> {}\n", parts.join(" "), targets.join(" ")));
    }
    text
}

fn cmd_probe(args: &ProbeArgs) -> Result<i32> {
    let report = case3_probe(args.grid.params()?, args.q, args.max_combination)?;
    let text = match args.format {
        ReportFormat::Text => render_probe(&report),
        ReportFormat::Json => serde_json::to_string_pretty(&report)? + "\n",
    };
    write_output(args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

fn cmd_sample(args: &SampleArgs) -> Result<i32> {
    let params = args.grid.params()?;
    let h = if args.simple {
        random_simple(params, args.seed)
    } else {
        random_pvector(params, args.seed)
    };
    write_output(
        args.out.as_deref(),
        &(AnyPVector::Rational(h).to_json()? + "\n"),
    )?;
    Ok(EXIT_OK)
}
