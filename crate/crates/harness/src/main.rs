use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::LevelFilter;
use syncsub_harness::{
    emit_report, parse_scenario, run_scenario, Format, HarnessError, Kind, Report, Scenario,
};

#[derive(Parser)]
#[command(
    name = "syncsub",
    version,
    about = "Synchronization-subspace scenario runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output file, or a directory when several scenarios run at once.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format [default: json].
    #[arg(long, value_enum, global = true)]
    format: Option<FormatArg>,

    /// Replaces the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Tolerance override, e.g. `--tol compat=1e-9`. Repeatable.
    #[arg(long = "tol", value_name = "NAME=VALUE", value_parser = parse_tol, global = true)]
    tol: Vec<(String, f64)>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify Hamiltonians against a clock.
    CheckCompat { scenario: PathBuf },
    /// Drift and fidelity traces.
    Drift { scenario: PathBuf },
    /// Synchronization kernel extraction.
    Kernel { scenario: PathBuf },
    /// Representation, Schur and containment analysis.
    GroupAnalyze { scenario: PathBuf },
    /// Run scenarios of any kind.
    Run {
        #[arg(required = true)]
        scenarios: Vec<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }
}

fn parse_tol(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|e| format!("bad value '{value}': {e}"))?;
    Ok((name.trim().to_string(), value))
}

fn init_logging() {
    let level = match std::env::var("SYNCSUB_LOG") {
        Ok(v) => v.parse::<LevelFilter>().unwrap_or_else(|_| {
            eprintln!("warning: SYNCSUB_LOG='{v}' not recognized (use off, info or debug); logging disabled");
            LevelFilter::Off
        }),
        Err(_) => LevelFilter::Off,
    };
    env_logger::Builder::new()
        .filter_level(level)
        .format_timestamp(None)
        .init();
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    std::fs::write(path, bytes).map_err(io)
}

struct Options<'a> {
    out: Option<&'a Path>,
    format: Option<Format>,
    seed: Option<u64>,
    tol: &'a [(String, f64)],
    /// `--out` names a directory.
    many: bool,
}

fn load(path: &Path, tol: &[(String, f64)], expect: &[Kind]) -> Result<Scenario, HarnessError> {
    let mut s = parse_scenario(path)?;
    if !expect.is_empty() && !expect.contains(&s.kind()) {
        let names: Vec<&str> = expect.iter().map(Kind::as_str).collect();
        return Err(HarnessError::validation(
            "kind",
            format!(
                "this subcommand expects {}, got '{}'",
                names.join(" or "),
                s.kind()
            ),
        ));
    }
    for (name, value) in tol {
        s.set_tolerance(name, *value)?;
    }
    Ok(s)
}

fn emit(s: &Scenario, r: &Report, opts: &Options) -> Result<(), HarnessError> {
    if let Some(out) = opts.out {
        let format = opts.format.unwrap_or(Format::Json);
        let bytes = emit_report(r, format)?;
        let path = if opts.many {
            std::fs::create_dir_all(out).map_err(|source| HarnessError::Io {
                path: out.display().to_string(),
                source,
            })?;
            out.join(format!("{}.{}", r.scenario, format.extension()))
        } else {
            out.to_path_buf()
        };
        return write_file(&path, &bytes);
    }
    let listed = s.spec.outputs.as_ref().filter(|_| opts.format.is_none());
    if let Some(outputs) = listed {
        let base = s.base_dir.clone().unwrap_or_default();
        let targets = [
            (&outputs.csv, Format::Csv),
            (&outputs.json, Format::Json),
            (&outputs.text, Format::Text),
        ];
        let mut wrote = false;
        for (path, format) in targets {
            if let Some(p) = path {
                write_file(&base.join(p), &emit_report(r, format)?)?;
                wrote = true;
            }
        }
        if wrote {
            return Ok(());
        }
    }
    let bytes = emit_report(r, opts.format.unwrap_or(Format::Json))?;
    let mut stdout = std::io::stdout().lock();
    stdout
        .write_all(&bytes)
        .and_then(|_| stdout.flush())
        .map_err(|source| HarnessError::Io {
            path: "<stdout>".into(),
            source,
        })
}

/// Exit status of one scenario: 0 pass, 1 verdict failure, 2/3 errors.
fn run_one(path: &Path, expect: &[Kind], opts: &Options) -> i32 {
    let result = load(path, opts.tol, expect).and_then(|s| {
        let r = run_scenario(&s, opts.seed)?;
        emit(&s, &r, opts)?;
        Ok(r)
    });
    match result {
        Ok(r) if r.passed => 0,
        Ok(r) => {
            let failed: Vec<&str> = r
                .verdicts
                .iter()
                .filter(|(_, &v)| !v)
                .map(|(k, _)| k.as_str())
                .collect();
            eprintln!("{}: verdicts failed: {}", path.display(), failed.join(", "));
            1
        }
        Err(e) => {
            eprintln!("{}: {e}", path.display());
            e.exit_code()
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_logging();
    let (paths, expect): (Vec<PathBuf>, &[Kind]) = match cli.command {
        Command::CheckCompat { scenario } => (vec![scenario], &[Kind::Compat]),
        Command::Drift { scenario } => (vec![scenario], &[Kind::Drift, Kind::Fidelity]),
        Command::Kernel { scenario } => (vec![scenario], &[Kind::Kernel]),
        Command::GroupAnalyze { scenario } => (vec![scenario], &[Kind::Group]),
        Command::Run { scenarios } => (scenarios, &[]),
    };
    let opts = Options {
        out: cli.out.as_deref(),
        format: cli.format.map(Format::from),
        seed: cli.seed,
        tol: &cli.tol,
        many: paths.len() > 1,
    };
    // worst outcome wins: numerical > invalid input > violated bound
    let code = paths
        .iter()
        .map(|p| run_one(p, expect, &opts))
        .max()
        .unwrap_or(0);
    ExitCode::from(code as u8)
}
