use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use nlbox::scenario::{
    emit_table, parse_scenario, run_scenario, run_witness_file, with_protocol, write_report, OutputFormat,
    ProtocolKind, Report, RunOptions, ScenarioError, ScenarioResult,
};

#[derive(Parser)]
#[command(
    name = "nlbox",
    version,
    about = "Run nonlinear-box scenarios and linearity witnesses"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the protocol a scenario selects.
    Run(ScenarioArgs),
    /// Run the verification protocol on a scenario's box.
    Verify(ScenarioArgs),
    /// Run the signaling test on a scenario's box.
    Signaling(ScenarioArgs),
    /// Run the BB84 intercept-resend attack with a scenario's box.
    Bb84(ScenarioArgs),
    /// Fit a linear map to a statistics file.
    Witness {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run every `.scn` file in a directory.
    Batch {
        dir: PathBuf,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    file: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Report file; a directory for `batch`.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    /// Output directory used when `--out` is absent.
    #[arg(long, env = "NLBOX_OUT_DIR", hide = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

fn extension(format: OutputFormat) -> &'static str {
    match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    }
}

fn deliver(report: &Report, format: OutputFormat, out: Option<PathBuf>, out_dir: Option<&Path>) -> ScenarioResult<()> {
    let target = out.or_else(|| out_dir.map(|d| d.join(format!("{}.{}", report.name, extension(format)))));
    match target {
        Some(path) => write_report(report, format, &path),
        None => {
            print!("{}", emit_table(report, format)?);
            Ok(())
        }
    }
}

fn run_file(
    path: &Path,
    kind: Option<ProtocolKind>,
    common: &Common,
) -> ScenarioResult<(Report, OutputFormat, Option<PathBuf>)> {
    let mut config = parse_scenario(path)?;
    if let Some(kind) = kind {
        config = with_protocol(config, kind);
    }
    let options = RunOptions {
        seed: common.seed,
        tol: common.tol,
    };
    let report = run_scenario(&config, options)?;
    let (configured_format, configured_path) = config
        .output
        .as_ref()
        .map_or((None, None), |o| (o.format, o.path.as_ref().map(PathBuf::from)));
    let format = common
        .format
        .map(Into::into)
        .or(configured_format)
        .unwrap_or(OutputFormat::Json);
    Ok((report, format, configured_path))
}

fn single(path: &Path, kind: Option<ProtocolKind>, common: Common) -> ScenarioResult<()> {
    let (report, format, configured) = run_file(path, kind, &common)?;
    let out = common.out.clone().or(configured);
    deliver(&report, format, out, common.out_dir.as_deref())
}

fn batch(dir: &Path, common: Common) -> ScenarioResult<()> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| ScenarioError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "scn"))
        .collect();
    files.sort();
    let out_dir = common.out.clone().or_else(|| common.out_dir.clone());

    let outcomes: Vec<ScenarioResult<()>> = std::thread::scope(|s| {
        let handles: Vec<_> = files
            .iter()
            .map(|f| {
                let common = common.clone();
                let out_dir = out_dir.clone();
                s.spawn(move || {
                    let (report, format, _) = run_file(f, None, &common)?;
                    let dir = out_dir.unwrap_or_else(|| PathBuf::from("."));
                    let path = dir.join(format!("{}.{}", report.name, extension(format)));
                    write_report(&report, format, &path)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(ScenarioError::Protocol("worker panicked".into())))
            })
            .collect()
    });

    let mut first_error = None;
    for (f, outcome) in files.iter().zip(outcomes) {
        match outcome {
            Ok(()) => eprintln!("ok    {}", f.display()),
            Err(e) => {
                eprintln!("fail  {}: {e}", f.display());
                first_error.get_or_insert(e);
            }
        }
    }
    first_error.map_or(Ok(()), Err)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => single(&a.file, None, a.common),
        Command::Verify(a) => single(&a.file, Some(ProtocolKind::Verification), a.common),
        Command::Signaling(a) => single(&a.file, Some(ProtocolKind::Signaling), a.common),
        Command::Bb84(a) => single(&a.file, Some(ProtocolKind::Bb84), a.common),
        Command::Witness { file, common } => run_witness_file(&file, common.tol).and_then(|report| {
            let format = common.format.map(Into::into).unwrap_or(OutputFormat::Json);
            deliver(&report, format, common.out.clone(), common.out_dir.as_deref())
        }),
        Command::Batch { dir, common } => batch(&dir, common),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlbox: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
