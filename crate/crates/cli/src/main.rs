use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hirschlab::models::{build_component_diagram, build_log_dga, build_relative_quotient};
use hirschlab_cli::roundtrip::{roundtrip_file, ArtifactKind};
use hirschlab_cli::{named_model, run_suite, CliError, Fault, SuiteConfig, SuiteId};

#[derive(Parser)]
#[command(name = "hirschlab", version, about = "Exact verification suites for Hirsch extensions")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run verification suites and print one line per check.
    Run(RunArgs),
    /// Load, save and reload a JSON artifact.
    Roundtrip {
        path: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<ArtifactKind>,
    },
    /// Print a built-in model or an object derived from it as JSON.
    Canned {
        name: String,
        #[arg(long, value_enum, default_value_t = CannedArtifact::Model)]
        artifact: CannedArtifact,
        #[arg(long)]
        degree_bound: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CannedArtifact {
    Model,
    Datum,
    Relative,
    Diagram,
}

#[derive(Args)]
struct RunArgs {
    /// Suites to run; all of them when omitted.
    #[arg(long = "suite", value_enum)]
    suites: Vec<SuiteId>,
    /// Built-in model to run on instead of each suite's defaults.
    #[arg(long)]
    model: Option<String>,
    /// Model JSON file; its own degree bound applies unless --degree-bound is given.
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// Truncation bound N of the Hirsch extension.
    #[arg(long, default_value_t = 6)]
    truncation: usize,
    /// First truncation bound of the stabilization window.
    #[arg(long)]
    start: Option<usize>,
    #[arg(long, default_value_t = 2)]
    window: usize,
    /// Polynomial degree bound D of the models.
    #[arg(long)]
    degree_bound: Option<usize>,
    /// Highest filtration level checked.
    #[arg(long, default_value_t = 4)]
    i_max: i32,
    /// Highest cohomological degree checked.
    #[arg(long, default_value_t = 3)]
    q_max: i32,
    /// Worker threads; all cores when unset.
    #[arg(long, env = "HIRSCHLAB_JOBS")]
    jobs: Option<usize>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_enum)]
    inject_fault: Option<Fault>,
    /// Seed for the randomized suites.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
}

impl RunArgs {
    fn config(self) -> SuiteConfig {
        SuiteConfig {
            suites: if self.suites.is_empty() { SuiteId::ALL.to_vec() } else { self.suites },
            model: self.model,
            model_file: self.model_file,
            file_model: None,
            truncation: self.truncation,
            start: self.start,
            window: self.window,
            degree_bound: self.degree_bound,
            i_max: self.i_max,
            q_max: self.q_max,
            jobs: self.jobs,
            fault: self.inject_fault,
            seed: self.seed,
        }
    }
}

fn run(args: RunArgs) -> Result<i32, CliError> {
    let report_path = args.report.clone();
    let mut cfg = args.config();
    cfg.load_model_file()?;
    let report = run_suite(&cfg)?;
    print!("{}", report.to_text());
    if let Some(path) = report_path {
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        std::fs::write(&path, text + "\n").map_err(|e| CliError::Io(path, e))?;
    }
    Ok(report.exit_code())
}

fn canned_json(name: &str, artifact: CannedArtifact, bound: Option<usize>) -> Result<String, CliError> {
    let mut m = named_model(name)?;
    if let Some(d) = bound {
        m = m.with_degree_bound(d);
    }
    let math = |e: hirschlab::models::ModelError| CliError::Config(e.to_string());
    let value = match artifact {
        CannedArtifact::Model => serde_json::to_value(&m),
        CannedArtifact::Datum => serde_json::to_value(build_log_dga(&m).map_err(math)?),
        CannedArtifact::Relative => serde_json::to_value(build_relative_quotient(&m).map_err(math)?),
        CannedArtifact::Diagram => serde_json::to_value(build_component_diagram(&m).map_err(math)?),
    }
    .expect("artifacts serialize");
    Ok(serde_json::to_string_pretty(&value).expect("value serializes"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run(args) => run(args),
        Cmd::Roundtrip { path, kind } => roundtrip_file(&path, kind).map(|v| {
            println!("{}: {:?}, {}", path.display(), v.kind, if v.equal { "identical" } else { "DIFFERS" });
            if v.equal {
                0
            } else {
                1
            }
        }),
        Cmd::Canned { name, artifact, degree_bound } => canned_json(&name, artifact, degree_bound).map(|s| {
            println!("{s}");
            0
        }),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
