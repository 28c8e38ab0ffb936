use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use s3min::pipeline::Variant;
use s3min_cli::export::{Encoding, Format};
use s3min_cli::{config_dump, run_build, run_report, run_verify, thread_pool, BuildRequest, CliError};

#[derive(Parser)]
#[command(name = "s3min", version, about = "Minimal surfaces in S³ desingularizing intersecting Clifford tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Odd,
    Even,
}

#[derive(Subcommand)]
enum Command {
    /// Build, verify and export a surface.
    Build {
        #[arg(long, value_enum, default_value = "odd")]
        variant: VariantArg,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ell: usize,
        /// Refinement level of the fundamental piece.
        #[arg(long, default_value_t = 3)]
        refine: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Comma-separated subset of ply4, ply3-stereo, csv4.
        #[arg(long, value_delimiter = ',', default_value = "ply4")]
        format: Vec<Format>,
        /// Write ASCII instead of binary PLY.
        #[arg(long)]
        ascii: bool,
        /// Single-threaded, bit-reproducible run.
        #[arg(long)]
        deterministic: bool,
        /// Seed for the stereographic pole.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        grad_tol: Option<f64>,
    },
    /// Check topology and embeddedness of a ply4 or csv4 mesh.
    Verify {
        mesh: PathBuf,
        /// With --ell, also check genus, area bound and screw symmetry.
        #[arg(long, requires = "ell")]
        m: Option<usize>,
        #[arg(long, requires = "m")]
        ell: Option<usize>,
    },
    /// Summarize the reports in a build directory.
    Report { dir: PathBuf },
    /// Print the tessellation data for (m, ℓ).
    ConfigDump {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        ell: usize,
    },
}

fn print(v: &serde_json::Value) {
    // a closed pipe is not an error for a report printer
    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(v).expect("json"));
}

fn run(cli: Cli) -> Result<bool, CliError> {
    match cli.command {
        Command::Build { variant, m, ell, refine, out, format, ascii, deterministic, seed, max_iters, grad_tol } => {
            let variant = match variant {
                VariantArg::Odd => Variant::Odd,
                VariantArg::Even => Variant::Even,
            };
            let mut req = BuildRequest::new(variant, m, ell, refine, out);
            req.formats = format;
            req.encoding = if ascii { Encoding::Ascii } else { Encoding::Binary };
            req.deterministic = deterministic;
            req.seed = seed;
            if let Some(n) = max_iters {
                req.solver.max_iters = n;
            }
            if let Some(t) = grad_tol {
                req.solver.grad_tol = t;
            }
            req.validate()?;
            let outcome = thread_pool(deterministic)?.install(|| run_build(&req))?;
            for f in &outcome.files {
                eprintln!("wrote {}", f.display());
            }
            print(&outcome.report.to_json());
            Ok(outcome.report.passed())
        }
        Command::Verify { mesh, m, ell } => {
            let report = thread_pool(false)?.install(|| run_verify(&mesh, m.zip(ell)))?;
            print(&serde_json::to_value(&report).expect("json"));
            Ok(report.passed())
        }
        Command::Report { dir } => {
            let summary = run_report(&dir)?;
            print(&summary);
            Ok(summary["passed"] == true)
        }
        Command::ConfigDump { m, ell } => {
            print(&config_dump(m, ell)?);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Build { diagnostic, .. } = &e {
                print(diagnostic);
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
