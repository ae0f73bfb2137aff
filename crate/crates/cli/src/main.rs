use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tci_cli::{execute, verify_report, CliError, RunOptions, Task, EXIT_DEFINITIVE, EXIT_ERROR, EXIT_INCONCLUSIVE};

/// Irreducibility, component counts and certificates for generic sparse
/// polynomial systems.
#[derive(Parser, Debug)]
#[command(name = "tci", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mixed volume of n supports in Z^n.
    Mvol(Common),
    /// Khovanskii condition with the full defect table.
    Khovanskii(Common),
    /// Irreducible / empty / number of components.
    Components(Common),
    /// Search for an adjusted-collection irreducibility certificate.
    EciCheck(Common),
    /// Encode a derivative pattern and certify its critical locus.
    CriticalLocus(Common),
    /// Finite-field root counts compared with the BKK bound.
    Oracle(Common),
    /// Run the task named in the problem file.
    Run(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// Problem file (JSON); `-` reads standard input.
    input: String,
    /// Characteristic to work in (0 or a prime); repeatable, overrides the file.
    #[arg(long = "char", value_name = "P")]
    chars: Vec<u64>,
    /// Budget for the certificate search.
    #[arg(long, default_value_t = RunOptions::default().max_states)]
    max_states: u64,
    /// Master seed for randomised oracles.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Emit the JSON report (default).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Emit a human-readable summary.
    #[arg(long)]
    text: bool,
    /// Re-verify the certificates of an earlier report instead of searching.
    #[arg(long, value_name = "REPORT")]
    verify_certificate: Option<PathBuf>,
    /// Trials per oracle run.
    #[arg(long, default_value_t = RunOptions::default().oracle_trials)]
    oracle_trials: usize,
}

fn read_input(path: &str) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    let result = if path == "-" {
        std::io::stdin().read_to_end(&mut buf).map(|_| ())
    } else {
        std::fs::read(path).map(|b| buf = b)
    };
    result.map_err(|source| CliError::Io {
        path: path.to_string(),
        source,
    })?;
    Ok(buf)
}

fn run(task: Option<Task>, args: Common) -> Result<i32, CliError> {
    let input = read_input(&args.input)?;
    if let Some(path) = &args.verify_certificate {
        let report = read_input(&path.to_string_lossy())?;
        let results = verify_report(task, &input, &report)?;
        let mut all = true;
        for (ch, ok) in results {
            println!("characteristic {ch}: certificate {}", if ok { "valid" } else { "INVALID" });
            all &= ok;
        }
        return Ok(if all { EXIT_DEFINITIVE } else { EXIT_ERROR });
    }
    let opts = RunOptions {
        characteristics: args.chars,
        max_states: args.max_states,
        seed: args.seed,
        oracle_trials: args.oracle_trials,
    };
    let report = execute(task, &input, &opts)?;
    if args.text {
        print!("{}", report.to_text());
    } else {
        print!("{}", report.to_json());
    }
    Ok(if report.is_inconclusive() {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_DEFINITIVE
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { EXIT_DEFINITIVE as u8 });
        }
    };
    let (task, args) = match cli.command {
        Command::Mvol(a) => (Some(Task::Mvol), a),
        Command::Khovanskii(a) => (Some(Task::Khovanskii), a),
        Command::Components(a) => (Some(Task::Components), a),
        Command::EciCheck(a) => (Some(Task::EciCheck), a),
        Command::CriticalLocus(a) => (Some(Task::CriticalLocus), a),
        Command::Oracle(a) => (Some(Task::Oracle), a),
        Command::Run(a) => (None, a),
    };
    match run(task, args) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
