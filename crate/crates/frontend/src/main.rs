use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use vtc_frontend::builtin::builtin;
use vtc_frontend::pipeline::{bracket_of, run_pipeline, Options, Stage};
use vtc_frontend::{parse_model, Model};

/// Symbolic checks of local gauge systems in the variational tricomplex.
#[derive(Parser)]
#[command(name = "vtc", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the master equation and print Q and Σ.
    CheckMaster { model: String },
    /// Iterate the descent of the presymplectic structure.
    Descend {
        model: String,
        #[arg(long)]
        steps: Option<usize>,
    },
    /// Print the BRST current with its cross-check.
    Current { model: String },
    /// Bracket of two densities written in the model language.
    Bracket {
        model: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        /// Reduce both arguments to leaves and use the descendant structure.
        #[arg(long)]
        foliated: bool,
    },
    /// Find the homogenizing diffeomorphism on leaves.
    Homogenize { model: String },
    /// Run every stage and emit a report.
    Report {
        model: String,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

const VIOLATION: u8 = 1;
const USAGE: u8 = 2;

fn load(arg: &str) -> Result<Model, String> {
    let src = match std::fs::read_to_string(arg) {
        Ok(s) => s,
        Err(e) => match builtin(arg) {
            Some(s) => s.to_string(),
            None => return Err(format!("cannot read model '{arg}': {e}")),
        },
    };
    parse_model(&src).map_err(|e| format!("{arg}: {e}"))
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    if let Ok(v) = std::env::var("VTC_JET_ORDER_CAP") {
        match v.trim().parse::<usize>() {
            Ok(cap) if cap > 0 => vtc_core::variational::set_jet_order_cap(cap),
            _ => {
                eprintln!("error: VTC_JET_ORDER_CAP must be a positive integer, got '{v}'");
                return ExitCode::from(USAGE);
            }
        }
    }
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(VIOLATION),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Cmd) -> Result<bool, (u8, String)> {
    let usage = |e: String| (USAGE, e);
    let violation = |e: vtc_frontend::StageError| (VIOLATION, e.to_string());
    let stages = |s: &[Stage]| s.iter().copied().collect::<BTreeSet<_>>();
    let (model, selected, opts) = match &cmd {
        Cmd::CheckMaster { model } => (model, stages(&[Stage::CheckMaster]), Options::default()),
        Cmd::Descend { model, steps } => (model, stages(&[Stage::Descend]), Options { steps: *steps }),
        Cmd::Current { model } => (model, stages(&[Stage::Current]), Options::default()),
        Cmd::Homogenize { model } => (model, stages(&[Stage::Homogenize]), Options::default()),
        Cmd::Report { model, .. } => (model, stages(&Stage::ALL), Options::default()),
        Cmd::Bracket { model, a, b, foliated } => {
            let m = load(model).map_err(usage)?;
            let pa = m.eval_str(a).map_err(|e| usage(format!("--a: {e}")))?;
            let pb = m.eval_str(b).map_err(|e| usage(format!("--b: {e}")))?;
            let v = bracket_of(&m, &pa, &pb, *foliated).map_err(violation)?;
            emit(&format!("{}\n", v.render(&m.sp)));
            return Ok(true);
        }
    };
    let m = load(model).map_err(usage)?;
    let mut selected = selected;
    if m.leaves.is_none() && matches!(cmd, Cmd::Report { .. }) {
        selected.retain(|s| !matches!(s, Stage::Reduce | Stage::Brackets | Stage::Homogenize));
    }
    let report = run_pipeline(&m, &selected, &opts).map_err(violation)?;
    let text = match &cmd {
        Cmd::Report { format: Format::Json, .. } => report.to_json(),
        _ => report.to_text(),
    };
    match &cmd {
        Cmd::Report { out: Some(path), .. } => {
            std::fs::write(path, &text).map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?
        }
        _ => emit(&text),
    }
    Ok(report.ok())
}
