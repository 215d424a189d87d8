//! torusflats: closures of projected algebraic sets in compact tori.
//!
//! Every command reads one JSON job file (schema "v1") and writes one
//! JSON result. Exit codes: 0 success, 2 schema violation, 3 math
//! precondition failed, 4 internal invariant breached. Errors print a
//! machine-readable JSON object on stderr.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use torusflats_cli::{dto, ops};

#[derive(Parser)]
#[command(name = "torusflats", version, about = "Closures of projected algebraic sets in compact tori")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Smallest lattice-defined subspace containing the input
    Saturate(JobArgs),
    /// Puiseux branches of a plane curve at infinity, with residuals
    Branches(JobArgs),
    /// Asymptotic flat of one branch family, with minimality witnesses
    Flat(JobArgs),
    /// Closure description assembled from branch families
    Closure(JobArgs),
    /// Numerical checks: attraction to the closure, density of orbits
    Verify(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Job file (JSON, schema v1)
    #[arg(long)]
    input: PathBuf,
    /// Result file; stdout when omitted
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed for every randomized step
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bits of precision for certified distance brackets
    #[arg(long, default_value_t = 48)]
    precision_bits: u32,
    /// Override the series order for branch expansion
    #[arg(long)]
    truncation: Option<String>,
    /// Override the tolerance (attraction) or epsilon (density)
    #[arg(long)]
    tol: Option<String>,
    /// Override the sample budget (density)
    #[arg(long)]
    samples: Option<usize>,
    /// Geometric radius schedule start,ratio,count (attraction)
    #[arg(long)]
    radius_schedule: Option<String>,
    /// Also write attraction rows as CSV to this path
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn parse_schedule(s: &str) -> Result<Vec<num_rational::BigRational>, dto::CliError> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(dto::CliError::schema(
            "radius schedule must be start,ratio,count",
        ));
    }
    let start = dto::parse_rat(parts[0])?;
    let ratio = dto::parse_rat(parts[1])?;
    let count: usize = parts[2]
        .trim()
        .parse()
        .map_err(|e| dto::CliError::schema(format!("bad schedule count: {}", e)))?;
    let mut out = Vec::with_capacity(count);
    let mut r = start;
    for _ in 0..count {
        out.push(r.clone());
        r *= &ratio;
    }
    Ok(out)
}

fn real_main() -> Result<(), dto::CliError> {
    let cli = Cli::parse();
    let (name, args) = match &cli.cmd {
        Cmd::Saturate(a) => ("saturate", a),
        Cmd::Branches(a) => ("branches", a),
        Cmd::Flat(a) => ("flat", a),
        Cmd::Closure(a) => ("closure", a),
        Cmd::Verify(a) => ("verify", a),
    };
    let input = std::fs::read_to_string(&args.input).map_err(|e| {
        dto::CliError::schema(format!("cannot read {}: {}", args.input.display(), e))
    })?;
    let flags = ops::Flags {
        seed: args.seed,
        bits: args.precision_bits,
        truncation: args
            .truncation
            .as_deref()
            .map(dto::parse_rat)
            .transpose()?,
        tol: args.tol.as_deref().map(dto::parse_rat).transpose()?,
        samples: args.samples,
        radii: args
            .radius_schedule
            .as_deref()
            .map(parse_schedule)
            .transpose()?,
    };
    let (json, csv) = ops::dispatch(name, &input, &flags)?;
    match &args.output {
        Some(p) => std::fs::write(p, &json).map_err(|e| {
            dto::CliError::schema(format!("cannot write {}: {}", p.display(), e))
        })?,
        None => print!("{}", json),
    }
    if let (Some(path), Some(table)) = (&args.csv, &csv) {
        std::fs::write(path, table).map_err(|e| {
            dto::CliError::schema(format!("cannot write {}: {}", path.display(), e))
        })?;
    }
    Ok(())
}

fn panic_text(p: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        (*s).to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "unspecified panic".to_string()
    }
}

fn main() {
    // panics are reported as structured internal errors, not backtraces
    std::panic::set_hook(Box::new(|_| {}));
    let code = match std::panic::catch_unwind(real_main) {
        Ok(Ok(())) => 0,
        Ok(Err(e)) => {
            eprintln!("{}", e.render());
            e.code()
        }
        Err(p) => {
            let e = dto::CliError::internal(panic_text(p.as_ref()));
            eprintln!("{}", e.render());
            4
        }
    };
    std::process::exit(code);
}
