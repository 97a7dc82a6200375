//! `oligocat`: runs bounded verification checks described by a JSON scenario
//! and prints a JSON (or plain text) report.
//!
//! Exit status: 0 when every check passes, 1 when a check fails (the report
//! carries witnesses), 2 on malformed input or an exceeded bound.

mod commands;
mod report;
mod scenario;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::{CmdError, Command, Ctx};
use scenario::{Instance, RingName, Scenario};

#[derive(Parser, Debug)]
#[command(name = "oligocat", version, about = "Exact checks on finitely-powered regular categories")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Point bound for G-set instances.
    #[arg(long)]
    max_points: Option<usize>,
    /// Element bound for op-finset instances.
    #[arg(long)]
    max_elements: Option<usize>,
    #[arg(long, value_enum)]
    ring: Option<RingName>,
    /// Seed for sampled checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// phi-verify: object triples whose product has more atoms are sampled, not exhausted.
    #[arg(long, default_value_t = 18)]
    triple_cap: usize,
    /// phi-verify: do not cap triples (can take very long).
    #[arg(long)]
    exhaustive: bool,
    /// phi-verify: random basis pairs per capped triple.
    #[arg(long, default_value_t = 20)]
    samples: usize,
    /// First object, e.g. `[3]`, `G`, `G+[1]`, `orbit(3)`.
    #[arg(long)]
    object: Option<String>,
    /// Second object for two-object commands.
    #[arg(long)]
    object2: Option<String>,
    /// JSON output (the default).
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Plain text output.
    #[arg(long)]
    text: bool,
}

fn context(cli: &Cli, sc: &Scenario, inst: &Instance) -> Result<Ctx, String> {
    let (bound, wrong) = match inst {
        Instance::GSet(_) => (
            cli.max_points.or(sc.bounds.max_points),
            cli.max_elements.map(|_| "--max-elements"),
        ),
        Instance::OpFinSet(_) => (
            cli.max_elements.or(sc.bounds.max_elements),
            cli.max_points.map(|_| "--max-points"),
        ),
    };
    if let Some(flag) = wrong {
        return Err(format!("{flag} does not apply to this instance"));
    }
    let bound = bound.ok_or("no bound given: pass --max-points / --max-elements or set bounds in the scenario")?;
    if bound == 0 {
        return Err("bounds must be positive".into());
    }
    let ring = cli.ring.unwrap_or_else(|| sc.ring());
    Ok(Ctx {
        bound,
        object: cli.object.clone().or_else(|| sc.object.clone()),
        object2: cli.object2.clone().or_else(|| sc.object2.clone()),
        seed: cli.seed,
        triple_cap: (!cli.exhaustive).then_some(cli.triple_cap),
        samples: cli.samples,
        ring,
        degree: sc.degree(ring),
        measure: sc.measure(),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let setup = Scenario::load(&cli.scenario).and_then(|sc| {
        let inst = sc.instance()?;
        let ctx = context(&cli, &sc, &inst)?;
        Ok((inst, ctx, sc.name))
    });
    let (inst, ctx, name) = match setup {
        Ok(v) => v,
        Err(e) => {
            eprintln!("oligocat: {e}");
            return ExitCode::from(2);
        }
    };
    match commands::run(cli.command, &inst, &ctx) {
        Ok(mut r) => {
            if let Some(name) = name {
                r.set("scenario", name);
            }
            let text = if cli.text {
                r.to_text()
            } else {
                serde_json::to_string_pretty(&r.to_json()).expect("reports serialize") + "\n"
            };
            // A closed pipe downstream is not an error of the check.
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(if r.passed() { 0 } else { 1 })
        }
        Err(CmdError::Input(e)) => {
            eprintln!("oligocat: {e}");
            ExitCode::from(2)
        }
        Err(CmdError::Precondition { message, witness }) => {
            eprintln!("oligocat: {message}: {witness}");
            ExitCode::from(2)
        }
    }
}
