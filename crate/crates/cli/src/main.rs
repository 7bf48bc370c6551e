mod args;
mod commands;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, Format};
use commands::{Context, Failure, EXIT_USAGE};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if cli.common.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global()
        {
            eprintln!("wbl: could not size the thread pool: {e}");
        }
    }
    let ctx = Context {
        seed: cli.common.seed,
        precision: cli.common.precision,
    };
    let result = match &cli.command {
        Command::Distance(a) => commands::distance(a, &ctx),
        Command::Seminorm(a) => commands::seminorm(a, &ctx),
        Command::CheckAdmissible(a) => commands::check_admissible_cmd(a, &ctx),
        Command::Verify(a) => commands::verify(a, &ctx),
        Command::Catalog => commands::list_catalog(&ctx),
    };
    match result {
        Ok(out) => {
            let text = match cli.common.output() {
                Format::Json => {
                    let v = output::round_json(out.json, ctx.precision);
                    serde_json::to_string(&v).expect("serializable") + "\n"
                }
                Format::Csv => out.table.render(),
                Format::Human => out.human,
            };
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(text.as_bytes());
            let _ = stdout.flush();
            for d in &out.diagnostics {
                eprintln!("wbl: {d}");
            }
            ExitCode::from(out.exit_code)
        }
        Err(f) => {
            let kind = match f {
                Failure::Usage(_) => "error",
                Failure::Numerical(_) => "numerical failure",
            };
            eprintln!("wbl: {kind}: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
