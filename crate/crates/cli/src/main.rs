mod commands;
mod document;
mod gridcsv;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "fracdirac", version, about = "Verify generalized Clifford algebras, fractional derivatives and higher-order Dirac operators")]
struct Cli {
    /// Worker threads for library-level parallelism.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    threads: u16,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the generalized Clifford relations of the order-k representation.
    Algebra(commands::AlgebraArgs),
    /// Rest-frame solutions, dispersion determinant and exponential ansatz.
    Solve(commands::SolveArgs),
    /// Apply a fractional derivative to a sampled grid function.
    Fderiv(commands::FderivArgs),
    /// Seeded checks of the fractional derivative.
    Fcheck(commands::FcheckArgs),
    /// Worked operator example: conditions, operator square and solutions.
    Example(commands::ExampleArgs),
    /// Search for matrix linearizations.
    Linearize(commands::LinearizeArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    if let Err(e) = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads as usize)
        .build_global()
    {
        eprintln!("error: cannot start thread pool: {e}");
        return ExitCode::from(2);
    }
    let command_line = std::env::args().skip(1).collect::<Vec<_>>().join(" ");
    let result = match cli.command {
        Command::Algebra(a) => commands::algebra(&a, command_line),
        Command::Solve(a) => commands::solve(&a, command_line),
        Command::Fderiv(a) => commands::fderiv(&a, command_line),
        Command::Fcheck(a) => commands::fcheck(&a, command_line),
        Command::Example(a) => commands::example(&a, command_line),
        Command::Linearize(a) => commands::linearize(&a, command_line),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
