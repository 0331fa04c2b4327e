//! `relgrowth`: growth rates, train track data and displacement brackets for
//! automorphisms of free products, read from a TOML document.

mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use relgrowth::document::{parse_input, Model};
use relgrowth::dynamics::{DEFAULT_CONVERGENCE_TOLERANCE, DEFAULT_ITERATIONS, DEFAULT_WORD_GUARD};
use relgrowth::{library, Error, Result};

use output::{Format, Report};

#[derive(Parser)]
#[command(name = "relgrowth", version, about)]
struct Cli {
    /// Output format for reports and error records.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Input {
    /// Input document.
    #[arg(required_unless_present = "example", conflicts_with = "example")]
    file: Option<PathBuf>,
    /// Use a bundled example instead of a file.
    #[arg(long)]
    example: Option<String>,
}

impl Input {
    fn load(&self) -> Result<Model> {
        match (&self.file, &self.example) {
            (_, Some(name)) => library::example(name),
            (Some(path), None) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::input(path.display().to_string(), e.to_string()))?;
                parse_input(&text)
            }
            (None, None) => Err(Error::input("arguments", "no input given")),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum LengthChoice {
    /// Relative conjugacy length.
    Relative,
    /// Translation length on the document's graph.
    Tree,
}

#[derive(Args)]
struct Estimation {
    #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
    iterations: usize,
    #[arg(long, default_value_t = DEFAULT_CONVERGENCE_TOLERANCE)]
    tolerance: f64,
    /// Stop when an iterate exceeds this many syllables.
    #[arg(long, default_value_t = DEFAULT_WORD_GUARD)]
    word_guard: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Strata, PF eigendata and the turn legality table.
    Analyze {
        #[command(flatten)]
        input: Input,
    },
    /// Growth sequence and rate estimate for one element.
    Growth {
        #[command(flatten)]
        input: Input,
        /// Element as a word, e.g. "a b'" or "1:1 a".
        #[arg(long, allow_hyphen_values = true)]
        element: String,
        #[arg(long, value_enum, default_value_t = LengthChoice::Relative)]
        length: LengthChoice,
        #[command(flatten)]
        estimation: Estimation,
    },
    /// Lipschitz upper bounds over the rescaled family and growth lower bounds.
    Displacement {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
        n_grid: Vec<f64>,
        /// Sample element (repeatable); defaults to the document's sample.
        #[arg(long, allow_hyphen_values = true)]
        sample: Vec<String>,
        #[command(flatten)]
        estimation: Estimation,
    },
    /// Train track and relative train track verdicts.
    Verify {
        #[command(flatten)]
        input: Input,
        /// Longest connecting path checked; defaults to twice the edge count.
        #[arg(long)]
        rtt_bound: Option<usize>,
    },
    /// Polynomial growth bound check for one element.
    Bound {
        #[command(flatten)]
        input: Input,
        #[arg(long, allow_hyphen_values = true)]
        element: String,
        #[arg(long, default_value_t = DEFAULT_ITERATIONS)]
        iterations: usize,
        #[arg(long, default_value_t = DEFAULT_WORD_GUARD)]
        word_guard: usize,
    },
    /// Lipschitz constant of the rescaled map at each N.
    Sweep {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100,1000")]
        n_grid: Vec<f64>,
    },
    /// List the bundled examples, or print one.
    Examples {
        /// Print this example's document.
        #[arg(long)]
        show: Option<String>,
    },
}

fn run(command: &Command) -> Result<Report> {
    match command {
        Command::Analyze { input } => commands::analyze(&input.load()?),
        Command::Growth {
            input,
            element,
            length,
            estimation,
        } => commands::growth(
            &input.load()?,
            element,
            matches!(length, LengthChoice::Tree),
            estimation,
        ),
        Command::Displacement {
            input,
            n_grid,
            sample,
            estimation,
        } => commands::displacement(&input.load()?, n_grid, sample, estimation),
        Command::Verify { input, rtt_bound } => commands::verify(&input.load()?, *rtt_bound),
        Command::Bound {
            input,
            element,
            iterations,
            word_guard,
        } => commands::bound(&input.load()?, element, *iterations, *word_guard),
        Command::Sweep { input, n_grid } => commands::sweep(&input.load()?, n_grid),
        Command::Examples { show } => commands::examples(show.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(&cli.command) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            // a closed pipe is not worth a panic
            let _ = out.write_all(report.render(cli.format).as_bytes());
            report.exit_code
        }
        Err(e) => {
            let _ = std::io::stderr().write_all(output::render_error(&e, cli.format).as_bytes());
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
