use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use ddl::cli::{
    cmd_check_postulates, cmd_compile, cmd_entail, cmd_rank, cmd_solve, CmdOutput, OutputFormat,
    RunConfig, SolveMode,
};

/// Defeasible description-logic toolkit: rank defeasible axioms by rational
/// closure, compile the ranked base into a dl-program, and compute its strong
/// answer sets and consequences.
#[derive(Parser)]
#[command(name = "ddl", version, about)]
struct Args {
    #[command(subcommand)]
    command: Command,

    /// Report format
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,

    /// External classical reasoner command (defaults to $DDL_ORACLE)
    #[arg(long, global = true)]
    oracle: Option<String>,

    /// External oracle timeout in seconds
    #[arg(long, global = true, default_value_t = 30)]
    timeout: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    All,
    Cautious,
    Brave,
}

#[derive(Subcommand)]
enum Command {
    /// Rank the defeasible axioms of a knowledge base
    Rank { file: PathBuf },
    /// Compile a knowledge base into a dl-program
    Compile {
        file: PathBuf,
        /// Write the program here instead of standard output
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Enumerate strong answer sets, or decide a ground query
    Solve {
        file: PathBuf,
        /// Ground literal such as `f(a)` or `-c(b)`
        #[arg(long)]
        query: Option<String>,
        #[arg(long, value_enum, default_value_t = ModeArg::All)]
        mode: ModeArg,
    },
    /// Decide a defeasible (`C ~[= D`) or strict (`C [= D`) query
    Entail {
        file: PathBuf,
        #[arg(long)]
        query: String,
    },
    /// Check the rational-consequence postulates on random knowledge bases
    CheckPostulates {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        cases: usize,
    },
}

fn main() {
    let args = Args::parse();
    let format = match args.format {
        FormatArg::Text => OutputFormat::Text,
        FormatArg::Json => OutputFormat::Json,
    };
    let mut cfg = RunConfig {
        format,
        oracle_command: args.oracle,
        timeout_secs: args.timeout,
        ..RunConfig::default()
    };

    let out: CmdOutput = match args.command {
        Command::Rank { file } => {
            cfg.input = Some(file);
            cmd_rank(&cfg)
        }
        Command::Compile { file, output } => {
            cfg.input = Some(file);
            cfg.output = output;
            cmd_compile(&cfg)
        }
        Command::Solve { file, query, mode } => {
            cfg.input = Some(file);
            let mode = match mode {
                ModeArg::All => SolveMode::All,
                ModeArg::Cautious => SolveMode::Cautious,
                ModeArg::Brave => SolveMode::Brave,
            };
            cmd_solve(&cfg, query.as_deref(), mode)
        }
        Command::Entail { file, query } => {
            cfg.input = Some(file);
            cmd_entail(&cfg, &query)
        }
        Command::CheckPostulates { seed, cases } => {
            cfg.seed = seed;
            cfg.cases = cases;
            cmd_check_postulates(&cfg)
        }
    };
    print!("{}", out.rendered(format));
    std::process::exit(out.exit_code);
}
