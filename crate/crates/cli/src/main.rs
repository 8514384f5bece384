use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand};

mod commands;
mod report;

/// Exact and sampled Gaussian expectations of random tensor bubbles.
#[derive(Parser, Debug)]
#[command(name = "bubbles", version)]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Emit a CSV table instead of the JSON report where one exists.
    #[arg(long, global = true)]
    csv: bool,
    /// Write the output to FILE instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact expectation by Wick enumeration.
    Expect {
        bubble: PathBuf,
        /// Covariance N^-alpha.
        #[arg(long, default_value_t = 0)]
        alpha: i64,
        /// Also evaluate at this numeric N (with per-color dimensions).
        #[arg(long = "numeric-N", alias = "numeric-n", value_name = "N")]
        numeric_n: Option<u64>,
    },
    /// Effective observable for a color split, checked against the oracle.
    Effective {
        bubble: PathBuf,
        /// Column colors, e.g. "2,4".
        #[arg(long, default_value = "2,4")]
        split: String,
    },
    /// Catalan-product law for corner-labeled trees.
    Tree {
        /// JSON file holding one tree or a list of trees.
        file: Option<PathBuf>,
        /// Enumerate every tree with at most V vertices and total label at most K.
        #[arg(long, num_args = 2, value_names = ["V", "K"], conflicts_with = "file")]
        enumerate: Option<Vec<u32>>,
        #[arg(long, default_value_t = 2)]
        alpha: i64,
    },
    /// Weingarten function table of S_n.
    Weingarten {
        n: usize,
        /// "symbolic", "N^k" or a positive integer.
        #[arg(long, default_value = "symbolic")]
        dim: String,
    },
    /// Complex Wishart moment <prod tr W^l_j>.
    Wishart {
        /// Comma-separated lengths, e.g. "2" or "1,1".
        lengths: String,
        /// Row dimension: "N^k" or a positive integer.
        #[arg(long, default_value = "N")]
        rows: String,
        /// Column dimension: "N^k" or a positive integer.
        #[arg(long, default_value = "N")]
        cols: String,
    },
    /// Monte Carlo estimate, checked against the oracle when feasible.
    Mc {
        bubble: PathBuf,
        #[arg(
            long = "numeric-N",
            alias = "numeric-n",
            value_name = "N",
            default_value_t = 2
        )]
        numeric_n: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        variance: f64,
    },
}

fn run(cli: &Cli) -> anyhow::Result<report::RunReport> {
    match &cli.command {
        Command::Expect {
            bubble,
            alpha,
            numeric_n,
        } => commands::expect(bubble, *alpha, *numeric_n),
        Command::Effective { bubble, split } => commands::effective(bubble, split),
        Command::Tree {
            file,
            enumerate,
            alpha,
        } => commands::tree(file.as_deref(), enumerate.as_deref(), *alpha),
        Command::Weingarten { n, dim } => commands::weingarten(*n, dim),
        Command::Wishart {
            lengths,
            rows,
            cols,
        } => commands::wishart(lengths, rows, cols),
        Command::Mc {
            bubble,
            numeric_n,
            samples,
            seed,
            variance,
        } => commands::mc(bubble, *numeric_n, *samples, *seed, *variance),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let outcome = run(&cli).and_then(|report| {
        let text = report.render(cli.csv);
        match &cli.out {
            Some(path) => {
                fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                match stdout
                    .write_all(text.as_bytes())
                    .and_then(|_| stdout.flush())
                {
                    Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                    _ => {}
                }
            }
        }
        Ok(report.all_pass())
    });
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("one or more checks FAILED");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
