//! `newform`: newform coefficients, product exponents, the block table,
//! theta identities and product searches from the command line.
//!
//! The document goes to stdout, notes to stderr. Exit codes: 0 ok,
//! 1 a check failed, 2 bad input or environment.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};

use newform_core::elliptic::Quintuple;
use newform_core::search::{DEFAULT_ETA_EXPONENT_BOUND, DEFAULT_OVERLAP_FLOOR};

use commands::{SearchArgs, Table1Args, ThetaCheck};
use output::{status_word, Format};

#[derive(Parser, Debug)]
#[command(name = "newform", version, about = "Product formulas for weight-two newforms")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value = "plain")]
    format: Format,
    /// Add a generation time to the document.
    #[arg(long, global = true)]
    timestamps: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Newform coefficients f_1 .. f_{T-1} of a curve.
    An {
        /// a1,a2,a3,a4,a6
        #[arg(long, allow_hyphen_values = true)]
        curve: Quintuple,
        #[arg(long)]
        order: usize,
    },
    /// Product exponents g_1 .. g_N, the inferred block shape and its sequence.
    Exponents {
        #[arg(long, allow_hyphen_values = true)]
        curve: Quintuple,
        #[arg(long)]
        order: usize,
    },
    /// The table of building blocks; recompute, verify and extend it.
    Table1 {
        #[arg(long)]
        verify: bool,
        /// Recompute a_1 .. a_K for every row.
        #[arg(long, value_name = "K")]
        extend: Option<usize>,
        /// Read the table from this registry file instead of the built-in one.
        #[arg(long)]
        registry: Option<PathBuf>,
        /// Write the extended table to the registry file.
        #[arg(long)]
        save: bool,
    },
    /// Theta and eta identities.
    #[command(group(ArgGroup::new("check").required(true).args(["verify_triple", "verify_eta256", "verify_e2", "verify_weight4"])))]
    Theta {
        #[arg(long)]
        verify_triple: bool,
        #[arg(long)]
        verify_eta256: bool,
        #[arg(long)]
        verify_e2: bool,
        #[arg(long)]
        verify_weight4: bool,
        #[arg(long)]
        order: usize,
    },
    /// Screen products of building blocks against a target newform.
    Search {
        /// Block conductors, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        blocks: Vec<u64>,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        max_r: i64,
        #[arg(long)]
        max_t: u64,
        /// Only scales dividing this number.
        #[arg(long)]
        t_divides: Option<u64>,
        #[arg(long)]
        order: usize,
        /// A quintuple a1,a2,a3,a4,a6 or a level such as 37 or 37.a.
        #[arg(long, allow_hyphen_values = true)]
        target: String,
        /// Fewer agreeing coefficients than this leaves a candidate undecided.
        #[arg(long, default_value_t = DEFAULT_OVERLAP_FLOOR)]
        floor: usize,
    },
    /// Eta quotients of a level equal to its tabulated newform.
    Etaquotient {
        #[arg(long)]
        level: u64,
        #[arg(long)]
        order: usize,
        /// Bound on |r_t|.
        #[arg(long, default_value_t = DEFAULT_ETA_EXPONENT_BOUND)]
        bound: i64,
    },
    /// Compare a database record with local point counting.
    Lmfdb {
        /// Isogeny class label, e.g. 37.a.
        #[arg(long)]
        label: String,
        #[arg(long, default_value_t = 20)]
        upto: usize,
        /// Ignore the cache and bundled records.
        #[arg(long)]
        refresh: bool,
        /// Check against this model instead of the database one.
        #[arg(long, allow_hyphen_values = true)]
        curve: Option<Quintuple>,
    },
    /// Every offline check, one line per item.
    VerifyAll,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut report = match cli.command {
        Command::An { curve, order } => commands::an(curve, order),
        Command::Exponents { curve, order } => commands::exponents(curve, order),
        Command::Table1 { verify, extend, registry, save } => {
            commands::table1(Table1Args { verify, extend, registry, save })
        }
        Command::Theta { verify_triple, verify_eta256, verify_e2, order, .. } => {
            let check = if verify_triple {
                ThetaCheck::Triple
            } else if verify_eta256 {
                ThetaCheck::Eta256
            } else if verify_e2 {
                ThetaCheck::E2
            } else {
                ThetaCheck::Weight4
            };
            commands::theta(check, order)
        }
        Command::Search { blocks, s, max_r, max_t, t_divides, order, target, floor } => {
            commands::search_cmd(SearchArgs { blocks, s, max_r, max_t, t_divides, order, target, floor })
        }
        Command::Etaquotient { level, order, bound } => commands::etaquotient(level, order, bound),
        Command::Lmfdb { label, upto, refresh, curve } => commands::lmfdb(&label, upto, refresh, curve),
        Command::VerifyAll => commands::verify_all_cmd(),
    };
    if cli.timestamps {
        report.doc.generated_at = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .ok()
            .map(|d| d.as_secs());
    }
    let status = report.doc.status;
    if status != output::Status::Ok {
        for d in &report.doc.diagnostics {
            eprintln!("{}: {d}", status_word(status));
        }
    }
    print!("{}", report.render(cli.format));
    ExitCode::from(status.exit_code() as u8)
}
