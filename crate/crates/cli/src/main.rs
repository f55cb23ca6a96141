//! `modpic`: batch verification of exact divisor-class identities on moduli
//! spaces of stable pointed curves, plus a small class-expression evaluator
//! and point-count table emitter.
//!
//! Exit codes: 0 all checks pass, 1 any check fails, 2 usage or expression
//! errors.

mod expr;
mod report;
mod suites;

use clap::{Args, Parser, Subcommand, ValueEnum};
use modpic_core::counting::{even_genus_pair_check, odd_genus_pair_check, a_count};
use modpic_core::classes::ThetaShift;
use modpic_core::maps::{G2Sign, TailGenusReading, ThetaTopReading};
use modpic_core::serial::class_to_value;
use modpic_core::Integer;
use report::Format;
use serde_json::json;
use suites::{collect_tasks, execute, parse_grange, GRange, Readings, Suite};

#[derive(Parser)]
#[command(
    name = "modpic",
    version,
    about = "Exact verification of divisor-class identities on moduli of stable pointed curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named verification suite over parameter ranges.
    Verify(VerifyArgs),
    /// Evaluate a class expression and print the class file.
    Class {
        /// Expression, e.g. "gprime*(pi1*(bn(5))) - 2*w2".
        expr: String,
    },
    /// Emit point-count tables as CSV or JSON lines.
    Counts(CountsArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Which suite to run.
    #[arg(value_enum)]
    suite: Suite,
    /// Inclusive genus range `a..b` (or a single genus). Defaults per suite.
    #[arg(long = "g", value_parser = parse_grange)]
    g: Option<GRange>,
    /// Inclusive mark-count range `a..b`. Defaults per suite.
    #[arg(long = "n", value_parser = parse_grange)]
    n: Option<GRange>,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Sign of the node-divisor image under the genus-2-tail pullback.
    #[arg(long = "g2-sign", value_enum, default_value_t = G2SignArg::Minus)]
    g2_sign: G2SignArg,
    /// Reading of the top boundary row of the elliptic-tails table.
    #[arg(long = "theta-top", value_enum, default_value_t = ThetaTopArg::Clamp)]
    theta_top: ThetaTopArg,
    /// Which block the surviving marks of a theta index are shifted into.
    #[arg(long = "theta-shift", value_enum, default_value_t = ThetaShiftArg::ByTails)]
    theta_shift: ThetaShiftArg,
    /// Genus of the marked component in the genus-2-tail family.
    #[arg(long = "tail-genus", value_enum, default_value_t = TailGenusArg::GMinus2)]
    tail_genus: TailGenusArg,
    /// Worker threads (default: rayon's choice).
    #[arg(long, env = "MODPIC_JOBS", value_parser = clap::value_parser!(u16).range(1..))]
    jobs: Option<u16>,
    /// Include elapsed times (breaks byte-identical output across runs).
    #[arg(long)]
    timings: bool,
}

#[derive(Args)]
struct CountsArgs {
    /// Inclusive genus range `a..b`.
    #[arg(long = "g-range", value_parser = parse_grange)]
    g_range: GRange,
    /// Which table to emit.
    #[arg(long = "check", value_enum)]
    check: CountsCheck,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum G2SignArg {
    Minus,
    Plus,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaTopArg {
    Clamp,
    Literal,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaShiftArg {
    ByTails,
    ByMarks,
}

#[derive(Clone, Copy, ValueEnum)]
enum TailGenusArg {
    GMinus2,
    LiteralG,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountsCheck {
    Odd,
    Even,
    ATable,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum TableFormat {
    Csv,
    Json,
}

/// Restore the default SIGPIPE disposition so that piping report streams
/// into `head`-like consumers terminates the process quietly instead of
/// panicking on a failed stdout write.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn main() {
    reset_sigpipe();
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Verify(args) => run_verify(args),
        Command::Class { expr } => run_class(&expr),
        Command::Counts(args) => run_counts(args),
    };
    std::process::exit(code);
}

fn run_verify(args: VerifyArgs) -> i32 {
    let readings = Readings {
        g2_sign: match args.g2_sign {
            G2SignArg::Minus => G2Sign::Minus,
            G2SignArg::Plus => G2Sign::Plus,
        },
        theta_top: match args.theta_top {
            ThetaTopArg::Clamp => ThetaTopReading::Clamp,
            ThetaTopArg::Literal => ThetaTopReading::Literal,
        },
        theta_shift: match args.theta_shift {
            ThetaShiftArg::ByTails => ThetaShift::ByTails,
            ThetaShiftArg::ByMarks => ThetaShift::ByMarks,
        },
        tail_genus: match args.tail_genus {
            TailGenusArg::GMinus2 => TailGenusReading::GMinus2,
            TailGenusArg::LiteralG => TailGenusReading::LiteralG,
        },
    };
    let tasks = collect_tasks(args.suite, args.g, args.n, readings);
    let reports = execute(tasks, args.jobs.map(usize::from));
    let format = match args.format {
        FormatArg::Text => Format::Text,
        FormatArg::Json => Format::Json,
    };
    if report::emit(&reports, format, args.timings) {
        0
    } else {
        1
    }
}

fn run_class(input: &str) -> i32 {
    match expr::evaluate(input) {
        Ok(class) => {
            let doc = class_to_value(&class);
            println!("{}", serde_json::to_string_pretty(&doc).expect("serializable document"));
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

struct TableRow {
    columns: Vec<(&'static str, String)>,
    pass: bool,
}

fn run_counts(args: CountsArgs) -> i32 {
    let mut rows: Vec<TableRow> = Vec::new();
    match args.check {
        CountsCheck::Odd => {
            for g in args.g_range.iter().filter(|g| g % 2 == 1).map(u64::from) {
                let row = match odd_genus_pair_check(g) {
                    Ok(c) => {
                        let below = Integer::from(g - 1);
                        let above = Integer::from(g + 1);
                        let middle = Integer::from(g);
                        let pass = c.nonzero
                            && c.reduced_lhs == &below * &above
                            && c.reduced_rhs == &middle * &above;
                        TableRow {
                            columns: vec![
                                ("g", g.to_string()),
                                ("lhs", c.lhs.to_string()),
                                ("rhs", c.rhs.to_string()),
                                ("reduced_lhs", c.reduced_lhs.to_string()),
                                ("reduced_rhs", c.reduced_rhs.to_string()),
                                ("nonzero", c.nonzero.to_string()),
                            ],
                            pass,
                        }
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        return 2;
                    }
                };
                rows.push(row);
            }
        }
        CountsCheck::Even => {
            for g in args.g_range.iter().filter(|g| g % 2 == 0 && *g >= 4).map(u64::from) {
                let row = match even_genus_pair_check(g) {
                    Ok(c) => TableRow {
                        pass: c.nonzero,
                        columns: vec![
                            ("g", g.to_string()),
                            ("lhs", c.lhs.to_string()),
                            ("rhs", c.rhs.to_string()),
                            ("difference", c.difference.to_string()),
                            ("nonzero", c.nonzero.to_string()),
                        ],
                    },
                    Err(e) => {
                        eprintln!("error: {e}");
                        return 2;
                    }
                };
                rows.push(row);
            }
        }
        CountsCheck::ATable => {
            for g in args.g_range.iter().map(u64::from) {
                for m in 1..=4u64 {
                    for n in 1..=4u64 {
                        if let Ok(v) = a_count(g, m, n) {
                            rows.push(TableRow {
                                columns: vec![
                                    ("g", g.to_string()),
                                    ("m", m.to_string()),
                                    ("n", n.to_string()),
                                    ("value", v.to_string()),
                                ],
                                pass: true,
                            });
                        }
                    }
                }
            }
        }
    }
    emit_table(&rows, args.format, matches!(args.check, CountsCheck::ATable));
    if rows.iter().all(|r| r.pass) {
        0
    } else {
        1
    }
}

fn emit_table(rows: &[TableRow], format: TableFormat, value_table: bool) {
    match format {
        TableFormat::Csv => {
            if let Some(first) = rows.first() {
                let mut header: Vec<&str> =
                    first.columns.iter().map(|(name, _)| *name).collect();
                if !value_table {
                    header.push("pass");
                }
                println!("{}", header.join(","));
            }
            for row in rows {
                let mut cells: Vec<String> =
                    row.columns.iter().map(|(_, v)| v.clone()).collect();
                if !value_table {
                    cells.push(row.pass.to_string());
                }
                println!("{}", cells.join(","));
            }
        }
        TableFormat::Json => {
            for row in rows {
                let mut object = serde_json::Map::new();
                for (name, value) in &row.columns {
                    let as_value = if let Ok(v) = value.parse::<i64>() {
                        serde_json::Value::from(v)
                    } else if let Ok(v) = value.parse::<bool>() {
                        serde_json::Value::from(v)
                    } else {
                        json!(value)
                    };
                    object.insert((*name).into(), as_value);
                }
                if !value_table {
                    object.insert("pass".into(), json!(row.pass));
                }
                println!("{}", serde_json::Value::Object(object));
            }
        }
    }
}
