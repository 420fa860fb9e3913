use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use egeq_core::chains::{expand_chain_with, representation_count_certificate, Chain};
use egeq_core::congruence::{known_rows, table_rows, TableEntry};
use egeq_core::crt::{certify_multiplicity, scan_subsets};
use egeq_core::enumerate::{default_jobs, enumerate_checkpointed, enumerate_with_jobs};
use egeq_core::exact_arith::verify_solution;
use egeq_core::greedy::{greedy_for_n, greedy_representation, sweep, DEFAULT_MAX_K};
use egeq_core::{Error, Rational};

mod report;

use report::{Format, RunReport};

#[derive(Parser)]
#[command(name = "egeq", version, about = "Solutions of n/2^n = sum a_i/2^(a_i)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// All solutions with exactly k terms
    Enumerate {
        k: u64,
        #[arg(long)]
        jobs: Option<usize>,
        /// State file; resumed when it exists
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Greedy representation of x, or of n/2^n
    Greedy {
        #[command(flatten)]
        target: GreedyTarget,
        #[arg(long, default_value_t = DEFAULT_MAX_K)]
        max_k: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Greedy statistics for every n in a range
    Sweep {
        n_min: u64,
        n_max: u64,
        #[arg(long, default_value_t = DEFAULT_MAX_K)]
        max_k: usize,
        #[arg(long)]
        jobs: Option<usize>,
        /// Add a_k/(2(k+n)) and k/n columns
        #[arg(long)]
        with_ratios: bool,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Least solutions k0 and periods r of the two-tail congruence
    Table1 {
        #[arg(long, default_value_t = 120)]
        u_max: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Subsets of table rows whose progressions intersect
    Multiplicity {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..=16))]
        subset_size: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Repeated greedy expansion of the last term
    Chain {
        a_start: u64,
        depth: usize,
        #[arg(long, default_value_t = 1 << 24)]
        max_k: usize,
        /// Write each step's terms to step_<i>.txt here
        #[arg(long)]
        terms_dir: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GreedyTarget {
    /// A fraction p/q with 0 < p/q < 2
    #[arg(long)]
    x: Option<Rational>,
    #[arg(long)]
    n: Option<u64>,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_VERIFY: u8 = 4;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Precondition(_) | Error::OutOfRange | Error::ZeroTerm | Error::TooFewTerms(_) => {
            EXIT_USAGE
        }
        Error::UnsupportedModulus(_) | Error::Overflow => EXIT_BUDGET,
        Error::Verification(_)
        | Error::Certification(_)
        | Error::ChainInconsistent { .. }
        | Error::InvalidSolution(_) => EXIT_VERIFY,
        _ => EXIT_FAILURE,
    }
}

type Outcome = Result<(RunReport, u8), Error>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    let (format, result) = match cli.command {
        Command::Enumerate {
            k,
            jobs,
            checkpoint,
            format,
        } => (
            format,
            cmd_enumerate(k, jobs.unwrap_or_else(default_jobs), checkpoint),
        ),
        Command::Greedy {
            target,
            max_k,
            format,
        } => (format, cmd_greedy(target, max_k)),
        Command::Sweep {
            n_min,
            n_max,
            max_k,
            jobs,
            with_ratios,
            format,
        } => (
            format,
            cmd_sweep(
                n_min,
                n_max,
                max_k,
                jobs.unwrap_or_else(default_jobs),
                with_ratios,
            ),
        ),
        Command::Table1 { u_max, format } => (format, cmd_table1(u_max)),
        Command::Multiplicity {
            subset_size,
            format,
        } => (format, cmd_multiplicity(subset_size as usize)),
        Command::Chain {
            a_start,
            depth,
            max_k,
            terms_dir,
            format,
        } => (format, cmd_chain(a_start, depth, max_k, terms_dir)),
    };
    match result {
        Ok((mut report, code)) => {
            report.timing_ms = (start.elapsed().as_secs_f64() * 1e6).round() / 1e3;
            let mut out = BufWriter::new(io::stdout().lock());
            if let Err(e) = report.write(format, &mut out).and_then(|_| out.flush()) {
                eprintln!("egeq: writing output: {e}");
                return ExitCode::from(EXIT_FAILURE);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("egeq: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn join(xs: impl IntoIterator<Item = impl ToString>) -> String {
    xs.into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn cmd_enumerate(k: u64, jobs: usize, checkpoint: Option<PathBuf>) -> Outcome {
    let mut report = RunReport::new("enumerate");
    report.param("k", k).param("jobs", jobs);
    let result = match &checkpoint {
        Some(path) => {
            report.param("checkpoint", path.display().to_string());
            enumerate_checkpointed(k, jobs, path, |done, total| {
                eprintln!("egeq: {done}/{total} frontier nodes");
            })?
        }
        None => enumerate_with_jobs(k, jobs)?,
    };
    report.table.header = vec!["n", "a"];
    for s in &result.solutions {
        if !verify_solution(s) {
            return Err(Error::Verification(
                "enumerated solution failed verification",
            ));
        }
        report
            .rows
            .push(json!({ "n": s.n_u64(), "a": s.terms_u64() }));
        report
            .table
            .records
            .push(vec![s.n().to_string(), join(s.terms())]);
    }
    report.note("count", result.solutions.len());
    report.prune_counters = Some(result.counters.entries().into_iter().collect());
    Ok((report, 0))
}

fn cmd_greedy(target: GreedyTarget, max_k: usize) -> Outcome {
    let mut report = RunReport::new("greedy");
    report.param("max_k", max_k);
    let terms = match (target.x, target.n) {
        (_, Some(n)) if n >= 2 => {
            report.param("n", n);
            greedy_for_n(n, max_k)?.map(|r| r.solution.terms_u64().expect("terms fit u64"))
        }
        (_, Some(n)) => {
            report.param("n", n);
            let x = Rational::new(n, 1u64 << n)?;
            greedy_representation(&x, max_k)?
        }
        (Some(x), None) => {
            report.param("x", x.to_string());
            greedy_representation(&x, max_k)?
        }
        (None, None) => unreachable!("clap requires one target"),
    };
    report.table.header = vec!["i", "a"];
    let Some(terms) = terms else {
        report.status = "budget-exhausted";
        report.note("terminated", false);
        return Ok((report, EXIT_BUDGET));
    };
    for (i, a) in terms.iter().enumerate() {
        report.rows.push(json!({ "i": i + 1, "a": a }));
        report
            .table
            .records
            .push(vec![(i + 1).to_string(), a.to_string()]);
    }
    report.note("terminated", true).note("k", terms.len());
    Ok((report, 0))
}

fn cmd_sweep(n_min: u64, n_max: u64, max_k: usize, jobs: usize, with_ratios: bool) -> Outcome {
    let mut report = RunReport::new("sweep");
    report
        .param("n_min", n_min)
        .param("n_max", n_max)
        .param("max_k", max_k)
        .param("jobs", jobs)
        .param("with_ratios", with_ratios);
    let rows = sweep(n_min, n_max, max_k, jobs)?;
    report.table.header = vec!["n", "k", "a_k", "terminated"];
    if with_ratios {
        report.table.header.extend(["ak_ratio", "k_over_n"]);
    }
    let mut unfinished = Vec::new();
    let mut violations = Vec::new();
    for r in &rows {
        let mut row = json!({ "n": r.n, "k": r.k, "a_k": r.a_k, "terminated": r.terminated });
        let mut rec = vec![
            r.n.to_string(),
            r.k.to_string(),
            r.a_k.to_string(),
            r.terminated.to_string(),
        ];
        if with_ratios {
            row["ak_ratio"] = json!(r.ak_ratio());
            row["k_over_n"] = json!(r.k_over_n());
            rec.push(format!("{:.6}", r.ak_ratio()));
            rec.push(format!("{:.6}", r.k_over_n()));
        }
        report.rows.push(row);
        report.table.records.push(rec);
        if !r.terminated {
            unfinished.push(r.n);
        } else if !r.in_window() || !r.feasible {
            violations.push(r.n);
        }
    }
    report
        .note("rows", rows.len())
        .note("unterminated", unfinished.clone())
        .note("window_violations", violations.clone());
    if !violations.is_empty() {
        eprintln!("egeq: k+n <= a_k <= 2(k+n) fails for n in {violations:?}");
        report.status = "window-violation";
        return Ok((report, EXIT_VERIFY));
    }
    if !unfinished.is_empty() {
        report.status = "budget-exhausted";
        return Ok((report, EXIT_BUDGET));
    }
    Ok((report, 0))
}

fn cmd_table1(u_max: u64) -> Outcome {
    let mut report = RunReport::new("table1");
    report.param("u_max", u_max);
    report.table.header = vec!["u", "k0", "r", "status"];
    let mut unsupported = Vec::new();
    for entry in table_rows(u_max)? {
        let (row, status) = match &entry {
            TableEntry::Computed(r) => (r, "computed"),
            TableEntry::VerifiedConstant(r) => (r, "verified-constant"),
            TableEntry::Unsupported(u) => {
                unsupported.push(*u);
                continue;
            }
        };
        report.rows.push(json!({
            "u": row.u,
            "k0": row.k0.to_string(),
            "r": row.r.to_string(),
            "status": status,
        }));
        report.table.records.push(vec![
            row.u.to_string(),
            row.k0.to_string(),
            row.r.to_string(),
            status.into(),
        ]);
    }
    report
        .note("rows", report.rows.len())
        .note("unsupported_u", unsupported);
    Ok((report, 0))
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn cmd_multiplicity(m: usize) -> Outcome {
    let mut report = RunReport::new("multiplicity");
    report.param("subset_size", m);
    let rows = known_rows()?;
    let found = scan_subsets(&rows, m)?;
    report.table.header = vec!["u_set", "residue", "modulus", "certificate"];
    for s in &found {
        let cert = certify_multiplicity(&s.class, &s.rows)?;
        report.rows.push(json!({
            "u_set": s.u_set(),
            "residue": s.class.residue().to_string(),
            "modulus": s.class.modulus().to_string(),
            "certificate": cert,
        }));
        report.table.records.push(vec![
            join(s.u_set()),
            s.class.residue().to_string(),
            s.class.modulus().to_string(),
            cert.to_string(),
        ]);
    }
    report
        .note("rows_scanned", rows.len())
        .note("subsets_checked", binomial(rows.len() as u64, m as u64))
        .note("compatible", found.len());
    Ok((report, 0))
}

fn cmd_chain(a_start: u64, depth: usize, max_k: usize, terms_dir: Option<PathBuf>) -> Outcome {
    let mut report = RunReport::new("chain");
    report
        .param("a_start", a_start)
        .param("depth", depth)
        .param("max_k", max_k);
    if let Some(dir) = &terms_dir {
        report.param("terms_dir", dir.display().to_string());
        fs::create_dir_all(dir)?;
    }
    let chain: Chain = expand_chain_with(a_start, depth, max_k, 0, |step, terms| {
        if let Some(dir) = &terms_dir {
            let mut f = BufWriter::new(fs::File::create(
                dir.join(format!("step_{}.txt", step.index)),
            )?);
            for t in terms {
                writeln!(f, "{t}")?;
            }
            f.flush()?;
        }
        Ok(())
    })?;
    let certificate = representation_count_certificate(&chain)?;
    report.table.header = vec!["i", "k_i", "last_term"];
    for s in &chain.steps {
        report.rows.push(json!({
            "i": s.index,
            "k_i": s.k,
            "last_term": s.last_term,
            "source": s.source,
            "digest": s.digest,
        }));
        report.table.records.push(vec![
            s.index.to_string(),
            s.k.to_string(),
            s.last_term.to_string(),
        ]);
    }
    report
        .note("depth_reached", chain.depth())
        .note("representations", certificate);
    if let Some(i) = chain.exhausted_at {
        report.status = "budget-exhausted";
        report.note("exhausted_at", i);
        eprintln!("egeq: step {i} needs more than {max_k} terms");
        return Ok((report, EXIT_BUDGET));
    }
    Ok((report, 0))
}
