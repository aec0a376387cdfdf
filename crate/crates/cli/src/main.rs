//! `roughcount`: count rough numbers, verify the bound Φ(n, p) ≥ ⌊2n/p⌋ + 1,
//! regenerate the appendix tables, scan inequalities and evaluate ω(u).

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use roughcount::bounds::{self, BoundReport, Domain, Status};
use roughcount::buchstab::{self, BuchstabGrid, Scheme};
use roughcount::phi::{self, Algorithm, PhiQuery};
use roughcount::primes::{SieveConfig, DEFAULT_TABLE_LIMIT};
use roughcount::tables::{self, TableFormat, TableId};
use roughcount::verify::{self, VerificationReport, VerifyAllOptions};
use roughcount::{format_significant, Error, PrimeTable};

/// Largest rough set `phi --list` will print.
const LIST_MAX: u64 = 1_000_000;
/// Step used for single ω(u) evaluations.
const POINT_STEP: f64 = 1e-4;

#[derive(Parser, Debug)]
#[command(name = "roughcount", version, about = "Rough-number counts and machine checks of Phi(n, p) >= floor(2n/p) + 1")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text", env = "ROUGHCOUNT_FORMAT")]
    format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, global = true, env = "ROUGHCOUNT_OUT")]
    out: Option<PathBuf>,
    /// Largest prime table the run may build.
    #[arg(long, global = true, default_value_t = DEFAULT_TABLE_LIMIT, env = "ROUGHCOUNT_SIEVE_LIMIT",
          value_parser = clap::value_parser!(u64).range(2..))]
    sieve_limit: u64,
    /// Worker threads (default: available cores).
    #[arg(long, global = true, env = "ROUGHCOUNT_JOBS", value_parser = clap::value_parser!(u64).range(1..))]
    jobs: Option<u64>,
    /// Prime table cache; holds a table for the full --sieve-limit.
    #[arg(long, global = true, env = "ROUGHCOUNT_CACHE")]
    cache: Option<PathBuf>,
    /// Report elapsed_ms as 0 so repeated runs are byte-identical.
    #[arg(long, global = true, env = "ROUGHCOUNT_NO_TIMING")]
    no_timing: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print Φ(x, y), the number of integers in [1, x] with no prime factor below y.
    Phi {
        x: f64,
        y: f64,
        #[arg(long, value_enum, default_value = "auto")]
        algo: AlgoArg,
        /// Print the members instead of the count.
        #[arg(long)]
        list: bool,
    },
    /// Run a verification driver.
    Verify {
        #[arg(value_enum)]
        target: Target,
        /// Largest prime p to cover.
        #[arg(long)]
        pmax: Option<u64>,
        /// Largest n (brute force), or end of the linear-bound range (lemma4).
        #[arg(long)]
        nmax: Option<u64>,
    },
    /// Regenerate, render or check the appendix tables.
    Tables {
        /// 1..10, 2a, 2b (2 means both halves) or all.
        #[arg(long, default_value = "all")]
        which: String,
        /// Diff against the transcribed values instead of rendering.
        #[arg(long)]
        check: bool,
    },
    /// Scan a registered inequality over a range.
    Bounds {
        /// Inequality name; see --list.
        #[arg(required_unless_present = "list")]
        name: Option<String>,
        /// Range a:b (default: the inequality's own domain).
        #[arg(long)]
        range: Option<String>,
        /// List registered inequalities and their default ranges.
        #[arg(long)]
        list: bool,
    },
    /// Evaluate Buchstab's function.
    Buchstab {
        /// Evaluate ω at one point.
        #[arg(long, conflicts_with = "grid", required_unless_present = "grid")]
        u: Option<f64>,
        /// Tabulate ω on a:b with the given step.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, value_enum, default_value = "midpoint")]
        scheme: SchemeArg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Sieve,
    Legendre,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SchemeArg {
    Midpoint,
    Trapezoid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Theorem,
    Lemma1,
    Lemma2,
    Lemma3,
    Lemma4,
    All,
}

enum Failure {
    /// A mathematical check failed; the output is still written.
    Check,
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

struct Ctx {
    global: Global,
}

impl Ctx {
    /// A prime table covering `needed`, within the sieve budget.
    fn table(&self, needed: u64) -> Result<PrimeTable, Failure> {
        let budget = self.global.sieve_limit;
        if needed > budget {
            return Err(Error::ResourceLimit {
                what: "prime table",
                needed,
                budget,
            }
            .into());
        }
        let config = SieveConfig {
            budget,
            ..SieveConfig::default()
        };
        Ok(match &self.global.cache {
            Some(path) => PrimeTable::load_or_build(path, budget, &config)?,
            None => PrimeTable::with_config(needed.max(2), &config)?,
        })
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.global.out {
            Some(path) => std::fs::write(path, text)?,
            None => print!("{text}"),
        }
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.global.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs as usize).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let ctx = Ctx { global: cli.global };
    let result = match cli.command {
        Command::Phi { x, y, algo, list } => cmd_phi(&ctx, x, y, algo, list),
        Command::Verify { target, pmax, nmax } => cmd_verify(&ctx, target, pmax, nmax),
        Command::Tables { which, check } => cmd_tables(&ctx, &which, check),
        Command::Bounds { name, range, list } => cmd_bounds(&ctx, name.as_deref(), range.as_deref(), list),
        Command::Buchstab { u, grid, scheme } => cmd_buchstab(&ctx, u, grid.as_deref(), scheme),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_phi(ctx: &Ctx, x: f64, y: f64, algo: AlgoArg, list: bool) -> Result<(), Failure> {
    let algorithm = match algo {
        AlgoArg::Sieve => Algorithm::Sieve,
        AlgoArg::Legendre => Algorithm::Legendre,
        AlgoArg::Auto => Algorithm::Auto,
    };
    let query = PhiQuery::new(x, y, algorithm)?;
    let n = x.floor() as u64;
    let uses_sieve = algorithm == Algorithm::Sieve || (algorithm == Algorithm::Auto && n <= phi::AUTO_SIEVE_MAX);
    let needed = if uses_sieve { n } else { (y.ceil() as u64).min(n + 1) };
    let table = ctx.table(needed)?;
    let count = query.eval(&table)?;
    let fmt = ctx.global.format;
    if list {
        if count > LIST_MAX {
            return Err(Failure::Usage(format!(
                "the rough set has {count} members, more than the listing limit {LIST_MAX}"
            )));
        }
        let table = if table.limit() >= n { table } else { ctx.table(n)? };
        let set = phi::rough_set(n, smallest_prime_at_least(y, &table), &table)?;
        let members: Vec<String> = set.members.iter().map(u64::to_string).collect();
        let text = match fmt {
            Format::Text => format!("{}\n", members.join(" ")),
            Format::Csv => format!("n\n{}\n", members.join("\n")),
            Format::Json => format!(
                "{}\n",
                serde_json::json!({ "x": x, "y": y, "phi": count, "members": set.members })
            ),
        };
        return ctx.emit(&text);
    }
    let text = match fmt {
        Format::Text => format!("{count}\n"),
        Format::Csv => format!("x,y,phi\n{},{},{count}\n", format_significant(x, 15), format_significant(y, 15)),
        Format::Json => format!(
            "{}\n",
            serde_json::json!({ "x": x, "y": y, "phi": count, "algorithm": format!("{algo:?}").to_lowercase() })
        ),
    };
    ctx.emit(&text)
}

/// Least prime ≥ y, or `u64::MAX` past the table; rough sets are indexed
/// by a prime bound.
fn smallest_prime_at_least(y: f64, table: &PrimeTable) -> u64 {
    table.iter().find(|&p| p as f64 >= y).unwrap_or(u64::MAX)
}

fn cmd_verify(ctx: &Ctx, target: Target, pmax: Option<u64>, nmax: Option<u64>) -> Result<(), Failure> {
    let phi_cap = verify::DEFAULT_PHI_CAP.min(ctx.global.sieve_limit);
    let mut report = match target {
        Target::Theorem => {
            let (p, n) = (pmax.unwrap_or(199), nmax.unwrap_or(50_000));
            verify::verify_theorem(p, n, &ctx.table(n.max(p))?)?
        }
        Target::Lemma1 => {
            let p = pmax.unwrap_or(10_000);
            verify::verify_case1(p, &ctx.table(3 * p.max(23))?)?
        }
        Target::Lemma2 => {
            let p = pmax.unwrap_or(1_000);
            let needed = (p * p).min(ctx.global.sieve_limit).max(89 * 89);
            verify::verify_case2(p, &ctx.table(needed)?, phi_cap)?
        }
        Target::Lemma3 => {
            let p = pmax.unwrap_or(verify::SMALL_P_MAX);
            verify::verify_case3_analytic(11, p, &ctx.table(p.max(phi_cap))?, phi_cap)?
        }
        Target::Lemma4 => {
            let linear = nmax.unwrap_or(verify::LINEAR_BOUND_MAX);
            let large = pmax.unwrap_or(10_000);
            let needed = linear.max(large).max(verify::SMALL_P_MAX);
            verify::verify_case4(&ctx.table(needed)?, linear, large)?
        }
        Target::All => {
            let defaults = VerifyAllOptions::default();
            let opts = VerifyAllOptions {
                p_max: pmax.unwrap_or(defaults.p_max),
                n_max: nmax.unwrap_or(defaults.n_max),
                phi_cap,
                ..defaults
            };
            let needed = [opts.n_max, 3 * opts.p_max, opts.linear_max, opts.large_hi, phi_cap, 89 * 89]
                .into_iter()
                .max()
                .unwrap_or(2);
            verify::verify_all(&opts, &ctx.table(needed)?)?
        }
    };
    if ctx.global.no_timing {
        report.elapsed_ms = 0;
    }
    let text = match ctx.global.format {
        Format::Text => report.summary(),
        Format::Json => format!("{}\n", report.to_json()),
        Format::Csv => {
            let mut out = String::from("p,n,phi,bound\n");
            for c in &report.counterexamples {
                let _ = writeln!(out, "{},{},{},{}", c.p, c.n, c.phi, c.bound);
            }
            out
        }
    };
    ctx.emit(&text)?;
    finish_status(report.status, &report.target)
}

fn finish_status(status: Status, what: &str) -> Result<(), Failure> {
    match status {
        Status::Pass => Ok(()),
        Status::Marginal => {
            eprintln!("warning: {what}: some comparisons were within the marginal band");
            Ok(())
        }
        Status::Fail => {
            eprintln!("{what}: FAILED");
            Err(Failure::Check)
        }
    }
}

fn cmd_tables(ctx: &Ctx, which: &str, check: bool) -> Result<(), Failure> {
    let ids = TableId::parse_selector(which)?;
    let table = ctx.table(89 * 89)?;
    let mut out = String::new();
    if check {
        let mut reports: Vec<VerificationReport> = Vec::new();
        for id in &ids {
            let mut r = tables::check_table(*id, &table)?;
            if ctx.global.no_timing {
                r.elapsed_ms = 0;
            }
            reports.push(r);
        }
        match ctx.global.format {
            Format::Json => {
                out = serde_json::to_string_pretty(&reports).map_err(Error::from)?;
                out.push('\n');
            }
            Format::Csv => {
                out.push_str("table,row,column,computed,fixture\n");
                for r in &reports {
                    for m in &r.mismatches {
                        let _ = writeln!(out, "{},{},{},{},{}", r.target, m.row.replace(',', ";"), m.column, m.computed, m.fixture);
                    }
                }
            }
            Format::Text => {
                for r in &reports {
                    out.push_str(&r.summary());
                }
            }
        }
        ctx.emit(&out)?;
        return finish_status(tables::overall_status(&reports), "tables");
    }
    let format = match ctx.global.format {
        Format::Text => TableFormat::Markdown,
        Format::Csv => TableFormat::Csv,
        Format::Json => TableFormat::Json,
    };
    for (i, id) in ids.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&tables::render_table(&tables::generate_table(*id, &table)?, format));
    }
    ctx.emit(&out)
}

fn cmd_bounds(ctx: &Ctx, name: Option<&str>, range: Option<&str>, list: bool) -> Result<(), Failure> {
    if list {
        let mut out = String::new();
        for (n, lo, hi) in bounds::INEQUALITIES {
            let _ = writeln!(out, "{n} {lo}:{hi}");
        }
        return ctx.emit(&out);
    }
    let name = name.expect("clap requires a name without --list");
    let domain = match range {
        Some(r) => Domain::parse(r)?,
        None => bounds::default_domain(name)?,
    };
    bounds::default_domain(name)?;
    let reach = if name == "nagura" { 1.2 * domain.hi } else { domain.hi };
    let table = ctx.table(reach.ceil().max(2.0) as u64)?;
    let report = bounds::scan_inequality(name, &domain, &table)?;
    let text = match ctx.global.format {
        Format::Text => bound_summary(&report),
        Format::Json => format!("{}\n", serde_json::to_string_pretty(&report).map_err(Error::from)?),
        Format::Csv => {
            let mut out = String::from("input,lhs,rhs\n");
            for f in &report.failures {
                let input: Vec<String> = f.input.iter().map(|v| format_significant(*v, 15)).collect();
                let _ = writeln!(out, "{},{},{}", input.join(";"), format_significant(f.lhs, 15), format_significant(f.rhs, 15));
            }
            out
        }
    };
    ctx.emit(&text)?;
    finish_status(report.status, name)
}

fn bound_summary(r: &BoundReport) -> String {
    let margin = r.worst_margin.map_or_else(|| "-".to_string(), |m| format_significant(m, 6));
    let mut out = format!(
        "{} {}: {}\npoints: {}\nfailures: {}\nmarginal: {}\nworst margin: {margin}\n",
        r.name,
        r.domain,
        r.status,
        r.points,
        r.failures.len(),
        r.marginal_count
    );
    for f in r.failures.iter().take(20) {
        let input: Vec<String> = f.input.iter().map(|v| format_significant(*v, 15)).collect();
        let _ = writeln!(
            out,
            "  at {}: lhs {} rhs {}",
            input.join(", "),
            format_significant(f.lhs, 12),
            format_significant(f.rhs, 12)
        );
    }
    out
}

fn cmd_buchstab(ctx: &Ctx, u: Option<f64>, grid: Option<&str>, scheme: SchemeArg) -> Result<(), Failure> {
    let scheme = match scheme {
        SchemeArg::Midpoint => Scheme::Midpoint,
        SchemeArg::Trapezoid => Scheme::Trapezoid,
    };
    let fmt = ctx.global.format;
    if let Some(u) = u {
        if !(1.0..=buchstab::MAX_U).contains(&u) {
            return Err(Failure::Usage(format!("u must lie in [1, {}], got {u}", buchstab::MAX_U)));
        }
        let w = match scheme {
            Scheme::Midpoint => buchstab::omega_extrapolated(u, POINT_STEP)?,
            Scheme::Trapezoid => BuchstabGrid::build(u.max(2.0), POINT_STEP, scheme)?.omega(u)?,
        };
        let text = match fmt {
            Format::Text => format!("{}\n", format_significant(w, 15)),
            Format::Csv => format!("u,omega\n{},{}\n", format_significant(u, 15), format_significant(w, 15)),
            Format::Json => format!("{}\n", serde_json::json!({ "u": u, "omega": w, "method": scheme.name() })),
        };
        return ctx.emit(&text);
    }
    let spec = grid.expect("clap requires --u or --grid");
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, step] = parts.as_slice() else {
        return Err(Failure::Usage(format!("grid must be a:b:step, got {spec:?}")));
    };
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Failure::Usage(format!("bad number {s:?} in grid {spec:?}")))
    };
    let (a, b, step) = (parse(a)?, parse(b)?, parse(step)?);
    if !(a >= 1.0 && a <= b) {
        return Err(Failure::Usage(format!("grid needs 1 <= a <= b, got {a}:{b}")));
    }
    let g = BuchstabGrid::build(b.max(2.0), step, scheme)?;
    let points: Vec<(f64, f64)> = g.points().filter(|(u, _)| *u >= a - 1e-12 && *u <= b + 1e-12).collect();
    let text = match fmt {
        Format::Csv | Format::Text => {
            let mut out = String::from("u,omega\n");
            for (u, w) in &points {
                let _ = writeln!(out, "{},{}", format_significant(*u, 15), format_significant(*w, 15));
            }
            out
        }
        Format::Json => {
            let rows: Vec<_> = points.iter().map(|(u, w)| serde_json::json!({ "u": u, "omega": w })).collect();
            format!("{}\n", serde_json::json!({ "method": g.method().name(), "step": g.step(), "points": rows }))
        }
    };
    ctx.emit(&text)
}
