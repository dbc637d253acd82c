//! Command-line front end: `classify`, `table`, `verify` and `search`.
//!
//! [`run`] takes the arguments, the environment lookup and the two output
//! streams explicitly so that it can be driven from tests.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::actions::{self, SearchConfig, SurfaceKernelMap};
use crate::classify::{self, CellStatus, Classification, ClassificationRecord};
use crate::error::{Error, Result};
use crate::groups::GroupSpec;
use crate::nec::NecSignature;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISCREPANCY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

/// Environment variable consulted for the search budget when neither a flag
/// nor the config file sets one.
pub const BUDGET_ENV: &str = "PGONAL_BUDGET";

#[derive(Debug, Parser)]
#[command(name = "pgonal", version, about = "Pseudo-real cyclic p-gonal surfaces: classification and verification")]
pub struct Cli {
    /// key=value file with `budget` and `workers`.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Worker threads (overrides the config file).
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the full automorphism groups for one genus.
    Classify {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        genus: u64,
        /// Attach a verified surface-kernel map to every row.
        #[arg(long)]
        witnesses: bool,
        #[arg(long, value_enum, default_value_t = Format::Markdown)]
        format: Format,
        #[arg(long, value_name = "N")]
        budget: Option<u64>,
    },
    /// Classification over a genus range `A..B` (inclusive).
    Table {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        genus: GenusRange,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Compare the existence criteria with exhaustive search.
    Verify {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        genus: GenusRange,
        #[arg(long, value_name = "N")]
        budget: Option<u64>,
    },
    /// Enumerate surface-kernel maps from a signature onto a group.
    Search {
        signature: String,
        group: String,
        #[arg(long)]
        pseudo_real: bool,
        /// Print at most K maps (all are counted).
        #[arg(long, value_name = "K")]
        limit: Option<usize>,
        #[arg(long, value_name = "N")]
        budget: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Markdown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenusRange {
    pub from: u64,
    pub to: u64,
}

impl FromStr for GenusRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
        let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
        let (from, to) = (parse(a)?, parse(b)?);
        if from > to {
            return Err(format!("empty range {from}..{to}"));
        }
        Ok(GenusRange { from, to })
    }
}

impl fmt::Display for GenusRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.from, self.to)
    }
}

/// Settings read from a `key=value` config file. Blank lines and `#` comments
/// are ignored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    pub budget: Option<u64>,
    pub workers: Option<usize>,
}

impl FromStr for Config {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut cfg = Config::default();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let here = offset;
            offset += line.len();
            let body = line.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse { offset: here, message };
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got {body:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "budget" => {
                    let b: u64 = value.parse().map_err(|e| parse_err(format!("budget: {e}")))?;
                    if b == 0 {
                        return Err(parse_err("budget must be at least 1".into()));
                    }
                    cfg.budget = Some(b);
                }
                "workers" => {
                    let w: usize = value.parse().map_err(|e| parse_err(format!("workers: {e}")))?;
                    if w == 0 {
                        return Err(parse_err("workers must be at least 1".into()));
                    }
                    cfg.workers = Some(w);
                }
                other => return Err(parse_err(format!("unknown key {other:?}"))),
            }
        }
        Ok(cfg)
    }
}

/// Budget precedence: flag, then config file, then [`BUDGET_ENV`], then the
/// default.
pub fn resolve_budget(flag: Option<u64>, config: &Config, env: Option<&str>) -> Result<u64> {
    let budget = match (flag, config.budget, env) {
        (Some(b), _, _) | (None, Some(b), _) => b,
        (None, None, Some(text)) => text
            .trim()
            .parse()
            .map_err(|e| Error::InvalidParameter(format!("{BUDGET_ENV}={text:?}: {e}")))?,
        (None, None, None) => actions::DEFAULT_BUDGET,
    };
    if budget == 0 {
        return Err(Error::InvalidParameter("budget must be at least 1".into()));
    }
    Ok(budget)
}

/// One row of the classification table. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputRow {
    pub p: u32,
    pub g: u64,
    pub n: u32,
    pub order: u64,
    pub group: String,
    pub r_class: String,
    pub family: String,
    pub signature: String,
    pub pseudo_real: bool,
    pub q: u64,
    pub max_order_flag: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SurfaceKernelMap>,
}

pub const COLUMNS: [&str; 11] = [
    "p",
    "g",
    "n",
    "order",
    "group",
    "r_class",
    "family",
    "signature",
    "pseudo_real",
    "q",
    "max_order_flag",
];

impl From<&ClassificationRecord> for OutputRow {
    fn from(r: &ClassificationRecord) -> Self {
        OutputRow {
            p: r.p,
            g: r.g,
            n: r.n,
            order: r.order(),
            group: r.group.to_string(),
            r_class: r.r_class.to_string(),
            family: r.signature_family.to_string(),
            signature: r.signature.to_string(),
            pseudo_real: r.witness_verified.unwrap_or(true),
            q: r.q,
            max_order_flag: r.is_max_order,
            witness: r.witness.clone(),
        }
    }
}

impl OutputRow {
    fn cells(&self) -> Vec<String> {
        let mut v = vec![
            self.p.to_string(),
            self.g.to_string(),
            self.n.to_string(),
            self.order.to_string(),
            self.group.clone(),
            self.r_class.clone(),
            self.family.clone(),
            self.signature.clone(),
            self.pseudo_real.to_string(),
            self.q.to_string(),
            self.max_order_flag.to_string(),
        ];
        if let Some(w) = &self.witness {
            v.push(w.to_json());
        }
        v
    }
}

/// Rows in table order: ascending `(g, n, group text, family)`.
pub fn rows_of(classifications: &[Classification]) -> Vec<OutputRow> {
    let mut rows: Vec<OutputRow> = classifications
        .iter()
        .flat_map(|c| c.records.iter().map(OutputRow::from))
        .collect();
    rows.sort_by(|a, b| (a.g, a.n, &a.group, &a.family).cmp(&(b.g, b.n, &b.group, &b.family)));
    rows
}

fn header(with_witness: bool) -> Vec<&'static str> {
    let mut h = COLUMNS.to_vec();
    if with_witness {
        h.push("witness");
    }
    h
}

pub fn render(rows: &[OutputRow], format: Format, with_witness: bool) -> Result<String> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Internal(e.to_string());
            w.write_record(header(with_witness)).map_err(io)?;
            for r in rows {
                w.write_record(r.cells()).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Internal(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| Error::Internal(e.to_string()))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(rows).map_err(|e| Error::Internal(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Markdown => {
            let h = header(with_witness);
            let mut s = format!("| {} |\n", h.join(" | "));
            s.push_str(&format!("|{}\n", "---|".repeat(h.len())));
            for r in rows {
                let cells: Vec<String> = r.cells().iter().map(|c| c.replace('|', "\\|")).collect();
                s.push_str(&format!("| {} |\n", cells.join(" | ")));
            }
            Ok(s)
        }
    }
}

fn with_pool<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        Some(w) => Ok(rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(f)),
        None => Ok(f()),
    }
}

/// Classification for every genus of the range, in genus order.
pub fn table(p: u32, range: GenusRange, workers: Option<usize>) -> Result<Vec<Classification>> {
    with_pool(workers, || {
        (range.from..=range.to)
            .into_par_iter()
            .map(|g| classify::classify_genus(p, g, false))
            .collect::<Result<Vec<_>>>()
    })?
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

/// Failure carrying its exit code.
struct Exit(i32, String);

impl From<Error> for Exit {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded { .. } => EXIT_BUDGET,
            Error::Internal(_) => EXIT_DISCREPANCY,
            _ => EXIT_USAGE,
        };
        Exit(code, e.to_string())
    }
}

impl From<std::io::Error> for Exit {
    fn from(e: std::io::Error) -> Self {
        Exit(EXIT_USAGE, e.to_string())
    }
}

/// Runs the CLI and returns the exit code. `env` looks up environment
/// variables.
pub fn run<I, T>(args: I, env: &dyn Fn(&str) -> Option<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(cli, env, &mut io) {
        Ok(code) => code,
        Err(Exit(code, message)) => {
            let _ = writeln!(io.err, "error: {message}");
            code
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> std::result::Result<Config, Exit> {
    match path {
        None => Ok(Config::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", p.display())))?;
            text.parse::<Config>()
                .map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", p.display())))
        }
    }
}

fn notes(io: &mut Io<'_>, c: &Classification) -> std::io::Result<()> {
    for n in &c.notes {
        writeln!(io.err, "note (g={}): {n}", c.g)?;
    }
    Ok(())
}

fn dispatch(cli: Cli, env: &dyn Fn(&str) -> Option<String>, io: &mut Io<'_>) -> std::result::Result<i32, Exit> {
    let config = load_config(cli.config.as_ref())?;
    let workers = cli.workers.or(config.workers);
    if workers == Some(0) {
        return Err(Exit(EXIT_USAGE, "workers must be at least 1".into()));
    }
    let env_budget = env(BUDGET_ENV);
    let budget = |flag: Option<u64>| resolve_budget(flag, &config, env_budget.as_deref());
    match cli.command {
        Command::Classify {
            p,
            genus,
            witnesses,
            format,
            budget: flag,
        } => {
            let b = budget(flag)?;
            let c = with_pool(workers, || classify::classify_genus_with_budget(p, genus, witnesses, b))??;
            notes(io, &c)?;
            let rows = rows_of(std::slice::from_ref(&c));
            io.out.write_all(render(&rows, format, witnesses)?.as_bytes())?;
            writeln!(io.err, "{} row(s)", rows.len())?;
            Ok(EXIT_OK)
        }
        Command::Table { p, genus, format, out } => {
            let cs = table(p, genus, workers)?;
            for c in &cs {
                notes(io, c)?;
            }
            let rows = rows_of(&cs);
            let text = render(&rows, format, false)?;
            match out {
                Some(path) => std::fs::write(&path, text)
                    .map_err(|e| Exit(EXIT_USAGE, format!("cannot write {}: {e}", path.display())))?,
                None => io.out.write_all(text.as_bytes())?,
            }
            writeln!(io.err, "{} row(s)", rows.len())?;
            Ok(EXIT_OK)
        }
        Command::Verify { p, genus, budget: flag } => {
            let b = budget(flag)?;
            let report = classify::cross_validate(p, genus.from, genus.to, b, workers)?;
            for g in &report.skipped_odd {
                writeln!(io.out, "g={g}: skipped, genus must be even")?;
            }
            for c in &report.cells {
                let status = match c.status {
                    CellStatus::Agree => "ok",
                    CellStatus::Discrepancy => "DISCREPANCY",
                    CellStatus::BudgetExceeded => "BUDGET",
                };
                let oracle = match c.oracle {
                    Some(o) => o.to_string(),
                    None => "unknown".into(),
                };
                writeln!(
                    io.out,
                    "g={} n={} group={} r_class={} predicate={} oracle={} {status}",
                    c.g, c.n, c.group, c.r_class, c.predicate, oracle
                )?;
                if c.status == CellStatus::Discrepancy {
                    match &c.witness {
                        Some(w) => writeln!(io.out, "  witness: {}", w.to_json())?,
                        None => {
                            let sigs: Vec<String> = c.searches.iter().map(|s| s.signature.to_string()).collect();
                            writeln!(io.out, "  no map found on {}", sigs.join(", "))?
                        }
                    }
                }
            }
            let d = report.discrepancy_count();
            let undecided = report.cells.iter().filter(|c| c.status == CellStatus::BudgetExceeded).count();
            writeln!(
                io.out,
                "cells: {}, discrepancies: {d}, budget exceeded: {undecided}{}",
                report.cells.len(),
                if report.partial { " (partial)" } else { "" }
            )?;
            Ok(if d > 0 {
                EXIT_DISCREPANCY
            } else if report.partial {
                EXIT_BUDGET
            } else {
                EXIT_OK
            })
        }
        Command::Search {
            signature,
            group,
            pseudo_real,
            limit,
            budget: flag,
        } => {
            let sig: NecSignature = signature.parse()?;
            let spec: GroupSpec = group.parse()?;
            let cfg = SearchConfig {
                budget: budget(flag)?,
                workers,
            };
            let maps = actions::enumerate(&sig, &spec, pseudo_real, &cfg)?;
            for m in maps.iter().take(limit.unwrap_or(usize::MAX)) {
                writeln!(io.out, "{}", m.to_json())?;
            }
            writeln!(io.out, "count: {}", maps.len())?;
            Ok(EXIT_OK)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        call_env(args, None)
    }

    fn call_env(args: &[&str], budget_env: Option<&str>) -> (i32, String, String) {
        let env = |k: &str| (k == BUDGET_ENV).then(|| budget_env.map(str::to_string)).flatten();
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["pgonal"];
        full.extend_from_slice(args);
        let code = run(full, &env, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn config_parsing() {
        let c: Config = "# comment\nbudget = 500\n\nworkers=3 # trailing\n".parse().unwrap();
        assert_eq!(c, Config { budget: Some(500), workers: Some(3) });
        assert!("budget".parse::<Config>().is_err());
        assert!("colour=red".parse::<Config>().is_err());
        assert!("budget=0".parse::<Config>().is_err());
        assert!("workers=-1".parse::<Config>().is_err());
    }

    #[test]
    fn budget_precedence() {
        let cfg = Config { budget: Some(7), workers: None };
        assert_eq!(resolve_budget(Some(3), &cfg, Some("9")).unwrap(), 3);
        assert_eq!(resolve_budget(None, &cfg, Some("9")).unwrap(), 7);
        assert_eq!(resolve_budget(None, &Config::default(), Some("9")).unwrap(), 9);
        assert_eq!(resolve_budget(None, &Config::default(), None).unwrap(), actions::DEFAULT_BUDGET);
        assert!(resolve_budget(None, &Config::default(), Some("x")).is_err());
        assert!(resolve_budget(Some(0), &cfg, None).is_err());
    }

    #[test]
    fn genus_ranges() {
        assert_eq!("6..20".parse::<GenusRange>().unwrap(), GenusRange { from: 6, to: 20 });
        assert!("20..6".parse::<GenusRange>().is_err());
        assert!("6-20".parse::<GenusRange>().is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["classify", "--p", "4", "--genus", "6"]).0, EXIT_USAGE);
        assert_eq!(call(&["classify", "--p", "3"]).0, EXIT_USAGE);
        assert_eq!(call(&["verify", "--p", "3", "--genus", "6..6", "--budget", "10"]).0, EXIT_BUDGET);
        assert_eq!(call_env(&["verify", "--p", "3", "--genus", "6..6"], Some("10")).0, EXIT_BUDGET);
        assert_eq!(call(&["verify", "--p", "3", "--genus", "6..6", "--budget", "0"]).0, EXIT_USAGE);
        assert_eq!(call(&["search", "(1;-;[3,3", "C12"]).0, EXIT_USAGE);
        assert_eq!(call(&["search", "(1;-;[3,3,2])", "C12", "--budget", "5"]).0, EXIT_BUDGET);
    }

    #[test]
    fn verify_odd_genus_is_vacuous() {
        let (code, out, _) = call(&["verify", "--p", "3", "--genus", "5..5"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("g=5: skipped, genus must be even"));
        assert!(out.contains("cells: 0, discrepancies: 0"));
    }

    #[test]
    fn classify_notes() {
        let (code, out, err) = call(&["classify", "--p", "3", "--genus", "7", "--format", "csv"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out.lines().count(), 1);
        assert!(err.contains("genus must be even"));

        let (_, _, err) = call(&["classify", "--p", "3", "--genus", "4"]);
        assert!(err.contains("(p-1)^2"));
    }
}
