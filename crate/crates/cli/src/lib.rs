//! Command-line front end: argument grammar, dispatch and output formatting.
//!
//! Results go to the output stream (or `--output`), diagnostics to stderr.
//! Exit codes: 0 success, 1 a verification or claim failed, 2 usage or parse
//! error, 3 time budget exhausted.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use addmds::bounds;
use addmds::classify::{self, ClassifyError, ClassifyOptions, Filters, GroupKind, SpillPolicy};
use addmds::code::{self, AdditiveCode, MinDistanceAlgorithm};
use addmds::construct::{self, CoefficientSets};
use addmds::corpus;
use addmds::field::{Field, FieldTower};
use addmds::formats;

pub const WORKERS_ENV: &str = "ADDMDS_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "addmds", version, about = "Additive codes, their bounds, constructions and arc classification")]
pub struct Cli {
    /// Output style of results.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,
    /// Write results here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    /// One JSON object per line.
    Records,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Minimum distance of a code.
    Mindist { code: PathBuf },
    /// Parameters, MDS status, faithfulness and bound satisfaction of a code.
    Summary { code: PathBuf },
    /// Trace dual of a code.
    Dual { code: PathBuf },
    /// Geometric quotient by a set of coordinates.
    Quotient {
        code: PathBuf,
        /// Comma-separated 1-based coordinates.
        #[arg(long, value_delimiter = ',', required = true)]
        positions: Vec<usize>,
    },
    /// Every bound for the given parameters, checked against `--n` if given.
    Bounds {
        /// Base field order.
        #[arg(long)]
        q: u32,
        /// Extension degree: symbols lie in F_{q^h}.
        #[arg(long)]
        h: u32,
        /// Code dimension over the base field.
        #[arg(long)]
        r: u32,
        /// Minimum distance.
        #[arg(long)]
        d: u64,
        /// Length to check against the bounds.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Build a code from one of the explicit families.
    Construct(ConstructArgs),
    /// Projective system of a code, as an arc file.
    Code2arc { code: PathBuf },
    /// A code whose projective system is the given arc.
    Arc2code { arc: PathBuf },
    /// Classify arcs up to projective equivalence.
    Classify(ClassifyArgs),
    /// Check the embedded corpus against its stated properties.
    VerifyCorpus,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Additive Reed-Solomon code.
    Rs,
    /// Trace construction of dimension between 1 and 2.
    K2,
    /// Binary trace construction of dimension between 2 and 3.
    K3,
    /// Minimum distance 3 construction from a spread.
    D3,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    pub family: Family,
    /// Base field order or descriptor.
    #[arg(long, default_value = "2")]
    pub q: String,
    /// Extension degree: symbols lie in F_{q^h}.
    #[arg(long)]
    pub h: u32,
    /// Dimension excess `r0` (k2).
    #[arg(long)]
    pub r0: Option<u32>,
    /// Dimension `r` over the base field (rs, d3).
    #[arg(long)]
    pub r: Option<u32>,
    /// Coefficient sets for rs: `;`-separated sets of `,`-separated F_q-basis elements, e.g. `1,w;1`.
    #[arg(long)]
    pub sets: Option<String>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Base field order or descriptor.
    #[arg(long)]
    pub q: String,
    /// Dimension of each arc element.
    #[arg(long)]
    pub h: usize,
    /// Dimension of the ambient space.
    #[arg(long)]
    pub r: usize,
    /// Largest arc size to generate.
    #[arg(long)]
    pub max_size: usize,
    /// Count complete arcs.
    #[arg(long)]
    pub complete: bool,
    /// Count arcs of pairwise disjoint elements.
    #[arg(long)]
    pub disjoint: bool,
    /// Write every representative to this arc file.
    #[arg(long)]
    pub reps: Option<PathBuf>,
    /// Resumable progress file.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = WORKERS_ENV, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub workers: u32,
    /// Wall-clock budget in seconds.
    #[arg(long, value_parser = positive_seconds)]
    pub budget: Option<Duration>,
    /// Shuffle the order in which parents are processed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Equivalence group; defaults to pgammal over non-prime fields.
    #[arg(long)]
    pub group: Option<GroupKind>,
    /// Keep levels on disk under this directory.
    #[arg(long)]
    pub spill_dir: Option<PathBuf>,
    /// Smallest level size kept on disk when spilling.
    #[arg(long, default_value_t = 1, requires = "spill_dir")]
    pub spill_from: usize,
}

fn positive_seconds(s: &str) -> Result<Duration, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(Duration::from_secs_f64(v))
    } else {
        Err("budget must be positive".into())
    }
}

/// A failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    /// Exit 1: a checked claim does not hold; the report was already written.
    Claim(String),
    /// Exit 2.
    Usage(String),
    /// Exit 3.
    Budget(String),
}

impl Failure {
    pub fn code(&self) -> i32 {
        match self {
            Failure::Claim(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Claim(m) | Failure::Usage(m) | Failure::Budget(m) => m,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

/// Parses `argv` and runs it, writing results to `out` and diagnostics to `err`.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let mut buf = String::new();
    let result = execute(&cli, &mut buf, err);
    // The report is written even when a claim fails.
    let written = match &cli.output {
        Some(p) => fs::write(p, &buf).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => out.write_all(buf.as_bytes()).and_then(|_| out.flush()).map_err(usage),
    };
    match result.and(written) {
        Ok(()) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn load_code(path: &Path) -> Result<AdditiveCode, Failure> {
    formats::parse_code(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn record<T: Serialize>(out: &mut String, value: &T) {
    out.push_str(&serde_json::to_string(value).expect("records serialize"));
    out.push('\n');
}

/// Field order from a descriptor; only the default modulus is accepted where
/// the library builds its own fields.
fn order_of(desc: &str) -> Result<u32, Failure> {
    let f = Field::parse_descriptor(desc).map_err(usage)?;
    let default = Field::new(f.p(), f.e(), None).map_err(usage)?;
    if default.modulus() != f.modulus() {
        return Err(usage(format!("`{desc}`: this subcommand uses the default modulus {}", default.descriptor())));
    }
    Ok(f.order())
}

#[derive(Serialize)]
struct CodeRecord<'a> {
    n: usize,
    r: usize,
    q: u32,
    h: usize,
    code: &'a str,
}

fn emit_code(out: &mut String, format: Format, c: &AdditiveCode) {
    let text = formats::write_code(c);
    match format {
        Format::Text => out.push_str(&text),
        Format::Records => record(out, &CodeRecord { n: c.n(), r: c.r(), q: c.q(), h: c.h(), code: &text }),
    }
}

fn execute(cli: &Cli, out: &mut String, err: &mut dyn Write) -> Result<(), Failure> {
    let fmt = cli.format;
    match &cli.command {
        Command::Mindist { code: path } => {
            let c = load_code(path)?;
            let d = code::min_distance(&c, MinDistanceAlgorithm::Auto).map_err(usage)?;
            match fmt {
                Format::Text => writeln!(out, "{d}").unwrap(),
                Format::Records => record(out, &serde_json::json!({ "d": d })),
            }
        }
        Command::Summary { code: path } => summary(out, fmt, &load_code(path)?)?,
        Command::Dual { code: path } => emit_code(out, fmt, &code::dual(&load_code(path)?)),
        Command::Quotient { code: path, positions } => {
            let c = load_code(path)?;
            if let Some(&bad) = positions.iter().find(|&&p| p == 0 || p > c.n()) {
                return Err(usage(format!("position {bad} outside 1..={}", c.n())));
            }
            let j: Vec<usize> = positions.iter().map(|p| p - 1).collect();
            let qt = code::geometric_quotient(&c, &j).map_err(usage)?;
            #[derive(Serialize)]
            struct QuotientRecord<'a> {
                n: usize,
                r: usize,
                non_obliterating: bool,
                faithful: bool,
                code: &'a str,
            }
            let text = formats::write_code(&qt.code);
            match fmt {
                Format::Text => out.push_str(&text),
                Format::Records => record(
                    out,
                    &QuotientRecord {
                        n: qt.code.n(),
                        r: qt.code.r(),
                        non_obliterating: qt.non_obliterating,
                        faithful: code::is_faithful(&qt.code),
                        code: &text,
                    },
                ),
            }
        }
        Command::Bounds { q, h, r, d, n } => {
            let rep = bounds::full_report(*q, *h, *r, *d, *n).map_err(usage)?;
            match fmt {
                Format::Text => write!(out, "{rep}").unwrap(),
                Format::Records => record(out, &rep),
            }
            if !rep.all_satisfied() {
                return Err(Failure::Claim("some bound is violated".into()));
            }
        }
        Command::Construct(a) => emit_code(out, fmt, &build(a)?),
        Command::Code2arc { code: path } => {
            let sys = code::system_from_code(&load_code(path)?).map_err(usage)?;
            out.push_str(&formats::write_arc(&sys));
        }
        Command::Arc2code { arc } => {
            let sys = formats::parse_arc(&read(arc)?).map_err(|e| usage(format!("{}: {e}", arc.display())))?;
            let base = sys.field().clone();
            let order = (base.order() as u64).pow(sys.h() as u32);
            let ext = u32::try_from(order).map_err(usage).and_then(|o| Field::of_order(o).map_err(usage))?;
            let tower = Arc::new(FieldTower::new(base, ext, None).map_err(usage)?);
            emit_code(out, fmt, &code::code_from_system(&sys, tower).map_err(usage)?);
        }
        Command::Classify(a) => classify_cmd(out, fmt, a, err)?,
        Command::VerifyCorpus => {
            let rep = corpus::verify_corpus().map_err(usage)?;
            match fmt {
                Format::Text => writeln!(out, "{rep}").unwrap(),
                Format::Records => {
                    for c in &rep.checks {
                        #[derive(Serialize)]
                        struct CheckRecord<'a> {
                            entry: &'a str,
                            claim: &'a str,
                            passed: bool,
                            detail: &'a str,
                        }
                        record(out, &CheckRecord { entry: &c.entry, claim: &c.claim, passed: c.passed, detail: &c.detail });
                    }
                }
            }
            let failed: Vec<String> = rep.failures().map(|c| format!("{} {}", c.entry, c.claim)).collect();
            if !failed.is_empty() {
                return Err(Failure::Claim(format!("{} corpus claims failed: {}", failed.len(), failed.join(", "))));
            }
        }
    }
    Ok(())
}

fn summary(out: &mut String, fmt: Format, c: &AdditiveCode) -> Result<(), Failure> {
    let s = code::mds_status(c).map_err(usage)?;
    let rep = bounds::full_report(s.q, s.h as u32, s.r as u32, s.d as u64, Some(s.n as u64)).map_err(usage)?;
    let ok = rep.all_satisfied();
    match fmt {
        Format::Text => {
            let r = if s.r % s.h == 0 { (s.r / s.h).to_string() } else { format!("{}/{}", s.r, s.h) };
            writeln!(out, "[{}, {}, {}]_{}^{}", s.n, r, s.d, s.q, s.h).unwrap();
            writeln!(out, "k={} mds={} faithful={}", s.k, s.mds, s.faithful).unwrap();
            writeln!(out, "bounds satisfied: {ok}").unwrap();
            write!(out, "{rep}").unwrap();
        }
        Format::Records => {
            #[derive(Serialize)]
            struct SummaryRecord<'a> {
                #[serde(flatten)]
                summary: &'a code::CodeSummary,
                bounds_satisfied: bool,
                bounds: &'a bounds::BoundReport,
            }
            record(out, &SummaryRecord { summary: &s, bounds_satisfied: ok, bounds: &rep });
        }
    }
    if ok {
        Ok(())
    } else {
        Err(Failure::Claim("the code violates a bound".into()))
    }
}

fn parse_sets(tower: &FieldTower, spec: &str) -> Result<CoefficientSets, Failure> {
    let sets = spec
        .split(';')
        .map(|s| {
            s.split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| tower.ext().parse_element(t).map_err(|e| usage(format!("--sets: {e}"))))
                .collect::<Result<Vec<u32>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoefficientSets { sets })
}

fn build(a: &ConstructArgs) -> Result<AdditiveCode, Failure> {
    let q = order_of(&a.q)?;
    let need = |v: Option<u32>, name: &str| v.ok_or_else(|| usage(format!("{:?} needs --{name}", a.family).to_lowercase()));
    match a.family {
        Family::Rs => {
            let tower = Arc::new(FieldTower::standard(q, a.h).map_err(usage)?);
            let coeffs = match &a.sets {
                Some(spec) => parse_sets(&tower, spec)?,
                None => {
                    let r = need(a.r, "r")? as usize;
                    let h = a.h as usize;
                    if r == 0 {
                        return Err(usage("--r must be positive"));
                    }
                    let k = r.div_ceil(h);
                    CoefficientSets::standard(&tower, k, r - (k - 1) * h)
                }
            };
            construct::additive_reed_solomon(tower, &coeffs).map_err(usage)
        }
        Family::K2 => construct::trace_construction_k2(q, a.h, need(a.r0, "r0")?).map_err(usage),
        Family::K3 => {
            if q != 2 {
                return Err(usage("k3 is defined over q = 2 only"));
            }
            construct::trace_construction_k3(a.h).map_err(usage)
        }
        Family::D3 => construct::d3_mds(q, a.h, need(a.r, "r")?).map_err(usage),
    }
}

fn classify_cmd(out: &mut String, fmt: Format, a: &ClassifyArgs, err: &mut dyn Write) -> Result<(), Failure> {
    let q = order_of(&a.q)?;
    let options = ClassifyOptions {
        workers: a.workers as usize,
        group: a.group,
        checkpoint: a.checkpoint.clone(),
        budget: a.budget,
        seed: a.seed,
        spill: a.spill_dir.as_ref().map(|d| SpillPolicy { dir: d.clone(), min_size: a.spill_from }),
        keep_reps: a.reps.as_ref().map(|_| a.max_size),
    };
    let filters = Filters { complete: a.complete, disjoint: a.disjoint };
    let run = match classify::classify_arcs(q, a.h, a.r, a.max_size, filters, &options) {
        Ok(run) => run,
        Err(e @ ClassifyError::BudgetExceeded { .. }) => {
            if a.checkpoint.is_none() {
                let _ = writeln!(err, "warning: no --checkpoint given, progress is lost");
            }
            return Err(Failure::Budget(e.to_string()));
        }
        Err(e) => return Err(usage(e)),
    };
    if let Some(path) = &a.reps {
        let all: Vec<_> = run.reps.values().flatten().cloned().collect();
        fs::write(path, formats::write_arcs(&all)).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    }
    #[derive(Serialize)]
    struct SizeRecord {
        size: usize,
        count: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        complete_count: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        disjoint_count: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        disjoint_complete_count: Option<u64>,
    }
    let rows: Vec<SizeRecord> = run
        .counts
        .iter()
        .map(|(&size, &count)| SizeRecord {
            size,
            count,
            complete_count: a.complete.then(|| run.complete_counts.get(&size).copied().unwrap_or(0)),
            disjoint_count: a.disjoint.then(|| run.disjoint_counts.get(&size).copied().unwrap_or(0)),
            disjoint_complete_count: (a.complete && a.disjoint)
                .then(|| run.disjoint_complete_counts.get(&size).copied().unwrap_or(0)),
        })
        .collect();
    match fmt {
        Format::Records => rows.iter().for_each(|row| record(out, row)),
        Format::Text => {
            writeln!(out, "arcs of {}-spaces in F_{}^{} up to {}", a.h, q, a.r, run.group).unwrap();
            let mut head = format!("{:>5} {:>12}", "size", "classes");
            if a.complete {
                write!(head, " {:>12}", "complete").unwrap();
            }
            if a.disjoint {
                write!(head, " {:>12}", "disjoint").unwrap();
            }
            if a.complete && a.disjoint {
                write!(head, " {:>18}", "disjoint+complete").unwrap();
            }
            writeln!(out, "{head}").unwrap();
            for row in &rows {
                let mut line = format!("{:>5} {:>12}", row.size, row.count);
                for v in [row.complete_count, row.disjoint_count].into_iter().flatten() {
                    write!(line, " {v:>12}").unwrap();
                }
                if let Some(v) = row.disjoint_complete_count {
                    write!(line, " {v:>18}").unwrap();
                }
                writeln!(out, "{line}").unwrap();
            }
        }
    }
    Ok(())
}
