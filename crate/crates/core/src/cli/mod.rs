//! Command-line front end.
//!
//! Exit codes: 0 success or secure, 2 usage or validation error, 3 property
//! violation (leakage found or an inequality failed).

pub mod files;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::bounds::{
    bound_beta, bound_general, bound_prior, file_sizes_for_rates, mbr_point, region_csv, region_export,
    NormalizedRates,
};
use crate::entropy::{EntropyLab, Suite};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::secrecy::{self, EavesdropperSpec};
use crate::system::{NodeShare, System};

use files::{decode_share_file, encode_share_file, share_path, symbols_from_le_bytes, symbols_to_le_bytes, ConfigFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mdcsr", version, about = "Secure multilevel regenerating storage over GF(p)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Encode per-level message files into node_<i>.mdcs share files.
    Encode {
        #[arg(long)]
        config: PathBuf,
        /// LEVEL=PATH, one per nonempty level; files hold 2-byte LE symbols.
        #[arg(long = "message", value_parser = parse_level_path)]
        messages: Vec<(usize, PathBuf)>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Regenerate one node's share file from d helpers.
    Repair {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        target: usize,
        /// Defaults to the d lowest-indexed surviving nodes.
        #[arg(long, value_delimiter = ',')]
        helpers: Option<Vec<usize>>,
    },
    /// Recover the level-j file from j share files.
    Recover {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long, value_delimiter = ',')]
        nodes: Vec<usize>,
        /// Write symbols here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure leakage to eavesdroppers by exact rank computation.
    Audit {
        #[arg(long)]
        config: PathBuf,
        /// Every disjoint (E1, E2) of the configured sizes (the default).
        #[arg(long, conflicts_with_all = ["e1", "e2", "sizes"])]
        exhaustive: bool,
        #[arg(long, value_delimiter = ',')]
        e1: Option<Vec<usize>>,
        #[arg(long, value_delimiter = ',')]
        e2: Option<Vec<usize>>,
        /// Override set sizes as A,B (non-compliant sizes are flagged).
        #[arg(long, value_delimiter = ',', num_args = 1, conflicts_with_all = ["e1", "e2"])]
        sizes: Option<Vec<usize>>,
    },
    /// Print the tradeoff bounds and MBR point as JSON.
    Bounds(RateArgs),
    /// Print the bound region on a beta grid as CSV.
    Region {
        #[command(flatten)]
        rates: RateArgs,
        /// Comma-separated values, or START:STEP:STOP (inclusive).
        #[arg(long)]
        grid: Option<String>,
    },
    /// Smallest stripe-compatible file sizes for a rate vector.
    Sizes(RateArgs),
    /// Check the converse inequalities on an n = d + 1 instance.
    VerifyLemmas {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "all")]
        suite: String,
        /// Zero this node's evaluation row first (negative control).
        #[arg(long)]
        corrupt_node: Option<usize>,
    },
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub d: usize,
    #[arg(long)]
    pub l1: usize,
    #[arg(long)]
    pub l2: usize,
    /// Normalized file sizes for levels l+1..=d, e.g. 0,1/3,2/3.
    #[arg(long, value_delimiter = ',')]
    pub rates: Vec<String>,
}

impl RateArgs {
    fn rates(&self) -> Result<NormalizedRates> {
        if self.d >= self.n {
            return Err(Error::BadParameters(format!(
                "violates d < n (d={}, n={})",
                self.d, self.n
            )));
        }
        let rates = self
            .rates
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<Rational>>>()?;
        NormalizedRates::new(self.d, self.l1, self.l2, rates)
    }
}

fn parse_level_path(s: &str) -> std::result::Result<(usize, PathBuf), String> {
    let (l, p) = s.split_once('=').ok_or("expected LEVEL=PATH")?;
    let level = l.trim().parse().map_err(|_| format!("bad level {l:?}"))?;
    Ok((level, PathBuf::from(p)))
}

enum Outcome {
    Ok,
    Violation,
}

/// Runs the CLI with explicit streams and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    match execute(cli.command, out, err) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Violation) => EXIT_VIOLATION,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn json_line(out: &mut dyn Write, v: &impl Serialize) -> Result<()> {
    let s = serde_json::to_string(v).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(out, "{s}").map_err(io)
}

fn execute(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<Outcome> {
    match cmd {
        Command::Encode { config, messages, out: dir } => cmd_encode(&config, &messages, &dir, out),
        Command::Repair { dir, target, helpers } => cmd_repair(&dir, target, helpers, out),
        Command::Recover { dir, level, nodes, out: dest } => cmd_recover(&dir, level, &nodes, dest.as_deref(), out),
        Command::Audit {
            config,
            exhaustive: _,
            e1,
            e2,
            sizes,
        } => cmd_audit(&config, e1, e2, sizes, out),
        Command::Bounds(args) => cmd_bounds(&args, out),
        Command::Region { rates, grid } => cmd_region(&rates, grid.as_deref(), out),
        Command::Sizes(args) => cmd_sizes(&args, out),
        Command::VerifyLemmas {
            config,
            suite,
            corrupt_node,
        } => cmd_verify_lemmas(&config, &suite, corrupt_node, out, err),
    }
}

fn cmd_encode(config: &Path, messages: &[(usize, PathBuf)], dir: &Path, out: &mut dyn Write) -> Result<Outcome> {
    let cfg = ConfigFile::load(config)?;
    let system = cfg.system()?;
    let mut msgs = BTreeMap::new();
    for (level, path) in messages {
        if msgs.contains_key(level) {
            return Err(Error::BadParameters(format!("message for level {level} given twice")));
        }
        let bytes = std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let symbols = symbols_from_le_bytes(&bytes, system.modulus())
            .map_err(|e| Error::BadParameters(format!("message for level {level}: {e}")))?;
        let expected = system.file_size(*level);
        if symbols.len() != expected {
            return Err(Error::LengthMismatch {
                level: Some(*level),
                expected,
                actual: symbols.len(),
            });
        }
        msgs.insert(*level, symbols);
    }
    let shares = system.encode(&msgs, cfg.seed)?;
    std::fs::create_dir_all(dir).map_err(io)?;
    for share in &shares {
        std::fs::write(share_path(dir, share.node_id), encode_share_file(&system, share)?).map_err(io)?;
    }
    writeln!(
        out,
        "wrote {} shares of {} symbols to {}",
        shares.len(),
        system.alpha(),
        dir.display()
    )
    .map_err(io)?;
    Ok(Outcome::Ok)
}

/// Loads every readable share file in `dir`, keyed by node id.
fn load_shares(dir: &Path) -> Result<(System, BTreeMap<usize, NodeShare>)> {
    let mut system: Option<System> = None;
    let mut shares = BTreeMap::new();
    let mut entries: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mdcs"))
        .collect();
    entries.sort();
    for path in entries {
        let bytes = std::fs::read(&path).map_err(io)?;
        let (s, share) = decode_share_file(&bytes)
            .map_err(|e| Error::ShareFormat(format!("{}: {e}", path.display())))?;
        match &system {
            None => system = Some(s),
            Some(prev) if prev.params() != s.params() => {
                return Err(Error::ShareFormat(format!(
                    "{} belongs to a different system",
                    path.display()
                )))
            }
            Some(_) => {}
        }
        shares.insert(share.node_id, share);
    }
    let system = system.ok_or_else(|| Error::ShareFormat(format!("no share files in {}", dir.display())))?;
    Ok((system, shares))
}

fn pick(shares: &BTreeMap<usize, NodeShare>, ids: &[usize]) -> Result<Vec<NodeShare>> {
    ids.iter()
        .map(|i| {
            shares
                .get(i)
                .cloned()
                .ok_or_else(|| Error::ShareFormat(format!("share for node {i} not found")))
        })
        .collect()
}

fn cmd_repair(dir: &Path, target: usize, helpers: Option<Vec<usize>>, out: &mut dyn Write) -> Result<Outcome> {
    let (system, shares) = load_shares(dir)?;
    let helpers = match helpers {
        Some(h) => h,
        None => {
            let available: Vec<usize> = shares.keys().copied().collect();
            system.default_helpers(target, &available)?
        }
    };
    let rebuilt = system.repair_node(target, &pick(&shares, &helpers)?)?;
    std::fs::write(share_path(dir, target), encode_share_file(&system, &rebuilt)?).map_err(io)?;
    let list: Vec<String> = helpers.iter().map(usize::to_string).collect();
    writeln!(
        out,
        "repaired node {target} from helpers {} ({} symbols downloaded)",
        list.join(","),
        helpers.len() * system.beta()
    )
    .map_err(io)?;
    Ok(Outcome::Ok)
}

fn cmd_recover(dir: &Path, level: usize, nodes: &[usize], dest: Option<&Path>, out: &mut dyn Write) -> Result<Outcome> {
    let (system, shares) = load_shares(dir)?;
    let message = system.recover_file(level, &pick(&shares, nodes)?)?;
    let bytes = symbols_to_le_bytes(&message);
    match dest {
        Some(p) => std::fs::write(p, bytes).map_err(io)?,
        None => out.write_all(&bytes).map_err(io)?,
    }
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct AuditLine<'a> {
    e1: &'a std::collections::BTreeSet<usize>,
    e2: &'a std::collections::BTreeSet<usize>,
    #[serde(flatten)]
    report: secrecy::LeakageReport,
}

#[derive(Serialize)]
struct AuditTotal {
    e1_size: usize,
    e2_size: usize,
    compliant: bool,
    cases: usize,
    max_leakage: usize,
    verdict: secrecy::Verdict,
}

fn cmd_audit(
    config: &Path,
    e1: Option<Vec<usize>>,
    e2: Option<Vec<usize>>,
    sizes: Option<Vec<usize>>,
    out: &mut dyn Write,
) -> Result<Outcome> {
    let system = ConfigFile::load(config)?.system()?;
    let summary = if e1.is_some() || e2.is_some() {
        let spec = EavesdropperSpec::new(e1.unwrap_or_default(), e2.unwrap_or_default());
        let report = secrecy::observation_of(&system, &spec)?.leakage();
        secrecy::AuditSummary {
            e1_size: spec.e1.len(),
            e2_size: spec.e2.len(),
            compliant: spec.is_compliant(&system),
            verdict: report.verdict,
            entries: vec![secrecy::AuditEntry { spec, report }],
        }
    } else if let Some(s) = sizes {
        let [a, b] = s[..] else {
            return Err(Error::BadParameters("--sizes takes exactly two values A,B".into()));
        };
        secrecy::audit_with_sizes(&system, a, b)?
    } else {
        secrecy::audit_all(&system)?
    };
    for e in &summary.entries {
        json_line(
            out,
            &AuditLine {
                e1: &e.spec.e1,
                e2: &e.spec.e2,
                report: e.report,
            },
        )?;
    }
    json_line(
        out,
        &AuditTotal {
            e1_size: summary.e1_size,
            e2_size: summary.e2_size,
            compliant: summary.compliant,
            cases: summary.entries.len(),
            max_leakage: summary.max_leakage(),
            verdict: summary.verdict,
        },
    )?;
    Ok(if summary.is_secure() {
        Outcome::Ok
    } else {
        Outcome::Violation
    })
}

#[derive(Serialize)]
pub struct BoundsReport {
    pub beta_floor: Rational,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b4: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b4_omitted: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type2_2: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub type2_2_omitted: Option<&'static str>,
    pub mbr: [Rational; 2],
}

pub fn bounds_report(rates: &NormalizedRates) -> BoundsReport {
    let (b4, b4_omitted) = match bound_general(rates) {
        Ok(b) => (Some(b.to_string()), None),
        Err(_) => (None, Some("split out of regime")),
    };
    let (type2_2, type2_2_omitted) = if rates.l1() == 0 {
        (Some(bound_prior(rates).to_string()), None)
    } else {
        (None, Some("only stated for l1 = 0"))
    };
    let mbr = mbr_point(rates);
    BoundsReport {
        beta_floor: bound_beta(rates),
        b4,
        b4_omitted,
        type2_2,
        type2_2_omitted,
        mbr: [mbr.alpha, mbr.beta],
    }
}

fn cmd_bounds(args: &RateArgs, out: &mut dyn Write) -> Result<Outcome> {
    json_line(out, &bounds_report(&args.rates()?))?;
    Ok(Outcome::Ok)
}

/// Parses `a,b,c` or `start:step:stop` (inclusive) into a grid.
pub fn parse_grid(spec: &str) -> Result<Vec<Rational>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts[..] {
        [single] => single.split(',').map(str::parse).collect(),
        [start, step, stop] => {
            let (start, step, stop): (Rational, Rational, Rational) = (start.parse()?, step.parse()?, stop.parse()?);
            if step <= Rational::ZERO || stop < start {
                return Err(Error::BadRange(format!("grid {spec:?} needs step > 0 and stop >= start")));
            }
            let mut out = Vec::new();
            let mut x = start;
            while x <= stop {
                out.push(x);
                x = x + step;
                if out.len() > 100_000 {
                    return Err(Error::BadRange(format!("grid {spec:?} is too large")));
                }
            }
            Ok(out)
        }
        _ => Err(Error::BadRange(format!("cannot parse grid {spec:?}"))),
    }
}

fn cmd_region(args: &RateArgs, grid: Option<&str>, out: &mut dyn Write) -> Result<Outcome> {
    let rates = args.rates()?;
    let grid = match grid {
        Some(g) => parse_grid(g)?,
        None => {
            let b = mbr_point(&rates).beta;
            (0..=20).map(|k| b * Rational::new(k, 10)).collect()
        }
    };
    write!(out, "{}", region_csv(&region_export(&rates, &grid))).map_err(io)?;
    Ok(Outcome::Ok)
}

fn cmd_sizes(args: &RateArgs, out: &mut dyn Write) -> Result<Outcome> {
    json_line(out, &file_sizes_for_rates(&args.rates()?)?)?;
    Ok(Outcome::Ok)
}

fn cmd_verify_lemmas(
    config: &Path,
    suite: &str,
    corrupt: Option<usize>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Outcome> {
    let suite: Suite = suite.parse()?;
    let mut system = ConfigFile::load(config)?.system()?;
    if let Some(node) = corrupt {
        system = system.with_zeroed_evaluation(node)?;
    }
    let lab = EntropyLab::new(system)?;
    let results = lab.run_suite(suite)?;
    for c in &results {
        json_line(out, c)?;
    }
    let failed = results.iter().filter(|c| !c.satisfied).count();
    writeln!(err, "{} checks, {failed} failed", results.len()).map_err(io)?;
    Ok(if failed == 0 { Outcome::Ok } else { Outcome::Violation })
}
