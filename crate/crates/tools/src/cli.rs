//! Command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! parameter, configuration and I/O errors.

use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use oneshot_pir::lifted::measured_rate;
use oneshot_pir::protocol::{answer_batch, instantiate, NoiseSampler, QueryProtocol};
use oneshot_pir::rates::{self, to_decimal, to_fraction};
use oneshot_pir::rng::{label, substream};
use oneshot_pir::symbolic::build_symbolic;

use crate::audit::{
    correctness_suite, privacy_exact_check, random_db, privacy_statistical_check, AuditReport, CheckRow, Corruption, StatConfig,
    Status,
};
use crate::config::{Mode, Pipeline, Protocol, SchemeConfig};
use crate::formats::{read_file, write_file, write_symbolic};
use crate::transcript;

#[derive(Debug, Parser)]
#[command(name = "oneshot-pir", version, about = "One-shot PIR schemes: construction, lifting, simulation and audits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the symbolic matrix S_M for N servers and codimension r.
    Symbolic(SymbolicArgs),
    /// Tabulate closed-form rates as CSV.
    Rates(RatesArgs),
    /// Run a configured scheme end to end.
    Sim(SimArgs),
    /// Audit correctness or privacy of a configured scheme.
    Audit(AuditArgs),
}

#[derive(Debug, Args)]
pub struct SymbolicArgs {
    #[arg(long = "N")]
    pub n: usize,
    #[arg(long)]
    pub r: usize,
    #[arg(long = "M")]
    pub m: usize,
    /// Compare byte for byte against this file.
    #[arg(long)]
    pub golden: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Formula {
    Lifted,
    Oneshot,
    Refined,
    Capacity,
    Fractional,
    Geometric,
}

impl Formula {
    fn name(self) -> &'static str {
        match self {
            Formula::Lifted => "lifted",
            Formula::Oneshot => "oneshot",
            Formula::Refined => "refined",
            Formula::Capacity => "capacity",
            Formula::Fractional => "fractional",
            Formula::Geometric => "geometric",
        }
    }
}

#[derive(Debug, Args)]
pub struct RatesArgs {
    #[arg(long, value_delimiter = ',', default_values = ["lifted", "oneshot"])]
    pub formula: Vec<Formula>,
    /// Value or inclusive range `a..b`.
    #[arg(long = "N", value_parser = parse_range)]
    pub n: RangeInclusive<usize>,
    #[arg(long = "K", value_parser = parse_range)]
    pub k: Option<RangeInclusive<usize>>,
    #[arg(long = "T", value_parser = parse_range)]
    pub t: Option<RangeInclusive<usize>>,
    #[arg(long = "M", value_parser = parse_range)]
    pub m: RangeInclusive<usize>,
    #[arg(long, value_parser = parse_range)]
    pub r: Option<RangeInclusive<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Scheme selection: a config file, or flags for the built-in constructions.
#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// TOML scheme configuration.
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long = "N")]
    pub n: Option<usize>,
    #[arg(long = "K")]
    pub k: Option<usize>,
    #[arg(long = "T")]
    pub t: Option<usize>,
    #[arg(long = "M")]
    pub m: Option<usize>,
    #[arg(long)]
    pub q: Option<u32>,
    /// Run the one-shot scheme over rotated rounds instead of lifting it.
    #[arg(long)]
    pub oneshot: bool,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct SimArgs {
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Write the transcript of the first trial here.
    #[arg(long)]
    pub transcript: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditMode {
    Exact,
    Stat,
    Correctness,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    #[arg(long, value_enum)]
    pub mode: AuditMode,
    #[command(flatten)]
    pub scheme: SchemeArgs,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0.01)]
    pub significance: f64,
    /// Coordinates per block in the statistical slot projections.
    #[arg(long, default_value_t = 2)]
    pub width: usize,
    /// Add one to the first informative response before decoding.
    #[arg(long)]
    pub corrupt: bool,
    /// Replace the noise code by zeros.
    #[arg(long)]
    pub zero_noise: bool,
    /// Draw noise coordinates from {0, 1} only.
    #[arg(long)]
    pub biased_noise: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("not a nonnegative integer: {t:?}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(format!("empty range {s}"));
            }
            Ok(a..=b)
        }
        None => num(s).map(|v| v..=v),
    }
}


enum Outcome {
    Pass,
    Fail,
}

fn emit(out: &mut dyn Write, path: Option<&PathBuf>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => write_file(p, text)?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn cmd_symbolic(a: &SymbolicArgs, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let s = build_symbolic(a.n, a.r, a.m)?;
    let text = write_symbolic(&s);
    emit(out, a.out.as_ref(), &text)?;
    if let Some(g) = &a.golden {
        let golden = read_file(g)?;
        if golden != text {
            eprintln!("symbolic matrix differs from {}", g.display());
            return Ok(Outcome::Fail);
        }
    }
    Ok(Outcome::Pass)
}

fn rate_row(csv: &mut String, cols: [Option<usize>; 4], r: &str, f: Formula, v: &BigRational) {
    let c = |x: Option<usize>| x.map(|v| v.to_string()).unwrap_or_default();
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{},{}",
        c(cols[0]),
        c(cols[1]),
        c(cols[2]),
        c(cols[3]),
        r,
        f.name(),
        to_fraction(v),
        to_decimal(v, 6)
    );
}

/// The rate table as CSV text.
pub fn rates_csv(a: &RatesArgs) -> anyhow::Result<String> {
    let mut csv = String::from("N,K,T,M,r,formula,value_exact,value_decimal\n");
    let opt = |r: &Option<RangeInclusive<usize>>| -> Vec<Option<usize>> {
        r.clone().map(|r| r.map(Some).collect()).unwrap_or_else(|| vec![None])
    };
    for &f in &a.formula {
        let needs_r = matches!(f, Formula::Lifted | Formula::Oneshot | Formula::Refined);
        let needs_kt = matches!(f, Formula::Fractional | Formula::Geometric);
        if needs_r && a.r.is_none() {
            bail!("formula {} needs --r", f.name());
        }
        if (needs_kt && (a.k.is_none() || a.t.is_none())) || (f == Formula::Capacity && a.t.is_none()) {
            bail!("formula {} needs --K and --T", f.name());
        }
        for n in a.n.clone() {
            for k in if needs_kt { opt(&a.k) } else { vec![None] } {
                for t in if needs_kt || f == Formula::Capacity { opt(&a.t) } else { vec![None] } {
                    for m in a.m.clone() {
                        if m == 0 {
                            continue;
                        }
                        match f {
                            Formula::Lifted | Formula::Oneshot | Formula::Refined => {
                                for r in opt(&a.r).into_iter().flatten().filter(|&r| r >= 1 && r < n) {
                                    let v = match f {
                                        Formula::Lifted => rates::lifted_rate(n, r, m),
                                        Formula::Oneshot => rates::oneshot_rate(n, r),
                                        _ => rates::refined_rate(n, r),
                                    };
                                    rate_row(&mut csv, [Some(n), None, None, Some(m)], &r.to_string(), f, &v);
                                }
                            }
                            Formula::Capacity => {
                                let t = t.expect("checked above");
                                if t >= 1 && t < n {
                                    let v = rates::capacity(n, t, m);
                                    rate_row(&mut csv, [Some(n), None, Some(t), Some(m)], &t.to_string(), f, &v);
                                }
                            }
                            Formula::Fractional | Formula::Geometric => {
                                let (k, t) = (k.expect("checked above"), t.expect("checked above"));
                                if k >= 1 && t >= 1 && k + t <= n {
                                    let (codim, v) = if f == Formula::Fractional {
                                        (rates::fractional_codimension(n, k, t), rates::fractional_rate(n, k, t, m))
                                    } else {
                                        (rates::geometric_codimension(k, t), rates::geometric_rate(n, k, t, m))
                                    };
                                    let r = if codim.is_integer() { codim.to_integer().to_string() } else { to_fraction(&codim) };
                                    rate_row(&mut csv, [Some(n), Some(k), Some(t), Some(m)], &r, f, &v);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(csv)
}

fn load_config(s: &SchemeArgs) -> anyhow::Result<SchemeConfig> {
    let mut cfg = match &s.config {
        Some(path) => SchemeConfig::from_toml(&read_file(path)?).with_context(|| format!("{}", path.display()))?,
        None => {
            let kind = s.kind.clone().context("give a config file or --kind")?;
            let need = |v: Option<usize>, flag: &str| v.with_context(|| format!("--{flag} is required without a config file"));
            SchemeConfig {
                kind,
                mode: Mode::Lifted,
                n: need(s.n, "N")?,
                k: s.k.unwrap_or(1),
                t: need(s.t, "T")?,
                m: need(s.m, "M")?,
                q: None,
                generator: None,
                lambda: None,
                mixed: None,
                seed: 0,
                message_len: None,
            }
        }
    };
    if let Some(kind) = &s.kind {
        cfg.kind = kind.clone();
    }
    for (slot, v) in [(&mut cfg.n, s.n), (&mut cfg.k, s.k), (&mut cfg.t, s.t), (&mut cfg.m, s.m)] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    if s.q.is_some() {
        cfg.q = s.q;
    }
    if s.oneshot {
        cfg.mode = Mode::Oneshot;
    }
    if let Some(seed) = s.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn describe(p: &Pipeline) -> String {
    let c = &p.config;
    let mode = match p.protocol {
        Protocol::Lifted(_) => "lifted",
        Protocol::OneShot(_) => "oneshot",
    };
    format!(
        "scheme: {} {mode} N={} K={} T={} M={} q={} r={} L={}\n",
        p.scheme.construction().name(),
        c.n,
        c.k,
        c.t,
        c.m,
        p.modulus().q(),
        p.scheme.codimension(),
        p.message_len()
    )
}

fn cmd_sim(a: &SimArgs, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let cfg = load_config(&a.scheme)?;
    let p = cfg.build_pipeline()?;
    let mut report = describe(&p);
    let (n, r) = (p.servers(), p.scheme.codimension());

    let mut rng = substream(cfg.seed, &[label("sim-transcript")]);
    let (batch, state) = instantiate(&p, 0, NoiseSampler::Uniform, &mut rng)?;
    let counts = batch.per_server_counts();
    let measured = BigRational::new(p.message_len().into(), batch.total().into());
    let closed = match &p.protocol {
        Protocol::Lifted(s) => {
            let planned = measured_rate(s.plan())?;
            if planned != measured {
                bail!("instantiated batch disagrees with the plan: {measured} vs {planned}");
            }
            rates::lifted_rate(n, r, cfg.m)
        }
        Protocol::OneShot(_) => rates::oneshot_rate(n, r),
    };
    let capacity = rates::capacity(n, cfg.t, cfg.m);
    let _ = writeln!(
        report,
        "queries per server: {} (total {})",
        counts.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" "),
        batch.total()
    );
    let _ = writeln!(report, "measured rate: {} ({})", to_fraction(&measured), to_decimal(&measured, 6));
    let _ = writeln!(
        report,
        "closed form: {} ({})",
        to_fraction(&closed),
        if closed == measured { "match" } else { "MISMATCH" }
    );
    let _ = writeln!(
        report,
        "capacity: {} ({})",
        to_fraction(&capacity),
        if capacity == measured { "achieved" } else { "below" }
    );
    if let Some(path) = &a.transcript {
        let db = random_db(&p, &mut substream(cfg.seed, &[label("sim-database")]))?;
        let responses = answer_batch(&db, &batch)?;
        write_file(path, &transcript::render(&batch, &responses, &state))?;
    }
    let c = correctness_suite(&p, a.trials, cfg.seed, Corruption::None)?;
    let _ = writeln!(report, "correctness: {} ({} trials)", if c.passed() { "pass" } else { "fail" }, c.trials);
    for f in &c.failures {
        let _ = writeln!(report, "  trial {} seed {} message {}: {}", f.trial, f.seed, f.desired + 1, f.reason);
    }
    emit(out, a.out.as_ref(), &report)?;
    Ok(if c.passed() && closed == measured { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_audit(a: &AuditArgs, out: &mut dyn Write) -> anyhow::Result<Outcome> {
    let cfg = load_config(&a.scheme)?;
    let mut p = cfg.build_pipeline()?;
    if a.zero_noise {
        p = p.with_zeroed_noise()?;
    }
    let report = match a.mode {
        AuditMode::Exact => privacy_exact_check(&p, cfg.t, (0, 1))?,
        AuditMode::Stat => {
            let sc = StatConfig {
                trials: a.trials.unwrap_or(100_000),
                significance: a.significance,
                width: a.width,
                sampler: if a.biased_noise { NoiseSampler::Binary } else { NoiseSampler::Uniform },
                seed: cfg.seed,
                pair: (0, 1),
            };
            privacy_statistical_check(&p, cfg.t, &p.slot_supports(), &sc)?
        }
        AuditMode::Correctness => {
            let corrupt = if a.corrupt { Corruption::FlipResponse } else { Corruption::None };
            let c = correctness_suite(&p, a.trials.unwrap_or(100), cfg.seed, corrupt)?;
            let mut report = AuditReport::default();
            report.rows.push(CheckRow {
                check: "correctness".into(),
                scope: format!("{} trials", c.trials),
                status: if c.passed() { Status::Pass } else { Status::Fail },
                statistic: None,
                p_value: None,
                detail: match c.failures.first() {
                    None => String::new(),
                    Some(f) => format!(
                        "{} failures; first: trial {} seed {} message {}: {}",
                        c.failures.len(),
                        f.trial,
                        f.seed,
                        f.desired + 1,
                        f.reason
                    ),
                },
            });
            report
        }
    };
    let text = format!("# {}{}", describe(&p), report.to_csv());
    emit(out, a.out.as_ref(), &text)?;
    Ok(if report.passed() { Outcome::Pass } else { Outcome::Fail })
}

/// Runs the command line `args` (program name first), writing results to
/// `out` and diagnostics to stderr. Returns the process exit code.
pub fn run<I, S>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Symbolic(a) => cmd_symbolic(a, out),
        Command::Rates(a) => rates_csv(a).and_then(|csv| emit(out, a.out.as_ref(), &csv)).map(|_| Outcome::Pass),
        Command::Sim(a) => cmd_sim(a, out),
        Command::Audit(a) => cmd_audit(a, out),
    };
    match result {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3").unwrap(), 3..=3);
        assert_eq!(parse_range("2..10").unwrap(), 2..=10);
        assert_eq!(parse_range("2..=4").unwrap(), 2..=4);
        assert!(parse_range("5..2").is_err());
        assert!(parse_range("x").is_err());
    }
}
