//! Command-line front end. [`run`] takes the argument list and two sinks
//! so that it can be driven from tests as well as from `main`.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::class::{parse, ClassExpr};
use crate::config::{parse_seed, Format, RunConfig};
use crate::density::{check_dagger_inequality, density_profile, measure_bounds};
use crate::error::{Error, Result};
use crate::homogeneity::homogeneity_report;
use crate::measure::{lambda_report, mu, ratio, theta};
use crate::rational::{to_text, ExactRational};
use crate::sampler::{empirical_measure, produce_path, BitSource};
use crate::tree::{count, levels, CountCache};
use crate::verify::{self, Suite};
use crate::word::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "pitree", version, about = "Trees of extendible nodes and their branching measures")]
struct Cli {
    #[command(flatten)]
    opts: GlobalOpts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Debug, Args)]
struct GlobalOpts {
    /// Configuration file of `key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    enum_depth: Option<usize>,
    #[arg(long, global = true)]
    count_depth: Option<u64>,
    /// Stability window for ratio series.
    #[arg(long, global = true)]
    window: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Decimal or 0x-prefixed hexadecimal.
    #[arg(long, global = true)]
    seed: Option<String>,
    /// json, csv or text.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Count cache file.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Recompute cached counts and fail on disagreement.
    #[arg(long, global = true)]
    verify_cache: bool,
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the extendible nodes of one length.
    Levels {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        n: usize,
    },
    /// Count the extendible nodes of one length.
    Count {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        n: u64,
    },
    /// Branching count of a node.
    Theta {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        sigma: String,
    },
    /// Induced measure of a node.
    Mu {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        sigma: String,
    },
    /// Fraction of the length-n nodes that extend a node.
    Ratio {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        sigma: String,
        #[arg(long)]
        n: usize,
    },
    /// Ratio series of a node, with an exact limit when one is certified.
    Lambda {
        #[arg(long)]
        expr: String,
        #[arg(long, default_value = "e")]
        sigma: String,
        #[arg(long)]
        depth: usize,
    },
    /// Homogeneity verdicts and constants.
    Homog {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Produce paths by coin tossing.
    Sample {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        depth: usize,
        /// Produce one path from these bits instead of sampling.
        #[arg(long, conflicts_with = "bits_file")]
        bits: Option<String>,
        /// Produce one path from the bits in this file.
        #[arg(long)]
        bits_file: Option<PathBuf>,
    },
    /// Measure bounds, density profiles and the measure inequality.
    Density {
        #[arg(long)]
        expr: String,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        prefix: Option<String>,
        /// Check the inequality for this `c`.
        #[arg(long)]
        c: Option<usize>,
    },
    /// Run the verification suites.
    Verify {
        /// A suite name or `all`.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        depth: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Levels { .. } => "levels",
            Command::Count { .. } => "count",
            Command::Theta { .. } => "theta",
            Command::Mu { .. } => "mu",
            Command::Ratio { .. } => "ratio",
            Command::Lambda { .. } => "lambda",
            Command::Homog { .. } => "homog",
            Command::Sample { .. } => "sample",
            Command::Density { .. } => "density",
            Command::Verify { .. } => "verify",
        }
    }
}

/// A command result in every output format.
struct Output {
    json: Value,
    csv: String,
    text: String,
    violation: bool,
}

impl Output {
    fn new(json: Value, csv: String, text: String) -> Self {
        Output {
            json,
            csv,
            text,
            violation: false,
        }
    }

    /// Same rendering for text and csv.
    fn scalar(json: Value, header: &str, value: String) -> Self {
        Output::new(json, format!("{header}\n{value}\n"), format!("{value}\n"))
    }
}

fn config_from(opts: &GlobalOpts) -> Result<RunConfig> {
    let mut cfg = match &opts.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = opts.enum_depth {
        cfg.enum_depth = v;
    }
    if let Some(v) = opts.count_depth {
        cfg.count_depth = v;
    }
    if let Some(v) = opts.window {
        cfg.window = v;
    }
    if let Some(v) = opts.samples {
        cfg.samples = v;
    }
    if let Some(v) = &opts.seed {
        cfg.seed = parse_seed(v)?;
    }
    if let Some(v) = &opts.format {
        cfg.format = v.parse()?;
    }
    if let Some(v) = &opts.cache {
        cfg.cache = Some(v.clone());
    }
    if let Some(v) = opts.threads {
        cfg.threads = Some(v);
    }
    cfg.validate()?;
    Ok(cfg)
}

/// The JSON envelope: tool, version, command, configuration and result.
pub fn envelope(command: &str, cfg: &RunConfig, result: Value) -> Value {
    json!({
        "tool": "pitree",
        "version": VERSION,
        "command": command,
        "config": cfg.to_json(),
        "result": result,
    })
}

/// Parses the arguments, runs one command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli) {
        Ok((cfg, output)) => {
            let rendered = match cfg.format {
                Format::Json => {
                    let v = envelope(cli.cmd.name(), &cfg, output.json);
                    format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
                }
                Format::Csv => output.csv,
                Format::Text => output.text,
            };
            if out.write_all(rendered.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            if output.violation {
                let _ = writeln!(err, "verification failed");
                EXIT_VIOLATION
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn execute(cli: &Cli) -> Result<(RunConfig, Output)> {
    let cfg = config_from(&cli.opts)?;
    let output = match cfg.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(|| dispatch(&cli.cmd, &cfg, cli.opts.verify_cache))?,
        None => dispatch(&cli.cmd, &cfg, cli.opts.verify_cache)?,
    };
    Ok((cfg, output))
}

fn expr(text: &str) -> Result<ClassExpr> {
    parse(text)
}

fn word(text: &str) -> Result<Word> {
    text.parse()
}

fn dispatch(cmd: &Command, cfg: &RunConfig, verify_cache: bool) -> Result<Output> {
    let limits = cfg.limits();
    match cmd {
        Command::Levels { expr: x, n } => {
            let e = expr(x)?;
            let level = levels(&e, *n, &limits)?;
            let nodes: Vec<String> = level.words().map(|w| w.to_dsl()).collect();
            let json = json!({
                "expr": e.to_dsl(),
                "n": n,
                "count": level.cardinality().to_string(),
                "nodes": nodes,
            });
            let mut csv = String::from("node\n");
            let mut text = String::new();
            for node in &nodes {
                csv.push_str(node);
                csv.push('\n');
                text.push_str(node);
                text.push('\n');
            }
            Ok(Output::new(json, csv, text))
        }
        Command::Count { expr: x, n } => {
            let e = expr(x)?;
            let c = match &cfg.cache {
                Some(path) => CountCache::open(path, verify_cache)?.count(&e, *n, &limits)?,
                None => count(&e, *n, &limits)?,
            };
            let json = json!({"expr": e.to_dsl(), "n": n, "count": c.to_string()});
            Ok(Output::new(json, format!("n,count\n{n},{c}\n"), format!("{c}\n")))
        }
        Command::Theta { expr: x, sigma } => {
            let (e, s) = (expr(x)?, word(sigma)?);
            let t = theta(&e, &s)?;
            let json = json!({"expr": e.to_dsl(), "sigma": s.to_dsl(), "theta": t});
            Ok(Output::scalar(json, "theta", t.to_string()))
        }
        Command::Mu { expr: x, sigma } => {
            let (e, s) = (expr(x)?, word(sigma)?);
            let m = mu(&e, &s);
            let json = json!({"expr": e.to_dsl(), "sigma": s.to_dsl(), "mu": to_text(&m)});
            Ok(Output::scalar(json, "mu", to_text(&m)))
        }
        Command::Ratio { expr: x, sigma, n } => {
            let (e, s) = (expr(x)?, word(sigma)?);
            limits.check_count(*n as u64)?;
            let r = ratio(&e, &s, *n)?;
            let json = json!({"expr": e.to_dsl(), "sigma": s.to_dsl(), "n": n, "ratio": to_text(&r)});
            Ok(Output::new(
                json,
                format!("n,num,den\n{n},{},{}\n", r.numer(), r.denom()),
                format!("{}\n", to_text(&r)),
            ))
        }
        Command::Lambda { expr: x, sigma, depth } => {
            let (e, s) = (expr(x)?, word(sigma)?);
            limits.check_count(*depth as u64)?;
            let r = lambda_report(&e, &s, *depth, cfg.window)?;
            let mut text = String::new();
            for (n, v) in r.series.entries() {
                text.push_str(&format!("{n} {}\n", to_text(v)));
            }
            text.push_str(&format!(
                "stable: {}\nexact: {}\n",
                opt_text(r.series.stable_value()),
                match (&r.exact, &r.certificate) {
                    (Some(v), Some(c)) => format!("{} ({c})", to_text(v)),
                    _ => "none".into(),
                }
            ));
            let mut json = r.to_json();
            json["expr"] = json!(e.to_dsl());
            Ok(Output::new(json, r.series.to_csv(), text))
        }
        Command::Homog { expr: x, depth, n } => {
            let e = expr(x)?;
            limits.check_count(*depth as u64)?;
            let r = homogeneity_report(&e, *n, *depth)?;
            let text = format!(
                "ss={}\nnhom({n})={}\nweak({n})={}\nahom constant = {} at depth {depth}\nvl dagger = {}, ddagger = {}\n",
                r.ss.holds,
                r.nhom.holds,
                r.weak.holds,
                r.ahom.constant,
                to_text(&r.vl.dagger),
                to_text(&r.vl.ddagger),
            );
            let csv = format!(
                "notion,value\nss,{}\nnhom,{}\nweak,{}\nahom,{}\nvl_dagger,{}\nvl_ddagger,{}\n",
                r.ss.holds,
                r.nhom.holds,
                r.weak.holds,
                r.ahom.constant,
                to_text(&r.vl.dagger),
                to_text(&r.vl.ddagger),
            );
            let mut json = r.to_json();
            json["expr"] = json!(e.to_dsl());
            json["n"] = json!(n);
            Ok(Output::new(json, csv, text))
        }
        Command::Sample {
            expr: x,
            depth,
            bits,
            bits_file,
        } => {
            let e = expr(x)?;
            limits.check_enum(*depth)?;
            let source = match (bits, bits_file) {
                (Some(b), _) => Some(BitSource::from_text(b)?),
                (None, Some(path)) => Some(BitSource::from_file(path)?),
                (None, None) => None,
            };
            if let Some(mut src) = source {
                let p = produce_path(&e, &mut src, *depth)?;
                let text = format!(
                    "prefix {}\nbranches {}\nbits_consumed {}\n",
                    p.prefix.to_dsl(),
                    p.branches.to_dsl(),
                    p.bits_consumed
                );
                let csv = format!(
                    "prefix,branches,tossed,forced,bits_consumed\n{},{},{},{},{}\n",
                    p.prefix.to_dsl(),
                    p.branches.to_dsl(),
                    p.tossed.to_dsl(),
                    p.forced.to_dsl(),
                    p.bits_consumed
                );
                return Ok(Output::new(p.to_json(), csv, text));
            }
            let r = empirical_measure(&e, *depth, cfg.samples, cfg.seed, &limits)?;
            let mut text = String::new();
            for (w, c, m) in &r.rows {
                text.push_str(&format!("{} {c} {}\n", w.to_dsl(), to_text(m)));
            }
            text.push_str(&format!("tv {} ~ {:.6}\n", to_text(&r.tv), approx(&r.tv)));
            Ok(Output::new(r.to_json(), r.to_csv(), text))
        }
        Command::Density {
            expr: x,
            depth,
            prefix,
            c,
        } => {
            let e = expr(x)?;
            limits.check_count(*depth as u64)?;
            let bounds = measure_bounds(&e, *depth);
            let mut json = json!({"expr": e.to_dsl(), "measure": bounds.to_json()});
            let mut text = format!(
                "measure upper bound at depth {depth}: {}\nexact measure: {}\n",
                to_text(bounds.bounds.last().expect("depth 0 is present")),
                opt_text(bounds.exact.as_ref())
            );
            let mut csv = String::from("n,upper\n");
            for (n, b) in bounds.bounds.iter().enumerate() {
                csv.push_str(&format!("{n},{}\n", to_text(b)));
            }
            if let Some(p) = prefix {
                let profile = density_profile(&e, &word(p)?, *depth)?;
                for row in &profile.rows {
                    text.push_str(&format!(
                        "j {} upper {} exact {}\n",
                        row.j,
                        to_text(&row.upper),
                        opt_text(row.exact.as_ref())
                    ));
                }
                json["profile"] = profile.to_json();
            }
            if let Some(c) = c {
                let r = check_dagger_inequality(&e, *c, *depth)?;
                text.push_str(&format!(
                    "inequality with c = {c}: {} ({} checks, margin {})\n",
                    if r.ok() { "holds" } else { "fails" },
                    r.checks,
                    to_text(&r.margin)
                ));
                json["inequality"] = r.to_json();
            }
            Ok(Output::new(json, csv, text))
        }
        Command::Verify { suite, depth } => {
            limits.check_enum(*depth)?;
            let results = if suite == "all" {
                verify::run_all(*depth)
            } else {
                vec![verify::run(suite.parse::<Suite>()?, *depth)]
            };
            let mut text = String::new();
            let mut csv = String::from("suite,checks,failures\n");
            for r in &results {
                text.push_str(&format!(
                    "{}: {} checks, {} failures\n",
                    r.name,
                    r.checks,
                    r.failures.len()
                ));
                for f in &r.failures {
                    text.push_str(&format!("  {f}\n"));
                }
                csv.push_str(&format!("{},{},{}\n", r.name, r.checks, r.failures.len()));
            }
            let ok = results.iter().all(|r| r.ok());
            let json = json!({
                "depth": depth,
                "ok": ok,
                "suites": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
            });
            let mut out = Output::new(json, csv, text);
            out.violation = !ok;
            Ok(out)
        }
    }
}

fn opt_text(v: Option<&ExactRational>) -> String {
    v.map_or_else(|| "none".into(), to_text)
}

fn approx(r: &ExactRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("pitree").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn ratio_prints_a_fraction() {
        let (code, out, _) = call(&["ratio", "--expr", "ex3", "--sigma", "0", "--n", "3"]);
        assert_eq!(code, EXIT_OK);
        assert_eq!(out, "1/5\n");
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(call(&["ratio", "--expr", "ex3"]).0, EXIT_USAGE);
        assert_eq!(call(&["frobnicate"]).0, EXIT_USAGE);
        let (code, _, err) = call(&["count", "--expr", "cyl(2,full)", "--n", "3"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("position"), "{err}");
        let (code, _, err) = call(&["levels", "--expr", "full", "--n", "30"]);
        assert_eq!(code, EXIT_USAGE);
        assert!(err.contains("limit"), "{err}");
        assert_eq!(call(&["--format", "xml", "count", "--expr", "full", "--n", "1"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("verify"));
    }

    #[test]
    fn json_embeds_config_and_version() {
        let (code, out, _) = call(&["--format", "json", "theta", "--expr", "ex3", "--sigma", "0000"]);
        assert_eq!(code, EXIT_OK);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["version"], VERSION);
        assert_eq!(v["command"], "theta");
        assert_eq!(v["config"]["format"], "json");
        assert_eq!(v["result"]["theta"], 2);
    }

    #[test]
    fn homog_text_matches_known_verdicts() {
        let (code, out, _) = call(&["homog", "--expr", "sft{00,01,11}", "--depth", "12"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("ss=false"), "{out}");
        assert!(out.contains("nhom(2)=true"), "{out}");
        assert!(out.contains("ahom constant = 6 at depth 12"), "{out}");
    }

    #[test]
    fn reports_are_deterministic() {
        let args = ["--format", "json", "--samples", "5000", "--threads", "3", "sample", "--expr", "ex3", "--depth", "5"];
        let a = call(&args);
        let b = call(&["--threads", "1", "--format", "json", "--samples", "5000", "sample", "--expr", "ex3", "--depth", "5"]);
        assert_eq!(a.0, EXIT_OK);
        let strip = |s: &str| {
            let mut v: Value = serde_json::from_str(s).unwrap();
            v["config"]["threads"] = Value::Null;
            v
        };
        assert_eq!(strip(&a.1), strip(&b.1));
        assert_eq!(a.1, call(&args).1);
    }
}
