//! Command-line front end. [`run`] takes explicit writers so that every
//! subcommand can be exercised in-process.
//!
//! Exit codes: 0 on success, 1 when a check or lemma fails, 2 on parse and
//! usage errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::{self, IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::flow::{self, FlowDirection};
use crate::format::{parse_bytes, parse_expr, parse_expr_list, FormatError};
use crate::knowledge::{check_eout_know_correct, eout_knows_e_correct_with, KnowledgeBase, Mode};
use crate::lemmas::{fuzz, FuzzOptions, GenParams, LemmaSuite, SuiteBounds};
use crate::local_secrets::compute_local_secrets;
use crate::model::{Architecture, ChannelId, ComponentId, ExprItem, ExprSeq};
use crate::structural::{structural_report, LeafPolicy};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "compsec",
    version,
    about = "Compositional secrecy analysis for component architectures"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Strict,
    Saturate,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Strict => Mode::Strict,
            ModeArg::Saturate => Mode::Saturating,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DirArg {
    In,
    Out,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the interface and composition predicates of every component.
    Validate {
        file: PathBuf,
        /// Evaluate channel equations literally for elementary components.
        #[arg(long)]
        strict_leaves: bool,
    },
    /// List a component's local secrets with their provenance.
    LocalSecrets {
        file: PathBuf,
        #[arg(short, long)]
        component: String,
    },
    /// Ask whether a component may receive or emit an item.
    Flow {
        file: PathBuf,
        #[arg(short, long)]
        component: String,
        #[arg(long, value_enum)]
        dir: DirArg,
        /// Expression item, e.g. "secret(N)".
        #[arg(short, long)]
        expr: String,
        /// Restrict to these channels.
        #[arg(long, value_delimiter = ',')]
        channels: Option<Vec<String>>,
    },
    /// Decide whether a component can derive an expression list.
    Knows {
        #[command(flatten)]
        query: KnowsQuery,
        /// Print the derivation.
        #[arg(long)]
        explain: bool,
    },
    /// Print the derivation of an expression list, or why it fails.
    Explain {
        #[command(flatten)]
        query: KnowsQuery,
    },
    /// Evaluate the emission consistency predicates over the item universe.
    Consistency {
        file: PathBuf,
        #[arg(short, long)]
        component: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
        mode: ModeArg,
    },
    /// Run the lemma suite on one architecture.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
    /// Run the lemma suite on generated architectures.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Break one composition equation in every architecture.
        #[arg(long)]
        perturb: bool,
        #[arg(long, default_value_t = GenParams::default().max_components)]
        max_components: usize,
        #[arg(long, default_value_t = GenParams::default().max_channels)]
        max_channels: usize,
        #[arg(long, default_value_t = GenParams::default().max_keys)]
        max_keys: usize,
        #[arg(long, default_value_t = GenParams::default().max_secrets)]
        max_secrets: usize,
        #[arg(long, default_value_t = GenParams::default().max_expr_items)]
        max_expr_items: usize,
        #[arg(long, default_value_t = GenParams::default().max_block_depth)]
        max_block_depth: usize,
        #[command(flatten)]
        bounds: BoundsArgs,
    },
}

#[derive(Args, Debug)]
pub struct KnowsQuery {
    file: PathBuf,
    #[arg(short, long)]
    component: String,
    /// Expression list, e.g. "[secret(NA), key(K)]".
    #[arg(short, long)]
    expr: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Strict)]
    mode: ModeArg,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    /// Seed for sampled channel sets and sequences.
    #[arg(long, default_value_t = SuiteBounds::default().seed)]
    suite_seed: u64,
    #[arg(long, default_value_t = SuiteBounds::default().sampled_sets)]
    sampled_sets: usize,
    #[arg(long, default_value_t = SuiteBounds::default().sequences)]
    sequences: usize,
    #[arg(long, default_value_t = SuiteBounds::default().max_sequence_len)]
    max_sequence_len: usize,
}

impl From<&BoundsArgs> for SuiteBounds {
    fn from(b: &BoundsArgs) -> Self {
        SuiteBounds {
            seed: b.suite_seed,
            sampled_sets: b.sampled_sets,
            sequences: b.sequences,
            max_sequence_len: b.max_sequence_len,
        }
    }
}

/// A failure that ends the command with a usage exit code.
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

struct Output<'a> {
    out: &'a mut dyn Write,
    format: Format,
    color: bool,
}

impl Output<'_> {
    fn json(&mut self, value: &Value) -> io::Result<()> {
        writeln!(
            self.out,
            "{}",
            serde_json::to_string_pretty(value).expect("json values serialize")
        )
    }

    fn text(&mut self, text: &str) -> io::Result<()> {
        writeln!(self.out, "{text}")
    }

    /// A verdict word, green or red when styling is on.
    fn verdict(&self, word: &str, good: bool) -> String {
        if self.color {
            let code = if good { 32 } else { 31 };
            format!("\x1b[{code}m{word}\x1b[0m")
        } else {
            word.to_owned()
        }
    }
}

/// Entry point used by the binary: real stdio, styling unless `NO_COLOR`
/// is set or stdout is not a terminal.
pub fn main(args: impl IntoIterator<Item = OsString>) -> i32 {
    let color = std::env::var_os("NO_COLOR").is_none() && io::stdout().is_terminal();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_styled(args, &mut stdout.lock(), &mut stderr.lock(), color)
}

/// Parses `args` (including the program name) and runs the command without
/// styling.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_styled(args, out, err, false)
}

fn run_styled<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = if color {
                e.render().ansi().to_string()
            } else {
                e.render().to_string()
            };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{text}");
            return code;
        }
    };
    let mut output = Output {
        out,
        format: cli.format,
        color,
    };
    match execute(&cli.command, &mut output) {
        Ok(code) => code,
        Err(UsageError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
    }
}

fn load(path: &Path) -> Result<Architecture, UsageError> {
    let bytes = std::fs::read(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    parse_bytes(&bytes).map_err(|e: FormatError| {
        let sep = if matches!(e, FormatError::Validation(_)) {
            ": "
        } else {
            ":"
        };
        UsageError(format!("{}{sep}{e}", path.display()))
    })
}

fn component(arch: &Architecture, name: &str) -> Result<ComponentId, UsageError> {
    let id = ComponentId::new(name);
    arch.component(&id)?;
    Ok(id)
}

fn expr_item(arch: &Architecture, text: &str) -> Result<ExprItem, UsageError> {
    let item = parse_expr(text).map_err(|e| UsageError(format!("expression {e}")))?;
    arch.require_names(&item)?;
    Ok(item)
}

fn expr_list(arch: &Architecture, text: &str) -> Result<ExprSeq, UsageError> {
    let seq = parse_expr_list(text).map_err(|e| UsageError(format!("expression {e}")))?;
    seq.iter().try_for_each(|i| arch.require_names(i))?;
    Ok(seq)
}

fn strings<T: ToString>(xs: impl IntoIterator<Item = T>) -> Vec<String> {
    xs.into_iter().map(|x| x.to_string()).collect()
}

fn execute(command: &Command, o: &mut Output<'_>) -> Result<i32, UsageError> {
    match command {
        Command::Validate {
            file,
            strict_leaves,
        } => {
            let arch = load(file)?;
            let policy = if *strict_leaves {
                LeafPolicy::Strict
            } else {
                LeafPolicy::Lenient
            };
            let report = structural_report(&arch, policy);
            match o.format {
                Format::Json => {
                    let mut v = serde_json::to_value(&report)?;
                    v["passed"] = json!(report.passed());
                    o.json(&v)?;
                }
                Format::Text => {
                    let text = report.to_string();
                    let (body, _) = text.rsplit_once("result: ").unwrap_or((&text, ""));
                    let word = if report.passed() { "ok" } else { "FAILED" };
                    write!(o.out, "{body}")?;
                    o.text(&format!("result: {}", o.verdict(word, report.passed())))?;
                }
            }
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAILURE
            })
        }
        Command::LocalSecrets {
            file,
            component: name,
        } => {
            let arch = load(file)?;
            let c = component(&arch, name)?;
            let set = compute_local_secrets(&arch, &c)?;
            match o.format {
                Format::Json => {
                    let atoms: Vec<Value> = set
                        .atoms
                        .iter()
                        .map(|(a, p)| json!({ "atom": a.to_string(), "provenance": strings(p) }))
                        .collect();
                    o.json(&json!({ "component": c.to_string(), "atoms": atoms }))?;
                }
                Format::Text => o.text(&set.to_string())?,
            }
            Ok(EXIT_OK)
        }
        Command::Flow {
            file,
            component: name,
            dir,
            expr,
            channels,
        } => {
            let arch = load(file)?;
            let c = component(&arch, name)?;
            let item = expr_item(&arch, expr)?;
            let dir = match dir {
                DirArg::In => FlowDirection::In,
                DirArg::Out => FlowDirection::Out,
            };
            let restrict: Option<BTreeSet<ChannelId>> = channels
                .as_ref()
                .map(|chs| chs.iter().map(|s| ChannelId::new(s.trim())).collect());
            let result = flow::query_flow(&arch, &c, dir, &item, restrict.as_ref())?;
            let carrying: Vec<String> = flow::carrying_channels(&arch, &c, dir, &item)?
                .into_iter()
                .filter(|ch| restrict.as_ref().is_none_or(|m| m.contains(ch)))
                .map(|ch| ch.to_string())
                .collect();
            match o.format {
                Format::Json => o.json(&json!({
                    "component": c.to_string(),
                    "direction": dir.to_string(),
                    "expression": item.to_string(),
                    "channels": restrict.as_ref().map(strings),
                    "result": result,
                    "carrying_channels": carrying,
                }))?,
                Format::Text => o.text(&o.verdict(if result { "yes" } else { "no" }, result))?,
            }
            Ok(EXIT_OK)
        }
        Command::Knows { query, explain } => knows(query, *explain, o),
        Command::Explain { query } => knows(query, true, o),
        Command::Consistency {
            file,
            component: name,
            mode,
        } => {
            let arch = load(file)?;
            let c = component(&arch, name)?;
            let kb = KnowledgeBase::build(&arch, &c, (*mode).into())?;
            let atoms: Vec<(String, bool)> = arch
                .atoms()
                .map(|a| Ok((a.to_string(), check_eout_know_correct(&arch, &c, &a)?)))
                .collect::<crate::Result<_>>()?;
            let mut universe: BTreeSet<ExprItem> =
                arch.expr_channel().iter().map(|(_, i)| i.clone()).collect();
            universe.extend(arch.atoms().map(|a| a.to_item()));
            let items: Vec<(String, bool)> = universe
                .iter()
                .map(|i| Ok((i.to_string(), eout_knows_e_correct_with(&arch, &kb, i)?)))
                .collect::<crate::Result<_>>()?;
            let passed = atoms.iter().chain(&items).all(|(_, ok)| *ok);
            match o.format {
                Format::Json => {
                    let row =
                        |key: &str, (name, ok): &(String, bool)| json!({ key: name, "holds": ok });
                    o.json(&json!({
                        "component": c.to_string(),
                        "mode": kb.mode.to_string(),
                        "eout_know_correct": atoms.iter().map(|r| row("atom", r)).collect::<Vec<_>>(),
                        "eout_knows_e_correct": items.iter().map(|r| row("item", r)).collect::<Vec<_>>(),
                        "passed": passed,
                    }))?;
                }
                Format::Text => {
                    o.text(&format!("emission consistency of {c} ({} mode)", kb.mode))?;
                    for (label, rows) in
                        [("eoutKnowCorrect", &atoms), ("eoutKnowsECorrect", &items)]
                    {
                        for (name, ok) in rows {
                            let word = o.verdict(if *ok { "ok" } else { "FAILED" }, *ok);
                            o.text(&format!("  {label:<18} {name:<40} {word}"))?;
                        }
                    }
                    o.text(&format!(
                        "result: {}",
                        o.verdict(if passed { "ok" } else { "FAILED" }, passed)
                    ))?;
                }
            }
            Ok(if passed { EXIT_OK } else { EXIT_FAILURE })
        }
        Command::Verify { file, bounds } => {
            let arch = load(file)?;
            let report = LemmaSuite::new(bounds.into()).run(&arch);
            match o.format {
                Format::Json => {
                    let mut v = serde_json::to_value(&report)?;
                    v["violations"] = json!(report.violations());
                    v["passed"] = json!(report.passed());
                    o.json(&v)?;
                }
                Format::Text => o.text(&report.to_string())?,
            }
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAILURE
            })
        }
        Command::Fuzz {
            seed,
            count,
            perturb,
            max_components,
            max_channels,
            max_keys,
            max_secrets,
            max_expr_items,
            max_block_depth,
            bounds,
        } => {
            let sizes = [
                *max_components,
                *max_channels,
                *max_keys,
                *max_secrets,
                *max_expr_items,
                *max_block_depth,
            ];
            if sizes.contains(&0) {
                return Err(UsageError("generator bounds must be at least 1".into()));
            }
            if *count == 0 {
                return Err(UsageError("--count must be at least 1".into()));
            }
            let options = FuzzOptions {
                params: GenParams {
                    seed: *seed,
                    max_components: *max_components,
                    max_channels: *max_channels,
                    max_keys: *max_keys,
                    max_secrets: *max_secrets,
                    max_expr_items: *max_expr_items,
                    max_block_depth: *max_block_depth,
                },
                count: *count,
                perturb: *perturb,
                bounds: bounds.into(),
            };
            let report = fuzz(&options);
            match o.format {
                Format::Json => o.text(&report.to_json())?,
                Format::Text => o.text(&report.to_string())?,
            }
            Ok(if report.passed() {
                EXIT_OK
            } else {
                EXIT_FAILURE
            })
        }
    }
}

fn knows(q: &KnowsQuery, explain: bool, o: &mut Output<'_>) -> Result<i32, UsageError> {
    let arch = load(&q.file)?;
    let c = component(&arch, &q.component)?;
    let seq = expr_list(&arch, &q.expr)?;
    let kb = KnowledgeBase::build(&arch, &c, q.mode.into())?;
    let judgment = kb.knows(&seq);
    match o.format {
        Format::Json => {
            let mut v = json!({
                "component": c.to_string(),
                "mode": kb.mode.to_string(),
                "expression": seq.to_string(),
                "derivable": judgment.derivable,
                "missing": judgment.missing.as_ref().map(ToString::to_string),
            });
            if explain {
                v["trace"] = serde_json::to_value(&judgment.trace)?;
                v["explanation"] = json!(kb.explain(&seq, &judgment));
            }
            o.json(&v)?;
        }
        Format::Text => {
            let word = if judgment.derivable {
                "derivable"
            } else {
                "not derivable"
            };
            o.text(&o.verdict(word, judgment.derivable))?;
            if explain {
                write!(o.out, "{}", kb.explain(&seq, &judgment))?;
            }
        }
    }
    Ok(EXIT_OK)
}
