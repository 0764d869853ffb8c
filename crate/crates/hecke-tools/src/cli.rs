//! Argument parsing, config loading, dispatch and report output.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::commands::{self, Outcome};
use crate::config::{FingrpCfg, FingrpContext, RunConfig, SCHEMA};
use crate::error::CliError;
use crate::presets;

#[derive(Parser, Debug)]
#[command(name = "hecke", version, about = "Hecke algebras of types: arrangements, reflection groups, finite models and verification")]
pub struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Embedded configuration; see `hecke presets`.
    #[arg(long, global = true, value_name = "NAME")]
    pub preset: Option<String>,
    /// Report destination (default: stdout).
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Worker threads for suites that can split their work.
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    /// Largest braid order searched before declaring it infinite.
    #[arg(long, global = true, default_value_t = 24)]
    pub cutoff: u32,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Hyperplane arrangements.
    #[command(subcommand)]
    Arr(ArrCmd),
    /// Depth-zero arrangements from root data.
    #[command(subcommand)]
    Roots(RootsCmd),
    /// The reflection group of the base chamber.
    #[command(subcommand)]
    Weyl(WeylCmd),
    /// The abstract algebra C[Omega, mu] x H(W_aff, q).
    #[command(subcommand)]
    Hecke(HeckeCmd),
    /// Finite-group convolution algebras.
    #[command(subcommand)]
    Fingrp(FingrpCmd),
    /// Finite cover models.
    #[command(subcommand)]
    Cover(CoverCmd),
    /// The acceptance suite.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Lists the embedded presets.
    Presets,
}

#[derive(Subcommand, Debug)]
pub enum ArrCmd {
    /// Families, chamber walls and the inner product.
    Info,
    /// Number of hyperplanes separating two points.
    Distance {
        /// First point, comma separated (default: the basepoint).
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        y: String,
        /// Count only relevant families.
        #[arg(long)]
        relevant: bool,
    },
    /// Whether a point lies on no hyperplane.
    Generic {
        #[arg(long)]
        x: Option<String>,
    },
}

#[derive(Subcommand, Debug)]
pub enum RootsCmd {
    /// The depth-zero arrangement on the Levi fixed space.
    Build,
    /// The quotient by the span of the non-relevant directions.
    Quotient,
}

#[derive(Args, Debug)]
pub struct IsoArgs {
    /// `{"A": [[…]], "b": […]}`.
    #[arg(long)]
    iso: Option<String>,
    /// Translation vector, comma separated.
    #[arg(long)]
    translation: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum WeylCmd {
    /// Walls, Coxeter matrix and conjugacy classes of simple reflections.
    Walls,
    /// A reduced word.
    Word(IsoArgs),
    /// `g = t v` with `t` in Omega.
    Decompose(IsoArgs),
    /// Braid orders.
    Orders,
}

#[derive(Subcommand, Debug)]
pub enum HeckeCmd {
    /// Product of two elements given as term lists.
    Mul {
        #[arg(long)]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
    },
    /// Associativity on basis triples, quadratic and braid relations.
    Assoc {
        #[arg(long)]
        maxlen: Option<usize>,
        #[arg(long)]
        braid_len: Option<usize>,
    },
    /// Support-preserving automorphisms.
    Autos {
        #[arg(long)]
        star_preserving: bool,
        #[arg(long, default_value_t = 2)]
        check_len: usize,
    },
    /// The anti-involution on random pairs.
    Star {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        a: Option<String>,
    },
}

#[derive(Args, Debug, Default)]
pub struct FingrpArgs {
    /// `s4`, `gl2:3`, `d4`, … or a JSON group description.
    #[arg(long)]
    group: Option<String>,
    /// `borel`, `s3`, `torus`, … or `{"generators": […]}`.
    #[arg(long)]
    sub: Option<String>,
    /// `trivial` or `{"dim": n, "generators": […]}`.
    #[arg(long)]
    rep: Option<String>,
    /// Double coset representative, as an index or a key.
    #[arg(long)]
    h: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum FingrpCmd {
    Cosets(FingrpArgs),
    Induce(FingrpArgs),
    /// The dimension ratio of the two summands of the induced representation.
    Q(FingrpArgs),
    /// The normalized generator and its quadratic relation.
    Generator(FingrpArgs),
}

#[derive(Subcommand, Debug)]
pub enum CoverCmd {
    /// Axioms of the point family and the support bijection.
    Validate,
    /// Operator identities.
    Relations {
        /// Run on the normalized family of T.
        #[arg(long)]
        normalized: bool,
    },
    /// Structure of the algebra with normalization data.
    Report,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCmd {
    All,
}

fn load_config(cli: &Cli) -> Result<Option<RunConfig>, CliError> {
    match (&cli.config, &cli.preset) {
        (Some(_), Some(_)) => Err(CliError::config("--config and --preset are mutually exclusive")),
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
            RunConfig::parse(&text).map(Some)
        }
        (None, Some(name)) => presets::load(name).map(Some),
        (None, None) => Ok(None),
    }
}

fn require(cfg: Option<&RunConfig>) -> Result<&RunConfig, CliError> {
    cfg.ok_or_else(|| CliError::config("this command needs --config or --preset"))
}

/// Reads a flag as JSON, or as a bare string when it is not JSON.
fn flag<T: DeserializeOwned>(name: &str, text: &str) -> Result<T, CliError> {
    let value: Value = serde_json::from_str(text).unwrap_or_else(|_| Value::String(text.to_string()));
    serde_json::from_value(value).map_err(|e| CliError::config(format!("--{name}: {e}")))
}

fn fingrp_context(cfg: Option<&RunConfig>, args: &FingrpArgs) -> Result<FingrpContext, CliError> {
    let base = cfg.and_then(|c| c.fingrp.clone());
    let group = match (&args.group, &base) {
        (Some(g), _) => flag("group", g)?,
        (None, Some(b)) => b.group.clone(),
        (None, None) => return Err(CliError::config("no group: pass --group or a config with a \"fingrp\" section")),
    };
    let sub = match (&args.sub, &base) {
        (Some(s), _) => flag("sub", s)?,
        (None, Some(b)) => b.sub.clone(),
        (None, None) => return Err(CliError::config("no subgroup: pass --sub")),
    };
    let rep = match (&args.rep, &base) {
        (Some(r), _) => flag("rep", r)?,
        (None, Some(b)) => b.rep.clone(),
        (None, None) => flag("rep", "trivial")?,
    };
    let h = match (&args.h, &base) {
        (Some(h), _) => Some(flag("h", h)?),
        (None, Some(b)) => b.h.clone(),
        (None, None) => None,
    };
    let field = match cfg {
        Some(c) => c.field()?,
        None => hecke_core::scalars::Field::rationals(),
    };
    FingrpContext::build(&FingrpCfg { group, sub, rep, h }, &field)
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Arr(ArrCmd::Info) => "arr info",
        Command::Arr(ArrCmd::Distance { .. }) => "arr distance",
        Command::Arr(ArrCmd::Generic { .. }) => "arr generic",
        Command::Roots(RootsCmd::Build) => "roots build",
        Command::Roots(RootsCmd::Quotient) => "roots quotient",
        Command::Weyl(WeylCmd::Walls) => "weyl walls",
        Command::Weyl(WeylCmd::Word(_)) => "weyl word",
        Command::Weyl(WeylCmd::Decompose(_)) => "weyl decompose",
        Command::Weyl(WeylCmd::Orders) => "weyl orders",
        Command::Hecke(HeckeCmd::Mul { .. }) => "hecke mul",
        Command::Hecke(HeckeCmd::Assoc { .. }) => "hecke assoc",
        Command::Hecke(HeckeCmd::Autos { .. }) => "hecke autos",
        Command::Hecke(HeckeCmd::Star { .. }) => "hecke star",
        Command::Fingrp(FingrpCmd::Cosets(_)) => "fingrp cosets",
        Command::Fingrp(FingrpCmd::Induce(_)) => "fingrp induce",
        Command::Fingrp(FingrpCmd::Q(_)) => "fingrp q",
        Command::Fingrp(FingrpCmd::Generator(_)) => "fingrp generator",
        Command::Cover(CoverCmd::Validate) => "cover validate",
        Command::Cover(CoverCmd::Relations { .. }) => "cover relations",
        Command::Cover(CoverCmd::Report) => "cover report",
        Command::Verify(VerifyCmd::All) => "verify all",
        Command::Presets => "presets",
    }
}

/// Runs one parsed command and returns its outcome.
pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = load_config(cli)?;
    let c = cfg.as_ref();
    let cutoff = cli.cutoff;
    match &cli.command {
        Command::Arr(ArrCmd::Info) => commands::arr_info(require(c)?),
        Command::Arr(ArrCmd::Distance { x, y, relevant }) => commands::arr_distance(require(c)?, x.as_deref(), y, *relevant),
        Command::Arr(ArrCmd::Generic { x }) => commands::arr_generic(require(c)?, x.as_deref()),
        Command::Roots(RootsCmd::Build) => commands::roots_build(require(c)?),
        Command::Roots(RootsCmd::Quotient) => commands::roots_quotient(require(c)?),
        Command::Weyl(WeylCmd::Walls) => commands::weyl_walls(require(c)?, cutoff),
        Command::Weyl(WeylCmd::Word(a)) => {
            let g = commands::parse_iso(a.iso.as_deref(), a.translation.as_deref())?;
            commands::weyl_word(require(c)?, &g)
        }
        Command::Weyl(WeylCmd::Decompose(a)) => {
            let g = commands::parse_iso(a.iso.as_deref(), a.translation.as_deref())?;
            commands::weyl_decompose(require(c)?, &g)
        }
        Command::Weyl(WeylCmd::Orders) => commands::weyl_orders(require(c)?, cutoff),
        Command::Hecke(HeckeCmd::Mul { a, b }) => commands::hecke_mul(require(c)?, cutoff, a.as_deref(), b.as_deref()),
        Command::Hecke(HeckeCmd::Assoc { maxlen, braid_len }) => commands::hecke_assoc(require(c)?, cutoff, *maxlen, *braid_len),
        Command::Hecke(HeckeCmd::Autos { star_preserving, check_len }) => {
            commands::hecke_autos(require(c)?, cutoff, *star_preserving, *check_len)
        }
        Command::Hecke(HeckeCmd::Star { samples, seed, a }) => commands::hecke_star(require(c)?, cutoff, *samples, *seed, a.as_deref()),
        Command::Fingrp(FingrpCmd::Cosets(a)) => commands::fingrp_cosets(&fingrp_context(c, a)?),
        Command::Fingrp(FingrpCmd::Induce(a)) => commands::fingrp_induce(&fingrp_context(c, a)?),
        Command::Fingrp(FingrpCmd::Q(a)) => commands::fingrp_q(&fingrp_context(c, a)?),
        Command::Fingrp(FingrpCmd::Generator(a)) => commands::fingrp_generator(&fingrp_context(c, a)?),
        Command::Cover(CoverCmd::Validate) => commands::cover_validate(require(c)?),
        Command::Cover(CoverCmd::Relations { normalized }) => commands::cover_relations(require(c)?, *normalized),
        Command::Cover(CoverCmd::Report) => commands::cover_report(require(c)?),
        Command::Verify(VerifyCmd::All) => Ok(commands::verify_all(cli.threads)),
        Command::Presets => Ok(Outcome { pass: true, body: [("presets".to_string(), json!(presets::names().collect::<Vec<_>>()))].into_iter().collect() }),
    }
}

/// The full report: the outcome body plus `schema`, `command` and `pass`.
pub fn render(command: &str, outcome: &Outcome) -> String {
    let mut body = outcome.body.clone();
    body.insert("schema".into(), json!(SCHEMA));
    body.insert("command".into(), json!(command));
    body.insert("pass".into(), json!(outcome.pass));
    let mut text = serde_json::to_string_pretty(&Value::Object(body)).expect("JSON values serialize");
    text.push('\n');
    text
}

fn write_report(out: Option<&PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::config(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| CliError::config(format!("stdout: {e}")))
        }
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let name = command_name(&cli.command);
    let result = execute(&cli).and_then(|outcome| {
        write_report(cli.out.as_ref(), &render(name, &outcome))?;
        Ok(outcome.pass)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("{name}: some checks failed");
            1
        }
        Err(e) => {
            eprintln!("{name}: {e}");
            e.exit_code()
        }
    }
}
