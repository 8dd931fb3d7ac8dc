//! Command-line front end for `fm_elliptic`.
//!
//! Every subcommand only parses input, calls into the core crate and
//! serializes the result. Exit codes: `0` on success, `1` when a
//! configuration fails validation or a computation is refused (a JSON error
//! object goes to standard error), `2` on usage errors.
//!
//! JSON output is an object with sorted keys and a `"schema": 1` field.
//! Rationals are written as `"num/den"` strings.
//!
//! TSV columns, one header line then one row per record:
//!
//! | subcommand         | columns                                                                |
//! |--------------------|------------------------------------------------------------------------|
//! | `fmcount`, `sweep` | `m phi i_prime_size fm_exact lower_bound_num lower_bound_den reps`     |
//! | `orbit`            | `step m coords`                                                        |
//! | `iprime`           | `m size members`                                                       |
//! | `partners`         | `rep size members`                                                     |
//! | `stabilizer`       | `a b c d`                                                              |
//!
//! List-valued cells are comma-separated; a missing exact count is `-`.
//! `validate`, `threefold` and `family` are JSON only.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use fm_elliptic::fm_count::{self, XiFamily};
use fm_elliptic::moebius::{self, stabilizer};
use fm_elliptic::threefold::{self, PartnerRule};
use fm_elliptic::{
    AutAction, Error, ExactScalar, Moebius, SurfaceConfig, TorsionPoint, ValidationReport,
    WcFiberKind,
};
use serde::Serialize;
use serde_json::{json, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Parser, Debug)]
#[command(
    name = "fm-elliptic",
    version,
    about = "Fourier-Mukai partner counts of rational elliptic surfaces"
)]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Tsv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a surface configuration against the structural rules.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Orbit of the marked invariant under the fiberwise automorphisms.
    Orbit(InvariantArgs),
    /// Units k with k·xi in the orbit of xi.
    Iprime(InvariantArgs),
    /// Partner count, bound and class representatives.
    Fmcount {
        #[command(flatten)]
        input: InvariantArgs,
        /// Overrides the configuration's n1 and the stabilizer bound.
        #[arg(long)]
        n1: Option<u64>,
    },
    /// Cosets of I' in the unit group.
    Partners(InvariantArgs),
    /// Partner counts over a range of multiplicities.
    Sweep {
        #[arg(long)]
        kind: WcFiberKind,
        #[arg(long)]
        aut: u32,
        /// Inclusive range `A..B`.
        #[arg(long, value_parser = parse_range)]
        range: RangeInclusive<u64>,
        #[arg(long, default_value_t = 1)]
        n1: u64,
        /// Fixed residues reduced at every level; default all ones.
        #[arg(long, value_parser = parse_coords, allow_hyphen_values = true)]
        xi: Option<Coords>,
    },
    /// Automorphisms of the base fixing s and the labeled discriminant.
    Stabilizer {
        #[arg(long)]
        config: PathBuf,
        /// Ignore fiber types when matching discriminant points.
        #[arg(long)]
        unlabeled: bool,
    },
    /// Invariants of the fiber product of two surfaces.
    Threefold { first: PathBuf, second: PathBuf },
    /// A family of fiber products built from distinct partners of one surface.
    Family {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        companion: PathBuf,
        #[arg(long)]
        n: usize,
        /// Explicit partner residues; default the smallest classes.
        #[arg(long, value_delimiter = ',')]
        reps: Option<Vec<u64>>,
        #[arg(long)]
        n1: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct InvariantArgs {
    /// Surface configuration (JSON); replaces the explicit flags.
    #[arg(long, conflicts_with_all = ["kind", "aut", "m", "xi"])]
    config: Option<PathBuf>,
    /// `smooth` or `In`.
    #[arg(long, required_unless_present = "config")]
    kind: Option<WcFiberKind>,
    #[arg(long, required_unless_present = "config")]
    aut: Option<u32>,
    #[arg(long, required_unless_present = "config")]
    m: Option<u64>,
    /// Residues mod m, comma-separated.
    #[arg(long, value_parser = parse_coords, allow_hyphen_values = true, required_unless_present = "config")]
    xi: Option<Coords>,
}

#[derive(Clone, Debug)]
struct Coords(Vec<i64>);

fn parse_coords(s: &str) -> Result<Coords, String> {
    s.split(',')
        .map(|c| c.trim().parse::<i64>().map_err(|e| format!("{c:?}: {e}")))
        .collect::<Result<_, _>>()
        .map(Coords)
}

fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let (a, b) = s
        .split_once("..")
        .ok_or_else(|| format!("expected A..B, got {s:?}"))?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let a: u64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a == 0 || a > b {
        return Err(format!("range {s:?} must satisfy 1 <= A <= B"));
    }
    Ok(a..=b)
}

/// Why a command did not produce a report.
enum Failure {
    Core(Error),
    Io { path: PathBuf, message: String },
    Invalid(ValidationReport),
    Usage(clap::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<String, Failure>;

/// Runs one invocation; returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => return report_clap(e, out, err),
    };
    match dispatch(&cli) {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            0
        }
        Err(Failure::Usage(e)) => report_clap(e, out, err),
        Err(f) => {
            let _ = writeln!(err, "{}", failure_json(&f));
            1
        }
    }
}

fn report_clap(e: clap::Error, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = e.render().to_string();
    let _ = if e.use_stderr() {
        err.write_all(text.as_bytes())
    } else {
        out.write_all(text.as_bytes())
    };
    e.exit_code()
}

fn failure_json(f: &Failure) -> String {
    let body = match f {
        Failure::Core(e) => json!({"code": e.code(), "message": e.to_string()}),
        Failure::Io { path, message } => json!({
            "code": "io",
            "message": format!("{}: {message}", path.display()),
        }),
        Failure::Invalid(report) => json!({
            "code": "validation_failed",
            "message": report
                .failures()
                .map(|c| format!("{}: {}", c.rule, c.detail))
                .collect::<Vec<_>>()
                .join("; "),
            "report": report,
        }),
        Failure::Usage(e) => json!({"code": "usage", "message": e.to_string()}),
    };
    json!({"schema": SCHEMA_VERSION, "error": body}).to_string()
}

fn usage(kind: ErrorKind, msg: impl std::fmt::Display) -> Failure {
    Failure::Usage(Cli::command().error(kind, msg))
}

fn json_only(format: Format, command: &str) -> Result<(), Failure> {
    match format {
        Format::Json => Ok(()),
        Format::Tsv => Err(usage(
            ErrorKind::ArgumentConflict,
            format!("`{command}` has no TSV form; use --format json"),
        )),
    }
}

/// Serializes `body` (an object) with the schema tag and sorted keys.
fn emit(body: impl Serialize) -> Outcome {
    let mut value = serde_json::to_value(body).expect("reports serialize");
    if let Value::Object(map) = &mut value {
        map.insert("schema".into(), json!(SCHEMA_VERSION));
    }
    let mut text = serde_json::to_string_pretty(&value).expect("values serialize");
    text.push('\n');
    Ok(text)
}

fn tsv(header: &str, rows: impl IntoIterator<Item = String>) -> Outcome {
    let mut text = format!("{header}\n");
    for row in rows {
        let _ = writeln!(text, "{row}");
    }
    Ok(text)
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn load(path: &Path) -> Result<SurfaceConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(SurfaceConfig::from_json(&text)?)
}

fn load_valid(path: &Path) -> Result<SurfaceConfig, Failure> {
    let cfg = load(path)?;
    let report = cfg.validate();
    if !report.valid {
        return Err(Failure::Invalid(report));
    }
    Ok(cfg)
}

/// The action and marked invariant, from a configuration or explicit flags.
fn resolve(input: &InvariantArgs) -> Result<(AutAction, TorsionPoint), Failure> {
    if let Some(path) = &input.config {
        return Ok(load_valid(path)?.marked_invariant()?);
    }
    // clap enforces presence when --config is absent.
    let (Some(kind), Some(aut), Some(m), Some(xi)) = (input.kind, input.aut, input.m, &input.xi)
    else {
        return Err(usage(
            ErrorKind::MissingRequiredArgument,
            "need --config or --kind, --aut, --m, --xi",
        ));
    };
    Ok((AutAction::new(aut, kind)?, TorsionPoint::new(m, &xi.0)?))
}

fn rational<S: ExactScalar>(x: &S) -> String {
    let (n, d) = x.num_den();
    format!("{n}/{d}")
}

fn moebius_row(f: &Moebius) -> [String; 4] {
    f.coefficients().map(rational)
}

fn dispatch(cli: &Cli) -> Outcome {
    let format = cli.format;
    match &cli.command {
        Command::Validate { config } => {
            json_only(format, "validate")?;
            let report = load(config)?.validate();
            if !report.valid {
                return Err(Failure::Invalid(report));
            }
            emit(&report)
        }
        Command::Orbit(input) => {
            let (act, xi) = resolve(input)?;
            let orbit = act.orbit(&xi)?;
            match format {
                Format::Json => emit(json!({"action": act, "xi": xi, "orbit": orbit})),
                Format::Tsv => tsv(
                    "step\tm\tcoords",
                    orbit
                        .iter()
                        .enumerate()
                        .map(|(i, p)| format!("{i}\t{}\t{}", p.modulus(), join(p.coords()))),
                ),
            }
        }
        Command::Iprime(input) => {
            let (act, xi) = resolve(input)?;
            let ip = fm_count::i_prime(&act, &xi)?;
            match format {
                Format::Json => emit(json!({
                    "action": act,
                    "xi": xi,
                    "m": ip.modulus(),
                    "size": ip.len(),
                    "i_prime": ip.members(),
                })),
                Format::Tsv => tsv(
                    "m\tsize\tmembers",
                    [format!(
                        "{}\t{}\t{}",
                        ip.modulus(),
                        ip.len(),
                        join(ip.members())
                    )],
                ),
            }
        }
        Command::Fmcount { input, n1 } => {
            let report = match &input.config {
                Some(path) => {
                    let mut cfg = load_valid(path)?;
                    if n1.is_some() {
                        cfg.n1 = *n1;
                    }
                    cfg.fm_report()?
                }
                None => {
                    let (act, xi) = resolve(input)?;
                    fm_count::fm_number(&act, &xi, n1.unwrap_or(1))?
                }
            };
            match format {
                Format::Json => emit(&report),
                Format::Tsv => tsv(fm_elliptic::FmReport::TSV_HEADER, [report.tsv_row()]),
            }
        }
        Command::Partners(input) => {
            let (act, xi) = resolve(input)?;
            let classes = fm_count::partner_classes(&act, &xi)?;
            match format {
                Format::Json => emit(json!({
                    "action": act,
                    "xi": xi,
                    "m": xi.modulus(),
                    "classes": classes
                        .iter()
                        .map(|c| json!({"rep": c.members()[0], "members": c.members()}))
                        .collect::<Vec<_>>(),
                })),
                Format::Tsv => tsv(
                    "rep\tsize\tmembers",
                    classes
                        .iter()
                        .map(|c| format!("{}\t{}\t{}", c.members()[0], c.len(), join(c.members()))),
                ),
            }
        }
        Command::Sweep {
            kind,
            aut,
            range,
            n1,
            xi,
        } => {
            let act = AutAction::new(*aut, *kind)?;
            let family = match xi {
                Some(c) => XiFamily::Coords(c.0.clone()),
                None => XiFamily::Default,
            };
            let table = fm_count::sweep(&act, &family, range.clone(), *n1);
            match format {
                Format::Json => emit(json!({
                    "action": act,
                    "range": [range.start(), range.end()],
                    "n1": n1,
                    "rows": table.rows,
                    "skipped": table.skipped,
                })),
                Format::Tsv => Ok(table.to_tsv()),
            }
        }
        Command::Stabilizer { config, unlabeled } => {
            let cfg = load_valid(config)?;
            let s = cfg
                .marked
                .as_ref()
                .map(|mk| mk.s.clone())
                .ok_or_else(|| Error::InvalidConfig("no marked point".into()))?;
            let labeled: Vec<_> = cfg
                .discriminant()
                .into_iter()
                .filter(|(p, _)| *p != s)
                .map(|(p, f)| {
                    (
                        p,
                        if *unlabeled {
                            String::new()
                        } else {
                            f.to_string()
                        },
                    )
                })
                .collect();
            let group = stabilizer(&s, &labeled)?;
            let rows: Vec<[String; 4]> = group.iter().map(moebius_row).collect();
            match format {
                Format::Json => emit(json!({
                    "s": s,
                    "labeled": !unlabeled,
                    "order": rows.len(),
                    "maps": rows,
                    "n1_bound": moebius::n1_upper_bound(&cfg),
                })),
                Format::Tsv => tsv("a\tb\tc\td", rows.iter().map(|r| r.join("\t"))),
            }
        }
        Command::Threefold { first, second } => {
            json_only(format, "threefold")?;
            let (a, b) = (load_valid(first)?, load_valid(second)?);
            emit(threefold::fiber_product_invariants(&a, &b)?)
        }
        Command::Family {
            config,
            companion,
            n,
            reps,
            n1,
        } => {
            json_only(format, "family")?;
            let mut base = load_valid(config)?;
            if n1.is_some() {
                base.n1 = *n1;
            }
            let companion = load_valid(companion)?;
            let rule = match reps {
                Some(r) => PartnerRule::Explicit(r.clone()),
                None => PartnerRule::Smallest,
            };
            emit(threefold::schoen_family(&base, &rule, &companion, *n)?)
        }
    }
}
