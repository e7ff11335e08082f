//! Command-line front end for `k3moduli`.
//!
//! [`run`] parses arguments and returns the exit code with everything that
//! would be printed, so the binary and the tests share one code path.

mod dto;
mod text;

use clap::{Parser, Subcommand, ValueEnum};
use k3moduli::classgroup::{class_number, ClassGroup};
use k3moduli::k3::{Gram, TranscLattice};
use k3moduli::moduli::{class_polynomial, moduli_report};
use k3moduli::Error;
use serde::Serialize;

use dto::*;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// The published JSON schema for every envelope.
pub const SCHEMA: &str = include_str!("../schema/envelope.schema.json");

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_PRECISION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "k3moduli", version, about = "Fields of moduli of singular K3 surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full field-of-moduli report for a Gram matrix (2a b b 2c).
    Analyze {
        #[arg(num_args = 4, value_names = ["2A", "B", "B", "2C"], allow_negative_numbers = true)]
        gram: Vec<i64>,
        /// Starting precision in decimal digits (default 30 + 10·h).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Class group, 2-torsion and genera of a discriminant.
    Classgroup {
        #[arg(allow_negative_numbers = true)]
        disc: i64,
    },
    /// Galois orbit of a lattice.
    Orbit {
        #[arg(num_args = 4, value_names = ["2A", "B", "B", "2C"], allow_negative_numbers = true)]
        gram: Vec<i64>,
    },
    /// Class polynomial of a discriminant.
    Classpoly {
        #[arg(allow_negative_numbers = true)]
        disc: i64,
        /// Starting precision in decimal digits (default 30 + 10·h).
        #[arg(long)]
        digits: Option<u32>,
    },
    /// Discriminants with bounded |D| and class number.
    Enumerate {
        #[arg(long)]
        max_disc: u64,
        #[arg(long)]
        max_h: Option<usize>,
        /// List only primitive lattices.
        #[arg(long)]
        primitive_only: bool,
    },
}

/// What a single invocation printed and how it exited.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn fail(code: i32, msg: impl std::fmt::Display) -> Self {
        Outcome { code, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::PrecisionExhausted { .. }
        | Error::PrecisionUnsupported { .. }
        | Error::NotNearInteger
        | Error::NotNearFieldElement
        | Error::ResolventDegenerate => EXIT_PRECISION,
        Error::Inconsistent(_) => EXIT_INTERNAL,
        _ => EXIT_INPUT,
    }
}

/// Runs one command; `args` includes the program name.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if code == EXIT_OK {
                Outcome::ok(rendered)
            } else {
                Outcome { code, stdout: String::new(), stderr: rendered }
            };
        }
    };
    match execute(&cli) {
        Ok(out) => Outcome::ok(out),
        Err(fail) => fail,
    }
}

impl From<Error> for Outcome {
    fn from(e: Error) -> Self {
        Outcome::fail(exit_code(&e), e)
    }
}

fn gram(v: &[i64]) -> Gram {
    [[v[0], v[1]], [v[2], v[3]]]
}

fn emit<I: Serialize, R: Serialize>(
    command: &'static str,
    input: I,
    result: R,
    warnings: Vec<String>,
    format: Format,
    text: impl FnOnce(&R, &[String]) -> String,
) -> String {
    match format {
        Format::Text => text(&result, &warnings),
        Format::Json => {
            let env = Envelope { command, version: VERSION, input, result, warnings };
            let mut s = serde_json::to_string_pretty(&env).expect("serializable envelope");
            s.push('\n');
            s
        }
    }
}

fn execute(cli: &Cli) -> Result<String, Outcome> {
    let f = cli.format;
    Ok(match &cli.command {
        Command::Analyze { gram: g, digits } => {
            let g = gram(g);
            let t = TranscLattice::from_gram(g)?;
            let report = moduli_report(&t, *digits)?;
            let warnings = report.warnings.clone();
            emit(
                "analyze",
                GramInput { gram: g, digits: *digits },
                AnalyzeResult::new(&report),
                warnings,
                f,
                text::analyze,
            )
        }
        Command::Classgroup { disc } => {
            let group = ClassGroup::enumerate(*disc)?;
            emit(
                "classgroup",
                ClassGroupInput { disc: *disc },
                ClassGroupResult::new(&group),
                vec![],
                f,
                text::classgroup,
            )
        }
        Command::Orbit { gram: g } => {
            let g = gram(g);
            let t = TranscLattice::from_gram(g)?;
            let orbit = t.galois_orbit()?;
            emit("orbit", OrbitInput { gram: g }, OrbitResult::new(&t, &orbit), vec![], f, text::orbit)
        }
        Command::Classpoly { disc, digits } => {
            let p = class_polynomial(*disc, *digits)?;
            emit(
                "classpoly",
                DiscInput { disc: *disc, digits: *digits },
                ClassPolyResult::new(*disc, &p),
                vec![],
                f,
                text::classpoly,
            )
        }
        Command::Enumerate { max_disc, max_h, primitive_only } => {
            if *max_disc == 0 || *max_h == Some(0) {
                return Err(Outcome::fail(EXIT_INPUT, "--max-disc and --max-h must be positive"));
            }
            let max_disc = i64::try_from(*max_disc).map_err(|_| Error::Overflow("max-disc"))?;
            let strata = enumerate(max_disc, *max_h, *primitive_only)?;
            let input = EnumerateInput { max_disc: max_disc as u64, max_h: *max_h, primitive_only: *primitive_only };
            let result = EnumerateResult { count: strata.len(), strata };
            emit("enumerate", input, result, vec![], f, text::enumerate)
        }
    })
}

/// Discriminants `−max_disc ≤ D < 0` with `h(D) ≤ max_h`, in ascending `|D|`.
fn enumerate(max_disc: i64, max_h: Option<usize>, primitive_only: bool) -> k3moduli::Result<Vec<Stratum>> {
    let mut out = Vec::new();
    for n in 3..=max_disc {
        let d = -n;
        if d.rem_euclid(4) > 1 {
            continue;
        }
        if max_h.is_some_and(|b| class_number(d).map(|h| h > b).unwrap_or(true)) {
            continue;
        }
        let group = ClassGroup::enumerate(d)?;
        let mut imprimitive = Vec::new();
        if !primitive_only {
            let mut m = 2i64;
            while m * m <= n {
                let d0 = d / (m * m);
                if d % (m * m) == 0 && d0.rem_euclid(4) <= 1 {
                    let g0 = ClassGroup::enumerate(d0)?;
                    imprimitive.push(Family { m, disc0: d0, h0: g0.order(), g0: g0.genus_order() });
                }
                m += 1;
            }
        }
        out.push(Stratum {
            disc: d,
            h: group.order(),
            genus_count: group.two_torsion().len(),
            g: group.genus_order(),
            imprimitive,
        });
    }
    Ok(out)
}
