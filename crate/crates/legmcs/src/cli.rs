//! The `legmcs` command line.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use legmcs_core::coeff::Field;
use legmcs_core::enumerate::{enumerate, EnumError, EnumOptions, DEFAULT_BRANCH_CAP, DEFAULT_SEARCH_BOUND};
use legmcs_core::front::{FrontDiagram, FrontError, MoveKind};
use legmcs_core::mc::barannikov;
use legmcs_core::mcs::{common_refinement, normalize_elementary, MCSObject, McsError};
use legmcs_core::sheaf::{end_ring, hom_total, verify_microsupport, SheafError};

use crate::formats::*;

#[derive(Debug, Parser)]
#[command(name = "legmcs", version, about = "Morse complex sequences and sheaves on Legendrian fronts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Prime for the coefficient field.
    #[arg(long, global = true, default_value_t = 2, value_parser = parse_prime)]
    pub prime: u32,
    /// Value of the Maslov potential on the lowest strand of each component.
    #[arg(long, global = true, default_value_t = 1, allow_negative_numbers = true)]
    pub baseline: i32,
    /// Largest cocycle space searched exhaustively for isomorphisms.
    #[arg(long, global = true, default_value_t = DEFAULT_SEARCH_BOUND)]
    pub search_bound: u64,
    /// Largest number of search branches explored by enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_BRANCH_CAP)]
    pub branch_cap: u64,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MoveArg {
    FarCommute,
    Braid,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a front and report its Maslov potential.
    FrontValidate { front: PathBuf },
    /// Thurston-Bennequin and rotation numbers.
    FrontInvariants { front: PathBuf },
    /// Apply a front move at an event (1-based, first event of the pattern).
    FrontMove {
        front: PathBuf,
        #[arg(long = "move", value_enum)]
        kind: MoveArg,
        #[arg(long)]
        at: usize,
    },
    /// Check every event relation of an MCS file.
    McsValidate { mcs: PathBuf },
    /// Rewrite the handle slides of an MCS file as elementary slides.
    McsNormalize { mcs: PathBuf },
    /// Barannikov barcode of every interval.
    McsBarcodes { mcs: PathBuf },
    /// Check the microsupport conditions of the associated sheaf.
    SheafVerify { mcs: PathBuf },
    /// Cohomology of the Hom complex between two sheaves.
    SheafHom { source: PathBuf, target: PathBuf },
    /// Product on degree-0 endomorphism cohomology.
    SheafEndring { mcs: PathBuf },
    /// Count strict objects and isomorphism classes.
    EnumCount { front: PathBuf },
    /// List isomorphism classes with representatives.
    EnumList { front: PathBuf },
}

fn parse_prime(s: &str) -> Result<u32, String> {
    let p: u32 = s.parse().map_err(|e| format!("{e}"))?;
    Field::new(p).map(|_| p).map_err(|_| format!("{p} is not prime"))
}

/// A domain failure reported as JSON with exit code 1.
#[derive(Debug)]
pub struct Failure {
    pub code: &'static str,
    pub message: String,
    pub diagnostics: Vec<DiagnosticFile>,
}

impl Failure {
    fn new(code: &'static str, message: impl ToString) -> Self {
        Failure { code, message: message.to_string(), diagnostics: Vec::new() }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport {
            format_version: FORMAT_VERSION,
            error: ErrorBody { code: self.code.into(), message: self.message.clone(), diagnostics: self.diagnostics.clone() },
        }
    }
}

fn front_code(e: &FrontError) -> &'static str {
    match e {
        FrontError::Syntax { .. } => "FRONT_SYNTAX",
        FrontError::Position { .. } => "FRONT_POSITION",
        FrontError::NotClosed { .. } => "FRONT_NOT_CLOSED",
        FrontError::NoPotential { .. } => "NO_MASLOV_POTENTIAL",
        FrontError::IllegalMove(_) => "ILLEGAL_MOVE",
    }
}

impl From<FrontError> for Failure {
    fn from(e: FrontError) -> Self {
        Failure::new(front_code(&e), e)
    }
}

impl From<McsError> for Failure {
    fn from(e: McsError) -> Self {
        let code = match &e {
            McsError::Front(f) => front_code(f),
            McsError::SearchSpaceTooLarge { .. } => "SEARCH_SPACE_TOO_LARGE",
            McsError::ObstructedAtCrossing { .. } | McsError::ObstructedAtCusp { .. } => "OBSTRUCTED",
            _ => "INVALID_MCS",
        };
        Failure::new(code, e)
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Front(f) => f.into(),
            FormatError::Mcs(m) => m.into(),
            FormatError::Version(_) => Failure::new("UNSUPPORTED_VERSION", e),
            FormatError::Json(_) => Failure::new("BAD_JSON", e),
            FormatError::Coeff(_) => Failure::new("NOT_PRIME", e),
            _ => Failure::new("BAD_MCS_FILE", e),
        }
    }
}

impl From<SheafError> for Failure {
    fn from(e: SheafError) -> Self {
        match e {
            SheafError::Mcs(m) => m.into(),
            SheafError::SearchSpaceTooLarge { .. } => Failure::new("SEARCH_SPACE_TOO_LARGE", e),
            SheafError::NonStrictRepresentative { .. } => Failure::new("NON_STRICT_REPRESENTATIVE", e),
            _ => Failure::new("INCOMPATIBLE", e),
        }
    }
}

impl From<EnumError> for Failure {
    fn from(e: EnumError) -> Self {
        match e {
            EnumError::Front(f) => f.into(),
            EnumError::Mcs(m) => m.into(),
            EnumError::BranchExplosion { .. } => Failure::new("BRANCH_EXPLOSION", e),
            EnumError::InconsistentWitness(..) => Failure::new("INCONSISTENT_WITNESS", e),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new("IO", format!("{}: {e}", path.display())))
}

fn read_front(path: &Path) -> Result<FrontDiagram, Failure> {
    Ok(FrontDiagram::parse(&read(path)?)?)
}

/// Reads an MCS file and rejects objects whose event relations fail.
fn read_valid_mcs(path: &Path) -> Result<MCSObject, Failure> {
    let s = McsFile::parse(&read(path)?)?.to_object()?;
    let diagnostics = s.validate();
    if diagnostics.is_empty() {
        Ok(s)
    } else {
        Err(Failure {
            code: "INVALID_MCS",
            message: format!("{} event relation(s) fail", diagnostics.len()),
            diagnostics: diagnostics.iter().map(DiagnosticFile::from).collect(),
        })
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

/// Runs one command and returns its JSON report.
pub fn execute(cli: &Cli) -> Result<String, Failure> {
    let o = &cli.options;
    let field = Field::new(o.prime).map_err(|e| Failure::new("NOT_PRIME", e))?;
    let enum_options = EnumOptions { branch_cap: o.branch_cap, search_bound: o.search_bound };
    Ok(match &cli.command {
        Command::FrontValidate { front } => to_json(&FrontReport::new(&read_front(front)?, o.baseline)?),
        Command::FrontInvariants { front } => to_json(&InvariantsReport::from(&read_front(front)?.classical_invariants())),
        Command::FrontMove { front, kind, at } => {
            let fd = read_front(front)?;
            let kind = match kind {
                MoveArg::FarCommute => MoveKind::FarCommute,
                MoveArg::Braid => MoveKind::Braid,
            };
            let index = at.checked_sub(1).ok_or_else(|| Failure::new("ILLEGAL_MOVE", "event positions start at 1"))?;
            let moved = fd.apply_move(kind, index)?;
            to_json(&MoveReport { format_version: FORMAT_VERSION, front: moved.render() })
        }
        Command::McsValidate { mcs } => {
            let s = McsFile::parse(&read(mcs)?)?.to_object()?;
            let diagnostics: Vec<DiagnosticFile> = s.validate().iter().map(DiagnosticFile::from).collect();
            if !diagnostics.is_empty() {
                return Err(Failure { code: "INVALID_MCS", message: format!("{} event relation(s) fail", diagnostics.len()), diagnostics });
            }
            to_json(&ValidationReport { format_version: FORMAT_VERSION, valid: true, diagnostics })
        }
        Command::McsNormalize { mcs } => to_json(&McsFile::from_object(&normalize_elementary(&read_valid_mcs(mcs)?)?)),
        Command::McsBarcodes { mcs } => {
            let s = read_valid_mcs(mcs)?;
            let intervals = s.intervals().iter().enumerate().map(|(t, obj)| BarcodeFile::new(t, &barannikov(obj))).collect();
            to_json(&BarcodesReport { format_version: FORMAT_VERSION, intervals })
        }
        Command::SheafVerify { mcs } => {
            let report = verify_microsupport(&read_valid_mcs(mcs)?);
            to_json(&SheafReport {
                format_version: FORMAT_VERSION,
                microsupport: Some(MicrosupportFile::from(&report)),
                cohomology: None,
                euler_characteristic: None,
                end_ring: None,
            })
        }
        Command::SheafHom { source, target } => {
            let (a, b) = (read_valid_mcs(source)?, read_valid_mcs(target)?);
            let tc = match hom_total(&a, &b) {
                Err(SheafError::StrataMismatch) => {
                    let (ra, rb) = common_refinement(&a, &b)?;
                    hom_total(&ra, &rb)?
                }
                other => other?,
            };
            to_json(&SheafReport {
                format_version: FORMAT_VERSION,
                microsupport: None,
                cohomology: Some(cohomology_table(&tc.cohomology())),
                euler_characteristic: Some(tc.complex().euler_characteristic()),
                end_ring: None,
            })
        }
        Command::SheafEndring { mcs } => {
            let ring = end_ring(&read_valid_mcs(mcs)?)?;
            to_json(&SheafReport {
                format_version: FORMAT_VERSION,
                microsupport: None,
                cohomology: Some(cohomology_table(&ring.cohomology)),
                euler_characteristic: None,
                end_ring: Some(EndRingFile::from(&ring)),
            })
        }
        Command::EnumCount { front } => {
            to_json(&EnumerationReport::new(&enumerate(&read_front(front)?, o.baseline, field, enum_options)?, false))
        }
        Command::EnumList { front } => {
            to_json(&EnumerationReport::new(&enumerate(&read_front(front)?, o.baseline, field, enum_options)?, true))
        }
    })
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => match &cli.options.out {
            Some(path) => match std::fs::write(path, report) {
                Ok(()) => 0,
                Err(e) => {
                    let failure = Failure::new("IO", format!("{}: {e}", path.display()));
                    let _ = stdout.write_all(to_json(&failure.report()).as_bytes());
                    1
                }
            },
            None => {
                let _ = stdout.write_all(report.as_bytes());
                0
            }
        },
        Err(failure) => {
            let _ = stdout.write_all(to_json(&failure.report()).as_bytes());
            1
        }
    }
}
