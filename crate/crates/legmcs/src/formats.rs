//! JSON documents read and written by the command-line tool.
//!
//! Every document carries `"formatVersion": 1`. Matrix entries are sparse
//! `[row, column, value]` triples with 1-based indices; omitted entries are
//! zero and values are reduced modulo the prime.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use legmcs_core::coeff::{CoeffError, DenseMatrix, Field};
use legmcs_core::enumerate::EnumerationResult;
use legmcs_core::front::{ClassicalInvariants, FrontDiagram, FrontError};
use legmcs_core::mc::Barcode;
use legmcs_core::mcs::{Diagnostic, Location, MCSObject, McsError};
use legmcs_core::sheaf::{EndRingReport, MicrosupportReport};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Front(#[from] FrontError),
    #[error(transparent)]
    Mcs(#[from] McsError),
    #[error("entry [{row}, {col}] is outside a {size}x{size} matrix")]
    Entry { row: usize, col: usize, size: usize },
    #[error("expected {expected} interval matrices, found {found}")]
    IntervalCount { expected: usize, found: usize },
    #[error("slide after event {after} but the front has {events} events")]
    SlidePosition { after: usize, events: usize },
}

pub type Entries = Vec<(usize, usize, i64)>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SlideFile {
    pub after_event: usize,
    pub matrix: Entries,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct McsFile {
    pub format_version: u32,
    pub prime: u32,
    pub front: String,
    pub maslov_baseline: i32,
    /// One matrix per interval of the refined stratification.
    pub intervals: Vec<Entries>,
    #[serde(default)]
    pub extra_slides: Vec<SlideFile>,
}

fn check_version(v: u32) -> Result<(), FormatError> {
    if v == FORMAT_VERSION {
        Ok(())
    } else {
        Err(FormatError::Version(v))
    }
}

fn dense(field: Field, size: usize, entries: &Entries) -> Result<DenseMatrix, FormatError> {
    let mut m = DenseMatrix::zeros(field, size, size);
    for &(row, col, v) in entries {
        if row == 0 || col == 0 || row > size || col > size {
            return Err(FormatError::Entry { row, col, size });
        }
        m.set(row - 1, col - 1, field.reduce(v));
    }
    Ok(m)
}

fn sparse(m: &DenseMatrix) -> Entries {
    m.nonzero_entries().map(|(r, c, v)| (r + 1, c + 1, i64::from(v))).collect()
}

impl McsFile {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let file: McsFile = serde_json::from_str(text)?;
        check_version(file.format_version)?;
        Ok(file)
    }

    pub fn from_object(s: &MCSObject) -> Self {
        let mut extra_slides = Vec::new();
        for (after, g) in s.slides() {
            extra_slides.push(SlideFile { after_event: after, matrix: sparse(g) });
        }
        McsFile {
            format_version: FORMAT_VERSION,
            prime: s.field().modulus(),
            front: s.front().render(),
            maslov_baseline: s.baseline(),
            intervals: s.intervals().iter().map(|o| sparse(o.d())).collect(),
            extra_slides,
        }
    }

    /// Builds the object; event relations are not checked here.
    pub fn to_object(&self) -> Result<MCSObject, FormatError> {
        let field = Field::new(self.prime)?;
        let front = FrontDiagram::parse(&self.front)?;
        let events = front.events().len();
        let counts = front.strand_counts();
        let mut slides = Vec::with_capacity(self.extra_slides.len());
        let mut per_position = vec![0usize; events + 1];
        for s in &self.extra_slides {
            if s.after_event > events {
                return Err(FormatError::SlidePosition { after: s.after_event, events });
            }
            per_position[s.after_event] += 1;
            slides.push((s.after_event, dense(field, counts[s.after_event], &s.matrix)?));
        }
        let sizes: Vec<usize> = (0..=events).flat_map(|pos| std::iter::repeat(counts[pos]).take(1 + per_position[pos])).collect();
        if sizes.len() != self.intervals.len() {
            return Err(FormatError::IntervalCount { expected: sizes.len(), found: self.intervals.len() });
        }
        let intervals = sizes.iter().zip(&self.intervals).map(|(&n, e)| dense(field, n, e)).collect::<Result<Vec<_>, _>>()?;
        Ok(MCSObject::new(front, self.maslov_baseline, intervals, slides)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct FrontReport {
    pub format_version: u32,
    pub front: String,
    pub events: usize,
    pub max_strands: usize,
    pub components: usize,
    /// Maslov potential on every interval, top strand first.
    pub maslov: Vec<Vec<i32>>,
}

impl FrontReport {
    pub fn new(front: &FrontDiagram, baseline: i32) -> Result<Self, FrontError> {
        let mu = front.maslov(baseline)?;
        Ok(FrontReport {
            format_version: FORMAT_VERSION,
            front: front.render(),
            events: front.events().len(),
            max_strands: front.strand_counts().iter().copied().max().unwrap_or(0),
            components: front.classical_invariants().component_count,
            maslov: mu.per_interval().to_vec(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InvariantsReport {
    pub format_version: u32,
    pub tb: i64,
    pub rotation: Vec<i64>,
    pub components: usize,
}

impl From<&ClassicalInvariants> for InvariantsReport {
    fn from(ci: &ClassicalInvariants) -> Self {
        InvariantsReport { format_version: FORMAT_VERSION, tb: ci.tb, rotation: ci.rotation.clone(), components: ci.component_count }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MoveReport {
    pub format_version: u32,
    pub front: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct LocationFile {
    /// `"interval"` or `"stratum"`.
    pub kind: String,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DiagnosticFile {
    pub location: LocationFile,
    pub message: String,
}

impl From<&Diagnostic> for DiagnosticFile {
    fn from(d: &Diagnostic) -> Self {
        let (kind, index) = match d.location {
            Location::Interval(t) => ("interval", t),
            Location::Stratum(s) => ("stratum", s),
        };
        DiagnosticFile { location: LocationFile { kind: kind.into(), index }, message: d.message.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ValidationReport {
    pub format_version: u32,
    pub valid: bool,
    pub diagnostics: Vec<DiagnosticFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BarcodeFile {
    pub interval: usize,
    /// `[birth, death]` generator pairs, 1-based, with `d` sending the first to the second.
    pub pairs: Vec<(usize, usize)>,
    pub unpaired: Vec<usize>,
}

impl BarcodeFile {
    pub fn new(interval: usize, b: &Barcode) -> Self {
        BarcodeFile {
            interval,
            pairs: b.pairs.iter().map(|&(i, j)| (i + 1, j + 1)).collect(),
            unpaired: b.unpaired.iter().map(|&i| i + 1).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BarcodesReport {
    pub format_version: u32,
    pub intervals: Vec<BarcodeFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MicrosupportFile {
    pub passed: bool,
    pub failures: Vec<String>,
}

impl From<&MicrosupportReport> for MicrosupportFile {
    fn from(r: &MicrosupportReport) -> Self {
        MicrosupportFile { passed: r.passed, failures: r.failures.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct DegreeDim {
    pub degree: i32,
    pub dim: usize,
}

pub fn cohomology_table(c: &[(i32, usize)]) -> Vec<DegreeDim> {
    c.iter().map(|&(degree, dim)| DegreeDim { degree, dim }).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EndRingFile {
    pub unit: Vec<u32>,
    /// `table[i][j]` holds the coordinates of `a_i ∘ a_j`.
    pub table: Vec<Vec<Vec<u32>>>,
    pub associative: bool,
    pub unital: bool,
}

impl From<&EndRingReport> for EndRingFile {
    fn from(r: &EndRingReport) -> Self {
        EndRingFile { unit: r.unit.clone(), table: r.table.clone(), associative: r.associative, unital: r.unital }
    }
}

/// Sheaf report; each command fills the sections it computes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SheafReport {
    pub format_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub microsupport: Option<MicrosupportFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cohomology: Option<Vec<DegreeDim>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub euler_characteristic: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_ring: Option<EndRingFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ClassFile {
    pub size: usize,
    pub representative: McsFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct EnumerationReport {
    pub format_version: u32,
    pub prime: u32,
    pub front: String,
    pub strict_count: usize,
    pub iso_class_count: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classes: Option<Vec<ClassFile>>,
}

impl EnumerationReport {
    pub fn new(r: &EnumerationResult, with_classes: bool) -> Self {
        let classes = with_classes.then(|| {
            r.classes
                .iter()
                .map(|c| ClassFile { size: c.size(), representative: McsFile::from_object(&r.objects[c.representative()]) })
                .collect()
        });
        EnumerationReport {
            format_version: FORMAT_VERSION,
            prime: r.field.modulus(),
            front: r.front.render(),
            strict_count: r.strict_count(),
            iso_class_count: r.iso_class_count(),
            classes,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub diagnostics: Vec<DiagnosticFile>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ErrorReport {
    pub format_version: u32,
    pub error: ErrorBody,
}
