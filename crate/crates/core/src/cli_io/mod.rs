//! JSON documents, the command line and the fixture corpus.
//!
//! Every file is an envelope `{"kind", "version": 1, "payload"}` with optional `description`,
//! companion `flags` and a list of `expect`ed command outcomes. Schema errors carry the JSON
//! pointer of the offending value.

mod commands;

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::boundary_classify::ClassifyError;
use crate::candidate_diff::{CandidateDifferential, DiffError, Violation};
use crate::curve_graph::DualGraph;
use crate::flags::GeometryFlags;
use crate::flat_surface_arf::{build_surface, SurfaceError, TranslationSurface};
use crate::numeric_plumb::PlumbError;
use crate::spin_parity::SpinError;
use crate::strata_taxonomy::{ComponentTag, StratumError};

pub use commands::{run, run_args, Cli, Command, Report, Status};

/// The only document version this crate reads and writes.
pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    DualGraph,
    CandidateDifferential,
    Surface,
    Flags,
    StratumQuery,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::DualGraph => "dual_graph",
            Kind::CandidateDifferential => "candidate_differential",
            Kind::Surface => "surface",
            Kind::Flags => "flags",
            Kind::StratumQuery => "stratum_query",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("schema error at {}: {message}", pointer_label(.pointer))]
    Schema { pointer: String, message: String },
    #[error("expected a {expected} document, got {got}")]
    WrongKind { expected: String, got: Kind },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Diff(#[from] DiffError),
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Stratum(#[from] StratumError),
    #[error(transparent)]
    Plumb(#[from] PlumbError),
}

fn pointer_label(pointer: &str) -> &str {
    if pointer.is_empty() {
        "the document root"
    } else {
        pointer
    }
}

impl CliError {
    fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    /// Machine-readable form used by `--json`.
    pub fn to_json(&self) -> Value {
        match self {
            CliError::Schema { pointer, message } => serde_json::json!({
                "kind": "schema",
                "pointer": pointer,
                "message": message,
            }),
            CliError::Io { path, message } => serde_json::json!({
                "kind": "io",
                "path": path,
                "message": message,
            }),
            other => serde_json::json!({
                "kind": "input",
                "message": other.to_string(),
            }),
        }
    }
}

/// Escapes one JSON pointer reference token.
fn escape_token(token: &str) -> String {
    token.replace('~', "~0").replace('/', "~1")
}

fn pointer_of(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    path.iter()
        .filter_map(|segment| match segment {
            Segment::Seq { index } => Some(format!("/{index}")),
            Segment::Map { key } => Some(format!("/{}", escape_token(key))),
            Segment::Enum { .. } | Segment::Unknown => None,
        })
        .collect()
}

/// Deserializes `value`, reporting the failing location under `prefix`.
fn from_value<T: serde::de::DeserializeOwned>(value: Value, prefix: &str) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let pointer = format!("{prefix}{}", pointer_of(e.path()));
        CliError::schema(pointer, e.inner().to_string())
    })
}

/// Parameters of a `stratum` query; the genus is read off the orders when absent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StratumQuery {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    pub orders: Vec<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<ComponentTag>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Document {
    DualGraph(DualGraph),
    CandidateDifferential(CandidateDifferential),
    Surface(TranslationSurface),
    Flags(GeometryFlags),
    StratumQuery(StratumQuery),
}

impl Document {
    pub fn kind(&self) -> Kind {
        match self {
            Document::DualGraph(_) => Kind::DualGraph,
            Document::CandidateDifferential(_) => Kind::CandidateDifferential,
            Document::Surface(_) => Kind::Surface,
            Document::Flags(_) => Kind::Flags,
            Document::StratumQuery(_) => Kind::StratumQuery,
        }
    }

    fn payload(&self) -> Value {
        let value = match self {
            Document::DualGraph(g) => serde_json::to_value(g),
            Document::CandidateDifferential(c) => serde_json::to_value(c),
            Document::Surface(s) => serde_json::to_value(s.spec()),
            Document::Flags(f) => serde_json::to_value(f),
            Document::StratumQuery(q) => serde_json::to_value(q),
        };
        value.expect("documents serialize to JSON")
    }
}

/// An outcome a fixture promises for one subcommand run on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expectation {
    /// Subcommand name, such as `plumb` or `classify`.
    pub command: String,
    /// Extra arguments after the file path.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub args: Vec<String>,
    pub exit: i32,
    /// Text the human-readable report must contain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Envelope {
    pub description: Option<String>,
    pub document: Document,
    pub flags: Option<GeometryFlags>,
    pub expect: Vec<Expectation>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEnvelope {
    kind: Kind,
    version: u32,
    #[serde(default)]
    description: Option<String>,
    payload: Value,
    #[serde(default)]
    flags: Option<Value>,
    #[serde(default)]
    expect: Vec<Expectation>,
}

#[derive(Serialize)]
struct CanonicalEnvelope<'a> {
    kind: Kind,
    version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    description: Option<&'a str>,
    payload: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    flags: Option<&'a GeometryFlags>,
    #[serde(skip_serializing_if = "<[Expectation]>::is_empty")]
    expect: &'a [Expectation],
}

/// Schema errors for residues that the decision procedures cannot do without.
fn check_residues(c: &CandidateDifferential) -> Result<(), CliError> {
    for v in c.validate() {
        match v {
            Violation::MissingResidue { half_edge } => {
                return Err(CliError::schema(
                    format!("/payload/residue/{}", escape_token(half_edge.as_str())),
                    format!("half-edge {half_edge} has order -1 and needs a residue"),
                ))
            }
            Violation::ResidueAtRegularBranch { half_edge } => {
                return Err(CliError::schema(
                    format!("/payload/residue/{}", escape_token(half_edge.as_str())),
                    format!("half-edge {half_edge} is not a pole and must have residue 0"),
                ))
            }
            _ => {}
        }
    }
    Ok(())
}

/// Parses a document, checking the envelope, the payload schema and the referenced ids.
pub fn parse(text: &str) -> Result<Envelope, CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::schema("", e.to_string()))?;
    let raw: RawEnvelope = from_value(value, "")?;
    if raw.version != VERSION {
        return Err(CliError::schema(
            "/version",
            format!("unsupported version {}, expected {VERSION}", raw.version),
        ));
    }
    let document = match raw.kind {
        Kind::DualGraph => Document::DualGraph(from_value(raw.payload, "/payload")?),
        Kind::CandidateDifferential => {
            let c: CandidateDifferential = from_value(raw.payload, "/payload")?;
            check_residues(&c)?;
            Document::CandidateDifferential(c)
        }
        Kind::Surface => {
            let spec = from_value(raw.payload, "/payload")?;
            let surface = build_surface(spec).map_err(|e| CliError::schema("/payload", e.to_string()))?;
            Document::Surface(surface)
        }
        Kind::Flags => Document::Flags(from_value(raw.payload, "/payload")?),
        Kind::StratumQuery => Document::StratumQuery(from_value(raw.payload, "/payload")?),
    };
    let flags: Option<GeometryFlags> = raw.flags.map(|f| from_value(f, "/flags")).transpose()?;
    if let Some(f) = &flags {
        let graph = match &document {
            Document::DualGraph(g) => Some(g),
            Document::CandidateDifferential(c) => Some(c.graph()),
            _ => None,
        };
        match graph {
            Some(g) => f.validate(g).map_err(|e| CliError::schema("/flags", e.to_string()))?,
            None => {
                return Err(CliError::schema(
                    "/flags",
                    format!("a {} document carries no flags", raw.kind),
                ))
            }
        }
    }
    Ok(Envelope {
        description: raw.description,
        document,
        flags,
        expect: raw.expect,
    })
}

/// Canonical text: fixed key order, sorted maps, two-space indentation and a final newline.
pub fn serialize(envelope: &Envelope) -> String {
    let canonical = CanonicalEnvelope {
        kind: envelope.document.kind(),
        version: VERSION,
        description: envelope.description.as_deref(),
        payload: envelope.document.payload(),
        flags: envelope.flags.as_ref(),
        expect: &envelope.expect,
    };
    let mut text = serde_json::to_string_pretty(&canonical).expect("canonical envelope serializes");
    text.push('\n');
    text
}

impl Envelope {
    pub fn new(document: Document) -> Self {
        Envelope {
            description: None,
            document,
            flags: None,
            expect: Vec::new(),
        }
    }

    pub fn with_flags(mut self, flags: GeometryFlags) -> Self {
        self.flags = Some(flags);
        self
    }

    pub fn with_description(mut self, description: &str) -> Self {
        self.description = Some(description.to_owned());
        self
    }

    pub fn expecting(mut self, command: &str, args: &[&str], exit: i32, output: Option<&str>) -> Self {
        self.expect.push(Expectation {
            command: command.to_owned(),
            args: args.iter().map(|a| (*a).to_owned()).collect(),
            exit,
            output: output.map(str::to_owned),
        });
        self
    }
}

pub fn read_document(path: &Path) -> Result<Envelope, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&text)
}
