//! Subcommands and their exit-code contract.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use super::{parse, read_document, serialize, CliError, Document, Envelope, StratumQuery};
use crate::boundary_classify::{cross_check_parity, ClassifyError, Membership};
use crate::candidate_diff::{CandidateDifferential, CycleOutcome, Obstruction, PlumbingCertificate, PlumbingVerdict};
use crate::curve_graph::DualGraph;
use crate::exact::format_rational;
use crate::flags::GeometryFlags;
use crate::flat_surface_arf::{arf, find_symplectic_system, stratum_of, SurfaceError, TranslationSurface};
use crate::numeric_plumb::LocalPlumbData;
use crate::spin_parity::{count_spin_parities, spin_of_candidate, SpinError};
use crate::strata_taxonomy::{ComponentTag, Stratum};

/// Default corpus location for `check --all-fixtures`.
pub const FIXTURE_DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures");

#[derive(Debug, Parser)]
#[command(name = "limdiff", version, about = "Limits of abelian differentials on nodal curves")]
pub struct Cli {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a document, or re-run the fixture corpus.
    Check {
        /// Document to parse and validate.
        path: Option<PathBuf>,
        /// Run every fixture and compare with its expected outcomes.
        #[arg(long)]
        all_fixtures: bool,
        /// Fixture directory, defaulting to the crate's own corpus.
        #[arg(long)]
        fixture_dir: Option<PathBuf>,
    },
    /// Decide whether a candidate differential can be plumbed.
    Plumb { path: PathBuf },
    /// Parity of the spin structure of a compact-type candidate with even orders.
    Parity {
        path: PathBuf,
        /// A flags document overriding the flags embedded in the candidate.
        #[arg(long)]
        flags: Option<PathBuf>,
    },
    /// Numbers of even and odd spin structures on a compact-type curve.
    CountSpin { path: PathBuf },
    /// Arf invariant of a translation surface given by glued polygons.
    Arf { path: PathBuf },
    /// Dimension, components, projection dimension and Kodaira dimension of a stratum.
    Stratum {
        path: Option<PathBuf>,
        /// Zero orders, comma separated, when no document is given.
        #[arg(long, value_delimiter = ',')]
        orders: Vec<u32>,
        /// Genus, checked against the orders when given.
        #[arg(long)]
        genus: Option<u32>,
        /// Report one component instead of all of them.
        #[arg(long)]
        tag: Option<ComponentTag>,
    },
    /// Membership of a pointed boundary differential in closures of stratum components.
    Classify {
        path: PathBuf,
        /// A flags document overriding the flags embedded in the candidate.
        #[arg(long)]
        flags: Option<PathBuf>,
        /// Restrict the verdict to one component.
        #[arg(long)]
        tag: Option<ComponentTag>,
    },
    /// Numerical check of the local plumbing charts.
    VerifyLocalPlumbing {
        /// Order of the differential at the node on the zero side, at least -1.
        #[arg(long, allow_hyphen_values = true)]
        k: i32,
        /// Real part of the plumbing parameter, with 0 < |epsilon| < 1.
        #[arg(long, default_value_t = 0.01, allow_hyphen_values = true)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        epsilon_im: f64,
        /// Real part of the residue at the node.
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        residue: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        residue_im: f64,
        /// Sample points on the annulus.
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Maximal relative error of the pullbacks.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Plumb { .. } => "plumb",
            Command::Parity { .. } => "parity",
            Command::CountSpin { .. } => "count-spin",
            Command::Arf { .. } => "arf",
            Command::Stratum { .. } => "stratum",
            Command::Classify { .. } => "classify",
            Command::VerifyLocalPlumbing { .. } => "verify-local-plumbing",
        }
    }
}

/// Verdict class of a run, one per exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Affirmative,
    Negative,
    Undecided,
    InputError,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Affirmative => 0,
            Status::Negative => 1,
            Status::Undecided => 2,
            Status::InputError => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub text: String,
    pub result: Value,
}

impl Report {
    fn new(command: &str, status: Status, text: String, result: Value) -> Self {
        Report {
            command: command.to_owned(),
            status,
            text,
            result,
        }
    }

    fn error(command: &str, e: &CliError) -> Self {
        Report::new(
            command,
            Status::InputError,
            format!("error: {e}\n"),
            json!({ "error": e.to_json() }),
        )
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    /// The report as printed with `--json`.
    pub fn to_json(&self) -> String {
        let doc = json!({
            "command": self.command,
            "status": self.status,
            "exit_code": self.exit_code(),
            "result": self.result,
        });
        let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
        text.push('\n');
        text
    }

    /// The report as printed on standard output.
    pub fn render(&self, json: bool) -> String {
        if json {
            self.to_json()
        } else {
            self.text.clone()
        }
    }
}

/// Parses `args` (program name first) and runs the subcommand; usage errors become exit code 3.
pub fn run_args<I, T>(args: I) -> Report
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli.command),
        Err(e) => Report::error("usage", &CliError::Usage(e.to_string().trim_end().to_owned())),
    }
}

pub fn run(command: &Command) -> Report {
    let name = command.name();
    let outcome = match command {
        Command::Check {
            path,
            all_fixtures,
            fixture_dir,
        } => {
            if *all_fixtures {
                let dir = fixture_dir.clone().unwrap_or_else(|| PathBuf::from(FIXTURE_DIR));
                check_all(&dir)
            } else {
                match path {
                    Some(p) => check(p),
                    None => Err(CliError::Usage("check needs a path or --all-fixtures".into())),
                }
            }
        }
        Command::Plumb { path } => plumb(path),
        Command::Parity { path, flags } => parity(path, flags.as_deref()),
        Command::CountSpin { path } => count_spin(path),
        Command::Arf { path } => arf_report(path),
        Command::Stratum {
            path,
            orders,
            genus,
            tag,
        } => stratum(path.as_deref(), orders, *genus, *tag),
        Command::Classify { path, flags, tag } => classify(path, flags.as_deref(), *tag),
        Command::VerifyLocalPlumbing {
            k,
            epsilon,
            epsilon_im,
            residue,
            residue_im,
            samples,
            tol,
        } => verify_local_plumbing(
            *k,
            Complex64::new(*epsilon, *epsilon_im),
            Complex64::new(*residue, *residue_im),
            *samples,
            *tol,
        ),
    };
    match outcome {
        Ok((status, text, result)) => Report::new(name, status, text, result),
        Err(e) => Report::error(name, &e),
    }
}

type Outcome = Result<(Status, String, Value), CliError>;

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report data serializes")
}

fn candidate_of(env: &Envelope) -> Result<&CandidateDifferential, CliError> {
    match &env.document {
        Document::CandidateDifferential(c) => Ok(c),
        other => Err(CliError::WrongKind {
            expected: "candidate_differential".into(),
            got: other.kind(),
        }),
    }
}

fn graph_of(env: &Envelope) -> Result<&DualGraph, CliError> {
    match &env.document {
        Document::DualGraph(g) => Ok(g),
        Document::CandidateDifferential(c) => Ok(c.graph()),
        other => Err(CliError::WrongKind {
            expected: "dual_graph or candidate_differential".into(),
            got: other.kind(),
        }),
    }
}

fn surface_of(env: &Envelope) -> Result<&TranslationSurface, CliError> {
    match &env.document {
        Document::Surface(s) => Ok(s),
        other => Err(CliError::WrongKind {
            expected: "surface".into(),
            got: other.kind(),
        }),
    }
}

/// Flags from a separate document when given, else the ones embedded in `env`.
fn flags_for(env: &Envelope, path: Option<&Path>) -> Result<GeometryFlags, CliError> {
    let Some(path) = path else {
        return Ok(env.flags.clone().unwrap_or_default());
    };
    match read_document(path)?.document {
        Document::Flags(f) => {
            let graph = graph_of(env)?;
            f.validate(graph)
                .map_err(|e| CliError::schema("/payload", e.to_string()))?;
            Ok(f)
        }
        other => Err(CliError::WrongKind {
            expected: "flags".into(),
            got: other.kind(),
        }),
    }
}

fn check(path: &Path) -> Outcome {
    let env = read_document(path)?;
    let mut text = format!("{}: valid {} document\n", path.display(), env.document.kind());
    let mut status = Status::Affirmative;
    let mut details = json!({ "kind": env.document.kind().to_string() });
    match &env.document {
        Document::CandidateDifferential(c) => {
            let violations = c.validate();
            for v in &violations {
                let _ = writeln!(text, "violation: {v}");
            }
            if !violations.is_empty() {
                status = Status::Negative;
            }
            details["violations"] = to_value(&violations);
        }
        Document::Surface(s) => {
            let _ = writeln!(text, "genus {}, stratum {:?}", s.genus(), stratum_of(s));
        }
        Document::DualGraph(g) => {
            let _ = writeln!(
                text,
                "arithmetic genus {}, compact type: {}",
                g.arithmetic_genus(),
                g.is_compact_type()
            );
        }
        Document::Flags(_) | Document::StratumQuery(_) => {}
    }
    let canonical = serialize(&env);
    let again = parse(&canonical)?;
    let stable = again == env && serialize(&again) == canonical;
    if !stable {
        status = Status::Negative;
        text.push_str("round trip through the canonical form changes the document\n");
    }
    details["round_trip"] = json!(stable);
    Ok((status, text, details))
}

/// Runs every expectation of every `*.json` file under `dir`, in file-name order.
fn check_all(dir: &Path) -> Outcome {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut failures = 0;
    for path in &paths {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        let env = match read_document(path) {
            Ok(env) => env,
            Err(e) => {
                failures += 1;
                let _ = writeln!(text, "FAIL {name}: {e}");
                rows.push(json!({ "fixture": name, "pass": false, "error": e.to_string() }));
                continue;
            }
        };
        if env.expect.is_empty() {
            failures += 1;
            let _ = writeln!(text, "FAIL {name}: no expected outcome");
            rows.push(json!({ "fixture": name, "pass": false, "error": "no expected outcome" }));
            continue;
        }
        let round_trip = parse(&serialize(&env)).is_ok_and(|again| again == env);
        if !round_trip {
            failures += 1;
            let _ = writeln!(text, "FAIL {name}: canonical round trip");
        }
        for exp in &env.expect {
            let mut args = vec!["limdiff".to_owned(), exp.command.clone(), path.display().to_string()];
            args.extend(exp.args.iter().cloned());
            let report = run_args(&args);
            let exit_ok = report.exit_code() == exp.exit;
            let output_ok = exp.output.as_ref().is_none_or(|o| report.text.contains(o.as_str()));
            let pass = exit_ok && output_ok;
            if !pass {
                failures += 1;
            }
            let shown = exp.output.as_deref().map(|o| format!(" {o:?}")).unwrap_or_default();
            let _ = writeln!(
                text,
                "{} {name}: {} -> exit {} (expected {}{shown})",
                if pass { "PASS" } else { "FAIL" },
                exp.command,
                report.exit_code(),
                exp.exit
            );
            rows.push(json!({
                "fixture": name,
                "command": exp.command,
                "exit": report.exit_code(),
                "expected_exit": exp.exit,
                "pass": pass,
            }));
        }
    }
    let _ = writeln!(text, "{} fixtures, {failures} failures", paths.len());
    let status = if failures == 0 {
        Status::Affirmative
    } else {
        Status::Negative
    };
    Ok((
        status,
        text,
        json!({ "fixtures": paths.len(), "failures": failures, "runs": rows }),
    ))
}

fn describe_certificate(cert: &PlumbingCertificate, text: &mut String) {
    for c in &cert.cycle_basis {
        let terms: Vec<String> = c.coefficients.iter().map(|(e, a)| format!("{a:+}·{e}")).collect();
        let _ = writeln!(text, "  cycle closed by {}: {}", c.closing_edge, terms.join(" "));
    }
    match &cert.outcome {
        CycleOutcome::Feasible { exponent } => {
            text.push_str("log-moduli x_e with |eps_e| = exp(x_e):\n");
            for (e, x) in exponent {
                let _ = writeln!(text, "  {e} = {}", format_rational(x));
            }
            text.push_str("every cycle equation sums to exactly 0\n");
        }
        CycleOutcome::Infeasible { farkas } => {
            let u: Vec<String> = farkas.iter().map(format_rational).collect();
            let _ = writeln!(text, "Farkas certificate over the cycles: [{}]", u.join(", "));
            text.push_str("combined weighted row, nonnegative and not all zero:\n");
            for (e, v) in cert.farkas_row(farkas) {
                let _ = writeln!(text, "  {e} = {}", format_rational(&v));
            }
        }
    }
}

fn plumb(path: &Path) -> Outcome {
    let env = read_document(path)?;
    let c = candidate_of(&env)?;
    let verdict = c.is_plumbable()?;
    let mut text = String::new();
    let status = match &verdict {
        PlumbingVerdict::Plumbable(cert) => {
            text.push_str("Plumbable\n");
            describe_certificate(cert, &mut text);
            Status::Affirmative
        }
        PlumbingVerdict::NotPlumbable(obstruction) => {
            let _ = writeln!(text, "NotPlumbable: {obstruction}");
            match obstruction {
                Obstruction::Cycle(cert) => describe_certificate(cert, &mut text),
                Obstruction::ResidueTheorem(nodes) => {
                    for (e, check) in nodes {
                        for r in &check.reasons {
                            let _ = writeln!(text, "  {e}: {r}");
                        }
                    }
                }
                Obstruction::Compatibility(_) | Obstruction::Residue(_) => {}
            }
            Status::Negative
        }
        PlumbingVerdict::Undecided(reason) => {
            let _ = writeln!(text, "Undecided: {reason}");
            Status::Undecided
        }
    };
    let advisory = c.weak_global_residue_check();
    for (v, check) in advisory.iter().filter(|(_, c)| !c.pass) {
        let _ = writeln!(text, "advisory: residues leaving {v} sum to {}", check.sum);
    }
    Ok((
        status,
        text,
        json!({ "verdict": to_value(&verdict), "advisory": to_value(&advisory) }),
    ))
}

fn parity(path: &Path, flags_path: Option<&Path>) -> Outcome {
    let env = read_document(path)?;
    let c = candidate_of(&env)?;
    let flags = flags_for(&env, flags_path)?;
    match spin_of_candidate(c, &flags) {
        Ok(spin) => {
            let mut text = format!("parity: {}\n", spin.parity());
            for (v, theta) in &spin.thetas {
                let _ = writeln!(text, "  {v}: h0 = {}", theta.h0());
            }
            Ok((
                Status::Affirmative,
                text,
                json!({ "parity": spin.parity(), "spin": to_value(&spin) }),
            ))
        }
        Err(e @ (SpinError::NoBackend { .. } | SpinError::MissingFlag(_))) => Ok((
            Status::Undecided,
            format!("Undecided: {e}\n"),
            json!({ "undecided": e.to_string() }),
        )),
        Err(
            e @ (SpinError::NotCompactType
            | SpinError::OddOrder { .. }
            | SpinError::NotThetaCharacteristic { .. }
            | SpinError::Degree { .. }),
        ) => Ok((
            Status::Negative,
            format!("no spin structure: {e}\n"),
            json!({ "no_spin_structure": e.to_string() }),
        )),
        Err(e) => Err(e.into()),
    }
}

fn count_spin(path: &Path) -> Outcome {
    let env = read_document(path)?;
    let graph = graph_of(&env)?;
    match count_spin_parities(graph) {
        Ok((even, odd)) => Ok((
            Status::Affirmative,
            format!("({even}, {odd})\neven {even}, odd {odd}\n"),
            json!({ "even": even, "odd": odd }),
        )),
        Err(SpinError::NotCompactType) => Ok((
            Status::Negative,
            "graph is not of compact type\n".into(),
            json!({ "error": "not of compact type" }),
        )),
        Err(e) => Err(e.into()),
    }
}

fn arf_report(path: &Path) -> Outcome {
    let env = read_document(path)?;
    let s = surface_of(&env)?;
    let orders = stratum_of(s);
    let mut text = format!("genus {}, stratum {orders:?}", s.genus());
    if s.node_count() > 0 {
        let _ = write!(
            text,
            ", {} node(s), normalization genus {}",
            s.node_count(),
            s.normalization_genus()
        );
    }
    text.push('\n');
    let sys = find_symplectic_system(s)?;
    match arf(s, &sys) {
        Ok(value) => {
            let checked = sys.verify_geometric()?;
            let label = if s.node_count() > 0 { "generalized arf" } else { "arf" };
            let _ = writeln!(text, "{label} {value} ({})", if value == 1 { "odd" } else { "even" });
            let _ = writeln!(
                text,
                "quadratic form checked against drawn curves on {checked} basis elements"
            );
            Ok((
                Status::Affirmative,
                text,
                json!({ "genus": s.genus(), "stratum": orders, "nodes": s.node_count(), "arf": value }),
            ))
        }
        Err(SurfaceError::OddOrder(k)) => {
            let _ = writeln!(text, "no Arf invariant: zero of odd order {k}");
            Ok((
                Status::Negative,
                text,
                json!({ "genus": s.genus(), "stratum": orders, "arf": Value::Null }),
            ))
        }
        Err(e) => Err(e.into()),
    }
}

fn stratum(path: Option<&Path>, orders: &[u32], genus: Option<u32>, tag: Option<ComponentTag>) -> Outcome {
    let query = match path {
        Some(p) => match read_document(p)?.document {
            Document::StratumQuery(q) => q,
            other => {
                return Err(CliError::WrongKind {
                    expected: "stratum_query".into(),
                    got: other.kind(),
                })
            }
        },
        None if orders.is_empty() => return Err(CliError::Usage("stratum needs a path or --orders".into())),
        None => StratumQuery {
            genus,
            orders: orders.to_vec(),
            tag,
        },
    };
    let s = match query.genus {
        Some(g) => Stratum::new(g, query.orders.clone())?,
        None => Stratum::from_orders(query.orders.clone())?,
    };
    let (affine, projective) = s.dimension();
    let mut text = format!("stratum {s}\ndimension: affine {affine}, projective {projective}\n");
    let components = match query.tag.or(tag) {
        Some(t) => vec![s.component(t)?],
        None => s
            .components()
            .into_iter()
            .map(|c| s.component(c.tag))
            .collect::<Result<_, _>>()?,
    };
    let parities = s.components();
    let _ = writeln!(text, "{:<8} {:<7} {:<11} kodaira", "tag", "parity", "projection");
    let mut rows = Vec::new();
    for c in &components {
        let parity = parities.iter().find(|i| i.tag == c.tag).and_then(|i| i.parity);
        let kodaira = c.kodaira_dimension();
        let parity_text = parity.map_or("-".to_owned(), |p| p.to_string());
        let _ = writeln!(
            text,
            "{:<8} {:<7} {:<11} {} ({})",
            c.tag.to_string(),
            parity_text,
            c.projection_dimension(),
            kodaira.value,
            kodaira.rule
        );
        rows.push(json!({
            "tag": c.tag,
            "parity": parity,
            "projection_dimension": c.projection_dimension(),
            "kodaira": to_value(&kodaira),
        }));
    }
    Ok((
        Status::Affirmative,
        text,
        json!({ "stratum": to_value(&s), "dimension": { "affine": affine, "projective": projective }, "components": rows }),
    ))
}

fn classify(path: &Path, flags_path: Option<&Path>, tag: Option<ComponentTag>) -> Outcome {
    let env = read_document(path)?;
    let c = candidate_of(&env)?;
    let flags = flags_for(&env, flags_path)?;
    let report = cross_check_parity(c, &flags).map_err(|e| match e {
        ClassifyError::Diff(d) => CliError::Diff(d),
        other => CliError::Classify(other),
    })?;
    let mut verdict = report.verdict.clone();
    if let Some(t) = tag {
        verdict.membership.retain(|k, _| *k == t);
        if verdict.membership.is_empty() {
            return Err(CliError::Usage(format!(
                "the classifiers do not decide {t} for this curve"
            )));
        }
    }
    let mut text = format!("{verdict}\n");
    for r in &verdict.reasons {
        let _ = writeln!(text, "  - {r}");
    }
    if let Some(d) = verdict.fibre_dimension {
        let _ = writeln!(text, "fibre dimension {d}");
    }
    for check in &report.checks {
        let _ = writeln!(
            text,
            "parity of {} agrees with the spin structure: {}",
            check.tag, check.actual
        );
    }
    if let Some(skip) = &report.skipped {
        let _ = writeln!(text, "parity cross-check skipped: {skip}");
    }
    let memberships: Vec<&Membership> = verdict.membership.values().collect();
    let status = if memberships.contains(&&Membership::InClosure) {
        Status::Affirmative
    } else if memberships.iter().any(|m| matches!(m, Membership::Undecided(_))) {
        Status::Undecided
    } else {
        Status::Negative
    };
    Ok((
        status,
        text,
        json!({ "verdict": to_value(&verdict), "parity_checks": to_value(&report.checks), "skipped": report.skipped }),
    ))
}

fn verify_local_plumbing(k: i32, epsilon: Complex64, residue: Complex64, samples: usize, tol: f64) -> Outcome {
    let data = LocalPlumbData::with_grid(k, epsilon, residue, samples)?;
    let r = data.pullback_check(tol)?;
    let text = format!(
        "k = {k}, epsilon = {epsilon}, a_-1 = {residue}, {samples} samples\n\
         max relative error on V: {:.3e}\n\
         max relative error on W: {:.3e}\n\
         residue on |z| = 0.9: ({:.12}, {:.12}), expected ({:.12}, {:.12}), error {:.3e}\n\
         {}\n",
        r.max_rel_err_v,
        r.max_rel_err_w,
        r.residue.0,
        r.residue.1,
        r.expected_residue.0,
        r.expected_residue.1,
        r.residue_abs_err,
        if r.pass { "PASS" } else { "FAIL" }
    );
    let status = if r.pass { Status::Affirmative } else { Status::Negative };
    Ok((status, text, to_value(&r)))
}
