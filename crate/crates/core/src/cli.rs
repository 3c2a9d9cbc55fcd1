//! The `bicover` command line.
//!
//! Every command produces a [`Report`]; `--json` prints it as JSON, otherwise
//! it is rendered as text. Exit codes: 0 ok or none, 1 failed self-check,
//! 2 failed hypothesis, 3 malformed input, 4 timeout, cap or indeterminate.

use std::path::{Path as FsPath, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::connectivity::connectivity;
use crate::error::{Error, Result};
use crate::extension::{
    irreducible_extension_degree_n, irreducible_extension_same_degree, ConnectivityTarget, ExtensionResult,
};
use crate::graph::Graph;
use crate::homomorphism::{matrix_relations, resolving_profile, Homomorphism, SubamalgamationMatrix};
use crate::io::{load, load_graph, CodeDoc, GraphDoc, HomDoc, MatrixDoc, SubshiftDoc};
use crate::report::{all_pass, Check};
use crate::shift::{
    approximate_and_extend, closing_profile, extend_biclosing_code, point_degree, Caps, CodeExtension, DegreeStatus,
};
use crate::spectral::graph_spectral_radius;
use crate::synthesis::{build_bicovering, build_biresolving, find_subamalgamation, RelationMode};

#[derive(Debug, Parser)]
#[command(name = "bicover", version, about = "Bi-resolving and bi-covering graph homomorphisms and their extensions")]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest period checked on periodic points.
    #[arg(long, global = true, default_value_t = 6)]
    pub period_cap: usize,
    /// Longest word checked; also bounds the Markov approximation order.
    #[arg(long, global = true, default_value_t = 12)]
    pub word_cap: usize,
    /// Largest higher-graph order or inverse window tried.
    #[arg(long, global = true, default_value_t = 12)]
    pub n_cap: usize,
    /// Time limit for the subamalgamation search.
    #[arg(long, global = true)]
    pub timeout_ms: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Graph reports.
    Graph {
        #[command(subcommand)]
        command: GraphCommand,
    },
    /// Homomorphism reports.
    Hom {
        #[command(subcommand)]
        command: HomCommand,
    },
    /// Search for a subamalgamation matrix satisfying the relations.
    Exists {
        g: PathBuf,
        h: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Build a homomorphism from a subamalgamation matrix.
    Synthesize {
        g: PathBuf,
        h: PathBuf,
        s: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Extend a bi-resolving homomorphism to a bi-covering one with irreducible domain.
    Extend {
        g: PathBuf,
        h: PathBuf,
        phi: PathBuf,
        /// A number, or `same` to keep the degree.
        #[arg(long)]
        degree: DegreeArg,
    },
    /// Degree of the 1-block code presented by a homomorphism.
    Degree { g: PathBuf, h: PathBuf, phi: PathBuf },
    /// Right, left and bi-closing of a sliding block code.
    Closing { code: PathBuf },
    /// Extend the code presented by a bi-resolving homomorphism to an n-to-1 code.
    ExtendCode {
        g: PathBuf,
        h: PathBuf,
        phi: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Extend a bi-closing code on a subshift through a Markov approximation.
    ApproxExtend {
        x: PathBuf,
        code: PathBuf,
        #[arg(long)]
        n: usize,
    },
    /// Reload an artifact or report and re-run its checks.
    Verify { artifact: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Connectivity and spectral report.
    Info { g: PathBuf },
}

#[derive(Debug, Subcommand)]
pub enum HomCommand {
    /// Resolving profile and matrix relations.
    Check { g: PathBuf, h: PathBuf, phi: PathBuf },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Eq,
    Le,
}

impl From<Mode> for RelationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Eq => RelationMode::Equality,
            Mode::Le => RelationMode::Inequality,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DegreeArg {
    Same,
    Exactly(usize),
}

impl std::str::FromStr for DegreeArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        if s == "same" {
            return Ok(DegreeArg::Same);
        }
        s.parse().map(DegreeArg::Exactly).map_err(|_| format!("expected a number or `same`, got `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    None,
    Error,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub status: Status,
    pub payload: Value,
    pub checks: Vec<Check>,
}

impl Report {
    fn new(command: &str, payload: Value, checks: Vec<Check>) -> Self {
        let status = if all_pass(&checks) { Status::Ok } else { Status::Error };
        Report { command: command.into(), status, payload, checks }
    }

    fn failure(command: &str, e: &Error) -> Self {
        let kind = match exit_code(e) {
            2 => "precondition",
            3 => "format",
            4 => "cap",
            _ => "internal",
        };
        Report {
            command: command.into(),
            status: Status::Error,
            payload: json!({ "error": e.to_string(), "kind": kind }),
            checks: Vec::new(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Ok | Status::None => 0,
            Status::Indeterminate => 4,
            Status::Error => match self.payload.get("kind").and_then(Value::as_str) {
                Some("precondition") => 2,
                Some("format") => 3,
                Some("cap") => 4,
                _ => 1,
            },
        }
    }

    pub fn render_text(&self) -> String {
        let status = serde_json::to_value(self.status).expect("status serializes");
        let mut out = format!("{}: {}\n", self.command, status.as_str().unwrap_or_default());
        if let Value::Object(map) = &self.payload {
            for (k, v) in map {
                let shown = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("{k}: {shown}\n"));
            }
        }
        if !self.checks.is_empty() {
            out.push_str("checks:\n");
            for c in &self.checks {
                out.push_str(&format!("  [{}] {}: {}\n", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail));
            }
        }
        out
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Hypothesis(_) | Error::Unsupported(_) | Error::EmptyMatrix => 2,
        Error::Graph(_) | Error::Homomorphism(_) | Error::Format(_) | Error::Dimension(_) => 3,
        Error::Timeout(_) | Error::CapReached(_) => 4,
        Error::Invariant(_) => 1,
    }
}

/// Parses arguments, runs the command and returns the exit code and the text
/// to print on standard output.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 3 } else { 0 };
            return (code, e.render().to_string());
        }
    };
    let report = execute(&cli);
    let text = if cli.json {
        let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
        s.push('\n');
        s
    } else {
        report.render_text()
    };
    (report.exit_code(), text)
}

pub fn execute(cli: &Cli) -> Report {
    let name = command_name(&cli.command);
    match dispatch(cli) {
        Ok(r) => r,
        Err(e) => Report::failure(name, &e),
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Graph { .. } => "graph info",
        Command::Hom { .. } => "hom check",
        Command::Exists { .. } => "exists",
        Command::Synthesize { .. } => "synthesize",
        Command::Extend { .. } => "extend",
        Command::Degree { .. } => "degree",
        Command::Closing { .. } => "closing",
        Command::ExtendCode { .. } => "extend-code",
        Command::ApproxExtend { .. } => "approx-extend",
        Command::Verify { .. } => "verify",
    }
}

fn caps(cli: &Cli) -> Caps {
    Caps { period_cap: cli.period_cap, word_cap: cli.word_cap, n_cap: cli.n_cap, k_cap: cli.word_cap }
}

fn load_hom(g: &FsPath, h: &FsPath, phi: &FsPath) -> Result<Homomorphism> {
    let (g, h) = (load_graph(g)?, load_graph(h)?);
    load::<HomDoc>(phi)?.to_homomorphism(&g, &h)
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report payloads serialize")
}

fn dispatch(cli: &Cli) -> Result<Report> {
    let name = command_name(&cli.command);
    match &cli.command {
        Command::Graph { command: GraphCommand::Info { g } } => Ok(Report::new(name, graph_info(&load_graph(g)?), Vec::new())),
        Command::Hom { command: HomCommand::Check { g, h, phi } } => {
            let phi = load_hom(g, h, phi)?;
            Ok(Report::new(name, hom_payload(&phi)?, Vec::new()))
        }
        Command::Exists { g, h, mode } => {
            let (g, h) = (load_graph(g)?, load_graph(h)?);
            let timeout = cli.timeout_ms.map(Duration::from_millis);
            let found = find_subamalgamation(&g, &h, (*mode).into(), timeout)?;
            let mode_name = to_value(&RelationMode::from(*mode));
            Ok(match found {
                Some(s) => Report::new(
                    name,
                    json!({ "mode": mode_name, "witness": MatrixDoc::rectangular(s.matrix(), g.vertices(), h.vertices()) }),
                    Vec::new(),
                ),
                None => Report {
                    command: name.into(),
                    status: Status::None,
                    payload: json!({ "mode": mode_name, "witness": "none" }),
                    checks: Vec::new(),
                },
            })
        }
        Command::Synthesize { g, h, s, mode } => {
            let (g, h) = (load_graph(g)?, load_graph(h)?);
            let s = SubamalgamationMatrix::new(load::<MatrixDoc>(s)?.aligned(g.vertices(), h.vertices())?)?;
            synthesize(name, &g, &h, &s, *mode)
        }
        Command::Extend { g, h, phi, degree } => {
            let phi = load_hom(g, h, phi)?;
            let target = ConnectivityTarget::Irreducible;
            let r = match degree {
                DegreeArg::Same => irreducible_extension_same_degree(&phi, target)?,
                DegreeArg::Exactly(n) => irreducible_extension_degree_n(&phi, *n, target)?,
            };
            let n = match degree {
                DegreeArg::Same => phi.vertex_degree(),
                DegreeArg::Exactly(n) => *n,
            };
            let checks = extension_checks(&phi, &r, n);
            Ok(Report::new(name, extension_payload(&r), checks))
        }
        Command::Degree { g, h, phi } => {
            let phi = load_hom(g, h, phi)?;
            let d = point_degree(&phi, cli.period_cap, cli.n_cap)?;
            let mut payload = to_value(&d);
            payload["vertex_degree"] = json!(phi.vertex_degree());
            let status = match d.status {
                DegreeStatus::Determined => Status::Ok,
                DegreeStatus::Indeterminate => Status::Indeterminate,
            };
            Ok(Report { command: name.into(), status, payload, checks: Vec::new() })
        }
        Command::Closing { code } => {
            let code = load::<CodeDoc>(code)?.to_code(None)?;
            let profile = closing_profile(&code, cli.period_cap)?;
            let mut payload = to_value(&profile);
            let text: Map<String, Value> = profile
                .witnesses
                .iter()
                .map(|(k, w)| {
                    (k.clone(), json!({ "first": w.first.to_string(), "second": w.second.to_string(), "image": w.image.to_string() }))
                })
                .collect();
            payload["witness_points"] = Value::Object(text);
            Ok(Report::new(name, payload, Vec::new()))
        }
        Command::ExtendCode { g, h, phi, n } => {
            let phi = load_hom(g, h, phi)?;
            let r = extend_biclosing_code(&phi, *n, &caps(cli))?;
            Ok(Report::new(name, code_extension_payload(&r), r.checks.clone()))
        }
        Command::ApproxExtend { x, code, n } => {
            let x = load::<SubshiftDoc>(x)?.to_presentation()?;
            let doc = load::<CodeDoc>(code)?;
            let domain = if doc.domain.is_some() { None } else { Some(x.clone()) };
            let code = doc.to_code(domain)?;
            let r = approximate_and_extend(&x, &code, *n, &caps(cli))?;
            let payload = json!({
                "k": r.k,
                "approximation": SubshiftDoc::from_presentation(&r.approximation),
                "homomorphism": HomDoc::from_homomorphism(&r.homomorphism, true),
                "obstructions": r.obstructions,
                "result": code_extension_payload(&r.result),
            });
            let mut checks = r.checks.clone();
            checks.extend(r.result.checks.iter().cloned());
            Ok(Report::new(name, payload, checks))
        }
        Command::Verify { artifact } => verify(name, artifact, cli),
    }
}

fn graph_info(g: &Graph) -> Value {
    let lambda = graph_spectral_radius(g);
    json!({
        "vertices": g.vertex_count(),
        "edges": g.edge_count(),
        "essential": g.is_essential(),
        "connectivity": connectivity(g),
        "spectral_radius": lambda,
        "entropy": if lambda > 0.0 { json!(lambda.ln()) } else { Value::Null },
        "adjacency": MatrixDoc::adjacency(g),
    })
}

fn hom_payload(phi: &Homomorphism) -> Result<Value> {
    let s = phi.subamalgamation_matrix();
    let relations = matrix_relations(phi.domain(), phi.codomain(), &s)?;
    Ok(json!({
        "profile": resolving_profile(phi),
        "relations": relations,
        "degree": phi.vertex_degree(),
        "subamalgamation": MatrixDoc::rectangular(s.matrix(), phi.domain().vertices(), phi.codomain().vertices()),
    }))
}

fn realizes(phi: &Homomorphism, s: &SubamalgamationMatrix) -> Check {
    let ok = phi.vertex_map() == s.vertex_map().as_slice();
    Check::new("vertex map realizes S", ok, if ok { "Φ_V matches every row of S" } else { "Φ_V differs from S" })
}

fn synthesize(name: &str, g: &Graph, h: &Graph, s: &SubamalgamationMatrix, mode: Mode) -> Result<Report> {
    match mode {
        Mode::Eq => {
            let c = build_bicovering(g, h, s)?;
            let profile = resolving_profile(&c.homomorphism);
            let checks = vec![
                Check::new("bi-covering", profile.bi_covering, format!("degree {}", c.homomorphism.vertex_degree())),
                realizes(&c.homomorphism, s),
            ];
            let payload = json!({
                "homomorphism": HomDoc::from_homomorphism(&c.homomorphism, true),
                "blocks": c.blocks,
            });
            Ok(Report::new(name, payload, checks))
        }
        Mode::Le => {
            let c = build_biresolving(g, h, s)?;
            let ext = &c.completion.homomorphism;
            let checks = vec![
                Check::new("bi-resolving", resolving_profile(&c.homomorphism).bi_resolving, "restriction to G"),
                Check::new("completion bi-covering", resolving_profile(ext).bi_covering, format!("degree {}", ext.vertex_degree())),
                Check::new("completion extends Φ", ext.extends(&c.homomorphism), "G is a subgraph of the padded graph"),
                realizes(&c.homomorphism, s),
            ];
            let payload = json!({
                "homomorphism": HomDoc::from_homomorphism(&c.homomorphism, true),
                "extension": HomDoc::from_homomorphism(ext, true),
                "new_vertices": c.new_vertices,
                "new_edges": c.new_edges,
            });
            Ok(Report::new(name, payload, checks))
        }
    }
}

fn extension_payload(r: &ExtensionResult) -> Value {
    json!({
        "extended_graph": GraphDoc::from_graph(&r.extended_graph),
        "extension": HomDoc::from_homomorphism(&r.extension, true),
        "new_vertices": r.new_vertices,
        "new_edges": r.new_edges,
        "degree": r.degree,
        "folds": r.folds,
    })
}

fn extension_checks(phi: &Homomorphism, r: &ExtensionResult, n: usize) -> Vec<Check> {
    let profile = resolving_profile(&r.extension);
    let conn = connectivity(&r.extended_graph);
    let mut checks = vec![
        Check::new("bi-covering", profile.bi_covering, "every vertex fiber bijects on edges"),
        Check::new("degree", r.extension.vertex_degree() == n, format!("degree {} requested {n}", r.extension.vertex_degree())),
        Check::new("irreducible", conn.irreducible, format!("{} vertices", r.extended_graph.vertex_count())),
        Check::new("restricts to Φ", r.extension.extends(phi), "original graph kept as a subgraph"),
    ];
    if !r.folds.is_empty() {
        let ok = r.folds.iter().all(|f| f.connected && f.new_edge_over_every_codomain_edge);
        checks.push(Check::new("fold invariants", ok, format!("{} folds", r.folds.len())));
    }
    checks
}

fn code_extension_payload(r: &CodeExtension) -> Value {
    json!({
        "part": r.part,
        "n": r.n,
        "degree": r.degree,
        "order": r.order,
        "higher": HomDoc::from_homomorphism(&r.higher, true),
        "extension": extension_payload(&r.extension),
        "window": r.conjugacy.window,
        "xtilde": SubshiftDoc::from_presentation(&r.xtilde),
        "code": CodeDoc::from_code(&r.code),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Graph,
    Matrix,
    Homomorphism,
    Subshift,
    Code,
}

fn classify(v: &Value) -> Option<Kind> {
    let o = v.as_object()?;
    let has = |k: &str| o.contains_key(k);
    if has("kind") && (has("graph") || has("alphabet")) {
        Some(Kind::Subshift)
    } else if has("blocks") && has("memory") {
        Some(Kind::Code)
    } else if has("vertex_map") && has("edge_map") {
        Some(Kind::Homomorphism)
    } else if has("vertices") && has("edges") && o.len() == 2 && v["vertices"].is_array() {
        Some(Kind::Graph)
    } else if has("order") && has("rows") {
        Some(Kind::Matrix)
    } else {
        None
    }
}

fn reparse<T: serde::de::DeserializeOwned>(v: &Value, what: &str) -> Result<T> {
    serde_json::from_value(v.clone()).map_err(|e| Error::Format(format!("{what}: {e}")))
}

/// Reloads one artifact; returns the re-serialized form and extra checks.
fn reload(kind: Kind, v: &Value, cli: &Cli) -> Result<(Value, Vec<Check>)> {
    Ok(match kind {
        Kind::Graph => {
            let g = reparse::<GraphDoc>(v, "graph")?.to_graph()?;
            (to_value(&GraphDoc::from_graph(&g)), Vec::new())
        }
        Kind::Matrix => {
            let doc = reparse::<MatrixDoc>(v, "matrix")?;
            let m = doc.to_matrix()?;
            (to_value(&MatrixDoc { rows: m.to_rows(), ..doc }), Vec::new())
        }
        Kind::Homomorphism => {
            let phi = reparse::<HomDoc>(v, "homomorphism")?.to_embedded()?;
            (to_value(&HomDoc::from_homomorphism(&phi, true)), Vec::new())
        }
        Kind::Subshift => {
            let p = reparse::<SubshiftDoc>(v, "subshift")?.to_presentation()?;
            (to_value(&SubshiftDoc::from_presentation(&p)), Vec::new())
        }
        Kind::Code => {
            let code = reparse::<CodeDoc>(v, "code")?.to_code(None)?;
            let checks = if code.codomain.is_some() { vec![code.check_image(cli.word_cap)] } else { Vec::new() };
            (to_value(&CodeDoc::from_code(&code)), checks)
        }
    })
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Graph => "graph",
        Kind::Matrix => "matrix",
        Kind::Homomorphism => "homomorphism",
        Kind::Subshift => "subshift",
        Kind::Code => "code",
    }
}

/// Verifies every artifact found in `v`, descending through containers that
/// are not artifacts themselves.
fn verify_tree(path: &str, v: &Value, cli: &Cli, found: &mut Vec<Value>, checks: &mut Vec<Check>) -> Result<()> {
    if let Some(kind) = classify(v) {
        let (again, extra) = reload(kind, v, cli)?;
        let identical = &again == v;
        checks.push(Check::new(
            format!("{path} reloads"),
            true,
            format!("{} re-validates{}", kind_name(kind), if identical { " and round-trips identically" } else { "" }),
        ));
        // A reloaded document must be a fixed point of reload.
        let (twice, _) = reload(kind, &again, cli)?;
        checks.push(Check::new(format!("{path} canonical form stable"), twice == again, kind_name(kind)));
        checks.extend(extra.into_iter().map(|c| Check { name: format!("{path}: {}", c.name), ..c }));
        found.push(json!({ "path": path, "kind": kind_name(kind), "canonical": identical }));
        return Ok(());
    }
    match v {
        Value::Object(map) => {
            for (k, child) in map {
                verify_tree(&format!("{path}.{k}"), child, cli, found, checks)?;
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                verify_tree(&format!("{path}[{i}]"), child, cli, found, checks)?;
            }
        }
        _ => {}
    }
    Ok(())
}

fn verify(name: &str, artifact: &FsPath, cli: &Cli) -> Result<Report> {
    let v: Value = load(artifact)?;
    let root = if v.get("command").is_some() && v.get("payload").is_some() { &v["payload"] } else { &v };
    let mut found = Vec::new();
    let mut checks = Vec::new();
    verify_tree("$", root, cli, &mut found, &mut checks)?;
    if found.is_empty() {
        return Err(Error::Format("no graph, matrix, homomorphism, subshift or code found".into()));
    }
    if let Some(Kind::Homomorphism) = classify(root) {
        let phi = reparse::<HomDoc>(root, "homomorphism")?.to_embedded()?;
        let profile = resolving_profile(&phi);
        checks.push(Check::new("adjacency preserved", true, format!("profile: bi-resolving {}, bi-covering {}", profile.bi_resolving, profile.bi_covering)));
    }
    Ok(Report::new(name, json!({ "artifacts": found }), checks))
}
