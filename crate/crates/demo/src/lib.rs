//! Browser bindings: three operations on adjacency matrices, each returning a
//! JSON document for the page to draw.

use bicover::connectivity::connectivity;
use bicover::extension::{irreducible_extension_degree_n, irreducible_extension_same_degree, ConnectivityTarget};
use bicover::io::{GraphDoc, HomDoc, MatrixDoc};
use bicover::spectral::graph_spectral_radius;
use bicover::synthesis::{build_bicovering, build_biresolving, find_subamalgamation, RelationMode};
use bicover::{resolving_profile, Graph, Homomorphism, IntMatrix};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Searches are exponential; the page only accepts small graphs.
pub const MAX_ORDER: usize = 6;

fn parse_graph(text: &str, prefix: &str) -> Result<Graph, String> {
    let rows: Vec<Vec<u64>> = serde_json::from_str(text).map_err(|e| format!("adjacency matrix: {e}"))?;
    if rows.is_empty() || rows.len() > MAX_ORDER {
        return Err(format!("matrix order must be between 1 and {MAX_ORDER}"));
    }
    if rows.iter().any(|r| r.len() != rows.len()) {
        return Err("adjacency matrix must be square".into());
    }
    if rows.iter().flatten().any(|&x| x > 4) {
        return Err("entries above 4 are not accepted here".into());
    }
    let m = IntMatrix::from_rows(&rows).ok_or("rows have different lengths")?;
    let names: Vec<String> = (0..rows.len()).map(|i| format!("{prefix}{i}")).collect();
    Graph::from_matrix(&m, Some(&names)).map_err(|e| e.to_string())
}

fn mode_of(mode: &str) -> Result<RelationMode, String> {
    match mode {
        "eq" => Ok(RelationMode::Equality),
        "le" => Ok(RelationMode::Inequality),
        other => Err(format!("mode must be `eq` or `le`, not `{other}`")),
    }
}

fn hom_view(phi: &Homomorphism) -> Value {
    let p = resolving_profile(phi);
    json!({
        "domain": GraphDoc::from_graph(phi.domain()),
        "codomain": GraphDoc::from_graph(phi.codomain()),
        "map": HomDoc::from_homomorphism(phi, false),
        "bi_resolving": p.bi_resolving,
        "bi_covering": p.bi_covering,
        "degree": phi.vertex_degree(),
    })
}

/// Spectral radius, entropy and connectivity of one graph.
pub fn spectrum_json(rows: &str) -> Result<Value, String> {
    let g = parse_graph(rows, "v")?;
    let lambda = graph_spectral_radius(&g);
    Ok(json!({
        "graph": GraphDoc::from_graph(&g),
        "spectral_radius": lambda,
        "entropy": if lambda > 0.0 { json!(lambda.ln()) } else { Value::Null },
        "connectivity": connectivity(&g),
        "essential": g.is_essential(),
    }))
}

/// Finds a subamalgamation matrix and builds the homomorphism it describes.
pub fn synthesize_json(g_rows: &str, h_rows: &str, mode: &str) -> Result<Value, String> {
    let g = parse_graph(g_rows, "g")?;
    let h = parse_graph(h_rows, "h")?;
    let mode = mode_of(mode)?;
    let Some(s) = find_subamalgamation(&g, &h, mode, None).map_err(|e| e.to_string())? else {
        return Ok(json!({ "found": false }));
    };
    let phi = match mode {
        RelationMode::Equality => build_bicovering(&g, &h, &s).map(|c| c.homomorphism),
        RelationMode::Inequality => build_biresolving(&g, &h, &s).map(|c| c.homomorphism),
    }
    .map_err(|e| e.to_string())?;
    Ok(json!({
        "found": true,
        "witness": MatrixDoc::rectangular(s.matrix(), g.vertices(), h.vertices()),
        "homomorphism": hom_view(&phi),
    }))
}

/// Builds a bi-resolving map from `G` to `H`, then a bi-covering extension
/// with irreducible domain of degree `degree` (`same` keeps the degree).
pub fn extend_json(g_rows: &str, h_rows: &str, degree: &str) -> Result<Value, String> {
    let g = parse_graph(g_rows, "g")?;
    let h = parse_graph(h_rows, "h")?;
    let s = find_subamalgamation(&g, &h, RelationMode::Inequality, None)
        .map_err(|e| e.to_string())?
        .ok_or("no bi-resolving homomorphism from G to H exists")?;
    let phi = build_biresolving(&g, &h, &s).map_err(|e| e.to_string())?.homomorphism;
    let target = ConnectivityTarget::Irreducible;
    let result = if degree == "same" {
        irreducible_extension_same_degree(&phi, target)
    } else {
        let n: usize = degree.parse().map_err(|_| format!("degree must be a number or `same`, not `{degree}`"))?;
        irreducible_extension_degree_n(&phi, n, target)
    }
    .map_err(|e| e.to_string())?;
    Ok(json!({
        "input": hom_view(&phi),
        "extension": hom_view(&result.extension),
        "new_vertices": result.new_vertices,
        "new_edges": result.new_edges,
        "folds": result.folds.len(),
    }))
}

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => json!({ "ok": true, "result": v }).to_string(),
        Err(e) => json!({ "ok": false, "error": e }).to_string(),
    }
}

#[wasm_bindgen]
pub fn spectrum(rows: &str) -> String {
    respond(spectrum_json(rows))
}

#[wasm_bindgen]
pub fn synthesize(g_rows: &str, h_rows: &str, mode: &str) -> String {
    respond(synthesize_json(g_rows, h_rows, mode))
}

#[wasm_bindgen]
pub fn extend(g_rows: &str, h_rows: &str, degree: &str) -> String {
    respond(extend_json(g_rows, h_rows, degree))
}
