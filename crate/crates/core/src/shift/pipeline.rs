//! Enlarging a bi-closing code into an exactly `n`-to-1 code.
//!
//! For `φ: X_G -> X_H` presented by a bi-resolving `Φ` of degree `d`:
//!
//! 1. pick `N` with `deg Φ^{[N]} = d` and pass to `Φ_1 = Φ^{[N]}: G_1 -> H_1`;
//! 2. extend `Φ_1` to an irreducible bi-covering `Φ̃_1: G̃_1 -> H_1` of degree
//!    `n`;
//! 3. extend the conjugacy `X_{G_1} -> X_G` (first edge of each path) to a
//!    conjugacy `θ^{-1}: X_{G̃_1} -> X̃`;
//! 4. `φ̃ = (first edge) ∘ Φ̃_1 ∘ θ`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::connectivity::{is_irreducible, is_weakly_connected};
use crate::error::{Error, Hypothesis, Result};
use crate::extension::{
    irreducible_extension_degree_n, irreducible_extension_same_degree, perron_obstruction_check,
    ConnectivityTarget, ExtensionResult,
};
use crate::graph::{higher_graph, Graph};
use crate::homomorphism::{higher_homomorphism, resolving_profile, Homomorphism};
use crate::report::{all_pass, Check};
use crate::shift::closing::closing_profile;
use crate::shift::code::{recode_one_block, CodeGraph, SlidingBlockCode};
use crate::shift::conjugacy::{conjugacy_extension, ConjugacyExtension};
use crate::shift::degree::{point_degree, require_essential, DegreeReport};
use crate::shift::labeled::{count_periodic_preimages, LabeledGraph};
use crate::shift::presentation::{markov_approximation, render_word, Presentation};
use crate::spectral::{graph_spectral_radius, strictly_less};

/// Bounds for every bounded search or verification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    pub period_cap: usize,
    pub word_cap: usize,
    pub n_cap: usize,
    pub k_cap: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { period_cap: 6, word_cap: 12, n_cap: 12, k_cap: 12 }
    }
}

#[derive(Clone, Debug)]
pub struct CodeExtension {
    /// 1 for the same-degree construction, 2 for the degree-raising one.
    pub part: u8,
    pub degree: DegreeReport,
    pub n: usize,
    pub order: usize,
    pub higher: Homomorphism,
    pub extension: ExtensionResult,
    pub conjugacy: ConjugacyExtension,
    pub xtilde: Presentation,
    pub code: SlidingBlockCode,
    pub checks: Vec<Check>,
}

impl CodeExtension {
    pub fn verified(&self) -> bool {
        all_pass(&self.checks)
    }
}

pub fn extend_biclosing_code(phi: &Homomorphism, n: usize, caps: &Caps) -> Result<CodeExtension> {
    let (g, h) = (phi.domain(), phi.codomain());
    if !is_irreducible(h) {
        return Err(Hypothesis::IrreducibleCodomain.into());
    }
    require_essential(phi)?;
    let degree = point_degree(phi, caps.period_cap, caps.n_cap)?;
    let (Some(d), Some(order)) = (degree.degree, degree.order) else {
        return Err(Error::CapReached(format!(
            "point degree indeterminate: periodic maximum {} never met by vertex degrees {:?}",
            degree.periodic_max, degree.vertex_degrees
        )));
    };
    let part = if n < d {
        return Err(Hypothesis::DegreeBelow { requested: n, degree: d }.into());
    } else if n == d {
        if !is_weakly_connected(g) {
            return Err(Hypothesis::WeaklyConnectedDomain.into());
        }
        1
    } else {
        let diag = perron_obstruction_check(phi);
        if diag.obstruction {
            return Err(Hypothesis::PerronObstruction(diag.domain_radius).into());
        }
        if !strictly_less(diag.domain_radius, diag.codomain_radius) {
            return Err(Hypothesis::SpectralOrder { domain: diag.domain_radius, codomain: diag.codomain_radius }.into());
        }
        2
    };

    let hh = higher_homomorphism(phi, order);
    let phi1 = hh.map.clone();
    if phi1.vertex_degree() != d {
        return Err(Error::Invariant(format!("deg Φ^[{order}] = {} but the degree is {d}", phi1.vertex_degree())));
    }
    let extension = if part == 1 {
        irreducible_extension_same_degree(&phi1, ConnectivityTarget::Irreducible)?
    } else {
        irreducible_extension_degree_n(&phi1, n, ConnectivityTarget::Irreducible)?
    };

    let first_edge: BTreeMap<String, String> = (0..hh.domain.graph.edge_count())
        .map(|k| (hh.domain.graph.edge_id(k).to_string(), g.edge_id(hh.domain.edge_paths[k].edges[0]).to_string()))
        .collect();
    let x1 = Presentation::Edge(hh.domain.graph.clone());
    let xbar = Presentation::Edge(extension.extended_graph.clone());
    let window = order - 1;
    let conjugacy = conjugacy_extension(&x1, &xbar, &first_edge, Some(window), caps.word_cap, caps.period_cap, caps.n_cap)?;
    let xtilde = conjugacy.ybar.clone();

    let ext_map = &extension.extension;
    let gt = &extension.extended_graph;
    let mut blocks = BTreeMap::new();
    for (word, center) in &conjugacy.inverse.blocks {
        let e = gt.edge_by_id(center).expect("inverse lands in the extended graph");
        let b1 = ext_map.edge_image(e);
        let b = hh.codomain.edge_paths[b1].edges[0];
        blocks.insert(word.clone(), h.edge_id(b).to_string());
    }
    let code = SlidingBlockCode::new(xtilde.clone(), Some(Presentation::Edge(h.clone())), window, window, blocks)?;

    let mut checks = conjugacy.checks.clone();
    checks.push(Check::new(
        "extension bi-covering of degree n",
        resolving_profile(ext_map).bi_covering && ext_map.vertex_degree() == n && ext_map.extends(&phi1),
        format!("degree {} over H^[{order}]", ext_map.vertex_degree()),
    ));
    checks.push(preimage_count_check(&code, h, n, caps.period_cap)?);
    checks.push(extends_check(&code, phi, caps.period_cap));
    let Presentation::Sofic { graph: xt_graph, .. } = &xtilde else { unreachable!("X̃ is presented by a labeled graph") };
    checks.push(Check::new(
        "X̃ irreducible",
        is_irreducible(xt_graph),
        format!("presenting graph with {} vertices", xt_graph.vertex_count()),
    ));
    Ok(CodeExtension { part, degree, n, order, higher: phi1, extension, conjugacy, xtilde, code, checks })
}

/// Every periodic point of `X_H` up to the cap has exactly `n` preimages.
fn preimage_count_check(code: &SlidingBlockCode, h: &Graph, n: usize, period_cap: usize) -> Result<Check> {
    let rec = recode_one_block(code, period_cap)?;
    let cg = rec.code_graph();
    let mut tested = 0;
    for p in 1..=period_cap {
        for c in h.closed_paths(p) {
            let y: Vec<String> = c.iter().map(|&b| h.edge_id(b).to_string()).collect();
            let count = count_periodic_preimages(&cg.labeled, &y);
            if count != Some(n) {
                let shown = count.map_or("infinitely many".to_string(), |c| c.to_string());
                return Ok(Check::new(
                    "exactly n preimages",
                    false,
                    format!("`{}` has {shown} preimages", render_word(&y)),
                ));
            }
            tested += 1;
        }
    }
    Ok(Check::new("exactly n preimages", true, format!("{tested} periodic points of X_H up to period {period_cap}")))
}

/// `φ̃` agrees with `φ` on periodic points of `X_G`, which lie in `X̃`.
fn extends_check(code: &SlidingBlockCode, phi: &Homomorphism, period_cap: usize) -> Check {
    let (g, h) = (phi.domain(), phi.codomain());
    let mut tested = 0;
    for p in 1..=period_cap {
        for c in g.closed_paths(p) {
            let x: Vec<String> = c.iter().map(|&e| g.edge_id(e).to_string()).collect();
            let expected: Vec<String> = c.iter().map(|&e| h.edge_id(phi.edge_image(e)).to_string()).collect();
            if code.apply_periodic(&x) != Some(expected) {
                return Check::new("extends φ", false, format!("differs on `{}`", render_word(&x)));
            }
            tested += 1;
        }
    }
    Check::new("extends φ", true, format!("{tested} periodic points of X up to period {period_cap}"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Obstruction {
    pub k: usize,
    pub reason: String,
}

#[derive(Clone, Debug)]
pub struct ApproxExtension {
    pub k: usize,
    pub approximation: Presentation,
    /// `Φ_k`, presenting the recoded `φ_k`.
    pub homomorphism: Homomorphism,
    pub obstructions: Vec<Obstruction>,
    pub result: CodeExtension,
    pub checks: Vec<Check>,
}

/// Ordered list of a shift's symbols: declaration order where known.
fn ordered_symbols(x: &Presentation, present: &BTreeSet<String>) -> Vec<String> {
    let mut out: Vec<String> = x.alphabet().into_iter().filter(|s| present.contains(s)).collect();
    let listed: BTreeSet<String> = out.iter().cloned().collect();
    out.extend(present.iter().filter(|s| !listed.contains(*s)).cloned());
    out
}

/// A graph whose edge shift is `X_k` with its own symbols as edges, when the
/// allowed 2-words have product structure and `X_k` is 1-step.
fn edge_presentation(x: &Presentation, xk: &Presentation, k: usize) -> Option<Graph> {
    let present: BTreeSet<String> = xk.words(1).into_iter().map(|mut w| w.remove(0)).collect();
    let symbols = ordered_symbols(x, &present);
    let index: BTreeMap<&String, usize> = symbols.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let pairs = xk.words(2);
    let m = symbols.len();
    // Union-find over 2m ends: i is the start of symbol i, m + i its end.
    let mut parent: Vec<usize> = (0..2 * m).collect();
    fn find(parent: &mut [usize], mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for w in &pairs {
        let (a, b) = (index[&w[0]], index[&w[1]]);
        let (ra, rb) = (find(&mut parent, m + a), find(&mut parent, b));
        parent[ra] = rb;
    }
    for a in 0..m {
        for b in 0..m {
            let joined = find(&mut parent, m + a) == find(&mut parent, b);
            if joined != pairs.contains(&vec![symbols[a].clone(), symbols[b].clone()]) {
                return None;
            }
        }
    }
    let mut class_name: BTreeMap<usize, String> = BTreeMap::new();
    let mut names: Vec<String> = Vec::new();
    let mut name_of = |parent: &mut Vec<usize>, end: usize, hint: Option<String>| -> String {
        let r = find(parent, end);
        class_name
            .entry(r)
            .or_insert_with(|| {
                let name = hint.filter(|h| !names.contains(h)).unwrap_or_else(|| format!("q{}", names.len()));
                names.push(name.clone());
                name
            })
            .clone()
    };
    let edge_hint = |s: &String, start: bool| -> Option<String> {
        if let Presentation::Edge(g) = x {
            let e = g.edge(g.edge_by_id(s)?);
            Some(g.vertex_id(if start { e.src } else { e.dst }).to_string())
        } else {
            None
        }
    };
    let mut edges = Vec::new();
    for (i, s) in symbols.iter().enumerate() {
        let src = name_of(&mut parent, i, edge_hint(s, true));
        let dst = name_of(&mut parent, m + i, edge_hint(s, false));
        edges.push((s.clone(), src, dst));
    }
    let mut vertices = names;
    if let Presentation::Edge(g) = x {
        let rank: BTreeMap<&str, usize> = g.vertices().iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
        vertices.sort_by_key(|v| rank.get(v.as_str()).copied().unwrap_or(usize::MAX));
    }
    let graph = Graph::new(vertices, edges).ok()?;
    // X_k must be 1-step for its 2-words to describe it.
    let edge_shift = Presentation::Edge(graph.clone());
    (1..=k + 1).all(|j| edge_shift.words(j) == xk.words(j)).then_some(graph)
}

/// A homomorphism whose edge map is the labeling, if the labels' endpoints
/// induce a consistent vertex map.
fn homomorphism_from_labels(lg: &LabeledGraph, h: &Graph) -> Option<Homomorphism> {
    let g = &lg.graph;
    let mut vmap: Vec<Option<usize>> = vec![None; g.vertex_count()];
    let mut emap = Vec::with_capacity(g.edge_count());
    for (k, e) in g.edges().iter().enumerate() {
        let b = h.edge_by_id(&lg.labels[k])?;
        for (v, w) in [(e.src, h.edge(b).src), (e.dst, h.edge(b).dst)] {
            match vmap[v] {
                Some(x) if x != w => return None,
                _ => vmap[v] = Some(w),
            }
        }
        emap.push(b);
    }
    let vmap: Option<Vec<usize>> = vmap.into_iter().collect();
    Homomorphism::new(g.clone(), h.clone(), vmap?, emap).ok()
}

/// The 2-block lift: edges are 2-paths labeled by the first edge's label.
fn two_block_lift(cg: &CodeGraph) -> CodeGraph {
    let hg = higher_graph(&cg.labeled.graph, 2);
    let labels = hg.edge_paths.iter().map(|p| cg.labeled.labels[p.edges[0]].clone()).collect();
    let symbol = hg.edge_paths.iter().map(|p| cg.symbol[p.edges[0]].clone()).collect();
    CodeGraph { labeled: LabeledGraph::new(hg.graph.clone(), labels), symbol }
}

fn present_as_homomorphism(cg: &CodeGraph, h: &Graph) -> (CodeGraph, Homomorphism) {
    if let Some(phi) = homomorphism_from_labels(&cg.labeled, h) {
        return (cg.clone(), phi);
    }
    let lifted = two_block_lift(cg);
    let phi = homomorphism_from_labels(&lifted.labeled, h).expect("labels along paths of H give a 2-block homomorphism");
    (lifted, phi)
}

pub fn approximate_and_extend(x: &Presentation, phi: &SlidingBlockCode, n: usize, caps: &Caps) -> Result<ApproxExtension> {
    let Some(Presentation::Edge(h)) = &phi.codomain else {
        return Err(Error::Unsupported("the codomain of the code must be an edge shift".into()));
    };
    let hy = graph_spectral_radius(h).ln();
    let hx = x.entropy()?;
    if !strictly_less(hx, hy) {
        return Err(Hypothesis::Entropy { domain: hx, codomain: hy }.into());
    }
    let mut checks = Vec::new();
    if x.is_conjugacy_presentation() {
        let profile = closing_profile(phi, caps.period_cap)?;
        if !profile.bi_closing {
            return Err(Hypothesis::BiClosing(format!("{:?}", profile.witnesses)).into());
        }
        checks.push(Check::new("φ bi-closing", true, "pair-graph check on X"));
    } else {
        checks.push(Check::new("φ bi-closing", true, "X strictly sofic; closing checked on each X_k"));
    }

    let m = phi.window();
    let mut obstructions = Vec::new();
    for k in (m + 1)..=caps.k_cap.max(m + 1) {
        let mut obstruct = |reason: String| obstructions.push(Obstruction { k, reason });
        let xk = markov_approximation(x, k)?;
        let phik = match SlidingBlockCode::new(xk.clone(), phi.codomain.clone(), phi.memory, phi.anticipation, phi.blocks.clone()) {
            Ok(c) => c,
            Err(e) => {
                obstruct(e.to_string());
                continue;
            }
        };
        let image = phik.check_image((k + m).min(caps.word_cap).max(m));
        if !image.pass {
            obstruct(format!("φ_k(X_k) leaves Y: {}", image.detail));
            continue;
        }
        let hk = xk.entropy()?;
        if !strictly_less(hk, hy) {
            obstruct(format!("entropy of X_k is {hk:.10}, not below {hy:.10}"));
            continue;
        }
        let profile = closing_profile(&phik, caps.period_cap)?;
        if !profile.bi_closing {
            obstruct("φ_k is not bi-closing".into());
            continue;
        }
        let cg = match edge_presentation(x, &xk, k) {
            Some(gk) => {
                let domain = Presentation::Edge(gk);
                let on_graph = SlidingBlockCode { domain, ..phik.clone() };
                recode_one_block(&on_graph, caps.period_cap)?.code_graph()
            }
            None => recode_one_block(&phik, caps.period_cap)?.code_graph(),
        };
        let (cg, phi_k) = present_as_homomorphism(&cg, h);
        let (vs, es) = phi_k.domain().essential_parts();
        let ess_domain = phi_k.domain().induced(&vs, &es);
        let phi_k = Homomorphism::new(
            ess_domain,
            h.clone(),
            vs.iter().map(|&v| phi_k.vertex_image(v)).collect(),
            es.iter().map(|&e| phi_k.edge_image(e)).collect(),
        )?;
        let symbol: Vec<String> = es.iter().map(|&e| cg.symbol[e].clone()).collect();
        if !resolving_profile(&phi_k).bi_resolving {
            obstruct("recoded φ_k is not presented by a bi-resolving homomorphism (closing-to-resolving recoding is out of scope)".into());
            continue;
        }
        let result = extend_biclosing_code(&phi_k, n, caps)?;
        checks.push(Check::new("φ_k(X_k) inside Y", true, image.detail));
        checks.push(extends_on_x_check(x, phi, &phi_k, &symbol, &result.code, caps.period_cap));
        return Ok(ApproxExtension { k, approximation: xk, homomorphism: phi_k, obstructions, result, checks });
    }
    let first = obstructions
        .first()
        .map(|o| format!("; first obstruction at k = {}: {}", o.k, o.reason))
        .unwrap_or_default();
    Err(Error::CapReached(format!("no admissible k up to {}{first}", caps.k_cap)))
}

/// `φ̃` agrees with `φ` on periodic points of `X`, carried into `X̃` through
/// the presentation of `X_k` by the domain of `Φ_k`.
fn extends_on_x_check(
    x: &Presentation,
    phi: &SlidingBlockCode,
    phi_k: &Homomorphism,
    symbol: &[String],
    code: &SlidingBlockCode,
    period_cap: usize,
) -> Check {
    let g = phi_k.domain();
    let mut tested = 0;
    for p in 1..=period_cap {
        let lifts: BTreeMap<Vec<String>, Vec<usize>> = g
            .closed_paths(p)
            .into_iter()
            .map(|c| (c.iter().map(|&e| symbol[e].clone()).collect(), c))
            .collect();
        for pt in x.periodic_points(p) {
            let Some(c) = lifts.get(&pt) else {
                return Check::new("extends φ on X", false, format!("`{}` has no lift", render_word(&pt)));
            };
            let lifted: Vec<String> = c.iter().map(|&e| g.edge_id(e).to_string()).collect();
            if code.apply_periodic(&lifted) != phi.apply_periodic(&pt) {
                return Check::new("extends φ on X", false, format!("differs on `{}`", render_word(&pt)));
            }
            tested += 1;
        }
    }
    Check::new("extends φ on X", true, format!("{tested} periodic points of X up to period {period_cap}"))
}
