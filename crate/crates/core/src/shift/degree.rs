//! Degree of the code of a bi-resolving homomorphism.
//!
//! Under a bi-resolving `Φ`, distinct preimage paths of a codomain path never
//! share a vertex, so each preimage is fixed by its start vertex and the
//! number of preimage paths can only drop as the path grows. The vertex degree
//! of `Φ^{[N]}` is the largest number of preimages of a codomain path of
//! length `N - 1`; it is nonincreasing in `N` and bounds every point's
//! preimage count. Periodic points give lower bounds, and the two meet at the
//! degree.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Hypothesis, Result};
use crate::homomorphism::{resolving_profile, Homomorphism};
use crate::shift::code::CodeGraph;
use crate::shift::labeled::{count_periodic_preimages, LabeledGraph};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DegreeStatus {
    Determined,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub status: DegreeStatus,
    pub degree: Option<usize>,
    /// Smallest `N` with `deg Φ^{[N]}` equal to the degree.
    pub order: Option<usize>,
    /// Vertex degree of `Φ^{[N]}` for `N = 1, 2, ...`.
    pub vertex_degrees: Vec<usize>,
    /// Largest preimage count over periodic points up to `period_cap`.
    pub periodic_max: usize,
    pub period_cap: usize,
    pub n_cap: usize,
}

pub(crate) fn require_essential(phi: &Homomorphism) -> Result<()> {
    if !phi.domain().is_essential() {
        return Err(Hypothesis::Essential("domain").into());
    }
    if !phi.codomain().is_essential() {
        return Err(Hypothesis::Essential("codomain").into());
    }
    Ok(())
}

pub(crate) fn homomorphism_code_graph(phi: &Homomorphism) -> CodeGraph {
    let (g, h) = (phi.domain(), phi.codomain());
    let labels = (0..g.edge_count()).map(|k| h.edge_id(phi.edge_image(k)).to_string()).collect();
    CodeGraph {
        labeled: LabeledGraph::new(g.clone(), labels),
        symbol: g.edges().iter().map(|e| e.id.clone()).collect(),
    }
}

/// Largest preimage count over periodic points of the codomain edge shift
/// with period at most `period_cap`; `None` if some count is infinite.
pub fn periodic_preimage_max(phi: &Homomorphism, period_cap: usize) -> Option<usize> {
    let cg = homomorphism_code_graph(phi);
    let h = phi.codomain();
    let mut best = 0;
    for p in 1..=period_cap {
        for c in h.closed_paths(p) {
            let y: Vec<String> = c.iter().map(|&b| h.edge_id(b).to_string()).collect();
            best = best.max(count_periodic_preimages(&cg.labeled, &y)?);
        }
    }
    Some(best)
}

/// Vertex degrees of `Φ^{[N]}` for `N = 1..=n_cap`, computed from the sets of
/// terminal vertices of preimage paths rather than from the higher graphs.
pub fn higher_vertex_degrees(phi: &Homomorphism, n_cap: usize) -> Vec<usize> {
    let (g, h) = (phi.domain(), phi.codomain());
    let mut states: BTreeSet<(usize, Vec<usize>)> = phi
        .vertex_fibers()
        .into_iter()
        .enumerate()
        .filter(|(_, f)| !f.is_empty())
        .collect();
    let mut degrees = Vec::with_capacity(n_cap);
    for _ in 0..n_cap {
        degrees.push(states.iter().map(|(_, s)| s.len()).max().unwrap_or(0));
        let mut next = BTreeSet::new();
        for (big_i, set) in &states {
            for &b in h.out_edges(*big_i) {
                let mut image: Vec<usize> = set
                    .iter()
                    .filter_map(|&v| g.out_edges(v).iter().find(|&&e| phi.edge_image(e) == b).map(|&e| g.edge(e).dst))
                    .collect();
                if image.is_empty() {
                    continue;
                }
                image.sort_unstable();
                next.insert((h.edge(b).dst, image));
            }
        }
        states = next;
    }
    degrees
}

pub fn point_degree(phi: &Homomorphism, period_cap: usize, n_cap: usize) -> Result<DegreeReport> {
    let profile = resolving_profile(phi);
    if !profile.bi_resolving {
        return Err(Hypothesis::BiResolving(format!("{:?}", profile.witnesses)).into());
    }
    require_essential(phi)?;
    let vertex_degrees = higher_vertex_degrees(phi, n_cap.max(1));
    if let Some(w) = vertex_degrees.windows(2).find(|w| w[1] > w[0]) {
        return Err(Error::Invariant(format!("vertex degree increased from {} to {}", w[0], w[1])));
    }
    let periodic_max = periodic_preimage_max(phi, period_cap)
        .ok_or_else(|| Error::Invariant("a bi-resolving code has a point with infinitely many preimages".into()))?;
    if let Some(&last) = vertex_degrees.last() {
        if periodic_max > last {
            return Err(Error::Invariant(format!(
                "periodic point with {periodic_max} preimages exceeds the vertex degree bound {last}"
            )));
        }
    }
    let hit = vertex_degrees.iter().position(|&d| d == periodic_max);
    Ok(DegreeReport {
        status: if hit.is_some() { DegreeStatus::Determined } else { DegreeStatus::Indeterminate },
        degree: hit.map(|_| periodic_max),
        order: hit.map(|i| i + 1),
        vertex_degrees,
        periodic_max,
        period_cap,
        n_cap,
    })
}
