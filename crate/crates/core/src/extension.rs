//! Bi-covering extensions of bi-resolving homomorphisms.
//!
//! Every bi-resolving `Φ: G -> H` extends to a bi-covering map by enlarging the
//! domain: pad each vertex fiber with isolated vertices, then for every edge
//! `b: I -> J` of `H` complete the partial matching formed by the old
//! preimages of `b` into a perfect matching between the fibers of `I` and `J`
//! with new `b`-edges. Over an irreducible `H` the result is a disjoint union
//! of irreducible graphs.
//!
//! * With `G` weakly connected and fibers padded to `deg Φ`, the completion is
//!   already irreducible.
//! * With `λ_G < λ_H` and a target degree `n > deg Φ`, complete to degree
//!   `n - 1`, add a copy of `H` made of new edges, and fold the irreducible
//!   components of the completion into it one at a time: a new `b`-edge of the
//!   component and a new `b`-edge of the running graph exchange their terminal
//!   vertices, which joins the two irreducible graphs into one.

use std::collections::HashSet;

use serde::Serialize;

use crate::connectivity::{irreducible_components, is_irreducible, is_weakly_connected, weak_components};
use crate::error::{Error, Hypothesis, Result};
use crate::graph::{fresh_id, Edge, Graph};
use crate::homomorphism::{resolving_profile, Homomorphism};
use crate::spectral::{approx_equal, graph_spectral_radius, strictly_less};

/// Connectivity demanded of the extended domain. `WeaklyConnected` relaxes
/// every irreducibility hypothesis and post-condition to weak connectivity.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConnectivityTarget {
    #[default]
    Irreducible,
    WeaklyConnected,
}

impl ConnectivityTarget {
    fn holds(self, g: &Graph) -> bool {
        match self {
            ConnectivityTarget::Irreducible => is_irreducible(g),
            ConnectivityTarget::WeaklyConnected => is_weakly_connected(g),
        }
    }

    fn check_codomain(self, h: &Graph) -> Result<()> {
        match self {
            ConnectivityTarget::Irreducible if !is_irreducible(h) => Err(Hypothesis::IrreducibleCodomain.into()),
            ConnectivityTarget::WeaklyConnected if !is_weakly_connected(h) => {
                Err(Hypothesis::WeaklyConnectedCodomain.into())
            }
            _ => Ok(()),
        }
    }
}

/// One merge of a component into the running graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FoldStep {
    pub component: Vec<String>,
    pub component_edge: String,
    pub partner_edge: String,
    pub codomain_edge: String,
    /// Running graph after the fold has the demanded connectivity.
    pub connected: bool,
    /// Running graph after the fold has a new preimage of every codomain edge.
    pub new_edge_over_every_codomain_edge: bool,
}

#[derive(Clone, Debug)]
pub struct ExtensionResult {
    pub extended_graph: Graph,
    pub extension: Homomorphism,
    pub new_vertices: Vec<String>,
    pub new_edges: Vec<String>,
    pub degree: usize,
    pub folds: Vec<FoldStep>,
}

/// Mutable domain under construction; the original graph is always a prefix.
struct Work {
    vertices: Vec<String>,
    vmap: Vec<usize>,
    edges: Vec<Edge>,
    emap: Vec<usize>,
    is_new: Vec<bool>,
    taken_vertices: HashSet<String>,
    taken_edges: HashSet<String>,
    new_vertices: Vec<String>,
}

impl Work {
    fn from(phi: &Homomorphism) -> Self {
        let g = phi.domain();
        Work {
            vertices: g.vertices().to_vec(),
            vmap: phi.vertex_map().to_vec(),
            edges: g.edges().to_vec(),
            emap: phi.edge_map().to_vec(),
            is_new: vec![false; g.edge_count()],
            taken_vertices: g.vertices().iter().cloned().collect(),
            taken_edges: g.edges().iter().map(|e| e.id.clone()).collect(),
            new_vertices: Vec::new(),
        }
    }

    fn add_vertex(&mut self, base: String, image: usize) -> usize {
        let id = fresh_id(base, &self.taken_vertices);
        self.taken_vertices.insert(id.clone());
        self.vertices.push(id.clone());
        self.vmap.push(image);
        self.new_vertices.push(id);
        self.vertices.len() - 1
    }

    fn add_edge(&mut self, base: String, src: usize, dst: usize, image: usize) -> usize {
        let id = fresh_id(base, &self.taken_edges);
        self.taken_edges.insert(id.clone());
        self.edges.push(Edge { id, src, dst });
        self.emap.push(image);
        self.is_new.push(true);
        self.edges.len() - 1
    }

    fn fibers(&self, codomain_vertices: usize) -> Vec<Vec<usize>> {
        let mut fibers = vec![Vec::new(); codomain_vertices];
        for (v, &w) in self.vmap.iter().enumerate() {
            fibers[w].push(v);
        }
        fibers
    }

    fn graph(&self) -> Result<Graph> {
        Ok(Graph::from_parts(self.vertices.clone(), self.edges.clone())?)
    }

    fn subgraph(&self, members: &HashSet<usize>) -> Result<Graph> {
        let g = self.graph()?;
        let vs: Vec<usize> = (0..self.vertices.len()).filter(|v| members.contains(v)).collect();
        Ok(g.subgraph_on(&vs))
    }

    fn finish(self, h: &Graph, degree: usize, folds: Vec<FoldStep>) -> Result<ExtensionResult> {
        let new_edges = self
            .edges
            .iter()
            .zip(&self.is_new)
            .filter(|(_, &n)| n)
            .map(|(e, _)| e.id.clone())
            .collect();
        let g = self.graph()?;
        let extension = Homomorphism::new(g.clone(), h.clone(), self.vmap, self.emap)?;
        Ok(ExtensionResult {
            extended_graph: g,
            extension,
            new_vertices: self.new_vertices,
            new_edges,
            degree,
            folds,
        })
    }
}

fn require_bi_resolving(phi: &Homomorphism) -> Result<()> {
    let profile = resolving_profile(phi);
    if profile.bi_resolving {
        return Ok(());
    }
    let witness = profile
        .witnesses
        .get("right_resolving")
        .or_else(|| profile.witnesses.get("left_resolving"))
        .map(|w| format!("{w:?}"))
        .unwrap_or_default();
    Err(Hypothesis::BiResolving(witness).into())
}

/// Pads fibers to `fiber_size` and completes every edge fiber to a perfect
/// matching between vertex fibers.
fn complete(phi: &Homomorphism, fiber_size: usize) -> Result<Work> {
    let h = phi.codomain();
    let mut work = Work::from(phi);
    let fibers = work.fibers(h.vertex_count());
    for (big_i, fiber) in fibers.iter().enumerate() {
        for k in 0..fiber_size.saturating_sub(fiber.len()) {
            work.add_vertex(format!("pad:{}#{k}", h.vertex_id(big_i)), big_i);
        }
    }
    let fibers = work.fibers(h.vertex_count());
    let old_fibers = phi.edge_fibers();
    for (b, old) in old_fibers.iter().enumerate() {
        let edge_b = h.edge(b);
        let used_src: HashSet<usize> = old.iter().map(|&e| work.edges[e].src).collect();
        let used_dst: HashSet<usize> = old.iter().map(|&e| work.edges[e].dst).collect();
        let free_src = fibers[edge_b.src].iter().filter(|v| !used_src.contains(v));
        let free_dst: Vec<usize> = fibers[edge_b.dst].iter().copied().filter(|v| !used_dst.contains(v)).collect();
        let pairs: Vec<(usize, usize)> = free_src.copied().zip(free_dst).collect();
        for (k, (s, t)) in pairs.into_iter().enumerate() {
            work.add_edge(format!("new:{}#{k}", edge_b.id), s, t, b);
        }
    }
    Ok(work)
}

/// Bi-covering extension of a bi-resolving map with every vertex fiber of size
/// `fiber_size` (at least the degree of `phi`).
pub fn bicovering_completion(phi: &Homomorphism, fiber_size: usize) -> Result<ExtensionResult> {
    require_bi_resolving(phi)?;
    let d = phi.vertex_degree();
    if fiber_size < d {
        return Err(Hypothesis::DegreeBelow { requested: fiber_size, degree: d }.into());
    }
    let result = complete(phi, fiber_size)?.finish(phi.codomain(), fiber_size, Vec::new())?;
    if !resolving_profile(&result.extension).bi_covering {
        return Err(Error::Invariant("completion is not bi-covering".into()));
    }
    Ok(result)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PerronDiagnosis {
    pub codomain_irreducible: bool,
    pub domain_irreducible: bool,
    pub domain_radius: f64,
    pub codomain_radius: f64,
    /// Codomain irreducible, domain not, radii equal: no bi-covering extension
    /// of the map can have an irreducible domain.
    pub obstruction: bool,
}

pub fn perron_obstruction_check(phi: &Homomorphism) -> PerronDiagnosis {
    let (g, h) = (phi.domain(), phi.codomain());
    let codomain_irreducible = is_irreducible(h);
    let domain_irreducible = is_irreducible(g);
    let domain_radius = graph_spectral_radius(g);
    let codomain_radius = graph_spectral_radius(h);
    PerronDiagnosis {
        codomain_irreducible,
        domain_irreducible,
        domain_radius,
        codomain_radius,
        obstruction: codomain_irreducible && !domain_irreducible && approx_equal(domain_radius, codomain_radius),
    }
}

fn refuse_on_obstruction(phi: &Homomorphism, target: ConnectivityTarget) -> Result<()> {
    if target == ConnectivityTarget::Irreducible {
        let diag = perron_obstruction_check(phi);
        if diag.obstruction {
            return Err(Hypothesis::PerronObstruction(diag.domain_radius).into());
        }
    }
    Ok(())
}

/// Bi-covering extension of the same degree with a connected domain; needs a
/// weakly connected domain.
pub fn irreducible_extension_same_degree(phi: &Homomorphism, target: ConnectivityTarget) -> Result<ExtensionResult> {
    target.check_codomain(phi.codomain())?;
    if !is_weakly_connected(phi.domain()) {
        return Err(Hypothesis::WeaklyConnectedDomain.into());
    }
    require_bi_resolving(phi)?;
    refuse_on_obstruction(phi, target)?;
    let result = bicovering_completion(phi, phi.vertex_degree())?;
    if !target.holds(&result.extended_graph) {
        return Err(Error::Invariant("completion of a weakly connected domain is not connected".into()));
    }
    Ok(result)
}

/// Bi-covering extension of degree `n > deg Φ` with a connected domain; needs
/// the domain's spectral radius to be below the codomain's.
pub fn irreducible_extension_degree_n(
    phi: &Homomorphism,
    n: usize,
    target: ConnectivityTarget,
) -> Result<ExtensionResult> {
    let (g, h) = (phi.domain(), phi.codomain());
    target.check_codomain(h)?;
    require_bi_resolving(phi)?;
    refuse_on_obstruction(phi, target)?;
    let (lg, lh) = (graph_spectral_radius(g), graph_spectral_radius(h));
    if !strictly_less(lg, lh) {
        return Err(Hypothesis::SpectralOrder { domain: lg, codomain: lh }.into());
    }
    let d = phi.vertex_degree();
    if n <= d {
        return Err(Hypothesis::DegreeNotAbove { requested: n, degree: d }.into());
    }

    let mut work = complete(phi, n - 1)?;
    let completed = work.graph()?;
    let components = match target {
        ConnectivityTarget::Irreducible => irreducible_components(&completed),
        ConnectivityTarget::WeaklyConnected => weak_components(&completed),
    };
    let covered: usize = components.iter().map(Vec::len).sum();
    if covered != completed.vertex_count() {
        return Err(Error::Invariant("completion leaves vertices outside every component".into()));
    }

    // Copy of H whose edges are all new.
    let mut running: HashSet<usize> = HashSet::new();
    let mut copy_of = Vec::with_capacity(h.vertex_count());
    for big_i in 0..h.vertex_count() {
        let v = work.add_vertex(format!("copy:{}", h.vertex_id(big_i)), big_i);
        copy_of.push(v);
        running.insert(v);
    }
    for (b, e) in h.edges().iter().enumerate() {
        work.add_edge(format!("copy:{}", e.id), copy_of[e.src], copy_of[e.dst], b);
    }

    let mut folds = Vec::with_capacity(components.len());
    for comp in components {
        let members: HashSet<usize> = comp.iter().copied().collect();
        let in_running = |w: &Work, k: usize| running.contains(&w.edges[k].src);
        let running_new = |w: &Work, b: usize| {
            (0..w.edges.len()).find(|&k| w.is_new[k] && w.emap[k] == b && in_running(w, k))
        };
        let pick = (0..work.edges.len()).find_map(|k| {
            let e = &work.edges[k];
            if work.is_new[k] && members.contains(&e.src) && members.contains(&e.dst) {
                running_new(&work, work.emap[k]).map(|f| (k, f))
            } else {
                None
            }
        });
        let (ek, f) = pick.ok_or_else(|| {
            Error::Invariant("a component of the completion has no new edge to exchange".into())
        })?;
        let (t1, t2) = (work.edges[ek].dst, work.edges[f].dst);
        work.edges[ek].dst = t2;
        work.edges[f].dst = t1;
        running.extend(members.iter().copied());

        let sub = work.subgraph(&running)?;
        let connected = target.holds(&sub);
        let covered: HashSet<usize> = (0..work.edges.len())
            .filter(|&k| work.is_new[k] && running.contains(&work.edges[k].src))
            .map(|k| work.emap[k])
            .collect();
        let step = FoldStep {
            component: comp.iter().map(|&v| work.vertices[v].clone()).collect(),
            component_edge: work.edges[ek].id.clone(),
            partner_edge: work.edges[f].id.clone(),
            codomain_edge: h.edge_id(work.emap[ek]).into(),
            connected,
            new_edge_over_every_codomain_edge: covered.len() == h.edge_count(),
        };
        if !(step.connected && step.new_edge_over_every_codomain_edge) {
            return Err(Error::Invariant(format!("fold invariant broken at {step:?}")));
        }
        folds.push(step);
    }

    let result = work.finish(h, n, folds)?;
    if !target.holds(&result.extended_graph) {
        return Err(Error::Invariant("merged graph lacks the demanded connectivity".into()));
    }
    if !resolving_profile(&result.extension).bi_covering || result.extension.vertex_degree() != n {
        return Err(Error::Invariant("merged extension is not bi-covering of the requested degree".into()));
    }
    Ok(result)
}
