//! Edge-labeled graphs and the pair-graph machinery behind closing checks,
//! conjugacy checks and preimage counts.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::connectivity::strongly_connected_components;
use crate::graph::{Edge, Graph};

/// A graph whose edges carry symbols. The label map sends each bi-infinite
/// path to a bi-infinite symbol sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    pub graph: Graph,
    pub labels: Vec<String>,
}

impl LabeledGraph {
    pub fn new(graph: Graph, labels: Vec<String>) -> Self {
        assert_eq!(graph.edge_count(), labels.len(), "one label per edge");
        LabeledGraph { graph, labels }
    }

    /// Restriction to the essential part; only essential edges lie on points.
    pub fn essential(&self) -> LabeledGraph {
        let (vs, es) = self.graph.essential_parts();
        LabeledGraph {
            graph: self.graph.induced(&vs, &es),
            labels: es.iter().map(|&k| self.labels[k].clone()).collect(),
        }
    }

    pub fn reversed(&self) -> LabeledGraph {
        let edges = self
            .graph
            .edges()
            .iter()
            .map(|e| Edge { id: e.id.clone(), src: e.dst, dst: e.src })
            .collect();
        LabeledGraph {
            graph: Graph::from_parts(self.graph.vertices().to_vec(), edges).expect("reversal keeps ids"),
            labels: self.labels.clone(),
        }
    }

    pub fn is_right_resolving(&self) -> bool {
        (0..self.graph.vertex_count()).all(|v| {
            let mut seen = BTreeSet::new();
            self.graph.out_edges(v).iter().all(|&e| seen.insert(&self.labels[e]))
        })
    }

    pub fn label_of(&self, path: &[usize]) -> Vec<String> {
        path.iter().map(|&e| self.labels[e].clone()).collect()
    }

    /// Label words of length `n >= 1` along paths of the essential part.
    pub fn words(&self, n: usize) -> BTreeSet<Vec<String>> {
        assert!(n >= 1);
        let ess = self.essential();
        let g = &ess.graph;
        let mut level: BTreeMap<Vec<String>, BTreeSet<usize>> = BTreeMap::new();
        for (k, e) in g.edges().iter().enumerate() {
            level.entry(vec![ess.labels[k].clone()]).or_default().insert(e.dst);
        }
        for _ in 1..n {
            let mut next: BTreeMap<Vec<String>, BTreeSet<usize>> = BTreeMap::new();
            for (w, ends) in &level {
                for &v in ends {
                    for &e in g.out_edges(v) {
                        let mut w2 = w.clone();
                        w2.push(ess.labels[e].clone());
                        next.entry(w2).or_default().insert(g.edge(e).dst);
                    }
                }
            }
            level = next;
        }
        level.into_keys().collect()
    }

    /// Distinct label sequences of closed essential paths of length `p`, each
    /// read from position 0.
    pub fn periodic_words(&self, p: usize) -> BTreeSet<Vec<String>> {
        let ess = self.essential();
        ess.graph.closed_paths(p).iter().map(|c| ess.label_of(c)).collect()
    }

    /// True when distinct bi-infinite paths always carry distinct labels, so
    /// that the label map is a conjugacy onto its image.
    pub fn is_conjugacy(&self) -> bool {
        let ess = self.essential();
        let pairs = PairGraph::build(&ess.graph, &ess.labels);
        let alive = pairs.essential_states();
        !pairs.edges.iter().any(|pe| pe.first != pe.second && alive[pe.from] && alive[pe.to])
    }
}

/// Pairs of equally labeled edges, as edges between pairs of vertices.
pub(crate) struct PairGraph {
    pub n: usize,
    pub edges: Vec<PairEdge>,
    pub out: Vec<Vec<usize>>,
    pub inc: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct PairEdge {
    pub from: usize,
    pub to: usize,
    pub first: usize,
    pub second: usize,
}

impl PairGraph {
    pub fn state(&self, u: usize, w: usize) -> usize {
        u * self.n + w
    }

    pub fn build(g: &Graph, labels: &[String]) -> PairGraph {
        let n = g.vertex_count();
        let mut edges = Vec::new();
        for u in 0..n {
            for w in 0..n {
                for &e in g.out_edges(u) {
                    for &f in g.out_edges(w) {
                        if labels[e] == labels[f] {
                            edges.push(PairEdge {
                                from: u * n + w,
                                to: g.edge(e).dst * n + g.edge(f).dst,
                                first: e,
                                second: f,
                            });
                        }
                    }
                }
            }
        }
        let mut out = vec![Vec::new(); n * n];
        let mut inc = vec![Vec::new(); n * n];
        for (k, pe) in edges.iter().enumerate() {
            out[pe.from].push(k);
            inc[pe.to].push(k);
        }
        PairGraph { n, edges, out, inc }
    }

    /// States with an infinite forward path.
    pub fn forward_alive(&self) -> Vec<bool> {
        prune(self.n * self.n, &self.edges, &self.out, |pe| pe.to, |pe| pe.from, &self.inc)
    }

    fn backward_alive(&self) -> Vec<bool> {
        prune(self.n * self.n, &self.edges, &self.inc, |pe| pe.from, |pe| pe.to, &self.out)
    }

    /// States on a bi-infinite path.
    pub fn essential_states(&self) -> Vec<bool> {
        let f = self.forward_alive();
        let b = self.backward_alive();
        f.iter().zip(&b).map(|(x, y)| *x && *y).collect()
    }
}

/// Repeatedly removes states without a successor among the remaining states.
fn prune(
    states: usize,
    edges: &[PairEdge],
    forward: &[Vec<usize>],
    head: impl Fn(&PairEdge) -> usize,
    tail: impl Fn(&PairEdge) -> usize,
    backward: &[Vec<usize>],
) -> Vec<bool> {
    let mut alive = vec![true; states];
    let mut degree: Vec<usize> = forward.iter().map(Vec::len).collect();
    let mut stack: Vec<usize> = (0..states).filter(|&s| degree[s] == 0).collect();
    while let Some(s) = stack.pop() {
        if !alive[s] {
            continue;
        }
        alive[s] = false;
        for &k in &backward[s] {
            let t = tail(&edges[k]);
            debug_assert_eq!(head(&edges[k]), s);
            if alive[t] {
                degree[t] -= 1;
                if degree[t] == 0 {
                    stack.push(t);
                }
            }
        }
    }
    alive
}

/// Number of bi-infinite paths whose labels spell the periodic sequence with
/// period word `y`, or `None` when there are infinitely many.
pub fn count_periodic_preimages(lg: &LabeledGraph, y: &[String]) -> Option<usize> {
    let g = &lg.graph;
    let n = g.vertex_count();
    let p = y.len();
    // transfer[u][w]: number of paths from u to w spelling y.
    let mut transfer: Vec<HashMap<usize, u64>> = Vec::with_capacity(n);
    for u in 0..n {
        let mut current: HashMap<usize, u64> = HashMap::from([(u, 1)]);
        for symbol in y.iter().take(p) {
            let mut next: HashMap<usize, u64> = HashMap::new();
            for (&v, &c) in &current {
                for &e in g.out_edges(v) {
                    if &lg.labels[e] == symbol {
                        let slot = next.entry(g.edge(e).dst).or_insert(0);
                        *slot = slot.saturating_add(c);
                    }
                }
            }
            current = next;
        }
        transfer.push(current);
    }
    let succ: Vec<Vec<usize>> = transfer.iter().map(|m| m.keys().copied().collect()).collect();
    let comps = strongly_connected_components(n, &succ);
    let mut comp_of = vec![0; n];
    for (c, members) in comps.iter().enumerate() {
        for &v in members {
            comp_of[v] = c;
        }
    }
    let cyclic: Vec<bool> = comps
        .iter()
        .map(|c| c.len() > 1 || transfer[c[0]].contains_key(&c[0]))
        .collect();
    let mut total = 0;
    for (c, members) in comps.iter().enumerate() {
        if !cyclic[c] {
            continue;
        }
        // A cyclic component contributes finitely many points only as a simple cycle.
        for &v in members {
            let inside: u64 = transfer[v].iter().filter(|(w, _)| comp_of[**w] == c).map(|(_, &m)| m).sum();
            if inside != 1 {
                return None;
            }
        }
        total += members.len();
    }
    // A path from one cyclic component to another yields infinitely many points.
    let cc = comps.len();
    let mut comp_succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); cc];
    for u in 0..n {
        for &w in &succ[u] {
            if comp_of[u] != comp_of[w] {
                comp_succ[comp_of[u]].insert(comp_of[w]);
            }
        }
    }
    for start in (0..cc).filter(|&c| cyclic[c]) {
        let mut seen = vec![false; cc];
        let mut stack: Vec<usize> = comp_succ[start].iter().copied().collect();
        while let Some(c) = stack.pop() {
            if seen[c] {
                continue;
            }
            seen[c] = true;
            if cyclic[c] {
                return None;
            }
            stack.extend(comp_succ[c].iter().copied());
        }
    }
    Some(total)
}
