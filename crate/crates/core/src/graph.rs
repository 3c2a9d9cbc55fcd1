//! Finite directed multigraphs.
//!
//! Vertices and edges carry opaque string ids but every algorithm works on
//! declaration-order indices. Parallel edges and self-loops are allowed.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::GraphError;
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: String,
    pub src: usize,
    pub dst: usize,
}

#[derive(Clone, Debug, Default)]
pub struct Graph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
    vertex_index: HashMap<String, usize>,
    edge_index: HashMap<String, usize>,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.vertices == other.vertices && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph from vertex ids and `(edge id, source id, target id)` triples.
    pub fn new<V, E, S1, S2, S3>(vertices: V, edges: E) -> Result<Graph, GraphError>
    where
        V: IntoIterator,
        V::Item: Into<String>,
        E: IntoIterator<Item = (S1, S2, S3)>,
        S1: Into<String>,
        S2: Into<String>,
        S3: Into<String>,
    {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut resolved = Vec::new();
        for (id, src, dst) in edges {
            let (id, src, dst) = (id.into(), src.into(), dst.into());
            let lookup = |v: &String| {
                vertex_index.get(v).copied().ok_or_else(|| GraphError::DanglingEndpoint {
                    edge: id.clone(),
                    vertex: v.clone(),
                })
            };
            let (s, t) = (lookup(&src)?, lookup(&dst)?);
            resolved.push(Edge { id, src: s, dst: t });
        }
        Graph::from_parts(vertices, resolved)
    }

    /// Builds a graph from already-resolved parts.
    pub fn from_parts(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Graph, GraphError> {
        let mut vertex_index = HashMap::with_capacity(vertices.len());
        for (i, v) in vertices.iter().enumerate() {
            if vertex_index.insert(v.clone(), i).is_some() {
                return Err(GraphError::DuplicateVertex(v.clone()));
            }
        }
        let mut edge_index = HashMap::with_capacity(edges.len());
        let mut out_edges = vec![Vec::new(); vertices.len()];
        let mut in_edges = vec![Vec::new(); vertices.len()];
        for (k, e) in edges.iter().enumerate() {
            if e.src >= vertices.len() || e.dst >= vertices.len() {
                let bad = if e.src >= vertices.len() { e.src } else { e.dst };
                return Err(GraphError::DanglingEndpoint {
                    edge: e.id.clone(),
                    vertex: format!("#{bad}"),
                });
            }
            if edge_index.insert(e.id.clone(), k).is_some() {
                return Err(GraphError::DuplicateEdge(e.id.clone()));
            }
            out_edges[e.src].push(k);
            in_edges[e.dst].push(k);
        }
        Ok(Graph { vertices, edges, vertex_index, edge_index, out_edges, in_edges })
    }

    /// The graph of a square matrix, with vertices named by `order` (or `0..n`)
    /// and the `k`-th parallel edge from `i` to `j` named `i>j#k`.
    pub fn from_matrix(matrix: &IntMatrix, order: Option<&[String]>) -> Result<Graph, GraphError> {
        assert!(matrix.is_square(), "adjacency matrix must be square");
        let n = matrix.rows();
        let vertices: Vec<String> = match order {
            Some(o) => {
                assert_eq!(o.len(), n, "vertex order length must match the matrix");
                o.to_vec()
            }
            None => (0..n).map(|i| i.to_string()).collect(),
        };
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for k in 0..matrix[(i, j)] {
                    edges.push(Edge {
                        id: format!("{}>{}#{k}", vertices[i], vertices[j]),
                        src: i,
                        dst: j,
                    });
                }
            }
        }
        Graph::from_parts(vertices, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Edge {
        &self.edges[k]
    }

    pub fn vertex_id(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn edge_id(&self, k: usize) -> &str {
        &self.edges[k].id
    }

    pub fn vertex(&self, id: &str) -> Option<usize> {
        self.vertex_index.get(id).copied()
    }

    pub fn edge_by_id(&self, id: &str) -> Option<usize> {
        self.edge_index.get(id).copied()
    }

    /// Outgoing edges of `v` in declaration order.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    /// Incoming edges of `v` in declaration order.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn adjacency_matrix(&self) -> IntMatrix {
        let n = self.vertex_count();
        let mut m = IntMatrix::zeros(n, n);
        for e in &self.edges {
            m[(e.src, e.dst)] += 1;
        }
        m
    }

    pub fn is_essential(&self) -> bool {
        (0..self.vertex_count()).all(|v| !self.out_edges[v].is_empty() && !self.in_edges[v].is_empty())
    }

    /// Maximal essential subgraph, obtained by repeatedly stripping vertices
    /// without an incoming or an outgoing edge.
    pub fn essentialize(&self) -> Graph {
        let (vertices, edges) = self.essential_parts();
        self.induced(&vertices, &edges)
    }

    /// Indices of the vertices and edges that survive essentialization.
    pub fn essential_parts(&self) -> (Vec<usize>, Vec<usize>) {
        let n = self.vertex_count();
        let mut alive = vec![true; n];
        let mut out_deg: Vec<usize> = self.out_edges.iter().map(Vec::len).collect();
        let mut in_deg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut stack: Vec<usize> = (0..n).filter(|&v| out_deg[v] == 0 || in_deg[v] == 0).collect();
        while let Some(v) = stack.pop() {
            if !alive[v] {
                continue;
            }
            alive[v] = false;
            for &e in &self.out_edges[v] {
                let t = self.edges[e].dst;
                if alive[t] && t != v {
                    in_deg[t] -= 1;
                    if in_deg[t] == 0 {
                        stack.push(t);
                    }
                }
            }
            for &e in &self.in_edges[v] {
                let s = self.edges[e].src;
                if alive[s] && s != v {
                    out_deg[s] -= 1;
                    if out_deg[s] == 0 {
                        stack.push(s);
                    }
                }
            }
        }
        let vertices: Vec<usize> = (0..n).filter(|&v| alive[v]).collect();
        let edges: Vec<usize> = (0..self.edge_count())
            .filter(|&k| alive[self.edges[k].src] && alive[self.edges[k].dst])
            .collect();
        (vertices, edges)
    }

    /// Subgraph on the given vertex and edge index lists; both lists must be
    /// increasing and every listed edge must have both endpoints listed.
    pub fn induced(&self, vertices: &[usize], edges: &[usize]) -> Graph {
        let mut remap = vec![usize::MAX; self.vertex_count()];
        for (new, &old) in vertices.iter().enumerate() {
            remap[old] = new;
        }
        let vs = vertices.iter().map(|&v| self.vertices[v].clone()).collect();
        let es = edges
            .iter()
            .map(|&k| {
                let e = &self.edges[k];
                Edge { id: e.id.clone(), src: remap[e.src], dst: remap[e.dst] }
            })
            .collect();
        Graph::from_parts(vs, es).expect("subgraph of a valid graph is valid")
    }

    /// Subgraph spanned by a vertex set: those vertices and every edge between them.
    pub fn subgraph_on(&self, vertices: &[usize]) -> Graph {
        let mut vs = vertices.to_vec();
        vs.sort_unstable();
        let keep: HashSet<usize> = vs.iter().copied().collect();
        let es: Vec<usize> = (0..self.edge_count())
            .filter(|&k| keep.contains(&self.edges[k].src) && keep.contains(&self.edges[k].dst))
            .collect();
        self.induced(&vs, &es)
    }

    /// All paths with exactly `len` edges (`len >= 1`), as edge-index sequences in
    /// lexicographic order.
    pub fn paths(&self, len: usize) -> Vec<Vec<usize>> {
        assert!(len >= 1);
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(len);
        for e in 0..self.edge_count() {
            current.push(e);
            self.extend_paths(&mut current, len, &mut out);
            current.pop();
        }
        out
    }

    fn extend_paths(&self, current: &mut Vec<usize>, len: usize, out: &mut Vec<Vec<usize>>) {
        if current.len() == len {
            out.push(current.clone());
            return;
        }
        let last = *current.last().unwrap();
        for &e in &self.out_edges[self.edges[last].dst] {
            current.push(e);
            self.extend_paths(current, len, out);
            current.pop();
        }
    }

    /// Closed paths (cycles, not necessarily simple) with exactly `len` edges,
    /// listed once per starting edge position.
    pub fn closed_paths(&self, len: usize) -> Vec<Vec<usize>> {
        assert!(len >= 1);
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(len);
        for e in 0..self.edge_count() {
            current.push(e);
            self.extend_closed(&mut current, len, self.edges[e].src, &mut out);
            current.pop();
        }
        out
    }

    fn extend_closed(&self, current: &mut Vec<usize>, len: usize, start: usize, out: &mut Vec<Vec<usize>>) {
        let last = *current.last().unwrap();
        let at = self.edges[last].dst;
        if current.len() == len {
            if at == start {
                out.push(current.clone());
            }
            return;
        }
        for &e in &self.out_edges[at] {
            current.push(e);
            self.extend_closed(current, len, start, out);
            current.pop();
        }
    }

    /// True when the edge sequence is a path in this graph.
    pub fn is_path(&self, edges: &[usize]) -> bool {
        edges.windows(2).all(|w| self.edges[w[0]].dst == self.edges[w[1]].src)
            && edges.iter().all(|&e| e < self.edge_count())
    }
}

/// Produces an id based on `base` that `taken` does not contain.
pub(crate) fn fresh_id(base: String, taken: &HashSet<String>) -> String {
    if !taken.contains(&base) {
        return base;
    }
    (1..)
        .map(|k| format!("{base}'{k}"))
        .find(|c| !taken.contains(c))
        .expect("unbounded search")
}

/// A path in a graph: a start vertex plus an edge sequence (possibly empty).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Path {
    pub start: usize,
    pub edges: Vec<usize>,
}

/// The `N`-th higher graph together with the correspondence between its
/// vertices/edges and paths in the underlying graph.
#[derive(Clone, Debug)]
pub struct HigherGraph {
    pub graph: Graph,
    pub order: usize,
    /// Path of length `order - 1` represented by each vertex.
    pub vertex_paths: Vec<Path>,
    /// Path of length `order` represented by each edge.
    pub edge_paths: Vec<Path>,
    vertex_lookup: HashMap<Path, usize>,
    edge_lookup: HashMap<Vec<usize>, usize>,
}

impl HigherGraph {
    pub fn vertex_of(&self, path: &Path) -> Option<usize> {
        self.vertex_lookup.get(path).copied()
    }

    pub fn edge_of(&self, edges: &[usize]) -> Option<usize> {
        self.edge_lookup.get(edges).copied()
    }
}

fn path_id(g: &Graph, edges: &[usize]) -> String {
    edges.iter().map(|&e| g.edge_id(e)).collect::<Vec<_>>().join(".")
}

/// `N`-th higher graph: for `N >= 2` its vertices are the paths of length `N-1`
/// and its edges the paths of length `N`, each edge running from its initial
/// to its terminal `(N-1)`-subpath. `N = 1` gives the graph itself.
pub fn higher_graph(g: &Graph, order: usize) -> HigherGraph {
    assert!(order >= 1, "higher graph order must be positive");
    if order == 1 {
        let vertex_paths: Vec<Path> =
            (0..g.vertex_count()).map(|v| Path { start: v, edges: Vec::new() }).collect();
        let edge_paths: Vec<Path> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(k, e)| Path { start: e.src, edges: vec![k] })
            .collect();
        let vertex_lookup = vertex_paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let edge_lookup = (0..g.edge_count()).map(|k| (vec![k], k)).collect();
        return HigherGraph {
            graph: g.clone(),
            order,
            vertex_paths,
            edge_paths,
            vertex_lookup,
            edge_lookup,
        };
    }
    let vpaths = g.paths(order - 1);
    let epaths = g.paths(order);
    let mut taken = HashSet::new();
    let mut vertices = Vec::with_capacity(vpaths.len());
    let mut vertex_by_edges: HashMap<Vec<usize>, usize> = HashMap::new();
    for (i, p) in vpaths.iter().enumerate() {
        let id = fresh_id(path_id(g, p), &taken);
        taken.insert(id.clone());
        vertices.push(id);
        vertex_by_edges.insert(p.clone(), i);
    }
    let mut taken = HashSet::new();
    let mut edges = Vec::with_capacity(epaths.len());
    let mut edge_lookup = HashMap::new();
    for (k, p) in epaths.iter().enumerate() {
        let id = fresh_id(path_id(g, p), &taken);
        taken.insert(id.clone());
        let src = vertex_by_edges[&p[..order - 1]];
        let dst = vertex_by_edges[&p[1..]];
        edges.push(Edge { id, src, dst });
        edge_lookup.insert(p.clone(), k);
    }
    let graph = Graph::from_parts(vertices, edges).expect("higher graph ids are unique");
    let vertex_paths: Vec<Path> = vpaths
        .into_iter()
        .map(|p| Path { start: g.edge(p[0]).src, edges: p })
        .collect();
    let edge_paths: Vec<Path> = epaths
        .into_iter()
        .map(|p| Path { start: g.edge(p[0]).src, edges: p })
        .collect();
    let vertex_lookup = vertex_paths.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    HigherGraph { graph, order, vertex_paths, edge_paths, vertex_lookup, edge_lookup }
}
