//! Graph homomorphisms, their resolving/covering structure and the matrix
//! relations with subamalgamation matrices.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, HomError, Result};
use crate::graph::{higher_graph, Graph, HigherGraph, Path};
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    domain: Graph,
    codomain: Graph,
    vertex_map: Vec<usize>,
    edge_map: Vec<usize>,
}

impl Homomorphism {
    /// Validates index-level maps against adjacency.
    pub fn new(domain: Graph, codomain: Graph, vertex_map: Vec<usize>, edge_map: Vec<usize>) -> Result<Self, HomError> {
        if vertex_map.len() < domain.vertex_count() {
            return Err(HomError::MissingVertex(domain.vertex_id(vertex_map.len()).into()));
        }
        if vertex_map.len() > domain.vertex_count() {
            return Err(HomError::UnknownVertex(format!("#{}", domain.vertex_count())));
        }
        if edge_map.len() < domain.edge_count() {
            return Err(HomError::MissingEdge(domain.edge_id(edge_map.len()).into()));
        }
        if edge_map.len() > domain.edge_count() {
            return Err(HomError::UnknownEdge(format!("#{}", domain.edge_count())));
        }
        if let Some(&bad) = vertex_map.iter().find(|&&v| v >= codomain.vertex_count()) {
            return Err(HomError::UnknownVertex(format!("#{bad}")));
        }
        if let Some(&bad) = edge_map.iter().find(|&&e| e >= codomain.edge_count()) {
            return Err(HomError::UnknownEdge(format!("#{bad}")));
        }
        for (k, e) in domain.edges().iter().enumerate() {
            let b = codomain.edge(edge_map[k]);
            if vertex_map[e.src] != b.src || vertex_map[e.dst] != b.dst {
                return Err(HomError::Adjacency {
                    edge: e.id.clone(),
                    src: domain.vertex_id(e.src).into(),
                    dst: domain.vertex_id(e.dst).into(),
                    image: b.id.clone(),
                    image_src: codomain.vertex_id(b.src).into(),
                    image_dst: codomain.vertex_id(b.dst).into(),
                    mapped_src: codomain.vertex_id(vertex_map[e.src]).into(),
                    mapped_dst: codomain.vertex_id(vertex_map[e.dst]).into(),
                });
            }
        }
        Ok(Homomorphism { domain, codomain, vertex_map, edge_map })
    }

    /// Validates id-level maps, which must be total on the domain.
    pub fn from_maps(
        domain: Graph,
        codomain: Graph,
        vertex_map: &BTreeMap<String, String>,
        edge_map: &BTreeMap<String, String>,
    ) -> Result<Self, HomError> {
        for k in vertex_map.keys() {
            domain.vertex(k).ok_or_else(|| HomError::UnknownVertex(k.clone()))?;
        }
        for k in edge_map.keys() {
            domain.edge_by_id(k).ok_or_else(|| HomError::UnknownEdge(k.clone()))?;
        }
        let vmap = domain
            .vertices()
            .iter()
            .map(|v| {
                let img = vertex_map.get(v).ok_or_else(|| HomError::MissingVertex(v.clone()))?;
                codomain.vertex(img).ok_or_else(|| HomError::UnknownVertex(img.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let emap = domain
            .edges()
            .iter()
            .map(|e| {
                let img = edge_map.get(&e.id).ok_or_else(|| HomError::MissingEdge(e.id.clone()))?;
                codomain.edge_by_id(img).ok_or_else(|| HomError::UnknownEdge(img.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Homomorphism::new(domain, codomain, vmap, emap)
    }

    pub fn identity(g: &Graph) -> Self {
        Homomorphism {
            domain: g.clone(),
            codomain: g.clone(),
            vertex_map: (0..g.vertex_count()).collect(),
            edge_map: (0..g.edge_count()).collect(),
        }
    }

    pub fn domain(&self) -> &Graph {
        &self.domain
    }

    pub fn codomain(&self) -> &Graph {
        &self.codomain
    }

    pub fn vertex_map(&self) -> &[usize] {
        &self.vertex_map
    }

    pub fn edge_map(&self) -> &[usize] {
        &self.edge_map
    }

    pub fn vertex_image(&self, v: usize) -> usize {
        self.vertex_map[v]
    }

    pub fn edge_image(&self, e: usize) -> usize {
        self.edge_map[e]
    }

    pub fn vertex_map_by_id(&self) -> BTreeMap<String, String> {
        self.domain
            .vertices()
            .iter()
            .zip(&self.vertex_map)
            .map(|(v, &w)| (v.clone(), self.codomain.vertex_id(w).to_string()))
            .collect()
    }

    pub fn edge_map_by_id(&self) -> BTreeMap<String, String> {
        self.domain
            .edges()
            .iter()
            .zip(&self.edge_map)
            .map(|(e, &b)| (e.id.clone(), self.codomain.edge_id(b).to_string()))
            .collect()
    }

    /// Vertex fibers `Φ_V^{-1}(I)` in declaration order, indexed by codomain vertex.
    pub fn vertex_fibers(&self) -> Vec<Vec<usize>> {
        let mut fibers = vec![Vec::new(); self.codomain.vertex_count()];
        for (v, &w) in self.vertex_map.iter().enumerate() {
            fibers[w].push(v);
        }
        fibers
    }

    /// Edge fibers `Φ_E^{-1}(b)` in declaration order, indexed by codomain edge.
    pub fn edge_fibers(&self) -> Vec<Vec<usize>> {
        let mut fibers = vec![Vec::new(); self.codomain.edge_count()];
        for (e, &b) in self.edge_map.iter().enumerate() {
            fibers[b].push(e);
        }
        fibers
    }

    /// Maximum size of a vertex fiber.
    pub fn vertex_degree(&self) -> usize {
        self.vertex_fibers().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn subamalgamation_matrix(&self) -> SubamalgamationMatrix {
        SubamalgamationMatrix::from_vertex_map(&self.vertex_map, self.codomain.vertex_count())
    }

    /// True when `other` is this map restricted to a subgraph: every vertex and
    /// edge of `other`'s domain exists here (by id) with the same image.
    pub fn extends(&self, other: &Homomorphism) -> bool {
        if self.codomain != other.codomain {
            return false;
        }
        let g = &other.domain;
        g.vertices().iter().enumerate().all(|(v, id)| {
            self.domain.vertex(id).map(|w| self.vertex_map[w]) == Some(other.vertex_map[v])
        }) && g.edges().iter().enumerate().all(|(k, e)| {
            self.domain.edge_by_id(&e.id).is_some_and(|j| {
                let mine = self.domain.edge(j);
                self.edge_map[j] == other.edge_map[k]
                    && self.domain.vertex_id(mine.src) == g.vertex_id(e.src)
                    && self.domain.vertex_id(mine.dst) == g.vertex_id(e.dst)
            })
        })
    }

    /// Restriction to the subgraph made of the first `vertices` vertices and the
    /// first `edges` edges of the domain.
    pub fn restrict_to_prefix(&self, vertices: usize, edges: usize) -> Result<Homomorphism> {
        let vs: Vec<usize> = (0..vertices).collect();
        let es: Vec<usize> = (0..edges).collect();
        if self.domain.edges()[..edges].iter().any(|e| e.src >= vertices || e.dst >= vertices) {
            return Err(Error::Invariant("prefix restriction leaves dangling edges".into()));
        }
        let g = self.domain.induced(&vs, &es);
        Ok(Homomorphism::new(
            g,
            self.codomain.clone(),
            self.vertex_map[..vertices].to_vec(),
            self.edge_map[..edges].to_vec(),
        )?)
    }

    /// Image of a domain path.
    pub fn map_path(&self, edges: &[usize]) -> Vec<usize> {
        edges.iter().map(|&e| self.edge_map[e]).collect()
    }
}

/// Witness for a failed resolving or covering flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResolvingWitness {
    /// Two edges at `vertex` with the same image.
    Collision { vertex: String, edges: (String, String), image: String },
    /// A codomain edge at the image of `vertex` with no preimage at `vertex`.
    Missing { vertex: String, codomain_edge: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ResolvingProfile {
    pub right_resolving: bool,
    pub left_resolving: bool,
    pub right_covering: bool,
    pub left_covering: bool,
    pub bi_resolving: bool,
    pub bi_covering: bool,
    pub witnesses: BTreeMap<String, ResolvingWitness>,
}

#[derive(Clone, Copy)]
enum Side {
    Out,
    In,
}

fn check_side(phi: &Homomorphism, side: Side) -> (Option<ResolvingWitness>, Option<ResolvingWitness>) {
    let (g, h) = (&phi.domain, &phi.codomain);
    let mut resolving_failure = None;
    let mut covering_failure = None;
    for v in 0..g.vertex_count() {
        let (mine, theirs) = match side {
            Side::Out => (g.out_edges(v), h.out_edges(phi.vertex_map[v])),
            Side::In => (g.in_edges(v), h.in_edges(phi.vertex_map[v])),
        };
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for &e in mine {
            let b = phi.edge_map[e];
            if let Some(&prev) = seen.get(&b) {
                if resolving_failure.is_none() {
                    resolving_failure = Some(ResolvingWitness::Collision {
                        vertex: g.vertex_id(v).into(),
                        edges: (g.edge_id(prev).into(), g.edge_id(e).into()),
                        image: h.edge_id(b).into(),
                    });
                }
            } else {
                seen.insert(b, e);
            }
        }
        if covering_failure.is_none() {
            if let Some(w) = &resolving_failure {
                covering_failure = Some(w.clone());
            } else if let Some(&b) = theirs.iter().find(|b| !seen.contains_key(b)) {
                covering_failure = Some(ResolvingWitness::Missing {
                    vertex: g.vertex_id(v).into(),
                    codomain_edge: h.edge_id(b).into(),
                });
            }
        }
    }
    (resolving_failure, covering_failure)
}

pub fn resolving_profile(phi: &Homomorphism) -> ResolvingProfile {
    let (rr, rc) = check_side(phi, Side::Out);
    let (lr, lc) = check_side(phi, Side::In);
    let mut witnesses = BTreeMap::new();
    let mut flag = |name: &str, w: Option<ResolvingWitness>| -> bool {
        match w {
            Some(w) => {
                witnesses.insert(name.to_string(), w);
                false
            }
            None => true,
        }
    };
    let right_resolving = flag("right_resolving", rr);
    let left_resolving = flag("left_resolving", lr);
    let right_covering = flag("right_covering", rc);
    let left_covering = flag("left_covering", lc);
    ResolvingProfile {
        right_resolving,
        left_resolving,
        right_covering,
        left_covering,
        bi_resolving: right_resolving && left_resolving,
        bi_covering: right_covering && left_covering,
        witnesses,
    }
}

/// 0-1 matrix with exactly one 1 in each row, indexed by `V(G) x V(H)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubamalgamationMatrix(IntMatrix);

impl SubamalgamationMatrix {
    pub fn new(m: IntMatrix) -> Result<Self> {
        for i in 0..m.rows() {
            let row = m.row(i);
            if row.iter().any(|&x| x > 1) || row.iter().sum::<u64>() != 1 {
                return Err(Error::Format(format!(
                    "row {i} of a subamalgamation matrix must contain exactly one 1 and otherwise 0"
                )));
            }
        }
        Ok(SubamalgamationMatrix(m))
    }

    pub fn from_vertex_map(vertex_map: &[usize], codomain_size: usize) -> Self {
        let mut m = IntMatrix::zeros(vertex_map.len(), codomain_size);
        for (i, &v) in vertex_map.iter().enumerate() {
            m[(i, v)] = 1;
        }
        SubamalgamationMatrix(m)
    }

    pub fn vertex_map(&self) -> Vec<usize> {
        (0..self.0.rows())
            .map(|i| self.0.row(i).iter().position(|&x| x == 1).expect("one 1 per row"))
            .collect()
    }

    /// At least one 1 in every column.
    pub fn is_amalgamation(&self) -> bool {
        self.0.col_sums().iter().all(|&s| s >= 1)
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    /// `A_G S = S A_H`
    pub right_equal: bool,
    /// `S^T A_G = A_H S^T`
    pub left_equal: bool,
    /// `A_G S <= S A_H`
    pub right_le: bool,
    /// `S^T A_G <= A_H S^T`
    pub left_le: bool,
    #[serde(serialize_with = "ser_matrix")]
    pub ag_s: IntMatrix,
    #[serde(serialize_with = "ser_matrix")]
    pub s_ah: IntMatrix,
    #[serde(serialize_with = "ser_matrix")]
    pub st_ag: IntMatrix,
    #[serde(serialize_with = "ser_matrix")]
    pub ah_st: IntMatrix,
}

fn ser_matrix<S: serde::Serializer>(m: &IntMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_rows().serialize(s)
}

impl RelationReport {
    pub fn equalities(&self) -> bool {
        self.right_equal && self.left_equal
    }

    pub fn inequalities(&self) -> bool {
        self.right_le && self.left_le
    }
}

pub fn matrix_relations(g: &Graph, h: &Graph, s: &SubamalgamationMatrix) -> Result<RelationReport> {
    let s = s.matrix();
    if s.rows() != g.vertex_count() || s.cols() != h.vertex_count() {
        return Err(Error::Dimension(format!(
            "S is {}x{} but the graphs have {} and {} vertices",
            s.rows(),
            s.cols(),
            g.vertex_count(),
            h.vertex_count()
        )));
    }
    let (ag, ah) = (g.adjacency_matrix(), h.adjacency_matrix());
    let st = s.transpose();
    let ag_s = ag.mul(s).expect("dimensions checked");
    let s_ah = s.mul(&ah).expect("dimensions checked");
    let st_ag = st.mul(&ag).expect("dimensions checked");
    let ah_st = ah.mul(&st).expect("dimensions checked");
    Ok(RelationReport {
        right_equal: ag_s == s_ah,
        left_equal: st_ag == ah_st,
        right_le: ag_s.entrywise_le(&s_ah),
        left_le: st_ag.entrywise_le(&ah_st),
        ag_s,
        s_ah,
        st_ag,
        ah_st,
    })
}

/// `Φ^{[N]}` together with the path indices of both higher graphs.
#[derive(Clone, Debug)]
pub struct HigherHomomorphism {
    pub map: Homomorphism,
    pub domain: HigherGraph,
    pub codomain: HigherGraph,
}

/// The homomorphism `G^{[N]} -> H^{[N]}` sending each path to its image path.
pub fn higher_homomorphism(phi: &Homomorphism, order: usize) -> HigherHomomorphism {
    let gd = higher_graph(&phi.domain, order);
    let hd = higher_graph(&phi.codomain, order);
    let image = |p: &Path| Path { start: phi.vertex_map[p.start], edges: phi.map_path(&p.edges) };
    let vmap = gd
        .vertex_paths
        .iter()
        .map(|p| hd.vertex_of(&image(p)).expect("image of a path is a path"))
        .collect();
    let emap = gd
        .edge_paths
        .iter()
        .map(|p| hd.edge_of(&phi.map_path(&p.edges)).expect("image of a path is a path"))
        .collect();
    let map = Homomorphism::new(gd.graph.clone(), hd.graph.clone(), vmap, emap)
        .expect("higher homomorphism respects adjacency");
    HigherHomomorphism { map, domain: gd, codomain: hd }
}
