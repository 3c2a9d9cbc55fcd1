//! Existence and construction of bi-covering and bi-resolving homomorphisms.
//!
//! A bi-covering homomorphism `G -> H` exists exactly when some
//! subamalgamation matrix `S` satisfies `A_G S = S A_H` and
//! `S^T A_G = A_H S^T`; a bi-resolving one exists exactly when the same holds
//! with `<=`. The search below looks for such an `S`. Given one, the edge map
//! is built fiber block by fiber block: each block `A_{I,J}` of the domain
//! adjacency matrix (rows over the fiber of `I`, columns over the fiber of `J`)
//! has constant row and column sums `b_{I,J}`, splits into `b_{I,J}`
//! permutation matrices, and each permutation is sent to one edge `I -> J`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Error, Hypothesis, Result};
use crate::graph::{fresh_id, Edge, Graph};
use crate::homomorphism::{matrix_relations, Homomorphism, SubamalgamationMatrix};
use crate::matrix::IntMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationMode {
    /// `A_G S = S A_H` and `S^T A_G = A_H S^T` (bi-covering).
    Equality,
    /// `A_G S <= S A_H` and `S^T A_G <= A_H S^T` (bi-resolving).
    Inequality,
}

struct Search<'a> {
    ag: &'a IntMatrix,
    ah: &'a IntMatrix,
    mode: RelationMode,
    n: usize,
    m: usize,
    assign: Vec<usize>,
    // row_acc[i][J] = sum of a_{i,j} over assigned j with assign[j] = J
    row_acc: Vec<Vec<u64>>,
    // col_acc[I][j] = sum of a_{i,j} over assigned i with assign[i] = I
    col_acc: Vec<Vec<u64>>,
    fiber_size: Vec<usize>,
    out_g: Vec<u64>,
    in_g: Vec<u64>,
    out_h: Vec<u64>,
    in_h: Vec<u64>,
    deadline: Option<(Instant, Duration)>,
    nodes: u64,
}

impl Search<'_> {
    fn degree_compatible(&self, v: usize, target: usize) -> bool {
        match self.mode {
            RelationMode::Equality => self.out_g[v] == self.out_h[target] && self.in_g[v] == self.in_h[target],
            RelationMode::Inequality => self.out_g[v] <= self.out_h[target] && self.in_g[v] <= self.in_h[target],
        }
    }

    fn apply(&mut self, k: usize, target: usize, sign: bool) {
        let upd = |x: &mut u64, d: u64| {
            if sign {
                *x += d
            } else {
                *x -= d
            }
        };
        // Row entries gaining the new column vertex k.
        for i in 0..k {
            let d = self.ag[(i, k)];
            upd(&mut self.row_acc[i][target], d);
        }
        // Row k itself, over all assigned columns including k.
        for j in 0..k {
            let d = self.ag[(k, j)];
            upd(&mut self.row_acc[k][self.assign[j]], d);
        }
        let d = self.ag[(k, k)];
        upd(&mut self.row_acc[k][target], d);
        // Column entries gaining the new row vertex k.
        for j in 0..k {
            let d = self.ag[(k, j)];
            upd(&mut self.col_acc[target][j], d);
        }
        for i in 0..k {
            let d = self.ag[(i, k)];
            upd(&mut self.col_acc[self.assign[i]][k], d);
        }
        upd(&mut self.col_acc[target][k], d);
        if sign {
            self.fiber_size[target] += 1;
        } else {
            self.fiber_size[target] -= 1;
        }
    }

    fn partial_ok(&self, k: usize, target: usize) -> bool {
        let b = self.ah;
        for i in 0..=k {
            if self.row_acc[i][target] > b[(self.assign[i], target)] {
                return false;
            }
            if self.col_acc[target][i] > b[(target, self.assign[i])] {
                return false;
            }
        }
        for x in 0..self.m {
            if self.row_acc[k][x] > b[(target, x)] || self.col_acc[x][k] > b[(x, target)] {
                return false;
            }
        }
        if self.mode == RelationMode::Equality {
            let remaining = self.n - k - 1;
            for i in 0..self.m {
                for j in 0..self.m {
                    if b[(i, j)] != 0 && self.fiber_size[i].abs_diff(self.fiber_size[j]) > remaining {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn complete_ok(&self) -> bool {
        let b = self.ah;
        for i in 0..self.n {
            for x in 0..self.m {
                let want = b[(self.assign[i], x)];
                let got = self.row_acc[i][x];
                let col_want = b[(x, self.assign[i])];
                let col_got = self.col_acc[x][i];
                let ok = match self.mode {
                    RelationMode::Equality => got == want && col_got == col_want,
                    RelationMode::Inequality => got <= want && col_got <= col_want,
                };
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    fn dfs(&mut self, k: usize) -> Result<bool> {
        self.nodes += 1;
        if let Some((deadline, budget)) = self.deadline {
            if self.nodes % 256 == 0 && Instant::now() > deadline {
                return Err(Error::Timeout(budget));
            }
        }
        if k == self.n {
            return Ok(self.complete_ok());
        }
        for target in 0..self.m {
            if !self.degree_compatible(k, target) {
                continue;
            }
            self.assign[k] = target;
            self.apply(k, target, true);
            if self.partial_ok(k, target) && self.dfs(k + 1)? {
                return Ok(true);
            }
            self.apply(k, target, false);
        }
        Ok(false)
    }
}

/// Depth-first search for a subamalgamation matrix satisfying the relations of
/// `mode`. Vertices of `g` are assigned in declaration order, candidates tried
/// in declaration order, so the first witness found is canonical. `Ok(None)`
/// means no such matrix exists.
pub fn find_subamalgamation(
    g: &Graph,
    h: &Graph,
    mode: RelationMode,
    timeout: Option<Duration>,
) -> Result<Option<SubamalgamationMatrix>> {
    let (ag, ah) = (g.adjacency_matrix(), h.adjacency_matrix());
    let n = g.vertex_count();
    let m = h.vertex_count();
    if n == 0 {
        return Ok(Some(SubamalgamationMatrix::from_vertex_map(&[], m)));
    }
    let mut search = Search {
        ag: &ag,
        ah: &ah,
        mode,
        n,
        m,
        assign: vec![0; n],
        row_acc: vec![vec![0; m]; n],
        col_acc: vec![vec![0; n]; m],
        fiber_size: vec![0; m],
        out_g: ag.row_sums(),
        in_g: ag.col_sums(),
        out_h: ah.row_sums(),
        in_h: ah.col_sums(),
        deadline: timeout.map(|t| (Instant::now() + t, t)),
        nodes: 0,
    };
    if search.dfs(0)? {
        let s = SubamalgamationMatrix::from_vertex_map(&search.assign, m);
        let rel = matrix_relations(g, h, &s)?;
        let holds = match mode {
            RelationMode::Equality => rel.equalities(),
            RelationMode::Inequality => rel.inequalities(),
        };
        if !holds {
            return Err(Error::Invariant("search accepted a matrix that fails the relations".into()));
        }
        Ok(Some(s))
    } else {
        Ok(None)
    }
}

/// A permutation of `0..n`, `perm[row] = column`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn to_matrix(&self) -> IntMatrix {
        let n = self.0.len();
        let mut m = IntMatrix::zeros(n, n);
        for (r, &c) in self.0.iter().enumerate() {
            m[(r, c)] = 1;
        }
        m
    }
}

fn try_kuhn(r: usize, adj: &[Vec<usize>], seen: &mut [bool], match_col: &mut [Option<usize>]) -> bool {
    for &c in &adj[r] {
        if seen[c] {
            continue;
        }
        seen[c] = true;
        if match_col[c].is_none_or(|other| try_kuhn(other, adj, seen, match_col)) {
            match_col[c] = Some(r);
            return true;
        }
    }
    false
}

/// Whether `rows` can be perfectly matched into `cols` using the support of `a`.
fn has_perfect_matching(a: &IntMatrix, rows: &[usize], cols: &[usize]) -> bool {
    if rows.len() != cols.len() {
        return false;
    }
    let adj: Vec<Vec<usize>> = rows
        .iter()
        .map(|&r| (0..cols.len()).filter(|&c| a[(r, cols[c])] > 0).collect())
        .collect();
    let mut match_col = vec![None; cols.len()];
    (0..rows.len()).all(|r| {
        let mut seen = vec![false; cols.len()];
        try_kuhn(r, &adj, &mut seen, &mut match_col)
    })
}

/// Lexicographically least perfect matching in the support of `a`.
fn least_perfect_matching(a: &IntMatrix) -> Option<Permutation> {
    let n = a.rows();
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    for r in 0..n {
        let rest_rows: Vec<usize> = (r + 1..n).collect();
        let chosen = (0..n).find(|&c| {
            if used[c] || a[(r, c)] == 0 {
                return false;
            }
            let rest_cols: Vec<usize> = (0..n).filter(|&x| !used[x] && x != c).collect();
            has_perfect_matching(a, &rest_rows, &rest_cols)
        })?;
        used[chosen] = true;
        perm.push(chosen);
    }
    Some(Permutation(perm))
}

fn check_balanced(a: &IntMatrix, r: u64) -> Result<()> {
    if !a.is_square() {
        return Err(Hypothesis::Balanced(format!("matrix is {}x{}, not square", a.rows(), a.cols())).into());
    }
    for (what, sums) in [("row", a.row_sums()), ("column", a.col_sums())] {
        if let Some((i, s)) = sums.iter().enumerate().find(|(_, &s)| s != r) {
            return Err(Hypothesis::Balanced(format!("{what} {i} sums to {s}, expected {r}")).into());
        }
    }
    Ok(())
}

/// Writes a matrix with every row and column sum `r` as a sum of `r`
/// permutation matrices, extracting the lexicographically least perfect
/// matching of the remaining support each time.
pub fn decompose_into_permutations(a: &IntMatrix, r: u64) -> Result<Vec<Permutation>> {
    check_balanced(a, r)?;
    let mut rest = a.clone();
    let mut perms = Vec::with_capacity(r as usize);
    for _ in 0..r {
        let p = least_perfect_matching(&rest)
            .ok_or_else(|| Error::Invariant("balanced matrix without a perfect matching".into()))?;
        for (row, &c) in p.0.iter().enumerate() {
            rest[(row, c)] -= 1;
        }
        perms.push(p);
    }
    debug_assert_eq!(rest.total(), 0);
    Ok(perms)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Padding {
    #[serde(serialize_with = "ser_matrix")]
    pub matrix: IntMatrix,
    /// Unit additions in the order they were made.
    pub additions: Vec<(usize, usize)>,
}

fn ser_matrix<S: serde::Serializer>(m: &IntMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_rows().serialize(s)
}

/// Adds units to a square matrix whose row and column sums are at most `b`
/// until every row and column sums to exactly `b`; each unit goes to the
/// smallest `(row, column)` whose row and column are both still short.
pub fn pad_to_balanced(a: &IntMatrix, b: u64) -> Result<Padding> {
    if !a.is_square() {
        return Err(Hypothesis::Balanced(format!("matrix is {}x{}, not square", a.rows(), a.cols())).into());
    }
    let mut rows = a.row_sums();
    let mut cols = a.col_sums();
    if let Some(i) = rows.iter().position(|&s| s > b) {
        return Err(Hypothesis::Balanced(format!("row {i} sums to {} > {b}", rows[i])).into());
    }
    if let Some(j) = cols.iter().position(|&s| s > b) {
        return Err(Hypothesis::Balanced(format!("column {j} sums to {} > {b}", cols[j])).into());
    }
    let n = a.rows();
    let mut out = a.clone();
    let mut additions = Vec::new();
    // Saturated rows and columns stay saturated, so within a row the first
    // short column only moves right.
    let (mut i, mut j) = (0, 0);
    while i < n {
        if rows[i] == b {
            i += 1;
            j = 0;
            continue;
        }
        while j < n && cols[j] == b {
            j += 1;
        }
        if j == n {
            return Err(Error::Invariant("row deficit without a column deficit".into()));
        }
        out[(i, j)] += 1;
        rows[i] += 1;
        cols[j] += 1;
        additions.push((i, j));
    }
    debug_assert!(cols.iter().all(|&c| c == b));
    Ok(Padding { matrix: out, additions })
}

/// One fiber block `A_{I,J}` and its permutation decomposition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalancedBlockDecomposition {
    pub source: String,
    pub target: String,
    pub row_fiber: Vec<String>,
    pub col_fiber: Vec<String>,
    #[serde(serialize_with = "ser_matrix")]
    pub block: IntMatrix,
    pub permutations: Vec<Permutation>,
    /// Codomain edge receiving each permutation.
    pub codomain_edges: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct BicoveringConstruction {
    pub homomorphism: Homomorphism,
    pub blocks: Vec<BalancedBlockDecomposition>,
}

/// Builds a bi-covering homomorphism whose vertex map is given by `s`.
pub fn build_bicovering(g: &Graph, h: &Graph, s: &SubamalgamationMatrix) -> Result<BicoveringConstruction> {
    let rel = matrix_relations(g, h, s)?;
    if !rel.equalities() {
        return Err(Hypothesis::MatrixRelations(
            "A_G S = S A_H and S^T A_G = A_H S^T do not both hold".into(),
        )
        .into());
    }
    let vmap = s.vertex_map();
    let mut fibers = vec![Vec::new(); h.vertex_count()];
    for (v, &w) in vmap.iter().enumerate() {
        fibers[w].push(v);
    }
    let ag = g.adjacency_matrix();
    let ah = h.adjacency_matrix();
    let mut pool: HashMap<(usize, usize), VecDeque<usize>> = HashMap::new();
    for (k, e) in g.edges().iter().enumerate() {
        pool.entry((e.src, e.dst)).or_default().push_back(k);
    }
    let mut emap = vec![usize::MAX; g.edge_count()];
    let mut blocks = Vec::new();
    for big_i in 0..h.vertex_count() {
        for big_j in 0..h.vertex_count() {
            let b = ah[(big_i, big_j)];
            let (vi, vj) = (&fibers[big_i], &fibers[big_j]);
            if b == 0 || vi.is_empty() {
                continue;
            }
            let block = ag.submatrix(vi, vj);
            let perms = decompose_into_permutations(&block, b)?;
            let targets: Vec<usize> = h
                .out_edges(big_i)
                .iter()
                .copied()
                .filter(|&e| h.edge(e).dst == big_j)
                .collect();
            for (p, &target_edge) in perms.iter().zip(&targets) {
                for (r, &c) in p.0.iter().enumerate() {
                    let e = pool
                        .get_mut(&(vi[r], vj[c]))
                        .and_then(VecDeque::pop_front)
                        .ok_or_else(|| Error::Invariant("permutation entry without an edge".into()))?;
                    emap[e] = target_edge;
                }
            }
            blocks.push(BalancedBlockDecomposition {
                source: h.vertex_id(big_i).into(),
                target: h.vertex_id(big_j).into(),
                row_fiber: vi.iter().map(|&v| g.vertex_id(v).to_string()).collect(),
                col_fiber: vj.iter().map(|&v| g.vertex_id(v).to_string()).collect(),
                block,
                permutations: perms,
                codomain_edges: targets.iter().map(|&e| h.edge_id(e).to_string()).collect(),
            });
        }
    }
    if let Some(k) = emap.iter().position(|&x| x == usize::MAX) {
        return Err(Error::Invariant(format!("edge `{}` left unassigned", g.edge_id(k))));
    }
    let homomorphism = Homomorphism::new(g.clone(), h.clone(), vmap, emap)?;
    Ok(BicoveringConstruction { homomorphism, blocks })
}

#[derive(Clone, Debug)]
pub struct BiresolvingConstruction {
    /// The bi-resolving homomorphism on the original graph.
    pub homomorphism: Homomorphism,
    /// The bi-covering homomorphism on the padded graph it is restricted from.
    pub completion: BicoveringConstruction,
    pub new_vertices: Vec<String>,
    pub new_edges: Vec<String>,
}

/// Builds a bi-resolving homomorphism with vertex map `s` by padding every
/// fiber to the common size `d` with isolated vertices, padding each fiber
/// block to constant row and column sums with new edges, building a bi-covering
/// homomorphism on the result and restricting it to `g`.
pub fn build_biresolving(g: &Graph, h: &Graph, s: &SubamalgamationMatrix) -> Result<BiresolvingConstruction> {
    let rel = matrix_relations(g, h, s)?;
    if !rel.inequalities() {
        return Err(Hypothesis::MatrixRelations(
            "A_G S <= S A_H and S^T A_G <= A_H S^T do not both hold".into(),
        )
        .into());
    }
    let vmap = s.vertex_map();
    let mut fibers = vec![Vec::new(); h.vertex_count()];
    for (v, &w) in vmap.iter().enumerate() {
        fibers[w].push(v);
    }
    let d = fibers.iter().map(Vec::len).max().unwrap_or(0);

    let mut taken: HashSet<String> = g.vertices().iter().cloned().collect();
    let mut vertices = g.vertices().to_vec();
    let mut padded_map = vmap.clone();
    let mut new_vertices = Vec::new();
    for (big_i, fiber) in fibers.iter_mut().enumerate() {
        for k in 0..d - fiber.len() {
            let id = fresh_id(format!("pad:{}#{k}", h.vertex_id(big_i)), &taken);
            taken.insert(id.clone());
            fiber.push(vertices.len());
            vertices.push(id.clone());
            padded_map.push(big_i);
            new_vertices.push(id);
        }
    }

    let mut edges = g.edges().to_vec();
    let mut taken: HashSet<String> = g.edges().iter().map(|e| e.id.clone()).collect();
    let mut new_edges = Vec::new();
    let ag = g.adjacency_matrix();
    let ah = h.adjacency_matrix();
    let n = g.vertex_count();
    for big_i in 0..h.vertex_count() {
        for big_j in 0..h.vertex_count() {
            let b = ah[(big_i, big_j)];
            if b == 0 {
                continue;
            }
            let (vi, vj) = (&fibers[big_i], &fibers[big_j]);
            let mut block = IntMatrix::zeros(d, d);
            for (r, &x) in vi.iter().enumerate() {
                for (c, &y) in vj.iter().enumerate() {
                    if x < n && y < n {
                        block[(r, c)] = ag[(x, y)];
                    }
                }
            }
            let padding = pad_to_balanced(&block, b)?;
            for (k, &(r, c)) in padding.additions.iter().enumerate() {
                let id = fresh_id(format!("pad:{}>{}#{k}", h.vertex_id(big_i), h.vertex_id(big_j)), &taken);
                taken.insert(id.clone());
                edges.push(Edge { id: id.clone(), src: vi[r], dst: vj[c] });
                new_edges.push(id);
            }
        }
    }
    let padded = Graph::from_parts(vertices, edges)?;
    let padded_s = SubamalgamationMatrix::from_vertex_map(&padded_map, h.vertex_count());
    let completion = build_bicovering(&padded, h, &padded_s)?;
    let homomorphism = completion.homomorphism.restrict_to_prefix(g.vertex_count(), g.edge_count())?;
    Ok(BiresolvingConstruction { homomorphism, completion, new_vertices, new_edges })
}
