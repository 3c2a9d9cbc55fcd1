//! Brute-force oracles and random fixtures shared by the integration tests.
//! Nothing here calls the library routine it is used to check.

#![allow(dead_code)]

use std::collections::BTreeSet;

use bicover::{Graph, Homomorphism, IntMatrix};
use rand::rngs::StdRng;
use rand::Rng;

pub type Rows = Vec<Vec<u64>>;

pub fn graph(rows: &Rows) -> Graph {
    let m = if rows.is_empty() { IntMatrix::zeros(0, 0) } else { IntMatrix::from_rows(rows).unwrap() };
    Graph::from_matrix(&m, None).unwrap()
}

pub fn rows_of(g: &Graph) -> Rows {
    let n = g.vertex_count();
    let mut a = vec![vec![0; n]; n];
    for e in g.edges() {
        a[e.src][e.dst] += 1;
    }
    a
}

fn permute(rows: &Rows, p: &[usize]) -> Rows {
    let n = rows.len();
    (0..n).map(|i| (0..n).map(|j| rows[p[i]][p[j]]).collect()).collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// One representative per isomorphism class of `n x n` matrices with entries
/// at most `max`.
pub fn iso_classes(n: usize, max: u64) -> Vec<Rows> {
    let perms = permutations(n);
    let cells = n * n;
    let total = (max + 1).pow(cells as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut c = code;
        let mut rows = vec![vec![0; n]; n];
        for k in 0..cells {
            rows[k / n][k % n] = c % (max + 1);
            c /= max + 1;
        }
        // Representative: least row-major encoding among all relabelings.
        if perms.iter().all(|p| permute(&rows, p) >= rows) {
            out.push(rows);
        }
    }
    out
}

/// Exhaustive search over vertex maps and edge maps for a homomorphism
/// `G -> H` that is bi-resolving, or bi-covering when `covering`.
pub fn brute_force_exists(ag: &Rows, ah: &Rows, covering: bool) -> bool {
    brute_force_find(ag, ah, covering).is_some()
}

/// The first such homomorphism found, as (vertex map, edge map over the edges
/// of `graph(ag)` into the edges of `graph(ah)`).
pub fn brute_force_find(ag: &Rows, ah: &Rows, covering: bool) -> Option<(Vec<usize>, Vec<usize>)> {
    let (n, m) = (ag.len(), ah.len());
    if n == 0 {
        return Some((Vec::new(), Vec::new()));
    }
    if m == 0 {
        return None;
    }
    let out_g: Vec<u64> = ag.iter().map(|r| r.iter().sum()).collect();
    let in_g: Vec<u64> = (0..n).map(|j| ag.iter().map(|r| r[j]).sum()).collect();
    let out_h: Vec<u64> = ah.iter().map(|r| r.iter().sum()).collect();
    let in_h: Vec<u64> = (0..m).map(|j| ah.iter().map(|r| r[j]).sum()).collect();
    // Edges in the order Graph::from_matrix creates them.
    let mut g_edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for _ in 0..ag[i][j] {
                g_edges.push((i, j));
            }
        }
    }
    assert!(ah.iter().flatten().sum::<u64>() <= 64, "edge sets are kept as 64-bit masks");
    let mut h_index = vec![vec![Vec::new(); m]; m];
    let mut k = 0;
    for (i, row) in ah.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            for _ in 0..c {
                h_index[i][j].push(k);
                k += 1;
            }
        }
    }
    let mut psi = vec![0usize; n];
    loop {
        let degrees_fit = (0..n).all(|u| {
            let (o, i) = (out_h[psi[u]], in_h[psi[u]]);
            if covering {
                out_g[u] == o && in_g[u] == i
            } else {
                out_g[u] <= o && in_g[u] <= i
            }
        });
        if degrees_fit {
            let mut emap = vec![0; g_edges.len()];
            let mut out_used = vec![0u64; n];
            let mut in_used = vec![0u64; n];
            if assign_edges(0, &g_edges, &psi, &h_index, &mut emap, &mut out_used, &mut in_used) {
                return Some((psi, emap));
            }
        }
        // Next vertex map in odometer order.
        let mut i = 0;
        loop {
            if i == n {
                return None;
            }
            psi[i] += 1;
            if psi[i] < m {
                break;
            }
            psi[i] = 0;
            i += 1;
        }
    }
}

fn assign_edges(
    k: usize,
    g_edges: &[(usize, usize)],
    psi: &[usize],
    h_index: &[Vec<Vec<usize>>],
    emap: &mut [usize],
    out_used: &mut [u64],
    in_used: &mut [u64],
) -> bool {
    if k == g_edges.len() {
        return true;
    }
    let (u, v) = g_edges[k];
    for &b in &h_index[psi[u]][psi[v]] {
        let bit = 1u64 << b;
        if out_used[u] & bit != 0 || in_used[v] & bit != 0 {
            continue;
        }
        out_used[u] |= bit;
        in_used[v] |= bit;
        emap[k] = b;
        if assign_edges(k + 1, g_edges, psi, h_index, emap, out_used, in_used) {
            return true;
        }
        out_used[u] &= !bit;
        in_used[v] &= !bit;
    }
    false
}

/// (bi-resolving, bi-covering), read off directly from edge lists.
pub fn oracle_profile(phi: &Homomorphism) -> (bool, bool) {
    let (g, h) = (phi.domain(), phi.codomain());
    let mut resolving = true;
    let mut covering = true;
    for v in 0..g.vertex_count() {
        let w = phi.vertex_image(v);
        let outs: Vec<usize> = g.edges().iter().enumerate().filter(|(_, e)| e.src == v).map(|(k, _)| phi.edge_image(k)).collect();
        let ins: Vec<usize> = g.edges().iter().enumerate().filter(|(_, e)| e.dst == v).map(|(k, _)| phi.edge_image(k)).collect();
        let h_outs: BTreeSet<usize> = h.edges().iter().enumerate().filter(|(_, e)| e.src == w).map(|(k, _)| k).collect();
        let h_ins: BTreeSet<usize> = h.edges().iter().enumerate().filter(|(_, e)| e.dst == w).map(|(k, _)| k).collect();
        let out_set: BTreeSet<usize> = outs.iter().copied().collect();
        let in_set: BTreeSet<usize> = ins.iter().copied().collect();
        if out_set.len() != outs.len() || in_set.len() != ins.len() {
            resolving = false;
        }
        if out_set != h_outs || in_set != h_ins || out_set.len() != outs.len() || in_set.len() != ins.len() {
            covering = false;
        }
    }
    (resolving, resolving && covering)
}

pub fn reachable(g: &Graph, from: usize) -> Vec<bool> {
    let mut seen = vec![false; g.vertex_count()];
    let mut stack = vec![from];
    while let Some(v) = stack.pop() {
        for e in g.edges().iter().filter(|e| e.src == v) {
            if !seen[e.dst] {
                seen[e.dst] = true;
                stack.push(e.dst);
            }
        }
    }
    seen
}

/// Every vertex reaches every vertex by a nonempty path.
pub fn oracle_irreducible(g: &Graph) -> bool {
    g.vertex_count() > 0 && (0..g.vertex_count()).all(|v| reachable(g, v).iter().all(|&r| r))
}

pub fn oracle_weakly_connected(g: &Graph) -> bool {
    let n = g.vertex_count();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut stack = vec![0];
    while let Some(v) = stack.pop() {
        for e in g.edges() {
            for (a, b) in [(e.src, e.dst), (e.dst, e.src)] {
                if a == v && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
    }
    seen.into_iter().all(|s| s)
}

pub fn oracle_degree(phi: &Homomorphism) -> usize {
    let mut counts = vec![0; phi.codomain().vertex_count()];
    for v in 0..phi.domain().vertex_count() {
        counts[phi.vertex_image(v)] += 1;
    }
    counts.into_iter().max().unwrap_or(0)
}

/// `ext` keeps every vertex and edge id of `phi`'s domain with the same
/// endpoints and images.
pub fn oracle_restricts(ext: &Homomorphism, phi: &Homomorphism) -> bool {
    let (g, big) = (phi.domain(), ext.domain());
    let (h, bigh) = (phi.codomain(), ext.codomain());
    let vertices_ok = (0..g.vertex_count()).all(|v| {
        big.vertex(g.vertex_id(v))
            .is_some_and(|w| bigh.vertex_id(ext.vertex_image(w)) == h.vertex_id(phi.vertex_image(v)))
    });
    let edges_ok = g.edges().iter().enumerate().all(|(k, e)| {
        big.edge_by_id(&e.id).is_some_and(|k2| {
            let e2 = big.edge(k2);
            big.vertex_id(e2.src) == g.vertex_id(e.src)
                && big.vertex_id(e2.dst) == g.vertex_id(e.dst)
                && bigh.edge_id(ext.edge_image(k2)) == h.edge_id(phi.edge_image(k))
        })
    });
    vertices_ok && edges_ok
}

pub fn random_rows(rng: &mut StdRng, n: usize, max: u64, density: f64) -> Rows {
    (0..n).map(|_| (0..n).map(|_| if rng.gen_bool(density) { rng.gen_range(1..=max) } else { 0 }).collect()).collect()
}

pub fn random_irreducible(rng: &mut StdRng, max_vertices: usize, max: u64) -> Graph {
    loop {
        let n = rng.gen_range(1..=max_vertices);
        let g = graph(&random_rows(rng, n, max, 0.5));
        if oracle_irreducible(&g) {
            return g;
        }
    }
}

/// A random bi-resolving homomorphism into `h`: vertices get random images,
/// and over each codomain edge `I -> J` a random partial matching between
/// the fibers of `I` and `J` is added.
pub fn random_biresolving(rng: &mut StdRng, h: &Graph, n: usize, keep: f64) -> Homomorphism {
    let vmap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..h.vertex_count())).collect();
    let vertices: Vec<String> = (0..n).map(|i| format!("g{i}")).collect();
    let mut edges = Vec::new();
    let mut emap = Vec::new();
    for (b, e) in h.edges().iter().enumerate() {
        let mut sources: Vec<usize> = (0..n).filter(|&v| vmap[v] == e.src).collect();
        let mut targets: Vec<usize> = (0..n).filter(|&v| vmap[v] == e.dst).collect();
        shuffle(rng, &mut sources);
        shuffle(rng, &mut targets);
        for (&s, &t) in sources.iter().zip(&targets) {
            if rng.gen_bool(keep) {
                edges.push((format!("e{}", edges.len()), vertices[s].clone(), vertices[t].clone()));
                emap.push(b);
            }
        }
    }
    let g = Graph::new(vertices, edges).unwrap();
    Homomorphism::new(g, h.clone(), vmap, emap).unwrap()
}

pub fn shuffle<T>(rng: &mut StdRng, v: &mut [T]) {
    for i in (1..v.len()).rev() {
        let j = rng.gen_range(0..=i);
        v.swap(i, j);
    }
}

/// Vertices lying on a bi-infinite path, by repeated deletion of sources and
/// sinks.
pub fn oracle_essential_vertices(g: &Graph) -> Vec<bool> {
    let mut alive = vec![true; g.vertex_count()];
    loop {
        let mut changed = false;
        for v in 0..g.vertex_count() {
            if !alive[v] {
                continue;
            }
            let has_out = g.edges().iter().any(|e| e.src == v && alive[e.dst]);
            let has_in = g.edges().iter().any(|e| e.dst == v && alive[e.src]);
            if !has_out || !has_in {
                alive[v] = false;
                changed = true;
            }
        }
        if !changed {
            return alive;
        }
    }
}

fn mat_mul(a: &[Vec<u128>], b: &[Vec<u128>]) -> Vec<Vec<u128>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn identity(n: usize) -> Vec<Vec<u128>> {
    (0..n).map(|i| (0..n).map(|j| u128::from(i == j)).collect()).collect()
}

/// Largest number of preimages of a periodic point of `X_H` with period at
/// most `period_cap` under a right-resolving 1-block code `Φ`: the number of
/// closed paths of length `p L` spelling `y^L`, `L = lcm(1..=|V(G)|)`. A
/// preimage is fixed by its vertex at time 0, and the vertices at times
/// `0, p, 2p, ...` cycle inside one fiber, so its period is `p r` with
/// `r <= |V(G)|`.
pub fn oracle_periodic_max(phi: &Homomorphism, period_cap: usize) -> usize {
    let (g, h) = (phi.domain(), phi.codomain());
    let n = g.vertex_count();
    let l = (1..=n.max(1)).fold(1usize, |acc, k| acc / gcd(acc, k) * k);
    let per_symbol: Vec<Vec<Vec<u128>>> = (0..h.edge_count())
        .map(|b| {
            let mut m = vec![vec![0u128; n]; n];
            for (k, e) in g.edges().iter().enumerate() {
                if phi.edge_image(k) == b {
                    m[e.src][e.dst] += 1;
                }
            }
            m
        })
        .collect();
    let mut best = 0;
    for p in 1..=period_cap {
        for y in h.closed_paths(p) {
            let mut prod = identity(n);
            for &b in &y {
                prod = mat_mul(&prod, &per_symbol[b]);
            }
            let mut pw = identity(n);
            for _ in 0..l {
                pw = mat_mul(&pw, &prod);
            }
            let trace: u128 = (0..n).map(|i| pw[i][i]).sum();
            best = best.max(trace as usize);
        }
    }
    best
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Right-closing fails iff, on the essential part, two label-equal paths of
/// length `depth` leave one vertex through different edges. With
/// `depth > n^2` this is the same as an infinite such pair. Left-closing is
/// the mirror statement. Returns (right_closing, left_closing).
pub fn oracle_closing(g: &Graph, labels: &[String], depth: usize) -> (bool, bool) {
    let alive = oracle_essential_vertices(g);
    let edges: Vec<(usize, usize, &str)> = g
        .edges()
        .iter()
        .zip(labels)
        .filter(|(e, _)| alive[e.src] && alive[e.dst])
        .map(|(e, l)| (e.src, e.dst, l.as_str()))
        .collect();
    let reversed: Vec<(usize, usize, &str)> = edges.iter().map(|&(s, d, l)| (d, s, l)).collect();
    (!diverging_pair(&edges, depth), !diverging_pair(&reversed, depth))
}

fn diverging_pair(edges: &[(usize, usize, &str)], depth: usize) -> bool {
    let mut frontier: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (i, a) in edges.iter().enumerate() {
        for b in &edges[i + 1..] {
            if a.0 == b.0 && a.2 == b.2 {
                frontier.insert((a.1, b.1));
                frontier.insert((b.1, a.1));
            }
        }
    }
    for _ in 1..depth {
        let mut next = BTreeSet::new();
        for &(u, v) in &frontier {
            for a in edges.iter().filter(|e| e.0 == u) {
                for b in edges.iter().filter(|e| e.0 == v && e.2 == a.2) {
                    next.insert((a.1, b.1));
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            return false;
        }
    }
    !frontier.is_empty()
}
