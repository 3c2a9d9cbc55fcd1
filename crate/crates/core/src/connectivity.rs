//! Strong and weak connectivity.
//!
//! A vertex only belongs to an irreducible component when it lies on a cycle;
//! a lone vertex without a loop is not irreducible.

use serde::Serialize;

use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConnectivityReport {
    pub irreducible: bool,
    pub weakly_connected: bool,
    pub irreducible_components: Vec<Vec<String>>,
    pub weak_components: Vec<Vec<String>>,
}

/// Strongly connected components of a graph on `n` vertices given by successor
/// lists. Components are sorted by their least vertex; vertices inside each
/// component are sorted.
pub fn strongly_connected_components(n: usize, succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    // Iterative Tarjan.
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(top) = call.last_mut() {
            let v = top.0;
            if top.1 < succ[v].len() {
                let w = succ[v][top.1];
                top.1 += 1;
                if index[w] == UNVISITED {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

fn successors(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.vertex_count())
        .map(|v| g.out_edges(v).iter().map(|&e| g.edge(e).dst).collect())
        .collect()
}

/// Strongly connected components that carry a cycle, as vertex-index lists.
pub fn irreducible_components(g: &Graph) -> Vec<Vec<usize>> {
    let succ = successors(g);
    strongly_connected_components(g.vertex_count(), &succ)
        .into_iter()
        .filter(|c| c.len() > 1 || succ[c[0]].contains(&c[0]))
        .collect()
}

/// Components of the underlying undirected graph, as vertex-index lists.
pub fn weak_components(g: &Graph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let mut comp = vec![usize::MAX; n];
    let mut comps = Vec::new();
    for root in 0..n {
        if comp[root] != usize::MAX {
            continue;
        }
        let id = comps.len();
        let mut members = vec![root];
        comp[root] = id;
        let mut queue = vec![root];
        while let Some(v) = queue.pop() {
            let nbrs = g
                .out_edges(v)
                .iter()
                .map(|&e| g.edge(e).dst)
                .chain(g.in_edges(v).iter().map(|&e| g.edge(e).src));
            for w in nbrs {
                if comp[w] == usize::MAX {
                    comp[w] = id;
                    members.push(w);
                    queue.push(w);
                }
            }
        }
        members.sort_unstable();
        comps.push(members);
    }
    comps
}

pub fn is_irreducible(g: &Graph) -> bool {
    let comps = irreducible_components(g);
    comps.len() == 1 && comps[0].len() == g.vertex_count()
}

pub fn is_weakly_connected(g: &Graph) -> bool {
    g.vertex_count() > 0 && weak_components(g).len() == 1
}

pub fn connectivity(g: &Graph) -> ConnectivityReport {
    let names = |cs: Vec<Vec<usize>>| -> Vec<Vec<String>> {
        cs.into_iter()
            .map(|c| c.into_iter().map(|v| g.vertex_id(v).to_string()).collect())
            .collect()
    };
    let irr = irreducible_components(g);
    let weak = weak_components(g);
    ConnectivityReport {
        irreducible: irr.len() == 1 && irr[0].len() == g.vertex_count(),
        weakly_connected: weak.len() == 1,
        irreducible_components: names(irr),
        weak_components: names(weak),
    }
}
