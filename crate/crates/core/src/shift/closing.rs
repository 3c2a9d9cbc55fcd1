//! Left, right and bi-closing.
//!
//! A 1-block code on an edge shift fails to be right-closing exactly when two
//! distinct left-asymptotic points share an image. Such a pair leaves a common
//! vertex `p` along distinct edges `e != f` with equal images and then runs
//! forever through the pair graph; on a finite graph that means the state
//! `(t(e), t(f))` reaches a cycle of the pair graph. Left-closing is the same
//! statement for the reversed graph.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::Result;
use crate::shift::code::{recode_one_block, CodeGraph, SlidingBlockCode};
use crate::shift::labeled::PairGraph;
use crate::shift::presentation::render_word;

/// The point `...LLL C RRR...`, with `C` starting at position 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EventuallyPeriodic {
    pub left: Vec<String>,
    pub center: Vec<String>,
    pub right: Vec<String>,
}

impl fmt::Display for EventuallyPeriodic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = |v: &[String]| render_word(v);
        write!(f, "...({})({}) {} ({})({})...", w(&self.left), w(&self.left), w(&self.center), w(&self.right), w(&self.right))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosingWitness {
    pub first: EventuallyPeriodic,
    pub second: EventuallyPeriodic,
    /// Common image of the two points.
    pub image: EventuallyPeriodic,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosingProfile {
    pub right_closing: bool,
    pub left_closing: bool,
    pub bi_closing: bool,
    pub witnesses: BTreeMap<String, ClosingWitness>,
}

pub fn closing_profile(phi: &SlidingBlockCode, period_cap: usize) -> Result<ClosingProfile> {
    let rec = recode_one_block(phi, period_cap)?;
    Ok(closing_profile_of_graph(&rec.code_graph()))
}

pub fn closing_profile_of_graph(cg: &CodeGraph) -> ClosingProfile {
    let ess = essential_code_graph(cg);
    let mut witnesses = BTreeMap::new();
    let right = right_closing_failure(&ess);
    let left = right_closing_failure(&reverse(&ess)).map(|w| ClosingWitness {
        first: flip(&w.first),
        second: flip(&w.second),
        image: flip(&w.image),
    });
    let right_closing = right.is_none();
    let left_closing = left.is_none();
    if let Some(w) = right {
        witnesses.insert("right_closing".to_string(), w);
    }
    if let Some(w) = left {
        witnesses.insert("left_closing".to_string(), w);
    }
    ClosingProfile { right_closing, left_closing, bi_closing: right_closing && left_closing, witnesses }
}

fn essential_code_graph(cg: &CodeGraph) -> CodeGraph {
    let (vs, es) = cg.labeled.graph.essential_parts();
    let graph = cg.labeled.graph.induced(&vs, &es);
    CodeGraph {
        labeled: crate::shift::labeled::LabeledGraph::new(graph, es.iter().map(|&k| cg.labeled.labels[k].clone()).collect()),
        symbol: es.iter().map(|&k| cg.symbol[k].clone()).collect(),
    }
}

fn reverse(cg: &CodeGraph) -> CodeGraph {
    CodeGraph { labeled: cg.labeled.reversed(), symbol: cg.symbol.clone() }
}

fn rev(v: &[String]) -> Vec<String> {
    v.iter().rev().cloned().collect()
}

/// Mirror image of a point described on the reversed graph.
fn flip(p: &EventuallyPeriodic) -> EventuallyPeriodic {
    EventuallyPeriodic { left: rev(&p.right), center: rev(&p.center), right: rev(&p.left) }
}

fn right_closing_failure(cg: &CodeGraph) -> Option<ClosingWitness> {
    let g = &cg.labeled.graph;
    let labels = &cg.labeled.labels;
    let pairs = PairGraph::build(g, labels);
    let alive = pairs.forward_alive();
    for v in 0..g.vertex_count() {
        let outs = g.out_edges(v);
        for (i, &e) in outs.iter().enumerate() {
            for &f in &outs[i + 1..] {
                if labels[e] != labels[f] {
                    continue;
                }
                let start = pairs.state(g.edge(e).dst, g.edge(f).dst);
                if alive[start] {
                    return Some(build_witness(cg, &pairs, &alive, v, e, f, start));
                }
            }
        }
    }
    None
}

fn build_witness(
    cg: &CodeGraph,
    pairs: &PairGraph,
    alive: &[bool],
    p: usize,
    e: usize,
    f: usize,
    start: usize,
) -> ClosingWitness {
    let g = &cg.labeled.graph;
    let sym = |k: usize| cg.symbol[k].clone();
    let img = |k: usize| cg.labeled.labels[k].clone();

    // Common past: walk backwards from p until a vertex repeats.
    let mut back_edges = Vec::new();
    let mut seen_at = BTreeMap::from([(p, 0usize)]);
    let mut v = p;
    let (cycle, prefix) = loop {
        let k = g.in_edges(v)[0];
        back_edges.push(k);
        v = g.edge(k).src;
        if let Some(&i) = seen_at.get(&v) {
            let forward: Vec<usize> = back_edges.iter().rev().copied().collect();
            let cycle_len = back_edges.len() - i;
            break (forward[..cycle_len].to_vec(), forward[cycle_len..].to_vec());
        }
        seen_at.insert(v, back_edges.len());
    };

    // Common-image future through alive pair states until a state repeats.
    let mut steps = Vec::new();
    let mut seen = BTreeMap::from([(start, 0usize)]);
    let mut s = start;
    let split = loop {
        let k = *pairs.out[s].iter().find(|&&k| alive[pairs.edges[k].to]).expect("alive state has an alive successor");
        steps.push(pairs.edges[k]);
        s = pairs.edges[k].to;
        if let Some(&i) = seen.get(&s) {
            break i;
        }
        seen.insert(s, steps.len());
    };
    let (tail, loop_) = steps.split_at(split);

    let left: Vec<String> = cycle.iter().map(|&k| sym(k)).collect();
    let left_image: Vec<String> = cycle.iter().map(|&k| img(k)).collect();
    let common: Vec<String> = prefix.iter().map(|&k| sym(k)).collect();
    let common_image: Vec<String> = prefix.iter().map(|&k| img(k)).collect();
    let point = |first: usize, pick: fn(&crate::shift::labeled::PairEdge) -> usize| {
        let mut center = common.clone();
        center.push(sym(first));
        center.extend(tail.iter().map(|pe| sym(pick(pe))));
        EventuallyPeriodic {
            left: left.clone(),
            center,
            right: loop_.iter().map(|pe| sym(pick(pe))).collect(),
        }
    };
    let mut image_center = common_image;
    image_center.push(img(e));
    image_center.extend(tail.iter().map(|pe| img(pe.first)));
    ClosingWitness {
        first: point(e, |pe| pe.first),
        second: point(f, |pe| pe.second),
        image: EventuallyPeriodic {
            left: left_image,
            center: image_center,
            right: loop_.iter().map(|pe| img(pe.first)).collect(),
        },
    }
}
