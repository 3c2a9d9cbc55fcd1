//! Sliding block codes and their recoding to 1-block codes.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Hypothesis, Result};
use crate::graph::{higher_graph, HigherGraph};
use crate::homomorphism::Homomorphism;
use crate::report::Check;
use crate::shift::labeled::LabeledGraph;
use crate::shift::presentation::{render_word, Presentation};

/// `φ(x)_i = Φ(x_{i-m} ... x_{i+a})` for a block map `Φ` on words of length
/// `M = m + a + 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlidingBlockCode {
    pub domain: Presentation,
    pub codomain: Option<Presentation>,
    pub memory: usize,
    pub anticipation: usize,
    pub blocks: BTreeMap<Vec<String>, String>,
}

impl SlidingBlockCode {
    /// Checks that every block has length `m + a + 1` and that the block map
    /// is defined on all of `B_M(domain)`.
    pub fn new(
        domain: Presentation,
        codomain: Option<Presentation>,
        memory: usize,
        anticipation: usize,
        blocks: BTreeMap<Vec<String>, String>,
    ) -> Result<Self> {
        let code = SlidingBlockCode { domain, codomain, memory, anticipation, blocks };
        let w = code.window();
        if let Some(bad) = code.blocks.keys().find(|k| k.len() != w) {
            return Err(Hypothesis::BlockMap(format!("block `{}` does not have length {w}", render_word(bad))).into());
        }
        if let Some(missing) = code.domain.words(w).into_iter().find(|u| !code.blocks.contains_key(u)) {
            return Err(Hypothesis::BlockMap(format!("no image for the word `{}`", render_word(&missing))).into());
        }
        if let Some(cod) = &code.codomain {
            let alphabet: BTreeSet<String> = cod.alphabet().into_iter().collect();
            if let Some(s) = code.blocks.values().find(|s| !alphabet.contains(*s)) {
                return Err(Hypothesis::BlockMap(format!("image symbol `{s}` is outside the codomain alphabet")).into());
            }
        }
        Ok(code)
    }

    pub fn window(&self) -> usize {
        self.memory + self.anticipation + 1
    }

    /// Image of a finite word: one symbol per full window.
    pub fn apply_word(&self, w: &[String]) -> Option<Vec<String>> {
        let m = self.window();
        if w.len() < m {
            return Some(Vec::new());
        }
        w.windows(m).map(|u| self.blocks.get(u).cloned()).collect()
    }

    /// Image of the periodic point with period word `x` read from position 0.
    pub fn apply_periodic(&self, x: &[String]) -> Option<Vec<String>> {
        let p = x.len();
        let m = self.window();
        (0..p)
            .map(|i| {
                let u: Vec<String> = (0..m).map(|j| x[(i + p * m + j - self.memory) % p].clone()).collect();
                self.blocks.get(&u).cloned()
            })
            .collect()
    }

    /// Bounded check that images of domain words are codomain words.
    pub fn check_image(&self, word_cap: usize) -> Check {
        let Some(cod) = &self.codomain else {
            return Check::new("image inside codomain", true, "no codomain given");
        };
        let m = self.window();
        let top = word_cap.max(m);
        for n in m..=top {
            let allowed = cod.words(n - m + 1);
            for u in self.domain.words(n) {
                match self.apply_word(&u) {
                    Some(v) if allowed.contains(&v) => {}
                    _ => {
                        return Check::new(
                            "image inside codomain",
                            false,
                            format!("image of `{}` is not a codomain word", render_word(&u)),
                        )
                    }
                }
            }
        }
        Check::new("image inside codomain", true, format!("domain words of length {m}..={top} (bounded)"))
    }
}

/// The 1-block code `x_i ↦ Φ(x_i)` between edge shifts.
pub fn code_from_homomorphism(phi: &Homomorphism) -> SlidingBlockCode {
    let (g, h) = (phi.domain(), phi.codomain());
    let blocks = (0..g.edge_count())
        .map(|k| (vec![g.edge_id(k).to_string()], h.edge_id(phi.edge_image(k)).to_string()))
        .collect();
    SlidingBlockCode {
        domain: Presentation::Edge(g.clone()),
        codomain: Some(Presentation::Edge(h.clone())),
        memory: 0,
        anticipation: 0,
        blocks,
    }
}

/// A code rewritten as a 1-block code on the edge shift of a higher graph of
/// the domain's presenting graph.
#[derive(Clone, Debug)]
pub struct Recoding {
    /// 1-block code on the edge shift of `higher.graph`.
    pub code: SlidingBlockCode,
    /// Presenting graph of the domain, whose label map is a conjugacy.
    pub base: LabeledGraph,
    pub higher: HigherGraph,
    /// The conjugacy sends `x` to the path whose edge at `i` covers positions
    /// `i - shift ..= i - shift + M - 1` of `x`.
    pub shift: usize,
    pub checks: Vec<Check>,
}

impl Recoding {
    /// Edge graph labeled by image symbols; `symbol` gives the domain symbol
    /// each edge stands for.
    pub fn code_graph(&self) -> CodeGraph {
        let g = &self.higher.graph;
        let image = (0..g.edge_count()).map(|k| self.code.blocks[&vec![g.edge_id(k).to_string()]].clone()).collect();
        let symbol = self
            .higher
            .edge_paths
            .iter()
            .map(|p| self.base.labels[p.edges[self.shift]].clone())
            .collect();
        CodeGraph { labeled: LabeledGraph::new(g.clone(), image), symbol }
    }
}

/// A 1-block code on an edge shift viewed as a labeled graph.
#[derive(Clone, Debug)]
pub struct CodeGraph {
    pub labeled: LabeledGraph,
    pub symbol: Vec<String>,
}

/// Rewrites a code on a shift of finite type as a 1-block code; a 1-block
/// code on an edge shift is returned unchanged.
pub fn recode_one_block(phi: &SlidingBlockCode, period_cap: usize) -> Result<Recoding> {
    phi.domain.require_finite_type()?;
    let base = phi.domain.labeled().essential();
    let w = phi.window();
    let higher = higher_graph(&base.graph, w);
    let mut blocks = BTreeMap::new();
    for (k, p) in higher.edge_paths.iter().enumerate() {
        let word = base.label_of(&p.edges);
        let image = phi
            .blocks
            .get(&word)
            .ok_or_else(|| Error::from(Hypothesis::BlockMap(format!("no image for `{}`", render_word(&word)))))?;
        blocks.insert(vec![higher.graph.edge_id(k).to_string()], image.clone());
    }
    let unchanged = matches!(phi.domain, Presentation::Edge(_)) && w == 1;
    let code = if unchanged {
        phi.clone()
    } else {
        SlidingBlockCode {
            domain: Presentation::Edge(higher.graph.clone()),
            codomain: phi.codomain.clone(),
            memory: 0,
            anticipation: 0,
            blocks,
        }
    };
    let mut rec = Recoding { code, base, higher, shift: phi.memory, checks: Vec::new() };
    let check = verify_recoding(phi, &rec, period_cap);
    if !check.pass {
        return Err(Error::Invariant(check.detail));
    }
    rec.checks.push(check);
    Ok(rec)
}

/// Compares `φ` with the recoded code along the conjugacy on periodic points.
fn verify_recoding(phi: &SlidingBlockCode, rec: &Recoding, period_cap: usize) -> Check {
    let w = phi.window();
    let cg = rec.code_graph();
    let mut tested = 0;
    for p in 1..=period_cap {
        for c in rec.base.graph.closed_paths(p) {
            let x = rec.base.label_of(&c);
            let direct = phi.apply_periodic(&x);
            let lifted: Option<Vec<String>> = (0..p)
                .map(|i| {
                    let window: Vec<usize> = (0..w).map(|j| c[(i + p * w + j - rec.shift) % p]).collect();
                    rec.higher.edge_of(&window).map(|k| cg.labeled.labels[k].clone())
                })
                .collect();
            if direct.is_none() || direct != lifted {
                return Check::new(
                    "recoding agrees on periodic points",
                    false,
                    format!("disagreement at the periodic point `{}`", render_word(&x)),
                );
            }
            tested += 1;
        }
    }
    Check::new("recoding agrees on periodic points", true, format!("{tested} periodic points up to period {period_cap}"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn sym(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    fn full_two_shift() -> Presentation {
        Presentation::Edge(Graph::new(["v"], [("0", "v", "v"), ("1", "v", "v")]).unwrap())
    }

    #[test]
    fn homomorphism_codes() {
        let g = Graph::new(["1", "2"], [("e", "1", "2"), ("f", "2", "1")]).unwrap();
        let h = Graph::new(["v"], [("a", "v", "v")]).unwrap();
        let phi = Homomorphism::new(g.clone(), h, vec![0, 0], vec![0, 0]).unwrap();
        let code = code_from_homomorphism(&phi);
        assert_eq!(code.window(), 1);
        assert_eq!(code.apply_periodic(&["e".into(), "f".into()]), Some(vec!["a".to_string(), "a".to_string()]));
        let id = code_from_homomorphism(&Homomorphism::identity(&g));
        let rec = recode_one_block(&id, 6).unwrap();
        assert_eq!(rec.code, id);
    }

    #[test]
    fn golden_mean_two_block() {
        let x = Presentation::forbidden(sym("01"), vec![sym("11")]).unwrap();
        // x_i x_{i+1} ↦ x_i + x_{i+1}
        let blocks = [("00", "0"), ("01", "1"), ("10", "1")]
            .into_iter()
            .map(|(w, s)| (sym(w), s.to_string()))
            .collect();
        let code = SlidingBlockCode::new(x, None, 0, 1, blocks).unwrap();
        let rec = recode_one_block(&code, 6).unwrap();
        assert_eq!(rec.code.window(), 1);
        assert_eq!(rec.higher.order, 2);
        assert!(rec.checks[0].pass);
    }

    #[test]
    fn centred_three_block() {
        let mut blocks = BTreeMap::new();
        for m in 0..8u8 {
            let w: Vec<String> = (0..3).map(|i| ((m >> (2 - i)) & 1).to_string()).collect();
            let majority = if m.count_ones() >= 2 { "1" } else { "0" };
            blocks.insert(w, majority.to_string());
        }
        let code = SlidingBlockCode::new(full_two_shift(), Some(full_two_shift()), 1, 1, blocks).unwrap();
        let rec = recode_one_block(&code, 6).unwrap();
        assert_eq!(rec.higher.order, 3);
        assert_eq!(rec.shift, 1);
        assert!(code.check_image(6).pass);
    }

    #[test]
    fn partial_block_map_rejected() {
        let blocks = BTreeMap::from([(sym("0"), "0".to_string())]);
        let err = SlidingBlockCode::new(full_two_shift(), None, 0, 0, blocks).unwrap_err();
        assert!(err.to_string().contains("block map hypothesis fails"));
    }

    #[test]
    fn strictly_sofic_domain_rejected() {
        let g = Graph::new(["a", "b"], [("p", "a", "a"), ("q", "a", "b"), ("r", "b", "a")]).unwrap();
        let even = Presentation::sofic(g, sym("100"), sym("01")).unwrap();
        let blocks = [("0", "0"), ("1", "1")].into_iter().map(|(w, s)| (sym(w), s.to_string())).collect();
        let code = SlidingBlockCode::new(even, None, 0, 0, blocks).unwrap();
        assert!(matches!(recode_one_block(&code, 6), Err(Error::Hypothesis(Hypothesis::FiniteType(_)))));
    }
}
