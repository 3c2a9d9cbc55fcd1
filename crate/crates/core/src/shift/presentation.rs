//! Presentations of shift spaces.
//!
//! Every presentation is handled through a labeled graph whose label map is
//! onto the shift:
//!
//! * an edge shift is its graph labeled by edge ids;
//! * a forbidden-word shift with longest forbidden word of length `K` is the
//!   graph whose vertices are the allowed words of length `L - 1` and whose
//!   edges are the allowed words of length `L`, `L = max(K, 2)`, each edge
//!   labeled by its first symbol;
//! * a sofic presentation is its labeled graph.
//!
//! For the first two the label map is a conjugacy.

use std::collections::{BTreeSet, HashSet};

use crate::error::{Error, Hypothesis, Result};
use crate::graph::Graph;
use crate::shift::labeled::LabeledGraph;
use crate::spectral::graph_spectral_radius;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Presentation {
    Edge(Graph),
    Forbidden { alphabet: Vec<String>, words: Vec<Vec<String>> },
    Sofic { graph: Graph, labels: Vec<String>, alphabet: Vec<String> },
}

impl Presentation {
    pub fn forbidden(alphabet: Vec<String>, words: Vec<Vec<String>>) -> Result<Self> {
        let p = Presentation::Forbidden { alphabet, words };
        p.validate()?;
        Ok(p)
    }

    pub fn sofic(graph: Graph, labels: Vec<String>, alphabet: Vec<String>) -> Result<Self> {
        let p = Presentation::Sofic { graph, labels, alphabet };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let check_alphabet = |alphabet: &[String]| -> Result<HashSet<String>> {
            let set: HashSet<String> = alphabet.iter().cloned().collect();
            if set.len() != alphabet.len() {
                return Err(Error::Format("alphabet has repeated symbols".into()));
            }
            if alphabet.iter().any(String::is_empty) {
                return Err(Error::Format("alphabet has an empty symbol".into()));
            }
            if let Some(s) = alphabet.iter().find(|s| s.chars().any(char::is_whitespace)) {
                return Err(Error::Format(format!("symbol `{s}` contains whitespace")));
            }
            Ok(set)
        };
        match self {
            Presentation::Edge(_) => Ok(()),
            Presentation::Forbidden { alphabet, words } => {
                let set = check_alphabet(alphabet)?;
                for w in words {
                    if w.is_empty() {
                        return Err(Error::Format("forbidden words must be nonempty".into()));
                    }
                    if let Some(s) = w.iter().find(|s| !set.contains(*s)) {
                        return Err(Error::Format(format!("forbidden word uses `{s}` outside the alphabet")));
                    }
                }
                Ok(())
            }
            Presentation::Sofic { graph, labels, alphabet } => {
                let set = check_alphabet(alphabet)?;
                if labels.len() != graph.edge_count() {
                    return Err(Error::Format("every edge needs exactly one label".into()));
                }
                if let Some(s) = labels.iter().find(|s| !set.contains(*s)) {
                    return Err(Error::Format(format!("label `{s}` is outside the alphabet")));
                }
                Ok(())
            }
        }
    }

    /// Declared alphabet; edge ids for an edge shift.
    pub fn alphabet(&self) -> Vec<String> {
        match self {
            Presentation::Edge(g) => g.edges().iter().map(|e| e.id.clone()).collect(),
            Presentation::Forbidden { alphabet, .. } | Presentation::Sofic { alphabet, .. } => alphabet.clone(),
        }
    }

    pub fn labeled(&self) -> LabeledGraph {
        match self {
            Presentation::Edge(g) => LabeledGraph::new(g.clone(), g.edges().iter().map(|e| e.id.clone()).collect()),
            Presentation::Forbidden { alphabet, words } => de_bruijn(alphabet, words),
            Presentation::Sofic { graph, labels, .. } => LabeledGraph::new(graph.clone(), labels.clone()),
        }
    }

    /// True when the presenting label map is a conjugacy, which makes the
    /// shift of finite type.
    pub fn is_conjugacy_presentation(&self) -> bool {
        match self {
            Presentation::Edge(_) | Presentation::Forbidden { .. } => true,
            Presentation::Sofic { .. } => self.labeled().is_conjugacy(),
        }
    }

    /// `B_n(X)`.
    pub fn words(&self, n: usize) -> BTreeSet<Vec<String>> {
        self.labeled().words(n)
    }

    /// Natural-log topological entropy; `-inf` for the empty shift. Sofic
    /// presentations are accepted when right-resolving or a conjugacy.
    pub fn entropy(&self) -> Result<f64> {
        let lg = self.labeled().essential();
        if let Presentation::Sofic { .. } = self {
            if !lg.is_right_resolving() && !lg.is_conjugacy() {
                return Err(Error::Unsupported(
                    "entropy of a sofic presentation that is neither right-resolving nor a conjugacy".into(),
                ));
            }
        }
        Ok(graph_spectral_radius(&lg.graph).ln())
    }

    /// Periodic points of period dividing `p`, each as its period word read
    /// from position 0. Exact for conjugacy presentations.
    pub fn periodic_points(&self, p: usize) -> BTreeSet<Vec<String>> {
        self.labeled().periodic_words(p)
    }

    /// True when the presentation describes a shift of finite type through a
    /// conjugacy; required wherever points are counted.
    pub fn require_finite_type(&self) -> Result<()> {
        if self.is_conjugacy_presentation() {
            Ok(())
        } else {
            Err(Hypothesis::FiniteType("the sofic presentation is not a conjugacy".into()).into())
        }
    }
}

/// Renders a word: concatenated when every symbol is one character, else
/// space separated.
pub fn render_word(w: &[String]) -> String {
    if w.iter().all(|s| s.chars().count() == 1) {
        w.concat()
    } else {
        w.join(" ")
    }
}

fn de_bruijn(alphabet: &[String], forbidden: &[Vec<String>]) -> LabeledGraph {
    let k = forbidden.iter().map(Vec::len).max().unwrap_or(0);
    let len = k.max(2);
    let forbidden: HashSet<&[String]> = forbidden.iter().map(Vec::as_slice).collect();
    let clean = |w: &[String]| -> bool {
        (0..w.len()).all(|i| (i + 1..=w.len()).all(|j| !forbidden.contains(&w[i..j])))
    };
    // Allowed words of length `len`, grown symbol by symbol with pruning.
    let mut level: Vec<Vec<String>> = vec![Vec::new()];
    let mut vertex_words = Vec::new();
    for step in 1..=len {
        let mut next = Vec::new();
        for w in &level {
            for s in alphabet {
                let mut w2 = w.clone();
                w2.push(s.clone());
                // Only the suffixes of w2 can be new forbidden factors.
                if (0..w2.len()).all(|i| !forbidden.contains(&w2[i..])) {
                    next.push(w2);
                }
            }
        }
        level = next;
        if step == len - 1 {
            vertex_words = level.clone();
        }
    }
    debug_assert!(level.iter().all(|w| clean(w)));
    let vertices: Vec<String> = vertex_words.iter().map(|w| render_word(w)).collect();
    let vertex_set: HashSet<String> = vertices.iter().cloned().collect();
    let mut edges = Vec::new();
    let mut labels = Vec::new();
    for w in &level {
        let (src, dst) = (render_word(&w[..len - 1]), render_word(&w[1..]));
        if vertex_set.contains(&src) && vertex_set.contains(&dst) {
            edges.push((render_word(w), src, dst));
            labels.push(w[0].clone());
        }
    }
    let g = Graph::new(vertices, edges).expect("distinct words render to distinct ids");
    LabeledGraph::new(g, labels)
}

/// `X_k`: the shift over `B_1(X)` forbidding exactly the length-`k` words that
/// do not occur in `X`.
pub fn markov_approximation(x: &Presentation, k: usize) -> Result<Presentation> {
    if k == 0 {
        return Err(Error::Format("Markov approximation order must be positive".into()));
    }
    let alphabet: Vec<String> = x.words(1).into_iter().map(|mut w| w.remove(0)).collect();
    let allowed = x.words(k);
    let mut forbidden = Vec::new();
    let mut word = vec![0usize; k];
    if !alphabet.is_empty() {
        loop {
            let w: Vec<String> = word.iter().map(|&i| alphabet[i].clone()).collect();
            if !allowed.contains(&w) {
                forbidden.push(w);
            }
            // Odometer over alphabet^k in lexicographic order.
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                word[i] += 1;
                if word[i] < alphabet.len() {
                    break;
                }
                word[i] = 0;
            }
            if word.iter().all(|&d| d == 0) {
                break;
            }
        }
    }
    Presentation::forbidden(alphabet, forbidden)
}
