//! JSON documents for graphs, matrices, homomorphisms, shifts and codes.

use std::collections::BTreeMap;
use std::path::Path as FsPath;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::homomorphism::Homomorphism;
use crate::matrix::IntMatrix;
use crate::shift::{Presentation, SlidingBlockCode};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub src: String,
    pub dst: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeDoc>,
}

impl GraphDoc {
    pub fn from_graph(g: &Graph) -> Self {
        GraphDoc {
            vertices: g.vertices().to_vec(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeDoc { id: e.id.clone(), src: g.vertex_id(e.src).into(), dst: g.vertex_id(e.dst).into() })
                .collect(),
        }
    }

    pub fn to_graph(&self) -> Result<Graph> {
        Ok(Graph::new(&self.vertices, self.edges.iter().map(|e| (&e.id, &e.src, &e.dst)))?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    /// Row labels.
    pub order: Vec<String>,
    pub rows: Vec<Vec<u64>>,
    /// Column labels when they differ from the row labels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub columns: Option<Vec<String>>,
}

impl MatrixDoc {
    pub fn adjacency(g: &Graph) -> Self {
        MatrixDoc { order: g.vertices().to_vec(), rows: g.adjacency_matrix().to_rows(), columns: None }
    }

    pub fn rectangular(m: &IntMatrix, rows: &[String], cols: &[String]) -> Self {
        MatrixDoc { order: rows.to_vec(), rows: m.to_rows(), columns: Some(cols.to_vec()) }
    }

    pub fn to_matrix(&self) -> Result<IntMatrix> {
        if self.rows.len() != self.order.len() {
            return Err(Error::Format(format!("{} row labels for {} rows", self.order.len(), self.rows.len())));
        }
        if self.rows.is_empty() {
            return Ok(IntMatrix::zeros(0, self.columns.as_ref().map_or(0, Vec::len)));
        }
        let m = IntMatrix::from_rows(&self.rows).ok_or_else(|| Error::Format("rows have different lengths".into()))?;
        let expected_cols = self.columns.as_ref().map_or(self.order.len(), Vec::len);
        if m.cols() != expected_cols {
            return Err(Error::Format(format!("{} columns but {expected_cols} column labels", m.cols())));
        }
        Ok(m)
    }

    /// The matrix with rows and columns reordered to the given label lists.
    pub fn aligned(&self, rows: &[String], cols: &[String]) -> Result<IntMatrix> {
        let m = self.to_matrix()?;
        let col_labels = self.columns.clone().unwrap_or_else(|| self.order.clone());
        let position = |labels: &[String], want: &[String], what: &str| -> Result<Vec<usize>> {
            if labels.len() != want.len() {
                return Err(Error::Dimension(format!("{what}: {} labels, expected {}", labels.len(), want.len())));
            }
            want.iter()
                .map(|w| {
                    labels.iter().position(|l| l == w).ok_or_else(|| Error::Format(format!("{what} label `{w}` missing")))
                })
                .collect()
        };
        let r = position(&self.order, rows, "row")?;
        let c = position(&col_labels, cols, "column")?;
        Ok(m.submatrix(&r, &c))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<GraphDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<GraphDoc>,
    pub vertex_map: BTreeMap<String, String>,
    pub edge_map: BTreeMap<String, String>,
}

impl HomDoc {
    pub fn from_homomorphism(phi: &Homomorphism, embed: bool) -> Self {
        HomDoc {
            domain: embed.then(|| GraphDoc::from_graph(phi.domain())),
            codomain: embed.then(|| GraphDoc::from_graph(phi.codomain())),
            vertex_map: phi.vertex_map_by_id(),
            edge_map: phi.edge_map_by_id(),
        }
    }

    pub fn to_homomorphism(&self, domain: &Graph, codomain: &Graph) -> Result<Homomorphism> {
        Ok(Homomorphism::from_maps(domain.clone(), codomain.clone(), &self.vertex_map, &self.edge_map)?)
    }

    /// Uses the embedded graphs.
    pub fn to_embedded(&self) -> Result<Homomorphism> {
        let (Some(g), Some(h)) = (&self.domain, &self.codomain) else {
            return Err(Error::Format("homomorphism document does not embed its domain and codomain".into()));
        };
        self.to_homomorphism(&g.to_graph()?, &h.to_graph()?)
    }
}

/// A word given either as one string or as a list of symbols.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WordDoc {
    Text(String),
    Symbols(Vec<String>),
}

/// Renders a word over `alphabet` so that [`parse_word`] recovers it.
pub fn render_in(w: &[String], alphabet: &[String]) -> String {
    if alphabet.iter().all(|a| a.chars().count() == 1) {
        w.concat()
    } else {
        w.join(" ")
    }
}

/// Splits a word string: on whitespace if it has any, into characters when
/// every alphabet symbol is one character, else as a single symbol.
pub fn parse_word(s: &str, alphabet: &[String]) -> Vec<String> {
    if s.chars().any(char::is_whitespace) {
        s.split_whitespace().map(str::to_string).collect()
    } else if alphabet.iter().all(|a| a.chars().count() == 1) {
        s.chars().map(|c| c.to_string()).collect()
    } else {
        vec![s.to_string()]
    }
}

impl WordDoc {
    fn symbols(&self, alphabet: &[String]) -> Vec<String> {
        match self {
            WordDoc::Text(s) => parse_word(s, alphabet),
            WordDoc::Symbols(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SubshiftDoc {
    Edge {
        graph: GraphDoc,
    },
    Forbidden {
        alphabet: Vec<String>,
        words: Vec<WordDoc>,
    },
    Sofic {
        graph: GraphDoc,
        /// Edge id to symbol.
        labels: BTreeMap<String, String>,
        alphabet: Vec<String>,
    },
}

impl SubshiftDoc {
    pub fn from_presentation(p: &Presentation) -> Self {
        match p {
            Presentation::Edge(g) => SubshiftDoc::Edge { graph: GraphDoc::from_graph(g) },
            Presentation::Forbidden { alphabet, words } => SubshiftDoc::Forbidden {
                alphabet: alphabet.clone(),
                words: words.iter().map(|w| WordDoc::Text(render_in(w, alphabet))).collect(),
            },
            Presentation::Sofic { graph, labels, alphabet } => SubshiftDoc::Sofic {
                graph: GraphDoc::from_graph(graph),
                labels: graph.edges().iter().zip(labels).map(|(e, l)| (e.id.clone(), l.clone())).collect(),
                alphabet: alphabet.clone(),
            },
        }
    }

    pub fn to_presentation(&self) -> Result<Presentation> {
        match self {
            SubshiftDoc::Edge { graph } => Ok(Presentation::Edge(graph.to_graph()?)),
            SubshiftDoc::Forbidden { alphabet, words } => {
                Presentation::forbidden(alphabet.clone(), words.iter().map(|w| w.symbols(alphabet)).collect())
            }
            SubshiftDoc::Sofic { graph, labels, alphabet } => {
                let g = graph.to_graph()?;
                if let Some(extra) = labels.keys().find(|k| g.edge_by_id(k).is_none()) {
                    return Err(Error::Format(format!("label given for unknown edge `{extra}`")));
                }
                let ls = g
                    .edges()
                    .iter()
                    .map(|e| labels.get(&e.id).cloned().ok_or_else(|| Error::Format(format!("edge `{}` has no label", e.id))))
                    .collect::<Result<Vec<_>>>()?;
                Presentation::sofic(g, ls, alphabet.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<SubshiftDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub codomain: Option<SubshiftDoc>,
    pub memory: usize,
    pub anticipation: usize,
    /// Word to image symbol.
    pub blocks: BTreeMap<String, String>,
}

impl CodeDoc {
    pub fn from_code(code: &SlidingBlockCode) -> Self {
        CodeDoc {
            domain: Some(SubshiftDoc::from_presentation(&code.domain)),
            codomain: code.codomain.as_ref().map(SubshiftDoc::from_presentation),
            memory: code.memory,
            anticipation: code.anticipation,
            blocks: {
                let alphabet = code.domain.alphabet();
                code.blocks.iter().map(|(w, s)| (render_in(w, &alphabet), s.clone())).collect()
            },
        }
    }

    /// Builds the code on `domain`, or on the embedded domain when `None`.
    pub fn to_code(&self, domain: Option<Presentation>) -> Result<SlidingBlockCode> {
        let domain = match (domain, &self.domain) {
            (Some(d), _) => d,
            (None, Some(doc)) => doc.to_presentation()?,
            (None, None) => return Err(Error::Format("code document does not embed its domain".into())),
        };
        let codomain = self.codomain.as_ref().map(SubshiftDoc::to_presentation).transpose()?;
        let alphabet = domain.alphabet();
        if let Some(s) = alphabet.iter().find(|s| s.chars().any(char::is_whitespace)) {
            return Err(Error::Format(format!("symbol `{s}` contains whitespace")));
        }
        let window = self.memory + self.anticipation + 1;
        let blocks = self
            .blocks
            .iter()
            .map(|(w, s)| {
                let word = if window == 1 && alphabet.contains(w) { vec![w.clone()] } else { parse_word(w, &alphabet) };
                (word, s.clone())
            })
            .collect();
        SlidingBlockCode::new(domain, codomain, self.memory, self.anticipation, blocks)
    }
}

pub fn from_json<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Format(format!("{what}: {e}")))
}

pub fn load<T: DeserializeOwned>(path: &FsPath) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    from_json(&text, &path.display().to_string())
}

pub fn load_graph(path: &FsPath) -> Result<Graph> {
    load::<GraphDoc>(path)?.to_graph()
}
