use std::time::Duration;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Structural problems with a graph description.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate edge id `{0}`")]
    DuplicateEdge(String),
    #[error("edge `{edge}` has undeclared endpoint `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
}

/// Problems with a proposed homomorphism.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("no image given for vertex `{0}`")]
    MissingVertex(String),
    #[error("no image given for edge `{0}`")]
    MissingEdge(String),
    #[error("`{0}` is not a vertex of the graph it is mapped from or to")]
    UnknownVertex(String),
    #[error("`{0}` is not an edge of the graph it is mapped from or to")]
    UnknownEdge(String),
    #[error("edge `{edge}` ({src}->{dst}) maps to `{image}` ({image_src}->{image_dst}) but its endpoints map to {mapped_src}->{mapped_dst}")]
    Adjacency {
        edge: String,
        src: String,
        dst: String,
        image: String,
        image_src: String,
        image_dst: String,
        mapped_src: String,
        mapped_dst: String,
    },
}

/// A named hypothesis that an operation requires and that failed on the input.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Hypothesis {
    #[error("bi-resolving hypothesis fails: {0}")]
    BiResolving(String),
    #[error("irreducible codomain hypothesis fails")]
    IrreducibleCodomain,
    #[error("weakly connected codomain hypothesis fails")]
    WeaklyConnectedCodomain,
    #[error("weakly connected hypothesis fails: the domain is not weakly connected")]
    WeaklyConnectedDomain,
    #[error("Perron hypothesis fails: spectral radius of the domain ({domain:.10}) is not below that of the codomain ({codomain:.10})")]
    SpectralOrder { domain: f64, codomain: f64 },
    #[error("Perron obstruction: codomain irreducible, domain reducible and equal spectral radii ({0:.10}); no irreducible bi-covering extension exists")]
    PerronObstruction(f64),
    #[error("degree hypothesis fails: requested degree {requested} must exceed the degree {degree} of the homomorphism")]
    DegreeNotAbove { requested: usize, degree: usize },
    #[error("degree hypothesis fails: requested degree {requested} is below the degree {degree} of the homomorphism")]
    DegreeBelow { requested: usize, degree: usize },
    #[error("bi-closing hypothesis fails: {0}")]
    BiClosing(String),
    #[error("essential hypothesis fails: the {0} is not essential")]
    Essential(&'static str),
    #[error("matrix relation hypothesis fails: {0}")]
    MatrixRelations(String),
    #[error("balanced matrix hypothesis fails: {0}")]
    Balanced(String),
    #[error("entropy hypothesis fails: h(X) = {domain:.10} is not below h(Y) = {codomain:.10}")]
    Entropy { domain: f64, codomain: f64 },
    #[error("inclusion hypothesis fails: {0}")]
    Inclusion(String),
    #[error("conjugacy hypothesis fails: {0}")]
    Conjugacy(String),
    #[error("finite type hypothesis fails: {0}")]
    FiniteType(String),
    #[error("block map hypothesis fails: {0}")]
    BlockMap(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Homomorphism(#[from] HomError),
    #[error(transparent)]
    Hypothesis(#[from] Hypothesis),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("empty matrix has no spectral radius")]
    EmptyMatrix,
    #[error("search timed out after {0:?}")]
    Timeout(Duration),
    #[error("cap reached: {0}")]
    CapReached(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("format error: {0}")]
    Format(String),
    /// A construction produced something that fails its own post-condition.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn hypothesis(&self) -> Option<&Hypothesis> {
        match self {
            Error::Hypothesis(h) => Some(h),
            _ => None,
        }
    }
}
