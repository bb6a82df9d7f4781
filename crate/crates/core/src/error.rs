use thiserror::Error;

/// Errors raised while building meshes, operators, or solving the coupled system.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh file parse error at line {line}: {msg}")]
    MeshParse { line: usize, msg: String },

    #[error("boundary is not a single closed loop: {0}")]
    BoundaryTopology(String),

    #[error("quadrature exactness {requested} exceeds the supported maximum {max}")]
    QuadratureOrder { requested: usize, max: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("inadmissible stabilization on element {element}: {msg}")]
    Stabilization { element: usize, msg: String },

    #[error("degenerate diffusion coefficient {value:e} on element {element}")]
    DegenerateDiffusion { element: usize, value: f64 },

    #[error("singular local system on element {element}")]
    SingularLocal { element: usize },

    #[error("boundary operator self-check failed: {0}")]
    OperatorCheck(String),

    #[error("evaluation point ({x}, {y}) is within {distance:e} of the boundary")]
    TooCloseToBoundary { x: f64, y: f64, distance: f64 },

    #[error("boundary mesh does not match the volume mesh boundary: {0}")]
    TopologyMismatch(String),

    #[error("coupled system is numerically singular (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("system dimension {dim} exceeds the dense cap {cap}")]
    DenseCap { dim: usize, cap: usize },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
