use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScalarError {
  #[error("cannot parse exact scalar {0:?}")]
  Parse(String),
  #[error("product of two non-constant linear forms")]
  DegreeOverflow,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
  #[error("degenerate polygon")]
  DegeneratePolygon,
  #[error("degenerate polytope")]
  DegeneratePolytope,
  #[error("linear part is not a similarity")]
  NotSimilarity,
  #[error("projective map sends a vertex to infinity")]
  ProjectiveInfinity,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PetError {
  #[error("parameter {0} out of range")]
  ParameterOutOfRange(String),
  #[error("point lies on a boundary where the lattice translation is ambiguous")]
  AmbiguousOnBoundary,
  #[error("map undefined on boundary (step {step})")]
  UndefinedOnBoundary { step: usize },
  #[error("no lattice vector moves the point into the target")]
  NoLatticeVector,
  #[error("partition invariant violated: {0}")]
  Partition(String),
  #[error("return cap {cap} exceeded, unreturned area {unreturned}")]
  CapExceeded { cap: usize, unreturned: String },
  #[error(transparent)]
  Geom(#[from] GeomError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertError {
  #[error("return cap {cap} exceeded on domain {index}")]
  CapExceeded { cap: usize, index: usize },
  #[error("chased return domains differ from the table")]
  TableMismatch,
  #[error("parse error on line {line}: {msg}")]
  Parse { line: usize, msg: String },
  #[error("invalid polytope in block {0}")]
  Validation(usize),
  #[error(transparent)]
  Pet(#[from] PetError),
  #[error(transparent)]
  Geom(#[from] GeomError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LimitError {
  #[error("depth {0} exceeds the materialization cap")]
  DepthTooLarge(usize),
  #[error("parameter out of range")]
  ParameterOutOfRange,
}
