//! Triple lattice polytope exchange transformations in exact arithmetic.

pub mod error;
pub mod fiber;
pub mod geom2;
pub mod geom3;
pub mod limitset;
pub mod pet;
pub mod renorm;
pub mod scalar;

pub use error::{CertError, GeomError, LimitError, PetError, ScalarError};
pub use fiber::{base_case_certify, load_domain_table, symmetry_certify, verify_coefficients, verify_domain_partition, BShift, BaseInterval, BundleMap, DomainTable, MaximalDomain, ReturnDomainTable, Symmetry};
pub use geom2::{ConvexPolygon, HalfPlane, Location, Point2, Similarity2, Vector2};
pub use geom3::{Map3, Plane, Point3, Polytope3};
pub use pet::{build_triple_pet, Lattice2, PeriodicTile, PieceMap, PiecewiseTranslation, TripleLattice};
pub use scalar::{q, qi, Golden, LinFormS, Modulus, Phi, QuadExt, Rational, Scalar, Sign};
