//! Exact computation with noncommutative principal bundles over finite
//! abelian groups.

pub mod error;
pub mod factor;
pub mod algebra;
pub mod bundle;
pub mod catalog;
pub mod cohomology;
pub mod crosscheck;
pub mod crossed;
pub mod groups;
pub mod intlin;
pub mod io;
pub mod linalg;
pub mod report;
pub mod scalar;

pub use error::{Error, Result};
pub use groups::{Character, FinAbGroup, GroupElement, SubgroupData};
pub use scalar::{Cyclo, Field, RootOfUnity};

pub type Rational = num_rational::BigRational;
pub type CycloMatrix = linalg::Matrix<Cyclo>;
pub type CycloAlgebra = algebra::StructureAlgebra<Cyclo>;
pub type RationalAlgebra = algebra::StructureAlgebra<Rational>;
pub type RationalMatrix = linalg::Matrix<Rational>;
