//! Exact symbolic engine and numeric lab for the first coefficient of the
//! Bergman kernel expansion of the spin^c Dirac operator.

pub mod algebra;
pub mod checks;
pub mod coefficient;
pub mod exterior;
pub mod expansion;
pub mod geometry;
pub mod numeric;
pub mod report;
pub mod scalar;
pub mod tensor;
pub mod symbolic;

pub use coefficient::Coefficient;
pub use symbolic::Expr;
