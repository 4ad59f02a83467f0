//! Linear fractional differential systems with mixed Caputo orders.
//!
//! The numerical core is generic over a [`Real`] scalar (`f32` or `f64`);
//! exact orders are [`RationalOrder`]s. The aliases below fix the scalar
//! to `f64`, which is what the command-line tool uses.

pub mod error;
pub mod figures;
pub mod l1;
pub mod linalg;
pub mod order;
pub mod poly;
pub mod quadrature;
pub mod scalar;
pub mod series;
pub mod spectral;
pub mod special;
pub mod stability;
pub mod trajectory;

pub use error::{Error, Result};
pub use linalg::{Lu, Matrix};
pub use order::{parse_order, Order, ParsedOrigin, RationalOrder};
pub use poly::{ComplexPolynomial, PartialFractions, RootSet};
pub use scalar::{Entry, Real};
pub use series::{CoefficientPyramid, MixedSystem, SeriesConfig};
pub use spectral::SpectralForm;
pub use special::{MlConfig, MlParams};
pub use stability::{BoundarySample, StabilityVerdict, Status};
pub use trajectory::{SolverTag, Trajectory, Warning};

pub type Complex64 = num_complex::Complex<f64>;
pub type Matrix64 = Matrix<f64>;
pub type ComplexMatrix64 = Matrix<Complex64>;
pub type Order64 = Order<f64>;
pub type System64 = MixedSystem<f64>;
pub type MultiIndexSystem64 = l1::MultiIndexSystem<f64>;
pub type Pyramid64 = CoefficientPyramid<f64>;
pub type Trajectory64 = Trajectory<f64>;
pub type Verdict64 = StabilityVerdict<f64>;
pub type Boundary64 = BoundarySample<f64>;
pub type Spectral64 = SpectralForm<f64>;
pub type Polynomial64 = ComplexPolynomial<f64>;
