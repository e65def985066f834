pub mod cech;
pub mod complex;
pub mod filt;
pub mod hirsch;
pub mod koszul;
pub mod linalg;
pub mod models;
pub mod random;

pub use complex::{ChainMap, Complex, ComplexError};
pub use linalg::{LinalgError, Rat, SparseRatMatrix};
