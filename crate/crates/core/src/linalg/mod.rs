//! Exact linear algebra over the coefficient rings.

mod det;
mod matrix;
pub mod smith;
mod solve;

pub use det::charpoly;
pub use matrix::Matrix;
pub use smith::{smith_normal_form, IntMatrix, SmithForm};
pub use solve::{image_count, kernel_count, solve, LinearSystem, SolutionReport, SolutionSpace};
