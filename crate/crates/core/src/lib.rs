pub mod blade;
pub mod casimir_matrix;
pub mod cli;
pub mod decomposition;
pub mod error;
pub mod flat_model;
pub mod form;
pub mod linalg;
pub mod operator;
pub mod quaternionic;
pub mod rep_theory;
pub mod report;
pub mod scalar;
pub mod theorem_checker;

pub use blade::Blade;
pub use error::{Error, Result};
pub use form::Form;
pub use linalg::Matrix;
pub use operator::{LinearOperator, Op};
pub use scalar::{rat, Scalar};
