//! Reusable sample models and assurance cases for tests, examples and benches.

mod cases;
mod models;

pub use cases::*;
pub use models::*;
