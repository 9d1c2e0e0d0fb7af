//! Variational assurance cases for annotative software product lines.

pub mod accore;
pub mod analyses;
pub mod featexpr;
pub mod fixtures;
pub mod liftreg;
pub mod plmodel;
pub mod regression;
pub mod templates;
pub mod util;
pub mod varac;
