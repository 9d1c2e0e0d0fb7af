//! Lifted regression: regression values over feature expressions, a lifted
//! forward and backward pass, and variability evolution.

mod check;
mod run;
mod value;
mod variability;

pub use check::{lift_goal_ids, product_mismatches, soundness_violations};
pub use run::{
    backward_pass_lift, evd_regression_lift, extract_core_lift, forward_pass_lift, regress_lift,
    Ctx, DerivedAnnotations, VarAnnotations, VarChange, VarEvolution, VarNodeReport, VarRun,
};
pub use value::{match_lift_split, min_reg_lift, RegBits, VarRegValue};
pub use variability::{regress_variability, VariabilityPartition, VariabilityRun};
