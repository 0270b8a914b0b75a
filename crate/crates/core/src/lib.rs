//! HTN task-allocation planning for production-and-delivery tasks.
//!
//! Given an enterprise (production lines, vehicles, materials, utilities and
//! routes) and a set of deadline-bound tasks, [`domain::plan`] produces a
//! timestamped action plan together with a report of material shortages and
//! infeasible tasks. [`validator::validate`] re-checks any plan against the
//! model without using the planner's scheduling code.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod domain;
pub mod htn;
pub mod ids;
pub mod shortage;
pub mod timeline;
pub mod validator;

pub use domain::{plan, EnterpriseEnvironment, MobilizationTask, Plan, PolicyConfig};
pub use validator::{validate, ValidationReport};
