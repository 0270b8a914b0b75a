//! Goal task file (JSON).
//!
//! ```json
//! {
//!   "tasks": [
//!     { "task_id": "t002", "deadline": 7, "amount": 100, "product_id": "p001", "destination": "b1" }
//!   ],
//!   "material_stock": { "m001": 250 }
//! }
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use mobplan_core::domain::model::ModelError;
use mobplan_core::{EnterpriseEnvironment, MobilizationTask};
use serde::{Deserialize, Serialize};

use crate::error::{from_json, IoError};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub tasks: Vec<MobilizationTask>,
    /// Replaces the enterprise's stock of the listed materials.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub material_stock: BTreeMap<String, f64>,
}

impl ProblemFile {
    /// Applies the stock overrides to `env`.
    pub fn bind(&self, env: &mut EnterpriseEnvironment) -> Result<(), IoError> {
        for (m, q) in &self.material_stock {
            let slot = env.material_stock.get_mut(m.as_str()).ok_or_else(|| ModelError::UnknownReference {
                kind: "material",
                id: m.clone(),
                context: "problem stock override".into(),
            })?;
            *slot = *q;
        }
        env.validate()?;
        Ok(())
    }
}

pub fn parse_problem(text: &str) -> Result<ProblemFile, IoError> {
    let problem: ProblemFile = from_json("problem", text)?;
    let mut seen = BTreeSet::new();
    for t in &problem.tasks {
        if !seen.insert(t.task_id.as_str()) {
            return Err(IoError::DuplicateTask(t.task_id.to_string()));
        }
        t.check()?;
    }
    Ok(problem)
}

pub fn read_problem(path: &Path) -> Result<ProblemFile, IoError> {
    parse_problem(&crate::read_text(path)?)
}
