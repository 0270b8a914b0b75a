//! Static enterprise model and goal tasks.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ids::{LineId, Location, MaterialId, ProductId, TaskId, UtilityId, VehicleId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("{what} must be positive, got {value}")]
    NotPositive { what: String, value: f64 },
    #[error("{what} must be non-negative, got {value}")]
    Negative { what: String, value: f64 },
    #[error("{context} refers to unknown {kind} `{id}`")]
    UnknownReference { kind: &'static str, id: String, context: String },
    #[error("no route from {site} to {destination}")]
    MissingRoute { site: Location, destination: Location },
    #[error("duplicate task id `{0}`")]
    DuplicateTask(TaskId),
}

fn positive(what: impl FnOnce() -> String, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::NotPositive { what: what(), value })
    }
}

fn non_negative(what: impl FnOnce() -> String, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::Negative { what: what(), value })
    }
}

/// One goal: produce `amount` units of `product_id` and deliver them to
/// `destination` within `deadline` hours.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MobilizationTask {
    pub task_id: TaskId,
    pub deadline: f64,
    pub amount: f64,
    pub product_id: ProductId,
    pub destination: Location,
}

impl MobilizationTask {
    pub fn new(
        task_id: impl Into<TaskId>,
        deadline: f64,
        amount: f64,
        product_id: impl Into<ProductId>,
        destination: impl Into<Location>,
    ) -> Result<Self, ModelError> {
        let task = Self {
            task_id: task_id.into(),
            deadline,
            amount,
            product_id: product_id.into(),
            destination: destination.into(),
        };
        task.check()?;
        Ok(task)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        positive(|| format!("deadline of {}", self.task_id), self.deadline)?;
        positive(|| format!("amount of {}", self.task_id), self.amount)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Product {
    pub product_id: ProductId,
    /// Units of each material consumed per unit of product.
    pub bom: BTreeMap<MaterialId, f64>,
    /// Units per hour.
    pub load_rate: f64,
    /// Units per hour.
    pub unload_rate: f64,
}

/// What a line does when producing one particular product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Capability {
    /// Units per hour.
    pub rate: f64,
    /// Cost per operating hour.
    pub cost_rate: f64,
    /// Utility units consumed per operating hour.
    pub utility_draw: BTreeMap<UtilityId, f64>,
    /// Workers occupied while operating.
    pub workers: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductionLine {
    pub line_id: LineId,
    /// Products absent from the map cannot be produced on this line.
    pub capability: BTreeMap<ProductId, Capability>,
}

impl ProductionLine {
    pub fn produces(&self, product: &ProductId) -> Option<&Capability> {
        self.capability.get(product)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vehicle {
    pub vehicle_id: VehicleId,
    /// Distance per hour.
    pub speed: f64,
    /// Units per trip, per product carried.
    pub capacity: BTreeMap<ProductId, f64>,
    /// Cost of one round trip.
    pub trip_cost: f64,
}

impl Vehicle {
    pub fn capacity_for(&self, product: &ProductId) -> Option<f64> {
        self.capacity.get(product).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinePolicy {
    /// Every line able to make the product is opened.
    #[default]
    AllCapable,
    /// Lines are opened one at a time in efficiency order until the task can be met.
    GammaEscalation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeadlineCheck {
    /// The last consignment must start unloading by the deadline.
    #[default]
    Arrival,
    /// The last consignment must be fully unloaded by the deadline.
    UnloadComplete,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PolicyConfig {
    #[serde(rename = "lines")]
    pub line_policy: LinePolicy,
    /// Setup delay when a line switches to a different product.
    pub changeover_hours: f64,
    pub deadline_check: DeadlineCheck,
    pub strict_deadlines: bool,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            line_policy: LinePolicy::AllCapable,
            changeover_hours: 0.5,
            deadline_check: DeadlineCheck::Arrival,
            strict_deadlines: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnterpriseEnvironment {
    pub site: Location,
    pub utility_totals: BTreeMap<UtilityId, f64>,
    pub worker_total: f64,
    pub material_stock: BTreeMap<MaterialId, f64>,
    pub products: BTreeMap<ProductId, Product>,
    pub lines: BTreeMap<LineId, ProductionLine>,
    pub vehicles: BTreeMap<VehicleId, Vehicle>,
    /// Distance from a site to each destination.
    pub routes: BTreeMap<Location, BTreeMap<Location, f64>>,
    pub policy: PolicyConfig,
}

impl EnterpriseEnvironment {
    /// Checks every quantity and cross-reference.
    pub fn validate(&self) -> Result<(), ModelError> {
        for (u, total) in &self.utility_totals {
            non_negative(|| format!("total of utility {u}"), *total)?;
        }
        non_negative(|| "worker total".into(), self.worker_total)?;
        for (m, stock) in &self.material_stock {
            non_negative(|| format!("stock of {m}"), *stock)?;
        }
        for (id, p) in &self.products {
            positive(|| format!("load rate of {id}"), p.load_rate)?;
            positive(|| format!("unload rate of {id}"), p.unload_rate)?;
            for (m, q) in &p.bom {
                non_negative(|| format!("bom quantity of {m} in {id}"), *q)?;
                if !self.material_stock.contains_key(m) {
                    return Err(unknown("material", m.as_str(), format!("bom of {id}")));
                }
            }
        }
        for (id, line) in &self.lines {
            for (p, cap) in &line.capability {
                if !self.products.contains_key(p) {
                    return Err(unknown("product", p.as_str(), format!("line {id}")));
                }
                positive(|| format!("rate of {id} for {p}"), cap.rate)?;
                positive(|| format!("cost rate of {id} for {p}"), cap.cost_rate)?;
                non_negative(|| format!("workers of {id} for {p}"), cap.workers)?;
                for (u, draw) in &cap.utility_draw {
                    non_negative(|| format!("{u} draw of {id} for {p}"), *draw)?;
                    if !self.utility_totals.contains_key(u) {
                        return Err(unknown("utility", u.as_str(), format!("line {id}")));
                    }
                }
            }
        }
        for (id, v) in &self.vehicles {
            positive(|| format!("speed of {id}"), v.speed)?;
            positive(|| format!("trip cost of {id}"), v.trip_cost)?;
            for (p, c) in &v.capacity {
                if !self.products.contains_key(p) {
                    return Err(unknown("product", p.as_str(), format!("vehicle {id}")));
                }
                positive(|| format!("capacity of {id} for {p}"), *c)?;
            }
        }
        for (site, dests) in &self.routes {
            for (d, dist) in dests {
                positive(|| format!("distance {site}->{d}"), *dist)?;
            }
        }
        non_negative(|| "changeover hours".into(), self.policy.changeover_hours)?;
        Ok(())
    }

    /// Distance from the enterprise site to `destination`.
    pub fn distance_to(&self, destination: &Location) -> Option<f64> {
        self.routes.get(&self.site)?.get(destination).copied()
    }

    pub fn capable_lines<'a, 'p>(
        &'a self,
        product: &'p ProductId,
    ) -> impl Iterator<Item = (&'a ProductionLine, &'a Capability)> + use<'a, 'p> {
        self.lines.values().filter_map(move |l| l.produces(product).map(|c| (l, c)))
    }

    pub fn capable_vehicles<'a, 'p>(
        &'a self,
        product: &'p ProductId,
    ) -> impl Iterator<Item = &'a Vehicle> + use<'a, 'p> {
        self.vehicles.values().filter(move |v| v.capacity.contains_key(product))
    }

    /// Checks that a task's product and destination exist.
    pub fn check_task(&self, task: &MobilizationTask) -> Result<(), ModelError> {
        task.check()?;
        if !self.products.contains_key(&task.product_id) {
            return Err(unknown("product", task.product_id.as_str(), format!("task {}", task.task_id)));
        }
        if self.distance_to(&task.destination).is_none() {
            return Err(ModelError::MissingRoute { site: self.site.clone(), destination: task.destination.clone() });
        }
        Ok(())
    }

    /// Checks a whole goal set, including uniqueness of task ids.
    pub fn check_tasks(&self, tasks: &[MobilizationTask]) -> Result<(), ModelError> {
        let mut seen: Vec<&TaskId> = Vec::with_capacity(tasks.len());
        for t in tasks {
            if seen.contains(&&t.task_id) {
                return Err(ModelError::DuplicateTask(t.task_id.clone()));
            }
            seen.push(&t.task_id);
            self.check_task(t)?;
        }
        Ok(())
    }
}

fn unknown(kind: &'static str, id: &str, context: String) -> ModelError {
    ModelError::UnknownReference { kind, id: id.into(), context }
}
