//! Mobilization planning domain: enterprise model, efficiency heuristics and
//! the method/operator library.

pub mod cost;
pub mod heuristics;
pub mod model;
pub mod plan;
pub mod planner;
pub mod production;
pub mod state;
pub mod transport;

pub use cost::plan_cost;
pub use heuristics::{gamma_line, gamma_task, gamma_vehicle};
pub use model::{
    Capability, DeadlineCheck, EnterpriseEnvironment, LinePolicy, MobilizationTask, ModelError, PolicyConfig, Product,
    ProductionLine, Vehicle,
};
pub use plan::{Action, InfeasibleReason, InfeasibleTaskRecord, Plan, PlanStep, ShortageRecord};
pub use planner::{plan, PlanError, PlanOptions, PlanOutcome, StrictFailure};
pub use production::{plan_production, Engagement, ProductionOutcome};
pub use state::WorldState;
pub use transport::{plan_transport, TransportOutcome};
