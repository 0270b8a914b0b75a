//! HTN encoding of mobilization tasks and the top-level planning entry point.
//!
//! ```text
//! accomplish(t)      --engage-lines-->   secure-materials(t), deliver(t, engagement)
//! deliver(t, e)      --dispatch-pool-->  start(l)…, load(v), transport(v), unload(v), back(v), …
//! ```
//!
//! `engage-lines` has one instance per line set allowed by the policy and
//! `dispatch-pool` one instance per efficiency-ranked vehicle prefix whose
//! simulated dispatch meets the deadline. A line's `start` is placed just
//! before the first trip that draws on its output.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::marker::PhantomData;

use serde::Serialize;
use thiserror::Error;

use super::heuristics::gamma_task;
use super::model::{EnterpriseEnvironment, MobilizationTask, ModelError};
use super::plan::{Action, InfeasibleReason, InfeasibleTaskRecord, Plan, ShortageRecord};
use super::production::{engagement_options, resources_fit, secure_materials, Engagement};
use super::state::{Cargo, CargoStage, WorkerReservation, WorldState};
use super::transport::{dispatch_pool, meets_deadline, pool_label, pool_order, pool_score};
use crate::htn::{
    self, select_next_task, Domain, HtnAction, HtnError, HtnTask, Method, MethodInstance, Operator, PlanningProblem,
    SearchConfig, SearchStats, TraceEvent,
};
use crate::ids::{LineId, ProductId, TaskId, VehicleId};

const EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum MobTask {
    Accomplish(MobilizationTask),
    SecureMaterials { task: TaskId },
    Deliver { task: TaskId, engagement: Engagement },
    Start { task: TaskId, line: LineId, finish: f64 },
    Load { task: TaskId, vehicle: VehicleId, quantity: f64 },
    Transport { task: TaskId, vehicle: VehicleId },
    Unload { task: TaskId, vehicle: VehicleId },
    Back { task: TaskId, vehicle: VehicleId },
}

impl HtnTask for MobTask {
    fn name(&self) -> &str {
        match self {
            MobTask::Accomplish(_) => "accomplish",
            MobTask::SecureMaterials { .. } => "secure-materials",
            MobTask::Deliver { .. } => "deliver",
            MobTask::Start { .. } => "start",
            MobTask::Load { .. } => "load",
            MobTask::Transport { .. } => "transport",
            MobTask::Unload { .. } => "unload",
            MobTask::Back { .. } => "back",
        }
    }

    fn id(&self) -> String {
        match self {
            MobTask::Accomplish(t) => t.task_id.to_string(),
            MobTask::SecureMaterials { task } | MobTask::Deliver { task, .. } => format!("{}/{task}", self.name()),
            MobTask::Start { task, line, .. } => format!("start/{task}/{line}"),
            MobTask::Load { task, vehicle, .. }
            | MobTask::Transport { task, vehicle }
            | MobTask::Unload { task, vehicle }
            | MobTask::Back { task, vehicle } => format!("{}/{task}/{vehicle}", self.name()),
        }
    }

    fn priority(&self) -> f64 {
        match self {
            MobTask::Accomplish(t) => gamma_task(t),
            _ => 0.0,
        }
    }
}

/// Ground action; converted to plan steps once the search succeeds.
#[derive(Debug, Clone, PartialEq)]
pub enum MobAction {
    SecureMaterials { task: TaskId, shortages: Vec<ShortageRecord> },
    Start { line: LineId, task: TaskId, product: ProductId, time: f64, finish: f64 },
    Load { vehicle: VehicleId, task: TaskId, product: ProductId, quantity: f64, time: f64 },
    Transport { vehicle: VehicleId, task: TaskId, product: ProductId, quantity: f64, time: f64 },
    Unload { vehicle: VehicleId, task: TaskId, product: ProductId, quantity: f64, time: f64 },
    Back { vehicle: VehicleId, task: TaskId, product: ProductId, time: f64 },
}

impl HtnAction for MobAction {
    fn operator(&self) -> &str {
        match self {
            MobAction::SecureMaterials { .. } => "secure-materials",
            MobAction::Start { .. } => "start",
            MobAction::Load { .. } => "load",
            MobAction::Transport { .. } => "transport",
            MobAction::Unload { .. } => "unload",
            MobAction::Back { .. } => "back",
        }
    }
}

impl MobAction {
    /// The primitive task this action grounds.
    fn task(&self) -> MobTask {
        match self {
            MobAction::SecureMaterials { task, .. } => MobTask::SecureMaterials { task: task.clone() },
            MobAction::Start { line, task, finish, .. } => {
                MobTask::Start { task: task.clone(), line: line.clone(), finish: *finish }
            }
            MobAction::Load { vehicle, task, quantity, .. } => {
                MobTask::Load { task: task.clone(), vehicle: vehicle.clone(), quantity: *quantity }
            }
            MobAction::Transport { vehicle, task, .. } => {
                MobTask::Transport { task: task.clone(), vehicle: vehicle.clone() }
            }
            MobAction::Unload { vehicle, task, .. } => MobTask::Unload { task: task.clone(), vehicle: vehicle.clone() },
            MobAction::Back { vehicle, task, .. } => MobTask::Back { task: task.clone(), vehicle: vehicle.clone() },
        }
    }

    fn into_steps(self) -> Vec<Action> {
        match self {
            MobAction::SecureMaterials { shortages, .. } => shortages
                .into_iter()
                .map(|s| Action::ResourceShortage { task: s.task_id, material: s.material_id, lack: s.lack_amount })
                .collect(),
            MobAction::Start { line, task, time, .. } => vec![Action::Start { line, time, task }],
            MobAction::Load { vehicle, task, product, quantity, time } => {
                vec![Action::Load { vehicle, task, product, quantity, time }]
            }
            MobAction::Transport { vehicle, task, product, quantity, time } => {
                vec![Action::Transport { vehicle, task, product, quantity, time }]
            }
            MobAction::Unload { vehicle, task, product, quantity, time } => {
                vec![Action::Unload { vehicle, task, product, quantity, time }]
            }
            MobAction::Back { vehicle, task, product, time } => vec![Action::Back { vehicle, task, product, time }],
        }
    }
}

/// Everything operators and methods need besides the state.
#[derive(Debug)]
pub struct Context<'e> {
    pub env: &'e EnterpriseEnvironment,
    pub tasks: BTreeMap<TaskId, MobilizationTask>,
}

impl Context<'_> {
    fn task(&self, id: &TaskId) -> Result<&MobilizationTask, String> {
        self.tasks.get(id).ok_or_else(|| format!("unknown task {id}"))
    }
}

/// Operators share one shape: `ground_one` decides applicability and the
/// timestamps; `apply` re-grounds to check the action before taking effect.
trait MobOperator {
    const NAME: &'static str;
    fn ground_one(&self, state: &WorldState, task: &MobTask) -> Result<MobAction, String>;
    fn effects(&self, state: &WorldState, action: &MobAction) -> WorldState;
}

struct Op<'c, 'e, T> {
    ctx: &'c Context<'e>,
    kind: PhantomData<T>,
}

impl<T: Copy> Op<'_, '_, T> {
    fn ctx(&self) -> &Context<'_> {
        self.ctx
    }
}

impl<T: Copy> Operator<WorldState, MobTask, MobAction> for Op<'_, '_, T>
where
    Self: MobOperator,
{
    fn name(&self) -> &'static str {
        <Self as MobOperator>::NAME
    }

    fn ground(&self, state: &WorldState, task: &MobTask) -> Vec<MobAction> {
        self.ground_one(state, task).into_iter().collect()
    }

    fn apply(&self, state: &WorldState, action: &MobAction) -> Result<WorldState, HtnError> {
        let violation = |reason: String| HtnError::ContractViolation { operator: Self::NAME.to_string(), reason };
        let expected = self.ground_one(state, &action.task()).map_err(violation)?;
        if &expected != action {
            return Err(violation(format!("expected {expected:?}, got {action:?}")));
        }
        Ok(self.effects(state, action))
    }
}

#[derive(Clone, Copy)]
struct SecureOp;
#[derive(Clone, Copy)]
struct StartOp;
#[derive(Clone, Copy)]
struct LoadOp;
#[derive(Clone, Copy)]
struct TransportOp;
#[derive(Clone, Copy)]
struct UnloadOp;
#[derive(Clone, Copy)]
struct BackOp;

impl MobOperator for Op<'_, '_, SecureOp> {
    const NAME: &'static str = "secure-materials";

    fn ground_one(&self, state: &WorldState, task: &MobTask) -> Result<MobAction, String> {
        let MobTask::SecureMaterials { task } = task else { return Err("not a secure-materials task".into()) };
        let t = self.ctx().task(task)?;
        let (shortages, _) = secure_materials(t, state, self.ctx().env);
        Ok(MobAction::SecureMaterials { task: task.clone(), shortages })
    }

    fn effects(&self, state: &WorldState, action: &MobAction) -> WorldState {
        let MobAction::SecureMaterials { task, .. } = action else { unreachable!() };
        let t = &self.ctx().tasks[task];
        secure_materials(t, state, self.ctx().env).1
    }
}

impl MobOperator for Op<'_, '_, StartOp> {
    const NAME: &'static str = "start";

    fn ground_one(&self, state: &WorldState, task: &MobTask) -> Result<MobAction, String> {
        let MobTask::Start { task, line, finish } = task else { return Err("not a start task".into()) };
        let env = self.ctx().env;
        let t = self.ctx().task(task)?;
        let cap = env
            .lines
            .get(line)
            .and_then(|l| l.produces(&t.product_id))
            .ok_or_else(|| format!("{line} cannot produce {}", t.product_id))?;
        let time = state.line_ready_at(line, &t.product_id, env.policy.changeover_hours);
        if time >= finish - EPS {
            return Err(format!("{line} is not ready before {finish}"));
        }
        let hours = finish - time;
        for (u, draw) in &cap.utility_draw {
            let left = state.utility_remaining.get(u).copied().unwrap_or(0.0);
            if draw * hours > left + EPS * (draw * hours).max(1.0) {
                return Err(format!("{u} exhausted"));
            }
        }
        let reservation = WorkerReservation { line: line.clone(), start: time, end: *finish, workers: cap.workers };
        if state.peak_workers(&[reservation]) > env.worker_total + EPS {
            return Err("worker pool exhausted".into());
        }
        Ok(MobAction::Start {
            line: line.clone(),
            task: task.clone(),
            product: t.product_id.clone(),
            time,
            finish: *finish,
        })
    }

    fn effects(&self, state: &WorldState, action: &MobAction) -> WorldState {
        let MobAction::Start { line, task, product, time, finish } = action else { unreachable!() };
        state.with_line_started(self.ctx().env, task, product, line, *time, *finish)
    }
}

impl MobOperator for Op<'_, '_, LoadOp> {
    const NAME: &'static str = "load";

    fn ground_one(&self, state: &WorldState, task: &MobTask) -> Result<MobAction, String> {
        let MobTask::Load { task, vehicle, quantity } = task else { return Err("not a load task".into()) };
        let env = self.ctx().env;
        let t = self.ctx().task(task)?;
        let v = env.vehicles.get(vehicle).ok_or_else(|| format!("unknown vehicle {vehicle}"))?;
        let cap = v.capacity_for(&t.product_id).ok_or_else(|| format!("{vehicle} cannot carry {}", t.product_id))?;
        if *quantity <= 0.0 || *quantity > cap + EPS {
            return Err(format!("{quantity} outside capacity {cap}"));
        }
        if state.cargo.contains_key(vehicle) {
            return Err(format!("{vehicle} is already loaded"));
        }
        let stream = state.streams.get(task).ok_or_else(|| format!("nothing produced for {task}"))?;
        let ready = stream.available_at(state.claimed_of(task) + quantity).map_err(|e| e.to_string())?;
        let time = ready.max(state.vehicle_free(vehicle));
        Ok(MobAction::Load {
            vehicle: vehicle.clone(),
            task: task.clone(),
            product: t.product_id.clone(),
            quantity: *quantity,
            time,
        })
    }

    fn effects(&self, state: &WorldState, action: &MobAction) -> WorldState {
        let MobAction::Load { vehicle, task, product, quantity, time } = action else { unreachable!() };
        let rate = self.ctx().env.products[product].load_rate;
        let cargo =
            Cargo { task: task.clone(), product: product.clone(), quantity: *quantity, stage: CargoStage::Loaded };
        state.with_loaded(vehicle, cargo, time + quantity / rate)
    }
}

fn cargo_in<'s>(
    state: &'s WorldState,
    task: &TaskId,
    vehicle: &VehicleId,
    stage: CargoStage,
) -> Result<&'s Cargo, String> {
    match state.cargo.get(vehicle) {
        Some(c) if &c.task == task && c.stage == stage => Ok(c),
        _ => Err(format!("{vehicle} holds no {stage:?} cargo for {task}")),
    }
}

fn leg_hours(ctx: &Context<'_>, task: &TaskId, vehicle: &VehicleId) -> f64 {
    let t = &ctx.tasks[task];
    ctx.env.distance_to(&t.destination).unwrap_or(f64::INFINITY) / ctx.env.vehicles[vehicle].speed
}

impl MobOperator for Op<'_, '_, TransportOp> {
    const NAME: &'static str = "transport";

    fn ground_one(&self, state: &WorldState, task: &MobTask) -> Result<MobAction, String> {
        let MobTask::Transport { task, vehicle } = task else { return Err("not a transport task".into()) };
        let c = cargo_in(state, task, vehicle, CargoStage::Loaded)?;
        Ok(MobAction::Transport {
            vehicle: vehicle.clone(),
            task: task.clone(),
            product: c.product.clone(),
            quantity: c.quantity,
            time: state.vehicle_free(vehicle),
        })
    }

    fn effects(&self, state: &WorldState, action: &MobAction) -> WorldState {
        let MobAction::Transport { vehicle, task, time, .. } = action else { unreachable!() };
        state.with_stage(vehicle, CargoStage::InTransit, time + leg_hours(self.ctx(), task, vehicle))
    }
}

impl MobOperator for Op<'_, '_, UnloadOp> {
    const NAME: &'static str = "unload";

    fn ground_one(&self, state: &WorldState, task: &MobTask) -> Result<MobAction, String> {
        let MobTask::Unload { task, vehicle } = task else { return Err("not an unload task".into()) };
        let c = cargo_in(state, task, vehicle, CargoStage::InTransit)?;
        Ok(MobAction::Unload {
            vehicle: vehicle.clone(),
            task: task.clone(),
            product: c.product.clone(),
            quantity: c.quantity,
            time: state.vehicle_free(vehicle),
        })
    }

    fn effects(&self, state: &WorldState, action: &MobAction) -> WorldState {
        let MobAction::Unload { vehicle, product, quantity, time, .. } = action else { unreachable!() };
        let rate = self.ctx().env.products[product].unload_rate;
        state.with_stage(vehicle, CargoStage::Unloaded, time + quantity / rate)
    }
}

impl MobOperator for Op<'_, '_, BackOp> {
    const NAME: &'static str = "back";

    fn ground_one(&self, state: &WorldState, task: &MobTask) -> Result<MobAction, String> {
        let MobTask::Back { task, vehicle } = task else { return Err("not a back task".into()) };
        let c = cargo_in(state, task, vehicle, CargoStage::Unloaded)?;
        Ok(MobAction::Back {
            vehicle: vehicle.clone(),
            task: task.clone(),
            product: c.product.clone(),
            time: state.vehicle_free(vehicle),
        })
    }

    fn effects(&self, state: &WorldState, action: &MobAction) -> WorldState {
        let MobAction::Back { vehicle, task, time, .. } = action else { unreachable!() };
        state.with_returned(vehicle, time + leg_hours(self.ctx(), task, vehicle))
    }
}

struct EngageLines<'c, 'e>(&'c Context<'e>);

impl Method<WorldState, MobTask> for EngageLines<'_, '_> {
    fn name(&self) -> &'static str {
        "engage-lines"
    }

    fn task_name(&self) -> &'static str {
        "accomplish"
    }

    fn subtask_names(&self) -> &'static [&'static str] {
        &["secure-materials", "deliver"]
    }

    fn instances(&self, state: &WorldState, task: &MobTask) -> Vec<MethodInstance<MobTask>> {
        let MobTask::Accomplish(t) = task else { return Vec::new() };
        engagement_options(t, state, self.0.env)
            .into_iter()
            .filter(|(e, _)| resources_fit(e, state, self.0.env))
            .map(|(engagement, score)| MethodInstance {
                id: format!("engage-lines/{}/{}", t.task_id, engagement.label()),
                score,
                subtasks: vec![
                    MobTask::SecureMaterials { task: t.task_id.clone() },
                    MobTask::Deliver { task: t.task_id.clone(), engagement },
                ],
            })
            .collect()
    }
}

struct DispatchPool<'c, 'e>(&'c Context<'e>);

impl Method<WorldState, MobTask> for DispatchPool<'_, '_> {
    fn name(&self) -> &'static str {
        "dispatch-pool"
    }

    fn task_name(&self) -> &'static str {
        "deliver"
    }

    fn subtask_names(&self) -> &'static [&'static str] {
        &["start", "load", "transport", "unload", "back"]
    }

    fn instances(&self, state: &WorldState, task: &MobTask) -> Vec<MethodInstance<MobTask>> {
        let MobTask::Deliver { task, engagement } = task else { return Vec::new() };
        let Some(t) = self.0.tasks.get(task) else { return Vec::new() };
        let env = self.0.env;
        let schedule = engagement.schedule();
        let order = pool_order(t, env);
        let mut out = Vec::new();
        for k in 1..=order.len() {
            let pool = &order[..k];
            let Ok(dispatch) = dispatch_pool(t, state, env, &schedule, pool) else { continue };
            if !meets_deadline(&dispatch, t, env.policy.deadline_check) {
                continue;
            }
            let mut subtasks = Vec::new();
            let mut pending: Vec<_> = engagement.lines.iter().collect();
            let mut claimed = 0.0;
            for trip in &dispatch.trips {
                claimed += trip.quantity;
                let ready = schedule.available_at(claimed).unwrap_or(engagement.finish);
                let (mut now, later): (Vec<_>, Vec<_>) = pending.into_iter().partition(|l| l.start < ready - EPS);
                pending = later;
                now.sort_by(|a, b| b.rate.total_cmp(&a.rate).then_with(|| a.line.cmp(&b.line)));
                subtasks.extend(now.into_iter().map(|l| MobTask::Start {
                    task: task.clone(),
                    line: l.line.clone(),
                    finish: engagement.finish,
                }));
                let (v, tk) = (trip.vehicle_id.clone(), task.clone());
                subtasks.push(MobTask::Load { task: tk.clone(), vehicle: v.clone(), quantity: trip.quantity });
                subtasks.push(MobTask::Transport { task: tk.clone(), vehicle: v.clone() });
                subtasks.push(MobTask::Unload { task: tk.clone(), vehicle: v.clone() });
                subtasks.push(MobTask::Back { task: tk, vehicle: v });
            }
            subtasks.extend(pending.into_iter().map(|l| MobTask::Start {
                task: task.clone(),
                line: l.line.clone(),
                finish: engagement.finish,
            }));
            out.push(MethodInstance {
                id: format!("dispatch-pool/{task}/{}", pool_label(pool)),
                score: pool_score(pool),
                subtasks,
            });
        }
        out
    }
}

/// Builds the HTN domain over a shared context.
pub fn build_domain<'c, 'e>(ctx: &'c Context<'e>) -> Result<Domain<'c, WorldState, MobTask, MobAction>, HtnError> {
    Domain::new(
        vec![
            Box::new(Op { ctx, kind: PhantomData::<SecureOp> }),
            Box::new(Op { ctx, kind: PhantomData::<StartOp> }),
            Box::new(Op { ctx, kind: PhantomData::<LoadOp> }),
            Box::new(Op { ctx, kind: PhantomData::<TransportOp> }),
            Box::new(Op { ctx, kind: PhantomData::<UnloadOp> }),
            Box::new(Op { ctx, kind: PhantomData::<BackOp> }),
        ],
        vec![Box::new(EngageLines(ctx)), Box::new(DispatchPool(ctx))],
    )
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PlanError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Search(#[from] HtnError),
}

/// Strict-mode failure, with the tasks a lenient run could not accomplish.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[error("strict planning failed: {} task(s) cannot be accomplished", infeasible.len())]
pub struct StrictFailure {
    pub infeasible: Vec<InfeasibleTaskRecord>,
}

#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub result: Result<Plan, StrictFailure>,
    pub stats: SearchStats,
    /// Goal tasks in the order they were taken up.
    pub goal_order: Vec<TaskId>,
    pub trace: Vec<TraceEvent>,
    pub final_state: Option<WorldState>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PlanOptions {
    pub record_trace: bool,
    pub node_limit: Option<u64>,
}

/// Why a goal could not be decomposed from `state`.
pub fn diagnose(task: &MobilizationTask, state: &WorldState, env: &EnterpriseEnvironment) -> InfeasibleReason {
    let options = engagement_options(task, state, env);
    if options.is_empty() {
        InfeasibleReason::NoCapability
    } else if !options.iter().any(|(e, _)| resources_fit(e, state, env)) {
        InfeasibleReason::UtilityExhausted
    } else {
        InfeasibleReason::Deadline
    }
}

/// Plans every task against `env`, whose policy decides line engagement,
/// changeover, the deadline rule and strictness.
pub fn plan(
    env: &EnterpriseEnvironment,
    tasks: &[MobilizationTask],
    options: PlanOptions,
) -> Result<PlanOutcome, PlanError> {
    env.validate()?;
    env.check_tasks(tasks)?;
    let ctx = Context { env, tasks: tasks.iter().map(|t| (t.task_id.clone(), t.clone())).collect() };
    let problem = PlanningProblem {
        initial_state: WorldState::initial(env),
        domain: build_domain(&ctx)?,
        goal_tasks: tasks.iter().cloned().map(MobTask::Accomplish).collect(),
    };
    let config = SearchConfig {
        strict: env.policy.strict_deadlines,
        record_trace: options.record_trace,
        node_limit: options.node_limit,
    };
    let outcome = htn::plan(&problem, config)?;

    let mut agenda = problem.goal_tasks.clone();
    let mut goal_order = Vec::new();
    while let Some(t) = select_next_task(&mut agenda, |t| t.priority()) {
        if let MobTask::Accomplish(t) = t {
            goal_order.push(t.task_id);
        }
    }

    let (result, final_state) = match outcome.result {
        Ok(solution) => {
            let infeasible = solution
                .unachieved
                .iter()
                .filter_map(|u| match &u.task {
                    MobTask::Accomplish(t) => {
                        Some(InfeasibleTaskRecord { task_id: t.task_id.clone(), reason: diagnose(t, &u.state, env) })
                    }
                    _ => None,
                })
                .collect();
            let steps = solution.actions.into_iter().flat_map(MobAction::into_steps);
            (Ok(Plan::from_actions(steps, infeasible)), Some(solution.final_state))
        }
        Err(_) => {
            let mut lenient_env = env.clone();
            lenient_env.policy.strict_deadlines = false;
            let rerun = plan(&lenient_env, tasks, PlanOptions { record_trace: false, ..options })?;
            let infeasible = rerun.result.map(|p| p.infeasible).unwrap_or_default();
            (Err(StrictFailure { infeasible }), None)
        }
    };

    Ok(PlanOutcome { result, stats: outcome.stats, goal_order, trace: outcome.trace, final_state })
}
