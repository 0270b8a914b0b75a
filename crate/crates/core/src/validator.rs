//! Independent plan checker.
//!
//! The plan is replayed against the enterprise model step by step. Durations
//! are recomputed directly from rates, speeds and distances, and production is
//! rebuilt from the `start` steps alone, so nothing here goes through the
//! planner's scheduling code. Every violation is collected; nothing fails fast.
//!
//! Timestamps may be rounded to one decimal, so each trip only has to be
//! consistent with *some* true load instant within ±0.05 h of every rendered
//! value.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::domain::model::{DeadlineCheck, EnterpriseEnvironment, MobilizationTask, PolicyConfig};
use crate::domain::plan::{Action, Plan};
use crate::ids::{LineId, MaterialId, ProductId, TaskId, VehicleId};

/// Slack allowed on rendered timestamps.
pub const TIME_TOLERANCE: f64 = 0.05;
const EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    TripTiming,
    TripSequence,
    Capacity,
    ProductMismatch,
    Inventory,
    VehicleOverlap,
    LineCapability,
    LineOverlap,
    DuplicateStart,
    MaterialLedger,
    ShortageAmount,
    ShortageOrder,
    UtilityBudget,
    WorkerConcurrency,
    Deadline,
    DeliveredTotal,
    NegativeTime,
    InfeasibleWithSteps,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::TripTiming => "trip-timing",
            Rule::TripSequence => "trip-sequence",
            Rule::Capacity => "capacity",
            Rule::ProductMismatch => "product-mismatch",
            Rule::Inventory => "inventory",
            Rule::VehicleOverlap => "vehicle-overlap",
            Rule::LineCapability => "line-capability",
            Rule::LineOverlap => "line-overlap",
            Rule::DuplicateStart => "duplicate-start",
            Rule::MaterialLedger => "material-ledger",
            Rule::ShortageAmount => "shortage-amount",
            Rule::ShortageOrder => "shortage-order",
            Rule::UtilityBudget => "utility-budget",
            Rule::WorkerConcurrency => "worker-concurrency",
            Rule::Deadline => "deadline",
            Rule::DeliveredTotal => "delivered-total",
            Rule::NegativeTime => "negative-time",
            Rule::InfeasibleWithSteps => "infeasible-with-steps",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// Plan step index, when the violation is tied to one step.
    pub step: Option<usize>,
    pub rule: Rule,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskSummary {
    pub task_id: TaskId,
    pub delivered: f64,
    pub amount: f64,
    pub last_arrival: Option<f64>,
    pub deadline: f64,
    /// Deadline minus the judged completion instant.
    pub margin: Option<f64>,
    pub reported_infeasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub verdict: Verdict,
    pub violations: Vec<Violation>,
    pub tasks: Vec<TaskSummary>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

/// The plan names something the model does not define.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unresolved identifiers: {}", .0.join("; "))]
pub struct ValidateError(pub Vec<String>);

struct Production {
    segments: Vec<(f64, f64, f64)>,
}

impl Production {
    fn produced(&self, t: f64) -> f64 {
        self.segments.iter().map(|(s, e, r)| r * (t.min(*e) - s).max(0.0)).sum()
    }
}

/// Instant at which lines starting at `starts` jointly reach `amount`, by bisection.
fn completion_instant(starts: &[(f64, f64)], amount: f64) -> Option<f64> {
    let hi = starts.iter().filter(|(_, r)| *r > 0.0).map(|(s, r)| s + amount / r).reduce(f64::min)?;
    let mut lo = starts.iter().map(|(s, _)| *s).reduce(f64::min)?;
    let mut hi = hi;
    let output = |t: f64| starts.iter().map(|(s, r)| r * (t - s).max(0.0)).sum::<f64>();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if output(mid) >= amount {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

struct OpenTrip {
    task: TaskId,
    product: ProductId,
    quantity: f64,
    times: Vec<f64>,
}

#[derive(Clone)]
struct LineRun {
    step: usize,
    line: LineId,
    task: TaskId,
    product: ProductId,
    start: f64,
    finish: f64,
}

struct Checker<'a> {
    env: &'a EnterpriseEnvironment,
    policy: &'a PolicyConfig,
    tasks: BTreeMap<&'a TaskId, &'a MobilizationTask>,
    violations: Vec<Violation>,
}

impl Checker<'_> {
    fn flag(&mut self, step: Option<usize>, rule: Rule, message: String) {
        self.violations.push(Violation { step, rule, message });
    }
}

fn resolve(
    plan: &Plan,
    env: &EnterpriseEnvironment,
    tasks: &BTreeMap<&TaskId, &MobilizationTask>,
) -> Result<(), ValidateError> {
    let mut missing = Vec::new();
    for step in &plan.steps {
        let i = step.index;
        if !tasks.contains_key(step.action.task()) {
            missing.push(format!("step {i}: unknown task {}", step.action.task()));
        }
        match &step.action {
            Action::Start { line, .. } if !env.lines.contains_key(line) => {
                missing.push(format!("step {i}: unknown line {line}"));
            }
            Action::ResourceShortage { material, .. } if !env.material_stock.contains_key(material) => {
                missing.push(format!("step {i}: unknown material {material}"));
            }
            Action::Load { vehicle, product, .. }
            | Action::Transport { vehicle, product, .. }
            | Action::Unload { vehicle, product, .. }
            | Action::Back { vehicle, product, .. } => {
                if !env.vehicles.contains_key(vehicle) {
                    missing.push(format!("step {i}: unknown vehicle {vehicle}"));
                }
                if !env.products.contains_key(product) {
                    missing.push(format!("step {i}: unknown product {product}"));
                }
            }
            _ => {}
        }
    }
    for r in &plan.infeasible {
        if !tasks.contains_key(&r.task_id) {
            missing.push(format!("infeasible record: unknown task {}", r.task_id));
        }
    }
    for t in tasks.values() {
        if !env.products.contains_key(&t.product_id) {
            missing.push(format!("task {}: unknown product {}", t.task_id, t.product_id));
        }
        if env.routes.get(&env.site).and_then(|r| r.get(&t.destination)).is_none() {
            missing.push(format!("task {}: no route to {}", t.task_id, t.destination));
        }
    }
    if missing.is_empty() {
        Ok(())
    } else {
        Err(ValidateError(missing))
    }
}

/// Checks `plan` against the model, the goal tasks and the policy.
pub fn validate(
    plan: &Plan,
    env: &EnterpriseEnvironment,
    tasks: &[MobilizationTask],
    policy: &PolicyConfig,
) -> Result<ValidationReport, ValidateError> {
    let task_map: BTreeMap<&TaskId, &MobilizationTask> = tasks.iter().map(|t| (&t.task_id, t)).collect();
    resolve(plan, env, &task_map)?;
    let mut ck = Checker { env, policy, tasks: task_map, violations: Vec::new() };

    let runs = ck.production_runs(plan);
    let production = ck.production_pools(&runs);
    ck.check_lines(&runs);
    ck.check_utilities(&runs);
    ck.check_workers(&runs);
    let tasks_out = ck.replay(plan, &production);

    let mut violations = ck.violations;
    violations.sort_by_key(|v| v.step.unwrap_or(usize::MAX));
    let verdict = if violations.is_empty() { Verdict::Pass } else { Verdict::Fail };
    Ok(ValidationReport { verdict, violations, tasks: tasks_out })
}

impl Checker<'_> {
    /// One run per valid `start` step, ending when the task's lines jointly
    /// reach its amount.
    fn production_runs(&mut self, plan: &Plan) -> Vec<LineRun> {
        let mut by_task: BTreeMap<TaskId, Vec<(usize, LineId, f64, f64)>> = BTreeMap::new();
        for step in &plan.steps {
            let Action::Start { line, time, task } = &step.action else { continue };
            let t = self.tasks[task];
            let Some(cap) = self.env.lines[line].capability.get(&t.product_id) else {
                self.flag(Some(step.index), Rule::LineCapability, format!("{line} cannot produce {}", t.product_id));
                continue;
            };
            let entry = by_task.entry(task.clone()).or_default();
            if entry.iter().any(|(_, l, _, _)| l == line) {
                self.flag(Some(step.index), Rule::DuplicateStart, format!("{line} started twice for {task}"));
                continue;
            }
            entry.push((step.index, line.clone(), *time, cap.rate));
        }
        let mut runs = Vec::new();
        for (task, starts) in by_task {
            let t = self.tasks[&task];
            let pairs: Vec<(f64, f64)> = starts.iter().map(|(_, _, s, r)| (*s, *r)).collect();
            let Some(finish) = completion_instant(&pairs, t.amount) else { continue };
            for (step, line, start, _) in starts {
                runs.push(LineRun {
                    step,
                    line,
                    task: task.clone(),
                    product: t.product_id.clone(),
                    start,
                    finish: finish.max(start),
                });
            }
        }
        runs
    }

    fn production_pools(&self, runs: &[LineRun]) -> BTreeMap<TaskId, Production> {
        let mut pools: BTreeMap<TaskId, Production> = BTreeMap::new();
        for r in runs {
            let rate = self.env.lines[&r.line].capability[&r.product].rate;
            pools
                .entry(r.task.clone())
                .or_insert_with(|| Production { segments: Vec::new() })
                .segments
                .push((r.start, r.finish, rate));
        }
        pools
    }

    fn check_lines(&mut self, runs: &[LineRun]) {
        let mut by_line: BTreeMap<&LineId, Vec<&LineRun>> = BTreeMap::new();
        for r in runs {
            by_line.entry(&r.line).or_default().push(r);
        }
        for (line, mut list) in by_line {
            list.sort_by(|a, b| a.start.total_cmp(&b.start));
            for w in list.windows(2) {
                let (prev, next) = (w[0], w[1]);
                let gap = if prev.product != next.product { self.policy.changeover_hours } else { 0.0 };
                if next.start + TIME_TOLERANCE + EPS < prev.finish + gap {
                    self.flag(
                        Some(next.step),
                        Rule::LineOverlap,
                        format!(
                            "{line} starts {} at {:.3} but is busy with {} until {:.3} (+{gap} changeover)",
                            next.task, next.start, prev.task, prev.finish
                        ),
                    );
                }
            }
        }
    }

    fn check_utilities(&mut self, runs: &[LineRun]) {
        let mut order: Vec<&LineRun> = runs.iter().collect();
        order.sort_by_key(|r| r.step);
        let mut used: BTreeMap<String, f64> = BTreeMap::new();
        let mut flagged = BTreeSet::new();
        for r in order {
            let cap = &self.env.lines[&r.line].capability[&r.product];
            for (u, draw) in &cap.utility_draw {
                let total = self.env.utility_totals.get(u).copied().unwrap_or(0.0);
                let acc = used.entry(u.0.clone()).or_insert(0.0);
                *acc += draw * (r.finish - r.start);
                if *acc > total * (1.0 + EPS) + EPS && flagged.insert(u.0.clone()) {
                    let acc = *acc;
                    self.flag(Some(r.step), Rule::UtilityBudget, format!("{u} use {acc:.3} exceeds total {total}"));
                }
            }
        }
    }

    fn check_workers(&mut self, runs: &[LineRun]) {
        let load: Vec<(usize, f64, f64, f64)> = runs
            .iter()
            .map(|r| (r.step, r.start, r.finish, self.env.lines[&r.line].capability[&r.product].workers))
            .collect();
        for (step, probe, _, _) in &load {
            let busy: f64 =
                load.iter().filter(|(_, s, e, _)| *s <= probe + EPS && probe + EPS < *e).map(|(_, _, _, w)| w).sum();
            if busy > self.env.worker_total + EPS {
                self.flag(
                    Some(*step),
                    Rule::WorkerConcurrency,
                    format!("{busy} workers busy at {probe:.3}, only {} available", self.env.worker_total),
                );
                break;
            }
        }
    }

    fn replay(&mut self, plan: &Plan, production: &BTreeMap<TaskId, Production>) -> Vec<TaskSummary> {
        let env = self.env;
        let mut stock: BTreeMap<MaterialId, f64> = env.material_stock.clone();
        let mut virtualized: BTreeMap<(TaskId, MaterialId), f64> = BTreeMap::new();
        let mut started: BTreeSet<TaskId> = BTreeSet::new();
        let mut open: BTreeMap<VehicleId, OpenTrip> = BTreeMap::new();
        let mut earliest_return: BTreeMap<VehicleId, f64> = BTreeMap::new();
        let mut loaded: BTreeMap<TaskId, f64> = BTreeMap::new();
        let mut delivered: BTreeMap<TaskId, f64> = BTreeMap::new();
        let mut trips: BTreeMap<TaskId, usize> = BTreeMap::new();
        let mut arrival: BTreeMap<TaskId, f64> = BTreeMap::new();
        let mut unloaded: BTreeMap<TaskId, f64> = BTreeMap::new();
        let mut with_steps: BTreeSet<TaskId> = BTreeSet::new();

        for step in &plan.steps {
            let i = Some(step.index);
            let task_id = step.action.task();
            let task = self.tasks[task_id];
            with_steps.insert(task_id.clone());
            if let Some(t) = step.action.time() {
                if t < -EPS {
                    self.flag(i, Rule::NegativeTime, format!("timestamp {t} is negative"));
                }
            }
            match &step.action {
                Action::ResourceShortage { task, material, lack } => {
                    if *lack <= 0.0 {
                        self.flag(i, Rule::ShortageAmount, format!("non-positive shortage {lack}"));
                    }
                    if started.contains(task) {
                        self.flag(
                            i,
                            Rule::ShortageOrder,
                            format!("shortage for {task} reported after production began"),
                        );
                    }
                    *stock.entry(material.clone()).or_insert(0.0) += lack;
                    *virtualized.entry((task.clone(), material.clone())).or_insert(0.0) += lack;
                }
                Action::Start { task, .. } => {
                    if !started.insert(task.clone()) {
                        continue;
                    }
                    let bom = &env.products[&task_ref(task, &self.tasks).product_id].bom;
                    for (m, per_unit) in bom {
                        let demand = per_unit * task_ref(task, &self.tasks).amount;
                        let credited = virtualized.get(&(task.clone(), m.clone())).copied().unwrap_or(0.0);
                        let have = stock.get(m).copied().unwrap_or(0.0);
                        let before = have - credited;
                        let deficit = (demand - before).max(0.0);
                        if demand > have + EPS * demand.max(1.0) {
                            self.flag(
                                i,
                                Rule::MaterialLedger,
                                format!("{m} goes negative for {task}: demand {demand}, available {have}"),
                            );
                        } else if credited > deficit + EPS * demand.max(1.0) {
                            self.flag(
                                i,
                                Rule::ShortageAmount,
                                format!("{m} shortage for {task} reported as {credited}, actual deficit {deficit}"),
                            );
                        }
                        stock.insert(m.clone(), (have - demand).max(0.0));
                    }
                    for ((t, m), _) in virtualized.iter().filter(|((t, _), _)| t == task) {
                        if !bom.contains_key(m) {
                            self.flag(i, Rule::ShortageAmount, format!("{t} does not consume {m}"));
                        }
                    }
                }
                Action::Load { vehicle, task: t, product, quantity, time } => {
                    if product != &task.product_id {
                        self.flag(
                            i,
                            Rule::ProductMismatch,
                            format!("{t} needs {}, step loads {product}", task.product_id),
                        );
                    }
                    match env.vehicles[vehicle].capacity.get(product) {
                        None => self.flag(i, Rule::Capacity, format!("{vehicle} cannot carry {product}")),
                        Some(cap) if *quantity > cap + EPS => self.flag(
                            i,
                            Rule::Capacity,
                            format!("{vehicle} carries at most {cap} of {product}, loads {quantity}"),
                        ),
                        _ => {}
                    }
                    if *quantity <= 0.0 {
                        self.flag(i, Rule::Capacity, format!("non-positive load {quantity}"));
                    }
                    if open.remove(vehicle).is_some() {
                        self.flag(i, Rule::TripSequence, format!("{vehicle} loads before finishing its previous trip"));
                    }
                    if let Some(ret) = earliest_return.get(vehicle) {
                        if time + TIME_TOLERANCE + EPS < *ret {
                            self.flag(
                                i,
                                Rule::VehicleOverlap,
                                format!("{vehicle} loads at {time} but returns no earlier than {ret:.3}"),
                            );
                        }
                    }
                    let cum = loaded.entry(t.clone()).or_insert(0.0);
                    *cum += quantity;
                    let made = production.get(t).map_or(0.0, |p| p.produced(time + TIME_TOLERANCE));
                    if made + EPS * cum.max(1.0) < *cum {
                        let cum = *cum;
                        self.flag(
                            i,
                            Rule::Inventory,
                            format!("{t}: {cum} units loaded by {time} but only {made:.3} produced"),
                        );
                    }
                    open.insert(
                        vehicle.clone(),
                        OpenTrip {
                            task: t.clone(),
                            product: product.clone(),
                            quantity: *quantity,
                            times: alloc::vec![*time],
                        },
                    );
                }
                Action::Transport { vehicle, task: t, product, quantity, time }
                | Action::Unload { vehicle, task: t, product, quantity, time } => {
                    let stage = if matches!(step.action, Action::Transport { .. }) { 1 } else { 2 };
                    let consistent = open.get(vehicle).is_some_and(|o| {
                        o.times.len() == stage
                            && &o.task == t
                            && &o.product == product
                            && (o.quantity - quantity).abs() <= EPS
                    });
                    if !consistent {
                        self.flag(
                            i,
                            Rule::TripSequence,
                            format!("{} of {vehicle} does not continue an open trip", step.action.keyword()),
                        );
                        open.remove(vehicle);
                        continue;
                    }
                    if let Some(o) = open.get_mut(vehicle) {
                        o.times.push(*time);
                    }
                    if stage == 2 {
                        *delivered.entry(t.clone()).or_insert(0.0) += quantity;
                        let a = arrival.entry(t.clone()).or_insert(f64::NEG_INFINITY);
                        *a = a.max(*time);
                    }
                }
                Action::Back { vehicle, task: t, product, time } => {
                    let trip = match open.remove(vehicle) {
                        Some(o) if o.times.len() == 3 && &o.task == t && &o.product == product => o,
                        _ => {
                            self.flag(i, Rule::TripSequence, format!("back of {vehicle} does not close an open trip"));
                            continue;
                        }
                    };
                    *trips.entry(t.clone()).or_insert(0) += 1;
                    let u = unloaded.entry(t.clone()).or_insert(f64::NEG_INFINITY);
                    *u = u.max(*time);
                    let p = &env.products[product];
                    let leg = env.routes[&env.site][&task.destination] / env.vehicles[vehicle].speed;
                    let offsets = [0.0, trip.quantity / p.load_rate, trip.quantity / p.load_rate + leg];
                    let back_offset = offsets[2] + trip.quantity / p.unload_rate;
                    let implied = trip.times.iter().zip(offsets).map(|(r, o)| r - o).chain([time - back_offset]);
                    let (lo, hi) =
                        implied.fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), x| (lo.max(x), hi.min(x)));
                    let (lo, hi) = (lo - TIME_TOLERANCE, hi + TIME_TOLERANCE);
                    let load_instant = if lo > hi + EPS {
                        self.flag(
                            i,
                            Rule::TripTiming,
                            format!(
                                "{vehicle} trip for {t}: timestamps {:?}/{time} disagree with load, drive and unload durations",
                                trip.times
                            ),
                        );
                        trip.times[0]
                    } else {
                        lo
                    };
                    earliest_return.insert(vehicle.clone(), load_instant + back_offset + leg);
                }
            }
        }

        for (vehicle, trip) in &open {
            self.flag(None, Rule::TripSequence, format!("{vehicle} trip for {} never completes", trip.task));
        }

        let mut summaries = Vec::new();
        let goals: Vec<&MobilizationTask> = self.tasks.values().copied().collect();
        for task in goals {
            let id = &task.task_id;
            let reported = plan.is_infeasible(id);
            let got = delivered.get(id).copied().unwrap_or(0.0);
            let last = arrival.get(id).copied();
            let judged = match self.policy.deadline_check {
                DeadlineCheck::Arrival => last,
                DeadlineCheck::UnloadComplete => unloaded.get(id).copied(),
            };
            if reported {
                if with_steps.contains(id) {
                    self.flag(None, Rule::InfeasibleWithSteps, format!("{id} is reported infeasible but has steps"));
                }
            } else {
                let slack = TIME_TOLERANCE * trips.get(id).copied().unwrap_or(0) as f64 + EPS;
                if (got - task.amount).abs() > slack {
                    self.flag(None, Rule::DeliveredTotal, format!("{id}: delivered {got} of {}", task.amount));
                }
                if let Some(j) = judged {
                    if j > task.deadline + EPS {
                        self.flag(
                            None,
                            Rule::Deadline,
                            format!("{id}: completes at {j} after deadline {}", task.deadline),
                        );
                    }
                }
            }
            summaries.push(TaskSummary {
                task_id: id.clone(),
                delivered: got,
                amount: task.amount,
                last_arrival: last,
                deadline: task.deadline,
                margin: judged.map(|j| task.deadline - j),
                reported_infeasible: reported,
            });
        }
        summaries
    }
}

fn task_ref<'a>(id: &TaskId, tasks: &BTreeMap<&'a TaskId, &'a MobilizationTask>) -> &'a MobilizationTask {
    tasks[id]
}
