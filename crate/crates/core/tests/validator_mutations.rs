mod common;

use common::{shortage_env, reference_env, task1, task2, task3};
use mobplan_core::domain::model::DeadlineCheck;
use mobplan_core::domain::{Action, InfeasibleReason, InfeasibleTaskRecord, PlanOptions};
use mobplan_core::validator::{validate, Rule, ValidationReport};
use mobplan_core::{plan, EnterpriseEnvironment, MobilizationTask, Plan};

fn golden(env: &EnterpriseEnvironment, tasks: &[MobilizationTask]) -> Vec<Action> {
    let p = plan(env, tasks, PlanOptions::default()).unwrap().result.unwrap();
    p.steps.into_iter().map(|s| s.action).collect()
}

fn check(env: &EnterpriseEnvironment, tasks: &[MobilizationTask], actions: Vec<Action>) -> ValidationReport {
    validate(&Plan::from_actions(actions, Vec::new()), env, tasks, &env.policy).unwrap()
}

fn time_mut(a: &mut Action) -> Option<&mut f64> {
    match a {
        Action::Start { time, .. }
        | Action::Load { time, .. }
        | Action::Transport { time, .. }
        | Action::Unload { time, .. }
        | Action::Back { time, .. } => Some(time),
        Action::ResourceShortage { .. } => None,
    }
}

fn shift(actions: &mut [Action], by: f64) {
    for a in actions {
        *time_mut(a).unwrap() += by;
    }
}

fn set_vehicle(actions: &mut [Action], to: &str) {
    for a in actions {
        match a {
            Action::Load { vehicle, .. }
            | Action::Transport { vehicle, .. }
            | Action::Unload { vehicle, .. }
            | Action::Back { vehicle, .. } => *vehicle = to.into(),
            _ => unreachable!(),
        }
    }
}

fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

/// Expects the single-task golden plan, mutated, to break `rule`.
fn task1_breaks(rule: Rule, mutate: impl FnOnce(&mut Vec<Action>)) {
    let env = reference_env();
    let mut actions = golden(&env, &[task1()]);
    mutate(&mut actions);
    let report = check(&env, &[task1()], actions);
    assert!(!report.passed());
    assert!(report.has(rule), "expected {rule}, got {:#?}", report.violations);
}

fn task23_breaks(rule: Rule, mutate: impl FnOnce(&mut Vec<Action>)) {
    let env = shortage_env();
    let tasks = [task2(), task3()];
    let mut actions = golden(&env, &tasks);
    mutate(&mut actions);
    let report = check(&env, &tasks, actions);
    assert!(report.has(rule), "expected {rule}, got {:#?}", report.violations);
}

#[test]
fn golden_plans_pass_at_rendered_precision() {
    for (env, tasks) in [(reference_env(), vec![task1()]), (shortage_env(), vec![task2(), task3()])] {
        let mut actions = golden(&env, &tasks);
        for a in &mut actions {
            if let Some(t) = time_mut(a) {
                *t = round1(*t);
            }
        }
        let report = check(&env, &tasks, actions);
        assert!(report.passed(), "{:#?}", report.violations);
        for s in &report.tasks {
            assert!(s.margin.unwrap() >= 0.0);
            assert_eq!(s.delivered, s.amount);
        }
    }
}

#[test]
fn overloaded_vehicle() {
    task1_breaks(Rule::Capacity, |a| {
        if let Action::Load { quantity, .. } = &mut a[10] {
            *quantity = 80.0;
        }
    });
}

#[test]
fn load_time_off_by_a_fraction() {
    task1_breaks(Rule::TripTiming, |a| *time_mut(&mut a[2]).unwrap() += 0.3);
}

#[test]
fn back_time_off() {
    task1_breaks(Rule::TripTiming, |a| *time_mut(&mut a[5]).unwrap() += 0.5);
}

#[test]
fn vehicle_reused_before_return() {
    task1_breaks(Rule::VehicleOverlap, |a| shift(&mut a[2..6], 0.3));
}

#[test]
fn loading_ahead_of_production() {
    task1_breaks(Rule::Inventory, |a| shift(&mut a[2..6], -0.5));
}

#[test]
fn late_final_arrival() {
    task1_breaks(Rule::Deadline, |a| shift(&mut a[14..18], 0.7));
}

#[test]
fn small_vehicle_substituted() {
    task1_breaks(Rule::Capacity, |a| set_vehicle(&mut a[10..14], "c004"));
}

#[test]
fn incapable_vehicle_substituted() {
    task1_breaks(Rule::Capacity, |a| set_vehicle(&mut a[6..10], "c006"));
}

#[test]
fn missing_unload() {
    task1_breaks(Rule::TripSequence, |a| {
        a.remove(4);
    });
}

#[test]
fn missing_back() {
    task1_breaks(Rule::TripSequence, |a| {
        a.remove(5);
    });
}

#[test]
fn missing_line_start() {
    task1_breaks(Rule::Inventory, |a| {
        a.remove(0);
    });
}

#[test]
fn missing_final_trip() {
    task1_breaks(Rule::DeliveredTotal, |a| a.truncate(14));
}

#[test]
fn line_without_capability() {
    task1_breaks(Rule::LineCapability, |a| {
        if let Action::Start { line, .. } = &mut a[0] {
            *line = "l002".into();
        }
    });
}

#[test]
fn line_started_twice() {
    task1_breaks(Rule::DuplicateStart, |a| {
        if let Action::Start { line, .. } = &mut a[1] {
            *line = "l003".into();
        }
    });
}

#[test]
fn wrong_product_carried() {
    task1_breaks(Rule::ProductMismatch, |a| {
        for x in &mut a[6..10] {
            match x {
                Action::Load { product, .. }
                | Action::Transport { product, .. }
                | Action::Unload { product, .. }
                | Action::Back { product, .. } => *product = "p002".into(),
                _ => {}
            }
        }
    });
}

#[test]
fn negative_timestamp() {
    task1_breaks(Rule::NegativeTime, |a| *time_mut(&mut a[0]).unwrap() = -1.0);
}

#[test]
fn infeasible_task_with_steps() {
    let env = reference_env();
    let actions = golden(&env, &[task1()]);
    let record = InfeasibleTaskRecord { task_id: "t001".into(), reason: InfeasibleReason::Deadline };
    let p = Plan::from_actions(actions, vec![record]);
    let report = validate(&p, &env, &[task1()], &env.policy).unwrap();
    assert!(report.has(Rule::InfeasibleWithSteps));
}

#[test]
fn unreported_task_without_steps() {
    let env = reference_env();
    let report = check(&env, &[task1()], Vec::new());
    assert!(report.has(Rule::DeliveredTotal));
}

#[test]
fn unload_complete_rule_rejects_late_unload() {
    let mut env = reference_env();
    let actions = golden(&env, &[task1()]);
    env.policy.deadline_check = DeadlineCheck::UnloadComplete;
    let report = check(&env, &[task1()], actions);
    assert!(report.has(Rule::Deadline));
}

#[test]
fn utility_budget_exceeded() {
    let mut env = reference_env();
    let actions = golden(&env, &[task1()]);
    env.utility_totals.insert("water".into(), 300.0);
    assert!(check(&env, &[task1()], actions).has(Rule::UtilityBudget));
}

#[test]
fn too_few_workers() {
    let mut env = reference_env();
    let actions = golden(&env, &[task1()]);
    env.worker_total = 40.0;
    assert!(check(&env, &[task1()], actions).has(Rule::WorkerConcurrency));
}

#[test]
fn unreported_shortage() {
    task23_breaks(Rule::MaterialLedger, |a| {
        a.remove(10);
    });
}

#[test]
fn overstated_shortage() {
    task23_breaks(Rule::ShortageAmount, |a| {
        if let Action::ResourceShortage { lack, .. } = &mut a[10] {
            *lack = 150.0;
        }
    });
}

#[test]
fn shortage_after_production_starts() {
    task23_breaks(Rule::ShortageOrder, |a| a.swap(10, 11));
}

#[test]
fn changeover_skipped() {
    task23_breaks(Rule::LineOverlap, |a| {
        let Action::Start { time, .. } = &mut a[20] else { panic!("{:?}", a[20]) };
        *time = 2.0;
    });
}

#[test]
fn unknown_identifiers_are_errors() {
    let env = reference_env();
    let mut actions = golden(&env, &[task1()]);
    set_vehicle(&mut actions[2..6], "c099");
    let err = validate(&Plan::from_actions(actions, Vec::new()), &env, &[task1()], &env.policy).unwrap_err();
    assert!(err.to_string().contains("c099"));
}

#[test]
fn violations_are_all_collected() {
    let env = reference_env();
    let mut actions = golden(&env, &[task1()]);
    if let Action::Load { quantity, .. } = &mut actions[10] {
        *quantity = 80.0;
    }
    *time_mut(&mut actions[2]).unwrap() += 0.3;
    let report = check(&env, &[task1()], actions);
    assert!(report.has(Rule::Capacity) && report.has(Rule::TripTiming));
    let steps: Vec<_> = report.violations.iter().filter_map(|v| v.step).collect();
    assert!(steps.windows(2).all(|w| w[0] <= w[1]));
}
