use std::collections::BTreeMap;

use mobplan_core::domain::model::{Capability, LinePolicy, Product, ProductionLine, Vehicle};
use mobplan_core::{EnterpriseEnvironment, MobilizationTask, PolicyConfig};
use proptest::prelude::*;

#[derive(Debug, Clone)]
pub struct Instance {
    pub env: EnterpriseEnvironment,
    pub tasks: Vec<MobilizationTask>,
}

fn capability() -> impl Strategy<Value = Capability> {
    (5.0..50.0f64, 1.0..60.0f64, 0.0..40.0f64, 1.0..40.0f64).prop_map(|(rate, cost_rate, water, workers)| Capability {
        rate,
        cost_rate,
        utility_draw: BTreeMap::from([("water".into(), water)]),
        workers: workers.round(),
    })
}

fn line(id: &'static str) -> impl Strategy<Value = ProductionLine> {
    (proptest::option::weighted(0.8, capability()), proptest::option::weighted(0.5, capability())).prop_map(
        move |(a, b)| {
            let mut capability = BTreeMap::new();
            if let Some(c) = a {
                capability.insert("p1".into(), c);
            }
            if let Some(c) = b {
                capability.insert("p2".into(), c);
            }
            ProductionLine { line_id: id.into(), capability }
        },
    )
}

fn vehicle(id: &'static str) -> impl Strategy<Value = Vehicle> {
    (20.0..100.0f64, 10.0..80.0f64, 10.0..80.0f64, any::<bool>(), 10.0..120.0f64).prop_map(
        move |(speed, cap1, cap2, both, trip_cost)| {
            let mut capacity = BTreeMap::from([("p1".into(), cap1.round())]);
            if both {
                capacity.insert("p2".into(), cap2.round());
            }
            Vehicle { vehicle_id: id.into(), speed, capacity, trip_cost }
        },
    )
}

fn product(id: &'static str) -> impl Strategy<Value = Product> {
    (0.0..3.0f64, 0.0..3.0f64, 20.0..80.0f64, 20.0..80.0f64).prop_map(move |(a, b, load_rate, unload_rate)| Product {
        product_id: id.into(),
        bom: BTreeMap::from([("m1".into(), a.round()), ("m2".into(), b.round())]),
        load_rate,
        unload_rate,
    })
}

fn task(id: &'static str) -> impl Strategy<Value = MobilizationTask> {
    (1.0..30.0f64, 10.0..200.0f64, prop_oneof![Just("p1"), Just("p2")])
        .prop_map(move |(deadline, amount, p)| MobilizationTask::new(id, deadline, amount.round(), p, "b1").unwrap())
}

/// At most two lines, two vehicles and two tasks, with budgets tight enough
/// to make shortages, exhausted utilities and missed deadlines common.
pub fn instance(policy: LinePolicy, strict: bool) -> impl Strategy<Value = Instance> {
    (
        (line("l1"), proptest::option::of(line("l2"))),
        (vehicle("v1"), proptest::option::of(vehicle("v2"))),
        (product("p1"), product("p2")),
        (task("t1"), proptest::option::of(task("t2"))),
        (0.0..600.0f64, 0.0..600.0f64, 500.0..20000.0f64, 20.0..80.0f64, 20.0..200.0f64),
        0.0..1.0f64,
    )
        .prop_map(
            move |((l1, l2), (v1, v2), (p1, p2), (t1, t2), (m1, m2, water, workers, distance), changeover)| {
                let lines = [Some(l1), l2].into_iter().flatten().map(|l| (l.line_id.clone(), l)).collect();
                let vehicles = [Some(v1), v2].into_iter().flatten().map(|v| (v.vehicle_id.clone(), v)).collect();
                let env = EnterpriseEnvironment {
                    site: "a".into(),
                    utility_totals: BTreeMap::from([("water".into(), water)]),
                    worker_total: workers.round(),
                    material_stock: BTreeMap::from([("m1".into(), m1.round()), ("m2".into(), m2.round())]),
                    products: BTreeMap::from([("p1".into(), p1), ("p2".into(), p2)]),
                    lines,
                    vehicles,
                    routes: BTreeMap::from([("a".into(), BTreeMap::from([("b1".into(), distance)]))]),
                    policy: PolicyConfig {
                        line_policy: policy,
                        changeover_hours: changeover,
                        strict_deadlines: strict,
                        ..PolicyConfig::default()
                    },
                };
                let tasks = [Some(t1), t2].into_iter().flatten().collect();
                Instance { env, tasks }
            },
        )
}
