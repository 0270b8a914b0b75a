use std::collections::BTreeMap;

use mobplan_core::domain::model::{Capability, LinePolicy, Product, ProductionLine, Vehicle};
use mobplan_core::{EnterpriseEnvironment, MobilizationTask, PolicyConfig};
use proptest::prelude::*;

const LINES: [&str; 3] = ["l1", "l2", "l3"];
const VEHICLES: [&str; 4] = ["v1", "v2", "v3", "v4"];
const TASKS: [&str; 3] = ["t1", "t2", "t3"];
const MATERIALS: [&str; 4] = ["m1", "m2", "m3", "m4"];
const PRODUCTS: [&str; 2] = ["p1", "p2"];

#[derive(Debug, Clone)]
pub struct Instance {
    pub env: EnterpriseEnvironment,
    pub tasks: Vec<MobilizationTask>,
}

fn capability() -> impl Strategy<Value = Capability> {
    (5.0..50.0f64, 1.0..60.0f64, 0.0..40.0f64, 0.0..40.0f64, 1u32..40).prop_map(
        |(rate, cost_rate, water, power, workers)| Capability {
            rate,
            cost_rate,
            utility_draw: BTreeMap::from([("water".into(), water), ("power".into(), power)]),
            workers: workers.into(),
        },
    )
}

fn line(id: &'static str) -> impl Strategy<Value = ProductionLine> {
    (proptest::option::weighted(0.8, capability()), proptest::option::weighted(0.5, capability())).prop_map(
        move |(a, b)| {
            let capability = PRODUCTS.iter().zip([a, b]).filter_map(|(p, c)| Some(((*p).into(), c?))).collect();
            ProductionLine { line_id: id.into(), capability }
        },
    )
}

fn vehicle(id: &'static str) -> impl Strategy<Value = Vehicle> {
    (20.0..100.0f64, 10u32..80, proptest::option::of(10u32..80), 10.0..120.0f64).prop_map(
        move |(speed, cap1, cap2, trip_cost)| {
            let mut capacity = BTreeMap::from([("p1".into(), cap1.into())]);
            if let Some(c) = cap2 {
                capacity.insert("p2".into(), c.into());
            }
            Vehicle { vehicle_id: id.into(), speed, capacity, trip_cost }
        },
    )
}

fn product(id: &'static str, materials: usize) -> impl Strategy<Value = Product> {
    (proptest::collection::vec(0u32..4, materials), 20.0..80.0f64, 20.0..80.0f64).prop_map(
        move |(bom, load_rate, unload_rate)| Product {
            product_id: id.into(),
            bom: MATERIALS.iter().zip(bom).map(|(m, q)| ((*m).into(), q.into())).collect(),
            load_rate,
            unload_rate,
        },
    )
}

fn task(id: &'static str) -> impl Strategy<Value = MobilizationTask> {
    (2.0..40.0f64, 10u32..200, prop_oneof![Just("p1"), Just("p2")])
        .prop_map(move |(deadline, amount, p)| MobilizationTask::new(id, deadline, amount.into(), p, "b1").unwrap())
}

fn policy() -> impl Strategy<Value = LinePolicy> {
    prop_oneof![Just(LinePolicy::AllCapable), Just(LinePolicy::GammaEscalation)]
}

/// Up to three lines, four vehicles, three tasks and four materials, with
/// budgets tight enough that shortages and missed deadlines are common.
pub fn instance() -> impl Strategy<Value = Instance> {
    (1usize..=3, 1usize..=4, 1usize..=3, 1usize..=4).prop_flat_map(|(nl, nv, nt, nm)| {
        (
            LINES[..nl].iter().map(|id| line(id)).collect::<Vec<_>>(),
            VEHICLES[..nv].iter().map(|id| vehicle(id)).collect::<Vec<_>>(),
            (product("p1", nm), product("p2", nm)),
            TASKS[..nt].iter().map(|id| task(id)).collect::<Vec<_>>(),
            proptest::collection::vec(0u32..600, nm),
            (500.0..20000.0f64, 500.0..20000.0f64, 20u32..80, 10.0..120.0f64),
            (0.0..1.0f64, policy(), any::<bool>()),
        )
            .prop_map(
                |(
                    lines,
                    vehicles,
                    (p1, p2),
                    tasks,
                    stock,
                    (water, power, workers, distance),
                    (changeover, line_policy, strict),
                )| {
                    let env = EnterpriseEnvironment {
                        site: "a".into(),
                        utility_totals: BTreeMap::from([("water".into(), water), ("power".into(), power)]),
                        worker_total: workers.into(),
                        material_stock: MATERIALS.iter().zip(stock).map(|(m, s)| ((*m).into(), s.into())).collect(),
                        products: BTreeMap::from([("p1".into(), p1), ("p2".into(), p2)]),
                        lines: lines.into_iter().map(|l| (l.line_id.clone(), l)).collect(),
                        vehicles: vehicles.into_iter().map(|v| (v.vehicle_id.clone(), v)).collect(),
                        routes: BTreeMap::from([("a".into(), BTreeMap::from([("b1".into(), distance)]))]),
                        policy: PolicyConfig {
                            line_policy,
                            changeover_hours: changeover,
                            strict_deadlines: strict,
                            ..PolicyConfig::default()
                        },
                    };
                    Instance { env, tasks }
                },
            )
    })
}
