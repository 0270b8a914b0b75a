//! Generic total-order HTN search.
//!
//! Tasks are decomposed front to back: the first pending task is either a
//! primitive, grounded by its operator into candidate actions, or a compound
//! task, expanded by its methods into ordered subtasks. Every expansion is a
//! choice point whose alternatives are tried in order; when a subtree fails the
//! search resumes at the most recent choice point with the next alternative,
//! starting again from the state saved at that choice point.
//!
//! Goal tasks are not decomposed in the order given. Whenever no subtasks are
//! pending, the goal with the highest [`HtnTask::priority`] is taken next.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::hash::Hasher;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HtnError {
    #[error("duplicate operator name `{0}`")]
    DuplicateOperator(String),
    #[error("duplicate method name `{0}`")]
    DuplicateMethod(String),
    #[error("`{0}` names both an operator and a compound task")]
    AmbiguousTask(String),
    #[error("method `{method}` references unknown task `{subtask}`")]
    UnresolvedSubtask { method: String, subtask: String },
    #[error("no operator or method handles task `{0}`")]
    UnknownTask(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("method instance `{0}` is malformed: {1}")]
    InvalidMethodInstance(String, &'static str),
    #[error("operator `{operator}` applied outside its preconditions: {reason}")]
    ContractViolation { operator: String, reason: String },
    #[error("search exceeded the node limit of {0}")]
    NodeLimit(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TaskKind {
    Primitive,
    Compound,
}

pub trait HtnTask: Clone + fmt::Debug {
    /// Task symbol; matched against operator names and method task names.
    fn name(&self) -> &str;
    /// Stable identifier used for lexical tie-breaking.
    fn id(&self) -> String;
    /// Urgency used when choosing among goal tasks.
    fn priority(&self) -> f64 {
        0.0
    }
}

pub trait HtnAction: Clone + fmt::Debug {
    fn operator(&self) -> &str;
}

pub trait Operator<S, T, A> {
    fn name(&self) -> &'static str;
    /// Applicable ground instances of `task` in `state`, most preferred first.
    fn ground(&self, state: &S, task: &T) -> Vec<A>;
    /// `(state - effect⁻) ∪ effect⁺`, returned as a new state.
    fn apply(&self, state: &S, action: &A) -> Result<S, HtnError>;
}

pub trait Method<S, T> {
    fn name(&self) -> &'static str;
    /// Name of the compound task this method decomposes.
    fn task_name(&self) -> &'static str;
    /// Names of every task that may appear among the subtasks.
    fn subtask_names(&self) -> &'static [&'static str];
    fn instances(&self, state: &S, task: &T) -> Vec<MethodInstance<T>>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodInstance<T> {
    pub id: String,
    pub score: f64,
    pub subtasks: Vec<T>,
}

/// Hash of a state, used to check that backtracking restores states exactly.
pub trait Fingerprint {
    fn fingerprint(&self) -> u64;
}

/// 64-bit FNV-1a.
#[derive(Debug, Clone)]
pub struct Fnv64(u64);

impl Default for Fnv64 {
    fn default() -> Self {
        Self(0xcbf2_9ce4_8422_2325)
    }
}

impl Hasher for Fnv64 {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for b in bytes {
            self.0 ^= u64::from(*b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

/// Total order on heuristic scores: higher first, equal up to 1e-9.
pub fn compare_scores_desc(a: f64, b: f64) -> Ordering {
    score_key(b).cmp(&score_key(a))
}

fn score_key(score: f64) -> i64 {
    let scaled = score * 1e9;
    if scaled >= 0.0 {
        (scaled + 0.5) as i64
    } else {
        (scaled - 0.5) as i64
    }
}

/// Removes and returns the agenda element with the highest score, ties going
/// to the lexically smallest id.
pub fn select_next_task<T: HtnTask>(agenda: &mut Vec<T>, scorer: impl Fn(&T) -> f64) -> Option<T> {
    let best = agenda
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| compare_scores_desc(scorer(a), scorer(b)).then_with(|| a.id().cmp(&b.id())))
        .map(|(i, _)| i)?;
    Some(agenda.remove(best))
}

/// Operators and methods of a planning domain.
pub struct Domain<'d, S, T, A> {
    operators: BTreeMap<&'static str, Box<dyn Operator<S, T, A> + 'd>>,
    methods: Vec<Box<dyn Method<S, T> + 'd>>,
    compound: BTreeSet<&'static str>,
}

impl<S, T, A> fmt::Debug for Domain<'_, S, T, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Domain")
            .field("operators", &self.operators.keys().collect::<Vec<_>>())
            .field("methods", &self.methods.iter().map(|m| m.name()).collect::<Vec<_>>())
            .finish()
    }
}

impl<'d, S, T: HtnTask, A: HtnAction> Domain<'d, S, T, A> {
    pub fn new(
        operators: Vec<Box<dyn Operator<S, T, A> + 'd>>,
        methods: Vec<Box<dyn Method<S, T> + 'd>>,
    ) -> Result<Self, HtnError> {
        let mut by_name = BTreeMap::new();
        for op in operators {
            let name = op.name();
            if by_name.insert(name, op).is_some() {
                return Err(HtnError::DuplicateOperator(name.to_string()));
            }
        }
        let mut method_names = BTreeSet::new();
        let mut compound = BTreeSet::new();
        for m in &methods {
            if !method_names.insert(m.name()) {
                return Err(HtnError::DuplicateMethod(m.name().to_string()));
            }
            if by_name.contains_key(m.task_name()) {
                return Err(HtnError::AmbiguousTask(m.task_name().to_string()));
            }
            compound.insert(m.task_name());
        }
        for m in &methods {
            for sub in m.subtask_names() {
                if !by_name.contains_key(sub) && !compound.contains(sub) {
                    return Err(HtnError::UnresolvedSubtask { method: m.name().to_string(), subtask: sub.to_string() });
                }
            }
        }
        Ok(Self { operators: by_name, methods, compound })
    }

    pub fn kind(&self, task: &T) -> Result<TaskKind, HtnError> {
        if self.operators.contains_key(task.name()) {
            Ok(TaskKind::Primitive)
        } else if self.compound.contains(task.name()) {
            Ok(TaskKind::Compound)
        } else {
            Err(HtnError::UnknownTask(task.name().to_string()))
        }
    }

    /// Applicable ground actions for a primitive task; empty means the branch fails.
    pub fn expand_primitive(&self, task: &T, state: &S) -> Result<Vec<A>, HtnError> {
        let op = self.operators.get(task.name()).ok_or_else(|| HtnError::UnknownOperator(task.name().to_string()))?;
        Ok(op.ground(state, task))
    }

    /// Applicable method instances for a compound task, best score first and
    /// ties by id.
    pub fn expand_compound(&self, task: &T, state: &S) -> Result<Vec<MethodInstance<T>>, HtnError> {
        let mut out = Vec::new();
        for m in self.methods.iter().filter(|m| m.task_name() == task.name()) {
            for inst in m.instances(state, task) {
                if inst.subtasks.is_empty() {
                    return Err(HtnError::InvalidMethodInstance(inst.id, "no subtasks"));
                }
                if !inst.score.is_finite() || inst.score < 0.0 {
                    return Err(HtnError::InvalidMethodInstance(inst.id, "score must be finite and non-negative"));
                }
                out.push(inst);
            }
        }
        out.sort_by(|a, b| compare_scores_desc(a.score, b.score).then_with(|| a.id.cmp(&b.id)));
        Ok(out)
    }

    pub fn apply_action(&self, state: &S, action: &A) -> Result<S, HtnError> {
        let op = self
            .operators
            .get(action.operator())
            .ok_or_else(|| HtnError::UnknownOperator(action.operator().to_string()))?;
        op.apply(state, action)
    }
}

pub struct PlanningProblem<'d, S, T, A> {
    pub initial_state: S,
    pub domain: Domain<'d, S, T, A>,
    pub goal_tasks: Vec<T>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SearchConfig {
    /// Abort the whole search when any goal cannot be decomposed, instead of
    /// reporting that goal and carrying on with the rest.
    pub strict: bool,
    pub record_trace: bool,
    pub node_limit: Option<u64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub backtracks: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum TraceEvent {
    GoalSelected { goal: String },
    GoalAbandoned { goal: String },
    Alternative { depth: usize, task: String, index: usize, id: String, score: Option<f64>, state_fingerprint: u64 },
}

/// A goal that had no successful decomposition, with the state it was tried in.
#[derive(Debug, Clone)]
pub struct Unachieved<S, T> {
    pub task: T,
    pub state: S,
}

#[derive(Debug, Clone)]
pub struct Solution<S, T, A> {
    pub actions: Vec<A>,
    pub final_state: S,
    pub unachieved: Vec<Unachieved<S, T>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("no decomposition accomplishes every goal task")]
pub struct Failure;

#[derive(Debug, Clone)]
pub struct SearchOutcome<S, T, A> {
    pub result: Result<Solution<S, T, A>, Failure>,
    pub stats: SearchStats,
    pub trace: Vec<TraceEvent>,
}

enum Alternatives<T, A> {
    Actions(Vec<A>),
    Methods(Vec<MethodInstance<T>>),
}

impl<T, A> Alternatives<T, A> {
    fn len(&self) -> usize {
        match self {
            Self::Actions(v) => v.len(),
            Self::Methods(v) => v.len(),
        }
    }
}

struct Frame<S, T, A> {
    state: S,
    rest: Vec<T>,
    goals: Vec<T>,
    alternatives: Alternatives<T, A>,
    next: usize,
    actions_len: usize,
    task: String,
}

struct Search<'a, 'd, S, T, A> {
    domain: &'a Domain<'d, S, T, A>,
    config: SearchConfig,
    stats: SearchStats,
    trace: Vec<TraceEvent>,
}

impl<S, T, A> Search<'_, '_, S, T, A>
where
    S: Clone + Fingerprint,
    T: HtnTask,
    A: HtnAction,
{
    fn pick_goal(&mut self, goals: &mut Vec<T>) -> Option<T> {
        let goal = select_next_task(goals, |t| t.priority())?;
        if self.config.record_trace {
            self.trace.push(TraceEvent::GoalSelected { goal: goal.id() });
        }
        Some(goal)
    }

    /// Depth-first search from `(state, front, goals)`; `None` when every
    /// alternative is exhausted.
    fn run(&mut self, state: S, front: Vec<T>, goals: Vec<T>) -> Result<Option<(Vec<A>, S)>, HtnError> {
        let mut actions: Vec<A> = Vec::new();
        let mut stack: Vec<Frame<S, T, A>> = Vec::new();
        let mut node = Some((state, front, goals));

        loop {
            if let Some((state, mut front, mut goals)) = node.take() {
                if front.is_empty() {
                    match self.pick_goal(&mut goals) {
                        Some(goal) => front.push(goal),
                        None => return Ok(Some((actions, state))),
                    }
                }
                let task = front.remove(0);
                self.stats.nodes_expanded += 1;
                if let Some(limit) = self.config.node_limit {
                    if self.stats.nodes_expanded > limit {
                        return Err(HtnError::NodeLimit(limit));
                    }
                }
                let alternatives = match self.domain.kind(&task)? {
                    TaskKind::Primitive => Alternatives::Actions(self.domain.expand_primitive(&task, &state)?),
                    TaskKind::Compound => Alternatives::Methods(self.domain.expand_compound(&task, &state)?),
                };
                stack.push(Frame {
                    state,
                    rest: front,
                    goals,
                    alternatives,
                    next: 0,
                    actions_len: actions.len(),
                    task: task.name().to_string(),
                });
            }

            let depth = stack.len();
            let Some(frame) = stack.last_mut() else {
                return Ok(None);
            };
            actions.truncate(frame.actions_len);
            if frame.next >= frame.alternatives.len() {
                stack.pop();
                self.stats.backtracks += 1;
                continue;
            }
            let index = frame.next;
            frame.next += 1;

            match &frame.alternatives {
                Alternatives::Actions(list) => {
                    let action = &list[index];
                    if self.config.record_trace {
                        self.trace.push(TraceEvent::Alternative {
                            depth,
                            task: frame.task.clone(),
                            index,
                            id: action.operator().to_string(),
                            score: None,
                            state_fingerprint: frame.state.fingerprint(),
                        });
                    }
                    let next_state = self.domain.apply_action(&frame.state, action)?;
                    actions.push(action.clone());
                    node = Some((next_state, frame.rest.clone(), frame.goals.clone()));
                }
                Alternatives::Methods(list) => {
                    let inst = &list[index];
                    if self.config.record_trace {
                        self.trace.push(TraceEvent::Alternative {
                            depth,
                            task: frame.task.clone(),
                            index,
                            id: inst.id.clone(),
                            score: Some(inst.score),
                            state_fingerprint: frame.state.fingerprint(),
                        });
                    }
                    let mut front = inst.subtasks.clone();
                    front.extend(frame.rest.iter().cloned());
                    node = Some((frame.state.clone(), front, frame.goals.clone()));
                }
            }
        }
    }
}

/// Runs the search.
///
/// In strict mode the goals share one search tree, so a goal that cannot be
/// decomposed sends the search back into the choices made for earlier goals,
/// and exhausting the tree yields [`Failure`]. Otherwise each goal is searched
/// on its own from the state left by the goals before it; a goal with no
/// decomposition is recorded as [`Unachieved`] and skipped.
pub fn plan<S, T, A>(
    problem: &PlanningProblem<'_, S, T, A>,
    config: SearchConfig,
) -> Result<SearchOutcome<S, T, A>, HtnError>
where
    S: Clone + Fingerprint,
    T: HtnTask,
    A: HtnAction,
{
    let mut search = Search { domain: &problem.domain, config, stats: SearchStats::default(), trace: Vec::new() };

    let result = if config.strict {
        match search.run(problem.initial_state.clone(), Vec::new(), problem.goal_tasks.clone())? {
            Some((actions, final_state)) => Ok(Solution { actions, final_state, unachieved: Vec::new() }),
            None => Err(Failure),
        }
    } else {
        let mut state = problem.initial_state.clone();
        let mut goals = problem.goal_tasks.clone();
        let mut actions = Vec::new();
        let mut unachieved = Vec::new();
        while let Some(goal) = search.pick_goal(&mut goals) {
            match search.run(state.clone(), alloc::vec![goal.clone()], Vec::new())? {
                Some((mut acts, next)) => {
                    actions.append(&mut acts);
                    state = next;
                }
                None => {
                    if config.record_trace {
                        search.trace.push(TraceEvent::GoalAbandoned { goal: goal.id() });
                    }
                    unachieved.push(Unachieved { task: goal, state: state.clone() });
                }
            }
        }
        Ok(Solution { actions, final_state: state, unachieved })
    };

    Ok(SearchOutcome { result, stats: search.stats, trace: search.trace })
}
