use std::collections::{BTreeMap, HashMap};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use parking_lot::{Condvar, Mutex, RwLock};
use serde::{Deserialize, Deserializer};

use crate::bounds::{compare, compute_bound, BoundComparison, BoundReport};
use crate::model::SubRoutineBinding;
use crate::model::{
    Problem, ProblemId, ProblemState, ProblemSummary, SettingValue, Settings, Solution, SolutionStatus,
};
use crate::solver::{ChildRequest, ChildView, Outcome};
use crate::{MetaError, Registry};

/// Partial update of a problem. Absent fields are left alone; an explicit
/// `"solverId": null` clears the solver.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ProblemPatch {
    #[serde(default)]
    pub input: Option<String>,
    #[serde(default, deserialize_with = "present")]
    pub solver_id: Option<Option<String>>,
    #[serde(default)]
    pub solver_settings: Option<BTreeMap<String, serde_json::Value>>,
    /// Only `"SOLVING"` is accepted; anything else is rejected.
    #[serde(default)]
    pub state: Option<String>,
}

fn present<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Option<String>>, D::Error> {
    Option::<String>::deserialize(d).map(Some)
}

impl ProblemPatch {
    pub fn solve_with(solver_id: &str) -> Self {
        Self { solver_id: Some(Some(solver_id.into())), state: Some("SOLVING".into()), ..Self::default() }
    }
}

struct Entry {
    problem: Problem,
    /// Every state the problem has been in, oldest first.
    history: Vec<ProblemState>,
    /// Set while spawned children are outstanding; cleared before composing.
    awaiting_children: bool,
    started: Option<Instant>,
}

impl Entry {
    fn new(problem: Problem) -> Self {
        let history = vec![problem.state];
        Self { problem, history, awaiting_children: false, started: None }
    }

    fn set_state(&mut self, next: ProblemState) {
        if self.problem.state != next {
            debug_assert!(self.problem.state.can_become(next), "{} -> {next}", self.problem.state);
            self.problem.state = next;
            self.history.push(next);
        }
    }

    fn is_computing(&self) -> bool {
        self.problem.state == ProblemState::Solving
            && self.problem.solution.as_ref().is_some_and(|s| s.status == SolutionStatus::Computing)
    }
}

#[derive(Default)]
struct Store {
    problems: HashMap<ProblemId, Arc<Mutex<Entry>>>,
    order: Vec<ProblemId>,
}

struct Inner {
    registry: Registry,
    store: RwLock<Store>,
    generation: Mutex<u64>,
    changed: Condvar,
}

/// In-memory problem store and solver orchestration.
///
/// Locking: the store lock is never held while a problem lock is taken,
/// and a child's lock is only ever taken while holding its parent's, never
/// the other way round.
#[derive(Clone)]
pub struct ProblemManager {
    inner: Arc<Inner>,
}

impl Default for ProblemManager {
    fn default() -> Self {
        Self::new(Registry::standard())
    }
}

impl ProblemManager {
    pub fn new(registry: Registry) -> Self {
        Self {
            inner: Arc::new(Inner {
                registry,
                store: RwLock::new(Store::default()),
                generation: Mutex::new(0),
                changed: Condvar::new(),
            }),
        }
    }

    pub fn registry(&self) -> &Registry {
        &self.inner.registry
    }

    pub fn create(&self, type_id: &str, input: impl Into<String>) -> Result<Problem, MetaError> {
        if self.registry().problem_type(type_id).is_none() {
            return Err(MetaError::UnknownProblemType(type_id.to_string()));
        }
        let problem = Problem::new(type_id, input.into(), None);
        let snapshot = problem.clone();
        self.insert(vec![Entry::new(problem)]);
        Ok(snapshot)
    }

    pub fn get(&self, id: ProblemId) -> Result<Problem, MetaError> {
        Ok(self.cell(id)?.lock().problem.clone())
    }

    /// States `id` has passed through, oldest first.
    pub fn history(&self, id: ProblemId) -> Result<Vec<ProblemState>, MetaError> {
        Ok(self.cell(id)?.lock().history.clone())
    }

    pub fn list(&self, type_id: &str) -> Result<Vec<ProblemSummary>, MetaError> {
        if self.registry().problem_type(type_id).is_none() {
            return Err(MetaError::UnknownProblemType(type_id.to_string()));
        }
        let cells: Vec<_> = {
            let store = self.inner.store.read();
            store.order.iter().map(|id| store.problems[id].clone()).collect()
        };
        Ok(cells
            .iter()
            .map(|c| c.lock())
            .filter(|e| e.problem.type_id == type_id)
            .map(|e| e.problem.summary())
            .collect())
    }

    pub fn assign_solver(
        &self,
        id: ProblemId,
        solver_id: &str,
        settings: BTreeMap<String, serde_json::Value>,
    ) -> Result<Problem, MetaError> {
        let patch = ProblemPatch {
            solver_id: Some(Some(solver_id.into())),
            solver_settings: Some(settings),
            ..ProblemPatch::default()
        };
        self.apply_patch(id, patch, "assign a solver to")
    }

    pub fn clear_solver(&self, id: ProblemId) -> Result<Problem, MetaError> {
        self.apply_patch(id, ProblemPatch { solver_id: Some(None), ..ProblemPatch::default() }, "clear the solver of")
    }

    /// Replaces the input. The state is kept as is.
    pub fn set_input(&self, id: ProblemId, input: impl Into<String>) -> Result<Problem, MetaError> {
        self.apply_patch(
            id,
            ProblemPatch { input: Some(input.into()), ..ProblemPatch::default() },
            "change the input of",
        )
    }

    pub fn start_solving(&self, id: ProblemId) -> Result<Problem, MetaError> {
        let cell = self.cell(id)?;
        let snapshot = {
            let mut e = cell.lock();
            if e.problem.state != ProblemState::ReadyToSolve {
                return Err(MetaError::IllegalState { state: e.problem.state, action: "start solving" });
            }
            Self::begin(&mut e);
            e.problem.clone()
        };
        self.bump();
        self.dispatch(id);
        Ok(snapshot)
    }

    /// Applies every field of `patch` or none of them.
    pub fn patch(&self, id: ProblemId, patch: ProblemPatch) -> Result<Problem, MetaError> {
        self.apply_patch(id, patch, "patch")
    }

    fn apply_patch(&self, id: ProblemId, patch: ProblemPatch, action: &'static str) -> Result<Problem, MetaError> {
        let cell = self.cell(id)?;
        let snapshot = {
            let mut e = cell.lock();
            if !e.problem.state.is_configurable() {
                return Err(MetaError::IllegalState { state: e.problem.state, action });
            }
            let solve = match patch.state.as_deref() {
                None => false,
                Some("SOLVING") => true,
                Some(other) => {
                    return Err(MetaError::InvalidRequest(format!("state can only be set to SOLVING, not '{other}'")))
                }
            };
            let registry = self.registry();
            let empty = BTreeMap::new();
            let (solver_id, settings) = match (patch.solver_id, &patch.solver_settings) {
                (Some(None), Some(_)) => {
                    return Err(MetaError::InvalidRequest("solverSettings given while clearing the solver".into()))
                }
                (Some(None), None) => (None, Settings::default()),
                (Some(Some(s)), raw) => {
                    let settings = registry.configure(&e.problem.type_id, &s, raw.as_ref().unwrap_or(&empty))?;
                    (Some(s), settings)
                }
                (None, Some(raw)) => match &e.problem.solver_id {
                    Some(s) => (Some(s.clone()), registry.configure(&e.problem.type_id, s, raw)?),
                    None => {
                        return Err(MetaError::InvalidRequest("solverSettings given but no solver is assigned".into()))
                    }
                },
                (None, None) => (e.problem.solver_id.clone(), e.problem.solver_settings.clone()),
            };
            if solve && solver_id.is_none() {
                return Err(MetaError::InvalidRequest("a solver must be assigned before solving".into()));
            }

            if let Some(input) = patch.input {
                e.problem.input = input;
            }
            let configured = solver_id.is_some();
            e.problem.solver_id = solver_id;
            e.problem.solver_settings = settings;
            e.set_state(if configured { ProblemState::ReadyToSolve } else { ProblemState::NeedsConfiguration });
            if solve {
                Self::begin(&mut e);
            }
            e.problem.clone()
        };
        self.bump();
        if snapshot.state == ProblemState::Solving {
            self.dispatch(id);
        }
        Ok(snapshot)
    }

    /// Re-examines a waiting parent: composes once every child is SOLVED,
    /// fails once any child ends in ERROR or INVALID, otherwise does nothing.
    /// Safe to call any number of times.
    pub fn resolve_subproblem_completion(&self, parent: ProblemId) -> Result<Problem, MetaError> {
        let cell = self.cell(parent)?;
        let mut to_start = Vec::new();
        let mut grandparent = None;
        let snapshot = {
            let mut e = cell.lock();
            if e.awaiting_children && e.is_computing() {
                let mut views = Vec::new();
                let mut failed = None;
                let mut pending = false;
                for cid in e.problem.child_ids().collect::<Vec<_>>() {
                    let child = self.cell(cid)?;
                    let c = child.lock();
                    match &c.problem.solution {
                        Some(s) if c.problem.state == ProblemState::Solved && s.status == SolutionStatus::Solved => {
                            views.push(ChildView {
                                id: cid,
                                type_id: c.problem.type_id.clone(),
                                input: c.problem.input.clone(),
                                solution: s.clone(),
                            });
                        }
                        Some(s) if matches!(s.status, SolutionStatus::Error | SolutionStatus::Invalid) => {
                            failed = Some((cid, s.clone()));
                            break;
                        }
                        _ => pending = true,
                    }
                }
                if let Some((cid, sol)) = failed {
                    let mut failure = Solution::failed(
                        SolutionStatus::Error,
                        format!("subproblem {cid} ended with status {:?}", sol.status),
                    );
                    failure.metadata.insert("failedChild".into(), cid.to_string());
                    if let Some(reason) = sol.metadata.get("error") {
                        failure.metadata.insert("failedChildError".into(), reason.clone());
                    }
                    grandparent = self.settle(&mut e, failure);
                } else if !pending {
                    e.awaiting_children = false;
                    let outcome = self.compose(&e.problem, &views);
                    match outcome {
                        Outcome::Spawn(reqs) if !reqs.is_empty() => match self.attach(&mut e, reqs) {
                            Ok(ids) => to_start = ids,
                            Err(reason) => {
                                grandparent = self.settle(&mut e, Solution::failed(SolutionStatus::Error, reason))
                            }
                        },
                        Outcome::Spawn(_) => {
                            let reason = "composition requested an empty set of subproblems";
                            grandparent = self.settle(&mut e, Solution::failed(SolutionStatus::Error, reason));
                        }
                        other => grandparent = self.settle_outcome(&mut e, other),
                    }
                }
            }
            e.problem.clone()
        };
        self.bump();
        self.after_change(to_start, grandparent);
        Ok(snapshot)
    }

    /// Blocks until `id` is SOLVED or `timeout` passes; returns the latest snapshot.
    pub fn wait_for_terminal(&self, id: ProblemId, timeout: Duration) -> Result<Problem, MetaError> {
        let deadline = Instant::now() + timeout;
        let cell = self.cell(id)?;
        let mut generation = self.inner.generation.lock();
        loop {
            // checked with the generation lock held, so no wake-up can slip between check and wait
            let snapshot = cell.lock().problem.clone();
            if snapshot.state == ProblemState::Solved {
                return Ok(snapshot);
            }
            if self.inner.changed.wait_until(&mut generation, deadline).timed_out() {
                return Ok(cell.lock().problem.clone());
            }
        }
    }

    pub fn bound(&self, id: ProblemId) -> Result<BoundReport, MetaError> {
        let p = self.get(id)?;
        compute_bound(&p.type_id, &p.input).map_err(MetaError::Unparseable)?.ok_or(MetaError::NoBound(p.type_id))
    }

    /// Requires both a solved objective value and a computable bound.
    pub fn compare_bound(&self, id: ProblemId) -> Result<BoundComparison, MetaError> {
        let p = self.get(id)?;
        let value = p
            .solution
            .as_ref()
            .and_then(|s| s.objective_value)
            .ok_or_else(|| MetaError::MissingValue("the problem has no solution value yet".into()))?;
        let bound = match compute_bound(&p.type_id, &p.input) {
            Ok(Some(b)) => b,
            Ok(None) => return Err(MetaError::MissingValue(format!("no bound is defined for {} problems", p.type_id))),
            Err(e) => return Err(MetaError::MissingValue(format!("no bound: input cannot be parsed: {e}"))),
        };
        Ok(compare(bound, value))
    }

    fn cell(&self, id: ProblemId) -> Result<Arc<Mutex<Entry>>, MetaError> {
        self.inner.store.read().problems.get(&id).cloned().ok_or(MetaError::UnknownProblem(id))
    }

    fn insert(&self, entries: Vec<Entry>) {
        let mut store = self.inner.store.write();
        for e in entries {
            let id = e.problem.id;
            store.order.push(id);
            store.problems.insert(id, Arc::new(Mutex::new(e)));
        }
    }

    fn bump(&self) {
        *self.inner.generation.lock() += 1;
        self.inner.changed.notify_all();
    }

    fn begin(e: &mut Entry) {
        e.set_state(ProblemState::Solving);
        e.problem.solution = Some(Solution::computing());
        e.started = Some(Instant::now());
    }

    fn dispatch(&self, id: ProblemId) {
        let this = self.clone();
        std::thread::spawn(move || this.run(id));
    }

    fn run(&self, id: ProblemId) {
        let Ok(cell) = self.cell(id) else { return };
        let (solver, input, settings) = {
            let e = cell.lock();
            if !e.is_computing() {
                return;
            }
            let solver_id = e.problem.solver_id.as_deref().expect("SOLVING implies a solver");
            let solver = self.registry().solver(solver_id).expect("assigned solvers are registered").clone();
            (solver, e.problem.input.clone(), e.problem.solver_settings.clone())
        };
        let mut outcome = guarded(|| solver.solve(&input, &settings));
        let mut to_start = Vec::new();
        let mut parent = None;
        {
            let mut e = cell.lock();
            if !e.is_computing() {
                return;
            }
            if matches!(&outcome, Outcome::Spawn(reqs) if reqs.is_empty()) {
                outcome = self.compose(&e.problem, &[]);
                if matches!(outcome, Outcome::Spawn(_)) {
                    outcome = Outcome::Failed("composition without subproblems requested more".into());
                }
            }
            match outcome {
                Outcome::Spawn(reqs) => match self.attach(&mut e, reqs) {
                    Ok(ids) => to_start = ids,
                    Err(reason) => parent = self.settle(&mut e, Solution::failed(SolutionStatus::Error, reason)),
                },
                other => parent = self.settle_outcome(&mut e, other),
            }
        }
        self.bump();
        self.after_change(to_start, parent);
    }

    fn after_change(&self, to_start: Vec<ProblemId>, parent: Option<ProblemId>) {
        for id in to_start {
            // freshly configured children are READY_TO_SOLVE; a client may have raced us, which is fine
            let _ = self.start_solving(id);
        }
        if let Some(p) = parent {
            let _ = self.resolve_subproblem_completion(p);
        }
    }

    fn compose(&self, problem: &Problem, children: &[ChildView]) -> Outcome {
        let solver_id = problem.solver_id.as_deref().expect("SOLVING implies a solver");
        let solver = self.registry().solver(solver_id).expect("assigned solvers are registered");
        guarded(|| solver.compose(&problem.input, &problem.solver_settings, children))
    }

    /// Creates and binds the requested children under the (locked) parent.
    /// Returns the ids of children that came with a solver and should start.
    fn attach(&self, parent: &mut Entry, reqs: Vec<ChildRequest>) -> Result<Vec<ProblemId>, String> {
        let registry = self.registry();
        let declared = {
            let solver_id = parent.problem.solver_id.as_deref().expect("SOLVING implies a solver");
            registry.solver(solver_id).expect("registered").descriptor().sub_routines.clone()
        };
        let mut children = Vec::with_capacity(reqs.len());
        let mut auto = Vec::new();
        for req in reqs {
            if !declared.contains(&req.type_id) {
                return Err(format!("solver spawned an undeclared {} subproblem", req.type_id));
            }
            let mut entry = Entry::new(Problem::new(&req.type_id, req.input, Some(parent.problem.id)));
            if let Some(cs) = req.solver {
                let mut raw = cs.settings;
                if let Some(chain) = cs.chain {
                    raw.insert("childSolver".into(), chain.into());
                }
                if cs.seed_offset != 0 {
                    let seed_default =
                        registry.solver(&cs.solver_id).and_then(|s| match s.descriptor().setting("seed") {
                            Some(d) => match d.default {
                                SettingValue::Integer(v) => Some(v),
                                _ => None,
                            },
                            None => None,
                        });
                    if let Some(default) = seed_default {
                        let base = raw.get("seed").and_then(|v| v.as_i64()).unwrap_or(default);
                        raw.insert("seed".into(), base.wrapping_add(cs.seed_offset).into());
                    }
                }
                let settings = registry
                    .configure(&req.type_id, &cs.solver_id, &raw)
                    .map_err(|e| format!("cannot configure {} subproblem: {e}", req.type_id))?;
                entry.problem.solver_id = Some(cs.solver_id);
                entry.problem.solver_settings = settings;
                entry.set_state(ProblemState::ReadyToSolve);
                auto.push(entry.problem.id);
            }
            children.push(entry);
        }
        for child in &children {
            let ty = &child.problem.type_id;
            match parent.problem.sub_problems.iter_mut().find(|b| &b.sub_routine_type_id == ty) {
                Some(b) => b.child_problem_ids.push(child.problem.id),
                None => parent.problem.sub_problems.push(SubRoutineBinding {
                    sub_routine_type_id: ty.clone(),
                    child_problem_ids: vec![child.problem.id],
                }),
            }
        }
        self.insert(children);
        parent.awaiting_children = true;
        Ok(auto)
    }

    fn settle_outcome(&self, e: &mut Entry, outcome: Outcome) -> Option<ProblemId> {
        let solution = match outcome {
            Outcome::Solved(r) if r.result.is_empty() => {
                Solution::failed(SolutionStatus::Error, "solver returned an empty result")
            }
            Outcome::Solved(r) => Solution {
                status: SolutionStatus::Solved,
                result: r.result,
                objective_value: r.objective,
                metadata: r.metadata,
            },
            Outcome::Invalid(reason) => Solution::failed(SolutionStatus::Invalid, reason),
            Outcome::Failed(reason) => Solution::failed(SolutionStatus::Error, reason),
            Outcome::Spawn(_) => unreachable!("spawns are attached, not settled"),
        };
        self.settle(e, solution)
    }

    /// Stores the terminal solution; returns the parent to notify.
    fn settle(&self, e: &mut Entry, mut solution: Solution) -> Option<ProblemId> {
        debug_assert!(solution.status.is_terminal());
        if let Some(solver) = &e.problem.solver_id {
            solution.metadata.insert("solverId".into(), solver.clone());
        }
        if let Some(t) = e.started {
            solution.metadata.insert("wallTimeMs".into(), t.elapsed().as_millis().to_string());
        }
        e.problem.solution = Some(solution);
        e.awaiting_children = false;
        e.set_state(ProblemState::Solved);
        e.problem.parent_id
    }
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|panic| {
        let msg = panic
            .downcast_ref::<&str>()
            .map(|s| s.to_string())
            .or_else(|| panic.downcast_ref::<String>().cloned())
            .unwrap_or_else(|| "unknown panic".into());
        Outcome::Failed(format!("solver panicked: {msg}"))
    })
}
