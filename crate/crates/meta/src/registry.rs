use std::collections::BTreeMap;
use std::sync::Arc;

use crate::model::{Direction, ProblemType, SettingValue, Settings, SolverDescriptor};
use crate::solver::Solver;
use crate::{chain, solvers, MetaError};

/// Problem types and the solvers registered for them, in registration order.
#[derive(Clone, Default)]
pub struct Registry {
    types: Vec<ProblemType>,
    solvers: Vec<Arc<dyn Solver>>,
}

impl Registry {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Every built-in problem type and solver.
    pub fn standard() -> Self {
        let mut r = Self::empty();
        for (id, direction, description) in [
            ("cluster-vrp", Direction::Minimize, "Capacitated vehicle routing with a single depot"),
            ("tsp", Direction::Minimize, "Travelling salesperson over planar points"),
            ("knapsack", Direction::Maximize, "0/1 knapsack with integer weights"),
            ("qubo", Direction::Minimize, "Quadratic unconstrained binary optimisation"),
            ("quantum-circuit-processing", Direction::Minimize, "A sampling job for a (simulated) quantum backend"),
        ] {
            r.add_type(ProblemType { id: id.into(), description: description.into(), direction });
        }
        for s in solvers::builtin() {
            r.add_solver(s).expect("built-in solvers are consistent");
        }
        r
    }

    pub fn add_type(&mut self, ty: ProblemType) {
        if !self.types.iter().any(|t| t.id == ty.id) {
            self.types.push(ty);
        }
    }

    pub fn add_solver(&mut self, solver: Arc<dyn Solver>) -> Result<(), MetaError> {
        let d = solver.descriptor();
        if self.problem_type(&d.problem_type_id).is_none() {
            return Err(MetaError::UnknownProblemType(d.problem_type_id.clone()));
        }
        if self.solver(&d.solver_id).is_some() {
            return Err(MetaError::InvalidRequest(format!("solver {} registered twice", d.solver_id)));
        }
        if let Some(bad) = d.settings.iter().find(|s| !s.default_is_valid()) {
            return Err(MetaError::InvalidSetting {
                name: bad.name.clone(),
                reason: "default does not fit its kind".into(),
            });
        }
        self.solvers.push(solver);
        Ok(())
    }

    pub fn problem_types(&self) -> &[ProblemType] {
        &self.types
    }

    pub fn problem_type(&self, id: &str) -> Option<&ProblemType> {
        self.types.iter().find(|t| t.id == id)
    }

    pub fn solver(&self, id: &str) -> Option<&Arc<dyn Solver>> {
        self.solvers.iter().find(|s| s.descriptor().solver_id == id)
    }

    pub fn list_solvers(&self, type_id: &str) -> Result<Vec<&SolverDescriptor>, MetaError> {
        if self.problem_type(type_id).is_none() {
            return Err(MetaError::UnknownProblemType(type_id.to_string()));
        }
        Ok(self.solvers.iter().map(|s| s.descriptor()).filter(|d| d.problem_type_id == type_id).collect())
    }

    /// Looks up `solver_id` for a problem of `type_id` and resolves `raw`
    /// against its settings schema.
    pub fn configure(
        &self,
        type_id: &str,
        solver_id: &str,
        raw: &BTreeMap<String, serde_json::Value>,
    ) -> Result<Settings, MetaError> {
        let solver = self.solver(solver_id).ok_or_else(|| MetaError::UnknownSolver(solver_id.to_string()))?;
        let d = solver.descriptor();
        if d.problem_type_id != type_id {
            return Err(MetaError::SolverTypeMismatch {
                solver: solver_id.to_string(),
                expected: d.problem_type_id.clone(),
                got: type_id.to_string(),
            });
        }
        let settings = resolve_settings(d, raw)?;
        if let Some(SettingValue::Text(text)) = settings.get("childSolver") {
            self.check_chain(d, text)?;
        }
        Ok(settings)
    }

    /// Every link must name a registered solver for the next problem type
    /// down the chain.
    fn check_chain(&self, owner: &SolverDescriptor, text: &str) -> Result<(), MetaError> {
        let invalid = |reason: String| MetaError::InvalidSetting { name: "childSolver".into(), reason };
        let ids = chain::solver_ids(text).map_err(invalid)?;
        let mut allowed = owner.sub_routines.clone();
        for id in ids {
            let d = self.solver(&id).ok_or_else(|| invalid(format!("unknown solver '{id}'")))?.descriptor();
            if !allowed.contains(&d.problem_type_id) {
                return Err(invalid(format!(
                    "'{id}' solves {} but {} is expected",
                    d.problem_type_id,
                    allowed.join("/")
                )));
            }
            allowed = d.sub_routines.clone();
        }
        Ok(())
    }
}

/// Type-checks supplied settings and fills the rest with defaults.
pub fn resolve_settings(
    descriptor: &SolverDescriptor,
    raw: &BTreeMap<String, serde_json::Value>,
) -> Result<Settings, MetaError> {
    if let Some(unknown) = raw.keys().find(|k| descriptor.setting(k).is_none()) {
        return Err(MetaError::InvalidSetting { name: unknown.clone(), reason: "no such setting".into() });
    }
    let mut out = BTreeMap::new();
    for s in &descriptor.settings {
        let value = match raw.get(&s.name) {
            Some(v) => s.check(v).map_err(|reason| MetaError::InvalidSetting { name: s.name.clone(), reason })?,
            None => s.default.clone(),
        };
        out.insert(s.name.clone(), value);
    }
    Ok(Settings(out))
}
