//! Scenario files: world, robots, starts and goals as JSON.

use std::path::{Path as FsPath, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::constraints::ManifoldConstraint;
use crate::geometry::{Configuration, RobotModel, World};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },
    #[error("unknown built-in scenario {0:?}")]
    UnknownBuiltin(String),
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotSpec {
    pub model: RobotModel,
    #[serde(default)]
    pub constraint: ManifoldConstraint,
    pub start: Configuration,
    pub goals: Vec<Configuration>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    pub world: World,
    pub robots: Vec<RobotSpec>,
}

const BUILTINS: &[(&str, &str)] = &[
    ("doorway2d", include_str!("../scenarios/doorway2d.json")),
    ("arm_doorway", include_str!("../scenarios/arm_doorway.json")),
    ("cross2", include_str!("../scenarios/cross2.json")),
    ("cross3", include_str!("../scenarios/cross3.json")),
    ("cross4", include_str!("../scenarios/cross4.json")),
];

impl Scenario {
    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTINS.iter().map(|(n, _)| *n)
    }

    pub fn builtin(name: &str) -> Result<Self, ScenarioError> {
        let (_, json) = BUILTINS
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| ScenarioError::UnknownBuiltin(name.to_string()))?;
        Self::from_json(json)
    }

    /// Raw JSON of a built-in scenario.
    pub fn builtin_json(name: &str) -> Option<&'static str> {
        BUILTINS.iter().find(|(n, _)| *n == name).map(|(_, j)| *j)
    }

    pub fn from_json(json: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = serde_json::from_str(json)?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn load(path: impl AsRef<FsPath>) -> Result<Self, ScenarioError> {
        let path = path.as_ref();
        let json = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&json)
    }

    pub fn save(&self, path: impl AsRef<FsPath>) -> Result<(), ScenarioError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json() + "\n").map_err(|source| ScenarioError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn models(&self) -> Vec<RobotModel> {
        self.robots.iter().map(|r| r.model.clone()).collect()
    }

    /// Checks every scenario invariant, naming the first offending field.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        self.world.check().map_err(|m| invalid("world", m))?;
        if self.robots.is_empty() {
            return Err(invalid("robots", "at least one robot is required"));
        }
        for (i, r) in self.robots.iter().enumerate() {
            r.model.check().map_err(|m| invalid(format!("robots[{i}].model"), m))?;
            r.constraint
                .check()
                .map_err(|m| invalid(format!("robots[{i}].constraint"), m))?;
            self.check_config(i, &r.start, format!("robots[{i}].start"))?;
            if r.goals.is_empty() {
                return Err(invalid(format!("robots[{i}].goals"), "at least one goal is required"));
            }
            for (g, q) in r.goals.iter().enumerate() {
                self.check_config(i, q, format!("robots[{i}].goals[{g}]"))?;
            }
        }
        for i in 0..self.robots.len() {
            for j in (i + 1)..self.robots.len() {
                let (a, b) = (&self.robots[i], &self.robots[j]);
                if a.model.body(&a.start).intersects(&b.model.body(&b.start)) {
                    return Err(invalid(
                        format!("robots[{j}].start"),
                        format!("overlaps the start of robot {i}"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_config(&self, robot: usize, q: &Configuration, field: String) -> Result<(), ScenarioError> {
        let r = &self.robots[robot];
        if q.len() != r.model.dof() {
            return Err(invalid(field, format!("expected {} values, got {}", r.model.dof(), q.len())));
        }
        if !q.is_finite() {
            return Err(invalid(field, "values must be finite"));
        }
        let residual = r.constraint.violation(&r.model, q);
        if residual > r.constraint.tolerance {
            return Err(invalid(field, format!("violates the constraint (residual {residual:e})")));
        }
        if r.model.body(q).collides_with_world(&self.world) {
            return Err(invalid(field, "collides with the world"));
        }
        Ok(())
    }

    /// Copy of this scenario with fresh random starts and single goals. Each
    /// start and goal is constraint-valid, collision-free, and clear of the
    /// other robots' starts (respectively goals). Returns `None` if sampling
    /// fails too often.
    pub fn with_random_terminals<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Scenario> {
        const ATTEMPTS: usize = 10_000;
        let mut out = self.clone();
        let mut starts: Vec<Configuration> = Vec::new();
        let mut goals: Vec<Configuration> = Vec::new();
        for r in &self.robots {
            for placed in [&mut starts, &mut goals] {
                let mut found = None;
                for _ in 0..ATTEMPTS {
                    let raw = r.model.sample_uniform(&self.world, rng);
                    let Ok(q) = r.constraint.project(&r.model, &raw) else {
                        continue;
                    };
                    if !r.constraint.is_satisfied(&r.model, &q) || r.model.body(&q).collides_with_world(&self.world) {
                        continue;
                    }
                    let body = r.model.body(&q);
                    let clear = placed
                        .iter()
                        .zip(&self.robots)
                        .all(|(p, o)| !o.model.body(p).intersects(&body));
                    if clear {
                        found = Some(q);
                        break;
                    }
                }
                placed.push(found?);
            }
        }
        for ((r, s), g) in out.robots.iter_mut().zip(starts).zip(goals) {
            r.start = s;
            r.goals = vec![g];
        }
        out.name = format!("{}_random", self.name);
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn builtins_parse_and_validate() {
        for name in Scenario::builtin_names() {
            let s = Scenario::builtin(name).unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(s.name, name);
        }
        assert!(matches!(Scenario::builtin("nope"), Err(ScenarioError::UnknownBuiltin(_))));
    }

    #[test]
    fn doorway_is_a_swap() {
        let s = Scenario::builtin("doorway2d").unwrap();
        assert_eq!(s.robots.len(), 2);
        assert_eq!(s.robots[0].start, s.robots[1].goals[0]);
        assert_eq!(s.robots[1].start, s.robots[0].goals[0]);
    }

    #[test]
    fn start_inside_obstacle_names_the_robot() {
        let mut s = Scenario::builtin("doorway2d").unwrap();
        s.robots[1].start = Configuration::new(vec![5.0, 1.0]);
        let err = Scenario::from_json(&s.to_json()).unwrap_err();
        match err {
            ScenarioError::Validation { field, .. } => assert_eq!(field, "robots[1].start"),
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(Scenario::from_json("{\"name\": 3}"), Err(ScenarioError::Parse(_))));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for name in Scenario::builtin_names() {
            let s = Scenario::builtin(name).unwrap();
            let f = dir.path().join(format!("{name}.json"));
            s.save(&f).unwrap();
            assert_eq!(Scenario::load(&f).unwrap(), s);
        }
        assert!(matches!(
            Scenario::load(dir.path().join("missing.json")),
            Err(ScenarioError::Io { .. })
        ));
    }

    #[test]
    fn random_terminals_are_valid() {
        let base = Scenario::builtin("cross3").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..5 {
            let s = base.with_random_terminals(&mut rng).unwrap();
            s.validate().unwrap();
        }
        let arms = Scenario::builtin("arm_doorway").unwrap();
        arms.with_random_terminals(&mut rng).unwrap().validate().unwrap();
    }
}
