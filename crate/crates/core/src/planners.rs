//! Top-level solvers: StAC, the synchronous and random-priority baselines,
//! and an exhaustive scheduling oracle for tiny instances.

use std::collections::HashSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::feedback::{record_collision, CollisionRecord, FeedbackParams, RobotPlanner};
use crate::geometry::{Configuration, RobotModel};
use crate::roadmap::{build_roadmap, Path, RoadmapParams, Segment, Trajectory};
use crate::scenario::Scenario;
use crate::scheduler::{
    collision_check, default_resolution, path_lengths, sample_candidate, schedule_priority, transition_collides,
    CandidateSolution,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StacParams {
    /// Schedule attempts per path set before asking for new paths.
    pub nra: usize,
    pub timeout: Duration,
    pub seed: u64,
    /// Share of candidates drawn as random priority orders.
    pub p_priority: f64,
    pub feedback: FeedbackParams,
    /// Edge-cost perturbation for replanned paths.
    pub perturb: f64,
    /// Collision sweep resolution; defaults to half the smallest body radius.
    pub resolution: Option<f64>,
    /// Overrides the per-model roadmap defaults.
    pub roadmap: Option<RoadmapParams>,
}

impl Default for StacParams {
    fn default() -> Self {
        Self {
            nra: 200,
            timeout: Duration::from_secs(60),
            seed: 0,
            p_priority: 0.2,
            feedback: FeedbackParams::default(),
            perturb: 0.3,
            resolution: None,
            roadmap: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlannerStats {
    /// Wall-clock seconds, roadmap construction included.
    pub solve_time: f64,
    /// Path sets requested from the low-level planners.
    pub queries: u64,
    pub schedule_attempts: u64,
    /// Seconds spent sampling and checking schedules.
    pub coord_time: f64,
    pub success: bool,
}

impl PlannerStats {
    pub fn coord_ratio(&self) -> f64 {
        if self.solve_time > 0.0 {
            (self.coord_time / self.solve_time).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub paths: Vec<Path>,
    pub candidate: CandidateSolution,
    pub resolution: f64,
    pub stats: PlannerStats,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FailureReason {
    #[error("timed out")]
    Timeout,
    #[error("robot {robot} has no path to a goal")]
    NoPath { robot: usize },
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("planning failed: {reason}")]
pub struct Failure {
    pub reason: FailureReason,
    pub stats: PlannerStats,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlannerKind {
    Stac,
    Sync,
    Priority,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 3] = [PlannerKind::Stac, PlannerKind::Sync, PlannerKind::Priority];

    pub fn name(self) -> &'static str {
        match self {
            PlannerKind::Stac => "stac",
            PlannerKind::Sync => "sync",
            PlannerKind::Priority => "priority",
        }
    }

    pub fn solve(self, scenario: &Scenario, params: &StacParams) -> Result<Solution, Failure> {
        match self {
            PlannerKind::Stac => stac_solve(scenario, params),
            PlannerKind::Sync => synchronous_solve(scenario, params),
            PlannerKind::Priority => priority_solve(scenario, params),
        }
    }
}

impl std::str::FromStr for PlannerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown planner {s:?} (expected stac, sync or priority)"))
    }
}

impl std::fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Shared solver state: clock, counters and per-robot planners.
struct Run {
    started: Instant,
    timeout: Duration,
    stats: PlannerStats,
    planners: Vec<RobotPlanner>,
    models: Vec<RobotModel>,
    resolution: f64,
    rng: ChaCha8Rng,
}

impl Run {
    /// Builds one roadmap per robot. Robot `i` draws from its own ChaCha
    /// stream so roadmaps do not depend on the solver.
    fn new(scenario: &Scenario, params: &StacParams) -> Self {
        let started = Instant::now();
        let planners = scenario
            .robots
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
                rng.set_stream(1 + i as u64);
                let rp = params.roadmap.unwrap_or_else(|| RoadmapParams::for_model(&r.model));
                let (roadmap, terminals) =
                    build_roadmap(&scenario.world, &r.model, &r.constraint, rp, &r.start, &r.goals, &mut rng);
                RobotPlanner::new(roadmap, terminals.start, terminals.goals, params.feedback)
            })
            .collect();
        let models = scenario.models();
        let resolution = params.resolution.unwrap_or_else(|| default_resolution(&models));
        Self {
            started,
            timeout: params.timeout,
            stats: PlannerStats::default(),
            planners,
            models,
            resolution,
            rng: ChaCha8Rng::seed_from_u64(params.seed),
        }
    }

    fn timed_out(&self) -> bool {
        self.started.elapsed() >= self.timeout
    }

    fn finish(&mut self) {
        self.stats.solve_time = self.started.elapsed().as_secs_f64();
    }

    fn fail(mut self, reason: FailureReason) -> Failure {
        self.finish();
        self.stats.success = false;
        Failure {
            reason,
            stats: self.stats,
        }
    }

    fn succeed(mut self, paths: Vec<Path>, candidate: CandidateSolution) -> Solution {
        self.finish();
        self.stats.success = true;
        Solution {
            paths,
            candidate,
            resolution: self.resolution,
            stats: self.stats,
        }
    }

    /// One path per robot, either fresh plans or experience-driven replans.
    fn query(&mut self, perturb: f64, experience: bool) -> Result<Vec<Path>, FailureReason> {
        self.stats.queries += 1;
        let rng = &mut self.rng;
        self.planners
            .iter_mut()
            .enumerate()
            .map(|(robot, p)| {
                let r = if experience {
                    p.plan_with_experience(rng, perturb)
                } else {
                    p.plan(rng, perturb)
                };
                r.map_err(|_| FailureReason::NoPath { robot })
            })
            .collect()
    }

    /// Samples and checks one candidate; returns it if collision-free.
    fn attempt(
        &mut self,
        paths: &[Path],
        sampler: impl FnOnce(&mut ChaCha8Rng) -> CandidateSolution,
        recorders: Option<&mut [CollisionRecord]>,
    ) -> Option<CandidateSolution> {
        let t0 = Instant::now();
        let candidate = sampler(&mut self.rng);
        let events = collision_check(&candidate, paths, &self.models, self.resolution);
        self.stats.coord_time += t0.elapsed().as_secs_f64();
        self.stats.schedule_attempts += 1;
        if events.is_empty() {
            return Some(candidate);
        }
        if let Some(rec) = recorders {
            record_collision(rec, &events);
        }
        None
    }
}

/// The StAC loop: schedule the current path set up to `nra` times with
/// random stops, recording which edges collide; when the attempts run out,
/// feed the records back to the robots and replan with experience.
pub fn stac_solve(scenario: &Scenario, params: &StacParams) -> Result<Solution, Failure> {
    assert!(params.nra >= 1, "nra must be at least 1");
    let mut run = Run::new(scenario, params);
    if run.timed_out() {
        return Err(run.fail(FailureReason::Timeout));
    }
    let mut paths = match run.query(0.0, false) {
        Ok(p) => p,
        Err(r) => return Err(run.fail(r)),
    };
    loop {
        let lengths = path_lengths(&paths);
        let mut recorders: Vec<CollisionRecord> = paths.iter().map(CollisionRecord::for_path).collect();
        for _ in 0..params.nra {
            if run.timed_out() {
                return Err(run.fail(FailureReason::Timeout));
            }
            let found = run.attempt(
                &paths,
                |rng| sample_candidate(&lengths, rng, params.p_priority),
                Some(&mut recorders),
            );
            if let Some(c) = found {
                return Ok(run.succeed(paths, c));
            }
        }
        for ((planner, path), rec) in run.planners.iter_mut().zip(&paths).zip(&recorders) {
            planner.history.update(path, rec);
        }
        if run.timed_out() {
            return Err(run.fail(FailureReason::Timeout));
        }
        paths = match run.query(params.perturb, true) {
            Ok(p) => p,
            Err(r) => return Err(run.fail(r)),
        };
    }
}

/// Synchronous baseline: every path is cut into the same number of
/// equal-length pieces and all robots move together. Any collision discards
/// the whole path set.
pub fn synchronous_solve(scenario: &Scenario, params: &StacParams) -> Result<Solution, Failure> {
    let mut run = Run::new(scenario, params);
    let mut perturb = 0.0;
    loop {
        if run.timed_out() {
            return Err(run.fail(FailureReason::Timeout));
        }
        let paths = match run.query(perturb, false) {
            Ok(p) => p,
            Err(r) => return Err(run.fail(r)),
        };
        perturb = params.perturb;
        let steps = paths.iter().map(Path::len).max().unwrap_or(1);
        let t0 = Instant::now();
        let resampled: Vec<Path> = paths
            .iter()
            .zip(&scenario.robots)
            .map(|(p, r)| resample_uniform(p, &r.model, &r.constraint, steps))
            .collect();
        run.stats.coord_time += t0.elapsed().as_secs_f64();
        let candidate = lockstep(scenario.robots.len(), steps);
        if let Some(c) = run.attempt(&resampled, |_| candidate, None) {
            return Ok(run.succeed(resampled, c));
        }
    }
}

/// Random-priority baseline: robots run one at a time in a random order;
/// after `nra` failed orders a fresh perturbed path set is requested.
pub fn priority_solve(scenario: &Scenario, params: &StacParams) -> Result<Solution, Failure> {
    assert!(params.nra >= 1, "nra must be at least 1");
    let mut run = Run::new(scenario, params);
    let mut perturb = 0.0;
    loop {
        if run.timed_out() {
            return Err(run.fail(FailureReason::Timeout));
        }
        let paths = match run.query(perturb, false) {
            Ok(p) => p,
            Err(r) => return Err(run.fail(r)),
        };
        perturb = params.perturb;
        let lengths = path_lengths(&paths);
        for _ in 0..params.nra {
            if run.timed_out() {
                return Err(run.fail(FailureReason::Timeout));
            }
            if let Some(c) = run.attempt(&paths, |rng| schedule_priority(&lengths, rng), None) {
                return Ok(run.succeed(paths, c));
            }
        }
    }
}

/// All robots advance on every transition.
fn lockstep(num_robots: usize, steps: usize) -> CandidateSolution {
    let moves = vec![vec![true; num_robots]; steps.saturating_sub(1)];
    CandidateSolution::from_moves(num_robots, &moves)
}

/// Resamples a path to `count` configurations spaced evenly by arc length
/// along its dense trajectory. New waypoints are projected back onto the
/// constraint manifold.
pub fn resample_uniform(
    path: &Path,
    model: &RobotModel,
    constraint: &crate::constraints::ManifoldConstraint,
    count: usize,
) -> Path {
    assert!(count >= 1);
    let mut dense: Vec<Configuration> = vec![path.start().clone()];
    for s in &path.segments {
        dense.extend(s.samples().into_iter().skip(1));
    }
    let mut arc = vec![0.0];
    for w in dense.windows(2) {
        arc.push(arc.last().unwrap() + model.distance(&w[0], &w[1]));
    }
    let total = *arc.last().unwrap();
    if dense.len() == 1 {
        let q = dense.pop().unwrap();
        let still = Arc::new(Trajectory::new(model, vec![q.clone(), q.clone()]));
        let segments = (1..count).map(|_| Segment::new(still.clone(), false)).collect();
        return Path::from_parts(Vec::new(), vec![q; count], segments);
    }

    // (dense index before, waypoint) per target
    let mut marks: Vec<(usize, Configuration)> = Vec::with_capacity(count);
    for k in 0..count {
        if k == 0 {
            marks.push((0, dense[0].clone()));
            continue;
        }
        if k == count - 1 {
            marks.push((dense.len() - 1, dense.last().unwrap().clone()));
            continue;
        }
        let target = total * k as f64 / (count - 1) as f64;
        let i = arc.partition_point(|a| *a <= target).clamp(1, dense.len() - 1) - 1;
        let span = arc[i + 1] - arc[i];
        let t = if span > 0.0 { (target - arc[i]) / span } else { 0.0 };
        let q = model.interpolate(&dense[i], &dense[i + 1], t);
        let q = if constraint.is_unconstrained() {
            q
        } else {
            match constraint.project(model, &q) {
                Ok(p) if constraint.is_satisfied(model, &p) => p,
                _ => dense[if t < 0.5 { i } else { i + 1 }].clone(),
            }
        };
        marks.push((i, q));
    }

    let mut segments = Vec::with_capacity(count - 1);
    for w in marks.windows(2) {
        let (ia, qa) = &w[0];
        let (ib, qb) = &w[1];
        let mut samples = vec![qa.clone()];
        samples.extend(dense[(ia + 1)..=*ib].iter().cloned());
        if samples.last() != Some(qb) {
            samples.push(qb.clone());
        }
        if samples.len() == 1 {
            samples.push(qb.clone());
        }
        segments.push(Segment::new(Arc::new(Trajectory::new(model, samples)), false));
    }
    Path::from_parts(Vec::new(), marks.into_iter().map(|(_, q)| q).collect(), segments)
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BruteForceError {
    #[error("instance too large: {total} configurations exceed the cap of {cap}")]
    CapExceeded { total: usize, cap: usize },
}

/// Exhaustive search over every schedule of the fixed paths, pruning at the
/// first colliding transition. Returns the first valid schedule, or `None`
/// if no schedule avoids collision.
pub fn brute_force_schedule(
    paths: &[Path],
    models: &[RobotModel],
    resolution: f64,
    cap: usize,
) -> Result<Option<CandidateSolution>, BruteForceError> {
    let lengths = path_lengths(paths);
    let total: usize = lengths.iter().sum();
    if total > cap {
        return Err(BruteForceError::CapExceeded { total, cap });
    }
    let n = paths.len();
    let start = vec![0; n];
    if lengths.iter().all(|l| *l == 1) {
        let lone = CandidateSolution::from_moves(n, &[]);
        return Ok(collision_check(&lone, paths, models, resolution).is_empty().then_some(lone));
    }
    let goal: Vec<usize> = lengths.iter().map(|l| l - 1).collect();
    let mut dead: HashSet<Vec<usize>> = HashSet::new();
    let mut trail = vec![start];
    if search(&mut trail, &goal, paths, models, resolution, &mut dead) {
        let candidate = CandidateSolution::from_progress(trail, &lengths).expect("search builds valid candidates");
        Ok(Some(candidate))
    } else {
        Ok(None)
    }
}

fn search(
    trail: &mut Vec<Vec<usize>>,
    goal: &[usize],
    paths: &[Path],
    models: &[RobotModel],
    resolution: f64,
    dead: &mut HashSet<Vec<usize>>,
) -> bool {
    let here = trail.last().unwrap().clone();
    if here == goal {
        return true;
    }
    if dead.contains(&here) {
        return false;
    }
    let movable: Vec<usize> = (0..here.len()).filter(|&r| here[r] < goal[r]).collect();
    // every non-empty subset of movable robots, largest moves first
    let mut subsets: Vec<u32> = (1..(1u32 << movable.len())).collect();
    subsets.sort_by_key(|m| (std::cmp::Reverse(m.count_ones()), *m));
    for mask in subsets {
        let mut next = here.clone();
        for (b, &r) in movable.iter().enumerate() {
            if mask & (1 << b) != 0 {
                next[r] += 1;
            }
        }
        if dead.contains(&next) || transition_collides(&here, &next, paths, models, resolution) {
            continue;
        }
        trail.push(next);
        if search(trail, goal, paths, models, resolution, dead) {
            return true;
        }
        trail.pop();
    }
    dead.insert(here);
    false
}

/// Raw stop-sampling draws for `lengths`: every pair of per-robot move sets.
/// Exposed for coverage checks on small instances.
pub fn enumerate_move_matrices(lengths: &[usize]) -> Vec<Vec<Vec<bool>>> {
    let total: usize = lengths.iter().sum();
    let transitions = total.saturating_sub(1);
    let mut out = vec![vec![vec![false; lengths.len()]; transitions]];
    for (r, &len) in lengths.iter().enumerate() {
        let picks = combinations(transitions, len.saturating_sub(1));
        let mut next = Vec::with_capacity(out.len() * picks.len());
        for m in &out {
            for p in &picks {
                let mut m = m.clone();
                for &t in p {
                    m[t][r] = true;
                }
                next.push(m);
            }
        }
        out = next;
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}
