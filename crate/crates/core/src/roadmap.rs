//! Per-robot constrained probabilistic roadmap and the paths planned on it.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet, VecDeque};
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::ManifoldConstraint;
use crate::geometry::{Configuration, RobotModel, World};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RoadmapError {
    #[error("no path between the start and any goal")]
    NoPath,
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),
    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RoadmapParams {
    pub num_samples: usize,
    pub k_nearest: usize,
    /// Interpolation resolution for edge validation (m or rad).
    pub step: f64,
}

impl RoadmapParams {
    pub fn for_model(model: &RobotModel) -> Self {
        let num_samples = match model {
            RobotModel::Disc { .. } => 1000,
            RobotModel::PlanarArm { .. } => 600,
        };
        Self {
            num_samples,
            k_nearest: 8,
            step: 0.05,
        }
    }
}

/// Dense motion along one roadmap edge, parameterized by body displacement so
/// that equal parameter increments bound how far any body point moves.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Configuration>,
    cumulative: Vec<f64>,
    length: f64,
}

impl Trajectory {
    pub fn new(model: &RobotModel, samples: Vec<Configuration>) -> Self {
        assert!(!samples.is_empty(), "trajectory needs at least one sample");
        let mut cumulative = Vec::with_capacity(samples.len());
        cumulative.push(0.0);
        let mut length = 0.0;
        for w in samples.windows(2) {
            length += model.distance(&w[0], &w[1]);
            let last = *cumulative.last().unwrap();
            cumulative.push(last + model.displacement_bound(&w[0], &w[1]));
        }
        Self {
            samples,
            cumulative,
            length,
        }
    }

    /// Straight configuration-space motion sampled at `step`.
    pub fn straight(model: &RobotModel, a: &Configuration, b: &Configuration, step: f64) -> Self {
        let samples = ManifoldConstraint::unconstrained()
            .interpolate(model, a, b, step)
            .expect("unconstrained interpolation cannot fail");
        Self::new(model, samples)
    }

    pub fn samples(&self) -> &[Configuration] {
        &self.samples
    }

    /// Configuration-space length.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Upper bound on the distance travelled by any body point.
    pub fn displacement(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    fn at(&self, model: &RobotModel, lambda: f64) -> Configuration {
        let total = self.displacement();
        if total <= 0.0 || lambda <= 0.0 {
            return self.samples[0].clone();
        }
        if lambda >= 1.0 {
            return self.samples.last().unwrap().clone();
        }
        let target = lambda * total;
        let i = self.cumulative.partition_point(|c| *c <= target).clamp(1, self.samples.len() - 1) - 1;
        let span = self.cumulative[i + 1] - self.cumulative[i];
        let t = if span > 0.0 {
            ((target - self.cumulative[i]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        model.interpolate(&self.samples[i], &self.samples[i + 1], t)
    }
}

/// A trajectory traversed in either direction.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    trajectory: Arc<Trajectory>,
    reversed: bool,
}

impl Segment {
    pub fn new(trajectory: Arc<Trajectory>, reversed: bool) -> Self {
        Self { trajectory, reversed }
    }

    pub fn start(&self) -> &Configuration {
        let s = self.trajectory.samples();
        if self.reversed {
            s.last().unwrap()
        } else {
            &s[0]
        }
    }

    pub fn end(&self) -> &Configuration {
        let s = self.trajectory.samples();
        if self.reversed {
            &s[0]
        } else {
            s.last().unwrap()
        }
    }

    pub fn length(&self) -> f64 {
        self.trajectory.length()
    }

    pub fn displacement(&self) -> f64 {
        self.trajectory.displacement()
    }

    /// Samples in traversal order.
    pub fn samples(&self) -> Vec<Configuration> {
        let mut s = self.trajectory.samples().to_vec();
        if self.reversed {
            s.reverse();
        }
        s
    }

    /// Configuration at normalized progress `lambda` in `[0, 1]`.
    pub fn config_at(&self, model: &RobotModel, lambda: f64) -> Configuration {
        let l = if self.reversed { 1.0 - lambda } else { lambda };
        self.trajectory.at(model, l)
    }
}

/// A robot path: representative configurations joined by validated segments.
///
/// Roadmap-backed paths carry the vertex id of every representative
/// configuration (repeats allowed). Derived paths, such as the uniformly
/// resampled paths of the synchronous baseline, leave `vertex_ids` empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub vertex_ids: Vec<usize>,
    pub configs: Vec<Configuration>,
    pub segments: Vec<Segment>,
    pub cost: f64,
}

impl Path {
    pub fn from_parts(vertex_ids: Vec<usize>, configs: Vec<Configuration>, segments: Vec<Segment>) -> Self {
        assert!(!configs.is_empty(), "a path has at least one configuration");
        assert_eq!(segments.len() + 1, configs.len());
        assert!(vertex_ids.is_empty() || vertex_ids.len() == configs.len());
        let cost = segments.iter().map(Segment::length).sum();
        Self {
            vertex_ids,
            configs,
            segments,
            cost,
        }
    }

    /// Straight-line path through `waypoints` (no roadmap behind it).
    pub fn from_waypoints(model: &RobotModel, waypoints: Vec<Configuration>, step: f64) -> Self {
        let segments = waypoints
            .windows(2)
            .map(|w| Segment::new(Arc::new(Trajectory::straight(model, &w[0], &w[1], step)), false))
            .collect();
        Self::from_parts(Vec::new(), waypoints, segments)
    }

    /// Number of representative configurations, `|p|`.
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.segments.len()
    }

    pub fn start(&self) -> &Configuration {
        &self.configs[0]
    }

    pub fn end(&self) -> &Configuration {
        self.configs.last().unwrap()
    }

    /// Checks the path against the roadmap it was planned on.
    pub fn validate(&self, roadmap: &Roadmap, start: usize, goals: &[usize]) -> Result<(), String> {
        if self.configs.is_empty() {
            return Err("empty path".into());
        }
        if self.vertex_ids.len() != self.configs.len() {
            return Err("vertex ids and configurations differ in length".into());
        }
        if self.segments.len() + 1 != self.configs.len() {
            return Err("segment count must be |p| - 1".into());
        }
        if self.vertex_ids[0] != start {
            return Err(format!("path starts at {} instead of {start}", self.vertex_ids[0]));
        }
        if !goals.contains(self.vertex_ids.last().unwrap()) {
            return Err("path does not end at a goal".into());
        }
        for (k, (&id, q)) in self.vertex_ids.iter().zip(&self.configs).enumerate() {
            if roadmap.vertex(id) != Some(q) {
                return Err(format!("config {k} does not match vertex {id}"));
            }
        }
        for (e, w) in self.vertex_ids.windows(2).enumerate() {
            if roadmap.edge_between(w[0], w[1]).is_none() {
                return Err(format!("no roadmap edge {} -> {}", w[0], w[1]));
            }
            let seg = &self.segments[e];
            if seg.start() != &self.configs[e] || seg.end() != &self.configs[e + 1] {
                return Err(format!("segment {e} endpoints do not match"));
            }
        }
        let cost: f64 = self.segments.iter().map(Segment::length).sum();
        if (cost - self.cost).abs() > 1e-9 * cost.max(1.0) {
            return Err("cost is not the sum of edge lengths".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    trajectory: Arc<Trajectory>,
}

impl Edge {
    pub fn length(&self) -> f64 {
        self.trajectory.length()
    }

    pub fn trajectory(&self) -> &Arc<Trajectory> {
        &self.trajectory
    }
}

/// Vertex ids of the configurations passed to [`build_roadmap`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Terminals {
    pub start: usize,
    pub goals: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Roadmap {
    world: World,
    model: RobotModel,
    constraint: ManifoldConstraint,
    params: RoadmapParams,
    vertices: Vec<Configuration>,
    adjacency: Vec<Vec<(usize, usize)>>,
    edges: Vec<Edge>,
}

impl Roadmap {
    pub fn new(world: World, model: RobotModel, constraint: ManifoldConstraint, params: RoadmapParams) -> Self {
        Self {
            world,
            model,
            constraint,
            params,
            vertices: Vec::new(),
            adjacency: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn model(&self) -> &RobotModel {
        &self.model
    }

    pub fn constraint(&self) -> &ManifoldConstraint {
        &self.constraint
    }

    pub fn world(&self) -> &World {
        &self.world
    }

    pub fn params(&self) -> &RoadmapParams {
        &self.params
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex(&self, id: usize) -> Option<&Configuration> {
        self.vertices.get(id)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn degree(&self, id: usize) -> usize {
        self.adjacency.get(id).map_or(0, Vec::len)
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<usize> {
        self.adjacency.get(a)?.iter().find(|(n, _)| *n == b).map(|(_, e)| *e)
    }

    /// Constraint-satisfying and free of world collisions.
    pub fn is_valid_config(&self, q: &Configuration) -> bool {
        q.len() == self.model.dof()
            && q.is_finite()
            && self.constraint.is_satisfied(&self.model, q)
            && !self.model.body(q).collides_with_world(&self.world)
    }

    /// Adds a vertex without validating or connecting it.
    pub fn add_vertex_unchecked(&mut self, q: Configuration) -> usize {
        self.vertices.push(q);
        self.adjacency.push(Vec::new());
        self.vertices.len() - 1
    }

    /// Validates the local path between two vertices and adds the edge.
    /// Returns the edge id, or `None` if the motion is infeasible.
    pub fn connect(&mut self, a: usize, b: usize) -> Option<usize> {
        if a == b {
            return None;
        }
        if let Some(e) = self.edge_between(a, b) {
            return Some(e);
        }
        let (qa, qb) = (self.vertices.get(a)?, self.vertices.get(b)?);
        let samples = self.constraint.interpolate(&self.model, qa, qb, self.params.step).ok()?;
        if samples
            .iter()
            .any(|q| self.model.body(q).collides_with_world(&self.world))
        {
            return None;
        }
        let trajectory = Arc::new(Trajectory::new(&self.model, samples));
        let id = self.edges.len();
        self.edges.push(Edge { a, b, trajectory });
        self.adjacency[a].push((b, id));
        self.adjacency[b].push((a, id));
        Some(id)
    }

    fn nearest(&self, q: &Configuration, k: usize, exclude: usize) -> Vec<usize> {
        let mut by_dist: Vec<(f64, usize)> = self
            .vertices
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != exclude)
            .map(|(i, v)| (self.model.distance(q, v), i))
            .collect();
        by_dist.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        by_dist.into_iter().take(k).map(|(_, i)| i).collect()
    }

    /// Inserts a valid configuration and connects it to up to `k_nearest`
    /// existing vertices.
    pub fn insert_vertex(&mut self, q: Configuration, k_nearest: usize) -> Result<usize, RoadmapError> {
        if q.len() != self.model.dof() {
            return Err(RoadmapError::InvalidConfiguration(format!(
                "expected {} values, got {}",
                self.model.dof(),
                q.len()
            )));
        }
        if !self.constraint.is_satisfied(&self.model, &q) {
            return Err(RoadmapError::InvalidConfiguration("violates the manifold constraint".into()));
        }
        if self.model.body(&q).collides_with_world(&self.world) {
            return Err(RoadmapError::InvalidConfiguration("collides with the world".into()));
        }
        let id = self.add_vertex_unchecked(q);
        for n in self.nearest(&self.vertices[id].clone(), k_nearest, id) {
            self.connect(id, n);
        }
        Ok(id)
    }

    /// Samples a uniformly random configuration, projects it onto the
    /// manifold and returns it if valid.
    pub fn sample_valid<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Configuration> {
        let raw = self.model.sample_uniform(&self.world, rng);
        let q = self.constraint.project(&self.model, &raw).ok()?;
        self.is_valid_config(&q).then_some(q)
    }

    /// True if both vertices lie in one connected component.
    pub fn connected(&self, a: usize, b: usize) -> bool {
        if a >= self.vertices.len() || b >= self.vertices.len() {
            return false;
        }
        let mut seen = vec![false; self.vertices.len()];
        let mut queue = VecDeque::from([a]);
        seen[a] = true;
        while let Some(v) = queue.pop_front() {
            if v == b {
                return true;
            }
            for &(n, _) in &self.adjacency[v] {
                if !seen[n] {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        false
    }

    /// Builds a path along consecutive vertex ids. Every consecutive pair
    /// must already be joined by an edge.
    pub fn path_through(&self, ids: &[usize]) -> Result<Path, RoadmapError> {
        let first = *ids.first().ok_or(RoadmapError::NoPath)?;
        let mut configs = vec![self.vertices.get(first).ok_or(RoadmapError::UnknownVertex(first))?.clone()];
        let mut segments = Vec::with_capacity(ids.len().saturating_sub(1));
        for w in ids.windows(2) {
            let e = self.edge_between(w[0], w[1]).ok_or(RoadmapError::NoPath)?;
            let edge = &self.edges[e];
            segments.push(Segment::new(edge.trajectory.clone(), edge.a != w[0]));
            configs.push(self.vertices[w[1]].clone());
        }
        Ok(Path::from_parts(ids.to_vec(), configs, segments))
    }

    /// Shortest path from `start` to the nearest goal vertex. Each edge length
    /// is scaled by an independent factor drawn uniformly from
    /// `[1, 1 + perturb]`; `perturb = 0` gives the exact shortest path.
    pub fn plan<R: Rng + ?Sized>(
        &self,
        start: usize,
        goals: &[usize],
        rng: &mut R,
        perturb: f64,
    ) -> Result<Path, RoadmapError> {
        if start >= self.vertices.len() {
            return Err(RoadmapError::UnknownVertex(start));
        }
        if let Some(&g) = goals.iter().find(|g| **g >= self.vertices.len()) {
            return Err(RoadmapError::UnknownVertex(g));
        }
        let factors: Vec<f64> = if perturb > 0.0 {
            (0..self.edges.len()).map(|_| 1.0 + perturb * rng.gen::<f64>()).collect()
        } else {
            vec![1.0; self.edges.len()]
        };

        let goal_set: HashSet<usize> = goals.iter().copied().collect();
        let mut dist = vec![f64::INFINITY; self.vertices.len()];
        let mut prev = vec![usize::MAX; self.vertices.len()];
        let mut heap = BinaryHeap::new();
        dist[start] = 0.0;
        heap.push(QueueEntry { cost: 0.0, vertex: start });
        let mut reached = None;
        while let Some(QueueEntry { cost, vertex }) = heap.pop() {
            if cost > dist[vertex] {
                continue;
            }
            if goal_set.contains(&vertex) {
                reached = Some(vertex);
                break;
            }
            for &(n, e) in &self.adjacency[vertex] {
                let c = cost + self.edges[e].length() * factors[e];
                if c < dist[n] {
                    dist[n] = c;
                    prev[n] = vertex;
                    heap.push(QueueEntry { cost: c, vertex: n });
                }
            }
        }
        let goal = reached.ok_or(RoadmapError::NoPath)?;
        let mut ids = vec![goal];
        while *ids.last().unwrap() != start {
            ids.push(prev[*ids.last().unwrap()]);
        }
        ids.reverse();
        self.path_through(&ids)
    }
}

#[derive(Debug, PartialEq)]
struct QueueEntry {
    cost: f64,
    vertex: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Builds a constrained PRM. The start and goal configurations are inserted
/// first (ids `0` and `1..`), then `params.num_samples` valid samples, and
/// every vertex is connected to its `k_nearest` neighbours by validated edges.
pub fn build_roadmap<R: Rng + ?Sized>(
    world: &World,
    model: &RobotModel,
    constraint: &ManifoldConstraint,
    params: RoadmapParams,
    start: &Configuration,
    goals: &[Configuration],
    rng: &mut R,
) -> (Roadmap, Terminals) {
    let mut roadmap = Roadmap::new(world.clone(), model.clone(), *constraint, params);
    let start_id = roadmap.add_vertex_unchecked(start.clone());
    let goal_ids = goals.iter().map(|g| roadmap.add_vertex_unchecked(g.clone())).collect();

    let max_attempts = params.num_samples.saturating_mul(50);
    let mut accepted = 0;
    let mut attempts = 0;
    while accepted < params.num_samples && attempts < max_attempts {
        attempts += 1;
        if let Some(q) = roadmap.sample_valid(rng) {
            roadmap.add_vertex_unchecked(q);
            accepted += 1;
        }
    }

    let mut tried: HashSet<(usize, usize)> = HashSet::new();
    for v in 0..roadmap.num_vertices() {
        let q = roadmap.vertices[v].clone();
        for n in roadmap.nearest(&q, params.k_nearest, v) {
            if tried.insert((v.min(n), v.max(n))) {
                roadmap.connect(v, n);
            }
        }
    }
    (
        roadmap,
        Terminals {
            start: start_id,
            goals: goal_ids,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Aabb, Obstacle, Vec2};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn room() -> World {
        World::empty(Aabb::new(Vec2::new(0.0, 0.0), Vec2::new(10.0, 10.0)))
    }

    fn disc_roadmap(params: RoadmapParams) -> Roadmap {
        Roadmap::new(room(), RobotModel::disc(0.1), ManifoldConstraint::unconstrained(), params)
    }

    fn params(num_samples: usize) -> RoadmapParams {
        RoadmapParams {
            num_samples,
            k_nearest: 8,
            step: 0.05,
        }
    }

    #[test]
    fn zero_samples_keeps_only_terminals() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (rm, t) = build_roadmap(
            &room(),
            &RobotModel::disc(0.1),
            &ManifoldConstraint::unconstrained(),
            params(0),
            &[1.0, 1.0].into(),
            &[[9.0, 9.0].into()],
            &mut rng,
        );
        assert_eq!(rm.num_vertices(), 2);
        assert_eq!(t, Terminals { start: 0, goals: vec![1] });
        // open room: the direct edge validates
        assert_eq!(rm.num_edges(), 1);
    }

    #[test]
    fn splitting_wall_disconnects() {
        let mut w = room();
        w.obstacles.push(Obstacle::Rect {
            min: Vec2::new(4.9, -1.0),
            max: Vec2::new(5.1, 11.0),
        });
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (rm, t) = build_roadmap(
            &w,
            &RobotModel::disc(0.1),
            &ManifoldConstraint::unconstrained(),
            params(200),
            &[1.0, 5.0].into(),
            &[[9.0, 5.0].into()],
            &mut rng,
        );
        assert!(!rm.connected(t.start, t.goals[0]));
        assert_eq!(rm.plan(t.start, &t.goals, &mut rng, 0.0), Err(RoadmapError::NoPath));
    }

    #[test]
    fn start_equal_goal() {
        let mut rm = disc_roadmap(params(0));
        let a = rm.add_vertex_unchecked([1.0, 1.0].into());
        let p = rm.plan(a, &[a], &mut ChaCha8Rng::seed_from_u64(0), 0.3).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.cost, 0.0);
        assert!(p.validate(&rm, a, &[a]).is_ok());
    }

    #[test]
    fn triangle_shortest_path() {
        // weights a-b = 1, b-c = 1, a-c = 3; the a-c edge is a bent trajectory
        let mut rm = disc_roadmap(params(0));
        let a = rm.add_vertex_unchecked([1.0, 1.0].into());
        let b = rm.add_vertex_unchecked([2.0, 1.0].into());
        let c = rm.add_vertex_unchecked([3.0, 1.0].into());
        rm.connect(a, b).unwrap();
        rm.connect(b, c).unwrap();
        let traj = Trajectory::new(
            rm.model(),
            vec![
                [1.0, 1.0].into(),
                [2.0, 1.0 + 1.118_033_988_749_895].into(),
                [3.0, 1.0].into(),
            ],
        );
        assert!((traj.length() - 3.0).abs() < 1e-9);
        let id = rm.edges.len();
        rm.edges.push(Edge {
            a,
            b: c,
            trajectory: Arc::new(traj),
        });
        rm.adjacency[a].push((c, id));
        rm.adjacency[c].push((a, id));

        let p = rm.plan(a, &[c], &mut ChaCha8Rng::seed_from_u64(0), 0.0).unwrap();
        assert_eq!(p.vertex_ids, vec![a, b, c]);
        assert!((p.cost - 2.0).abs() < 1e-12);
    }

    #[test]
    fn perturbation_diversifies_near_equal_routes() {
        // two routes around a central block, lengths differ by ~1%
        let mut rm = disc_roadmap(params(0));
        let s = rm.add_vertex_unchecked([1.0, 5.0].into());
        let up = rm.add_vertex_unchecked([5.0, 7.0].into());
        let down = rm.add_vertex_unchecked([5.0, 3.05].into());
        let g = rm.add_vertex_unchecked([9.0, 5.0].into());
        for (x, y) in [(s, up), (up, g), (s, down), (down, g)] {
            rm.connect(x, y).unwrap();
        }
        let mut seen = HashSet::new();
        for seed in 0..1000 {
            let p = rm.plan(s, &[g], &mut ChaCha8Rng::seed_from_u64(seed), 0.5).unwrap();
            seen.insert(p.vertex_ids[1]);
        }
        assert_eq!(seen.len(), 2);
        // without perturbation the answer never changes
        let p0 = rm.plan(s, &[g], &mut ChaCha8Rng::seed_from_u64(1), 0.0).unwrap();
        for seed in 0..20 {
            assert_eq!(rm.plan(s, &[g], &mut ChaCha8Rng::seed_from_u64(seed), 0.0).unwrap(), p0);
        }
    }

    #[test]
    fn insert_midpoint_of_long_edge() {
        let mut rm = disc_roadmap(params(0));
        let a = rm.add_vertex_unchecked([1.0, 1.0].into());
        let b = rm.add_vertex_unchecked([8.0, 1.0].into());
        rm.connect(a, b).unwrap();
        let before = rm.num_edges();
        let m = rm.insert_vertex([4.5, 1.0].into(), 8).unwrap();
        assert_eq!(rm.num_edges() - before, 2);
        assert_eq!(rm.degree(m), 2);
    }

    #[test]
    fn insert_inside_obstacle_is_rejected() {
        let mut w = room();
        w.obstacles.push(Obstacle::Circle {
            center: Vec2::new(5.0, 5.0),
            radius: 1.0,
        });
        let mut rm = Roadmap::new(w, RobotModel::disc(0.1), ManifoldConstraint::unconstrained(), params(0));
        assert!(matches!(
            rm.insert_vertex([5.0, 5.0].into(), 8),
            Err(RoadmapError::InvalidConfiguration(_))
        ));
        assert_eq!(rm.num_vertices(), 0);
    }

    #[test]
    fn insert_next_to_start_only() {
        let mut w = room();
        w.obstacles.push(Obstacle::Rect {
            min: Vec2::new(4.0, 0.0),
            max: Vec2::new(4.2, 10.0),
        });
        let mut rm = Roadmap::new(w, RobotModel::disc(0.1), ManifoldConstraint::unconstrained(), params(0));
        let s = rm.add_vertex_unchecked([1.0, 1.0].into());
        let blocked = rm.insert_vertex([6.0, 1.0].into(), 8).unwrap();
        assert_eq!(rm.degree(blocked), 0);
        let open = rm.insert_vertex([2.0, 2.0].into(), 8).unwrap();
        // connects to start; the blocked vertex is behind the wall
        assert_eq!(rm.degree(open), 1);
        assert!(rm.edge_between(open, s).is_some());
    }

    #[test]
    fn reversed_segment_runs_backwards() {
        let m = RobotModel::disc(0.1);
        let traj = Arc::new(Trajectory::straight(&m, &[0.0, 0.0].into(), &[1.0, 0.0].into(), 0.1));
        let fwd = Segment::new(traj.clone(), false);
        let back = Segment::new(traj, true);
        assert_eq!(back.start(), fwd.end());
        let q = back.config_at(&m, 0.25);
        assert!((q.values()[0] - 0.75).abs() < 1e-12);
    }
}
