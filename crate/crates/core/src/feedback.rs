//! Collision feedback: per-edge conflict counting, the collision history and
//! experience-driven replanning.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::roadmap::{Path, Roadmap, RoadmapError};
use crate::scheduler::CollisionEvent;

/// How often to retry sampling a detour vertex before giving up.
pub const DETOUR_RETRIES: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeedbackParams {
    /// Cost weight in the element selection score.
    pub a: f64,
    /// Selection-count weight in the element selection score.
    pub b: f64,
    /// Probability of picking the root element when others exist.
    pub p_root: f64,
    /// Fixed random-walk step count; `None` uses [`walk_steps`].
    pub walk_steps: Option<usize>,
}

impl Default for FeedbackParams {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 0.5,
            p_root: 0.2,
            walk_steps: None,
        }
    }
}

/// Collision counts, one per path edge.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CollisionRecord {
    counts: Vec<u64>,
}

impl CollisionRecord {
    pub fn new(num_edges: usize) -> Self {
        Self {
            counts: vec![0; num_edges],
        }
    }

    pub fn for_path(path: &Path) -> Self {
        Self::new(path.num_edges())
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn increment(&mut self, edge: usize) {
        self.counts[edge] += 1;
    }

    pub fn clear(&mut self) {
        self.counts.iter_mut().for_each(|c| *c = 0);
    }

    pub fn normalized(&self) -> Vec<f64> {
        normalize(&self.counts)
    }
}

/// Counts every event against the edges of the robots that were moving.
/// A stopped robot carries no edge in the event and is left untouched.
pub fn record_collision(recorders: &mut [CollisionRecord], events: &[CollisionEvent]) {
    for e in events {
        for (robot, edge) in [(e.robots.0, e.edges.0), (e.robots.1, e.edges.1)] {
            if let Some(edge) = edge {
                recorders[robot].increment(edge);
            }
        }
    }
}

/// Add-one smoothed frequencies: `(c_i + 1) / sum_j (c_j + 1)`.
pub fn normalize(counts: &[u64]) -> Vec<f64> {
    let total: f64 = counts.iter().map(|c| *c as f64 + 1.0).sum();
    counts.iter().map(|c| (*c as f64 + 1.0) / total).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct HistoryElement {
    /// `None` for the root element.
    pub path: Option<Path>,
    pub normalized: Vec<f64>,
    pub cost: f64,
    pub selections: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CollisionHistory {
    elements: Vec<HistoryElement>,
}

impl Default for CollisionHistory {
    fn default() -> Self {
        Self::new()
    }
}

impl CollisionHistory {
    pub fn new() -> Self {
        Self {
            elements: vec![HistoryElement {
                path: None,
                normalized: Vec::new(),
                cost: 0.0,
                selections: 0,
            }],
        }
    }

    pub fn elements(&self) -> &[HistoryElement] {
        &self.elements
    }

    pub fn element_mut(&mut self, i: usize) -> &mut HistoryElement {
        &mut self.elements[i]
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Appends a path with its normalized record. Paths without edges carry
    /// no region to detour around and are skipped.
    pub fn update(&mut self, path: &Path, record: &CollisionRecord) {
        assert_eq!(path.num_edges(), record.len(), "record does not match the path");
        if path.num_edges() == 0 {
            return;
        }
        self.elements.push(HistoryElement {
            path: Some(path.clone()),
            normalized: record.normalized(),
            cost: path.cost,
            selections: 0,
        });
    }

    /// Selection weights of the non-root elements (index `i` is element
    /// `i + 1`), normalized to sum to one: `w = exp(-a * c / c_min - b * s)`.
    pub fn weights(&self, params: &FeedbackParams) -> Vec<f64> {
        let others = &self.elements[1..];
        let min_cost = others.iter().map(|e| e.cost).fold(f64::INFINITY, f64::min);
        let scaled = |c: f64| if min_cost > 0.0 { c / min_cost } else { 1.0 + c };
        let logs: Vec<f64> = others
            .iter()
            .map(|e| -params.a * scaled(e.cost) - params.b * e.selections as f64)
            .collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
        let sum: f64 = w.iter().sum();
        w.into_iter().map(|x| x / sum).collect()
    }

    /// Draws an element index without recording the selection.
    pub fn choose_index<R: Rng + ?Sized>(&self, params: &FeedbackParams, rng: &mut R) -> usize {
        if self.elements.len() == 1 || rng.gen::<f64>() < params.p_root {
            return 0;
        }
        let w = self.weights(params);
        1 + WeightedIndex::new(&w).expect("weights are positive").sample(rng)
    }

    /// Draws an element index and counts the selection.
    pub fn select<R: Rng + ?Sized>(&mut self, params: &FeedbackParams, rng: &mut R) -> usize {
        let i = self.choose_index(params, rng);
        self.elements[i].selections += 1;
        i
    }
}

/// Default random-walk length for a record of `len` edges.
pub fn walk_steps(len: usize) -> usize {
    len.div_ceil(4).max(3)
}

/// Random walk over a normalized record. Starts at a uniform index, takes
/// `k` steps, moving left with probability `r[i-1] / (r[i-1] + r[i+1])`
/// and bouncing off the ends. Returns the lowest and highest visited index.
pub fn random_walk_region<R: Rng + ?Sized>(normalized: &[f64], k: usize, rng: &mut R) -> (usize, usize) {
    assert!(!normalized.is_empty(), "empty collision record");
    let last = normalized.len() - 1;
    let mut i = rng.gen_range(0..=last);
    let (mut lo, mut hi) = (i, i);
    if last == 0 {
        return (0, 0);
    }
    for _ in 0..k {
        i = if i == 0 {
            1
        } else if i == last {
            last - 1
        } else {
            let (l, r) = (normalized[i - 1], normalized[i + 1]);
            if rng.gen::<f64>() < l / (l + r) {
                i - 1
            } else {
                i + 1
            }
        };
        lo = lo.min(i);
        hi = hi.max(i);
    }
    (lo, hi)
}

/// Replaces the vertices strictly between `ids[lo]` and `ids[hi + 1]` by the
/// detour `to_detour` (from `ids[lo]`) followed by `from_detour` (ending at
/// `ids[hi + 1]`).
pub fn splice_detour(ids: &[usize], lo: usize, hi: usize, to_detour: &[usize], from_detour: &[usize]) -> Vec<usize> {
    debug_assert_eq!(to_detour.first(), Some(&ids[lo]));
    debug_assert_eq!(from_detour.first(), to_detour.last());
    debug_assert_eq!(from_detour.last(), Some(&ids[hi + 1]));
    let mut out = ids[..=lo].to_vec();
    out.extend_from_slice(&to_detour[1..]);
    out.extend_from_slice(&from_detour[1..]);
    out.extend_from_slice(&ids[hi + 2..]);
    out
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum DetourError {
    #[error("no valid detour vertex after {0} attempts")]
    NoVertex(usize),
    #[error(transparent)]
    Roadmap(#[from] RoadmapError),
}

/// Per-robot low-level planner state that persists across scheduling rounds.
#[derive(Debug, Clone)]
pub struct RobotPlanner {
    pub roadmap: Roadmap,
    pub history: CollisionHistory,
    pub start: usize,
    pub goals: Vec<usize>,
    pub params: FeedbackParams,
}

impl RobotPlanner {
    pub fn new(roadmap: Roadmap, start: usize, goals: Vec<usize>, params: FeedbackParams) -> Self {
        Self {
            roadmap,
            history: CollisionHistory::new(),
            start,
            goals,
            params,
        }
    }

    pub fn plan<R: Rng + ?Sized>(&self, rng: &mut R, perturb: f64) -> Result<Path, RoadmapError> {
        self.roadmap.plan(self.start, &self.goals, rng, perturb)
    }

    /// Replans using the collision history: either a fresh perturbed plan
    /// (root element) or a previous path rerouted through a random detour
    /// around its most contested region. Detour failures fall back to a fresh
    /// plan.
    pub fn plan_with_experience<R: Rng + ?Sized>(&mut self, rng: &mut R, perturb: f64) -> Result<Path, RoadmapError> {
        let chosen = self.history.select(&self.params, rng);
        if chosen == 0 {
            return self.plan(rng, perturb);
        }
        match self.detour(chosen, rng, perturb) {
            Ok(p) => Ok(p),
            Err(_) => self.plan(rng, perturb),
        }
    }

    /// Builds a detour variant of history element `element`.
    pub fn detour<R: Rng + ?Sized>(&mut self, element: usize, rng: &mut R, perturb: f64) -> Result<Path, DetourError> {
        let e = &self.history.elements()[element];
        let path = e.path.as_ref().expect("root element has no path");
        let ids = path.vertex_ids.clone();
        let k = self.params.walk_steps.unwrap_or_else(|| walk_steps(e.normalized.len()));
        let (lo, hi) = random_walk_region(&e.normalized, k, rng);
        let (c1, c2) = (ids[lo], ids[hi + 1]);

        let mut detour = None;
        for _ in 0..DETOUR_RETRIES {
            let Some(q) = self.roadmap.sample_valid(rng) else {
                continue;
            };
            let k_nearest = self.roadmap.params().k_nearest;
            let v = self.roadmap.insert_vertex(q, k_nearest)?;
            if self.roadmap.degree(v) > 0 {
                detour = Some(v);
                break;
            }
        }
        let d = detour.ok_or(DetourError::NoVertex(DETOUR_RETRIES))?;
        let first = self.roadmap.plan(c1, &[d], rng, perturb)?;
        let second = self.roadmap.plan(d, &[c2], rng, perturb)?;
        let spliced = splice_detour(&ids, lo, hi, &first.vertex_ids, &second.vertex_ids);
        Ok(self.roadmap.path_through(&spliced)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::ManifoldConstraint;
    use crate::geometry::{Aabb, Configuration, Obstacle, RobotModel, Vec2, World};
    use crate::roadmap::RoadmapParams;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn event(robots: (usize, usize), edges: (Option<usize>, Option<usize>)) -> CollisionEvent {
        CollisionEvent {
            transition: 0,
            robots,
            edges,
            lambda: 0.5,
        }
    }

    #[test]
    fn stopped_robot_is_not_counted() {
        let mut rec = vec![CollisionRecord::new(3), CollisionRecord::new(3)];
        rec[1].counts[1] = 25;
        record_collision(&mut rec, &[event((0, 1), (None, Some(1)))]);
        assert_eq!(rec[0].counts(), &[0, 0, 0]);
        assert_eq!(rec[1].counts(), &[0, 26, 0]);
        record_collision(&mut rec, &[]);
        assert_eq!(rec[1].total(), 26);
        record_collision(&mut rec, &[event((0, 1), (Some(2), Some(0)))]);
        assert_eq!(rec[0].counts(), &[0, 0, 1]);
        assert_eq!(rec[1].counts(), &[1, 26, 0]);
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&[0, 0, 0]), vec![1.0 / 3.0; 3]);
        let n = normalize(&[9, 0]);
        assert!((n[0] - 10.0 / 11.0).abs() < 1e-15 && (n[1] - 1.0 / 11.0).abs() < 1e-15);
        assert_eq!(normalize(&[3, 3, 3, 3]), vec![0.25; 4]);
    }

    #[test]
    fn root_only_history_always_picks_root() {
        let h = CollisionHistory::new();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!((0..1000).all(|_| h.choose_index(&FeedbackParams::default(), &mut rng) == 0));
    }

    fn straight_path(len: f64) -> Path {
        let m = RobotModel::disc(0.1);
        Path::from_waypoints(
            &m,
            vec![Configuration::new(vec![0.0, 0.0]), Configuration::new(vec![len, 0.0])],
            0.05,
        )
    }

    #[test]
    fn weights_follow_selection_counts() {
        let mut h = CollisionHistory::new();
        let p = straight_path(1.0);
        h.update(&p, &CollisionRecord::new(1));
        h.update(&p, &CollisionRecord::new(1));
        h.elements[2].selections = 5;
        let w = h.weights(&FeedbackParams::default());
        let expected = 1.0 / (1.0 + (-2.5f64).exp());
        assert!((w[0] - expected).abs() < 1e-12);

        let trivial = Path::from_parts(vec![], vec![Configuration::new(vec![0.0, 0.0])], vec![]);
        h.update(&trivial, &CollisionRecord::new(0));
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn select_counts_selections() {
        let mut h = CollisionHistory::new();
        h.update(&straight_path(1.0), &CollisionRecord::new(1));
        let params = FeedbackParams {
            p_root: 0.0,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..4 {
            assert_eq!(h.select(&params, &mut rng), 1);
        }
        assert_eq!(h.elements()[1].selections, 4);
        assert_eq!(h.elements()[0].selections, 0);
    }

    #[test]
    fn walk_on_single_edge_and_zero_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(random_walk_region(&[1.0], 5, &mut rng), (0, 0));
        for _ in 0..100 {
            let (lo, hi) = random_walk_region(&[0.25; 4], 0, &mut rng);
            assert_eq!(lo, hi);
        }
        assert_eq!(walk_steps(1), 3);
        assert_eq!(walk_steps(13), 4);
    }

    #[test]
    fn walk_bounces_off_ends() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..200 {
            let (lo, hi) = random_walk_region(&[0.5, 0.5], 1, &mut rng);
            assert_eq!((lo, hi), (0, 1));
        }
    }

    #[test]
    fn splice_keeps_prefix_and_suffix() {
        let out = splice_detour(&[10, 11, 12, 13], 1, 1, &[11, 20, 30], &[30, 12]);
        assert_eq!(out, vec![10, 11, 20, 30, 12, 13]);
        let whole = splice_detour(&[10, 11], 0, 0, &[10, 5], &[5, 11]);
        assert_eq!(whole, vec![10, 5, 11]);
    }

    fn room() -> World {
        World::empty(Aabb::new(Vec2::new(0.0, 0.0), Vec2::new(4.0, 4.0)))
    }

    fn params(num_samples: usize) -> RoadmapParams {
        RoadmapParams {
            num_samples,
            k_nearest: 6,
            step: 0.05,
        }
    }

    #[test]
    fn detour_passes_through_new_vertex() {
        let m = RobotModel::disc(0.1);
        let mut rm = Roadmap::new(room(), m, ManifoldConstraint::unconstrained(), params(0));
        let ids: Vec<usize> = [[0.5, 2.0], [2.0, 2.0], [3.5, 2.0]]
            .iter()
            .map(|p| rm.add_vertex_unchecked(Configuration::new(p.to_vec())))
            .collect();
        rm.connect(ids[0], ids[1]).unwrap();
        rm.connect(ids[1], ids[2]).unwrap();
        let path = rm.path_through(&ids).unwrap();
        let mut planner = RobotPlanner::new(rm, ids[0], vec![ids[2]], FeedbackParams::default());
        let mut rec = CollisionRecord::for_path(&path);
        rec.increment(1);
        planner.history.update(&path, &rec);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let out = planner.detour(1, &mut rng, 0.0).unwrap();
        assert_eq!(out.vertex_ids[0], ids[0]);
        assert_eq!(*out.vertex_ids.last().unwrap(), ids[2]);
        assert!(out.vertex_ids.iter().any(|v| *v >= 3));
        assert!(out.validate(&planner.roadmap, ids[0], &[ids[2]]).is_ok());
    }

    #[test]
    fn blocked_world_falls_back_to_plan() {
        let m = RobotModel::disc(0.1);
        let world = World::new(
            Aabb::new(Vec2::new(0.0, 0.0), Vec2::new(4.0, 4.0)),
            vec![Obstacle::Rect {
                min: Vec2::new(0.0, 0.2005),
                max: Vec2::new(4.0, 4.0),
            }],
        );
        let mut rm = Roadmap::new(world, m, ManifoldConstraint::unconstrained(), params(0));
        let a = rm.add_vertex_unchecked(Configuration::new(vec![0.2, 0.10025]));
        let b = rm.add_vertex_unchecked(Configuration::new(vec![3.8, 0.10025]));
        rm.connect(a, b).unwrap();
        let path = rm.path_through(&[a, b]).unwrap();
        let mut planner = RobotPlanner::new(
            rm,
            a,
            vec![b],
            FeedbackParams {
                p_root: 0.0,
                ..Default::default()
            },
        );
        planner.history.update(&path, &CollisionRecord::for_path(&path));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert_eq!(planner.detour(1, &mut rng, 0.3), Err(DetourError::NoVertex(DETOUR_RETRIES)));
        let out = planner.plan_with_experience(&mut rng, 0.3).unwrap();
        assert!(out.validate(&planner.roadmap, a, &[b]).is_ok());
        assert_eq!(planner.history.elements()[1].selections, 1);
        assert_eq!(out.vertex_ids, vec![a, b]);
    }
}
