//! Coordination-space scheduling over a fixed set of robot paths.
//!
//! A schedule assigns every robot, at every composite timestep, an index
//! into its own path. Between consecutive timesteps each robot either moves
//! to its next representative configuration or stops. Transitions in which
//! every robot stops are trivial and never kept.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::geometry::{Body, RobotModel};
use crate::roadmap::Path;

/// A discretized composite schedule: `progress[t][r]` is robot `r`'s path
/// index at timestep `t`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CandidateSolution {
    progress: Vec<Vec<usize>>,
}

impl CandidateSolution {
    /// Builds a candidate from per-transition move flags (`moves[t][r]`),
    /// dropping every all-stop transition.
    pub fn from_moves(num_robots: usize, moves: &[Vec<bool>]) -> Self {
        let mut current = vec![0; num_robots];
        let mut progress = vec![current.clone()];
        for step in moves {
            debug_assert_eq!(step.len(), num_robots);
            if !step.iter().any(|m| *m) {
                continue;
            }
            for (c, m) in current.iter_mut().zip(step) {
                *c += usize::from(*m);
            }
            progress.push(current.clone());
        }
        Self { progress }
    }

    /// Wraps an explicit progress matrix after checking it against the path
    /// lengths.
    pub fn from_progress(progress: Vec<Vec<usize>>, path_lengths: &[usize]) -> Result<Self, String> {
        let c = Self { progress };
        c.check(path_lengths)?;
        Ok(c)
    }

    pub fn progress(&self) -> &[Vec<usize>] {
        &self.progress
    }

    /// `|S*|`, the number of composite states.
    pub fn num_timesteps(&self) -> usize {
        self.progress.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.progress.len().saturating_sub(1)
    }

    pub fn num_robots(&self) -> usize {
        self.progress.first().map_or(0, Vec::len)
    }

    pub fn index(&self, t: usize, robot: usize) -> usize {
        self.progress[t][robot]
    }

    /// Whether `robot` moves during transition `t` (from state `t` to `t + 1`).
    pub fn moves(&self, t: usize, robot: usize) -> bool {
        self.progress[t + 1][robot] != self.progress[t][robot]
    }

    /// True if some robot stops during some transition.
    pub fn has_stop(&self) -> bool {
        (0..self.num_transitions()).any(|t| (0..self.num_robots()).any(|r| !self.moves(t, r)))
    }

    /// Checks every candidate invariant: monotone 0/1 progress from the path
    /// start to the path end, no trivial transition, and
    /// `max |p_i| <= |S*| <= sum |p_i|`.
    pub fn check(&self, path_lengths: &[usize]) -> Result<(), String> {
        let n = path_lengths.len();
        if self.progress.is_empty() {
            return Err("candidate has no timesteps".into());
        }
        if let Some(t) = self.progress.iter().position(|row| row.len() != n) {
            return Err(format!("timestep {t} has the wrong robot count"));
        }
        if self.progress[0].iter().any(|i| *i != 0) {
            return Err("progress must start at index 0".into());
        }
        let last = self.progress.last().unwrap();
        for (r, (&i, &len)) in last.iter().zip(path_lengths).enumerate() {
            if len == 0 || i != len - 1 {
                return Err(format!("robot {r} ends at index {i}, path has {len} configurations"));
            }
        }
        for (t, w) in self.progress.windows(2).enumerate() {
            let mut any = false;
            for r in 0..n {
                match w[1][r].checked_sub(w[0][r]) {
                    Some(0) => {}
                    Some(1) => any = true,
                    _ => return Err(format!("robot {r} does not advance by 0 or 1 in transition {t}")),
                }
            }
            if !any {
                return Err(format!("transition {t} is trivial"));
            }
        }
        let total: usize = path_lengths.iter().sum();
        let longest = path_lengths.iter().copied().max().unwrap_or(1);
        let steps = self.num_timesteps();
        if steps > total || steps < longest {
            return Err(format!("{steps} timesteps outside [{longest}, {total}]"));
        }
        Ok(())
    }
}

pub fn path_lengths(paths: &[Path]) -> Vec<usize> {
    paths.iter().map(Path::len).collect()
}

/// Raw stop sampling before trivial-state removal: `L = sum |p_i|` timesteps,
/// and for each robot a uniformly random `|p_i| - 1` of the `L - 1`
/// transitions are moves. Returns `moves[t][r]`.
pub fn sample_moves<R: Rng + ?Sized>(path_lengths: &[usize], rng: &mut R) -> Vec<Vec<bool>> {
    let total: usize = path_lengths.iter().sum();
    let transitions = total.saturating_sub(1);
    let mut moves = vec![vec![false; path_lengths.len()]; transitions];
    for (r, &len) in path_lengths.iter().enumerate() {
        let k = len.saturating_sub(1);
        for t in index::sample(rng, transitions, k) {
            moves[t][r] = true;
        }
    }
    moves
}

/// Random stops: samples a move matrix and removes trivial states.
pub fn schedule<R: Rng + ?Sized>(path_lengths: &[usize], rng: &mut R) -> CandidateSolution {
    CandidateSolution::from_moves(path_lengths.len(), &sample_moves(path_lengths, rng))
}

/// Robots traverse their whole paths one after another in `order`.
pub fn schedule_in_order(path_lengths: &[usize], order: &[usize]) -> CandidateSolution {
    let n = path_lengths.len();
    let mut moves = Vec::new();
    for &r in order {
        for _ in 1..path_lengths[r] {
            let mut step = vec![false; n];
            step[r] = true;
            moves.push(step);
        }
    }
    CandidateSolution::from_moves(n, &moves)
}

/// Random priority order: each robot runs to its goal before the next starts.
pub fn schedule_priority<R: Rng + ?Sized>(path_lengths: &[usize], rng: &mut R) -> CandidateSolution {
    let mut order: Vec<usize> = (0..path_lengths.len()).collect();
    order.shuffle(rng);
    schedule_in_order(path_lengths, &order)
}

/// The mixed sampler: random priority with probability `p_priority`,
/// random stops otherwise.
pub fn sample_candidate<R: Rng + ?Sized>(path_lengths: &[usize], rng: &mut R, p_priority: f64) -> CandidateSolution {
    if p_priority > 0.0 && rng.gen::<f64>() < p_priority {
        schedule_priority(path_lengths, rng)
    } else {
        schedule(path_lengths, rng)
    }
}

/// One robot-robot contact found while sweeping a candidate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollisionEvent {
    pub transition: usize,
    pub robots: (usize, usize),
    /// Path-edge index per robot; `None` when that robot is stopped.
    pub edges: (Option<usize>, Option<usize>),
    pub lambda: f64,
}

impl CollisionEvent {
    pub fn edge_of(&self, robot: usize) -> Option<usize> {
        if self.robots.0 == robot {
            self.edges.0
        } else if self.robots.1 == robot {
            self.edges.1
        } else {
            None
        }
    }
}

/// Default sweep resolution: half the smallest body radius.
pub fn default_resolution(models: &[RobotModel]) -> f64 {
    models.iter().map(RobotModel::min_radius).fold(f64::INFINITY, f64::min) / 2.0
}

/// Edge a stopped robot is blamed for when it overlaps another stopped robot:
/// the last edge it traversed, or its first edge if it has not moved yet.
fn held_edge(index: usize, path: &Path) -> Option<usize> {
    match index {
        0 if path.num_edges() > 0 => Some(0),
        0 => None,
        k => Some(k - 1),
    }
}

/// Bisection depth limit when refining a sample interval.
const MAX_REFINE_DEPTH: u32 = 30;

/// Sweeps one transition from composite state `from` to `to`. Calls `hit`
/// for every colliding (pair, lambda) and stops early when it returns false.
/// Returns false if stopped early.
///
/// Between grid samples, a pair whose clearances at both ends do not exceed
/// the distance its bodies can travel is bisected until the gap is cleared
/// or a contact is found, so shallow contacts between samples are reported.
fn sweep_transition(
    transition: usize,
    from: &[usize],
    to: &[usize],
    paths: &[Path],
    models: &[RobotModel],
    resolution: f64,
    hit: &mut dyn FnMut(CollisionEvent) -> bool,
) -> bool {
    let n = paths.len();
    let moving: Vec<bool> = (0..n).map(|r| to[r] != from[r]).collect();
    let disp: Vec<f64> = (0..n)
        .map(|r| if moving[r] { paths[r].segments[from[r]].displacement() } else { 0.0 })
        .collect();
    let max_disp = disp.iter().copied().fold(0.0, f64::max);
    let samples = if max_disp > 0.0 {
        (max_disp / resolution).ceil().max(1.0) as usize
    } else {
        1
    };
    let body_at = |r: usize, lambda: f64| {
        let q = if moving[r] {
            paths[r].segments[from[r]].config_at(&models[r], lambda)
        } else {
            paths[r].configs[from[r]].clone()
        };
        models[r].body(&q)
    };
    let event = |i: usize, j: usize, lambda: f64| {
        let static_pair = !moving[i] && !moving[j];
        let blame = |r: usize| {
            if moving[r] {
                Some(from[r])
            } else if static_pair {
                held_edge(from[r], &paths[r])
            } else {
                None
            }
        };
        CollisionEvent {
            transition,
            robots: (i, j),
            edges: (blame(i), blame(j)),
            lambda,
        }
    };
    // clearance, or None when the pair touches at that sample
    let gap = |a: &Body, b: &Body| {
        let c = a.clearance(b);
        if c < 0.0 && a.intersects(b) {
            None
        } else {
            Some(c.max(0.0))
        }
    };

    let mut bodies: Vec<Body> = (0..n).map(|r| body_at(r, 0.0)).collect();
    let mut prev: Vec<Vec<Option<f64>>> = vec![vec![None; n]; n];
    for k in 0..=samples {
        let lambda = k as f64 / samples as f64;
        if k > 0 {
            for r in (0..n).filter(|&r| moving[r]) {
                bodies[r] = body_at(r, lambda);
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if !moving[i] && !moving[j] && k > 0 {
                    continue;
                }
                let here = gap(&bodies[i], &bodies[j]);
                if k > 0 {
                    if let (Some(lo), Some(hi)) = (prev[i][j], here) {
                        let start = (k - 1) as f64 / samples as f64;
                        let found = refine(start, lambda, lo, hi, disp[i] + disp[j], 0, &|l| {
                            gap(&body_at(i, l), &body_at(j, l))
                        });
                        if let Some(l) = found {
                            if !hit(event(i, j, l)) {
                                return false;
                            }
                        }
                    }
                }
                prev[i][j] = here;
                if here.is_none() && !hit(event(i, j, lambda)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Searches `[lo, hi]` for a contact. Clearance is 1-Lipschitz in body-point
/// motion, and the pair moves at most `(hi - lo) * speed` over the interval,
/// so no contact exists when the end clearances sum to more than that.
fn refine(
    lo: f64,
    hi: f64,
    c_lo: f64,
    c_hi: f64,
    speed: f64,
    depth: u32,
    gap_at: &dyn Fn(f64) -> Option<f64>,
) -> Option<f64> {
    if c_lo + c_hi > (hi - lo) * speed || depth >= MAX_REFINE_DEPTH {
        return None;
    }
    let mid = 0.5 * (lo + hi);
    let c_mid = match gap_at(mid) {
        None => return Some(mid),
        Some(c) => c,
    };
    refine(lo, mid, c_lo, c_mid, speed, depth + 1, gap_at).or_else(|| refine(mid, hi, c_mid, c_hi, speed, depth + 1, gap_at))
}

/// Sweeps every transition of the candidate. Moving robots follow their edge
/// trajectories with a shared progress `lambda`, sampled finely enough that
/// no body point moves more than `resolution` between samples, with
/// intervals between samples refined where contact cannot be ruled out;
/// stopped robots hold position. An empty result means the candidate is
/// valid.
pub fn collision_check(
    candidate: &CandidateSolution,
    paths: &[Path],
    models: &[RobotModel],
    resolution: f64,
) -> Vec<CollisionEvent> {
    let mut events = Vec::new();
    let progress = candidate.progress();
    if progress.len() == 1 {
        let p = &progress[0];
        sweep_transition(0, p, p, paths, models, resolution, &mut |e| {
            events.push(e);
            true
        });
        return events;
    }
    for (t, w) in progress.windows(2).enumerate() {
        sweep_transition(t, &w[0], &w[1], paths, models, resolution, &mut |e| {
            events.push(e);
            true
        });
    }
    events
}

/// True if any collision occurs while moving from state `from` to `to`.
pub fn transition_collides(
    from: &[usize],
    to: &[usize],
    paths: &[Path],
    models: &[RobotModel],
    resolution: f64,
) -> bool {
    !sweep_transition(0, from, to, paths, models, resolution, &mut |_| false)
}
