//! Independent solution checks.

use crate::geometry::Configuration;
use crate::roadmap::Path;
use crate::scenario::Scenario;
use crate::scheduler::{collision_check, path_lengths, CandidateSolution};

/// Largest allowed configuration-space gap between consecutive edge samples.
pub const MAX_SAMPLE_GAP: f64 = 0.1;

const ENDPOINT_TOLERANCE: f64 = 1e-9;

fn close(a: &Configuration, b: &Configuration) -> bool {
    a.len() == b.len()
        && a
            .values()
            .iter()
            .zip(b.values())
            .all(|(x, y)| (x - y).abs() <= ENDPOINT_TOLERANCE)
}

/// Checks a solution against its scenario: path endpoints, edge continuity,
/// world collisions and constraint residuals along every edge sample, the
/// schedule invariants, and a robot-robot sweep at `resolution`. Returns
/// every problem found.
pub fn validate_solution(
    scenario: &Scenario,
    paths: &[Path],
    candidate: &CandidateSolution,
    resolution: f64,
) -> Result<(), Vec<String>> {
    let mut problems = Vec::new();
    if paths.len() != scenario.robots.len() {
        return Err(vec![format!(
            "{} paths for {} robots",
            paths.len(),
            scenario.robots.len()
        )]);
    }
    for (r, (path, robot)) in paths.iter().zip(&scenario.robots).enumerate() {
        let model = &robot.model;
        if !close(path.start(), &robot.start) {
            problems.push(format!("robot {r}: path does not start at the start configuration"));
        }
        if !robot.goals.iter().any(|g| close(path.end(), g)) {
            problems.push(format!("robot {r}: path does not end at a goal"));
        }
        for (e, seg) in path.segments.iter().enumerate() {
            let samples = seg.samples();
            if !close(samples.first().unwrap(), &path.configs[e]) || !close(samples.last().unwrap(), &path.configs[e + 1]) {
                problems.push(format!("robot {r} edge {e}: does not join its configurations"));
            }
            if let Some(gap) = samples
                .windows(2)
                .map(|w| model.distance(&w[0], &w[1]))
                .find(|d| *d > MAX_SAMPLE_GAP)
            {
                problems.push(format!("robot {r} edge {e}: sample gap {gap}"));
            }
            for q in &samples {
                if q.len() != model.dof() {
                    problems.push(format!("robot {r} edge {e}: wrong dimension"));
                    break;
                }
                if model.body(q).collides_with_world(&scenario.world) {
                    problems.push(format!("robot {r} edge {e}: hits the world"));
                    break;
                }
                let residual = robot.constraint.violation(model, q);
                if residual > robot.constraint.tolerance {
                    problems.push(format!("robot {r} edge {e}: constraint residual {residual:e}"));
                    break;
                }
            }
        }
    }
    if let Err(m) = candidate.check(&path_lengths(paths)) {
        problems.push(format!("schedule: {m}"));
    } else {
        let events = collision_check(candidate, paths, &scenario.models(), resolution);
        if let Some(e) = events.first() {
            problems.push(format!(
                "robots {} and {} collide in transition {} at {:.3} ({} events)",
                e.robots.0,
                e.robots.1,
                e.transition,
                e.lambda,
                events.len()
            ));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(problems)
    }
}
