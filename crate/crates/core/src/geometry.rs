//! Robot models, forward kinematics and exact 2D collision primitives.
//!
//! Every robot body is a set of capsules (segments swept by a disc). A disc
//! robot is a single degenerate capsule; a planar arm is one capsule per link
//! plus an optional end-effector stick. All predicates are strict: shapes
//! collide iff their distance is below the sum of their radii.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("configuration has {got} values, robot has {expected} degrees of freedom")]
    DimensionMismatch { expected: usize, got: usize },
}

/// Wraps an angle to `(-pi, pi]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    // rem_euclid maps -pi to pi already; guard against w == -pi from rounding
    if w <= -PI {
        w += 2.0 * PI;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn from_angle(theta: f64) -> Self {
        Self::new(theta.cos(), theta.sin())
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

/// A point in one robot's configuration space.
///
/// Disc robots use `(x, y)` in meters; planar arms use relative joint angles
/// in radians, wrapped to `(-pi, pi]` by [`RobotModel::normalize`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Configuration(pub Vec<f64>);

impl Configuration {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl From<Vec<f64>> for Configuration {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

impl<const N: usize> From<[f64; N]> for Configuration {
    fn from(v: [f64; N]) -> Self {
        Self(v.to_vec())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec2,
    pub max: Vec2,
}

impl Aabb {
    pub fn new(min: Vec2, max: Vec2) -> Self {
        Self { min, max }
    }

    pub fn area(&self) -> f64 {
        (self.max.x - self.min.x).max(0.0) * (self.max.y - self.min.y).max(0.0)
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.min.x && p.x <= self.max.x && p.y >= self.min.y && p.y <= self.max.y
    }

    pub fn intersects(&self, o: &Aabb) -> bool {
        self.min.x <= o.max.x && o.min.x <= self.max.x && self.min.y <= o.max.y && o.min.y <= self.max.y
    }

    fn corners(&self) -> [Vec2; 4] {
        [
            self.min,
            Vec2::new(self.max.x, self.min.y),
            self.max,
            Vec2::new(self.min.x, self.max.y),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Obstacle {
    Rect { min: Vec2, max: Vec2 },
    Circle { center: Vec2, radius: f64 },
}

impl Obstacle {
    pub fn bounding_box(&self) -> Aabb {
        match *self {
            Obstacle::Rect { min, max } => Aabb::new(min, max),
            Obstacle::Circle { center, radius } => Aabb::new(
                center - Vec2::new(radius, radius),
                center + Vec2::new(radius, radius),
            ),
        }
    }

    /// Distance from a segment to the obstacle (0 when they intersect).
    pub fn segment_distance(&self, a: Vec2, b: Vec2) -> f64 {
        match *self {
            Obstacle::Rect { min, max } => segment_aabb_distance(a, b, &Aabb::new(min, max)),
            Obstacle::Circle { center, radius } => {
                (point_segment_distance_squared(center, a, b).sqrt() - radius).max(0.0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub bounds: Aabb,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
}

impl World {
    pub fn new(bounds: Aabb, obstacles: Vec<Obstacle>) -> Self {
        Self { bounds, obstacles }
    }

    pub fn empty(bounds: Aabb) -> Self {
        Self::new(bounds, Vec::new())
    }

    /// Returns a description of the first violated invariant, if any.
    pub fn check(&self) -> Result<(), String> {
        if !(self.bounds.area() > 0.0) {
            return Err("bounds must have positive area".into());
        }
        for (i, o) in self.obstacles.iter().enumerate() {
            if let Obstacle::Circle { radius, .. } = o {
                if !(*radius > 0.0) {
                    return Err(format!("obstacles[{i}]: radius must be positive"));
                }
            }
            if !o.bounding_box().intersects(&self.bounds) {
                return Err(format!("obstacles[{i}] does not intersect the bounds"));
            }
        }
        Ok(())
    }
}

/// A segment with a radius. A zero-length segment is a disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Capsule {
    pub a: Vec2,
    pub b: Vec2,
    pub radius: f64,
}

impl Capsule {
    pub fn distance(&self, o: &Capsule) -> f64 {
        segment_segment_distance_squared(self.a, self.b, o.a, o.b).sqrt()
    }

    pub fn intersects(&self, o: &Capsule) -> bool {
        let r = self.radius + o.radius;
        segment_segment_distance_squared(self.a, self.b, o.a, o.b) < r * r
    }

    fn bounding_box(&self) -> Aabb {
        let r = self.radius;
        Aabb::new(
            Vec2::new(self.a.x.min(self.b.x) - r, self.a.y.min(self.b.y) - r),
            Vec2::new(self.a.x.max(self.b.x) + r, self.a.y.max(self.b.y) + r),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2 {
    pub position: Vec2,
    pub heading: f64,
}

/// Output of forward kinematics: the body primitives and the end-effector pose.
#[derive(Debug, Clone, PartialEq)]
pub struct Body {
    pub capsules: Vec<Capsule>,
    pub end_effector: Pose2,
}

impl Body {
    fn bounding_box(&self) -> Aabb {
        let mut bb = self.capsules[0].bounding_box();
        for c in &self.capsules[1..] {
            let o = c.bounding_box();
            bb.min.x = bb.min.x.min(o.min.x);
            bb.min.y = bb.min.y.min(o.min.y);
            bb.max.x = bb.max.x.max(o.max.x);
            bb.max.y = bb.max.y.max(o.max.y);
        }
        bb
    }

    pub fn intersects(&self, other: &Body) -> bool {
        if !self.bounding_box().intersects(&other.bounding_box()) {
            return false;
        }
        self.capsules
            .iter()
            .any(|a| other.capsules.iter().any(|b| a.intersects(b)))
    }

    /// Surface distance to `other`, negative when overlapping. Exact when the
    /// bounding boxes overlap, otherwise the gap between the boxes (a lower
    /// bound).
    pub fn clearance(&self, other: &Body) -> f64 {
        let (a, b) = (self.bounding_box(), other.bounding_box());
        let gap = (a.min.x - b.max.x).max(b.min.x - a.max.x).max(a.min.y - b.max.y).max(b.min.y - a.max.y);
        if gap > 0.0 {
            return gap;
        }
        self.capsules
            .iter()
            .flat_map(|p| other.capsules.iter().map(move |q| p.distance(q) - p.radius - q.radius))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn collides_with_world(&self, world: &World) -> bool {
        let bounds = &world.bounds;
        for c in &self.capsules {
            let bb = c.bounding_box();
            if bb.min.x < bounds.min.x
                || bb.min.y < bounds.min.y
                || bb.max.x > bounds.max.x
                || bb.max.y > bounds.max.y
            {
                return true;
            }
            for o in &world.obstacles {
                if !bb.intersects(&o.bounding_box()) {
                    continue;
                }
                if o.segment_distance(c.a, c.b) < c.radius {
                    return true;
                }
            }
        }
        false
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum RobotModel {
    Disc {
        radius: f64,
    },
    PlanarArm {
        base: Vec2,
        link_lengths: Vec<f64>,
        /// Capsule half-width shared by links and stick.
        link_radius: f64,
        #[serde(default)]
        ee_stick_length: f64,
    },
}

impl RobotModel {
    pub fn disc(radius: f64) -> Self {
        RobotModel::Disc { radius }
    }

    pub fn planar_arm(base: Vec2, link_lengths: Vec<f64>, link_radius: f64, ee_stick_length: f64) -> Self {
        RobotModel::PlanarArm {
            base,
            link_lengths,
            link_radius,
            ee_stick_length,
        }
    }

    pub fn dof(&self) -> usize {
        match self {
            RobotModel::Disc { .. } => 2,
            RobotModel::PlanarArm { link_lengths, .. } => link_lengths.len(),
        }
    }

    pub fn check(&self) -> Result<(), String> {
        match self {
            RobotModel::Disc { radius } => {
                if !(*radius > 0.0) {
                    return Err("radius must be positive".into());
                }
            }
            RobotModel::PlanarArm {
                link_lengths,
                link_radius,
                ee_stick_length,
                ..
            } => {
                if link_lengths.is_empty() {
                    return Err("arm needs at least one link".into());
                }
                if link_lengths.iter().any(|l| !(*l > 0.0)) {
                    return Err("link lengths must be positive".into());
                }
                if !(*link_radius > 0.0) {
                    return Err("link_radius must be positive".into());
                }
                if !(*ee_stick_length >= 0.0) {
                    return Err("ee_stick_length must be non-negative".into());
                }
            }
        }
        Ok(())
    }

    /// Smallest radius of any body primitive.
    pub fn min_radius(&self) -> f64 {
        match self {
            RobotModel::Disc { radius } => *radius,
            RobotModel::PlanarArm { link_radius, .. } => *link_radius,
        }
    }

    fn is_angular(&self) -> bool {
        matches!(self, RobotModel::PlanarArm { .. })
    }

    fn check_dim(&self, q: &Configuration) -> Result<(), GeometryError> {
        if q.len() != self.dof() {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dof(),
                got: q.len(),
            });
        }
        Ok(())
    }

    /// Wraps angular coordinates into `(-pi, pi]`.
    pub fn normalize(&self, q: &mut Configuration) {
        if self.is_angular() {
            for v in &mut q.0 {
                *v = wrap_angle(*v);
            }
        }
    }

    /// Per-coordinate difference `b - a`, taking the short way around for angles.
    pub fn difference(&self, a: &Configuration, b: &Configuration) -> Vec<f64> {
        let angular = self.is_angular();
        a.0.iter()
            .zip(&b.0)
            .map(|(x, y)| if angular { wrap_angle(y - x) } else { y - x })
            .collect()
    }

    /// Configuration-space distance (meters for discs, radians for arms).
    pub fn distance(&self, a: &Configuration, b: &Configuration) -> f64 {
        self.difference(a, b).iter().map(|d| d * d).sum::<f64>().sqrt()
    }

    pub fn interpolate(&self, a: &Configuration, b: &Configuration, t: f64) -> Configuration {
        let d = self.difference(a, b);
        let mut q = Configuration(a.0.iter().zip(&d).map(|(x, dx)| x + t * dx).collect());
        self.normalize(&mut q);
        q
    }

    /// Upper bound on how far any body point moves between `a` and `b` along
    /// the straight configuration-space interpolation.
    pub fn displacement_bound(&self, a: &Configuration, b: &Configuration) -> f64 {
        match self {
            RobotModel::Disc { .. } => self.distance(a, b),
            RobotModel::PlanarArm {
                link_lengths,
                link_radius,
                ee_stick_length,
                ..
            } => {
                let d = self.difference(a, b);
                // joint i moves every point beyond it by at most |dq_i| * lever_i
                let mut lever = ee_stick_length + link_radius;
                let mut total = 0.0;
                for i in (0..link_lengths.len()).rev() {
                    lever += link_lengths[i];
                    total += d[i].abs() * lever;
                }
                total
            }
        }
    }

    /// Uniform sample: position inside the world bounds for discs, joint
    /// angles in `(-pi, pi]` for arms.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, world: &World, rng: &mut R) -> Configuration {
        match self {
            RobotModel::Disc { .. } => {
                let b = &world.bounds;
                Configuration(vec![
                    rng.gen_range(b.min.x..=b.max.x),
                    rng.gen_range(b.min.y..=b.max.y),
                ])
            }
            RobotModel::PlanarArm { link_lengths, .. } => {
                let mut q = Configuration(
                    (0..link_lengths.len()).map(|_| rng.gen_range(-PI..=PI)).collect(),
                );
                self.normalize(&mut q);
                q
            }
        }
    }

    pub fn forward_kinematics(&self, q: &Configuration) -> Result<Body, GeometryError> {
        self.check_dim(q)?;
        Ok(self.body(q))
    }

    /// Forward kinematics without the dimension check.
    pub(crate) fn body(&self, q: &Configuration) -> Body {
        match self {
            RobotModel::Disc { radius } => {
                let c = Vec2::new(q.0[0], q.0[1]);
                Body {
                    capsules: vec![Capsule {
                        a: c,
                        b: c,
                        radius: *radius,
                    }],
                    end_effector: Pose2 {
                        position: c,
                        heading: 0.0,
                    },
                }
            }
            RobotModel::PlanarArm {
                base,
                link_lengths,
                link_radius,
                ee_stick_length,
            } => {
                let mut capsules = Vec::with_capacity(link_lengths.len() + 1);
                let mut p = *base;
                let mut heading = 0.0;
                for (len, dq) in link_lengths.iter().zip(&q.0) {
                    heading += dq;
                    let next = p + Vec2::from_angle(heading) * *len;
                    capsules.push(Capsule {
                        a: p,
                        b: next,
                        radius: *link_radius,
                    });
                    p = next;
                }
                if *ee_stick_length > 0.0 {
                    let tip = p + Vec2::from_angle(heading) * *ee_stick_length;
                    capsules.push(Capsule {
                        a: p,
                        b: tip,
                        radius: *link_radius,
                    });
                    p = tip;
                }
                Body {
                    capsules,
                    end_effector: Pose2 {
                        position: p,
                        heading: wrap_angle(heading),
                    },
                }
            }
        }
    }

    pub fn end_effector(&self, q: &Configuration) -> Pose2 {
        self.body(q).end_effector
    }
}

pub fn robot_world_collision(model: &RobotModel, q: &Configuration, world: &World) -> bool {
    model.body(q).collides_with_world(world)
}

pub fn robot_robot_collision(
    model_i: &RobotModel,
    q_i: &Configuration,
    model_j: &RobotModel,
    q_j: &Configuration,
) -> bool {
    model_i.body(q_i).intersects(&model_j.body(q_j))
}

pub fn point_segment_distance_squared(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return (p - a).norm_squared();
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm_squared()
}

/// Squared distance between segments `p1q1` and `p2q2` (closest-point method).
pub fn segment_segment_distance_squared(p1: Vec2, q1: Vec2, p2: Vec2, q2: Vec2) -> f64 {
    let d1 = q1 - p1;
    let d2 = q2 - p2;
    let r = p1 - p2;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(r);

    let (s, t);
    if a <= f64::EPSILON && e <= f64::EPSILON {
        return r.norm_squared();
    }
    if a <= f64::EPSILON {
        s = 0.0;
        t = (f / e).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        if e <= f64::EPSILON {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else {
            let b = d1.dot(d2);
            let denom = a * e - b * b;
            let mut s0 = if denom > 0.0 {
                ((b * f - c * e) / denom).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let mut t0 = (b * s0 + f) / e;
            if t0 < 0.0 {
                t0 = 0.0;
                s0 = (-c / a).clamp(0.0, 1.0);
            } else if t0 > 1.0 {
                t0 = 1.0;
                s0 = ((b - c) / a).clamp(0.0, 1.0);
            }
            s = s0;
            t = t0;
        }
    }
    let c1 = p1 + d1 * s;
    let c2 = p2 + d2 * t;
    let direct = (c1 - c2).norm_squared();

    // Crossing segments: the parametric solution can be off by rounding.
    if segments_cross(p1, q1, p2, q2) {
        return 0.0;
    }
    direct
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn segments_cross(p1: Vec2, q1: Vec2, p2: Vec2, q2: Vec2) -> bool {
    let o1 = orient(p1, q1, p2);
    let o2 = orient(p1, q1, q2);
    let o3 = orient(p2, q2, p1);
    let o4 = orient(p2, q2, q1);
    o1 * o2 < 0.0 && o3 * o4 < 0.0
}

/// True when the segment touches the closed rectangle (slab clipping).
pub fn segment_intersects_aabb(a: Vec2, b: Vec2, bb: &Aabb) -> bool {
    let d = b - a;
    let mut t0: f64 = 0.0;
    let mut t1: f64 = 1.0;
    for (start, dir, lo, hi) in [(a.x, d.x, bb.min.x, bb.max.x), (a.y, d.y, bb.min.y, bb.max.y)] {
        if dir == 0.0 {
            if start < lo || start > hi {
                return false;
            }
        } else {
            let mut ta = (lo - start) / dir;
            let mut tb = (hi - start) / dir;
            if ta > tb {
                std::mem::swap(&mut ta, &mut tb);
            }
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return false;
            }
        }
    }
    true
}

pub fn segment_aabb_distance(a: Vec2, b: Vec2, bb: &Aabb) -> f64 {
    if segment_intersects_aabb(a, b, bb) {
        return 0.0;
    }
    let c = bb.corners();
    (0..4)
        .map(|i| segment_segment_distance_squared(a, b, c[i], c[(i + 1) % 4]))
        .fold(f64::INFINITY, f64::min)
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn arm(lengths: &[f64]) -> RobotModel {
        RobotModel::planar_arm(Vec2::new(0.0, 0.0), lengths.to_vec(), 0.05, 0.0)
    }

    fn room() -> World {
        World::empty(Aabb::new(Vec2::new(0.0, 0.0), Vec2::new(10.0, 10.0)))
    }

    #[test]
    fn straight_chain_end_effector() {
        let ee = arm(&[1.0, 1.0]).forward_kinematics(&[0.0, 0.0].into()).unwrap().end_effector;
        assert!(close(ee.position.x, 2.0, 1e-12) && close(ee.position.y, 0.0, 1e-12));
        assert!(close(ee.heading, 0.0, 1e-12));
    }

    #[test]
    fn rotated_chain_end_effector() {
        let ee = arm(&[1.0, 1.0])
            .forward_kinematics(&[PI / 2.0, 0.0].into())
            .unwrap()
            .end_effector;
        assert!(close(ee.position.x, 0.0, 1e-12) && close(ee.position.y, 2.0, 1e-12));
        assert!(close(ee.heading, PI / 2.0, 1e-12));
    }

    #[test]
    fn three_link_matches_direct_trig() {
        let q = [PI / 3.0, -PI / 3.0, 0.0];
        let ee = arm(&[1.0, 1.0, 1.0]).forward_kinematics(&q.into()).unwrap().end_effector;
        // cumulative angles pi/3, 0, 0
        let x = (PI / 3.0).cos() + 1.0 + 1.0;
        let y = (PI / 3.0).sin();
        assert!(close(ee.position.x, x, 1e-12), "{}", ee.position.x);
        assert!(close(ee.position.y, y, 1e-12));
        assert!(close(ee.heading, 0.0, 1e-12));
    }

    #[test]
    fn stick_extends_end_effector() {
        let m = RobotModel::planar_arm(Vec2::new(1.0, 1.0), vec![1.0], 0.05, 0.5);
        let body = m.forward_kinematics(&[0.0].into()).unwrap();
        assert_eq!(body.capsules.len(), 2);
        assert!(close(body.end_effector.position.x, 2.5, 1e-12));
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = arm(&[1.0, 1.0]).forward_kinematics(&[0.0].into()).unwrap_err();
        assert_eq!(err, GeometryError::DimensionMismatch { expected: 2, got: 1 });
        assert!(RobotModel::disc(0.1).forward_kinematics(&[0.0, 0.0, 0.0].into()).is_err());
    }

    #[test]
    fn disc_world_collision() {
        let m = RobotModel::disc(0.1);
        assert!(!robot_world_collision(&m, &[5.0, 5.0].into(), &room()));
        assert!(robot_world_collision(&m, &[-1.0, 5.0].into(), &room()));
        assert!(robot_world_collision(&m, &[0.05, 5.0].into(), &room()));
    }

    #[test]
    fn arm_link_through_rectangle() {
        // second link spans x in [1, 2] at y = 0.5
        let m = RobotModel::planar_arm(Vec2::new(0.0, 0.5), vec![1.0, 1.0], 0.01, 0.0);
        let q: Configuration = [0.0, 0.0].into();
        let body = m.forward_kinematics(&q).unwrap();
        // (obstacle top edge, expected): through the link, within the radius, clear
        for (top, expected) in [(0.7, true), (0.495, true), (0.485, false)] {
            let w = World::new(
                Aabb::new(Vec2::new(-1.0, -1.0), Vec2::new(10.0, 10.0)),
                vec![Obstacle::Rect {
                    min: Vec2::new(1.4, 0.3),
                    max: Vec2::new(1.6, top),
                }],
            );
            // dense oracle: points every 1 mm along each capsule axis
            let sampled = body.capsules.iter().any(|c| {
                let n = ((c.b - c.a).norm() / 1e-3).ceil() as usize;
                (0..=n).any(|k| {
                    let p = c.a + (c.b - c.a) * (k as f64 / n as f64);
                    w.obstacles.iter().any(|o| o.segment_distance(p, p) < c.radius)
                })
            });
            assert_eq!(sampled, expected, "oracle, top = {top}");
            assert_eq!(robot_world_collision(&m, &q, &w), expected, "top = {top}");
        }
    }

    #[test]
    fn disc_pair() {
        let m = RobotModel::disc(0.5);
        assert!(!robot_robot_collision(&m, &[0.0, 0.0].into(), &m, &[2.0, 0.0].into()));
        assert!(robot_robot_collision(&m, &[0.0, 0.0].into(), &m, &[0.9, 0.0].into()));
        // exactly touching is not a collision
        assert!(!robot_robot_collision(&m, &[0.0, 0.0].into(), &m, &[1.0, 0.0].into()));
    }

    #[test]
    fn crossing_sticks() {
        let a = RobotModel::planar_arm(Vec2::new(0.0, 0.0), vec![2.0], 0.01, 0.0);
        let b = RobotModel::planar_arm(Vec2::new(1.0, -1.0), vec![2.0], 0.01, 0.0);
        assert!(robot_robot_collision(&a, &[0.0].into(), &b, &[PI / 2.0].into()));
    }

    /// Dense point sampling along both axes at 1 mm spacing, then exact point-segment distances.
    fn sampled_distance(c1: &Capsule, c2: &Capsule) -> f64 {
        let n = ((c1.b - c1.a).norm() / 1e-3).ceil().max(1.0) as usize;
        (0..=n)
            .map(|k| {
                let p = c1.a + (c1.b - c1.a) * (k as f64 / n as f64);
                point_segment_distance_squared(p, c2.a, c2.b).sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn near_parallel_capsules_at_threshold() {
        let r = 0.05;
        for gap_offset in [-1e-6, 1e-6] {
            let gap = 2.0 * r + gap_offset;
            let a = Capsule {
                a: Vec2::new(0.0, 0.0),
                b: Vec2::new(1.0, 0.0),
                radius: r,
            };
            // slight tilt, closest approach at x = 1 end of b
            let b = Capsule {
                a: Vec2::new(0.0, gap + 1e-4),
                b: Vec2::new(1.0, gap),
                radius: r,
            };
            let oracle = sampled_distance(&b, &a);
            assert!(close(oracle, gap, 1e-9));
            assert_eq!(a.intersects(&b), oracle < 2.0 * r, "offset {gap_offset}");
            assert_eq!(b.intersects(&a), a.intersects(&b));
        }
    }

    #[test]
    fn segment_box_distance_cases() {
        let bb = Aabb::new(Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0));
        assert_eq!(segment_aabb_distance(Vec2::new(-1.0, 0.5), Vec2::new(2.0, 0.5), &bb), 0.0);
        assert!(close(
            segment_aabb_distance(Vec2::new(-1.0, 2.0), Vec2::new(2.0, 2.0), &bb),
            1.0,
            1e-12
        ));
        assert!(close(
            segment_aabb_distance(Vec2::new(2.0, 2.0), Vec2::new(3.0, 3.0), &bb),
            2f64.sqrt(),
            1e-12
        ));
    }

    #[test]
    fn wrap_angle_range() {
        assert!(close(wrap_angle(PI), PI, 1e-15));
        assert!(close(wrap_angle(-PI), PI, 1e-15));
        assert!(close(wrap_angle(3.0 * PI / 2.0), -PI / 2.0, 1e-12));
        assert!(close(wrap_angle(0.1), 0.1, 1e-15));
    }
}
