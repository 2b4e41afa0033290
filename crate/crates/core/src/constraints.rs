//! Manifold constraints on a robot's configuration, with Newton projection
//! and constraint-following interpolation.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{wrap_angle, Configuration, RobotModel};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstraintError {
    #[error("projection did not converge (residual {residual:e})")]
    NonConvergence { residual: f64 },
    #[error("projection jumped {jump:.4} > {limit:.4} while interpolating")]
    Discontinuity { jump: f64, limit: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConstraintKind {
    Unconstrained,
    /// End effector held on the horizontal line `y = line_y`, optionally with
    /// a fixed heading.
    EndEffectorLine {
        line_y: f64,
        #[serde(default)]
        fix_heading: Option<f64>,
    },
}

fn default_tolerance() -> f64 {
    1e-6
}

fn default_max_newton_iters() -> usize {
    50
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifoldConstraint {
    #[serde(flatten)]
    pub kind: ConstraintKind,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_max_newton_iters")]
    pub max_newton_iters: usize,
}

impl Default for ManifoldConstraint {
    fn default() -> Self {
        Self::unconstrained()
    }
}

/// Halvings of the Newton step tried before accepting a non-improving step.
const MAX_STEP_HALVINGS: usize = 6;

impl ManifoldConstraint {
    pub fn unconstrained() -> Self {
        Self {
            kind: ConstraintKind::Unconstrained,
            tolerance: default_tolerance(),
            max_newton_iters: default_max_newton_iters(),
        }
    }

    pub fn end_effector_line(line_y: f64, fix_heading: Option<f64>) -> Self {
        Self {
            kind: ConstraintKind::EndEffectorLine { line_y, fix_heading },
            ..Self::unconstrained()
        }
    }

    /// Dimension `k` of the constraint codomain.
    pub fn codim(&self) -> usize {
        match self.kind {
            ConstraintKind::Unconstrained => 0,
            ConstraintKind::EndEffectorLine { fix_heading, .. } => 1 + usize::from(fix_heading.is_some()),
        }
    }

    pub fn is_unconstrained(&self) -> bool {
        self.codim() == 0
    }

    pub fn check(&self) -> Result<(), String> {
        if !(self.tolerance > 0.0) {
            return Err("tolerance must be positive".into());
        }
        if self.max_newton_iters == 0 {
            return Err("max_newton_iters must be at least 1".into());
        }
        Ok(())
    }

    /// Residual vector `f(q)`; empty when unconstrained.
    pub fn evaluate(&self, model: &RobotModel, q: &Configuration) -> Vec<f64> {
        match self.kind {
            ConstraintKind::Unconstrained => Vec::new(),
            ConstraintKind::EndEffectorLine { line_y, fix_heading } => {
                let ee = model.end_effector(q);
                let mut r = vec![ee.position.y - line_y];
                if let Some(h) = fix_heading {
                    r.push(wrap_angle(ee.heading - h));
                }
                r
            }
        }
    }

    /// Max-norm of the residual.
    pub fn violation(&self, model: &RobotModel, q: &Configuration) -> f64 {
        self.evaluate(model, q).iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    pub fn is_satisfied(&self, model: &RobotModel, q: &Configuration) -> bool {
        self.violation(model, q) <= self.tolerance
    }

    /// Analytic `k x n` Jacobian of [`evaluate`](Self::evaluate).
    pub fn jacobian(&self, model: &RobotModel, q: &Configuration) -> DMatrix<f64> {
        let n = model.dof();
        let mut jac = DMatrix::zeros(self.codim(), n);
        let ConstraintKind::EndEffectorLine { fix_heading, .. } = self.kind else {
            return jac;
        };
        match model {
            RobotModel::Disc { .. } => {
                jac[(0, 1)] = 1.0;
                // a disc has no heading; its heading row stays zero
            }
            RobotModel::PlanarArm {
                link_lengths,
                ee_stick_length,
                ..
            } => {
                // d(ee_y)/dq_i = sum over links j >= i of l_j cos(phi_j), phi_j cumulative
                let mut phi = 0.0;
                let mut terms = Vec::with_capacity(n);
                for (len, dq) in link_lengths.iter().zip(q.values()) {
                    phi += dq;
                    terms.push(len * phi.cos());
                }
                let mut acc = ee_stick_length * phi.cos();
                for i in (0..n).rev() {
                    acc += terms[i];
                    jac[(0, i)] = acc;
                }
                if fix_heading.is_some() {
                    for i in 0..n {
                        jac[(1, i)] = 1.0;
                    }
                }
            }
        }
        jac
    }

    /// Damped Newton projection onto the manifold using the Jacobian
    /// pseudo-inverse. Returns the input unchanged if it already satisfies the
    /// tolerance.
    pub fn project(&self, model: &RobotModel, q: &Configuration) -> Result<Configuration, ConstraintError> {
        let mut q = q.clone();
        model.normalize(&mut q);
        if self.is_unconstrained() {
            return Ok(q);
        }
        let mut r = DVector::from_vec(self.evaluate(model, &q));
        if r.amax() <= self.tolerance {
            return Ok(q);
        }
        for _ in 0..self.max_newton_iters {
            let jac = self.jacobian(model, &q);
            let jjt = &jac * jac.transpose();
            let Some(y) = jjt.lu().solve(&r) else {
                return Err(ConstraintError::NonConvergence { residual: r.amax() });
            };
            let step = jac.transpose() * y;
            if !step.iter().all(|v| v.is_finite()) {
                return Err(ConstraintError::NonConvergence { residual: r.amax() });
            }

            let r_norm = r.norm();
            let mut alpha = 1.0;
            let mut next = self.apply_step(model, &q, &step, alpha);
            let mut r_next = DVector::from_vec(self.evaluate(model, &next));
            for _ in 0..MAX_STEP_HALVINGS {
                if r_next.norm() < r_norm {
                    break;
                }
                alpha *= 0.5;
                next = self.apply_step(model, &q, &step, alpha);
                r_next = DVector::from_vec(self.evaluate(model, &next));
            }
            q = next;
            r = r_next;
            if r.amax() <= self.tolerance {
                return Ok(q);
            }
        }
        Err(ConstraintError::NonConvergence { residual: r.amax() })
    }

    fn apply_step(&self, model: &RobotModel, q: &Configuration, step: &DVector<f64>, alpha: f64) -> Configuration {
        let mut next = Configuration::new(q.values().iter().zip(step.iter()).map(|(v, s)| v - alpha * s).collect());
        model.normalize(&mut next);
        next
    }

    /// Walks from `a` to `b` by repeated interpolate-then-project. Consecutive
    /// outputs are at most `step` apart and every output satisfies the
    /// constraint. A projection that jumps more than `2 * step` marks the
    /// edge as invalid.
    pub fn interpolate(
        &self,
        model: &RobotModel,
        a: &Configuration,
        b: &Configuration,
        step: f64,
    ) -> Result<Vec<Configuration>, ConstraintError> {
        let total = model.distance(a, b);
        if total == 0.0 {
            return Ok(vec![a.clone()]);
        }
        if self.is_unconstrained() {
            let n = (total / step).ceil().max(1.0) as usize;
            let mut out = Vec::with_capacity(n + 1);
            out.push(a.clone());
            for i in 1..n {
                out.push(model.interpolate(a, b, i as f64 / n as f64));
            }
            out.push(b.clone());
            return Ok(out);
        }

        let limit = 2.0 * step;
        let max_iters = 4 * (total / step).ceil() as usize + 20;
        let mut out = vec![a.clone()];
        let mut cur = a.clone();
        for _ in 0..max_iters {
            let remaining = model.distance(&cur, b);
            if remaining <= step {
                out.push(b.clone());
                return Ok(out);
            }
            let mut stride = step;
            let mut accepted = None;
            let mut jump = 0.0;
            for _ in 0..5 {
                let guess = model.interpolate(&cur, b, stride / remaining);
                let cand = self.project(model, &guess)?;
                jump = model.distance(&cur, &cand);
                if jump > limit {
                    return Err(ConstraintError::Discontinuity { jump, limit });
                }
                if jump <= step {
                    accepted = Some(cand);
                    break;
                }
                stride *= 0.5;
            }
            let Some(cand) = accepted else {
                return Err(ConstraintError::Discontinuity { jump, limit });
            };
            if model.distance(&cand, b) >= remaining {
                // projection undid the progress: no monotone walk on this branch
                return Err(ConstraintError::Discontinuity { jump, limit });
            }
            out.push(cand.clone());
            cur = cand;
        }
        Err(ConstraintError::Discontinuity {
            jump: model.distance(&cur, b),
            limit,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Vec2;
    use std::f64::consts::PI;

    fn arm2() -> RobotModel {
        RobotModel::planar_arm(Vec2::new(0.0, 0.0), vec![1.0, 1.0], 0.05, 0.0)
    }

    #[test]
    fn unconstrained_residual_is_empty() {
        let c = ManifoldConstraint::unconstrained();
        assert!(c.evaluate(&arm2(), &[0.3, 0.2].into()).is_empty());
        assert_eq!(c.jacobian(&arm2(), &[0.3, 0.2].into()).shape(), (0, 2));
    }

    #[test]
    fn residual_on_and_off_line() {
        let c = ManifoldConstraint::end_effector_line(0.0, None);
        assert_eq!(c.evaluate(&arm2(), &[0.0, 0.0].into()), vec![0.0]);
        let r = c.evaluate(&arm2(), &[PI / 6.0, 0.0].into());
        // both links at 30 degrees: 2 sin(pi/6)
        assert!((r[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heading_residual_is_wrapped() {
        let c = ManifoldConstraint::end_effector_line(0.0, Some(PI - 0.1));
        let r = c.evaluate(&arm2(), &[-PI + 0.1, 0.0].into());
        assert!((r[1] - 0.2).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn one_link_derivative() {
        let m = RobotModel::planar_arm(Vec2::new(0.0, 0.0), vec![1.0], 0.05, 0.0);
        let c = ManifoldConstraint::end_effector_line(0.0, None);
        assert!((c.jacobian(&m, &[0.0].into())[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn on_manifold_is_fixed_point() {
        let c = ManifoldConstraint::end_effector_line(0.0, None);
        let q: Configuration = [0.0, 0.0].into();
        assert_eq!(c.project(&arm2(), &q).unwrap(), q);
    }

    #[test]
    fn projects_bent_arm_onto_line() {
        let c = ManifoldConstraint::end_effector_line(0.0, None);
        let p = c.project(&arm2(), &[0.3, -0.1].into()).unwrap();
        assert!(arm2().end_effector(&p).position.y.abs() <= 1e-6);
    }

    #[test]
    fn unreachable_line_fails() {
        let c = ManifoldConstraint::end_effector_line(2.5, None);
        let err = c.project(&arm2(), &[PI / 2.0, 0.0].into()).unwrap_err();
        assert!(matches!(err, ConstraintError::NonConvergence { .. }));
        let err = c.project(&arm2(), &[0.4, 0.3].into()).unwrap_err();
        assert!(matches!(err, ConstraintError::NonConvergence { .. }));
    }

    #[test]
    fn unconstrained_interpolation_is_linear() {
        let m = RobotModel::disc(0.1);
        let c = ManifoldConstraint::unconstrained();
        let pts = c.interpolate(&m, &[0.0, 0.0].into(), &[1.0, 0.0].into(), 0.25).unwrap();
        assert_eq!(pts.len(), 5);
        for (i, p) in pts.iter().enumerate() {
            assert!((p.values()[0] - 0.25 * i as f64).abs() < 1e-12);
        }
        let same = c.interpolate(&m, &[0.5, 0.5].into(), &[0.5, 0.5].into(), 0.1).unwrap();
        assert_eq!(same.len(), 1);
    }

    #[test]
    fn constrained_interpolation_stays_on_manifold() {
        let m = RobotModel::planar_arm(Vec2::new(0.0, 0.0), vec![1.0, 1.0, 1.0], 0.05, 0.0);
        let c = ManifoldConstraint::end_effector_line(1.0, None);
        let a = c.project(&m, &[0.9, -0.6, -0.2].into()).unwrap();
        let b = c.project(&m, &[0.6, -0.4, -0.3].into()).unwrap();
        let step = 0.05;
        let pts = c.interpolate(&m, &a, &b, step).unwrap();
        assert!(pts.len() > 2);
        assert_eq!(pts.first(), Some(&a));
        assert_eq!(pts.last(), Some(&b));
        for w in pts.windows(2) {
            assert!(m.distance(&w[0], &w[1]) <= step + 1e-12);
        }
        for p in &pts {
            assert!(c.violation(&m, p) <= 1e-6);
        }
    }
}
