use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stac_core::{
    Aabb, CollisionRecord, Configuration, FeedbackParams, ManifoldConstraint, Roadmap, RoadmapParams, RobotModel,
    RobotPlanner, Vec2, World,
};

/// Roadmap with a direct start-goal edge and a costlier vertex off to the side.
fn planner() -> (RobotPlanner, usize) {
    let model = RobotModel::disc(0.1);
    let world = World::empty(Aabb::new(Vec2::new(0.0, 0.0), Vec2::new(4.0, 2.0)));
    let params = RoadmapParams::for_model(&model);
    let mut rm = Roadmap::new(world, model, ManifoldConstraint::unconstrained(), params);
    let s = rm.add_vertex_unchecked(Configuration::new(vec![0.5, 1.0]));
    let g = rm.add_vertex_unchecked(Configuration::new(vec![3.5, 1.0]));
    let v = rm.add_vertex_unchecked(Configuration::new(vec![2.0, 1.8]));
    for (a, b) in [(s, g), (s, v), (v, g)] {
        rm.connect(a, b).unwrap();
    }
    (RobotPlanner::new(rm, s, vec![g], FeedbackParams::default()), v)
}

/// Replans with every edge of each returned path marked as colliding until a
/// path visits `v`. Returns the number of replans needed.
fn replans_until_visit(seed: u64, limit: usize) -> Option<usize> {
    let (mut p, v) = planner();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut path = p.plan(&mut rng, 0.0).unwrap();
    assert!(!path.vertex_ids.contains(&v), "the direct edge is cheaper");
    for i in 1..=limit {
        let mut record = CollisionRecord::for_path(&path);
        for e in 0..record.len() {
            record.increment(e);
        }
        p.history.update(&path, &record);
        path = p.plan_with_experience(&mut rng, 0.0).unwrap();
        assert_eq!(path.start(), &Configuration::new(vec![0.5, 1.0]));
        assert_eq!(path.end(), &Configuration::new(vec![3.5, 1.0]));
        if path.vertex_ids.contains(&v) {
            return Some(i);
        }
    }
    None
}

#[test]
fn experience_reaches_an_unpreferred_vertex() {
    let reached = (0..100).filter(|&seed| replans_until_visit(seed, 500).is_some()).count();
    assert!(reached >= 95, "reached the side vertex in {reached}/100 seeds");
}

#[test]
fn fresh_plans_alone_never_leave_the_direct_edge() {
    let (p, v) = planner();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..50 {
        assert!(!p.plan(&mut rng, 0.0).unwrap().vertex_ids.contains(&v));
    }
}
