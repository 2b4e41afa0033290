use std::time::Duration;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use stac_bench::{scenario, solved};
use stac_core::roadmap::RoadmapParams;
use stac_core::scheduler::path_lengths;
use stac_core::{build_roadmap, collision_check, schedule, stac_solve, StacParams};

fn scheduling(c: &mut Criterion) {
    let (s, sol) = solved("doorway2d", 0);
    let models = s.models();
    let lengths = path_lengths(&sol.paths);
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    c.bench_function("schedule doorway2d", |b| b.iter(|| schedule(&lengths, &mut rng)));
    c.bench_function("collision_check doorway2d", |b| {
        b.iter_batched(
            || schedule(&lengths, &mut rng),
            |cand| collision_check(&cand, &sol.paths, &models, sol.resolution),
            BatchSize::SmallInput,
        )
    });

    let (s, sol) = solved("arm_doorway", 1);
    let models = s.models();
    let lengths = path_lengths(&sol.paths);
    c.bench_function("collision_check arm_doorway", |b| {
        b.iter_batched(
            || schedule(&lengths, &mut rng),
            |cand| collision_check(&cand, &sol.paths, &models, sol.resolution),
            BatchSize::SmallInput,
        )
    });
}

fn roadmaps(c: &mut Criterion) {
    let mut group = c.benchmark_group("roadmap");
    group.sample_size(10);
    for name in ["doorway2d", "arm_doorway"] {
        let s = scenario(name);
        let r = &s.robots[0];
        let params = RoadmapParams::for_model(&r.model);
        group.bench_function(name, |b| {
            b.iter(|| {
                let mut rng = ChaCha8Rng::seed_from_u64(7);
                build_roadmap(&s.world, &r.model, &r.constraint, params, &r.start, &r.goals, &mut rng)
            })
        });
    }
    group.finish();
}

fn end_to_end(c: &mut Criterion) {
    let mut group = c.benchmark_group("stac_solve");
    group.sample_size(10).measurement_time(Duration::from_secs(20));
    let s = scenario("doorway2d");
    let mut seed = 0;
    group.bench_function("doorway2d", |b| {
        b.iter(|| {
            seed += 1;
            let params = StacParams {
                seed,
                timeout: Duration::from_secs(60),
                ..Default::default()
            };
            stac_solve(&s, &params).is_ok()
        })
    });
    group.finish();
}

criterion_group!(benches, scheduling, roadmaps, end_to_end);
criterion_main!(benches);
