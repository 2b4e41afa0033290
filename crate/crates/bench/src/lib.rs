//! Shared fixtures for the criterion benchmarks.

use std::time::Duration;

use stac_core::{stac_solve, Scenario, Solution, StacParams};

pub fn scenario(name: &str) -> Scenario {
    Scenario::builtin(name).expect("built-in scenario")
}

/// A solved instance whose paths serve as input for scheduling benchmarks.
pub fn solved(name: &str, seed: u64) -> (Scenario, Solution) {
    let s = scenario(name);
    let params = StacParams {
        seed,
        timeout: Duration::from_secs(120),
        ..Default::default()
    };
    let sol = stac_solve(&s, &params).expect("fixture solves");
    (s, sol)
}
