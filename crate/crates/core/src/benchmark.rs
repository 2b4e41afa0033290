//! Repeated-trial benchmarks with quartile summaries and solve-time CDFs.

use std::io;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::planners::{PlannerKind, PlannerStats, StacParams};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkConfig {
    pub trials: u64,
    pub base_seed: u64,
    pub timeout: Duration,
    /// Template for every trial; `seed` and `timeout` are overwritten.
    pub params: StacParams,
}

/// One trial, as written to the CSV file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub scenario: String,
    pub planner: String,
    pub nra: usize,
    pub seed: u64,
    pub success: bool,
    pub solve_time_s: f64,
    pub queries: u64,
    pub schedule_attempts: u64,
    pub coord_ratio: f64,
}

impl BenchmarkRow {
    pub fn new(scenario: &str, planner: PlannerKind, nra: usize, seed: u64, stats: &PlannerStats) -> Self {
        Self {
            scenario: scenario.to_string(),
            planner: planner.name().to_string(),
            nra,
            seed,
            success: stats.success,
            solve_time_s: stats.solve_time,
            queries: stats.queries,
            schedule_attempts: stats.schedule_attempts,
            coord_ratio: stats.coord_ratio(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quartiles {
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
}

/// Quartiles with linear interpolation between order statistics.
pub fn quartiles(values: &[f64]) -> Quartiles {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Quartiles {
        q1: quantile_sorted(&v, 0.25),
        median: quantile_sorted(&v, 0.5),
        q3: quantile_sorted(&v, 0.75),
    }
}

fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    match v.len() {
        0 => f64::NAN,
        1 => v[0],
        n => {
            let h = (n - 1) as f64 * p;
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(n - 1);
            v[lo] + (h - lo as f64) * (v[hi] - v[lo])
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub scenario: String,
    pub planner: String,
    pub trials: usize,
    pub success_rate: f64,
    /// Failed trials count at the timeout.
    pub solve_time: Quartiles,
    pub queries: Quartiles,
    pub mean_coord_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkReport {
    pub timeout: Duration,
    pub rows: Vec<BenchmarkRow>,
}

impl BenchmarkReport {
    fn groups(&self) -> Vec<(String, String)> {
        let mut keys: Vec<(String, String)> = Vec::new();
        for r in &self.rows {
            let k = (r.scenario.clone(), r.planner.clone());
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        keys
    }

    fn rows_of<'a>(&'a self, scenario: &'a str, planner: &'a str) -> impl Iterator<Item = &'a BenchmarkRow> {
        self.rows
            .iter()
            .filter(move |r| r.scenario == scenario && r.planner == planner)
    }

    pub fn aggregate(&self, scenario: &str, planner: &str) -> Option<Aggregate> {
        let rows: Vec<&BenchmarkRow> = self.rows_of(scenario, planner).collect();
        if rows.is_empty() {
            return None;
        }
        let timeout = self.timeout.as_secs_f64();
        let times: Vec<f64> = rows
            .iter()
            .map(|r| if r.success { r.solve_time_s } else { timeout })
            .collect();
        let queries: Vec<f64> = rows.iter().map(|r| r.queries as f64).collect();
        let n = rows.len() as f64;
        Some(Aggregate {
            scenario: scenario.to_string(),
            planner: planner.to_string(),
            trials: rows.len(),
            success_rate: rows.iter().filter(|r| r.success).count() as f64 / n,
            solve_time: quartiles(&times),
            queries: quartiles(&queries),
            mean_coord_ratio: rows.iter().map(|r| r.coord_ratio).sum::<f64>() / n,
        })
    }

    /// One aggregate per (scenario, planner), in first-seen order.
    pub fn aggregates(&self) -> Vec<Aggregate> {
        self.groups()
            .into_iter()
            .filter_map(|(s, p)| self.aggregate(&s, &p))
            .collect()
    }

    /// Empirical solve-time CDF: starts at `(0, 0)`, steps up by `1/n` at
    /// each successful solve time and ends at `(timeout, successes / n)`.
    pub fn cdf(&self, scenario: &str, planner: &str) -> Vec<(f64, f64)> {
        let rows: Vec<&BenchmarkRow> = self.rows_of(scenario, planner).collect();
        let n = rows.len().max(1) as f64;
        let mut times: Vec<f64> = rows.iter().filter(|r| r.success).map(|r| r.solve_time_s).collect();
        times.sort_by(f64::total_cmp);
        let mut out = vec![(0.0, 0.0)];
        for (k, t) in times.iter().enumerate() {
            out.push((*t, (k + 1) as f64 / n));
        }
        out.push((self.timeout.as_secs_f64(), times.len() as f64 / n));
        out
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_cdf_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["scenario", "planner", "time_s", "probability"])?;
        for (s, p) in self.groups() {
            for (t, prob) in self.cdf(&s, &p) {
                out.write_record([s.clone(), p.clone(), t.to_string(), prob.to_string()])?;
            }
        }
        out.flush()?;
        Ok(())
    }

    pub fn read_csv<R: io::Read>(r: R, timeout: Duration) -> csv::Result<Self> {
        let rows = csv::Reader::from_reader(r)
            .deserialize()
            .collect::<csv::Result<Vec<BenchmarkRow>>>()?;
        Ok(Self { timeout, rows })
    }
}

/// Runs every planner on every scenario for seeds `base_seed..base_seed +
/// trials`. `on_row` sees each row as it completes.
pub fn run_benchmark(
    scenarios: &[Scenario],
    planners: &[PlannerKind],
    config: &BenchmarkConfig,
    mut on_row: impl FnMut(&BenchmarkRow),
) -> BenchmarkReport {
    let mut rows = Vec::new();
    for scenario in scenarios {
        for &planner in planners {
            for seed in config.base_seed..config.base_seed + config.trials {
                let params = StacParams {
                    seed,
                    timeout: config.timeout,
                    ..config.params
                };
                let stats = match planner.solve(scenario, &params) {
                    Ok(s) => s.stats,
                    Err(f) => f.stats,
                };
                let row = BenchmarkRow::new(&scenario.name, planner, params.nra, seed, &stats);
                on_row(&row);
                rows.push(row);
            }
        }
    }
    BenchmarkReport {
        timeout: config.timeout,
        rows,
    }
}
