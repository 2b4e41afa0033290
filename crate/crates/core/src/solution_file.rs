//! Plain-text solution files.
//!
//! ```text
//! stac-solution 1
//! scenario doorway2d
//! robots 2
//! resolution 0.15
//! timesteps 7
//! P <robot> <index> <vertex|-> <q...>
//! S <robot> <edge> <q...> ; <q...> ; ...
//! T <t> <progress...>
//! ```
//!
//! `P` lines list each path's representative configurations, `S` lines the
//! dense samples of each path edge and `T` lines one composite state per
//! timestep. Floats are written in shortest round-trip form, so reading a
//! file back reproduces the solution exactly.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::geometry::{Configuration, RobotModel};
use crate::planners::Solution;
use crate::roadmap::{Path, Segment, Trajectory};
use crate::scheduler::{path_lengths, CandidateSolution};

const MAGIC: &str = "stac-solution 1";

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct SolutionFileError {
    pub line: usize,
    pub message: String,
}

/// A solution as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionRecord {
    pub scenario: String,
    pub resolution: f64,
    pub paths: Vec<Path>,
    pub candidate: CandidateSolution,
}

impl SolutionRecord {
    pub fn from_solution(scenario: &str, solution: &Solution) -> Self {
        Self {
            scenario: scenario.to_string(),
            resolution: solution.resolution,
            paths: solution.paths.clone(),
            candidate: solution.candidate.clone(),
        }
    }
}

fn push_config(out: &mut String, q: &Configuration) {
    for v in q.values() {
        write!(out, " {v:?}").unwrap();
    }
}

pub fn write_solution(record: &SolutionRecord) -> String {
    let mut out = String::new();
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "scenario {}", record.scenario).unwrap();
    writeln!(out, "robots {}", record.paths.len()).unwrap();
    writeln!(out, "resolution {:?}", record.resolution).unwrap();
    writeln!(out, "timesteps {}", record.candidate.num_timesteps()).unwrap();
    for (r, path) in record.paths.iter().enumerate() {
        for (i, q) in path.configs.iter().enumerate() {
            write!(out, "P {r} {i} ").unwrap();
            match path.vertex_ids.get(i) {
                Some(v) => write!(out, "{v}").unwrap(),
                None => out.push('-'),
            }
            push_config(&mut out, q);
            out.push('\n');
        }
        for (e, seg) in path.segments.iter().enumerate() {
            write!(out, "S {r} {e}").unwrap();
            for (k, q) in seg.samples().iter().enumerate() {
                if k > 0 {
                    out.push_str(" ;");
                }
                push_config(&mut out, q);
            }
            out.push('\n');
        }
    }
    for (t, row) in record.candidate.progress().iter().enumerate() {
        write!(out, "T {t}").unwrap();
        for i in row {
            write!(out, " {i}").unwrap();
        }
        out.push('\n');
    }
    out
}

struct Reader<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
}

impl<'a> Reader<'a> {
    fn err(line: usize, message: impl Into<String>) -> SolutionFileError {
        SolutionFileError {
            line: line + 1,
            message: message.into(),
        }
    }

    fn header(&mut self, key: &str) -> Result<(usize, &'a str), SolutionFileError> {
        let (n, line) = self.lines.next().ok_or_else(|| Self::err(0, format!("missing {key}")))?;
        let value = line
            .strip_prefix(key)
            .and_then(|v| v.strip_prefix(' '))
            .ok_or_else(|| Self::err(n, format!("expected {key:?}")))?;
        Ok((n, value))
    }
}

fn parse<T: std::str::FromStr>(line: usize, s: &str, what: &str) -> Result<T, SolutionFileError> {
    s.parse().map_err(|_| Reader::err(line, format!("bad {what} {s:?}")))
}

fn parse_config(line: usize, fields: &[&str]) -> Result<Configuration, SolutionFileError> {
    fields
        .iter()
        .map(|f| parse::<f64>(line, f, "number"))
        .collect::<Result<Vec<_>, _>>()
        .map(Configuration::new)
}

/// Parses a solution file. `models` supplies the robot bodies needed to
/// rebuild edge trajectories.
pub fn read_solution(text: &str, models: &[RobotModel]) -> Result<SolutionRecord, SolutionFileError> {
    let mut rd = Reader {
        lines: text.lines().enumerate().peekable(),
    };
    match rd.lines.next() {
        Some((_, l)) if l.trim_end() == MAGIC => {}
        _ => return Err(Reader::err(0, "not a solution file")),
    }
    let scenario = rd.header("scenario")?.1.to_string();
    let (n, v) = rd.header("robots")?;
    let robots: usize = parse(n, v, "robot count")?;
    if robots != models.len() {
        return Err(Reader::err(n, format!("{robots} robots, scenario has {}", models.len())));
    }
    let (n, v) = rd.header("resolution")?;
    let resolution: f64 = parse(n, v, "resolution")?;
    let (n, v) = rd.header("timesteps")?;
    let timesteps: usize = parse(n, v, "timestep count")?;

    let mut configs: Vec<Vec<Configuration>> = vec![Vec::new(); robots];
    let mut ids: Vec<Vec<Option<usize>>> = vec![Vec::new(); robots];
    let mut samples: Vec<Vec<Vec<Configuration>>> = vec![Vec::new(); robots];
    let mut progress: Vec<Vec<usize>> = Vec::new();

    for (n, line) in rd.lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        match f.first().copied() {
            None => continue,
            Some("P") | Some("S") if f.len() < 3 => return Err(Reader::err(n, "truncated line")),
            Some("P") => {
                let r: usize = parse(n, f[1], "robot")?;
                let i: usize = parse(n, f[2], "index")?;
                if r >= robots || i != configs[r].len() {
                    return Err(Reader::err(n, "path configurations out of order"));
                }
                let id = match f.get(3) {
                    Some(&"-") => None,
                    Some(s) => Some(parse(n, s, "vertex id")?),
                    None => return Err(Reader::err(n, "missing vertex id")),
                };
                ids[r].push(id);
                configs[r].push(parse_config(n, &f[4..])?);
            }
            Some("S") => {
                let r: usize = parse(n, f[1], "robot")?;
                let e: usize = parse(n, f[2], "edge")?;
                if r >= robots || e != samples[r].len() {
                    return Err(Reader::err(n, "path edges out of order"));
                }
                let seg = f[3..]
                    .split(|t| *t == ";")
                    .map(|q| parse_config(n, q))
                    .collect::<Result<Vec<_>, _>>()?;
                samples[r].push(seg);
            }
            Some("T") => {
                let t: usize = parse(n, f.get(1).copied().unwrap_or(""), "timestep")?;
                if t != progress.len() {
                    return Err(Reader::err(n, "timesteps out of order"));
                }
                let row = f[2..]
                    .iter()
                    .map(|s| parse(n, s, "index"))
                    .collect::<Result<Vec<usize>, _>>()?;
                if row.len() != robots {
                    return Err(Reader::err(n, "wrong robot count in timestep"));
                }
                progress.push(row);
            }
            Some(other) => return Err(Reader::err(n, format!("unknown record {other:?}"))),
        }
    }

    let end = text.lines().count();
    let mut paths = Vec::with_capacity(robots);
    for r in 0..robots {
        if configs[r].is_empty() || samples[r].len() + 1 != configs[r].len() {
            return Err(Reader::err(end, format!("robot {r}: path edges do not match configurations")));
        }
        if samples[r].iter().any(Vec::is_empty) {
            return Err(Reader::err(end, format!("robot {r}: empty edge")));
        }
        let vertex_ids: Vec<usize> = if ids[r].iter().all(Option::is_some) {
            ids[r].iter().flatten().copied().collect()
        } else {
            Vec::new()
        };
        let segments = std::mem::take(&mut samples[r])
            .into_iter()
            .map(|s| Segment::new(Arc::new(Trajectory::new(&models[r], s)), false))
            .collect();
        paths.push(Path::from_parts(vertex_ids, std::mem::take(&mut configs[r]), segments));
    }
    if progress.len() != timesteps {
        return Err(Reader::err(end, format!("{} timesteps, header says {timesteps}", progress.len())));
    }
    let candidate = CandidateSolution::from_progress(progress, &path_lengths(&paths))
        .map_err(|m| Reader::err(end, format!("invalid schedule: {m}")))?;
    Ok(SolutionRecord {
        scenario,
        resolution,
        paths,
        candidate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> (SolutionRecord, Vec<RobotModel>) {
        let m = RobotModel::disc(0.25);
        let path = Path::from_waypoints(
            &m,
            vec![
                Configuration::new(vec![0.1, 0.2]),
                Configuration::new(vec![1.0 / 3.0, 0.7]),
                Configuration::new(vec![2.0, 0.7]),
            ],
            0.05,
        );
        let candidate = CandidateSolution::from_moves(1, &[vec![true], vec![true]]);
        (
            SolutionRecord {
                scenario: "line".into(),
                resolution: 0.125,
                paths: vec![path],
                candidate,
            },
            vec![m],
        )
    }

    #[test]
    fn one_timestep_line_per_state() {
        let (rec, _) = record();
        let text = write_solution(&rec);
        assert_eq!(text.lines().filter(|l| l.starts_with("T ")).count(), 3);
    }

    #[test]
    fn round_trip_is_exact() {
        let (rec, models) = record();
        let text = write_solution(&rec);
        let back = read_solution(&text, &models).unwrap();
        assert_eq!(back.candidate, rec.candidate);
        assert_eq!(back.paths[0].configs, rec.paths[0].configs);
        assert_eq!(back.paths[0].segments[1].samples(), rec.paths[0].segments[1].samples());
        assert_eq!(write_solution(&back), text);
    }

    #[test]
    fn rejects_damaged_files() {
        let (rec, models) = record();
        let text = write_solution(&rec);
        assert!(read_solution("hello", &models).is_err());
        let no_t: String = text.lines().filter(|l| !l.starts_with("T 2")).map(|l| format!("{l}\n")).collect();
        assert!(read_solution(&no_t, &models).is_err());
        let bad = text.replace("resolution 0.125", "resolution x");
        assert_eq!(read_solution(&bad, &models).unwrap_err().line, 4);
        assert!(read_solution(&text, &[models[0].clone(), models[0].clone()]).is_err());
    }
}
