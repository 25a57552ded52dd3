//! Executes an experiment spec: every algorithm × parameter point ×
//! realization, in parallel, collected into one deterministic CSV.

use std::fs;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use rayon::prelude::*;

use infmax_core::rng::{domain, mix2, SeedStream};
use infmax_core::{
    adapt_greedy, assign_wc_probabilities, load_edge_list, sample_realization, AdaptiveTrace,
    Graph, PolicyConfig, SelectionMode,
};

use crate::spec::{Algorithm, ExperimentSpec};

pub const CSV_HEADER: &str =
    "algorithm,k,r,b,realization_seed,spread,wall_time_ms,peak_rss_kb,total_rr_samples";

/// One summary row of the results CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRow {
    pub algorithm: Algorithm,
    pub k: usize,
    pub r: usize,
    pub b: usize,
    pub realization_seed: u64,
    pub spread: usize,
    pub wall_time_ms: f64,
    pub peak_rss_kb: u64,
    pub total_rr_samples: usize,
}

impl RunRow {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.3},{},{}",
            self.algorithm.as_str(),
            self.k,
            self.r,
            self.b,
            self.realization_seed,
            self.spread,
            self.wall_time_ms,
            self.peak_rss_kb,
            self.total_rr_samples
        )
    }
}

pub fn load_dataset(spec: &ExperimentSpec) -> Result<Graph> {
    let g = load_edge_list(&spec.dataset, spec.directed)
        .with_context(|| format!("cannot load dataset {}", spec.dataset.display()))?;
    Ok(if spec.weighted_cascade {
        assign_wc_probabilities(&g)
    } else {
        g
    })
}

fn policy_for(
    spec: &ExperimentSpec,
    algorithm: Algorithm,
    n: usize,
    k: usize,
    r: usize,
    run_seed: u64,
) -> PolicyConfig {
    let (mode, r) = match algorithm {
        Algorithm::Expected => (SelectionMode::Expected, r),
        Algorithm::WorstCase => (SelectionMode::WorstCase, r),
        Algorithm::Naive => (SelectionMode::Naive, r),
        Algorithm::Fixed => (SelectionMode::Fixed, r),
        // Non-adaptive: the whole budget in one batch.
        Algorithm::NonAdaptive => (SelectionMode::Expected, 1),
    };
    let mut cfg = PolicyConfig::uniform(k, r, spec.eps, mode, run_seed);
    if mode == SelectionMode::WorstCase {
        cfg.delta = Some(spec.delta.unwrap_or(1.0 / n as f64));
    }
    if mode == SelectionMode::Fixed {
        cfg.pool_size = Some(spec.pool_size);
    }
    cfg
}

/// Peak resident set size in kB from the process statistics; 0 when the
/// platform does not expose it. Best effort, monotone within a process.
pub fn peak_rss_kb() -> u64 {
    #[cfg(unix)]
    {
        let mut usage: libc::rusage = unsafe { std::mem::zeroed() };
        if unsafe { libc::getrusage(libc::RUSAGE_SELF, &mut usage) } == 0 && usage.ru_maxrss > 0 {
            // ru_maxrss is kB on Linux, bytes on macOS.
            let raw = usage.ru_maxrss as u64;
            return if cfg!(target_os = "macos") {
                raw / 1024
            } else {
                raw
            };
        }
    }
    if let Ok(status) = fs::read_to_string("/proc/self/status") {
        for line in status.lines() {
            if let Some(rest) = line.strip_prefix("VmHWM:") {
                if let Some(kb) = rest.split_whitespace().next().and_then(|v| v.parse().ok()) {
                    return kb;
                }
            }
        }
    }
    0
}

/// Runs the whole spec and returns the rows sorted by
/// `(algorithm, k, b, realization_seed)`. Traces are returned alongside for
/// optional per-batch output.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<(RunRow, AdaptiveTrace)>> {
    spec.validate().context("invalid experiment spec")?;
    let g = load_dataset(spec)?;
    let n = g.node_count();
    let realization_seeds = SeedStream::new(spec.master_seed, domain::REALIZATION);

    struct Job {
        algorithm: Algorithm,
        k: usize,
        r: usize,
        b: usize,
        realization_seed: u64,
        cfg: PolicyConfig,
    }

    let mut jobs = Vec::new();
    for &algorithm in &spec.algorithms {
        for (k, r, b) in spec.sweep.points() {
            for j in 0..spec.realizations as u64 {
                let realization_seed = realization_seeds.seed_at(j);
                let run_seed = mix2(
                    mix2(
                        mix2(mix2(spec.master_seed, algorithm as u64), k as u64),
                        b as u64,
                    ),
                    j,
                );
                let cfg = policy_for(spec, algorithm, n, k, r, run_seed);
                // Surface configuration errors before any work is spawned.
                cfg.validate().with_context(|| {
                    format!(
                        "algorithm {} at k = {k}, b = {b} is not runnable",
                        algorithm.as_str()
                    )
                })?;
                jobs.push(Job {
                    algorithm,
                    k,
                    r: cfg.r,
                    b,
                    realization_seed,
                    cfg,
                });
            }
        }
    }

    let mut rows: Vec<(RunRow, AdaptiveTrace)> = jobs
        .par_iter()
        .map(|job| {
            let phi = sample_realization(&g, job.realization_seed);
            let started = Instant::now();
            let trace = adapt_greedy(&g, &phi, &job.cfg)?;
            let wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
            Ok((
                RunRow {
                    algorithm: job.algorithm,
                    k: job.k,
                    r: job.r,
                    b: job.b,
                    realization_seed: job.realization_seed,
                    spread: trace.total_activated,
                    wall_time_ms,
                    peak_rss_kb: peak_rss_kb(),
                    total_rr_samples: trace.total_rr_samples(),
                },
                trace,
            ))
        })
        .collect::<infmax_core::Result<_>>()?;

    rows.sort_by(|(a, _), (b, _)| {
        (a.algorithm, a.k, a.b, a.realization_seed).cmp(&(
            b.algorithm,
            b.k,
            b.b,
            b.realization_seed,
        ))
    });
    Ok(rows)
}

pub fn rows_to_csv(rows: &[(RunRow, AdaptiveTrace)]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (row, _) in rows {
        out.push_str(&row.csv());
        out.push('\n');
    }
    out
}

/// Writes the summary CSV (and per-batch traces, when requested), removing
/// a partially written file on error.
pub fn write_outputs(spec: &ExperimentSpec, rows: &[(RunRow, AdaptiveTrace)]) -> Result<()> {
    write_or_clean(&spec.out, &rows_to_csv(rows))?;
    if let Some(trace_path) = &spec.trace_out {
        let mut out = String::from(AdaptiveTrace::csv_header());
        out.push('\n');
        for (row, trace) in rows {
            let run_id = format!(
                "{}-k{}-b{}-s{}",
                row.algorithm.as_str(),
                row.k,
                row.b,
                row.realization_seed
            );
            out.push_str(&trace.csv_rows(&run_id));
        }
        write_or_clean(trace_path, &out)?;
    }
    Ok(())
}

fn write_or_clean(path: &Path, contents: &str) -> Result<()> {
    if let Err(err) = fs::write(path, contents) {
        let _ = fs::remove_file(path);
        return Err(err).with_context(|| format!("cannot write {}", path.display()));
    }
    Ok(())
}

/// Dataset summary: node count, arc count, average degree.
pub fn dataset_stats(path: &Path, directed: bool) -> Result<(usize, usize, f64)> {
    let g = load_edge_list(path, directed)
        .with_context(|| format!("cannot load dataset {}", path.display()))?;
    let n = g.node_count();
    let m = g.edge_count();
    Ok((n, m, m as f64 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::Sweep;
    use std::path::PathBuf;

    fn smoke_spec(dir: &Path) -> ExperimentSpec {
        let dataset = dir.join("tiny.txt");
        std::fs::write(&dataset, "0 1\n1 2\n2 3\n3 0\n1 3\n0 2\n").unwrap();
        ExperimentSpec {
            dataset,
            directed: false,
            weighted_cascade: true,
            sweep: Sweep::B { k: 2, bs: vec![1] },
            algorithms: vec![Algorithm::Expected],
            realizations: 1,
            eps: 0.5,
            delta: None,
            pool_size: 100,
            master_seed: 3,
            out: dir.join("out.csv"),
            trace_out: None,
        }
    }

    #[test]
    fn smoke_run_emits_one_row_plus_header() {
        let dir = tempfile::tempdir().unwrap();
        let spec = smoke_spec(dir.path());
        let rows = run_experiment(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        let csv = rows_to_csv(&rows);
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], CSV_HEADER);

        write_outputs(&spec, &rows).unwrap();
        assert_eq!(std::fs::read_to_string(&spec.out).unwrap(), csv);
    }

    #[test]
    fn invalid_worst_case_point_fails_before_running() {
        let dir = tempfile::tempdir().unwrap();
        let mut spec = smoke_spec(dir.path());
        spec.algorithms = vec![Algorithm::WorstCase];
        spec.delta = Some(0.01);
        // r = 2 batches cannot absorb the calibration shift at eps = 0.5.
        spec.sweep = Sweep::B { k: 2, bs: vec![1] };
        let err = run_experiment(&spec).unwrap_err();
        assert!(format!("{err:#}").contains("not runnable"), "{err:#}");
    }

    #[test]
    fn unloadable_dataset_is_an_error() {
        let spec = ExperimentSpec {
            dataset: PathBuf::from("/nonexistent/net.txt"),
            ..smoke_spec(tempfile::tempdir().unwrap().path())
        };
        assert!(run_experiment(&spec).is_err());
    }
}
