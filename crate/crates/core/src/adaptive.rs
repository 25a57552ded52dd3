//! The batched adaptive seeding loop: select a batch on the residual graph,
//! observe its full-adoption feedback on the hidden realization, remove the
//! activated nodes, repeat.

use std::time::Instant;

use crate::diffusion::{observe_feedback, Realization};
use crate::epic::{self, SelectorDiagnostics};
use crate::error::{Error, Result};
use crate::graph::{residual_subgraph, Graph, NodeSet};
use crate::rng::{domain, mix2};

/// Greedy max-coverage guarantee for picking `b` elements:
/// `ρ_b = 1 - (1 - 1/b)^b`. Decreases from 1 towards `1 - 1/e`.
pub fn rho(b: usize) -> f64 {
    assert!(b >= 1, "rho is defined for b >= 1");
    let bf = b as f64;
    1.0 - (bf * (-1.0 / bf).ln_1p()).exp()
}

/// Shifts each per-batch error down by `√(ln(1/δ)/(2r))` so the whole run's
/// mean ratio concentrates above the target with probability `1 - delta`.
/// Valid only when every `ε_i` exceeds the shift, i.e. `r > ln(1/δ)/(2ε_i²)`.
pub fn worst_case_calibrate(eps: &[f64], r: usize, delta: f64) -> Result<Vec<f64>> {
    if r == 0 || eps.len() != r {
        return Err(Error::Config(format!(
            "expected {r} per-batch errors, got {}",
            eps.len()
        )));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Config(format!("delta {delta} outside (0, 1]")));
    }
    let shift = ((1.0 / delta).ln() / (2.0 * r as f64)).sqrt();
    let mut out = Vec::with_capacity(eps.len());
    for &e in eps {
        let shifted = e - shift;
        if shifted <= 0.0 {
            return Err(Error::Config(format!(
                "eps {e} does not cover the calibration shift {shift}: worst-case mode needs \
                 r > ln(1/delta)/(2 eps^2), i.e. more than {:.1} batches at this eps",
                (1.0 / delta).ln() / (2.0 * e * e)
            )));
        }
        out.push(shifted);
    }
    Ok(out)
}

/// How each batch's seed set is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectionMode {
    /// Expected `ρ_b(1-ε)` guarantee per batch.
    Expected,
    /// Expected-mode selector run at calibrated (smaller) per-batch errors,
    /// giving a whole-run guarantee with probability `1 - delta`.
    WorstCase,
    /// Conventional per-batch worst-case selector (inflated upper bound).
    Naive,
    /// Fixed RR pool size, no guarantee.
    Fixed,
}

impl SelectionMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SelectionMode::Expected => "expected",
            SelectionMode::WorstCase => "worst_case",
            SelectionMode::Naive => "naive",
            SelectionMode::Fixed => "fixed",
        }
    }
}

impl std::str::FromStr for SelectionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "expected" => Ok(SelectionMode::Expected),
            "worst_case" => Ok(SelectionMode::WorstCase),
            "naive" => Ok(SelectionMode::Naive),
            "fixed" => Ok(SelectionMode::Fixed),
            other => Err(Error::Config(format!("unknown selection mode {other:?}"))),
        }
    }
}

/// Full configuration of one adaptive run: `k` seeds in `r` batches of `b`.
#[derive(Clone, Debug)]
pub struct PolicyConfig {
    pub k: usize,
    pub r: usize,
    pub b: usize,
    /// Per-batch error targets, one per batch.
    pub eps: Vec<f64>,
    pub mode: SelectionMode,
    /// Whole-run failure budget (worst-case mode only).
    pub delta: Option<f64>,
    /// RR pool size (fixed mode only).
    pub pool_size: Option<usize>,
    pub master_seed: u64,
}

impl PolicyConfig {
    /// Uniform-error configuration: `eps` repeated for every batch.
    pub fn uniform(k: usize, r: usize, eps: f64, mode: SelectionMode, master_seed: u64) -> Self {
        PolicyConfig {
            k,
            r,
            b: k.checked_div(r).unwrap_or(0),
            eps: vec![eps; r],
            mode,
            delta: None,
            pool_size: None,
            master_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 || self.b == 0 || self.k != self.r * self.b {
            return Err(Error::Config(format!(
                "k = {} must equal r * b = {} * {}",
                self.k, self.r, self.b
            )));
        }
        if self.eps.len() != self.r {
            return Err(Error::Config(format!(
                "need {} per-batch errors, got {}",
                self.r,
                self.eps.len()
            )));
        }
        if self.eps.iter().any(|&e| !(e > 0.0 && e < 1.0)) {
            return Err(Error::Config("every eps must lie in (0, 1)".into()));
        }
        match self.mode {
            SelectionMode::WorstCase => {
                let delta = self
                    .delta
                    .ok_or_else(|| Error::Config("worst_case mode needs delta".into()))?;
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(Error::Config(format!("delta {delta} outside (0, 1)")));
                }
                worst_case_calibrate(&self.eps, self.r, delta)?;
            }
            SelectionMode::Fixed => {
                let pool = self
                    .pool_size
                    .ok_or_else(|| Error::Config("fixed mode needs pool_size".into()))?;
                if pool == 0 {
                    return Err(Error::Config("pool_size must be at least 1".into()));
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// One batch of an adaptive run.
#[derive(Clone, Debug)]
pub struct BatchRecord {
    /// Batch index, 1-based.
    pub batch: usize,
    /// Alive nodes when the batch was selected.
    pub n_alive: usize,
    pub seeds: Vec<u32>,
    /// Nodes newly activated by this batch (seeds included).
    pub activated: Vec<u32>,
    pub diagnostics: Option<SelectorDiagnostics>,
    pub wall_time_ms: f64,
}

/// Per-batch record of a full adaptive run.
#[derive(Clone, Debug)]
pub struct AdaptiveTrace {
    pub batches: Vec<BatchRecord>,
    /// Realized spread: nodes activated across all batches.
    pub total_activated: usize,
}

impl AdaptiveTrace {
    pub fn total_rr_samples(&self) -> usize {
        self.batches
            .iter()
            .filter_map(|b| b.diagnostics.map(|d| d.rr_samples))
            .sum()
    }

    pub fn total_seeds(&self) -> usize {
        self.batches.iter().map(|b| b.seeds.len()).sum()
    }

    pub fn csv_header() -> &'static str {
        "run_id,batch,n_i,r1_final,seeds,activated_count,cumulative_spread,wall_time_ms"
    }

    /// One CSV row per batch; seeds are semicolon-joined ids.
    pub fn csv_rows(&self, run_id: &str) -> String {
        let mut out = String::new();
        let mut cumulative = 0usize;
        for b in &self.batches {
            cumulative += b.activated.len();
            let seeds = b
                .seeds
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(";");
            out.push_str(&format!(
                "{run_id},{},{},{},{seeds},{},{cumulative},{:.3}\n",
                b.batch,
                b.n_alive,
                b.diagnostics.map(|d| d.r1_size).unwrap_or(0),
                b.activated.len(),
                b.wall_time_ms,
            ));
        }
        out
    }
}

/// The adaptive loop with a caller-supplied selector. The selector receives
/// the residual graph, the effective batch size and the 0-based batch index,
/// and returns the batch's seed set.
///
/// When fewer than `b` alive nodes remain, the batch takes all of them; once
/// none remain, batches are empty. Both cases are recorded in the trace.
pub fn adapt_greedy_with<F>(
    g: &Graph,
    phi: &Realization,
    r: usize,
    b: usize,
    mut select: F,
) -> Result<AdaptiveTrace>
where
    F: FnMut(&Graph, usize, usize) -> Result<(NodeSet, Option<SelectorDiagnostics>)>,
{
    let mut residual = g.clone();
    let mut batches = Vec::with_capacity(r);
    let mut total_activated = 0usize;
    for batch_idx in 0..r {
        let started = Instant::now();
        let n_alive = residual.alive_count();
        let (seeds, diagnostics) = if n_alive == 0 {
            (residual.node_set(), None)
        } else if n_alive < b {
            // Exhaustion: everything left becomes a seed.
            (
                NodeSet::from_nodes(residual.node_count(), residual.alive_ids()),
                None,
            )
        } else {
            select(&residual, b, batch_idx)?
        };

        let (activated, next) = if seeds.is_empty() {
            (Vec::new(), residual.clone())
        } else {
            let feedback = observe_feedback(&residual, phi, &seeds)?;
            let next = residual_subgraph(&residual, &feedback.activated)?;
            (feedback.activated.to_vec(), next)
        };
        total_activated += activated.len();
        batches.push(BatchRecord {
            batch: batch_idx + 1,
            n_alive,
            seeds: seeds.to_vec(),
            activated,
            diagnostics,
            wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
        });
        residual = next;
    }
    Ok(AdaptiveTrace {
        batches,
        total_activated,
    })
}

/// Runs the configured policy: per batch, the mode's selector picks `b`
/// seeds on the residual graph, the realization reveals their cascade, and
/// the activated nodes are removed before the next batch.
pub fn adapt_greedy(g: &Graph, phi: &Realization, cfg: &PolicyConfig) -> Result<AdaptiveTrace> {
    cfg.validate()?;
    let eps = match cfg.mode {
        SelectionMode::WorstCase => {
            worst_case_calibrate(&cfg.eps, cfg.r, cfg.delta.expect("validated"))?
        }
        _ => cfg.eps.clone(),
    };
    let batch_seed_base = mix2(cfg.master_seed, domain::BATCH);
    adapt_greedy_with(g, phi, cfg.r, cfg.b, |residual, b, batch_idx| {
        let seed = mix2(batch_seed_base, batch_idx as u64);
        let (seeds, diag) = match cfg.mode {
            SelectionMode::Expected | SelectionMode::WorstCase => {
                epic::select(residual, b, eps[batch_idx], seed)?
            }
            SelectionMode::Naive => {
                let e = eps[batch_idx];
                let delta = 0.01 * e * b as f64 / residual.alive_count() as f64;
                epic::naive_select(residual, b, e, delta, seed)?
            }
            SelectionMode::Fixed => {
                epic::fixed_select(residual, b, cfg.pool_size.expect("validated"), seed)?
            }
        };
        Ok((seeds, Some(diag)))
    })
}
