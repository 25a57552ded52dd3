//! Experiment specifications: a flat `key = value` file, overridable from
//! the command line.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

/// Which algorithm a result row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    /// Adaptive, expected per-batch guarantee.
    Expected,
    /// Adaptive, whole-run worst-case guarantee via calibrated errors.
    WorstCase,
    /// Adaptive, conventional worst-case selector per batch.
    Naive,
    /// Adaptive, fixed RR pool per batch (heuristic).
    Fixed,
    /// One non-adaptive batch of all k seeds.
    NonAdaptive,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Expected => "expected",
            Algorithm::WorstCase => "worst_case",
            Algorithm::Naive => "naive",
            Algorithm::Fixed => "fixed",
            Algorithm::NonAdaptive => "nonadaptive",
        }
    }

    pub fn all() -> [Algorithm; 5] {
        [
            Algorithm::Expected,
            Algorithm::WorstCase,
            Algorithm::Naive,
            Algorithm::Fixed,
            Algorithm::NonAdaptive,
        ]
    }
}

impl FromStr for Algorithm {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "expected" => Ok(Algorithm::Expected),
            "worst_case" => Ok(Algorithm::WorstCase),
            "naive" => Ok(Algorithm::Naive),
            "fixed" => Ok(Algorithm::Fixed),
            "nonadaptive" => Ok(Algorithm::NonAdaptive),
            other => bail!("unknown algorithm {other:?} (expected one of: expected, worst_case, naive, fixed, nonadaptive)"),
        }
    }
}

/// Sweep shape: fix `k` and vary the batch size, or fix the batch count and
/// vary `k`. A single point is a b-sweep with one entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sweep {
    B { k: usize, bs: Vec<usize> },
    K { r: usize, ks: Vec<usize> },
}

impl Sweep {
    /// All `(k, r, b)` points of the sweep.
    pub fn points(&self) -> Vec<(usize, usize, usize)> {
        match self {
            Sweep::B { k, bs } => bs.iter().map(|&b| (*k, k / b, b)).collect(),
            Sweep::K { r, ks } => ks.iter().map(|&k| (k, *r, k / r)).collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub dataset: PathBuf,
    pub directed: bool,
    /// `true`: assign weighted-cascade probabilities (1/in-degree);
    /// `false`: use the probabilities from the file.
    pub weighted_cascade: bool,
    pub sweep: Sweep,
    pub algorithms: Vec<Algorithm>,
    pub realizations: usize,
    pub eps: f64,
    /// Failure budget for worst-case mode; defaults to `1/n` at run time.
    pub delta: Option<f64>,
    pub pool_size: usize,
    pub master_seed: u64,
    pub out: PathBuf,
    pub trace_out: Option<PathBuf>,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.realizations == 0 {
            bail!("realizations must be at least 1");
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            bail!("eps {} outside (0, 1)", self.eps);
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 1.0) {
                bail!("delta {d} outside (0, 1)");
            }
        }
        if self.pool_size == 0 {
            bail!("pool_size must be at least 1");
        }
        if self.algorithms.is_empty() {
            bail!("algorithm list is empty");
        }
        let points = self.sweep.points();
        if points.is_empty() {
            bail!("parameter list is empty");
        }
        for &(k, r, b) in &points {
            if k == 0 || b == 0 || r == 0 || r * b != k {
                bail!("invalid parameter point: b = {b} must divide k = {k}");
            }
        }
        Ok(())
    }
}

/// Defaults from the experimental protocol: 20 realizations, eps = 0.5,
/// 10K fixed pool, and the standard sweep lists.
#[derive(Clone, Debug, Default)]
pub struct SpecOverrides {
    pub dataset: Option<PathBuf>,
    pub directed: Option<bool>,
    pub sweep_kind: Option<String>,
    pub k: Option<usize>,
    pub b: Option<usize>,
    pub r: Option<usize>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub mode: Option<String>,
    pub realizations: Option<usize>,
    pub pool_size: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub trace_out: Option<PathBuf>,
}

pub const DEFAULT_B_LIST: [usize; 6] = [1, 2, 4, 5, 10, 500];
pub const DEFAULT_K_LIST: [usize; 6] = [50, 100, 200, 300, 400, 500];

/// Builds the spec from an optional file plus command-line overrides.
pub fn build_spec(file: Option<&Path>, over: &SpecOverrides) -> Result<ExperimentSpec> {
    let mut kv = BTreeMap::new();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read spec file {}", path.display()))?;
        kv = parse_kv(&text)?;
    }

    let get = |key: &str| kv.get(key).map(String::as_str);
    let parse_num = |key: &str| -> Result<Option<usize>> {
        get(key)
            .map(|v| {
                v.parse::<usize>()
                    .with_context(|| format!("bad {key} = {v}"))
            })
            .transpose()
    };
    let parse_list = |key: &str| -> Result<Option<Vec<usize>>> {
        get(key)
            .map(|v| {
                v.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<usize>()
                            .with_context(|| format!("bad {key} entry {t:?}"))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .transpose()
    };

    let dataset = over
        .dataset
        .clone()
        .or_else(|| get("dataset").map(PathBuf::from))
        .ok_or_else(|| anyhow!("no dataset given (key `dataset` or --dataset)"))?;
    let directed = match (over.directed, get("directed")) {
        (Some(d), _) => d,
        (None, Some(v)) => v.parse().with_context(|| format!("bad directed = {v}"))?,
        (None, None) => true,
    };
    let weighted_cascade = match get("probabilities") {
        None | Some("wc") => true,
        Some("file") => false,
        Some(other) => bail!("probabilities must be `wc` or `file`, got {other:?}"),
    };

    let file_k = parse_num("k")?;
    let file_r = parse_num("r")?;
    let k = over.k.or(file_k);
    let r = over.r.or(file_r);
    let b = over.b.or(parse_num("b")?);
    let sweep_kind = over
        .sweep_kind
        .clone()
        .or_else(|| get("sweep").map(str::to_owned));
    let sweep = match sweep_kind.as_deref() {
        Some("b") => Sweep::B {
            k: k.unwrap_or(500),
            bs: match b {
                Some(b) => vec![b],
                None => parse_list("b_list")?.unwrap_or_else(|| DEFAULT_B_LIST.to_vec()),
            },
        },
        Some("k") => {
            let r = r.ok_or_else(|| anyhow!("sweep = k needs r"))?;
            Sweep::K {
                r,
                ks: parse_list("k_list")?.unwrap_or_else(|| DEFAULT_K_LIST.to_vec()),
            }
        }
        Some("point") | None => {
            let k = k.ok_or_else(|| anyhow!("need k (key `k` or --k)"))?;
            let b = match (b, r) {
                (Some(b), _) => b,
                (None, Some(r)) if r > 0 && k % r == 0 => k / r,
                (None, Some(r)) => bail!("r = {r} does not divide k = {k}"),
                (None, None) => bail!("need b or r to fix the batch size"),
            };
            Sweep::B { k, bs: vec![b] }
        }
        Some(other) => bail!("sweep must be `b`, `k` or `point`, got {other:?}"),
    };

    let algorithms: Vec<Algorithm> = match (&over.mode, get("algorithms")) {
        (Some(m), _) => vec![m.parse()?],
        (None, Some(list)) => list
            .split(',')
            .map(|t| t.trim().parse())
            .collect::<Result<Vec<_>>>()?,
        (None, None) => vec![Algorithm::Expected],
    };

    let spec = ExperimentSpec {
        dataset,
        directed,
        weighted_cascade,
        sweep,
        algorithms,
        realizations: over
            .realizations
            .or(parse_num("realizations")?)
            .unwrap_or(20),
        eps: match (over.eps, get("eps")) {
            (Some(e), _) => e,
            (None, Some(v)) => v.parse().with_context(|| format!("bad eps = {v}"))?,
            (None, None) => 0.5,
        },
        delta: match (over.delta, get("delta")) {
            (Some(d), _) => Some(d),
            (None, Some(v)) => Some(v.parse().with_context(|| format!("bad delta = {v}"))?),
            (None, None) => None,
        },
        pool_size: over.pool_size.or(parse_num("pool_size")?).unwrap_or(10_000),
        master_seed: match (over.seed, get("seed")) {
            (Some(s), _) => s,
            (None, Some(v)) => v.parse().with_context(|| format!("bad seed = {v}"))?,
            (None, None) => 0,
        },
        out: over
            .out
            .clone()
            .or_else(|| get("out").map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("results.csv")),
        trace_out: over
            .trace_out
            .clone()
            .or_else(|| get("trace_out").map(PathBuf::from)),
    };
    spec.validate()?;
    Ok(spec)
}

fn parse_kv(text: &str) -> Result<BTreeMap<String, String>> {
    let mut kv = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("spec line {}: expected key = value, got {line:?}", idx + 1))?;
        kv.insert(key.trim().to_owned(), value.trim().to_owned());
    }
    Ok(kv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_plus_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("exp.spec");
        std::fs::write(
            &path,
            "# smoke\n dataset = net.txt \n sweep=b\n k = 100\n b_list = 1,2,5\n algorithms = expected, fixed\n eps = 0.4\n seed = 7\n",
        )
        .unwrap();
        let spec = build_spec(Some(&path), &SpecOverrides::default()).unwrap();
        assert_eq!(
            spec.sweep.points(),
            vec![(100, 100, 1), (100, 50, 2), (100, 20, 5)]
        );
        assert_eq!(spec.algorithms, vec![Algorithm::Expected, Algorithm::Fixed]);
        assert_eq!(spec.eps, 0.4);
        assert_eq!(spec.master_seed, 7);
        assert_eq!(spec.realizations, 20);
        assert_eq!(spec.pool_size, 10_000);

        let over = SpecOverrides {
            eps: Some(0.3),
            mode: Some("naive".into()),
            b: Some(5),
            ..Default::default()
        };
        let spec = build_spec(Some(&path), &over).unwrap();
        assert_eq!(spec.eps, 0.3);
        assert_eq!(spec.algorithms, vec![Algorithm::Naive]);
        assert_eq!(spec.sweep.points(), vec![(100, 20, 5)]);
    }

    #[test]
    fn point_from_flags_only() {
        let over = SpecOverrides {
            dataset: Some("d.txt".into()),
            k: Some(12),
            r: Some(4),
            ..Default::default()
        };
        let spec = build_spec(None, &over).unwrap();
        assert_eq!(spec.sweep.points(), vec![(12, 4, 3)]);
    }

    #[test]
    fn default_sweeps_divide() {
        for &b in &DEFAULT_B_LIST {
            assert_eq!(500 % b, 0);
        }
        for &k in &DEFAULT_K_LIST {
            assert_eq!(k % 50, 0);
        }
    }

    #[test]
    fn indivisible_point_rejected() {
        let over = SpecOverrides {
            dataset: Some("d.txt".into()),
            k: Some(10),
            b: Some(3),
            ..Default::default()
        };
        assert!(build_spec(None, &over).is_err());
    }
}
