//! Random centroidal trees, CSS against an upper bound on the safety value,
//! and the histogram of normalized differences.
//!
//! Each trial draws a centroidal tree, runs CSS, and bounds the safety value
//! from above. The difference is divided by the weight of the centroid.
//! Below `exact_threshold` vertices the bound is the exact value of the game.
//! Above it, Player 2 is restricted to a small set of starts (the centroid,
//! everything within distance 2 of it, and the CSS support) and the exact
//! value of that restricted game is used: restricting the minimizer can only
//! raise the value, so it is still an upper bound. Replies that beat Player
//! 1's restricted optimum are added back a few at a time; if none remain the
//! restricted value is the exact value and the record says `exact-LP`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::css;
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::game::{self, MixedStrategy};
use crate::ratio::{self, Ratio};
use crate::tree::{CentroidKind, Tree};
use crate::zerosum::{self, DenseMatrix};

pub const REJECTION_CAP: usize = 10_000;
/// Column-generation rounds for the restricted bound before settling for it.
pub const COLUMN_ROUNDS: usize = 25;
const COLUMNS_PER_ROUND: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub exact_threshold: usize,
    pub bin_width: Ratio,
    pub bin_max: Ratio,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 100,
            trials: 200,
            seed: 1,
            exact_threshold: 150,
            bin_width: ratio::frac(1, 100),
            bin_max: ratio::frac(3, 10),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.bin_width <= Ratio::zero() || self.bin_width > self.bin_max {
            return Err(Error::InvalidParameter("need 0 < bin_width <= bin_max".into()));
        }
        Ok(())
    }

    /// Reads `key = value` lines over the defaults. Blank lines and `#`
    /// comments are ignored; keys may use `-` or `_`.
    pub fn parse(text: &str) -> Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: i + 1, message };
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key=value, got {line:?}")))?;
            let value = value.trim();
            let int = |v: &str| v.parse::<u64>().map_err(|_| err(format!("not an integer: {v:?}")));
            match key.trim().replace('-', "_").as_str() {
                "n" => cfg.n = int(value)? as usize,
                "trials" => cfg.trials = int(value)? as usize,
                "seed" => cfg.seed = int(value)?,
                "exact_threshold" => cfg.exact_threshold = int(value)? as usize,
                "bin_width" => cfg.bin_width = ratio::parse(value).map_err(|e| err(e.to_string()))?,
                "bin_max" => cfg.bin_max = ratio::parse(value).map_err(|e| err(e.to_string()))?,
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpperBoundKind {
    ExactLp,
    OpposingStrategy,
}

impl UpperBoundKind {
    pub fn as_str(self) -> &'static str {
        match self {
            UpperBoundKind::ExactLp => "exact-LP",
            UpperBoundKind::OpposingStrategy => "opposing-strategy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UpperBound {
    pub value: Ratio,
    pub kind: UpperBoundKind,
    /// Player 2 strategy whose maximal gain equals `value`.
    pub opposing: MixedStrategy,
    /// Whether the LP certificate checked out.
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub trial: usize,
    pub tree_seed: u64,
    pub n: usize,
    pub centroid_weight: usize,
    pub css_gain: Ratio,
    pub upper_bound: Ratio,
    pub kind: UpperBoundKind,
    pub diff_ratio: Ratio,
}

/// Bins `[0,0]`, `(0,w]`, `(w,2w]`, ... up to `bin_max`, plus an overflow count.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub width: Ratio,
    pub counts: Vec<usize>,
    pub overflow: usize,
}

impl Histogram {
    pub fn new(width: Ratio, max: &Ratio) -> Histogram {
        let bins = (max / &width).ceil().to_integer().to_usize().unwrap_or(0);
        Histogram { width, counts: vec![0; bins + 1], overflow: 0 }
    }

    /// Index of the bin holding `r`, or `None` for overflow.
    pub fn bin_of(&self, r: &Ratio) -> Option<usize> {
        if r.is_zero() {
            return Some(0);
        }
        let idx = (r / &self.width).ceil().to_integer().to_usize()?;
        (idx >= 1 && idx < self.counts.len()).then_some(idx)
    }

    pub fn add(&mut self, r: &Ratio) {
        match self.bin_of(r) {
            Some(i) => self.counts[i] += 1,
            None => self.overflow += 1,
        }
    }

    pub fn bounds(&self, i: usize) -> (Ratio, Ratio) {
        if i == 0 {
            return (Ratio::zero(), Ratio::zero());
        }
        let w = &self.width;
        (w * ratio::int(i as i64 - 1), w * ratio::int(i as i64))
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.overflow
    }

    /// `bin_low,bin_high,count`; the overflow row has an empty upper edge.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let (lo, hi) = self.bounds(i);
            let _ = writeln!(out, "{},{},{}", ratio::decimal(&lo, 2), ratio::decimal(&hi, 2), c);
        }
        let (_, top) = self.bounds(self.counts.len() - 1);
        let _ = writeln!(out, "{},,{}", ratio::decimal(&top, 2), self.overflow);
        out
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub records: Vec<TrialRecord>,
    pub failures: Vec<(usize, String)>,
    pub histogram: Histogram,
    pub mean: Option<Ratio>,
    pub median: Option<Ratio>,
}

impl ExperimentReport {
    pub fn records_csv(&self) -> String {
        records_csv(&self.records)
    }

    /// Fraction of successful trials with a ratio strictly below `limit`.
    pub fn share_below(&self, limit: &Ratio) -> Ratio {
        if self.records.is_empty() {
            return Ratio::zero();
        }
        let below = self.records.iter().filter(|r| &r.diff_ratio < limit).count();
        ratio::frac(below as i64, self.records.len() as i64)
    }
}

/// SplitMix64 finalizer, used to derive independent seeds.
pub fn mix_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws uniform vertex pairs and keeps each one that joins two components,
/// until the tree is spanning. This is not the uniform distribution on
/// labeled trees.
pub fn random_tree(n: usize, seed: u64) -> Tree {
    assert!(n >= 1, "random_tree needs at least one vertex");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sets = DisjointSets::new(n);
    let mut edges = Vec::with_capacity(n - 1);
    while edges.len() + 1 < n {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && sets.union(u, v) {
            edges.push((u, v));
        }
    }
    Tree::from_edges(n, &edges).expect("spanning forest of n-1 edges is a tree")
}

/// Rejection-samples [`random_tree`] until the centroid is a single vertex.
/// Returns the tree and the seed that produced it.
pub fn sample_centroidal(n: usize, seed: u64) -> Result<(Tree, u64)> {
    for attempt in 0..REJECTION_CAP {
        let s = mix_seed(seed, attempt as u64);
        let t = random_tree(n, s);
        if t.centroid().kind == CentroidKind::Centroidal {
            return Ok((t, s));
        }
    }
    Err(Error::RejectionCap { attempts: REJECTION_CAP })
}

/// Player 2 starts used for the restricted bound: the centroid, every vertex
/// within distance 2 of it, and the support of `x`.
pub fn restricted_replies(t: &Tree, centroid: usize, x: &MixedStrategy) -> Vec<usize> {
    let d = t.distances_from(centroid);
    let mut cols: BTreeSet<usize> = (0..t.n()).filter(|&v| d[v] <= 2).collect();
    cols.extend(x.support());
    cols.into_iter().collect()
}

/// Upper bound on the safety value. `css_strategy` seeds the restricted
/// column set and is ignored when `t.n() <= exact_threshold`.
pub fn upper_bound(t: &Tree, css_strategy: &MixedStrategy, exact_threshold: usize) -> Result<UpperBound> {
    if t.n() <= exact_threshold {
        let a = game::game_matrix(t);
        let sol = zerosum::solve_value(&a)?;
        let certified = zerosum::verify_solution(&a, &sol);
        return Ok(UpperBound { value: sol.value, kind: UpperBoundKind::ExactLp, opposing: sol.minmax, certified });
    }
    let root = t.centroid().root;
    let mut cols = restricted_replies(t, root, css_strategy);
    let mut last = None;
    for _ in 0..COLUMN_ROUNDS {
        let columns: Vec<Vec<u32>> =
            cols.par_iter().map(|&y| game::gains_against(t, y).into_iter().map(|g| g as u32).collect()).collect();
        let a = DenseMatrix::from_columns(t.n(), &columns)?;
        let sol = zerosum::solve_value(&a)?;
        let certified = zerosum::verify_solution(&a, &sol);
        let entries: Vec<(usize, Ratio)> = sol.minmax.sparse().into_iter().map(|(j, p)| (cols[j], p)).collect();
        let opposing = MixedStrategy::from_sparse(t.n(), &entries)?;
        // Player 1's restricted optimum, checked against every reply.
        let replies = game::reply_values(t, &sol.maxmin)?;
        let mut better: Vec<usize> = (0..t.n()).filter(|&y| replies[y] < sol.value).collect();
        if better.is_empty() {
            return Ok(UpperBound { value: sol.value, kind: UpperBoundKind::ExactLp, opposing, certified });
        }
        better.sort_by(|&a, &b| replies[a].cmp(&replies[b]).then(a.cmp(&b)));
        cols.extend(better.into_iter().take(COLUMNS_PER_ROUND));
        cols.sort_unstable();
        last = Some(UpperBound { value: sol.value, kind: UpperBoundKind::OpposingStrategy, opposing, certified });
    }
    last.ok_or_else(|| Error::Internal("no column rounds".into()))
}

/// Runs one trial on a given tree.
pub fn evaluate_tree(t: &Tree, trial: usize, tree_seed: u64, exact_threshold: usize) -> Result<TrialRecord> {
    let centroid = t.centroid();
    if centroid.kind != CentroidKind::Centroidal {
        return Err(Error::NotCentroidal(centroid.vertices));
    }
    let w = t.weight_table().weight[centroid.root];
    let res = css::css_run(t)?;
    let ub = upper_bound(t, &res.strategy, exact_threshold)?;
    if !ub.certified {
        return Err(Error::Solver("upper bound failed certification".into()));
    }
    let diff = &ub.value - &res.guaranteed_gain;
    if diff < Ratio::zero() {
        return Err(Error::Internal(format!(
            "CSS gain {} exceeds upper bound {}",
            ratio::render(&res.guaranteed_gain),
            ratio::render(&ub.value)
        )));
    }
    // w(c) is 0 only for the single-vertex tree, where both sides are 0.
    let diff_ratio = if w == 0 { Ratio::zero() } else { diff / ratio::int(w as i64) };
    Ok(TrialRecord {
        trial,
        tree_seed,
        n: t.n(),
        centroid_weight: w,
        css_gain: res.guaranteed_gain,
        upper_bound: ub.value,
        kind: ub.kind,
        diff_ratio,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let outcomes: Vec<Result<TrialRecord>> = (0..cfg.trials)
        .into_par_iter()
        .map(|i| {
            let (t, s) = sample_centroidal(cfg.n, mix_seed(cfg.seed, i as u64))?;
            evaluate_tree(&t, i, s, cfg.exact_threshold)
        })
        .collect();
    Ok(summarize(cfg, outcomes))
}

/// Same as [`run_experiment`] but on caller-supplied `(seed, tree)` pairs.
pub fn run_on_trees(cfg: &ExperimentConfig, trees: &[(u64, Tree)]) -> Result<ExperimentReport> {
    cfg.validate()?;
    let outcomes: Vec<Result<TrialRecord>> =
        trees.par_iter().enumerate().map(|(i, (s, t))| evaluate_tree(t, i, *s, cfg.exact_threshold)).collect();
    Ok(summarize(cfg, outcomes))
}

fn summarize(cfg: &ExperimentConfig, outcomes: Vec<Result<TrialRecord>>) -> ExperimentReport {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    let mut histogram = Histogram::new(cfg.bin_width.clone(), &cfg.bin_max);
    for (i, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(r) => {
                histogram.add(&r.diff_ratio);
                records.push(r);
            }
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    let mut sorted: Vec<Ratio> = records.iter().map(|r| r.diff_ratio.clone()).collect();
    sorted.sort();
    let mean = (!sorted.is_empty()).then(|| sorted.iter().sum::<Ratio>() / ratio::int(sorted.len() as i64));
    let median = (!sorted.is_empty()).then(|| {
        let k = sorted.len();
        if k.is_odd() {
            sorted[k / 2].clone()
        } else {
            (&sorted[k / 2 - 1] + &sorted[k / 2]) / ratio::int(2)
        }
    });
    ExperimentReport { config: cfg.clone(), records, failures, histogram, mean, median }
}

pub fn records_csv(records: &[TrialRecord]) -> String {
    let mut out = String::from(
        "trial,tree_seed,n,centroid_weight,css_gain,upper_bound,diff_ratio,kind,css_gain_exact,upper_bound_exact,diff_ratio_exact\n",
    );
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.trial,
            r.tree_seed,
            r.n,
            r.centroid_weight,
            ratio::decimal(&r.css_gain, 12),
            ratio::decimal(&r.upper_bound, 12),
            ratio::decimal(&r.diff_ratio, 12),
            r.kind.as_str(),
            ratio::render(&r.css_gain),
            ratio::render(&r.upper_bound),
            ratio::render(&r.diff_ratio),
        );
    }
    out
}
