//! Centroidal safe strategy (CSS) construction for arbitrary trees.
//!
//! Every branch at the centroid is summarized by its three lowest-weight
//! vertices `u`, `t`, `s` (`u` adjacent to the centroid, `t` adjacent to `u`)
//! and classified by how fast those weights grow:
//!
//! - thick: only `u` gets probability,
//! - medium: `u` and `t`,
//! - thin: `u`, `t` and `s` (which must then be adjacent to `t`).
//!
//! Probabilities are fixed relative to the centroid's probability `α` by
//! making the opponent indifferent between the centroid and the chosen
//! vertices. Branches are then added greedily in decreasing order of their
//! criterion, which is the average gain the branch's probability mass earns
//! against a centroid reply, for as long as the criterion is at least the
//! current gain against the centroid.
//!
//! All comparisons use exact integers or rationals.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{self, MixedStrategy};
use crate::ratio::{self, Ratio};
use crate::tree::{CentroidKind, Tree, WeightTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BranchClass {
    Thick,
    Medium,
    Thin,
    /// One-vertex branch; probabilities as for a thick branch.
    Small1,
    /// Two-vertex branch; probabilities as for a medium branch.
    Small2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KeyVertex {
    pub vertex: usize,
    pub weight: usize,
    pub co_weight: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BranchInfo {
    /// Smallest vertex id in the branch; used for tie-breaking.
    pub index: usize,
    pub vertices: Vec<usize>,
    pub u: KeyVertex,
    pub t: Option<KeyVertex>,
    pub s: Option<KeyVertex>,
    pub class: BranchClass,
    #[serde(serialize_with = "crate::io::ser_ratio")]
    pub criterion: Ratio,
    /// See [`average_gain`]; equals `criterion` unless the branch is small.
    #[serde(serialize_with = "crate::io::ser_ratio")]
    pub average_gain: Ratio,
}

/// Branch probabilities divided by the centroid probability `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchRatios {
    pub beta: Ratio,
    pub gamma: Ratio,
    pub delta: Ratio,
}

impl BranchRatios {
    pub fn total(&self) -> Ratio {
        &self.beta + &self.gamma + &self.delta
    }
}

/// Classifies a branch with at least three vertices from its three lowest
/// weights, using cleared-denominator integer comparisons.
pub fn classify(n: usize, w1: usize, w2: usize, w3: usize) -> BranchClass {
    let (n, w1, w2, w3) = (n as i128, w1 as i128, w2 as i128, w3 as i128);
    // w2 ≥ n − w1 + w1²/n
    if n * w2 >= n * (n - w1) + w1 * w1 {
        return BranchClass::Thick;
    }
    // w3 ≥ n − w2 + (w2² + (w2−w1)²)/(n + w2 − w1)
    let gap = w2 - w1;
    if (w3 - n + w2) * (n + gap) >= w2 * w2 + gap * gap {
        BranchClass::Medium
    } else {
        BranchClass::Thin
    }
}

fn key(weights: &WeightTable, v: usize) -> KeyVertex {
    KeyVertex { vertex: v, weight: weights.weight[v], co_weight: weights.co_weight[v] }
}

/// Branches at `root`, ordered by their smallest vertex id, each classified
/// and scored. Fails if a branch's key vertices are not arranged as a path
/// hanging off the root.
pub fn analyze_branches(t: &Tree, root: usize) -> Result<Vec<BranchInfo>> {
    t.check_vertex(root)?;
    let n = t.n();
    let weights = t.weight_table();
    let dist = t.distances_from(root);
    let mut branches = t.branches_at(root);
    branches.sort_by_key(|b| b.vertices[0]);
    branches
        .into_iter()
        .map(|b| {
            let index = b.vertices[0];
            let mut ranked = b.vertices.clone();
            ranked.sort_by_key(|&v| (weights.weight[v], dist[v], v));
            let u = key(&weights, ranked[0]);
            let t_key = ranked.get(1).map(|&v| key(&weights, v));
            let s_key = ranked.get(2).map(|&v| key(&weights, v));
            let fail = |message: String| Error::Branch { branch: index, message };
            if !t.neighbors(root).contains(&u.vertex) {
                return Err(fail(format!("lowest-weight vertex {} is not adjacent to the root", u.vertex)));
            }
            if let Some(tk) = t_key {
                if !t.neighbors(u.vertex).contains(&tk.vertex) {
                    return Err(fail(format!("second vertex {} is not adjacent to {}", tk.vertex, u.vertex)));
                }
            }
            let class = match (t_key, s_key) {
                (None, _) => BranchClass::Small1,
                (Some(_), None) => BranchClass::Small2,
                (Some(tk), Some(sk)) => classify(n, u.weight, tk.weight, sk.weight),
            };
            if class == BranchClass::Thin {
                let (tk, sk) = (t_key.expect("thin"), s_key.expect("thin"));
                if !t.neighbors(tk.vertex).contains(&sk.vertex) {
                    return Err(fail(format!(
                        "thin branch: third vertex {} is not adjacent to {}",
                        sk.vertex, tk.vertex
                    )));
                }
            }
            let mut info = BranchInfo {
                index,
                vertices: b.vertices,
                u,
                t: t_key,
                s: s_key,
                class,
                criterion: Ratio::zero(),
                average_gain: Ratio::zero(),
            };
            info.criterion = criterion(&info, n)?;
            info.average_gain = average_gain(&info, n)?;
            Ok(info)
        })
        .collect()
}

fn q(v: usize) -> Ratio {
    ratio::int(v as i64)
}

/// `(β/α, γ/α, δ/α)` for a classified branch.
pub fn branch_probabilities(b: &BranchInfo, _n: usize) -> Result<BranchRatios> {
    let fail = |message: String| Error::Branch { branch: b.index, message };
    let u = b.u;
    let uw = q(u.weight);
    let ucw = q(u.co_weight);
    if u.co_weight == 0 {
        return Err(fail("vertex u has co-weight 0".into()));
    }
    let beta_thick = &uw / &ucw;
    let ratios = match b.class {
        BranchClass::Thick | BranchClass::Small1 => {
            BranchRatios { beta: beta_thick, gamma: Ratio::zero(), delta: Ratio::zero() }
        }
        BranchClass::Medium | BranchClass::Small2 => {
            let t = b.t.ok_or_else(|| fail("medium branch without a second vertex".into()))?;
            let gamma = q(t.weight) / q(t.co_weight) * &beta_thick;
            BranchRatios { beta: beta_thick, gamma, delta: Ratio::zero() }
        }
        BranchClass::Thin => {
            let (t, s) = match (b.t, b.s) {
                (Some(t), Some(s)) => (t, s),
                _ => return Err(fail("thin branch without three key vertices".into())),
            };
            let (wu, wt, ws) = (big(u.weight), big(t.weight), big(s.weight));
            let (cu, ct, cs) = (big(u.co_weight), big(t.co_weight), big(s.co_weight));
            let num = &ct * (&wu * &cs + (&wt - &ws) * (&wt - &wu));
            let den = &cs * &cu * &ct + &ws * &wt * (&ws - &wt);
            if den.is_zero() || cs.is_zero() || ct.is_zero() {
                return Err(fail("zero denominator in thin-branch probabilities".into()));
            }
            let beta = Ratio::new(num, den);
            let gamma = Ratio::new(wt.clone(), ct) * &beta;
            let delta = Ratio::new(ws, cs.clone()) * &gamma + Ratio::new(&wt - &wu, cs);
            BranchRatios { beta, gamma, delta }
        }
    };
    for (name, v) in [("beta", &ratios.beta), ("gamma", &ratios.gamma), ("delta", &ratios.delta)] {
        if v.is_negative() {
            return Err(fail(format!("{:?} branch has negative {name} ratio {v}", b.class)));
        }
    }
    Ok(ratios)
}

fn big(v: usize) -> BigInt {
    BigInt::from(v)
}

/// Branch criterion; zero for branches with fewer than three vertices.
pub fn criterion(b: &BranchInfo, n: usize) -> Result<Ratio> {
    if b.vertices.len() < 3 {
        return Ok(Ratio::zero());
    }
    average_gain(b, n)
}

/// The class formula of the criterion without the small-branch override.
/// It equals the average gain the branch's probability mass earns against a
/// centroid reply, which bounds the gain after the branch is added.
pub fn average_gain(b: &BranchInfo, n: usize) -> Result<Ratio> {
    let fail = |message: &str| Error::Branch { branch: b.index, message: message.into() };
    let u = b.u;
    Ok(match b.class {
        BranchClass::Thick | BranchClass::Small1 => q(u.co_weight),
        BranchClass::Medium | BranchClass::Small2 => {
            let t = b.t.ok_or_else(|| fail("missing second vertex"))?;
            let nn = q(n);
            q(t.co_weight) / &nn * q(u.co_weight) + q(t.weight) / &nn * q(t.co_weight)
        }
        BranchClass::Thin => {
            let t = b.t.ok_or_else(|| fail("missing second vertex"))?;
            let s = b.s.ok_or_else(|| fail("missing third vertex"))?;
            let n = big(n);
            let (wu, wt, ws) = (big(u.weight), big(t.weight), big(s.weight));
            let (ct, cs) = (big(t.co_weight), big(s.co_weight));
            let num = &wt * &ct * (&n * &n - &n * &ws - &ws * &wt + &wt * &wt + 2 * &ws * &wu - &wt * &wu);
            let den = &n * &wt * &cs + &wu * &wt * (-&n + &ws + &wt) + &ct * &wu * &wu;
            if den.is_zero() {
                return Err(fail("zero denominator in thin-branch criterion"));
            }
            Ratio::new(num, den)
        }
    })
}

/// Gain against a centroid reply contributed per unit `α` by one branch:
/// `β·w̄(u) + γ·w̄(t) + δ·w̄(t)`.
fn centroid_contribution(b: &BranchInfo, r: &BranchRatios) -> Ratio {
    let mut total = &r.beta * q(b.u.co_weight);
    if let Some(t) = b.t {
        total += (&r.gamma + &r.delta) * q(t.co_weight);
    }
    total
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UsedBranch {
    pub branch: BranchInfo,
    #[serde(serialize_with = "crate::io::ser_ratio")]
    pub beta: Ratio,
    #[serde(serialize_with = "crate::io::ser_ratio")]
    pub gamma: Ratio,
    #[serde(serialize_with = "crate::io::ser_ratio")]
    pub delta: Ratio,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CentroidCheck {
    pub passed: bool,
    pub centroid: usize,
    #[serde(serialize_with = "crate::io::ser_ratio")]
    pub centroid_value: Ratio,
    #[serde(serialize_with = "crate::io::ser_ratio")]
    pub minimum: Ratio,
    /// Replies that do strictly better for Player 2 than the centroid.
    pub below: Vec<(usize, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CssResult {
    pub root: usize,
    pub strategy: MixedStrategy,
    pub alpha: Ratio,
    pub branches_used: Vec<UsedBranch>,
    /// Every branch at the root, in the order the loop considers them.
    pub ordered_branches: Vec<BranchInfo>,
    pub guaranteed_gain: Ratio,
    pub centroid_gain: Ratio,
    /// Gain against a centroid reply after each step, starting from `σ_0`.
    pub trace: Vec<Ratio>,
    pub centroid_check: CentroidCheck,
}

impl CssResult {
    /// Criteria in loop order.
    pub fn criteria(&self) -> Vec<Ratio> {
        self.ordered_branches.iter().map(|b| b.criterion.clone()).collect()
    }

    /// Per-step upper bounds on the centroid-reply gain, in loop order: the
    /// criterion, or for small branches the gain their mass earns on average.
    pub fn step_bounds(&self) -> Vec<Ratio> {
        self.ordered_branches.iter().map(|b| b.average_gain.clone()).collect()
    }

    /// Guaranteed gain matches the centroid-reply gain and the centroid is a worst reply.
    pub fn verified(&self) -> bool {
        self.centroid_check.passed && self.guaranteed_gain == self.centroid_gain
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CssOptions {
    /// Reject bicentroidal trees instead of rooting at the smaller centroid vertex.
    pub strict_centroidal: bool,
}

pub fn css_run(t: &Tree) -> Result<CssResult> {
    css_run_with(t, CssOptions::default())
}

pub fn css_run_with(t: &Tree, options: CssOptions) -> Result<CssResult> {
    let n = t.n();
    let centroid = t.centroid();
    if options.strict_centroidal && centroid.kind == CentroidKind::Bicentroidal {
        return Err(Error::NotCentroidal(centroid.vertices));
    }
    let root = centroid.root;
    let mut ordered = analyze_branches(t, root)?;
    // Stable: equal criteria keep ascending branch index.
    ordered.sort_by(|a, b| b.criterion.partial_cmp(&a.criterion).unwrap_or(Ordering::Equal));

    let mut used: Vec<(usize, BranchRatios)> = Vec::new();
    let mut ratio_total = ratio::one();
    let mut contribution = Ratio::zero();
    let mut alpha = ratio::one();
    let mut gain = Ratio::zero();
    let mut trace = vec![gain.clone()];
    // Equality continues: adding a branch never lowers the centroid-reply gain.
    while used.len() < ordered.len() && ordered[used.len()].criterion >= gain {
        let b = &ordered[used.len()];
        let r = branch_probabilities(b, n)?;
        ratio_total += r.total();
        contribution += centroid_contribution(b, &r);
        alpha = ratio_total.recip();
        gain = &alpha * &contribution;
        trace.push(gain.clone());
        used.push((used.len(), r));
    }

    let mut probs = vec![Ratio::zero(); n];
    probs[root] = alpha.clone();
    let mut branches_used = Vec::with_capacity(used.len());
    for (i, r) in &used {
        let b = &ordered[*i];
        let beta = &alpha * &r.beta;
        let gamma = &alpha * &r.gamma;
        let delta = &alpha * &r.delta;
        probs[b.u.vertex] += &beta;
        if let Some(tk) = b.t {
            probs[tk.vertex] += &gamma;
        }
        if let Some(sk) = b.s {
            probs[sk.vertex] += &delta;
        }
        branches_used.push(UsedBranch { branch: b.clone(), beta, gamma, delta });
    }
    let strategy = MixedStrategy::new(probs)?;
    let (guaranteed_gain, _) = game::guaranteed_gain(t, &strategy)?;
    let centroid_check = centroid_check(t, root, &strategy)?;
    Ok(CssResult {
        root,
        strategy,
        alpha,
        branches_used,
        ordered_branches: ordered,
        guaranteed_gain,
        centroid_gain: gain,
        trace,
        centroid_check,
    })
}

fn centroid_check(t: &Tree, root: usize, strategy: &MixedStrategy) -> Result<CentroidCheck> {
    let values = game::reply_values(t, strategy)?;
    let centroid_value = values[root].clone();
    let minimum = values.iter().min().expect("non-empty").clone();
    let below: Vec<(usize, String)> =
        values.iter().enumerate().filter(|(_, v)| **v < centroid_value).map(|(i, v)| (i, ratio::render(v))).collect();
    Ok(CentroidCheck { passed: below.is_empty(), centroid: root, centroid_value, minimum, below })
}

/// Re-evaluates every pure reply against `result.strategy` and checks that
/// the centroid is among the worst replies for Player 1.
pub fn verify_theorem4(t: &Tree, result: &CssResult) -> Result<CentroidCheck> {
    centroid_check(t, result.root, &result.strategy)
}

/// True iff every executed step satisfies
/// `trace[i] ≤ trace[i+1] ≤ criteria[i]`.
pub fn lemma4_check(trace: &[Ratio], criteria: &[Ratio]) -> bool {
    let steps = trace.len().saturating_sub(1);
    if steps > criteria.len() {
        return false;
    }
    (0..steps).all(|i| trace[i] <= trace[i + 1] && trace[i + 1] <= criteria[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::frac;
    use crate::special::{build_mary_tree, build_spider, MaryTreeSpec, SpiderSpec};
    use crate::tree::{path, star};

    #[test]
    fn classification_examples() {
        assert_eq!(classify(15, 8, 12, 14), BranchClass::Thick);
        assert_eq!(classify(16, 11, 12, 13), BranchClass::Medium);
        assert_eq!(classify(25, 17, 18, 19), BranchClass::Thin);
    }

    #[test]
    fn complete_binary_branch() {
        let t = build_mary_tree(MaryTreeSpec::new(2, 3).unwrap());
        let branches = analyze_branches(&t, 0).unwrap();
        assert_eq!(branches.len(), 2);
        let b = &branches[0];
        assert_eq!((b.u.weight, b.t.unwrap().weight), (8, 12));
        assert_eq!(b.class, BranchClass::Thick);
        assert_eq!(b.criterion, ratio::int(7));
        assert_eq!(branch_probabilities(b, 15).unwrap().beta, frac(8, 7));
    }

    #[test]
    fn spider_leg_medium() {
        let t = build_spider(SpiderSpec::new(3, 5).unwrap());
        let b = &analyze_branches(&t, 0).unwrap()[0];
        assert_eq!(b.class, BranchClass::Medium);
        let r = branch_probabilities(b, 16).unwrap();
        assert_eq!((r.beta, r.gamma, r.delta), (frac(11, 5), frac(33, 5), ratio::int(0)));
        assert_eq!(b.criterion, frac(17, 4));
    }

    #[test]
    fn spider_leg_thin() {
        let t = build_spider(SpiderSpec::new(3, 8).unwrap());
        let b = &analyze_branches(&t, 0).unwrap()[0];
        assert_eq!(b.class, BranchClass::Thin);
        let s = b.s.unwrap();
        assert!(t.neighbors(b.t.unwrap().vertex).contains(&s.vertex));
    }

    #[test]
    fn small_branches_have_zero_criterion() {
        let branches = analyze_branches(&star(4), 0).unwrap();
        assert!(branches.iter().all(|b| b.class == BranchClass::Small1 && b.criterion.is_zero()));
        let t = Tree::from_edges(5, &[(0, 1), (1, 2), (0, 3), (3, 4)]).unwrap();
        let branches = analyze_branches(&t, 0).unwrap();
        assert!(branches.iter().all(|b| b.class == BranchClass::Small2 && b.criterion.is_zero()));
    }

    #[test]
    fn css_on_star() {
        let r = css_run(&star(4)).unwrap();
        assert_eq!(r.alpha, frac(1, 5));
        assert_eq!(r.branches_used.len(), 1);
        assert_eq!(r.strategy.sparse(), vec![(0, frac(1, 5)), (1, frac(4, 5))]);
        assert_eq!(r.guaranteed_gain, frac(4, 5));
        assert_eq!(r.trace, vec![ratio::int(0), frac(4, 5)]);
        assert!(r.verified());
    }

    #[test]
    fn css_on_single_edge() {
        let r = css_run(&path(2)).unwrap();
        assert_eq!(r.root, 0);
        assert_eq!(r.strategy.probs(), &[frac(1, 2), frac(1, 2)]);
        assert_eq!(r.guaranteed_gain, frac(1, 2));
        assert!(css_run_with(&path(2), CssOptions { strict_centroidal: true }).is_err());
    }

    #[test]
    fn css_on_single_vertex() {
        let t = Tree::from_edges(1, &[]).unwrap();
        let r = css_run(&t).unwrap();
        assert!(r.strategy.is_pure());
        assert_eq!(r.guaranteed_gain, ratio::int(0));
    }

    #[test]
    fn css_trace_on_binary_tree() {
        let r = css_run(&build_mary_tree(MaryTreeSpec::new(2, 3).unwrap())).unwrap();
        assert_eq!(r.trace, vec![ratio::int(0), frac(56, 15), frac(112, 23)]);
        assert!(lemma4_check(&r.trace, &r.criteria()));
    }

    #[test]
    fn trace_check_rejects_decreasing_trace() {
        let trace = vec![ratio::int(0), ratio::int(3), ratio::int(2)];
        assert!(!lemma4_check(&trace, &[ratio::int(5), ratio::int(5)]));
        assert!(!lemma4_check(&[ratio::int(0), ratio::int(6)], &[ratio::int(5)]));
        // The star's only added branch is a leaf: criterion 0, average gain 1.
        let r = css_run(&star(4)).unwrap();
        assert!(!lemma4_check(&r.trace, &r.criteria()));
        assert!(lemma4_check(&r.trace, &r.step_bounds()));
    }
}
