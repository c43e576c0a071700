//! Closed-form strategies for two tree families.
//!
//! On a spider with `m` legs of `ℓ` vertices, the strategy `C_S(k)` spreads
//! probability `1/(mk+1)` over the body and the first `k` vertices of every
//! leg. Its worst case is the body reply, which has a closed form; the best
//! `k` is found by exact enumeration.
//!
//! On the complete m-ary tree `T(m,h)`, the strategies `μ1` (Player 1) and
//! `μ2` (Player 2) use only the root and its children, with weights chosen to
//! make the opponent indifferent between those vertices. They are optimal and
//! meet at the safety value.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::game::{self, MixedStrategy};
use crate::ratio::{self, Ratio};
use crate::tree::Tree;

/// Trees above this size are refused by the builders.
pub const MAX_BUILD_VERTICES: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpiderSpec {
    pub legs: usize,
    pub leg_length: usize,
}

impl SpiderSpec {
    pub fn new(legs: usize, leg_length: usize) -> Result<SpiderSpec> {
        if legs < 3 {
            return Err(Error::InvalidParameter(format!("a spider needs at least 3 legs, got {legs}")));
        }
        if leg_length < 1 {
            return Err(Error::InvalidParameter("spider legs need at least one vertex".into()));
        }
        legs.checked_mul(leg_length)
            .and_then(|v| v.checked_add(1))
            .filter(|&n| n <= MAX_BUILD_VERTICES)
            .ok_or_else(|| Error::InvalidParameter("spider too large".into()))?;
        Ok(SpiderSpec { legs, leg_length })
    }

    pub fn n(&self) -> usize {
        self.legs * self.leg_length + 1
    }

    /// Vertex id of label `(d, s)`: `d + (s-1)ℓ`, with the body `(0,0)` at 0.
    pub fn index(&self, depth: usize, leg: usize) -> usize {
        if depth == 0 {
            0
        } else {
            depth + (leg - 1) * self.leg_length
        }
    }

    /// Inverse of [`SpiderSpec::index`].
    pub fn label(&self, v: usize) -> (usize, usize) {
        if v == 0 {
            (0, 0)
        } else {
            ((v - 1) % self.leg_length + 1, (v - 1) / self.leg_length + 1)
        }
    }
}

pub fn build_spider(spec: SpiderSpec) -> Tree {
    let mut edges = Vec::with_capacity(spec.n() - 1);
    for leg in 1..=spec.legs {
        edges.push((0, spec.index(1, leg)));
        for d in 2..=spec.leg_length {
            edges.push((spec.index(d - 1, leg), spec.index(d, leg)));
        }
    }
    let labels = (0..spec.n())
        .map(|v| {
            let (d, s) = spec.label(v);
            format!("({d},{s})")
        })
        .collect();
    Tree::from_edges(spec.n(), &edges).and_then(|t| t.with_labels(labels)).expect("spider edges form a tree")
}

fn check_k(spec: SpiderSpec, k: usize) -> Result<()> {
    if k > spec.leg_length {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds the leg length {}", spec.leg_length)));
    }
    Ok(())
}

/// `C_S(k)`: uniform over the body and every vertex within depth `k`.
pub fn spider_strategy(spec: SpiderSpec, k: usize) -> Result<MixedStrategy> {
    check_k(spec, k)?;
    let p = ratio::frac(1, (spec.legs * k + 1) as i64);
    let entries: Vec<_> = (0..spec.n()).filter(|&v| spec.label(v).0 <= k).map(|v| (v, p.clone())).collect();
    MixedStrategy::from_sparse(spec.n(), &entries)
}

/// Gain of `C_S(k)` against a body start:
/// `m/(mk+1) · (kℓ − k²/4)` for even `k`, plus `m/(mk+1) · 1/4` for odd `k`.
pub fn spider_body_gain(spec: SpiderSpec, k: usize) -> Result<Ratio> {
    check_k(spec, k)?;
    let (m, l, k) = (spec.legs as i64, spec.leg_length as i64, k as i64);
    let mut inner = ratio::int(k * l) - ratio::frac(k * k, 4);
    if k % 2 == 1 {
        inner += ratio::frac(1, 4);
    }
    Ok(ratio::frac(m, m * k + 1) * inner)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpiderOptimum {
    pub k: usize,
    pub guaranteed_gain: Ratio,
    /// Exact worst-case gain of `C_S(k)` for every `k = 0..=ℓ`.
    pub sweep: Vec<Ratio>,
}

/// Best `k` by exhaustive search over exact guaranteed gains; ties go to the smaller `k`.
pub fn spider_optimal_k(spec: SpiderSpec) -> Result<SpiderOptimum> {
    let tree = build_spider(spec);
    let sweep = (0..=spec.leg_length)
        .map(|k| Ok(game::guaranteed_gain(&tree, &spider_strategy(spec, k)?)?.0))
        .collect::<Result<Vec<Ratio>>>()?;
    let mut best = 0;
    for (k, g) in sweep.iter().enumerate() {
        if *g > sweep[best] {
            best = k;
        }
    }
    Ok(SpiderOptimum { k: best, guaranteed_gain: sweep[best].clone(), sweep })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaryTreeSpec {
    pub arity: usize,
    pub height: usize,
}

impl MaryTreeSpec {
    pub fn new(arity: usize, height: usize) -> Result<MaryTreeSpec> {
        if arity < 2 {
            return Err(Error::InvalidParameter(format!("arity must be at least 2, got {arity}")));
        }
        if height < 1 {
            return Err(Error::InvalidParameter("height must be at least 1".into()));
        }
        let spec = MaryTreeSpec { arity, height };
        match spec.n_big().to_usize() {
            Some(n) if n <= MAX_BUILD_VERTICES => Ok(spec),
            _ => Err(Error::InvalidParameter(format!("T({arity},{height}) is too large"))),
        }
    }

    fn pow(&self, e: usize) -> BigInt {
        num_traits::pow(BigInt::from(self.arity), e)
    }

    fn n_big(&self) -> BigInt {
        (self.pow(self.height + 1) - 1) / (self.arity - 1)
    }

    /// `(m^{h+1} − 1)/(m − 1)`
    pub fn n(&self) -> usize {
        self.n_big().to_usize().expect("checked at construction")
    }

    /// Level-order id of label `(d, e)`.
    pub fn index(&self, depth: usize, position: usize) -> usize {
        (self.arity.pow(depth as u32) - 1) / (self.arity - 1) + position
    }

    /// Shared denominator `m^{h+2} − m^{h+1} + m^h − 1` of `μ1` and `μ2`.
    fn denominator(&self) -> BigInt {
        let h = self.height;
        self.pow(h + 2) - self.pow(h + 1) + self.pow(h) - 1
    }
}

pub fn build_mary_tree(spec: MaryTreeSpec) -> Tree {
    let n = spec.n();
    let m = spec.arity;
    let mut edges = Vec::with_capacity(n - 1);
    let mut labels = vec!["(0,0)".to_string()];
    for d in 1..=spec.height {
        for e in 0..m.pow(d as u32) {
            edges.push((spec.index(d - 1, e / m), spec.index(d, e)));
            labels.push(format!("({d},{e})"));
        }
    }
    Tree::from_edges(n, &edges).and_then(|t| t.with_labels(labels)).expect("complete tree edges form a tree")
}

fn root_and_children(spec: MaryTreeSpec, root: Ratio, child: Ratio) -> MixedStrategy {
    let mut entries = vec![(0, root)];
    entries.extend((1..=spec.arity).map(|v| (v, child.clone())));
    MixedStrategy::from_sparse(spec.n(), &entries).expect("root and children weights sum to one")
}

/// `(α1, β1)`: root and per-child probabilities of `μ1`.
pub fn mu1_weights(spec: MaryTreeSpec) -> (Ratio, Ratio) {
    let den = spec.denominator();
    let h = spec.height;
    let alpha = Ratio::new(spec.pow(h) - 1, den.clone());
    let beta = Ratio::new(BigInt::from(spec.arity - 1) * spec.pow(h), den);
    (alpha, beta)
}

/// `(α2, β2)`: root and per-child probabilities of `μ2`.
pub fn mu2_weights(spec: MaryTreeSpec) -> (Ratio, Ratio) {
    let den = spec.denominator();
    let h = spec.height;
    let alpha = Ratio::new(BigInt::from(spec.arity - 1) * (spec.pow(h + 1) - spec.pow(h) + BigInt::one()), den.clone());
    let beta = Ratio::new(spec.pow(h) - 1, den);
    (alpha, beta)
}

/// Player 1's safe strategy on `T(m,h)`; the weights satisfy `α1 + m·β1 = 1`.
pub fn mary_mu1(spec: MaryTreeSpec) -> MixedStrategy {
    let (a, b) = mu1_weights(spec);
    root_and_children(spec, a, b)
}

/// Player 2's opposing strategy on `T(m,h)`.
pub fn mary_mu2(spec: MaryTreeSpec) -> MixedStrategy {
    let (a, b) = mu2_weights(spec);
    root_and_children(spec, a, b)
}

/// Safety value `(n−1)((m−1)n+1) / (n(m²−m+1)+m−1)`.
pub fn mary_value(spec: MaryTreeSpec) -> Ratio {
    let n = spec.n_big();
    let m = BigInt::from(spec.arity);
    let num = (&n - 1) * ((&m - 1) * &n + 1);
    let den = &n * (&m * &m - &m + 1) + &m - 1;
    Ratio::new(num, den)
}

/// The same value written in `m` and `h`: `m^{h+1}(m^h−1) / (m^{h+2}−m^{h+1}+m^h−1)`.
pub fn mary_value_in_height(spec: MaryTreeSpec) -> Ratio {
    let h = spec.height;
    Ratio::new(spec.pow(h + 1) * (spec.pow(h) - 1), spec.denominator())
}
