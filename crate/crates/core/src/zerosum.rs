//! Safety values of zero-sum games with non-negative payoffs.
//!
//! With all payoffs non-negative and no all-zero column the value is positive,
//! so the usual rescaling applies without an offset shift: with `y = Y / v`,
//!
//! ```text
//! maximize 1ᵀy  subject to  A y ≤ 1,  y ≥ 0
//! ```
//!
//! has optimum `1 / v`, and its dual prices rescale to Player 1's maxmin
//! strategy. A game with an all-zero column has value 0.
//!
//! [`solve_value`] first runs a floating-point simplex to locate an optimal
//! basis, then re-solves that basis exactly and checks primal and dual
//! feasibility in rational arithmetic. If the check fails it falls back to
//! [`solve_value_bland`], an exact simplex with Bland's rule.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{GameMatrix, MixedStrategy};
use crate::ratio::{self, Ratio};

/// A rectangular non-negative payoff table; rows belong to the maximizer.
pub trait Payoff {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn entry(&self, i: usize, j: usize) -> u32;
}

impl Payoff for GameMatrix {
    fn rows(&self) -> usize {
        self.n()
    }
    fn cols(&self) -> usize {
        self.n()
    }
    fn entry(&self, i: usize, j: usize) -> u32 {
        self.get(i, j)
    }
}

/// Row-major rectangular payoff table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u32>,
}

impl DenseMatrix {
    pub fn from_columns(rows: usize, columns: &[Vec<u32>]) -> Result<DenseMatrix> {
        let cols = columns.len();
        let mut entries = vec![0; rows * cols];
        for (j, column) in columns.iter().enumerate() {
            if column.len() != rows {
                return Err(Error::DimensionMismatch { expected: rows, actual: column.len() });
            }
            for (i, &v) in column.iter().enumerate() {
                entries[i * cols + j] = v;
            }
        }
        Ok(DenseMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<DenseMatrix> {
        let cols = rows.first().map_or(0, Vec::len);
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch { expected: cols, actual: row.len() });
            }
            entries.extend(row);
        }
        Ok(DenseMatrix { rows: n, cols, entries })
    }
}

impl Payoff for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.cols + j]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    /// Some column is all zeros, so Player 2 can hold Player 1 to nothing.
    ZeroColumn,
    /// Floating-point simplex basis confirmed in exact arithmetic.
    CertifiedBasis,
    /// Exact rational simplex with Bland's rule.
    ExactBland,
}

/// Exact optimality evidence for a [`ZeroSumSolution`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    /// Expected payoff of each pure row against the minmax strategy.
    #[serde(serialize_with = "crate::io::ser_ratios")]
    pub row_values: Vec<Ratio>,
    /// Expected payoff of the maxmin strategy against each pure column.
    #[serde(serialize_with = "crate::io::ser_ratios")]
    pub column_values: Vec<Ratio>,
    /// Optimum of the rescaled primal, `1 / value` (zero when the value is zero).
    #[serde(serialize_with = "crate::io::ser_ratio")]
    pub primal_objective: Ratio,
    /// Optimum of its dual.
    #[serde(serialize_with = "crate::io::ser_ratio")]
    pub dual_objective: Ratio,
    pub method: SolveMethod,
    pub pivots: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumSolution {
    pub value: Ratio,
    pub maxmin: MixedStrategy,
    pub minmax: MixedStrategy,
    pub certificate: Certificate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloatSolution {
    pub value: f64,
    pub maxmin: Vec<f64>,
    pub minmax: Vec<f64>,
    pub pivots: usize,
}

const FLOAT_TOL: f64 = 1e-9;

trait Scalar: Clone + PartialOrd {
    fn s_zero() -> Self;
    fn s_one() -> Self;
    fn from_u32(v: u32) -> Self;
    fn positive(&self) -> bool;
    fn nonzero(&self) -> bool;
    fn div(&self, d: &Self) -> Self;
    /// `self -= a * b`
    fn sub_mul(&mut self, a: &Self, b: &Self);
}

impl Scalar for f64 {
    fn s_zero() -> Self {
        0.0
    }
    fn s_one() -> Self {
        1.0
    }
    fn from_u32(v: u32) -> Self {
        v as f64
    }
    fn positive(&self) -> bool {
        *self > FLOAT_TOL
    }
    fn nonzero(&self) -> bool {
        *self != 0.0
    }
    fn div(&self, d: &Self) -> Self {
        self / d
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        *self -= a * b;
    }
}

impl Scalar for Ratio {
    fn s_zero() -> Self {
        Zero::zero()
    }
    fn s_one() -> Self {
        One::one()
    }
    fn from_u32(v: u32) -> Self {
        ratio::int(v as i64)
    }
    fn positive(&self) -> bool {
        self.is_positive()
    }
    fn nonzero(&self) -> bool {
        !self.is_zero()
    }
    fn div(&self, d: &Self) -> Self {
        self / d
    }
    fn sub_mul(&mut self, a: &Self, b: &Self) {
        if !a.is_zero() && !b.is_zero() {
            *self -= a * b;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Rule {
    Dantzig,
    Bland,
}

/// Dense tableau for `max 1ᵀy, A y + s = 1, y, s ≥ 0`.
/// Columns `0..k` are structural, `k..k+m` are slacks.
struct Tableau<S> {
    m: usize,
    k: usize,
    cells: Vec<Vec<S>>,
    rhs: Vec<S>,
    reduced: Vec<S>,
    basis: Vec<usize>,
    pivots: usize,
}

impl<S: Scalar> Tableau<S> {
    fn new<P: Payoff + ?Sized>(a: &P) -> Self {
        let (m, k) = (a.rows(), a.cols());
        let cells = (0..m)
            .map(|i| {
                let mut row: Vec<S> = (0..k).map(|j| S::from_u32(a.entry(i, j))).collect();
                row.extend((0..m).map(|s| if s == i { S::s_one() } else { S::s_zero() }));
                row
            })
            .collect();
        let mut reduced = vec![S::s_one(); k];
        reduced.extend((0..m).map(|_| S::s_zero()));
        Tableau { m, k, cells, rhs: vec![S::s_one(); m], reduced, basis: (k..k + m).collect(), pivots: 0 }
    }

    fn entering(&self, rule: Rule) -> Option<usize> {
        let candidates = (0..self.k + self.m).filter(|&j| self.reduced[j].positive());
        match rule {
            Rule::Bland => candidates.min(),
            Rule::Dantzig => candidates.fold(None, |best: Option<usize>, j| match best {
                Some(b) if self.reduced[b] >= self.reduced[j] => Some(b),
                _ => Some(j),
            }),
        }
    }

    fn leaving(&self, col: usize) -> Option<usize> {
        let mut best: Option<(usize, S)> = None;
        for i in 0..self.m {
            if !self.cells[i][col].positive() {
                continue;
            }
            let q = self.rhs[i].div(&self.cells[i][col]);
            best = match best {
                None => Some((i, q)),
                Some((b, bq)) => {
                    if q < bq || (q == bq && self.basis[i] < self.basis[b]) {
                        Some((i, q))
                    } else {
                        Some((b, bq))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.cells[row][col].clone();
        for v in self.cells[row].iter_mut() {
            *v = v.div(&p);
        }
        self.rhs[row] = self.rhs[row].div(&p);
        let pivot_row = std::mem::take(&mut self.cells[row]);
        let pivot_rhs = self.rhs[row].clone();
        for i in 0..self.m {
            if i == row {
                continue;
            }
            let f = self.cells[i][col].clone();
            if f.nonzero() {
                for (v, pv) in self.cells[i].iter_mut().zip(&pivot_row) {
                    v.sub_mul(&f, pv);
                }
                self.rhs[i].sub_mul(&f, &pivot_rhs);
            }
        }
        let f = self.reduced[col].clone();
        for (v, pv) in self.reduced.iter_mut().zip(&pivot_row) {
            v.sub_mul(&f, pv);
        }
        self.cells[row] = pivot_row;
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn run(&mut self, first_rule: Rule, max_pivots: usize) -> Result<()> {
        let switch_after = 20 * (self.m + self.k);
        loop {
            let rule = if self.pivots < switch_after { first_rule } else { Rule::Bland };
            let Some(col) = self.entering(rule) else { return Ok(()) };
            let Some(row) = self.leaving(col) else {
                return Err(Error::Solver("unbounded program; payoffs must be non-negative".into()));
            };
            if self.pivots >= max_pivots {
                return Err(Error::Solver(format!("no optimum after {max_pivots} pivots")));
            }
            self.pivot(row, col);
        }
    }

    /// Primal `y` (length k) and dual prices (length m).
    fn primal_dual(&self) -> (Vec<S>, Vec<S>) {
        let mut y = vec![S::s_zero(); self.k];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < self.k {
                y[b] = self.rhs[i].clone();
            }
        }
        let x = (0..self.m)
            .map(|i| {
                let mut v = S::s_zero();
                v.sub_mul(&self.reduced[self.k + i], &S::s_one());
                v
            })
            .collect();
        (y, x)
    }
}

fn check_shape<P: Payoff + ?Sized>(a: &P) -> Result<()> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(Error::InvalidParameter("empty payoff matrix".into()));
    }
    Ok(())
}

fn zero_column<P: Payoff + ?Sized>(a: &P) -> Option<usize> {
    (0..a.cols()).find(|&j| (0..a.rows()).all(|i| a.entry(i, j) == 0))
}

fn max_pivots<P: Payoff + ?Sized>(a: &P) -> usize {
    1000 * (a.rows() + a.cols()) + 10_000
}

/// Exact safety value with maxmin/minmax strategies and an optimality certificate.
pub fn solve_value<P: Payoff + ?Sized>(a: &P) -> Result<ZeroSumSolution> {
    check_shape(a)?;
    if let Some(j) = zero_column(a) {
        return zero_value(a, j);
    }
    let mut tab = Tableau::<f64>::new(a);
    if tab.run(Rule::Dantzig, max_pivots(a)).is_ok() {
        if let Some(sol) = certify_basis(a, &tab.basis, tab.pivots)? {
            return Ok(sol);
        }
    }
    solve_value_bland(a)
}

/// Exact rational simplex with Bland's anti-cycling rule throughout.
pub fn solve_value_bland<P: Payoff + ?Sized>(a: &P) -> Result<ZeroSumSolution> {
    check_shape(a)?;
    if let Some(j) = zero_column(a) {
        return zero_value(a, j);
    }
    let mut tab = Tableau::<Ratio>::new(a);
    tab.run(Rule::Bland, max_pivots(a))?;
    let (y, x) = tab.primal_dual();
    finish(a, y, x, SolveMethod::ExactBland, tab.pivots)
}

/// Double-precision solve for large or exploratory runs.
pub fn solve_value_float<P: Payoff + ?Sized>(a: &P) -> Result<FloatSolution> {
    check_shape(a)?;
    if let Some(j) = zero_column(a) {
        let mut minmax = vec![0.0; a.cols()];
        minmax[j] = 1.0;
        return Ok(FloatSolution { value: 0.0, maxmin: vec![1.0 / a.rows() as f64; a.rows()], minmax, pivots: 0 });
    }
    let mut tab = Tableau::<f64>::new(a);
    tab.run(Rule::Dantzig, max_pivots(a))?;
    let (y, x) = tab.primal_dual();
    let total: f64 = y.iter().sum();
    let dual_total: f64 = x.iter().sum();
    Ok(FloatSolution {
        value: 1.0 / total,
        minmax: y.iter().map(|v| v.max(0.0) / total).collect(),
        maxmin: x.iter().map(|v| v.max(0.0) / dual_total).collect(),
        pivots: tab.pivots,
    })
}

fn zero_value<P: Payoff + ?Sized>(a: &P, j: usize) -> Result<ZeroSumSolution> {
    let maxmin = MixedStrategy::uniform(a.rows());
    let minmax = MixedStrategy::pure(a.cols(), j);
    let row_values = row_values(a, &minmax);
    let column_values = column_values(a, &maxmin);
    Ok(ZeroSumSolution {
        value: Ratio::zero(),
        maxmin,
        minmax,
        certificate: Certificate {
            row_values,
            column_values,
            primal_objective: Ratio::zero(),
            dual_objective: Ratio::zero(),
            method: SolveMethod::ZeroColumn,
            pivots: 0,
        },
    })
}

/// Re-solves the basis of a floating-point optimum exactly. Returns `None` if
/// the basis is singular or not optimal in exact arithmetic.
fn certify_basis<P: Payoff + ?Sized>(a: &P, basis: &[usize], pivots: usize) -> Result<Option<ZeroSumSolution>> {
    let k = a.cols();
    let structural: Vec<usize> = {
        let mut s: Vec<usize> = basis.iter().copied().filter(|&b| b < k).collect();
        s.sort_unstable();
        s
    };
    let slack_basic: Vec<bool> = {
        let mut v = vec![false; a.rows()];
        for &b in basis.iter().filter(|&&b| b >= k) {
            v[b - k] = true;
        }
        v
    };
    let tight: Vec<usize> = (0..a.rows()).filter(|&i| !slack_basic[i]).collect();
    if tight.len() != structural.len() || tight.is_empty() {
        return Ok(None);
    }
    let sub: Vec<Vec<BigInt>> =
        tight.iter().map(|&i| structural.iter().map(|&j| BigInt::from(a.entry(i, j))).collect()).collect();
    let ones = vec![BigInt::one(); tight.len()];
    let Some(y_basic) = solve_linear(sub.clone(), ones.clone()) else { return Ok(None) };
    let Some(x_tight) = solve_linear(transpose(&sub), ones) else { return Ok(None) };
    let mut y = vec![Ratio::zero(); k];
    for (&j, v) in structural.iter().zip(y_basic) {
        y[j] = v;
    }
    let mut x = vec![Ratio::zero(); a.rows()];
    for (&i, v) in tight.iter().zip(x_tight) {
        x[i] = v;
    }
    if y.iter().chain(&x).any(Signed::is_negative) {
        return Ok(None);
    }
    let primal_ok = weighted_sums(&y, a.rows(), |i, j| a.entry(i, j)).iter().all(|v| v <= &Ratio::one());
    let dual_ok = weighted_sums(&x, k, |j, i| a.entry(i, j)).iter().all(|v| v >= &Ratio::one());
    if !(primal_ok && dual_ok) {
        return Ok(None);
    }
    finish(a, y, x, SolveMethod::CertifiedBasis, pivots).map(Some)
}

fn finish<P: Payoff + ?Sized>(
    a: &P,
    y: Vec<Ratio>,
    x: Vec<Ratio>,
    method: SolveMethod,
    pivots: usize,
) -> Result<ZeroSumSolution> {
    let primal: Ratio = y.iter().sum();
    let dual: Ratio = x.iter().sum();
    if primal != dual || !primal.is_positive() {
        return Err(Error::Solver(format!("duality gap: primal {primal}, dual {dual}")));
    }
    let value = primal.recip();
    let minmax = MixedStrategy::new(y.into_iter().map(|v| v * &value).collect())?;
    let maxmin = MixedStrategy::new(x.into_iter().map(|v| v * &value).collect())?;
    let row_values = row_values(a, &minmax);
    let column_values = column_values(a, &maxmin);
    Ok(ZeroSumSolution {
        value,
        maxmin,
        minmax,
        certificate: Certificate {
            row_values,
            column_values,
            primal_objective: primal,
            dual_objective: dual,
            method,
            pivots,
        },
    })
}

/// `out[r] = Σ_k w[k]·entry(r, k)` over the nonzero `w`, using one common
/// denominator so the inner loop stays in integers.
fn weighted_sums(w: &[Ratio], outputs: usize, entry: impl Fn(usize, usize) -> u32) -> Vec<Ratio> {
    let support: Vec<usize> = (0..w.len()).filter(|&k| !w[k].is_zero()).collect();
    let den = support.iter().fold(BigInt::one(), |acc, &k| num_integer::Integer::lcm(&acc, w[k].denom()));
    let nums: Vec<BigInt> = support.iter().map(|&k| w[k].numer() * (&den / w[k].denom())).collect();
    (0..outputs)
        .map(|r| {
            let total: BigInt = support
                .iter()
                .zip(&nums)
                .map(|(&k, c)| match entry(r, k) {
                    0 => BigInt::zero(),
                    e => c * BigInt::from(e),
                })
                .sum();
            Ratio::new(total, den.clone())
        })
        .collect()
}

fn row_values<P: Payoff + ?Sized>(a: &P, y: &MixedStrategy) -> Vec<Ratio> {
    weighted_sums(y.probs(), a.rows(), |i, j| a.entry(i, j))
}

fn column_values<P: Payoff + ?Sized>(a: &P, x: &MixedStrategy) -> Vec<Ratio> {
    weighted_sums(x.probs(), a.cols(), |j, i| a.entry(i, j))
}

/// True iff both strategies are valid and the worst case of the maxmin
/// strategy, the value, and the best reply to the minmax strategy coincide.
pub fn verify_solution<P: Payoff + ?Sized>(a: &P, sol: &ZeroSumSolution) -> bool {
    if sol.maxmin.len() != a.rows() || sol.minmax.len() != a.cols() {
        return false;
    }
    let valid = |s: &MixedStrategy| MixedStrategy::new(s.probs().to_vec()).is_ok();
    if !valid(&sol.maxmin) || !valid(&sol.minmax) {
        return false;
    }
    let worst = column_values(a, &sol.maxmin).into_iter().min();
    let best = row_values(a, &sol.minmax).into_iter().max();
    worst.as_ref() == Some(&sol.value) && best.as_ref() == Some(&sol.value)
}

fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|row| row[j].clone()).collect()).collect()
}

/// Solves `m·x = rhs` for an integer system by fraction-free (Bareiss)
/// elimination followed by rational back-substitution. `None` if singular.
fn solve_linear(mut m: Vec<Vec<BigInt>>, rhs: Vec<BigInt>) -> Option<Vec<Ratio>> {
    let n = rhs.len();
    for (row, b) in m.iter_mut().zip(rhs) {
        row.push(b);
    }
    let mut prev = BigInt::one();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        let (done, rest) = m.split_at_mut(c + 1);
        let pivot_row = &done[c];
        for row in rest.iter_mut() {
            let f = std::mem::take(&mut row[c]);
            for j in c + 1..=n {
                let mut v = &row[j] * &pivot_row[c];
                if !f.is_zero() {
                    v -= &f * &pivot_row[j];
                }
                row[j] = v / &prev;
            }
        }
        prev = pivot_row[c].clone();
    }
    let mut x = vec![Ratio::zero(); n];
    for i in (0..n).rev() {
        let mut acc = Ratio::from_integer(m[i][n].clone());
        for j in i + 1..n {
            if !m[i][j].is_zero() {
                acc -= &x[j] * Ratio::from_integer(m[i][j].clone());
            }
        }
        x[i] = acc / Ratio::from_integer(m[i][i].clone());
    }
    Some(x)
}
