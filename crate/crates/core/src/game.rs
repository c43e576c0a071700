//! The competitive diffusion payoff model.
//!
//! Colors spread in synchronous rounds: an uncolored vertex adjacent to
//! exactly one color takes it, one adjacent to both turns grey, and grey
//! vertices block further spread. When both players start on the same vertex
//! it turns grey at once.
//!
//! On a tree the outcome has a closed form: Player 1 wins exactly the vertices
//! strictly closer to her start than to Player 2's. [`simulate_diffusion`] is
//! the ground truth and [`pure_gain`] the fast path; tests hold them equal.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratio::{self, Ratio};
use crate::tree::Tree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Player1,
    Player2,
    Grey,
    White,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    pub colors: Vec<Color>,
    pub rounds: usize,
}

impl Coloring {
    pub fn count(&self, color: Color) -> usize {
        self.colors.iter().filter(|&&c| c == color).count()
    }
}

pub fn simulate_diffusion(t: &Tree, x1: usize, x2: usize) -> Result<Coloring> {
    t.check_vertex(x1)?;
    t.check_vertex(x2)?;
    let n = t.n();
    let mut state: Vec<Option<Color>> = vec![None; n];
    if x1 == x2 {
        state[x1] = Some(Color::Grey);
        let colors = state.into_iter().map(|c| c.unwrap_or(Color::White)).collect();
        return Ok(Coloring { colors, rounds: 0 });
    }
    state[x1] = Some(Color::Player1);
    state[x2] = Some(Color::Player2);
    let mut frontier = vec![x1, x2];
    let mut hits = vec![0u8; n];
    let mut rounds = 0;
    while !frontier.is_empty() {
        if rounds > n {
            return Err(Error::Internal(format!("diffusion did not terminate within {n} rounds")));
        }
        rounds += 1;
        // bit 0: reached by player 1, bit 1: reached by player 2
        let mut touched = Vec::new();
        for &v in &frontier {
            let bit = if state[v] == Some(Color::Player1) { 1 } else { 2 };
            for &w in t.neighbors(v) {
                if state[w].is_none() {
                    if hits[w] == 0 {
                        touched.push(w);
                    }
                    hits[w] |= bit;
                }
            }
        }
        frontier.clear();
        for w in touched {
            let color = match std::mem::take(&mut hits[w]) {
                3 => Color::Grey,
                1 => Color::Player1,
                _ => Color::Player2,
            };
            state[w] = Some(color);
            if color != Color::Grey {
                frontier.push(w);
            }
        }
    }
    let colors = state.into_iter().map(|c| c.unwrap_or(Color::White)).collect();
    Ok(Coloring { colors, rounds: rounds.saturating_sub(1) })
}

/// Player 1's gain when she starts at `x1` and Player 2 at `x2`: the number
/// of vertices strictly closer to `x1`. Runs in `O(log n)`.
pub fn pure_gain(t: &Tree, x1: usize, x2: usize) -> usize {
    if x1 == x2 {
        return 0;
    }
    // Vertices closer to x1 hang off the path beyond its midpoint; cut the
    // path edge between steps floor(d/2) and floor(d/2)+1 from x2.
    let d = t.distance(x1, x2);
    let k = d / 2 + 1;
    let near = t.step_toward(x2, x1, k - 1);
    let far = t.step_toward(x2, x1, k);
    t.side_size(near, far)
}

/// Gains of every Player-1 start against a fixed Player-2 start `y`, in `O(n)`.
pub fn gains_against(t: &Tree, y: usize) -> Vec<usize> {
    let n = t.n();
    let (parent, order) = t.rooted_at(y);
    let mut size = vec![1usize; n];
    for &v in order.iter().rev().filter(|&&v| v != y) {
        size[parent[v]] += size[v];
    }
    let mut gains = vec![0usize; n];
    let mut path: Vec<usize> = Vec::new();
    let mut depth = vec![0usize; n];
    for &v in &order {
        if v != y {
            depth[v] = depth[parent[v]] + 1;
        }
        path.truncate(depth[v]);
        path.push(v);
        if v != y {
            gains[v] = size[path[depth[v] / 2 + 1]];
        }
    }
    gains
}

/// Player 1's payoff matrix: entry `(i, j)` is her gain starting at `i`
/// against Player 2 at `j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameMatrix {
    n: usize,
    entries: Vec<u32>,
}

impl GameMatrix {
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<GameMatrix> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, actual: row.len() });
            }
            entries.extend(row);
        }
        Ok(GameMatrix { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.entries.chunks(self.n.max(1)).take(self.n)
    }

    /// One CSV line per Player-1 start vertex.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<GameMatrix> {
        let rows = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
            .map(|(i, l)| {
                l.split(',')
                    .map(|f| {
                        f.trim()
                            .parse::<u32>()
                            .map_err(|_| Error::Parse { line: i + 1, message: format!("bad matrix entry {f:?}") })
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        GameMatrix::from_rows(rows)
    }

    /// `X · A` for each column: Player 1's expected gain against every pure reply.
    pub fn column_values(&self, x: &MixedStrategy) -> Result<Vec<Ratio>> {
        x.check_len(self.n)?;
        let (den, weights) = x.common_denominator();
        Ok((0..self.n)
            .map(|j| {
                let total: BigInt = x.support().map(|i| &weights[i] * BigInt::from(self.get(i, j))).sum();
                Ratio::new(total, den.clone())
            })
            .collect())
    }

    /// `A · Yᵀ` for each row: every pure start's expected gain against `y`.
    pub fn row_values(&self, y: &MixedStrategy) -> Result<Vec<Ratio>> {
        y.check_len(self.n)?;
        let (den, weights) = y.common_denominator();
        Ok((0..self.n)
            .map(|i| {
                let total: BigInt = y.support().map(|j| &weights[j] * BigInt::from(self.get(i, j))).sum();
                Ratio::new(total, den.clone())
            })
            .collect())
    }
}

pub fn game_matrix(t: &Tree) -> GameMatrix {
    let n = t.n();
    let columns: Vec<Vec<usize>> = (0..n).into_par_iter().map(|y| gains_against(t, y)).collect();
    let mut entries = vec![0u32; n * n];
    for (j, column) in columns.iter().enumerate() {
        for (i, &g) in column.iter().enumerate() {
            entries[i * n + j] = g as u32;
        }
    }
    GameMatrix { n, entries }
}

/// A probability distribution over vertices, held as exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MixedStrategy {
    probs: Vec<Ratio>,
}

impl MixedStrategy {
    pub fn new(probs: Vec<Ratio>) -> Result<MixedStrategy> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("no vertices".into()));
        }
        if let Some((i, p)) = probs.iter().enumerate().find(|(_, p)| p.is_negative()) {
            return Err(Error::InvalidStrategy(format!("negative probability {p} on vertex {i}")));
        }
        let total: Ratio = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::InvalidStrategy(format!("probabilities sum to {total}, not 1")));
        }
        Ok(MixedStrategy { probs })
    }

    pub fn pure(n: usize, v: usize) -> MixedStrategy {
        let mut probs = vec![Ratio::zero(); n];
        probs[v] = Ratio::one();
        MixedStrategy { probs }
    }

    pub fn uniform(n: usize) -> MixedStrategy {
        MixedStrategy { probs: vec![ratio::frac(1, n as i64); n] }
    }

    /// Builds a strategy on `n` vertices from `(vertex, probability)` pairs;
    /// repeated vertices accumulate.
    pub fn from_sparse(n: usize, entries: &[(usize, Ratio)]) -> Result<MixedStrategy> {
        let mut probs = vec![Ratio::zero(); n];
        for (v, p) in entries {
            if *v >= n {
                return Err(Error::VertexOutOfRange { vertex: *v, n });
            }
            probs[*v] += p;
        }
        MixedStrategy::new(probs)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, v: usize) -> &Ratio {
        &self.probs[v]
    }

    pub fn probs(&self) -> &[Ratio] {
        &self.probs
    }

    /// Vertices with positive probability, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs.iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(i, _)| i)
    }

    pub fn sparse(&self) -> Vec<(usize, Ratio)> {
        self.support().map(|v| (v, self.probs[v].clone())).collect()
    }

    pub fn is_pure(&self) -> bool {
        self.support().count() == 1
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.probs.iter().map(ratio::to_f64).collect()
    }

    fn check_len(&self, n: usize) -> Result<()> {
        if self.len() == n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: n, actual: self.len() })
        }
    }

    /// `(D, a)` with `p_i = a_i / D` for every vertex.
    fn common_denominator(&self) -> (BigInt, Vec<BigInt>) {
        let den = self.probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let weights = self.probs.iter().map(|p| p.numer() * (&den / p.denom())).collect();
        (den, weights)
    }
}

/// Expected gain `X · A · Yᵀ` of Player 1.
pub fn gain(t: &Tree, x: &MixedStrategy, y: &MixedStrategy) -> Result<Ratio> {
    x.check_len(t.n())?;
    y.check_len(t.n())?;
    let mut total = Ratio::zero();
    for i in x.support() {
        for j in y.support() {
            let g = pure_gain(t, i, j);
            if g > 0 {
                total += x.prob(i) * y.prob(j) * ratio::int(g as i64);
            }
        }
    }
    Ok(total)
}

/// Player 1's expected gain under `x` against every pure reply of Player 2.
pub fn reply_values(t: &Tree, x: &MixedStrategy) -> Result<Vec<Ratio>> {
    x.check_len(t.n())?;
    let (den, weights) = x.common_denominator();
    let support: Vec<usize> = x.support().collect();
    Ok((0..t.n())
        .into_par_iter()
        .map(|y| {
            let total: BigInt = support.iter().map(|&i| &weights[i] * BigInt::from(pure_gain(t, i, y))).sum();
            Ratio::new(total, den.clone())
        })
        .collect())
}

/// Expected gain of every pure Player-1 start against `y`.
pub fn start_values(t: &Tree, y: &MixedStrategy) -> Result<Vec<Ratio>> {
    y.check_len(t.n())?;
    let (den, weights) = y.common_denominator();
    let support: Vec<usize> = y.support().collect();
    Ok((0..t.n())
        .into_par_iter()
        .map(|i| {
            let total: BigInt = support.iter().map(|&j| &weights[j] * BigInt::from(pure_gain(t, i, j))).sum();
            Ratio::new(total, den.clone())
        })
        .collect())
}

fn extremum(values: &[Ratio], want_max: bool) -> (Ratio, Vec<usize>) {
    let best = values
        .iter()
        .fold(None::<&Ratio>, |acc, v| match acc {
            None => Some(v),
            Some(b) if (want_max && v > b) || (!want_max && v < b) => Some(v),
            keep => keep,
        })
        .expect("non-empty")
        .clone();
    let arg = values.iter().enumerate().filter(|(_, v)| **v == best).map(|(i, _)| i).collect();
    (best, arg)
}

/// Worst case of `x` over all pure replies, with every minimizing reply.
pub fn guaranteed_gain(t: &Tree, x: &MixedStrategy) -> Result<(Ratio, Vec<usize>)> {
    Ok(extremum(&reply_values(t, x)?, false))
}

/// Best pure response value against `y`, with every maximizing start.
pub fn maximal_gain(t: &Tree, y: &MixedStrategy) -> Result<(Ratio, Vec<usize>)> {
    Ok(extremum(&start_values(t, y)?, true))
}

/// Matrix route for [`guaranteed_gain`].
pub fn guaranteed_gain_from_matrix(a: &GameMatrix, x: &MixedStrategy) -> Result<(Ratio, Vec<usize>)> {
    Ok(extremum(&a.column_values(x)?, false))
}

/// Matrix route for [`maximal_gain`].
pub fn maximal_gain_from_matrix(a: &GameMatrix, y: &MixedStrategy) -> Result<(Ratio, Vec<usize>)> {
    Ok(extremum(&a.row_values(y)?, true))
}
