//! Trees, branches, vertex weights and centroids.
//!
//! A branch of a tree at a vertex `v` is a maximal subtree that has `v` as a
//! leaf. The weight of `v` is the largest edge count among its branches, and
//! the centroid is the set of vertices of minimal weight: either one vertex
//! (centroidal tree) or two adjacent ones (bicentroidal tree).
//!
//! Every [`Tree`] carries a rooted view at vertex 0 (parents, depths, subtree
//! sizes and a binary-lifting ancestor table) so distances and path queries
//! cost `O(log n)`.

use std::collections::HashSet;

use serde::Serialize;

use crate::dsu::DisjointSets;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct Tree {
    adjacency: Vec<Vec<usize>>,
    labels: Vec<String>,
    parent: Vec<usize>,
    depth: Vec<usize>,
    subtree: Vec<usize>,
    /// `ancestors[k][v]` is the `2^k`-th ancestor of `v`, saturating at the root.
    ancestors: Vec<Vec<usize>>,
}

/// One branch at a vertex: the vertices beyond one incident edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    /// The neighbor of the branching vertex that lies in this branch.
    pub neighbor: usize,
    /// Vertices of the branch, excluding the branching vertex, in ascending order.
    pub vertices: Vec<usize>,
}

impl Branch {
    /// Edge count of the branch, counting the edge back to the branching vertex.
    pub fn edges(&self) -> usize {
        self.vertices.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightTable {
    pub weight: Vec<usize>,
    pub co_weight: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CentroidKind {
    Centroidal,
    Bicentroidal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CentroidInfo {
    pub vertices: Vec<usize>,
    pub kind: CentroidKind,
    /// The smaller centroid vertex id.
    pub root: usize,
}

impl Tree {
    /// Builds a tree from an edge list, rejecting anything that is not a tree.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Tree> {
        if n == 0 {
            return Err(Error::InvalidTree("a tree needs at least one vertex".into()));
        }
        if edges.len() != n - 1 {
            return Err(Error::InvalidTree(format!(
                "{} edges given, a tree on {n} vertices has {}",
                edges.len(),
                n - 1
            )));
        }
        let mut sets = DisjointSets::new(n);
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::InvalidTree(format!("self-loop at {u}")));
            }
            if !sets.union(u, v) {
                return Err(Error::InvalidTree(format!("edge {u} {v} closes a cycle")));
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
        }
        Ok(Tree::from_adjacency(adjacency))
    }

    fn from_adjacency(mut adjacency: Vec<Vec<usize>>) -> Tree {
        for list in &mut adjacency {
            list.sort_unstable();
        }
        let n = adjacency.len();
        let mut parent = vec![0; n];
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![0usize];
        let mut seen = vec![false; n];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    depth[w] = depth[v] + 1;
                    stack.push(w);
                }
            }
        }
        debug_assert_eq!(order.len(), n);
        let mut subtree = vec![1; n];
        for &v in order.iter().rev().filter(|&&v| v != 0) {
            subtree[parent[v]] += subtree[v];
        }
        let levels = usize::BITS as usize - n.leading_zeros() as usize;
        let mut ancestors = vec![parent.clone()];
        for k in 1..levels.max(1) {
            let prev = &ancestors[k - 1];
            let next = (0..n).map(|v| prev[prev[v]]).collect();
            ancestors.push(next);
        }
        Tree { labels: (0..n).map(|v| v.to_string()).collect(), adjacency, parent, depth, subtree, ancestors }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Tree> {
        if labels.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), actual: labels.len() });
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut edges: Vec<_> = (0..self.n())
            .flat_map(|u| self.adjacency[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
            .collect();
        edges.sort_unstable();
        edges
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { vertex: v, n: self.n() })
        }
    }

    /// Renders the edge-list document accepted by [`parse_tree`].
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{}\n", self.n());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    /// Returns the tree with vertex `v` renamed to `perm[v]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<Tree> {
        if perm.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), actual: perm.len() });
        }
        let edges: Vec<_> = self.edges().into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
        Tree::from_edges(self.n(), &edges)
    }

    fn ancestor(&self, mut v: usize, mut steps: usize) -> usize {
        let mut k = 0;
        while steps > 0 {
            if steps & 1 == 1 {
                v = self.ancestors[k][v];
            }
            steps >>= 1;
            k += 1;
        }
        v
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        if self.depth[a] < self.depth[b] {
            std::mem::swap(&mut a, &mut b);
        }
        a = self.ancestor(a, self.depth[a] - self.depth[b]);
        if a == b {
            return a;
        }
        for k in (0..self.ancestors.len()).rev() {
            if self.ancestors[k][a] != self.ancestors[k][b] {
                a = self.ancestors[k][a];
                b = self.ancestors[k][b];
            }
        }
        self.parent[a]
    }

    pub fn distance(&self, a: usize, b: usize) -> usize {
        let c = self.lca(a, b);
        self.depth[a] + self.depth[b] - 2 * self.depth[c]
    }

    /// The vertex `k` steps from `from` along the path to `to` (`k ≤ d(from, to)`).
    pub fn step_toward(&self, from: usize, to: usize, k: usize) -> usize {
        let c = self.lca(from, to);
        let up = self.depth[from] - self.depth[c];
        if k <= up {
            self.ancestor(from, k)
        } else {
            let down = self.depth[to] - self.depth[c];
            self.ancestor(to, up + down - k)
        }
    }

    /// For adjacent `a` and `b`: vertex count of the component holding `b`
    /// once the edge `a b` is removed.
    pub fn side_size(&self, a: usize, b: usize) -> usize {
        if self.parent[b] == a && b != 0 {
            self.subtree[b]
        } else {
            debug_assert!(self.parent[a] == b && a != 0, "{a} and {b} are not adjacent");
            self.n() - self.subtree[a]
        }
    }

    /// Breadth-first distances from `v`.
    pub fn distances_from(&self, v: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[v] = 0;
        let mut queue = std::collections::VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adjacency[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Parent pointers and a preorder of the tree rooted at `root`.
    pub fn rooted_at(&self, root: usize) -> (Vec<usize>, Vec<usize>) {
        let n = self.n();
        let mut parent = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        parent[root] = root;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &w in self.adjacency[v].iter().rev() {
                if parent[w] == usize::MAX {
                    parent[w] = v;
                    stack.push(w);
                }
            }
        }
        (parent, order)
    }

    /// One branch per neighbor of `v`, in neighbor order.
    pub fn branches_at(&self, v: usize) -> Vec<Branch> {
        self.adjacency[v]
            .iter()
            .map(|&start| {
                let mut vertices = vec![start];
                let mut stack = vec![(start, v)];
                while let Some((x, from)) = stack.pop() {
                    for &y in &self.adjacency[x] {
                        if y != from {
                            vertices.push(y);
                            stack.push((y, x));
                        }
                    }
                }
                vertices.sort_unstable();
                Branch { neighbor: start, vertices }
            })
            .collect()
    }

    /// Weights of every vertex in `O(n)`: the largest branch at `v` is either
    /// one of its child subtrees or everything outside its own subtree.
    pub fn weight_table(&self) -> WeightTable {
        let n = self.n();
        let weight: Vec<usize> = (0..n)
            .map(|v| {
                let outside = n - self.subtree[v];
                self.adjacency[v]
                    .iter()
                    .filter(|&&w| self.parent[w] == v && w != 0)
                    .map(|&w| self.subtree[w])
                    .fold(outside, usize::max)
            })
            .collect();
        let co_weight = weight.iter().map(|&w| n - w).collect();
        WeightTable { weight, co_weight }
    }

    pub fn centroid(&self) -> CentroidInfo {
        let weights = self.weight_table();
        let min = *weights.weight.iter().min().expect("non-empty tree");
        let vertices: Vec<usize> = (0..self.n()).filter(|&v| weights.weight[v] == min).collect();
        let kind = if vertices.len() == 1 { CentroidKind::Centroidal } else { CentroidKind::Bicentroidal };
        CentroidInfo { root: vertices[0], vertices, kind }
    }

    /// Whether every branch at `v` has at most `n/2` edges.
    pub fn is_balanced_vertex(&self, v: usize) -> bool {
        self.branches_at(v).iter().all(|b| 2 * b.edges() <= self.n())
    }
}

/// Parses the edge-list format: a vertex count on the first line, then one
/// `u v` pair per line. Blank lines and `#` comments are skipped.
pub fn parse_tree(text: &str) -> Result<Tree> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty document".into() })?;
    let n: usize = header
        .parse()
        .map_err(|_| Error::Parse { line: first, message: format!("expected vertex count, got {header:?}") })?;
    if n == 0 {
        return Err(Error::Parse { line: first, message: "vertex count must be at least 1".into() });
    }
    let mut sets = DisjointSets::new(n);
    let mut seen = HashSet::new();
    let mut edges = Vec::with_capacity(n - 1);
    let mut last = first;
    for (line, text) in lines {
        last = line;
        let err = |message: String| Error::Parse { line, message };
        let fields: Vec<&str> = text.split_whitespace().collect();
        let [a, b] = fields[..] else {
            return Err(err(format!("expected two vertex ids, got {text:?}")));
        };
        let parse = |s: &str| s.parse::<usize>().map_err(|_| err(format!("bad vertex id {s:?}")));
        let (u, v) = (parse(a)?, parse(b)?);
        for w in [u, v] {
            if w >= n {
                return Err(err(format!("vertex {w} out of range 0..{n}")));
            }
        }
        if u == v {
            return Err(err(format!("self-loop at {u}")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(err(format!("duplicate edge {u} {v}")));
        }
        if !sets.union(u, v) {
            return Err(err(format!("edge {u} {v} closes a cycle")));
        }
        edges.push((u, v));
    }
    if edges.len() != n - 1 {
        return Err(Error::Parse {
            line: last,
            message: format!("disconnected: {} edges for {n} vertices", edges.len()),
        });
    }
    Tree::from_edges(n, &edges)
}

/// The path `0 - 1 - ... - (n-1)`.
pub fn path(n: usize) -> Tree {
    let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
    Tree::from_edges(n, &edges).expect("path is a tree")
}

/// The star with center 0 and `leaves` leaves.
pub fn star(leaves: usize) -> Tree {
    let edges: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
    Tree::from_edges(leaves + 1, &edges).expect("star is a tree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_smallest_tree_and_path() {
        let t = parse_tree("2\n0 1").unwrap();
        assert_eq!(t.n(), 2);
        assert_eq!(t.edges(), vec![(0, 1)]);
        let p5 = parse_tree("5\n0 1\n1 2\n2 3\n3 4").unwrap();
        assert_eq!(p5.edges(), path(5).edges());
        assert_eq!(parse_tree("1\n").unwrap().n(), 1);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("3\n0 1\n1 2\n0 2", 4, "cycle"),
            ("3\n0 1\n0 1", 3, "duplicate"),
            ("3\n0 1\n1 5", 3, "out of range"),
            ("3\n0 1\n1 x", 3, "bad vertex"),
            ("3\n0 1 2\n", 2, "expected two"),
            ("4\n0 1\n2 3", 3, "disconnected"),
            ("3\n1 1\n", 2, "self-loop"),
            ("x\n", 1, "vertex count"),
        ];
        for (doc, want_line, want_msg) in cases {
            match parse_tree(doc) {
                Err(Error::Parse { line, message }) => {
                    assert_eq!(line, want_line, "{doc:?}: {message}");
                    assert!(message.contains(want_msg), "{doc:?}: {message}");
                }
                other => panic!("{doc:?}: expected parse error, got {other:?}"),
            }
        }
    }

    #[test]
    fn branches_partition_the_rest() {
        let p5 = path(5);
        let b = p5.branches_at(2);
        assert_eq!(b.iter().map(Branch::edges).collect::<Vec<_>>(), vec![2, 2]);
        assert_eq!(p5.branches_at(0).len(), 1);
        assert_eq!(p5.branches_at(0)[0].edges(), 4);
        let k14 = star(4);
        assert!(k14.branches_at(0).iter().all(|b| b.edges() == 1));
        assert_eq!(k14.branches_at(0).len(), 4);
    }

    #[test]
    fn weights_on_small_trees() {
        let w = path(5).weight_table();
        assert_eq!(w.weight, vec![4, 3, 2, 3, 4]);
        assert_eq!(w.co_weight, vec![1, 2, 3, 2, 1]);
        assert_eq!(star(4).weight_table().weight[0], 1);
        let single = Tree::from_edges(1, &[]).unwrap().weight_table();
        assert_eq!((single.weight[0], single.co_weight[0]), (0, 1));
    }

    #[test]
    fn centroids() {
        let c = path(5).centroid();
        assert_eq!((c.vertices.clone(), c.kind), (vec![2], CentroidKind::Centroidal));
        let c = path(4).centroid();
        assert_eq!((c.vertices.clone(), c.kind, c.root), (vec![1, 2], CentroidKind::Bicentroidal, 1));
        assert_eq!(star(4).centroid().vertices, vec![0]);
        assert_eq!(path(2).centroid().root, 0);
    }

    #[test]
    fn distances() {
        assert_eq!(path(5).distances_from(0), vec![0, 1, 2, 3, 4]);
        let k14 = star(4);
        assert_eq!(k14.distances_from(1)[3], 2);
        assert_eq!(k14.distance(1, 3), 2);
        let p5 = path(5);
        assert_eq!(p5.step_toward(4, 0, 3), 1);
        assert_eq!(p5.step_toward(0, 4, 3), 3);
        assert_eq!(p5.side_size(1, 2), 3);
        assert_eq!(p5.side_size(2, 1), 2);
    }

    #[test]
    fn relabel_keeps_shape() {
        let t = path(4).relabeled(&[3, 0, 2, 1]).unwrap();
        assert_eq!(t.edges(), vec![(0, 2), (0, 3), (1, 2)]);
    }
}
