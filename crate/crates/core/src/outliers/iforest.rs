//! Isolation Forest (axis-parallel splits, path-length anomaly score).

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::Matrix;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

pub const DEFAULT_TREES: usize = 100;
pub const DEFAULT_SUBSAMPLE: usize = 256;

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Split {
        feature: usize,
        value: f64,
        left: usize,
        right: usize,
    },
    Leaf {
        size: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsolationTree {
    nodes: Vec<Node>,
}

impl IsolationTree {
    /// Length of the longest root-to-leaf path.
    pub fn depth(&self) -> usize {
        fn walk(nodes: &[Node], i: usize) -> usize {
            match nodes[i] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => 1 + walk(nodes, left).max(walk(nodes, right)),
            }
        }
        walk(&self.nodes, 0)
    }

    /// Edges from the root to `x`'s leaf plus the expected remaining
    /// path length for the points left unseparated in that leaf.
    pub fn path_length(&self, x: &[f64]) -> f64 {
        let mut i = 0;
        let mut depth = 0.0;
        loop {
            match self.nodes[i] {
                Node::Leaf { size } => return depth + average_path_length(size),
                Node::Split {
                    feature,
                    value,
                    left,
                    right,
                } => {
                    i = if x[feature] < value { left } else { right };
                    depth += 1.0;
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsolationForest {
    pub trees: Vec<IsolationTree>,
    pub subsample_size: usize,
    pub n_trees: usize,
    pub seed: u64,
    pub n_features: usize,
}

/// Average path length of an unsuccessful binary-search-tree lookup among
/// `n` points: `c(n) = 2 H(n−1) − 2(n−1)/n`, with `c(2) = 1`, `c(≤1) = 0`.
pub fn average_path_length(n: usize) -> f64 {
    match n {
        0 | 1 => 0.0,
        2 => 1.0,
        _ => {
            let n = n as f64;
            2.0 * ((n - 1.0).ln() + EULER_GAMMA) - 2.0 * (n - 1.0) / n
        }
    }
}

/// `2^(−E[h] / c(n))`.
pub fn score_from_path_length(mean_path: f64, subsample_size: usize) -> f64 {
    let c = average_path_length(subsample_size);
    (-mean_path / c).exp2()
}

/// `ceil(log2(n))`
pub fn height_limit(subsample_size: usize) -> usize {
    let mut h = 0;
    while (1usize << h) < subsample_size {
        h += 1;
    }
    h
}

struct Builder<'a> {
    data: &'a Matrix,
    limit: usize,
    rng: ChaCha8Rng,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn grow(&mut self, rows: &mut [usize], depth: usize) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node::Leaf { size: rows.len() });
        if depth >= self.limit || rows.len() <= 1 {
            return id;
        }
        let p = self.data.cols();
        let mut ranges = Vec::with_capacity(p);
        for f in 0..p {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &r in rows.iter() {
                let v = self.data[(r, f)];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi > lo {
                ranges.push((f, lo, hi));
            }
        }
        if ranges.is_empty() {
            return id;
        }
        let (feature, lo, hi) = ranges[self.rng.random_range(0..ranges.len())];
        let value = self.rng.random_range(lo..hi);

        // partition in place: left = x < value
        let mut split = 0;
        for i in 0..rows.len() {
            if self.data[(rows[i], feature)] < value {
                rows.swap(i, split);
                split += 1;
            }
        }
        let (l, r) = rows.split_at_mut(split);
        let left = self.grow(l, depth + 1);
        let right = self.grow(r, depth + 1);
        self.nodes[id] = Node::Split {
            feature,
            value,
            left,
            right,
        };
        id
    }
}

fn tree_rng(seed: u64, tree: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tree as u64);
    rng
}

/// Fits `n_trees` isolation trees, each on a uniform subsample without
/// replacement. Tree `k` draws from stream `k` of a ChaCha generator
/// seeded with `seed`, so results do not depend on build order.
pub fn fit_isolation_forest(
    data: &Matrix,
    n_trees: usize,
    subsample_size: usize,
    seed: u64,
) -> Result<IsolationForest> {
    let n = data.rows();
    if n < 2 {
        return Err(Error::Degenerate(format!(
            "isolation forest needs at least 2 rows, got {n}"
        )));
    }
    if n_trees == 0 {
        return Err(Error::InvalidParameter("n_trees must be at least 1".into()));
    }
    if subsample_size < 2 || subsample_size > n {
        return Err(Error::InvalidParameter(format!(
            "subsample size {subsample_size} must be in [2, {n}]"
        )));
    }
    let limit = height_limit(subsample_size);
    let trees = (0..n_trees)
        .map(|t| {
            let mut rng = tree_rng(seed, t);
            let mut rows = index::sample(&mut rng, n, subsample_size).into_vec();
            rows.sort_unstable();
            let mut b = Builder {
                data,
                limit,
                rng,
                nodes: Vec::new(),
            };
            b.grow(&mut rows, 0);
            IsolationTree { nodes: b.nodes }
        })
        .collect();
    Ok(IsolationForest {
        trees,
        subsample_size,
        n_trees,
        seed,
        n_features: data.cols(),
    })
}

impl IsolationForest {
    pub fn mean_path_length(&self, x: &[f64]) -> f64 {
        self.trees.iter().map(|t| t.path_length(x)).sum::<f64>() / self.trees.len() as f64
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                actual: x.len(),
            });
        }
        Ok(score_from_path_length(
            self.mean_path_length(x),
            self.subsample_size,
        ))
    }
}

/// Anomaly score of every row of `data`, in (0, 1].
pub fn anomaly_scores(forest: &IsolationForest, data: &Matrix) -> Result<Vec<f64>> {
    data.iter_rows().map(|r| forest.score(r)).collect()
}

/// Flags the `ceil(rate · n)` highest scores, lower index first on ties.
pub fn contamination_filter(scores: &[f64], rate: f64) -> Vec<bool> {
    let n = scores.len();
    let mut flags = vec![false; n];
    if n == 0 || rate <= 0.0 {
        return flags;
    }
    // absorb representation error such as 0.005 * 1000 = 5.000000000000001
    let k = ((rate * n as f64) - 1e-9).ceil().clamp(0.0, n as f64) as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    for &i in &order[..k] {
        flags[i] = true;
    }
    flags
}
