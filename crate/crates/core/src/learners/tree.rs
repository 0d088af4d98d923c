//! CART classification tree on Gini impurity.
//!
//! Candidate thresholds are midpoints between consecutive distinct values
//! of a feature; samples with `x <= threshold` go left. Split quality is
//! compared exactly on integer class counts, and ties resolve to the lowest
//! feature index and then the lowest threshold.

use std::cmp::Ordering;

use rand::seq::index;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{check_training_set, Classifier, Matrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureSubset {
    All,
    /// `ceil(sqrt(p))` features per split.
    Sqrt,
    Count(usize),
}

impl FeatureSubset {
    pub fn resolve(self, n_features: usize) -> usize {
        match self {
            FeatureSubset::All => n_features,
            FeatureSubset::Sqrt => ((n_features as f64).sqrt().ceil() as usize).clamp(1, n_features),
            FeatureSubset::Count(k) => k.clamp(1, n_features),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or too small.
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: FeatureSubset,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: FeatureSubset::All,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum TreeNode {
    Split {
        feature: usize,
        threshold: f64,
        /// Weighted Gini decrease, in sample-count units.
        gain: f64,
        samples: usize,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        /// Share of positive training samples in the leaf.
        fraction: f64,
        samples: usize,
    },
}

impl TreeNode {
    pub fn predict(&self, x: &[f64]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { fraction, .. } => return *fraction,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => node = if x[*feature] <= *threshold { left } else { right },
            }
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, TreeNode::Leaf { .. })
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    /// Visit every split as `(feature, gain)`.
    pub fn for_each_split(&self, f: &mut impl FnMut(usize, f64)) {
        if let TreeNode::Split {
            feature,
            gain,
            left,
            right,
            ..
        } = self
        {
            f(*feature, *gain);
            left.for_each_split(f);
            right.for_each_split(f);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeModel {
    pub n_features: usize,
    pub params: TreeParams,
    pub root: TreeNode,
}

impl Classifier for TreeModel {
    fn n_features(&self) -> usize {
        self.n_features
    }

    fn predict_proba_unchecked(&self, x: &[f64]) -> f64 {
        self.root.predict(x)
    }
}

pub fn train_tree(x: &Matrix, y: &[bool], params: &TreeParams, seed: u64) -> Result<TreeModel> {
    check_training_set(x, y)?;
    if x.rows().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("training features".into()));
    }
    let samples: Vec<usize> = (0..x.n_rows()).collect();
    let mut rng = crate::seed::rng(seed);
    Ok(TreeModel {
        n_features: x.n_cols(),
        params: params.clone(),
        root: grow_tree(x, y, samples, params, &mut rng),
    })
}

/// Grow a tree on `samples`, which may repeat rows (bootstrap draws).
pub(crate) fn grow_tree(x: &Matrix, y: &[bool], samples: Vec<usize>, params: &TreeParams, rng: &mut ChaCha8Rng) -> TreeNode {
    let mut grower = Grower {
        x,
        y,
        params,
        rng,
        pairs: Vec::with_capacity(samples.len()),
    };
    grower.grow(samples, 0)
}

/// A candidate split with its exact quality score.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitCandidate {
    pub feature: usize,
    pub threshold: f64,
    n_left: u64,
    pos_left: u64,
    n_right: u64,
    pos_right: u64,
}

impl SplitCandidate {
    /// `sum over sides of (p^2 + q^2) / n` as an exact fraction. Maximizing it
    /// minimizes weighted Gini impurity.
    fn score(&self) -> (u128, u128) {
        let side = |n: u64, p: u64| {
            let q = n - p;
            (p as u128) * (p as u128) + (q as u128) * (q as u128)
        };
        let a = side(self.n_left, self.pos_left);
        let b = side(self.n_right, self.pos_right);
        let (nl, nr) = (self.n_left as u128, self.n_right as u128);
        (a * nr + b * nl, nl * nr)
    }

    fn cmp_quality(&self, other: &SplitCandidate) -> Ordering {
        let (n1, d1) = self.score();
        let (n2, d2) = other.score();
        (n1 * d2).cmp(&(n2 * d1))
    }

    fn gain(&self) -> f64 {
        let n = (self.n_left + self.n_right) as f64;
        let p = (self.pos_left + self.pos_right) as f64;
        let parent = (p * p + (n - p) * (n - p)) / n;
        let (num, den) = self.score();
        num as f64 / den as f64 - parent
    }
}

struct Grower<'a> {
    x: &'a Matrix,
    y: &'a [bool],
    params: &'a TreeParams,
    rng: &'a mut ChaCha8Rng,
    pairs: Vec<(f64, bool)>,
}

impl Grower<'_> {
    fn grow(&mut self, samples: Vec<usize>, depth: usize) -> TreeNode {
        let n = samples.len();
        let pos = samples.iter().filter(|&&s| self.y[s]).count();
        let leaf = TreeNode::Leaf {
            fraction: pos as f64 / n as f64,
            samples: n,
        };
        if pos == 0 || pos == n || self.params.max_depth.is_some_and(|d| depth >= d) || n < 2 * self.params.min_samples_leaf.max(1) {
            return leaf;
        }
        let Some(split) = self.find_split(&samples) else {
            return leaf;
        };
        let (left, right): (Vec<usize>, Vec<usize>) = samples
            .iter()
            .partition(|&&s| self.x.get(s, split.feature) <= split.threshold);
        TreeNode::Split {
            feature: split.feature,
            threshold: split.threshold,
            gain: split.gain(),
            samples: n,
            left: Box::new(self.grow(left, depth + 1)),
            right: Box::new(self.grow(right, depth + 1)),
        }
    }

    fn find_split(&mut self, samples: &[usize]) -> Option<SplitCandidate> {
        let p = self.x.n_cols();
        let k = self.params.features_per_split.resolve(p);
        if k >= p {
            return self.best_over((0..p).collect::<Vec<_>>().as_slice(), samples);
        }
        let mut chosen = index::sample(self.rng, p, k).into_vec();
        chosen.sort_unstable();
        if let Some(best) = self.best_over(&chosen, samples) {
            return Some(best);
        }
        // Every drawn feature was constant here; fall back to the rest.
        let rest: Vec<usize> = (0..p).filter(|j| !chosen.contains(j)).collect();
        self.best_over(&rest, samples)
    }

    fn best_over(&mut self, features: &[usize], samples: &[usize]) -> Option<SplitCandidate> {
        let min_leaf = self.params.min_samples_leaf.max(1) as u64;
        let n = samples.len() as u64;
        let total_pos = samples.iter().filter(|&&s| self.y[s]).count() as u64;
        let mut best: Option<SplitCandidate> = None;
        for &j in features {
            self.pairs.clear();
            self.pairs.extend(samples.iter().map(|&s| (self.x.get(s, j), self.y[s])));
            self.pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut pos_left = 0u64;
            for i in 0..self.pairs.len() - 1 {
                pos_left += self.pairs[i].1 as u64;
                let (lo, hi) = (self.pairs[i].0, self.pairs[i + 1].0);
                if lo == hi {
                    continue;
                }
                let n_left = i as u64 + 1;
                if n_left < min_leaf || n - n_left < min_leaf {
                    continue;
                }
                let cand = SplitCandidate {
                    feature: j,
                    threshold: midpoint(lo, hi),
                    n_left,
                    pos_left,
                    n_right: n - n_left,
                    pos_right: total_pos - pos_left,
                };
                if best.as_ref().is_none_or(|b| cand.cmp_quality(b) == Ordering::Greater) {
                    best = Some(cand);
                }
            }
        }
        best
    }
}

/// Midpoint of two consecutive distinct values, kept inside `[lo, hi)`.
fn midpoint(lo: f64, hi: f64) -> f64 {
    let m = lo / 2.0 + hi / 2.0;
    if m >= lo && m < hi {
        m
    } else {
        lo
    }
}

/// Best root split over all features, or `None` when nothing can be split.
pub fn best_root_split(x: &Matrix, y: &[bool], params: &TreeParams) -> Option<(usize, f64)> {
    let samples: Vec<usize> = (0..x.n_rows()).collect();
    let mut rng = crate::seed::rng(0);
    let all = TreeParams {
        features_per_split: FeatureSubset::All,
        ..params.clone()
    };
    let mut g = Grower {
        x,
        y,
        params: &all,
        rng: &mut rng,
        pairs: Vec::new(),
    };
    g.find_split(&samples).map(|c| (c.feature, c.threshold))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learners::Classifier;

    #[test]
    fn pure_set_is_single_leaf() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let t = train_tree(&x, &[true, true, true], &TreeParams::default(), 0).unwrap();
        assert_eq!(t.root, TreeNode::Leaf { fraction: 1.0, samples: 3 });
    }

    #[test]
    fn one_dimensional_midpoint() {
        let x = Matrix::from_rows(&[vec![0.0], vec![1.0], vec![2.0], vec![3.0]]).unwrap();
        let t = train_tree(&x, &[false, false, true, true], &TreeParams::default(), 0).unwrap();
        match &t.root {
            TreeNode::Split { feature, threshold, left, right, .. } => {
                assert_eq!((*feature, *threshold), (0, 1.5));
                assert!(left.is_leaf() && right.is_leaf());
            }
            other => panic!("expected a split, got {other:?}"),
        }
        assert_eq!(t.predict_proba(&[1.2]).unwrap(), 0.0);
        assert_eq!(t.predict_proba(&[1.7]).unwrap(), 1.0);
        assert!(t.predict_proba(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn constant_features_give_leaf() {
        let x = Matrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        let t = train_tree(&x, &[true, false, true], &TreeParams::default(), 0).unwrap();
        assert!(t.root.is_leaf());
    }

    #[test]
    fn empty_set_rejected() {
        let x = Matrix::new(0, 2, vec![]).unwrap();
        assert!(train_tree(&x, &[], &TreeParams::default(), 0).is_err());
    }

    #[test]
    fn hand_built_routing() {
        let t = TreeModel {
            n_features: 1,
            params: TreeParams::default(),
            root: TreeNode::Split {
                feature: 0,
                threshold: 0.5,
                gain: 1.0,
                samples: 8,
                left: Box::new(TreeNode::Leaf { fraction: 0.25, samples: 4 }),
                right: Box::new(TreeNode::Leaf { fraction: 1.0, samples: 4 }),
            },
        };
        assert_eq!(t.predict_proba(&[0.1]).unwrap(), 0.25);
    }

    #[test]
    fn tie_prefers_lowest_feature() {
        // both features separate perfectly; feature 0 must win
        let x = Matrix::from_rows(&[vec![0.0, 10.0], vec![1.0, 11.0], vec![2.0, 12.0], vec![3.0, 13.0]]).unwrap();
        let y = [false, false, true, true];
        assert_eq!(best_root_split(&x, &y, &TreeParams::default()), Some((0, 1.5)));
    }

    #[test]
    fn min_samples_leaf_respected() {
        let x = Matrix::from_rows(&(0..6).map(|i| vec![i as f64]).collect::<Vec<_>>()).unwrap();
        let y = [true, false, false, false, false, false];
        let p = TreeParams {
            min_samples_leaf: 2,
            ..Default::default()
        };
        let t = train_tree(&x, &y, &p, 0).unwrap();
        fn min_leaf(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf { samples, .. } => *samples,
                TreeNode::Split { left, right, .. } => min_leaf(left).min(min_leaf(right)),
            }
        }
        assert!(min_leaf(&t.root) >= 2);
    }
}
