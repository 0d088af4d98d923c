//! Bagged random forest over [`TreeNode`]s.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::tree::{grow_tree, FeatureSubset, TreeNode, TreeParams};
use super::{check_training_set, Classifier, Matrix};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestParams {
    pub n_trees: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub features_per_split: FeatureSubset,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            max_depth: None,
            min_samples_leaf: 1,
            features_per_split: FeatureSubset::Sqrt,
            bootstrap: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestModel {
    pub params: ForestParams,
    pub feature_names: Vec<String>,
    pub trees: Vec<TreeNode>,
}

impl Classifier for ForestModel {
    fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    fn predict_proba_unchecked(&self, x: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(x)).sum();
        sum / self.trees.len() as f64
    }
}

/// Trees are grown from independent per-tree seed streams, so the result is
/// the same with or without the `parallel` feature.
pub fn train_forest(x: &Matrix, y: &[bool], feature_names: &[String], params: &ForestParams, seed: u64) -> Result<ForestModel> {
    check_training_set(x, y)?;
    if feature_names.len() != x.n_cols() {
        return Err(Error::Dimension {
            expected: x.n_cols(),
            got: feature_names.len(),
        });
    }
    if params.n_trees == 0 {
        return Err(Error::Argument("a forest needs at least one tree".into()));
    }
    if x.rows().flatten().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("training features".into()));
    }
    let tree_params = TreeParams {
        max_depth: params.max_depth,
        min_samples_leaf: params.min_samples_leaf,
        features_per_split: params.features_per_split,
    };
    let n = x.n_rows();
    let grow_one = |t: usize| {
        let mut rng = seed::rng_for(seed, t as u64);
        let samples: Vec<usize> = if params.bootstrap {
            (0..n).map(|_| rng.random_range(0..n)).collect()
        } else {
            (0..n).collect()
        };
        grow_tree(x, y, samples, &tree_params, &mut rng)
    };
    #[cfg(feature = "parallel")]
    let trees = {
        use rayon::prelude::*;
        (0..params.n_trees).into_par_iter().map(grow_one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let trees = (0..params.n_trees).map(grow_one).collect();
    Ok(ForestModel {
        params: params.clone(),
        feature_names: feature_names.to_vec(),
        trees,
    })
}

/// Feature names with importance scores, most important first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceRanking {
    pub entries: Vec<(String, f64)>,
}

impl ImportanceRanking {
    pub fn top(&self, k: usize) -> impl Iterator<Item = &str> {
        self.entries.iter().take(k).map(|(n, _)| n.as_str())
    }
}

/// Mean decrease in impurity: per-tree gains normalized to sum to one,
/// averaged over trees that split at all, then renormalized.
pub fn feature_importance(model: &ForestModel) -> Result<ImportanceRanking> {
    let p = model.feature_names.len();
    let mut total = vec![0.0; p];
    let mut per_tree = vec![0.0; p];
    for tree in &model.trees {
        per_tree.iter_mut().for_each(|v| *v = 0.0);
        tree.for_each_split(&mut |f, gain| per_tree[f] += gain.max(0.0));
        let s: f64 = per_tree.iter().sum();
        if s > 0.0 {
            for (t, v) in total.iter_mut().zip(&per_tree) {
                *t += v / s;
            }
        }
    }
    let s: f64 = total.iter().sum();
    if s <= 0.0 {
        return Err(Error::Undefined("no tree in the forest has a split with positive gain".into()));
    }
    let mut entries: Vec<(String, f64)> = model
        .feature_names
        .iter()
        .cloned()
        .zip(total.into_iter().map(|v| v / s))
        .collect();
    // stable sort keeps feature order among equal scores
    entries.sort_by(|a, b| b.1.total_cmp(&a.1));
    Ok(ImportanceRanking { entries })
}
