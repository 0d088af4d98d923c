//! Probabilistic binary classifiers written from scratch.

mod forest;
mod logistic;
mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use forest::{feature_importance, train_forest, ForestModel, ForestParams, ImportanceRanking};
pub use logistic::{train_logistic, LogisticFit, LogisticModel, LogisticObjective, LogisticParams};
pub use tree::{best_root_split, train_tree, FeatureSubset, SplitCandidate, TreeModel, TreeNode, TreeParams};

/// Dense row-major feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
}

impl Matrix {
    pub fn new(n_rows: usize, n_cols: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_rows * n_cols {
            return Err(Error::Argument(format!(
                "{} values do not fill a {n_rows}x{n_cols} matrix",
                values.len()
            )));
        }
        Ok(Matrix { n_rows, n_cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n_cols) {
            return Err(Error::Argument("ragged rows".into()));
        }
        Ok(Matrix {
            n_rows: rows.len(),
            n_cols,
            values: rows.concat(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.n_cols.max(1)).take(self.n_rows)
    }

    /// Copy of the listed rows, in order.
    pub fn select(&self, rows: &[usize]) -> Matrix {
        let mut values = Vec::with_capacity(rows.len() * self.n_cols);
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        Matrix {
            n_rows: rows.len(),
            n_cols: self.n_cols,
            values,
        }
    }
}

fn check_training_set(x: &Matrix, y: &[bool]) -> Result<()> {
    if x.n_rows() == 0 {
        return Err(Error::Empty("training set".into()));
    }
    if x.n_rows() != y.len() {
        return Err(Error::Argument(format!("{} rows but {} labels", x.n_rows(), y.len())));
    }
    if x.n_cols() == 0 {
        return Err(Error::Argument("training set has no features".into()));
    }
    Ok(())
}

/// Anything that maps a feature vector to a failure probability.
pub trait Classifier {
    fn n_features(&self) -> usize;

    fn predict_proba_unchecked(&self, x: &[f64]) -> f64;

    fn predict_proba(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n_features() {
            return Err(Error::Dimension {
                expected: self.n_features(),
                got: x.len(),
            });
        }
        Ok(self.predict_proba_unchecked(x))
    }
}

/// What to train, with its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    RandomForest(ForestParams),
    DecisionTree(TreeParams),
    LogisticRegression(LogisticParams),
}

impl ModelSpec {
    pub fn random_forest() -> Self {
        ModelSpec::RandomForest(ForestParams::default())
    }

    pub fn decision_tree() -> Self {
        ModelSpec::DecisionTree(TreeParams::default())
    }

    pub fn logistic() -> Self {
        ModelSpec::LogisticRegression(LogisticParams::default())
    }

    /// `rf`, `tree` or `logreg`, with default hyperparameters.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "rf" | "random_forest" => Ok(Self::random_forest()),
            "tree" | "decision_tree" => Ok(Self::decision_tree()),
            "logreg" | "logistic" | "logistic_regression" => Ok(Self::logistic()),
            other => Err(Error::Argument(format!("unknown model {other:?}"))),
        }
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            ModelSpec::RandomForest(_) => "rf",
            ModelSpec::DecisionTree(_) => "tree",
            ModelSpec::LogisticRegression(_) => "logreg",
        }
    }

    pub fn fit(&self, x: &Matrix, y: &[bool], feature_names: &[String], seed: u64) -> Result<Model> {
        Ok(match self {
            ModelSpec::RandomForest(p) => Model::RandomForest(train_forest(x, y, feature_names, p, seed)?),
            ModelSpec::DecisionTree(p) => Model::DecisionTree(train_tree(x, y, p, seed)?),
            ModelSpec::LogisticRegression(p) => Model::LogisticRegression(train_logistic(x, y, p)?.model),
        })
    }
}

/// A trained model; serializes to self-describing JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Model {
    RandomForest(ForestModel),
    DecisionTree(TreeModel),
    LogisticRegression(LogisticModel),
}

impl Classifier for Model {
    fn n_features(&self) -> usize {
        match self {
            Model::RandomForest(m) => m.n_features(),
            Model::DecisionTree(m) => m.n_features(),
            Model::LogisticRegression(m) => m.n_features(),
        }
    }

    fn predict_proba_unchecked(&self, x: &[f64]) -> f64 {
        match self {
            Model::RandomForest(m) => m.predict_proba_unchecked(x),
            Model::DecisionTree(m) => m.predict_proba_unchecked(x),
            Model::LogisticRegression(m) => m.predict_proba_unchecked(x),
        }
    }
}

impl Model {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Deep trees nest past serde_json's default recursion limit.
    pub fn from_json(s: &str) -> Result<Self> {
        let mut de = serde_json::Deserializer::from_str(s);
        de.disable_recursion_limit();
        let m = Model::deserialize(&mut de)?;
        de.end()?;
        Ok(m)
    }
}
