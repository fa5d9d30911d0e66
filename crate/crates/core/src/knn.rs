//! k-nearest-neighbor regression and partition-restricted hybrids.
//!
//! Continuous features are min-max scaled on the training cases; a categorical
//! feature contributes 0 on a match and 1 otherwise.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::dataset::{fit_normalization, scale_01, Case, Dataset, NormalizationStats, Value};
use crate::error::{Error, Result};
use crate::rules::RuleSet;
use crate::scalar::Scalar;
use crate::tree::{tree_predict, TreeNode};

pub const DEFAULT_K: usize = 5;

/// Euclidean distance over scaled values.
pub fn distance<T: Scalar>(a: &[Value<T>], b: &[Value<T>]) -> T {
    let mut sum = T::zero();
    for (u, v) in a.iter().zip(b) {
        let d = match (u, v) {
            (Value::Num(u), Value::Num(v)) => *u - *v,
            (Value::Cat(u), Value::Cat(v)) if u == v => T::zero(),
            _ => T::one(),
        };
        sum = sum + d * d;
    }
    sum.sqrt()
}

/// Mean target of the `k` stored cases nearest to `query` (all of them if fewer),
/// distance ties resolved by stored order.
pub fn nearest_mean<T: Scalar>(cases: &[Case<T>], query: &[Value<T>], k: usize) -> Option<T> {
    if cases.is_empty() {
        return None;
    }
    let k = k.max(1).min(cases.len());
    let mut d: Vec<(T, usize)> = cases.iter().enumerate().map(|(i, c)| (distance(&c.x, query), i)).collect();
    let by = |a: &(T, usize), b: &(T, usize)| -> Ordering { a.0.total_cmp_s(&b.0).then(a.1.cmp(&b.1)) };
    if k < d.len() {
        d.select_nth_unstable_by(k - 1, by);
    }
    let sum = d[..k].iter().fold(T::zero(), |acc, &(_, i)| acc + cases[i].y);
    Some(sum / T::from_usize_s(k))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct NeighborModel<T> {
    pub k: usize,
    pub stats: NormalizationStats<T>,
    /// Training cases with scaled features.
    pub cases: Vec<Case<T>>,
}

impl<T: Scalar> NeighborModel<T> {
    pub fn fit(train: &Dataset<T>, k: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Empty);
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let stats = fit_normalization(train);
        let cases = train.cases.iter().map(|c| Case { x: scale_01(&stats, &c.x), y: c.y }).collect();
        Ok(NeighborModel { k, stats, cases })
    }
}

pub fn knn_predict<T: Scalar>(model: &NeighborModel<T>, x: &[Value<T>]) -> T {
    let q = scale_01(&model.stats, x);
    nearest_mean(&model.cases, &q, model.k).expect("neighbor model holds cases")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "model", rename_all = "lowercase", bound(deserialize = "T: Scalar"))]
pub enum HybridBase<T> {
    Rules(RuleSet<T>),
    Tree(TreeNode<T>),
}

impl<T: Scalar> HybridBase<T> {
    /// Region index: first satisfied rule (rule count for the default) or leaf index.
    pub fn region(&self, x: &[Value<T>]) -> usize {
        match self {
            HybridBase::Rules(rs) => rs.first_match(x).unwrap_or(rs.len()),
            HybridBase::Tree(t) => t.leaf_index(x),
        }
    }

    pub fn n_regions(&self) -> usize {
        match self {
            HybridBase::Rules(rs) => rs.len() + 1,
            HybridBase::Tree(t) => t.n_leaves(),
        }
    }

    pub fn predict_constant(&self, x: &[Value<T>]) -> T {
        match self {
            HybridBase::Rules(rs) => rs.predict(x),
            HybridBase::Tree(t) => tree_predict(t, x),
        }
    }
}

/// A partition model whose regions answer with the mean of the nearest training
/// cases inside the region instead of the region constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct HybridModel<T> {
    pub base: HybridBase<T>,
    pub k: usize,
    pub stats: NormalizationStats<T>,
    /// Scaled training cases of every region.
    pub rosters: Vec<Vec<Case<T>>>,
    /// Predict the region constants only.
    #[serde(default)]
    pub constant_mode: bool,
}

impl<T: Scalar> HybridModel<T> {
    pub fn fit(base: HybridBase<T>, train: &Dataset<T>, k: usize) -> Result<Self> {
        if train.is_empty() {
            return Err(Error::Empty);
        }
        if k == 0 {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        let stats = fit_normalization(train);
        let mut rosters = vec![Vec::new(); base.n_regions()];
        for c in &train.cases {
            rosters[base.region(&c.x)].push(Case { x: scale_01(&stats, &c.x), y: c.y });
        }
        Ok(HybridModel { base, k, stats, rosters, constant_mode: false })
    }
}

pub fn hybrid_predict<T: Scalar>(model: &HybridModel<T>, x: &[Value<T>]) -> T {
    if model.constant_mode {
        return model.base.predict_constant(x);
    }
    let region = model.base.region(x);
    let q = scale_01(&model.stats, x);
    nearest_mean(&model.rosters[region], &q, model.k).unwrap_or_else(|| model.base.predict_constant(x))
}
