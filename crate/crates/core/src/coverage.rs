//! Per-dataset indexes shared by the covering, pruning and swapping code.

use fixedbitset::FixedBitSet;

use crate::dataset::{Dataset, FeatureKind};
use crate::rules::{Condition, Rule};
use crate::scalar::Scalar;

/// Case indices of every feature sorted by value (continuous) or code
/// (categorical), ties by case index.
pub(crate) struct SortedFeatures {
    pub order: Vec<Vec<u32>>,
}

impl SortedFeatures {
    pub fn new<T: Scalar>(data: &Dataset<T>) -> Self {
        let order = (0..data.n_features())
            .map(|f| {
                let mut idx: Vec<u32> = (0..data.n() as u32).collect();
                match data.schema.kind(f) {
                    FeatureKind::Continuous => idx.sort_by(|&a, &b| {
                        data.value(a as usize, f).num().total_cmp_s(&data.value(b as usize, f).num()).then(a.cmp(&b))
                    }),
                    FeatureKind::Categorical => {
                        idx.sort_by_key(|&a| (data.value(a as usize, f).cat(), a));
                    }
                }
                idx
            })
            .collect();
        SortedFeatures { order }
    }
}

pub(crate) fn condition_bits<T: Scalar>(data: &Dataset<T>, cond: &Condition<T>) -> FixedBitSet {
    let mut bits = FixedBitSet::with_capacity(data.n());
    for (i, case) in data.cases.iter().enumerate() {
        if cond.satisfied(&case.x) {
            bits.insert(i);
        }
    }
    bits
}

pub(crate) fn all_ones(n: usize) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    b.insert_range(..);
    b
}

/// Per-condition bitsets of a rule plus `skip[j]` = AND of every condition but `j`.
pub(crate) struct RuleBits {
    pub sat: FixedBitSet,
    pub skip: Vec<FixedBitSet>,
}

impl RuleBits {
    pub fn new<T: Scalar>(data: &Dataset<T>, rule: &Rule<T>) -> Self {
        let n = data.n();
        let conds: Vec<FixedBitSet> = rule.conditions.iter().map(|c| condition_bits(data, c)).collect();
        let l = conds.len();
        // prefix[j] = AND of conds[..j], suffix[j] = AND of conds[j..]
        let mut prefix = Vec::with_capacity(l + 1);
        prefix.push(all_ones(n));
        for c in &conds {
            let mut next = prefix.last().unwrap().clone();
            next.intersect_with(c);
            prefix.push(next);
        }
        let mut suffix = vec![all_ones(n); l + 1];
        for j in (0..l).rev() {
            let mut next = suffix[j + 1].clone();
            next.intersect_with(&conds[j]);
            suffix[j] = next;
        }
        let skip = (0..l)
            .map(|j| {
                let mut b = prefix[j].clone();
                b.intersect_with(&suffix[j + 1]);
                b
            })
            .collect();
        RuleBits { sat: prefix.pop().unwrap(), skip }
    }
}

/// Distinct-value boundaries of a continuous feature along `order`: for each
/// adjacent pair of distinct values, the midpoint threshold and the number of
/// leading entries of `order` that fall at or below it.
pub(crate) fn boundaries<T: Scalar>(data: &Dataset<T>, f: usize, order: &[u32]) -> Vec<(T, usize)> {
    let mut out = Vec::new();
    for b in 1..order.len() {
        let lo = data.value(order[b - 1] as usize, f).num();
        let hi = data.value(order[b] as usize, f).num();
        if lo < hi {
            let mid = (lo + hi) * T::half();
            out.push((if mid < hi { mid } else { lo }, b));
        }
    }
    out
}
