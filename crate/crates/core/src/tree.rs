//! Binary regression trees with median leaves, split on least absolute deviation.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coverage::SortedFeatures;
use crate::dataset::{Dataset, FeatureKind, FeatureSchema, Value};
use crate::error::{Error, Result};
use crate::metrics::{mad, median_sorted};
use crate::refine::{choose, cv_estimates, estimate, LadderEntry, ModelLadder, Selection};
use crate::rules::{Condition, Rule, RuleSet, Test};
use crate::scalar::{sort_scalars, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "lowercase")]
pub enum TreeNode<T> {
    Leaf {
        value: T,
        n: usize,
        /// Sum of absolute deviations from `value` over the training cases here.
        sad: T,
    },
    Split {
        /// Cases satisfying the test go left.
        test: Condition<T>,
        value: T,
        n: usize,
        sad: T,
        left: Box<TreeNode<T>>,
        right: Box<TreeNode<T>>,
    },
}

impl<T: Scalar> TreeNode<T> {
    pub fn value(&self) -> T {
        match self {
            TreeNode::Leaf { value, .. } | TreeNode::Split { value, .. } => *value,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            TreeNode::Leaf { n, .. } | TreeNode::Split { n, .. } => *n,
        }
    }

    fn sad(&self) -> T {
        match self {
            TreeNode::Leaf { sad, .. } | TreeNode::Split { sad, .. } => *sad,
        }
    }

    pub fn n_leaves(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 1,
            TreeNode::Split { left, right, .. } => left.n_leaves() + right.n_leaves(),
        }
    }

    /// Number of internal nodes.
    pub fn n_splits(&self) -> usize {
        self.n_leaves() - 1
    }

    fn leaf_sad(&self) -> T {
        match self {
            TreeNode::Leaf { sad, .. } => *sad,
            TreeNode::Split { left, right, .. } => left.leaf_sad() + right.leaf_sad(),
        }
    }

    /// Left-to-right index of the leaf reached by `x`.
    pub fn leaf_index(&self, x: &[Value<T>]) -> usize {
        let mut node = self;
        let mut offset = 0;
        loop {
            match node {
                TreeNode::Leaf { .. } => return offset,
                TreeNode::Split { test, left, right, .. } => {
                    if test.satisfied(x) {
                        node = left;
                    } else {
                        offset += left.n_leaves();
                        node = right;
                    }
                }
            }
        }
    }

    pub fn leaf_values(&self) -> Vec<T> {
        let mut out = Vec::new();
        self.visit_leaves(&mut |v| out.push(v));
        out
    }

    fn visit_leaves(&self, f: &mut impl FnMut(T)) {
        match self {
            TreeNode::Leaf { value, .. } => f(*value),
            TreeNode::Split { left, right, .. } => {
                left.visit_leaves(f);
                right.visit_leaves(f);
            }
        }
    }

    pub fn display<'a>(&'a self, schema: &'a FeatureSchema) -> impl fmt::Display + 'a {
        TreeDisplay { root: self, schema }
    }
}

pub fn tree_predict<T: Scalar>(root: &TreeNode<T>, x: &[Value<T>]) -> T {
    let mut node = root;
    loop {
        match node {
            TreeNode::Leaf { value, .. } => return *value,
            TreeNode::Split { test, left, right, .. } => node = if test.satisfied(x) { left } else { right },
        }
    }
}

fn negate<T: Scalar>(c: &Condition<T>) -> Condition<T> {
    match c.test {
        Test::Le { threshold } => Condition::gt(c.feature, threshold),
        Test::Gt { threshold } => Condition::le(c.feature, threshold),
        Test::Eq { code } => Condition::ne(c.feature, code),
        Test::Ne { code } => Condition::eq(c.feature, code),
    }
}

/// One rule per leaf in depth-first order; the default is never reached.
pub fn tree_to_rules<T: Scalar>(root: &TreeNode<T>) -> RuleSet<T> {
    fn walk<T: Scalar>(node: &TreeNode<T>, path: &mut Vec<Condition<T>>, out: &mut Vec<Rule<T>>) {
        match node {
            TreeNode::Leaf { value, n, .. } => {
                let mut rule = Rule::new(path.clone(), *value);
                rule.covers = *n;
                out.push(rule);
            }
            TreeNode::Split { test, left, right, .. } => {
                path.push(*test);
                walk(left, path, out);
                path.pop();
                path.push(negate(test));
                walk(right, path, out);
                path.pop();
            }
        }
    }
    let mut rules = Vec::new();
    walk(root, &mut Vec::new(), &mut rules);
    RuleSet::new(rules, root.value())
}

/// Total-ordered wrapper so floats can live in a heap.
#[derive(Clone, Copy, PartialEq)]
struct Ord64<T>(T);

impl<T: Scalar> Eq for Ord64<T> {}

impl<T: Scalar> PartialOrd for Ord64<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Ord for Ord64<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp_s(&other.0)
    }
}

/// Sum of absolute deviations from the median of a growing multiset.
struct RunningSad<T> {
    lower: BinaryHeap<Ord64<T>>,
    upper: BinaryHeap<Reverse<Ord64<T>>>,
    sum_lower: T,
    sum_upper: T,
}

impl<T: Scalar> RunningSad<T> {
    fn new() -> Self {
        RunningSad { lower: BinaryHeap::new(), upper: BinaryHeap::new(), sum_lower: T::zero(), sum_upper: T::zero() }
    }

    fn push(&mut self, y: T) {
        if self.lower.peek().is_none_or(|m| y <= m.0) {
            self.lower.push(Ord64(y));
            self.sum_lower = self.sum_lower + y;
        } else {
            self.upper.push(Reverse(Ord64(y)));
            self.sum_upper = self.sum_upper + y;
        }
        // Keep |lower| == |upper| or |upper| + 1.
        if self.lower.len() > self.upper.len() + 1 {
            let v = self.lower.pop().unwrap().0;
            self.sum_lower = self.sum_lower - v;
            self.upper.push(Reverse(Ord64(v)));
            self.sum_upper = self.sum_upper + v;
        } else if self.upper.len() > self.lower.len() {
            let v = self.upper.pop().unwrap().0 .0;
            self.sum_upper = self.sum_upper - v;
            self.lower.push(Ord64(v));
            self.sum_lower = self.sum_lower + v;
        }
    }

    fn sad(&self) -> T {
        let odd = self.lower.len() > self.upper.len();
        let mid = if odd { self.lower.peek().unwrap().0 } else { T::zero() };
        self.sum_upper - self.sum_lower + mid
    }
}

fn median_and_sad<T: Scalar>(ys: &mut [T]) -> (T, T) {
    sort_scalars(ys);
    let m = median_sorted(ys);
    (m, ys.iter().fold(T::zero(), |a, &y| a + (y - m).abs()))
}

struct BestSplit<T> {
    test: Condition<T>,
    cost: T,
}

struct Grower<'a, T> {
    data: &'a Dataset<T>,
    sorted: SortedFeatures,
    min_node: usize,
    /// Scratch membership flags.
    member: Vec<bool>,
}

impl<T: Scalar> Grower<'_, T> {
    fn best_split(&mut self, cases: &[usize], parent_sad: T) -> Option<BestSplit<T>> {
        let n = cases.len();
        let min_child = self.min_node.max(1);
        if n < 2 * min_child {
            return None;
        }
        for &i in cases {
            self.member[i] = true;
        }
        let mut best: Option<BestSplit<T>> = None;
        for f in 0..self.data.n_features() {
            let order: Vec<usize> =
                self.sorted.order[f].iter().map(|&i| i as usize).filter(|&i| self.member[i]).collect();
            match self.data.schema.kind(f) {
                FeatureKind::Continuous => {
                    let x = |k: usize| self.data.value(order[k], f).num();
                    let y = |k: usize| self.data.cases[order[k]].y;
                    let mut suffix = vec![T::zero(); n + 1];
                    let mut run = RunningSad::new();
                    for k in (0..n).rev() {
                        run.push(y(k));
                        suffix[k] = run.sad();
                    }
                    let mut run = RunningSad::new();
                    for k in 0..n - 1 {
                        run.push(y(k));
                        let left = k + 1;
                        if left < min_child || n - left < min_child || !(x(k) < x(k + 1)) {
                            continue;
                        }
                        let cost = run.sad() + suffix[left];
                        if best.as_ref().is_none_or(|b| cost < b.cost) {
                            let mid = (x(k) + x(k + 1)) * T::half();
                            let t = if mid < x(k + 1) { mid } else { x(k) };
                            best = Some(BestSplit { test: Condition::le(f, t), cost });
                        }
                    }
                }
                FeatureKind::Categorical => {
                    let mut lo = 0;
                    while lo < n {
                        let code = self.data.value(order[lo], f).cat();
                        let mut hi = lo;
                        while hi < n && self.data.value(order[hi], f).cat() == code {
                            hi += 1;
                        }
                        let size = hi - lo;
                        if size >= min_child && n - size >= min_child {
                            let mut inside: Vec<T> = order[lo..hi].iter().map(|&i| self.data.cases[i].y).collect();
                            let mut outside: Vec<T> =
                                order[..lo].iter().chain(&order[hi..]).map(|&i| self.data.cases[i].y).collect();
                            let cost = median_and_sad(&mut inside).1 + median_and_sad(&mut outside).1;
                            if best.as_ref().is_none_or(|b| cost < b.cost) {
                                best = Some(BestSplit { test: Condition::eq(f, code), cost });
                            }
                        }
                        lo = hi;
                    }
                }
            }
        }
        for &i in cases {
            self.member[i] = false;
        }
        best.filter(|b| b.cost < parent_sad - T::improvement_tol(parent_sad))
    }

    fn grow(&mut self, cases: Vec<usize>) -> TreeNode<T> {
        let mut ys: Vec<T> = cases.iter().map(|&i| self.data.cases[i].y).collect();
        let (value, sad) = median_and_sad(&mut ys);
        let n = cases.len();
        let constant = ys.first() == ys.last();
        if constant {
            return TreeNode::Leaf { value, n, sad };
        }
        match self.best_split(&cases, sad) {
            None => TreeNode::Leaf { value, n, sad },
            Some(split) => {
                let (l, r): (Vec<usize>, Vec<usize>) =
                    cases.into_iter().partition(|&i| split.test.satisfied(&self.data.cases[i].x));
                TreeNode::Split {
                    test: split.test,
                    value,
                    n,
                    sad,
                    left: Box::new(self.grow(l)),
                    right: Box::new(self.grow(r)),
                }
            }
        }
    }
}

/// Recursive partitioning; every child keeps at least `min_node` cases and a
/// split is made only if it lowers the total absolute deviation.
pub fn grow_tree<T: Scalar>(train: &Dataset<T>, min_node: usize) -> Result<TreeNode<T>> {
    if train.is_empty() {
        return Err(Error::Empty);
    }
    let mut g = Grower { data: train, sorted: SortedFeatures::new(train), min_node, member: vec![false; train.n()] };
    Ok(g.grow((0..train.n()).collect()))
}

/// Weakest link of a tree: `(path, leaf-sad increase, internal nodes removed)`.
fn weakest<T: Scalar>(node: &TreeNode<T>, path: &mut Vec<bool>, best: &mut Option<(Vec<bool>, T, usize)>) {
    if let TreeNode::Split { left, right, .. } = node {
        let delta = node.sad() - node.leaf_sad();
        let removed = node.n_splits();
        let better = match best {
            None => true,
            Some((_, bd, bn)) => {
                let (a, b) = (delta / T::from_usize_s(removed), *bd / T::from_usize_s(*bn));
                a < b || (a == b && removed > *bn)
            }
        };
        if better {
            *best = Some((path.clone(), delta, removed));
        }
        path.push(true);
        weakest(left, path, best);
        path.pop();
        path.push(false);
        weakest(right, path, best);
        path.pop();
    }
}

fn collapse_at<T: Scalar>(node: &mut TreeNode<T>, path: &[bool]) {
    match path.split_first() {
        None => *node = TreeNode::Leaf { value: node.value(), n: node.n(), sad: node.sad() },
        Some((&go_left, rest)) => {
            if let TreeNode::Split { left, right, .. } = node {
                collapse_at(if go_left { left } else { right }, rest);
            }
        }
    }
}

/// Weakest-link sequence from `root` down to the root leaf, number of splits
/// strictly decreasing.
pub fn prune_tree<T: Scalar>(root: &TreeNode<T>) -> Vec<TreeNode<T>> {
    let mut out = vec![root.clone()];
    let mut tree = root.clone();
    loop {
        let mut best = None;
        weakest(&tree, &mut Vec::new(), &mut best);
        let Some((path, _, _)) = best else { break };
        collapse_at(&mut tree, &path);
        out.push(tree.clone());
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeConfig {
    pub min_node: usize,
    pub folds: usize,
    pub seed: u64,
    pub selection: Selection,
}

impl Default for TreeConfig {
    fn default() -> Self {
        TreeConfig { min_node: 3, folds: 10, seed: 1, selection: Selection::Cv }
    }
}

pub type TreeLadder<T> = ModelLadder<TreeNode<T>, T>;

/// Grow, prune, and pick the pruned tree with the lowest estimated error.
pub fn train_tree<T: Scalar>(train: &Dataset<T>, config: &TreeConfig) -> Result<(TreeNode<T>, TreeLadder<T>)> {
    let build = |d: &Dataset<T>| -> Result<Vec<TreeNode<T>>> { Ok(prune_tree(&grow_tree(d, config.min_node)?)) };
    let trees = build(train)?;
    let complexities: Vec<usize> = trees.iter().map(TreeNode::n_splits).collect();
    let y = train.y();
    let train_mads = trees
        .iter()
        .map(|t| mad(&y, &train.cases.iter().map(|c| tree_predict(t, &c.x)).collect::<Vec<_>>()))
        .collect::<Result<Vec<T>>>()?;
    let estimates = estimate(&train_mads, &complexities, train.n(), config.selection, || {
        cv_estimates(
            train,
            &complexities,
            config.folds,
            config.seed,
            |d| Ok(build(d)?.into_iter().map(|t| (t.n_splits(), t)).collect()),
            |t: &TreeNode<T>, x| tree_predict(t, x),
        )
    })?;
    let entries = trees
        .into_iter()
        .zip(complexities)
        .zip(train_mads.into_iter().zip(estimates))
        .map(|((model, complexity), (train_mad, estimated_mad))| LadderEntry { model, complexity, train_mad, estimated_mad })
        .collect();
    let ladder = choose(entries);
    Ok((ladder.chosen_entry().model.clone(), ladder))
}

struct TreeDisplay<'a, T> {
    root: &'a TreeNode<T>,
    schema: &'a FeatureSchema,
}

impl<T: Scalar> TreeDisplay<'_, T> {
    fn write(&self, f: &mut fmt::Formatter<'_>, node: &TreeNode<T>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        match node {
            TreeNode::Leaf { value, n, .. } => writeln!(f, "{pad}{} = {value} (n = {n})", self.schema.target_name),
            TreeNode::Split { test, left, right, .. } => {
                writeln!(f, "{pad}if {}:", test.display(self.schema))?;
                self.write(f, left, depth + 1)?;
                writeln!(f, "{pad}else:")?;
                self.write(f, right, depth + 1)
            }
        }
    }
}

impl<T: Scalar> fmt::Display for TreeDisplay<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, self.root, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::sad_from_median;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one_d(xs: &[f64], ys: &[f64]) -> Dataset<f64> {
        let rows: Vec<Vec<f64>> = xs.iter().map(|&v| vec![v]).collect();
        Dataset::from_rows(&["x"], "y", &rows, ys).unwrap()
    }

    fn fits(t: &TreeNode<f64>, d: &Dataset<f64>) -> Vec<f64> {
        d.cases.iter().map(|c| tree_predict(t, &c.x)).collect()
    }

    #[test]
    fn running_sad_matches_direct() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..300 {
            let mut run = RunningSad::new();
            let mut seen = Vec::new();
            for _ in 0..rng.gen_range(1..40) {
                let y = rng.gen_range(0..20) as f64;
                run.push(y);
                seen.push(y);
                assert!((run.sad() - sad_from_median(&seen)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn four_point_split() {
        let d = one_d(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 10.0, 10.0]);
        let t = grow_tree(&d, 1).unwrap();
        match &t {
            TreeNode::Split { test, left, right, .. } => {
                assert_eq!(*test, Condition::le(0, 2.5));
                assert_eq!((left.value(), right.value()), (0.0, 10.0));
            }
            _ => panic!("expected a split"),
        }
        assert_eq!(fits(&t, &d), vec![0.0, 0.0, 10.0, 10.0]);
        // Brute force over the three thresholds: 2.5 is the only zero-error one.
        for (t, want) in [(1.5, false), (2.5, true), (3.5, false)] {
            let l: Vec<f64> = d.cases.iter().filter(|c| c.x[0].num() <= t).map(|c| c.y).collect();
            let r: Vec<f64> = d.cases.iter().filter(|c| c.x[0].num() > t).map(|c| c.y).collect();
            assert_eq!(sad_from_median(&l) + sad_from_median(&r) == 0.0, want);
        }
    }

    #[test]
    fn constant_target_is_a_leaf() {
        let d = one_d(&[1.0, 2.0, 3.0], &[4.0; 3]);
        let t = grow_tree(&d, 1).unwrap();
        assert_eq!(t, TreeNode::Leaf { value: 4.0, n: 3, sad: 0.0 });
        assert_eq!(fits(&t, &d), vec![4.0; 3]);
    }

    fn figure_data() -> Dataset<f64> {
        let mut rows = Vec::new();
        let mut ys = Vec::new();
        for a in 0..8 {
            for b in 0..8 {
                rows.push(vec![a as f64, b as f64]);
                ys.push(if a <= 3 {
                    10.0
                } else if b <= 4 {
                    20.0
                } else {
                    5.0
                });
            }
        }
        Dataset::from_rows(&["x1", "x2"], "y", &rows, &ys).unwrap()
    }

    #[test]
    fn figure_split_at_root() {
        let d = figure_data();
        let t = grow_tree(&d, 3).unwrap();
        let TreeNode::Split { test, left, .. } = &t else { panic!("expected a split") };
        assert_eq!(*test, Condition::le(0, 3.5));
        assert_eq!(left.value(), 10.0);
        assert_eq!(fits(&t, &d), d.y());
    }

    #[test]
    fn figure_tree_as_rules() {
        let t = grow_tree(&figure_data(), 3).unwrap();
        let rs = tree_to_rules(&t);
        assert_eq!(rs.len(), 3);
        assert_eq!(rs.rules[0].conditions, vec![Condition::le(0, 3.5)]);
        assert_eq!(rs.rules[0].value(), 10.0);
        assert_eq!(rs.rules[2].value(), 5.0);
        // Cases satisfying rule 3 and neither rule 1 nor 2 get 5.
        let d = figure_data();
        for c in &d.cases {
            if rs.first_match(&c.x) == Some(2) {
                assert_eq!(rs.predict(&c.x), 5.0);
            }
        }
        let single = TreeNode::Leaf { value: 2.0, n: 1, sad: 0.0 };
        let rs = tree_to_rules(&single);
        assert_eq!(rs.len(), 1);
        assert!(rs.rules[0].conditions.is_empty());
    }

    #[test]
    fn leaves_partition_and_hold_medians() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let n = rng.gen_range(2..80);
            let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![rng.gen_range(0..10) as f64, rng.gen_range(0.0..1.0)]).collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.gen_range(0..30) as f64).collect();
            let d = Dataset::from_rows(&["a", "b"], "y", &rows, &ys).unwrap();
            let t = grow_tree(&d, rng.gen_range(1..5)).unwrap();
            let leaves = t.leaf_values();
            let mut rosters = vec![Vec::new(); leaves.len()];
            for c in &d.cases {
                rosters[t.leaf_index(&c.x)].push(c.y);
            }
            assert_eq!(rosters.iter().map(Vec::len).sum::<usize>(), n);
            for (r, v) in rosters.iter().zip(&leaves) {
                assert_eq!(crate::metrics::median(r).unwrap(), *v);
            }
            let total: f64 = rosters.iter().map(|r| sad_from_median(r)).sum();
            assert!(total <= sad_from_median(&ys) + 1e-9);
        }
    }

    #[test]
    fn pruning_sequence() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rows: Vec<Vec<f64>> = (0..120).map(|_| vec![rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]).collect();
        let ys: Vec<f64> = (0..120).map(|_| rng.gen_range(0.0..1.0)).collect();
        let d = Dataset::from_rows(&["a", "b"], "y", &rows, &ys).unwrap();
        let seq = prune_tree(&grow_tree(&d, 3).unwrap());
        for w in seq.windows(2) {
            assert!(w[1].n_splits() < w[0].n_splits());
        }
        assert!(matches!(seq.last().unwrap(), TreeNode::Leaf { .. }));

        // Pure noise: the selected tree is small and no better than the constant by much in CV terms.
        let (chosen, ladder) = train_tree(&d, &TreeConfig::default()).unwrap();
        let root_est = ladder.entries.last().unwrap().estimated_mad;
        assert!(ladder.chosen_entry().estimated_mad <= root_est);
        assert!(chosen.n_splits() <= 3, "chose {} splits on noise", chosen.n_splits());
    }

    #[test]
    fn zero_delta_collapse_first() {
        // The right subtree split separates equal medians: collapsing it costs nothing.
        let leaf = |v: f64, n: usize, sad: f64| Box::new(TreeNode::Leaf { value: v, n, sad });
        let t = TreeNode::Split {
            test: Condition::le(0, 5.0),
            value: 3.0,
            n: 6,
            sad: 20.0,
            left: leaf(0.0, 3, 1.0),
            right: Box::new(TreeNode::Split { test: Condition::le(0, 8.0), value: 9.0, n: 3, sad: 2.0, left: leaf(9.0, 2, 1.0), right: leaf(9.0, 1, 1.0) }),
        };
        let seq = prune_tree(&t);
        let TreeNode::Split { right, .. } = &seq[1] else { panic!() };
        assert!(matches!(**right, TreeNode::Leaf { .. }));
    }

    #[test]
    fn tree_rules_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        fn random_tree(rng: &mut ChaCha8Rng, depth: usize) -> TreeNode<f64> {
            if depth == 0 || rng.gen_bool(0.3) {
                return TreeNode::Leaf { value: rng.gen_range(0..100) as f64, n: 1, sad: 0.0 };
            }
            let test = if rng.gen_bool(0.7) {
                Condition::le(rng.gen_range(0..2), rng.gen_range(0..10) as f64 + 0.5)
            } else {
                Condition::eq(2, rng.gen_range(0..3))
            };
            TreeNode::Split {
                test,
                value: 0.0,
                n: 1,
                sad: 0.0,
                left: Box::new(random_tree(rng, depth - 1)),
                right: Box::new(random_tree(rng, depth - 1)),
            }
        }
        for _ in 0..100 {
            let t = random_tree(&mut rng, 5);
            let rs = tree_to_rules(&t);
            for _ in 0..50 {
                let x = vec![
                    Value::Num(rng.gen_range(0..11) as f64),
                    Value::Num(rng.gen_range(0..11) as f64),
                    Value::Cat(rng.gen_range(0..4)),
                ];
                assert_eq!(tree_predict(&t, &x), rs.predict(&x));
            }
        }
    }

    #[test]
    fn display_indents() {
        let d = one_d(&[1.0, 2.0, 3.0, 4.0], &[0.0, 0.0, 10.0, 10.0]);
        let t = grow_tree(&d, 1).unwrap();
        let text = t.display(&d.schema).to_string();
        assert_eq!(text, "if x <= 2.5:\n  y = 0 (n = 2)\nelse:\n  y = 10 (n = 2)\n");
    }
}
