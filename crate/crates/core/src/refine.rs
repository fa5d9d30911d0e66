//! Weakest-link pruning, condition swapping and the train/select pipeline.
//!
//! Both pruning and swapping score candidates with the current rule values
//! held fixed, then re-derive every region median once the chosen change is
//! applied.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::coverage::{boundaries, RuleBits, SortedFeatures};
use crate::dataset::{Dataset, FeatureKind, Value};
use crate::error::{Error, Result};
use crate::eval::FoldPlan;
use crate::induction::induce_covering;
use crate::metrics::{gcv, mad, median};
use crate::pclass::{p_class_with, ClassDistance};
use crate::rules::{Condition, Rule, RuleSet};
use crate::scalar::Scalar;

/// First-match bookkeeping of a rule set over the training cases, values frozen.
struct Frozen<T> {
    /// Rule values followed by the default value.
    values: Vec<T>,
    /// First satisfied rule, `rules.len()` for the default.
    first: Vec<usize>,
    /// First satisfied rule after `first`.
    second: Vec<usize>,
    loss: Vec<T>,
    /// Region size per rule (and default).
    sizes: Vec<usize>,
    bits: Vec<RuleBits>,
}

impl<T: Scalar> Frozen<T> {
    fn new(rs: &RuleSet<T>, data: &Dataset<T>) -> Self {
        Self::with_bits(rs, data, rs.rules.iter().map(|rule| RuleBits::new(data, rule)).collect())
    }

    fn with_bits(rs: &RuleSet<T>, data: &Dataset<T>, bits: Vec<RuleBits>) -> Self {
        let r = rs.len();
        let mut values: Vec<T> = rs.rules.iter().map(Rule::value).collect();
        values.push(rs.default_value());
        let next = |i: usize, from: usize| (from..r).find(|&q| bits[q].sat.contains(i)).unwrap_or(r);
        let first: Vec<usize> = (0..data.n()).map(|i| next(i, 0)).collect();
        let second: Vec<usize> = first.iter().enumerate().map(|(i, &f)| if f == r { r } else { next(i, f + 1) }).collect();
        let loss = first.iter().enumerate().map(|(i, &f)| (data.cases[i].y - values[f]).abs()).collect();
        let mut sizes = vec![0; r + 1];
        for &f in &first {
            sizes[f] += 1;
        }
        Frozen { values, first, second, loss, sizes, bits }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PruneKind {
    DeleteRule,
    DeleteCondition,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PruneCandidate<T> {
    pub kind: PruneKind,
    pub rule: usize,
    pub condition: Option<usize>,
    /// Increase in training MAD with the current values held fixed.
    pub delta: T,
    pub n_removed: usize,
}

impl<T: Scalar> PruneCandidate<T> {
    pub fn ratio(&self) -> T {
        self.delta / T::from_usize_s(self.n_removed)
    }

    /// Strictly preferred over `other`; candidates are listed in rule order, delete-rule first.
    fn beats(&self, other: &PruneCandidate<T>) -> bool {
        let (a, b) = (self.ratio(), other.ratio());
        a < b || (a == b && self.n_removed > other.n_removed)
    }
}

/// Every deletion available in `rs`, in rule order, the rule deletion before its conditions.
pub fn prune_candidates<T: Scalar>(rs: &RuleSet<T>, train: &Dataset<T>) -> Vec<PruneCandidate<T>> {
    candidates_from(rs, train, &Frozen::new(rs, train))
}

fn candidates_from<T: Scalar>(rs: &RuleSet<T>, train: &Dataset<T>, fz: &Frozen<T>) -> Vec<PruneCandidate<T>> {
    let n = T::from_usize_s(train.n().max(1));
    let y = |i: usize| train.cases[i].y;
    let mut out = Vec::new();
    for (r, rule) in rs.rules.iter().enumerate() {
        let mut delta = T::zero();
        for (i, &f) in fz.first.iter().enumerate() {
            if f == r {
                delta = delta + (y(i) - fz.values[fz.second[i]]).abs() - fz.loss[i];
            }
        }
        out.push(PruneCandidate {
            kind: PruneKind::DeleteRule,
            rule: r,
            condition: None,
            delta: delta / n,
            n_removed: rule.conditions.len().max(1),
        });
        let v = fz.values[r];
        for (j, skip) in fz.bits[r].skip.iter().enumerate() {
            let mut delta = T::zero();
            for i in skip.ones() {
                if fz.first[i] > r {
                    delta = delta + (y(i) - v).abs() - fz.loss[i];
                }
            }
            out.push(PruneCandidate { kind: PruneKind::DeleteCondition, rule: r, condition: Some(j), delta: delta / n, n_removed: 1 });
        }
    }
    out
}

pub fn apply_prune<T: Scalar>(rs: &RuleSet<T>, c: &PruneCandidate<T>) -> RuleSet<T> {
    let mut out = rs.clone();
    match c.condition {
        None => {
            out.rules.remove(c.rule);
        }
        Some(j) => {
            out.rules[c.rule].conditions.remove(j);
        }
    }
    out
}

/// Remove the weakest link (smallest MAD increase per removed condition) and refresh the medians.
pub fn prune_step<T: Scalar>(rs: &RuleSet<T>, train: &Dataset<T>) -> Result<RuleSet<T>> {
    let mut bits = rs.rules.iter().map(|rule| RuleBits::new(train, rule)).collect();
    prune_step_cached(rs, train, &mut bits)
}

/// `prune_step` with the per-rule bitsets kept in step with the rules.
fn prune_step_cached<T: Scalar>(rs: &RuleSet<T>, train: &Dataset<T>, bits: &mut Vec<RuleBits>) -> Result<RuleSet<T>> {
    let fz = Frozen::with_bits(rs, train, std::mem::take(bits));
    let candidates = candidates_from(rs, train, &fz);
    *bits = fz.bits;
    let mut best: Option<&PruneCandidate<T>> = None;
    for c in &candidates {
        if best.is_none_or(|b| c.beats(b)) {
            best = Some(c);
        }
    }
    let best = best.ok_or(Error::NothingPrunable)?;
    let out = apply_prune(rs, best);
    match best.condition {
        None => {
            bits.remove(best.rule);
        }
        Some(_) => bits[best.rule] = RuleBits::new(train, &out.rules[best.rule]),
    }
    let out_len = out.len();
    let out = out.recompute_medians(train);
    // Rules left with an empty region are dropped by the median refresh.
    if out.len() != out_len {
        *bits = out.rules.iter().map(|rule| RuleBits::new(train, rule)).collect();
    }
    Ok(out)
}

/// Candidate tests over the full training set, shared by every swap round.
struct SwapPool<T> {
    sorted: SortedFeatures,
    /// `rank[f][i]`: position of case `i` in `sorted.order[f]`.
    rank: Vec<Vec<usize>>,
    /// `cut_after[f][p]`: index of the first cut of `f` above sorted position `p`.
    cut_after: Vec<Vec<usize>>,
    cuts: Vec<Vec<(T, usize)>>,
    /// Categorical features: `(code, start, end)` runs of the sorted order.
    groups: Vec<Vec<(u32, usize, usize)>>,
}

impl<T: Scalar> SwapPool<T> {
    fn new(data: &Dataset<T>) -> Self {
        let sorted = SortedFeatures::new(data);
        let mut cuts = Vec::new();
        let mut groups = Vec::new();
        for (f, order) in sorted.order.iter().enumerate() {
            match data.schema.kind(f) {
                FeatureKind::Continuous => {
                    cuts.push(boundaries(data, f, order));
                    groups.push(Vec::new());
                }
                FeatureKind::Categorical => {
                    let mut g: Vec<(u32, usize, usize)> = Vec::new();
                    for (k, &i) in order.iter().enumerate() {
                        let code = data.value(i as usize, f).cat();
                        match g.last_mut() {
                            Some(last) if last.0 == code => last.2 = k + 1,
                            _ => g.push((code, k, k + 1)),
                        }
                    }
                    cuts.push(Vec::new());
                    groups.push(g);
                }
            }
        }
        let rank = sorted
            .order
            .iter()
            .map(|order| {
                let mut rank = vec![0; order.len()];
                for (k, &i) in order.iter().enumerate() {
                    rank[i as usize] = k;
                }
                rank
            })
            .collect();
        let cut_after = cuts
            .iter()
            .map(|c: &Vec<(T, usize)>| (0..data.n()).map(|p| c.partition_point(|&(_, b)| b <= p)).collect())
            .collect();
        SwapPool { sorted, rank, cut_after, cuts, groups }
    }
}

struct Swap<T> {
    rule: usize,
    slot: usize,
    cond: Condition<T>,
    delta: T,
}

/// Buffers reused across slot scans.
struct Scratch<T> {
    marks: FixedBitSet,
    gain: Vec<T>,
    s_list: Vec<usize>,
    s_count: Vec<usize>,
    removed: Vec<usize>,
    pos: Vec<usize>,
}

impl<T: Scalar> Scratch<T> {
    fn new(n: usize) -> Self {
        Scratch { marks: FixedBitSet::with_capacity(n), gain: vec![T::zero(); n], s_list: Vec::new(), s_count: Vec::new(), removed: Vec::new(), pos: Vec::new() }
    }
}

/// Best single-condition replacement in rule `r`, slot `j`, improving on `best`.
fn scan_slot<T: Scalar>(
    rs: &RuleSet<T>,
    data: &Dataset<T>,
    fz: &Frozen<T>,
    pool: &SwapPool<T>,
    r: usize,
    j: usize,
    tol: T,
    best: &mut Option<Swap<T>>,
    scratch: &mut Scratch<T>,
) {
    let nr = rs.len();
    let rule = &rs.rules[r];
    let Scratch { marks, gain, s_list, s_count, removed, pos } = scratch;
    // Cases whose outcome depends on the replaced test: they satisfy the rest of
    // rule r and no earlier rule.
    // gain[i] = loss if rule r fires minus loss if it does not
    let mut base = T::zero();
    s_count.clear();
    s_count.resize(nr + 1, 0);
    removed.clear();
    removed.resize(nr + 1, 0);
    s_list.clear();
    for i in fz.bits[r].skip[j].ones() {
        let f = fz.first[i];
        if f < r {
            continue;
        }
        s_list.push(i);
        let y = data.cases[i].y;
        let fire = (y - fz.values[r]).abs();
        let skip = if f == r { (y - fz.values[fz.second[i]]).abs() } else { fz.loss[i] };
        base = base + skip - fz.loss[i];
        gain[i] = fire - skip;
        s_count[f] += 1;
    }
    // Later rules whose whole region lies in S; they must keep at least one case.
    let full: Vec<bool> = (0..nr).map(|q| q > r && fz.sizes[q] > 0 && s_count[q] == fz.sizes[q]).collect();
    let n_full = full.iter().filter(|&&b| b).count();
    let total_gain = s_list.iter().fold(T::zero(), |a, &i| a + gain[i]);
    // No replacement can beat firing on exactly the cases that gain.
    let bound = s_list.iter().fold(base, |a, &i| if gain[i] < T::zero() { a + gain[i] } else { a });
    let s_list: &[usize] = s_list;
    if best.as_ref().is_some_and(|b| bound >= b.delta) || bound >= -tol {
        return;
    }
    let s_total: usize = s_count[r..].iter().sum();

    let blocked = |c: &Condition<T>| rule.conditions.iter().enumerate().any(|(k, o)| k != j && o.same_slot(c));
    let mut consider = |cond: Condition<T>, delta: T| {
        if best.as_ref().is_none_or(|b| delta < b.delta) && !blocked(&cond) && cond != rule.conditions[j] {
            *best = Some(Swap { rule: r, slot: j, cond, delta });
        }
    };

    // Only cases in S change outcome, so each feature is walked along the sorted
    // positions of S; a run of cuts with no S case between them is represented
    // by its first cut.
    for (f, order) in pool.sorted.order.iter().enumerate() {
        marks.clear();
        for &i in s_list {
            marks.insert(pool.rank[f][i]);
        }
        match data.schema.kind(f) {
            FeatureKind::Continuous => {
                let cuts = &pool.cuts[f];
                let after = &pool.cut_after[f];
                // full rules with no case yet on the `<=` side
                let mut untouched_full = n_full;
                // rules emptied by the `<=` side
                let mut emptied_le = 0usize;
                let (mut acc, mut fired) = (T::zero(), 0usize);
                let mut emit = |c: usize, acc: T, fired: usize, emptied_le: usize, untouched_full: usize| {
                    let t = cuts[c].0;
                    if fired > 0 && emptied_le == 0 {
                        consider(Condition::le(f, t), base + acc);
                    }
                    if s_total > fired && untouched_full == 0 {
                        consider(Condition::gt(f, t), base + total_gain - acc);
                    }
                };
                // S cases sharing the first cut above them form a group; the
                // candidate at that cut sees every group up to and including it.
                let mut group = None;
                for p in marks.ones() {
                    let cp = after[p];
                    if group != Some(cp) {
                        match group {
                            None if cp > 0 => emit(0, acc, fired, emptied_le, untouched_full),
                            Some(g) if g < cuts.len() => emit(g, acc, fired, emptied_le, untouched_full),
                            _ => {}
                        }
                        group = Some(cp);
                    }
                    let i = order[p] as usize;
                    acc = acc + gain[i];
                    fired += 1;
                    // Only a full rule can be emptied by either side.
                    if n_full > 0 {
                        let q = fz.first[i];
                        if q < nr && full[q] {
                            removed[q] += 1;
                            if removed[q] == fz.sizes[q] {
                                emptied_le += 1;
                            }
                            if removed[q] == 1 {
                                untouched_full -= 1;
                            }
                        }
                    }
                }
                match group {
                    None if !cuts.is_empty() => emit(0, acc, fired, emptied_le, untouched_full),
                    Some(g) if g < cuts.len() => emit(g, acc, fired, emptied_le, untouched_full),
                    _ => {}
                }
                if n_full > 0 {
                    for &i in s_list {
                        removed[fz.first[i]] = 0;
                    }
                }
            }
            FeatureKind::Categorical => {
                pos.clear();
                pos.extend(marks.ones());
                let (mut p, mut start) = (0, 0);
                for &(code, lo, hi) in &pool.groups[f] {
                    for &k in &pos[start..p] {
                        removed[fz.first[order[k] as usize]] = 0;
                    }
                    start = p;
                    let (mut acc, mut fired) = (T::zero(), 0usize);
                    while p < pos.len() && pos[p] < hi {
                        debug_assert!(pos[p] >= lo);
                        let i = order[pos[p]] as usize;
                        acc = acc + gain[i];
                        fired += 1;
                        removed[fz.first[i]] += 1;
                        p += 1;
                    }
                    let eq_empties = (r + 1..nr).any(|q| fz.sizes[q] > 0 && removed[q] == fz.sizes[q]);
                    let ne_empties = (r + 1..nr).any(|q| full[q] && removed[q] == 0);
                    if fired > 0 && !eq_empties {
                        consider(Condition::eq(f, code), base + acc);
                    }
                    if s_total > fired && !ne_empties {
                        consider(Condition::ne(f, code), base + total_gain - acc);
                    }
                }
                for &i in s_list {
                    removed[fz.first[i]] = 0;
                }
            }
        }
    }
}

/// Best-improvement condition swapping at fixed size. Each accepted swap
/// strictly lowers the training error under the current values; the medians
/// are recomputed after every swap.
pub fn swap_optimize<T: Scalar>(rs: &RuleSet<T>, train: &Dataset<T>) -> RuleSet<T> {
    let mut rs = rs.recompute_medians(train);
    if train.is_empty() {
        return rs;
    }
    let pool = SwapPool::new(train);
    // Deltas are sums of differences of losses as large as the biggest |y|.
    let y_max = train.cases.iter().fold(T::zero(), |a, c| a.max(c.y.abs()));
    let tol = T::improvement_tol(y_max * T::from_usize_s(train.n()));
    let mut scratch = Scratch::new(train.n());
    let mut bits: Vec<RuleBits> = rs.rules.iter().map(|rule| RuleBits::new(train, rule)).collect();
    loop {
        let fz = Frozen::with_bits(&rs, train, bits);
        let mut best: Option<Swap<T>> = None;
        for r in 0..rs.len() {
            for j in 0..rs.rules[r].conditions.len() {
                scan_slot(&rs, train, &fz, &pool, r, j, tol, &mut best, &mut scratch);
            }
        }
        bits = fz.bits;
        match best {
            Some(s) if s.delta < -tol => {
                rs.rules[s.rule].conditions[s.slot] = s.cond;
                bits[s.rule] = RuleBits::new(train, &rs.rules[s.rule]);
                let len = rs.len();
                rs = rs.recompute_medians(train);
                if rs.len() != len {
                    bits = rs.rules.iter().map(|rule| RuleBits::new(train, rule)).collect();
                }
            }
            _ => return rs,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Selection {
    #[default]
    Cv,
    Gcv,
}

impl std::str::FromStr for Selection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cv" => Ok(Selection::Cv),
            "gcv" => Ok(Selection::Gcv),
            _ => Err(Error::InvalidArgument(format!("unknown selection `{s}` (expected cv or gcv)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub k_classes: usize,
    /// Minimum number of current-class cases a grown rule must keep.
    pub min_cover: usize,
    /// Optimize and save once complexity drops below this fraction of the last saved model.
    pub checkpoint_ratio: f64,
    pub folds: usize,
    pub seed: u64,
    pub selection: Selection,
    #[serde(default)]
    pub distance: ClassDistance,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            k_classes: 4,
            min_cover: 3,
            checkpoint_ratio: 0.9,
            folds: 10,
            seed: 1,
            selection: Selection::Cv,
            distance: ClassDistance::Absolute,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_classes == 0 {
            return Err(Error::InvalidArgument("k_classes must be at least 1".into()));
        }
        if self.min_cover == 0 {
            return Err(Error::InvalidArgument("min_cover must be at least 1".into()));
        }
        if !(self.checkpoint_ratio > 0.0 && self.checkpoint_ratio <= 1.0) {
            return Err(Error::InvalidArgument(format!("checkpoint_ratio must be in (0, 1], got {}", self.checkpoint_ratio)));
        }
        if self.selection == Selection::Cv && self.folds < 2 {
            return Err(Error::InvalidArgument("internal cross-validation needs at least 2 folds".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry<M, T> {
    pub model: M,
    pub complexity: usize,
    pub train_mad: T,
    pub estimated_mad: T,
}

/// Progressively smaller models, complexity strictly decreasing, ending in a constant model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelLadder<M, T> {
    pub entries: Vec<LadderEntry<M, T>>,
    pub chosen: usize,
}

impl<M, T: Scalar> ModelLadder<M, T> {
    pub fn chosen_entry(&self) -> &LadderEntry<M, T> {
        &self.entries[self.chosen]
    }

    /// One line per saved model: complexity, training MAD, estimated MAD.
    pub fn dump(&self) -> String {
        let mut s = String::from("complexity,train_mad,estimated_mad,chosen\n");
        for (i, e) in self.entries.iter().enumerate() {
            s.push_str(&format!("{},{},{},{}\n", e.complexity, e.train_mad, e.estimated_mad, i == self.chosen));
        }
        s
    }
}

pub type RuleLadder<T> = ModelLadder<RuleSet<T>, T>;

/// Covering set, then pruned-and-optimized checkpoints down to the default rule.
pub fn build_ladder<T: Scalar>(train: &Dataset<T>, config: &PipelineConfig) -> Result<Vec<RuleSet<T>>> {
    if train.is_empty() {
        return Err(Error::Empty);
    }
    let y = train.y();
    let assignment = p_class_with(&y, config.k_classes.min(train.n()), config.distance)?;
    let mut rs = induce_covering(train, &assignment, config.min_cover)?;
    let mut ladder = vec![rs.clone()];
    while !rs.is_empty() {
        let target = config.checkpoint_ratio * ladder.last().unwrap().complexity() as f64;
        let mut bits = rs.rules.iter().map(|rule| RuleBits::new(train, rule)).collect();
        while !rs.is_empty() && rs.complexity() as f64 >= target {
            rs = prune_step_cached(&rs, train, &mut bits)?;
        }
        if rs.is_empty() {
            break;
        }
        rs = swap_optimize(&rs, train);
        ladder.push(rs.clone());
    }
    let constant = RuleSet::default_only(median(&y)?).recompute_medians(train);
    if ladder.last().unwrap().complexity() == 0 {
        *ladder.last_mut().unwrap() = constant;
    } else {
        ladder.push(constant);
    }
    Ok(ladder)
}

/// Index of the entry whose complexity is closest to `c`, preferring the smaller on ties.
pub(crate) fn closest_complexity(complexities: &[usize], c: usize) -> usize {
    let mut best = 0;
    for (i, &k) in complexities.iter().enumerate() {
        let (d, bd) = (k.abs_diff(c), complexities[best].abs_diff(c));
        if d < bd || (d == bd && k < complexities[best]) {
            best = i;
        }
    }
    best
}

/// Cross-validated error of each model size. `build` trains a ladder on a
/// training portion and returns `(complexity, model)` pairs; every fold's
/// model nearest in complexity to each of `complexities` is scored on the
/// held-out cases.
pub fn cv_estimates<T, M, B, P>(
    train: &Dataset<T>,
    complexities: &[usize],
    folds: usize,
    seed: u64,
    build: B,
    predict: P,
) -> Result<Vec<T>>
where
    T: Scalar,
    B: Fn(&Dataset<T>) -> Result<Vec<(usize, M)>>,
    P: Fn(&M, &[Value<T>]) -> T,
{
    let folds = folds.min(train.n());
    let plan = FoldPlan::new(train.n(), folds, seed)?;
    let mut sums = vec![T::zero(); complexities.len()];
    for fold in 0..folds {
        let (tr, te) = plan.split(fold);
        let fold_train = train.subset(&tr);
        let models = build(&fold_train).map_err(|e| Error::Fold { fold, source: Box::new(e) })?;
        let sizes: Vec<usize> = models.iter().map(|(c, _)| *c).collect();
        for (slot, &c) in complexities.iter().enumerate() {
            let model = &models[closest_complexity(&sizes, c)].1;
            for &i in &te {
                let case = &train.cases[i];
                sums[slot] = sums[slot] + (case.y - predict(model, &case.x)).abs();
            }
        }
    }
    let n = T::from_usize_s(train.n());
    Ok(sums.into_iter().map(|s| s / n).collect())
}

/// Fill estimates and pick the lowest estimated error, ties going to the simpler model.
pub(crate) fn choose<M, T: Scalar>(entries: Vec<LadderEntry<M, T>>) -> ModelLadder<M, T> {
    let mut chosen = 0;
    for (i, e) in entries.iter().enumerate() {
        let b = &entries[chosen];
        if e.estimated_mad < b.estimated_mad || (e.estimated_mad == b.estimated_mad && e.complexity < b.complexity) {
            chosen = i;
        }
    }
    ModelLadder { entries, chosen }
}

pub(crate) fn estimate<T: Scalar>(
    train_mads: &[T],
    complexities: &[usize],
    n: usize,
    selection: Selection,
    cv: impl FnOnce() -> Result<Vec<T>>,
) -> Result<Vec<T>> {
    match selection {
        Selection::Gcv => train_mads
            .iter()
            .zip(complexities)
            .map(|(&m, &c)| if c < n { gcv(m, T::from_usize_s(c), n) } else { Ok(T::infinity()) })
            .collect(),
        Selection::Cv if n >= 2 => cv(),
        Selection::Cv => Ok(train_mads.to_vec()),
    }
}

fn training_mad<T: Scalar>(rs: &RuleSet<T>, train: &Dataset<T>) -> Result<T> {
    let pred: Vec<T> = train.cases.iter().map(|c| rs.predict(&c.x)).collect();
    mad(&train.y(), &pred)
}

/// Pseudo-classes, covering, pruning/optimizing ladder and model selection.
pub fn train_pipeline<T: Scalar>(train: &Dataset<T>, config: &PipelineConfig) -> Result<(RuleSet<T>, RuleLadder<T>)> {
    config.validate()?;
    let models = build_ladder(train, config)?;
    let complexities: Vec<usize> = models.iter().map(RuleSet::complexity).collect();
    let train_mads = models.iter().map(|m| training_mad(m, train)).collect::<Result<Vec<T>>>()?;
    let estimates = estimate(&train_mads, &complexities, train.n(), config.selection, || {
        cv_estimates(
            train,
            &complexities,
            config.folds,
            config.seed,
            |d| Ok(build_ladder(d, config)?.into_iter().map(|m| (m.complexity(), m)).collect()),
            |m: &RuleSet<T>, x| m.predict(x),
        )
    })?;
    let entries = models
        .into_iter()
        .zip(complexities)
        .zip(train_mads.into_iter().zip(estimates))
        .map(|((model, complexity), (train_mad, estimated_mad))| LadderEntry { model, complexity, train_mad, estimated_mad })
        .collect();
    let ladder = choose(entries);
    Ok((ladder.chosen_entry().model.clone(), ladder))
}
