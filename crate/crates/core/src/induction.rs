//! Covering rule induction over pseudo-classes.
//!
//! Classes are covered one at a time in ascending order of their mean. Each
//! rule is grown greedily: the condition that leaves the fewest covered cases
//! of later classes is added (ties: more current-class coverage, lower feature
//! index, smaller threshold), and after every addition single conditions are
//! swapped for candidates that exclude more later-class cases without losing
//! current-class coverage. Cases a rule covers leave the live set. The last
//! class is repeatedly split in two and its lower half covered, until fewer
//! than `m` cases remain for the default rule.

use crate::coverage::{boundaries, SortedFeatures};
use crate::dataset::{Dataset, FeatureKind};
use crate::error::{Error, Result};
use crate::pclass::{split_in_two, PseudoClassAssignment};
use crate::rules::{Condition, Rule, RuleSet};
use crate::scalar::Scalar;

/// Live (not yet covered) cases and which of them belong to the class being covered.
#[derive(Clone, Debug)]
pub struct CoverState<'a, T> {
    pub data: &'a Dataset<T>,
    /// Case indices into `data`, ascending.
    pub live: Vec<usize>,
    /// Indexed like `live`.
    pub positive: Vec<bool>,
}

impl<'a, T: Scalar> CoverState<'a, T> {
    pub fn new(data: &'a Dataset<T>, live: Vec<usize>, positive: impl Fn(usize) -> bool) -> Self {
        let positive = live.iter().map(|&i| positive(i)).collect();
        CoverState { data, live, positive }
    }

    pub fn positives(&self) -> usize {
        self.positive.iter().filter(|&&p| p).count()
    }
}

/// Candidate tests over the live cases: `<=`/`>` at midpoints between adjacent
/// distinct values of each continuous feature, `=`/`!=` for each value of each
/// categorical feature. Constant features yield nothing.
pub fn enumerate_conditions<T: Scalar>(data: &Dataset<T>, live: &[usize]) -> Vec<Condition<T>> {
    let sorted = SortedFeatures::new(data);
    let positive = vec![false; live.len()];
    let view = LiveView::new(data, &sorted, live, &positive);
    let mut out = Vec::new();
    view.scan(&vec![true; live.len()], |c, _, _| out.push(c));
    out
}

enum FeatureView<T> {
    Continuous { order: Vec<u32>, cuts: Vec<(T, usize)> },
    Categorical { order: Vec<u32>, groups: Vec<(u32, usize, usize)> },
}

/// Live cases indexed by position, with per-feature sort orders.
struct LiveView<'a, T> {
    data: &'a Dataset<T>,
    live: &'a [usize],
    positive: &'a [bool],
    features: Vec<FeatureView<T>>,
}

impl<'a, T: Scalar> LiveView<'a, T> {
    fn new(data: &'a Dataset<T>, sorted: &SortedFeatures, live: &'a [usize], positive: &'a [bool]) -> Self {
        let mut pos_of = vec![u32::MAX; data.n()];
        for (p, &i) in live.iter().enumerate() {
            pos_of[i] = p as u32;
        }
        let features = sorted
            .order
            .iter()
            .enumerate()
            .map(|(f, order)| {
                let order_live: Vec<u32> = order.iter().map(|&i| pos_of[i as usize]).filter(|&p| p != u32::MAX).collect();
                match data.schema.kind(f) {
                    FeatureKind::Continuous => {
                        let cases: Vec<u32> = order_live.iter().map(|&p| live[p as usize] as u32).collect();
                        let cuts = boundaries(data, f, &cases);
                        FeatureView::Continuous { order: order_live, cuts }
                    }
                    FeatureKind::Categorical => {
                        let mut groups: Vec<(u32, usize, usize)> = Vec::new();
                        for (k, &p) in order_live.iter().enumerate() {
                            let code = data.value(live[p as usize], f).cat();
                            match groups.last_mut() {
                                Some(g) if g.0 == code => g.2 = k + 1,
                                _ => groups.push((code, k, k + 1)),
                            }
                        }
                        if groups.len() < 2 {
                            groups.clear();
                        }
                        FeatureView::Categorical { order: order_live, groups }
                    }
                }
            })
            .collect();
        LiveView { data, live, positive, features }
    }

    /// Report `(condition, true positives, false positives)` among `covered` for every candidate,
    /// in feature order, then ascending threshold (or code), `<=`/`=` before `>`/`!=`.
    fn scan(&self, covered: &[bool], mut emit: impl FnMut(Condition<T>, usize, usize)) {
        let (tp_all, fp_all) = self.counts(covered);
        for (f, fv) in self.features.iter().enumerate() {
            match fv {
                FeatureView::Continuous { order, cuts } => {
                    let (mut tp, mut fp, mut k) = (0, 0, 0);
                    for &(t, b) in cuts {
                        while k < b {
                            let p = order[k] as usize;
                            if covered[p] {
                                if self.positive[p] {
                                    tp += 1;
                                } else {
                                    fp += 1;
                                }
                            }
                            k += 1;
                        }
                        emit(Condition::le(f, t), tp, fp);
                        emit(Condition::gt(f, t), tp_all - tp, fp_all - fp);
                    }
                }
                FeatureView::Categorical { order, groups } => {
                    for &(code, lo, hi) in groups {
                        let (mut tp, mut fp) = (0, 0);
                        for &p in &order[lo..hi] {
                            let p = p as usize;
                            if covered[p] {
                                if self.positive[p] {
                                    tp += 1;
                                } else {
                                    fp += 1;
                                }
                            }
                        }
                        emit(Condition::eq(f, code), tp, fp);
                        emit(Condition::ne(f, code), tp_all - tp, fp_all - fp);
                    }
                }
            }
        }
    }

    fn counts(&self, covered: &[bool]) -> (usize, usize) {
        covered.iter().zip(self.positive).fold((0, 0), |(tp, fp), (&c, &p)| match (c, p) {
            (true, true) => (tp + 1, fp),
            (true, false) => (tp, fp + 1),
            _ => (tp, fp),
        })
    }

    fn coverage(&self, conds: &[Condition<T>], skip: Option<usize>) -> Vec<bool> {
        self.live
            .iter()
            .map(|&i| {
                let x = &self.data.cases[i].x;
                conds.iter().enumerate().all(|(j, c)| Some(j) == skip || c.satisfied(x))
            })
            .collect()
    }
}

struct Best<T> {
    cond: Condition<T>,
    slot: usize,
    tp: usize,
    fp: usize,
}

fn better<T>(best: &Option<Best<T>>, tp: usize, fp: usize) -> bool {
    match best {
        None => true,
        Some(b) => fp < b.fp || (fp == b.fp && tp > b.tp),
    }
}

/// Grow one rule for the positive cases of `state`.
pub fn grow_rule<T: Scalar>(state: &CoverState<'_, T>, m: usize) -> Rule<T> {
    let sorted = SortedFeatures::new(state.data);
    let view = LiveView::new(state.data, &sorted, &state.live, &state.positive);
    grow(&view, m)
}

fn grow<T: Scalar>(view: &LiveView<'_, T>, m: usize) -> Rule<T> {
    let mut conds: Vec<Condition<T>> = Vec::new();
    let mut covered = vec![true; view.live.len()];
    let (mut tp, mut fp) = view.counts(&covered);
    let required = m.min(tp).max(1);

    while fp > 0 {
        let mut best: Option<Best<T>> = None;
        view.scan(&covered, |c, t, f| {
            if t >= required && f < fp && better(&best, t, f) {
                best = Some(Best { cond: c, slot: 0, tp: t, fp: f });
            }
        });
        let Some(add) = best else { break };
        match conds.iter_mut().find(|c| c.same_slot(&add.cond) && c.is_continuous()) {
            Some(existing) => *existing = add.cond,
            None => conds.push(add.cond),
        }
        covered = view.coverage(&conds, None);
        (tp, fp) = view.counts(&covered);
        debug_assert_eq!((tp, fp), (add.tp, add.fp));

        // Best single replacement that lowers false positives without losing true positives.
        while fp > 0 {
            let mut best: Option<Best<T>> = None;
            for j in 0..conds.len() {
                let base = view.coverage(&conds, Some(j));
                view.scan(&base, |c, t, f| {
                    if t >= tp
                        && f < fp
                        && c != conds[j]
                        && !conds.iter().enumerate().any(|(k, o)| k != j && o.same_slot(&c))
                        && better(&best, t, f)
                    {
                        best = Some(Best { cond: c, slot: j, tp: t, fp: f });
                    }
                });
            }
            let Some(swap) = best else { break };
            conds[swap.slot] = swap.cond;
            covered = view.coverage(&conds, None);
            (tp, fp) = view.counts(&covered);
        }
    }
    Rule::new(conds, T::zero())
}

/// Ordered covering rule set for a pseudo-class assignment, values set to region medians.
pub fn induce_covering<T: Scalar>(
    train: &Dataset<T>,
    assignment: &PseudoClassAssignment<T>,
    m: usize,
) -> Result<RuleSet<T>> {
    if train.is_empty() {
        return Err(Error::Empty);
    }
    if assignment.class_of.len() != train.n() {
        return Err(Error::LengthMismatch(assignment.class_of.len(), train.n()));
    }
    let m = m.max(1);
    let sorted = SortedFeatures::new(train);
    let mut live: Vec<usize> = (0..train.n()).collect();
    let mut rules = Vec::new();

    let cover_class = |live: &mut Vec<usize>, rules: &mut Vec<Rule<T>>, is_target: &dyn Fn(usize) -> bool| {
        while live.iter().any(|&i| is_target(i)) {
            let positive: Vec<bool> = live.iter().map(|&i| is_target(i)).collect();
            let view = LiveView::new(train, &sorted, live, &positive);
            let rule = grow(&view, m);
            let keep: Vec<usize> = live.iter().copied().filter(|&i| !rule.satisfied(&train.cases[i].x)).collect();
            debug_assert!(keep.len() < live.len());
            *live = keep;
            rules.push(rule);
        }
    };

    let k = assignment.k_effective;
    for class in 0..k.saturating_sub(1) {
        cover_class(&mut live, &mut rules, &|i| assignment.class_of[i] == class);
    }

    // The last class: peel off its lower half until fewer than m cases remain.
    while live.len() >= m.max(2) {
        let ys: Vec<T> = live.iter().map(|&i| train.cases[i].y).collect();
        let split = split_in_two(&ys)?;
        if split.k_effective < 2 {
            break;
        }
        let lower: Vec<bool> = {
            let mut flags = vec![false; train.n()];
            for (p, &i) in live.iter().enumerate() {
                flags[i] = split.class_of[p] == 0;
            }
            flags
        };
        cover_class(&mut live, &mut rules, &|i| lower[i]);
    }

    Ok(RuleSet::new(rules, T::zero()).recompute_medians(train))
}
