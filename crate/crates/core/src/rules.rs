//! Ordered rule sets (decision lists) with constant predictions.
//!
//! The first rule whose conjunction holds decides the prediction; a default
//! value catches every case that no rule covers. Each rule's value is the
//! median of its *region*: the training cases for which it is the first
//! satisfied rule.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureKind, FeatureSchema, Value};
use crate::metrics::median_in_place;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Test<T> {
    Le { threshold: T },
    Gt { threshold: T },
    Eq { code: u32 },
    Ne { code: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition<T> {
    pub feature: usize,
    #[serde(flatten)]
    pub test: Test<T>,
}

impl<T: Scalar> Condition<T> {
    pub fn le(feature: usize, threshold: T) -> Self {
        Condition { feature, test: Test::Le { threshold } }
    }

    pub fn gt(feature: usize, threshold: T) -> Self {
        Condition { feature, test: Test::Gt { threshold } }
    }

    pub fn eq(feature: usize, code: u32) -> Self {
        Condition { feature, test: Test::Eq { code } }
    }

    pub fn ne(feature: usize, code: u32) -> Self {
        Condition { feature, test: Test::Ne { code } }
    }

    #[inline]
    pub fn holds(&self, v: Value<T>) -> bool {
        match (self.test, v) {
            (Test::Le { threshold }, Value::Num(v)) => v <= threshold,
            (Test::Gt { threshold }, Value::Num(v)) => v > threshold,
            (Test::Eq { code }, Value::Cat(c)) => c == code,
            (Test::Ne { code }, Value::Cat(c)) => c != code,
            _ => false,
        }
    }

    #[inline]
    pub fn satisfied(&self, x: &[Value<T>]) -> bool {
        self.holds(x[self.feature])
    }

    pub fn is_continuous(&self) -> bool {
        matches!(self.test, Test::Le { .. } | Test::Gt { .. })
    }

    /// Same feature and same operator (thresholds or tokens may differ).
    pub fn same_slot(&self, other: &Condition<T>) -> bool {
        self.feature == other.feature && std::mem::discriminant(&self.test) == std::mem::discriminant(&other.test)
    }

    pub fn matches_kind(&self, schema: &FeatureSchema) -> bool {
        let kind = schema.kind(self.feature);
        match self.test {
            Test::Le { threshold } | Test::Gt { threshold } => kind == FeatureKind::Continuous && threshold.is_finite(),
            Test::Eq { .. } | Test::Ne { .. } => kind == FeatureKind::Categorical,
        }
    }

    pub fn display<'a>(&'a self, schema: &'a FeatureSchema) -> impl fmt::Display + 'a {
        ConditionDisplay { cond: self, schema }
    }
}

struct ConditionDisplay<'a, T> {
    cond: &'a Condition<T>,
    schema: &'a FeatureSchema,
}

impl<T: Scalar> fmt::Display for ConditionDisplay<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.cond;
        let name = &self.schema.features[c.feature].name;
        match c.test {
            Test::Le { threshold } => write!(f, "{name} <= {threshold}"),
            Test::Gt { threshold } => write!(f, "{name} > {threshold}"),
            Test::Eq { code } => write!(f, "{name} = {}", self.schema.token(c.feature, code)),
            Test::Ne { code } => write!(f, "{name} != {}", self.schema.token(c.feature, code)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rule<T> {
    pub conditions: Vec<Condition<T>>,
    pub(crate) value: T,
    /// Size of the training region recorded at the last median update.
    #[serde(default)]
    pub(crate) covers: usize,
}

impl<T: Scalar> Rule<T> {
    pub fn new(conditions: Vec<Condition<T>>, value: T) -> Self {
        Rule { conditions: collapse(conditions), value, covers: 0 }
    }

    pub fn value(&self) -> T {
        self.value
    }

    pub fn covers(&self) -> usize {
        self.covers
    }

    #[inline]
    pub fn satisfied(&self, x: &[Value<T>]) -> bool {
        self.conditions.iter().all(|c| c.satisfied(x))
    }
}

/// Drop redundant tests: per continuous feature keep the tightest `<=` and `>`;
/// repeated categorical tests appear once. First-occurrence order is kept.
pub fn collapse<T: Scalar>(conditions: Vec<Condition<T>>) -> Vec<Condition<T>> {
    let mut out: Vec<Condition<T>> = Vec::with_capacity(conditions.len());
    for c in conditions {
        match out.iter_mut().find(|o| o.same_slot(&c) && o.is_continuous()) {
            Some(existing) => match (&mut existing.test, c.test) {
                (Test::Le { threshold }, Test::Le { threshold: t }) => *threshold = threshold.min(t),
                (Test::Gt { threshold }, Test::Gt { threshold: t }) => *threshold = threshold.max(t),
                _ => unreachable!("same_slot guarantees matching operators"),
            },
            None => {
                if !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
    out
}

/// First-match regions of a rule set over a set of cases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Regions {
    pub rosters: Vec<Vec<usize>>,
    pub default: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuleSet<T> {
    pub rules: Vec<Rule<T>>,
    pub(crate) default_value: T,
    #[serde(default)]
    pub(crate) default_covers: usize,
}

impl<T: Scalar> RuleSet<T> {
    pub fn new(rules: Vec<Rule<T>>, default_value: T) -> Self {
        RuleSet { rules, default_value, default_covers: 0 }
    }

    pub fn default_only(value: T) -> Self {
        Self::new(Vec::new(), value)
    }

    pub fn default_value(&self) -> T {
        self.default_value
    }

    pub fn default_covers(&self) -> usize {
        self.default_covers
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Index of the first satisfied rule; `None` means the default.
    pub fn first_match(&self, x: &[Value<T>]) -> Option<usize> {
        self.rules.iter().position(|r| r.satisfied(x))
    }

    pub fn predict(&self, x: &[Value<T>]) -> T {
        self.first_match(x).map_or(self.default_value, |i| self.rules[i].value)
    }

    /// Total number of conditions.
    pub fn complexity(&self) -> usize {
        self.rules.iter().map(|r| r.conditions.len()).sum()
    }

    pub fn regions(&self, data: &Dataset<T>) -> Regions {
        let mut rosters = vec![Vec::new(); self.rules.len()];
        let mut default = Vec::new();
        for (i, case) in data.cases.iter().enumerate() {
            match self.first_match(&case.x) {
                Some(r) => rosters[r].push(i),
                None => default.push(i),
            }
        }
        Regions { rosters, default }
    }

    /// Rebuild regions over `train`, set every value to its region median, drop
    /// rules with an empty region, and set the default to the median of the
    /// uncovered cases (the overall median when every case is covered).
    pub fn recompute_medians(&self, train: &Dataset<T>) -> RuleSet<T> {
        let regions = self.regions(train);
        let mut buf = Vec::new();
        let mut region_median = |roster: &[usize]| {
            buf.clear();
            buf.extend(roster.iter().map(|&i| train.cases[i].y));
            median_in_place(&mut buf)
        };
        let rules = self
            .rules
            .iter()
            .zip(&regions.rosters)
            .filter(|(_, roster)| !roster.is_empty())
            .map(|(rule, roster)| Rule { conditions: rule.conditions.clone(), value: region_median(roster), covers: roster.len() })
            .collect();
        let default_value = if !regions.default.is_empty() {
            region_median(&regions.default)
        } else if !train.is_empty() {
            region_median(&(0..train.n()).collect::<Vec<_>>())
        } else {
            self.default_value
        };
        RuleSet { rules, default_value, default_covers: regions.default.len() }
    }

    pub fn display<'a>(&'a self, schema: &'a FeatureSchema) -> impl fmt::Display + 'a {
        RuleSetDisplay { rs: self, schema }
    }
}

struct RuleSetDisplay<'a, T> {
    rs: &'a RuleSet<T>,
    schema: &'a FeatureSchema,
}

impl<T: Scalar> fmt::Display for RuleSetDisplay<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rs.rules {
            write!(f, "IF ")?;
            if rule.conditions.is_empty() {
                write!(f, "TRUE")?;
            }
            for (j, c) in rule.conditions.iter().enumerate() {
                if j > 0 {
                    write!(f, " AND ")?;
                }
                write!(f, "{}", c.display(self.schema))?;
            }
            writeln!(f, " THEN {} = {} (covers {})", self.schema.target_name, rule.value, rule.covers)?;
        }
        writeln!(f, "ELSE {} = {} (covers {})", self.schema.target_name, self.rs.default_value, self.rs.default_covers)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::median;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn x(v: &[f64]) -> Vec<Value<f64>> {
        v.iter().map(|&v| Value::Num(v)).collect()
    }

    fn figure_rules() -> RuleSet<f64> {
        RuleSet::new(vec![Rule::new(vec![Condition::le(0, 3.0)], 10.0), Rule::new(vec![], 5.0)], 0.0)
    }

    #[test]
    fn first_match_examples() {
        let rs = figure_rules();
        assert_eq!(rs.first_match(&x(&[2.0])), Some(0));
        assert_eq!(rs.predict(&x(&[2.0])), 10.0);
        assert_eq!(rs.first_match(&x(&[7.0])), Some(1));
        assert_eq!(rs.predict(&x(&[7.0])), 5.0);

        let rs = RuleSet::new(vec![Rule::new(vec![Condition::le(0, 3.0)], 10.0), Rule::new(vec![Condition::gt(1, 4.0)], 7.0)], 1.0);
        assert_eq!(rs.first_match(&x(&[2.0, 9.0])), Some(0));
        assert_eq!(rs.predict(&x(&[2.0, 9.0])), 10.0);
        assert_eq!(rs.first_match(&x(&[5.0, 1.0])), None);
        assert_eq!(rs.predict(&x(&[5.0, 1.0])), 1.0);
    }

    #[test]
    fn categorical_tests_and_unseen_tokens() {
        let c = Condition::<f64>::eq(0, 2);
        assert!(c.holds(Value::Cat(2)));
        assert!(!c.holds(Value::Cat(crate::dataset::UNSEEN)));
        assert!(Condition::<f64>::ne(0, 2).holds(Value::Cat(crate::dataset::UNSEEN)));
    }

    #[test]
    fn recompute_examples() {
        let d = Dataset::from_rows(&["a"], "y", &[vec![0.0], vec![1.0], vec![2.0]], &[1.0, 2.0, 9.0]).unwrap();
        let rs = RuleSet::new(vec![Rule::new(vec![], 0.0)], 0.0).recompute_medians(&d);
        assert_eq!(rs.rules[0].value(), 2.0);
        assert_eq!(rs.rules[0].covers(), 3);
        assert_eq!(rs.default_value(), 2.0);

        // The second rule is shadowed by the first and disappears.
        let rs = RuleSet::new(vec![Rule::new(vec![Condition::le(0, 5.0)], 0.0), Rule::new(vec![Condition::le(0, 1.0)], 0.0)], 0.0)
            .recompute_medians(&d);
        assert_eq!(rs.len(), 1);
        assert_eq!(RuleSet::<f64>::default_only(0.0).complexity(), 0);
    }

    #[test]
    fn recompute_corrects_stale_values() {
        // Six cases; the stored values are stale estimates that recompute replaces with region medians.
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64]).collect();
        let y = [1.0, 2.0, 3.0, 10.0, 20.0, 40.0];
        let d = Dataset::from_rows(&["a"], "y", &rows, &y).unwrap();
        let stale = RuleSet::new(vec![Rule::new(vec![Condition::le(0, 1.5)], 1.5), Rule::new(vec![Condition::le(0, 3.5)], 2.5)], 20.0);
        let fresh = stale.recompute_medians(&d);
        assert_eq!(fresh.rules[0].value(), median(&[1.0, 2.0]).unwrap());
        assert_eq!(fresh.rules[1].value(), median(&[3.0, 10.0]).unwrap());
        assert_eq!(fresh.default_value(), median(&[20.0, 40.0]).unwrap());
        assert_eq!((fresh.rules[0].covers, fresh.rules[1].covers, fresh.default_covers), (2, 2, 2));
        let err = |rs: &RuleSet<f64>| d.cases.iter().map(|c| (c.y - rs.predict(&c.x)).abs()).sum::<f64>();
        assert!(err(&fresh) < err(&stale));
        assert_eq!(fresh.recompute_medians(&d), fresh);
    }

    #[test]
    fn collapse_keeps_tightest_thresholds() {
        let r = Rule::new(vec![Condition::le(0, 3.0), Condition::gt(1, 1.0), Condition::le(0, 5.0), Condition::gt(1, 2.0)], 0.0);
        assert_eq!(r.conditions, vec![Condition::le(0, 3.0), Condition::gt(1, 2.0)]);
        let r = Rule::new(vec![Condition::<f64>::ne(0, 1), Condition::ne(0, 1), Condition::ne(0, 2)], 0.0);
        assert_eq!(r.conditions.len(), 2);
    }

    #[test]
    fn looser_threshold_leaves_region_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let t = rng.gen_range(0.0..10.0);
            let looser = t + rng.gen_range(0.0..5.0);
            let base = Rule::new(vec![Condition::le(0, t)], 0.0);
            let extended = Rule::new(vec![Condition::le(0, t), Condition::le(0, looser)], 0.0);
            for _ in 0..20 {
                let p = x(&[rng.gen_range(-1.0..16.0)]);
                assert_eq!(base.satisfied(&p), extended.satisfied(&p));
            }
        }
    }

    #[test]
    fn deleting_a_rule_keeps_earlier_predictions() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let rules: Vec<Rule<f64>> = (0..4)
                .map(|_| Rule::new(vec![Condition::le(rng.gen_range(0..2), rng.gen_range(0.0..1.0))], rng.gen_range(0.0..9.0)))
                .collect();
            let rs = RuleSet::new(rules, -1.0);
            let drop = rng.gen_range(0..4);
            let mut pruned = rs.clone();
            pruned.rules.remove(drop);
            for _ in 0..50 {
                let p = x(&[rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)]);
                if let Some(i) = rs.first_match(&p) {
                    if i < drop {
                        assert_eq!(rs.predict(&p), pruned.predict(&p));
                    }
                }
            }
        }
    }

    #[test]
    fn pretty_printer() {
        let schema = FeatureSchema::continuous(&["x1", "x2"], "y").unwrap();
        let rs = RuleSet::new(
            vec![Rule::new(vec![Condition::le(0, 3.0)], 10.0), Rule::new(vec![Condition::gt(0, 3.0), Condition::le(1, 4.5)], 7.0)],
            5.0,
        );
        let text = rs.display(&schema).to_string();
        assert_eq!(
            text,
            "IF x1 <= 3 THEN y = 10 (covers 0)\nIF x1 > 3 AND x2 <= 4.5 THEN y = 7 (covers 0)\nELSE y = 5 (covers 0)\n"
        );
    }
}
