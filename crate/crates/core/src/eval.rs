//! Cross-validation, hold-out evaluation and the two-standard-error comparison.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureSchema};
use crate::error::{Error, Result};
use crate::metrics::{baseline_mad, relative_error};
use crate::model::{train_methods, Method, Model, TrainConfig};
use crate::scalar::Scalar;

/// Seeded shuffle of the case indices dealt round-robin into folds.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub seed: u64,
    pub folds: usize,
    pub fold_of: Vec<usize>,
}

impl FoldPlan {
    pub fn new(n: usize, folds: usize, seed: u64) -> Result<Self> {
        if folds < 2 {
            return Err(Error::InvalidArgument(format!("cross-validation needs at least 2 folds, got {folds}")));
        }
        if n < folds {
            return Err(Error::InvalidArgument(format!("{folds} folds requested for {n} cases")));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut fold_of = vec![0; n];
        for (p, &i) in order.iter().enumerate() {
            fold_of[i] = p % folds;
        }
        Ok(FoldPlan { seed, folds, fold_of })
    }

    /// `(training indices, test indices)` of a fold, each ascending.
    pub fn split(&self, fold: usize) -> (Vec<usize>, Vec<usize>) {
        (0..self.fold_of.len()).partition(|&i| self.fold_of[i] != fold)
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.folds];
        for &f in &self.fold_of {
            s[f] += 1;
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<T> {
    pub method: String,
    pub n: usize,
    pub fold_sizes: Vec<usize>,
    pub fold_mads: Vec<T>,
    /// Fold MADs averaged with fold-size weights.
    pub mean_mad: T,
    /// Standard deviation of the fold MADs over the square root of the fold count.
    pub se: T,
    /// Standard deviation of the per-case absolute errors over the square root of n.
    pub case_se: Option<T>,
    /// MAD of predicting the median of all cases.
    pub baseline_mad: T,
    /// `None` when the baseline is zero.
    pub relative_error: Option<T>,
    /// Mean model complexity over the folds.
    pub complexity: Option<f64>,
    /// Number of pseudo-classes, when chosen by a sweep.
    pub k_classes: Option<usize>,
    /// Out-of-fold prediction of every case.
    #[serde(skip)]
    pub predictions: Vec<T>,
}

impl<T: Scalar> EvalReport<T> {
    /// Build a report from fold results; the standard error follows from the fold MADs.
    pub fn from_folds(method: impl Into<String>, fold_sizes: Vec<usize>, fold_mads: Vec<T>, baseline_mad: T) -> Result<Self> {
        if fold_sizes.is_empty() || fold_sizes.len() != fold_mads.len() {
            return Err(Error::LengthMismatch(fold_sizes.len(), fold_mads.len()));
        }
        let n: usize = fold_sizes.iter().sum();
        if n == 0 {
            return Err(Error::Empty);
        }
        let weighted = fold_sizes.iter().zip(&fold_mads).fold(T::zero(), |a, (&s, &m)| a + m * T::from_usize_s(s));
        let mean_mad = weighted / T::from_usize_s(n);
        Ok(EvalReport {
            method: method.into(),
            n,
            se: std_error(&fold_mads),
            fold_sizes,
            fold_mads,
            mean_mad,
            case_se: None,
            baseline_mad,
            relative_error: relative_error(mean_mad, baseline_mad).ok(),
            complexity: None,
            k_classes: None,
            predictions: Vec::new(),
        })
    }

    /// Label used in tables, with the class count when one was swept.
    pub fn label(&self) -> String {
        match self.k_classes {
            Some(k) => format!("{} (k={k})", self.method),
            None => self.method.clone(),
        }
    }

    /// One CSV row per fold: `method,fold,n,mad,baseline_mad`.
    pub fn csv_rows(&self) -> String {
        let mut s = String::new();
        for (f, (n, m)) in self.fold_sizes.iter().zip(&self.fold_mads).enumerate() {
            s.push_str(&format!("{},{f},{n},{m},{}\n", self.label(), self.baseline_mad));
        }
        s
    }
}

pub const CSV_HEADER: &str = "method,fold,n,mad,baseline_mad";

/// Rebuild reports from fold rows written by [`EvalReport::csv_rows`].
pub fn reports_from_csv<T: Scalar, R: std::io::Read>(reader: R) -> Result<Vec<EvalReport<T>>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::InvalidArgument(format!("expected report header `{CSV_HEADER}`, found `{}`", header.join(","))));
    }
    let mut groups: Vec<(String, Vec<usize>, Vec<T>, T)> = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |msg: &str| Error::BadRow { row: row + 1, msg: msg.into() };
        let n: usize = rec[2].trim().parse().map_err(|_| bad("bad case count"))?;
        let m: T = rec[3].trim().parse().map_err(|_| bad("bad MAD"))?;
        let b: T = rec[4].trim().parse().map_err(|_| bad("bad baseline MAD"))?;
        match groups.iter_mut().find(|g| g.0 == rec[0]) {
            Some(g) => {
                g.1.push(n);
                g.2.push(m);
            }
            None => groups.push((rec[0].to_string(), vec![n], vec![m], b)),
        }
    }
    groups.into_iter().map(|(name, sizes, mads, b)| EvalReport::from_folds(name, sizes, mads, b)).collect()
}

fn std_error<T: Scalar>(values: &[T]) -> T {
    let k = values.len();
    if k < 2 {
        return T::zero();
    }
    let kt = T::from_usize_s(k);
    let mean = values.iter().fold(T::zero(), |a, &v| a + v) / kt;
    let var = values.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean)) / T::from_usize_s(k - 1);
    var.sqrt() / kt.sqrt()
}

/// K-fold cross-validation of several methods. Every fold trains from scratch on
/// its training portion only (normalization, pseudo-classes, size selection and
/// region rosters included); the rule pipeline and the tree are shared by the
/// constant and hybrid variants.
pub fn cross_validate<T: Scalar>(
    methods: &[Method],
    config: &TrainConfig,
    data: &Dataset<T>,
    folds: usize,
    seed: u64,
) -> Result<Vec<EvalReport<T>>> {
    let plan = FoldPlan::new(data.n(), folds, seed)?;
    let baseline = baseline_mad(&data.y())?;
    let mut predictions = vec![vec![T::zero(); data.n()]; methods.len()];
    let mut fold_mads = vec![Vec::with_capacity(folds); methods.len()];
    let mut complexity = vec![0usize; methods.len()];
    for fold in 0..folds {
        let (tr, te) = plan.split(fold);
        let trained = train_methods(&data.subset(&tr), config, methods).map_err(|e| Error::Fold { fold, source: Box::new(e) })?;
        for (m, t) in trained.iter().enumerate() {
            let mut sum = T::zero();
            for &i in &te {
                let p = t.model.predict(&data.cases[i].x);
                predictions[m][i] = p;
                sum = sum + (data.cases[i].y - p).abs();
            }
            fold_mads[m].push(sum / T::from_usize_s(te.len()));
            complexity[m] += t.model.complexity();
        }
    }
    methods
        .iter()
        .enumerate()
        .map(|(m, method)| {
            let mut r = EvalReport::from_folds(method.name(), plan.sizes(), std::mem::take(&mut fold_mads[m]), baseline)?;
            let errors: Vec<T> = data.cases.iter().zip(&predictions[m]).map(|(c, &p)| (c.y - p).abs()).collect();
            r.case_se = Some(case_se(&errors));
            r.complexity = Some(complexity[m] as f64 / folds as f64);
            r.predictions = std::mem::take(&mut predictions[m]);
            Ok(r)
        })
        .collect()
}

fn case_se<T: Scalar>(errors: &[T]) -> T {
    let n = errors.len();
    if n < 2 {
        return T::zero();
    }
    let nt = T::from_usize_s(n);
    let mean = errors.iter().fold(T::zero(), |a, &v| a + v) / nt;
    let var = errors.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean)) / T::from_usize_s(n - 1);
    var.sqrt() / nt.sqrt()
}

/// Error of a trained model on independent test cases. The relative error uses
/// the test cases' own median as the baseline.
pub fn holdout_evaluate<T: Scalar>(
    model: &Model<T>,
    schema: &FeatureSchema,
    label: &str,
    test: &Dataset<T>,
) -> Result<EvalReport<T>> {
    if test.schema.features != schema.features {
        let culprit = schema
            .features
            .iter()
            .zip(&test.schema.features)
            .find(|(a, b)| a != b)
            .map_or_else(|| "feature count differs".to_string(), |(a, _)| format!("column `{}` differs", a.name));
        return Err(Error::SchemaMismatch(culprit));
    }
    if test.is_empty() {
        return Err(Error::Empty);
    }
    let y = test.y();
    let predictions: Vec<T> = test.cases.iter().map(|c| model.predict(&c.x)).collect();
    let errors: Vec<T> = y.iter().zip(&predictions).map(|(&a, &p)| (a - p).abs()).collect();
    let mad = errors.iter().fold(T::zero(), |a, &e| a + e) / T::from_usize_s(test.n());
    let mut r = EvalReport::from_folds(label, vec![test.n()], vec![mad], baseline_mad(&y)?)?;
    let se = case_se(&errors);
    r.se = se;
    r.case_se = Some(se);
    r.complexity = Some(model.complexity() as f64);
    r.predictions = predictions;
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    FirstBetter,
    SecondBetter,
    NoSignificantDifference,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Comparison<T> {
    pub difference: T,
    /// Twice the larger of the two standard errors.
    pub threshold: T,
    pub verdict: Verdict,
}

impl<T: Scalar> fmt::Display for Comparison<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let what = match self.verdict {
            Verdict::FirstBetter => "first is significantly better",
            Verdict::SecondBetter => "second is significantly better",
            Verdict::NoSignificantDifference => "no significant difference",
        };
        write!(f, "{what} (|difference| {} vs 2 x max SE {})", self.difference.abs(), self.threshold)
    }
}

/// Significant when the mean MADs differ by more than two of the larger standard errors.
pub fn compare<T: Scalar>(a: &EvalReport<T>, b: &EvalReport<T>) -> Result<Comparison<T>> {
    if a.n != b.n || a.fold_sizes.len() != b.fold_sizes.len() {
        return Err(Error::InvalidArgument(format!(
            "reports come from different protocols ({} cases / {} folds vs {} cases / {} folds)",
            a.n,
            a.fold_sizes.len(),
            b.n,
            b.fold_sizes.len()
        )));
    }
    let difference = a.mean_mad - b.mean_mad;
    let threshold = T::two() * a.se.max(b.se);
    let verdict = if difference.abs() > threshold {
        if difference < T::zero() {
            Verdict::FirstBetter
        } else {
            Verdict::SecondBetter
        }
    } else {
        Verdict::NoSignificantDifference
    };
    Ok(Comparison { difference, threshold, verdict })
}

/// Cross-validated error of the class-dependent methods for each class count.
#[derive(Clone, Debug)]
pub struct SweepRow<T> {
    pub k: usize,
    pub reports: Vec<EvalReport<T>>,
}

pub fn sweep_classes<T: Scalar>(
    data: &Dataset<T>,
    config: &TrainConfig,
    ks: &[usize],
    methods: &[Method],
    folds: usize,
    seed: u64,
) -> Result<Vec<SweepRow<T>>> {
    if ks.is_empty() {
        return Err(Error::InvalidArgument("empty class-count range".into()));
    }
    ks.iter()
        .map(|&k| {
            let cfg = TrainConfig { k_classes: k, ..config.clone() };
            let mut reports = cross_validate(methods, &cfg, data, folds, seed)?;
            for r in &mut reports {
                r.k_classes = Some(k);
            }
            Ok(SweepRow { k, reports })
        })
        .collect()
}

/// Evaluate methods; class-dependent ones are swept over `ks` and reported at
/// the class count with the lowest cross-validated error.
pub fn evaluate_methods<T: Scalar>(
    data: &Dataset<T>,
    config: &TrainConfig,
    ks: &[usize],
    methods: &[Method],
    folds: usize,
    seed: u64,
) -> Result<(Vec<EvalReport<T>>, Vec<SweepRow<T>>)> {
    let with_k: Vec<Method> = methods.iter().copied().filter(|m| m.uses_classes()).collect();
    let without: Vec<Method> = methods.iter().copied().filter(|m| !m.uses_classes()).collect();
    let sweep = if with_k.is_empty() { Vec::new() } else { sweep_classes(data, config, ks, &with_k, folds, seed)? };
    let mut fixed: Vec<Option<EvalReport<T>>> =
        if without.is_empty() { Vec::new() } else { cross_validate(&without, config, data, folds, seed)?.into_iter().map(Some).collect() };
    let mut out = Vec::with_capacity(methods.len());
    for &m in methods {
        if m.uses_classes() {
            let slot = with_k.iter().position(|&w| w == m).unwrap();
            let best = sweep
                .iter()
                .map(|row| &row.reports[slot])
                .fold(None::<&EvalReport<T>>, |b, r| match b {
                    Some(b) if b.mean_mad <= r.mean_mad => Some(b),
                    _ => Some(r),
                })
                .unwrap();
            out.push(best.clone());
        } else {
            let slot = without.iter().position(|&w| w == m).unwrap();
            out.push(fixed[slot].take().unwrap());
        }
    }
    Ok((out, sweep))
}

/// Aligned text table: method, mean MAD, standard error, relative error, complexity.
pub fn format_table<T: Scalar>(reports: &[EvalReport<T>]) -> String {
    let rows: Vec<[String; 5]> = reports
        .iter()
        .map(|r| {
            [
                r.label(),
                format!("{:.4}", r.mean_mad.to_f64().unwrap_or(f64::NAN)),
                format!("{:.4}", r.se.to_f64().unwrap_or(f64::NAN)),
                r.relative_error.map_or("n/a".into(), |e| format!("{:.3}", e.to_f64().unwrap_or(f64::NAN))),
                r.complexity.map_or("-".into(), |c| format!("{c:.1}")),
            ]
        })
        .collect();
    let header = ["method", "MAD", "SE", "error", "size"];
    let mut width = header.map(str::len);
    for row in &rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: [&str; 5]| {
        let mut s = format!("{:<w$}", cells[0], w = width[0]);
        for (c, w) in cells[1..].iter().zip(&width[1..]) {
            s.push_str(&format!("  {c:>w$}"));
        }
        s.push('\n');
        s
    };
    let mut out = line(header);
    for row in &rows {
        out.push_str(&line([&row[0], &row[1], &row[2], &row[3], &row[4]]));
    }
    out
}
