//! Tabular data model, CSV ingestion and min-max normalization.
//!
//! Continuous features hold a real value; categorical features hold a code into
//! the per-feature vocabulary kept on the [`FeatureSchema`]. Tokens that were
//! not seen when the schema was built map to [`UNSEEN`], which never equals any
//! vocabulary code.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Code for a categorical token absent from the training vocabulary.
pub const UNSEEN: u32 = u32::MAX;

const MISSING_MARKERS: [&str; 3] = ["", "?", "NA"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureKind {
    Continuous,
    Categorical,
}

impl std::str::FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "continuous" | "numeric" | "real" => Ok(FeatureKind::Continuous),
            "categorical" | "nominal" => Ok(FeatureKind::Categorical),
            other => Err(Error::InvalidArgument(format!("unknown feature kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub name: String,
    pub kind: FeatureKind,
    /// Vocabulary of a categorical feature, in order of first appearance.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub categories: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub features: Vec<Feature>,
    pub target_name: String,
}

impl FeatureSchema {
    pub fn new(features: Vec<Feature>, target_name: impl Into<String>) -> Result<Self> {
        let target_name = target_name.into();
        let mut seen = HashSet::new();
        for f in &features {
            if f.name == target_name || !seen.insert(f.name.as_str()) {
                return Err(Error::DuplicateColumn(f.name.clone()));
            }
        }
        Ok(FeatureSchema { features, target_name })
    }

    /// All-continuous schema with the given feature names.
    pub fn continuous(names: &[&str], target: &str) -> Result<Self> {
        let features = names
            .iter()
            .map(|n| Feature { name: (*n).to_string(), kind: FeatureKind::Continuous, categories: Vec::new() })
            .collect();
        Self::new(features, target)
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn kind(&self, feature: usize) -> FeatureKind {
        self.features[feature].kind
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn code_of(&self, feature: usize, token: &str) -> u32 {
        self.features[feature]
            .categories
            .iter()
            .position(|c| c == token)
            .map_or(UNSEEN, |p| p as u32)
    }

    pub fn token(&self, feature: usize, code: u32) -> &str {
        self.features[feature].categories.get(code as usize).map_or("<unseen>", String::as_str)
    }
}

/// Serialized as a bare number: floats are continuous values, integers are category codes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value<T> {
    Num(T),
    Cat(u32),
}

impl<'de, T: Scalar> Deserialize<'de> for Value<T> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V<T>(std::marker::PhantomData<T>);

        impl<T: Scalar> serde::de::Visitor<'_> for V<T> {
            type Value = Value<T>;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a float (continuous value) or an unsigned integer (category code)")
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> std::result::Result<Value<T>, E> {
                u32::try_from(v).map(Value::Cat).map_err(|_| E::custom("category code out of range"))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> std::result::Result<Value<T>, E> {
                u32::try_from(v).map(Value::Cat).map_err(|_| E::custom("category code out of range"))
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> std::result::Result<Value<T>, E> {
                T::from_f64(v).map(Value::Num).ok_or_else(|| E::custom("value not representable"))
            }
        }

        d.deserialize_any(V(std::marker::PhantomData))
    }
}

impl<T: Scalar> Value<T> {
    #[inline]
    pub fn num(&self) -> T {
        match self {
            Value::Num(v) => *v,
            Value::Cat(_) => panic!("categorical value used as continuous"),
        }
    }

    #[inline]
    pub fn cat(&self) -> u32 {
        match self {
            Value::Cat(c) => *c,
            Value::Num(_) => panic!("continuous value used as categorical"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct Case<T> {
    pub x: Vec<Value<T>>,
    pub y: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    pub schema: FeatureSchema,
    pub cases: Vec<Case<T>>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(schema: FeatureSchema, cases: Vec<Case<T>>) -> Result<Self> {
        for (row, case) in cases.iter().enumerate() {
            check_conforms(&schema, &case.x).map_err(|msg| Error::BadRow { row, msg })?;
            if !case.y.is_finite() {
                return Err(Error::BadRow { row, msg: "target is not finite".into() });
            }
        }
        Ok(Dataset { schema, cases })
    }

    /// Dataset with continuous features only, one row of `x` per case.
    pub fn from_rows(names: &[&str], target: &str, rows: &[Vec<T>], y: &[T]) -> Result<Self> {
        if rows.len() != y.len() {
            return Err(Error::LengthMismatch(rows.len(), y.len()));
        }
        let schema = FeatureSchema::continuous(names, target)?;
        let cases = rows
            .iter()
            .zip(y)
            .map(|(r, &y)| Case { x: r.iter().map(|&v| Value::Num(v)).collect(), y })
            .collect();
        Self::new(schema, cases)
    }

    pub fn n(&self) -> usize {
        self.cases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cases.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.schema.len()
    }

    pub fn y(&self) -> Vec<T> {
        self.cases.iter().map(|c| c.y).collect()
    }

    #[inline]
    pub fn value(&self, case: usize, feature: usize) -> Value<T> {
        self.cases[case].x[feature]
    }

    pub fn subset(&self, indices: &[usize]) -> Dataset<T> {
        Dataset { schema: self.schema.clone(), cases: indices.iter().map(|&i| self.cases[i].clone()).collect() }
    }

    pub fn with_targets(&self, y: &[T]) -> Dataset<T> {
        let mut d = self.clone();
        for (c, &v) in d.cases.iter_mut().zip(y) {
            c.y = v;
        }
        d
    }
}

fn check_conforms<T: Scalar>(schema: &FeatureSchema, x: &[Value<T>]) -> std::result::Result<(), String> {
    if x.len() != schema.len() {
        return Err(format!("expected {} feature values, found {}", schema.len(), x.len()));
    }
    for (f, v) in schema.features.iter().zip(x) {
        match (f.kind, v) {
            (FeatureKind::Continuous, Value::Num(v)) if v.is_finite() => {}
            (FeatureKind::Categorical, Value::Cat(_)) => {}
            _ => return Err(format!("value for `{}` does not match its kind", f.name)),
        }
    }
    Ok(())
}

#[derive(Clone, Debug, Default)]
pub struct LoadOptions {
    /// Per-column kind overrides, by column name.
    pub schema_override: HashMap<String, FeatureKind>,
    /// Drop rows with missing values instead of failing.
    pub drop_missing: bool,
}

fn is_missing(s: &str) -> bool {
    MISSING_MARKERS.contains(&s.trim())
}

fn parse_real<T: Scalar>(s: &str) -> Option<T> {
    s.trim().parse::<T>().ok().filter(|v| v.is_finite())
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn load_csv<T: Scalar>(path: impl AsRef<Path>, target: &str, opts: &LoadOptions) -> Result<Dataset<T>> {
    read_csv(open(path.as_ref())?, target, opts)
}

/// Parse a comma-separated table with a header row.
pub fn read_csv<T: Scalar, R: Read>(reader: R, target: &str, opts: &LoadOptions) -> Result<Dataset<T>> {
    let (header, rows) = read_records(reader)?;
    let target_col = header.iter().position(|h| h == target).ok_or_else(|| Error::MissingTarget(target.into()))?;
    for name in opts.schema_override.keys() {
        if !header.contains(name) {
            return Err(Error::SchemaMismatch(format!("override names unknown column `{name}`")));
        }
    }

    let mut kept: Vec<(usize, Vec<String>)> = Vec::with_capacity(rows.len());
    for (row, rec) in rows.into_iter().enumerate() {
        if let Some(col) = rec.iter().position(|v| is_missing(v)) {
            if opts.drop_missing {
                continue;
            }
            return Err(Error::MissingValue { row: row + 1, column: header[col].clone() });
        }
        kept.push((row + 1, rec));
    }

    let feature_cols: Vec<usize> = (0..header.len()).filter(|&c| c != target_col).collect();
    let mut features = Vec::with_capacity(feature_cols.len());
    for &c in &feature_cols {
        let inferred = if kept.iter().all(|(_, r)| parse_real::<T>(&r[c]).is_some()) {
            FeatureKind::Continuous
        } else {
            FeatureKind::Categorical
        };
        let kind = opts.schema_override.get(&header[c]).copied().unwrap_or(inferred);
        let mut categories: Vec<String> = Vec::new();
        if kind == FeatureKind::Categorical {
            let mut seen = HashSet::new();
            for (_, r) in &kept {
                let tok = r[c].trim();
                if seen.insert(tok) {
                    categories.push(tok.to_string());
                }
            }
        }
        features.push(Feature { name: header[c].clone(), kind, categories });
    }
    let schema = FeatureSchema::new(features, target)?;

    let mut cases = Vec::with_capacity(kept.len());
    for (row, rec) in &kept {
        let y = parse_real::<T>(&rec[target_col])
            .ok_or_else(|| Error::BadRow { row: *row, msg: format!("target `{}` is not a real number", rec[target_col]) })?;
        let x = parse_features(&schema, &feature_cols, rec).map_err(|msg| Error::BadRow { row: *row, msg })?;
        cases.push(Case { x, y });
    }
    Ok(Dataset { schema, cases })
}

fn parse_features<T: Scalar>(
    schema: &FeatureSchema,
    cols: &[usize],
    rec: &[String],
) -> std::result::Result<Vec<Value<T>>, String> {
    schema
        .features
        .iter()
        .enumerate()
        .zip(cols)
        .map(|((f, feat), &c)| match feat.kind {
            FeatureKind::Continuous => parse_real::<T>(&rec[c])
                .map(Value::Num)
                .ok_or_else(|| format!("`{}` in column `{}` is not a real number", rec[c], feat.name)),
            FeatureKind::Categorical => Ok(Value::Cat(schema.code_of(f, rec[c].trim()))),
        })
        .collect()
}

/// Feature rows of a CSV read against an existing schema (e.g. a trained
/// model's). The target column is optional and returned when present.
pub fn read_features_with_schema<T: Scalar, R: Read>(
    reader: R,
    schema: &FeatureSchema,
    drop_missing: bool,
) -> Result<(Vec<Vec<Value<T>>>, Option<Vec<T>>)> {
    let (header, rows) = read_records(reader)?;
    let mut cols = Vec::with_capacity(schema.len());
    for f in &schema.features {
        let c = header
            .iter()
            .position(|h| *h == f.name)
            .ok_or_else(|| Error::SchemaMismatch(format!("column `{}` missing from input", f.name)))?;
        cols.push(c);
    }
    let target_col = header.iter().position(|h| *h == schema.target_name);
    let mut xs = Vec::with_capacity(rows.len());
    let mut ys = Vec::with_capacity(rows.len());
    for (row, rec) in rows.iter().enumerate() {
        let needed = cols.iter().copied().chain(target_col);
        if let Some(c) = needed.into_iter().find(|&c| is_missing(&rec[c])) {
            if drop_missing {
                continue;
            }
            return Err(Error::MissingValue { row: row + 1, column: header[c].clone() });
        }
        let x = parse_features(schema, &cols, rec).map_err(|msg| Error::SchemaMismatch(format!("row {}: {msg}", row + 1)))?;
        xs.push(x);
        if let Some(tc) = target_col {
            let y = parse_real::<T>(&rec[tc])
                .ok_or_else(|| Error::BadRow { row: row + 1, msg: "target is not a real number".into() })?;
            ys.push(y);
        }
    }
    Ok((xs, target_col.map(|_| ys)))
}

fn read_records<R: Read>(reader: R) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).flexible(false).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let mut seen = HashSet::new();
    for h in &header {
        if !seen.insert(h) {
            return Err(Error::DuplicateColumn(h.clone()));
        }
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::BadRow { row: i + 1, msg: e.to_string() })?;
        rows.push(rec.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Schema sidecar: one `name,kind` pair per line; blank lines and `#` comments ignored.
pub fn read_schema_sidecar(path: impl AsRef<Path>) -> Result<HashMap<String, FeatureKind>> {
    let path = path.as_ref();
    parse_schema_sidecar(BufReader::new(open(path)?))
}

pub fn parse_schema_sidecar<R: BufRead>(reader: R) -> Result<HashMap<String, FeatureKind>> {
    let mut out = HashMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::BadSchema { line: i + 1, msg: e.to_string() })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (name, kind) = line
            .split_once(',')
            .ok_or_else(|| Error::BadSchema { line: i + 1, msg: "expected `name,kind`".into() })?;
        let kind = kind.parse().map_err(|e: Error| Error::BadSchema { line: i + 1, msg: e.to_string() })?;
        out.insert(name.trim().to_string(), kind);
    }
    Ok(out)
}

/// Per-feature `(min, max)` of continuous features, fitted on training data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizationStats<T> {
    pub ranges: Vec<Option<(T, T)>>,
}

pub fn fit_normalization<T: Scalar>(train: &Dataset<T>) -> NormalizationStats<T> {
    let ranges = (0..train.n_features())
        .map(|f| match train.schema.kind(f) {
            FeatureKind::Categorical => None,
            FeatureKind::Continuous => train.cases.iter().map(|c| c.x[f].num()).fold(None, |acc, v| match acc {
                None => Some((v, v)),
                Some((lo, hi)) => Some((lo.min(v), hi.max(v))),
            }),
        })
        .collect();
    NormalizationStats { ranges }
}

/// Map continuous values into `[0, 1]` (clamped; constant features map to 0).
pub fn scale_01<T: Scalar>(stats: &NormalizationStats<T>, x: &[Value<T>]) -> Vec<Value<T>> {
    x.iter()
        .zip(&stats.ranges)
        .map(|(v, range)| match (v, range) {
            (Value::Num(v), Some((lo, hi))) => {
                let span = *hi - *lo;
                if span <= T::zero() {
                    Value::Num(T::zero())
                } else {
                    Value::Num(((*v - *lo) / span).max(T::zero()).min(T::one()))
                }
            }
            (v, _) => *v,
        })
        .collect()
}
