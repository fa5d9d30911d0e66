//! Training front end over every method, and the versioned model file.

use std::fmt;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::{Dataset, FeatureSchema, Value};
use crate::error::{Error, Result};
use crate::knn::{hybrid_predict, knn_predict, HybridBase, HybridModel, NeighborModel, DEFAULT_K};
use crate::metrics::{mad, median};
use crate::pclass::ClassDistance;
use crate::refine::{train_pipeline, ModelLadder, PipelineConfig, Selection};
use crate::rules::RuleSet;
use crate::scalar::Scalar;
use crate::tree::{train_tree, tree_predict, TreeConfig, TreeNode};

pub const MODEL_FORMAT: &str = "rulereg-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Rule,
    RuleKnn,
    Tree,
    TreeKnn,
    Knn,
    MedianBaseline,
}

impl Method {
    pub const ALL: [Method; 6] = [Method::Rule, Method::RuleKnn, Method::Tree, Method::TreeKnn, Method::Knn, Method::MedianBaseline];

    pub fn name(self) -> &'static str {
        match self {
            Method::Rule => "rule",
            Method::RuleKnn => "rule-knn",
            Method::Tree => "tree",
            Method::TreeKnn => "tree-knn",
            Method::Knn => "knn",
            Method::MedianBaseline => "median-baseline",
        }
    }

    /// Whether the number of pseudo-classes affects this method.
    pub fn uses_classes(self) -> bool {
        matches!(self, Method::Rule | Method::RuleKnn)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown method `{s}` (expected one of rule, rule-knn, tree, tree-knn, knn, median-baseline)")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub method: Method,
    pub k_classes: usize,
    pub min_cover: usize,
    pub checkpoint_ratio: f64,
    /// Folds of the internal model-size selection.
    pub folds: usize,
    pub seed: u64,
    pub selection: Selection,
    #[serde(default)]
    pub distance: ClassDistance,
    pub min_node: usize,
    /// Neighbors for the k-NN and hybrid methods.
    pub knn: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let p = PipelineConfig::default();
        TrainConfig {
            method: Method::Rule,
            k_classes: p.k_classes,
            min_cover: p.min_cover,
            checkpoint_ratio: p.checkpoint_ratio,
            folds: p.folds,
            seed: p.seed,
            selection: p.selection,
            distance: p.distance,
            min_node: TreeConfig::default().min_node,
            knn: DEFAULT_K,
        }
    }
}

impl TrainConfig {
    pub fn pipeline(&self) -> PipelineConfig {
        PipelineConfig {
            k_classes: self.k_classes,
            min_cover: self.min_cover,
            checkpoint_ratio: self.checkpoint_ratio,
            folds: self.folds,
            seed: self.seed,
            selection: self.selection,
            distance: self.distance,
        }
    }

    pub fn tree(&self) -> TreeConfig {
        TreeConfig { min_node: self.min_node, folds: self.folds, seed: self.seed, selection: self.selection }
    }

    pub fn validate(&self) -> Result<()> {
        self.pipeline().validate()?;
        if self.knn == 0 {
            return Err(Error::InvalidArgument("knn must be at least 1".into()));
        }
        if self.min_node == 0 {
            return Err(Error::InvalidArgument("min_node must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", bound(deserialize = "T: Scalar"))]
pub enum Model<T> {
    Rules { rules: RuleSet<T> },
    Tree { tree: TreeNode<T> },
    Knn { knn: NeighborModel<T> },
    Hybrid { hybrid: HybridModel<T> },
    Constant { value: T },
}

impl<T: Scalar> Model<T> {
    pub fn predict(&self, x: &[Value<T>]) -> T {
        match self {
            Model::Rules { rules } => rules.predict(x),
            Model::Tree { tree } => tree_predict(tree, x),
            Model::Knn { knn } => knn_predict(knn, x),
            Model::Hybrid { hybrid } => hybrid_predict(hybrid, x),
            Model::Constant { value } => *value,
        }
    }

    /// Conditions for rule models, splits for trees, zero otherwise.
    pub fn complexity(&self) -> usize {
        match self {
            Model::Rules { rules } => rules.complexity(),
            Model::Tree { tree } => tree.n_splits(),
            Model::Hybrid { hybrid } => match &hybrid.base {
                HybridBase::Rules(rs) => rs.complexity(),
                HybridBase::Tree(t) => t.n_splits(),
            },
            Model::Knn { .. } | Model::Constant { .. } => 0,
        }
    }

    pub fn display<'a>(&'a self, schema: &'a FeatureSchema) -> impl fmt::Display + 'a {
        ModelDisplay { model: self, schema }
    }
}

struct ModelDisplay<'a, T> {
    model: &'a Model<T>,
    schema: &'a FeatureSchema,
}

impl<T: Scalar> fmt::Display for ModelDisplay<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.model {
            Model::Rules { rules } => write!(f, "{}", rules.display(self.schema)),
            Model::Tree { tree } => write!(f, "{}", tree.display(self.schema)),
            Model::Hybrid { hybrid } => {
                match &hybrid.base {
                    HybridBase::Rules(rs) => write!(f, "{}", rs.display(self.schema))?,
                    HybridBase::Tree(t) => write!(f, "{}", t.display(self.schema))?,
                }
                let sizes: Vec<String> = hybrid.rosters.iter().map(|r| r.len().to_string()).collect();
                writeln!(f, "regions answer with the mean of {} nearest region cases (roster sizes {})", hybrid.k, sizes.join(", "))
            }
            Model::Knn { knn } => writeln!(f, "{}-nearest-neighbor model over {} stored cases", knn.k, knn.cases.len()),
            Model::Constant { value } => writeln!(f, "{} = {value}", self.schema.target_name),
        }
    }
}

/// One saved model of a selection ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LadderRow<T> {
    pub complexity: usize,
    pub train_mad: T,
    pub estimated_mad: T,
    pub chosen: bool,
}

fn ladder_rows<M, T: Scalar>(l: &ModelLadder<M, T>) -> Vec<LadderRow<T>> {
    l.entries
        .iter()
        .enumerate()
        .map(|(i, e)| LadderRow { complexity: e.complexity, train_mad: e.train_mad, estimated_mad: e.estimated_mad, chosen: i == l.chosen })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trained<T> {
    pub method: Method,
    pub model: Model<T>,
    pub train_mad: T,
    /// Estimated error of the chosen size, when a ladder was selected from.
    pub estimated_mad: Option<T>,
    pub ladder: Vec<LadderRow<T>>,
}

/// Train several methods on the same data, sharing the rule pipeline and the tree
/// between the constant and hybrid variants.
pub fn train_methods<T: Scalar>(train: &Dataset<T>, config: &TrainConfig, methods: &[Method]) -> Result<Vec<Trained<T>>> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::Empty);
    }
    let needs = |a: Method, b: Method| methods.iter().any(|&m| m == a || m == b);
    let rules = if needs(Method::Rule, Method::RuleKnn) { Some(train_pipeline(train, &config.pipeline())?) } else { None };
    let tree = if needs(Method::Tree, Method::TreeKnn) { Some(train_tree(train, &config.tree())?) } else { None };
    let y = train.y();
    methods
        .iter()
        .map(|&method| {
            let (model, estimated_mad, ladder) = match method {
                Method::Rule | Method::RuleKnn => {
                    let (rs, l) = rules.as_ref().unwrap();
                    let est = Some(l.chosen_entry().estimated_mad);
                    let model = if method == Method::Rule {
                        Model::Rules { rules: rs.clone() }
                    } else {
                        Model::Hybrid { hybrid: HybridModel::fit(HybridBase::Rules(rs.clone()), train, config.knn)? }
                    };
                    (model, est, ladder_rows(l))
                }
                Method::Tree | Method::TreeKnn => {
                    let (t, l) = tree.as_ref().unwrap();
                    let est = Some(l.chosen_entry().estimated_mad);
                    let model = if method == Method::Tree {
                        Model::Tree { tree: t.clone() }
                    } else {
                        Model::Hybrid { hybrid: HybridModel::fit(HybridBase::Tree(t.clone()), train, config.knn)? }
                    };
                    (model, est, ladder_rows(l))
                }
                Method::Knn => (Model::Knn { knn: NeighborModel::fit(train, config.knn)? }, None, Vec::new()),
                Method::MedianBaseline => (Model::Constant { value: median(&y)? }, None, Vec::new()),
            };
            let pred: Vec<T> = train.cases.iter().map(|c| model.predict(&c.x)).collect();
            Ok(Trained { method, train_mad: mad(&y, &pred)?, model, estimated_mad, ladder })
        })
        .collect()
}

pub fn train<T: Scalar>(train: &Dataset<T>, config: &TrainConfig) -> Result<Trained<T>> {
    Ok(train_methods(train, config, &[config.method])?.pop().unwrap())
}

/// Self-contained model document: schema, configuration and fitted model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Scalar"))]
pub struct ModelFile<T> {
    pub format: String,
    pub version: u32,
    pub method: Method,
    pub schema: FeatureSchema,
    pub config: TrainConfig,
    pub model: Model<T>,
}

impl<T: Scalar> ModelFile<T> {
    pub fn new(schema: FeatureSchema, config: TrainConfig, trained: &Trained<T>) -> Self {
        ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            method: trained.method,
            schema,
            config,
            model: trained.model.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| Error::ModelFile(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct Header {
            format: String,
            version: u32,
        }
        let h: Header = serde_json::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))?;
        if h.format != MODEL_FORMAT {
            return Err(Error::ModelFile(format!("not a model file (format `{}`)", h.format)));
        }
        if h.version != MODEL_VERSION {
            return Err(Error::ModelFile(format!("unsupported model file version {}", h.version)));
        }
        serde_json::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))
    }

    /// Write through a temporary file in the target directory, then rename over `path`.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        write_atomic(path.as_ref(), self.to_json()?.as_bytes())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_json(&text)
    }

    pub fn predict(&self, x: &[Value<T>]) -> T {
        self.model.predict(x)
    }
}

/// Replace `path` with `bytes` so that readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| Error::Io { path: path.into(), source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let name = path.file_name().ok_or_else(|| Error::InvalidArgument(format!("not a file path: {}", path.display())))?;
    let tmp = dir.join(format!(".{}.tmp{}", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(io)
}
