//! Regression by ordered rules learned through pseudo-classes.
//!
//! The target values are grouped into contiguous bands (pseudo-classes), an
//! ordered covering rule set is induced for the bands, and the rule set is
//! repeatedly pruned and locally optimized. The best of the saved sizes is
//! picked by cross-validation. Each rule predicts the median of its region, or
//! in the hybrid mode the mean of the nearest training cases of that region.
//!
//! Regression trees and plain k-nearest neighbors are included as baselines,
//! together with the cross-validation harness used to compare them.
//!
//! Every learner is generic over the floating-point type; the `*64` aliases
//! fix it to `f64`.
//!
//! ```
//! use rulereg::{Dataset64, Method, TrainConfig};
//!
//! let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64]).collect();
//! let y: Vec<f64> = (0..40).map(|i| if i < 20 { 1.0 } else { 5.0 }).collect();
//! let data = Dataset64::from_rows(&["x"], "y", &rows, &y).unwrap();
//! let cfg = TrainConfig { method: Method::Rule, k_classes: 2, folds: 4, ..Default::default() };
//! let trained = rulereg::train(&data, &cfg).unwrap();
//! assert_eq!(trained.train_mad, 0.0);
//! ```

mod coverage;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod induction;
pub mod knn;
pub mod metrics;
pub mod model;
pub mod pclass;
pub mod refine;
pub mod rules;
pub mod scalar;
pub mod tree;

pub use dataset::{
    fit_normalization, load_csv, read_csv, read_features_with_schema, read_schema_sidecar, scale_01, Case, Dataset,
    Feature, FeatureKind, FeatureSchema, LoadOptions, NormalizationStats, Value,
};
pub use error::{Error, Result};
pub use eval::{
    compare, cross_validate, evaluate_methods, format_table, holdout_evaluate, sweep_classes, Comparison, EvalReport,
    FoldPlan, SweepRow, Verdict,
};
pub use induction::{enumerate_conditions, grow_rule, induce_covering, CoverState};
pub use knn::{distance, hybrid_predict, knn_predict, HybridBase, HybridModel, NeighborModel};
pub use metrics::{gcv, mad, median, relative_error, variance_err, ErrorSummary};
pub use model::{train, train_methods, Method, Model, ModelFile, TrainConfig, Trained};
pub use pclass::{p_class, p_class_with, split_in_two, ClassDistance, PseudoClassAssignment};
pub use refine::{
    build_ladder, prune_step, swap_optimize, train_pipeline, LadderEntry, ModelLadder, PipelineConfig, PruneCandidate,
    Selection,
};
pub use rules::{Condition, Rule, RuleSet, Test};
pub use scalar::Scalar;
pub use tree::{grow_tree, prune_tree, train_tree, tree_predict, tree_to_rules, TreeConfig, TreeNode};

pub type Dataset64 = Dataset<f64>;
pub type Dataset32 = Dataset<f32>;
pub type RuleSet64 = RuleSet<f64>;
pub type RuleSet32 = RuleSet<f32>;
pub type TreeNode64 = TreeNode<f64>;
pub type Model64 = Model<f64>;
pub type ModelFile64 = ModelFile<f64>;
pub type EvalReport64 = EvalReport<f64>;
