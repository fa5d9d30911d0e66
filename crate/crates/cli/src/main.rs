use std::fs::File;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rulereg::eval::CSV_HEADER;
use rulereg::model::write_atomic;
use rulereg::{
    compare, evaluate_methods, format_table, load_csv, read_features_with_schema, read_schema_sidecar, sweep_classes,
    Dataset64, EvalReport64, LoadOptions, Method, ModelFile64, Selection, TrainConfig, Trained,
};

const DATA_DIR_VAR: &str = "RULEREG_DATA_DIR";

#[derive(Parser)]
#[command(name = "rulereg", version, about = "Regression rules, trees and nearest neighbors on tabular data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a model and write it to a file.
    Train {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Method to train.
        #[arg(long, default_value = "rule")]
        method: Method,
        /// Where to write the model.
        #[arg(long, visible_alias = "model")]
        out: PathBuf,
    },
    /// Predict every row of a CSV file, one value per line.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: String,
        #[arg(long)]
        drop_missing: bool,
        /// Write predictions here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate one or more methods.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated methods.
        #[arg(long, value_delimiter = ',', default_value = "rule")]
        method: Vec<Method>,
        /// Write per-fold results as CSV (input for `compare`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validated error for each number of pseudo-classes.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', default_value = "rule,rule-knn")]
        method: Vec<Method>,
        /// Write the table as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Two-standard-error test between evaluation results.
    Compare {
        /// Report CSVs written by `evaluate --out`.
        #[arg(required = true, num_args = 1..=2)]
        reports: Vec<PathBuf>,
    },
    /// Print a trained model.
    Show {
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Args)]
struct DataArgs {
    /// CSV file; a relative path that does not exist is looked up in $RULEREG_DATA_DIR.
    #[arg(long)]
    data: String,
    /// Target column (default: the last column).
    #[arg(long)]
    target: Option<String>,
    /// `name,kind` sidecar (default: `<data>.schema` next to the CSV, if present).
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Skip rows with missing values instead of failing.
    #[arg(long)]
    drop_missing: bool,
}

#[derive(Args)]
struct RunArgs {
    /// Number of pseudo-classes: `N`, a range `A..B` or a list `A,B,C`.
    #[arg(long, default_value = "2..8", value_parser = parse_classes)]
    k_classes: Classes,
    /// Minimum number of cases a rule must cover.
    #[arg(long, default_value_t = 3)]
    min_cover: usize,
    /// Neighbors for the k-NN and hybrid methods.
    #[arg(long, default_value_t = 5)]
    knn: usize,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Model-size selection: cv or gcv.
    #[arg(long, default_value = "cv")]
    selection: Selection,
    /// Each pruning checkpoint is below this fraction of the previous complexity.
    #[arg(long, default_value_t = 0.9)]
    checkpoint_ratio: f64,
}

#[derive(Clone, Debug)]
struct Classes(Vec<usize>);

fn parse_classes(s: &str) -> std::result::Result<Classes, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a class count"));
    let ks = if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a > b {
            return Err(format!("empty range {s}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(num).collect::<std::result::Result<Vec<_>, _>>()?
    };
    if ks.is_empty() || ks.contains(&0) {
        return Err("class counts must be positive".into());
    }
    Ok(Classes(ks))
}

impl RunArgs {
    fn config(&self, method: Method) -> Result<TrainConfig> {
        let cfg = TrainConfig {
            method,
            k_classes: self.k_classes.0[0],
            min_cover: self.min_cover,
            checkpoint_ratio: self.checkpoint_ratio,
            folds: self.folds,
            seed: self.seed,
            selection: self.selection,
            knn: self.knn,
            ..TrainConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn resolve_data(arg: &str) -> Result<PathBuf> {
    let path = PathBuf::from(arg);
    if path.exists() {
        return Ok(path);
    }
    if path.is_relative() {
        if let Some(dir) = std::env::var_os(DATA_DIR_VAR) {
            let dir = PathBuf::from(dir);
            for candidate in [dir.join(arg), dir.join(format!("{arg}.csv"))] {
                if candidate.exists() {
                    return Ok(candidate);
                }
            }
        }
    }
    bail!("data file `{arg}` not found (relative paths are also looked up in ${DATA_DIR_VAR})")
}

fn last_column(path: &Path) -> Result<String> {
    let mut line = String::new();
    BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?).read_line(&mut line)?;
    let last = line.trim_end().rsplit(',').next().unwrap_or("").trim().trim_matches('"');
    if last.is_empty() {
        bail!("{} has no header row", path.display());
    }
    Ok(last.to_string())
}

impl DataArgs {
    fn load(&self) -> Result<Dataset64> {
        let path = resolve_data(&self.data)?;
        let target = match &self.target {
            Some(t) => t.clone(),
            None => last_column(&path)?,
        };
        let sidecar = self.schema.clone().or_else(|| Some(path.with_extension("schema")).filter(|p| p.exists()));
        let schema_override = match &sidecar {
            Some(s) => read_schema_sidecar(s).with_context(|| format!("reading schema {}", s.display()))?,
            None => Default::default(),
        };
        let opts = LoadOptions { schema_override, drop_missing: self.drop_missing };
        load_csv(&path, &target, &opts).with_context(|| format!("loading {}", path.display()))
    }
}

fn f(v: f64) -> String {
    format!("{v:.4}")
}

fn train_cmd(data: &DataArgs, run: &RunArgs, method: Method, out: &Path) -> Result<()> {
    let mut o = String::new();
    let ds = data.load()?;
    let cfg = run.config(method)?;
    let y = ds.y();
    if !y.is_empty() && y.iter().all(|&v| v == y[0]) {
        eprintln!("warning: target `{}` is constant; the model predicts {} everywhere", ds.schema.target_name, y[0]);
    }
    let ks: &[usize] = if method.uses_classes() { &run.k_classes.0 } else { &run.k_classes.0[..1] };
    let mut best: Option<(TrainConfig, Trained<f64>)> = None;
    for &k in ks {
        let cfg = TrainConfig { k_classes: k, ..cfg.clone() };
        let t = rulereg::train(&ds, &cfg)?;
        let better = match &best {
            None => true,
            Some((_, b)) => t.estimated_mad.unwrap_or(t.train_mad) < b.estimated_mad.unwrap_or(b.train_mad),
        };
        if better {
            best = Some((cfg, t));
        }
    }
    let (cfg, trained) = best.expect("at least one class count");
    ModelFile64::new(ds.schema.clone(), cfg.clone(), &trained).save(out)?;

    write!(o, "{method}: complexity {}", trained.model.complexity())?;
    if method.uses_classes() {
        write!(o, ", k={}", cfg.k_classes)?;
    }
    write!(o, ", train MAD {}", f(trained.train_mad))?;
    match trained.estimated_mad {
        Some(e) => writeln!(o, ", estimated MAD {}", f(e)),
        None => writeln!(o, ", estimated MAD n/a"),
    }?;
    writeln!(o, "model written to {}", out.display())?;
    emit(&o)
}

fn predict_cmd(model: &Path, data: &str, drop_missing: bool, out: Option<&Path>) -> Result<()> {
    let mf = ModelFile64::load(model).with_context(|| format!("loading model {}", model.display()))?;
    let path = resolve_data(data)?;
    let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
    let (xs, ys) = read_features_with_schema::<f64, _>(file, &mf.schema, drop_missing)?;
    let preds: Vec<f64> = xs.iter().map(|x| mf.predict(x)).collect();
    let mut text = String::with_capacity(preds.len() * 12);
    for p in &preds {
        text.push_str(&format!("{p}\n"));
    }
    match out {
        Some(o) => write_atomic(o, text.as_bytes())?,
        None => emit(&text)?,
    }
    if let Some(ys) = ys {
        if !ys.is_empty() {
            eprintln!("MAD over {} rows: {}", ys.len(), f(rulereg::mad(&ys, &preds)?));
        }
    }
    Ok(())
}

/// Write to standard output; a reader that went away early is not an error.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn report_csv(reports: &[EvalReport64]) -> String {
    let mut s = format!("{CSV_HEADER}\n");
    for r in reports {
        s.push_str(&r.csv_rows());
    }
    s
}

fn evaluate_cmd(data: &DataArgs, run: &RunArgs, methods: &[Method], out: Option<&Path>) -> Result<()> {
    let mut o = String::new();
    let ds = data.load()?;
    let cfg = run.config(methods[0])?;
    let (reports, _) = evaluate_methods(&ds, &cfg, &run.k_classes.0, methods, run.folds, run.seed)?;
    write!(o, "{}", format_table(&reports))?;
    if let Some(path) = out {
        write_atomic(path, report_csv(&reports).as_bytes())?;
    }
    emit(&o)
}

fn sweep_cmd(data: &DataArgs, run: &RunArgs, methods: &[Method], out: Option<&Path>) -> Result<()> {
    let mut o = String::new();
    if let Some(m) = methods.iter().find(|m| !m.uses_classes()) {
        bail!("method `{m}` does not use pseudo-classes");
    }
    let ds = data.load()?;
    let cfg = run.config(methods[0])?;
    let rows = sweep_classes(&ds, &cfg, &run.k_classes.0, methods, run.folds, run.seed)?;
    let rel = |r: &EvalReport64| r.relative_error.map_or("n/a".to_string(), |e| format!("{e:.3}"));
    let mut header = format!("{:>3}", "k");
    for m in methods {
        header.push_str(&format!("  {:>10}  {:>8}", m.name(), "MAD"));
    }
    writeln!(o, "{header}")?;
    let mut csv = String::from("k,method,mad,se,relative_error\n");
    for row in &rows {
        let mut line = format!("{:>3}", row.k);
        for r in &row.reports {
            line.push_str(&format!("  {:>10}  {:>8}", rel(r), f(r.mean_mad)));
            let re = r.relative_error.map_or(String::new(), |e| e.to_string());
            csv.push_str(&format!("{},{},{},{},{re}\n", row.k, r.method, r.mean_mad, r.se));
        }
        writeln!(o, "{line}")?;
    }
    if let Some(path) = out {
        write_atomic(path, csv.as_bytes())?;
    }
    emit(&o)
}

fn compare_cmd(paths: &[PathBuf]) -> Result<()> {
    let mut o = String::new();
    let mut reports = Vec::new();
    for p in paths {
        let file = File::open(p).with_context(|| format!("opening {}", p.display()))?;
        reports.extend(rulereg::eval::reports_from_csv::<f64, _>(file).with_context(|| format!("reading {}", p.display()))?);
    }
    if reports.len() < 2 {
        bail!("need two reports to compare, found {}", reports.len());
    }
    for i in 0..reports.len() {
        for j in i + 1..reports.len() {
            let (a, b) = (&reports[i], &reports[j]);
            let c = compare(a, b)?;
            writeln!(o, "{} ({}) vs {} ({}): {c}", a.label(), f(a.mean_mad), b.label(), f(b.mean_mad))?;
        }
    }
    emit(&o)
}

fn show_cmd(model: &Path) -> Result<()> {
    let mut o = String::new();
    let mf = ModelFile64::load(model).with_context(|| format!("loading model {}", model.display()))?;
    writeln!(o, "# {} model, complexity {}", mf.method, mf.model.complexity())?;
    write!(o, "{}", mf.model.display(&mf.schema))?;
    emit(&o)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train { data, run, method, out } => train_cmd(&data, &run, method, &out),
        Command::Predict { model, data, drop_missing, out } => predict_cmd(&model, &data, drop_missing, out.as_deref()),
        Command::Evaluate { data, run, method, out } => evaluate_cmd(&data, &run, &method, out.as_deref()),
        Command::Sweep { data, run, method, out } => sweep_cmd(&data, &run, &method, out.as_deref()),
        Command::Compare { reports } => compare_cmd(&reports),
        Command::Show { model } => show_cmd(&model),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
