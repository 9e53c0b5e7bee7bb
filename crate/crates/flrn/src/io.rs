//! CSV formats for datasets, models, predictions, sweeps and benchmarks.
//!
//! Floats are written with 17 significant digits so they parse back to the
//! same bits; NaN is written as an empty cell.

use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use flrn_core::estimator::FitKind;
use flrn_core::sweep::SweepRow;
use flrn_core::{Curve, Dataset, FittedModel, Grid, KernelSpec};

use crate::error::{AppError, AppResult};
use crate::eval::{BenchRow, LambdaRow};

/// `{:.16e}`, or empty for NaN.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}

/// Inverse of [`fmt_f64`].
pub fn parse_f64(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(f64::NAN);
    }
    s.parse::<f64>().map_err(|e| format!("bad number {s:?}: {e}"))
}

fn parse_usize(s: &str) -> Result<usize, String> {
    s.trim().parse::<usize>().map_err(|e| format!("bad integer {s:?}: {e}"))
}

fn writer(path: &Path) -> AppResult<csv::Writer<File>> {
    csv::WriterBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| AppError::io(path, e))
}

fn reader(path: &Path) -> AppResult<csv::Reader<File>> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_path(path)
        .map_err(|e| AppError::io(path, e))
}

fn records(path: &Path) -> AppResult<Vec<csv::StringRecord>> {
    reader(path)?
        .records()
        .collect::<Result<_, _>>()
        .map_err(|e| AppError::io(path, e))
}

fn write_rows<I, R>(path: &Path, rows: I) -> AppResult<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator,
    R::Item: AsRef<[u8]>,
{
    let mut w = writer(path)?;
    for row in rows {
        w.write_record(row).map_err(|e| AppError::io(path, e))?;
    }
    w.flush().map_err(|e| AppError::io(path, e))
}

/// Header `y/t,t_0,...`, then one `Y_i,X_i(t_0),...` row per curve.
pub fn write_dataset(path: &Path, data: &Dataset) -> AppResult<()> {
    let header: Vec<String> = std::iter::once("y/t".to_string())
        .chain(data.grid.points().iter().map(|&t| fmt_f64(t)))
        .collect();
    let rows = data.curves.iter().zip(&data.responses).map(|(x, &y)| {
        std::iter::once(fmt_f64(y))
            .chain(x.values().iter().map(|&v| fmt_f64(v)))
            .collect::<Vec<_>>()
    });
    write_rows(path, std::iter::once(header).chain(rows))
}

pub fn read_dataset(path: &Path) -> AppResult<Dataset> {
    let recs = records(path)?;
    let bad = |msg: String| AppError::io(path, msg);
    let header = recs.first().ok_or_else(|| bad("empty file".into()))?;
    if header.get(0).map(str::trim) != Some("y/t") {
        return Err(bad("first header cell must be y/t".into()));
    }
    let points = header.iter().skip(1).map(parse_f64).collect::<Result<Vec<_>, _>>().map_err(bad)?;
    let grid = Arc::new(Grid::from_points(points).map_err(|e| bad(e.to_string()))?);
    let mut curves = Vec::with_capacity(recs.len() - 1);
    let mut responses = Vec::with_capacity(recs.len() - 1);
    for (i, rec) in recs.iter().enumerate().skip(1) {
        if rec.len() != grid.len() + 1 {
            return Err(bad(format!("row {i} has {} cells, expected {}", rec.len(), grid.len() + 1)));
        }
        let vals = rec.iter().map(parse_f64).collect::<Result<Vec<_>, _>>().map_err(&bad)?;
        responses.push(vals[0]);
        curves.push(Curve::new(grid.clone(), vals[1..].to_vec()).map_err(|e| bad(format!("row {i}: {e}")))?);
    }
    Dataset::new(grid, curves, responses).map_err(|e| bad(e.to_string()))
}

/// What a model file stores; basis curves come from the training data.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub kind: FitKind,
    pub lambda: f64,
    pub kernel: KernelSpec,
    pub subsample_indices: Vec<usize>,
    pub coeff: Vec<f64>,
}

impl ModelFile {
    pub fn from_model(model: &FittedModel) -> Self {
        let subsample_indices = match model.kind {
            FitKind::Full => (0..model.len()).collect(),
            FitKind::Nystrom => model.subsample_indices.clone(),
        };
        Self {
            kind: model.kind,
            lambda: model.lambda,
            kernel: model.kernel,
            subsample_indices,
            coeff: model.coeff.clone(),
        }
    }

    /// Rebuilds the model over the training dataset it was fitted on.
    pub fn into_model(self, train: &Dataset) -> AppResult<FittedModel> {
        if let Some(&i) = self.subsample_indices.iter().find(|&&i| i >= train.len()) {
            return Err(AppError::usage(format!(
                "model references curve {i} but the training file has {} rows",
                train.len()
            )));
        }
        let basis = self.subsample_indices.iter().map(|&i| train.curves[i].clone()).collect();
        let indices = match self.kind {
            FitKind::Full => {
                if self.coeff.len() != train.len() {
                    return Err(AppError::usage(format!(
                        "full model has {} coefficients but the training file has {} rows",
                        self.coeff.len(),
                        train.len()
                    )));
                }
                Vec::new()
            }
            FitKind::Nystrom => self.subsample_indices,
        };
        Ok(FittedModel::from_parts(self.kind, self.coeff, basis, indices, self.lambda, self.kernel)?)
    }
}

/// Rows `kind,lambda,kernel,m`, the values, `index,subsample_index,coefficient`,
/// then one row per coefficient.
pub fn write_model(path: &Path, model: &ModelFile) -> AppResult<()> {
    let mut rows: Vec<Vec<String>> = vec![
        vec!["kind".into(), "lambda".into(), "kernel".into(), "m".into()],
        vec![
            model.kind.as_str().into(),
            fmt_f64(model.lambda),
            model.kernel.to_string(),
            model.coeff.len().to_string(),
        ],
        vec!["index".into(), "subsample_index".into(), "coefficient".into()],
    ];
    for (i, (&s, &c)) in model.subsample_indices.iter().zip(&model.coeff).enumerate() {
        rows.push(vec![i.to_string(), s.to_string(), fmt_f64(c)]);
    }
    write_rows(path, rows)
}

pub fn read_model(path: &Path) -> AppResult<ModelFile> {
    let recs = records(path)?;
    let bad = |msg: String| AppError::io(path, msg);
    if recs.len() < 3 || recs[0].iter().collect::<Vec<_>>() != ["kind", "lambda", "kernel", "m"] {
        return Err(bad("not a model file".into()));
    }
    let meta = &recs[1];
    if meta.len() != 4 {
        return Err(bad("model metadata row needs 4 cells".into()));
    }
    let kind: FitKind = meta[0].parse().map_err(|e: flrn_core::Error| bad(e.to_string()))?;
    let lambda = parse_f64(&meta[1]).map_err(bad)?;
    let kernel: KernelSpec = meta[2].parse().map_err(|e: flrn_core::Error| bad(e.to_string()))?;
    let m = parse_usize(&meta[3]).map_err(bad)?;
    let body = &recs[3..];
    if body.len() != m {
        return Err(bad(format!("header says m={m} but {} coefficient rows follow", body.len())));
    }
    let mut subsample_indices = Vec::with_capacity(m);
    let mut coeff = Vec::with_capacity(m);
    for (i, rec) in body.iter().enumerate() {
        if rec.len() != 3 || parse_usize(&rec[0]).map_err(bad)? != i {
            return Err(bad(format!("malformed coefficient row {i}")));
        }
        subsample_indices.push(parse_usize(&rec[1]).map_err(bad)?);
        coeff.push(parse_f64(&rec[2]).map_err(bad)?);
    }
    Ok(ModelFile {
        kind,
        lambda,
        kernel,
        subsample_indices,
        coeff,
    })
}

/// `index,prediction` rows.
pub fn write_predictions(path: &Path, preds: &[f64]) -> AppResult<()> {
    let header = vec!["index".to_string(), "prediction".to_string()];
    let rows = preds.iter().enumerate().map(|(i, &p)| vec![i.to_string(), fmt_f64(p)]);
    write_rows(path, std::iter::once(header).chain(rows))
}

pub fn read_predictions(path: &Path) -> AppResult<Vec<f64>> {
    let recs = records(path)?;
    recs.iter()
        .skip(1)
        .map(|r| parse_f64(r.get(1).unwrap_or("")))
        .collect::<Result<_, _>>()
        .map_err(|e| AppError::io(path, e))
}

pub const SWEEP_HEADER: [&str; 5] = ["m", "lambda", "mean_rmse", "std_rmse", "reps"];

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> AppResult<()> {
    let header = SWEEP_HEADER.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    let body = rows.iter().map(|r| {
        vec![
            r.m.to_string(),
            fmt_f64(r.lambda),
            fmt_f64(r.mean_rmse),
            fmt_f64(r.std_rmse),
            r.reps.to_string(),
        ]
    });
    write_rows(path, std::iter::once(header).chain(body))
}

pub fn read_sweep(path: &Path) -> AppResult<Vec<SweepRow>> {
    let recs = records(path)?;
    let bad = |msg: String| AppError::io(path, msg);
    if recs.first().map(|h| h.iter().collect::<Vec<_>>()) != Some(SWEEP_HEADER.to_vec()) {
        return Err(bad("not a sweep file".into()));
    }
    recs[1..]
        .iter()
        .map(|r| {
            if r.len() != 5 {
                return Err(bad("sweep rows need 5 cells".into()));
            }
            Ok(SweepRow {
                m: parse_usize(&r[0]).map_err(bad)?,
                lambda: parse_f64(&r[1]).map_err(bad)?,
                mean_rmse: parse_f64(&r[2]).map_err(bad)?,
                std_rmse: parse_f64(&r[3]).map_err(bad)?,
                reps: parse_usize(&r[4]).map_err(bad)?,
            })
        })
        .collect()
}

/// `lambda,mean_rmse,std_rmse,reps` rows of a full-solver profile.
pub fn write_lambda_profile(path: &Path, rows: &[LambdaRow]) -> AppResult<()> {
    let header = ["lambda", "mean_rmse", "std_rmse", "reps"].map(String::from).to_vec();
    let body = rows
        .iter()
        .map(|r| vec![fmt_f64(r.lambda), fmt_f64(r.mean_rmse), fmt_f64(r.std_rmse), r.reps.to_string()]);
    write_rows(path, std::iter::once(header).chain(body))
}

/// `method,n,m,wall_time_seconds,fit_residual,threads` rows.
pub fn write_bench(path: &Path, rows: &[BenchRow]) -> AppResult<()> {
    let header = ["method", "n", "m", "wall_time_seconds", "fit_residual", "threads"]
        .map(String::from)
        .to_vec();
    let body = rows.iter().map(|r| {
        vec![
            r.method.as_str().to_string(),
            r.n.to_string(),
            r.m.to_string(),
            fmt_f64(r.wall_time_seconds),
            fmt_f64(r.fit_residual),
            r.threads.to_string(),
        ]
    });
    write_rows(path, std::iter::once(header).chain(body))
}

/// Writes `contents` to `path`, creating parent directories.
pub fn write_text(path: &Path, contents: &str) -> AppResult<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))?;
    }
    let mut f = File::create(path).map_err(|e| AppError::io(path, e))?;
    f.write_all(contents.as_bytes()).map_err(|e| AppError::io(path, e))
}
