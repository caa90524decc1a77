//! Multi-view datasets: validation, manifest I/O, normalization and a
//! union-of-subspaces synthetic generator.
//!
//! Every view is a `d_k x n` matrix whose columns are samples. Indices in
//! error messages are 1-based (view 2 is the second view, row 1 the first
//! line of a file); the fields of [`DatasetError`] hold the same 1-based
//! numbers.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeded_rng;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed manifest {path}: {message}")]
    Manifest { path: PathBuf, message: String },
    #[error("{path}, line {line}, field {field}: cannot parse {token:?} as a number")]
    Parse {
        path: PathBuf,
        line: usize,
        field: usize,
        token: String,
    },
    #[error("{path}, line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("view {view}: manifest declares {declared_rows}x{declared_cols}, file holds {rows}x{cols}")]
    DeclaredShape {
        view: usize,
        declared_rows: usize,
        declared_cols: usize,
        rows: usize,
        cols: usize,
    },
    #[error("dataset has no views")]
    NoViews,
    #[error("dataset needs at least 2 samples, found {0}")]
    TooFewSamples(usize),
    #[error("view {view} has {found} samples (columns) but view 1 has {expected}")]
    SampleCountMismatch {
        view: usize,
        expected: usize,
        found: usize,
    },
    #[error("view {view}: non-finite entry at row {row}, column {col}")]
    NonFinite { view: usize, row: usize, col: usize },
    #[error("{found} labels given for {expected} samples")]
    LabelCountMismatch { expected: usize, found: usize },
    #[error("label of sample {sample} is {label:?}, expected a non-negative integer id")]
    LabelOutOfRange { sample: usize, label: String },
    #[error("cluster id {id} has no samples (ids must be contiguous from 0 to {max})")]
    EmptyCluster { id: usize, max: usize },
    #[error("column {col} is all zeros and cannot be scaled to unit norm")]
    ZeroColumn { col: usize },
    #[error("invalid synthetic spec: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, DatasetError>;

/// `v` views over the same `n` samples, plus optional ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    name: String,
    views: Vec<DMatrix<f64>>,
    labels: Option<Vec<usize>>,
}

impl MultiViewDataset {
    pub fn new(
        name: impl Into<String>,
        views: Vec<DMatrix<f64>>,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        let first = views.first().ok_or(DatasetError::NoViews)?;
        let n = first.ncols();
        if n < 2 {
            return Err(DatasetError::TooFewSamples(n));
        }
        for (k, view) in views.iter().enumerate() {
            if view.ncols() != n {
                return Err(DatasetError::SampleCountMismatch {
                    view: k + 1,
                    expected: n,
                    found: view.ncols(),
                });
            }
            check_finite(view, k)?;
        }
        if let Some(labels) = &labels {
            validate_labels(labels, n)?;
        }
        Ok(Self {
            name: name.into(),
            views,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn views(&self) -> &[DMatrix<f64>] {
        &self.views
    }

    pub fn view(&self, k: usize) -> &DMatrix<f64> {
        &self.views[k]
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    pub fn n_samples(&self) -> usize {
        self.views[0].ncols()
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    /// Number of ground-truth clusters, when labels are present.
    pub fn n_clusters(&self) -> Option<usize> {
        self.labels
            .as_ref()
            .map(|l| l.iter().copied().max().map_or(0, |m| m + 1))
    }

    /// Feature dimension `d_k` of every view.
    pub fn view_dims(&self) -> Vec<usize> {
        self.views.iter().map(|v| v.nrows()).collect()
    }

    /// Applies `scheme` to every view.
    pub fn normalized(&self, scheme: NormalizeScheme) -> Result<Self> {
        let views = self
            .views
            .iter()
            .map(|v| normalize_view(v, scheme))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            name: self.name.clone(),
            views,
            labels: self.labels.clone(),
        })
    }
}

fn check_finite(view: &DMatrix<f64>, k: usize) -> Result<()> {
    for c in 0..view.ncols() {
        for r in 0..view.nrows() {
            if !view[(r, c)].is_finite() {
                return Err(DatasetError::NonFinite {
                    view: k + 1,
                    row: r + 1,
                    col: c + 1,
                });
            }
        }
    }
    Ok(())
}

fn validate_labels(labels: &[usize], n: usize) -> Result<()> {
    if labels.len() != n {
        return Err(DatasetError::LabelCountMismatch {
            expected: n,
            found: labels.len(),
        });
    }
    let max = labels.iter().copied().max().unwrap_or(0);
    let mut seen = vec![false; max + 1];
    for &l in labels {
        seen[l] = true;
    }
    if let Some(id) = seen.iter().position(|s| !s) {
        return Err(DatasetError::EmptyCluster { id, max });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormalizeScheme {
    None,
    /// Every sample (column) scaled to Euclidean norm 1.
    UnitNorm,
    /// Every feature (row) mapped affinely onto `[0, 1]`; constant rows map to 0.
    #[default]
    MinMax,
}

impl std::str::FromStr for NormalizeScheme {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(Self::None),
            "unit-norm" => Ok(Self::UnitNorm),
            "min-max" => Ok(Self::MinMax),
            other => Err(format!(
                "unknown normalization {other:?} (expected none, unit-norm or min-max)"
            )),
        }
    }
}

pub fn normalize_view(x: &DMatrix<f64>, scheme: NormalizeScheme) -> Result<DMatrix<f64>> {
    match scheme {
        NormalizeScheme::None => Ok(x.clone()),
        NormalizeScheme::UnitNorm => {
            let mut out = x.clone();
            for (c, mut col) in out.column_iter_mut().enumerate() {
                let norm = col.norm();
                if norm == 0.0 {
                    return Err(DatasetError::ZeroColumn { col: c + 1 });
                }
                col /= norm;
            }
            Ok(out)
        }
        NormalizeScheme::MinMax => {
            let mut out = x.clone();
            for mut row in out.row_iter_mut() {
                let lo = row.min();
                let hi = row.max();
                let span = hi - lo;
                if span > 0.0 {
                    row.apply(|v| *v = (*v - lo) / span);
                } else {
                    row.fill(0.0);
                }
            }
            Ok(out)
        }
    }
}

// ---------------------------------------------------------------------------
// Manifest I/O

/// On-disk description of a dataset. Paths are resolved relative to the
/// directory containing the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub views: Vec<ViewEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels_path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewEntry {
    pub path: String,
    pub rows: usize,
    pub cols: usize,
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<MultiViewDataset> {
    let path = path.as_ref();
    let text = read_to_string(path)?;
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| DatasetError::Manifest {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut views = Vec::with_capacity(manifest.views.len());
    for (k, entry) in manifest.views.iter().enumerate() {
        let view = read_matrix_csv(&base.join(&entry.path))?;
        if let Some(first) = views.first() {
            let expected = DMatrix::<f64>::ncols(first);
            if view.ncols() != expected {
                return Err(DatasetError::SampleCountMismatch {
                    view: k + 1,
                    expected,
                    found: view.ncols(),
                });
            }
        }
        if view.nrows() != entry.rows || view.ncols() != entry.cols {
            return Err(DatasetError::DeclaredShape {
                view: k + 1,
                declared_rows: entry.rows,
                declared_cols: entry.cols,
                rows: view.nrows(),
                cols: view.ncols(),
            });
        }
        views.push(view);
    }
    let labels = manifest
        .labels_path
        .as_ref()
        .map(|p| read_labels(&base.join(p)))
        .transpose()?;
    MultiViewDataset::new(manifest.name, views, labels)
}

/// Writes `manifest.json`, one CSV per view and (if present) `labels.txt`
/// into `dir`, returning the manifest path. Values are written in shortest
/// round-trip form, so [`load_manifest`] restores them exactly.
pub fn save_manifest(data: &MultiViewDataset, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| DatasetError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::with_capacity(data.n_views());
    for (k, view) in data.views.iter().enumerate() {
        let file = format!("view{}.csv", k + 1);
        write_matrix_csv(&dir.join(&file), view)?;
        entries.push(ViewEntry {
            path: file,
            rows: view.nrows(),
            cols: view.ncols(),
        });
    }
    let labels_path = match &data.labels {
        Some(labels) => {
            let file = "labels.txt".to_string();
            let mut text = String::new();
            for l in labels {
                text.push_str(&l.to_string());
                text.push('\n');
            }
            write_file(&dir.join(&file), text.as_bytes())?;
            Some(file)
        }
        None => None,
    };
    let manifest = Manifest {
        name: data.name.clone(),
        views: entries,
        labels_path,
    };
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    write_file(&path, text.as_bytes())?;
    Ok(path)
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |source| DatasetError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut f = fs::File::create(path).map_err(io)?;
    f.write_all(bytes).map_err(io)
}

/// Parses comma-separated numeric text, one matrix row per line.
pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let text = read_to_string(path)?;
    let mut values = Vec::new();
    let mut cols = None;
    let mut rows = 0;
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut count = 0;
        for (j, token) in line.split(',').enumerate() {
            let token = token.trim();
            let v: f64 = token.parse().map_err(|_| DatasetError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                field: j + 1,
                token: token.to_string(),
            })?;
            values.push(v);
            count += 1;
        }
        match cols {
            None => cols = Some(count),
            Some(expected) if expected != count => {
                return Err(DatasetError::RaggedRow {
                    path: path.to_path_buf(),
                    line: i + 1,
                    expected,
                    found: count,
                })
            }
            _ => {}
        }
        rows += 1;
    }
    Ok(DMatrix::from_row_slice(rows, cols.unwrap_or(0), &values))
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    write_file(path, matrix_to_csv(m).as_bytes())
}

pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut text = String::new();
    for row in m.row_iter() {
        let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        text.push_str(&line.join(","));
        text.push('\n');
    }
    text
}

fn read_labels(path: &Path) -> Result<Vec<usize>> {
    let text = read_to_string(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .enumerate()
        .map(|(i, tok)| {
            tok.parse::<usize>()
                .map_err(|_| DatasetError::LabelOutOfRange {
                    sample: i + 1,
                    label: tok.to_string(),
                })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Synthetic data

/// Union-of-subspaces generator parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub clusters: usize,
    pub per_cluster: usize,
    pub subspace_dim: usize,
    pub latent_dim: usize,
    /// Output dimension of each view; its length is the number of views.
    pub view_dims: Vec<usize>,
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            clusters: 3,
            per_cluster: 60,
            subspace_dim: 2,
            latent_dim: 10,
            view_dims: vec![20, 30],
            noise: 0.01,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(DatasetError::InvalidSpec(m));
        if self.clusters < 2 {
            return bad(format!("need at least 2 clusters, got {}", self.clusters));
        }
        if self.subspace_dim < 1 || self.per_cluster < self.subspace_dim {
            return bad(format!(
                "need per_cluster >= subspace_dim >= 1, got {} and {}",
                self.per_cluster, self.subspace_dim
            ));
        }
        if self.latent_dim < self.clusters * self.subspace_dim {
            return bad(format!(
                "latent_dim {} is smaller than clusters * subspace_dim = {}",
                self.latent_dim,
                self.clusters * self.subspace_dim
            ));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return bad(format!("noise must be finite and >= 0, got {}", self.noise));
        }
        if self.view_dims.is_empty() || self.view_dims.contains(&0) {
            return bad("need at least one view, each with positive dimension".into());
        }
        Ok(())
    }
}

/// Draws `c` independent `s`-dimensional subspaces of the latent space,
/// samples `m` points uniformly on the unit sphere of each, and renders every
/// view as `tanh(A_k x) + noise` with `A_k ~ N(0, 1)`. Samples are ordered
/// cluster by cluster.
///
/// Unit-norm points keep clusters apart away from the origin, where all
/// subspaces meet.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<MultiViewDataset> {
    generate_synthetic_with_latent(spec).map(|(data, _)| data)
}

/// As [`generate_synthetic`], also returning the `p x n` latent points.
pub fn generate_synthetic_with_latent(
    spec: &SyntheticSpec,
) -> Result<(MultiViewDataset, DMatrix<f64>)> {
    spec.validate()?;
    let mut rng = seeded_rng(spec.seed);
    let (c, m, s, p) = (
        spec.clusters,
        spec.per_cluster,
        spec.subspace_dim,
        spec.latent_dim,
    );
    let n = c * m;

    let raw = gaussian_matrix(&mut rng, p, c * s, 1.0);
    let bases = raw.qr().q();

    let mut latent = DMatrix::zeros(p, n);
    let mut labels = Vec::with_capacity(n);
    for j in 0..c {
        let basis = bases.columns(j * s, s);
        let mut coeffs = gaussian_matrix(&mut rng, s, m, 1.0);
        for mut col in coeffs.column_iter_mut() {
            col.unscale_mut(col.norm());
        }
        latent.columns_mut(j * m, m).copy_from(&(basis * coeffs));
        labels.extend(std::iter::repeat_n(j, m));
    }

    let views = spec
        .view_dims
        .iter()
        .map(|&d| {
            let map = gaussian_matrix(&mut rng, d, p, 1.0);
            let mut view = (map * &latent).map(f64::tanh);
            if spec.noise > 0.0 {
                view += gaussian_matrix(&mut rng, d, n, spec.noise);
            }
            view
        })
        .collect();

    let name = format!("synthetic-c{c}-m{m}-s{s}-seed{}", spec.seed);
    let data = MultiViewDataset::new(name, views, Some(labels))?;
    Ok((data, latent))
}

fn gaussian_matrix(rng: &mut impl Rng, rows: usize, cols: usize, scale: f64) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| scale * rng.sample::<f64, _>(StandardNormal))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> MultiViewDataset {
        MultiViewDataset::new(
            "tiny",
            vec![
                DMatrix::from_fn(3, 5, |r, c| (r * 5 + c) as f64 * 0.1),
                DMatrix::from_fn(4, 5, |r, c| (r as f64 - c as f64) / 3.0),
            ],
            Some(vec![0, 0, 1, 1, 0]),
        )
        .unwrap()
    }

    #[test]
    fn manifest_shapes() {
        let dir = tempfile::tempdir().unwrap();
        let path = save_manifest(&tiny(), dir.path()).unwrap();
        let back = load_manifest(&path).unwrap();
        assert_eq!(back.n_samples(), 5);
        assert_eq!(back.n_views(), 2);
        assert_eq!(back.view_dims(), vec![3, 4]);
    }

    #[test]
    fn sample_count_mismatch_names_second_view() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        write_matrix_csv(&d.join("a.csv"), &DMatrix::from_element(3, 5, 1.0)).unwrap();
        write_matrix_csv(&d.join("b.csv"), &DMatrix::from_element(4, 6, 1.0)).unwrap();
        let manifest = r#"{"name":"bad","views":[{"path":"a.csv","rows":3,"cols":5},{"path":"b.csv","rows":4,"cols":6}]}"#;
        fs::write(d.join("m.json"), manifest).unwrap();
        let err = load_manifest(d.join("m.json")).unwrap_err();
        assert!(matches!(
            err,
            DatasetError::SampleCountMismatch { view: 2, expected: 5, found: 6 }
        ));
        assert!(err.to_string().contains("view 2"));
    }

    #[test]
    fn missing_file_and_non_finite() {
        let err = load_manifest("/definitely/not/here.json").unwrap_err();
        assert!(matches!(err, DatasetError::Io { .. }));

        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        fs::write(d.join("a.csv"), "1,2\n3,NaN\n").unwrap();
        fs::write(
            d.join("m.json"),
            r#"{"name":"x","views":[{"path":"a.csv","rows":2,"cols":2}]}"#,
        )
        .unwrap();
        let err = load_manifest(d.join("m.json")).unwrap_err();
        assert!(matches!(err, DatasetError::NonFinite { view: 1, row: 2, col: 2 }));
    }

    #[test]
    fn bad_labels() {
        let dir = tempfile::tempdir().unwrap();
        let d = dir.path();
        write_matrix_csv(&d.join("a.csv"), &DMatrix::from_element(2, 3, 1.0)).unwrap();
        let m = r#"{"name":"x","views":[{"path":"a.csv","rows":2,"cols":3}],"labels_path":"l.txt"}"#;
        fs::write(d.join("m.json"), m).unwrap();

        fs::write(d.join("l.txt"), "0\n-1\n1\n").unwrap();
        let err = load_manifest(d.join("m.json")).unwrap_err();
        assert!(matches!(err, DatasetError::LabelOutOfRange { sample: 2, .. }));

        fs::write(d.join("l.txt"), "0\n2\n2\n").unwrap();
        let err = load_manifest(d.join("m.json")).unwrap_err();
        assert!(matches!(err, DatasetError::EmptyCluster { id: 1, .. }));

        fs::write(d.join("l.txt"), "0\n1\n").unwrap();
        let err = load_manifest(d.join("m.json")).unwrap_err();
        assert!(matches!(err, DatasetError::LabelCountMismatch { expected: 3, found: 2 }));
    }

    #[test]
    fn synthetic_round_trip_is_bit_exact() {
        let data = generate_synthetic(&SyntheticSpec {
            per_cluster: 10,
            ..SyntheticSpec::default()
        })
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let back = load_manifest(save_manifest(&data, dir.path()).unwrap()).unwrap();
        for (a, b) in data.views().iter().zip(back.views()) {
            assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        assert_eq!(data, back);
    }

    #[test]
    fn normalization_examples() {
        let x = DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 4.0, 2.0]);
        assert_eq!(normalize_view(&x, NormalizeScheme::None).unwrap(), x);

        let u = normalize_view(&x, NormalizeScheme::UnitNorm).unwrap();
        assert!((u[(0, 0)] - 0.6).abs() < 1e-15);
        assert!((u[(1, 0)] - 0.8).abs() < 1e-15);

        let r = DMatrix::from_row_slice(2, 3, &[2.0, 4.0, 6.0, 7.0, 7.0, 7.0]);
        let mm = normalize_view(&r, NormalizeScheme::MinMax).unwrap();
        assert_eq!(mm.row(0).iter().copied().collect::<Vec<_>>(), vec![0.0, 0.5, 1.0]);
        assert_eq!(mm.row(1).iter().copied().collect::<Vec<_>>(), vec![0.0; 3]);

        let z = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 1.0]);
        assert!(matches!(
            normalize_view(&z, NormalizeScheme::UnitNorm),
            Err(DatasetError::ZeroColumn { col: 1 })
        ));
    }

    #[test]
    fn synthetic_shapes_and_determinism() {
        let spec = SyntheticSpec {
            clusters: 3,
            per_cluster: 50,
            noise: 0.0,
            ..SyntheticSpec::default()
        };
        let a = generate_synthetic(&spec).unwrap();
        assert_eq!(a.n_samples(), 150);
        assert_eq!(a.n_views(), 2);
        let labels = a.labels().unwrap();
        for j in 0..3 {
            assert_eq!(labels.iter().filter(|&&l| l == j).count(), 50);
        }
        assert_eq!(a, generate_synthetic(&spec).unwrap());
    }

    #[test]
    fn latent_clusters_lie_in_subspaces() {
        let spec = SyntheticSpec {
            noise: 0.0,
            subspace_dim: 3,
            latent_dim: 12,
            per_cluster: 20,
            ..SyntheticSpec::default()
        };
        let (_, latent) = generate_synthetic_with_latent(&spec).unwrap();
        for j in 0..spec.clusters {
            let block = latent.columns(j * 20, 20).into_owned();
            let mut sv = block.singular_values().iter().copied().collect::<Vec<_>>();
            sv.sort_by(|a, b| b.total_cmp(a));
            assert!(sv[2] > 1e-3, "rank should be s");
            assert!(sv[3] < 1e-12 * sv[0], "sv[s] = {}", sv[3]);
        }
    }

    #[test]
    fn invalid_spec_rejected() {
        let spec = SyntheticSpec {
            latent_dim: 5,
            ..SyntheticSpec::default()
        };
        assert!(matches!(generate_synthetic(&spec), Err(DatasetError::InvalidSpec(_))));
        let spec = SyntheticSpec {
            clusters: 1,
            ..SyntheticSpec::default()
        };
        assert!(generate_synthetic(&spec).is_err());
    }
}
