//! Correlation-metric geometry.
//!
//! Entities are placed as points whose Euclidean distances equal their
//! correlation distances `d = sqrt(2 (1 - C))`. The configuration is read
//! through the eigenvalue spectrum of its centered Gram matrix, compared
//! against surrogate panels to find the number of characteristic directions,
//! and restricted to those directions for the network stage.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::{normalize_all, Panel};

/// Eigenvalues in `[-EIGEN_TOLERANCE, 0)` are rounding noise and clamp to 0;
/// anything lower means the distances cannot come from points in a
/// Euclidean space.
pub const EIGEN_TOLERANCE: f64 = 1e-9;

/// Symmetric matrix of correlation distances between entities.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    entity_ids: Vec<String>,
    d: DMatrix<f64>,
}

impl DistanceMatrix {
    /// Wraps an externally computed distance matrix after validating it:
    /// square, symmetric within 1e-12, zero diagonal, entries in `[0, 2]`,
    /// and triangle inequality within 1e-9.
    pub fn from_matrix(entity_ids: Vec<String>, d: DMatrix<f64>) -> Result<Self> {
        let n = entity_ids.len();
        if d.nrows() != n || d.ncols() != n {
            return Err(Error::invalid(format!(
                "distance matrix is {}x{} for {n} entities",
                d.nrows(),
                d.ncols()
            )));
        }
        for i in 0..n {
            if d[(i, i)] != 0.0 {
                return Err(Error::invalid(format!("nonzero diagonal at {}", entity_ids[i])));
            }
            for j in 0..n {
                let v = d[(i, j)];
                if !(0.0..=2.0).contains(&v) {
                    return Err(Error::invalid(format!(
                        "distance {v} between {} and {} outside [0, 2]",
                        entity_ids[i], entity_ids[j]
                    )));
                }
                if (v - d[(j, i)]).abs() > 1e-12 {
                    return Err(Error::invalid(format!(
                        "asymmetric distance between {} and {}",
                        entity_ids[i], entity_ids[j]
                    )));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if d[(i, k)] > d[(i, j)] + d[(j, k)] + 1e-9 {
                        return Err(Error::invalid(format!(
                            "triangle inequality fails for ({}, {}, {})",
                            entity_ids[i], entity_ids[j], entity_ids[k]
                        )));
                    }
                }
            }
        }
        Ok(Self { entity_ids, d })
    }

    pub fn entity_ids(&self) -> &[String] {
        &self.entity_ids
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn len(&self) -> usize {
        self.entity_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entity_ids.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[(i, j)]
    }

    /// Correlation coefficients recovered as `1 - d^2 / 2`.
    pub fn correlation(&self) -> DMatrix<f64> {
        self.d.map(|v| 1.0 - v * v / 2.0)
    }
}

/// Correlation distances of a panel, computed as Euclidean distances between
/// normalized series.
pub fn distance_matrix(panel: &Panel) -> Result<DistanceMatrix> {
    let rho = normalize_all(panel)?;
    let n = rho.nrows();
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let dist = (rho.row(i) - rho.row(j)).norm().min(2.0);
            d[(i, j)] = dist;
            d[(j, i)] = dist;
        }
    }
    Ok(DistanceMatrix {
        entity_ids: panel.entity_ids().to_vec(),
        d,
    })
}

/// Per-rank summary of surrogate eigenvalues.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurrogateStats {
    pub permutations: usize,
    pub quantile: f64,
    pub null_model: NullModel,
    /// `quantile`-level empirical quantile per rank.
    pub threshold: Vec<f64>,
    pub median: Vec<f64>,
    pub mean: Vec<f64>,
}

/// Entity coordinates and eigen-spectrum of a distance configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    entity_ids: Vec<String>,
    eigenvalues: DVector<f64>,
    /// N x N, unit columns sorted by descending eigenvalue, sign-fixed.
    eigenvectors: DMatrix<f64>,
    /// N x (N-1), row k holds the center-of-mass coordinates of entity k.
    coordinates: DMatrix<f64>,
    surrogate: Option<SurrogateStats>,
}

impl Embedding {
    pub fn entity_ids(&self) -> &[String] {
        &self.entity_ids
    }

    /// All N eigenvalues, descending, non-negative.
    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    pub fn coordinates(&self) -> &DMatrix<f64> {
        &self.coordinates
    }

    pub fn surrogate_stats(&self) -> Option<&SurrogateStats> {
        self.surrogate.as_ref()
    }

    pub fn with_surrogate_stats(mut self, stats: SurrogateStats) -> Self {
        self.surrogate = Some(stats);
        self
    }

    pub fn len(&self) -> usize {
        self.entity_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entity_ids.is_empty()
    }

    /// Total squared distance of the entities to their center of mass.
    pub fn inertia(&self) -> f64 {
        self.coordinates.iter().map(|v| v * v).sum()
    }
}

/// Double-centered Gram matrix `-1/2 J D^2 J`.
fn centered_gram(d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = d.nrows();
    let sq = d.map(|v| v * v);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).sum() / n as f64).collect();
    let grand = row_means.iter().sum::<f64>() / n as f64;
    let mut b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    // exact symmetry for the solver
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (b[(i, j)] + b[(j, i)]);
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    b
}

/// Stable descending order of eigenvalues.
fn descending_order(values: &DVector<f64>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    order
}

fn clamp_eigenvalue(v: f64) -> Result<f64> {
    if v < -EIGEN_TOLERANCE {
        Err(Error::NonEmbeddable { eigenvalue: v })
    } else {
        Ok(v.max(0.0))
    }
}

/// Flips a vector so its largest-magnitude component is positive; the
/// first index wins among equal magnitudes.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|x| *x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// Points in `R^(N-1)` reproducing the distances, expressed along the
/// principal directions of their center-of-mass covariance.
pub fn embed(dm: &DistanceMatrix) -> Result<Embedding> {
    let n = dm.len();
    if n < 2 {
        return Err(Error::invalid("embedding needs at least 2 entities"));
    }
    let eig = SymmetricEigen::new(centered_gram(&dm.d));
    let order = descending_order(&eig.eigenvalues);

    let mut eigenvalues = DVector::zeros(n);
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (rank, &src) in order.iter().enumerate() {
        eigenvalues[rank] = clamp_eigenvalue(eig.eigenvalues[src])?;
        let mut col: Vec<f64> = eig.eigenvectors.column(src).iter().copied().collect();
        fix_sign(&mut col);
        eigenvectors.set_column(rank, &DVector::from_vec(col));
    }

    let coordinates = DMatrix::from_fn(n, n - 1, |k, r| eigenvectors[(k, r)] * eigenvalues[r].sqrt());

    Ok(Embedding {
        entity_ids: dm.entity_ids.clone(),
        eigenvalues,
        eigenvectors,
        coordinates,
        surrogate: None,
    })
}

/// Eigenvalues only, descending and clamped, for the surrogate ensemble.
pub fn spectrum(dm: &DistanceMatrix) -> Result<DVector<f64>> {
    let values = centered_gram(&dm.d).symmetric_eigenvalues();
    let order = descending_order(&values);
    let sorted: Result<Vec<f64>> = order.iter().map(|&i| clamp_eigenvalue(values[i])).collect();
    Ok(DVector::from_vec(sorted?))
}

/// Null model used to generate surrogate panels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NullModel {
    /// Each series independently shuffled in time.
    #[default]
    Permutation,
    /// Each series replaced by i.i.d. standard normal draws.
    Gaussian,
}

impl std::str::FromStr for NullModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "permutation" => Ok(NullModel::Permutation),
            "gaussian" => Ok(NullModel::Gaussian),
            other => Err(Error::invalid(format!("unknown null model {other:?}"))),
        }
    }
}

/// Every entity's series independently permuted in time.
pub fn surrogate_panel(panel: &Panel, seed: u64) -> Panel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut values = panel.values().clone();
    for k in 0..panel.n_entities() {
        let mut row: Vec<f64> = values.row(k).iter().copied().collect();
        row.shuffle(&mut rng);
        for (t, v) in row.into_iter().enumerate() {
            values[(k, t)] = v;
        }
    }
    Panel::new(
        panel.entity_ids().to_vec(),
        panel.period_labels().to_vec(),
        values,
    )
    .expect("permutation preserves panel invariants")
}

/// Panel of i.i.d. standard normal series with the same shape and labels.
pub fn gaussian_surrogate(panel: &Panel, seed: u64) -> Panel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, t) = (panel.n_entities(), panel.n_periods());
    let mut values = DMatrix::zeros(n, t);
    for k in 0..n {
        for j in 0..t {
            values[(k, j)] = StandardNormal.sample(&mut rng);
        }
    }
    Panel::new(
        panel.entity_ids().to_vec(),
        panel.period_labels().to_vec(),
        values,
    )
    .expect("gaussian draws are finite")
}

fn make_surrogate(panel: &Panel, seed: u64, null: NullModel) -> Panel {
    match null {
        NullModel::Permutation => surrogate_panel(panel, seed),
        NullModel::Gaussian => gaussian_surrogate(panel, seed),
    }
}

/// Empirical quantile with linear interpolation between order statistics.
/// `sorted` must be ascending and non-empty.
pub fn empirical_quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionOptions {
    pub permutations: usize,
    pub quantile: f64,
    pub seed: u64,
    pub null_model: NullModel,
}

impl Default for DimensionOptions {
    fn default() -> Self {
        Self {
            permutations: 100,
            quantile: 0.95,
            seed: 0,
            null_model: NullModel::Permutation,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimensionResult {
    /// Length of the leading run of characteristic ranks.
    pub dim: usize,
    pub actual: DVector<f64>,
    pub stats: SurrogateStats,
}

/// Surrogate-ensemble statistics per eigenvalue rank.
///
/// Surrogate `k` is generated from seed `seed + k`, so the ensemble is the
/// same whatever the evaluation order.
pub fn surrogate_spectra(panel: &Panel, opts: &DimensionOptions) -> Result<SurrogateStats> {
    if opts.permutations < 10 {
        return Err(Error::invalid(format!(
            "at least 10 surrogates are needed, got {}",
            opts.permutations
        )));
    }
    if !(0.0..=1.0).contains(&opts.quantile) || opts.quantile.is_nan() {
        return Err(Error::invalid(format!("quantile {} outside [0, 1]", opts.quantile)));
    }
    let spectra: Vec<DVector<f64>> = (0..opts.permutations as u64)
        .into_par_iter()
        .map(|k| {
            let surrogate = make_surrogate(panel, opts.seed.wrapping_add(k), opts.null_model);
            distance_matrix(&surrogate).and_then(|dm| spectrum(&dm))
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<_>>()?;

    let n = panel.n_entities();
    let m = spectra.len() as f64;
    let mut threshold = Vec::with_capacity(n);
    let mut median = Vec::with_capacity(n);
    let mut mean = Vec::with_capacity(n);
    for rank in 0..n {
        let mut column: Vec<f64> = spectra.iter().map(|s| s[rank]).collect();
        column.sort_by(f64::total_cmp);
        threshold.push(empirical_quantile(&column, opts.quantile));
        median.push(empirical_quantile(&column, 0.5));
        mean.push(column.iter().sum::<f64>() / m);
    }
    Ok(SurrogateStats {
        permutations: opts.permutations,
        quantile: opts.quantile,
        null_model: opts.null_model,
        threshold,
        median,
        mean,
    })
}

/// Number of leading eigenvalues that exceed the surrogate threshold at the
/// same rank. The last rank is never counted: centering pins its eigenvalue
/// to zero.
pub fn leading_exceedances(actual: &DVector<f64>, threshold: &[f64]) -> usize {
    let ranks = actual.len().saturating_sub(1).min(threshold.len());
    (0..ranks).take_while(|&r| actual[r] > threshold[r]).count()
}

/// Effective dimension of the panel's correlation geometry.
pub fn effective_dimension(panel: &Panel, opts: &DimensionOptions) -> Result<DimensionResult> {
    let actual = spectrum(&distance_matrix(panel)?)?;
    let stats = surrogate_spectra(panel, opts)?;
    let dim = leading_exceedances(&actual, &stats.threshold);
    Ok(DimensionResult { dim, actual, stats })
}

/// Entity coordinates restricted to the leading `dim` directions.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSpace {
    entity_ids: Vec<String>,
    dim: usize,
    coordinates: DMatrix<f64>,
    reduced_d: DMatrix<f64>,
    mean_reduced_distance: f64,
}

impl ReducedSpace {
    pub fn entity_ids(&self) -> &[String] {
        &self.entity_ids
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coordinates(&self) -> &DMatrix<f64> {
        &self.coordinates
    }

    /// Pairwise distances within the reduced space.
    pub fn distances(&self) -> &DMatrix<f64> {
        &self.reduced_d
    }

    /// Mean of the off-diagonal reduced distances.
    pub fn mean_reduced_distance(&self) -> f64 {
        self.mean_reduced_distance
    }

    pub fn len(&self) -> usize {
        self.entity_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entity_ids.is_empty()
    }
}

/// Mean of the off-diagonal entries of a square matrix.
pub fn mean_off_diagonal(d: &DMatrix<f64>) -> f64 {
    let n = d.nrows();
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            sum += d[(i, j)];
        }
    }
    2.0 * sum / (n * (n - 1)) as f64
}

pub fn reduce(emb: &Embedding, dim: usize) -> Result<ReducedSpace> {
    let n = emb.len();
    if dim == 0 || dim > n - 1 {
        return Err(Error::invalid(format!(
            "reduced dimension {dim} outside [1, {}]",
            n - 1
        )));
    }
    let coordinates = emb.coordinates.columns(0, dim).into_owned();
    let mut reduced_d = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = (coordinates.row(i) - coordinates.row(j)).norm();
            reduced_d[(i, j)] = v;
            reduced_d[(j, i)] = v;
        }
    }
    let mean_reduced_distance = mean_off_diagonal(&reduced_d);
    Ok(ReducedSpace {
        entity_ids: emb.entity_ids.clone(),
        dim,
        coordinates,
        reduced_d,
        mean_reduced_distance,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Volume {
    pub dim: usize,
    pub value: f64,
    /// Set when one of the leading eigenvalues is zero.
    pub degenerate: bool,
}

/// Geometric mean of the `dim` largest eigenvalues.
pub fn volume(emb: &Embedding, dim: usize) -> Result<Volume> {
    volume_of_spectrum(&emb.eigenvalues, dim)
}

pub fn volume_of_spectrum(eigenvalues: &DVector<f64>, dim: usize) -> Result<Volume> {
    if dim == 0 || dim > eigenvalues.len() {
        return Err(Error::invalid(format!(
            "volume dimension {dim} outside [1, {}]",
            eigenvalues.len()
        )));
    }
    let top = eigenvalues.rows(0, dim);
    if top.iter().any(|&v| v <= 0.0) {
        log::warn!("volume: one of the top {dim} eigenvalues is zero");
        return Ok(Volume {
            dim,
            value: 0.0,
            degenerate: true,
        });
    }
    let mean_log = top.iter().map(|v| v.ln()).sum::<f64>() / dim as f64;
    Ok(Volume {
        dim,
        value: mean_log.exp(),
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(n: usize) -> Vec<String> {
        (0..n).map(|k| format!("E{k}")).collect()
    }

    fn panel(rows: &[&[f64]]) -> Panel {
        let n = rows.len();
        let t = rows[0].len();
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Panel::new(ids(n), (0..t).map(|k| format!("t{k}")).collect(), DMatrix::from_row_slice(n, t, &flat))
            .unwrap()
    }

    fn dm(n: usize, entries: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_matrix(ids(n), DMatrix::from_row_slice(n, n, entries)).unwrap()
    }

    #[test]
    fn distance_fixtures() {
        let a = [1.0, 3.0, 2.0, 5.0];
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        // centered: a -> (-1.75, 0.25, -0.75, 2.25), b -> (-1, 5, -2, -2), dot = 0
        let b = [1.0, 7.0, 0.0, 0.0];
        let p = panel(&[&a, &a, &neg, &b]);
        let d = distance_matrix(&p).unwrap();
        assert!(d.get(0, 1).abs() < 1e-15);
        assert!((d.get(0, 2) - 2.0).abs() < 1e-15);
        assert!((d.get(0, 3) - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn distance_matches_correlation_formula() {
        let p = panel(&[&[1.0, 2.0, 4.0, 3.0, 7.0], &[2.0, 2.5, 1.0, 0.0, 3.0], &[5.0, 4.0, 4.5, 1.0, 2.0]]);
        let d = distance_matrix(&p).unwrap();
        let n = 5.0;
        for i in 0..3 {
            for j in 0..3 {
                let (x, y) = (p.series(i), p.series(j));
                let mx = x.iter().sum::<f64>() / n;
                let my = y.iter().sum::<f64>() / n;
                let sxy = x.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>() / n - mx * my;
                let sxx = x.iter().map(|a| a * a).sum::<f64>() / n - mx * mx;
                let syy = y.iter().map(|a| a * a).sum::<f64>() / n - my * my;
                let c = sxy / (sxx * syy).sqrt();
                let expected = (2.0 * (1.0 - c)).max(0.0).sqrt();
                assert!((d.get(i, j) - expected).abs() < 1e-12);
            }
        }
        let corr = d.correlation();
        assert!((corr[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn from_matrix_rejects_bad_input() {
        let ids3 = ids(3);
        let asym = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 1.0, 1.1, 0.0, 1.0, 1.0, 1.0, 0.0]);
        assert!(DistanceMatrix::from_matrix(ids3.clone(), asym).is_err());
        let big = DMatrix::from_row_slice(3, 3, &[0.0, 2.5, 1.0, 2.5, 0.0, 1.0, 1.0, 1.0, 0.0]);
        assert!(DistanceMatrix::from_matrix(ids3.clone(), big).is_err());
        let tri = DMatrix::from_row_slice(3, 3, &[0.0, 0.5, 1.0, 0.5, 0.0, 2.0, 1.0, 2.0, 0.0]);
        assert!(DistanceMatrix::from_matrix(ids3, tri).is_err());
    }

    #[test]
    fn embed_two_points() {
        let q = 0.8;
        let e = embed(&dm(2, &[0.0, q, q, 0.0])).unwrap();
        assert!((e.eigenvalues()[0] - q * q / 2.0).abs() < 1e-15);
        assert!(e.eigenvalues()[1].abs() < 1e-15);
        let c = e.coordinates();
        assert_eq!(c.ncols(), 1);
        assert!((c[(0, 0)].abs() - q / 2.0).abs() < 1e-15);
        assert!((c[(0, 0)] + c[(1, 0)]).abs() < 1e-15);
    }

    #[test]
    fn embed_rejects_non_euclidean() {
        // four points where one pair is too far for any Euclidean placement
        let d = [
            0.0, 1.0, 1.0, 2.0, //
            1.0, 0.0, 0.2, 1.0, //
            1.0, 0.2, 0.0, 1.0, //
            2.0, 1.0, 1.0, 0.0,
        ];
        let m = DistanceMatrix { entity_ids: ids(4), d: DMatrix::from_row_slice(4, 4, &d) };
        let err = embed(&m).unwrap_err();
        assert!(matches!(err, Error::NonEmbeddable { .. }), "{err}");
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn sign_convention() {
        let mut v = vec![0.1, -0.9, 0.3];
        fix_sign(&mut v);
        assert_eq!(v, vec![-0.1, 0.9, -0.3]);
        let mut tie = vec![-0.5, 0.5];
        fix_sign(&mut tie);
        assert_eq!(tie, vec![0.5, -0.5]);
    }

    #[test]
    fn reduce_one_dimension_is_axis_gap() {
        let d = dm(3, &[0.0, 1.0, 1.0, 1.0, 0.0, 1.2, 1.0, 1.2, 0.0]);
        let e = embed(&d).unwrap();
        let r = reduce(&e, 1).unwrap();
        let z = e.coordinates().column(0);
        for i in 0..3 {
            for j in 0..3 {
                assert!((r.distances()[(i, j)] - (z[i] - z[j]).abs()).abs() < 1e-15);
            }
        }
        let full = reduce(&e, 2).unwrap();
        assert!((full.distances() - d.matrix()).amax() < 1e-9);
        assert!(reduce(&e, 0).is_err());
        assert!(reduce(&e, 3).is_err());
    }

    #[test]
    fn volume_fixtures() {
        let v = volume_of_spectrum(&DVector::from_vec(vec![8.0, 1.0, 1.0, 0.0]), 3).unwrap();
        assert!((v.value - 2.0).abs() < 1e-12 && !v.degenerate);
        let v = volume_of_spectrum(&DVector::from_vec(vec![1.0, 1.0, 1.0]), 3).unwrap();
        assert!((v.value - 1.0).abs() < 1e-15);
        let v = volume_of_spectrum(&DVector::from_vec(vec![4.0, 1.0, 0.0, 0.0]), 3).unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.degenerate);
        assert!(volume_of_spectrum(&DVector::from_vec(vec![1.0, 1.0]), 3).is_err());
    }

    #[test]
    fn quantile_interpolates() {
        let xs: Vec<f64> = (0..100).map(|v| v as f64).collect();
        assert!((empirical_quantile(&xs, 0.95) - 94.05).abs() < 1e-12);
        assert_eq!(empirical_quantile(&xs, 0.0), 0.0);
        assert_eq!(empirical_quantile(&xs, 1.0), 99.0);
        assert_eq!(empirical_quantile(&[3.0], 0.5), 3.0);
    }

    #[test]
    fn leading_run_stops_at_first_miss() {
        let actual = DVector::from_vec(vec![5.0, 4.0, 1.0, 3.0, 0.0]);
        let thr = [2.0, 2.0, 2.0, 2.0, -1.0];
        assert_eq!(leading_exceedances(&actual, &thr), 2);
        assert_eq!(leading_exceedances(&actual, &[9.0; 5]), 0);
    }

    #[test]
    fn surrogate_rows_are_permutations() {
        let p = panel(&[&[1.0, 2.0, 3.0, 4.0, 5.0], &[9.0, 8.0, 7.0, 1.0, 0.5], &[2.0, 2.0, 3.0, 3.0, 4.0]]);
        let s = surrogate_panel(&p, 42);
        assert_eq!(s, surrogate_panel(&p, 42));
        for k in 0..3 {
            let mut a = p.series(k);
            let mut b = s.series(k);
            a.sort_by(f64::total_cmp);
            b.sort_by(f64::total_cmp);
            assert_eq!(a, b);
        }
        assert_ne!(surrogate_panel(&p, 1), surrogate_panel(&p, 2));
    }

    #[test]
    fn too_few_permutations() {
        let p = panel(&[&[1.0, 2.0, 3.0], &[3.0, 1.0, 2.0], &[2.0, 3.0, 1.0]]);
        let opts = DimensionOptions { permutations: 9, ..Default::default() };
        assert!(effective_dimension(&p, &opts).is_err());
    }
}
