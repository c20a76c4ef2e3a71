//! Moving-window driver: runs the full geometry and network pipeline on
//! every window of a panel and assembles time-indexed metric series.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{distance_matrix, effective_dimension, embed, reduce, volume, DimensionOptions, NullModel};
use crate::network::{closeness_of_distances, clustering_of_distances, exposure_network};
use crate::panel::Panel;

/// Number of leading directions kept per window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Dim {
    Fixed(usize),
    /// Chosen per window by the surrogate test.
    Auto,
}

impl std::str::FromStr for Dim {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Dim::Auto);
        }
        s.parse::<usize>()
            .map(Dim::Fixed)
            .map_err(|_| Error::invalid(format!("dimension {s:?} is neither a count nor \"auto\"")))
    }
}

impl std::fmt::Display for Dim {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dim::Fixed(d) => write!(f, "{d}"),
            Dim::Auto => f.write_str("auto"),
        }
    }
}

impl TryFrom<String> for Dim {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Dim> for String {
    fn from(d: Dim) -> String {
        d.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RollingConfig {
    pub window_length: usize,
    pub step: usize,
    pub dim: Dim,
    pub permutations: usize,
    pub quantile: f64,
    pub seed: u64,
    pub null_model: NullModel,
    /// Drop constant series per window instead of failing.
    pub drop_constant: bool,
}

impl Default for RollingConfig {
    fn default() -> Self {
        Self {
            window_length: 56,
            step: 1,
            dim: Dim::Fixed(3),
            permutations: 100,
            quantile: 0.95,
            seed: 0,
            null_model: NullModel::Permutation,
            drop_constant: false,
        }
    }
}

impl RollingConfig {
    fn dimension_options(&self, seed: u64) -> DimensionOptions {
        DimensionOptions {
            permutations: self.permutations,
            quantile: self.quantile,
            seed,
            null_model: self.null_model,
        }
    }
}

/// Surrogate seed of window `index`.
pub fn window_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

/// Number of windows of `length` periods at stride `step` over `periods`.
pub fn window_count(periods: usize, length: usize, step: usize) -> usize {
    if step == 0 || length > periods {
        0
    } else {
        (periods - length) / step + 1
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowMetrics {
    pub start_label: String,
    pub end_label: String,
    /// Entities analysed in this window (constant series may be dropped).
    pub entity_ids: Vec<String>,
    pub dropped: Vec<String>,
    /// Raw surrogate-test result when the dimension is automatic.
    pub effective_dim: Option<usize>,
    /// Dimension of the reduced space used for V, C, strength, closeness.
    pub dim: usize,
    pub volume: f64,
    pub volume_degenerate: bool,
    pub clustering: f64,
    pub strength: Vec<f64>,
    pub closeness: Vec<f64>,
}

/// Pipeline for one window panel.
pub fn analyze_window(window: &Panel, cfg: &RollingConfig, seed: u64) -> Result<WindowMetrics> {
    let (panel, dropped) = if cfg.drop_constant {
        window.drop_constant()?
    } else {
        (window.clone(), Vec::new())
    };
    let dm = distance_matrix(&panel)?;
    let emb = embed(&dm)?;
    let n = panel.n_entities();

    let (effective_dim, dim) = match cfg.dim {
        Dim::Fixed(d) => {
            if d == 0 || d > n - 1 {
                return Err(Error::invalid(format!("dimension {d} outside [1, {}]", n - 1)));
            }
            (None, d)
        }
        Dim::Auto => {
            let found = effective_dimension(&panel, &cfg.dimension_options(seed))?.dim;
            (Some(found), found.max(1))
        }
    };

    let vol = volume(&emb, dim)?;
    let rs = reduce(&emb, dim)?;
    let net = exposure_network(&rs)?;
    let clustering = clustering_of_distances(rs.distances())?;

    let labels = panel.period_labels();
    Ok(WindowMetrics {
        start_label: labels[0].clone(),
        end_label: labels[labels.len() - 1].clone(),
        entity_ids: panel.entity_ids().to_vec(),
        dropped,
        effective_dim,
        dim,
        volume: vol.value,
        volume_degenerate: vol.degenerate,
        clustering,
        strength: net.strengths(),
        closeness: closeness_of_distances(rs.distances()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSeries {
    pub entity_ids: Vec<String>,
    pub config: RollingConfig,
    /// Index of the first period of each window.
    pub window_starts: Vec<usize>,
    pub windows: Vec<WindowMetrics>,
}

impl MetricSeries {
    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn volume(&self) -> Vec<f64> {
        self.windows.iter().map(|w| w.volume).collect()
    }

    pub fn clustering(&self) -> Vec<f64> {
        self.windows.iter().map(|w| w.clustering).collect()
    }

    pub fn effective_dim(&self) -> Option<Vec<usize>> {
        self.windows.iter().map(|w| w.effective_dim).collect()
    }

    fn per_entity(&self, pick: impl Fn(&WindowMetrics) -> &[f64]) -> Vec<Vec<f64>> {
        self.entity_ids
            .iter()
            .map(|id| {
                self.windows
                    .iter()
                    .map(|w| {
                        w.entity_ids
                            .iter()
                            .position(|e| e == id)
                            .map_or(f64::NAN, |k| pick(w)[k])
                    })
                    .collect()
            })
            .collect()
    }

    /// N x W; NaN where an entity was dropped from a window.
    pub fn strength(&self) -> Vec<Vec<f64>> {
        self.per_entity(|w| &w.strength)
    }

    /// N x W; NaN where an entity was dropped from a window.
    pub fn closeness(&self) -> Vec<Vec<f64>> {
        self.per_entity(|w| &w.closeness)
    }
}

/// Runs every window in parallel; results come back in window order and do
/// not depend on the thread count.
pub fn rolling_analysis(panel: &Panel, cfg: &RollingConfig) -> Result<MetricSeries> {
    if cfg.window_length < 3 {
        return Err(Error::invalid(format!("window length {} < 3", cfg.window_length)));
    }
    if cfg.step == 0 {
        return Err(Error::invalid("step must be at least 1"));
    }
    if panel.n_periods() < cfg.window_length {
        return Err(Error::invalid(format!(
            "panel has {} periods, fewer than the window length {}",
            panel.n_periods(),
            cfg.window_length
        )));
    }
    if let Dim::Fixed(d) = cfg.dim {
        if d == 0 || d >= panel.n_entities() {
            return Err(Error::invalid(format!(
                "dimension {d} outside [1, {}]",
                panel.n_entities() - 1
            )));
        }
    }

    let count = window_count(panel.n_periods(), cfg.window_length, cfg.step);
    let window_starts: Vec<usize> = (0..count).map(|w| w * cfg.step).collect();
    let windows = window_starts
        .par_iter()
        .enumerate()
        .map(|(index, &start)| {
            let window = panel.window(start, cfg.window_length)?;
            analyze_window(&window, cfg, window_seed(cfg.seed, index)).map_err(|e| {
                let labels = window.period_labels();
                Error::InWindow {
                    index,
                    start: labels[0].clone(),
                    end: labels[labels.len() - 1].clone(),
                    source: Box::new(e),
                }
            })
        })
        .collect::<Vec<Result<_>>>()
        .into_iter()
        .collect::<Result<Vec<_>>>()?;

    Ok(MetricSeries {
        entity_ids: panel.entity_ids().to_vec(),
        config: *cfg,
        window_starts,
        windows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesSummary {
    pub min: f64,
    pub max: f64,
    pub argmin: usize,
    pub argmax: usize,
    /// Change from the first to the last value relative to the first.
    pub relative_change: f64,
}

/// Relative change `(s[to] - s[from]) / s[from]` over an inclusive range.
pub fn relative_change(series: &[f64], from: usize, to: usize) -> Result<f64> {
    if from > to || to >= series.len() {
        return Err(Error::invalid(format!(
            "range {from}..={to} empty or outside a series of length {}",
            series.len()
        )));
    }
    let (a, b) = (series[from], series[to]);
    if a == b {
        return Ok(0.0);
    }
    if a == 0.0 {
        return Err(Error::Degenerate(format!("zero baseline at window {from}")));
    }
    Ok((b - a) / a)
}

pub fn series_summary(series: &[f64]) -> Result<SeriesSummary> {
    if series.is_empty() {
        return Err(Error::invalid("empty series"));
    }
    let mut s = SeriesSummary {
        min: series[0],
        max: series[0],
        argmin: 0,
        argmax: 0,
        relative_change: relative_change(series, 0, series.len() - 1)?,
    };
    for (i, &v) in series.iter().enumerate() {
        if v < s.min {
            s.min = v;
            s.argmin = i;
        }
        if v > s.max {
            s.max = v;
            s.argmax = i;
        }
    }
    Ok(s)
}

/// Summaries of the volume and clustering series of a rolling run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RollingSummary {
    pub volume: SeriesSummary,
    pub clustering: SeriesSummary,
}

pub fn rolling_summary(ms: &MetricSeries) -> Result<RollingSummary> {
    Ok(RollingSummary {
        volume: series_summary(&ms.volume())?,
        clustering: series_summary(&ms.clustering())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{gen_factor_panel, FactorSpec};

    #[test]
    fn window_counts() {
        assert_eq!(window_count(110, 56, 1), 55);
        assert_eq!(window_count(56, 56, 1), 1);
        assert_eq!(window_count(110, 56, 4), 14);
        assert_eq!(window_count(10, 56, 1), 0);
    }

    #[test]
    fn dim_parsing() {
        assert_eq!("auto".parse::<Dim>().unwrap(), Dim::Auto);
        assert_eq!("3".parse::<Dim>().unwrap(), Dim::Fixed(3));
        assert!("x".parse::<Dim>().is_err());
        assert_eq!(serde_json::to_string(&Dim::Auto).unwrap(), "\"auto\"");
    }

    #[test]
    fn summary_fixtures() {
        let s = series_summary(&[4.0, 2.0, 1.0]).unwrap();
        assert_eq!(s.argmin, 2);
        assert_eq!(s.argmax, 0);
        assert!((s.relative_change + 0.75).abs() < 1e-15);
        assert_eq!(series_summary(&[3.0; 5]).unwrap().relative_change, 0.0);
        assert!(series_summary(&[]).is_err());
        assert!(relative_change(&[1.0, 2.0], 1, 0).is_err());
        assert!(relative_change(&[1.0, 2.0], 0, 2).is_err());
        assert!((relative_change(&[1.0, 2.0, 1.5], 0, 1).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_window_boundary() {
        let p = gen_factor_panel(&FactorSpec::new(6, 56, 2, 0.3, 1)).unwrap();
        let ms = rolling_analysis(&p, &RollingConfig::default()).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms.window_starts, vec![0]);
        assert_eq!(ms.windows[0].start_label, "t000");
        assert_eq!(ms.windows[0].end_label, "t055");
    }

    #[test]
    fn rejects_bad_config() {
        let p = gen_factor_panel(&FactorSpec::new(5, 40, 1, 0.3, 1)).unwrap();
        let too_long = RollingConfig::default();
        assert!(rolling_analysis(&p, &too_long).is_err());
        let cfg = RollingConfig { window_length: 20, dim: Dim::Fixed(5), ..Default::default() };
        assert!(rolling_analysis(&p, &cfg).is_err());
        let cfg = RollingConfig { window_length: 2, ..Default::default() };
        assert!(rolling_analysis(&p, &cfg).is_err());
    }

    #[test]
    fn constant_window_policy() {
        let mut values = gen_factor_panel(&FactorSpec::new(5, 30, 1, 0.5, 2)).unwrap().values().clone();
        for t in 10..30 {
            values[(2, t)] = 7.0;
        }
        let p = Panel::new(
            crate::synth::default_entity_ids(5),
            crate::synth::default_period_labels(30),
            values,
        )
        .unwrap();
        let cfg = RollingConfig { window_length: 15, step: 5, dim: Dim::Fixed(2), ..Default::default() };
        let err = rolling_analysis(&p, &cfg).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("BH") && msg.contains("t010"), "{msg}");

        let ms = rolling_analysis(&p, &RollingConfig { drop_constant: true, ..cfg }).unwrap();
        assert_eq!(ms.windows[0].dropped, Vec::<String>::new());
        assert_eq!(ms.windows[2].dropped, vec!["BH".to_string()]);
        assert!(ms.strength()[2][2].is_nan());
        assert!(ms.strength()[2][0].is_finite());
    }
}
