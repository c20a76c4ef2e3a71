//! Correlation-metric geometry and weighted-network coefficients for panels
//! of time series.
//!
//! The pipeline, per window of a [`Panel`]:
//!
//! 1. [`geometry::distance_matrix`]: correlation distances `sqrt(2 (1 - C))`
//!    between normalized series.
//! 2. [`geometry::embed`]: coordinates reproducing those distances, with the
//!    eigenvalue spectrum of the configuration.
//! 3. [`geometry::effective_dimension`]: how many leading eigenvalues stand
//!    above time-permuted surrogates.
//! 4. [`geometry::reduce`] and [`geometry::volume`]: the reduced space and
//!    the geometric mean of its eigenvalues.
//! 5. [`network`]: bilateral exposures `1 / d`, node strength, continuous
//!    clustering, closeness and the minimum spanning tree.
//!
//! [`rolling::rolling_analysis`] runs all of it over moving windows and
//! [`synth`] generates panels with planted structure. The `corrgeo` binary
//! wraps [`cli::run`].

pub mod cli;
pub mod error;
pub mod export;
pub mod fmt;
pub mod geometry;
pub mod network;
pub mod panel;
pub mod rolling;
pub mod synth;

pub use error::{Error, Result};
pub use geometry::{
    distance_matrix, effective_dimension, embed, reduce, surrogate_panel, volume, DimensionOptions,
    DistanceMatrix, Embedding, NullModel, ReducedSpace,
};
pub use network::{
    closeness_centrality, continuous_clustering, exposure_network, mst, strength, top_links, ExposureNetwork,
    SpanningTree,
};
pub use panel::{load_panel, normalize, Format, Panel};
pub use rolling::{rolling_analysis, series_summary, Dim, MetricSeries, RollingConfig};
pub use synth::{gen_factor_panel, gen_regime_panel, FactorSpec, Ramp, RegimeSpec};
