//! Synthetic panels with planted structure.
//!
//! [`gen_factor_panel`] draws a linear factor model with Gaussian factors and
//! noise. [`gen_regime_panel`] mixes an extra common factor into such a
//! panel with a weight that ramps over time, so later windows are more
//! strongly correlated; eccentric entities load on that factor with the
//! opposite sign.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::panel::{Panel, MIN_ENTITIES, MIN_PERIODS};

/// Range of random loading magnitudes.
pub const LOADING_RANGE: (f64, f64) = (0.5, 1.5);

const COUNTRY_CODES: [&str; 24] = [
    "AT", "BS", "BH", "BE", "CA", "KY", "DK", "FI", "FR", "DE", "HK", "IE", "IT", "JP", "LU", "NL",
    "AN", "NO", "SG", "ES", "SE", "CH", "GB", "US",
];

/// Two-letter country codes for up to 24 entities, `E000`-style ids beyond.
pub fn default_entity_ids(n: usize) -> Vec<String> {
    if n <= COUNTRY_CODES.len() {
        COUNTRY_CODES[..n].iter().map(|s| s.to_string()).collect()
    } else {
        (0..n).map(|k| format!("E{k:03}")).collect()
    }
}

pub fn default_period_labels(t: usize) -> Vec<String> {
    (0..t).map(|k| format!("t{k:03}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Loadings {
    /// Magnitude uniform on [`LOADING_RANGE`], independent random sign.
    Random,
    /// N x F matrix, row-major.
    Fixed(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    pub n_entities: usize,
    pub n_periods: usize,
    pub n_factors: usize,
    pub loadings: Loadings,
    pub noise_sigma: f64,
    pub seed: u64,
    /// Defaults to [`default_entity_ids`].
    #[serde(default)]
    pub entity_ids: Option<Vec<String>>,
}

impl FactorSpec {
    pub fn new(n_entities: usize, n_periods: usize, n_factors: usize, noise_sigma: f64, seed: u64) -> Self {
        Self {
            n_entities,
            n_periods,
            n_factors,
            loadings: Loadings::Random,
            noise_sigma,
            seed,
            entity_ids: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n_entities < MIN_ENTITIES || self.n_periods < MIN_PERIODS {
            return Err(Error::invalid(format!(
                "need at least {MIN_ENTITIES} entities and {MIN_PERIODS} periods"
            )));
        }
        if self.n_factors >= self.n_entities.min(self.n_periods) {
            return Err(Error::invalid(format!(
                "{} factors must be fewer than min(entities, periods)",
                self.n_factors
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::invalid(format!("noise sigma {} must be >= 0", self.noise_sigma)));
        }
        if let Loadings::Fixed(rows) = &self.loadings {
            if rows.len() != self.n_entities || rows.iter().any(|r| r.len() != self.n_factors) {
                return Err(Error::invalid(format!(
                    "loadings must be {}x{}",
                    self.n_entities, self.n_factors
                )));
            }
        }
        if let Some(ids) = &self.entity_ids {
            if ids.len() != self.n_entities {
                return Err(Error::invalid(format!(
                    "{} entity ids for {} entities",
                    ids.len(),
                    self.n_entities
                )));
            }
        }
        Ok(())
    }

    fn ids(&self) -> Vec<String> {
        self.entity_ids
            .clone()
            .unwrap_or_else(|| default_entity_ids(self.n_entities))
    }
}

fn draw_loadings(spec: &FactorSpec, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let (n, f) = (spec.n_entities, spec.n_factors);
    match &spec.loadings {
        Loadings::Fixed(rows) => DMatrix::from_fn(n, f, |i, k| rows[i][k]),
        Loadings::Random => {
            let magnitude = Uniform::new_inclusive(LOADING_RANGE.0, LOADING_RANGE.1)
                .expect("valid loading range");
            let mut l = DMatrix::zeros(n, f);
            for i in 0..n {
                for k in 0..f {
                    let m = magnitude.sample(rng);
                    l[(i, k)] = if rng.random_bool(0.5) { m } else { -m };
                }
            }
            l
        }
    }
}

fn gaussian_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = StandardNormal.sample(rng);
        }
    }
    m
}

/// Loadings, factor paths and noise, drawn in that order.
fn factor_values(spec: &FactorSpec, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let loadings = draw_loadings(spec, rng);
    let factors = gaussian_matrix(spec.n_factors, spec.n_periods, rng);
    let noise = gaussian_matrix(spec.n_entities, spec.n_periods, rng);
    &loadings * &factors + noise * spec.noise_sigma
}

/// `values = loadings * factors + sigma * noise`.
pub fn gen_factor_panel(spec: &FactorSpec) -> Result<Panel> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let values = factor_values(spec, &mut rng);
    Panel::new(spec.ids(), default_period_labels(spec.n_periods), values)
}

/// Linear path of the common-factor weight from `start` (first period) to
/// `end` (last period).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ramp {
    pub start: f64,
    pub end: f64,
}

impl Ramp {
    pub fn constant(w: f64) -> Self {
        Self { start: w, end: w }
    }

    pub fn weight(&self, t: usize, periods: usize) -> f64 {
        if periods < 2 {
            return self.start;
        }
        let frac = t as f64 / (periods - 1) as f64;
        self.start + (self.end - self.start) * frac
    }
}

impl std::str::FromStr for Ramp {
    type Err = Error;

    /// Parses `start:end`.
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("ramp {s:?} is not start:end")))?;
        let parse = |x: &str| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad ramp weight {x:?}")))
        };
        Ok(Ramp {
            start: parse(a)?,
            end: parse(b)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeSpec {
    pub base: FactorSpec,
    pub ramp: Ramp,
    #[serde(default)]
    pub eccentric: Vec<String>,
}

/// Panel whose common-factor share follows `spec.ramp`:
///
/// `x(i, t) = w(t) * a_i * m(t) + (1 - w(t)) * base(i, t)`
///
/// with `a_i` uniform on [`LOADING_RANGE`], negated for eccentric entities,
/// and `base` drawn as in [`gen_factor_panel`] from the same seed.
pub fn gen_regime_panel(spec: &RegimeSpec) -> Result<Panel> {
    let base = &spec.base;
    base.validate()?;
    for w in [spec.ramp.start, spec.ramp.end] {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::invalid(format!("ramp weight {w} outside [0, 1]")));
        }
    }
    let ids = base.ids();
    let mut flip = vec![false; ids.len()];
    for e in &spec.eccentric {
        let k = ids
            .iter()
            .position(|id| id == e)
            .ok_or_else(|| Error::UnknownEntity(e.clone()))?;
        flip[k] = true;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(base.seed);
    let idio = factor_values(base, &mut rng);
    let magnitude = Uniform::new_inclusive(LOADING_RANGE.0, LOADING_RANGE.1).expect("valid loading range");
    let common_loading: Vec<f64> = flip
        .iter()
        .map(|&f| {
            let a = magnitude.sample(&mut rng);
            if f {
                -a
            } else {
                a
            }
        })
        .collect();
    let common: Vec<f64> = (0..base.n_periods)
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();

    let t_len = base.n_periods;
    let values = DMatrix::from_fn(base.n_entities, t_len, |i, t| {
        let w = spec.ramp.weight(t, t_len);
        w * common_loading[i] * common[t] + (1.0 - w) * idio[(i, t)]
    });
    Panel::new(ids, default_period_labels(t_len), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::distance_matrix;

    #[test]
    fn deterministic_per_seed() {
        let spec = FactorSpec::new(6, 20, 2, 0.3, 11);
        let a = gen_factor_panel(&spec).unwrap();
        assert_eq!(a, gen_factor_panel(&spec).unwrap());
        let b = gen_factor_panel(&FactorSpec { seed: 12, ..spec }).unwrap();
        assert_ne!(a, b);
        assert_eq!(a.entity_ids()[..3], ["AT", "BS", "BH"]);
    }

    #[test]
    fn rank_one_noiseless_panel_collapses() {
        let spec = FactorSpec {
            loadings: Loadings::Fixed(vec![vec![1.0]; 5]),
            ..FactorSpec::new(5, 30, 1, 0.0, 3)
        };
        let p = gen_factor_panel(&spec).unwrap();
        let d = distance_matrix(&p).unwrap();
        assert!(d.matrix().amax() < 1e-7);
    }

    #[test]
    fn invalid_specs() {
        assert!(gen_factor_panel(&FactorSpec::new(3, 10, 3, 0.3, 0)).is_err());
        assert!(gen_factor_panel(&FactorSpec::new(5, 10, 1, -1.0, 0)).is_err());
        assert!(gen_factor_panel(&FactorSpec::new(2, 10, 0, 1.0, 0)).is_err());
        let bad_loadings = FactorSpec {
            loadings: Loadings::Fixed(vec![vec![1.0, 2.0]; 4]),
            ..FactorSpec::new(4, 10, 1, 0.1, 0)
        };
        assert!(gen_factor_panel(&bad_loadings).is_err());

        let regime = RegimeSpec {
            base: FactorSpec::new(5, 20, 0, 0.3, 0),
            ramp: Ramp { start: 0.1, end: 1.2 },
            eccentric: vec![],
        };
        assert!(gen_regime_panel(&regime).is_err());
        let regime = RegimeSpec {
            ramp: Ramp { start: 0.1, end: 0.9 },
            eccentric: vec!["ZZ".into()],
            ..regime
        };
        assert!(matches!(gen_regime_panel(&regime), Err(Error::UnknownEntity(_))));
    }

    #[test]
    fn eccentric_entity_is_anti_correlated_late() {
        let spec = RegimeSpec {
            base: FactorSpec::new(8, 110, 0, 0.3, 5),
            ramp: Ramp { start: 0.1, end: 0.9 },
            eccentric: vec!["AN".into(), "AT".into()],
        };
        let err = gen_regime_panel(&spec).unwrap_err();
        assert!(matches!(err, Error::UnknownEntity(_)), "AN is entity 17");

        let spec = RegimeSpec {
            eccentric: vec!["AT".into()],
            ..spec
        };
        let p = gen_regime_panel(&spec).unwrap();
        let late = p.window(80, 30).unwrap();
        let corr = distance_matrix(&late).unwrap().correlation();
        for j in 1..8 {
            assert!(corr[(0, j)] < -0.5, "corr(AT, {j}) = {}", corr[(0, j)]);
        }
        assert!(corr[(1, 2)] > 0.5);
    }

    #[test]
    fn ramp_parsing_and_weights() {
        let r: Ramp = "0.1:0.9".parse().unwrap();
        assert_eq!(r, Ramp { start: 0.1, end: 0.9 });
        assert!((r.weight(0, 11) - 0.1).abs() < 1e-15);
        assert!((r.weight(10, 11) - 0.9).abs() < 1e-15);
        assert!((r.weight(5, 11) - 0.5).abs() < 1e-15);
        assert!("0.5".parse::<Ramp>().is_err());
    }

    #[test]
    fn default_ids() {
        assert_eq!(default_entity_ids(24)[16], "AN");
        assert_eq!(default_entity_ids(30)[0], "E000");
    }
}
