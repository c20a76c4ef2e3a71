//! Panels of entity time series: ingestion, validation, windowing and
//! normalization.
//!
//! A [`Panel`] is a rectangular block of `N` entity series over `T` periods.
//! Period labels are opaque strings whose chronology is the order in which
//! they appear in the source file.

use std::collections::HashMap;
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::fmt_f64;

/// Minimum number of entities a panel may hold.
pub const MIN_ENTITIES: usize = 3;
/// Minimum number of periods a panel may hold.
pub const MIN_PERIODS: usize = 2;

/// Layout of a panel CSV file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// `entity,period,value`, one row per observation.
    Long,
    /// `period,<id1>,<id2>,...`, one row per period.
    Wide,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "long" => Ok(Format::Long),
            "wide" => Ok(Format::Wide),
            other => Err(Error::invalid(format!("unknown panel format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Panel {
    entity_ids: Vec<String>,
    period_labels: Vec<String>,
    /// N x T, row k is the series of entity k.
    values: DMatrix<f64>,
}

impl Panel {
    /// Builds a panel, checking every invariant.
    pub fn new(
        entity_ids: Vec<String>,
        period_labels: Vec<String>,
        values: DMatrix<f64>,
    ) -> Result<Self> {
        if values.nrows() != entity_ids.len() || values.ncols() != period_labels.len() {
            return Err(Error::invalid(format!(
                "value matrix is {}x{} but there are {} entities and {} periods",
                values.nrows(),
                values.ncols(),
                entity_ids.len(),
                period_labels.len()
            )));
        }
        if entity_ids.len() < MIN_ENTITIES {
            return Err(Error::invalid(format!(
                "panel needs at least {MIN_ENTITIES} entities, found {}",
                entity_ids.len()
            )));
        }
        if period_labels.len() < MIN_PERIODS {
            return Err(Error::invalid(format!(
                "panel needs at least {MIN_PERIODS} periods, found {}",
                period_labels.len()
            )));
        }
        check_unique("entity", &entity_ids)?;
        check_unique("period", &period_labels)?;
        if let Some(id) = entity_ids.iter().find(|id| id.is_empty()) {
            return Err(Error::invalid(format!("empty entity id {id:?}")));
        }
        for (k, id) in entity_ids.iter().enumerate() {
            for (t, p) in period_labels.iter().enumerate() {
                let v = values[(k, t)];
                if !v.is_finite() {
                    return Err(Error::invalid(format!(
                        "non-finite value {v} for ({id}, {p})"
                    )));
                }
            }
        }
        Ok(Self {
            entity_ids,
            period_labels,
            values,
        })
    }

    pub fn entity_ids(&self) -> &[String] {
        &self.entity_ids
    }

    pub fn period_labels(&self) -> &[String] {
        &self.period_labels
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn n_entities(&self) -> usize {
        self.entity_ids.len()
    }

    pub fn n_periods(&self) -> usize {
        self.period_labels.len()
    }

    pub fn series(&self, entity: usize) -> Vec<f64> {
        self.values.row(entity).iter().copied().collect()
    }

    pub fn entity_index(&self, id: &str) -> Result<usize> {
        self.entity_ids
            .iter()
            .position(|e| e == id)
            .ok_or_else(|| Error::UnknownEntity(id.to_string()))
    }

    /// Columns `[start, start + length)` of this panel.
    pub fn window(&self, start: usize, length: usize) -> Result<Panel> {
        let periods = self.n_periods();
        if length < MIN_PERIODS || start.checked_add(length).is_none_or(|end| end > periods) {
            return Err(Error::WindowOutOfRange {
                start,
                length,
                periods,
            });
        }
        Ok(Panel {
            entity_ids: self.entity_ids.clone(),
            period_labels: self.period_labels[start..start + length].to_vec(),
            values: self.values.columns(start, length).into_owned(),
        })
    }

    /// Same periods, restricted to the given entity rows (in the given order).
    pub fn select_entities(&self, rows: &[usize]) -> Result<Panel> {
        let ids = rows.iter().map(|&r| self.entity_ids[r].clone()).collect();
        let values = self.values.select_rows(rows);
        Panel::new(ids, self.period_labels.clone(), values)
    }

    /// Entities whose series is constant over this panel.
    pub fn constant_entities(&self) -> Vec<String> {
        (0..self.n_entities())
            .filter(|&k| normalize_slice(&self.series(k)).is_none())
            .map(|k| self.entity_ids[k].clone())
            .collect()
    }

    /// Removes constant series. Returns the reduced panel and the dropped ids.
    pub fn drop_constant(&self) -> Result<(Panel, Vec<String>)> {
        let dropped = self.constant_entities();
        if dropped.is_empty() {
            return Ok((self.clone(), dropped));
        }
        let keep: Vec<usize> = (0..self.n_entities())
            .filter(|&k| !dropped.contains(&self.entity_ids[k]))
            .collect();
        Ok((self.select_entities(&keep)?, dropped))
    }

    /// Writes the panel in the given CSV layout using shortest round-trip
    /// number formatting.
    pub fn write_csv<W: Write>(&self, writer: W, format: Format) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        match format {
            Format::Long => {
                w.write_record(["entity", "period", "value"])?;
                for (k, id) in self.entity_ids.iter().enumerate() {
                    for (t, p) in self.period_labels.iter().enumerate() {
                        w.write_record([id.as_str(), p.as_str(), &fmt_f64(self.values[(k, t)])])?;
                    }
                }
            }
            Format::Wide => {
                let mut header = vec!["period".to_string()];
                header.extend(self.entity_ids.iter().cloned());
                w.write_record(&header)?;
                for (t, p) in self.period_labels.iter().enumerate() {
                    let mut row = vec![p.clone()];
                    row.extend((0..self.n_entities()).map(|k| fmt_f64(self.values[(k, t)])));
                    w.write_record(&row)?;
                }
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn check_unique(what: &str, labels: &[String]) -> Result<()> {
    let mut seen = HashMap::with_capacity(labels.len());
    for l in labels {
        if seen.insert(l.as_str(), ()).is_some() {
            return Err(Error::invalid(format!("duplicate {what} label {l:?}")));
        }
    }
    Ok(())
}

/// A zero-mean, unit-norm version of one entity's series.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSeries {
    pub entity_id: String,
    pub rho: DVector<f64>,
}

/// Centers the series and scales it to unit Euclidean norm.
///
/// This is `(l - <l>) / sqrt(n * popvar(l))`, since `n * popvar` is the
/// squared norm of the centered series. Returns `None` for constant input.
pub fn normalize_slice(l: &[f64]) -> Option<DVector<f64>> {
    let n = l.len();
    if n == 0 {
        return None;
    }
    let mean = l.iter().sum::<f64>() / n as f64;
    let mut centered = DVector::from_iterator(n, l.iter().map(|v| v - mean));
    // second pass removes the rounding left in the first mean
    let residual = centered.sum() / n as f64;
    centered.add_scalar_mut(-residual);
    let norm = centered.norm();
    let scale = l.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if norm == 0.0 || norm <= 1e-13 * scale * (n as f64).sqrt() {
        return None;
    }
    Some(centered / norm)
}

/// Normalized series of one entity.
pub fn normalize(panel: &Panel, entity: usize) -> Result<NormalizedSeries> {
    let id = panel
        .entity_ids
        .get(entity)
        .ok_or_else(|| Error::UnknownEntity(format!("#{entity}")))?;
    let rho = normalize_slice(&panel.series(entity)).ok_or_else(|| Error::ZeroVariance {
        entities: vec![id.clone()],
    })?;
    Ok(NormalizedSeries {
        entity_id: id.clone(),
        rho,
    })
}

/// All normalized series as rows of an N x T matrix. Every constant series is
/// reported in a single error.
pub fn normalize_all(panel: &Panel) -> Result<DMatrix<f64>> {
    let (n, t) = (panel.n_entities(), panel.n_periods());
    let mut out = DMatrix::zeros(n, t);
    let mut constant = Vec::new();
    for k in 0..n {
        match normalize_slice(&panel.series(k)) {
            Some(rho) => out.row_mut(k).copy_from(&rho.transpose()),
            None => constant.push(panel.entity_ids[k].clone()),
        }
    }
    if !constant.is_empty() {
        return Err(Error::ZeroVariance { entities: constant });
    }
    Ok(out)
}

/// Reads a panel from CSV.
pub fn load_panel<R: Read>(source: R, format: Format) -> Result<Panel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(source);
    match format {
        Format::Long => load_long(&mut reader),
        Format::Wide => load_wide(&mut reader),
    }
}

fn parse_value(field: &str, line: u64) -> Result<f64> {
    if field.is_empty() {
        return Err(Error::Parse {
            line,
            message: "missing observation".into(),
        });
    }
    let v: f64 = field.parse().map_err(|_| Error::Parse {
        line,
        message: format!("non-numeric value {field:?}"),
    })?;
    if !v.is_finite() {
        return Err(Error::Parse {
            line,
            message: format!("non-finite value {field:?}"),
        });
    }
    Ok(v)
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn load_long<R: Read>(reader: &mut csv::Reader<R>) -> Result<Panel> {
    let header = reader.headers()?.clone();
    let expected = ["entity", "period", "value"];
    if header.len() != 3 || header.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header entity,period,value, found {:?}", header.iter().collect::<Vec<_>>()),
        });
    }

    let mut entities: Vec<String> = Vec::new();
    let mut entity_pos: HashMap<String, usize> = HashMap::new();
    let mut periods: Vec<String> = Vec::new();
    let mut period_pos: HashMap<String, usize> = HashMap::new();
    let mut cells: HashMap<(usize, usize), f64> = HashMap::new();

    for record in reader.records() {
        let record = record?;
        let line = line_of(&record);
        if record.len() != 3 {
            return Err(Error::Parse {
                line,
                message: format!("expected 3 fields, found {}", record.len()),
            });
        }
        let (entity, period) = (&record[0], &record[1]);
        if entity.is_empty() || period.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty entity or period".into(),
            });
        }
        let value = parse_value(&record[2], line)?;
        let e = *entity_pos.entry(entity.to_string()).or_insert_with(|| {
            entities.push(entity.to_string());
            entities.len() - 1
        });
        let p = *period_pos.entry(period.to_string()).or_insert_with(|| {
            periods.push(period.to_string());
            periods.len() - 1
        });
        if cells.insert((e, p), value).is_some() {
            return Err(Error::DuplicateCell {
                entity: entity.to_string(),
                period: period.to_string(),
            });
        }
    }

    let mut values = DMatrix::zeros(entities.len(), periods.len());
    for (e, id) in entities.iter().enumerate() {
        for (p, label) in periods.iter().enumerate() {
            values[(e, p)] = *cells.get(&(e, p)).ok_or_else(|| Error::MissingObservation {
                entity: id.clone(),
                period: label.clone(),
            })?;
        }
    }
    Panel::new(entities, periods, values)
}

fn load_wide<R: Read>(reader: &mut csv::Reader<R>) -> Result<Panel> {
    let header = reader.headers()?.clone();
    if header.is_empty() || &header[0] != "period" {
        return Err(Error::Parse {
            line: 1,
            message: "expected header period,<id1>,<id2>,...".into(),
        });
    }
    let entities: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    check_unique("entity", &entities)?;

    let mut periods = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let line = line_of(&record);
        if record.len() != header.len() {
            return Err(Error::Parse {
                line,
                message: format!("expected {} fields, found {}", header.len(), record.len()),
            });
        }
        let period = record[0].to_string();
        let mut col = Vec::with_capacity(entities.len());
        for (k, field) in record.iter().skip(1).enumerate() {
            if field.is_empty() {
                return Err(Error::MissingObservation {
                    entity: entities[k].clone(),
                    period,
                });
            }
            col.push(parse_value(field, line)?);
        }
        if periods.contains(&period) {
            return Err(Error::DuplicateCell {
                entity: entities.first().cloned().unwrap_or_default(),
                period,
            });
        }
        periods.push(period);
        columns.push(col);
    }

    let values = DMatrix::from_fn(entities.len(), periods.len(), |k, t| columns[t][k]);
    Panel::new(entities, periods, values)
}

/// Display metadata for entities, read from `entity,display_name,group`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Labels {
    entries: HashMap<String, Label>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub display_name: String,
    pub group: String,
}

impl Labels {
    pub fn get(&self, entity: &str) -> Option<&Label> {
        self.entries.get(entity)
    }

    pub fn group(&self, entity: &str) -> Option<&str> {
        self.entries.get(entity).map(|l| l.group.as_str())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn load_labels<R: Read>(source: R) -> Result<Labels> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let header = reader.headers()?.clone();
    let expected = ["entity", "display_name", "group"];
    if header.len() != 3 || header.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(Error::Parse {
            line: 1,
            message: "expected header entity,display_name,group".into(),
        });
    }
    let mut entries = HashMap::new();
    for record in reader.records() {
        let record = record?;
        let line = line_of(&record);
        let label = Label {
            display_name: record[1].to_string(),
            group: record[2].to_string(),
        };
        if entries.insert(record[0].to_string(), label).is_some() {
            return Err(Error::Parse {
                line,
                message: format!("duplicate label for entity {:?}", &record[0]),
            });
        }
    }
    Ok(Labels { entries })
}
