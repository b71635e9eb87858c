//! File formats: CGO1 binary fields, measurement JSON, orderings and
//! iteration logs as CSV.

use crate::cgo::SolverConfig;
use crate::error::{Error, Result};
use crate::recon::IterationLog;
use crate::scalar::Scalar;
use crate::spectral::field::Field;
use crate::spectral::grid::TorusGrid;
use crate::spectral::ordering::{FreqOrdering, OrderingKind};
use crate::subspaces::{BoxConstraint, Cell, Family, Partition, SubspaceSpec};
use crate::transform::{MeasurementVector, TSchedule};
use num_complex::Complex;
use serde::{Deserialize, Serialize};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

const FIELD_MAGIC: &[u8; 4] = b"CGO1";

/// Write a field: magic `CGO1`, little-endian u32 d and n, then n^d samples
/// as interleaved f64 (re, im) in row-major node order.
pub fn write_field<T: Scalar>(path: &Path, field: &Field<T>) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(FIELD_MAGIC)?;
    w.write_all(&(field.grid().dim() as u32).to_le_bytes())?;
    w.write_all(&(field.grid().points_per_axis() as u32).to_le_bytes())?;
    for v in field.values() {
        w.write_all(&v.re.to_f64_lossy().to_le_bytes())?;
        w.write_all(&v.im.to_f64_lossy().to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_field<T: Scalar>(path: &Path) -> Result<Field<T>> {
    let mut r = BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != FIELD_MAGIC {
        return Err(Error::Format(format!(
            "{} is not a CGO1 field file",
            path.display()
        )));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let d = u32::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let n = u32::from_le_bytes(word) as usize;
    let grid = TorusGrid::new(d, n)?;
    let mut values = Vec::with_capacity(grid.len());
    let mut sample = [0u8; 16];
    for _ in 0..grid.len() {
        r.read_exact(&mut sample)?;
        let re = f64::from_le_bytes(sample[..8].try_into().unwrap());
        let im = f64::from_le_bytes(sample[8..].try_into().unwrap());
        values.push(Complex::new(T::cast(re), T::cast(im)));
    }
    if r.bytes().next().is_some() {
        return Err(Error::Format(format!(
            "{} has trailing bytes",
            path.display()
        )));
    }
    Field::from_values(grid, values)
}

/// Ordering export: CSV with columns l,k_1,...,k_d (l is 1-based).
pub fn write_ordering_csv(path: &Path, ordering: &FreqOrdering) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    let header: Vec<String> = std::iter::once("l".to_string())
        .chain((1..=ordering.dim()).map(|a| format!("k_{a}")))
        .collect();
    writeln!(w, "{}", header.join(","))?;
    for (l, k) in ordering.iter().enumerate() {
        let row: Vec<String> = std::iter::once((l + 1).to_string())
            .chain(k.iter().map(|c| c.to_string()))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Iteration log CSV: n,step_norm,true_error,data_residual with the error
/// column blank when no truth was supplied.
pub fn write_log_csv(path: &Path, log: &IterationLog) -> Result<()> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    writeln!(w, "n,step_norm,true_error,data_residual")?;
    for row in &log.rows {
        let err = row
            .true_error
            .map(|e| format!("{e:.17e}"))
            .unwrap_or_default();
        writeln!(
            w,
            "{},{:.17e},{},{:.17e}",
            row.n, row.step_norm, err, row.data_residual
        )?;
    }
    w.flush()?;
    Ok(())
}

/// Wire format between `simulate` and `reconstruct`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasurementFile {
    #[serde(rename = "N")]
    pub n: usize,
    pub ordering: OrderingKind,
    pub s: f64,
    pub tau: f64,
    pub values: Vec<[f64; 2]>,
    pub solver: SolverConfig,
}

impl MeasurementFile {
    pub fn from_measurement<T: Scalar>(m: &MeasurementVector<T>) -> Self {
        Self {
            n: m.n(),
            ordering: m.ordering,
            s: m.schedule.s,
            tau: m.schedule.tau,
            values: m
                .values
                .iter()
                .map(|v| [v.re.to_f64_lossy(), v.im.to_f64_lossy()])
                .collect(),
            solver: m.solver,
        }
    }

    pub fn into_measurement<T: Scalar>(self) -> Result<MeasurementVector<T>> {
        if self.values.len() != self.n {
            return Err(Error::Format(format!(
                "measurement claims N = {} but carries {} values",
                self.n,
                self.values.len()
            )));
        }
        Ok(MeasurementVector {
            values: self
                .values
                .iter()
                .map(|[re, im]| Complex::new(T::cast(*re), T::cast(*im)))
                .collect(),
            ordering: self.ordering,
            schedule: TSchedule {
                s: self.s,
                tau: self.tau,
            },
            solver: self.solver,
        })
    }
}

pub fn write_measurement<T: Scalar>(path: &Path, m: &MeasurementVector<T>) -> Result<()> {
    let file = MeasurementFile::from_measurement(m);
    let json = serde_json::to_string_pretty(&file)?;
    std::fs::write(path, json + "\n")?;
    Ok(())
}

pub fn read_measurement<T: Scalar>(path: &Path) -> Result<MeasurementVector<T>> {
    let text = std::fs::read_to_string(path)?;
    let file: MeasurementFile = serde_json::from_str(&text)?;
    file.into_measurement()
}

/// Sidecar describing one remainder solve.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RemainderSidecar {
    pub k: Vec<i64>,
    pub t_requested: f64,
    pub t_used: f64,
    pub residual: f64,
    pub iterations: usize,
    pub method: crate::cgo::Method,
}

/// Flat JSON form of a subspace spec plus its sup-norm box:
/// {"family": ..., "d": 3, "B": 1, "level": 1, "cells": [...], "R": 5.0}.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubspaceSpecFile {
    pub family: String,
    pub d: usize,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cells: Option<Vec<Cell>>,
    #[serde(rename = "R")]
    pub r: f64,
}

impl SubspaceSpecFile {
    pub fn to_spec(&self) -> Result<(SubspaceSpec, BoxConstraint)> {
        let family = match self.family.as_str() {
            "bandlimited" => Family::Bandlimited {
                b: self
                    .b
                    .ok_or_else(|| Error::Config("bandlimited family needs B".into()))?,
            },
            "piecewise" => {
                let cells = self
                    .cells
                    .clone()
                    .ok_or_else(|| Error::Config("piecewise family needs cells".into()))?;
                Family::Piecewise {
                    partition: Partition::new(cells)?,
                }
            }
            "haar" => Family::Haar {
                level: self
                    .level
                    .ok_or_else(|| Error::Config("haar family needs level".into()))?,
            },
            other => {
                return Err(Error::Config(format!("unknown subspace family {other:?}")));
            }
        };
        Ok((
            SubspaceSpec { family, d: self.d },
            BoxConstraint::new(self.r)?,
        ))
    }

    pub fn from_spec(spec: &SubspaceSpec, box_c: &BoxConstraint) -> Self {
        let (family, b, level, cells) = match &spec.family {
            Family::Bandlimited { b } => ("bandlimited", Some(*b), None, None),
            Family::Piecewise { partition } => {
                ("piecewise", None, None, Some(partition.cells.clone()))
            }
            Family::Haar { level } => ("haar", None, Some(*level), None),
        };
        Self {
            family: family.to_string(),
            d: spec.d,
            b,
            level,
            cells,
            r: box_c.r,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recon::LogRow;
    use crate::spectral::make_ordering;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn field_roundtrip_and_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.cgo1");
        let grid = TorusGrid::new(3, 8).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let values: Vec<Complex<f64>> = (0..grid.len())
            .map(|_| Complex::new(rng.gen(), rng.gen()))
            .collect();
        let f = Field::from_values(grid, values).unwrap();
        write_field(&path, &f).unwrap();

        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"CGO1");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 3);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 8);
        assert_eq!(bytes.len(), 12 + 16 * grid.len());
        // first sample re-read by hand
        let re = f64::from_le_bytes(bytes[12..20].try_into().unwrap());
        assert_eq!(re, f.values()[0].re);

        let back: Field<f64> = read_field(&path).unwrap();
        assert_eq!(back.values(), f.values());
    }

    #[test]
    fn wrong_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.cgo1");
        std::fs::write(&path, b"NOPE0000").unwrap();
        assert!(matches!(
            read_field::<f64>(&path),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn ordering_csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ordering.csv");
        let o = make_ordering(OrderingKind::Hyperbolic, 3, 3);
        write_ordering_csv(&path, &o).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "l,k_1,k_2,k_3");
        assert_eq!(lines[1], "1,0,0,0");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn measurement_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("y.json");
        let grid = TorusGrid::new(3, 16).unwrap();
        let m = MeasurementVector::<f64> {
            values: vec![Complex::new(1.5, -0.25), Complex::new(0.0, 2.0)],
            ordering: OrderingKind::Hyperbolic,
            schedule: TSchedule { s: 3.0, tau: 2.5 },
            solver: SolverConfig::new(grid),
        };
        write_measurement(&path, &m).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"N\": 2"));
        assert!(text.contains("\"ordering\": \"hyperbolic\""));
        let back: MeasurementVector<f64> = read_measurement(&path).unwrap();
        assert_eq!(back.values, m.values);
        assert_eq!(back.schedule, m.schedule);
        assert_eq!(back.solver, m.solver);
    }

    #[test]
    fn unknown_measurement_keys_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("y.json");
        let grid = TorusGrid::new(3, 16).unwrap();
        let m = MeasurementVector::<f64> {
            values: vec![Complex::new(1.0, 0.0)],
            ordering: OrderingKind::Box,
            schedule: TSchedule { s: 3.0, tau: 1.0 },
            solver: SolverConfig::new(grid),
        };
        write_measurement(&path, &m).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replacen("\"N\"", "\"surprise\": 1, \"N\"", 1);
        std::fs::write(&path, text).unwrap();
        assert!(read_measurement::<f64>(&path).is_err());
    }

    #[test]
    fn log_csv_blank_error_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.csv");
        let log = IterationLog {
            rows: vec![
                LogRow {
                    n: 1,
                    step_norm: 0.5,
                    true_error: Some(0.25),
                    data_residual: 0.125,
                },
                LogRow {
                    n: 2,
                    step_norm: 0.1,
                    true_error: None,
                    data_residual: 0.05,
                },
            ],
        };
        write_log_csv(&path, &log).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,step_norm,true_error,data_residual");
        assert!(lines[1].starts_with("1,") && lines[1].contains(",2.5"));
        let fields: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(fields[2], "");
    }

    #[test]
    fn subspace_spec_json_shapes() {
        let spec = SubspaceSpec::bandlimited(3, 1);
        let file = SubspaceSpecFile::from_spec(&spec, &BoxConstraint { r: 5.0 });
        let json = serde_json::to_string(&file).unwrap();
        assert!(json.contains("\"family\":\"bandlimited\""));
        assert!(json.contains("\"B\":1"));
        assert!(json.contains("\"R\":5.0"));
        let parsed: SubspaceSpecFile = serde_json::from_str(&json).unwrap();
        let (spec2, box2) = parsed.to_spec().unwrap();
        assert_eq!(spec2, spec);
        assert_eq!(box2.r, 5.0);

        let pw_json = r#"{"family":"piecewise","d":3,"cells":[{"corner":[0.0,0.0,0.0],"sides":[0.5,1.0,1.0]},{"corner":[0.5,0.0,0.0],"sides":[0.5,1.0,1.0]}],"R":2.0}"#;
        let parsed: SubspaceSpecFile = serde_json::from_str(pw_json).unwrap();
        let (spec, _) = parsed.to_spec().unwrap();
        assert_eq!(spec.dimension(), 2);

        let bad = r#"{"family":"fourier","d":3,"R":1.0}"#;
        let parsed: SubspaceSpecFile = serde_json::from_str(bad).unwrap();
        assert!(parsed.to_spec().is_err());
    }
}
