//! Field and spectrum dumps: a JSON header beside a CSV of node coordinates
//! and complex values. Values are written in shortest round-trip form, so a
//! dump reads back bit-for-bit.

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::{Grid, WeinsteinParams};
use crate::transform::Spectrum;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const DUMP_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DumpKind {
    Field,
    Spectrum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpHeader {
    pub schema: u32,
    pub kind: DumpKind,
    pub d: usize,
    pub alpha: f64,
    pub n_lat: usize,
    pub lateral_extent: f64,
    pub n_rad: usize,
    pub radial_extent: f64,
    /// CSV file name, relative to the header
    pub values: String,
}

impl DumpHeader {
    fn new(kind: DumpKind, grid: &Grid, values: String) -> Self {
        DumpHeader {
            schema: DUMP_SCHEMA,
            kind,
            d: grid.d(),
            alpha: grid.params.alpha(),
            n_lat: grid.n_lat,
            lateral_extent: grid.lateral_extent,
            n_rad: grid.n_rad,
            radial_extent: grid.radial_extent,
            values,
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(WeinsteinParams::new(self.d, self.alpha)?, self.n_lat, self.lateral_extent, self.n_rad, self.radial_extent)
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn coords(kind: DumpKind, grid: &Grid, i: usize) -> Vec<f64> {
    match kind {
        DumpKind::Field => grid.node(i),
        DumpKind::Spectrum => grid.freq(i),
    }
}

/// Writes `<stem>.json` and `<stem>.csv` into `dir`; returns the header path.
pub fn write_dump(dir: &Path, stem: &str, kind: DumpKind, grid: &Grid, values: &[C64]) -> Result<PathBuf> {
    if values.len() != grid.len() {
        return Err(Error::Dimension(format!("expected {} values, got {}", grid.len(), values.len())));
    }
    std::fs::create_dir_all(dir)?;
    let csv_name = format!("{stem}.csv");
    let mut w = csv::Writer::from_path(dir.join(&csv_name)).map_err(csv_err)?;
    let d = grid.d();
    let prefix = if kind == DumpKind::Field { "x" } else { "lambda" };
    let mut head: Vec<String> = (1..=d + 1).map(|k| format!("{prefix}{k}")).collect();
    head.extend(["re".into(), "im".into()]);
    w.write_record(&head).map_err(csv_err)?;
    for (i, v) in values.iter().enumerate() {
        let mut rec: Vec<String> = coords(kind, grid, i).iter().map(|c| c.to_string()).collect();
        rec.push(v.re.to_string());
        rec.push(v.im.to_string());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    let header = DumpHeader::new(kind, grid, csv_name);
    let path = dir.join(format!("{stem}.json"));
    let text = serde_json::to_string_pretty(&header).map_err(|e| Error::Io(e.to_string()))?;
    std::fs::write(&path, text + "\n")?;
    Ok(path)
}

/// Reads a dump back, checking that the stored coordinates are the grid's.
pub fn read_dump(header_path: &Path) -> Result<(DumpHeader, Grid, Vec<C64>)> {
    let text = std::fs::read_to_string(header_path)?;
    let header: DumpHeader = serde_json::from_str(&text).map_err(|e| Error::Config(format!("dump header: {e}")))?;
    if header.schema != DUMP_SCHEMA {
        return Err(Error::Config(format!("unsupported dump schema {}", header.schema)));
    }
    let grid = header.grid()?;
    let dir = header_path.parent().unwrap_or(Path::new("."));
    let mut r = csv::Reader::from_path(dir.join(&header.values)).map_err(csv_err)?;
    let d = grid.d();
    let mut values = Vec::with_capacity(grid.len());
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if i >= grid.len() || rec.len() != d + 3 {
            return Err(Error::Dimension(format!("dump row {i} does not fit the header's grid")));
        }
        let num = |k: usize| -> Result<f64> {
            rec[k].trim().parse().map_err(|_| Error::Config(format!("row {i}: bad number {:?}", &rec[k])))
        };
        let expect = coords(header.kind, &grid, i);
        for (k, &c) in expect.iter().enumerate() {
            if (num(k)? - c).abs() > 1e-12 * c.abs().max(1.0) {
                return Err(Error::Dimension(format!("row {i}: coordinates differ from the grid")));
            }
        }
        values.push(C64::new(num(d + 1)?, num(d + 2)?));
    }
    if values.len() != grid.len() {
        return Err(Error::Dimension(format!("dump has {} rows, grid has {}", values.len(), grid.len())));
    }
    Ok((header, grid, values))
}

pub fn write_field(dir: &Path, stem: &str, f: &Field, grid: &Grid) -> Result<PathBuf> {
    write_dump(dir, stem, DumpKind::Field, grid, &f.values_on(grid)?)
}

pub fn read_field(header_path: &Path) -> Result<(Field, Grid)> {
    let (h, grid, values) = read_dump(header_path)?;
    if h.kind != DumpKind::Field {
        return Err(Error::Config("dump holds a spectrum, not a field".into()));
    }
    Ok((Field::from_values(&grid, values)?, grid))
}

pub fn write_spectrum(dir: &Path, stem: &str, s: &Spectrum) -> Result<PathBuf> {
    write_dump(dir, stem, DumpKind::Spectrum, &s.grid, &s.values)
}

pub fn read_spectrum(header_path: &Path) -> Result<Spectrum> {
    let (h, grid, values) = read_dump(header_path)?;
    if h.kind != DumpKind::Spectrum {
        return Err(Error::Config("dump holds a field, not a spectrum".into()));
    }
    Spectrum::new(&grid, values)
}
