//! CSV grid-function format.
//!
//! ```text
//! # half_width=1.0 n_cells=4
//! cell_index,value
//! 0,1.0
//! ...
//! ```
//!
//! When the comment line is absent the grid is read from a JSON sidecar
//! `{"half_width": <float>, "n_cells": <int>}` at the same path with a
//! `.json` extension.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Grid, GridFunction};
use crate::error::{Error, Result};
use crate::format_float;

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    half_width: f64,
    n_cells: usize,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn write_grid_function(f: &GridFunction, path: impl AsRef<Path>) -> Result<()> {
    let mut out = fs::File::create(path.as_ref())?;
    out.write_all(render(f).as_bytes())?;
    Ok(())
}

pub fn write_grid_sidecar(grid: &Grid, path: impl AsRef<Path>) -> Result<()> {
    let sidecar = Sidecar {
        half_width: grid.half_width(),
        n_cells: grid.n_cells(),
    };
    fs::write(
        sidecar_path(path.as_ref()),
        serde_json::to_string(&sidecar)?,
    )?;
    Ok(())
}

fn render(f: &GridFunction) -> String {
    let grid = f.grid();
    let mut s = format!(
        "# half_width={} n_cells={}\ncell_index,value\n",
        format_float(grid.half_width()),
        grid.n_cells()
    );
    for (i, v) in f.values().iter().enumerate() {
        s.push_str(&format!("{},{}\n", i, format_float(*v)));
    }
    s
}

pub fn read_grid_function(path: impl AsRef<Path>) -> Result<GridFunction> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let (grid, body_start) = match parse_comment(&text)? {
        Some(g) => g,
        None => {
            let sc = sidecar_path(path);
            let raw = fs::read_to_string(&sc).map_err(|e| {
                Error::Io(format!(
                    "{}: no grid comment line and no sidecar {} ({e})",
                    path.display(),
                    sc.display()
                ))
            })?;
            let meta: Sidecar = serde_json::from_str(&raw)?;
            (Grid::new(meta.half_width, meta.n_cells)?, 0)
        }
    };
    parse_rows(&text, body_start, grid)
}

/// Returns the grid and the byte offset just past the comment line.
fn parse_comment(text: &str) -> Result<Option<(Grid, usize)>> {
    let first = match text.lines().next() {
        Some(l) if l.trim_start().starts_with('#') => l,
        _ => return Ok(None),
    };
    let mut half_width = None;
    let mut n_cells = None;
    for token in first
        .trim_start()
        .trim_start_matches('#')
        .split_whitespace()
    {
        let (key, value) = token.split_once('=').ok_or_else(|| Error::Malformed {
            line: 1,
            reason: format!("expected key=value, got {token:?}"),
        })?;
        let bad = |_| Error::Malformed {
            line: 1,
            reason: format!("cannot parse {key}={value}"),
        };
        match key {
            "half_width" => half_width = Some(value.parse::<f64>().map_err(bad)?),
            "n_cells" => {
                n_cells = Some(value.parse::<usize>().map_err(|_| Error::Malformed {
                    line: 1,
                    reason: format!("cannot parse {key}={value}"),
                })?)
            }
            _ => {
                return Err(Error::Malformed {
                    line: 1,
                    reason: format!("unknown grid key {key:?}"),
                })
            }
        }
    }
    match (half_width, n_cells) {
        (Some(l), Some(n)) => {
            let offset = text.find('\n').map(|i| i + 1).unwrap_or(text.len());
            Ok(Some((Grid::new(l, n)?, offset)))
        }
        _ => Err(Error::Malformed {
            line: 1,
            reason: "grid comment needs half_width and n_cells".into(),
        }),
    }
}

fn parse_rows(text: &str, offset: usize, grid: Grid) -> Result<GridFunction> {
    let line_base = if offset == 0 { 1 } else { 2 };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(&text.as_bytes()[offset..]);

    let headers = reader.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "cell_index" || &headers[1] != "value" {
        return Err(Error::Malformed {
            line: line_base,
            reason: format!("expected header cell_index,value, got {headers:?}"),
        });
    }

    let mut values = Vec::with_capacity(grid.n_cells());
    for (k, record) in reader.records().enumerate() {
        let line = line_base + 1 + k;
        let record = record.map_err(|e| Error::Malformed {
            line,
            reason: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::Malformed {
                line,
                reason: format!("expected 2 fields, got {}", record.len()),
            });
        }
        let index: usize = record[0].parse().map_err(|_| Error::Malformed {
            line,
            reason: format!("bad cell index {:?}", &record[0]),
        })?;
        if index != k {
            return Err(Error::Malformed {
                line,
                reason: format!("index gap: expected cell {k}, found {index}"),
            });
        }
        let value: f64 = record[1].parse().map_err(|_| Error::Malformed {
            line,
            reason: format!("bad value {:?}", &record[1]),
        })?;
        if !value.is_finite() {
            return Err(Error::NonFinite { cell: index, value });
        }
        values.push(value);
    }
    if values.len() != grid.n_cells() {
        return Err(Error::CountMismatch {
            expected: grid.n_cells(),
            found: values.len(),
        });
    }
    GridFunction::new(grid, values)
}
