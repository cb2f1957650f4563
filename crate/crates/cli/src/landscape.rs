//! Energy landscapes on the pentane grid and plain signal files.

use std::f64::consts::PI;
use std::path::Path;

use bundlegsp::{GraphBundle, Signal};

use crate::error::{CliError, Result};
use crate::output::fmt_f64;

pub const PENTANE_BASE_LENGTH: usize = 15;
pub const PENTANE_FIBER_LENGTH: usize = 6;

/// Energies indexed by (base position, fiber position).
#[derive(Debug, Clone, PartialEq)]
pub struct LandscapeGrid {
    base_length: usize,
    fiber_length: usize,
    values: Vec<f64>,
}

impl LandscapeGrid {
    pub fn new(base_length: usize, fiber_length: usize, values: Vec<f64>) -> Option<Self> {
        (values.len() == base_length * fiber_length && values.iter().all(|v| v.is_finite())).then_some(Self {
            base_length,
            fiber_length,
            values,
        })
    }

    pub fn from_fn(base_length: usize, fiber_length: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let values = (0..base_length)
            .flat_map(|b| (0..fiber_length).map(move |i| (b, i)))
            .map(|(b, i)| f(b, i))
            .collect();
        Self::new(base_length, fiber_length, values).expect("finite landscape")
    }

    pub fn base_length(&self) -> usize {
        self.base_length
    }

    pub fn fiber_length(&self) -> usize {
        self.fiber_length
    }

    pub fn get(&self, base: usize, fiber: usize) -> f64 {
        self.values[base * self.fiber_length + fiber]
    }

    /// Places cell `(b, i)` on the total vertex over base vertex `b` at fiber
    /// position `i`.
    pub fn to_signal(&self, bundle: &GraphBundle) -> bundlegsp::Result<Signal> {
        let (nb, nf) = (bundle.base().vertex_count(), bundle.fiber().vertex_count());
        if (nb, nf) != (self.base_length, self.fiber_length) {
            return Err(bundlegsp::Error::DimensionMismatch {
                expected: nb * nf,
                actual: self.values.len(),
            });
        }
        let mut values = vec![0.0; nb * nf];
        for b in 0..nb {
            for i in 0..nf {
                values[bundle.vertex(b, i)] = self.get(b, i);
            }
        }
        Signal::new(values)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("base_idx,fiber_idx,energy\n");
        for b in 0..self.base_length {
            for i in 0..self.fiber_length {
                out.push_str(&format!("{b},{i},{}\n", fmt_f64(self.get(b, i))));
            }
        }
        out
    }

    /// Reads `base_idx,fiber_idx,energy` rows. Every cell of the
    /// `base_length × fiber_length` grid must appear exactly once.
    pub fn read_csv(path: &Path, base_length: usize, fiber_length: usize) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| CliError::Csv {
                path: path.to_path_buf(),
                source: e,
            })?;
        let headers = reader.headers().map_err(|e| CliError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        if headers != vec!["base_idx", "fiber_idx", "energy"] {
            return Err(CliError::data(
                path,
                format!("expected header base_idx,fiber_idx,energy, got {}", headers.iter().collect::<Vec<_>>().join(",")),
            ));
        }
        let mut cells: Vec<Option<f64>> = vec![None; base_length * fiber_length];
        for row in reader.deserialize::<(usize, usize, f64)>() {
            let (b, i, e) = row.map_err(|e| CliError::Csv {
                path: path.to_path_buf(),
                source: e,
            })?;
            if b >= base_length || i >= fiber_length {
                return Err(CliError::data(
                    path,
                    format!("cell ({b}, {i}) outside the {base_length}x{fiber_length} grid"),
                ));
            }
            if !e.is_finite() {
                return Err(CliError::data(path, format!("non-finite energy at ({b}, {i})")));
            }
            if cells[b * fiber_length + i].replace(e).is_some() {
                return Err(CliError::data(path, format!("cell ({b}, {i}) listed twice")));
            }
        }
        let values = cells
            .into_iter()
            .enumerate()
            .map(|(k, c)| {
                c.ok_or_else(|| {
                    CliError::data(path, format!("missing cell ({}, {})", k / fiber_length, k % fiber_length))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(base_length, fiber_length, values).expect("validated"))
    }
}

fn well(t1: f64, t2: f64, c1: f64, c2: f64) -> f64 {
    (2.0 * ((t1 - c1).cos() + (t2 - c2).cos() - 2.0)).exp()
}

/// Torsion energy with a deep well at trans-trans `(π, π)` and a shallower
/// pair at trans-gauche `(π, π/3)`, `(π/3, π)`; symmetric under swapping
/// the angles.
pub fn two_well_energy(t1: f64, t2: f64) -> f64 {
    3.0 - 3.0 * well(t1, t2, PI, PI) - 2.0 * (well(t1, t2, PI, PI / 3.0) + well(t1, t2, PI / 3.0, PI))
}

/// Torsion angles sampled at grid cell `(b, i)` of the Möbius quotient.
///
/// With `s = θ₁ + θ₂` along the base and `d = θ₁ − θ₂ ∈ [0, 2π]` along the
/// fiber, going once around `s` returns with `d ↦ 2π − d`, which is the
/// fiber reversal across the closing base edge.
pub fn quotient_angles(b: usize, i: usize) -> (f64, f64) {
    let s = 2.0 * PI * b as f64 / PENTANE_BASE_LENGTH as f64;
    let d = 2.0 * PI * i as f64 / (PENTANE_FIBER_LENGTH - 1) as f64;
    ((s + d) / 2.0, (s - d) / 2.0)
}

/// The synthetic landscape shipped as `fixtures/pentane_landscape.csv`.
pub fn synthetic_pentane_landscape() -> LandscapeGrid {
    LandscapeGrid::from_fn(PENTANE_BASE_LENGTH, PENTANE_FIBER_LENGTH, |b, i| {
        let (t1, t2) = quotient_angles(b, i);
        two_well_energy(t1, t2)
    })
}

pub fn signal_to_csv(x: &Signal) -> String {
    let mut out = String::from("vertex_index,value\n");
    for (v, value) in x.values().iter().enumerate() {
        out.push_str(&format!("{v},{}\n", fmt_f64(*value)));
    }
    out
}

/// Reads `vertex_index,value` rows covering `0..n` exactly once.
pub fn read_signal_csv(path: &Path, n: usize) -> Result<Signal> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
    let mut values: Vec<Option<f64>> = vec![None; n];
    for row in reader.deserialize::<(usize, f64)>() {
        let (v, x) = row.map_err(|e| CliError::Csv {
            path: path.to_path_buf(),
            source: e,
        })?;
        if v >= n {
            return Err(CliError::data(path, format!("vertex {v} out of range for {n} vertices")));
        }
        if values[v].replace(x).is_some() {
            return Err(CliError::data(path, format!("vertex {v} listed twice")));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(v, x)| x.ok_or_else(|| CliError::data(path, format!("missing vertex {v}"))))
        .collect::<Result<Vec<_>>>()?;
    Signal::new(values).map_err(|e| CliError::data(path, e.to_string()))
}
