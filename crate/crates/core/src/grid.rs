//! Tensor grids on the horizontal layer, sampled functions on them, and a
//! small binary container for persisting grid functions (documented in
//! docs/grid-container.md).

use std::io::{Read as IoRead, Write as IoWrite};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Mode};

/// Default cap on total sample count per grid function.
pub const DEFAULT_POINT_BUDGET: usize = 1 << 22;

/// Uniform symmetric tensor grid: each of `d1` axes samples [-T, T] with
/// `points` nodes, spacing h = 2T/(points - 1).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1 {
    d1: usize,
    extent: f64,
    points: usize,
}

impl Grid1 {
    pub fn new(d1: usize, extent: f64, points: usize) -> Result<Self> {
        Self::with_budget(d1, extent, points, DEFAULT_POINT_BUDGET)
    }

    pub fn with_budget(d1: usize, extent: f64, points: usize, budget: usize) -> Result<Self> {
        if d1 == 0 {
            return Err(Error::structural("grid needs at least one axis"));
        }
        if extent <= 0.0 || !extent.is_finite() {
            return Err(Error::domain("grid extent must be positive and finite"));
        }
        if points < 8 {
            return Err(Error::domain(format!(
                "grid needs at least 8 points per axis, got {points}"
            )));
        }
        let total = (points as f64).powi(d1 as i32);
        if total > budget as f64 {
            return Err(Error::budget(format!(
                "grid of {points}^{d1} = {total:.3e} samples exceeds budget {budget}"
            )));
        }
        Ok(Grid1 { d1, extent, points })
    }

    pub fn d1(&self) -> usize {
        self.d1
    }

    pub fn extent(&self) -> f64 {
        self.extent
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.extent / (self.points as f64 - 1.0)
    }

    pub fn total_points(&self) -> usize {
        self.points.pow(self.d1 as u32)
    }

    /// Coordinate of node `j` on any axis.
    pub fn coord(&self, j: usize) -> f64 {
        -self.extent + self.spacing() * j as f64
    }

    /// All axis coordinates.
    pub fn axis(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.coord(j)).collect()
    }

    /// Row-major multi-index of a flat index.
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.d1];
        for ax in (0..self.d1).rev() {
            idx[ax] = flat % self.points;
            flat /= self.points;
        }
        idx
    }

    /// Flat index of a row-major multi-index.
    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Coordinates of the node at a flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        self.unravel(flat).iter().map(|&j| self.coord(j)).collect()
    }

    /// Trapezoidal quadrature weight of the node at a flat index
    /// (h per interior axis node, h/2 at axis endpoints, multiplied over
    /// axes).
    pub fn quad_weight(&self, flat: usize) -> f64 {
        let h = self.spacing();
        self.unravel(flat)
            .iter()
            .map(|&j| {
                if j == 0 || j + 1 == self.points {
                    h / 2.0
                } else {
                    h
                }
            })
            .product()
    }

    /// True if the multi-index lies within `band` cells of any boundary.
    pub fn in_boundary_band(&self, flat: usize, band: usize) -> bool {
        self.unravel(flat)
            .iter()
            .any(|&j| j < band || j + band >= self.points)
    }
}

/// A complex-valued function sampled on a Grid1, with accuracy notes
/// accumulated by the operators that produced it.
#[derive(Debug, Clone)]
pub struct GridFunction1 {
    pub grid: Grid1,
    pub values: Vec<Complex64>,
    pub warnings: Vec<String>,
}

impl GridFunction1 {
    pub fn zeros(grid: Grid1) -> Self {
        let n = grid.total_points();
        GridFunction1 {
            grid,
            values: vec![Complex64::new(0.0, 0.0); n],
            warnings: Vec::new(),
        }
    }

    /// Samples a pointwise function over the grid.
    pub fn sample(grid: Grid1, mode: Mode, f: impl Fn(&[f64]) -> Complex64 + Sync) -> Self {
        let total = grid.total_points();
        let values = exec::map_indexed(total, mode, |i| f(&grid.point(i)));
        GridFunction1 {
            grid,
            values,
            warnings: Vec::new(),
        }
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::structural("grid mismatch between functions"));
        }
        Ok(())
    }

    /// Trapezoidal L^2 inner product (f, g) = sum w f conj(g).
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let terms: Vec<Complex64> = (0..self.values.len())
            .map(|i| self.values[i] * other.values[i].conj() * self.grid.quad_weight(i))
            .collect();
        Ok(exec::pairwise_sum_c(&terms))
    }

    /// Trapezoidal L^2 norm.
    pub fn norm(&self) -> f64 {
        let terms: Vec<f64> = (0..self.values.len())
            .map(|i| self.values[i].norm_sqr() * self.grid.quad_weight(i))
            .collect();
        exec::pairwise_sum(&terms).max(0.0).sqrt()
    }

    /// L^2 norm restricted to the complement of a boundary band.
    pub fn norm_interior(&self, band: usize) -> f64 {
        let terms: Vec<f64> = (0..self.values.len())
            .map(|i| {
                if self.grid.in_boundary_band(i, band) {
                    0.0
                } else {
                    self.values[i].norm_sqr() * self.grid.quad_weight(i)
                }
            })
            .collect();
        exec::pairwise_sum(&terms).max(0.0).sqrt()
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.values {
            *v *= c;
        }
    }

    /// self - other, propagating the union of warnings.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        let mut warnings = self.warnings.clone();
        warnings.extend(other.warnings.iter().cloned());
        Ok(GridFunction1 {
            grid: self.grid.clone(),
            values,
            warnings,
        })
    }

    /// Writes the binary container + JSON sidecar (see
    /// docs/grid-container.md for the byte layout).
    pub fn save(&self, path: &Path, provenance: &str) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        file.write_all(b"HGF1")?;
        file.write_all(&(self.grid.d1 as u32).to_le_bytes())?;
        for _ in 0..self.grid.d1 {
            file.write_all(&(self.grid.points as u32).to_le_bytes())?;
        }
        for _ in 0..self.grid.d1 {
            file.write_all(&self.grid.extent.to_le_bytes())?;
        }
        // value-kind flag: 1 = complex128 (pairs of f64), 0 = complex64
        file.write_all(&[1u8])?;
        let mut payload = Vec::with_capacity(self.values.len() * 16);
        for v in &self.values {
            payload.extend_from_slice(&v.re.to_le_bytes());
            payload.extend_from_slice(&v.im.to_le_bytes());
        }
        file.write_all(&payload)?;
        let sidecar = Sidecar {
            kind: "grid-function".into(),
            format_version: 1,
            d1: self.grid.d1,
            points_per_axis: self.grid.points,
            extent: self.grid.extent,
            complex128: true,
            provenance: provenance.into(),
            warnings: self.warnings.clone(),
        };
        let sidecar_path = sidecar_path_for(path);
        std::fs::write(sidecar_path, serde_json::to_string_pretty(&sidecar)?)?;
        Ok(())
    }

    /// Reads a binary container written by `save`.
    pub fn load(path: &Path) -> Result<Self> {
        let mut file = std::fs::File::open(path)?;
        let mut magic = [0u8; 4];
        file.read_exact(&mut magic)?;
        if &magic != b"HGF1" {
            return Err(Error::Format(format!(
                "bad magic {:?} in {}",
                magic,
                path.display()
            )));
        }
        let mut buf4 = [0u8; 4];
        file.read_exact(&mut buf4)?;
        let d1 = u32::from_le_bytes(buf4) as usize;
        if d1 == 0 || d1 > 64 {
            return Err(Error::Format(format!("implausible axis count {d1}")));
        }
        let mut counts = Vec::with_capacity(d1);
        for _ in 0..d1 {
            file.read_exact(&mut buf4)?;
            counts.push(u32::from_le_bytes(buf4) as usize);
        }
        let mut buf8 = [0u8; 8];
        let mut extents = Vec::with_capacity(d1);
        for _ in 0..d1 {
            file.read_exact(&mut buf8)?;
            extents.push(f64::from_le_bytes(buf8));
        }
        if counts.windows(2).any(|w| w[0] != w[1]) || extents.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::Format(
                "container has non-uniform axes; this build supports uniform tensor grids".into(),
            ));
        }
        let mut flag = [0u8; 1];
        file.read_exact(&mut flag)?;
        let grid = Grid1::new(d1, extents[0], counts[0])?;
        let total = grid.total_points();
        let mut values = Vec::with_capacity(total);
        match flag[0] {
            1 => {
                let mut payload = vec![0u8; total * 16];
                file.read_exact(&mut payload)?;
                for chunk in payload.chunks_exact(16) {
                    let re = f64::from_le_bytes(chunk[..8].try_into().unwrap());
                    let im = f64::from_le_bytes(chunk[8..].try_into().unwrap());
                    values.push(Complex64::new(re, im));
                }
            }
            0 => {
                let mut payload = vec![0u8; total * 8];
                file.read_exact(&mut payload)?;
                for chunk in payload.chunks_exact(8) {
                    let re = f32::from_le_bytes(chunk[..4].try_into().unwrap());
                    let im = f32::from_le_bytes(chunk[4..].try_into().unwrap());
                    values.push(Complex64::new(re as f64, im as f64));
                }
            }
            other => {
                return Err(Error::Format(format!("unknown value-kind flag {other}")));
            }
        }
        let warnings = match std::fs::read_to_string(sidecar_path_for(path)) {
            Ok(text) => serde_json::from_str::<Sidecar>(&text)
                .map(|s| s.warnings)
                .unwrap_or_default(),
            Err(_) => Vec::new(),
        };
        Ok(GridFunction1 {
            grid,
            values,
            warnings,
        })
    }
}

pub(crate) fn sidecar_path_for(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    std::path::PathBuf::from(os)
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    kind: String,
    format_version: u32,
    d1: usize,
    points_per_axis: usize,
    extent: f64,
    complex128: bool,
    provenance: String,
    #[serde(default)]
    warnings: Vec<String>,
}

/// A periodic axis for the central variables: `points` samples of one
/// period, u_m = (m - points/2) * (period / points), so u = 0 is a sample
/// and the right endpoint is excluded.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicAxis {
    pub period: f64,
    pub points: usize,
}

impl PeriodicAxis {
    pub fn new(period: f64, points: usize) -> Result<Self> {
        if period <= 0.0 || !period.is_finite() {
            return Err(Error::domain("period must be positive"));
        }
        if points < 2 {
            return Err(Error::domain("periodic axis needs at least 2 points"));
        }
        Ok(PeriodicAxis { period, points })
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.points as f64
    }

    pub fn coord(&self, m: usize) -> f64 {
        (m as f64 - (self.points / 2) as f64) * self.spacing()
    }

    /// Dual (frequency) sample: (m - points/2) * 2 pi / period.
    pub fn dual_coord(&self, m: usize) -> f64 {
        (m as f64 - (self.points / 2) as f64) * 2.0 * std::f64::consts::PI / self.period
    }
}

/// Product grid on the full group: a symmetric box grid on the horizontal
/// layer tensored with a periodic box on the center (one periodic axis per
/// central dimension, all sharing the period and point count).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupGrid {
    spatial: Grid1,
    central: PeriodicAxis,
    d2: usize,
}

impl GroupGrid {
    pub fn new(spatial: Grid1, d2: usize, period: f64, central_points: usize) -> Result<Self> {
        if d2 == 0 {
            return Err(Error::structural("center dimension must be positive"));
        }
        let central = PeriodicAxis::new(period, central_points)?;
        let central_total = (central_points as f64).powi(d2 as i32);
        if central_total * spatial.total_points() as f64 > DEFAULT_POINT_BUDGET as f64 {
            return Err(Error::budget(format!(
                "group grid would hold {:.3e} points, over the {} budget",
                central_total * spatial.total_points() as f64,
                DEFAULT_POINT_BUDGET
            )));
        }
        Ok(GroupGrid {
            spatial,
            central,
            d2,
        })
    }

    pub fn spatial(&self) -> &Grid1 {
        &self.spatial
    }

    pub fn central(&self) -> &PeriodicAxis {
        &self.central
    }

    pub fn d2(&self) -> usize {
        self.d2
    }

    /// Points in the flattened central box.
    pub fn central_total(&self) -> usize {
        self.central.points.pow(self.d2 as u32)
    }

    pub fn total_points(&self) -> usize {
        self.spatial.total_points() * self.central_total()
    }

    /// Row-major index of the central box.
    pub fn central_unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0usize; self.d2];
        for ax in (0..self.d2).rev() {
            idx[ax] = flat % self.central.points;
            flat /= self.central.points;
        }
        idx
    }

    pub fn central_point(&self, flat: usize) -> Vec<f64> {
        self.central_unravel(flat)
            .iter()
            .map(|&m| self.central.coord(m))
            .collect()
    }

    /// Volume element of one central cell.
    pub fn central_cell(&self) -> f64 {
        self.central.spacing().powi(self.d2 as i32)
    }
}

/// Complex samples over a group grid; the flat layout is spatial-major:
/// `flat = x_flat * central_total + u_flat`.
#[derive(Debug, Clone)]
pub struct GroupGridFunction {
    pub grid: GroupGrid,
    pub values: Vec<Complex64>,
    pub warnings: Vec<String>,
}

impl GroupGridFunction {
    pub fn zeros(grid: GroupGrid) -> Self {
        let total = grid.total_points();
        GroupGridFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); total],
            warnings: Vec::new(),
        }
    }

    pub fn sample(
        grid: GroupGrid,
        mode: Mode,
        f: impl Fn(&[f64], &[f64]) -> Complex64 + Sync,
    ) -> Self {
        let ct = grid.central_total();
        let values = exec::map_indexed(grid.total_points(), mode, |flat| {
            let x = grid.spatial.point(flat / ct);
            let u = grid.central_point(flat % ct);
            f(&x, &u)
        });
        GroupGridFunction {
            grid,
            values,
            warnings: Vec::new(),
        }
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::structural("group grids do not match"));
        }
        Ok(())
    }

    /// L^2 inner product: trapezoid weights on the spatial box, uniform
    /// (exact periodic) weights on the central box.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same_grid(other)?;
        let ct = self.grid.central_total();
        let cell = self.grid.central_cell();
        let terms: Vec<Complex64> = (0..self.values.len())
            .map(|flat| {
                let w = self.grid.spatial.quad_weight(flat / ct) * cell;
                self.values[flat] * other.values[flat].conj() * w
            })
            .collect();
        Ok(exec::pairwise_sum_c(&terms))
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).map(|v| v.re.max(0.0).sqrt()).unwrap_or(0.0)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        let mut warnings = self.warnings.clone();
        warnings.extend(other.warnings.iter().cloned());
        Ok(GroupGridFunction {
            grid: self.grid.clone(),
            values,
            warnings,
        })
    }

    pub fn scale(&mut self, c: Complex64) {
        for v in &mut self.values {
            *v *= c;
        }
    }
}
