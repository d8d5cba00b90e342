//! Uniform centered grids and functions sampled on them.
//!
//! A grid of extent `L` with `N` points per axis covers `[-L/2, L/2)` with
//! spacing `Δ = L/N`; the point count is a power of two so transforms stay on
//! the fast FFT path and the centered-index sign trick below stays exact.

use num_complex::Complex64;

use crate::descriptor::FunctionDescriptor;
use crate::error::{Error, Result};
use crate::util::{compensated_sum, valid_point_count};

/// Centered uniform grid in dimension 1 or 2 (same extent and point count on
/// each axis).
#[derive(Clone, Debug, PartialEq)]
pub struct UniformGrid {
    dimension: usize,
    extent: f64,
    points_per_axis: usize,
}

impl UniformGrid {
    /// Build a grid spanning `[-extent/2, extent/2)` per axis.
    ///
    /// `points_per_axis` must be a power of two >= 4; `dimension` must be 1
    /// or 2.
    pub fn new(dimension: usize, extent: f64, points_per_axis: usize) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidDimension(dimension));
        }
        if !(extent.is_finite() && extent > 0.0) {
            return Err(Error::InvalidExtent(extent));
        }
        if !valid_point_count(points_per_axis) {
            return Err(Error::InvalidPointCount(points_per_axis));
        }
        Ok(Self {
            dimension,
            extent,
            points_per_axis,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Per-axis extent `L`.
    pub fn extent(&self) -> f64 {
        self.extent
    }

    /// Per-axis point count `N`.
    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Grid spacing `Δ = L/N`.
    pub fn spacing(&self) -> f64 {
        self.extent / self.points_per_axis as f64
    }

    /// Measure of one cell, `Δ^d`.
    pub fn cell_measure(&self) -> f64 {
        self.spacing().powi(self.dimension as i32)
    }

    /// Total number of grid points, `N^d`.
    pub fn total_points(&self) -> usize {
        self.points_per_axis.pow(self.dimension as u32)
    }

    /// Coordinate of axis index `j`: `-L/2 + j·Δ`.
    pub fn coordinate(&self, j: usize) -> f64 {
        -0.5 * self.extent + j as f64 * self.spacing()
    }

    /// The grid on which Fourier transforms of functions on this grid live:
    /// spacing `1/L`, same point count, extent `N/L`.
    pub fn dual(&self) -> UniformGrid {
        UniformGrid {
            dimension: self.dimension,
            extent: self.points_per_axis as f64 / self.extent,
            points_per_axis: self.points_per_axis,
        }
    }

    /// Axis indices of a flat (row-major) index. The second entry is 0 in
    /// dimension 1.
    pub fn axis_indices(&self, flat: usize) -> [usize; 2] {
        match self.dimension {
            1 => [flat, 0],
            _ => [flat / self.points_per_axis, flat % self.points_per_axis],
        }
    }

    /// Coordinates of a flat index; only the first `dimension` entries are
    /// meaningful.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let [j0, j1] = self.axis_indices(flat);
        match self.dimension {
            1 => [self.coordinate(j0), 0.0],
            _ => [self.coordinate(j0), self.coordinate(j1)],
        }
    }

    /// A grid with the same extent and `factor`-times the points per axis.
    pub fn refined(&self, factor: usize) -> Result<UniformGrid> {
        UniformGrid::new(
            self.dimension,
            self.extent,
            self.points_per_axis
                .checked_mul(factor)
                .ok_or(Error::InvalidPointCount(usize::MAX))?,
        )
    }
}

/// Complex-valued samples of a function on a [`UniformGrid`], row-major over
/// axes.
#[derive(Clone, Debug)]
pub struct SampledFunction {
    grid: UniformGrid,
    values: Vec<Complex64>,
}

impl SampledFunction {
    /// Wrap raw values; rejects length mismatches and non-finite entries.
    pub fn from_values(grid: UniformGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.total_points() {
            return Err(Error::ValueLength {
                expected: grid.total_points(),
                got: values.len(),
            });
        }
        if let Some(bad) = values
            .iter()
            .position(|v| !(v.re.is_finite() && v.im.is_finite()))
        {
            return Err(Error::NonFiniteValue(bad));
        }
        Ok(Self { grid, values })
    }

    /// Point-sample a closed-form descriptor on `grid` (no filtering; jump
    /// cells take the value at their node).
    pub fn sample(descriptor: &FunctionDescriptor, grid: &UniformGrid) -> Result<Self> {
        descriptor.validate(grid.dimension())?;
        let mut values = Vec::with_capacity(grid.total_points());
        for flat in 0..grid.total_points() {
            let p = grid.point(flat);
            let v = descriptor.eval(&p[..grid.dimension()])?;
            values.push(Complex64::new(v, 0.0));
        }
        Self::from_values(grid.clone(), values)
    }

    pub fn grid(&self) -> &UniformGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Riemann-sum L^p norm: `(Δ^d Σ |v|^p)^{1/p}`, or `max |v|` for
    /// `p = +inf`. Requires `p >= 1`.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        if p.is_infinite() {
            return Ok(self.values.iter().map(|v| v.norm()).fold(0.0, f64::max));
        }
        let mu = self.grid.cell_measure();
        let sum = compensated_sum(self.values.iter().map(|v| v.norm().powf(p)));
        Ok((mu * sum).powf(1.0 / p))
    }

    /// Pointwise product with another function on the same grid.
    pub fn pointwise_mul(&self, other: &SampledFunction) -> Result<SampledFunction> {
        check_same_grid(self, other)?;
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(a, b)| a * b)
            .collect();
        SampledFunction::from_values(self.grid.clone(), values)
    }

    /// Pointwise sum of `a·self + b·other` on the same grid.
    pub fn axpy(&self, a: Complex64, other: &SampledFunction, b: Complex64) -> Result<SampledFunction> {
        check_same_grid(self, other)?;
        let values = self
            .values
            .iter()
            .zip(other.values.iter())
            .map(|(x, y)| a * x + b * y)
            .collect();
        SampledFunction::from_values(self.grid.clone(), values)
    }

    /// Largest sample magnitude (`lp_norm` at `p = +inf`, without the Result).
    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Debug export, one row per sample: `index,x0[,x1],re,im`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        if self.grid.dimension() == 1 {
            writeln!(w, "index,x,re,im")?;
        } else {
            writeln!(w, "index,x0,x1,re,im")?;
        }
        for (i, v) in self.values.iter().enumerate() {
            let p = self.grid.point(i);
            if self.grid.dimension() == 1 {
                writeln!(w, "{},{:.16e},{:.16e},{:.16e}", i, p[0], v.re, v.im)?;
            } else {
                writeln!(
                    w,
                    "{},{:.16e},{:.16e},{:.16e},{:.16e}",
                    i, p[0], p[1], v.re, v.im
                )?;
            }
        }
        Ok(())
    }
}

/// Error unless both functions live on the identical grid.
pub fn check_same_grid(a: &SampledFunction, b: &SampledFunction) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch(format!(
            "dim {} extent {} points {} vs dim {} extent {} points {}",
            a.grid.dimension,
            a.grid.extent,
            a.grid.points_per_axis,
            b.grid.dimension,
            b.grid.extent,
            b.grid.points_per_axis
        )));
    }
    Ok(())
}
