//! Fourier transforms and convolution on centered grids.
//!
//! Convention: forward transform `f̂(ξ) = ∫ f(x) e^{-2πi x·ξ} dx`, inverse
//! `ǧ(x) = ∫ g(ξ) e^{+2πi ξ·x} dξ`. On a centered grid with `N` points and
//! spacing `Δ` the Riemann sum of either integral reduces to a standard FFT
//! after multiplying samples by `(-1)^j` on the way in and `(-1)^k` on the way
//! out: with `x_j = (j - N/2)Δ` and `ξ_k = (k - N/2)/L`,
//!
//! ```text
//!   x_j·ξ_k = (j - N/2)(k - N/2)/N,
//!   e^{∓2πi x_j ξ_k} = e^{∓2πi jk/N} · (-1)^j · (-1)^k · e^{∓iπN/2},
//! ```
//!
//! and the residual phase is exactly 1 because `N` is a power of two >= 4, so
//! `N/2` is even. Output lands on the dual grid (`spacing 1/L`, same `N`).

use std::cell::RefCell;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::grid::{check_same_grid, SampledFunction};
use crate::util::compensated_sum;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    Forward,
    Inverse,
}

/// Apply the unnormalized FFT along every axis of the row-major buffer.
fn fft_all_axes(values: &mut [Complex64], dimension: usize, n: usize, dir: Direction) {
    PLANNER.with(|planner| {
        let fft = {
            let mut p = planner.borrow_mut();
            match dir {
                Direction::Forward => p.plan_fft_forward(n),
                Direction::Inverse => p.plan_fft_inverse(n),
            }
        };
        match dimension {
            1 => fft.process(values),
            _ => {
                // Axis 1 is contiguous: transform each row in place.
                fft.process(values);
                // Axis 0: transpose, transform rows, transpose back.
                transpose_square(values, n);
                fft.process(values);
                transpose_square(values, n);
            }
        }
    });
}

fn transpose_square(values: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            values.swap(i * n + j, j * n + i);
        }
    }
}

/// `(-1)^{j0 + j1}` over flat indices, applied in place.
fn apply_alternating_signs(values: &mut [Complex64], dimension: usize, n: usize) {
    match dimension {
        1 => {
            for (j, v) in values.iter_mut().enumerate() {
                if j % 2 == 1 {
                    *v = -*v;
                }
            }
        }
        _ => {
            for (flat, v) in values.iter_mut().enumerate() {
                if (flat / n + flat % n) % 2 == 1 {
                    *v = -*v;
                }
            }
        }
    }
}

fn transform(f: &SampledFunction, dir: Direction) -> Result<SampledFunction> {
    let grid = f.grid().clone();
    let n = grid.points_per_axis();
    let d = grid.dimension();
    // Riemann-sum scale: the input grid's cell measure for either direction.
    let scale = grid.cell_measure();

    let mut values = f.values().to_vec();
    apply_alternating_signs(&mut values, d, n);
    fft_all_axes(&mut values, d, n, dir);
    apply_alternating_signs(&mut values, d, n);
    for v in values.iter_mut() {
        *v *= scale;
    }
    if values
        .iter()
        .any(|v| !(v.re.is_finite() && v.im.is_finite()))
    {
        return Err(Error::NonFiniteResult(match dir {
            Direction::Forward => "forward transform",
            Direction::Inverse => "inverse transform",
        }));
    }
    SampledFunction::from_values(grid.dual(), values)
}

/// Forward Fourier transform; the result lives on the dual grid.
pub fn forward_ft(f: &SampledFunction) -> Result<SampledFunction> {
    transform(f, Direction::Forward)
}

/// Inverse Fourier transform; the result lives on the dual grid.
pub fn inverse_ft(f: &SampledFunction) -> Result<SampledFunction> {
    transform(f, Direction::Inverse)
}

/// What to do when a convolution operand has too much mass near the grid
/// boundary (the FFT convolution is circular, so boundary mass wraps around).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TailAction {
    /// Fail with [`Error::TailMass`].
    Error,
    /// Print a warning to stderr and continue.
    Warn,
    /// Continue silently.
    Allow,
}

/// Tolerance policy for [`convolve_with`].
#[derive(Clone, Copy, Debug)]
pub struct ConvolveOptions {
    /// Maximum fraction of L^1 mass allowed in the outer eighth of each axis.
    pub tail_tolerance: f64,
    pub on_tail_violation: TailAction,
}

impl Default for ConvolveOptions {
    fn default() -> Self {
        ConvolveOptions {
            tail_tolerance: 1e-9,
            on_tail_violation: TailAction::Error,
        }
    }
}

/// Fraction of a function's L^1 mass lying within `L/16` of the grid
/// boundary on any axis (0 when the function vanishes identically).
pub fn tail_fraction(f: &SampledFunction) -> f64 {
    let grid = f.grid();
    let half = 0.5 * grid.extent();
    let band = grid.extent() / 16.0;
    let cutoff = half - band;
    let d = grid.dimension();
    let total = compensated_sum(f.values().iter().map(|v| v.norm()));
    if total == 0.0 {
        return 0.0;
    }
    let outer = compensated_sum(f.values().iter().enumerate().map(|(flat, v)| {
        let p = grid.point(flat);
        let near_edge = p[..d].iter().any(|x| x.abs() >= cutoff);
        if near_edge {
            v.norm()
        } else {
            0.0
        }
    }));
    outer / total
}

/// Convolution `(f * g)(x) = ∫ f(y) g(x - y) dy` via the spectral route with
/// the default (strict) wrap-around policy.
pub fn convolve(f: &SampledFunction, g: &SampledFunction) -> Result<SampledFunction> {
    convolve_with(f, g, &ConvolveOptions::default())
}

/// Convolution with an explicit wrap-around policy.
///
/// Both operands must live on the same grid and be effectively supported well
/// inside it; the circular wrap-around error is controlled by the tail check.
pub fn convolve_with(
    f: &SampledFunction,
    g: &SampledFunction,
    options: &ConvolveOptions,
) -> Result<SampledFunction> {
    check_same_grid(f, g)?;
    // +inf disables the check entirely; NaN and negatives are mistakes.
    if options.tail_tolerance.is_nan() || options.tail_tolerance < 0.0 {
        return Err(Error::InvalidThreshold(options.tail_tolerance));
    }
    for operand in [f, g] {
        let fraction = tail_fraction(operand);
        if fraction > options.tail_tolerance {
            match options.on_tail_violation {
                TailAction::Error => {
                    return Err(Error::TailMass {
                        fraction,
                        tolerance: options.tail_tolerance,
                    })
                }
                TailAction::Warn => {
                    eprintln!(
                        "warning: convolution operand has boundary mass fraction {fraction:.3e} \
                         (tolerance {:.3e}); wrap-around error may be visible",
                        options.tail_tolerance
                    );
                }
                TailAction::Allow => {}
            }
        }
    }
    let fh = forward_ft(f)?;
    let gh = forward_ft(g)?;
    let product = fh.pointwise_mul(&gh)?;
    inverse_ft(&product)
}
