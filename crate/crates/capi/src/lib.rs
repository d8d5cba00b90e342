//! C ABI for the weakmul measurement core.
//!
//! Conventions, which the generated `include/weakmul.h` restates:
//!
//! * Grids and sampled functions cross the boundary as opaque handles
//!   (`WmGrid`, `WmFunction`). A handle returned through an out-pointer is
//!   owned by the caller and must be released with the matching `wm_*_free`;
//!   free functions accept NULL.
//! * Every fallible call returns a [`WmStatus`]. On anything other than
//!   [`WM_OK`] the out-pointers are left untouched and a message describing
//!   the failure is stored per thread; retrieve it with
//!   [`wm_last_error_message`].
//! * No call keeps references to caller memory: value buffers are copied on
//!   the way in and on the way out.
//! * Panics never unwind across the boundary; they are caught and surfaced
//!   as [`WM_INTERNAL_ERROR`].

use std::cell::RefCell;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};

use num_complex::Complex64;
use weakmul::{
    convolve_with, envelope_value, fit_power_law, forward_ft, gaussian_family, inverse_ft,
    lorentz_norm, reference_kernel, weak_lp_norm, ConvolveOptions, Error, SampledFunction,
    TailAction, UniformGrid,
};

/// Status code returned by every fallible `wm_` call.
pub type WmStatus = i32;

/// The call succeeded.
pub const WM_OK: WmStatus = 0;
/// A required pointer argument was NULL.
pub const WM_NULL_POINTER: WmStatus = 1;
/// An argument was rejected (bad dimension, exponent, length mismatch, ...).
pub const WM_INVALID_ARGUMENT: WmStatus = 2;
/// The computation failed numerically (tail mass, zero norm, non-finite result).
pub const WM_NUMERIC_ERROR: WmStatus = 3;
/// An internal invariant failed; the library caught a panic.
pub const WM_INTERNAL_ERROR: WmStatus = 4;

/// Opaque uniform grid handle (periodized cube, centered coordinates).
pub struct WmGrid(UniformGrid);

/// Opaque handle to complex samples on a [`WmGrid`].
pub struct WmFunction(SampledFunction);

thread_local! {
    static LAST_ERROR: RefCell<Vec<u8>> = const { RefCell::new(Vec::new()) };
}

fn set_last_error(message: &str) {
    LAST_ERROR.with(|slot| {
        let mut slot = slot.borrow_mut();
        slot.clear();
        slot.extend_from_slice(message.as_bytes());
    });
}

fn status_for(err: &Error) -> WmStatus {
    match err {
        Error::TailMass { .. } | Error::ZeroNorm | Error::NonFiniteResult(_) => WM_NUMERIC_ERROR,
        _ => WM_INVALID_ARGUMENT,
    }
}

/// Runs `body` with panics contained; records the error message on failure.
fn guarded(body: impl FnOnce() -> Result<(), Error>) -> WmStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => WM_OK,
        Ok(Err(err)) => {
            set_last_error(&err.to_string());
            status_for(&err)
        }
        Err(_) => {
            set_last_error("internal panic; state on this thread may be inconsistent");
            WM_INTERNAL_ERROR
        }
    }
}

macro_rules! require_nonnull {
    ($ptr:expr) => {
        if $ptr.is_null() {
            set_last_error(concat!("null pointer argument: ", stringify!($ptr)));
            return WM_NULL_POINTER;
        }
    };
}

/// Copies the most recent error message on this thread into `buffer` as a
/// NUL-terminated string, truncating to `capacity` bytes (terminator
/// included). Returns the full message length in bytes, excluding the
/// terminator, so calling with `buffer = NULL` or `capacity = 0` sizes a
/// buffer. The message is only meaningful after a `wm_` call on the same
/// thread returned something other than `WM_OK`.
///
/// # Safety
///
/// Unless `buffer` is NULL or `capacity` is 0, `buffer` must point to at
/// least `capacity` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn wm_last_error_message(buffer: *mut c_char, capacity: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let message = slot.borrow();
        if !buffer.is_null() && capacity > 0 {
            let copy = message.len().min(capacity - 1);
            std::ptr::copy_nonoverlapping(message.as_ptr(), buffer.cast::<u8>(), copy);
            *buffer.add(copy) = 0;
        }
        message.len()
    })
}

// ---------------------------------------------------------------------------
// Grids

/// Creates a uniform grid: a `dimension`-cube of side `extent` centered at
/// the origin with `points_per_axis` samples per axis. Dimensions 1 and 2
/// are supported; the point count must be even and at least 4.
///
/// # Safety
///
/// `out` must be a valid pointer to a `WmGrid*` slot.
#[no_mangle]
pub unsafe extern "C" fn wm_grid_new(
    dimension: usize,
    extent: f64,
    points_per_axis: usize,
    out: *mut *mut WmGrid,
) -> WmStatus {
    require_nonnull!(out);
    guarded(|| {
        let grid = UniformGrid::new(dimension, extent, points_per_axis)?;
        *out = Box::into_raw(Box::new(WmGrid(grid)));
        Ok(())
    })
}

/// Releases a grid handle. NULL is accepted and ignored.
///
/// # Safety
///
/// `grid` must be NULL or a pointer previously returned through a `wm_grid_*`
/// out-parameter and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wm_grid_free(grid: *mut WmGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// # Safety
///
/// `grid` must be a live grid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_grid_dimension(grid: *const WmGrid, out: *mut usize) -> WmStatus {
    require_nonnull!(grid);
    require_nonnull!(out);
    *out = (*grid).0.dimension();
    WM_OK
}

/// # Safety
///
/// `grid` must be a live grid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_grid_spacing(grid: *const WmGrid, out: *mut f64) -> WmStatus {
    require_nonnull!(grid);
    require_nonnull!(out);
    *out = (*grid).0.spacing();
    WM_OK
}

/// Total number of samples on the grid (`points_per_axis` to the power of
/// the dimension); this is the buffer length for value transfer.
///
/// # Safety
///
/// `grid` must be a live grid handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_grid_total_points(grid: *const WmGrid, out: *mut usize) -> WmStatus {
    require_nonnull!(grid);
    require_nonnull!(out);
    *out = (*grid).0.total_points();
    WM_OK
}

/// The grid on which Fourier transforms of functions on `grid` live:
/// spacing `1/L`, same point count per axis.
///
/// # Safety
///
/// `grid` must be a live grid handle; `out` must point to a `WmGrid*` slot.
#[no_mangle]
pub unsafe extern "C" fn wm_grid_dual(grid: *const WmGrid, out: *mut *mut WmGrid) -> WmStatus {
    require_nonnull!(grid);
    require_nonnull!(out);
    *out = Box::into_raw(Box::new(WmGrid((*grid).0.dual())));
    WM_OK
}

// ---------------------------------------------------------------------------
// Functions

/// Builds a sampled function from caller buffers of length
/// `wm_grid_total_points(grid)`, in row-major order over the axes.
/// `im` may be NULL for a real-valued function. The data is copied.
///
/// # Safety
///
/// `grid` must be a live grid handle, `re` (and `im` when non-NULL) must
/// point to `len` readable doubles, and `out` must point to a
/// `WmFunction*` slot.
#[no_mangle]
pub unsafe extern "C" fn wm_function_from_values(
    grid: *const WmGrid,
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut WmFunction,
) -> WmStatus {
    require_nonnull!(grid);
    require_nonnull!(re);
    require_nonnull!(out);
    guarded(|| {
        let g = (*grid).0.clone();
        if len != g.total_points() {
            return Err(Error::GridMismatch(format!(
                "value buffer holds {len} samples but the grid has {}",
                g.total_points()
            )));
        }
        let re = std::slice::from_raw_parts(re, len);
        let values: Vec<Complex64> = if im.is_null() {
            re.iter().map(|&x| Complex64::new(x, 0.0)).collect()
        } else {
            let im = std::slice::from_raw_parts(im, len);
            re.iter().zip(im).map(|(&x, &y)| Complex64::new(x, y)).collect()
        };
        *out = Box::into_raw(Box::new(WmFunction(SampledFunction::from_values(g, values)?)));
        Ok(())
    })
}

/// Releases a function handle. NULL is accepted and ignored.
///
/// # Safety
///
/// `f` must be NULL or a pointer previously returned through a
/// `wm_function`-producing out-parameter and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn wm_function_free(f: *mut WmFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Number of samples held by the function.
///
/// # Safety
///
/// `f` must be a live function handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_function_len(f: *const WmFunction, out: *mut usize) -> WmStatus {
    require_nonnull!(f);
    require_nonnull!(out);
    *out = (*f).0.values().len();
    WM_OK
}

/// Copies the samples out. `re` is required; `im` may be NULL to skip the
/// imaginary parts. `len` must equal `wm_function_len(f)`.
///
/// # Safety
///
/// `f` must be a live function handle; `re` (and `im` when non-NULL) must
/// point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn wm_function_values(
    f: *const WmFunction,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> WmStatus {
    require_nonnull!(f);
    require_nonnull!(re);
    let values = (*f).0.values();
    if len != values.len() {
        set_last_error("output buffer length does not match the sample count");
        return WM_INVALID_ARGUMENT;
    }
    for (k, v) in values.iter().enumerate() {
        *re.add(k) = v.re;
        if !im.is_null() {
            *im.add(k) = v.im;
        }
    }
    WM_OK
}

/// Samples the reference convolution kernel on `grid` (one-dimensional
/// grids only): the Gaussian-damped inverse-square cutoff profile whose
/// sphere functional and weak-type behavior the library measures.
///
/// # Safety
///
/// `grid` must be a live grid handle; `out` must point to a `WmFunction*`
/// slot.
#[no_mangle]
pub unsafe extern "C" fn wm_reference_kernel(
    grid: *const WmGrid,
    out: *mut *mut WmFunction,
) -> WmStatus {
    require_nonnull!(grid);
    require_nonnull!(out);
    guarded(|| {
        let kernel = reference_kernel(&(*grid).0)?;
        *out = Box::into_raw(Box::new(WmFunction(kernel)));
        Ok(())
    })
}

/// Samples the flattening Gaussian family member with parameter `n`
/// (`n^{-1/2} exp(-x^2/n)` in one dimension) on `grid`.
///
/// # Safety
///
/// `grid` must be a live grid handle; `out` must point to a `WmFunction*`
/// slot.
#[no_mangle]
pub unsafe extern "C" fn wm_gaussian_family(
    n: f64,
    grid: *const WmGrid,
    out: *mut *mut WmFunction,
) -> WmStatus {
    require_nonnull!(grid);
    require_nonnull!(out);
    guarded(|| {
        let descriptor = gaussian_family(n)?;
        let f = SampledFunction::sample(&descriptor, &(*grid).0)?;
        *out = Box::into_raw(Box::new(WmFunction(f)));
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Norms

/// Discrete `L^p` norm (Riemann sum over grid cells); `p = INFINITY` gives
/// the sup norm.
///
/// # Safety
///
/// `f` must be a live function handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_function_lp_norm(
    f: *const WmFunction,
    p: f64,
    out: *mut f64,
) -> WmStatus {
    require_nonnull!(f);
    require_nonnull!(out);
    guarded(|| {
        *out = (*f).0.lp_norm(p)?;
        Ok(())
    })
}

/// Lorentz `L^{p,r}` norm computed from the decreasing rearrangement;
/// `r = INFINITY` gives the weak norm.
///
/// # Safety
///
/// `f` must be a live function handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_function_lorentz_norm(
    f: *const WmFunction,
    p: f64,
    r: f64,
    out: *mut f64,
) -> WmStatus {
    require_nonnull!(f);
    require_nonnull!(out);
    guarded(|| {
        *out = lorentz_norm(&(*f).0, p, r)?;
        Ok(())
    })
}

/// Weak `L^p` quasinorm `sup_t t^{1/p} f*(t)`.
///
/// # Safety
///
/// `f` must be a live function handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_function_weak_lp_norm(
    f: *const WmFunction,
    p: f64,
    out: *mut f64,
) -> WmStatus {
    require_nonnull!(f);
    require_nonnull!(out);
    guarded(|| {
        *out = weak_lp_norm(&(*f).0, p)?;
        Ok(())
    })
}

/// Largest sample magnitude.
///
/// # Safety
///
/// `f` must be a live function handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_function_max_abs(f: *const WmFunction, out: *mut f64) -> WmStatus {
    require_nonnull!(f);
    require_nonnull!(out);
    *out = (*f).0.max_abs();
    WM_OK
}

// ---------------------------------------------------------------------------
// Transforms

/// Periodized convolution via the Fourier transform. Both functions must
/// live on the same grid. `tail_tolerance` bounds the fraction of either
/// factor's mass in the outer eighth of each axis (wrap-around guard);
/// exceeding it fails with `WM_NUMERIC_ERROR`. Pass `INFINITY` to disable
/// the guard; NaN and negative values are rejected.
///
/// # Safety
///
/// `f` and `g` must be live function handles; `out` must point to a
/// `WmFunction*` slot.
#[no_mangle]
pub unsafe extern "C" fn wm_convolve(
    f: *const WmFunction,
    g: *const WmFunction,
    tail_tolerance: f64,
    out: *mut *mut WmFunction,
) -> WmStatus {
    require_nonnull!(f);
    require_nonnull!(g);
    require_nonnull!(out);
    guarded(|| {
        let options = ConvolveOptions {
            tail_tolerance,
            on_tail_violation: TailAction::Error,
        };
        let conv = convolve_with(&(*f).0, &(*g).0, &options)?;
        *out = Box::into_raw(Box::new(WmFunction(conv)));
        Ok(())
    })
}

/// Forward Fourier transform; the result lives on the dual grid.
///
/// # Safety
///
/// `f` must be a live function handle; `out` must point to a `WmFunction*`
/// slot.
#[no_mangle]
pub unsafe extern "C" fn wm_forward_ft(
    f: *const WmFunction,
    out: *mut *mut WmFunction,
) -> WmStatus {
    require_nonnull!(f);
    require_nonnull!(out);
    guarded(|| {
        *out = Box::into_raw(Box::new(WmFunction(forward_ft(&(*f).0)?)));
        Ok(())
    })
}

/// Inverse Fourier transform; the result lives on the dual grid.
///
/// # Safety
///
/// `f` must be a live function handle; `out` must point to a `WmFunction*`
/// slot.
#[no_mangle]
pub unsafe extern "C" fn wm_inverse_ft(
    f: *const WmFunction,
    out: *mut *mut WmFunction,
) -> WmStatus {
    require_nonnull!(f);
    require_nonnull!(out);
    guarded(|| {
        *out = Box::into_raw(Box::new(WmFunction(inverse_ft(&(*f).0)?)));
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Scalar helpers

/// Closed-form envelope value for the flattening family at exponent
/// `r >= 1` and parameter `n > 0`.
///
/// # Safety
///
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_envelope_value(r: f64, n: f64, out: *mut f64) -> WmStatus {
    require_nonnull!(out);
    guarded(|| {
        *out = envelope_value(r, n)?;
        Ok(())
    })
}

/// Least-squares power-law fit `y ~ C x^s` in log-log coordinates over
/// `len >= 3` strictly positive points. Writes the exponent to `slope`,
/// `log C` to `intercept`, and the coefficient of determination to
/// `goodness`; any of the three may be NULL to skip it.
///
/// # Safety
///
/// `xs` and `ys` must point to `len` readable doubles; non-NULL outputs
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn wm_fit_power_law(
    xs: *const f64,
    ys: *const f64,
    len: usize,
    slope: *mut f64,
    intercept: *mut f64,
    goodness: *mut f64,
) -> WmStatus {
    require_nonnull!(xs);
    require_nonnull!(ys);
    guarded(|| {
        let xs = std::slice::from_raw_parts(xs, len);
        let ys = std::slice::from_raw_parts(ys, len);
        let points: Vec<(f64, f64)> = xs.iter().copied().zip(ys.iter().copied()).collect();
        let fit = fit_power_law(&points)?;
        if !slope.is_null() {
            *slope = fit.slope;
        }
        if !intercept.is_null() {
            *intercept = fit.intercept;
        }
        if !goodness.is_null() {
            *goodness = fit.goodness;
        }
        Ok(())
    })
}
