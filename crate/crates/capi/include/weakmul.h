#ifndef WEAKMUL_H
#define WEAKMUL_H

/* Generated by cbindgen from weakmul-capi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Opaque handle to complex samples on a [`WmGrid`].
typedef struct WmFunction WmFunction;

// Opaque uniform grid handle (periodized cube, centered coordinates).
typedef struct WmGrid WmGrid;

// Status code returned by every fallible `wm_` call.
typedef int32_t WmStatus;

// The call succeeded.
#define WM_OK 0

// A required pointer argument was NULL.
#define WM_NULL_POINTER 1

// An argument was rejected (bad dimension, exponent, length mismatch, ...).
#define WM_INVALID_ARGUMENT 2

// The computation failed numerically (tail mass, zero norm, non-finite result).
#define WM_NUMERIC_ERROR 3

// An internal invariant failed; the library caught a panic.
#define WM_INTERNAL_ERROR 4

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the most recent error message on this thread into `buffer` as a
// NUL-terminated string, truncating to `capacity` bytes (terminator
// included). Returns the full message length in bytes, excluding the
// terminator, so calling with `buffer = NULL` or `capacity = 0` sizes a
// buffer. The message is only meaningful after a `wm_` call on the same
// thread returned something other than `WM_OK`.
//
// # Safety
//
// Unless `buffer` is NULL or `capacity` is 0, `buffer` must point to at
// least `capacity` writable bytes.
size_t wm_last_error_message(char *buffer, size_t capacity);

// Creates a uniform grid: a `dimension`-cube of side `extent` centered at
// the origin with `points_per_axis` samples per axis. Dimensions 1 and 2
// are supported; the point count must be even and at least 4.
//
// # Safety
//
// `out` must be a valid pointer to a `WmGrid*` slot.
WmStatus wm_grid_new(size_t dimension, double extent, size_t points_per_axis, WmGrid **out);

// Releases a grid handle. NULL is accepted and ignored.
//
// # Safety
//
// `grid` must be NULL or a pointer previously returned through a `wm_grid_*`
// out-parameter and not yet freed.
void wm_grid_free(WmGrid *grid);

// # Safety
//
// `grid` must be a live grid handle; `out` must be writable.
WmStatus wm_grid_dimension(const WmGrid *grid, size_t *out);

// # Safety
//
// `grid` must be a live grid handle; `out` must be writable.
WmStatus wm_grid_spacing(const WmGrid *grid, double *out);

// Total number of samples on the grid (`points_per_axis` to the power of
// the dimension); this is the buffer length for value transfer.
//
// # Safety
//
// `grid` must be a live grid handle; `out` must be writable.
WmStatus wm_grid_total_points(const WmGrid *grid, size_t *out);

// The grid on which Fourier transforms of functions on `grid` live:
// spacing `1/L`, same point count per axis.
//
// # Safety
//
// `grid` must be a live grid handle; `out` must point to a `WmGrid*` slot.
WmStatus wm_grid_dual(const WmGrid *grid, WmGrid **out);

// Builds a sampled function from caller buffers of length
// `wm_grid_total_points(grid)`, in row-major order over the axes.
// `im` may be NULL for a real-valued function. The data is copied.
//
// # Safety
//
// `grid` must be a live grid handle, `re` (and `im` when non-NULL) must
// point to `len` readable doubles, and `out` must point to a
// `WmFunction*` slot.
WmStatus wm_function_from_values(const WmGrid *grid,
                                 const double *re,
                                 const double *im,
                                 size_t len,
                                 WmFunction **out);

// Releases a function handle. NULL is accepted and ignored.
//
// # Safety
//
// `f` must be NULL or a pointer previously returned through a
// `wm_function`-producing out-parameter and not yet freed.
void wm_function_free(WmFunction *f);

// Number of samples held by the function.
//
// # Safety
//
// `f` must be a live function handle; `out` must be writable.
WmStatus wm_function_len(const WmFunction *f, size_t *out);

// Copies the samples out. `re` is required; `im` may be NULL to skip the
// imaginary parts. `len` must equal `wm_function_len(f)`.
//
// # Safety
//
// `f` must be a live function handle; `re` (and `im` when non-NULL) must
// point to `len` writable doubles.
WmStatus wm_function_values(const WmFunction *f, double *re, double *im, size_t len);

// Samples the reference convolution kernel on `grid` (one-dimensional
// grids only): the Gaussian-damped inverse-square cutoff profile whose
// sphere functional and weak-type behavior the library measures.
//
// # Safety
//
// `grid` must be a live grid handle; `out` must point to a `WmFunction*`
// slot.
WmStatus wm_reference_kernel(const WmGrid *grid, WmFunction **out);

// Samples the flattening Gaussian family member with parameter `n`
// (`n^{-1/2} exp(-x^2/n)` in one dimension) on `grid`.
//
// # Safety
//
// `grid` must be a live grid handle; `out` must point to a `WmFunction*`
// slot.
WmStatus wm_gaussian_family(double n, const WmGrid *grid, WmFunction **out);

// Discrete `L^p` norm (Riemann sum over grid cells); `p = INFINITY` gives
// the sup norm.
//
// # Safety
//
// `f` must be a live function handle; `out` must be writable.
WmStatus wm_function_lp_norm(const WmFunction *f, double p, double *out);

// Lorentz `L^{p,r}` norm computed from the decreasing rearrangement;
// `r = INFINITY` gives the weak norm.
//
// # Safety
//
// `f` must be a live function handle; `out` must be writable.
WmStatus wm_function_lorentz_norm(const WmFunction *f, double p, double r, double *out);

// Weak `L^p` quasinorm `sup_t t^{1/p} f*(t)`.
//
// # Safety
//
// `f` must be a live function handle; `out` must be writable.
WmStatus wm_function_weak_lp_norm(const WmFunction *f, double p, double *out);

// Largest sample magnitude.
//
// # Safety
//
// `f` must be a live function handle; `out` must be writable.
WmStatus wm_function_max_abs(const WmFunction *f, double *out);

// Periodized convolution via the Fourier transform. Both functions must
// live on the same grid. `tail_tolerance` bounds the fraction of either
// factor's mass in the outer eighth of each axis (wrap-around guard);
// exceeding it fails with `WM_NUMERIC_ERROR`. Pass `INFINITY` to disable
// the guard; NaN and negative values are rejected.
//
// # Safety
//
// `f` and `g` must be live function handles; `out` must point to a
// `WmFunction*` slot.
WmStatus wm_convolve(const WmFunction *f,
                     const WmFunction *g,
                     double tail_tolerance,
                     WmFunction **out);

// Forward Fourier transform; the result lives on the dual grid.
//
// # Safety
//
// `f` must be a live function handle; `out` must point to a `WmFunction*`
// slot.
WmStatus wm_forward_ft(const WmFunction *f, WmFunction **out);

// Inverse Fourier transform; the result lives on the dual grid.
//
// # Safety
//
// `f` must be a live function handle; `out` must point to a `WmFunction*`
// slot.
WmStatus wm_inverse_ft(const WmFunction *f, WmFunction **out);

// Closed-form envelope value for the flattening family at exponent
// `r >= 1` and parameter `n > 0`.
//
// # Safety
//
// `out` must be writable.
WmStatus wm_envelope_value(double r, double n, double *out);

// Least-squares power-law fit `y ~ C x^s` in log-log coordinates over
// `len >= 3` strictly positive points. Writes the exponent to `slope`,
// `log C` to `intercept`, and the coefficient of determination to
// `goodness`; any of the three may be NULL to skip it.
//
// # Safety
//
// `xs` and `ys` must point to `len` readable doubles; non-NULL outputs
// must be writable.
WmStatus wm_fit_power_law(const double *xs,
                          const double *ys,
                          size_t len,
                          double *slope,
                          double *intercept,
                          double *goodness);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WEAKMUL_H */
