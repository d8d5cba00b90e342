//! Decreasing rearrangements and Lorentz / weak-L^p quasinorms.
//!
//! A sampled function's modulus takes finitely many values on cells of equal
//! measure `μ = Δ^d`, so its decreasing rearrangement is the step function
//!
//! ```text
//!   f*(t) = v_(k)   for t ∈ [(k-1)μ, kμ),
//! ```
//!
//! with `v_(1) >= v_(2) >= ...` the sorted sample magnitudes. Every quasinorm
//! here is evaluated exactly on that step function — no quadrature on t.

use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::util::compensated_sum;

/// Sorted sample magnitudes together with the common cell measure; the exact
/// decreasing rearrangement of a sampled function.
#[derive(Clone, Debug)]
pub struct RearrangementProfile {
    magnitudes: Vec<f64>,
    step: f64,
}

impl RearrangementProfile {
    /// Magnitudes in non-increasing order.
    pub fn magnitudes(&self) -> &[f64] {
        &self.magnitudes
    }

    /// Cell measure `μ`; step `k` covers `[(k-1)μ, kμ)`.
    pub fn step(&self) -> f64 {
        self.step
    }

    /// Total measure carried by the profile, `len·μ`.
    pub fn total_measure(&self) -> f64 {
        self.magnitudes.len() as f64 * self.step
    }

    /// `f*(t)`; zero beyond the total measure. Right-continuity at the exact
    /// step boundaries is subject to floating-point division.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 || self.step == 0.0 {
            return 0.0;
        }
        let k = (t / self.step).floor() as usize;
        self.magnitudes.get(k).copied().unwrap_or(0.0)
    }

    /// Debug export, one row per step: `k,t_left,magnitude`.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "k,t_left,magnitude")?;
        for (i, v) in self.magnitudes.iter().enumerate() {
            writeln!(w, "{},{:.16e},{:.16e}", i + 1, i as f64 * self.step, v)?;
        }
        Ok(())
    }
}

/// Exact decreasing rearrangement of the sample magnitudes.
pub fn rearrangement(f: &SampledFunction) -> RearrangementProfile {
    let mut magnitudes: Vec<f64> = f.values().iter().map(|v| v.norm()).collect();
    // Descending; magnitudes are finite by construction so total_cmp is safe
    // and, unlike partial_cmp().unwrap(), has no panic path.
    magnitudes.sort_unstable_by(|a, b| b.total_cmp(a));
    RearrangementProfile {
        magnitudes,
        step: f.grid().cell_measure(),
    }
}

/// Measure of the strict super-level set, `μ · #{ |v_j| > alpha }`.
pub fn distribution_function(f: &SampledFunction, alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidThreshold(alpha));
    }
    let count = f.values().iter().filter(|v| v.norm() > alpha).count();
    Ok(count as f64 * f.grid().cell_measure())
}

fn check_lorentz_exponents(p: f64, r: f64) -> Result<()> {
    if p.is_nan() || p.is_infinite() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    if r.is_nan() || r < 1.0 {
        return Err(Error::InvalidExponent(r));
    }
    Ok(())
}

/// Lorentz quasinorm of the profile. For finite `r`,
///
/// ```text
///   |f|_{p,r}^r = Σ_k v_(k)^r · [ (kμ)^{r/p} - ((k-1)μ)^{r/p} ] · p/r,
/// ```
///
/// the exact integral of `(t^{1/p} f*(t))^r dt/t` over each step; for
/// `r = +inf` the weak norm `sup_k v_(k)·(kμ)^{1/p}`.
pub fn lorentz_norm_of_profile(profile: &RearrangementProfile, p: f64, r: f64) -> Result<f64> {
    check_lorentz_exponents(p, r)?;
    if r.is_infinite() {
        return Ok(weak_norm_of_profile(profile, p));
    }
    let mu = profile.step;
    let x = r / p;
    let sum = compensated_sum(profile.magnitudes.iter().enumerate().map(|(i, v)| {
        if *v == 0.0 {
            // Sorted descending: everything from here on is zero.
            return 0.0;
        }
        let k = (i + 1) as f64;
        let width = (k * mu).powf(x) - (((i) as f64) * mu).powf(x);
        v.powf(r) * width
    }));
    Ok((sum * p / r).powf(1.0 / r))
}

fn weak_norm_of_profile(profile: &RearrangementProfile, p: f64) -> f64 {
    let mu = profile.step;
    let inv_p = 1.0 / p;
    let mut best = 0.0_f64;
    for (i, v) in profile.magnitudes.iter().enumerate() {
        if *v == 0.0 {
            break;
        }
        let cand = v * (((i + 1) as f64) * mu).powf(inv_p);
        if cand > best {
            best = cand;
        }
    }
    best
}

/// Lorentz quasinorm `|f|_{p,r}` of a sampled function (`r = +inf` gives the
/// weak norm).
pub fn lorentz_norm(f: &SampledFunction, p: f64, r: f64) -> Result<f64> {
    lorentz_norm_of_profile(&rearrangement(f), p, r)
}

/// Weak-L^p quasinorm `sup_α α·d_f(α)^{1/p}`, evaluated exactly as the profile
/// maximum `max_k v_(k)·(kμ)^{1/p}`; identical code path to
/// `lorentz_norm(f, p, inf)`.
pub fn weak_lp_norm(f: &SampledFunction, p: f64) -> Result<f64> {
    check_lorentz_exponents(p, f64::INFINITY)?;
    Ok(weak_norm_of_profile(&rearrangement(f), p))
}

/// `|transformed|_{p,∞} / |original|_p`; the building block of weak-(p,p)
/// operator-bound estimates.
pub fn weak_ratio(transformed: &SampledFunction, original: &SampledFunction, p: f64) -> Result<f64> {
    let denom = original.lp_norm(p)?;
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok(weak_lp_norm(transformed, p)? / denom)
}

/// Constant of the Lorentz nesting inequality: for `r1 <= r2`,
///
/// ```text
///   |f|_{p,r2} <= (r1/p)^{1/r1 - 1/r2} · |f|_{p,r1}.
/// ```
///
/// At `p = 1, r1 = 1` the constant is 1: the first-exponent-1 scale embeds
/// into every higher second exponent without loss.
pub fn lorentz_nesting_constant(p: f64, r1: f64, r2: f64) -> Result<f64> {
    check_lorentz_exponents(p, r1)?;
    check_lorentz_exponents(p, r2)?;
    if r1.is_infinite() || r2 < r1 {
        return Err(Error::InvalidExponent(r2));
    }
    let inv_r2 = if r2.is_infinite() { 0.0 } else { 1.0 / r2 };
    Ok((r1 / p).powf(1.0 / r1 - inv_r2))
}
