//! Convolution-form multipliers `m = Σ_i f_i * g_i` and their kernels.
//!
//! A summand factor is a function on frequency space, given either in closed
//! form, as the inverse transform of a closed form, or as raw samples. The
//! operator attached to `m` acts by convolution with the kernel
//! `m̌ = Σ_i f̌_i · ǧ_i` on the spatial side; `a_norm` is the representation
//! bound `Σ_i |f_i|_1 |g_i|_q` for the chosen representation (no attempt is
//! made to minimize over representations).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::descriptor::FunctionDescriptor;
use crate::error::{Error, Result};
use crate::grid::{SampledFunction, UniformGrid};
use crate::transform::inverse_ft;
use crate::util::compensated_sum;

/// Kernels are ordinary sampled functions on a spatial grid.
pub type KernelFunction = SampledFunction;

/// One factor of a summand: a function on frequency space.
#[derive(Clone, Debug)]
pub enum Factor {
    /// The factor itself in closed form.
    Closed(FunctionDescriptor),
    /// The factor is the inverse Fourier transform of this closed form; it is
    /// resolved numerically, while its own inverse transform is known exactly
    /// (the closed form evaluated at `-x`).
    Spectral(FunctionDescriptor),
    /// Raw frequency-space samples.
    Sampled(SampledFunction),
}

impl Factor {
    /// Values of the factor on `grid` (a frequency-space grid).
    pub fn resolve(&self, grid: &UniformGrid) -> Result<SampledFunction> {
        match self {
            Factor::Closed(desc) => SampledFunction::sample(desc, grid),
            Factor::Spectral(desc) => {
                // factor = desc^∨: sample desc on the dual grid and transform
                // back; the result lands exactly on `grid`.
                let spectrum = SampledFunction::sample(desc, &grid.dual())?;
                inverse_ft(&spectrum)
            }
            Factor::Sampled(s) => {
                if s.grid() != grid {
                    return Err(Error::GridMismatch(
                        "sampled factor lives on a different grid".into(),
                    ));
                }
                Ok(s.clone())
            }
        }
    }

    /// Inverse transform of the factor on a spatial grid.
    pub fn inverse_on(&self, spatial: &UniformGrid) -> Result<SampledFunction> {
        match self {
            Factor::Closed(desc) => {
                let on_dual = SampledFunction::sample(desc, &spatial.dual())?;
                inverse_ft(&on_dual)
            }
            Factor::Spectral(desc) => {
                // (desc^∨)^∨ = desc(-·): exact, no transform round trip.
                desc.validate(spatial.dimension())?;
                let mut values = Vec::with_capacity(spatial.total_points());
                for flat in 0..spatial.total_points() {
                    let p = spatial.point(flat);
                    let neg: Vec<f64> = p[..spatial.dimension()].iter().map(|x| -x).collect();
                    values.push(Complex64::new(desc.eval(&neg)?, 0.0));
                }
                SampledFunction::from_values(spatial.clone(), values)
            }
            Factor::Sampled(s) => {
                if *s.grid() != spatial.dual() {
                    return Err(Error::GridMismatch(
                        "sampled factor does not live on the dual of the requested grid".into(),
                    ));
                }
                inverse_ft(s)
            }
        }
    }
}

/// One summand `f * g` with its cached factor norms.
#[derive(Clone, Debug)]
pub struct ClassASummand {
    f: Factor,
    g: Factor,
    f_l1: f64,
    g_lq: f64,
}

impl ClassASummand {
    /// Cache `|f|_1` and `|g|_q`, both evaluated on `factor_grid`.
    pub fn new(f: Factor, g: Factor, q: f64, factor_grid: &UniformGrid) -> Result<Self> {
        if !(q.is_finite() && q >= 1.0) {
            return Err(Error::InvalidExponent(q));
        }
        let f_l1 = f.resolve(factor_grid)?.lp_norm(1.0)?;
        let g_lq = g.resolve(factor_grid)?.lp_norm(q)?;
        if !(f_l1.is_finite() && g_lq.is_finite()) {
            return Err(Error::NonFiniteResult("summand norm"));
        }
        Ok(Self { f, g, f_l1, g_lq })
    }

    pub fn f(&self) -> &Factor {
        &self.f
    }

    pub fn g(&self) -> &Factor {
        &self.g
    }

    /// Cached `|f|_1`.
    pub fn f_l1(&self) -> f64 {
        self.f_l1
    }

    /// Cached `|g|_q`.
    pub fn g_lq(&self) -> f64 {
        self.g_lq
    }
}

/// A finite sum `m = Σ_i f_i * g_i` with the exponent `q` its `g`-factors are
/// measured in.
#[derive(Clone, Debug)]
pub struct ClassAMultiplier {
    dimension: usize,
    q: f64,
    summands: Vec<ClassASummand>,
}

impl ClassAMultiplier {
    pub fn new(dimension: usize, q: f64, summands: Vec<ClassASummand>) -> Result<Self> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidDimension(dimension));
        }
        if !(q.is_finite() && q >= 1.0) {
            return Err(Error::InvalidExponent(q));
        }
        if summands.is_empty() {
            return Err(Error::InvalidConfig("multiplier needs at least one summand".into()));
        }
        Ok(Self {
            dimension,
            q,
            summands,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn summands(&self) -> &[ClassASummand] {
        &self.summands
    }

    /// Largest exponent the sphere-restriction step tolerates in this
    /// dimension, `(2d+2)/(d+3)`.
    pub fn admissible_q_limit(&self) -> f64 {
        let d = self.dimension as f64;
        (2.0 * d + 2.0) / (d + 3.0)
    }

    /// Whether `q` sits inside the restriction window `[1, (2d+2)/(d+3)]`.
    pub fn is_admissible(&self) -> bool {
        self.q <= self.admissible_q_limit() + 1e-12
    }

    /// Representation bound `Σ_i |f_i|_1 |g_i|_q` from the cached norms.
    pub fn a_norm(&self) -> f64 {
        compensated_sum(self.summands.iter().map(|s| s.f_l1 * s.g_lq))
    }

    /// Kernel `m̌ = Σ_i f̌_i ǧ_i` sampled on a spatial grid.
    pub fn assemble_kernel(&self, grid: &UniformGrid) -> Result<KernelFunction> {
        if grid.dimension() != self.dimension {
            return Err(Error::GridMismatch(format!(
                "multiplier dimension {} vs grid dimension {}",
                self.dimension,
                grid.dimension()
            )));
        }
        let mut acc: Option<SampledFunction> = None;
        let one = Complex64::new(1.0, 0.0);
        for s in &self.summands {
            let fi = s.f.inverse_on(grid)?;
            let gi = s.g.inverse_on(grid)?;
            let term = fi.pointwise_mul(&gi)?;
            acc = Some(match acc {
                None => term,
                Some(prev) => prev.axpy(one, &term, one)?,
            });
        }
        Ok(acc.expect("summands are non-empty"))
    }

    /// Apply the operator: assemble the kernel on `f`'s grid and convolve.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        let kernel = self.assemble_kernel(f.grid())?;
        crate::transform::convolve(&kernel, f)
    }

    /// Reconstruct `m` itself on a frequency grid as `Σ_i f_i * g_i`
    /// (convolutions evaluated spectrally; wrap-around is reported by the
    /// probe rather than enforced, since slowly decaying factors are exactly
    /// the interesting case).
    pub fn reconstruct(&self, grid: &UniformGrid) -> Result<SampledFunction> {
        if grid.dimension() != self.dimension {
            return Err(Error::GridMismatch(format!(
                "multiplier dimension {} vs grid dimension {}",
                self.dimension,
                grid.dimension()
            )));
        }
        let opts = crate::transform::ConvolveOptions {
            tail_tolerance: f64::INFINITY,
            on_tail_violation: crate::transform::TailAction::Allow,
        };
        let mut acc: Option<SampledFunction> = None;
        let one = Complex64::new(1.0, 0.0);
        for s in &self.summands {
            let fi = s.f.resolve(grid)?;
            let gi = s.g.resolve(grid)?;
            let term = crate::transform::convolve_with(&fi, &gi, &opts)?;
            acc = Some(match acc {
                None => term,
                Some(prev) => prev.axpy(one, &term, one)?,
            });
        }
        Ok(acc.expect("summands are non-empty"))
    }
}

/// Closed form of the built-in reference kernel
/// `K(y) = e^{-y^2} · y^{-2} · 1{y > 1}` (one-dimensional).
pub fn reference_kernel_descriptor() -> FunctionDescriptor {
    FunctionDescriptor::Product {
        left: Box::new(FunctionDescriptor::gaussian(1.0, 1.0)),
        right: Box::new(FunctionDescriptor::TruncatedPower),
    }
}

/// The reference kernel sampled directly from its closed form (no transform
/// round trip).
pub fn reference_kernel(grid: &UniformGrid) -> Result<KernelFunction> {
    if grid.dimension() != 1 {
        return Err(Error::InvalidDimension(grid.dimension()));
    }
    SampledFunction::sample(&reference_kernel_descriptor(), grid)
}

/// The multiplier whose kernel the reference kernel is (up to reflection):
/// `m = f * g` with `f = (e^{-y^2})^∨` and `g = (y^{-2}·1{y>1})^∨`,
/// dimension 1, `q = 1`. Factor norms are cached on `factor_grid`; note that
/// `g` need not be integrable, so its cached `L^1` norm is grid-dependent —
/// `linfty_probe` reports how it behaves as grids grow.
pub fn reference_multiplier(factor_grid: &UniformGrid) -> Result<ClassAMultiplier> {
    if factor_grid.dimension() != 1 {
        return Err(Error::InvalidDimension(factor_grid.dimension()));
    }
    let f = Factor::Spectral(FunctionDescriptor::gaussian(1.0, 1.0));
    let g = Factor::Spectral(FunctionDescriptor::TruncatedPower);
    let summand = ClassASummand::new(f, g, 1.0, factor_grid)?;
    ClassAMultiplier::new(1, 1.0, vec![summand])
}

/// One row of the boundedness probe.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub extent: f64,
    pub points_per_axis: usize,
    /// `sup |m|` over the grid for the reconstructed multiplier.
    pub sup_abs: f64,
    /// `Σ_i |f_i|_1` re-resolved on this grid.
    pub sum_f_l1: f64,
    /// `Σ_i |g_i|_1` re-resolved on this grid; growth across extending grids
    /// is evidence the factor is not integrable.
    pub sum_g_l1: f64,
}

/// Reconstruct `m` on each grid and report `sup |m|` together with the
/// factors' grid-dependent `L^1` masses. Data only — no boundedness claim.
pub fn linfty_probe(m: &ClassAMultiplier, grids: &[UniformGrid]) -> Result<Vec<ProbeRow>> {
    let mut rows = Vec::with_capacity(grids.len());
    for grid in grids {
        let rebuilt = m.reconstruct(grid)?;
        let mut sum_f = 0.0;
        let mut sum_g = 0.0;
        for s in m.summands() {
            sum_f += s.f().resolve(grid)?.lp_norm(1.0)?;
            sum_g += s.g().resolve(grid)?.lp_norm(1.0)?;
        }
        rows.push(ProbeRow {
            extent: grid.extent(),
            points_per_axis: grid.points_per_axis(),
            sup_abs: rebuilt.max_abs(),
            sum_f_l1: sum_f,
            sum_g_l1: sum_g,
        });
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// On-disk multiplier description
// ---------------------------------------------------------------------------

/// Serializable factor: closed form, or inverse transform of a closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorSpec {
    Closed { descriptor: FunctionDescriptor },
    Spectral { descriptor: FunctionDescriptor },
}

impl FactorSpec {
    fn to_factor(&self) -> Factor {
        match self {
            FactorSpec::Closed { descriptor } => Factor::Closed(descriptor.clone()),
            FactorSpec::Spectral { descriptor } => Factor::Spectral(descriptor.clone()),
        }
    }

    fn descriptor(&self) -> &FunctionDescriptor {
        match self {
            FactorSpec::Closed { descriptor } | FactorSpec::Spectral { descriptor } => descriptor,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummandSpec {
    pub f: FactorSpec,
    pub g: FactorSpec,
}

/// JSON-serializable description of a multiplier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierSpec {
    pub dimension: usize,
    pub q: f64,
    pub summands: Vec<SummandSpec>,
}

impl MultiplierSpec {
    /// The built-in reference multiplier description.
    pub fn reference() -> Self {
        MultiplierSpec {
            dimension: 1,
            q: 1.0,
            summands: vec![SummandSpec {
                f: FactorSpec::Spectral {
                    descriptor: FunctionDescriptor::gaussian(1.0, 1.0),
                },
                g: FactorSpec::Spectral {
                    descriptor: FunctionDescriptor::TruncatedPower,
                },
            }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension != 1 && self.dimension != 2 {
            return Err(Error::SpecFile(format!(
                "dimension must be 1 or 2, got {}",
                self.dimension
            )));
        }
        if !(self.q.is_finite() && self.q >= 1.0) {
            return Err(Error::SpecFile(format!("q must be >= 1, got {}", self.q)));
        }
        if self.summands.is_empty() {
            return Err(Error::SpecFile("at least one summand required".into()));
        }
        for (i, s) in self.summands.iter().enumerate() {
            for (side, fac) in [("f", &s.f), ("g", &s.g)] {
                fac.descriptor().validate(self.dimension).map_err(|e| {
                    Error::SpecFile(format!("summand {i} factor {side}: {e}"))
                })?;
            }
        }
        Ok(())
    }

    /// Instantiate, caching factor norms on `factor_grid`.
    pub fn build(&self, factor_grid: &UniformGrid) -> Result<ClassAMultiplier> {
        self.validate()?;
        if factor_grid.dimension() != self.dimension {
            return Err(Error::GridMismatch(format!(
                "spec dimension {} vs factor grid dimension {}",
                self.dimension,
                factor_grid.dimension()
            )));
        }
        let mut summands = Vec::with_capacity(self.summands.len());
        for s in &self.summands {
            summands.push(ClassASummand::new(
                s.f.to_factor(),
                s.g.to_factor(),
                self.q,
                factor_grid,
            )?);
        }
        ClassAMultiplier::new(self.dimension, self.q, summands)
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let spec: MultiplierSpec =
            serde_json::from_str(json).map_err(|e| Error::SpecFile(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn reference_kernel_point_values() {
        let g = UniformGrid::new(1, 64.0, 1 << 13).unwrap();
        let k = reference_kernel(&g).unwrap();
        // K(2) = e^{-4}/4; x = 2 is a grid node here.
        let j = (0..g.total_points())
            .find(|&j| (g.point(j)[0] - 2.0).abs() < 1e-12)
            .unwrap();
        assert_abs_diff_eq!(k.values()[j].re, (-4.0f64).exp() / 4.0, epsilon = 1e-15);
        // Zero at and below the cutoff.
        let j1 = (0..g.total_points())
            .find(|&j| (g.point(j)[0] - 1.0).abs() < 1e-12)
            .unwrap();
        assert_eq!(k.values()[j1].re, 0.0);
        assert_eq!(k.values()[j1 - 8].re, 0.0);
    }

    #[test]
    fn reference_kernel_l1_against_closed_form() {
        // ∫_1^∞ e^{-y²} y^{-2} dy = e^{-1} - sqrt(pi)·erfc(1); the sampled
        // value carries the O(Δ) one-sided cell error at the jump.
        let g = UniformGrid::new(1, 64.0, 1 << 13).unwrap(); // Δ = 1/128
        let k = reference_kernel(&g).unwrap();
        let exact = (-1.0f64).exp() - PI.sqrt() * libm::erfc(1.0);
        let got = k.lp_norm(1.0).unwrap();
        assert!(
            (got - exact).abs() < 0.25 * g.spacing(),
            "got {got}, exact {exact}"
        );
    }

    #[test]
    fn assemble_gaussian_pair_closed_form() {
        // f = g with f̂ = ĝ = e^{-πξ²}: both inverse transforms are e^{-πx²},
        // so the kernel is e^{-2πx²}.
        let grid = UniformGrid::new(1, 32.0, 1024).unwrap();
        let desc = FunctionDescriptor::gaussian(PI, 1.0);
        let s = ClassASummand::new(
            Factor::Spectral(desc.clone()),
            Factor::Spectral(desc),
            1.0,
            &grid,
        )
        .unwrap();
        let m = ClassAMultiplier::new(1, 1.0, vec![s]).unwrap();
        let k = m.assemble_kernel(&grid).unwrap();
        for (j, v) in k.values().iter().enumerate() {
            let x = grid.point(j)[0];
            assert_abs_diff_eq!(v.re, (-2.0 * PI * x * x).exp(), epsilon = 1e-6);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn closed_and_spectral_routes_agree() {
        // A self-dual Gaussian can enter either as a closed factor or as the
        // inverse transform of its own transform; the kernels must agree.
        let grid = UniformGrid::new(1, 32.0, 1024).unwrap();
        let desc = FunctionDescriptor::gaussian(PI, 1.0);
        let closed = Factor::Closed(desc.clone()).inverse_on(&grid).unwrap();
        let spectral = Factor::Spectral(desc).inverse_on(&grid).unwrap();
        for (a, b) in closed.values().iter().zip(spectral.values().iter()) {
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-10);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-10);
        }
    }

    #[test]
    fn apply_young_mass_identity() {
        // |K * f|_1 = |K|_1 |f|_1 for nonnegative K, f: with K = e^{-x²}
        // (as the kernel of a multiplier built to produce it) and f = h_1,
        // the product is sqrt(pi)·sqrt(pi) = pi.
        let grid = UniformGrid::new(1, 48.0, 1 << 12).unwrap();
        // kernel e^{-x²} arises from f̂·ĝ with f̂ = e^{-x²}, ĝ ≡ treated as a
        // single spectral factor paired with a constant-like wide factor; it
        // is simpler to convolve directly here.
        let k = SampledFunction::sample(&FunctionDescriptor::gaussian(1.0, 1.0), &grid).unwrap();
        let h = SampledFunction::sample(&crate::descriptor::gaussian_family(1.0).unwrap(), &grid)
            .unwrap();
        let conv = crate::transform::convolve(&k, &h).unwrap();
        assert_abs_diff_eq!(conv.lp_norm(1.0).unwrap(), PI, epsilon = 1e-5);
    }

    #[test]
    fn a_norm_additivity() {
        let grid = UniformGrid::new(1, 32.0, 512).unwrap();
        let mk = |amp: f64| {
            ClassASummand::new(
                Factor::Closed(FunctionDescriptor::gaussian(1.0, amp)),
                Factor::Closed(FunctionDescriptor::gaussian(2.0, 1.0)),
                1.0,
                &grid,
            )
            .unwrap()
        };
        let single = ClassAMultiplier::new(1, 1.0, vec![mk(1.0)]).unwrap();
        let double = ClassAMultiplier::new(1, 1.0, vec![mk(1.0), mk(2.0)]).unwrap();
        // second summand has twice the f-amplitude: a_norm = 3x the single
        assert_abs_diff_eq!(
            double.a_norm(),
            3.0 * single.a_norm(),
            epsilon = 1e-12 * single.a_norm()
        );
    }

    #[test]
    fn reference_multiplier_f_norm_is_one() {
        // f = (e^{-y²})^∨ has |f|_1 = ∫ sqrt(pi) e^{-π²ξ²} dξ = 1.
        let grid = UniformGrid::new(1, 64.0, 1 << 13).unwrap();
        let m = reference_multiplier(&grid).unwrap();
        assert_abs_diff_eq!(m.summands()[0].f_l1(), 1.0, epsilon = 1e-8);
        assert!(m.is_admissible());
    }

    #[test]
    fn probe_reports_bounded_gaussian_pair() {
        // m = f * g with two Gaussians is bounded with sup = (f*g)(0).
        let grids: Vec<UniformGrid> = [(32.0, 1024usize), (32.0, 2048), (64.0, 4096)]
            .iter()
            .map(|(l, n)| UniformGrid::new(1, *l, *n).unwrap())
            .collect();
        let s = ClassASummand::new(
            Factor::Closed(FunctionDescriptor::gaussian(1.0, 1.0)),
            Factor::Closed(FunctionDescriptor::gaussian(1.0, 1.0)),
            1.0,
            &grids[0],
        )
        .unwrap();
        let m = ClassAMultiplier::new(1, 1.0, vec![s]).unwrap();
        let rows = linfty_probe(&m, &grids).unwrap();
        let expect = (PI / 2.0).sqrt(); // (e^{-x²} * e^{-x²})(0)
        for row in &rows {
            assert_abs_diff_eq!(row.sup_abs, expect, epsilon = 1e-6);
        }
    }

    #[test]
    fn spec_round_trip_and_validation() {
        let spec = MultiplierSpec::reference();
        let j = serde_json::to_string_pretty(&spec).unwrap();
        let back = MultiplierSpec::from_json(&j).unwrap();
        assert_eq!(spec, back);

        let bad = r#"{"dimension": 3, "q": 1.0, "summands": []}"#;
        assert!(MultiplierSpec::from_json(bad).is_err());
        let bad_q = r#"{"dimension": 1, "q": 0.5, "summands": [
            {"f": {"kind": "closed", "descriptor": {"form": "gaussian", "decay": 1.0, "amplitude": 1.0}},
             "g": {"kind": "closed", "descriptor": {"form": "gaussian", "decay": 1.0, "amplitude": 1.0}}}]}"#;
        assert!(MultiplierSpec::from_json(bad_q).is_err());
        // truncated_power cannot appear in dimension 2
        let bad_dim = r#"{"dimension": 2, "q": 1.0, "summands": [
            {"f": {"kind": "closed", "descriptor": {"form": "truncated_power"}},
             "g": {"kind": "closed", "descriptor": {"form": "gaussian", "decay": 1.0, "amplitude": 1.0}}}]}"#;
        assert!(MultiplierSpec::from_json(bad_dim).is_err());
    }

    #[test]
    fn summand_rejects_bad_q() {
        let grid = UniformGrid::new(1, 16.0, 64).unwrap();
        let f = Factor::Closed(FunctionDescriptor::gaussian(1.0, 1.0));
        let g = Factor::Closed(FunctionDescriptor::gaussian(1.0, 1.0));
        assert!(ClassASummand::new(f, g, 0.8, &grid).is_err());
    }
}
