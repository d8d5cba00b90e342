//! Quadrature on the unit spheres S^0, S^1, S^2 and the sphere-side
//! functionals: the Zygmund-type integrability functional and the empirical
//! restriction ratio.
//!
//! Rules integrate against unnormalized surface measure: total weights are
//! 2, 2π and 4π respectively. S^1 uses the trapezoid rule on equispaced
//! angles (spectrally accurate for smooth integrands); S^2 uses a
//! Gauss-Legendre rule in the polar cosine crossed with a trapezoid rule on
//! `2·resolution` azimuths, exact for spherical harmonics up to degree
//! `2·resolution - 1`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SampledFunction;
use crate::interp::cubic_interpolate;
use crate::transform::forward_ft;
use crate::util::compensated_sum;

/// Nodes and weights on the unit sphere `S^s ⊂ R^{s+1}`. Node coordinates
/// beyond `s + 1` are zero.
#[derive(Clone, Debug)]
pub struct SphereQuadrature {
    sphere_dim: usize,
    nodes: Vec<[f64; 3]>,
    weights: Vec<f64>,
}

impl SphereQuadrature {
    pub fn sphere_dim(&self) -> usize {
        self.sphere_dim
    }

    /// Ambient dimension `s + 1`.
    pub fn ambient_dim(&self) -> usize {
        self.sphere_dim + 1
    }

    pub fn nodes(&self) -> &[[f64; 3]] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Σ weights; equals the surface measure of the sphere.
    pub fn total_weight(&self) -> f64 {
        compensated_sum(self.weights.iter().copied())
    }

    /// Quadrature of a complex integrand over the sphere.
    pub fn integrate<F>(&self, mut f: F) -> Result<Complex64>
    where
        F: FnMut(&[f64; 3]) -> Result<Complex64>,
    {
        let mut re_terms = Vec::with_capacity(self.nodes.len());
        let mut im_terms = Vec::with_capacity(self.nodes.len());
        for (node, w) in self.nodes.iter().zip(self.weights.iter()) {
            let v = f(node)?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteResult("sphere integrand"));
            }
            re_terms.push(w * v.re);
            im_terms.push(w * v.im);
        }
        Ok(Complex64::new(
            compensated_sum(re_terms),
            compensated_sum(im_terms),
        ))
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1]. Newton iteration on the
/// Legendre recurrence; standard and accurate to machine precision for the
/// modest orders used here.
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 {
        return Err(Error::InvalidResolution(0, "need at least one node"));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th positive root.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Evaluate P_n and P_n' by upward recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok((nodes, weights))
}

/// Build a quadrature rule on `S^sphere_dim`.
///
/// * `S^0`: the two points ±1, weight 1 each (`resolution` ignored).
/// * `S^1`: `resolution` equispaced angles (even, >= 4), weight `2π/M`.
/// * `S^2`: `resolution` Gauss-Legendre polar nodes × `2·resolution`
///   azimuths.
pub fn make_quadrature(sphere_dim: usize, resolution: usize) -> Result<SphereQuadrature> {
    match sphere_dim {
        0 => Ok(SphereQuadrature {
            sphere_dim: 0,
            nodes: vec![[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]],
            weights: vec![1.0, 1.0],
        }),
        1 => {
            if resolution < 4 || resolution % 2 != 0 {
                return Err(Error::InvalidResolution(
                    resolution,
                    "circle rule needs an even count >= 4",
                ));
            }
            let m = resolution;
            let w = 2.0 * std::f64::consts::PI / m as f64;
            let mut nodes = Vec::with_capacity(m);
            for k in 0..m {
                let theta = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                nodes.push([theta.cos(), theta.sin(), 0.0]);
            }
            Ok(SphereQuadrature {
                sphere_dim: 1,
                nodes,
                weights: vec![w; m],
            })
        }
        2 => {
            if resolution < 4 {
                return Err(Error::InvalidResolution(
                    resolution,
                    "sphere rule needs at least 4 polar nodes",
                ));
            }
            let (polar, polar_w) = gauss_legendre(resolution)?;
            let m_az = 2 * resolution;
            let w_az = 2.0 * std::f64::consts::PI / m_az as f64;
            let mut nodes = Vec::with_capacity(resolution * m_az);
            let mut weights = Vec::with_capacity(resolution * m_az);
            for (u, wu) in polar.iter().zip(polar_w.iter()) {
                let s = (1.0 - u * u).max(0.0).sqrt();
                for k in 0..m_az {
                    let theta = 2.0 * std::f64::consts::PI * k as f64 / m_az as f64;
                    nodes.push([s * theta.cos(), s * theta.sin(), *u]);
                    weights.push(wu * w_az);
                }
            }
            Ok(SphereQuadrature {
                sphere_dim: 2,
                nodes,
                weights,
            })
        }
        other => Err(Error::InvalidSphereDimension(other)),
    }
}

/// Zygmund-type functional `∫_S |K| log(1 + |K|) dσ` for any evaluable
/// integrand.
pub fn zygmund_functional<F>(quad: &SphereQuadrature, mut k: F) -> Result<f64>
where
    F: FnMut(&[f64; 3]) -> Result<Complex64>,
{
    let v = quad.integrate(|node| {
        let a = k(node)?.norm();
        Ok(Complex64::new(a * a.ln_1p(), 0.0))
    })?;
    Ok(v.re)
}

/// Zygmund functional of a grid-sampled kernel, evaluated on the sphere by
/// cubic interpolation. The grid must contain the unit sphere with stencil
/// margin.
pub fn zygmund_functional_of_kernel(
    quad: &SphereQuadrature,
    kernel: &SampledFunction,
) -> Result<f64> {
    let d = kernel.grid().dimension();
    if d != quad.ambient_dim() {
        return Err(Error::GridMismatch(format!(
            "kernel dimension {} vs sphere ambient dimension {}",
            d,
            quad.ambient_dim()
        )));
    }
    check_contains_unit_sphere(kernel, "kernel grid")?;
    zygmund_functional(quad, |node| cubic_interpolate(kernel, &node[..d]))
}

fn check_contains_unit_sphere(f: &SampledFunction, what: &str) -> Result<()> {
    // Unit sphere plus two cells of cubic stencil margin.
    let needed = 1.0 + 2.0 * f.grid().spacing();
    if 0.5 * f.grid().extent() < needed {
        return Err(Error::GridTooSmall(format!(
            "{what} half-extent {} < {needed} (unit sphere + stencil margin)",
            0.5 * f.grid().extent()
        )));
    }
    Ok(())
}

/// Empirical restriction ratio `|f̂|_{L²(σ)} / |f|_q`: the transform is
/// computed spectrally, evaluated on the sphere nodes by cubic
/// interpolation.
pub fn restriction_ratio(f: &SampledFunction, q: f64, quad: &SphereQuadrature) -> Result<f64> {
    if !(q.is_finite() && q >= 1.0) {
        return Err(Error::InvalidExponent(q));
    }
    let d = f.grid().dimension();
    if d != quad.ambient_dim() {
        return Err(Error::GridMismatch(format!(
            "function dimension {} vs sphere ambient dimension {}",
            d,
            quad.ambient_dim()
        )));
    }
    let denom = f.lp_norm(q)?;
    if denom == 0.0 {
        return Err(Error::ZeroNorm);
    }
    let fhat = forward_ft(f)?;
    check_contains_unit_sphere(&fhat, "dual grid")?;
    let sq = quad.integrate(|node| {
        let v = cubic_interpolate(&fhat, &node[..d])?;
        Ok(Complex64::new(v.norm_sqr(), 0.0))
    })?;
    Ok(sq.re.max(0.0).sqrt() / denom)
}
