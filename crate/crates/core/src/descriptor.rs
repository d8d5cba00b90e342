//! Closed-form function descriptors.
//!
//! Descriptors are the exact, resolution-independent representation of the
//! functions the library samples onto grids: Gaussians, half-open box
//! indicators, the built-in truncated-power profile, and products and finite
//! linear combinations of those.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One weighted term of a linear combination.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedTerm {
    pub coefficient: f64,
    pub term: FunctionDescriptor,
}

/// Closed-form real-valued function on R^d, d in {1, 2}.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum FunctionDescriptor {
    /// `amplitude · e^{-decay·|x - center|^2}`. An empty center means the
    /// origin in any dimension.
    Gaussian {
        decay: f64,
        amplitude: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `y^{-2}` for `y > 1`, zero otherwise. One-dimensional.
    TruncatedPower,
    /// Indicator of the half-open box `∏ [lower_i, upper_i)`.
    Indicator { lower: Vec<f64>, upper: Vec<f64> },
    /// Pointwise product of two descriptors.
    Product {
        left: Box<FunctionDescriptor>,
        right: Box<FunctionDescriptor>,
    },
    /// Finite linear combination `Σ coefficient_i · term_i`.
    Sum { terms: Vec<WeightedTerm> },
}

impl FunctionDescriptor {
    /// Centered Gaussian `amplitude · e^{-decay·|x|^2}`.
    pub fn gaussian(decay: f64, amplitude: f64) -> Self {
        FunctionDescriptor::Gaussian {
            decay,
            amplitude,
            center: Vec::new(),
        }
    }

    /// Gaussian bump centered at `center`.
    pub fn gaussian_at(decay: f64, amplitude: f64, center: Vec<f64>) -> Self {
        FunctionDescriptor::Gaussian {
            decay,
            amplitude,
            center,
        }
    }

    /// One-dimensional half-open interval indicator `1_{[lo, hi)}`.
    pub fn indicator_interval(lo: f64, hi: f64) -> Result<Self> {
        let d = FunctionDescriptor::Indicator {
            lower: vec![lo],
            upper: vec![hi],
        };
        d.validate(1)?;
        Ok(d)
    }

    /// Check the descriptor is well-formed for the given ambient dimension.
    pub fn validate(&self, dimension: usize) -> Result<()> {
        if dimension != 1 && dimension != 2 {
            return Err(Error::InvalidDimension(dimension));
        }
        match self {
            FunctionDescriptor::Gaussian {
                decay,
                amplitude,
                center,
            } => {
                if !(decay.is_finite() && *decay > 0.0) {
                    return Err(Error::InvalidDescriptor(format!(
                        "gaussian decay must be positive and finite, got {decay}"
                    )));
                }
                if !amplitude.is_finite() {
                    return Err(Error::InvalidDescriptor(format!(
                        "gaussian amplitude must be finite, got {amplitude}"
                    )));
                }
                if !(center.is_empty() || center.len() == dimension) {
                    return Err(Error::InvalidDescriptor(format!(
                        "gaussian center has {} coordinates in dimension {}",
                        center.len(),
                        dimension
                    )));
                }
                if center.iter().any(|c| !c.is_finite()) {
                    return Err(Error::InvalidDescriptor(
                        "gaussian center must be finite".into(),
                    ));
                }
                Ok(())
            }
            FunctionDescriptor::TruncatedPower => {
                if dimension != 1 {
                    return Err(Error::InvalidDescriptor(
                        "truncated_power is one-dimensional".into(),
                    ));
                }
                Ok(())
            }
            FunctionDescriptor::Indicator { lower, upper } => {
                if lower.len() != dimension || upper.len() != dimension {
                    return Err(Error::InvalidDescriptor(format!(
                        "indicator bounds have {}/{} coordinates in dimension {}",
                        lower.len(),
                        upper.len(),
                        dimension
                    )));
                }
                for (lo, hi) in lower.iter().zip(upper.iter()) {
                    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                        return Err(Error::InvalidDescriptor(format!(
                            "indicator needs finite lower < upper, got [{lo}, {hi})"
                        )));
                    }
                }
                Ok(())
            }
            FunctionDescriptor::Product { left, right } => {
                left.validate(dimension)?;
                right.validate(dimension)
            }
            FunctionDescriptor::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::InvalidDescriptor("empty sum".into()));
                }
                for t in terms {
                    if !t.coefficient.is_finite() {
                        return Err(Error::InvalidDescriptor(format!(
                            "non-finite coefficient {}",
                            t.coefficient
                        )));
                    }
                    t.term.validate(dimension)?;
                }
                Ok(())
            }
        }
    }

    /// Evaluate at a point; `x.len()` is the ambient dimension.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        match self {
            FunctionDescriptor::Gaussian {
                decay,
                amplitude,
                center,
            } => {
                let mut r2 = 0.0;
                for (i, xi) in x.iter().enumerate() {
                    let c = center.get(i).copied().unwrap_or(0.0);
                    r2 += (xi - c) * (xi - c);
                }
                Ok(amplitude * (-decay * r2).exp())
            }
            FunctionDescriptor::TruncatedPower => {
                let y = x[0];
                // Branch before dividing so y = 0 cannot produce an infinity.
                if y > 1.0 {
                    Ok(1.0 / (y * y))
                } else {
                    Ok(0.0)
                }
            }
            FunctionDescriptor::Indicator { lower, upper } => {
                let inside = x
                    .iter()
                    .zip(lower.iter().zip(upper.iter()))
                    .all(|(xi, (lo, hi))| *lo <= *xi && *xi < *hi);
                Ok(if inside { 1.0 } else { 0.0 })
            }
            FunctionDescriptor::Product { left, right } => Ok(left.eval(x)? * right.eval(x)?),
            FunctionDescriptor::Sum { terms } => {
                let mut acc = 0.0;
                for t in terms {
                    acc += t.coefficient * t.term.eval(x)?;
                }
                Ok(acc)
            }
        }
    }

}

/// The flattening Gaussian family `h_n(y) = n^{-1/2} e^{-y^2/n}` (one
/// parameter `n > 0`; every member has unit-independent L^1 mass sqrt(pi)).
pub fn gaussian_family(n: f64) -> Result<FunctionDescriptor> {
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::InvalidDescriptor(format!(
            "family parameter must be positive and finite, got {n}"
        )));
    }
    Ok(FunctionDescriptor::gaussian(1.0 / n, 1.0 / n.sqrt()))
}
