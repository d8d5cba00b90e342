//! Numerical toolkit for convolution-form Fourier multipliers.
//!
//! The library samples closed-form functions onto centered power-of-two
//! grids, computes Fourier transforms and convolutions spectrally, and
//! evaluates the quantities that drive weak-type estimates: decreasing
//! rearrangements, Lorentz and weak-L^p quasinorms, sphere quadrature with a
//! Zygmund-type integrability functional, an empirical sphere-restriction
//! constant, and a step-by-step checker for the inequality chain that bounds
//! the Zygmund functional of a multiplier's kernel by its representation
//! norm. On top of that sit two reproducible experiments: a growth-exponent
//! sweep for a reference kernel against a flattening Gaussian family, and a
//! weak (1,1) ratio sweep over function families.
//!
//! All experiment entry points are deterministic: randomness flows from a
//! single 64-bit seed through a named generator (ChaCha8), and report files
//! are byte-stable across reruns of the same build.

pub mod chain;
pub mod descriptor;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod interp;
pub mod multiplier;
pub mod rearrange;
pub mod report;
pub mod sphere;
pub mod transform;
pub mod util;

pub use chain::{
    check_inequality_chain, ChainReport, ChainStep, RestrictionProbe, SupBoundRow, CHAIN_SLACK,
};
pub use descriptor::{gaussian_family, FunctionDescriptor, WeightedTerm};
pub use error::{Error, Result};
pub use experiments::{
    envelope_exponent, envelope_growth_exponent, envelope_value, family_members, fit_power_law,
    seeded_gaussian_multiplier, sharpness_sweep, sharpness_sweep_many, weak11_sweep, FamilyKind,
    FamilyMember, FitResult, GridPolicy, KernelSource, SweepConfig, SweepReport, SweepRow,
    Weak11Report, Weak11Row,
};
pub use grid::{SampledFunction, UniformGrid};
pub use interp::cubic_interpolate;
pub use multiplier::{
    linfty_probe, reference_kernel, reference_kernel_descriptor, reference_multiplier,
    ClassAMultiplier, ClassASummand, Factor, FactorSpec, KernelFunction, MultiplierSpec, ProbeRow,
    SummandSpec,
};
pub use rearrange::{
    distribution_function, lorentz_nesting_constant, lorentz_norm, lorentz_norm_of_profile,
    rearrangement, weak_lp_norm, weak_ratio, RearrangementProfile,
};
pub use report::{
    resolve_out_dir, write_csv_file, write_json_file, RunConfig, DEFAULT_OUT_DIR, OUT_DIR_ENV,
    TOOL_NAME, TOOL_VERSION,
};
pub use sphere::{
    gauss_legendre, make_quadrature, restriction_ratio, zygmund_functional,
    zygmund_functional_of_kernel, SphereQuadrature,
};
pub use transform::{
    convolve, convolve_with, forward_ft, inverse_ft, tail_fraction, ConvolveOptions, TailAction,
};
