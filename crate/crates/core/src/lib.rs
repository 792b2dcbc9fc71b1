//! Numerics for binormal flow, vortex filaments, the Hasimoto transform and
//! long-range scattering of the cubic NLS with a `1/t` coefficient.

pub mod checkpoint;
pub mod curve;
pub mod datum;
pub mod error;
pub mod fit;
pub mod frame;
pub mod grid;
pub mod hasimoto;
pub mod nls;
pub mod norms;
pub mod oscillatory;
pub mod pipeline;
pub mod profile;
pub mod quadrature;
pub mod reconstruction;
pub mod singularity;
pub mod spectral;
pub mod wave_operator;

pub use curve::Curve;
pub use error::{Error, Result};
pub use frame::{Frame, Vec3};
pub use fit::{fit_decay_exponent, DecayFit};
pub use grid::{log_times, ComplexField, SpatialGrid, Trajectory};
pub use norms::{mixed_norm_l4_linf, norms, NormReport};
pub use num_complex::Complex64;
pub use spectral::free_propagate;
pub use profile::{corner_angle, integrate_profile, CornerData, ProfileSolution};
pub use nls::{evolve_v, EvolutionConfig, Sign};
pub use datum::Family;
pub use wave_operator::{apply_a, picard_solve, profile_v1, verify_decay, ScatteringDatum};
