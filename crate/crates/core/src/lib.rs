//! Cherenkov emission from a uniformly moving charge in dispersive,
//! anisotropic media with rotational symmetry about the charge velocity.
//!
//! The crate is organised bottom-up:
//!
//! - [`medium`]: frequency-dependent dielectric tensors, including the
//!   coherently driven three-level Λ model that produces a narrow
//!   transparency window with very steep dispersion.
//! - [`modes`]: transverse propagating modes of the Fresnel equation, their
//!   polarizations, group velocities and stationary-phase weights.
//! - [`kinematics`]: Cherenkov poles on the `k_z = ω/w` plane, emission
//!   thresholds, absorption curvature, radial velocity and the wave/group
//!   cone apertures.
//! - [`field`]: the pole-residue frequency integral for the radiated field,
//!   the closed-form Gaussian group-cone profile and gridded intensity maps.
//! - [`scenario`]: TOML scenario files and the bundled presets.
//!
//! All quantities are Gaussian-CGS: lengths in cm, times in s, angular
//! frequencies in rad/s, and the charge is normalised to `q = 1`.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod field;
pub mod interp;
pub mod kinematics;
pub mod linalg;
pub mod medium;
pub mod modes;
pub mod quadrature;
pub mod scenario;
pub mod units;

pub use error::{Error, Result};
pub use field::{FieldMap, GridSpec, MapMethod, ProfileParams};
pub use kinematics::{ChargeState, CherenkovPole, ConeGeometry};
pub use medium::{CircularDecomposition, EitParams, MediumModel};
pub use modes::Mode;
pub use scenario::Scenario;
