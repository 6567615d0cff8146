//! Near-field wideband beamforming for reconfigurable intelligent surfaces
//! (RIS), built on a Fresnel-zone decomposition of the cascaded channel.
//!
//! The RIS aperture is re-parameterised by the semi-major axis `a` of the
//! Fresnel ellipses that share a BS-RIS-UE route length `2a`. Along a zone
//! every reflection arrives in phase at every frequency, so the wideband
//! equivalent gain collapses to a one-dimensional Fourier transform of the
//! zone intensity `v_t(t)` modulated by a designed phase `psi_t(t)`.
//!
//! Crate layout:
//!
//! * [`scenario`]: system configuration, element grid, placements.
//! * [`channel`]: near-field LOS amplitudes and the element-sum oracle.
//! * [`fresnel`]: zone frame, ellipse geometry, Jacobian, arc clipping and
//!   the reflective intensity profile.
//! * [`analysis`]: beam-split metrics, rate upper bound, ideal spectrum.
//! * [`beamformers`]: narrowband, virtual-subarray, stationary-phase and
//!   Gerchberg-Saxton designs, plus quantization.
//! * [`evaluation`]: gain spectra, achievable rate and Monte Carlo sweeps.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
#![warn(missing_debug_implementations)]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod beamformers;
pub mod channel;
mod error;
pub mod evaluation;
pub mod fresnel;
pub mod linalg;
pub(crate) mod math;
pub mod quad;
pub mod scenario;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Half-power constant of `sinc^2`: full 3 dB width of `sinc(x)^2` in `x`.
pub const SINC_HALF_POWER_WIDTH: f64 = 0.886;
