//! Beam-split characterisation and the wideband rate upper bound.
//!
//! With the narrowband phase `psi_t(t) = 2 pi f_c t` the gain is
//! `g(f) = V(f - f_c)`, the Fourier transform of the zone intensity. Its
//! half-power width is close to that of a `sinc` over the delay spread,
//! which is bounded by `iota * D / c`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::{accumulate_delays, LinkBudget};
use crate::evaluation::{GainSpectrum, SpectrumMethod};
use crate::fresnel::{self, IntensityProfile};
use crate::math::{log2, sqrt};
use crate::scenario::{sample_placement, Band, DistanceRange, Placement, SystemConfig};
use crate::{Result, SINC_HALF_POWER_WIDTH, SPEED_OF_LIGHT};

/// `V(df) = integral of v_t(t) e^{-j 2 pi df t} dt` on the profile grid.
pub fn intensity_transform(profile: &IntensityProfile, offsets: &[f64]) -> Vec<Complex64> {
    let tg = profile.t_grid();
    let vt = profile.v_t();
    let mut acc = alloc::vec![Complex64::new(0.0, 0.0); offsets.len()];
    let terms = vt
        .iter()
        .enumerate()
        .map(|(i, &v)| (Complex64::new(v * tg.trapezoid_weight(i), 0.0), tg.at(i)));
    accumulate_delays(&mut acc, offsets, terms);
    acc
}

/// Gain of narrowband (carrier-matched) beamforming, `V(f - f_c)`.
pub fn narrowband_spectrum(profile: &IntensityProfile, freqs: &[f64]) -> GainSpectrum {
    let offsets: Vec<f64> = freqs.iter().map(|f| f - profile.carrier_hz).collect();
    GainSpectrum {
        freqs: freqs.to_vec(),
        gains: intensity_transform(profile, &offsets),
        method: SpectrumMethod::FresnelFast,
    }
}

/// Direction factor `iota = |(x_bs/R_br + x_ue/R_ru, y_bs/R_br + y_ue/R_ru)|`.
pub fn direction_factor(p: &Placement) -> f64 {
    let rb = p.bs_distance();
    let ru = p.ue_distance();
    let sx = p.bs.x / rb + p.ue.x / ru;
    let sy = p.bs.y / rb + p.ue.y / ru;
    sqrt(sx * sx + sy * sy)
}

/// Beam-split metrics of one placement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitMetrics {
    pub iota: f64,
    /// Two-sided half-power bandwidth of `|V(f - f_c)|^2`.
    pub b3db_exact: f64,
    /// `c * Gamma_0 / (iota D)`; `None` when `iota = 0`.
    pub b3db_approx: Option<f64>,
    /// `b3db_exact * iota * D / c`; `None` when `iota = 0`.
    pub gamma: Option<f64>,
}

/// Below this the direction factor is treated as zero.
const IOTA_EPS: f64 = 1e-12;

/// Half-power half-width of `|V|^2`: scan out from zero offset to the first
/// sample below half power, then bisect to `tol`.
fn half_power_offset(profile: &IntensityProfile, first_guess: f64, tol: f64) -> f64 {
    let peak = intensity_transform(profile, &[0.0])[0].norm_sqr();
    let half = 0.5 * peak;
    let power = |df: f64| intensity_transform(profile, &[df])[0].norm_sqr();
    let spread = profile.delay_spread().max(1e-18);
    let step = (0.05 / spread).min(first_guess / 20.0);
    let mut lo = 0.0;
    let mut hi = step;
    let mut limit = first_guess;
    loop {
        if power(hi) < half {
            break;
        }
        lo = hi;
        hi += step;
        if hi > limit {
            // Bracket expansion by doubling.
            limit *= 2.0;
            if limit > 1e6 * first_guess {
                return hi;
            }
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if power(mid) < half {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

pub fn split_metrics_from_profile(profile: &IntensityProfile, p: &Placement, config: &SystemConfig) -> SplitMetrics {
    let iota = direction_factor(p);
    let d0 = config.side_length_m;
    let first_guess = if iota > IOTA_EPS {
        4.0 * SPEED_OF_LIGHT / (iota * d0)
    } else {
        4.0 / profile.delay_spread().max(1e-18)
    };
    let tol = 1e-6 * config.bandwidth_hz;
    let b3db_exact = 2.0 * half_power_offset(profile, first_guess, tol);
    let (b3db_approx, gamma) = if iota > IOTA_EPS {
        (
            Some(SPEED_OF_LIGHT * SINC_HALF_POWER_WIDTH / (iota * d0)),
            Some(b3db_exact * iota * d0 / SPEED_OF_LIGHT),
        )
    } else {
        (None, None)
    };
    SplitMetrics {
        iota,
        b3db_exact,
        b3db_approx,
        gamma,
    }
}

pub fn split_metrics(p: &Placement, config: &SystemConfig) -> Result<SplitMetrics> {
    let profile = fresnel::intensity_profile(&fresnel::build_frame(p), config, p)?;
    Ok(split_metrics_from_profile(&profile, p, config))
}

/// One row of a Gamma study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaSample {
    pub id: usize,
    pub seed: u64,
    pub placement: Placement,
    pub metrics: SplitMetrics,
}

/// Split metrics over `count` random placements seeded from `master_seed`.
pub fn gamma_study(
    config: &SystemConfig,
    master_seed: u64,
    count: usize,
    bs_range: DistanceRange,
    ue_range: DistanceRange,
) -> Result<Vec<GammaSample>> {
    (0..count)
        .map(|id| {
            let seed = crate::evaluation::trial_seed(master_seed, id);
            let placement = sample_placement(seed, bs_range, ue_range)?;
            Ok(GammaSample {
                id,
                seed,
                placement,
                metrics: split_metrics(&placement, config)?,
            })
        })
        .collect()
}

/// `B log2(1 + S_x E_g / (B S_sigma))`, the bandwidth-consistent Jensen bound.
pub fn rate_upper_bound(profile: &IntensityProfile, lb: &LinkBudget) -> f64 {
    rate_bound_from_energy(profile.energy(), lb)
}

pub fn rate_bound_from_energy(energy: f64, lb: &LinkBudget) -> f64 {
    let b = lb.bandwidth_hz;
    b * log2(1.0 + lb.signal_psd() * energy / (b * lb.noise_psd_w_hz))
}

/// Flat in-band gain `sqrt(E_g / B)` with no leakage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealSpectrum {
    pub band: Band,
    pub level: f64,
}

impl IdealSpectrum {
    pub fn from_energy(energy: f64, band: Band) -> Self {
        Self {
            band,
            level: sqrt(energy / band.width_hz),
        }
    }

    pub fn at(&self, f: f64) -> f64 {
        if self.band.contains(f) {
            self.level
        } else {
            0.0
        }
    }

    /// `integral |g|^2 df`.
    pub fn energy(&self) -> f64 {
        self.level * self.level * self.band.width_hz
    }

    pub fn sample(&self, freqs: &[f64]) -> GainSpectrum {
        GainSpectrum {
            freqs: freqs.to_vec(),
            gains: freqs.iter().map(|&f| Complex64::new(self.at(f), 0.0)).collect(),
            method: SpectrumMethod::Ideal,
        }
    }
}

pub fn ideal_gain(profile: &IntensityProfile, config: &SystemConfig) -> IdealSpectrum {
    IdealSpectrum::from_energy(profile.energy(), config.band())
}
