//! Near-field LOS cascaded channel and the element-sum gain oracle.
//!
//! Element `n` contributes `A_n(f) e^{j(phi_n - 2 pi f t_n)}` to the
//! equivalent gain, with `t_n = (l_n^{B-R} + l_n^{R-U}) / c` and
//! `A_n(f) = (c / 2 pi f)^2 / (l_n^{B-R} l_n^{R-U})`. The total carries the
//! `sqrt(N^BS)` factor of an ideally precoded BS.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math::{self, sqrt, TAU};
use crate::scenario::{BsArray, ElementGrid, Placement, Point3, SystemConfig};
use crate::{Error, Result, SPEED_OF_LIGHT};

/// Transmit power, noise density and band of a link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_w: f64,
    pub noise_psd_w_hz: f64,
    pub bandwidth_hz: f64,
}

impl LinkBudget {
    pub fn new(tx_power_w: f64, noise_psd_w_hz: f64, bandwidth_hz: f64) -> Result<Self> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !ok(tx_power_w) || !ok(noise_psd_w_hz) || !ok(bandwidth_hz) {
            return Err(Error::InvalidConfig(
                "link budget terms must be strictly positive".into(),
            ));
        }
        Ok(Self {
            tx_power_w,
            noise_psd_w_hz,
            bandwidth_hz,
        })
    }

    pub fn from_config(config: &SystemConfig) -> Result<Self> {
        Self::new(
            math::dbm_to_watts(config.tx_power_dbm),
            math::dbm_to_watts(config.noise_psd_dbm_hz),
            config.bandwidth_hz,
        )
    }

    /// Flat transmit PSD `S_x = P_t / B`.
    pub fn signal_psd(&self) -> f64 {
        self.tx_power_w / self.bandwidth_hz
    }
}

/// Per-element reflection phases in `[0, 2 pi)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Weights {
    phases: Vec<f64>,
}

impl Weights {
    pub fn from_phases<I: IntoIterator<Item = f64>>(phases: I) -> Self {
        Self {
            phases: phases.into_iter().map(math::wrap_phase).collect(),
        }
    }

    pub fn zeros(len: usize) -> Self {
        Self { phases: vec![0.0; len] }
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phasors(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.phases.iter().map(|&p| Complex64::from_polar(1.0, p))
    }
}

/// Basic path loss `g0 = sqrt(N^BS) c^2 / (4 pi^2 f^2 R^{B-R} R^{R-U} d^2)`.
pub fn path_gain_constant(config: &SystemConfig, p: &Placement, f: f64) -> f64 {
    let k = SPEED_OF_LIGHT / (TAU * f);
    sqrt(config.bs_antennas as f64) * k * k
        / (p.bs_distance() * p.ue_distance() * config.spacing_m * config.spacing_m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct ElementPath {
    position: Point3,
    bs_length: f64,
    ue_length: f64,
}

impl ElementPath {
    #[inline]
    fn delay(&self) -> f64 {
        (self.bs_length + self.ue_length) / SPEED_OF_LIGHT
    }

    #[inline]
    fn amplitude_coeff(&self) -> f64 {
        1.0 / (self.bs_length * self.ue_length)
    }
}

/// Cached element geometry for one placement.
#[derive(Debug, Clone)]
pub struct CascadedChannel {
    paths: Vec<ElementPath>,
    placement: Placement,
    bs_antennas: usize,
}

impl CascadedChannel {
    pub fn new(grid: &ElementGrid, placement: &Placement, bs_antennas: usize) -> Self {
        let paths = grid
            .positions
            .iter()
            .map(|&r| ElementPath {
                position: r,
                bs_length: r.distance(placement.bs),
                ue_length: r.distance(placement.ue),
            })
            .collect();
        Self {
            paths,
            placement: *placement,
            bs_antennas,
        }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn placement(&self) -> &Placement {
        &self.placement
    }

    pub fn bs_antennas(&self) -> usize {
        self.bs_antennas
    }

    /// Propagation delay `t_n` of every element.
    pub fn delays(&self) -> Vec<f64> {
        self.paths.iter().map(ElementPath::delay).collect()
    }

    /// `A_n(f)` of every element, without the `sqrt(N^BS)` factor.
    pub fn amplitudes(&self, f: f64) -> Vec<f64> {
        let k = SPEED_OF_LIGHT / (TAU * f);
        self.paths.iter().map(|p| k * k * p.amplitude_coeff()).collect()
    }

    /// `sqrt(N^BS) * sum_n A_n(f)`: the largest gain any unit-modulus
    /// weight vector can reach at `f`.
    pub fn coherent_gain(&self, f: f64) -> f64 {
        sqrt(self.bs_antennas as f64) * self.amplitudes(f).iter().sum::<f64>()
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.paths.len() {
            return Err(Error::SizeMismatch {
                expected: self.paths.len(),
                found: len,
            });
        }
        Ok(())
    }

    /// Equivalent gain at `f` for unit-modulus weights.
    pub fn gain(&self, w: &Weights, f: f64) -> Result<Complex64> {
        self.check(w.len())?;
        let coeffs: Vec<Complex64> = w.phasors().collect();
        self.gain_from_coefficients(&coeffs, f)
    }

    /// The same sum with arbitrary complex reflection coefficients. Linear in
    /// `coeffs`.
    pub fn gain_from_coefficients(&self, coeffs: &[Complex64], f: f64) -> Result<Complex64> {
        Ok(self.spectrum_from_coefficients(coeffs, &[f])?[0])
    }

    /// Equivalent gain at every frequency of `freqs`.
    pub fn spectrum(&self, w: &Weights, freqs: &[f64]) -> Result<Vec<Complex64>> {
        self.check(w.len())?;
        let coeffs: Vec<Complex64> = w.phasors().collect();
        self.spectrum_from_coefficients(&coeffs, freqs)
    }

    pub fn spectrum_from_coefficients(&self, coeffs: &[Complex64], freqs: &[f64]) -> Result<Vec<Complex64>> {
        self.check(coeffs.len())?;
        let mut acc = vec![Complex64::new(0.0, 0.0); freqs.len()];
        let weighted = self
            .paths
            .iter()
            .zip(coeffs)
            .map(|(p, &c)| (c * p.amplitude_coeff(), p.delay()));
        accumulate_delays(&mut acc, freqs, weighted);
        let scale = sqrt(self.bs_antennas as f64);
        for (g, &f) in acc.iter_mut().zip(freqs) {
            let k = SPEED_OF_LIGHT / (TAU * f);
            *g *= scale * k * k;
        }
        Ok(acc)
    }

    /// Gain spectrum with exact per-antenna BS distances and the matched
    /// far-field precoder `v = conj(h^BS)`.
    pub fn exact_bs_spectrum(&self, bs: &BsArray, w: &Weights, freqs: &[f64]) -> Result<Vec<Complex64>> {
        self.check(w.len())?;
        let n_bs = bs.len();
        if n_bs != self.bs_antennas {
            return Err(Error::SizeMismatch {
                expected: self.bs_antennas,
                found: n_bs,
            });
        }
        let (xi1, xi2) = bs.aod_cosines(self.placement.bs);
        let offsets = bs.offsets();
        // Far-field path-length advance of each antenna, xi . offset.
        let advance: Vec<f64> = offsets
            .iter()
            .map(|o| xi1 * o.dot(bs.u1) + xi2 * o.dot(bs.u2))
            .collect();
        let antennas: Vec<Point3> = offsets.iter().map(|&o| self.placement.bs + o).collect();

        let mut total = vec![Complex64::new(0.0, 0.0); freqs.len()];
        let mut per_element = vec![Complex64::new(0.0, 0.0); freqs.len()];
        for (path, w_n) in self.paths.iter().zip(w.phasors()) {
            per_element.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            let terms = antennas.iter().zip(&advance).map(|(&a, &adv)| {
                let l = path.position.distance(a);
                (Complex64::new(1.0 / l, 0.0), (l + adv) / SPEED_OF_LIGHT)
            });
            accumulate_delays(&mut per_element, freqs, terms);
            let ue = Complex64::new(1.0 / (path.ue_length * n_bs as f64), 0.0);
            let ue_delay = path.ue_length / SPEED_OF_LIGHT;
            for ((t, &pe), &f) in total.iter_mut().zip(&per_element).zip(freqs) {
                let ue_phase = Complex64::from_polar(1.0, -TAU * f * ue_delay);
                *t += w_n * ue * ue_phase * pe;
            }
        }
        let scale = sqrt(n_bs as f64);
        for (g, &f) in total.iter_mut().zip(freqs) {
            let k = SPEED_OF_LIGHT / (TAU * f);
            *g *= scale * k * k;
        }
        Ok(total)
    }
}

fn uniform_step(freqs: &[f64]) -> Option<f64> {
    if freqs.len() < 3 {
        return None;
    }
    let step = (freqs[freqs.len() - 1] - freqs[0]) / (freqs.len() - 1) as f64;
    if !(step > 0.0) {
        return None;
    }
    let tol = 1e-9 * step;
    freqs
        .iter()
        .enumerate()
        .all(|(k, &f)| (f - (freqs[0] + k as f64 * step)).abs() <= tol)
        .then_some(step)
}

/// `acc[k] += sum_n c_n e^{-j 2 pi f_k tau_n}`, summed in term order.
///
/// Uniform grids advance each phasor by a fixed rotation instead of
/// evaluating one exponential per (term, frequency).
pub(crate) fn accumulate_delays<I>(acc: &mut [Complex64], freqs: &[f64], terms: I)
where
    I: Iterator<Item = (Complex64, f64)>,
{
    match uniform_step(freqs) {
        Some(step) => {
            let f0 = freqs[0];
            for (c, tau) in terms {
                let mut z = c * Complex64::from_polar(1.0, -TAU * f0 * tau);
                let rot = Complex64::from_polar(1.0, -TAU * step * tau);
                for a in acc.iter_mut() {
                    *a += z;
                    z *= rot;
                }
            }
        }
        None => {
            for (c, tau) in terms {
                for (a, &f) in acc.iter_mut().zip(freqs) {
                    *a += c * Complex64::from_polar(1.0, -TAU * f * tau);
                }
            }
        }
    }
}

/// One-shot element-sum gain; see [`CascadedChannel`] for repeated use.
pub fn equivalent_gain_discrete(
    grid: &ElementGrid,
    p: &Placement,
    bs_antennas: usize,
    w: &Weights,
    f: f64,
) -> Result<Complex64> {
    CascadedChannel::new(grid, p, bs_antennas).gain(w, f)
}

/// One-shot exact multi-antenna BS gain.
pub fn equivalent_gain_exact_bs(
    grid: &ElementGrid,
    p: &Placement,
    bs: &BsArray,
    w: &Weights,
    f: f64,
) -> Result<Complex64> {
    Ok(CascadedChannel::new(grid, p, bs.len()).exact_bs_spectrum(bs, w, &[f])?[0])
}
