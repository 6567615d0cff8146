//! Gain spectra, achievable rate and Monte Carlo sweeps.
//!
//! Rates of designed weights are always evaluated on the element sum (or on
//! the exact multi-antenna BS model); the zone-domain fast path is used for
//! spectra and cross-checks.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::analysis::{ideal_gain, rate_upper_bound};
use crate::beamformers::{
    gsa_profile, narrowband_phases, profile_to_weights, quantize_weights, spm_profile, vsa_phases, GsaParams,
    PhaseProfile,
};
use crate::channel::{accumulate_delays, CascadedChannel, LinkBudget, Weights};
use crate::fresnel::{build_frame, intensity_profile, FresnelFrame, IntensityProfile};
use crate::math::{self, log2, sqrt};
use crate::scenario::{
    build_ris_grid, half_wavelength, sample_placement, Band, BsArray, DistanceRange, ElementGrid, Placement,
    SystemConfig,
};
use crate::{Error, Result};

/// How a spectrum was computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpectrumMethod {
    /// Zone-domain integral of `v_t e^{j psi_t}`.
    FresnelFast,
    /// Sum over RIS elements.
    DiscreteOracle,
    /// Sum over RIS elements and BS antennas.
    ExactBs,
    /// Flat in-band spectrum of the rate bound.
    Ideal,
}

impl SpectrumMethod {
    pub fn name(self) -> &'static str {
        match self {
            SpectrumMethod::FresnelFast => "fresnel-fast",
            SpectrumMethod::DiscreteOracle => "discrete-oracle",
            SpectrumMethod::ExactBs => "exact-bs",
            SpectrumMethod::Ideal => "ideal",
        }
    }
}

/// Complex equivalent gain on a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GainSpectrum {
    pub freqs: Vec<f64>,
    pub gains: Vec<Complex64>,
    pub method: SpectrumMethod,
}

impl GainSpectrum {
    pub fn len(&self) -> usize {
        self.freqs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.freqs.is_empty()
    }

    pub fn powers(&self) -> Vec<f64> {
        self.gains.iter().map(|g| g.norm_sqr()).collect()
    }

    fn in_band_powers(&self, band: Band) -> Vec<f64> {
        self.freqs
            .iter()
            .zip(&self.gains)
            .filter(|(f, _)| band.contains(**f))
            .map(|(_, g)| g.norm_sqr())
            .collect()
    }

    /// Max over min of `|g|^2` inside the band, in dB. Infinite if some
    /// in-band gain is zero; `None` without in-band samples.
    pub fn ripple_db(&self, band: Band) -> Option<f64> {
        let p = self.in_band_powers(band);
        if p.is_empty() {
            return None;
        }
        let max = p.iter().cloned().fold(f64::MIN, f64::max);
        let min = p.iter().cloned().fold(f64::MAX, f64::min);
        Some(10.0 * math::log10(max / min))
    }

    /// Trapezoid `integral |g|^2 df` over samples outside the band.
    pub fn leakage_energy(&self, band: Band) -> f64 {
        self.partial_energy(|f| !band.contains(f))
    }

    /// Trapezoid `integral |g|^2 df` over samples inside the band.
    pub fn in_band_energy(&self, band: Band) -> f64 {
        self.partial_energy(|f| band.contains(f))
    }

    fn partial_energy(&self, keep: impl Fn(f64) -> bool) -> f64 {
        let mut e = 0.0;
        for i in 1..self.freqs.len() {
            let (f0, f1) = (self.freqs[i - 1], self.freqs[i]);
            if keep(f0) && keep(f1) {
                e += 0.5 * (f1 - f0) * (self.gains[i - 1].norm_sqr() + self.gains[i].norm_sqr());
            }
        }
        e
    }

    /// `||g - reference||_2 / ||reference||_2` over in-band samples; the
    /// grids must match.
    pub fn relative_l2(&self, reference: &GainSpectrum, band: Band) -> Result<f64> {
        if self.freqs.len() != reference.freqs.len() {
            return Err(Error::SizeMismatch {
                expected: reference.freqs.len(),
                found: self.freqs.len(),
            });
        }
        let (mut num, mut den) = (0.0, 0.0);
        for ((f, a), b) in self.freqs.iter().zip(&self.gains).zip(&reference.gains) {
            if band.contains(*f) {
                num += (a - b).norm_sqr();
                den += b.norm_sqr();
            }
        }
        Ok(sqrt(num / den))
    }
}

/// `n` evenly spaced frequencies from `lo` to `hi` inclusive.
pub fn frequency_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![0.5 * (lo + hi)],
        _ => (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Everything derived from one configuration and placement.
#[derive(Debug, Clone)]
pub struct Scene {
    pub config: SystemConfig,
    pub placement: Placement,
    pub grid: ElementGrid,
    pub channel: CascadedChannel,
    pub frame: FresnelFrame,
    pub profile: IntensityProfile,
    pub link: LinkBudget,
}

impl Scene {
    pub fn new(config: &SystemConfig, placement: Placement) -> Result<Self> {
        config.validate()?;
        let grid = build_ris_grid(config);
        let channel = CascadedChannel::new(&grid, &placement, config.bs_antennas);
        let frame = build_frame(&placement);
        let profile = intensity_profile(&frame, config, &placement)?;
        Ok(Self {
            config: config.clone(),
            placement,
            grid,
            channel,
            frame,
            profile,
            link: LinkBudget::from_config(config)?,
        })
    }

    pub fn band(&self) -> Band {
        self.config.band()
    }

    /// Half-wavelength planar BS array facing the RIS centre.
    pub fn bs_array(&self) -> Result<BsArray> {
        let (n1, n2) = BsArray::square_counts(self.config.bs_antennas);
        BsArray::facing_origin(self.placement.bs, n1, n2, half_wavelength(self.config.carrier_hz))
    }

    /// Subcarrier centres of the configured band.
    pub fn subcarriers(&self) -> Vec<f64> {
        self.band().subcarriers(self.config.subcarriers)
    }
}

/// Input to [`gain_spectrum`].
#[derive(Debug, Clone, Copy)]
pub enum GainSource<'a> {
    Profile(&'a PhaseProfile),
    Weights(&'a Weights),
}

/// Gain spectrum of a design on `freqs`.
///
/// The fast path needs a zone design and evaluates
/// `(f_c/f)^2 integral v_t(t) e^{j psi_t(t)} e^{-j 2 pi f t} dt` by trapezoid
/// on the profile grid; the factor carries the `f^-2` path loss that the
/// zone intensity freezes at the carrier. The element paths map zone designs
/// to weights first. [`SpectrumMethod::Ideal`] ignores the source.
pub fn gain_spectrum(scene: &Scene, source: GainSource<'_>, freqs: &[f64], method: SpectrumMethod) -> Result<GainSpectrum> {
    let gains = match method {
        SpectrumMethod::Ideal => return Ok(ideal_gain(&scene.profile, &scene.config).sample(freqs)),
        SpectrumMethod::FresnelFast => {
            let GainSource::Profile(profile) = source else {
                return Err(Error::UnsupportedSource);
            };
            fast_spectrum(&scene.profile, profile, freqs)
        }
        SpectrumMethod::DiscreteOracle | SpectrumMethod::ExactBs => {
            let mapped;
            let w = match source {
                GainSource::Weights(w) => w,
                GainSource::Profile(p) => {
                    mapped = profile_to_weights(p, &scene.channel);
                    &mapped
                }
            };
            if method == SpectrumMethod::ExactBs {
                scene.channel.exact_bs_spectrum(&scene.bs_array()?, w, freqs)?
            } else {
                scene.channel.spectrum(w, freqs)?
            }
        }
    };
    Ok(GainSpectrum {
        freqs: freqs.to_vec(),
        gains,
        method,
    })
}

fn fast_spectrum(intensity: &IntensityProfile, design: &PhaseProfile, freqs: &[f64]) -> Vec<Complex64> {
    let tg = intensity.t_grid();
    let vt = intensity.v_t();
    let mut acc = alloc::vec![Complex64::new(0.0, 0.0); freqs.len()];
    let terms = vt.iter().enumerate().map(|(i, &v)| {
        let t = tg.at(i);
        (Complex64::from_polar(v * tg.trapezoid_weight(i), design.phase(t)), t)
    });
    accumulate_delays(&mut acc, freqs, terms);
    let fc = intensity.carrier_hz;
    for (g, &f) in acc.iter_mut().zip(freqs) {
        *g *= (fc / f) * (fc / f);
    }
    acc
}

/// `sum_k (B/K) log2(1 + |g_k|^2 S_x / S_sigma)` over the `K` subcarrier
/// centres of `band`.
///
/// A spectrum sampled exactly at the subcarriers is used as is; any other
/// grid must cover them and `|g|^2` is interpolated linearly.
pub fn achievable_rate(spec: &GainSpectrum, lb: &LinkBudget, band: Band, subcarriers: usize) -> Result<f64> {
    let centres = band.subcarriers(subcarriers);
    let powers = subcarrier_powers(spec, band, &centres)?;
    let snr = lb.signal_psd() / lb.noise_psd_w_hz;
    let per = band.width_hz / subcarriers as f64;
    Ok(powers.iter().map(|p| per * log2(1.0 + p * snr)).sum())
}

fn subcarrier_powers(spec: &GainSpectrum, band: Band, centres: &[f64]) -> Result<Vec<f64>> {
    let tol = 1e-9 * band.center_hz.abs().max(1.0);
    let exact = spec.freqs.len() == centres.len() && spec.freqs.iter().zip(centres).all(|(a, b)| (a - b).abs() <= tol);
    if exact {
        return Ok(spec.powers());
    }
    let (Some(&lo), Some(&hi)) = (spec.freqs.first(), spec.freqs.last()) else {
        return Err(Error::InsufficientCoverage {
            lo: f64::NAN,
            hi: f64::NAN,
            band_lo: band.low(),
            band_hi: band.high(),
        });
    };
    let need_lo = centres.first().copied().unwrap_or(band.center_hz);
    let need_hi = centres.last().copied().unwrap_or(band.center_hz);
    if lo > need_lo + tol || hi < need_hi - tol || spec.freqs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InsufficientCoverage {
            lo,
            hi,
            band_lo: band.low(),
            band_hi: band.high(),
        });
    }
    let p = spec.powers();
    Ok(centres
        .iter()
        .map(|&f| {
            let j = spec.freqs.partition_point(|&x| x < f).clamp(1, spec.freqs.len().max(2) - 1);
            if spec.freqs.len() == 1 {
                return p[0];
            }
            let (f0, f1) = (spec.freqs[j - 1], spec.freqs[j]);
            let s = ((f - f0) / (f1 - f0)).clamp(0.0, 1.0);
            p[j - 1] + s * (p[j] - p[j - 1])
        })
        .collect())
}

/// Seed of trial `trial` under `master`.
pub fn trial_seed(master: u64, trial: usize) -> u64 {
    math::splitmix64(master ^ math::splitmix64(trial as u64))
}

/// Beamforming schemes compared in the rate studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Narrowband,
    Vsa,
    FzSpm,
    FzGsa,
    UpperBound,
    /// Reference line of "optimal beamforming"; the same value as
    /// [`Method::UpperBound`].
    Optimal,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Narrowband,
        Method::Vsa,
        Method::FzSpm,
        Method::FzGsa,
        Method::UpperBound,
        Method::Optimal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Narrowband => "narrowband",
            Method::Vsa => "vsa",
            Method::FzSpm => "fz-spm",
            Method::FzGsa => "fz-gsa",
            Method::UpperBound => "upper-bound",
            Method::Optimal => "optimal",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }

    /// Bounds have no weights.
    pub fn is_bound(self) -> bool {
        matches!(self, Method::UpperBound | Method::Optimal)
    }
}

/// Channel used to score designed weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelModel {
    /// BS array folded into a `sqrt(N^BS)` factor.
    #[default]
    Approximate,
    /// Per-antenna distances with a matched BS precoder.
    ExactBs,
}

/// Design knobs shared by all trials.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignSettings {
    pub vsa_subarrays: usize,
    pub gsa: GsaParams,
    pub channel_model: ChannelModel,
}

/// Default number of virtual subarrays.
pub const DEFAULT_VSA_SUBARRAYS: usize = 2;

impl Default for DesignSettings {
    fn default() -> Self {
        Self {
            vsa_subarrays: DEFAULT_VSA_SUBARRAYS,
            gsa: GsaParams::default(),
            channel_model: ChannelModel::Approximate,
        }
    }
}

/// A designed weight vector and, for zone designs, its phase profile.
#[derive(Debug, Clone)]
pub struct Design {
    pub profile: Option<PhaseProfile>,
    pub weights: Weights,
}

/// Design `method` for `scene`; `None` for the bounds. Phases are quantized
/// when the configuration sets a resolution.
pub fn design(scene: &Scene, method: Method, settings: &DesignSettings) -> Result<Option<Design>> {
    let band = scene.band();
    let (profile, weights) = match method {
        Method::UpperBound | Method::Optimal => return Ok(None),
        Method::Narrowband => (None, narrowband_phases(&scene.channel, band.center_hz)),
        Method::Vsa => (
            None,
            vsa_phases(&scene.grid, &scene.channel, band, settings.vsa_subarrays)?,
        ),
        Method::FzSpm | Method::FzGsa => {
            let mut p = PhaseProfile::Analytic(spm_profile(&scene.profile, band));
            if method == Method::FzGsa {
                p = gsa_profile(&scene.profile, band, &settings.gsa, &p)?;
            }
            let w = profile_to_weights(&p, &scene.channel);
            (Some(p), w)
        }
    };
    let weights = match scene.config.phase_bits {
        Some(bits) => quantize_weights(&weights, bits),
        None => weights,
    };
    Ok(Some(Design { profile, weights }))
}

/// Achievable rate of `method` in `scene`.
pub fn method_rate(scene: &Scene, method: Method, settings: &DesignSettings) -> Result<f64> {
    let Some(d) = design(scene, method, settings)? else {
        return Ok(rate_upper_bound(&scene.profile, &scene.link));
    };
    weights_rate(scene, &d.weights, settings.channel_model)
}

/// Achievable rate of fixed weights under `model`.
pub fn weights_rate(scene: &Scene, w: &Weights, model: ChannelModel) -> Result<f64> {
    let freqs = scene.subcarriers();
    let method = match model {
        ChannelModel::Approximate => SpectrumMethod::DiscreteOracle,
        ChannelModel::ExactBs => SpectrumMethod::ExactBs,
    };
    let spec = gain_spectrum(scene, GainSource::Weights(w), &freqs, method)?;
    achievable_rate(&spec, &scene.link, scene.band(), scene.config.subcarriers)
}

/// Quantity varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    /// Transmit power in dBm.
    TxPower,
    /// RIS side length in metres.
    SideLength,
    /// Bandwidth in Hz.
    Bandwidth,
    /// Total BS-RIS-UE distance in metres.
    RouteLength,
    /// Number of BS antennas.
    BsAntennas,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 5] = [
        SweepVariable::TxPower,
        SweepVariable::SideLength,
        SweepVariable::Bandwidth,
        SweepVariable::RouteLength,
        SweepVariable::BsAntennas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::TxPower => "tx_power",
            SweepVariable::SideLength => "D",
            SweepVariable::Bandwidth => "B",
            SweepVariable::RouteLength => "route_length",
            SweepVariable::BsAntennas => "N_BS",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        SweepVariable::ALL.into_iter().find(|v| v.name() == s)
    }

    /// `config` with this variable set to `value`.
    pub fn apply(self, config: &SystemConfig, value: f64) -> Result<SystemConfig> {
        let mut c = config.clone();
        match self {
            SweepVariable::TxPower => c.tx_power_dbm = value,
            SweepVariable::SideLength => c = c.with_side_length(value),
            SweepVariable::Bandwidth => c.bandwidth_hz = value,
            SweepVariable::RouteLength => {}
            SweepVariable::BsAntennas => {
                if !(value >= 1.0) || math::floor(value) != value {
                    return Err(Error::InvalidExperiment(alloc::format!(
                        "BS antenna count must be a positive integer, got {value}"
                    )));
                }
                c.bs_antennas = value as usize;
            }
        }
        c.validate()?;
        Ok(c)
    }
}

/// Where trial placements come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlacementSource {
    /// Uniform directions, radii uniform in the ranges.
    Random { bs: DistanceRange, ue: DistanceRange },
    /// The same placement in every trial.
    Fixed(Placement),
}

impl Default for PlacementSource {
    fn default() -> Self {
        PlacementSource::Random {
            bs: DistanceRange::reference(),
            ue: DistanceRange::reference(),
        }
    }
}

/// Share of the route taken by the BS-RIS leg in route-length sweeps.
pub const ROUTE_SPLIT: (f64, f64) = (0.35, 0.65);

/// A full sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub methods: Vec<Method>,
    pub trials: usize,
    pub master_seed: u64,
    pub placements: PlacementSource,
    pub settings: DesignSettings,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidExperiment(String::from(m)));
        if self.values.is_empty() {
            return bad("sweep needs at least one value");
        }
        if self.methods.is_empty() {
            return bad("sweep needs at least one method");
        }
        if self.trials == 0 {
            return bad("sweep needs at least one trial");
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return bad("sweep values must be finite");
        }
        Ok(())
    }

    /// Every `(value index, trial)` pair, in reduction order.
    pub fn tasks(&self) -> Vec<(usize, usize)> {
        (0..self.values.len())
            .flat_map(|v| (0..self.trials).map(move |t| (v, t)))
            .collect()
    }

    /// Placement of `trial` at sweep value `value`.
    pub fn placement(&self, value: f64, trial: usize) -> Result<Placement> {
        let seed = trial_seed(self.master_seed, trial);
        if self.variable == SweepVariable::RouteLength {
            if !(value > 0.0) {
                return Err(Error::InvalidExperiment(alloc::format!(
                    "route length must be positive, got {value}"
                )));
            }
            let leg = DistanceRange::new(ROUTE_SPLIT.0 * value, ROUTE_SPLIT.1 * value);
            let p = sample_placement(seed, leg, DistanceRange::new(1.0, 1.0))?;
            let ue = p.ue * (value - p.bs_distance());
            return Placement::new(p.bs, ue);
        }
        match self.placements {
            PlacementSource::Fixed(p) => Ok(p),
            PlacementSource::Random { bs, ue } => sample_placement(seed, bs, ue),
        }
    }
}

/// Rates of every method in one trial; `Err` cells are recorded, not fatal.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub value_index: usize,
    pub trial: usize,
    pub rates: Vec<(Method, Result<f64>)>,
}

/// Run one `(value, trial)` cell of the sweep.
pub fn run_trial(spec: &ExperimentSpec, config: &SystemConfig, value_index: usize, trial: usize) -> TrialOutcome {
    let value = spec.values[value_index];
    let scene = spec
        .variable
        .apply(config, value)
        .and_then(|c| Scene::new(&c, spec.placement(value, trial)?));
    let rates = spec
        .methods
        .iter()
        .map(|&m| {
            let r = match &scene {
                Ok(s) => method_rate(s, m, &spec.settings),
                Err(e) => Err(e.clone()),
            };
            (m, r)
        })
        .collect();
    TrialOutcome {
        value_index,
        trial,
        rates,
    }
}

/// Mean rate of one (value, method) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub value: f64,
    pub method: Method,
    pub mean_rate_bps: f64,
    /// Standard error of the mean; 0 with a single trial.
    pub stderr: f64,
    /// Trials that produced a rate.
    pub trials: usize,
    pub errors: Vec<(usize, Error)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub variable: SweepVariable,
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn cell(&self, value: f64, method: Method) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.value == value && c.method == method)
    }

    /// Mean rates of `method` in value order.
    pub fn series(&self, method: Method) -> Vec<f64> {
        self.cells
            .iter()
            .filter(|c| c.method == method)
            .map(|c| c.mean_rate_bps)
            .collect()
    }
}

/// Average the outcomes in `(value, method, trial)` order, independent of
/// the order in which they were produced.
pub fn reduce(spec: &ExperimentSpec, outcomes: &[TrialOutcome]) -> SweepTable {
    let mut sorted: Vec<&TrialOutcome> = outcomes.iter().collect();
    sorted.sort_by_key(|o| (o.value_index, o.trial));
    let mut cells = Vec::with_capacity(spec.values.len() * spec.methods.len());
    for (vi, &value) in spec.values.iter().enumerate() {
        for (mi, &method) in spec.methods.iter().enumerate() {
            let mut rates = Vec::new();
            let mut errors = Vec::new();
            for o in sorted.iter().filter(|o| o.value_index == vi) {
                match &o.rates[mi].1 {
                    Ok(r) => rates.push(*r),
                    Err(e) => errors.push((o.trial, e.clone())),
                }
            }
            let n = rates.len();
            let mean = if n > 0 { rates.iter().sum::<f64>() / n as f64 } else { f64::NAN };
            let stderr = if n > 1 {
                let var = rates.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64;
                sqrt(var / n as f64)
            } else {
                0.0
            };
            cells.push(SweepCell {
                value,
                method,
                mean_rate_bps: mean,
                stderr,
                trials: n,
                errors,
            });
        }
    }
    SweepTable {
        variable: spec.variable,
        cells,
    }
}

/// Sequential sweep.
pub fn run_sweep(spec: &ExperimentSpec, config: &SystemConfig) -> Result<SweepTable> {
    spec.validate()?;
    let outcomes: Vec<TrialOutcome> = spec
        .tasks()
        .into_iter()
        .map(|(v, t)| run_trial(spec, config, v, t))
        .collect();
    Ok(reduce(spec, &outcomes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::narrowband_spectrum;
    use crate::beamformers::SpmProfile;

    fn small_scene() -> Scene {
        let cfg = SystemConfig::default().with_side_length(0.25);
        Scene::new(&cfg, Placement::reference()).unwrap()
    }

    #[test]
    fn empty_grid_gives_empty_spectrum() {
        let s = small_scene();
        let w = narrowband_phases(&s.channel, s.config.carrier_hz);
        for m in [SpectrumMethod::DiscreteOracle, SpectrumMethod::Ideal] {
            assert!(gain_spectrum(&s, GainSource::Weights(&w), &[], m).unwrap().is_empty());
        }
    }

    #[test]
    fn carrier_phase_fast_path_matches_narrowband_spectrum() {
        let s = small_scene();
        let p = PhaseProfile::Analytic(SpmProfile::carrier(s.config.carrier_hz));
        let freqs = frequency_grid(29.5e9, 30.5e9, 41);
        let fast = gain_spectrum(&s, GainSource::Profile(&p), &freqs, SpectrumMethod::FresnelFast).unwrap();
        let nb = narrowband_spectrum(&s.profile, &freqs);
        for ((f, a), b) in freqs.iter().zip(&fast.gains).zip(&nb.gains) {
            let carrier = (s.config.carrier_hz / f).powi(2);
            let rotated = b * Complex64::from_polar(carrier, 0.0);
            // V(f - f_c) carries e^{-j2pi(f - f_c)t}; the fast path carries
            // e^{j2pi f_c t} e^{-j2pi f t}, the same phase.
            assert!((a - rotated).norm() <= 1e-9 * b.norm().max(1e-30), "{f}");
        }
    }

    #[test]
    fn fast_path_rejects_raw_weights() {
        let s = small_scene();
        let w = Weights::zeros(s.grid.len());
        assert!(matches!(
            gain_spectrum(&s, GainSource::Weights(&w), &[30e9], SpectrumMethod::FresnelFast),
            Err(Error::UnsupportedSource)
        ));
    }

    #[test]
    fn zero_gain_zero_rate() {
        let band = Band::new(30e9, 1.5e9);
        let freqs = band.subcarriers(16);
        let spec = GainSpectrum {
            gains: alloc::vec![Complex64::new(0.0, 0.0); freqs.len()],
            freqs,
            method: SpectrumMethod::DiscreteOracle,
        };
        let lb = LinkBudget::new(1e-2, 1e-20, band.width_hz).unwrap();
        assert_eq!(achievable_rate(&spec, &lb, band, 16).unwrap(), 0.0);
    }

    #[test]
    fn ideal_spectrum_attains_the_bound() {
        let s = small_scene();
        let freqs = s.subcarriers();
        let spec = gain_spectrum(&s, GainSource::Weights(&Weights::zeros(0)), &freqs, SpectrumMethod::Ideal).unwrap();
        let r = achievable_rate(&spec, &s.link, s.band(), s.config.subcarriers).unwrap();
        let ub = rate_upper_bound(&s.profile, &s.link);
        assert!((r - ub).abs() <= 1e-9 * ub);
    }

    #[test]
    fn coverage_is_checked() {
        let band = Band::new(30e9, 1.5e9);
        let freqs = frequency_grid(29.5e9, 30.5e9, 11);
        let spec = GainSpectrum {
            gains: alloc::vec![Complex64::new(1.0, 0.0); freqs.len()],
            freqs,
            method: SpectrumMethod::DiscreteOracle,
        };
        let lb = LinkBudget::new(1e-2, 1e-20, band.width_hz).unwrap();
        assert!(matches!(
            achievable_rate(&spec, &lb, band, 8),
            Err(Error::InsufficientCoverage { .. })
        ));
        let wide = GainSpectrum {
            freqs: frequency_grid(29e9, 31e9, 101),
            gains: alloc::vec![Complex64::new(1.0, 0.0); 101],
            method: SpectrumMethod::DiscreteOracle,
        };
        let flat = achievable_rate(&wide, &lb, band, 8).unwrap();
        let want = band.width_hz * log2(1.0 + lb.signal_psd() / lb.noise_psd_w_hz);
        assert!((flat - want).abs() < 1e-9 * want);
    }

    #[test]
    fn trial_seeds_are_distinct_and_stable() {
        let a: Vec<u64> = (0..1000).map(|t| trial_seed(7, t)).collect();
        let mut b = a.clone();
        b.sort_unstable();
        b.dedup();
        assert_eq!(b.len(), a.len());
        assert_eq!(a[3], trial_seed(7, 3));
        assert_ne!(trial_seed(7, 3), trial_seed(8, 3));
    }

    fn tiny_spec(methods: Vec<Method>) -> (ExperimentSpec, SystemConfig) {
        let cfg = SystemConfig {
            subcarriers: 16,
            ..SystemConfig::default().with_side_length(0.1)
        };
        let spec = ExperimentSpec {
            variable: SweepVariable::TxPower,
            values: alloc::vec![0.0, 10.0],
            methods,
            trials: 3,
            master_seed: 42,
            placements: PlacementSource::default(),
            settings: DesignSettings {
                vsa_subarrays: 2,
                ..DesignSettings::default()
            },
        };
        (spec, cfg)
    }

    #[test]
    fn single_trial_matches_direct_pipeline() {
        let (mut spec, cfg) = tiny_spec(alloc::vec![Method::FzSpm]);
        spec.trials = 1;
        spec.placements = PlacementSource::Fixed(Placement::reference());
        let table = run_sweep(&spec, &cfg).unwrap();
        let c = SweepVariable::TxPower.apply(&cfg, 10.0).unwrap();
        let scene = Scene::new(&c, Placement::reference()).unwrap();
        let direct = method_rate(&scene, Method::FzSpm, &spec.settings).unwrap();
        assert_eq!(table.cell(10.0, Method::FzSpm).unwrap().mean_rate_bps, direct);
    }

    #[test]
    fn sweep_is_deterministic_and_order_free() {
        let (spec, cfg) = tiny_spec(alloc::vec![Method::Narrowband, Method::Vsa, Method::UpperBound]);
        let a = run_sweep(&spec, &cfg).unwrap();
        let b = run_sweep(&spec, &cfg).unwrap();
        assert_eq!(a, b);
        let mut outcomes: Vec<TrialOutcome> = spec
            .tasks()
            .into_iter()
            .map(|(v, t)| run_trial(&spec, &cfg, v, t))
            .collect();
        outcomes.reverse();
        assert_eq!(reduce(&spec, &outcomes), a);
    }

    #[test]
    fn rate_grows_with_power_and_stays_below_bound() {
        let (spec, cfg) = tiny_spec(alloc::vec![Method::Narrowband, Method::FzSpm, Method::UpperBound]);
        let t = run_sweep(&spec, &cfg).unwrap();
        for m in [Method::Narrowband, Method::FzSpm] {
            let s = t.series(m);
            assert!(s[1] >= s[0]);
            for (r, ub) in s.iter().zip(t.series(Method::UpperBound)) {
                assert!(*r <= ub * 1.001, "{m:?}: {r} > {ub}");
            }
        }
    }

    #[test]
    fn route_length_placements_have_the_requested_length() {
        let (mut spec, _) = tiny_spec(alloc::vec![Method::Narrowband]);
        spec.variable = SweepVariable::RouteLength;
        for t in 0..20 {
            let p = spec.placement(200.0, t).unwrap();
            assert!((p.bs_distance() + p.ue_distance() - 200.0).abs() < 1e-9);
            assert!(p.bs_distance() >= 70.0 - 1e-9 && p.bs_distance() <= 130.0 + 1e-9);
        }
    }

    #[test]
    fn cell_errors_are_recorded() {
        let (mut spec, cfg) = tiny_spec(alloc::vec![Method::Vsa, Method::Narrowband]);
        spec.settings.vsa_subarrays = 7;
        let t = run_sweep(&spec, &cfg).unwrap();
        let vsa = t.cell(0.0, Method::Vsa).unwrap();
        assert_eq!(vsa.trials, 0);
        assert_eq!(vsa.errors.len(), 3);
        assert_eq!(t.cell(0.0, Method::Narrowband).unwrap().trials, 3);
    }

    #[test]
    fn invalid_specs_are_rejected() {
        let (mut spec, cfg) = tiny_spec(alloc::vec![]);
        assert!(run_sweep(&spec, &cfg).is_err());
        spec.methods.push(Method::Narrowband);
        spec.trials = 0;
        assert!(run_sweep(&spec, &cfg).is_err());
    }
}
