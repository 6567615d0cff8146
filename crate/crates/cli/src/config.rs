//! Run configuration files.
//!
//! A config file is flat TOML: one `key = value` per line, values being
//! numbers, quoted strings or arrays of either. Every key is optional; a
//! missing key takes its default and the default is recorded so the run
//! manifest can list it. Unknown keys are rejected.
//!
//! | key | meaning | default |
//! |-----|---------|---------|
//! | `carrier_hz` | carrier `f_c` | `30e9` |
//! | `bandwidth_hz` | band `B` | `1.5e9` |
//! | `subcarriers` | rate subcarriers `K` | `128` |
//! | `side_length_m` | RIS side `D` | `1.0` |
//! | `spacing_m` | element spacing `d` | half wavelength |
//! | `n1`, `n2` | elements per side | `floor(D/d)` |
//! | `bs_antennas` | `N_BS` | `1` |
//! | `noise_psd_dbm_hz` | noise PSD | `-170` |
//! | `tx_power_dbm` | transmit power | `10` |
//! | `phase_bits` | phase resolution | continuous |
//! | `seed` | master seed, below `2^63` | `0` |
//! | `methods` | method names | all |
//! | `trials` | Monte Carlo trials | `20` |
//! | `sweep_variable` | `tx_power`, `D`, `B`, `route_length`, `N_BS` | `tx_power` |
//! | `sweep_values` | sweep points | `[0, 5, 10, 15, 20]` |
//! | `bs_distance_m`, `ue_distance_m` | random radius range `[lo, hi]` | `[7, 13]` |
//! | `bs_position_m`, `ue_position_m` | fixed placement `[x, y, z]` | unset |
//! | `vsa_subarrays` | VSA `N_sub` | `2` |
//! | `gsa_samples` | GSA `N_S` | `ceil(B dt) + 1` |
//! | `gsa_freq_samples` | GSA `K_f` | `4 N_S` |
//! | `gsa_extended_bandwidth_hz` | GSA `B'` | `1.5 B` |
//! | `gsa_max_iterations` | GSA `m_max` | `100` |
//! | `gsa_ridge` | GSA ridge | scaled to `A` |
//! | `gsa_tolerance` | GSA stopping tolerance | `1e-6` |
//! | `channel_model` | `approximate` or `exact-bs` | `approximate` |
//! | `gamma_placements` | Gamma study size | `300` |
//! | `spectrum_points` | spectrum samples | `401` |
//! | `spectrum_span_hz` | spectrum span around `f_c` | `2 B` |

use std::fmt;
use std::path::Path;

use fzbeam::beamformers::GsaParams;
use fzbeam::evaluation::{
    ChannelModel, DesignSettings, ExperimentSpec, Method, PlacementSource, SweepVariable, DEFAULT_VSA_SUBARRAYS,
};
use fzbeam::scenario::{elements_per_side, half_wavelength, DistanceRange, Placement, Point3, SystemConfig};
use serde::{Deserialize, Serialize};

/// Raw file contents; `None` means "use the default".
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub carrier_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subcarriers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side_length_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spacing_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_antennas: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noise_psd_dbm_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tx_power_dbm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_bits: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_variable: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep_values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_distance_m: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ue_distance_m: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bs_position_m: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ue_position_m: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vsa_subarrays: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gsa_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gsa_freq_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gsa_extended_bandwidth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gsa_max_iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gsa_ridge: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gsa_tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub channel_model: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_placements: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum_points: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectrum_span_hz: Option<f64>,
}

pub const DEFAULT_TRIALS: usize = 20;
pub const DEFAULT_SWEEP_VALUES: [f64; 5] = [0.0, 5.0, 10.0, 15.0, 20.0];
pub const DEFAULT_GAMMA_PLACEMENTS: usize = 300;
pub const DEFAULT_SPECTRUM_POINTS: usize = 401;

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub system: SystemConfig,
    pub experiment: ExperimentSpec,
    /// Placement used by single-placement commands.
    pub placement: Placement,
    pub gamma_placements: usize,
    pub spectrum_points: usize,
    pub spectrum_span_hz: f64,
}

/// A resolved run plus the defaults it relied on.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub run: RunConfig,
    /// One entry per key left at its default.
    pub defaults: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    /// 1-based line of the offending key, when it appears in the file.
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// Line on which `key` is assigned.
fn key_line(text: &str, key: &str) -> Option<usize> {
    text.lines().position(|l| {
        let l = l.trim_start();
        l.strip_prefix(key)
            .map(|rest| rest.trim_start().starts_with('='))
            .unwrap_or(false)
    })
    .map(|i| i + 1)
}

pub fn parse_config_file(path: &Path) -> Result<Resolved, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
        line: None,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<Resolved, ConfigError> {
    let file: FileConfig = toml::from_str(text).map_err(|e| ConfigError {
        line: e.span().map(|s| text[..s.start].matches('\n').count() + 1),
        message: e.message().to_string(),
    })?;
    resolve(&file).map_err(|(key, message)| ConfigError {
        line: key.and_then(|k| key_line(text, k)),
        message,
    })
}

type KeyError = (Option<&'static str>, String);

fn at(key: &'static str, message: String) -> KeyError {
    (Some(key), format!("{key}: {message}"))
}

fn positive(key: &'static str, v: f64) -> Result<f64, KeyError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(at(key, format!("must be positive and finite, got {v}")))
    }
}

fn range(key: &'static str, r: [f64; 2]) -> Result<DistanceRange, KeyError> {
    if r[0] > 0.0 && r[0] <= r[1] && r[1].is_finite() {
        Ok(DistanceRange::new(r[0], r[1]))
    } else {
        Err(at(key, format!("need 0 < lo <= hi, got [{}, {}]", r[0], r[1])))
    }
}

fn point(p: [f64; 3]) -> Point3 {
    Point3::new(p[0], p[1], p[2])
}

pub fn parse_methods(names: &[String]) -> Result<Vec<Method>, String> {
    if names.is_empty() {
        return Err("method list is empty".into());
    }
    names
        .iter()
        .map(|n| {
            Method::parse(n.trim()).ok_or_else(|| {
                let known: Vec<&str> = Method::ALL.iter().map(|m| m.name()).collect();
                format!("unknown method '{n}' (known: {})", known.join(", "))
            })
        })
        .collect()
}

pub fn parse_channel_model(s: &str) -> Option<ChannelModel> {
    match s {
        "approximate" => Some(ChannelModel::Approximate),
        "exact-bs" => Some(ChannelModel::ExactBs),
        _ => None,
    }
}

pub fn channel_model_name(m: ChannelModel) -> &'static str {
    match m {
        ChannelModel::Approximate => "approximate",
        ChannelModel::ExactBs => "exact-bs",
    }
}

pub fn resolve(file: &FileConfig) -> Result<Resolved, KeyError> {
    let mut defaults = Vec::new();
    let mut pick = |key: &str, v: Option<f64>, d: f64| {
        v.unwrap_or_else(|| {
            defaults.push(format!("{key} = {d}"));
            d
        })
    };
    let base = SystemConfig::default();
    let carrier_hz = positive("carrier_hz", pick("carrier_hz", file.carrier_hz, base.carrier_hz))?;
    let bandwidth_hz = positive("bandwidth_hz", pick("bandwidth_hz", file.bandwidth_hz, base.bandwidth_hz))?;
    if bandwidth_hz >= 2.0 * carrier_hz {
        return Err(at(
            "bandwidth_hz",
            format!("bandwidth {bandwidth_hz} Hz must be below twice the carrier {carrier_hz} Hz"),
        ));
    }
    let side_length_m = positive("side_length_m", pick("side_length_m", file.side_length_m, base.side_length_m))?;
    let spacing_m = positive(
        "spacing_m",
        pick("spacing_m", file.spacing_m, half_wavelength(carrier_hz)),
    )?;
    let tx_power_dbm = pick("tx_power_dbm", file.tx_power_dbm, base.tx_power_dbm);
    let noise_psd_dbm_hz = pick("noise_psd_dbm_hz", file.noise_psd_dbm_hz, base.noise_psd_dbm_hz);
    let span = pick("spectrum_span_hz", file.spectrum_span_hz, 2.0 * bandwidth_hz);
    let spectrum_span_hz = positive("spectrum_span_hz", span)?;

    let mut count = |key: &str, v: Option<usize>, d: usize| {
        v.unwrap_or_else(|| {
            defaults.push(format!("{key} = {d}"));
            d
        })
    };
    let n_side = elements_per_side(side_length_m, spacing_m);
    let system = SystemConfig {
        carrier_hz,
        bandwidth_hz,
        subcarriers: count("subcarriers", file.subcarriers, base.subcarriers),
        side_length_m,
        spacing_m,
        n1: count("n1", file.n1, n_side),
        n2: count("n2", file.n2, n_side),
        bs_antennas: count("bs_antennas", file.bs_antennas, base.bs_antennas),
        noise_psd_dbm_hz,
        tx_power_dbm,
        phase_bits: file.phase_bits,
    };
    let trials = count("trials", file.trials, DEFAULT_TRIALS);
    let vsa_subarrays = count("vsa_subarrays", file.vsa_subarrays, DEFAULT_VSA_SUBARRAYS);
    let gamma_placements = count("gamma_placements", file.gamma_placements, DEFAULT_GAMMA_PLACEMENTS);
    let spectrum_points = count("spectrum_points", file.spectrum_points, DEFAULT_SPECTRUM_POINTS);
    let gsa_defaults = GsaParams::default();
    let max_iterations = count("gsa_max_iterations", file.gsa_max_iterations, gsa_defaults.max_iterations);
    for (key, n) in [
        ("n1", system.n1),
        ("n2", system.n2),
        ("subcarriers", system.subcarriers),
        ("bs_antennas", system.bs_antennas),
        ("trials", trials),
        ("vsa_subarrays", vsa_subarrays),
        ("gamma_placements", gamma_placements),
    ] {
        if n == 0 {
            return Err(at(key, "must be at least 1".into()));
        }
    }
    if system.phase_bits == Some(0) {
        return Err(at("phase_bits", "must be at least 1".into()));
    }
    for (key, n) in [("n1", system.n1), ("n2", system.n2)] {
        if n > n_side + 1 {
            return Err(at(
                key,
                format!("{n} elements at {spacing_m} m do not fit a {side_length_m} m aperture"),
            ));
        }
    }
    system.validate().map_err(|e| (None, e.to_string()))?;

    if file.phase_bits.is_none() {
        defaults.push("phase_bits = continuous".into());
    }
    let master_seed = file.seed.unwrap_or_else(|| {
        defaults.push("seed = 0".into());
        0
    });
    let methods = match &file.methods {
        Some(names) => parse_methods(names).map_err(|m| at("methods", m))?,
        None => {
            defaults.push("methods = all".into());
            Method::ALL.to_vec()
        }
    };
    let variable = match &file.sweep_variable {
        Some(s) => SweepVariable::parse(s).ok_or_else(|| at("sweep_variable", format!("unknown variable '{s}'")))?,
        None => {
            defaults.push("sweep_variable = tx_power".into());
            SweepVariable::TxPower
        }
    };
    let values = match &file.sweep_values {
        Some(v) => v.clone(),
        None => {
            defaults.push(format!("sweep_values = {DEFAULT_SWEEP_VALUES:?}"));
            DEFAULT_SWEEP_VALUES.to_vec()
        }
    };
    let bs_range = match file.bs_distance_m {
        Some(r) => range("bs_distance_m", r)?,
        None => {
            defaults.push("bs_distance_m = [7, 13]".into());
            DistanceRange::reference()
        }
    };
    let ue_range = match file.ue_distance_m {
        Some(r) => range("ue_distance_m", r)?,
        None => {
            defaults.push("ue_distance_m = [7, 13]".into());
            DistanceRange::reference()
        }
    };
    let (placements, placement) = match (file.bs_position_m, file.ue_position_m) {
        (Some(b), Some(u)) => {
            let p = Placement::new(point(b), point(u)).map_err(|e| at("bs_position_m", e.to_string()))?;
            (PlacementSource::Fixed(p), p)
        }
        (None, None) => {
            defaults.push("single-placement commands use the reference placement".into());
            (
                PlacementSource::Random { bs: bs_range, ue: ue_range },
                Placement::reference(),
            )
        }
        (Some(_), None) => return Err(at("bs_position_m", "needs ue_position_m as well".into())),
        (None, Some(_)) => return Err(at("ue_position_m", "needs bs_position_m as well".into())),
    };
    let channel_model = match &file.channel_model {
        Some(s) => parse_channel_model(s).ok_or_else(|| at("channel_model", format!("unknown model '{s}'")))?,
        None => {
            defaults.push("channel_model = approximate".into());
            ChannelModel::Approximate
        }
    };
    for (key, v) in [
        ("gsa_samples", file.gsa_samples),
        ("gsa_freq_samples", file.gsa_freq_samples),
        ("gsa_extended_bandwidth_hz", file.gsa_extended_bandwidth_hz.map(|_| 1)),
        ("gsa_ridge", file.gsa_ridge.map(|_| 1)),
    ] {
        if v.is_none() {
            defaults.push(format!("{key} = auto"));
        }
    }
    let tolerance = file.gsa_tolerance.unwrap_or_else(|| {
        defaults.push(format!("gsa_tolerance = {}", gsa_defaults.tolerance));
        gsa_defaults.tolerance
    });
    let gsa = GsaParams {
        samples: file.gsa_samples,
        freq_samples: file.gsa_freq_samples,
        extended_bandwidth_hz: file.gsa_extended_bandwidth_hz,
        max_iterations,
        ridge: file.gsa_ridge,
        tolerance,
    };
    let experiment = ExperimentSpec {
        variable,
        values,
        methods,
        trials,
        master_seed,
        placements,
        settings: DesignSettings {
            vsa_subarrays,
            gsa,
            channel_model,
        },
    };
    experiment.validate().map_err(|e| {
        let msg = e.to_string();
        let key = if msg.contains("value") {
            "sweep_values"
        } else if msg.contains("method") {
            "methods"
        } else {
            "trials"
        };
        at(key, msg)
    })?;
    if spectrum_points < 2 {
        return Err(at("spectrum_points", format!("need at least 2, got {spectrum_points}")));
    }
    Ok(Resolved {
        run: RunConfig {
            system,
            experiment,
            placement,
            gamma_placements,
            spectrum_points,
            spectrum_span_hz,
        },
        defaults,
    })
}

/// Fully explicit file for `run`; parsing it gives `run` back.
pub fn to_file(run: &RunConfig) -> FileConfig {
    let s = &run.system;
    let e = &run.experiment;
    let g = &e.settings.gsa;
    let (bs_distance_m, ue_distance_m, bs_position_m, ue_position_m) = match e.placements {
        PlacementSource::Random { bs, ue } => (Some([bs.min, bs.max]), Some([ue.min, ue.max]), None, None),
        PlacementSource::Fixed(p) => (None, None, Some([p.bs.x, p.bs.y, p.bs.z]), Some([p.ue.x, p.ue.y, p.ue.z])),
    };
    FileConfig {
        carrier_hz: Some(s.carrier_hz),
        bandwidth_hz: Some(s.bandwidth_hz),
        subcarriers: Some(s.subcarriers),
        side_length_m: Some(s.side_length_m),
        spacing_m: Some(s.spacing_m),
        n1: Some(s.n1),
        n2: Some(s.n2),
        bs_antennas: Some(s.bs_antennas),
        noise_psd_dbm_hz: Some(s.noise_psd_dbm_hz),
        tx_power_dbm: Some(s.tx_power_dbm),
        phase_bits: s.phase_bits,
        seed: Some(e.master_seed),
        methods: Some(e.methods.iter().map(|m| m.name().to_string()).collect()),
        trials: Some(e.trials),
        sweep_variable: Some(e.variable.name().to_string()),
        sweep_values: Some(e.values.clone()),
        bs_distance_m,
        ue_distance_m,
        bs_position_m,
        ue_position_m,
        vsa_subarrays: Some(e.settings.vsa_subarrays),
        gsa_samples: g.samples,
        gsa_freq_samples: g.freq_samples,
        gsa_extended_bandwidth_hz: g.extended_bandwidth_hz,
        gsa_max_iterations: Some(g.max_iterations),
        gsa_ridge: g.ridge,
        gsa_tolerance: Some(g.tolerance),
        channel_model: Some(channel_model_name(e.settings.channel_model).to_string()),
        gamma_placements: Some(run.gamma_placements),
        spectrum_points: Some(run.spectrum_points),
        spectrum_span_hz: Some(run.spectrum_span_hz),
    }
}

pub fn to_toml(run: &RunConfig) -> String {
    toml::to_string(&to_file(run)).expect("flat config always serializes")
}
