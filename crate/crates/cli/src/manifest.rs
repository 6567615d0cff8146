//! JSON sidecars describing how an output file was produced.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::config::{to_file, RunConfig};

/// Modelling choices the library makes where the source model leaves a gap.
pub const LIBRARY_DECISIONS: &[&str] = &[
    "sinc half-power width Gamma_0 = 0.886",
    "snr per subcarrier = |g_k|^2 P_t / (S_sigma B)",
    "optimal = rate upper bound of each placement",
    "designed weights are scored on the per-element channel sum",
    "spectra are evaluated on the per-element channel sum",
    "fz-gsa sample count N_S = ceil(B dt) + 1 unless gsa_samples is set",
    "fz-gsa starts from fz-spm and keeps its lowest-residual iterate",
    "vsa subarrays are contiguous bands of x rows",
    "route-length sweeps draw the BS leg uniformly from [0.35 L, 0.65 L]",
    "trial seed = splitmix64(seed ^ splitmix64(trial)); every sweep value of a trial shares its placement",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub args: Vec<String>,
    pub seed: u64,
    /// Resolved configuration in config-file syntax; `--config` on this text
    /// reproduces the run.
    pub config_toml: String,
    pub config: serde_json::Value,
    /// Defaults used for keys the config left out, then library choices.
    pub decisions: Vec<String>,
    pub outputs: Vec<String>,
    /// Per-trial failures and similar remarks.
    pub notes: Vec<String>,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
}

pub fn unix_now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

impl RunManifest {
    pub fn new(command: &str, args: Vec<String>, run: &RunConfig, defaults: &[String], started: f64) -> Self {
        let mut decisions: Vec<String> = defaults.to_vec();
        decisions.extend(LIBRARY_DECISIONS.iter().map(|s| s.to_string()));
        Self {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            args,
            seed: run.experiment.master_seed,
            config_toml: crate::config::to_toml(run),
            config: serde_json::to_value(to_file(run)).expect("config serializes"),
            decisions,
            outputs: Vec::new(),
            notes: Vec::new(),
            started_unix_s: started,
            finished_unix_s: started,
        }
    }
}

/// `path` with `.manifest.json` appended.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".manifest.json");
    path.with_file_name(name)
}

/// Write the sidecar of every output listed in `manifest`.
pub fn write_sidecars(manifest: &RunManifest, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    manifest
        .outputs
        .iter()
        .map(|o| {
            let p = sidecar_path(&dir.join(o));
            std::fs::write(&p, &text)?;
            Ok(p)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config_str;

    #[test]
    fn sidecar_name() {
        assert_eq!(sidecar_path(Path::new("out/sweep.csv")), PathBuf::from("out/sweep.csv.manifest.json"));
    }

    #[test]
    fn manifest_lists_defaults_and_reparses() {
        let r = parse_config_str("trials = 2\n").unwrap();
        let m = RunManifest::new("rate-sweep", vec![], &r.run, &r.defaults, 0.0);
        assert!(m.decisions.iter().any(|d| d.starts_with("bandwidth_hz")));
        assert!(!m.decisions.iter().any(|d| d.starts_with("trials")));
        let back: RunManifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(parse_config_str(&back.config_toml).unwrap().run, r.run);
    }
}
