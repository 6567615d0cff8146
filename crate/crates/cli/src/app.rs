//! Command-line front end.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use fzbeam::analysis::ideal_gain;
use fzbeam::beamformers::quantize_weights;
use fzbeam::evaluation::{design, frequency_grid, gain_spectrum, GainSource, PlacementSource, Scene, SpectrumMethod};
use fzbeam::scenario::DistanceRange;

use crate::config::{parse_config_file, parse_config_str, parse_methods, Resolved};
use crate::manifest::{unix_now, write_sidecars, RunManifest};
use crate::output;
use crate::sweep::{par_gamma_study, par_sweep, with_threads};

/// Phase resolution of the `phi_quantized` column when none is configured.
pub const DEFAULT_EXPORT_BITS: u32 = 2;

#[derive(Debug, Parser)]
#[command(name = "fzbeam", version, about = "Fresnel-zone wideband RIS beamforming studies")]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. A flag beats its environment variable,
/// which beats the config file.
#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Flat TOML config; every key is optional.
    #[arg(long, global = true, env = "FZBEAM_CONFIG", value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Master seed, below 2^63.
    #[arg(long, global = true, env = "FZBEAM_SEED", value_name = "N",
          value_parser = clap::value_parser!(u64).range(..=i64::MAX as u64))]
    pub seed: Option<u64>,
    /// Output directory, created if missing.
    #[arg(long, global = true, env = "FZBEAM_OUT", value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Worker threads for sweeps; defaults to one per core.
    #[arg(long, global = true, env = "FZBEAM_THREADS", value_name = "N")]
    pub threads: Option<usize>,
    /// Comma-separated methods: narrowband, vsa, fz-spm, fz-gsa, upper-bound, optimal.
    #[arg(long, global = true, env = "FZBEAM_METHOD", value_name = "LIST", value_delimiter = ',')]
    pub method: Option<Vec<String>>,
    /// Phase-shifter resolution in bits.
    #[arg(long, global = true, env = "FZBEAM_QUANTIZE_BITS", value_name = "N")]
    pub quantize_bits: Option<u32>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Weights CSV of each configured method for one placement.
    Design,
    /// Gain power against frequency, one column per method.
    Spectrum,
    /// Mean achievable rate over a sweep.
    RateSweep,
    /// Beam-split metrics over random placements.
    GammaStudy,
    /// Fresnel-zone intensity profile of one placement.
    Profile,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Design => "design",
            Command::Spectrum => "spectrum",
            Command::RateSweep => "rate-sweep",
            Command::GammaStudy => "gamma-study",
            Command::Profile => "profile",
        }
    }
}

/// Config file plus flag overrides.
pub fn resolve_run(common: &CommonArgs) -> anyhow::Result<Resolved> {
    let mut r = match &common.config {
        Some(p) => parse_config_file(p).with_context(|| format!("config {}", p.display()))?,
        None => parse_config_str("").expect("defaults are valid"),
    };
    let mut overridden: Vec<&str> = Vec::new();
    if let Some(seed) = common.seed {
        r.run.experiment.master_seed = seed;
        overridden.push("seed");
    }
    if let Some(m) = &common.method {
        r.run.experiment.methods = parse_methods(m).map_err(anyhow::Error::msg).context("--method")?;
        overridden.push("methods");
    }
    if let Some(bits) = common.quantize_bits {
        if bits == 0 {
            bail!("--quantize-bits: must be at least 1");
        }
        r.run.system.phase_bits = Some(bits);
        overridden.push("phase_bits");
    }
    r.defaults
        .retain(|d| !overridden.iter().any(|k| d.starts_with(&format!("{k} ="))));
    Ok(r)
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = dir.join(name);
    let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(BufWriter::new(f))
}

/// Run one parsed command; returns the files written.
pub fn execute(cli: &Cli, args: Vec<String>) -> anyhow::Result<Vec<PathBuf>> {
    let started = unix_now();
    let resolved = resolve_run(&cli.common)?;
    let run = &resolved.run;
    let out = &cli.common.out;
    std::fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
    let mut manifest = RunManifest::new(cli.command.name(), args, run, &resolved.defaults, started);
    let threads = cli.common.threads;

    match cli.command {
        Command::Design => {
            let mut continuous = run.system.clone();
            continuous.phase_bits = None;
            let scene = Scene::new(&continuous, run.placement)?;
            let bits = run.system.phase_bits.unwrap_or_else(|| {
                manifest
                    .decisions
                    .insert(0, format!("phi_quantized uses {DEFAULT_EXPORT_BITS} bits"));
                DEFAULT_EXPORT_BITS
            });
            let methods: Vec<_> = run.experiment.methods.iter().filter(|m| !m.is_bound()).collect();
            if methods.is_empty() {
                bail!("design: the bounds have no weights; choose a beamforming method");
            }
            for &m in methods {
                let d = design(&scene, m, &run.experiment.settings)
                    .with_context(|| format!("designing {}", m.name()))?
                    .expect("non-bound methods produce weights");
                let name = format!("weights_{}.csv", m.name());
                let q = quantize_weights(&d.weights, bits);
                output::write_weights(create(out, &name)?, &scene.grid, &d.weights, &q)?;
                manifest.outputs.push(name);
            }
        }
        Command::Spectrum => {
            let scene = Scene::new(&run.system, run.placement)?;
            let fc = run.system.carrier_hz;
            let half = run.spectrum_span_hz / 2.0;
            let freqs = frequency_grid(fc - half, fc + half, run.spectrum_points);
            let ideal = ideal_gain(&scene.profile, &run.system);
            let mut columns = Vec::new();
            for &m in &run.experiment.methods {
                let powers = match design(&scene, m, &run.experiment.settings)
                    .with_context(|| format!("designing {}", m.name()))?
                {
                    None => ideal.sample(&freqs).powers(),
                    Some(d) => {
                        gain_spectrum(&scene, GainSource::Weights(&d.weights), &freqs, SpectrumMethod::DiscreteOracle)?
                            .powers()
                    }
                };
                columns.push((m.name().to_string(), powers));
            }
            output::write_spectrum(create(out, "spectrum.csv")?, &freqs, &columns)?;
            manifest.outputs.push("spectrum.csv".into());
        }
        Command::RateSweep => {
            let table = with_threads(threads, || par_sweep(&run.experiment, &run.system))??;
            for c in &table.cells {
                for (trial, e) in &c.errors {
                    manifest.notes.push(format!(
                        "{} = {}, {}, trial {trial}: {e}",
                        table.variable.name(),
                        c.value,
                        c.method.name()
                    ));
                }
            }
            output::write_sweep(create(out, "sweep.csv")?, &table)?;
            manifest.outputs.push("sweep.csv".into());
        }
        Command::GammaStudy => {
            let (bs, ue) = match run.experiment.placements {
                PlacementSource::Random { bs, ue } => (bs, ue),
                PlacementSource::Fixed(_) => (DistanceRange::reference(), DistanceRange::reference()),
            };
            let samples = with_threads(threads, || {
                par_gamma_study(&run.system, run.experiment.master_seed, run.gamma_placements, bs, ue)
            })??;
            output::write_gamma(create(out, "gamma.csv")?, &samples)?;
            manifest.outputs.push("gamma.csv".into());
        }
        Command::Profile => {
            let scene = Scene::new(&run.system, run.placement)?;
            output::write_profile(create(out, "profile.csv")?, &scene.profile)?;
            manifest.outputs.push("profile.csv".into());
        }
    }

    manifest.finished_unix_s = unix_now();
    let mut written: Vec<PathBuf> = manifest.outputs.iter().map(|o| out.join(o)).collect();
    written.extend(write_sidecars(&manifest, out)?);
    Ok(written)
}
