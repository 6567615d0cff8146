use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use fzbeam_cli::config::parse_config_str;
use fzbeam_cli::manifest::RunManifest;
use tempfile::TempDir;

const SMALL: &str = "side_length_m = 0.25\ntrials = 2\nsweep_values = [0.0, 10.0]\nseed = 9\n\
                     methods = [\"narrowband\", \"fz-spm\", \"upper-bound\"]\n";

fn fzbeam(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fzbeam"))
        .args(args)
        .arg("--out")
        .arg(dir)
        .env_remove("FZBEAM_CONFIG")
        .env_remove("FZBEAM_SEED")
        .env_remove("FZBEAM_METHOD")
        .env_remove("FZBEAM_THREADS")
        .env_remove("FZBEAM_QUANTIZE_BITS")
        .env_remove("FZBEAM_OUT")
        .output()
        .unwrap()
}

fn ok(o: &Output) {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.toml");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn manifest(path: &Path) -> RunManifest {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn unknown_subcommand_prints_usage_and_fails() {
    let d = TempDir::new().unwrap();
    let o = fzbeam(d.path(), &["beamsweep"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = fzbeam(d.path(), &[]);
    assert!(!o.status.success());
}

#[test]
fn invalid_config_fails_with_line() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "carrier_hz = 30e9\nbandwidth_hz = 70e9\n");
    let o = fzbeam(d.path(), &["profile", "--config", &cfg]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 2"), "{err}");
}

#[test]
fn rate_sweep_is_reproducible_and_rerunnable_from_its_manifest() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let c = TempDir::new().unwrap();
    let cfg = write_config(a.path(), SMALL);
    ok(&fzbeam(a.path(), &["rate-sweep", "--config", &cfg, "--threads", "3"]));
    ok(&fzbeam(b.path(), &["rate-sweep", "--config", &cfg, "--threads", "1"]));
    let first = fs::read(a.path().join("sweep.csv")).unwrap();
    assert_eq!(first, fs::read(b.path().join("sweep.csv")).unwrap());

    let text = String::from_utf8(first.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("sweep_value,method,mean_rate_bps,stderr,trials"));
    assert_eq!(lines.count(), 2 * 3);

    let m = manifest(&a.path().join("sweep.csv.manifest.json"));
    assert_eq!(m.command, "rate-sweep");
    assert_eq!(m.seed, 9);
    assert!(m.decisions.iter().any(|d| d.starts_with("bandwidth_hz")));
    let again = write_config(c.path(), &m.config_toml);
    ok(&fzbeam(c.path(), &["rate-sweep", "--config", &again]));
    assert_eq!(first, fs::read(c.path().join("sweep.csv")).unwrap());
}

#[test]
fn flag_beats_env_beats_file() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "side_length_m = 0.25\nseed = 1\ngamma_placements = 2\n");
    let seed_of = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fzbeam"));
        cmd.args(["gamma-study", "--config", &cfg, "--out"]).arg(d.path());
        cmd.env_remove("FZBEAM_SEED");
        if let Some(e) = env {
            cmd.env("FZBEAM_SEED", e);
        }
        if let Some(f) = flag {
            cmd.args(["--seed", f]);
        }
        ok(&cmd.output().unwrap());
        manifest(&d.path().join("gamma.csv.manifest.json")).seed
    };
    assert_eq!(seed_of(None, None), 1);
    assert_eq!(seed_of(Some("2"), None), 2);
    assert_eq!(seed_of(Some("2"), Some("3")), 3);
}

#[test]
fn spectrum_has_a_column_per_method() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "spectrum_points = 41\n");
    ok(&fzbeam(d.path(), &["spectrum", "--config", &cfg]));
    let text = fs::read_to_string(d.path().join("spectrum.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("f_hz,narrowband,vsa,fz-spm,fz-gsa,upper-bound,optimal"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 41);
    assert!((rows[0][0] - 28.5e9).abs() < 1.0 && (rows[40][0] - 31.5e9).abs() < 1.0);
    // Narrowband peaks at the carrier; the bounds are flat in band and zero outside.
    let peak = rows.iter().max_by(|a, b| a[1].total_cmp(&b[1])).unwrap();
    assert!((peak[0] - 30e9).abs() < 0.05e9);
    assert_eq!(rows[0][5], 0.0);
    assert_eq!(rows[20][5], rows[20][6]);
}

#[test]
fn design_writes_weights_and_quantized_phases() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "side_length_m = 0.25\n");
    ok(&fzbeam(d.path(), &["design", "--config", &cfg, "--method", "fz-spm,vsa", "--quantize-bits", "2"]));
    for name in ["weights_fz-spm.csv", "weights_vsa.csv"] {
        let text = fs::read_to_string(d.path().join(name)).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,n1,n2,phi_rad,phi_quantized"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 50 * 50);
        let levels = [0.0, std::f64::consts::FRAC_PI_2, std::f64::consts::PI, 1.5 * std::f64::consts::PI];
        for r in rows {
            let q: f64 = r.rsplit(',').next().unwrap().parse().unwrap();
            assert!(levels.iter().any(|l| (q - l).abs() < 1e-12), "{q}");
        }
        let m = manifest(&d.path().join(format!("{name}.manifest.json")));
        assert!(m.config_toml.contains("phase_bits = 2"));
        assert!(parse_config_str(&m.config_toml).unwrap().run.experiment.methods.len() == 2);
    }
    let o = fzbeam(d.path(), &["design", "--config", &cfg, "--method", "optimal"]);
    assert!(!o.status.success());
}

#[test]
fn gamma_study_and_profile_write_csv() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "side_length_m = 0.5\ngamma_placements = 5\n");
    ok(&fzbeam(d.path(), &["gamma-study", "--config", &cfg]));
    let text = fs::read_to_string(d.path().join("gamma.csv")).unwrap();
    assert!(text.starts_with("id,iota,b3db_exact,gamma\n"));
    assert_eq!(text.lines().count(), 6);

    ok(&fzbeam(d.path(), &["profile", "--config", &cfg]));
    let text = fs::read_to_string(d.path().join("profile.csv")).unwrap();
    assert!(text.starts_with("a_m,t_s,v,v_t\n"));
    for l in text.lines().skip(1) {
        let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
        assert!(v[2] >= 0.0);
        assert!((v[1] - 2.0 * v[0] / fzbeam::SPEED_OF_LIGHT).abs() <= 1e-15 * v[1]);
    }
}

#[test]
fn bad_method_flag_fails() {
    let d = TempDir::new().unwrap();
    let o = fzbeam(d.path(), &["profile", "--method", "nope"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown method"));
}
