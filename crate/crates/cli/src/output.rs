//! CSV writers. Floats use Rust's shortest round-trip formatting.

use std::io::Write;

use fzbeam::analysis::GammaSample;
use fzbeam::channel::Weights;
use fzbeam::evaluation::SweepTable;
use fzbeam::fresnel::IntensityProfile;
use fzbeam::scenario::ElementGrid;

pub type CsvResult = Result<(), csv::Error>;

pub fn float(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

pub fn write_weights<W: Write>(out: W, grid: &ElementGrid, phases: &Weights, quantized: &Weights) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "n1", "n2", "phi_rad", "phi_quantized"])?;
    for (n, (p, q)) in phases.phases().iter().zip(quantized.phases()).enumerate() {
        let (i1, i2) = grid.coords(n);
        w.write_record([n.to_string(), i1.to_string(), i2.to_string(), float(*p), float(*q)])?;
    }
    w.flush()?;
    Ok(())
}

/// `f_hz` followed by one gain-power column per entry of `columns`.
pub fn write_spectrum<W: Write>(out: W, freqs: &[f64], columns: &[(String, Vec<f64>)]) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![String::from("f_hz")];
    header.extend(columns.iter().map(|(n, _)| n.clone()));
    w.write_record(&header)?;
    for (k, f) in freqs.iter().enumerate() {
        let mut row = vec![float(*f)];
        row.extend(columns.iter().map(|(_, c)| float(c[k])));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep<W: Write>(out: W, table: &SweepTable) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["sweep_value", "method", "mean_rate_bps", "stderr", "trials"])?;
    for c in &table.cells {
        w.write_record([
            float(c.value),
            c.method.name().to_string(),
            float(c.mean_rate_bps),
            float(c.stderr),
            c.trials.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// `gamma` is empty when the direction factor vanishes.
pub fn write_gamma<W: Write>(out: W, samples: &[GammaSample]) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["id", "iota", "b3db_exact", "gamma"])?;
    for s in samples {
        w.write_record([
            s.id.to_string(),
            float(s.metrics.iota),
            float(s.metrics.b3db_exact),
            opt(s.metrics.gamma),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_profile<W: Write>(out: W, profile: &IntensityProfile) -> CsvResult {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["a_m", "t_s", "v", "v_t"])?;
    let t = profile.t_grid();
    for (i, (v, vt)) in profile.v.iter().zip(profile.v_t()).enumerate() {
        w.write_record([float(profile.a_grid.at(i)), float(t.at(i)), float(*v), float(vt)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fzbeam::evaluation::{Method, SweepCell, SweepVariable};

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 30e9, 1.0119e-3, -170.0, 5e-324, f64::MAX] {
            assert_eq!(float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(float(1.5e9), "1500000000.0");
    }

    #[test]
    fn sweep_csv_layout() {
        let table = SweepTable {
            variable: SweepVariable::TxPower,
            cells: vec![SweepCell {
                value: 10.0,
                method: Method::FzSpm,
                mean_rate_bps: 2.5e9,
                stderr: 0.0,
                trials: 1,
                errors: vec![],
            }],
        };
        let mut buf = Vec::new();
        write_sweep(&mut buf, &table).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "sweep_value,method,mean_rate_bps,stderr,trials\n10.0,fz-spm,2500000000.0,0.0,1\n"
        );
    }

    #[test]
    fn spectrum_csv_has_column_per_method() {
        let mut buf = Vec::new();
        let cols = vec![("a".to_string(), vec![1.0, 2.0]), ("b".to_string(), vec![3.0, 4.0])];
        write_spectrum(&mut buf, &[1.0, 2.0], &cols).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "f_hz,a,b\n1.0,1.0,3.0\n2.0,2.0,4.0\n");
    }
}
