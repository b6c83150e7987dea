//! Run artifacts: report.json (versioned schema, 12 significant digits),
//! patterns.csv, samples.csv, and the output-directory lock.

use serde::Serialize;
use serde_json::Value;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::kicks::{FidelityRecord, KickSpectrum};
use crate::montecarlo::SampleRun;
use crate::patterns::{FringeReport, Pattern};

pub const SCHEMA_VERSION: u32 = 1;

/// Everything report.json carries for one run.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub experiment: String,
    pub basis: String,
    pub n: usize,
    /// Geometry echo: slit spacing/width or momentum peaks.
    pub geometry: Value,
    /// Flight time used (absent for the momentum-space transform).
    pub flight_time: Option<f64>,
    /// Detector outcome probabilities in the active basis.
    pub probabilities: Vec<f64>,
    pub unconditioned: FringeReport,
    /// One fringe report per outcome, shifts relative to outcome 0.
    pub conditioned: Vec<FringeReport>,
    /// Folded kick table (slit experiments).
    pub kick_spectrum: Option<KickSpectrum>,
    /// Kick-representation fidelity (Fourier basis only).
    pub fidelity: Option<FidelityRecord>,
    /// Position displacement x0 (momentum-space experiment only).
    pub position_kick: Option<f64>,
}

/// Round to 12 significant decimal digits.
pub fn sig12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().unwrap()
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) => {
            if let Some(f) = n.as_f64() {
                if n.is_f64() {
                    if let Some(r) = serde_json::Number::from_f64(sig12(f)) {
                        *n = r;
                    }
                }
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serialize with every float rounded to 12 significant digits.
pub fn to_rounded_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)
        .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))?;
    round_value(&mut v);
    serde_json::to_string_pretty(&v)
        .map_err(|e| Error::InvalidConfig(format!("serialization failed: {e}")))
}

/// Exclusive claim on an output directory, dropped on scope exit.
///
/// Concurrent runs must use distinct directories; a stale lock from a
/// crashed run has to be removed by hand.
pub struct OutputLock {
    path: PathBuf,
}

impl OutputLock {
    pub fn acquire(dir: &Path) -> Result<OutputLock> {
        fs::create_dir_all(dir)?;
        let path = dir.join(".kicksim.lock");
        match fs::OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(_) => Ok(OutputLock { path }),
            Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::OutputLocked(
                format!("{} is in use (lock file {})", dir.display(), path.display()),
            )),
            Err(e) => Err(e.into()),
        }
    }
}

impl Drop for OutputLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}

pub fn write_report(dir: &Path, report: &Report) -> Result<()> {
    let json = to_rounded_json(report)?;
    fs::write(dir.join("report.json"), json + "\n")?;
    Ok(())
}

/// patterns.csv: x, unconditioned, conditioned_0 ... conditioned_{n-1}.
pub fn write_patterns(dir: &Path, unconditioned: &Pattern, conditioned: &[Pattern]) -> Result<()> {
    let mut f = fs::File::create(dir.join("patterns.csv"))?;
    write!(f, "x,unconditioned")?;
    for j in 0..conditioned.len() {
        write!(f, ",conditioned_{j}")?;
    }
    writeln!(f)?;
    let grid = unconditioned.grid;
    for i in 0..grid.n_points {
        write!(f, "{:.12e},{:.12e}", grid.value(i), unconditioned.intensity[i])?;
        for c in conditioned {
            write!(f, ",{:.12e}", c.intensity[i])?;
        }
        writeln!(f)?;
    }
    Ok(())
}

/// samples.csv: outcome, x per detection event.
pub fn write_samples(dir: &Path, run: &SampleRun) -> Result<()> {
    let mut f = fs::File::create(dir.join("samples.csv"))?;
    writeln!(f, "outcome,x")?;
    for r in &run.records {
        writeln!(f, "{},{:.12e}", r.outcome, r.x)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn sig12_rounds_and_preserves() {
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(1.0), 1.0);
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(sig12(123456789012345.0), 123456789012000.0);
        assert_eq!(sig12(-2.5e-17), -2.5e-17);
    }

    #[test]
    fn rounded_json_rounds_nested_floats() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: Vec<f64>,
        }
        let s = S {
            a: 1.0 / 3.0,
            b: vec![2.0 / 3.0],
        };
        let json = to_rounded_json(&s).unwrap();
        assert!(json.contains("0.333333333333"), "{json}");
        assert!(json.contains("0.666666666667"), "{json}");
    }

    #[test]
    fn lock_is_exclusive_and_released() {
        let dir = tempdir().unwrap();
        let lock = OutputLock::acquire(dir.path()).unwrap();
        assert!(matches!(
            OutputLock::acquire(dir.path()),
            Err(Error::OutputLocked(_))
        ));
        drop(lock);
        assert!(OutputLock::acquire(dir.path()).is_ok());
    }
}
