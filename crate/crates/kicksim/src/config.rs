//! Experiment configuration: human-writable TOML with typed keys.
//! Unknown keys are rejected, and every module precondition is
//! re-validated at load so a bad file fails before any work starts.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::propagate::{Mode, PropagationSpec};
use crate::pspace::MomentumPeaks;
use crate::qstate::{Origin, Profile, SlitArray};
use crate::ubasis::{fourier_basis, general_two_slit_basis, UnbiasedBasis, Unitary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    TwoSlit,
    ThreeSlit,
    NSlit,
    MomentumSpace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    WhichWay,
    Fourier,
    GeneralTwoSlit,
    Custom,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlitsSection {
    pub n: Option<usize>,
    #[serde(default = "default_d")]
    pub d: f64,
    /// Defaults to d/20.
    pub sigma: Option<f64>,
    #[serde(default = "default_profile")]
    pub profile: Profile,
    pub origin: Option<Origin>,
}

fn default_d() -> f64 {
    1.0
}

fn default_profile() -> Profile {
    Profile::Gaussian
}

impl Default for SlitsSection {
    fn default() -> Self {
        SlitsSection {
            n: None,
            d: default_d(),
            sigma: None,
            profile: default_profile(),
            origin: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSection {
    #[serde(default = "default_basis_kind")]
    pub kind: BasisKind,
    pub theta1: Option<f64>,
    pub theta2: Option<f64>,
    pub theta3: Option<f64>,
    /// Row-major complex entries as [re, im] pairs, for kind = "custom".
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
}

fn default_basis_kind() -> BasisKind {
    BasisKind::Fourier
}

impl Default for BasisSection {
    fn default() -> Self {
        BasisSection {
            kind: default_basis_kind(),
            theta1: None,
            theta2: None,
            theta3: None,
            matrix: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PropagationSection {
    #[serde(default = "default_mode")]
    pub mode: Mode,
    /// Flight time; defaults to twice the far-field threshold in
    /// Fraunhofer mode and d sigma in Fresnel mode (short enough that
    /// the default grid absorbs the spread without wraparound).
    pub t: Option<f64>,
}

fn default_mode() -> Mode {
    Mode::Fraunhofer
}

impl Default for PropagationSection {
    fn default() -> Self {
        PropagationSection {
            mode: default_mode(),
            t: None,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentumSection {
    pub p1: f64,
    pub p2: f64,
    /// Defaults to (p2 - p1)/20.
    pub width: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloSection {
    #[serde(default = "default_n_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_n_samples() -> usize {
    100_000
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    pub x_min: Option<f64>,
    pub x_max: Option<f64>,
}

fn default_n_points() -> usize {
    4096
}

impl Default for GridSection {
    fn default() -> Self {
        GridSection {
            n_points: default_n_points(),
            x_min: None,
            x_max: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub slits: SlitsSection,
    #[serde(default)]
    pub basis: BasisSection,
    #[serde(default)]
    pub propagation: PropagationSection,
    pub momentum_space: Option<MomentumSection>,
    pub montecarlo: Option<MonteCarloSection>,
    #[serde(default)]
    pub grid: GridSection,
}

impl ExperimentConfig {
    pub fn from_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_str(&text)
    }

    /// A config file listing the default value of every optional key.
    pub fn defaults_toml() -> String {
        concat!(
            "# Defaults applied when a key is omitted.\n",
            "# experiment and (for momentum_space) [momentum_space] have no default.\n",
            "\n",
            "# output_dir: defaults to the --out flag, then \"./out\"\n",
            "\n",
            "[slits]\n",
            "# n: 2 for two_slit, 3 for three_slit; required for n_slit\n",
            "d = 1.0\n",
            "# sigma: d / 20\n",
            "profile = \"gaussian\"\n",
            "# origin: \"at_zero\" (two_slit, n_slit), \"centered\" (three_slit)\n",
            "\n",
            "[basis]\n",
            "kind = \"fourier\"\n",
            "# theta1, theta2, theta3: required for kind = \"general_two_slit\"\n",
            "# matrix: required for kind = \"custom\" ([[re, im], ...] rows)\n",
            "\n",
            "[propagation]\n",
            "mode = \"fraunhofer\"\n",
            "# t: twice the far-field threshold (fraunhofer), d * sigma (fresnel_exact)\n",
            "\n",
            "[momentum_space]\n",
            "# width: (p2 - p1) / 20\n",
            "\n",
            "[montecarlo]   # section optional; no samples drawn when omitted\n",
            "n_samples = 100000\n",
            "seed = 0\n",
            "\n",
            "[grid]\n",
            "n_points = 4096\n",
            "# x_min, x_max: slit span plus 4 d margin, or peak span plus 4 (p2 - p1)\n",
        )
        .to_string()
    }

    /// Validate everything and bind the numeric defaults.
    pub fn resolve(&self) -> Result<Resolved> {
        match self.experiment {
            Experiment::MomentumSpace => self.resolve_momentum(),
            _ => self.resolve_slits(),
        }
    }

    fn resolve_slits(&self) -> Result<Resolved> {
        if self.momentum_space.is_some() {
            return Err(Error::InvalidConfig(
                "momentum_space: section only applies to experiment = \"momentum_space\"".into(),
            ));
        }
        let n = match (self.experiment, self.slits.n) {
            (Experiment::TwoSlit, None | Some(2)) => 2,
            (Experiment::ThreeSlit, None | Some(3)) => 3,
            (Experiment::NSlit, Some(n)) => n,
            (Experiment::NSlit, None) => {
                return Err(Error::InvalidConfig(
                    "slits.n: required for experiment = \"n_slit\"".into(),
                ))
            }
            (e, n) => {
                return Err(Error::InvalidConfig(format!(
                    "slits.n: {n:?} contradicts experiment = {e:?}"
                )))
            }
        };
        let d = self.slits.d;
        let sigma = self.slits.sigma.unwrap_or(d / 20.0);
        let origin = self.slits.origin.unwrap_or(match self.experiment {
            Experiment::ThreeSlit => Origin::Centered,
            _ => Origin::AtZero,
        });
        let slits = SlitArray::new(n, d, sigma, self.slits.profile, origin)
            .map_err(|e| Error::InvalidConfig(format!("slits: {e}")))?;
        let grid = self.build_grid(&slits)?;
        let basis = self.resolve_basis(n)?;
        Ok(Resolved {
            source: Source::Slits(slits),
            grid,
            basis,
            propagation: self.propagation,
            montecarlo: self.montecarlo,
        })
    }

    fn resolve_momentum(&self) -> Result<Resolved> {
        let Some(m) = self.momentum_space else {
            return Err(Error::InvalidConfig(
                "momentum_space: section required for experiment = \"momentum_space\"".into(),
            ));
        };
        let width = m.width.unwrap_or((m.p2 - m.p1) / 20.0);
        let peaks = MomentumPeaks::new(m.p1, m.p2, width)
            .map_err(|e| Error::InvalidConfig(format!("momentum_space: {e}")))?;
        let grid = match (self.grid.x_min, self.grid.x_max) {
            (Some(lo), Some(hi)) => Grid::new(lo, hi, self.grid.n_points),
            (None, None) => {
                let g = peaks.default_grid();
                Grid::new(g.x_min, g.x_max, self.grid.n_points)
            }
            _ => Err(Error::InvalidConfig(
                "grid.x_min and grid.x_max must be given together".into(),
            )),
        }
        .map_err(|e| Error::InvalidConfig(format!("grid: {e}")))?;
        let basis = self.resolve_basis(2)?;
        Ok(Resolved {
            source: Source::Momentum(peaks),
            grid,
            basis,
            propagation: self.propagation,
            montecarlo: self.montecarlo,
        })
    }

    fn build_grid(&self, slits: &SlitArray) -> Result<Grid> {
        match (self.grid.x_min, self.grid.x_max) {
            (Some(lo), Some(hi)) => Grid::new(lo, hi, self.grid.n_points),
            (None, None) => {
                let g = slits.default_grid();
                Grid::new(g.x_min, g.x_max, self.grid.n_points)
            }
            _ => Err(Error::InvalidConfig(
                "grid.x_min and grid.x_max must be given together".into(),
            )),
        }
        .map_err(|e| Error::InvalidConfig(format!("grid: {e}")))
    }

    fn resolve_basis(&self, n: usize) -> Result<ResolvedBasis> {
        let b = &self.basis;
        let forbid = |key: &str, set: bool| {
            if set {
                Err(Error::InvalidConfig(format!(
                    "basis.{key}: only applies to kind = \"{}\"",
                    if key == "matrix" {
                        "custom"
                    } else {
                        "general_two_slit"
                    }
                )))
            } else {
                Ok(())
            }
        };
        if b.kind != BasisKind::GeneralTwoSlit {
            forbid("theta1", b.theta1.is_some())?;
            forbid("theta2", b.theta2.is_some())?;
            forbid("theta3", b.theta3.is_some())?;
        }
        if b.kind != BasisKind::Custom {
            forbid("matrix", b.matrix.is_some())?;
        }
        match b.kind {
            BasisKind::WhichWay => Ok(ResolvedBasis::WhichWay),
            BasisKind::Fourier => {
                let f = fourier_basis(n).map_err(|e| Error::InvalidConfig(format!("basis: {e}")))?;
                Ok(ResolvedBasis::Unbiased(f))
            }
            BasisKind::GeneralTwoSlit => {
                if n != 2 {
                    return Err(Error::InvalidConfig(format!(
                        "basis.kind: general_two_slit requires n = 2, got {n}"
                    )));
                }
                let get = |name: &str, v: Option<f64>| {
                    v.ok_or_else(|| {
                        Error::InvalidConfig(format!(
                            "basis.{name}: required for kind = \"general_two_slit\""
                        ))
                    })
                };
                Ok(ResolvedBasis::Unbiased(general_two_slit_basis(
                    get("theta1", b.theta1)?,
                    get("theta2", b.theta2)?,
                    get("theta3", b.theta3)?,
                )))
            }
            BasisKind::Custom => {
                let m = b.matrix.as_ref().ok_or_else(|| {
                    Error::InvalidConfig("basis.matrix: required for kind = \"custom\"".into())
                })?;
                let rows: Vec<Vec<C64>> = m
                    .iter()
                    .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
                    .collect();
                let u = Unitary::from_rows(rows, "custom")
                    .map_err(|e| Error::InvalidConfig(format!("basis.matrix: {e}")))?;
                if u.n() != n {
                    return Err(Error::InvalidConfig(format!(
                        "basis.matrix: {} rows but the experiment has {n} paths",
                        u.n()
                    )));
                }
                Ok(ResolvedBasis::Custom(u))
            }
        }
    }
}

/// What the particle is prepared in.
#[derive(Debug, Clone)]
pub enum Source {
    Slits(SlitArray),
    Momentum(MomentumPeaks),
}

#[derive(Debug, Clone)]
pub enum ResolvedBasis {
    WhichWay,
    Unbiased(UnbiasedBasis),
    Custom(Unitary),
}

impl ResolvedBasis {
    pub fn tag(&self) -> &str {
        match self {
            ResolvedBasis::WhichWay => "which-way",
            ResolvedBasis::Unbiased(b) => b.unitary().tag(),
            ResolvedBasis::Custom(u) => u.tag(),
        }
    }
}

/// A fully validated experiment with all defaults bound.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub source: Source,
    pub grid: Grid,
    pub basis: ResolvedBasis,
    pub propagation: PropagationSection,
    pub montecarlo: Option<MonteCarloSection>,
}

impl Resolved {
    /// The flight time actually used: the configured one, or the
    /// documented default for the propagation mode.
    pub fn flight_time(&self, far_field_threshold: f64) -> f64 {
        match (self.propagation.t, self.propagation.mode) {
            (Some(t), _) => t,
            (None, Mode::Fraunhofer) => 2.0 * far_field_threshold,
            (None, Mode::FresnelExact) => match &self.source {
                Source::Slits(s) => s.d * s.sigma,
                Source::Momentum(p) => 1.0 / (p.separation() * p.separation()),
            },
        }
    }

    pub fn spec(&self, far_field_threshold: f64) -> PropagationSpec {
        PropagationSpec {
            mode: self.propagation.mode,
            t: self.flight_time(far_field_threshold),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_two_slit_parses_with_defaults() {
        let cfg = ExperimentConfig::from_str("experiment = \"two_slit\"").unwrap();
        let r = cfg.resolve().unwrap();
        let Source::Slits(s) = r.source else {
            panic!("expected slits")
        };
        assert_eq!(s.n, 2);
        assert!((s.sigma - 0.05).abs() < 1e-15);
        assert_eq!(s.origin, Origin::AtZero);
        assert_eq!(r.grid.n_points, 4096);
        assert!(matches!(r.basis, ResolvedBasis::Unbiased(_)));
    }

    #[test]
    fn unknown_key_is_rejected_by_name() {
        let err = ExperimentConfig::from_str("experiment = \"two_slit\"\nwavelength = 3\n")
            .unwrap_err();
        assert!(err.to_string().contains("wavelength"), "{err}");
    }

    #[test]
    fn unknown_nested_key_is_rejected() {
        let err = ExperimentConfig::from_str(
            "experiment = \"two_slit\"\n[slits]\nwidth = 0.1\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("width"), "{err}");
    }

    #[test]
    fn contradictory_slit_count_is_rejected() {
        let cfg =
            ExperimentConfig::from_str("experiment = \"two_slit\"\n[slits]\nn = 4\n").unwrap();
        let err = cfg.resolve().unwrap_err();
        assert!(err.to_string().contains("slits.n"), "{err}");
    }

    #[test]
    fn sigma_precondition_revalidated() {
        let cfg = ExperimentConfig::from_str(
            "experiment = \"two_slit\"\n[slits]\nsigma = 0.3\n",
        )
        .unwrap();
        let err = cfg.resolve().unwrap_err();
        assert!(matches!(err, Error::InvalidConfig(_)));
        assert!(err.to_string().contains("sigma"), "{err}");
    }

    #[test]
    fn general_basis_requires_all_thetas() {
        let cfg = ExperimentConfig::from_str(
            "experiment = \"two_slit\"\n[basis]\nkind = \"general_two_slit\"\ntheta1 = 0.1\ntheta2 = 0.2\n",
        )
        .unwrap();
        let err = cfg.resolve().unwrap_err();
        assert!(err.to_string().contains("theta3"), "{err}");
    }

    #[test]
    fn stray_theta_rejected_for_fourier() {
        let cfg = ExperimentConfig::from_str(
            "experiment = \"two_slit\"\n[basis]\ntheta1 = 0.1\n",
        )
        .unwrap();
        let err = cfg.resolve().unwrap_err();
        assert!(err.to_string().contains("theta1"), "{err}");
    }

    #[test]
    fn custom_matrix_must_be_unitary() {
        let cfg = ExperimentConfig::from_str(concat!(
            "experiment = \"two_slit\"\n",
            "[basis]\nkind = \"custom\"\n",
            "matrix = [[[1.0, 0.0], [1.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]\n",
        ))
        .unwrap();
        let err = cfg.resolve().unwrap_err();
        assert!(err.to_string().contains("matrix"), "{err}");
    }

    #[test]
    fn momentum_experiment_requires_section() {
        let cfg = ExperimentConfig::from_str("experiment = \"momentum_space\"").unwrap();
        assert!(cfg.resolve().is_err());

        let cfg = ExperimentConfig::from_str(
            "experiment = \"momentum_space\"\n[momentum_space]\np1 = 2.0\np2 = 6.0\n",
        )
        .unwrap();
        let r = cfg.resolve().unwrap();
        let Source::Momentum(p) = r.source else {
            panic!("expected momentum source")
        };
        assert!((p.width - 0.2).abs() < 1e-15);
    }

    #[test]
    fn n_slit_requires_n() {
        let cfg = ExperimentConfig::from_str("experiment = \"n_slit\"").unwrap();
        assert!(cfg.resolve().is_err());
        let cfg = ExperimentConfig::from_str("experiment = \"n_slit\"\n[slits]\nn = 5\n").unwrap();
        let r = cfg.resolve().unwrap();
        let Source::Slits(s) = r.source else {
            panic!("expected slits")
        };
        assert_eq!(s.n, 5);
    }

    #[test]
    fn three_slit_defaults_to_centered() {
        let cfg = ExperimentConfig::from_str("experiment = \"three_slit\"").unwrap();
        let r = cfg.resolve().unwrap();
        let Source::Slits(s) = r.source else {
            panic!("expected slits")
        };
        assert_eq!(s.origin, Origin::Centered);
        assert_eq!(s.n, 3);
    }

    #[test]
    fn defaults_file_is_valid_commentary() {
        // every uncommented key in the defaults file must round-trip
        let text = ExperimentConfig::defaults_toml();
        let with_experiment = format!("experiment = \"two_slit\"\n{text}");
        // momentum_space section without p1/p2 is invalid, so strip it
        let stripped: String = with_experiment
            .lines()
            .filter(|l| !l.starts_with("[momentum_space]"))
            .collect::<Vec<_>>()
            .join("\n");
        let cfg = ExperimentConfig::from_str(&stripped).unwrap();
        assert!(cfg.resolve().is_ok());
    }
}
