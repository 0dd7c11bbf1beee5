//! TOML run configuration.

use std::path::{Path, PathBuf};

use orthoplate::io::parse_signal_csv;
use orthoplate::modal_sim::SignalLabel;
use orthoplate::{BasisKind, CrossCoupling, Excitation, Geometry, MechanicalParams, PlateConfig64};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub plate: PlateSection,
    #[serde(default)]
    pub mode_set: ModeSetSpec,
    pub tf_grid: Option<GridSection>,
    pub sim: Option<SimSection>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from(".")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Edge {
    Free,
    SimplySupported,
}

impl From<Edge> for BasisKind {
    fn from(e: Edge) -> Self {
        match e {
            Edge::Free => BasisKind::FreeFree,
            Edge::SimplySupported => BasisKind::SimplySupported,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Coupling {
    #[default]
    Galerkin,
    Published,
}

impl From<Coupling> for CrossCoupling {
    fn from(c: Coupling) -> Self {
        match c {
            Coupling::Galerkin => CrossCoupling::Galerkin,
            Coupling::Published => CrossCoupling::Published,
        }
    }
}

/// Plate parameters in SI units.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateSection {
    pub rho: f64,
    pub h: f64,
    pub e1: f64,
    pub e2: f64,
    pub g: f64,
    pub nu1: f64,
    #[serde(default)]
    pub alpha: f64,
    pub ell1: f64,
    pub ell2: f64,
    pub bc1: Edge,
    pub bc2: Edge,
    pub s0: [f64; 2],
    pub c0: [f64; 2],
    pub n_trunc: usize,
    #[serde(default)]
    pub coupling: Coupling,
}

/// Either an explicit list of mode indices or a keyword.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum ModeSetSpec {
    List(Vec<usize>),
    Keyword(String),
}

impl Default for ModeSetSpec {
    fn default() -> Self {
        ModeSetSpec::Keyword("elastic".into())
    }
}

impl ModeSetSpec {
    /// Parses `elastic`, `all`, or a comma list of indices and inclusive `a..b` ranges.
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let s = s.trim();
        if s == "elastic" || s == "all" {
            return Ok(ModeSetSpec::Keyword(s.into()));
        }
        let bad = || CliError::user(format!("--mode-set: cannot parse `{s}`; use `elastic`, `all` or a list like 3..12,15"));
        let mut out = Vec::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            if let Some((a, b)) = part.split_once("..") {
                let a: usize = a.trim().parse().map_err(|_| bad())?;
                let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
                if a > b {
                    return Err(bad());
                }
                out.extend(a..=b);
            } else {
                out.push(part.parse().map_err(|_| bad())?);
            }
        }
        Ok(ModeSetSpec::List(out))
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub f_min: f64,
    pub f_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub duration: f64,
    pub sample_rate: f64,
    pub excitation: ExcitationSection,
    #[serde(default)]
    pub include_rigid: bool,
    pub max_samples: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExcitationSection {
    Pulse {
        #[serde(default = "default_width")]
        width: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    Chirp {
        f0: f64,
        f1: f64,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
    /// Force samples from a signal CSV at the simulation sample rate.
    File { path: PathBuf },
}

fn default_width() -> f64 {
    1e-3
}

fn default_amplitude() -> f64 {
    1.0
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::user(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::user(format!("{}: {}", path.display(), e.message)))
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::user(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        self.plate_config()?.validate().map_err(|e| CliError::user(format!("[plate]: {e}")))?;
        if let ModeSetSpec::Keyword(k) = &self.mode_set {
            if k != "elastic" && k != "all" {
                return Err(CliError::user(format!("mode_set: expected a list, \"elastic\" or \"all\", got \"{k}\"")));
            }
        }
        if let Some(g) = &self.tf_grid {
            if !(g.f_min >= 0.0 && g.f_min < g.f_max && g.f_max.is_finite()) {
                return Err(CliError::user("[tf_grid]: need 0 <= f_min < f_max"));
            }
            if g.points < 2 {
                return Err(CliError::user("[tf_grid]: points must be at least 2"));
            }
        }
        if let Some(s) = &self.sim {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(CliError::user("[sim]: duration must be positive"));
            }
            if !(s.sample_rate > 0.0 && s.sample_rate.is_finite()) {
                return Err(CliError::user("[sim]: sample_rate must be positive"));
            }
            match &s.excitation {
                ExcitationSection::Pulse { width, .. } if !(*width > 0.0) => {
                    return Err(CliError::user("[sim.excitation]: pulse width must be positive"));
                }
                ExcitationSection::Chirp { f0, f1, .. } if !(*f0 >= 0.0 && f0 < f1) => {
                    return Err(CliError::user("[sim.excitation]: chirp needs 0 <= f0 < f1"));
                }
                ExcitationSection::File { path } if !path.is_file() => {
                    return Err(CliError::user(format!(
                        "[sim.excitation]: file {} does not exist",
                        path.display()
                    )));
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn plate_config(&self) -> Result<PlateConfig64, CliError> {
        let p = &self.plate;
        Ok(PlateConfig64 {
            params: MechanicalParams {
                rho: p.rho,
                h: p.h,
                e1: p.e1,
                e2: p.e2,
                g: p.g,
                nu1: p.nu1,
                alpha: p.alpha,
            },
            geometry: Geometry { ell1: p.ell1, ell2: p.ell2 },
            bc1: p.bc1.into(),
            bc2: p.bc2.into(),
            s0: p.s0,
            c0: p.c0,
            n_trunc: p.n_trunc,
            coupling: p.coupling.into(),
        })
    }

    pub fn excitation(&self, sim: &SimSection) -> Result<Excitation<f64>, CliError> {
        Ok(match &sim.excitation {
            ExcitationSection::Pulse { width, amplitude } => Excitation::Pulse { width: *width, amplitude: *amplitude },
            ExcitationSection::Chirp { f0, f1, amplitude } => Excitation::Chirp { f0: *f0, f1: *f1, amplitude: *amplitude },
            ExcitationSection::File { path } => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::user(format!("cannot read {}: {e}", path.display())))?;
                let rec = parse_signal_csv(&text, Some(sim.sample_rate), SignalLabel::Input)
                    .map_err(|e| CliError::user(format!("{}: {e}", path.display())))?;
                Excitation::Samples(rec)
            }
        })
    }
}
