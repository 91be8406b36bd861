//! Run configuration read from TOML. Every field has a default; `--print-defaults`
//! prints the full schema.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::criteria::{CriteriaOptions, Criterion, ProfileKind, SyntheticProfile};
use crate::diagnostics::{FitConfig, SeriesParams};
use crate::error::{Error, Result};
use crate::flow::{Initial, Model, StepperConfig};
use crate::spectral::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 64 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub series: String,
    pub report: String,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            series: "series.csv".into(),
            report: "report.json".into(),
        }
    }
}

impl OutputConfig {
    pub fn series_path(&self) -> PathBuf {
        self.dir.join(&self.series)
    }

    pub fn report_path(&self) -> PathBuf {
        self.dir.join(&self.report)
    }
}

/// Criteria evaluated after a run or by the `criteria` command. An empty list means
/// every criterion the series supports; an empty `t_star` grid is chosen from the series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct CriteriaConfig {
    pub criteria: Vec<Criterion>,
    pub t_star: Vec<f64>,
    pub options: CriteriaOptions,
}

/// Synthetic series generator; family, `k`, `p` and `ν` come from the top level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthConfig {
    pub dim: usize,
    pub t_star: f64,
    pub amplitude: f64,
    pub samples_per_octave: usize,
    pub octaves: usize,
    pub profile: ProfileKind,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            dim: 2,
            t_star: 1.0,
            amplitude: 1.0,
            samples_per_octave: 64,
            octaves: 20,
            profile: ProfileKind::SelfSimilar {
                oscillation: 0.0,
                frequency: 2.0 * std::f64::consts::PI,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: Model,
    pub grid: GridConfig,
    pub nu: f64,
    /// Derivative order of the monitored seminorm.
    pub k: usize,
    /// Lebesgue exponent (Navier–Stokes velocity norm, SQG scalar norm).
    pub p: f64,
    /// Overrides the seed of a `random_smooth` initial condition.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub initial: Initial,
    pub time: StepperConfig,
    pub output: OutputConfig,
    pub criteria: CriteriaConfig,
    /// Fitted-constant overrides (`k_euler`, `k_sqg`, ...), stored in the sidecar.
    pub constants: BTreeMap<String, f64>,
    pub synth: SynthConfig,
    pub fit: FitConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: Model::Euler2D,
            grid: GridConfig::default(),
            nu: 0.0,
            k: 3,
            p: 2.0,
            seed: None,
            initial: Initial::TaylorGreen2d { amplitude: 1.0 },
            time: StepperConfig::default(),
            output: OutputConfig::default(),
            criteria: CriteriaConfig::default(),
            constants: BTreeMap::new(),
            synth: SynthConfig::default(),
            fit: FitConfig::default(),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub t_star: Option<Vec<f64>>,
    pub eps0: Option<f64>,
    pub threshold: Option<f64>,
    pub criteria: Option<Vec<Criterion>>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn defaults_toml() -> String {
        toml::to_string_pretty(&RunConfig::default()).expect("default config serializes")
    }

    pub fn apply_overrides(&mut self, o: &Overrides) {
        if let Some(out) = &o.out {
            self.output.dir = out.clone();
        }
        if let Some(seed) = o.seed {
            self.seed = Some(seed);
        }
        if let Some(seed) = self.seed {
            if let Initial::RandomSmooth(spec) = &mut self.initial {
                spec.seed = seed;
            }
        }
        if let Some(t) = &o.t_star {
            self.criteria.t_star = t.clone();
        }
        if let Some(e) = o.eps0 {
            self.criteria.options.eps0 = e;
        }
        if let Some(k) = o.threshold {
            self.criteria.options.threshold = Some(k);
        }
        if let Some(c) = &o.criteria {
            self.criteria.criteria = c.clone();
        }
    }

    pub fn params(&self) -> SeriesParams {
        SeriesParams {
            family: self.model.into(),
            dim: 2,
            k: self.k,
            p: self.p,
            nu: self.nu,
        }
    }

    /// Seed of the random initial condition, if any.
    pub fn initial_seed(&self) -> Option<u64> {
        match &self.initial {
            Initial::RandomSmooth(spec) => Some(spec.seed),
            _ => None,
        }
    }

    pub fn synthetic_profile(&self) -> SyntheticProfile {
        let s = &self.synth;
        SyntheticProfile {
            t_star: s.t_star,
            amplitude: s.amplitude,
            samples_per_octave: s.samples_per_octave,
            octaves: s.octaves,
            ..SyntheticProfile::new(
                s.profile,
                SeriesParams {
                    dim: s.dim,
                    ..self.params()
                },
            )
        }
    }

    /// Checks everything a run needs and reports all problems together. Warns when
    /// `k` is below the regularity threshold.
    pub fn validate(&self) -> Result<()> {
        let mut errs = Vec::new();
        if let Err(e) = Grid::new(2, self.grid.n) {
            errs.push(e.to_string());
        }
        if !(self.nu >= 0.0 && self.nu.is_finite()) {
            errs.push(format!("nu must be nonnegative, got {}", self.nu));
        }
        if self.model == Model::NS2D && self.nu == 0.0 {
            errs.push("ns2d needs nu > 0".into());
        }
        if self.model != Model::NS2D && self.nu != 0.0 {
            errs.push(format!("{} is inviscid; set nu = 0", self.model.name()));
        }
        if self.k == 0 {
            errs.push("k must be >= 1".into());
        }
        if let Err(e) = self.params().scaling() {
            errs.push(e.to_string());
        }
        if let Err(e) = self.time.validate() {
            errs.push(e.to_string());
        } else if !(self.time.t_end > 0.0) {
            errs.push(format!("time.t_end must be positive, got {}", self.time.t_end));
        }
        if let Err(e) = self.criteria.options.validate() {
            errs.push(e.to_string());
        }
        for t in &self.criteria.t_star {
            if !(t.is_finite() && *t > 0.0) {
                errs.push(format!("t_star values must be positive, got {t}"));
            }
        }
        for (name, v) in &self.constants {
            if !(v.is_finite() && *v > 0.0) {
                errs.push(format!("constant `{name}` must be positive, got {v}"));
            }
        }
        if self.output.series.is_empty() || self.output.report.is_empty() {
            errs.push("output file names must be nonempty".into());
        }
        if errs.is_empty() && self.k > 0 && !self.params().k_is_supercritical() {
            log::warn!(
                "k = {} does not exceed the regularity threshold for {}",
                self.k,
                self.model.name()
            );
        }
        if errs.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(errs))
        }
    }

    /// Settings relevant to the synthetic generator, checked separately because a
    /// simulation does not use them.
    pub fn validate_synth(&self) -> Result<()> {
        self.synthetic_profile().validate()
    }

    /// Hex SHA-256 of the canonical JSON form, leaving out output locations so the
    /// same run written elsewhere hashes identically.
    pub fn config_hash(&self) -> String {
        let canonical = RunConfig {
            output: OutputConfig::default(),
            ..self.clone()
        };
        let json = serde_json::to_string(&canonical).expect("config serializes");
        hex(&Sha256::digest(json.as_bytes()))
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Creates `dir` if needed and confirms a file can be written there, so a bad path
/// fails before any computation.
pub fn ensure_writable(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let probe = dir.join(".write-probe");
    fs::write(&probe, b"").map_err(|e| Error::io(&probe, e))?;
    fs::remove_file(&probe).map_err(|e| Error::io(&probe, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let text = RunConfig::defaults_toml();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back, RunConfig::default());
        back.validate().unwrap();
    }

    #[test]
    fn partial_file_fills_defaults() {
        let cfg: RunConfig = toml::from_str(
            "model = \"sqg\"\nk = 4\n[initial]\npreset = \"random_smooth\"\nseed = 9\n[criteria]\nt_star = [2.0]\n",
        )
        .unwrap();
        assert_eq!(cfg.model, Model::Sqg);
        assert_eq!(cfg.initial_seed(), Some(9));
        assert_eq!(cfg.grid.n, 64);
        assert_eq!(cfg.criteria.t_star, vec![2.0]);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("modle = \"sqg\"\n").is_err());
    }

    #[test]
    fn validation_lists_every_problem() {
        let cfg = RunConfig {
            model: Model::NS2D,
            grid: GridConfig { n: 48 },
            k: 0,
            ..Default::default()
        };
        match cfg.validate() {
            Err(Error::Config(errs)) => assert!(errs.len() >= 3, "{errs:?}"),
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn seed_override_reaches_random_initial() {
        let mut cfg = RunConfig {
            initial: Initial::RandomSmooth(Default::default()),
            ..Default::default()
        };
        cfg.apply_overrides(&Overrides {
            seed: Some(77),
            ..Default::default()
        });
        assert_eq!(cfg.initial_seed(), Some(77));
        let h = cfg.config_hash();
        assert_eq!(h.len(), 64);
        cfg.seed = Some(78);
        cfg.apply_overrides(&Overrides::default());
        assert_ne!(cfg.config_hash(), h);
        let moved = RunConfig {
            output: OutputConfig {
                dir: "elsewhere".into(),
                ..Default::default()
            },
            ..cfg.clone()
        };
        assert_eq!(moved.config_hash(), cfg.config_hash());
    }

    #[test]
    fn unwritable_dir_is_reported() {
        let tmp = tempfile::tempdir().unwrap();
        let file = tmp.path().join("plain");
        fs::write(&file, b"x").unwrap();
        assert!(ensure_writable(&file.join("sub")).is_err());
        ensure_writable(&tmp.path().join("a/b")).unwrap();
    }
}
