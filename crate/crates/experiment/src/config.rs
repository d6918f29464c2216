//! Experiment configuration: strict JSON schema plus the built-in profiles.

use std::path::{Path, PathBuf};

use csst_core::lindblad::{self, LindbladModel, TimeGrid, DEFAULT_QUBIT_CAP};
use csst_core::metrics::{DEFAULT_SNR_THRESHOLD_DB, DEFAULT_VARIANCE_THRESHOLD};
use csst_core::recovery::{log_grid, TheoryParams, DEFAULT_MAX_ITERS, DEFAULT_TOL};
use csst_core::{enumerate_paulis, InitialState, PauliString};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{ExpError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Heisenberg,
    Tfim,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub rows: usize,
    pub cols: usize,
    #[serde(rename = "J")]
    pub j: f64,
    /// Transverse field; ignored by the Heisenberg model.
    #[serde(default)]
    pub h: f64,
    pub gamma_phi: f64,
    pub gamma_1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(rename = "N")]
    pub n_steps: usize,
    pub dt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlphaGridConfig {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Default for AlphaGridConfig {
    fn default() -> Self {
        AlphaGridConfig {
            min: 1e-7,
            max: 1e-2,
            points: 30,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FilterConfig {
    pub variance: f64,
    /// In dB.
    pub snr_db: f64,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            variance: DEFAULT_VARIANCE_THRESHOLD,
            snr_db: DEFAULT_SNR_THRESHOLD_DB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LassoSettings {
    pub tol: f64,
    pub max_iters: usize,
}

impl Default for LassoSettings {
    fn default() -> Self {
        LassoSettings {
            tol: DEFAULT_TOL,
            max_iters: DEFAULT_MAX_ITERS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheorySettings {
    #[serde(default)]
    pub constants: TheoryParams,
    pub eps_rms: f64,
    pub delta: f64,
    /// Fraction of `delta` given to the shadow stage.
    pub failure_share: f64,
    pub sparsity: usize,
    pub tail_c: f64,
    pub tail_r: f64,
}

impl Default for TheorySettings {
    fn default() -> Self {
        TheorySettings {
            constants: TheoryParams::default(),
            eps_rms: 1e-2,
            delta: 1e-2,
            failure_share: 0.5,
            sparsity: 10,
            tail_c: 1.0,
            tail_r: 2.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub model: ModelConfig,
    pub initial_state: InitialState,
    pub grid: GridConfig,
    pub w_max: usize,
    /// Shadows per timestep.
    pub shots: Vec<usize>,
    /// Number of sampled timesteps.
    pub masks: Vec<usize>,
    #[serde(default)]
    pub alpha: AlphaGridConfig,
    pub seed: u64,
    #[serde(default)]
    pub filters: FilterConfig,
    #[serde(default)]
    pub lasso: LassoSettings,
    #[serde(default)]
    pub theory: TheorySettings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Profile {
    Desk,
    Paper,
}

impl ExperimentConfig {
    pub fn preset(profile: Profile) -> Self {
        match profile {
            Profile::Desk => ExperimentConfig {
                model: ModelConfig {
                    kind: ModelKind::Heisenberg,
                    rows: 1,
                    cols: 3,
                    j: 1.0,
                    h: 0.0,
                    gamma_phi: 0.1,
                    gamma_1: 0.1,
                },
                initial_state: InitialState::PlusMinusProduct,
                grid: GridConfig { n_steps: 256, dt: 0.05 },
                w_max: 2,
                shots: vec![100, 1000, 10000],
                masks: vec![64, 154, 256],
                alpha: AlphaGridConfig::default(),
                seed: 20240601,
                filters: FilterConfig::default(),
                lasso: LassoSettings::default(),
                theory: TheorySettings::default(),
                out: None,
            },
            Profile::Paper => ExperimentConfig {
                model: ModelConfig {
                    kind: ModelKind::Heisenberg,
                    rows: 2,
                    cols: 3,
                    j: 1.0,
                    h: 0.0,
                    gamma_phi: 0.1,
                    gamma_1: 0.1,
                },
                initial_state: InitialState::PlusMinusProduct,
                grid: GridConfig { n_steps: 1000, dt: 0.024 },
                w_max: 4,
                shots: vec![10, 100, 1000, 7437, 10000, 50000],
                masks: vec![50, 100, 200, 400, 597, 800, 1000],
                alpha: AlphaGridConfig::default(),
                seed: 20240601,
                filters: FilterConfig::default(),
                lasso: LassoSettings::default(),
                theory: TheorySettings::default(),
                out: None,
            },
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| ExpError::io(path, e))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| ExpError::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn num_qubits(&self) -> usize {
        self.model.rows * self.model.cols
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(ExpError::Config(msg));
        let n = self.num_qubits();
        if n == 0 {
            return bad("lattice has no sites".into());
        }
        if n > DEFAULT_QUBIT_CAP {
            return Err(csst_core::CsstError::ResourceLimit(format!(
                "{n} qubits exceeds the dense simulation cap {DEFAULT_QUBIT_CAP}"
            ))
            .into());
        }
        let m = &self.model;
        for (name, v) in [("gamma_phi", m.gamma_phi), ("gamma_1", m.gamma_1)] {
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("{name} must be a nonnegative number"));
            }
        }
        if !m.j.is_finite() || !m.h.is_finite() {
            return bad("couplings must be finite".into());
        }
        if self.grid.n_steps < 1 || !(self.grid.dt > 0.0) {
            return bad("grid needs N >= 1 and dt > 0".into());
        }
        if self.w_max < 1 || self.w_max > n {
            return bad(format!("w_max must be in 1..={n}"));
        }
        if self.shots.is_empty() || self.shots.contains(&0) {
            return bad("shots must be a nonempty list of positive counts".into());
        }
        if self.masks.is_empty() || self.masks.iter().any(|&k| k < 1 || k > self.grid.n_steps) {
            return bad(format!("masks must be a nonempty list within 1..={}", self.grid.n_steps));
        }
        let a = self.alpha;
        if !(a.min > 0.0) || !(a.max >= a.min) || a.points < 1 {
            return bad("alpha grid needs 0 < min <= max and points >= 1".into());
        }
        if !(self.filters.variance >= 0.0) || self.filters.snr_db.is_nan() {
            return bad("filter thresholds invalid".into());
        }
        if !(self.lasso.tol > 0.0) || self.lasso.max_iters < 1 {
            return bad("lasso needs tol > 0 and max_iters >= 1".into());
        }
        let t = &self.theory;
        t.constants.validate().map_err(|e| ExpError::Config(e.to_string()))?;
        if !(t.eps_rms > 0.0) || !(t.delta > 0.0 && t.delta < 1.0) || !(t.failure_share > 0.0 && t.failure_share < 1.0) {
            return bad("theory needs eps_rms > 0 and delta, failure_share in (0, 1)".into());
        }
        if t.sparsity < 1 || t.sparsity > self.grid.n_steps || !(t.tail_r > 1.0) || !(t.tail_c > 0.0) {
            return bad("theory needs 1 <= sparsity <= N, tail_r > 1, tail_c > 0".into());
        }
        if let InitialState::ComputationalBitstring { bits } = &self.initial_state {
            if bits.len() != n {
                return bad(format!("bitstring {bits:?} does not have {n} sites"));
            }
        }
        Ok(())
    }

    /// SHA-256 of the canonical JSON form, output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let bytes = serde_json::to_vec(&c).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        Ok(TimeGrid::new(self.grid.n_steps, self.grid.dt)?)
    }

    pub fn observables(&self) -> Result<Vec<PauliString>> {
        Ok(enumerate_paulis(self.num_qubits(), self.w_max)?)
    }

    pub fn alpha_grid(&self) -> Result<Vec<f64>> {
        Ok(log_grid(self.alpha.min, self.alpha.max, self.alpha.points)?)
    }

    pub fn build_model(&self) -> Result<LindbladModel> {
        let m = &self.model;
        let h = match m.kind {
            ModelKind::Heisenberg => lindblad::build_heisenberg(m.rows, m.cols, m.j)?,
            ModelKind::Tfim => lindblad::build_tfim(m.rows, m.cols, m.j, m.h)?,
        };
        let n = self.num_qubits();
        let jumps = lindblad::standard_dissipator(n, m.gamma_phi, m.gamma_1)?;
        Ok(LindbladModel::new(n, h, jumps)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_are_valid() {
        for p in [Profile::Desk, Profile::Paper] {
            ExperimentConfig::preset(p).validate().unwrap();
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut v = serde_json::to_value(ExperimentConfig::preset(Profile::Desk)).unwrap();
        v["shotz"] = serde_json::json!([1]);
        assert!(serde_json::from_value::<ExperimentConfig>(v).is_err());
        let mut v = serde_json::to_value(ExperimentConfig::preset(Profile::Desk)).unwrap();
        v["model"]["gamma"] = serde_json::json!(0.1);
        assert!(serde_json::from_value::<ExperimentConfig>(v).is_err());
    }

    #[test]
    fn json_roundtrip_and_hash() {
        let c = ExperimentConfig::preset(Profile::Desk);
        let text = serde_json::to_string_pretty(&c).unwrap();
        let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, c);
        let mut moved = c.clone();
        moved.out = Some("elsewhere".into());
        assert_eq!(moved.hash(), c.hash());
        let mut reseeded = c.clone();
        reseeded.seed += 1;
        assert_ne!(reseeded.hash(), c.hash());
    }

    #[test]
    fn validation_failures() {
        let mut c = ExperimentConfig::preset(Profile::Desk);
        c.masks = vec![300];
        assert!(matches!(c.validate(), Err(ExpError::Config(_))));
        let mut c = ExperimentConfig::preset(Profile::Desk);
        c.model.cols = 7;
        assert_eq!(c.validate().unwrap_err().exit_code(), 3);
    }
}
