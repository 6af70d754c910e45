//! Per-command TOML schemas. Every record rejects unknown keys.

use std::path::Path;

use anyhow::{bail, Context, Result};
use semion_core::circuit::{Constants, DeviceNetwork, QndInputs, Thresholds};
use semion_core::{Color, Couplings, Family};
use serde::de::DeserializeOwned;
use serde::Deserialize;

pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingsConfig {
    pub j_q: f64,
    pub j_p: f64,
    pub u: f64,
}

impl Default for CouplingsConfig {
    fn default() -> Self {
        Self {
            j_q: 1.0,
            j_p: 1.0,
            u: 1.0,
        }
    }
}

impl From<CouplingsConfig> for Couplings {
    fn from(c: CouplingsConfig) -> Self {
        Couplings::new(c.j_q, c.j_p, c.u)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegisterConfig {
    #[default]
    Honeycomb,
    Device,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub couplings: CouplingsConfig,
    #[serde(default)]
    pub register: RegisterConfig,
    /// Only the `k` lowest levels; the full spectrum when absent.
    #[serde(default)]
    pub lowest: Option<usize>,
    /// Extra randomized coupling triples, drawn from `--seed`.
    #[serde(default)]
    pub sweep: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundConfig {
    pub rows: usize,
    pub cols: usize,
    #[serde(default)]
    pub couplings: CouplingsConfig,
    /// Emit amplitudes with modulus above this value.
    #[serde(default)]
    pub export_threshold: Option<f64>,
}

/// String operator on the honeycomb register.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StringConfig {
    Identity,
    VortexSegment {
        family: Family,
        chain: usize,
        first: usize,
        last: usize,
    },
    PlaquetteLoop {
        family: Family,
        plaquettes: Vec<usize>,
    },
    SxString {
        square: usize,
        color: Color,
    },
    UZ {
        sites: Vec<usize>,
    },
    /// Pauli grammar, one letter per site; the phase prefix is ignored.
    Explicit {
        pauli: String,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BraidConfig {
    pub rows: usize,
    pub cols: usize,
    #[serde(rename = "loop")]
    pub loop_: StringConfig,
    pub string: StringConfig,
    /// Also measure the interference overlap on the projected ground state.
    #[serde(default = "yes")]
    pub state_check: bool,
    #[serde(default)]
    pub expected_phase: Option<i8>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QndConfig {
    #[serde(default = "unit_chi")]
    pub chi: f64,
    /// Interaction time; `pi / (2 chi)` when absent.
    #[serde(default)]
    pub tau: Option<f64>,
    pub n_qubits: usize,
    /// String support; every qubit when absent.
    #[serde(default)]
    pub sites: Option<Vec<usize>>,
    #[serde(default = "two")]
    pub cavity_dim: usize,
    #[serde(default)]
    pub prepare: Option<PrepareConfig>,
    #[serde(default)]
    pub interferometry: Option<InterferometryConfig>,
}

fn unit_chi() -> f64 {
    1.0
}

fn two() -> usize {
    2
}

impl QndConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cavity_dim < 2 {
            bail!("cavity_dim must be at least 2, got {}", self.cavity_dim);
        }
        Ok(())
    }
}

/// Fock state `n_c` tensored with a qubit basis state.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrepareConfig {
    pub n_c: usize,
    #[serde(default)]
    pub qubit_basis: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InterferometryConfig {
    /// Pauli grammar over `n_qubits` sites.
    pub string: String,
    /// Random qubit states drawn from `--seed`.
    #[serde(default)]
    pub random_states: usize,
    /// Computational basis states to read out as well.
    #[serde(default)]
    pub basis_states: Vec<usize>,
}

/// Identical devices with `C_g = C_J = c_0 / 2` and every coupler at `beta c_0`.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdenticalConfig {
    pub c_0: f64,
    pub beta: f64,
    pub e_j: f64,
    #[serde(default)]
    pub n_g: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JcConfig {
    pub e_c: f64,
    pub n_g: f64,
    pub omega_c: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    #[serde(default)]
    pub network: Option<DeviceNetwork>,
    #[serde(default)]
    pub identical: Option<IdenticalConfig>,
    #[serde(default)]
    pub constants: Option<Constants>,
    #[serde(default)]
    pub thresholds: Thresholds,
    /// Kelvin.
    #[serde(default)]
    pub temperature: Option<f64>,
    /// Energy unit for the `(J_q, J_p, U)` mapping, J; `lambda_c` when absent.
    #[serde(default)]
    pub unit: Option<f64>,
    #[serde(default)]
    pub qnd: Option<QndInputs>,
    #[serde(default)]
    pub jc: Option<JcConfig>,
}

impl CircuitConfig {
    pub fn network(&self) -> Result<DeviceNetwork> {
        match (self.network, self.identical) {
            (Some(net), None) => Ok(net),
            (None, Some(i)) => Ok(DeviceNetwork::identical(i.c_0, i.beta, i.e_j, i.n_g)),
            _ => bail!("exactly one of [network] or [identical] is required"),
        }
    }
}
