//! Dense state vectors over a qubit register times a truncated cavity mode.
//!
//! Amplitude index = `cavity_level * 2^n_qubits + qubit_bits`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::lattice::HoneycombLayout;
use crate::operators::{plaquette_w, plaquette_w_tilde};
use crate::pauli::PauliString;

/// Default cap on the number of stored amplitudes.
pub const DEFAULT_STATE_CAPACITY: usize = 1 << 24;

pub type Gate2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    cavity_dim: usize,
    amps: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmplitudeRow {
    pub index: usize,
    pub re: f64,
    pub im: f64,
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl StateVector {
    pub fn from_amplitudes(n_qubits: usize, cavity_dim: usize, amps: Vec<Complex64>) -> Result<Self> {
        if cavity_dim == 0 {
            return Err(Error::InvalidArgument("cavity_dim must be at least 1".into()));
        }
        let len = cavity_dim
            .checked_mul(1usize.checked_shl(n_qubits as u32).unwrap_or(0))
            .filter(|&l| l > 0 && l <= DEFAULT_STATE_CAPACITY)
            .ok_or(Error::Capacity {
                what: "state amplitudes",
                requested: usize::MAX,
                limit: DEFAULT_STATE_CAPACITY,
            })?;
        check_dim(len, amps.len())?;
        Ok(Self {
            n_qubits,
            cavity_dim,
            amps,
        })
    }

    pub fn zeros(n_qubits: usize, cavity_dim: usize) -> Result<Self> {
        let len = cavity_dim.saturating_mul(1usize.checked_shl(n_qubits as u32).unwrap_or(usize::MAX));
        if len > DEFAULT_STATE_CAPACITY {
            return Err(Error::Capacity {
                what: "state amplitudes",
                requested: len,
                limit: DEFAULT_STATE_CAPACITY,
            });
        }
        Self::from_amplitudes(n_qubits, cavity_dim, vec![zero(); len])
    }

    pub fn basis(n_qubits: usize, cavity_dim: usize, index: usize) -> Result<Self> {
        let mut s = Self::zeros(n_qubits, cavity_dim)?;
        if index >= s.len() {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
        }
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    /// `cavity ⊗ qubits` for a qubit-only state and cavity amplitudes.
    pub fn with_cavity(qubits: &StateVector, cavity: &[Complex64]) -> Result<Self> {
        if qubits.cavity_dim != 1 {
            return Err(Error::InvalidArgument("qubit state already carries a cavity".into()));
        }
        let mut amps = Vec::with_capacity(cavity.len() * qubits.len());
        for &c in cavity {
            amps.extend(qubits.amps.iter().map(|&a| c * a));
        }
        Self::from_amplitudes(qubits.n_qubits, cavity.len(), amps)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn cavity_dim(&self) -> usize {
        self.cavity_dim
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    pub fn qubit_block(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidArgument("cannot normalize the zero vector".into()));
        }
        self.amps.iter_mut().for_each(|a| *a /= n);
        Ok(n)
    }

    /// Rotate the global phase so the largest-magnitude amplitude (first one
    /// on ties) is real and positive.
    pub fn fix_global_phase(&mut self) {
        let max = self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return;
        }
        let lead = self
            .amps
            .iter()
            .find(|a| a.norm() >= max * (1.0 - 1e-12))
            .copied()
            .expect("max exists");
        let rot = lead.conj() / lead.norm();
        self.amps.iter_mut().for_each(|a| *a *= rot);
    }

    pub fn scale(&mut self, c: Complex64) {
        self.amps.iter_mut().for_each(|a| *a *= c);
    }

    pub fn add_assign(&mut self, other: &StateVector) -> Result<()> {
        self.same_shape(other)?;
        self.amps.iter_mut().zip(&other.amps).for_each(|(a, b)| *a += b);
        Ok(())
    }

    fn same_shape(&self, other: &StateVector) -> Result<()> {
        check_dim(self.n_qubits, other.n_qubits)?;
        check_dim(self.cavity_dim, other.cavity_dim)
    }

    /// `v ← (1 + P) v` in place.
    pub fn apply_one_plus(&mut self, p: &PauliString) -> Result<()> {
        let pv = p.apply_to_state(self)?;
        self.add_assign(&pv)
    }

    /// Single-qubit gate `u` on `qubit`, in every cavity sector.
    pub fn apply_gate(&mut self, qubit: usize, u: &Gate2) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::UnknownSite(format!("qubit {qubit} of {}", self.n_qubits)));
        }
        let bit = 1usize << qubit;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | bit]);
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[i | bit] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
        Ok(())
    }

    /// Reduced density matrix of the cavity, `ρ[m][n] = Σ_b a_{m,b} a*_{n,b}`.
    pub fn cavity_density(&self) -> Vec<Vec<Complex64>> {
        let block = self.qubit_block();
        let d = self.cavity_dim;
        let mut rho = vec![vec![zero(); d]; d];
        for m in 0..d {
            for n in 0..d {
                rho[m][n] = (0..block)
                    .map(|b| self.amps[m * block + b] * self.amps[n * block + b].conj())
                    .sum();
            }
        }
        rho
    }

    /// Qubit-register slice belonging to one cavity level.
    pub fn cavity_sector(&self, level: usize) -> Result<StateVector> {
        if level >= self.cavity_dim {
            return Err(Error::InvalidArgument(format!("cavity level {level} out of range")));
        }
        let block = self.qubit_block();
        Self::from_amplitudes(self.n_qubits, 1, self.amps[level * block..(level + 1) * block].to_vec())
    }

    /// Debug table of nonzero amplitudes.
    pub fn export(&self, threshold: f64) -> Vec<AmplitudeRow> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > threshold)
            .map(|(index, a)| AmplitudeRow {
                index,
                re: a.re,
                im: a.im,
            })
            .collect()
    }
}

/// `⟨u|v⟩`.
pub fn overlap(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    u.same_shape(v)?;
    Ok(u.amps.iter().zip(&v.amps).map(|(a, b)| a.conj() * b).sum())
}

/// `⟨v|P|v⟩`.
pub fn expectation(v: &StateVector, p: &PauliString) -> Result<Complex64> {
    let pv = p.apply_to_state(v)?;
    overlap(v, &pv)
}

/// Product state with every honeycomb `S^z = +1`, i.e. all bits 0.
pub fn reference_state(layout: &HoneycombLayout) -> Result<StateVector> {
    StateVector::basis(layout.n_sites(), 1, 0)
}

/// Normalized `∏_P (1 + W_P)(1 + W̃_P) |φ⟩`.
pub fn project_ground(layout: &HoneycombLayout) -> Result<StateVector> {
    project_stabilized(layout, &reference_state(layout)?)
}

/// Apply every `(1 + W_P)(1 + W̃_P)` to `seed` and normalize.
pub fn project_stabilized(layout: &HoneycombLayout, seed: &StateVector) -> Result<StateVector> {
    let mut v = seed.clone();
    let scale = v.norm();
    for p in layout.plaquettes() {
        v.apply_one_plus(&plaquette_w(layout, p)?)?;
        v.apply_one_plus(&plaquette_w_tilde(layout, p)?)?;
    }
    let norm = v.norm();
    if norm <= 1e-10 * scale {
        return Err(Error::ZeroProjection { norm });
    }
    v.normalize()?;
    v.fix_global_phase();
    Ok(v)
}
