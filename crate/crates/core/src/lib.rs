//! Exact simulation of a two-component fermion model on a square lattice, its
//! honeycomb spin encoding, mutual-semion anyons and a superconducting-circuit
//! realization.
//!
//! Conventions are frozen in `docs/CONVENTIONS.md`.

pub mod anyon;
pub mod circuit;
pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod operators;
pub mod pauli;
pub mod spectrum;
pub mod state;

pub use anyon::{
    braid_phase, fuse_check, interferometry_run, jc_swap, qnd_unitary, vortex_map, Axis, FusionOutcome,
    InterferometryReadout, QndParams, StringSpec, VortexMap,
};
pub use circuit::{
    chain_couplings, qnd_frequencies, two_device_couplings, Constants, Device, DeviceNetwork, Thresholds, CODATA,
};
pub use error::{Error, Result};
pub use hamiltonian::{
    build_device_hamiltonian, build_spin_hamiltonian, Couplings, FermionEnergyOracle, HamiltonianTerms,
};
pub use lattice::{build_layout, Color, HoneycombLayout, HoneycombSite, Plaquette};
pub use operators::{Family, Operator, Representation};
pub use pauli::{Pauli, PauliString};
pub use spectrum::{spectrum, SolverOptions, SpectrumRequest};
pub use state::{expectation, overlap, project_ground, reference_state, StateVector};
