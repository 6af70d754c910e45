//! Deterministic fixtures shared by the benchmarks.

use num_complex::Complex64;
use semion_core::{build_layout, build_spin_hamiltonian, Couplings, HamiltonianTerms, HoneycombLayout, StateVector};

/// Layout and unit-coupling spin Hamiltonian.
pub fn spin_fixture(rows: usize, cols: usize) -> (HoneycombLayout, HamiltonianTerms) {
    let layout = build_layout(rows, cols).expect("fixture layout");
    let h = build_spin_hamiltonian(&layout, Couplings::new(1.0, 0.7, 0.4)).expect("fixture Hamiltonian");
    (layout, h)
}

/// Normalized qubit state with every amplitude nonzero.
pub fn spread_state(n_qubits: usize) -> StateVector {
    let amps = (0..1usize << n_qubits)
        .map(|k| {
            let t = k as f64 + 1.0;
            Complex64::new(t.sin(), (0.5 * t).cos())
        })
        .collect();
    let mut v = StateVector::from_amplitudes(n_qubits, 1, amps).expect("fixture state");
    v.normalize().expect("nonzero fixture");
    v
}
