//! Spin-representation Hamiltonian, the device-representation Ising form and
//! the diagonal occupation-number energy of the fermion model.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::HoneycombLayout;
use crate::operators::{device_qubit, link_zz, plaquette_w, plaquette_w_tilde, Chain, Representation};
use crate::pauli::PauliString;

/// Coupling constants `(J_q, J_p, U)`, any consistent energy unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Couplings {
    pub j_q: f64,
    pub j_p: f64,
    pub u: f64,
}

impl Couplings {
    pub fn new(j_q: f64, j_p: f64, u: f64) -> Self {
        Self { j_q, j_p, u }
    }

    pub fn unit() -> Self {
        Self::new(1.0, 1.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coefficient: f64,
    pub operator: PauliString,
}

/// Real-weighted sum of Hermitian Pauli strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HamiltonianTerms {
    pub repr: Representation,
    n_sites: usize,
    pub couplings: Option<Couplings>,
    terms: Vec<Term>,
}

impl HamiltonianTerms {
    pub fn new(repr: Representation, n_sites: usize) -> Self {
        Self {
            repr,
            n_sites,
            couplings: None,
            terms: Vec::new(),
        }
    }

    pub fn push(&mut self, coefficient: f64, operator: PauliString) -> Result<()> {
        check_dim(self.n_sites, operator.n_sites())?;
        if !operator.is_hermitian() {
            return Err(Error::InvalidArgument(format!("term {operator} is not Hermitian")));
        }
        self.terms.push(Term {
            coefficient,
            operator,
        });
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_sites
    }

    /// `H v` on a buffer whose length is a multiple of `2^n_sites`.
    pub fn apply(&self, input: &[Complex64]) -> Result<Vec<Complex64>> {
        let block = self.dim();
        if !input.len().is_multiple_of(block) {
            return Err(Error::DimensionMismatch {
                expected: block,
                actual: input.len(),
            });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); input.len()];
        for (src, dst) in input.chunks_exact(block).zip(out.chunks_exact_mut(block)) {
            for term in &self.terms {
                for (b, &amp) in src.iter().enumerate() {
                    let (t, a) = term.operator.act_on_basis(b as u64);
                    dst[t as usize] += a * amp * term.coefficient;
                }
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self, dense_limit: usize) -> Result<DMatrix<Complex64>> {
        if self.n_sites > dense_limit {
            return Err(Error::Capacity {
                what: "dense Hamiltonian sites",
                requested: self.n_sites,
                limit: dense_limit,
            });
        }
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for term in &self.terms {
            for b in 0..dim as u64 {
                let (t, a) = term.operator.act_on_basis(b);
                m[(t as usize, b as usize)] += a * term.coefficient;
            }
        }
        Ok(m)
    }

    /// `⟨v|H|v⟩` and `⟨v|H²|v⟩`.
    pub fn moments(&self, v: &[Complex64]) -> Result<(f64, f64)> {
        let hv = self.apply(v)?;
        let e: Complex64 = v.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum();
        let e2: f64 = hv.iter().map(|a| a.norm_sqr()).sum();
        Ok((e.re, e2))
    }
}

/// One term per line: `coefficient<TAB>pauli`.
impl fmt::Display for HamiltonianTerms {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# {} {}", self.repr.name(), self.n_sites)?;
        for t in &self.terms {
            writeln!(f, "{:?}\t{}", t.coefficient, t.operator)?;
        }
        Ok(())
    }
}

impl FromStr for HamiltonianTerms {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
        let mut parts = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse("missing header".into()))?
            .split_whitespace();
        let repr = match parts.next() {
            Some("honeycomb_spin") => Representation::HoneycombSpin,
            Some("device") => Representation::Device,
            other => return Err(Error::Parse(format!("bad representation {other:?}"))),
        };
        let n_sites: usize = parts
            .next()
            .and_then(|n| n.parse().ok())
            .ok_or_else(|| Error::Parse("bad site count".into()))?;
        let mut h = HamiltonianTerms::new(repr, n_sites);
        for line in lines {
            let (c, p) = line
                .split_once('\t')
                .ok_or_else(|| Error::Parse(format!("bad term line {line:?}")))?;
            let c: f64 = c.trim().parse().map_err(|e| Error::Parse(format!("{e}: {c:?}")))?;
            h.push(c, p.parse()?)?;
        }
        Ok(h)
    }
}

/// `-J_q Σ_P W_P - J_p Σ_P W̃_P - U Σ_i S^z_{i_b} S^z_{i_w}` on the honeycomb spins.
pub fn build_spin_hamiltonian(layout: &HoneycombLayout, couplings: Couplings) -> Result<HamiltonianTerms> {
    let mut h = HamiltonianTerms::new(Representation::HoneycombSpin, layout.n_sites());
    h.couplings = Some(couplings);
    for p in layout.plaquettes() {
        h.push(-couplings.j_q, plaquette_w(layout, p)?)?;
    }
    for p in layout.plaquettes() {
        h.push(-couplings.j_p, plaquette_w_tilde(layout, p)?)?;
    }
    for i in 0..layout.n_square_sites() {
        h.push(-couplings.u, link_zz(layout, i)?)?;
    }
    Ok(h)
}

/// The fermion model written directly on the device qubits, with
/// `σ^a_{z,i} ↔ 2n_{↑,i} - 1` and `σ^b_{z,i} ↔ 2n_{↓,i} - 1`:
/// `-J_q Σ σ^a_z σ^a_z - J_p Σ σ^b_z σ^b_z + U Σ σ^a_z σ^b_z`.
pub fn build_device_hamiltonian(layout: &HoneycombLayout, couplings: Couplings) -> Result<HamiltonianTerms> {
    let n = 2 * layout.n_square_sites();
    let mut h = HamiltonianTerms::new(Representation::Device, n);
    h.couplings = Some(couplings);
    for (i, j) in layout.bonds() {
        h.push(
            -couplings.j_q,
            PauliString::z_string(n, [device_qubit(i, Chain::A), device_qubit(j, Chain::A)])?,
        )?;
    }
    for (i, j) in layout.bonds() {
        h.push(
            -couplings.j_p,
            PauliString::z_string(n, [device_qubit(i, Chain::B), device_qubit(j, Chain::B)])?,
        )?;
    }
    for i in 0..layout.n_square_sites() {
        h.push(
            couplings.u,
            PauliString::z_string(n, [device_qubit(i, Chain::A), device_qubit(i, Chain::B)])?,
        )?;
    }
    Ok(h)
}

/// Largest lattice (square sites) the oracle will enumerate exhaustively.
pub const ORACLE_MAX_SQUARE_SITES: usize = 12;

/// Energy of the fermion model on occupation-number configurations.
///
/// A configuration is a bitstring with bit `2i` = `n_{↑,i}` and bit
/// `2i + 1` = `n_{↓,i}`.
#[derive(Debug, Clone)]
pub struct FermionEnergyOracle {
    bonds: Vec<(usize, usize)>,
    n_square: usize,
    chains: Vec<Vec<usize>>,
    pub couplings: Couplings,
}

impl FermionEnergyOracle {
    pub fn new(layout: &HoneycombLayout, couplings: Couplings) -> Self {
        Self {
            bonds: layout.bonds(),
            n_square: layout.n_square_sites(),
            chains: layout.chains().to_vec(),
            couplings,
        }
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_square
    }

    /// Bitstring form; bits beyond `2N` are ignored.
    pub fn energy_bits(&self, bits: u64) -> f64 {
        let s = |i: usize, spin: usize| -> f64 {
            if bits >> (2 * i + spin) & 1 == 1 {
                1.0
            } else {
                -1.0
            }
        };
        let Couplings { j_q, j_p, u } = self.couplings;
        let mut e = 0.0;
        for &(i, j) in &self.bonds {
            e -= j_q * s(i, 0) * s(j, 0);
            e -= j_p * s(i, 1) * s(j, 1);
        }
        for i in 0..self.n_square {
            e += u * s(i, 0) * s(i, 1);
        }
        e
    }

    /// Occupations as a list `[n_↑0, n_↓0, n_↑1, n_↓1, ...]`.
    pub fn energy(&self, occupations: &[bool]) -> Result<f64> {
        check_dim(self.n_modes(), occupations.len())?;
        let bits = occupations
            .iter()
            .enumerate()
            .fold(0u64, |acc, (k, &n)| acc | (u64::from(n) << k));
        Ok(self.energy_bits(bits))
    }

    /// Every configuration's energy, ascending.
    pub fn all_energies(&self) -> Result<Vec<f64>> {
        if self.n_square > ORACLE_MAX_SQUARE_SITES {
            return Err(Error::Capacity {
                what: "oracle square sites",
                requested: self.n_square,
                limit: ORACLE_MAX_SQUARE_SITES,
            });
        }
        let mut e: Vec<f64> = (0..1u64 << self.n_modes()).map(|b| self.energy_bits(b)).collect();
        e.sort_by(f64::total_cmp);
        Ok(e)
    }

    /// Minimum energy among configurations in which every chain is
    /// ferromagnetic in both species, and how many reach it.
    pub fn ferromagnetic_ground(&self) -> (f64, usize) {
        let n_chains = self.chains.len();
        let mut best = f64::INFINITY;
        let mut count = 0;
        for pattern in 0..1u64 << (2 * n_chains) {
            let mut bits = 0u64;
            for (c, chain) in self.chains.iter().enumerate() {
                let up = pattern >> (2 * c) & 1;
                let down = pattern >> (2 * c + 1) & 1;
                for &i in chain {
                    bits |= up << (2 * i) | down << (2 * i + 1);
                }
            }
            let e = self.energy_bits(bits);
            if e < best - 1e-12 {
                best = e;
                count = 1;
            } else if (e - best).abs() <= 1e-12 {
                count += 1;
            }
        }
        (best, count)
    }
}

/// Number of entries within `tol` of the first (smallest) one.
pub fn ground_degeneracy(sorted: &[f64], tol: f64) -> usize {
    match sorted.first() {
        Some(&e0) => sorted.iter().take_while(|&&e| e - e0 <= tol).count(),
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_layout;

    #[test]
    fn term_counts() {
        let l = build_layout(1, 2).unwrap();
        let h = build_spin_hamiltonian(&l, Couplings::unit()).unwrap();
        // one bond: one W, one W̃, two on-site terms
        assert_eq!(h.terms().len(), 4);
        assert_eq!(h.terms().iter().filter(|t| t.operator.weight() == 2 && t.operator.is_diagonal()).count(), 2);
        let l = build_layout(2, 3).unwrap();
        let h = build_spin_hamiltonian(&l, Couplings::new(0.3, 0.7, 1.1)).unwrap();
        assert_eq!(h.terms().len(), 4 + 4 + 6);
        assert!(h.terms()[..4].iter().all(|t| t.coefficient == -0.3));
        assert!(h.terms()[4..8].iter().all(|t| t.coefficient == -0.7));
        assert!(h.terms()[8..].iter().all(|t| t.coefficient == -1.1));
    }

    #[test]
    fn terms_pairwise_commute() {
        let l = build_layout(3, 3).unwrap();
        let h = build_spin_hamiltonian(&l, Couplings::unit()).unwrap();
        for a in h.terms() {
            for b in h.terms() {
                assert!(a.operator.commutes(&b.operator).unwrap());
            }
        }
    }

    #[test]
    fn fermion_energy_hand_values() {
        let l = build_layout(1, 2).unwrap();
        let o = FermionEnergyOracle::new(&l, Couplings::unit());
        // all occupied: -J_q - J_p + 2U
        assert_eq!(o.energy(&[true; 4]).unwrap(), 0.0);
        assert!(o.energy(&[true; 3]).is_err());
        let o = FermionEnergyOracle::new(&l, Couplings::new(2.0, 3.0, 5.0));
        assert_eq!(o.energy_bits(0b1111), -2.0 - 3.0 + 10.0);
        // n_↑0 = 1 only: s↑ = (+,-), s↓ = (-,-)
        assert_eq!(o.energy_bits(0b0001), 2.0 - 3.0 + 5.0 * (-1.0 + 1.0));
    }

    #[test]
    fn flipping_all_up_spins_keeps_jq_part() {
        let l = build_layout(2, 3).unwrap();
        let o = FermionEnergyOracle::new(&l, Couplings::new(1.0, 0.0, 0.0));
        let up_mask: u64 = (0..6).map(|i| 1u64 << (2 * i)).sum();
        for b in (0..4096u64).step_by(37) {
            assert_eq!(o.energy_bits(b), o.energy_bits(b ^ up_mask));
        }
    }

    #[test]
    fn device_diagonal_matches_oracle() {
        // device bit 0 is σ_z = +1, i.e. occupied
        let l = build_layout(2, 2).unwrap();
        let c = Couplings::new(0.4, -1.3, 0.9);
        let o = FermionEnergyOracle::new(&l, c);
        let h = build_device_hamiltonian(&l, c).unwrap();
        let m = h.to_dense(8).unwrap();
        for b in 0..256u64 {
            let occ = !b & 0xff;
            assert!((m[(b as usize, b as usize)].re - o.energy_bits(occ)).abs() < 1e-12);
        }
        for r in 0..256 {
            for col in 0..256 {
                if r != col {
                    assert_eq!(m[(r, col)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn dense_build_is_hermitian() {
        let l = build_layout(2, 2).unwrap();
        let h = build_spin_hamiltonian(&l, Couplings::new(0.3, -0.8, 1.7)).unwrap();
        let m = h.to_dense(10).unwrap();
        let diff = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert_eq!(diff, 0.0);
        assert!(h.to_dense(7).is_err());
    }

    #[test]
    fn apply_matches_dense() {
        let l = build_layout(2, 2).unwrap();
        let h = build_spin_hamiltonian(&l, Couplings::new(0.3, -0.8, 1.7)).unwrap();
        let v: Vec<Complex64> = (0..256).map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos())).collect();
        let fast = h.apply(&v).unwrap();
        let dense = h.to_dense(10).unwrap() * nalgebra::DVector::from_vec(v);
        for (a, b) in fast.iter().zip(dense.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn text_round_trip() {
        let l = build_layout(2, 2).unwrap();
        let h = build_spin_hamiltonian(&l, Couplings::new(0.1, 0.25, -3.5)).unwrap();
        let back: HamiltonianTerms = h.to_string().parse().unwrap();
        assert_eq!(back.terms(), h.terms());
        assert_eq!(back.n_sites(), 8);
    }

    #[test]
    fn non_hermitian_term_rejected() {
        let mut h = HamiltonianTerms::new(Representation::HoneycombSpin, 2);
        let iz: PauliString = "+i ZI".parse().unwrap();
        assert!(h.push(1.0, iz).is_err());
        assert!(h.push(1.0, "XXX".parse().unwrap()).is_err());
    }

    #[test]
    fn ferromagnetic_count() {
        let l = build_layout(2, 3).unwrap();
        let o = FermionEnergyOracle::new(&l, Couplings::unit());
        let (e, n) = o.ferromagnetic_ground();
        // 4 bonds per species, 6 sites with s↑ s↓ = -1
        assert_eq!(e, -4.0 - 4.0 - 6.0);
        assert_eq!(n, 4);
        let all = o.all_energies().unwrap();
        assert_eq!(all[0], e);
        assert_eq!(ground_degeneracy(&all, 1e-9), n);
    }
}
