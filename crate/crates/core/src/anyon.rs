//! Excitations and protocol operations: vortex strings, loops, braiding and
//! fusion checks, the cavity controlled-string gate, string basis changes,
//! interferometric readout and the Jaynes-Cummings swap.
//!
//! Cavity conventions: amplitude index `n * 2^q + bits`, photon number `n`.
//! For the JC ancilla, qubit bit 1 is the excited level and `σ⁺ = |1⟩⟨0|`.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::lattice::{Color, HoneycombLayout};
use crate::operators::{self, majorana, plaquette_op, Family, Representation};
use crate::pauli::{i_pow, Pauli, PauliString};
use crate::state::{expectation, overlap, Gate2, StateVector};

/// Largest joint dimension accepted by the dense exponentiation routines.
pub const MAX_EXPM_DIM: usize = 4096;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn hermitize(p: PauliString) -> PauliString {
    if p.is_hermitian() {
        p
    } else {
        p.times_i_pow(1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StringKind {
    Explicit,
    SxString { square: usize, color: Color },
    UZ { sites: Vec<usize> },
    /// `∏ ψ_{i_w}` (W) or `∏ χ_{i_w}` (W̃) over columns `first..=last` of one chain.
    VortexSegment {
        family: Family,
        chain: usize,
        first: usize,
        last: usize,
    },
    /// Product of one family's plaquette operators over a region.
    PlaquetteLoop { family: Family, plaquettes: Vec<usize> },
}

/// A string operator together with the elementary steps that build it.
///
/// Applying `steps` in order reproduces `operator` up to a global phase.
/// `operator` is always a Hermitian Pauli string.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StringSpec {
    pub repr: Representation,
    pub kind: StringKind,
    pub steps: Vec<PauliString>,
    pub operator: PauliString,
}

impl StringSpec {
    fn from_steps(repr: Representation, kind: StringKind, steps: Vec<PauliString>) -> Result<Self> {
        let first = steps
            .first()
            .ok_or_else(|| Error::InvalidArgument("string needs at least one step".into()))?;
        let mut acc = PauliString::identity(first.n_sites())?;
        for s in &steps {
            acc = s.multiply(&acc)?;
        }
        Ok(Self {
            repr,
            kind,
            steps,
            operator: hermitize(acc),
        })
    }

    pub fn explicit(repr: Representation, n_sites: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let p = PauliString::from_factors(n_sites, factors)?;
        Self::from_steps(repr, StringKind::Explicit, vec![p])
    }

    pub fn sx_string(layout: &HoneycombLayout, repr: Representation, square: usize, color: Color) -> Result<Self> {
        let op = match repr {
            Representation::HoneycombSpin => operators::sx_string(layout, square, color)?,
            Representation::Device => operators::sx_string_device(layout, square, color)?,
        };
        Self::from_steps(repr, StringKind::SxString { square, color }, vec![op.pauli])
    }

    /// `U_z = ∏_{j∈S} σ^z_j`.
    pub fn u_z(repr: Representation, n_sites: usize, sites: &[usize]) -> Result<Self> {
        let p = PauliString::z_string(n_sites, sites.iter().copied())?;
        Self::from_steps(repr, StringKind::UZ { sites: sites.to_vec() }, vec![p])
    }

    /// Vortex-pair string on `chain`: one Majorana per column, so the steps
    /// drag a vortex from the bond left of `first` to the bond right of `last`.
    pub fn vortex_segment(
        layout: &HoneycombLayout,
        family: Family,
        chain: usize,
        first: usize,
        last: usize,
    ) -> Result<Self> {
        if chain >= layout.rows() || first > last || last >= layout.cols() {
            return Err(Error::InvalidArgument(format!(
                "segment chain {chain} columns {first}..={last} outside {}x{}",
                layout.rows(),
                layout.cols()
            )));
        }
        let steps = layout.chains()[chain][first..=last]
            .iter()
            .map(|&sq| majorana(layout, sq, family.species(), Color::White))
            .collect::<Result<Vec<_>>>()?;
        Self::from_steps(
            Representation::HoneycombSpin,
            StringKind::VortexSegment {
                family,
                chain,
                first,
                last,
            },
            steps,
        )
    }

    pub fn plaquette_loop(layout: &HoneycombLayout, family: Family, plaquettes: &[usize]) -> Result<Self> {
        let all = layout.plaquettes();
        let steps = plaquettes
            .iter()
            .map(|&k| {
                let p = all
                    .get(k)
                    .ok_or_else(|| Error::InvalidArgument(format!("no plaquette {k}")))?;
                plaquette_op(layout, p, family)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_steps(
            Representation::HoneycombSpin,
            StringKind::PlaquetteLoop {
                family,
                plaquettes: plaquettes.to_vec(),
            },
            steps,
        )
    }

    /// Apply the steps in order.
    pub fn apply_steps(&self, state: &StateVector) -> Result<StateVector> {
        let mut v = state.clone();
        for s in &self.steps {
            v = s.apply_to_state(&v)?;
        }
        Ok(v)
    }

    /// Same string, rotated so `σ^z` on `sites` becomes `σ^axis`.
    pub fn conjugated(&self, axis: Axis, sites: &[usize]) -> Result<Self> {
        let n = self.operator.n_sites();
        let rotate = |p: &PauliString| -> Result<PauliString> {
            let mut factors = Vec::new();
            let mut negate = false;
            for j in p.support() {
                let f = p.factor(j);
                let (g, flip) = if sites.contains(&j) { axis.rotate(f) } else { (f, false) };
                negate ^= flip;
                factors.push((j, g));
            }
            // Rotations act site by site on the literal product, so the
            // printed phase carries over.
            let lit = PauliString::from_factors(n, &factors)?.times_i_pow(p.display_phase_exp());
            Ok(if negate { lit.negate() } else { lit })
        };
        let steps = self.steps.iter().map(rotate).collect::<Result<Vec<_>>>()?;
        Self::from_steps(self.repr, StringKind::Explicit, steps)
    }
}

fn require_same(a: &StringSpec, b: &StringSpec) -> Result<()> {
    if a.repr != b.repr {
        return Err(Error::RepresentationMismatch {
            left: a.repr.name(),
            right: b.repr.name(),
        });
    }
    check_dim(a.operator.n_sites(), b.operator.n_sites())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VortexEntry {
    pub plaquette: usize,
    pub w: f64,
    pub w_tilde: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VortexMap {
    pub entries: Vec<VortexEntry>,
}

impl VortexMap {
    /// Every entry within `tol` of ±1.
    pub fn is_sharp(&self, tol: f64) -> bool {
        self.entries
            .iter()
            .all(|e| (e.w.abs() - 1.0).abs() <= tol && (e.w_tilde.abs() - 1.0).abs() <= tol)
    }

    /// Plaquettes whose sign differs from `reference`, per family.
    pub fn flips_from(&self, reference: &VortexMap) -> (Vec<usize>, Vec<usize>) {
        let mut w = Vec::new();
        let mut wt = Vec::new();
        for (a, b) in self.entries.iter().zip(&reference.entries) {
            if a.w * b.w < 0.0 {
                w.push(a.plaquette);
            }
            if a.w_tilde * b.w_tilde < 0.0 {
                wt.push(a.plaquette);
            }
        }
        (w, wt)
    }
}

/// `(⟨W_P⟩, ⟨W̃_P⟩)` for every plaquette of `layout`.
pub fn vortex_map(state: &StateVector, layout: &HoneycombLayout) -> Result<VortexMap> {
    check_dim(layout.n_sites(), state.n_qubits())?;
    let norm2 = state.norm().powi(2);
    let entries = layout
        .plaquettes()
        .iter()
        .map(|p| {
            let w = expectation(state, &plaquette_op(layout, p, Family::W)?)?;
            let wt = expectation(state, &plaquette_op(layout, p, Family::WTilde)?)?;
            Ok(VortexEntry {
                plaquette: p.index,
                w: w.re / norm2,
                w_tilde: wt.re / norm2,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VortexMap { entries })
}

/// Plaquettes of `family` whose operator anticommutes with `op`.
pub fn flipped_plaquettes(layout: &HoneycombLayout, op: &PauliString, family: Family) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for p in layout.plaquettes() {
        if !plaquette_op(layout, p, family)?.commutes(op)? {
            out.push(p.index);
        }
    }
    Ok(out)
}

/// `s` with `L·C = s·C·L`, from symplectic data.
pub fn braid_phase(loop_: &StringSpec, crossing: &StringSpec) -> Result<Complex64> {
    require_same(loop_, crossing)?;
    Ok(if loop_.operator.commutes(&crossing.operator)? {
        c(1.0, 0.0)
    } else {
        c(-1.0, 0.0)
    })
}

/// `⟨unbraided|braided⟩` where the braided run applies the crossing string
/// and then the loop, and the unbraided run applies them in reverse order.
pub fn braid_interference(state: &StateVector, loop_: &StringSpec, crossing: &StringSpec) -> Result<Complex64> {
    require_same(loop_, crossing)?;
    let braided = loop_.apply_steps(&crossing.apply_steps(state)?)?;
    let unbraided = crossing.apply_steps(&loop_.apply_steps(state)?)?;
    overlap(&unbraided, &braided)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionChannel {
    Vacuum,
    W,
    WTilde,
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FusionOutcome {
    pub channel: FusionChannel,
    pub flipped_w: Vec<usize>,
    pub flipped_w_tilde: Vec<usize>,
    /// Composite pattern equals the symmetric difference of the parts.
    pub additive: bool,
    pub residual: PauliString,
    pub residual_is_identity: bool,
}

/// Apply `s1` then `s2` to a stabilized `state` and classify the result.
pub fn fuse_check(
    layout: &HoneycombLayout,
    state: &StateVector,
    s1: &StringSpec,
    s2: &StringSpec,
) -> Result<FusionOutcome> {
    require_same(s1, s2)?;
    if s1.repr != Representation::HoneycombSpin {
        return Err(Error::RepresentationMismatch {
            left: s1.repr.name(),
            right: Representation::HoneycombSpin.name(),
        });
    }
    let base = vortex_map(state, layout)?;
    if !base.is_sharp(1e-9) {
        return Err(Error::InvalidArgument("reference state is not a plaquette eigenstate".into()));
    }
    let one = s1.operator.apply_to_state(state)?;
    let two = s2.operator.apply_to_state(state)?;
    let both = s2.operator.apply_to_state(&one)?;
    let (w1, t1) = vortex_map(&one, layout)?.flips_from(&base);
    let (w2, t2) = vortex_map(&two, layout)?.flips_from(&base);
    let (w12, t12) = vortex_map(&both, layout)?.flips_from(&base);
    let sym = |a: &[usize], b: &[usize]| -> Vec<usize> {
        let mut v: Vec<usize> = a.iter().filter(|x| !b.contains(x)).chain(b.iter().filter(|x| !a.contains(x))).copied().collect();
        v.sort_unstable();
        v
    };
    let additive = sym(&w1, &w2) == w12 && sym(&t1, &t2) == t12;
    let channel = match (w12.is_empty(), t12.is_empty()) {
        (true, true) => FusionChannel::Vacuum,
        (false, true) => FusionChannel::W,
        (true, false) => FusionChannel::WTilde,
        (false, false) => FusionChannel::Mixed,
    };
    let residual = s2.operator.multiply(&s1.operator)?;
    Ok(FusionOutcome {
        channel,
        flipped_w: w12,
        flipped_w_tilde: t12,
        additive,
        residual_is_identity: residual.is_identity_up_to_phase(),
        residual,
    })
}

/// Parameters of `H = χ n_c Σ_{j∈S} σ^z_j` applied for time `τ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QndParams {
    pub chi: f64,
    pub tau: f64,
    pub n_qubits: usize,
    pub sites: Vec<usize>,
}

impl QndParams {
    pub fn new(chi: f64, tau: f64, n_qubits: usize, sites: &[usize]) -> Result<Self> {
        if !chi.is_finite() || chi == 0.0 || !tau.is_finite() {
            return Err(Error::InvalidArgument(format!("chi {chi}, tau {tau}")));
        }
        if sites.is_empty() {
            return Err(Error::InvalidArgument("controlled string needs at least one site".into()));
        }
        let mut seen = 0u64;
        for &s in sites {
            if s >= n_qubits || seen >> s & 1 == 1 {
                return Err(Error::InvalidArgument(format!("bad site {s} in controlled string")));
            }
            seen |= 1 << s;
        }
        Ok(Self {
            chi,
            tau,
            n_qubits,
            sites: sites.to_vec(),
        })
    }

    /// `τ = π/(2χ)`.
    pub fn canonical(chi: f64, n_qubits: usize, sites: &[usize]) -> Result<Self> {
        Self::new(chi, FRAC_PI_2 / chi, n_qubits, sites)
    }

    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn chi_tau(&self) -> f64 {
        self.chi * self.tau
    }

    pub fn is_canonical(&self) -> bool {
        (self.chi_tau() - FRAC_PI_2).abs() <= 1e-12 * FRAC_PI_2
    }
}

/// `(−i)^{n_c N} (∏ σ^z)^{n_c}` on the qubit register.
pub fn qnd_closed_form(n_qubits: usize, sites: &[usize], n_c: usize) -> Result<PauliString> {
    let z = if n_c % 2 == 1 {
        PauliString::z_string(n_qubits, sites.iter().copied())?
    } else {
        PauliString::identity(n_qubits)?
    };
    Ok(z.times_i_pow(((3 * n_c * sites.len()) % 4) as u8))
}

/// Closed-form QND unitary in cavity sector `n_c`; rejects non-canonical `τ`.
pub fn qnd_unitary(params: &QndParams, n_c: usize) -> Result<PauliString> {
    if !params.is_canonical() {
        return Err(Error::TimeMismatch {
            chi_tau: params.chi_tau(),
        });
    }
    qnd_closed_form(params.n_qubits, &params.sites, n_c)
}

/// `exp(−iHτ)` over cavity ⊗ qubits by dense matrix exponentiation.
pub fn qnd_exact(params: &QndParams, cavity_dim: usize) -> Result<DMatrix<Complex64>> {
    let block = 1usize << params.n_qubits;
    let dim = cavity_dim * block;
    if cavity_dim == 0 || dim > MAX_EXPM_DIM {
        return Err(Error::Capacity {
            what: "QND exponentiation dimension",
            requested: dim,
            limit: MAX_EXPM_DIM,
        });
    }
    let mask: usize = params.sites.iter().map(|&s| 1usize << s).sum();
    let mut gen = DMatrix::<Complex64>::zeros(dim, dim);
    for idx in 0..dim {
        let n = (idx / block) as f64;
        let down = ((idx % block) & mask).count_ones() as f64;
        let sum_z = params.n() as f64 - 2.0 * down;
        gen[(idx, idx)] = c(0.0, -params.chi * n * sum_z * params.tau);
    }
    Ok(gen.exp())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QndCheck {
    pub chi_tau: f64,
    pub canonical: bool,
    /// Operator-norm distance to the closed form, per cavity sector.
    pub sector_deviation: Vec<f64>,
    /// Largest amplitude connecting different photon numbers.
    pub leakage: f64,
}

impl QndCheck {
    pub fn max_deviation(&self) -> f64 {
        self.sector_deviation.iter().copied().fold(self.leakage, f64::max)
    }
}

/// Compare the exponentiated evolution with the canonical closed form.
/// A non-canonical `τ` is reported as a large deviation, not an error.
pub fn qnd_deviation(params: &QndParams, cavity_dim: usize) -> Result<QndCheck> {
    let exact = qnd_exact(params, cavity_dim)?;
    let block = 1usize << params.n_qubits;
    let mut sector_deviation = Vec::with_capacity(cavity_dim);
    let mut leakage: f64 = 0.0;
    for m in 0..cavity_dim {
        for n in 0..cavity_dim {
            let sub = exact.view((m * block, n * block), (block, block));
            if m == n {
                let closed = qnd_closed_form(params.n_qubits, &params.sites, n)?.to_matrix_with_limit(params.n_qubits)?;
                let diff = sub - closed;
                sector_deviation.push(diff.singular_values().max());
            } else {
                leakage = leakage.max(sub.iter().map(|z| z.norm()).fold(0.0, f64::max));
            }
        }
    }
    Ok(QndCheck {
        chi_tau: params.chi_tau(),
        canonical: params.is_canonical(),
        sector_deviation,
        leakage,
    })
}

/// Cavity in `μ|0⟩ + ν|1⟩` tensored with a qubit state.
pub fn prepare_cavity(qubits: &StateVector, mu: Complex64, nu: Complex64) -> Result<StateVector> {
    let w = mu.norm_sqr() + nu.norm_sqr();
    if (w - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("|mu|^2 + |nu|^2 = {w}, expected 1")));
    }
    StateVector::with_cavity(qubits, &[mu, nu])
}

/// `U_cs = Σ_n |n⟩⟨n| ⊗ U_n` with `U_n` the closed-form sector unitary.
pub fn controlled_string(params: &QndParams, state: &StateVector) -> Result<StateVector> {
    if state.cavity_dim() < 2 {
        return Err(Error::InvalidArgument("controlled string needs cavity_dim >= 2".into()));
    }
    check_dim(params.n_qubits, state.n_qubits())?;
    let block = state.qubit_block();
    let mut out = state.clone();
    for n in 0..state.cavity_dim() {
        let u = qnd_unitary(params, n)?;
        let range = n * block..(n + 1) * block;
        u.apply_to_amplitudes(&state.amplitudes()[range.clone()], &mut out.amplitudes_mut()[range])?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Pauli {
        match self {
            Axis::X => Pauli::X,
            Axis::Y => Pauli::Y,
            Axis::Z => Pauli::Z,
        }
    }

    /// Image of `p` under conjugation by [`axis_gate`], which maps `Z` to
    /// this axis; the flag marks a sign change.
    fn rotate(self, p: Pauli) -> (Pauli, bool) {
        match (self, p) {
            (_, Pauli::I) | (Axis::Z, _) => (p, false),
            (_, Pauli::Z) => (self.pauli(), false),
            (Axis::X, Pauli::X) => (Pauli::Z, false),
            (Axis::X, Pauli::Y) => (Pauli::Y, true),
            (Axis::Y, Pauli::X) => (Pauli::Z, false),
            (Axis::Y, Pauli::Y) => (Pauli::X, false),
        }
    }

    fn of(p: Pauli) -> Option<Axis> {
        match p {
            Pauli::I => None,
            Pauli::X => Some(Axis::X),
            Pauli::Y => Some(Axis::Y),
            Pauli::Z => Some(Axis::Z),
        }
    }
}

pub fn hadamard() -> Gate2 {
    let s = FRAC_1_SQRT_2;
    [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]]
}

/// `R = exp(−iπσ^z/4)`.
pub fn r_gate() -> Gate2 {
    let e = Complex64::from_polar(1.0, FRAC_PI_4);
    [[e.conj(), c(0.0, 0.0)], [c(0.0, 0.0), e]]
}

pub fn gate_mul(a: &Gate2, b: &Gate2) -> Gate2 {
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn gate_adjoint(a: &Gate2) -> Gate2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

/// `V` with `V σ^z V† = σ^axis`: `I`, `H`, or `RH`.
pub fn axis_gate(axis: Axis) -> Gate2 {
    match axis {
        Axis::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]],
        Axis::X => hadamard(),
        Axis::Y => gate_mul(&r_gate(), &hadamard()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisChange {
    pub axis: Axis,
    pub sites: Vec<usize>,
    /// `∏ σ^axis` built directly.
    pub target: PauliString,
}

/// `U_axis = V U_z V†` on `sites`, returned with the directly built target.
pub fn string_basis_change(axis: Axis, n_qubits: usize, sites: &[usize]) -> Result<BasisChange> {
    let factors: Vec<(usize, Pauli)> = sites.iter().map(|&s| (s, axis.pauli())).collect();
    Ok(BasisChange {
        axis,
        sites: sites.to_vec(),
        target: PauliString::from_factors(n_qubits, &factors)?,
    })
}

/// Apply `V` (or `V†` if `inverse`) on each listed site.
pub fn apply_axis_gates(state: &mut StateVector, rotations: &[(usize, Axis)], inverse: bool) -> Result<()> {
    for &(site, axis) in rotations {
        let v = axis_gate(axis);
        let g = if inverse { gate_adjoint(&v) } else { v };
        state.apply_gate(site, &g)?;
    }
    Ok(())
}

/// Dense matrix of `(⊗ g) U_z (⊗ g)†` with `g` on every listed site.
pub fn conjugate_z_string_dense(gate: &Gate2, n_qubits: usize, sites: &[usize], dense_limit: usize) -> Result<DMatrix<Complex64>> {
    let dim = 1usize << n_qubits;
    let uz = PauliString::z_string(n_qubits, sites.iter().copied())?.to_matrix_with_limit(dense_limit)?;
    let mut v = DMatrix::<Complex64>::zeros(dim, dim);
    for col in 0..dim {
        let mut e = StateVector::basis(n_qubits, 1, col)?;
        for &s in sites {
            e.apply_gate(s, gate)?;
        }
        v.set_column(col, &nalgebra::DVector::from_column_slice(e.amplitudes()));
    }
    Ok(&v * uz * v.adjoint())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InterferometryReadout {
    pub coherence_real: f64,
    pub coherence_imag: f64,
    pub inferred_eigenvalue: f64,
    pub direct_expectation: f64,
}

/// Cavity-assisted readout of `⟨string⟩` on a qubit `state`.
///
/// The cavity starts in `(|0⟩+|1⟩)/√2`; the string's support is rotated to
/// `σ^z`, the controlled string runs, and the rotation is undone. The
/// coherence `2ρ_{10}` equals `(−i)^N ⟨∏σ⟩`.
pub fn interferometry_run(state: &StateVector, string: &PauliString, cavity_dim: usize) -> Result<InterferometryReadout> {
    if cavity_dim < 2 {
        return Err(Error::InvalidArgument("interferometry needs cavity_dim >= 2".into()));
    }
    if state.cavity_dim() != 1 {
        return Err(Error::InvalidArgument("input must be a qubit-only state".into()));
    }
    if !string.is_hermitian() {
        return Err(Error::InvalidArgument("string operator must be Hermitian".into()));
    }
    let rotations: Vec<(usize, Axis)> = string
        .support()
        .map(|j| (j, Axis::of(string.factor(j)).expect("support site")))
        .collect();
    let sites: Vec<usize> = rotations.iter().map(|r| r.0).collect();
    let params = QndParams::canonical(1.0, state.n_qubits(), &sites)?;

    let mut cavity = vec![c(0.0, 0.0); cavity_dim];
    cavity[0] = c(FRAC_1_SQRT_2, 0.0);
    cavity[1] = c(FRAC_1_SQRT_2, 0.0);
    let mut joint = StateVector::with_cavity(state, &cavity)?;
    apply_axis_gates(&mut joint, &rotations, true)?;
    let mut joint = controlled_string(&params, &joint)?;
    apply_axis_gates(&mut joint, &rotations, false)?;

    let rho = joint.cavity_density();
    let coherence = rho[1][0] * 2.0;
    let norm2 = state.norm().powi(2);
    let n = sites.len() as u8;
    let inferred = (i_pow(string.display_phase_exp()) * i_pow(n % 4) * coherence).re / norm2;
    Ok(InterferometryReadout {
        coherence_real: coherence.re,
        coherence_imag: coherence.im,
        inferred_eigenvalue: inferred,
        direct_expectation: expectation(state, string)?.re / norm2,
    })
}

/// Exact evolution of a cavity ⊗ ancilla state under `H = Ω(aσ⁺ + a†σ⁻)`.
pub fn jc_swap(state: &StateVector, omega: f64, t: f64) -> Result<StateVector> {
    if state.n_qubits() != 1 {
        return Err(Error::InvalidArgument("JC ancilla is a single qubit".into()));
    }
    let d = state.cavity_dim();
    if d < 2 {
        return Err(Error::InvalidArgument("JC swap needs cavity_dim >= 2".into()));
    }
    if !omega.is_finite() || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("omega {omega}, t {t}")));
    }
    let dim = 2 * d;
    if dim > MAX_EXPM_DIM {
        return Err(Error::Capacity {
            what: "JC dimension",
            requested: dim,
            limit: MAX_EXPM_DIM,
        });
    }
    let mut gen = DMatrix::<Complex64>::zeros(dim, dim);
    for n in 0..d - 1 {
        let (excited, photon) = (2 * n + 1, 2 * (n + 1));
        let g = c(0.0, -omega * t * ((n + 1) as f64).sqrt());
        gen[(excited, photon)] = g;
        gen[(photon, excited)] = g;
    }
    let u = gen.exp();
    let v = u * nalgebra::DVector::from_column_slice(state.amplitudes());
    StateVector::from_amplitudes(1, d, v.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::build_layout;
    use crate::state::project_ground;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
        let amps = (0..1usize << n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut v = StateVector::from_amplitudes(n, 1, amps).unwrap();
        v.normalize().unwrap();
        v
    }

    #[test]
    fn ground_state_map_is_all_plus() {
        let l = build_layout(2, 3).unwrap();
        let g = project_ground(&l).unwrap();
        let m = vortex_map(&g, &l).unwrap();
        assert_eq!(m.entries.len(), 4);
        for e in &m.entries {
            assert!((e.w - 1.0).abs() < 1e-12 && (e.w_tilde - 1.0).abs() < 1e-12);
        }
        assert!(vortex_map(&StateVector::basis(3, 1, 0).unwrap(), &l).is_err());
    }

    #[test]
    fn vortex_segment_flips_only_its_family_at_the_ends() {
        let l = build_layout(3, 3).unwrap();
        for family in [Family::W, Family::WTilde] {
            let s = StringSpec::vortex_segment(&l, family, 1, 1, 1).unwrap();
            let mut own = flipped_plaquettes(&l, &s.operator, family).unwrap();
            own.sort_unstable();
            let left = l.left_plaquette(l.chains()[1][1]).unwrap();
            let right = l.right_plaquette(l.chains()[1][1]).unwrap();
            assert_eq!(own, vec![left, right]);
            assert!(flipped_plaquettes(&l, &s.operator, family.other()).unwrap().is_empty());
            assert!(s.operator.is_hermitian());
        }
        // a segment reaching the chain end leaves a single vortex
        let s = StringSpec::vortex_segment(&l, Family::W, 0, 1, 2).unwrap();
        assert_eq!(flipped_plaquettes(&l, &s.operator, Family::W).unwrap(), vec![l.left_plaquette(1).unwrap()]);
        assert!(StringSpec::vortex_segment(&l, Family::W, 0, 2, 3).is_err());
    }

    #[test]
    fn sx_string_flips_match_state_sweep() {
        let l = build_layout(2, 3).unwrap();
        let g = project_ground(&l).unwrap();
        let base = vortex_map(&g, &l).unwrap();
        for s in l.sites() {
            let spec = StringSpec::sx_string(&l, Representation::HoneycombSpin, s.square, s.color).unwrap();
            let moved = spec.operator.apply_to_state(&g).unwrap();
            let (w, wt) = vortex_map(&moved, &l).unwrap().flips_from(&base);
            assert_eq!(w, flipped_plaquettes(&l, &spec.operator, Family::W).unwrap());
            assert_eq!(wt, flipped_plaquettes(&l, &spec.operator, Family::WTilde).unwrap());
            assert!(!w.is_empty() || !wt.is_empty());
            // applying it twice restores the map
            let back = spec.operator.apply_to_state(&moved).unwrap();
            assert_eq!(vortex_map(&back, &l).unwrap().flips_from(&base), (vec![], vec![]));
        }
    }

    #[test]
    fn deformed_string_same_endpoints_same_map() {
        let l = build_layout(2, 3).unwrap();
        let g = project_ground(&l).unwrap();
        let s = StringSpec::vortex_segment(&l, Family::W, 0, 0, 0).unwrap();
        let lp = StringSpec::plaquette_loop(&l, Family::W, &[1]).unwrap();
        let deformed = s.operator.multiply(&lp.operator).unwrap();
        assert_ne!(deformed, s.operator);
        let a = vortex_map(&s.operator.apply_to_state(&g).unwrap(), &l).unwrap();
        let b = vortex_map(&deformed.apply_to_state(&g).unwrap(), &l).unwrap();
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert!((x.w - y.w).abs() < 1e-12 && (x.w_tilde - y.w_tilde).abs() < 1e-12);
        }
    }

    #[test]
    fn braid_phases_count_crossings() {
        let l = build_layout(3, 3).unwrap();
        let s = StringSpec::vortex_segment(&l, Family::W, 1, 0, 0).unwrap();
        let end = l.left_plaquette(l.chains()[1][1]).unwrap();
        let odd = StringSpec::plaquette_loop(&l, Family::W, &[end]).unwrap();
        assert_eq!(braid_phase(&odd, &s).unwrap(), c(-1.0, 0.0));
        let elsewhere = StringSpec::plaquette_loop(&l, Family::W, &[0]).unwrap();
        assert_eq!(braid_phase(&elsewhere, &s).unwrap(), c(1.0, 0.0));
        let two_ends = StringSpec::vortex_segment(&l, Family::W, 1, 1, 1).unwrap();
        let region = StringSpec::plaquette_loop(&l, Family::W, &[2, 3]).unwrap();
        assert_eq!(braid_phase(&region, &two_ends).unwrap(), c(1.0, 0.0));
        let cross = StringSpec::plaquette_loop(&l, Family::WTilde, &[end]).unwrap();
        assert_eq!(braid_phase(&cross, &s).unwrap(), c(1.0, 0.0));
        let dev = StringSpec::u_z(Representation::Device, 18, &[0]).unwrap();
        assert!(braid_phase(&odd, &dev).is_err());
    }

    #[test]
    fn state_level_braid_matches_operator_level() {
        let l = build_layout(2, 3).unwrap();
        let g = project_ground(&l).unwrap();
        for family in [Family::W, Family::WTilde] {
            let s = StringSpec::vortex_segment(&l, family, 0, 1, 1).unwrap();
            for region in [vec![0], vec![1], vec![0, 1], vec![2, 3]] {
                for lf in [family, family.other()] {
                    let lp = StringSpec::plaquette_loop(&l, lf, &region).unwrap();
                    let op = braid_phase(&lp, &s).unwrap();
                    let st = braid_interference(&g, &lp, &s).unwrap();
                    assert!((op - st).norm() < 1e-10, "{family:?} {lf:?} {region:?}");
                }
            }
        }
    }

    #[test]
    fn fusion_rules() {
        let l = build_layout(2, 3).unwrap();
        let g = project_ground(&l).unwrap();
        let a = StringSpec::vortex_segment(&l, Family::W, 0, 0, 0).unwrap();
        let b = StringSpec::vortex_segment(&l, Family::W, 0, 1, 1).unwrap();
        let t = StringSpec::vortex_segment(&l, Family::WTilde, 1, 0, 0).unwrap();

        let aa = fuse_check(&l, &g, &a, &a).unwrap();
        assert_eq!(aa.channel, FusionChannel::Vacuum);
        assert!(aa.residual_is_identity && aa.additive);

        // a: {0}, b: {0, 1}, composite: {1}
        let ab = fuse_check(&l, &g, &a, &b).unwrap();
        assert_eq!(ab.channel, FusionChannel::W);
        assert_eq!(ab.flipped_w, vec![1]);
        assert!(ab.additive && !ab.residual_is_identity);

        let at = fuse_check(&l, &g, &a, &t).unwrap();
        assert_eq!(at.channel, FusionChannel::Mixed);
        assert_eq!((at.flipped_w.len(), at.flipped_w_tilde.len()), (1, 1));

        let excited = a.operator.apply_to_state(&g).unwrap();
        let mut mixed = g.clone();
        mixed.add_assign(&excited).unwrap();
        assert!(fuse_check(&l, &mixed, &a, &b).is_err());
    }

    #[test]
    fn qnd_closed_form_values() {
        let p = QndParams::canonical(2.5, 2, &[0, 1]).unwrap();
        assert!(qnd_unitary(&p, 0).unwrap().is_identity_up_to_phase());
        assert_eq!(qnd_unitary(&p, 0).unwrap().phase_exp(), 0);
        assert_eq!(qnd_unitary(&p, 1).unwrap().to_string(), "- ZZ");
        let p3 = QndParams::canonical(1.0, 3, &[0, 2]).unwrap();
        assert_eq!(qnd_unitary(&p3, 1).unwrap().to_string(), "- ZIZ");
        let bad = QndParams::new(1.0, 0.5, 2, &[0]).unwrap();
        assert!(matches!(qnd_unitary(&bad, 1), Err(Error::TimeMismatch { .. })));
        assert!(QndParams::canonical(1.0, 2, &[0, 0]).is_err());
        assert!(QndParams::canonical(1.0, 2, &[]).is_err());
    }

    #[test]
    fn qnd_exponential_matches_closed_form() {
        for n in 1..=4 {
            let sites: Vec<usize> = (0..n).collect();
            let p = QndParams::canonical(0.7, n, &sites).unwrap();
            let check = qnd_deviation(&p, 3).unwrap();
            assert!(check.max_deviation() < 1e-10, "{check:?}");
        }
        let half = QndParams::new(1.0, FRAC_PI_4, 2, &[0, 1]).unwrap();
        let check = qnd_deviation(&half, 2).unwrap();
        assert!(!check.canonical);
        assert!(check.sector_deviation[1] > 0.5);
        assert!(check.sector_deviation[0] < 1e-12);
    }

    #[test]
    fn controlled_string_sectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let psi = random_state(3, &mut rng);
        let p = QndParams::canonical(1.0, 3, &[0, 2]).unwrap();
        let vac = prepare_cavity(&psi, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_eq!(controlled_string(&p, &vac).unwrap(), vac);
        let one = prepare_cavity(&psi, c(0.0, 0.0), c(1.0, 0.0)).unwrap();
        let out = controlled_string(&p, &one).unwrap().cavity_sector(1).unwrap();
        let expect = qnd_closed_form(3, &[0, 2], 1).unwrap().apply_to_state(&psi).unwrap();
        assert_eq!(out, expect);
        assert!(controlled_string(&p, &psi).is_err());
        assert!(prepare_cavity(&psi, c(1.0, 0.0), c(1.0, 0.0)).is_err());
    }

    #[test]
    fn basis_changes() {
        let h = conjugate_z_string_dense(&axis_gate(Axis::X), 1, &[0], 4).unwrap();
        assert!((h - PauliString::single(1, 0, Pauli::X).unwrap().to_matrix().unwrap()).norm() < 1e-15);
        for n in 1..=3 {
            let sites: Vec<usize> = (0..n).collect();
            for axis in [Axis::X, Axis::Y] {
                let bc = string_basis_change(axis, n, &sites).unwrap();
                let dense = conjugate_z_string_dense(&axis_gate(axis), n, &sites, 4).unwrap();
                assert!((dense - bc.target.to_matrix().unwrap()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn conjugated_matches_dense_rotation() {
        use Pauli::*;
        let n = 3;
        let sites = [0, 2];
        for axis in [Axis::X, Axis::Y] {
            let mut v = DMatrix::<Complex64>::zeros(8, 8);
            for col in 0..8 {
                let mut e = StateVector::basis(n, 1, col).unwrap();
                for &s in &sites {
                    e.apply_gate(s, &axis_gate(axis)).unwrap();
                }
                v.set_column(col, &nalgebra::DVector::from_column_slice(e.amplitudes()));
            }
            for f in [[X, Y, Z], [Y, Y, X], [Z, I, Y], [Y, X, X]] {
                let spec = StringSpec::explicit(Representation::Device, n, &[(0, f[0]), (1, f[1]), (2, f[2])]).unwrap();
                let dense = &v * spec.operator.to_matrix().unwrap() * v.adjoint();
                let rotated = spec.conjugated(axis, &sites).unwrap().operator.to_matrix().unwrap();
                assert!((dense - rotated).norm() < 1e-13, "{axis:?} {f:?}");
            }
        }
    }

    #[test]
    fn literal_r_sandwich_is_scalar() {
        // R Z R = Z exp(−iπZ/2) = −i on one site
        let r = r_gate();
        let z: Gate2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
        let rzr = gate_mul(&gate_mul(&r, &z), &r);
        assert!((rzr[0][0] - c(0.0, -1.0)).norm() < 1e-15);
        assert!((rzr[1][1] - c(0.0, -1.0)).norm() < 1e-15);
        assert!(rzr[0][1].norm() < 1e-15 && rzr[1][0].norm() < 1e-15);
    }

    #[test]
    fn conjugation_preserves_braid_phases() {
        let l = build_layout(2, 3).unwrap();
        let s = StringSpec::vortex_segment(&l, Family::W, 0, 0, 0).unwrap();
        let lp = StringSpec::plaquette_loop(&l, Family::W, &[0]).unwrap();
        let sites: Vec<usize> = (0..l.n_sites()).step_by(2).collect();
        for axis in [Axis::X, Axis::Y] {
            let s2 = s.conjugated(axis, &sites).unwrap();
            let l2 = lp.conjugated(axis, &sites).unwrap();
            assert_eq!(braid_phase(&l2, &s2).unwrap(), braid_phase(&lp, &s).unwrap());
            assert!(s2.operator.is_hermitian());
        }
    }

    #[test]
    fn interferometry_on_ground_and_excited_states() {
        let l = build_layout(2, 3).unwrap();
        let g = project_ground(&l).unwrap();
        let lp = StringSpec::plaquette_loop(&l, Family::W, &[0]).unwrap();
        let r = interferometry_run(&g, &lp.operator, 2).unwrap();
        assert!((r.inferred_eigenvalue - 1.0).abs() < 1e-10);
        let s = StringSpec::vortex_segment(&l, Family::W, 0, 0, 0).unwrap();
        let excited = s.operator.apply_to_state(&g).unwrap();
        let r = interferometry_run(&excited, &lp.operator, 3).unwrap();
        assert!((r.inferred_eigenvalue + 1.0).abs() < 1e-10);
        assert!(interferometry_run(&g, &lp.operator, 1).is_err());
    }

    #[test]
    fn interferometry_random_states_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let psi = random_state(4, &mut rng);
            let factors: Vec<(usize, Pauli)> = (0..4)
                .map(|j| (j, [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][rng.random_range(0..4)]))
                .filter(|f| f.1 != Pauli::I)
                .collect();
            if factors.is_empty() {
                continue;
            }
            let p = PauliString::from_factors(4, &factors).unwrap();
            for p in [p, p.negate()] {
                let r = interferometry_run(&psi, &p, 2).unwrap();
                assert!((r.inferred_eigenvalue - r.direct_expectation).abs() < 1e-12);
            }
        }
    }

    fn rabi_oracle(n_plus_one: f64, omega: f64, t: f64) -> (Complex64, Complex64) {
        let th = n_plus_one.sqrt() * omega * t;
        (c(th.cos(), 0.0), c(0.0, -th.sin()))
    }

    #[test]
    fn jc_swap_transfers_excitation() {
        let omega = 1.7;
        let t = FRAC_PI_2 / omega;
        // |0_c 1_q⟩ is index 1
        let start = StateVector::basis(1, 3, 1).unwrap();
        let out = jc_swap(&start, omega, t).unwrap();
        assert!((out.amplitudes()[2] - c(0.0, -1.0)).norm() < 1e-12);
        assert!(out.amplitudes()[1].norm() < 1e-12);
        let dark = StateVector::basis(1, 3, 0).unwrap();
        assert_eq!(jc_swap(&dark, omega, t).unwrap(), dark);
        assert!(jc_swap(&StateVector::basis(1, 1, 0).unwrap(), omega, t).is_err());
    }

    #[test]
    fn jc_matches_rabi_blocks() {
        let omega = 0.9;
        for &t in &[0.0, 0.3, 1.1, 2.9] {
            // |1_c 1_q⟩ (index 3) couples to |2_c 0_q⟩ (index 4) at rate √2 Ω
            let out = jc_swap(&StateVector::basis(1, 4, 3).unwrap(), omega, t).unwrap();
            let (stay, go) = rabi_oracle(2.0, omega, t);
            assert!((out.amplitudes()[3] - stay).norm() < 1e-12);
            assert!((out.amplitudes()[4] - go).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn jc_preserves_norm(t in -10.0f64..10.0, omega in 0.1f64..3.0, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let amps = (0..8).map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let mut v = StateVector::from_amplitudes(1, 4, amps).unwrap();
            v.normalize().unwrap();
            let out = jc_swap(&v, omega, t).unwrap();
            prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn controlled_string_unitary(seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let psi = random_state(3, &mut rng);
            let joint = prepare_cavity(&psi, c(0.6, 0.0), c(0.0, 0.8)).unwrap();
            let p = QndParams::canonical(1.0, 3, &[1, 2]).unwrap();
            prop_assert!((controlled_string(&p, &joint).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }
}
