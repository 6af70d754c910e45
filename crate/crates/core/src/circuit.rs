//! Charge-qubit circuit parameters to effective couplings and protocol
//! frequencies, with validity diagnostics.
//!
//! Inputs are SI: farads, joules, kelvin, rad/s. Energies are reported in
//! joules and GHz (`E / h`). Diagnostics never modify computed values.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{Couplings, HamiltonianTerms};
use crate::lattice::HoneycombLayout;
use crate::operators::{device_qubit, Chain, Representation};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    /// Elementary charge, C.
    pub e: f64,
    /// Planck constant, J·s.
    pub h: f64,
    /// Reduced Planck constant, J·s.
    pub hbar: f64,
    /// Boltzmann constant, J/K.
    pub k_b: f64,
}

pub const CODATA: Constants = Constants {
    e: 1.602_176_634e-19,
    h: 6.626_070_15e-34,
    hbar: 1.054_571_817e-34,
    k_b: 1.380_649e-23,
};

impl Default for Constants {
    fn default() -> Self {
        CODATA
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Energy {
    pub joules: f64,
    pub ghz: f64,
}

impl Energy {
    pub fn new(joules: f64, k: &Constants) -> Self {
        Self {
            joules,
            ghz: joules / k.h / 1e9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Device {
    /// Gate capacitance, F.
    pub c_g: f64,
    /// Junction capacitance, F.
    pub c_j: f64,
    /// Josephson energy, J.
    pub e_j: f64,
    /// Gate charge in units of `2e`.
    pub n_g: f64,
}

impl Device {
    pub fn c_0(&self) -> f64 {
        self.c_g + self.c_j
    }
}

/// Two chains of identical devices (`a` and `b`) with on-site coupler `c_c`
/// and intra-chain couplers `c_a`, `c_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceNetwork {
    pub device_a: Device,
    pub device_b: Device,
    pub c_c: f64,
    pub c_a: f64,
    pub c_b: f64,
    pub chain_length: usize,
}

impl DeviceNetwork {
    /// Identical devices with `C_g = C_J = c_0 / 2` and `C_c = β c_0`.
    pub fn identical(c_0: f64, beta: f64, e_j: f64, n_g: f64) -> Self {
        let d = Device {
            c_g: c_0 / 2.0,
            c_j: c_0 / 2.0,
            e_j,
            n_g,
        };
        Self {
            device_a: d,
            device_b: d,
            c_c: beta * c_0,
            c_a: beta * c_0,
            c_b: beta * c_0,
            chain_length: 2,
        }
    }

    /// Device capacitances must be positive; couplers may be zero (decoupled
    /// limit) but not negative.
    pub fn validate(&self) -> Result<()> {
        for (name, d) in [("a", &self.device_a), ("b", &self.device_b)] {
            if !(d.c_g > 0.0 && d.c_j > 0.0) {
                return Err(Error::InvalidArgument(format!("device {name}: capacitances must be positive")));
            }
            if !(0.0..=1.0).contains(&d.n_g) {
                return Err(Error::InvalidArgument(format!("device {name}: n_g {} outside [0, 1]", d.n_g)));
            }
            if !(d.e_j >= 0.0 && d.e_j.is_finite()) {
                return Err(Error::InvalidArgument(format!("device {name}: E_J must be non-negative")));
            }
        }
        for (name, c) in [("c_c", self.c_c), ("c_a", self.c_a), ("c_b", self.c_b)] {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::InvalidArgument(format!("{name} must be non-negative")));
            }
        }
        if self.chain_length < 2 {
            return Err(Error::InvalidArgument("chain_length must be at least 2".into()));
        }
        Ok(())
    }

    pub fn c_t(&self, chain: Chain) -> f64 {
        self.device(chain).c_0() + self.c_c
    }

    pub fn device(&self, chain: Chain) -> &Device {
        match chain {
            Chain::A => &self.device_a,
            Chain::B => &self.device_b,
        }
    }

    /// `Λ = C_t^a C_t^b − C_c²`.
    pub fn lambda_capacitance(&self) -> f64 {
        self.c_t(Chain::A) * self.c_t(Chain::B) - self.c_c * self.c_c
    }

    pub fn mean_c_0(&self) -> f64 {
        0.5 * (self.device_a.c_0() + self.device_b.c_0())
    }

    /// `β = C_c / C_0` with the mean `C_0`.
    pub fn beta(&self) -> f64 {
        self.c_c / self.mean_c_0()
    }
}

/// `E_c = e²/(2C_0)`.
pub fn charging_energy(c_0: f64, k: &Constants) -> f64 {
    k.e * k.e / (2.0 * c_0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairCouplings {
    pub epsilon_a: Energy,
    pub epsilon_b: Energy,
    pub delta_a: Energy,
    pub delta_b: Energy,
    pub lambda: Energy,
    pub e_c_a: Energy,
    pub e_c_b: Energy,
    pub beta: f64,
    /// `Λ`, F².
    pub lambda_capacitance: f64,
}

/// Exact two-device reduction.
pub fn two_device_couplings(net: &DeviceNetwork, k: &Constants) -> Result<PairCouplings> {
    net.validate()?;
    let big_lambda = net.lambda_capacitance();
    if !(big_lambda > 0.0) {
        return Err(Error::DegenerateNetwork(format!("Lambda = {big_lambda:e} F^2")));
    }
    let e2 = k.e * k.e;
    let (ct_a, ct_b) = (net.c_t(Chain::A), net.c_t(Chain::B));
    Ok(PairCouplings {
        epsilon_a: Energy::new(2.0 * e2 * (ct_b + net.c_c) / big_lambda, k),
        epsilon_b: Energy::new(2.0 * e2 * (ct_a + net.c_c) / big_lambda, k),
        delta_a: Energy::new(net.device_a.e_j, k),
        delta_b: Energy::new(net.device_b.e_j, k),
        lambda: Energy::new(e2 * net.c_c / big_lambda, k),
        e_c_a: Energy::new(charging_energy(net.device_a.c_0(), k), k),
        e_c_b: Energy::new(charging_energy(net.device_b.c_0(), k), k),
        beta: net.beta(),
        lambda_capacitance: big_lambda,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainCouplings {
    pub lambda_a: Energy,
    pub lambda_b: Energy,
    pub lambda_c: Energy,
    pub beta: f64,
    pub order: &'static str,
}

impl ChainCouplings {
    /// `(λ_a, λ_b, λ_c) ↦ (J_q, J_p, U)`, in units of `unit` joules.
    pub fn mapped(&self, unit: f64) -> Couplings {
        Couplings::new(self.lambda_a.joules / unit, self.lambda_b.joules / unit, self.lambda_c.joules / unit)
    }
}

/// Chain couplings to first order in `β`:
/// `λ_η = e²C_η / (C_0 [C_0 + 2(C_c + 2C_η)])`,
/// `λ_c = e²C_c / (C_0 [C_0 + 2(C_c + C_a + C_b)])`.
///
/// The leading `1/C_0` makes these energies; with `C_a = C_b = 0`, `λ_c`
/// reduces to the exact two-device `λ` for identical devices.
pub fn chain_couplings(net: &DeviceNetwork, k: &Constants) -> Result<ChainCouplings> {
    net.validate()?;
    let e2 = k.e * k.e;
    let lam = |c_eta: f64, c_0: f64| e2 * c_eta / (c_0 * (c_0 + 2.0 * (net.c_c + 2.0 * c_eta)));
    let c_0 = net.mean_c_0();
    let lambda_c = e2 * net.c_c / (c_0 * (c_0 + 2.0 * (net.c_c + net.c_a + net.c_b)));
    Ok(ChainCouplings {
        lambda_a: Energy::new(lam(net.c_a, net.device_a.c_0()), k),
        lambda_b: Energy::new(lam(net.c_b, net.device_b.c_0()), k),
        lambda_c: Energy::new(lambda_c, k),
        beta: net.beta(),
        order: "first order in beta",
    })
}

/// Circuit interaction Hamiltonian on the device register, coefficients in
/// units of `unit` joules. With `include_single_device`, the
/// `−½[ε(1−2n_g)σ^z + Δσ^x]` terms of every device are added.
pub fn circuit_hamiltonian(
    layout: &HoneycombLayout,
    net: &DeviceNetwork,
    k: &Constants,
    unit: f64,
    include_single_device: bool,
) -> Result<HamiltonianTerms> {
    let chain = chain_couplings(net, k)?;
    let n = 2 * layout.n_square_sites();
    let mut h = HamiltonianTerms::new(Representation::Device, n);
    for (i, j) in layout.bonds() {
        for (ch, lam) in [(Chain::A, chain.lambda_a), (Chain::B, chain.lambda_b)] {
            let p = PauliString::z_string(n, [device_qubit(i, ch), device_qubit(j, ch)])?;
            h.push(lam.joules / unit, p)?;
        }
    }
    for i in 0..layout.n_square_sites() {
        let p = PauliString::z_string(n, [device_qubit(i, Chain::A), device_qubit(i, Chain::B)])?;
        h.push(chain.lambda_c.joules / unit, p)?;
    }
    if include_single_device {
        let pair = two_device_couplings(net, k)?;
        for i in 0..layout.n_square_sites() {
            for (ch, eps, delta) in [
                (Chain::A, pair.epsilon_a, pair.delta_a),
                (Chain::B, pair.epsilon_b, pair.delta_b),
            ] {
                let q = device_qubit(i, ch);
                let bias = eps.joules * (1.0 - 2.0 * net.device(ch).n_g);
                h.push(-0.5 * bias / unit, PauliString::single(n, q, Pauli::Z)?)?;
                h.push(-0.5 * delta.joules / unit, PauliString::single(n, q, Pauli::X)?)?;
            }
        }
    }
    Ok(h)
}

/// `β^{|i−j|}`.
pub fn long_range_estimate(i: usize, j: usize, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("beta {beta} outside (0, 1)")));
    }
    Ok(beta.powi(i.abs_diff(j) as i32))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    /// Bound on `δ/Δ₁` and `δ/Δ₂`.
    pub detuning_ratio: f64,
    /// Bound on `k_B T / E_c`.
    pub regime_ratio: f64,
    /// Bound on the next-nearest estimate `β²`.
    pub long_range: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            detuning_ratio: 0.1,
            regime_ratio: 0.1,
            long_range: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub name: &'static str,
    pub status: Status,
    pub value: f64,
    pub limit: f64,
    pub detail: String,
}

/// Warns iff `β² > threshold`.
pub fn long_range_diagnostic(beta: f64, threshold: f64) -> Result<Diagnostic> {
    let nnn = long_range_estimate(0, 2, beta)?;
    Ok(Diagnostic {
        name: "long_range",
        status: if nnn > threshold { Status::Warn } else { Status::Pass },
        value: nnn,
        limit: threshold,
        detail: "next-nearest coupling estimate beta^2".into(),
    })
}

/// `k_B T / E_c` against `ratio`.
pub fn regime_diagnostic(temperature: f64, e_c: f64, ratio: f64, k: &Constants) -> Diagnostic {
    let value = k.k_b * temperature / e_c;
    Diagnostic {
        name: "charge_regime",
        status: if value < ratio { Status::Pass } else { Status::Fail },
        value,
        limit: ratio,
        detail: "k_B T / E_c".into(),
    }
}

/// Pass/warn/fail report for a network; `temperature` in kelvin is optional.
pub fn circuit_diagnostics(
    net: &DeviceNetwork,
    k: &Constants,
    thresholds: &Thresholds,
    temperature: Option<f64>,
) -> Result<Vec<Diagnostic>> {
    let pair = two_device_couplings(net, k)?;
    let mut out = vec![Diagnostic {
        name: "lambda_capacitance_positive",
        status: Status::Pass,
        value: pair.lambda_capacitance,
        limit: 0.0,
        detail: "C_t^a C_t^b - C_c^2, F^2".into(),
    }];
    if net.c_c > 0.0 && net.c_c < net.mean_c_0() {
        out.push(long_range_diagnostic(pair.beta, thresholds.long_range)?);
    } else {
        out.push(Diagnostic {
            name: "long_range",
            status: if net.c_c == 0.0 { Status::Pass } else { Status::Fail },
            value: pair.beta,
            limit: 1.0,
            detail: "beta outside (0, 1)".into(),
        });
    }
    if let Some(t) = temperature {
        let e_c = pair.e_c_a.joules.min(pair.e_c_b.joules);
        out.push(regime_diagnostic(t, e_c, thresholds.regime_ratio, k));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QndInputs {
    /// Ancilla charging energy, J.
    pub e_c: f64,
    pub n_g: f64,
    /// Cavity angular frequency, rad/s.
    pub omega_c: f64,
    /// Detuning `δ`, rad/s.
    pub delta: f64,
    /// Vacuum Rabi coupling `g`, rad/s.
    pub g: f64,
    /// Temperature, K.
    #[serde(default)]
    pub temperature: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QndFrequencies {
    pub omega_01: f64,
    pub omega_12: f64,
    pub omega: f64,
    pub delta_1: f64,
    pub delta_2: f64,
    pub chi: f64,
    pub tau: f64,
    pub small_detuning_ok: bool,
    pub regime_ok: Option<bool>,
    pub negative: Vec<&'static str>,
}

/// Drive, detunings, dispersive shift and gate time of the QND interaction.
pub fn qnd_frequencies(inputs: &QndInputs, k: &Constants, thresholds: &Thresholds) -> Result<QndFrequencies> {
    let QndInputs {
        e_c,
        n_g,
        omega_c,
        delta,
        g,
        temperature,
    } = *inputs;
    if delta == 0.0 {
        return Err(Error::InvalidArgument("detuning delta must be nonzero".into()));
    }
    for (name, v) in [("e_c", e_c), ("n_g", n_g), ("omega_c", omega_c), ("delta", delta), ("g", g)] {
        if !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} is not finite")));
        }
    }
    let omega_12 = 2.0 * e_c * (3.0 - 2.0 * n_g) / k.hbar;
    let omega_01 = 2.0 * e_c * (1.0 - 2.0 * n_g) / k.hbar;
    let omega = omega_12 + omega_c + delta;
    let delta_1 = omega - omega_01;
    let delta_2 = omega_01 + omega_12 - omega;
    if delta_1 == 0.0 || delta_2 == 0.0 {
        return Err(Error::InvalidArgument("a detuning Delta vanishes".into()));
    }
    let chi = g * g / (2.0 * delta);
    let tau = FRAC_PI_2 / chi;
    let small_detuning_ok =
        (delta / delta_1).abs() < thresholds.detuning_ratio && (delta / delta_2).abs() < thresholds.detuning_ratio;
    let regime_ok = temperature.map(|t| k.k_b * t / e_c < thresholds.regime_ratio);
    let negative = [
        ("omega_01", omega_01),
        ("omega_12", omega_12),
        ("omega", omega),
        ("omega_c", omega_c),
        ("chi", chi),
        ("tau", tau),
    ]
    .into_iter()
    .filter(|(_, v)| *v < 0.0)
    .map(|(n, _)| n)
    .collect();
    Ok(QndFrequencies {
        omega_01,
        omega_12,
        omega,
        delta_1,
        delta_2,
        chi,
        tau,
        small_detuning_ok,
        regime_ok,
        negative,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JcResonance {
    pub omega: f64,
    pub omega_01: f64,
    pub note: Option<&'static str>,
}

/// `ω = ω_c + ω̃₀₁` for the swap ancilla.
pub fn jc_resonance(e_c: f64, n_g: f64, omega_c: f64, k: &Constants) -> JcResonance {
    let omega_01 = 2.0 * e_c * (1.0 - 2.0 * n_g) / k.hbar;
    let note = (omega_01 == 0.0).then_some("ancilla at the degeneracy point: omega_01 = 0, drive equals the cavity frequency");
    JcResonance {
        omega: omega_c + omega_01,
        omega_01,
        note,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingAudit {
    pub name: &'static str,
    pub passed: bool,
}

/// Exact checks under power-of-two rescalings: doubling `e` quadruples
/// every coupling, doubling every capacitance halves every energy and keeps
/// `β`, and GHz rendering is linear.
pub fn scaling_audit(net: &DeviceNetwork, k: &Constants) -> Result<Vec<ScalingAudit>> {
    let pair = two_device_couplings(net, k)?;
    let chain = chain_couplings(net, k)?;
    let pair_values = |p: &PairCouplings| [p.epsilon_a, p.epsilon_b, p.lambda, p.e_c_a, p.e_c_b].map(|e| e.joules);
    let chain_values = |c: &ChainCouplings| [c.lambda_a, c.lambda_b, c.lambda_c].map(|e| e.joules);

    let k2 = Constants { e: 2.0 * k.e, ..*k };
    let pair_e = two_device_couplings(net, &k2)?;
    let chain_e = chain_couplings(net, &k2)?;
    let charge = pair_values(&pair)
        .iter()
        .zip(pair_values(&pair_e))
        .chain(chain_values(&chain).iter().zip(chain_values(&chain_e)))
        .all(|(a, b)| 4.0 * a == b);

    let scale = |c: f64| 2.0 * c;
    let big = DeviceNetwork {
        device_a: Device {
            c_g: scale(net.device_a.c_g),
            c_j: scale(net.device_a.c_j),
            ..net.device_a
        },
        device_b: Device {
            c_g: scale(net.device_b.c_g),
            c_j: scale(net.device_b.c_j),
            ..net.device_b
        },
        c_c: scale(net.c_c),
        c_a: scale(net.c_a),
        c_b: scale(net.c_b),
        ..*net
    };
    let pair_c = two_device_couplings(&big, k)?;
    let chain_c = chain_couplings(&big, k)?;
    let capacitance = pair_values(&pair)
        .iter()
        .zip(pair_values(&pair_c))
        .chain(chain_values(&chain).iter().zip(chain_values(&chain_c)))
        .all(|(a, b)| *a == 2.0 * b)
        && pair.beta == pair_c.beta;

    let ghz = [pair.lambda, pair.e_c_a, chain.lambda_c]
        .iter()
        .all(|e| Energy::new(2.0 * e.joules, k).ghz == 2.0 * e.ghz);

    Ok(vec![
        ScalingAudit {
            name: "charge_doubling_quadruples_couplings",
            passed: charge,
        },
        ScalingAudit {
            name: "capacitance_doubling_halves_energies",
            passed: capacitance,
        },
        ScalingAudit {
            name: "frequency_rendering_linear",
            passed: ghz,
        },
    ])
}
