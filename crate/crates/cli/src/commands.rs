//! One function per subcommand: config in, report out.

use std::f64::consts::FRAC_PI_2;

use anyhow::{bail, Context, Result};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semion_core::anyon::{flipped_plaquettes, qnd_closed_form, qnd_deviation, qnd_exact};
use semion_core::circuit::{circuit_diagnostics, jc_resonance, scaling_audit, Status, CODATA};
use semion_core::hamiltonian::{ground_degeneracy, ORACLE_MAX_SQUARE_SITES};
use semion_core::lattice::HoneycombLayout;
use semion_core::{
    braid_phase, build_device_hamiltonian, build_layout, build_spin_hamiltonian, chain_couplings, interferometry_run,
    project_ground, qnd_frequencies, spectrum, two_device_couplings, vortex_map, Couplings, Family,
    FermionEnergyOracle, HamiltonianTerms, Pauli, PauliString, QndParams, Representation, SolverOptions,
    SpectrumRequest, StateVector, StringSpec,
};
use serde_json::json;

use crate::config::{
    BraidConfig, CircuitConfig, GroundConfig, LatticeConfig, QndConfig, RegisterConfig, SpectrumConfig, StringConfig,
};
use crate::report::{Report, Table, Verdict};

pub const EQUIVALENCE_TOL: f64 = 1e-10;
pub const STABILIZER_TOL: f64 = 1e-12;
pub const ENERGY_TOL: f64 = 1e-10;
pub const PHASE_TOL: f64 = 1e-10;
pub const DEGENERACY_TOL: f64 = 1e-9;

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Copy)]
pub struct RunOptions {
    pub dense_limit: Option<usize>,
    pub seed: u64,
}

impl RunOptions {
    fn solver(&self) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(limit) = self.dense_limit {
            opts.dense_limit = limit;
        }
        opts
    }
}

/// Shortest round-trip form, matching the JSON output.
fn num(x: f64) -> String {
    serde_json::Number::from_f64(x).map_or_else(|| x.to_string(), |n| n.to_string())
}

fn complex_json(z: Complex64) -> serde_json::Value {
    json!({ "re": z.re, "im": z.im })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn run_lattice(cfg: &LatticeConfig) -> Result<Report> {
    let layout = build_layout(cfg.rows, cfg.cols)?;
    let mut table = Table::new(&["rank", "square", "color", "line", "column", "chain"]);
    let mut sites = Vec::new();
    let mut ranks_ok = true;
    for rank in 0..layout.n_sites() {
        let site = layout.site_at_rank(rank).context("rank without site")?;
        ranks_ok &= layout.jw_rank(site)? == rank;
        let line = layout.zigzag_line(site)?;
        let column = layout.column(site)?;
        let chain = layout.chain_of(site.square);
        table.push(vec![
            rank.to_string(),
            site.square.to_string(),
            format!("{:?}", site.color).to_lowercase(),
            line.to_string(),
            column.to_string(),
            chain.to_string(),
        ]);
        sites.push(json!({
            "rank": rank,
            "square": site.square,
            "color": site.color,
            "line": line,
            "column": column,
            "chain": chain,
        }));
    }
    let plaquettes: Vec<_> = layout
        .plaquettes()
        .iter()
        .map(|p| {
            json!({
                "index": p.index,
                "left": p.left,
                "right": p.right,
                "complete": p.is_complete(),
                "labels": p.sites,
            })
        })
        .collect();
    let result = json!({
        "rows": layout.rows(),
        "cols": layout.cols(),
        "n_square_sites": layout.n_square_sites(),
        "n_sites": layout.n_sites(),
        "n_plaquettes": layout.plaquettes().len(),
        "n_complete_plaquettes": layout.complete_plaquettes().len(),
        "bonds": layout.bonds(),
        "chains": layout.chains(),
        "sites": sites,
        "plaquettes": plaquettes,
    });
    Ok(Report {
        command: "lattice",
        verdicts: vec![Verdict::flag("rank_bijection", ranks_ok)],
        result,
        table,
    })
}

fn hamiltonian(layout: &HoneycombLayout, register: RegisterConfig, couplings: Couplings) -> Result<HamiltonianTerms> {
    Ok(match register {
        RegisterConfig::Honeycomb => build_spin_hamiltonian(layout, couplings)?,
        RegisterConfig::Device => build_device_hamiltonian(layout, couplings)?,
    })
}

/// Oracle levels comparable with `levels`: with multiplicity on the dense
/// path, distinct on the iterative one.
fn oracle_levels(
    layout: &HoneycombLayout,
    couplings: Couplings,
    count: usize,
    distinct: bool,
) -> Result<Option<Vec<f64>>> {
    if layout.n_square_sites() > ORACLE_MAX_SQUARE_SITES {
        return Ok(None);
    }
    let mut all = FermionEnergyOracle::new(layout, couplings).all_energies()?;
    if distinct {
        all.dedup_by(|a, b| (*a - *b).abs() <= DEGENERACY_TOL);
    }
    all.truncate(count);
    Ok(Some(all))
}

pub fn run_spectrum(cfg: &SpectrumConfig, run: &RunOptions) -> Result<Report> {
    let layout = build_layout(cfg.rows, cfg.cols)?;
    let opts = run.solver();
    let request = match cfg.lowest {
        Some(k) => SpectrumRequest::Lowest(k),
        None => SpectrumRequest::All,
    };
    let iterative = cfg.lowest.is_some() && layout.n_sites() > opts.dense_limit;
    let limit = if iterative { opts.tolerance } else { EQUIVALENCE_TOL };

    let solve = |couplings: Couplings| -> Result<(Vec<f64>, Option<Vec<f64>>)> {
        let h = hamiltonian(&layout, cfg.register, couplings)?;
        let levels = spectrum(&h, request, &opts)?;
        let oracle = oracle_levels(&layout, couplings, levels.len(), iterative)?;
        Ok((levels, oracle))
    };

    let couplings: Couplings = cfg.couplings.into();
    let (levels, oracle) = solve(couplings)?;
    let mut verdicts = Vec::new();
    let mut deviation = None;
    if let Some(o) = &oracle {
        let dev = if o.len() == levels.len() {
            max_abs_diff(&levels, o)
        } else {
            f64::INFINITY
        };
        deviation = Some(dev);
        verdicts.push(Verdict::below("oracle_equivalence", dev, limit));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
    let mut sweep = Vec::new();
    for s in 0..cfg.sweep {
        let c = Couplings::new(
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
            rng.random_range(-2.0..2.0),
        );
        let (l, o) = solve(c)?;
        let o = o.context("sweep needs the fermion oracle, lattice too large")?;
        let dev = if o.len() == l.len() { max_abs_diff(&l, &o) } else { f64::INFINITY };
        verdicts.push(Verdict::below(format!("sweep_{s}_oracle_equivalence"), dev, limit));
        sweep.push(json!({ "couplings": c, "max_deviation": dev }));
    }

    let mut table = Table::new(&["index", "eigenvalue", "oracle"]);
    for (i, e) in levels.iter().enumerate() {
        let o = oracle.as_ref().and_then(|o| o.get(i)).map(|&x| num(x)).unwrap_or_default();
        table.push(vec![i.to_string(), num(*e), o]);
    }
    let result = json!({
        "rows": cfg.rows,
        "cols": cfg.cols,
        "register": Representation::from(cfg.register).name(),
        "couplings": couplings,
        "solver": if iterative { "lanczos" } else { "dense" },
        "levels": if iterative { "distinct" } else { "with_multiplicity" },
        "dim": 1u64 << layout.n_sites(),
        "eigenvalues": levels,
        "oracle_eigenvalues": oracle,
        "oracle_max_deviation": deviation,
        "sweep": sweep,
    });
    Ok(Report {
        command: "spectrum",
        verdicts,
        result,
        table,
    })
}

impl From<RegisterConfig> for Representation {
    fn from(r: RegisterConfig) -> Self {
        match r {
            RegisterConfig::Honeycomb => Representation::HoneycombSpin,
            RegisterConfig::Device => Representation::Device,
        }
    }
}

pub fn run_ground(cfg: &GroundConfig, run: &RunOptions) -> Result<Report> {
    let layout = build_layout(cfg.rows, cfg.cols)?;
    let couplings: Couplings = cfg.couplings.into();
    let opts = run.solver();
    let h = build_spin_hamiltonian(&layout, couplings)?;
    let g = project_ground(&layout)?;
    let vm = vortex_map(&g, &layout)?;
    let stabilizer_dev = vm
        .entries
        .iter()
        .map(|e| (e.w - 1.0).abs().max((e.w_tilde - 1.0).abs()))
        .fold(0.0, f64::max);
    let (energy, e2) = h.moments(g.amplitudes())?;
    let variance = e2 - energy * energy;

    let dense = layout.n_sites() <= opts.dense_limit;
    let levels = if dense {
        spectrum(&h, SpectrumRequest::All, &opts)?
    } else {
        spectrum(&h, SpectrumRequest::Lowest(1), &opts)?
    };
    let e_min = levels[0];
    let energy_limit = if dense { ENERGY_TOL } else { opts.tolerance };

    let mut verdicts = vec![
        Verdict::below("vortex_free", stabilizer_dev, STABILIZER_TOL),
        Verdict::below("energy_is_minimum", (energy - e_min).abs(), energy_limit),
        Verdict::below("energy_variance", variance, ENERGY_TOL),
    ];

    let mut degeneracy = serde_json::Value::Null;
    if dense && layout.n_square_sites() <= ORACLE_MAX_SQUARE_SITES {
        let ed = ground_degeneracy(&levels, DEGENERACY_TOL);
        let oracle = FermionEnergyOracle::new(&layout, couplings);
        let diag = oracle.all_energies()?;
        let diag_count = ground_degeneracy(&diag, DEGENERACY_TOL);
        let (ferro_e, ferro_count) = oracle.ferromagnetic_ground();
        verdicts.push(Verdict::flag(
            "degeneracy_matches",
            ed == diag_count && diag_count == ferro_count && (ferro_e - diag[0]).abs() <= STABILIZER_TOL,
        ));
        degeneracy = json!({ "ed": ed, "oracle": diag_count, "ferromagnetic": ferro_count });
    }

    let mut table = Table::new(&["plaquette", "w", "w_tilde"]);
    for e in &vm.entries {
        table.push(vec![e.plaquette.to_string(), num(e.w), num(e.w_tilde)]);
    }
    let amplitudes = cfg.export_threshold.map(|t| g.export(t));
    let result = json!({
        "rows": cfg.rows,
        "cols": cfg.cols,
        "couplings": couplings,
        "energy": energy,
        "variance": variance,
        "min_eigenvalue": e_min,
        "vortex_map": vm,
        "degeneracy": degeneracy,
        "amplitudes": amplitudes,
    });
    Ok(Report {
        command: "ground",
        verdicts,
        result,
        table,
    })
}

fn build_string(layout: &HoneycombLayout, cfg: &StringConfig) -> Result<StringSpec> {
    let repr = Representation::HoneycombSpin;
    let n = layout.n_sites();
    Ok(match cfg {
        StringConfig::Identity => StringSpec::explicit(repr, n, &[])?,
        StringConfig::VortexSegment {
            family,
            chain,
            first,
            last,
        } => StringSpec::vortex_segment(layout, *family, *chain, *first, *last)?,
        StringConfig::PlaquetteLoop { family, plaquettes } => StringSpec::plaquette_loop(layout, *family, plaquettes)?,
        StringConfig::SxString { square, color } => StringSpec::sx_string(layout, repr, *square, *color)?,
        StringConfig::UZ { sites } => StringSpec::u_z(repr, n, sites)?,
        StringConfig::Explicit { pauli } => {
            let p: PauliString = pauli.parse()?;
            if p.n_sites() != n {
                bail!("explicit string has {} sites, lattice has {n}", p.n_sites());
            }
            let factors: Vec<(usize, Pauli)> = p.support().map(|j| (j, p.factor(j))).collect();
            StringSpec::explicit(repr, n, &factors)?
        }
    })
}

fn string_json(layout: &HoneycombLayout, s: &StringSpec) -> Result<serde_json::Value> {
    Ok(json!({
        "kind": s.kind,
        "operator": s.operator.to_string(),
        "steps": s.steps.len(),
        "flips_w": flipped_plaquettes(layout, &s.operator, Family::W)?,
        "flips_w_tilde": flipped_plaquettes(layout, &s.operator, Family::WTilde)?,
    }))
}

pub fn run_braid(cfg: &BraidConfig) -> Result<Report> {
    let layout = build_layout(cfg.rows, cfg.cols)?;
    let loop_ = build_string(&layout, &cfg.loop_)?;
    let crossing = build_string(&layout, &cfg.string)?;
    let op_phase = braid_phase(&loop_, &crossing)?;

    let mut verdicts = Vec::new();
    let mut state_phase = None;
    if cfg.state_check {
        let g = project_ground(&layout)?;
        let s = semion_core::anyon::braid_interference(&g, &loop_, &crossing)?;
        verdicts.push(Verdict::below("phases_agree", (s - op_phase).norm(), PHASE_TOL));
        state_phase = Some(s);
    }
    if let Some(expected) = cfg.expected_phase {
        if expected != 1 && expected != -1 {
            bail!("expected_phase must be 1 or -1, got {expected}");
        }
        let dev = (op_phase - f64::from(expected)).norm();
        verdicts.push(Verdict::below("expected_phase", dev, PHASE_TOL));
    }

    let mut table = Table::new(&["level", "phase_re", "phase_im"]);
    table.push(vec!["operator".into(), num(op_phase.re), num(op_phase.im)]);
    if let Some(s) = state_phase {
        table.push(vec!["state".into(), num(s.re), num(s.im)]);
    }
    let agree = state_phase.map(|s| (s - op_phase).norm() < PHASE_TOL);
    let result = json!({
        "rows": cfg.rows,
        "cols": cfg.cols,
        "loop": string_json(&layout, &loop_)?,
        "string": string_json(&layout, &crossing)?,
        "operator_phase": complex_json(op_phase),
        "state_phase": state_phase.map(complex_json),
        "agree": agree,
    });
    Ok(Report {
        command: "braid",
        verdicts,
        result,
        table,
    })
}

fn random_qubit_state(n: usize, rng: &mut ChaCha8Rng) -> Result<StateVector> {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut v = StateVector::from_amplitudes(n, 1, amps)?;
    v.normalize()?;
    Ok(v)
}

pub fn run_qnd(cfg: &QndConfig, run: &RunOptions) -> Result<Report> {
    cfg.validate()?;
    let sites: Vec<usize> = cfg.sites.clone().unwrap_or_else(|| (0..cfg.n_qubits).collect());
    let tau = cfg.tau.unwrap_or(FRAC_PI_2 / cfg.chi);
    let params = QndParams::new(cfg.chi, tau, cfg.n_qubits, &sites)?;
    let check = qnd_deviation(&params, cfg.cavity_dim)?;
    let mut verdicts = vec![Verdict::below("unitary_matches_closed_form", check.max_deviation(), EQUIVALENCE_TOL)];
    let block = 1usize << cfg.n_qubits;

    let mut prepared = serde_json::Value::Null;
    if let Some(prep) = &cfg.prepare {
        if prep.n_c >= cfg.cavity_dim || prep.qubit_basis >= block {
            bail!("prepared state |{}>|{}> outside the register", prep.n_c, prep.qubit_basis);
        }
        let index = prep.n_c * block + prep.qubit_basis;
        let input = StateVector::basis(cfg.n_qubits, cfg.cavity_dim, index)?;
        let u = qnd_exact(&params, cfg.cavity_dim)?;
        let out = StateVector::from_amplitudes(cfg.n_qubits, cfg.cavity_dim, u.column(index).iter().copied().collect())?;
        let identity_dev = out
            .amplitudes()
            .iter()
            .zip(input.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let closed = qnd_closed_form(cfg.n_qubits, &sites, prep.n_c)?;
        let mut expected = vec![Complex64::new(0.0, 0.0); block];
        closed.apply_to_amplitudes(input.cavity_sector(prep.n_c)?.amplitudes(), &mut expected)?;
        let closed_dev = out
            .cavity_sector(prep.n_c)?
            .amplitudes()
            .iter()
            .zip(&expected)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        let acts_as_identity = identity_dev < EQUIVALENCE_TOL;
        if prep.n_c == 0 {
            verdicts.push(Verdict::below("vacuum_acts_as_identity", identity_dev, EQUIVALENCE_TOL));
        }
        verdicts.push(Verdict::below("prepared_matches_closed_form", closed_dev, EQUIVALENCE_TOL));
        prepared = json!({
            "n_c": prep.n_c,
            "qubit_basis": prep.qubit_basis,
            "sector_operator": closed.to_string(),
            "identity_deviation": identity_dev,
            "acts_as_identity": acts_as_identity,
            "closed_form_deviation": closed_dev,
        });
    }

    let mut readouts = Vec::new();
    if let Some(ifm) = &cfg.interferometry {
        let string: PauliString = ifm.string.parse()?;
        if string.n_sites() != cfg.n_qubits {
            bail!("interferometry string has {} sites, register has {}", string.n_sites(), cfg.n_qubits);
        }
        let mut states = Vec::new();
        for &b in &ifm.basis_states {
            states.push((format!("basis_{b}"), StateVector::basis(cfg.n_qubits, 1, b)?));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(run.seed);
        for k in 0..ifm.random_states {
            states.push((format!("random_{k}"), random_qubit_state(cfg.n_qubits, &mut rng)?));
        }
        let mut worst: f64 = 0.0;
        for (label, state) in &states {
            let r = interferometry_run(state, &string, cfg.cavity_dim)?;
            worst = worst.max((r.inferred_eigenvalue - r.direct_expectation).abs());
            readouts.push(json!({
                "state": label,
                "coherence_real": r.coherence_real,
                "coherence_imag": r.coherence_imag,
                "inferred_eigenvalue": r.inferred_eigenvalue,
                "direct_expectation": r.direct_expectation,
            }));
        }
        if !states.is_empty() {
            verdicts.push(Verdict::below("readout_matches_expectation", worst, EQUIVALENCE_TOL));
        }
    }

    let mut table = Table::new(&["sector", "deviation"]);
    for (n, d) in check.sector_deviation.iter().enumerate() {
        table.push(vec![n.to_string(), num(*d)]);
    }
    table.push(vec!["leakage".into(), num(check.leakage)]);
    let result = json!({
        "chi": cfg.chi,
        "tau": tau,
        "n_qubits": cfg.n_qubits,
        "sites": sites,
        "cavity_dim": cfg.cavity_dim,
        "check": check,
        "max_deviation": check.max_deviation(),
        "prepared": prepared,
        "interferometry": readouts,
    });
    Ok(Report {
        command: "qnd",
        verdicts,
        result,
        table,
    })
}

pub fn run_circuit(cfg: &CircuitConfig) -> Result<Report> {
    let net = cfg.network()?;
    let k = cfg.constants.unwrap_or(CODATA);
    let pair = two_device_couplings(&net, &k)?;
    let chain = chain_couplings(&net, &k)?;
    let diagnostics = circuit_diagnostics(&net, &k, &cfg.thresholds, cfg.temperature)?;
    let audits = scaling_audit(&net, &k)?;

    let mut verdicts: Vec<Verdict> = diagnostics
        .iter()
        .map(|d| Verdict {
            name: d.name.to_string(),
            passed: d.status != Status::Fail,
            value: d.value,
            limit: d.limit,
        })
        .collect();
    verdicts.extend(audits.iter().map(|a| Verdict::flag(format!("scaling_{}", a.name), a.passed)));

    let unit = cfg.unit.unwrap_or(chain.lambda_c.joules);
    let mapped = (unit > 0.0).then(|| chain.mapped(unit));
    let decoupled = net.c_c == 0.0;
    if decoupled {
        verdicts.push(Verdict::flag(
            "decoupled_limit",
            pair.lambda.joules == 0.0 && chain.lambda_c.joules == 0.0,
        ));
    }

    let qnd = match &cfg.qnd {
        Some(inputs) => {
            let f = qnd_frequencies(inputs, &k, &cfg.thresholds)?;
            verdicts.push(Verdict::flag("qnd_small_detuning", f.small_detuning_ok));
            if let Some(ok) = f.regime_ok {
                verdicts.push(Verdict::flag("qnd_regime", ok));
            }
            Some(f)
        }
        None => None,
    };
    let jc = cfg.jc.map(|j| jc_resonance(j.e_c, j.n_g, j.omega_c, &k));

    let mut table = Table::new(&["name", "joules", "ghz"]);
    for (name, e) in [
        ("epsilon_a", pair.epsilon_a),
        ("epsilon_b", pair.epsilon_b),
        ("delta_a", pair.delta_a),
        ("delta_b", pair.delta_b),
        ("lambda", pair.lambda),
        ("e_c_a", pair.e_c_a),
        ("e_c_b", pair.e_c_b),
        ("lambda_a", chain.lambda_a),
        ("lambda_b", chain.lambda_b),
        ("lambda_c", chain.lambda_c),
    ] {
        table.push(vec![name.into(), num(e.joules), num(e.ghz)]);
    }
    let result = json!({
        "network": net,
        "constants": k,
        "pair": pair,
        "chain": chain,
        "unit": unit,
        "mapped": mapped,
        "decoupled": decoupled,
        "diagnostics": diagnostics,
        "scaling_audit": audits,
        "qnd": qnd,
        "jc": jc,
    });
    Ok(Report {
        command: "circuit",
        verdicts,
        result,
        table,
    })
}
