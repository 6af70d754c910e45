//! Acceptance suite. Prints one line per criterion and exits nonzero if any
//! criterion fails or exceeds its time budget.

use std::f64::consts::FRAC_PI_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use semion_core::anyon::{
    braid_interference, braid_phase, flipped_plaquettes, interferometry_run, jc_swap, qnd_deviation, QndParams,
    StringSpec,
};
use semion_core::circuit::{scaling_audit, two_device_couplings, DeviceNetwork, CODATA};
use semion_core::hamiltonian::{build_spin_hamiltonian, ground_degeneracy, Couplings, FermionEnergyOracle};
use semion_core::lattice::build_layout;
use semion_core::operators::{link_zz, plaquette_w, plaquette_w_tilde, Family};
use semion_core::spectrum::{spectrum, SolverOptions, SpectrumRequest};
use semion_core::state::{expectation, project_ground, StateVector};

const SEED: u64 = 0x5e310a;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

type Check = fn() -> Outcome;

fn random_couplings(rng: &mut ChaCha8Rng) -> Couplings {
    Couplings::new(
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(-2.0..2.0),
    )
}

fn random_state(n: usize, rng: &mut ChaCha8Rng) -> StateVector {
    let amps = (0..1usize << n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut v = StateVector::from_amplitudes(n, 1, amps).unwrap();
    v.normalize().unwrap();
    v
}

fn mapping_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let opts = SolverOptions::default();
    let mut worst: f64 = 0.0;
    for (rows, cols) in [(1, 4), (2, 3)] {
        let layout = build_layout(rows, cols).unwrap();
        for _ in 0..5 {
            let couplings = random_couplings(&mut rng);
            let h = build_spin_hamiltonian(&layout, couplings).unwrap();
            let spin = spectrum(&h, SpectrumRequest::All, &opts).unwrap();
            let fermion = FermionEnergyOracle::new(&layout, couplings).all_energies().unwrap();
            if spin.len() != fermion.len() {
                return Outcome::new(false, format!("{rows}x{cols}: {} vs {} levels", spin.len(), fermion.len()));
            }
            let dev = spin.iter().zip(&fermion).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            worst = worst.max(dev);
        }
    }
    Outcome::new(worst < 1e-10, format!("max deviation {worst:.2e} (limit 1e-10)"))
}

fn stabilizer_algebra() -> Outcome {
    let layout = build_layout(3, 3).unwrap();
    let mut ops = Vec::new();
    for p in layout.plaquettes() {
        ops.push(plaquette_w(&layout, p).unwrap());
        ops.push(plaquette_w_tilde(&layout, p).unwrap());
    }
    for i in 0..layout.n_square_sites() {
        ops.push(link_zz(&layout, i).unwrap());
    }
    let mut bad_pairs = 0;
    for (k, a) in ops.iter().enumerate() {
        for b in &ops[k + 1..] {
            if !a.commutes(b).unwrap() {
                bad_pairs += 1;
            }
        }
    }
    let mut bad_w = 0;
    for p in layout.plaquettes() {
        let w = plaquette_w(&layout, p).unwrap();
        let sq = w.multiply(&w).unwrap();
        if !w.is_hermitian() || !sq.is_identity_up_to_phase() || sq.phase_exp() != 0 {
            bad_w += 1;
        }
    }
    Outcome::new(
        bad_pairs == 0 && bad_w == 0,
        format!("{} operators, {bad_pairs} anticommuting pairs, {bad_w} bad W_P", ops.len()),
    )
}

fn ground_state() -> Outcome {
    let layout = build_layout(2, 3).unwrap();
    let couplings = Couplings::unit();
    let g = project_ground(&layout).unwrap();
    let mut worst_stab: f64 = 0.0;
    for p in layout.plaquettes() {
        for op in [plaquette_w(&layout, p).unwrap(), plaquette_w_tilde(&layout, p).unwrap()] {
            worst_stab = worst_stab.max((expectation(&g, &op).unwrap() - 1.0).norm());
        }
    }
    let h = build_spin_hamiltonian(&layout, couplings).unwrap();
    let (e, e2) = h.moments(g.amplitudes()).unwrap();
    let variance = e2 - e * e;
    let levels = spectrum(&h, SpectrumRequest::All, &SolverOptions::default()).unwrap();
    let e_min = levels[0];
    let ed_degeneracy = ground_degeneracy(&levels, 1e-9);
    let oracle = FermionEnergyOracle::new(&layout, couplings);
    let diag = oracle.all_energies().unwrap();
    let oracle_degeneracy = ground_degeneracy(&diag, 1e-9);
    let (ferro_e, ferro_count) = oracle.ferromagnetic_ground();
    let passed = worst_stab <= 1e-12
        && (e - e_min).abs() <= 1e-10
        && variance < 1e-10
        && oracle_degeneracy == ferro_count
        && oracle_degeneracy == ed_degeneracy
        && (ferro_e - diag[0]).abs() <= 1e-12;
    Outcome::new(
        passed,
        format!(
            "E = {e:.12} vs min {e_min:.12}, var {variance:.1e}, stabilizer dev {worst_stab:.1e}, degeneracy oracle {oracle_degeneracy} / ferro {ferro_count} / ED {ed_degeneracy}"
        ),
    )
}

fn qnd_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        let sites: Vec<usize> = (0..n).collect();
        let params = QndParams::canonical(2.0 * std::f64::consts::PI * 1.3, n, &sites).unwrap();
        let check = qnd_deviation(&params, 2).unwrap();
        worst = worst.max(check.max_deviation());
    }
    Outcome::new(worst < 1e-10, format!("max operator-norm deviation {worst:.2e} over N = 1..8"))
}

fn mutual_semion_phase() -> Outcome {
    // Operator level on 3x3: every single-chain vortex segment against every
    // contiguous plaquette region of the same chain, for both families.
    let layout = build_layout(3, 3).unwrap();
    let (mut odd, mut even, mut wrong) = (0, 0, 0);
    for family in [Family::W, Family::WTilde] {
        for chain in 0..layout.rows() {
            let chain_plaquettes: Vec<usize> = layout
                .plaquettes()
                .iter()
                .filter(|p| layout.chain_of(p.left) == chain)
                .map(|p| p.index)
                .collect();
            for first in 0..layout.cols() {
                for last in first..layout.cols() {
                    let s = StringSpec::vortex_segment(&layout, family, chain, first, last).unwrap();
                    // the segment ends on the bonds just outside it
                    let squares = &layout.chains()[chain];
                    let ends: Vec<usize> = [layout.left_plaquette(squares[first]), layout.right_plaquette(squares[last])]
                        .into_iter()
                        .flatten()
                        .collect();
                    for a in 0..chain_plaquettes.len() {
                        for b in a..chain_plaquettes.len() {
                            let region = &chain_plaquettes[a..=b];
                            let loop_ = StringSpec::plaquette_loop(&layout, family, region).unwrap();
                            let crossings = ends.iter().filter(|e| region.contains(e)).count();
                            let phase = braid_phase(&loop_, &s).unwrap();
                            let expected = if crossings % 2 == 1 { -1.0 } else { 1.0 };
                            if phase != Complex64::new(expected, 0.0) {
                                wrong += 1;
                            }
                            if crossings % 2 == 1 {
                                odd += 1;
                            } else {
                                even += 1;
                            }
                        }
                    }
                }
            }
        }
    }
    // State level on 2x3: one vortex of a pair enclosed by the loop.
    let small = build_layout(2, 3).unwrap();
    let g = project_ground(&small).unwrap();
    let mut state_dev: f64 = 0.0;
    for family in [Family::W, Family::WTilde] {
        let s = StringSpec::vortex_segment(&small, family, 0, 1, 1).unwrap();
        let enclosed = flipped_plaquettes(&small, &s.operator, family).unwrap()[0];
        let loop_ = StringSpec::plaquette_loop(&small, family, &[enclosed]).unwrap();
        let overlap = braid_interference(&g, &loop_, &s).unwrap();
        state_dev = state_dev.max((overlap + 1.0).norm());
    }
    Outcome::new(
        wrong == 0 && odd > 0 && even > 0 && state_dev <= 1e-10,
        format!("{odd} odd / {even} even crossing pairs, {wrong} wrong phases, state overlap deviation {state_dev:.1e}"),
    )
}

fn interferometry_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 6);
    let layout = build_layout(2, 3).unwrap();
    let loop_ = StringSpec::plaquette_loop(&layout, Family::W, &[0, 1]).unwrap();
    let seg = StringSpec::vortex_segment(&layout, Family::WTilde, 1, 0, 1).unwrap();
    let u_z = StringSpec::u_z(loop_.repr, layout.n_sites(), &[0, 3, 5, 8]).unwrap();
    let strings = [loop_.operator, seg.operator, u_z.operator];
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let psi = random_state(layout.n_sites(), &mut rng);
        let r = interferometry_run(&psi, &strings[k % strings.len()], 2).unwrap();
        worst = worst.max((r.inferred_eigenvalue - r.direct_expectation).abs());
    }
    Outcome::new(worst < 1e-10, format!("max deviation {worst:.2e} over 20 random states"))
}

fn circuit_limits() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut worst_ratio = Vec::new();
    let mut bound_ok = true;
    for beta in [0.01, 0.05, 0.1] {
        let mut worst: f64 = 0.0;
        for _ in 0..20 {
            let c_0 = rng.random_range(100e-18..2000e-18);
            let net = DeviceNetwork::identical(c_0, beta, rng.random_range(1e-25..1e-23), rng.random_range(0.0..1.0));
            let p = two_device_couplings(&net, &CODATA).unwrap();
            let ratio = p.lambda.joules / (2.0 * p.beta * p.e_c_a.joules);
            worst = worst.max((ratio - 1.0).abs());
        }
        bound_ok &= worst <= 3.0 * beta * beta;
        worst_ratio.push(format!("beta {beta}: {worst:.3e} vs {:.1e}", 3.0 * beta * beta));
    }

    let mut decoupled = DeviceNetwork::identical(600e-18, 0.05, 1e-24, 0.5);
    decoupled.c_c = 0.0;
    let p = two_device_couplings(&decoupled, &CODATA).unwrap();
    let e2 = CODATA.e * CODATA.e;
    let c_t = decoupled.device_a.c_0();
    let decoupling_ok = p.lambda.joules == 0.0 && (p.epsilon_a.joules - 2.0 * e2 / c_t).abs() <= 1e-15 * p.epsilon_a.joules;

    let mut audits_ok = true;
    for _ in 0..20 {
        let mut net = DeviceNetwork::identical(
            rng.random_range(100e-18..2000e-18),
            rng.random_range(0.001..0.2),
            1e-24,
            rng.random_range(0.0..1.0),
        );
        net.c_a = rng.random_range(0.0..0.2) * net.device_a.c_0();
        net.device_b.c_g *= rng.random_range(0.5..1.5);
        audits_ok &= scaling_audit(&net, &CODATA).unwrap().iter().all(|a| a.passed);
    }
    Outcome::new(
        bound_ok && decoupling_ok && audits_ok,
        format!(
            "ratio bound {} [{}], decoupling {}, scaling audits {}",
            if bound_ok { "ok" } else { "violated" },
            worst_ratio.join("; "),
            decoupling_ok,
            audits_ok
        ),
    )
}

fn jc_swap_transfer() -> Outcome {
    let omega = 2.0 * std::f64::consts::PI * 0.05;
    let t_swap = FRAC_PI_2 / omega;
    let start = StateVector::basis(1, 3, 1).unwrap();
    let out = jc_swap(&start, omega, t_swap).unwrap();
    let a = out.amplitudes();
    // closed-form Rabi solution in the {|0,1>, |1,0>} block
    let (th_c, th_s) = ((omega * t_swap).cos(), (omega * t_swap).sin());
    let transfer = (a[1] - Complex64::new(th_c, 0.0)).norm().max((a[2] - Complex64::new(0.0, -th_s)).norm());
    let populations = (a[2].norm_sqr() - 1.0).abs().max(a[1].norm_sqr());

    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let amps = (0..8)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let mut psi = StateVector::from_amplitudes(1, 4, amps).unwrap();
    psi.normalize().unwrap();
    let mut norm_dev: f64 = 0.0;
    for k in 0..50 {
        let t = k as f64 * 0.37 * t_swap;
        norm_dev = norm_dev.max((jc_swap(&psi, omega, t).unwrap().norm() - 1.0).abs());
    }
    Outcome::new(
        transfer < 1e-12 && populations < 1e-12 && norm_dev < 1e-12,
        format!("amplitude dev {transfer:.1e}, population dev {populations:.1e}, norm dev {norm_dev:.1e} over 50 times"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, u64); 8] = [
        ("1 mapping equivalence", mapping_equivalence, 60),
        ("2 stabilizer algebra", stabilizer_algebra, 5),
        ("3 ground state", ground_state, 120),
        ("4 QND identity", qnd_identity, 30),
        ("5 mutual semion phase", mutual_semion_phase, 60),
        ("6 interferometry consistency", interferometry_consistency, 30),
        ("7 circuit limits", circuit_limits, 5),
        ("8 JC swap", jc_swap_transfer, 5),
    ];
    let mut failures = 0;
    for (name, check, budget) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let passed = outcome.passed && in_time;
        if !passed {
            failures += 1;
        }
        println!(
            "criterion {name}: {} ({:.2} s of {budget} s) {}",
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            outcome.detail
        );
    }
    println!("acceptance: {} passed, {failures} failed", 8 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
