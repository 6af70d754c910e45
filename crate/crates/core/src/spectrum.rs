//! Eigenvalues of Pauli-sum Hamiltonians.
//!
//! The dense path is exact diagonalization, done block by block: every term
//! maps `|b⟩` to `|b ⊕ x⟩`, so the cosets of the GF(2) span of the terms'
//! X masks are invariant subspaces. Each coset is assembled and diagonalized
//! as a dense Hermitian matrix. The iterative path is Lanczos with full
//! reorthogonalization on the matrix-free action of the Hamiltonian.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hamiltonian::HamiltonianTerms;
use crate::pauli::DEFAULT_DENSE_LIMIT;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumRequest {
    All,
    Lowest(usize),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub dense_limit: usize,
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Largest Hilbert-space dimension the iterative path will allocate.
    pub max_dim: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dense_limit: DEFAULT_DENSE_LIMIT,
            tolerance: 1e-8,
            max_iterations: 400,
            max_dim: 1 << 24,
        }
    }
}

/// Ascending eigenvalues.
///
/// `All` always takes the dense path. `Lowest(k)` takes it when the system
/// fits under `dense_limit` (returning the `k` smallest with multiplicity),
/// otherwise Lanczos, which resolves the `k` lowest *distinct* levels.
pub fn spectrum(h: &HamiltonianTerms, request: SpectrumRequest, opts: &SolverOptions) -> Result<Vec<f64>> {
    let dense_ok = h.n_sites() <= opts.dense_limit;
    match request {
        SpectrumRequest::All => {
            if !dense_ok {
                return Err(Error::Capacity {
                    what: "dense spectrum sites",
                    requested: h.n_sites(),
                    limit: opts.dense_limit,
                });
            }
            dense_spectrum(h)
        }
        SpectrumRequest::Lowest(k) => {
            if dense_ok {
                let mut all = dense_spectrum(h)?;
                all.truncate(k);
                Ok(all)
            } else {
                lanczos_lowest(h, k, opts)
            }
        }
    }
}

/// Row-reduced GF(2) basis of a set of masks, with the pivot bit of each.
#[derive(Debug, Clone, Default)]
pub struct XorBasis {
    vectors: Vec<u64>,
    pivots: Vec<u32>,
}

impl XorBasis {
    pub fn from_masks(masks: impl IntoIterator<Item = u64>) -> Self {
        let mut basis = XorBasis::default();
        for m in masks {
            basis.insert(m);
        }
        basis
    }

    fn insert(&mut self, mut m: u64) {
        for (v, &p) in self.vectors.iter().zip(&self.pivots) {
            if m >> p & 1 == 1 {
                m ^= v;
            }
        }
        if m == 0 {
            return;
        }
        let p = 63 - m.leading_zeros();
        // keep the basis fully reduced: clear the new pivot from older vectors
        for v in &mut self.vectors {
            if *v >> p & 1 == 1 {
                *v ^= m;
            }
        }
        self.vectors.push(m);
        self.pivots.push(p);
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn pivot_mask(&self) -> u64 {
        self.pivots.iter().fold(0, |acc, &p| acc | 1 << p)
    }

    /// Coordinates of `b` relative to its coset representative.
    fn coordinate(&self, b: u64) -> usize {
        self.pivots
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &p)| acc | ((b >> p & 1) as usize) << k)
    }

    fn combination(&self, c: usize) -> u64 {
        self.vectors
            .iter()
            .enumerate()
            .filter(|(k, _)| c >> k & 1 == 1)
            .fold(0, |acc, (_, v)| acc ^ v)
    }
}

/// Invariant blocks of `h`: each is a list of basis states.
pub fn sector_blocks(h: &HamiltonianTerms) -> (XorBasis, Vec<u64>) {
    let basis = XorBasis::from_masks(h.terms().iter().map(|t| t.operator.x_mask()));
    let pivots = basis.pivot_mask();
    let reps = (0..h.dim() as u64).filter(|b| b & pivots == 0).collect();
    (basis, reps)
}

fn block_matrix(h: &HamiltonianTerms, basis: &XorBasis, rep: u64) -> DMatrix<Complex64> {
    let d = 1usize << basis.rank();
    let mut m = DMatrix::zeros(d, d);
    for c in 0..d {
        let s = rep ^ basis.combination(c);
        for term in h.terms() {
            let (t, a) = term.operator.act_on_basis(s);
            m[(basis.coordinate(t), c)] += a * term.coefficient;
        }
    }
    m
}

fn dense_spectrum(h: &HamiltonianTerms) -> Result<Vec<f64>> {
    let (basis, reps) = sector_blocks(h);
    let mut eig = Vec::with_capacity(h.dim());
    for rep in reps {
        let m = block_matrix(h, &basis, rep);
        if m.nrows() == 1 {
            eig.push(m[(0, 0)].re);
        } else {
            eig.extend(m.symmetric_eigenvalues().iter().copied());
        }
    }
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// Deterministic start vector for Lanczos (SplitMix64 stream).
fn start_vector(dim: usize) -> Vec<Complex64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let mut next = move || {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut v: Vec<Complex64> = (0..dim).map(|_| Complex64::new(next(), next())).collect();
    normalize(&mut v);
    v
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|z| *z /= n);
    }
    n
}

/// Lowest `k` distinct eigenvalues by Lanczos with full reorthogonalization.
pub fn lanczos_lowest(h: &HamiltonianTerms, k: usize, opts: &SolverOptions) -> Result<Vec<f64>> {
    let dim = h.dim();
    if dim > opts.max_dim {
        return Err(Error::Capacity {
            what: "iterative solver dimension",
            requested: dim,
            limit: opts.max_dim,
        });
    }
    if k == 0 {
        return Ok(Vec::new());
    }
    let max_steps = opts.max_iterations.min(dim);
    let mut krylov: Vec<Vec<Complex64>> = vec![start_vector(dim)];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut residual = f64::INFINITY;

    for step in 0..max_steps {
        let mut w = h.apply(&krylov[step])?;
        let a = dot(&krylov[step], &w).re;
        alpha.push(a);
        // full reorthogonalization, twice for stability
        for _ in 0..2 {
            for q in &krylov {
                let c = dot(q, &w);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = normalize(&mut w);

        let m = alpha.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            t[(i, i)] = alpha[i];
            if i + 1 < m {
                t[(i, i + 1)] = beta[i];
                t[(i + 1, i)] = beta[i];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let wanted = k.min(m);
        residual = order[..wanted]
            .iter()
            .map(|&i| (b * eig.eigenvectors[(m - 1, i)]).abs())
            .fold(0.0, f64::max);

        let exhausted = b < 1e-12 * (1.0 + a.abs());
        if (wanted == k && residual < opts.tolerance) || exhausted {
            let mut vals: Vec<f64> = order[..wanted].iter().map(|&i| eig.eigenvalues[i]).collect();
            vals.dedup_by(|x, y| (*x - *y).abs() < opts.tolerance.sqrt());
            return Ok(vals);
        }
        beta.push(b);
        krylov.push(w);
    }
    Err(Error::NonConvergence {
        iterations: max_steps,
        residual,
    })
}
