//! Multi-site Pauli operators in symplectic (bitmask) form.
//!
//! A [`PauliString`] on `n` sites stores an X mask, a Z mask and a phase
//! exponent `k`, and denotes the operator
//!
//! ```text
//!     i^k · X^x Z^z = i^k · ∏_j X_j^{x_j} Z_j^{z_j}
//! ```
//!
//! so a site with both bits set carries `X·Z = -i·Y`. Equivalently
//! `Y = i·X·Z`, with that factor of `i` folded into the phase exponent. With
//! this convention multiplication is mask XOR plus one popcount for the phase.
//!
//! Basis convention: bit value 0 of site `j` is the `+1` eigenstate of `Z_j`,
//! bit value 1 is the `-1` eigenstate. Site `j` is bit `j` of a basis index
//! (site 0 least significant).

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};
use crate::state::StateVector;

/// Sites that fit in one mask word. Growing past this means swapping the
/// `u64` masks for a `[u64; W]` or bit-vector type; nothing else depends on
/// the word width.
pub const MAX_SITES: usize = 64;

/// Default cap on `n_sites` for [`PauliString::to_matrix`].
pub const DEFAULT_DENSE_LIMIT: usize = 14;

/// `i^k` as a complex number.
#[inline]
pub fn i_pow(k: u8) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Single-site Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_sites: usize,
    x_mask: u64,
    z_mask: u64,
    phase_exp: u8,
}

#[inline]
fn site_mask(n_sites: usize) -> u64 {
    if n_sites == 64 {
        u64::MAX
    } else {
        (1u64 << n_sites) - 1
    }
}

impl PauliString {
    pub fn identity(n_sites: usize) -> Result<Self> {
        Self::from_masks(n_sites, 0, 0, 0)
    }

    /// Raw constructor. The operator is `i^phase_exp · X^x_mask Z^z_mask`.
    pub fn from_masks(n_sites: usize, x_mask: u64, z_mask: u64, phase_exp: u8) -> Result<Self> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(Error::InvalidArgument(format!(
                "n_sites must be in 1..={MAX_SITES}, got {n_sites}"
            )));
        }
        let mask = site_mask(n_sites);
        if x_mask & !mask != 0 || z_mask & !mask != 0 {
            return Err(Error::InvalidArgument(format!(
                "mask bits set beyond site {n_sites}"
            )));
        }
        Ok(Self {
            n_sites,
            x_mask,
            z_mask,
            phase_exp: phase_exp & 3,
        })
    }

    /// A single proper Pauli matrix (`X`, `Y` or `Z`, phase +1) on one site.
    pub fn single(n_sites: usize, site: usize, pauli: Pauli) -> Result<Self> {
        Self::from_factors(n_sites, &[(site, pauli)])
    }

    /// Tensor product of proper Pauli factors with overall phase +1.
    /// Sites must be distinct.
    pub fn from_factors(n_sites: usize, factors: &[(usize, Pauli)]) -> Result<Self> {
        let mut p = Self::identity(n_sites)?;
        for &(site, pauli) in factors {
            if site >= n_sites {
                return Err(Error::UnknownSite(format!("site {site} of {n_sites}")));
            }
            let bit = 1u64 << site;
            if (p.x_mask | p.z_mask) & bit != 0 {
                return Err(Error::InvalidArgument(format!("site {site} repeated")));
            }
            let (x, z) = pauli.bits();
            if x {
                p.x_mask |= bit;
            }
            if z {
                p.z_mask |= bit;
            }
            if pauli == Pauli::Y {
                p.phase_exp = (p.phase_exp + 1) & 3;
            }
        }
        Ok(p)
    }

    /// Product of `Z` over the given sites.
    pub fn z_string(n_sites: usize, sites: impl IntoIterator<Item = usize>) -> Result<Self> {
        let factors: Vec<_> = sites.into_iter().map(|s| (s, Pauli::Z)).collect();
        Self::from_factors(n_sites, &factors)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase_exp
    }

    pub fn phase(&self) -> Complex64 {
        i_pow(self.phase_exp)
    }

    /// Number of sites carrying a `Y` factor.
    pub fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    pub fn weight(&self) -> u32 {
        (self.x_mask | self.z_mask).count_ones()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        let m = self.x_mask | self.z_mask;
        (0..self.n_sites).filter(move |j| m >> j & 1 == 1)
    }

    pub fn factor(&self, site: usize) -> Pauli {
        match (self.x_mask >> site & 1, self.z_mask >> site & 1) {
            (0, 0) => Pauli::I,
            (1, 0) => Pauli::X,
            (1, 1) => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    /// True when the masks are empty, whatever the phase.
    pub fn is_identity_up_to_phase(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    pub fn is_diagonal(&self) -> bool {
        self.x_mask == 0
    }

    /// Multiply by `i^k`.
    #[must_use]
    pub fn times_i_pow(mut self, k: u8) -> Self {
        self.phase_exp = (self.phase_exp + k) & 3;
        self
    }

    #[must_use]
    pub fn negate(self) -> Self {
        self.times_i_pow(2)
    }

    /// Coefficient in front of the proper-Pauli tensor product, as an
    /// exponent of `i`. This is what the text form prints.
    pub fn display_phase_exp(&self) -> u8 {
        (self.phase_exp + 4 - (self.y_count() % 4) as u8) & 3
    }

    /// Operator product `self · rhs`, phase exact.
    pub fn multiply(&self, rhs: &PauliString) -> Result<PauliString> {
        check_dim(self.n_sites, rhs.n_sites)?;
        // Z^{z1} X^{x2} = (-1)^{|z1 & x2|} X^{x2} Z^{z1}
        let swap = (self.z_mask & rhs.x_mask).count_ones() as u8;
        Ok(PauliString {
            n_sites: self.n_sites,
            x_mask: self.x_mask ^ rhs.x_mask,
            z_mask: self.z_mask ^ rhs.z_mask,
            phase_exp: (self.phase_exp + rhs.phase_exp + 2 * (swap & 1)) & 3,
        })
    }

    pub fn commutes(&self, rhs: &PauliString) -> Result<bool> {
        check_dim(self.n_sites, rhs.n_sites)?;
        Ok(self.symplectic_product(rhs) == 0)
    }

    /// Parity of `Σ_j (x_j z'_j + z_j x'_j)`.
    pub fn symplectic_product(&self, rhs: &PauliString) -> u32 {
        ((self.x_mask & rhs.z_mask).count_ones() + (self.z_mask & rhs.x_mask).count_ones()) & 1
    }

    pub fn is_hermitian(&self) -> bool {
        // P^† = i^{-k} Z^z X^x = i^{-k} (-1)^{|x&z|} X^x Z^z
        (self.phase_exp as u32 & 1) == (self.y_count() & 1)
    }

    pub fn adjoint(&self) -> PauliString {
        let flip = 2 * (self.y_count() & 1) as u8;
        PauliString {
            phase_exp: (4 - self.phase_exp + flip) & 3,
            ..*self
        }
    }

    /// Image of computational basis state `b`: `P|b⟩ = amp · |target⟩`.
    #[inline]
    pub fn act_on_basis(&self, b: u64) -> (u64, Complex64) {
        let sign = ((self.z_mask & b).count_ones() & 1) as u8;
        (b ^ self.x_mask, i_pow(self.phase_exp + 2 * sign))
    }

    /// Dense matrix with the default size cap.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.to_matrix_with_limit(DEFAULT_DENSE_LIMIT)
    }

    pub fn to_matrix_with_limit(&self, dense_limit: usize) -> Result<DMatrix<Complex64>> {
        if self.n_sites > dense_limit {
            return Err(Error::Capacity {
                what: "dense Pauli matrix sites",
                requested: self.n_sites,
                limit: dense_limit,
            });
        }
        let dim = 1usize << self.n_sites;
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim as u64 {
            let (t, a) = self.act_on_basis(b);
            m[(t as usize, b as usize)] = a;
        }
        Ok(m)
    }

    /// Apply to a raw amplitude buffer whose length is a multiple of
    /// `2^n_sites`; higher index bits (the cavity factor) are untouched.
    pub fn apply_to_amplitudes(&self, input: &[Complex64], output: &mut [Complex64]) -> Result<()> {
        let block = 1usize << self.n_sites;
        if !input.len().is_multiple_of(block) {
            return Err(Error::DimensionMismatch {
                expected: block,
                actual: input.len(),
            });
        }
        check_dim(input.len(), output.len())?;
        for (src, dst) in input.chunks_exact(block).zip(output.chunks_exact_mut(block)) {
            for (b, &amp) in src.iter().enumerate() {
                let (t, a) = self.act_on_basis(b as u64);
                dst[t as usize] = a * amp;
            }
        }
        Ok(())
    }

    pub fn apply_to_state(&self, v: &StateVector) -> Result<StateVector> {
        check_dim(self.n_sites, v.n_qubits())?;
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        self.apply_to_amplitudes(v.amplitudes(), &mut out)?;
        StateVector::from_amplitudes(v.n_qubits(), v.cavity_dim(), out)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.display_phase_exp() {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        };
        write!(f, "{prefix} ")?;
        for j in 0..self.n_sites {
            write!(f, "{}", self.factor(j).letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts `[+|+i|-|-i] LETTERS`, whitespace between prefix and letters
    /// optional, prefix optional (defaults to `+`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (display_exp, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (2, r)
        } else {
            (0, s)
        };
        let letters = rest.trim();
        if letters.is_empty() {
            return Err(Error::Parse(format!("no Pauli letters in {s:?}")));
        }
        let mut factors = Vec::with_capacity(letters.len());
        for (j, c) in letters.chars().enumerate() {
            let p = match c {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => return Err(Error::Parse(format!("bad Pauli letter {other:?} in {s:?}"))),
            };
            if p != Pauli::I {
                factors.push((j, p));
            }
        }
        let n = letters.chars().count();
        Ok(PauliString::from_factors(n, &factors)
            .map_err(|e| Error::Parse(e.to_string()))?
            .times_i_pow(display_exp))
    }
}

impl Serialize for PauliString {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PauliString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
