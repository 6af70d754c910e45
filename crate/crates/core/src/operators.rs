//! Constructors for the model's operators as Pauli strings.
//!
//! Two representations are in use:
//!
//! * **honeycomb spin**: one qubit per honeycomb site, qubit index = Jordan-Wigner
//!   rank. Majorana operators carry a `Z` tail over every lower-ranked site.
//! * **device**: two qubits per square site, the charge qubits of chain `a`
//!   and chain `b`; qubit `2i` is device `(i, a)`, qubit `2i + 1` is `(i, b)`.
//!
//! Majorana head factors (`ψ` is the spin-up species, `χ` spin-down):
//!
//! | operator | head    |
//! |----------|---------|
//! | `ψ_w`    | `-S^y`  |
//! | `ψ_b`    | `S^x`   |
//! | `χ_w`    | `S^x`   |
//! | `χ_b`    | `S^y`   |
//!
//! The minus sign on `ψ_w` makes `iχ_jψ_j = S^z_j` on both colours and turns
//! the on-site term `U Q_i Q̃_i` into `-U S^z_b S^z_w` exactly. Products that
//! contain `ψ_w` an even number of times (all plaquette operators) are
//! unaffected by it.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Color, HoneycombLayout, HoneycombSite, Plaquette};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    HoneycombSpin,
    Device,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::HoneycombSpin => "honeycomb_spin",
            Representation::Device => "device",
        }
    }
}

/// Fermion species: `Up` is carried by the `ψ` Majoranas, `Down` by `χ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Species {
    Up,
    Down,
}

/// Which of the two coupled device chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chain {
    A,
    B,
}

pub fn device_qubit(square: usize, chain: Chain) -> usize {
    2 * square
        + match chain {
            Chain::A => 0,
            Chain::B => 1,
        }
}

/// A Pauli string tagged with the representation it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Operator {
    pub repr: Representation,
    pub pauli: PauliString,
}

impl Operator {
    pub fn honeycomb(pauli: PauliString) -> Self {
        Self {
            repr: Representation::HoneycombSpin,
            pauli,
        }
    }

    pub fn device(pauli: PauliString) -> Self {
        Self {
            repr: Representation::Device,
            pauli,
        }
    }

    fn same_repr(&self, other: &Operator) -> Result<()> {
        if self.repr == other.repr {
            Ok(())
        } else {
            Err(Error::RepresentationMismatch {
                left: self.repr.name(),
                right: other.repr.name(),
            })
        }
    }

    pub fn multiply(&self, rhs: &Operator) -> Result<Operator> {
        self.same_repr(rhs)?;
        Ok(Operator {
            repr: self.repr,
            pauli: self.pauli.multiply(&rhs.pauli)?,
        })
    }

    pub fn commutes(&self, rhs: &Operator) -> Result<bool> {
        self.same_repr(rhs)?;
        self.pauli.commutes(&rhs.pauli)
    }
}

impl fmt::Display for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.repr.name(), self.pauli)
    }
}

impl FromStr for Operator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (tag, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing representation tag in {s:?}")))?;
        let repr = match tag.trim() {
            "honeycomb_spin" => Representation::HoneycombSpin,
            "device" => Representation::Device,
            other => return Err(Error::Parse(format!("unknown representation {other:?}"))),
        };
        Ok(Operator {
            repr,
            pauli: rest.parse()?,
        })
    }
}

fn rank_of(layout: &HoneycombLayout, site: HoneycombSite) -> Result<usize> {
    layout.jw_rank(site)
}

/// Majorana operator of `species` on honeycomb site `(square, color)`.
pub fn majorana(
    layout: &HoneycombLayout,
    square: usize,
    species: Species,
    color: Color,
) -> Result<PauliString> {
    let n = layout.n_sites();
    let rank = rank_of(layout, HoneycombSite::new(square, color))?;
    let (head, negate) = match (species, color) {
        (Species::Up, Color::White) => (Pauli::Y, true),
        (Species::Up, Color::Black) => (Pauli::X, false),
        (Species::Down, Color::White) => (Pauli::X, false),
        (Species::Down, Color::Black) => (Pauli::Y, false),
    };
    let mut factors: Vec<(usize, Pauli)> = (0..rank).map(|r| (r, Pauli::Z)).collect();
    factors.push((rank, head));
    let p = PauliString::from_factors(n, &factors)?;
    // the tail sits on other sites, so factor order inside the product is immaterial
    Ok(if negate { p.negate() } else { p })
}

/// `Q_i = iψ_{i_w}ψ_{i_b}` (species `Up`) or `Q̃_i = iχ_{i_w}χ_{i_b}` (`Down`).
/// In the fermion picture this is `2n_{s,i} - 1`.
pub fn link_parity(layout: &HoneycombLayout, square: usize, species: Species) -> Result<PauliString> {
    let w = majorana(layout, square, species, Color::White)?;
    let b = majorana(layout, square, species, Color::Black)?;
    Ok(w.multiply(&b)?.times_i_pow(1))
}

fn plaquette_with(
    layout: &HoneycombLayout,
    plaquette: &Plaquette,
    pattern: [Pauli; 6],
) -> Result<PauliString> {
    let ours = layout.plaquettes().get(plaquette.index);
    if ours != Some(plaquette) {
        return Err(Error::InvalidArgument(format!(
            "plaquette {} does not belong to this layout",
            plaquette.index
        )));
    }
    let mut factors = Vec::with_capacity(6);
    for (slot, pauli) in plaquette.sites.iter().zip(pattern) {
        if let Some(site) = slot {
            factors.push((rank_of(layout, *site)?, pauli));
        }
    }
    PauliString::from_factors(layout.n_sites(), &factors)
}

/// `W_P = S^y_1 S^x_2 S^z_3 S^y_4 S^x_5 S^z_6`.
pub fn plaquette_w(layout: &HoneycombLayout, plaquette: &Plaquette) -> Result<PauliString> {
    use Pauli::*;
    plaquette_with(layout, plaquette, [Y, X, Z, Y, X, Z])
}

/// `W̃_P = S^x_1 S^y_2 S^z_3 S^x_4 S^y_5 S^z_6`.
pub fn plaquette_w_tilde(layout: &HoneycombLayout, plaquette: &Plaquette) -> Result<PauliString> {
    use Pauli::*;
    plaquette_with(layout, plaquette, [X, Y, Z, X, Y, Z])
}

/// Plaquette family: `W` tracks the spin-up chains, `WTilde` the spin-down chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "w")]
    W,
    #[serde(rename = "w_tilde")]
    WTilde,
}

impl Family {
    pub fn species(self) -> Species {
        match self {
            Family::W => Species::Up,
            Family::WTilde => Species::Down,
        }
    }

    pub fn other(self) -> Family {
        match self {
            Family::W => Family::WTilde,
            Family::WTilde => Family::W,
        }
    }
}

pub fn plaquette_op(layout: &HoneycombLayout, plaquette: &Plaquette, family: Family) -> Result<PauliString> {
    match family {
        Family::W => plaquette_w(layout, plaquette),
        Family::WTilde => plaquette_w_tilde(layout, plaquette),
    }
}

/// On-site term `S^z_{i_b} S^z_{i_w}`.
pub fn link_zz(layout: &HoneycombLayout, square: usize) -> Result<PauliString> {
    let b = rank_of(layout, HoneycombSite::black(square))?;
    let w = rank_of(layout, HoneycombSite::white(square))?;
    PauliString::z_string(layout.n_sites(), [b, w])
}

/// Local operation `S^z` on one honeycomb site: a single-site `Z`.
pub fn sz_op(layout: &HoneycombLayout, square: usize, color: Color) -> Result<Operator> {
    let r = rank_of(layout, HoneycombSite::new(square, color))?;
    Ok(Operator::honeycomb(PauliString::single(layout.n_sites(), r, Pauli::Z)?))
}

/// `S^z_j = iχ_jψ_j`, built from the Majorana operators.
pub fn sz_op_from_majoranas(layout: &HoneycombLayout, square: usize, color: Color) -> Result<Operator> {
    let chi = majorana(layout, square, Species::Down, color)?;
    let psi = majorana(layout, square, Species::Up, color)?;
    Ok(Operator::honeycomb(chi.multiply(&psi)?.times_i_pow(1)))
}

/// Nonlocal `S^x`: the head Majorana (`ψ` on black, `χ` on white) times
/// `∏ iχ_kψ_k` over every lower-ranked site `k`.
pub fn sx_string(layout: &HoneycombLayout, square: usize, color: Color) -> Result<Operator> {
    let target = HoneycombSite::new(square, color);
    let rank = rank_of(layout, target)?;
    let species = match color {
        Color::Black => Species::Up,
        Color::White => Species::Down,
    };
    let mut acc = majorana(layout, square, species, color)?;
    for r in 0..rank {
        let k = layout.site_at_rank(r).expect("rank below target");
        let sz = sz_op_from_majoranas(layout, k.square, k.color)?;
        acc = acc.multiply(&sz.pauli)?;
    }
    Ok(Operator::honeycomb(acc))
}

fn device_pair(layout: &HoneycombLayout, square: usize, pauli: Pauli) -> Result<PauliString> {
    if square >= layout.n_square_sites() {
        return Err(Error::UnknownSite(format!("square site {square}")));
    }
    PauliString::from_factors(
        2 * layout.n_square_sites(),
        &[
            (device_qubit(square, Chain::A), pauli),
            (device_qubit(square, Chain::B), pauli),
        ],
    )
}

/// Device form of `S^z`: `σ^a_x σ^b_x` on black, `σ^a_y σ^b_y` on white.
pub fn sz_op_device(layout: &HoneycombLayout, square: usize, color: Color) -> Result<Operator> {
    let pauli = match color {
        Color::Black => Pauli::X,
        Color::White => Pauli::Y,
    };
    Ok(Operator::device(device_pair(layout, square, pauli)?))
}

/// Device form of `S^x`: head `σ^b_y` (black) or `σ^b_x` (white) on square
/// site `square`, times `iσ^a_xσ^b_x` for every black site and `iσ^a_yσ^b_y`
/// for every white site of lower rank.
pub fn sx_string_device(layout: &HoneycombLayout, square: usize, color: Color) -> Result<Operator> {
    let rank = rank_of(layout, HoneycombSite::new(square, color))?;
    let head = match color {
        Color::Black => Pauli::Y,
        Color::White => Pauli::X,
    };
    let mut acc = PauliString::single(2 * layout.n_square_sites(), device_qubit(square, Chain::B), head)?;
    for r in 0..rank {
        let k = layout.site_at_rank(r).expect("rank below target");
        let factor = sz_op_device(layout, k.square, k.color)?.pauli.times_i_pow(1);
        acc = acc.multiply(&factor)?;
    }
    Ok(Operator::device(acc))
}
