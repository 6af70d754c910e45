//! Square lattice, its honeycomb extension and the zigzag site ordering.
//!
//! Coordinates (see `docs/CONVENTIONS.md` for a picture):
//!
//! * Square site `i = row * cols + m`. Each row is one diagonal chain; the
//!   nearest neighbours of the fermion model are `(row, m)`–`(row, m + 1)`.
//! * Square site `(row, m)` becomes a vertical honeycomb link at horizontal
//!   position `x = 2m + (row mod 2)`. Its black site sits on zigzag line
//!   `row`, its white site directly above on zigzag line `row + 1`.
//! * Zigzag lines are numbered bottom to top. The Jordan-Wigner rank orders
//!   lines bottom to top and sites within a line left to right (by `x`).
//!   The rank doubles as the qubit index of the spin representation.
//! * Every bond `(row, m)`–`(row, m + 1)` owns one hexagonal plaquette with
//!   labels 1..6 running clockwise from the lower-left corner:
//!   1 = black of the left link, 2 = white of the left link,
//!   3 = line `row + 1` at `x + 1`, 4 = white of the right link,
//!   5 = black of the right link, 6 = line `row` at `x + 1`.
//!   Labels 3 and 6 belong to the neighbouring chains and are absent on the
//!   top and bottom boundaries.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::MAX_SITES;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Black,
    White,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::Black, Color::White];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HoneycombSite {
    pub square: usize,
    pub color: Color,
}

impl HoneycombSite {
    pub fn new(square: usize, color: Color) -> Self {
        Self { square, color }
    }

    pub fn black(square: usize) -> Self {
        Self::new(square, Color::Black)
    }

    pub fn white(square: usize) -> Self {
        Self::new(square, Color::White)
    }

    fn slot(&self) -> usize {
        2 * self.square
            + match self.color {
                Color::Black => 0,
                Color::White => 1,
            }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SquareLattice {
    pub rows: usize,
    pub cols: usize,
}

impl SquareLattice {
    pub fn n_sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn index(&self, row: usize, m: usize) -> usize {
        row * self.cols + m
    }

    pub fn coords(&self, i: usize) -> (usize, usize) {
        (i / self.cols, i % self.cols)
    }

    /// Bonds along the horizontal diagonals, row-major, `(left, right)`.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.rows * (self.cols - 1));
        for row in 0..self.rows {
            for m in 0..self.cols - 1 {
                out.push((self.index(row, m), self.index(row, m + 1)));
            }
        }
        out
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        let (row, m) = self.coords(i);
        let mut out = Vec::with_capacity(2);
        if m > 0 {
            out.push(self.index(row, m - 1));
        }
        if m + 1 < self.cols {
            out.push(self.index(row, m + 1));
        }
        out
    }
}

/// Hexagon attached to the bond `left`–`right`. `sites[k]` holds label `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plaquette {
    pub index: usize,
    pub left: usize,
    pub right: usize,
    pub sites: [Option<HoneycombSite>; 6],
}

impl Plaquette {
    /// Site carrying label `label` (1-based).
    pub fn label(&self, label: usize) -> Option<HoneycombSite> {
        self.sites.get(label.wrapping_sub(1)).copied().flatten()
    }

    pub fn is_complete(&self) -> bool {
        self.sites.iter().all(Option::is_some)
    }

    pub fn present_sites(&self) -> impl Iterator<Item = HoneycombSite> + '_ {
        self.sites.iter().flatten().copied()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoneycombLayout {
    lattice: SquareLattice,
    /// Honeycomb sites in rank order.
    sites: Vec<HoneycombSite>,
    /// `ranks[2 * square + color]`.
    ranks: Vec<usize>,
    plaquettes: Vec<Plaquette>,
    chains: Vec<Vec<usize>>,
}

pub fn build_layout(rows: usize, cols: usize) -> Result<HoneycombLayout> {
    HoneycombLayout::new(rows, cols, Boundary::Open)
}

impl HoneycombLayout {
    pub fn new(rows: usize, cols: usize, boundary: Boundary) -> Result<Self> {
        if boundary != Boundary::Open {
            return Err(Error::InvalidArgument(
                "only open boundary conditions are supported".into(),
            ));
        }
        if rows < 1 || cols < 2 {
            return Err(Error::InvalidArgument(format!(
                "lattice needs rows >= 1 and cols >= 2, got {rows}x{cols}"
            )));
        }
        let n_honey = 2 * rows * cols;
        if n_honey > MAX_SITES {
            return Err(Error::Capacity {
                what: "honeycomb sites",
                requested: n_honey,
                limit: MAX_SITES,
            });
        }
        let lattice = SquareLattice { rows, cols };

        let mut keyed: Vec<((usize, usize), HoneycombSite)> = (0..lattice.n_sites())
            .flat_map(|i| {
                let (row, m) = lattice.coords(i);
                let x = link_x(row, m);
                [
                    ((row, x), HoneycombSite::black(i)),
                    ((row + 1, x), HoneycombSite::white(i)),
                ]
            })
            .collect();
        keyed.sort_by_key(|(k, _)| *k);
        let sites: Vec<HoneycombSite> = keyed.into_iter().map(|(_, s)| s).collect();
        let mut ranks = vec![0; n_honey];
        for (r, s) in sites.iter().enumerate() {
            ranks[s.slot()] = r;
        }

        let mut plaquettes = Vec::new();
        for (index, (left, right)) in lattice.bonds().into_iter().enumerate() {
            let (row, m) = lattice.coords(left);
            let x = link_x(row, m);
            let above = (row + 1 < rows)
                .then(|| link_at(&lattice, row + 1, x + 1))
                .flatten()
                .map(HoneycombSite::black);
            let below = (row >= 1)
                .then(|| link_at(&lattice, row - 1, x + 1))
                .flatten()
                .map(HoneycombSite::white);
            plaquettes.push(Plaquette {
                index,
                left,
                right,
                sites: [
                    Some(HoneycombSite::black(left)),
                    Some(HoneycombSite::white(left)),
                    above,
                    Some(HoneycombSite::white(right)),
                    Some(HoneycombSite::black(right)),
                    below,
                ],
            });
        }

        let chains = (0..rows)
            .map(|row| (0..cols).map(|m| lattice.index(row, m)).collect())
            .collect();

        Ok(Self {
            lattice,
            sites,
            ranks,
            plaquettes,
            chains,
        })
    }

    pub fn lattice(&self) -> SquareLattice {
        self.lattice
    }

    pub fn rows(&self) -> usize {
        self.lattice.rows
    }

    pub fn cols(&self) -> usize {
        self.lattice.cols
    }

    pub fn n_square_sites(&self) -> usize {
        self.lattice.n_sites()
    }

    /// Number of honeycomb sites, i.e. spins / qubits.
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    /// Honeycomb sites in Jordan-Wigner order.
    pub fn sites(&self) -> &[HoneycombSite] {
        &self.sites
    }

    pub fn contains(&self, site: HoneycombSite) -> bool {
        site.square < self.n_square_sites()
    }

    pub fn jw_rank(&self, site: HoneycombSite) -> Result<usize> {
        if !self.contains(site) {
            return Err(Error::UnknownSite(format!("{site:?}")));
        }
        Ok(self.ranks[site.slot()])
    }

    pub fn site_at_rank(&self, rank: usize) -> Option<HoneycombSite> {
        self.sites.get(rank).copied()
    }

    /// Zigzag line holding `site` (0 = bottom).
    pub fn zigzag_line(&self, site: HoneycombSite) -> Result<usize> {
        self.check(site)?;
        let (row, _) = self.lattice.coords(site.square);
        Ok(match site.color {
            Color::Black => row,
            Color::White => row + 1,
        })
    }

    /// Horizontal position of `site` within its zigzag line.
    pub fn column(&self, site: HoneycombSite) -> Result<usize> {
        self.check(site)?;
        let (row, m) = self.lattice.coords(site.square);
        Ok(link_x(row, m))
    }

    pub fn bonds(&self) -> Vec<(usize, usize)> {
        self.lattice.bonds()
    }

    /// One plaquette per bond, row-major. Boundary plaquettes lack labels 3
    /// and/or 6; see [`Self::complete_plaquettes`].
    pub fn plaquettes(&self) -> &[Plaquette] {
        &self.plaquettes
    }

    /// Plaquettes with all six sites present.
    pub fn complete_plaquettes(&self) -> Vec<Plaquette> {
        self.plaquettes.iter().filter(|p| p.is_complete()).copied().collect()
    }

    pub fn chains(&self) -> &[Vec<usize>] {
        &self.chains
    }

    pub fn chain_of(&self, square: usize) -> usize {
        self.lattice.coords(square).0
    }

    /// Plaquette of the bond to the left of square site `j`.
    pub fn left_plaquette(&self, j: usize) -> Option<usize> {
        self.plaquettes.iter().position(|p| p.right == j)
    }

    pub fn right_plaquette(&self, j: usize) -> Option<usize> {
        self.plaquettes.iter().position(|p| p.left == j)
    }

    /// Plaquette of the chain below in which the black site of `j` is label 3.
    pub fn plaquette_below(&self, j: usize) -> Option<usize> {
        let b = HoneycombSite::black(j);
        self.plaquettes.iter().position(|p| p.sites[2] == Some(b))
    }

    /// Plaquette of the chain above in which the white site of `j` is label 6.
    pub fn plaquette_above(&self, j: usize) -> Option<usize> {
        let w = HoneycombSite::white(j);
        self.plaquettes.iter().position(|p| p.sites[5] == Some(w))
    }

    fn check(&self, site: HoneycombSite) -> Result<()> {
        if self.contains(site) {
            Ok(())
        } else {
            Err(Error::UnknownSite(format!("{site:?}")))
        }
    }
}

fn link_x(row: usize, m: usize) -> usize {
    2 * m + (row % 2)
}

/// Square site of row `row` whose link sits at horizontal position `x`.
fn link_at(lattice: &SquareLattice, row: usize, x: usize) -> Option<usize> {
    let off = row % 2;
    if x < off || !(x - off).is_multiple_of(2) {
        return None;
    }
    let m = (x - off) / 2;
    (m < lattice.cols).then(|| lattice.index(row, m))
}
