//! Finite chain and square lattices with nearest- and next-nearest-neighbor bonds.
//!
//! Sites are indexed row-major with axis 0 fastest: on an `Lx x Ly` square
//! lattice the site at `(x, y)` has index `x + Lx * y`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LatticeError {
    #[error("axis {axis} has length {len}, but {bc:?} boundaries need at least {min}")]
    DimensionTooSmall {
        axis: usize,
        len: usize,
        bc: Boundary,
        min: usize,
    },
    #[error("unsupported lattice: {0}")]
    UnsupportedKind(String),
    #[error("invalid lattice descriptor `{0}`")]
    BadDescriptor(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LatticeKind {
    Chain,
    Square,
}

impl LatticeKind {
    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Chain => "chain",
            LatticeKind::Square => "square",
        }
    }

    fn n_axes(self) -> usize {
        match self {
            LatticeKind::Chain => 1,
            LatticeKind::Square => 2,
        }
    }
}

impl FromStr for LatticeKind {
    type Err = LatticeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "chain" => Ok(LatticeKind::Chain),
            "square" => Ok(LatticeKind::Square),
            other => Err(LatticeError::UnsupportedKind(other.to_string())),
        }
    }
}

/// Boundary condition along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Open,
    Periodic,
    /// Periodic, with a sign flip on every bond crossing the seam.
    AntiPeriodic,
}

impl Boundary {
    pub fn letter(self) -> char {
        match self {
            Boundary::Open => 'O',
            Boundary::Periodic => 'P',
            Boundary::AntiPeriodic => 'A',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'O' => Some(Boundary::Open),
            'P' => Some(Boundary::Periodic),
            'A' => Some(Boundary::AntiPeriodic),
            _ => None,
        }
    }

    pub fn wraps(self) -> bool {
        !matches!(self, Boundary::Open)
    }

    fn min_len(self) -> usize {
        if self.wraps() {
            3
        } else {
            2
        }
    }
}

/// Unordered site pair, stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    /// -1 when the bond crosses the seam of an odd number of anti-periodic axes.
    pub sign: i8,
}

impl Bond {
    fn new(i: usize, j: usize, sign: i8) -> Self {
        debug_assert_ne!(i, j);
        Bond {
            a: i.min(j),
            b: i.max(j),
            sign,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeGraph {
    kind: LatticeKind,
    dims: Vec<usize>,
    bc: Vec<Boundary>,
    nn: Vec<Bond>,
    nnn: Vec<Bond>,
}

impl LatticeGraph {
    pub fn kind(&self) -> LatticeKind {
        self.kind
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn boundaries(&self) -> &[Boundary] {
        &self.bc
    }

    pub fn n_sites(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn nn_bonds(&self) -> &[Bond] {
        &self.nn
    }

    pub fn nnn_bonds(&self) -> &[Bond] {
        &self.nnn
    }

    pub fn has_antiperiodic(&self) -> bool {
        self.bc.contains(&Boundary::AntiPeriodic)
    }

    /// Sublattice parity of a site (checkerboard on the square lattice).
    pub fn sublattice(&self, site: usize) -> usize {
        let mut rem = site;
        let mut parity = 0;
        for &len in &self.dims {
            parity += rem % len;
            rem /= len;
        }
        parity % 2
    }

    /// `"<kind>_<dims joined by x>_<bc letters>"`, e.g. `square_4x4_PP`.
    pub fn descriptor(&self) -> String {
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        let bcs: String = self.bc.iter().map(|b| b.letter()).collect();
        format!("{}_{}_{}", self.kind.name(), dims.join("x"), bcs)
    }

    pub fn from_descriptor(desc: &str) -> Result<Self, LatticeError> {
        let bad = || LatticeError::BadDescriptor(desc.to_string());
        let mut parts = desc.split('_');
        let kind: LatticeKind = parts.next().ok_or_else(bad)?.parse()?;
        let dims = parts
            .next()
            .ok_or_else(bad)?
            .split('x')
            .map(|d| d.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        let bc = parts
            .next()
            .ok_or_else(bad)?
            .chars()
            .map(|c| Boundary::from_letter(c).ok_or_else(bad))
            .collect::<Result<Vec<_>, _>>()?;
        if parts.next().is_some() {
            return Err(bad());
        }
        build_lattice(kind, &dims, &bc)
    }
}

impl fmt::Display for LatticeGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

/// Step `coord` by `delta` along an axis. Returns the new coordinate and
/// whether the step wrapped around the boundary, or `None` when it falls off
/// an open edge.
fn step(coord: usize, delta: isize, len: usize, bc: Boundary) -> Option<(usize, bool)> {
    let raw = coord as isize + delta;
    if (0..len as isize).contains(&raw) {
        Some((raw as usize, false))
    } else if bc.wraps() {
        Some((raw.rem_euclid(len as isize) as usize, true))
    } else {
        None
    }
}

struct BondSet {
    seen: HashSet<(usize, usize)>,
    bonds: Vec<Bond>,
}

impl BondSet {
    fn new() -> Self {
        BondSet {
            seen: HashSet::new(),
            bonds: Vec::new(),
        }
    }

    fn insert(&mut self, bond: Bond, exclude: Option<&HashSet<(usize, usize)>>) {
        if bond.a == bond.b {
            return;
        }
        let key = (bond.a, bond.b);
        if exclude.is_some_and(|ex| ex.contains(&key)) {
            return;
        }
        if self.seen.insert(key) {
            self.bonds.push(bond);
        }
    }
}

/// Displace `site` by `offsets` (one per axis). Returns the target site and
/// the accumulated seam sign.
fn displace(dims: &[usize], bc: &[Boundary], site: usize, offsets: &[isize]) -> Option<(usize, i8)> {
    let mut rem = site;
    let mut target = 0;
    let mut stride = 1;
    let mut sign = 1i8;
    for ((&len, &b), &delta) in dims.iter().zip(bc).zip(offsets) {
        let coord = rem % len;
        rem /= len;
        let (c, wrapped) = step(coord, delta, len, b)?;
        if wrapped && b == Boundary::AntiPeriodic {
            sign = -sign;
        }
        target += c * stride;
        stride *= len;
    }
    Some((target, sign))
}

pub fn build_lattice(
    kind: LatticeKind,
    dims: &[usize],
    bc: &[Boundary],
) -> Result<LatticeGraph, LatticeError> {
    if dims.len() != kind.n_axes() || bc.len() != dims.len() {
        return Err(LatticeError::UnsupportedKind(format!(
            "{} needs {} axis length(s) and boundary condition(s), got {} and {}",
            kind.name(),
            kind.n_axes(),
            dims.len(),
            bc.len()
        )));
    }
    for (axis, (&len, &b)) in dims.iter().zip(bc).enumerate() {
        if len < b.min_len() {
            return Err(LatticeError::DimensionTooSmall {
                axis,
                len,
                bc: b,
                min: b.min_len(),
            });
        }
    }
    let n_sites: usize = dims.iter().product();

    let (nn_offsets, nnn_offsets): (Vec<Vec<isize>>, Vec<Vec<isize>>) = match kind {
        LatticeKind::Chain => (vec![vec![1]], vec![vec![2]]),
        LatticeKind::Square => (
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![1, 1], vec![1, -1]],
        ),
    };

    let mut nn = BondSet::new();
    for site in 0..n_sites {
        for off in &nn_offsets {
            if let Some((t, sign)) = displace(dims, bc, site, off) {
                nn.insert(Bond::new(site, t, sign), None);
            }
        }
    }
    let mut nnn = BondSet::new();
    for site in 0..n_sites {
        for off in &nnn_offsets {
            if let Some((t, sign)) = displace(dims, bc, site, off) {
                nnn.insert(Bond::new(site, t, sign), Some(&nn.seen));
            }
        }
    }

    Ok(LatticeGraph {
        kind,
        dims: dims.to_vec(),
        bc: bc.to_vec(),
        nn: nn.bonds,
        nnn: nnn.bonds,
    })
}

pub fn chain(n: usize, bc: Boundary) -> Result<LatticeGraph, LatticeError> {
    build_lattice(LatticeKind::Chain, &[n], &[bc])
}

pub fn square(lx: usize, ly: usize, bc: Boundary) -> Result<LatticeGraph, LatticeError> {
    build_lattice(LatticeKind::Square, &[lx, ly], &[bc, bc])
}
