//! Hamiltonian specifications and matrix-free access to their matrix elements.
//!
//! All operators use Pauli-matrix normalization (`sigma^a`, not `S^a = sigma^a / 2`):
//!
//! * TFIM: `J sum_<ij> Z_i Z_j + Gamma sum_i X_i`
//! * Heisenberg: `J sum_<ij> sigma_i . sigma_j`
//! * J1-J2: `J1 sum_<ij> sigma_i . sigma_j + J2 sum_<<ij>> sigma_i . sigma_j`
//! * t-V: `-t sum_<ij> (c+_i c_j + h.c.) + V sum_<ij> n_i n_j`
//! * Hubbard: `-t sum_<ij>,s (c+_is c_js + h.c.) + U sum_i n_i,up n_i,down`
//!
//! Fermionic hops carry the Jordan-Wigner sign `(-1)^(occupied modes strictly
//! between the two modes)` times the bond's seam sign. Up modes precede down
//! modes, so each species has its own independent string.

use std::fmt::Write as _;

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;

use crate::basis::HilbertSector;
use crate::lattice::{Bond, LatticeError, LatticeGraph};
use crate::scalar::Real;
use crate::state::{StateError, StateVector};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum HamiltonianError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("anti-periodic boundaries only apply to fermionic hopping models")]
    AntiPeriodicSpinModel,
    #[error("particle count {count} outside [0, {n_sites}]")]
    ParticleCount { count: usize, n_sites: usize },
    #[error("{n_sites} sites exceed the {max}-site limit of the bitstring basis")]
    TooManySites { n_sites: usize, max: usize },
    #[error("coupling `{0}` is not finite")]
    NonFiniteCoupling(&'static str),
    #[error("basis state {0:#b} is outside the Hilbert sector")]
    StateOutsideSector(u64),
    #[error("state vector sector does not match the Hamiltonian sector")]
    SectorMismatch,
    #[error("invalid Hamiltonian descriptor `{0}`")]
    BadDescriptor(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Model<T> {
    Tfim { j: T, gamma: T },
    Heisenberg { j: T },
    J1J2 { j1: T, j2: T },
    TV { t: T, v: T },
    Hubbard { t: T, u: T },
}

impl<T: Real> Model<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Model::Tfim { .. } => "tfim",
            Model::Heisenberg { .. } => "heisenberg",
            Model::J1J2 { .. } => "j1j2",
            Model::TV { .. } => "tv",
            Model::Hubbard { .. } => "hubbard",
        }
    }

    pub fn is_spin(&self) -> bool {
        matches!(
            self,
            Model::Tfim { .. } | Model::Heisenberg { .. } | Model::J1J2 { .. }
        )
    }

    /// `(key, value, default)` in canonical descriptor order.
    fn couplings(&self) -> Vec<(&'static str, T, Option<T>)> {
        let one = Some(T::one());
        match *self {
            Model::Tfim { j, gamma } => vec![("J", j, one), ("Gamma", gamma, None)],
            Model::Heisenberg { j } => vec![("J", j, one)],
            Model::J1J2 { j1, j2 } => vec![("J1", j1, one), ("J2", j2, None)],
            Model::TV { t, v } => vec![("t", t, one), ("V", v, None)],
            Model::Hubbard { t, u } => vec![("t", t, one), ("U", u, None)],
        }
    }

    fn map(&self, f: impl Fn(T) -> T) -> Self {
        match *self {
            Model::Tfim { j, gamma } => Model::Tfim {
                j: f(j),
                gamma: f(gamma),
            },
            Model::Heisenberg { j } => Model::Heisenberg { j: f(j) },
            Model::J1J2 { j1, j2 } => Model::J1J2 {
                j1: f(j1),
                j2: f(j2),
            },
            Model::TV { t, v } => Model::TV { t: f(t), v: f(v) },
            Model::Hubbard { t, u } => Model::Hubbard { t: f(t), u: f(u) },
        }
    }
}

/// One nonzero matrix element `<target|H|x>` of a row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowEntry<T> {
    pub target: u64,
    pub amplitude: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianSpec<T> {
    model: Model<T>,
    lattice: LatticeGraph,
    sector: HilbertSector,
}

const MAX_SPIN_SITES: usize = 63;
const MAX_FERMION_SITES: usize = 64;
const MAX_SPINFUL_SITES: usize = 32;

impl<T: Real> HamiltonianSpec<T> {
    pub fn tfim(lattice: LatticeGraph, j: T, gamma: T) -> Result<Self, HamiltonianError> {
        Self::spin(Model::Tfim { j, gamma }, lattice)
    }

    pub fn heisenberg(lattice: LatticeGraph, j: T) -> Result<Self, HamiltonianError> {
        Self::spin(Model::Heisenberg { j }, lattice)
    }

    pub fn j1j2(lattice: LatticeGraph, j1: T, j2: T) -> Result<Self, HamiltonianError> {
        Self::spin(Model::J1J2 { j1, j2 }, lattice)
    }

    pub fn t_v(lattice: LatticeGraph, t: T, v: T, n_f: usize) -> Result<Self, HamiltonianError> {
        let n_sites = lattice.n_sites();
        check_sites(n_sites, MAX_FERMION_SITES)?;
        check_count(n_f, n_sites)?;
        let sector = HilbertSector::Fermions {
            n_sites,
            n_particles: n_f,
        };
        Self::finish(Model::TV { t, v }, lattice, sector)
    }

    pub fn hubbard(
        lattice: LatticeGraph,
        t: T,
        u: T,
        n_up: usize,
        n_down: usize,
    ) -> Result<Self, HamiltonianError> {
        let n_sites = lattice.n_sites();
        check_sites(n_sites, MAX_SPINFUL_SITES)?;
        check_count(n_up, n_sites)?;
        check_count(n_down, n_sites)?;
        let sector = HilbertSector::SpinfulFermions {
            n_sites,
            n_up,
            n_down,
        };
        Self::finish(Model::Hubbard { t, u }, lattice, sector)
    }

    fn spin(model: Model<T>, lattice: LatticeGraph) -> Result<Self, HamiltonianError> {
        if lattice.has_antiperiodic() {
            return Err(HamiltonianError::AntiPeriodicSpinModel);
        }
        let n_sites = lattice.n_sites();
        check_sites(n_sites, MAX_SPIN_SITES)?;
        Self::finish(model, lattice, HilbertSector::Spins { n_sites })
    }

    fn finish(
        model: Model<T>,
        lattice: LatticeGraph,
        sector: HilbertSector,
    ) -> Result<Self, HamiltonianError> {
        for (key, value, _) in model.couplings() {
            if !value.is_finite() {
                return Err(HamiltonianError::NonFiniteCoupling(key));
            }
        }
        Ok(HamiltonianSpec {
            model,
            lattice,
            sector,
        })
    }

    pub fn model(&self) -> &Model<T> {
        &self.model
    }

    pub fn lattice(&self) -> &LatticeGraph {
        &self.lattice
    }

    pub fn sector(&self) -> &HilbertSector {
        &self.sector
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites()
    }

    pub fn sector_dimension(&self) -> u64 {
        self.sector.dimension()
    }

    /// Degrees of freedom entering the V-score: sites for spin models,
    /// `N_f` for t-V, `N_up + N_down` for Hubbard.
    pub fn n_dof(&self) -> usize {
        match self.sector {
            HilbertSector::Spins { n_sites } => n_sites,
            HilbertSector::Fermions { n_particles, .. } => n_particles,
            HilbertSector::SpinfulFermions { n_up, n_down, .. } => n_up + n_down,
        }
    }

    /// True when the Hamiltonian conserves total `S^z`.
    pub fn conserves_magnetization(&self) -> bool {
        matches!(self.model, Model::Heisenberg { .. } | Model::J1J2 { .. })
    }

    /// Same lattice and sector with every coupling multiplied by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        HamiltonianSpec {
            model: self.model.map(|c| c * factor),
            lattice: self.lattice.clone(),
            sector: self.sector,
        }
    }

    /// Canonical descriptor, e.g. `hubbard_square_4x4_PP_U=8_Nup=7,Ndn=7`.
    ///
    /// Couplings equal to their default (J, J1, t = 1) are omitted.
    pub fn descriptor(&self) -> String {
        let mut s = format!("{}_{}", self.model.name(), self.lattice.descriptor());
        for (key, value, default) in self.model.couplings() {
            if default != Some(value) {
                write!(s, "_{key}={value}").unwrap();
            }
        }
        match self.sector {
            HilbertSector::Spins { .. } => {}
            HilbertSector::Fermions { n_particles, .. } => write!(s, "_Nf={n_particles}").unwrap(),
            HilbertSector::SpinfulFermions { n_up, n_down, .. } => {
                write!(s, "_Nup={n_up},Ndn={n_down}").unwrap()
            }
        }
        s
    }

    pub fn from_descriptor(desc: &str) -> Result<Self, HamiltonianError> {
        let bad = || HamiltonianError::BadDescriptor(desc.to_string());
        let parts: Vec<&str> = desc.split('_').collect();
        if parts.len() < 4 {
            return Err(bad());
        }
        let lattice = LatticeGraph::from_descriptor(&parts[1..4].join("_"))?;
        let mut couplings: Vec<(&str, T)> = Vec::new();
        let mut n_f = None;
        let mut n_up_down = None;
        for part in &parts[4..] {
            if let Some(rest) = part.strip_prefix("Nup=") {
                let (up, down) = rest.split_once(",Ndn=").ok_or_else(bad)?;
                n_up_down = Some((
                    up.parse::<usize>().map_err(|_| bad())?,
                    down.parse::<usize>().map_err(|_| bad())?,
                ));
            } else if let Some(rest) = part.strip_prefix("Nf=") {
                n_f = Some(rest.parse::<usize>().map_err(|_| bad())?);
            } else {
                let (key, value) = part.split_once('=').ok_or_else(bad)?;
                let value: f64 = value.parse().map_err(|_| bad())?;
                if couplings.iter().any(|(k, _)| *k == key) {
                    return Err(bad());
                }
                couplings.push((key, T::lit(value)));
            }
        }
        let mut take = |key: &str, default: Option<T>| -> Result<T, HamiltonianError> {
            match couplings.iter().position(|(k, _)| *k == key) {
                Some(i) => Ok(couplings.remove(i).1),
                None => default.ok_or_else(bad),
            }
        };
        let one = Some(T::one());
        let spec = match (parts[0], n_f, n_up_down) {
            ("tfim", None, None) => {
                let j = take("J", one)?;
                Self::tfim(lattice, j, take("Gamma", None)?)?
            }
            ("heisenberg", None, None) => Self::heisenberg(lattice, take("J", one)?)?,
            ("j1j2", None, None) => {
                let j1 = take("J1", one)?;
                Self::j1j2(lattice, j1, take("J2", None)?)?
            }
            ("tv", Some(n_f), None) => {
                let t = take("t", one)?;
                Self::t_v(lattice, t, take("V", None)?, n_f)?
            }
            ("hubbard", None, Some((up, down))) => {
                let t = take("t", one)?;
                Self::hubbard(lattice, t, take("U", None)?, up, down)?
            }
            _ => return Err(bad()),
        };
        if !couplings.is_empty() {
            return Err(bad());
        }
        Ok(spec)
    }

    /// Diagonal element `<x|H|x>`.
    pub fn diagonal(&self, x: u64) -> T {
        let spin = |i: usize| if x >> i & 1 == 1 { 1i32 } else { -1 };
        let zz = |bonds: &[Bond]| -> i32 { bonds.iter().map(|b| spin(b.a) * spin(b.b)).sum() };
        let nn = |bonds: &[Bond]| -> usize {
            bonds
                .iter()
                .filter(|b| x >> b.a & 1 == 1 && x >> b.b & 1 == 1)
                .count()
        };
        let lat = &self.lattice;
        match self.model {
            Model::Tfim { j, .. } | Model::Heisenberg { j } => j * int(zz(lat.nn_bonds())),
            Model::J1J2 { j1, j2 } => {
                j1 * int(zz(lat.nn_bonds())) + j2 * int(zz(lat.nnn_bonds()))
            }
            Model::TV { v, .. } => v * T::from_count(nn(lat.nn_bonds())),
            Model::Hubbard { u, .. } => {
                let n = self.n_sites();
                let up = x & ((1u64 << n) - 1);
                let down = x >> n;
                u * T::from_count((up & down).count_ones() as usize)
            }
        }
    }

    /// Appends the nonzero entries of row `x` to `out` (diagonal first).
    ///
    /// `x` is assumed to lie in the sector.
    pub fn row_into(&self, x: u64, out: &mut Vec<RowEntry<T>>) {
        let diag = self.diagonal(x);
        if diag != T::zero() {
            out.push(RowEntry {
                target: x,
                amplitude: diag,
            });
        }
        let lat = &self.lattice;
        match self.model {
            Model::Tfim { gamma, .. } => {
                if gamma != T::zero() {
                    for i in 0..self.n_sites() {
                        out.push(RowEntry {
                            target: x ^ (1 << i),
                            amplitude: gamma,
                        });
                    }
                }
            }
            Model::Heisenberg { j } => exchange(x, lat.nn_bonds(), j, out),
            Model::J1J2 { j1, j2 } => {
                exchange(x, lat.nn_bonds(), j1, out);
                exchange(x, lat.nnn_bonds(), j2, out);
            }
            Model::TV { t, .. } => hop(x, lat.nn_bonds(), 0, t, out),
            Model::Hubbard { t, .. } => {
                hop(x, lat.nn_bonds(), 0, t, out);
                hop(x, lat.nn_bonds(), self.n_sites(), t, out);
            }
        }
    }

    pub fn row(&self, x: u64) -> Result<Vec<RowEntry<T>>, HamiltonianError> {
        if !self.sector.contains(x) {
            return Err(HamiltonianError::StateOutsideSector(x));
        }
        let mut out = Vec::new();
        self.row_into(x, &mut out);
        Ok(out)
    }

    /// `out = H v` over raw sector-indexed slices, without materializing `H`.
    pub fn apply_slice<E>(&self, v: &[E], out: &mut [E])
    where
        E: Copy + Zero + std::ops::Mul<T, Output = E> + Send + Sync,
    {
        assert_eq!(v.len() as u64, self.sector.dimension());
        assert_eq!(out.len(), v.len());
        out.par_iter_mut()
            .with_min_len(256)
            .enumerate()
            .for_each_init(Vec::new, |row, (k, o)| {
                row.clear();
                self.row_into(self.sector.state_at(k as u64), row);
                let mut acc = E::zero();
                for e in row.iter() {
                    let idx = self.sector.index_of_unchecked(e.target) as usize;
                    acc = acc + v[idx] * e.amplitude;
                }
                *o = acc;
            });
    }

    pub fn apply(&self, v: &StateVector<T>) -> Result<StateVector<T>, HamiltonianError> {
        if v.sector() != &self.sector {
            return Err(HamiltonianError::SectorMismatch);
        }
        let mut out = vec![Complex::zero(); v.len()];
        self.apply_slice(v.amplitudes(), &mut out);
        Ok(StateVector::from_amplitudes(self.sector, out)?)
    }
}

fn int<T: Real>(n: i32) -> T {
    T::from_i32(n).expect("small integer")
}

fn check_sites(n_sites: usize, max: usize) -> Result<(), HamiltonianError> {
    if n_sites > max {
        return Err(HamiltonianError::TooManySites { n_sites, max });
    }
    Ok(())
}

fn check_count(count: usize, n_sites: usize) -> Result<(), HamiltonianError> {
    if count > n_sites {
        return Err(HamiltonianError::ParticleCount { count, n_sites });
    }
    Ok(())
}

/// `sigma^x sigma^x + sigma^y sigma^y = 2 (sigma^+ sigma^- + h.c.)` on anti-aligned bonds.
fn exchange<T: Real>(x: u64, bonds: &[Bond], j: T, out: &mut Vec<RowEntry<T>>) {
    if j == T::zero() {
        return;
    }
    let amp = j + j;
    for b in bonds {
        if (x >> b.a ^ x >> b.b) & 1 == 1 {
            out.push(RowEntry {
                target: x ^ (1 << b.a) ^ (1 << b.b),
                amplitude: amp,
            });
        }
    }
}

/// Mask of modes strictly between `a < b`.
fn between(a: usize, b: usize) -> u64 {
    let below_b = (1u64 << b) - 1;
    let through_a = if a + 1 >= 64 { u64::MAX } else { (1u64 << (a + 1)) - 1 };
    below_b & !through_a
}

/// `-t (c+_a c_b + c+_b c_a)` on modes `bond + offset`, with Jordan-Wigner parity.
fn hop<T: Real>(x: u64, bonds: &[Bond], offset: usize, t: T, out: &mut Vec<RowEntry<T>>) {
    if t == T::zero() {
        return;
    }
    for bond in bonds {
        let (a, b) = (bond.a + offset, bond.b + offset);
        if (x >> a ^ x >> b) & 1 == 0 {
            continue;
        }
        let parity = (x & between(a, b)).count_ones() % 2;
        let sign = if parity == 1 { -bond.sign } else { bond.sign };
        let amp = if sign > 0 { -t } else { t };
        out.push(RowEntry {
            target: x ^ (1 << a) ^ (1 << b),
            amplitude: amp,
        });
    }
}
