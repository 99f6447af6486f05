//! Test oracles built independently of the matrix-free row generator.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::DMatrix;
use qbench::hamiltonian::{HamiltonianSpec, Model};
use qbench::lattice::{chain, square, Boundary};
use qbench::HilbertSector;

pub type Op = [[f64; 2]; 2];

// Local basis order: (bit = 0, bit = 1). For spins bit 1 is up.
pub const ID: Op = [[1.0, 0.0], [0.0, 1.0]];
pub const SZ: Op = [[-1.0, 0.0], [0.0, 1.0]];
pub const SX: Op = [[0.0, 1.0], [1.0, 0.0]];
/// `i sigma^y` (real); `sigma^y sigma^y = -(i sigma^y)(i sigma^y)`.
pub const ISY: Op = [[0.0, -1.0], [1.0, 0.0]];
pub const CREATE: Op = [[0.0, 0.0], [1.0, 0.0]];
pub const ANNIHILATE: Op = [[0.0, 1.0], [0.0, 0.0]];
pub const NUMBER: Op = [[0.0, 0.0], [0.0, 1.0]];
pub const PARITY: Op = [[1.0, 0.0], [0.0, -1.0]];

/// Column action of a Kronecker product of monomial 2x2 factors, factor `k`
/// acting on bit `k`: returns the unique `(row, value)` of column `col`.
fn kron_column(ops: &[Op], col: usize) -> Option<(usize, f64)> {
    let mut row = 0usize;
    let mut value = 1.0;
    for (k, op) in ops.iter().enumerate() {
        let b = (col >> k) & 1;
        let nonzero: Vec<usize> = (0..2).filter(|&r| op[r][b] != 0.0).collect();
        assert!(nonzero.len() <= 1, "factor is not monomial");
        let r = *nonzero.first()?;
        value *= op[r][b];
        row |= r << k;
    }
    Some((row, value))
}

/// Dense matrix of a sum of weighted Kronecker chains, restricted to `basis`.
pub struct SectorAssembler {
    n_modes: usize,
    basis: Vec<u64>,
    index: HashMap<u64, usize>,
    pub matrix: DMatrix<f64>,
}

impl SectorAssembler {
    pub fn new(n_modes: usize, basis: Vec<u64>) -> Self {
        let index = basis.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let n = basis.len();
        SectorAssembler {
            n_modes,
            basis,
            index,
            matrix: DMatrix::zeros(n, n),
        }
    }

    /// Adds `weight * (ops placed at `sites`, identity elsewhere)`.
    pub fn add(&mut self, weight: f64, placed: &[(usize, Op)]) {
        let mut ops = vec![ID; self.n_modes];
        for &(site, op) in placed {
            ops[site] = matmul(&ops[site], &op);
        }
        for (c, &x) in self.basis.iter().enumerate() {
            if let Some((r, v)) = kron_column(&ops, x as usize) {
                if v != 0.0 {
                    let ri = *self
                        .index
                        .get(&(r as u64))
                        .expect("operator leaves the sector");
                    self.matrix[(ri, c)] += weight * v;
                }
            }
        }
    }
}

fn matmul(a: &Op, b: &Op) -> Op {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `c+_i c_j` (`i != j`) in Jordan-Wigner form: parity strings strictly between.
pub fn hop_ops(i: usize, j: usize) -> Vec<(usize, Op)> {
    let mut ops = vec![(i, CREATE), (j, ANNIHILATE)];
    for k in i.min(j) + 1..i.max(j) {
        ops.push((k, PARITY));
    }
    ops
}

/// Independent dense assembly of a Hamiltonian in its own sector basis.
pub fn kron_dense(spec: &HamiltonianSpec<f64>) -> DMatrix<f64> {
    let sector = *spec.sector();
    let basis: Vec<u64> = sector.states().collect();
    let n_modes = sector.n_modes();
    let n_sites = spec.n_sites();
    let lat = spec.lattice();
    let mut asm = SectorAssembler::new(n_modes, basis);
    let heis = |asm: &mut SectorAssembler, j: f64, a: usize, b: usize| {
        asm.add(j, &[(a, SX), (b, SX)]);
        asm.add(-j, &[(a, ISY), (b, ISY)]);
        asm.add(j, &[(a, SZ), (b, SZ)]);
    };
    match *spec.model() {
        Model::Tfim { j, gamma } => {
            for b in lat.nn_bonds() {
                asm.add(j, &[(b.a, SZ), (b.b, SZ)]);
            }
            for i in 0..n_sites {
                asm.add(gamma, &[(i, SX)]);
            }
        }
        Model::Heisenberg { j } => {
            for b in lat.nn_bonds() {
                heis(&mut asm, j, b.a, b.b);
            }
        }
        Model::J1J2 { j1, j2 } => {
            for b in lat.nn_bonds() {
                heis(&mut asm, j1, b.a, b.b);
            }
            for b in lat.nnn_bonds() {
                heis(&mut asm, j2, b.a, b.b);
            }
        }
        Model::TV { t, v } => {
            for b in lat.nn_bonds() {
                let s = b.sign as f64;
                asm.add(-t * s, &hop_ops(b.a, b.b));
                asm.add(-t * s, &hop_ops(b.b, b.a));
                asm.add(v, &[(b.a, NUMBER), (b.b, NUMBER)]);
            }
        }
        Model::Hubbard { t, u } => {
            for offset in [0, n_sites] {
                for b in lat.nn_bonds() {
                    let s = b.sign as f64;
                    asm.add(-t * s, &hop_ops(b.a + offset, b.b + offset));
                    asm.add(-t * s, &hop_ops(b.b + offset, b.a + offset));
                }
            }
            for i in 0..n_sites {
                asm.add(u, &[(i, NUMBER), (i + n_sites, NUMBER)]);
            }
        }
    }
    asm.matrix
}

/// Dense matrix assembled from the matrix-free rows.
pub fn row_dense(spec: &HamiltonianSpec<f64>) -> DMatrix<f64> {
    let sector = *spec.sector();
    let dim = sector.dimension() as usize;
    let mut m = DMatrix::zeros(dim, dim);
    for (k, x) in sector.states().enumerate() {
        for e in spec.row(x).unwrap() {
            let idx = sector.index_of(e.target).unwrap() as usize;
            m[(idx, k)] += e.amplitude;
        }
    }
    m
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Test specs with sector dimension <= 4096 covering all five models.
pub fn oracle_specs() -> Vec<HamiltonianSpec<f64>> {
    use qbench::lattice::{build_lattice, LatticeKind};
    let mixed = |a: Boundary, b: Boundary, lx: usize, ly: usize| {
        build_lattice(LatticeKind::Square, &[lx, ly], &[a, b]).unwrap()
    };
    vec![
        HamiltonianSpec::tfim(chain(8, Boundary::Open).unwrap(), 1.0, 0.7).unwrap(),
        HamiltonianSpec::tfim(square(3, 3, Boundary::Periodic).unwrap(), -0.8, 1.3).unwrap(),
        HamiltonianSpec::tfim(chain(12, Boundary::Periodic).unwrap(), 1.0, 1.0).unwrap(),
        HamiltonianSpec::heisenberg(chain(10, Boundary::Periodic).unwrap(), 1.0).unwrap(),
        HamiltonianSpec::heisenberg(square(3, 3, Boundary::Open).unwrap(), 0.9).unwrap(),
        HamiltonianSpec::j1j2(chain(8, Boundary::Periodic).unwrap(), 1.0, 0.5).unwrap(),
        HamiltonianSpec::j1j2(mixed(Boundary::Periodic, Boundary::Open, 3, 4), 1.0, 0.3).unwrap(),
        HamiltonianSpec::t_v(chain(8, Boundary::Periodic).unwrap(), 1.0, 2.0, 4).unwrap(),
        HamiltonianSpec::t_v(chain(8, Boundary::AntiPeriodic).unwrap(), 1.0, 1.0, 3).unwrap(),
        HamiltonianSpec::t_v(square(3, 3, Boundary::Periodic).unwrap(), 0.8, 1.5, 4).unwrap(),
        HamiltonianSpec::t_v(mixed(Boundary::AntiPeriodic, Boundary::Periodic, 3, 4), 1.0, 0.5, 5)
            .unwrap(),
        HamiltonianSpec::hubbard(chain(4, Boundary::Periodic).unwrap(), 1.0, 4.0, 2, 2).unwrap(),
        HamiltonianSpec::hubbard(chain(6, Boundary::AntiPeriodic).unwrap(), 1.0, 8.0, 3, 3).unwrap(),
        HamiltonianSpec::hubbard(mixed(Boundary::Open, Boundary::Periodic, 2, 3), 1.0, 2.5, 2, 1)
            .unwrap(),
    ]
}

/// Small specs used for full-spectrum property checks (dimension <= 256).
pub fn small_specs() -> Vec<HamiltonianSpec<f64>> {
    vec![
        HamiltonianSpec::tfim(chain(6, Boundary::Periodic).unwrap(), 1.0, 1.0).unwrap(),
        HamiltonianSpec::heisenberg(chain(6, Boundary::Open).unwrap(), 1.0).unwrap(),
        HamiltonianSpec::j1j2(chain(6, Boundary::Periodic).unwrap(), 1.0, 0.5).unwrap(),
        HamiltonianSpec::t_v(chain(7, Boundary::Periodic).unwrap(), 1.0, 2.0, 3).unwrap(),
        HamiltonianSpec::hubbard(chain(4, Boundary::Periodic).unwrap(), 1.0, 4.0, 2, 2).unwrap(),
        HamiltonianSpec::tfim(square(2, 3, Boundary::Open).unwrap(), 1.0, 0.6).unwrap(),
    ]
}

pub fn sector_of(spec: &HamiltonianSpec<f64>) -> HilbertSector {
    *spec.sector()
}
