use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::state::{apply_diagonal, apply_sum_x, apply_y, inner, QuantumState};
use super::VqeError;
use crate::basis::HilbertSector;
use crate::hamiltonian::HamiltonianSpec;
use crate::lattice::LatticeGraph;

/// Circuit family and depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CircuitAnsatzKind {
    /// `d` blocks of R_y layers and a CX ladder, then a closing R_y layer.
    Rcx { depth: usize },
    /// `d` blocks of `exp(i a sum ZZ)` followed by `exp(i b sum X)`, from `|+>^L`.
    Hv { depth: usize },
}

impl CircuitAnsatzKind {
    pub fn depth(&self) -> usize {
        match *self {
            CircuitAnsatzKind::Rcx { depth } | CircuitAnsatzKind::Hv { depth } => depth,
        }
    }

    pub fn with_depth(&self, depth: usize) -> Self {
        match self {
            CircuitAnsatzKind::Rcx { .. } => CircuitAnsatzKind::Rcx { depth },
            CircuitAnsatzKind::Hv { .. } => CircuitAnsatzKind::Hv { depth },
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            CircuitAnsatzKind::Rcx { .. } => "rcx",
            CircuitAnsatzKind::Hv { .. } => "hv",
        }
    }

    pub fn n_parameters(&self, n_qubits: usize) -> usize {
        match *self {
            CircuitAnsatzKind::Rcx { depth } => n_qubits * (depth + 1),
            CircuitAnsatzKind::Hv { depth } => 2 * depth,
        }
    }

    /// Parameters of a shallower optimum placed so the deeper circuit
    /// prepares the same state.
    ///
    /// HV appends identity blocks. R-CX prepends zero blocks, which act
    /// trivially because the ladder fixes `|0...0>`.
    pub fn embed(&self, n_qubits: usize, shallow: &[f64]) -> Result<Vec<f64>, VqeError> {
        let n = self.n_parameters(n_qubits);
        if shallow.len() > n {
            return Err(VqeError::ParameterLengthMismatch {
                expected: n,
                got: shallow.len(),
            });
        }
        let pad = vec![0.0; n - shallow.len()];
        Ok(match self {
            CircuitAnsatzKind::Hv { .. } => [shallow, &pad].concat(),
            CircuitAnsatzKind::Rcx { .. } => [&pad, shallow].concat(),
        })
    }
}

impl fmt::Display for CircuitAnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_d{}", self.family(), self.depth())
    }
}

impl FromStr for CircuitAnsatzKind {
    type Err = VqeError;

    /// `rcx` or `hv`, at depth zero; combine with [`CircuitAnsatzKind::with_depth`].
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rcx" => Ok(CircuitAnsatzKind::Rcx { depth: 0 }),
            "hv" => Ok(CircuitAnsatzKind::Hv { depth: 0 }),
            _ => Err(VqeError::InvalidConfig("ansatz must be rcx or hv")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Gate {
    Ry { q: usize, param: usize },
    Cx { control: usize, target: usize },
    /// `exp(i theta sum_bonds Z Z)`.
    ZzLayer { param: usize },
    /// `exp(i theta sum_q X_q)`.
    XLayer { param: usize },
}

/// One Pauli rotation `exp(i delta P)` inserted after a gate for the shift rule.
#[derive(Debug, Clone, Copy)]
enum Pauli {
    Y(usize),
    X(usize),
    Zz(usize, usize),
}

/// Gradient evaluation strategy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GradientMethod {
    /// Reverse sweep through the circuit; exact, cost of a few circuit runs.
    Adjoint,
    /// Two shifted circuits per generator term; exact.
    ParameterShift,
    /// Central differences with the given step.
    FiniteDifference(f64),
}

impl FromStr for GradientMethod {
    type Err = VqeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "adjoint" => Ok(GradientMethod::Adjoint),
            "shift" => Ok(GradientMethod::ParameterShift),
            "fd" => Ok(GradientMethod::FiniteDifference(1e-6)),
            _ => Err(VqeError::InvalidConfig("gradient must be adjoint, shift or fd")),
        }
    }
}

/// A parameterized circuit compiled for a register size and bond set.
#[derive(Debug, Clone)]
pub struct Circuit {
    kind: CircuitAnsatzKind,
    n_qubits: usize,
    gates: Vec<Gate>,
    bonds: Vec<(usize, usize)>,
    /// `sum_bonds z_a z_b` for every basis index.
    zz_table: Vec<i32>,
}

impl Circuit {
    /// R-CX on `n_qubits` qubits with the linear CX ladder.
    pub fn rcx(n_qubits: usize, depth: usize) -> Result<Self, VqeError> {
        QuantumState::zero(n_qubits)?;
        let mut gates = Vec::new();
        for block in 0..=depth {
            gates.extend((0..n_qubits).map(|q| Gate::Ry {
                q,
                param: block * n_qubits + q,
            }));
            if block < depth {
                gates.extend((0..n_qubits.saturating_sub(1)).map(|i| Gate::Cx {
                    control: i,
                    target: i + 1,
                }));
            }
        }
        Ok(Circuit {
            kind: CircuitAnsatzKind::Rcx { depth },
            n_qubits,
            gates,
            bonds: Vec::new(),
            zz_table: Vec::new(),
        })
    }

    /// HV circuit whose ZZ layers run over the nearest-neighbour bonds of `lattice`.
    pub fn hv(lattice: &LatticeGraph, depth: usize) -> Result<Self, VqeError> {
        let n_qubits = lattice.n_sites();
        QuantumState::zero(n_qubits)?;
        let bonds: Vec<(usize, usize)> = lattice.nn_bonds().iter().map(|b| (b.a, b.b)).collect();
        let zz_table = (0..1usize << n_qubits)
            .map(|k| {
                bonds
                    .iter()
                    .map(|&(a, b)| if ((k >> a) ^ (k >> b)) & 1 == 0 { 1 } else { -1 })
                    .sum()
            })
            .collect();
        let gates = (0..depth)
            .flat_map(|blk| [Gate::ZzLayer { param: 2 * blk }, Gate::XLayer { param: 2 * blk + 1 }])
            .collect();
        Ok(Circuit {
            kind: CircuitAnsatzKind::Hv { depth },
            n_qubits,
            gates,
            bonds,
            zz_table,
        })
    }

    /// Circuit of `kind` sized for the lattice of `spec`.
    pub fn for_spec(kind: CircuitAnsatzKind, spec: &HamiltonianSpec<f64>) -> Result<Self, VqeError> {
        check_spin_sector(spec, spec.n_sites())?;
        match kind {
            CircuitAnsatzKind::Rcx { depth } => Self::rcx(spec.n_sites(), depth),
            CircuitAnsatzKind::Hv { depth } => Self::hv(spec.lattice(), depth),
        }
    }

    pub fn kind(&self) -> CircuitAnsatzKind {
        self.kind
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_parameters(&self) -> usize {
        self.kind.n_parameters(self.n_qubits)
    }

    fn initial(&self) -> QuantumState {
        match self.kind {
            CircuitAnsatzKind::Rcx { .. } => QuantumState::zero(self.n_qubits),
            CircuitAnsatzKind::Hv { .. } => QuantumState::plus(self.n_qubits),
        }
        .expect("qubit count validated at construction")
    }

    fn check_len(&self, theta: &[f64]) -> Result<(), VqeError> {
        if theta.len() != self.n_parameters() {
            return Err(VqeError::ParameterLengthMismatch {
                expected: self.n_parameters(),
                got: theta.len(),
            });
        }
        Ok(())
    }

    fn apply_gate(&self, state: &mut QuantumState, gate: Gate, theta: &[f64], sign: f64) {
        match gate {
            Gate::Ry { q, param } => state.ry(q, sign * theta[param]),
            Gate::Cx { control, target } => state.cx(control, target),
            Gate::ZzLayer { param } => state.diagonal_rotation(&self.zz_table, sign * theta[param]),
            Gate::XLayer { param } => {
                for q in 0..self.n_qubits {
                    state.x_rotation(q, sign * theta[param]);
                }
            }
        }
    }

    fn run(&self, theta: &[f64], insert: Option<(usize, Pauli, f64)>) -> QuantumState {
        let mut state = self.initial();
        for (i, &gate) in self.gates.iter().enumerate() {
            self.apply_gate(&mut state, gate, theta, 1.0);
            if let Some((at, pauli, delta)) = insert {
                if at == i {
                    match pauli {
                        Pauli::Y(q) => state.ry(q, -2.0 * delta),
                        Pauli::X(q) => state.x_rotation(q, delta),
                        Pauli::Zz(a, b) => state.zz_rotation(a, b, delta),
                    }
                }
            }
        }
        state
    }

    /// The state `U(theta)|initial>`.
    pub fn prepare(&self, theta: &[f64]) -> Result<QuantumState, VqeError> {
        self.check_len(theta)?;
        Ok(self.run(theta, None))
    }

    /// Energy, variance and `dE/dtheta` at `theta`.
    pub fn energy_gradient(
        &self,
        spec: &HamiltonianSpec<f64>,
        theta: &[f64],
        method: GradientMethod,
    ) -> Result<(f64, f64, Vec<f64>), VqeError> {
        self.check_len(theta)?;
        check_spin_sector(spec, self.n_qubits)?;
        match method {
            GradientMethod::Adjoint => Ok(self.adjoint(spec, theta)),
            GradientMethod::ParameterShift => {
                let (e, var) = moments(spec, self.run(theta, None).amplitudes());
                Ok((e, var, self.shift_gradient(spec, theta)))
            }
            GradientMethod::FiniteDifference(eps) => {
                if !(eps > 0.0) {
                    return Err(VqeError::InvalidConfig("finite-difference step must be positive"));
                }
                let (e, var) = moments(spec, self.run(theta, None).amplitudes());
                Ok((e, var, self.fd_gradient(spec, theta, eps)))
            }
        }
    }

    fn energy_of(&self, spec: &HamiltonianSpec<f64>, theta: &[f64], insert: Option<(usize, Pauli, f64)>) -> f64 {
        let s = self.run(theta, insert);
        let h = apply_h(spec, s.amplitudes());
        inner(s.amplitudes(), &h).re
    }

    fn adjoint(&self, spec: &HamiltonianSpec<f64>, theta: &[f64]) -> (f64, f64, Vec<f64>) {
        let mut phi = self.run(theta, None);
        let hpsi = apply_h(spec, phi.amplitudes());
        let e = inner(phi.amplitudes(), &hpsi).re;
        let var = phi
            .amplitudes()
            .iter()
            .zip(&hpsi)
            .map(|(p, h)| (h - p * e).norm_sqr())
            .sum();
        let mut lambda = QuantumState::from_amplitudes(self.n_qubits, hpsi).expect("same register");
        let mut grad = vec![0.0; self.n_parameters()];
        // Invariant: phi is the state after gate i, lambda is U_{>i}^dag H psi.
        for &gate in self.gates.iter().rev() {
            let generated = match gate {
                Gate::Ry { q, param } => Some((param, -0.5, apply_y(phi.amplitudes(), q))),
                Gate::ZzLayer { param } => Some((param, 1.0, apply_diagonal(phi.amplitudes(), &self.zz_table))),
                Gate::XLayer { param } => Some((param, 1.0, apply_sum_x(phi.amplitudes(), self.n_qubits))),
                Gate::Cx { .. } => None,
            };
            if let Some((param, c, g_phi)) = generated {
                grad[param] += -2.0 * c * inner(lambda.amplitudes(), &g_phi).im;
            }
            self.apply_gate(&mut phi, gate, theta, -1.0);
            self.apply_gate(&mut lambda, gate, theta, -1.0);
        }
        (e, var, grad)
    }

    fn shift_gradient(&self, spec: &HamiltonianSpec<f64>, theta: &[f64]) -> Vec<f64> {
        let mut grad = vec![0.0; self.n_parameters()];
        let mut term = |at: usize, pauli: Pauli, coefficient: f64, param: usize| {
            let plus = self.energy_of(spec, theta, Some((at, pauli, FRAC_PI_4)));
            let minus = self.energy_of(spec, theta, Some((at, pauli, -FRAC_PI_4)));
            grad[param] += coefficient * (plus - minus);
        };
        for (at, &gate) in self.gates.iter().enumerate() {
            match gate {
                Gate::Ry { q, param } => term(at, Pauli::Y(q), -0.5, param),
                Gate::XLayer { param } => (0..self.n_qubits).for_each(|q| term(at, Pauli::X(q), 1.0, param)),
                Gate::ZzLayer { param } => self
                    .bonds
                    .iter()
                    .for_each(|&(a, b)| term(at, Pauli::Zz(a, b), 1.0, param)),
                Gate::Cx { .. } => {}
            }
        }
        grad
    }

    fn fd_gradient(&self, spec: &HamiltonianSpec<f64>, theta: &[f64], eps: f64) -> Vec<f64> {
        let mut t = theta.to_vec();
        (0..theta.len())
            .map(|k| {
                t[k] = theta[k] + eps;
                let plus = self.energy_of(spec, &t, None);
                t[k] = theta[k] - eps;
                let minus = self.energy_of(spec, &t, None);
                t[k] = theta[k];
                (plus - minus) / (2.0 * eps)
            })
            .collect()
    }
}

fn check_spin_sector(spec: &HamiltonianSpec<f64>, n_qubits: usize) -> Result<(), VqeError> {
    match *spec.sector() {
        HilbertSector::Spins { n_sites } if n_sites == n_qubits => {
            QuantumState::zero(n_qubits)?;
            Ok(())
        }
        _ => Err(VqeError::SectorMismatch),
    }
}

/// `H v` for a qubit-ordered vector.
fn apply_h(spec: &HamiltonianSpec<f64>, v: &[Complex64]) -> Vec<Complex64> {
    let rev: Vec<Complex64> = v.iter().rev().copied().collect();
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    spec.apply_slice(&rev, &mut out);
    out.reverse();
    out
}

/// `(<H>, <H^2> - <H>^2)` for a normalized qubit-ordered vector.
fn moments(spec: &HamiltonianSpec<f64>, v: &[Complex64]) -> (f64, f64) {
    let h = apply_h(spec, v);
    let e = inner(v, &h).re;
    let var = v.iter().zip(&h).map(|(p, hp)| (hp - p * e).norm_sqr()).sum();
    (e, var)
}

/// Exact energy and variance of a register state under a spin Hamiltonian.
pub fn circuit_energy_and_variance(
    state: &QuantumState,
    spec: &HamiltonianSpec<f64>,
) -> Result<(f64, f64), VqeError> {
    check_spin_sector(spec, state.n_qubits())?;
    Ok(crate::exact::mean_and_variance(spec, &state.to_spin_state())?)
}

/// R-CX state on a `n_qubits` register.
pub fn prepare_rcx(n_qubits: usize, depth: usize, theta: &[f64]) -> Result<QuantumState, VqeError> {
    Circuit::rcx(n_qubits, depth)?.prepare(theta)
}

/// HV state with ZZ layers over the nearest-neighbour bonds of `lattice`.
pub fn prepare_hv(lattice: &LatticeGraph, depth: usize, theta: &[f64]) -> Result<QuantumState, VqeError> {
    Circuit::hv(lattice, depth)?.prepare(theta)
}
