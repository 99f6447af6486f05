use num_complex::Complex64;

use super::VqeError;
use crate::basis::HilbertSector;
use crate::state::StateVector;

/// Largest register the statevector simulator accepts.
pub const MAX_QUBITS: usize = 16;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense `L`-qubit register. Bit `q` of an index is the computational value of
/// qubit `q`; qubit value 0 is spin up, so index `k` is spin configuration `!k`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

fn check_qubits(n: usize) -> Result<(), VqeError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(VqeError::QubitCount { n, max: MAX_QUBITS });
    }
    Ok(())
}

impl QuantumState {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Result<Self, VqeError> {
        check_qubits(n_qubits)?;
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(QuantumState { n_qubits, amplitudes })
    }

    /// `|+>^L`.
    pub fn plus(n_qubits: usize) -> Result<Self, VqeError> {
        check_qubits(n_qubits)?;
        let dim = 1usize << n_qubits;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Ok(QuantumState {
            n_qubits,
            amplitudes: vec![a; dim],
        })
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self, VqeError> {
        check_qubits(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(VqeError::SectorMismatch);
        }
        Ok(QuantumState { n_qubits, amplitudes })
    }

    /// Loads a spin-sector vector, reordering basis states into qubit order.
    pub fn from_spin_state(v: &StateVector<f64>) -> Result<Self, VqeError> {
        match *v.sector() {
            HilbertSector::Spins { n_sites } => {
                let amps = v.amplitudes().iter().rev().copied().collect();
                Self::from_amplitudes(n_sites, amps)
            }
            _ => Err(VqeError::SectorMismatch),
        }
    }

    /// The same state in the spin basis of the Hamiltonian module.
    pub fn to_spin_state(&self) -> StateVector<f64> {
        let amps = self.amplitudes.iter().rev().copied().collect();
        StateVector::from_amplitudes(HilbertSector::Spins { n_sites: self.n_qubits }, amps)
            .expect("register length matches its sector")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        inner(&self.amplitudes, &other.amplitudes)
    }

    /// `exp(-i theta Y / 2)` on qubit `q`.
    pub fn ry(&mut self, q: usize, theta: f64) {
        let (s, c) = (0.5 * theta).sin_cos();
        pair_map(&mut self.amplitudes, q, |a0, a1| (a0 * c - a1 * s, a0 * s + a1 * c));
    }

    /// `exp(i phi X)` on qubit `q`.
    pub fn x_rotation(&mut self, q: usize, phi: f64) {
        let (s, c) = phi.sin_cos();
        let is = Complex64::new(0.0, s);
        pair_map(&mut self.amplitudes, q, |a0, a1| (a0 * c + a1 * is, a0 * is + a1 * c));
    }

    /// `exp(i phi Z_a Z_b)`.
    pub fn zz_rotation(&mut self, a: usize, b: usize, phi: f64) {
        let same = Complex64::from_polar(1.0, phi);
        let differ = same.conj();
        for (k, amp) in self.amplitudes.iter_mut().enumerate() {
            *amp *= if ((k >> a) ^ (k >> b)) & 1 == 0 { same } else { differ };
        }
    }

    /// `exp(i phi sum_b Z_a Z_b)` given the per-index bond sums `table`.
    pub fn diagonal_rotation(&mut self, table: &[i32], phi: f64) {
        for (amp, &s) in self.amplitudes.iter_mut().zip(table) {
            *amp *= Complex64::from_polar(1.0, phi * s as f64);
        }
    }

    pub fn cx(&mut self, control: usize, target: usize) {
        let (cm, tm) = (1usize << control, 1usize << target);
        for k in 0..self.amplitudes.len() {
            if k & cm != 0 && k & tm == 0 {
                self.amplitudes.swap(k, k | tm);
            }
        }
    }
}

pub(crate) fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Applies a 2x2 map to every amplitude pair differing in bit `q`.
fn pair_map(amps: &mut [Complex64], q: usize, f: impl Fn(Complex64, Complex64) -> (Complex64, Complex64)) {
    let m = 1usize << q;
    for k in 0..amps.len() {
        if k & m == 0 {
            let (a0, a1) = f(amps[k], amps[k | m]);
            amps[k] = a0;
            amps[k | m] = a1;
        }
    }
}

/// `Y_q v`.
pub(crate) fn apply_y(v: &[Complex64], q: usize) -> Vec<Complex64> {
    let m = 1usize << q;
    let i = Complex64::new(0.0, 1.0);
    (0..v.len())
        .map(|k| if k & m == 0 { -i * v[k | m] } else { i * v[k ^ m] })
        .collect()
}

/// `sum_q X_q v`.
pub(crate) fn apply_sum_x(v: &[Complex64], n_qubits: usize) -> Vec<Complex64> {
    (0..v.len())
        .map(|k| (0..n_qubits).map(|q| v[k ^ (1 << q)]).sum())
        .collect()
}

/// `diag(table) v`.
pub(crate) fn apply_diagonal(v: &[Complex64], table: &[i32]) -> Vec<Complex64> {
    v.iter().zip(table).map(|(a, &s)| a * s as f64).collect()
}
