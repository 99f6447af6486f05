use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::VmcError;

/// `s_i = +1` when bit `i` is set (spin up), else `-1`.
#[inline]
pub fn spin(x: u64, i: usize) -> f64 {
    if (x >> i) & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// `log(2 cosh z)` without overflow for large `|Re z|`.
#[inline]
pub fn log_2cosh(z: Complex64) -> Complex64 {
    let w = if z.re >= 0.0 { z } else { -z };
    w + (-2.0 * w).exp().ln_1p()
}

trait Ln1p {
    fn ln_1p(self) -> Self;
}

impl Ln1p for Complex64 {
    fn ln_1p(self) -> Complex64 {
        if self.norm_sqr() < 1e-8 {
            // Series keeps precision where `1 + z` would round.
            self - self * self / 2.0 + self * self * self / 3.0
        } else {
            (Complex64::new(1.0, 0.0) + self).ln()
        }
    }
}

/// A variational wave function over spin configurations stored as bit strings.
///
/// Parameters are exchanged as complex numbers; ansatzes with real parameters
/// report `is_real() == true` and ignore imaginary parts on input.
pub trait Ansatz: Send + Sync {
    fn n_sites(&self) -> usize;
    fn n_parameters(&self) -> usize;
    fn is_real(&self) -> bool;
    fn parameters(&self) -> Vec<Complex64>;
    fn set_parameters(&mut self, params: &[Complex64]) -> Result<(), VmcError>;

    fn log_amplitude(&self, x: u64) -> Complex64;

    /// `log psi(y) - log psi(x)`.
    fn log_amplitude_ratio(&self, x: u64, y: u64) -> Complex64 {
        self.log_amplitude(y) - self.log_amplitude(x)
    }

    /// Ratios from one reference configuration to many targets.
    fn log_amplitude_ratios(&self, x: u64, targets: &[u64], out: &mut Vec<Complex64>) {
        let lx = self.log_amplitude(x);
        out.clear();
        out.extend(targets.iter().map(|&y| self.log_amplitude(y) - lx));
    }

    /// `d log psi*(x) / d theta*_k`, i.e. the conjugated log-derivatives.
    fn grad_log_amplitude(&self, x: u64, out: &mut [Complex64]);
}

fn check_len(expected: usize, got: usize) -> Result<(), VmcError> {
    if expected != got {
        return Err(VmcError::ParameterLength { expected, got });
    }
    Ok(())
}

fn seeded_normals(n: usize, scale: f64, seed: u64) -> impl Iterator<Item = f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Normal::new(0.0, scale).expect("finite scale");
    (0..n).map(move |_| dist.sample(&mut rng))
}

/// Holomorphic restricted Boltzmann machine with complex parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct Rbm {
    n_visible: usize,
    n_hidden: usize,
    a: Vec<Complex64>,
    b: Vec<Complex64>,
    /// Row-major `n_hidden x n_visible`.
    w: Vec<Complex64>,
}

impl Rbm {
    /// All-zero parameters, i.e. the uniform amplitude.
    pub fn zeros(n_visible: usize, alpha: usize) -> Result<Self, VmcError> {
        if n_visible == 0 || n_visible > 63 || alpha == 0 {
            return Err(VmcError::InvalidConfig("RBM needs 1..=63 visible units and alpha >= 1"));
        }
        let m = alpha * n_visible;
        let zero = Complex64::new(0.0, 0.0);
        Ok(Rbm {
            n_visible,
            n_hidden: m,
            a: vec![zero; n_visible],
            b: vec![zero; m],
            w: vec![zero; m * n_visible],
        })
    }

    /// Real and imaginary parts drawn from `N(0, scale^2)`.
    pub fn random(n_visible: usize, alpha: usize, scale: f64, seed: u64) -> Result<Self, VmcError> {
        let mut rbm = Self::zeros(n_visible, alpha)?;
        let mut draws = seeded_normals(2 * rbm.n_parameters(), scale, seed);
        let params: Vec<Complex64> = (0..rbm.n_parameters())
            .map(|_| Complex64::new(draws.next().unwrap(), draws.next().unwrap()))
            .collect();
        rbm.set_parameters(&params)?;
        Ok(rbm)
    }

    pub fn n_hidden(&self) -> usize {
        self.n_hidden
    }

    pub fn visible_bias(&self) -> &[Complex64] {
        &self.a
    }

    pub fn hidden_bias(&self) -> &[Complex64] {
        &self.b
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.w
    }

    fn thetas(&self, x: u64) -> Vec<Complex64> {
        let n = self.n_visible;
        (0..self.n_hidden)
            .map(|j| {
                let row = &self.w[j * n..(j + 1) * n];
                row.iter()
                    .enumerate()
                    .fold(self.b[j], |acc, (i, &wji)| acc + wji * spin(x, i))
            })
            .collect()
    }
}

impl Ansatz for Rbm {
    fn n_sites(&self) -> usize {
        self.n_visible
    }

    fn n_parameters(&self) -> usize {
        self.n_visible + self.n_hidden + self.n_hidden * self.n_visible
    }

    fn is_real(&self) -> bool {
        false
    }

    fn parameters(&self) -> Vec<Complex64> {
        self.a.iter().chain(&self.b).chain(&self.w).copied().collect()
    }

    fn set_parameters(&mut self, params: &[Complex64]) -> Result<(), VmcError> {
        check_len(self.n_parameters(), params.len())?;
        let (a, rest) = params.split_at(self.n_visible);
        let (b, w) = rest.split_at(self.n_hidden);
        self.a.copy_from_slice(a);
        self.b.copy_from_slice(b);
        self.w.copy_from_slice(w);
        Ok(())
    }

    fn log_amplitude(&self, x: u64) -> Complex64 {
        let visible = self
            .a
            .iter()
            .enumerate()
            .fold(Complex64::new(0.0, 0.0), |acc, (i, &ai)| acc + ai * spin(x, i));
        self.thetas(x).into_iter().fold(visible, |acc, t| acc + log_2cosh(t))
    }

    fn log_amplitude_ratios(&self, x: u64, targets: &[u64], out: &mut Vec<Complex64>) {
        let n = self.n_visible;
        let theta = self.thetas(x);
        let base: Vec<Complex64> = theta.iter().map(|&t| log_2cosh(t)).collect();
        out.clear();
        for &y in targets {
            let mut diff = x ^ y;
            let mut flipped = Vec::with_capacity(diff.count_ones() as usize);
            while diff != 0 {
                let i = diff.trailing_zeros() as usize;
                flipped.push((i, spin(y, i) - spin(x, i)));
                diff &= diff - 1;
            }
            let mut r = flipped
                .iter()
                .fold(Complex64::new(0.0, 0.0), |acc, &(i, ds)| acc + self.a[i] * ds);
            for j in 0..self.n_hidden {
                let t = flipped
                    .iter()
                    .fold(theta[j], |acc, &(i, ds)| acc + self.w[j * n + i] * ds);
                r += log_2cosh(t) - base[j];
            }
            out.push(r);
        }
    }

    fn grad_log_amplitude(&self, x: u64, out: &mut [Complex64]) {
        let n = self.n_visible;
        let m = self.n_hidden;
        for i in 0..n {
            out[i] = Complex64::new(spin(x, i), 0.0);
        }
        for (j, t) in self.thetas(x).into_iter().enumerate() {
            let th = t.tanh().conj();
            out[n + j] = th;
            for i in 0..n {
                out[n + m + j * n + i] = th * spin(x, i);
            }
        }
    }
}

/// Positive two-body Jastrow factor `exp(sum_{i<j} J_ij s_i s_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jastrow {
    n_sites: usize,
    /// Upper triangle, pairs `(0,1), (0,2), .., (1,2), ..`.
    coeffs: Vec<f64>,
}

impl Jastrow {
    pub fn zeros(n_sites: usize) -> Result<Self, VmcError> {
        if !(2..=63).contains(&n_sites) {
            return Err(VmcError::InvalidConfig("Jastrow needs 2..=63 sites"));
        }
        Ok(Jastrow {
            n_sites,
            coeffs: vec![0.0; n_sites * (n_sites - 1) / 2],
        })
    }

    pub fn random(n_sites: usize, scale: f64, seed: u64) -> Result<Self, VmcError> {
        let mut j = Self::zeros(n_sites)?;
        let len = j.coeffs.len();
        j.coeffs = seeded_normals(len, scale, seed).collect();
        Ok(j)
    }

    fn pair_index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * (2 * self.n_sites - i - 1) / 2 + (j - i - 1)
    }

    /// `J_ij` for `i != j`; the matrix is symmetric.
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        self.coeffs[self.pair_index(i, j)]
    }

    pub fn set_coefficient(&mut self, i: usize, j: usize, value: f64) {
        let k = self.pair_index(i, j);
        self.coeffs[k] = value;
    }
}

impl Ansatz for Jastrow {
    fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn n_parameters(&self) -> usize {
        self.coeffs.len()
    }

    fn is_real(&self) -> bool {
        true
    }

    fn parameters(&self) -> Vec<Complex64> {
        self.coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect()
    }

    fn set_parameters(&mut self, params: &[Complex64]) -> Result<(), VmcError> {
        check_len(self.coeffs.len(), params.len())?;
        for (c, p) in self.coeffs.iter_mut().zip(params) {
            *c = p.re;
        }
        Ok(())
    }

    fn log_amplitude(&self, x: u64) -> Complex64 {
        let n = self.n_sites;
        let mut acc = 0.0;
        let mut k = 0;
        for i in 0..n {
            let si = spin(x, i);
            for j in i + 1..n {
                acc += self.coeffs[k] * si * spin(x, j);
                k += 1;
            }
        }
        Complex64::new(acc, 0.0)
    }

    fn grad_log_amplitude(&self, x: u64, out: &mut [Complex64]) {
        let n = self.n_sites;
        let mut k = 0;
        for i in 0..n {
            let si = spin(x, i);
            for j in i + 1..n {
                out[k] = Complex64::new(si * spin(x, j), 0.0);
                k += 1;
            }
        }
    }
}

/// Multiplies an inner ansatz by the sign `(-1)^{number of up spins in mask}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarshallSign<A> {
    inner: A,
    mask: u64,
}

impl<A: Ansatz> MarshallSign<A> {
    pub fn new(inner: A, mask: u64) -> Self {
        MarshallSign { inner, mask }
    }

    /// Mask of the sites with sublattice index 1.
    pub fn for_lattice(inner: A, lattice: &crate::lattice::LatticeGraph) -> Self {
        let mask = (0..lattice.n_sites())
            .filter(|&s| lattice.sublattice(s) == 1)
            .fold(0u64, |m, s| m | (1 << s));
        Self::new(inner, mask)
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    fn phase(&self, x: u64) -> f64 {
        std::f64::consts::PI * (x & self.mask).count_ones() as f64
    }
}

impl<A: Ansatz> Ansatz for MarshallSign<A> {
    fn n_sites(&self) -> usize {
        self.inner.n_sites()
    }

    fn n_parameters(&self) -> usize {
        self.inner.n_parameters()
    }

    fn is_real(&self) -> bool {
        self.inner.is_real()
    }

    fn parameters(&self) -> Vec<Complex64> {
        self.inner.parameters()
    }

    fn set_parameters(&mut self, params: &[Complex64]) -> Result<(), VmcError> {
        self.inner.set_parameters(params)
    }

    fn log_amplitude(&self, x: u64) -> Complex64 {
        self.inner.log_amplitude(x) + Complex64::new(0.0, self.phase(x))
    }

    fn log_amplitude_ratio(&self, x: u64, y: u64) -> Complex64 {
        self.inner.log_amplitude_ratio(x, y) + Complex64::new(0.0, self.phase(y) - self.phase(x))
    }

    fn log_amplitude_ratios(&self, x: u64, targets: &[u64], out: &mut Vec<Complex64>) {
        self.inner.log_amplitude_ratios(x, targets, out);
        let px = self.phase(x);
        for (r, &y) in out.iter_mut().zip(targets) {
            *r += Complex64::new(0.0, self.phase(y) - px);
        }
    }

    fn grad_log_amplitude(&self, x: u64, out: &mut [Complex64]) {
        self.inner.grad_log_amplitude(x, out)
    }
}

/// Mask for [`MarshallSign`] encoding the known ground-state sign rule.
///
/// TFIM with `Gamma > 0` has signs `(-1)^{n_down}`, i.e. a factor `(-1)` per up
/// spin up to a global sign. Antiferromagnetic Heisenberg and J1-J2 models on
/// bipartite lattices get the Marshall rule on sublattice 1 (exact for
/// Heisenberg, approximate once `J2 != 0`). Zero otherwise.
pub fn sign_rule_mask(spec: &crate::hamiltonian::HamiltonianSpec<f64>) -> u64 {
    use crate::hamiltonian::Model;
    let lat = spec.lattice();
    let n = spec.n_sites();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let bipartite = lat.nn_bonds().iter().all(|b| lat.sublattice(b.a) != lat.sublattice(b.b));
    let marshall = || {
        (0..n)
            .filter(|&s| lat.sublattice(s) == 1)
            .fold(0u64, |m, s| m | (1 << s))
    };
    match *spec.model() {
        Model::Tfim { gamma, .. } if gamma > 0.0 => all,
        Model::Heisenberg { j } if j > 0.0 && bipartite => marshall(),
        Model::J1J2 { j1, .. } if j1 > 0.0 && bipartite => marshall(),
        _ => 0,
    }
}

/// Fixed amplitudes over all `2^n` configurations, without parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseAnsatz {
    n_sites: usize,
    log_amps: Vec<Complex64>,
}

impl DenseAnsatz {
    /// `amplitudes[x]` is the amplitude of configuration `x`; zeros are allowed.
    pub fn new(n_sites: usize, amplitudes: &[Complex64]) -> Result<Self, VmcError> {
        if n_sites > 24 || amplitudes.len() != 1usize << n_sites {
            return Err(VmcError::InvalidConfig("dense ansatz needs 2^n amplitudes with n <= 24"));
        }
        Ok(DenseAnsatz {
            n_sites,
            log_amps: amplitudes.iter().map(|a| a.ln()).collect(),
        })
    }

    /// Embeds a sector state over spin configurations.
    pub fn from_state(state: &crate::state::StateVector<f64>) -> Result<Self, VmcError> {
        let sector = state.sector();
        let n = sector.n_modes();
        if n > 24 {
            return Err(VmcError::InvalidConfig("dense ansatz needs n <= 24"));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
        for (k, a) in state.amplitudes().iter().enumerate() {
            amps[sector.state_at(k as u64) as usize] = *a;
        }
        Self::new(n, &amps)
    }
}

impl Ansatz for DenseAnsatz {
    fn n_sites(&self) -> usize {
        self.n_sites
    }

    fn n_parameters(&self) -> usize {
        0
    }

    fn is_real(&self) -> bool {
        true
    }

    fn parameters(&self) -> Vec<Complex64> {
        Vec::new()
    }

    fn set_parameters(&mut self, params: &[Complex64]) -> Result<(), VmcError> {
        check_len(0, params.len())
    }

    fn log_amplitude(&self, x: u64) -> Complex64 {
        self.log_amps[x as usize]
    }

    fn grad_log_amplitude(&self, _x: u64, _out: &mut [Complex64]) {}
}
