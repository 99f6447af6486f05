//! Exact ground states and spectra: Lanczos with full reorthogonalization,
//! dense diagonalization for small sectors, exact moments of arbitrary states,
//! and exact imaginary-time families.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::hamiltonian::{HamiltonianError, HamiltonianSpec};
use crate::scalar::Real;
use crate::state::{StateError, StateVector, MAX_DENSE_DIMENSION};

/// Largest sector handled by dense diagonalization.
pub const MAX_FULL_SPECTRUM_DIMENSION: u64 = 4096;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum ExactError {
    #[error(transparent)]
    Hamiltonian(#[from] HamiltonianError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error("sector dimension {dim} exceeds the cap of {cap}")]
    DimensionOverflow { dim: u64, cap: u64 },
    #[error("state has zero norm")]
    ZeroVector,
    #[error("imaginary time {0} is negative or not finite")]
    InvalidTau(f64),
    #[error("invalid Lanczos configuration: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    /// Relative residual target: `|H v - E v| <= tolerance * max(1, |E|)`.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            tolerance: 1e-10,
            max_iterations: 500,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactSolution<T> {
    pub e0: T,
    pub ground_vector: StateVector<T>,
    pub iterations_used: usize,
    pub residual: T,
    pub converged: bool,
}

/// Eigen-decomposition of a symmetric tridiagonal matrix by implicit QL.
///
/// `z` holds rows of the accumulated rotation matrix to track; pass rows of
/// the identity. On return `d` holds the (unsorted) eigenvalues and row `r` of
/// `z` holds component `r` of each eigenvector.
fn tridiagonal_ql<T: Real>(d: &mut [T], off: &[T], z: &mut [Vec<T>]) {
    let n = d.len();
    if n == 0 {
        return;
    }
    let mut e: Vec<T> = off.to_vec();
    e.resize(n, T::zero());
    let two = T::lit(2.0);
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= T::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (two * e[l]);
            let mut r = g.hypot(T::one());
            let shift = if g >= T::zero() { r } else { -r };
            g = d[m] - d[l] + e[l] / (g + shift);
            let (mut s, mut c, mut p) = (T::one(), T::one(), T::zero());
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == T::zero() {
                    d[i + 1] -= p;
                    e[m] = T::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + two * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in z.iter_mut() {
                    let f = row[i + 1];
                    row[i + 1] = s * row[i] + c * f;
                    row[i] = c * row[i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = T::zero();
        }
    }
}

fn identity_rows<T: Real>(n: usize, rows: impl Iterator<Item = usize>) -> Vec<Vec<T>> {
    rows.map(|r| {
        let mut v = vec![T::zero(); n];
        v[r] = T::one();
        v
    })
    .collect()
}

fn argmin<T: Real>(d: &[T]) -> usize {
    let mut best = 0;
    for (i, &x) in d.iter().enumerate() {
        if x < d[best] {
            best = i;
        }
    }
    best
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn axpy<T: Real>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn check_dense<T: Real>(spec: &HamiltonianSpec<T>, cap: u64) -> Result<usize, ExactError> {
    let dim = spec.sector_dimension();
    if dim > cap {
        return Err(ExactError::DimensionOverflow { dim, cap });
    }
    Ok(dim as usize)
}

/// Lowest eigenpair by Lanczos iteration with full reorthogonalization and a
/// seeded random start vector.
///
/// Returns the best estimate with `converged = false` when the iteration
/// budget runs out before the residual target is met.
pub fn lanczos_ground<T: Real>(
    spec: &HamiltonianSpec<T>,
    cfg: &LanczosConfig,
) -> Result<ExactSolution<T>, ExactError> {
    if !(cfg.tolerance > 0.0) {
        return Err(ExactError::InvalidConfig("tolerance must be positive"));
    }
    if cfg.max_iterations < 2 {
        return Err(ExactError::InvalidConfig("max_iterations must be at least 2"));
    }
    let dim = check_dense(spec, MAX_DENSE_DIMENSION)?;
    let tol = T::lit(cfg.tolerance);
    let max_steps = cfg.max_iterations.min(dim);

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut v: Vec<T> = (0..dim)
        .map(|_| T::lit(StandardNormal.sample(&mut rng)))
        .collect();
    let n0 = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= n0);

    let mut basis: Vec<Vec<T>> = vec![v];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let mut w = vec![T::zero(); dim];
    let mut best: Option<ExactSolution<T>> = None;

    for step in 0..max_steps {
        let j = basis.len() - 1;
        spec.apply_slice(&basis[j], &mut w);
        let alpha = dot(&basis[j], &w);
        axpy(-alpha, &basis[j], &mut w);
        if j > 0 {
            axpy(-betas[j - 1], &basis[j - 1], &mut w);
        }
        for _ in 0..2 {
            for q in &basis {
                let overlap = dot(q, &w);
                axpy(-overlap, q, &mut w);
            }
        }
        let beta = dot(&w, &w).sqrt();
        alphas.push(alpha);

        let m = alphas.len();
        let mut d = alphas.clone();
        let mut last_row = identity_rows(m, std::iter::once(m - 1));
        tridiagonal_ql(&mut d, &betas, &mut last_row);
        let k = argmin(&d);
        let theta = d[k];
        let scale = T::one().max(theta.abs());
        let estimate = beta * last_row[0][k].abs();
        let exhausted = beta <= T::lit(100.0) * T::epsilon() * scale;
        let last = step + 1 == max_steps;

        if estimate <= tol * scale || exhausted || last {
            let solution = ritz_solution(spec, &basis, &alphas, &betas, step + 1, tol)?;
            let done = solution.converged || exhausted || last;
            best = Some(solution);
            if done {
                break;
            }
        }
        if exhausted {
            break;
        }
        betas.push(beta);
        basis.push(w.iter().map(|&x| x / beta).collect());
    }
    Ok(best.expect("at least one Ritz evaluation"))
}

fn ritz_solution<T: Real>(
    spec: &HamiltonianSpec<T>,
    basis: &[Vec<T>],
    alphas: &[T],
    betas: &[T],
    iterations: usize,
    tol: T,
) -> Result<ExactSolution<T>, ExactError> {
    let m = alphas.len();
    let dim = basis[0].len();
    let mut d = alphas.to_vec();
    let mut z = identity_rows(m, 0..m);
    tridiagonal_ql(&mut d, &betas[..m - 1], &mut z);
    let k = argmin(&d);
    let mut x = vec![T::zero(); dim];
    for (q, row) in basis.iter().zip(&z) {
        axpy(row[k], q, &mut x);
    }
    let nx = dot(&x, &x).sqrt();
    x.iter_mut().for_each(|c| *c /= nx);

    let mut hx = vec![T::zero(); dim];
    spec.apply_slice(&x, &mut hx);
    let e0 = dot(&x, &hx);
    axpy(-e0, &x, &mut hx);
    let residual = dot(&hx, &hx).sqrt();
    let ground_vector = StateVector::from_real(*spec.sector(), &x)?;
    Ok(ExactSolution {
        e0,
        ground_vector,
        iterations_used: iterations,
        residual,
        converged: residual <= tol * T::one().max(e0.abs()),
    })
}

/// Dense matrix of `H` in the sector basis, assembled from rows.
pub fn dense_matrix<T: Real>(spec: &HamiltonianSpec<T>) -> Result<DMatrix<f64>, ExactError> {
    let dim = check_dense(spec, MAX_FULL_SPECTRUM_DIMENSION)?;
    let sector = spec.sector();
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut row = Vec::new();
    for k in 0..dim {
        row.clear();
        spec.row_into(sector.state_at(k as u64), &mut row);
        for e in &row {
            let idx = sector.index_of(e.target).expect("row stays in sector") as usize;
            h[(idx, k)] += e.amplitude.to_f64_lossy();
        }
    }
    Ok(h)
}

/// All eigenpairs of a small sector, ascending.
#[derive(Debug, Clone)]
pub struct Eigensystem<T> {
    pub values: Vec<T>,
    vectors: DMatrix<f64>,
    sector: crate::basis::HilbertSector,
}

impl<T: Real> Eigensystem<T> {
    pub fn dimension(&self) -> usize {
        self.values.len()
    }

    /// Normalized eigenvector `k` (ascending order).
    pub fn vector(&self, k: usize) -> StateVector<T> {
        let col: Vec<T> = self.vectors.column(k).iter().map(|&x| T::lit(x)).collect();
        StateVector::from_real(self.sector, &col).expect("dimension matches sector")
    }

    /// Coefficient of eigenvector `k` in `v`, i.e. `<E_k|v>`.
    pub fn overlap(&self, k: usize, v: &StateVector<T>) -> Complex<T> {
        self.vectors
            .column(k)
            .iter()
            .zip(v.amplitudes())
            .map(|(&c, a)| *a * T::lit(c))
            .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z)
    }
}

pub fn full_eigensystem<T: Real>(spec: &HamiltonianSpec<T>) -> Result<Eigensystem<T>, ExactError> {
    let h = dense_matrix(spec)?;
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| T::lit(eig.eigenvalues[i])).collect();
    let vectors = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| {
        eig.eigenvectors[(r, order[c])]
    });
    Ok(Eigensystem {
        values,
        vectors,
        sector: *spec.sector(),
    })
}

/// Ascending eigenvalues by dense diagonalization (dimension <= 4096).
pub fn full_spectrum<T: Real>(spec: &HamiltonianSpec<T>) -> Result<Vec<T>, ExactError> {
    let h = dense_matrix(spec)?;
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    Ok(values.into_iter().map(T::lit).collect())
}

/// Exact `(E, Var E)` of `v` from matrix-free products.
///
/// The variance is evaluated as `|(H - E) v|^2 / <v|v>`, which equals
/// `<H^2> - <H>^2` and cannot go negative through cancellation.
pub fn mean_and_variance<T: Real>(
    spec: &HamiltonianSpec<T>,
    v: &StateVector<T>,
) -> Result<(T, T), ExactError> {
    let norm = v.norm_sqr();
    if !(norm > T::zero()) {
        return Err(ExactError::ZeroVector);
    }
    let hv = spec.apply(v)?;
    let energy = v.inner(&hv).re / norm;
    let variance = v
        .amplitudes()
        .iter()
        .zip(hv.amplitudes())
        .map(|(a, h)| (*h - *a * energy).norm_sqr())
        .sum::<T>()
        / norm;
    Ok((energy, variance.max(T::zero())))
}

/// Normalized `exp(-tau H) |psi_I>` for each `tau`, with `|psi_I>` a seeded
/// random real vector, evaluated exactly in the eigenbasis.
pub fn imaginary_time_family<T: Real>(
    spec: &HamiltonianSpec<T>,
    taus: &[T],
    seed: u64,
) -> Result<Vec<(T, StateVector<T>)>, ExactError> {
    for &tau in taus {
        if !(tau >= T::zero()) || !tau.is_finite() {
            return Err(ExactError::InvalidTau(tau.to_f64_lossy()));
        }
    }
    let eig = full_eigensystem(spec)?;
    imaginary_time_family_with(&eig, taus, seed)
}

/// [`imaginary_time_family`] reusing an existing eigensystem.
pub fn imaginary_time_family_with<T: Real>(
    eig: &Eigensystem<T>,
    taus: &[T],
    seed: u64,
) -> Result<Vec<(T, StateVector<T>)>, ExactError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = StateVector::<T>::random_real(eig.sector, &mut rng)?;
    let coeffs: Vec<f64> = (0..eig.dimension())
        .map(|k| eig.overlap(k, &start).re.to_f64_lossy())
        .collect();
    let e0 = eig.values[0].to_f64_lossy();
    let mut out = Vec::with_capacity(taus.len());
    for &tau in taus {
        if !(tau >= T::zero()) || !tau.is_finite() {
            return Err(ExactError::InvalidTau(tau.to_f64_lossy()));
        }
        let t = tau.to_f64_lossy();
        let weights = nalgebra::DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&eig.values)
                .map(|(&c, &e)| c * (-t * (e.to_f64_lossy() - e0)).exp()),
        );
        let amps = &eig.vectors * weights;
        let amps: Vec<T> = amps.iter().map(|&x| T::lit(x)).collect();
        let mut v = StateVector::from_real(eig.sector, &amps)?;
        v.normalize();
        out.push((tau, v));
    }
    Ok(out)
}
