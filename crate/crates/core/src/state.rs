use num_complex::Complex;
use num_traits::Zero;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::basis::HilbertSector;
use crate::scalar::Real;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum StateError {
    #[error("amplitude vector has length {got}, sector dimension is {expected}")]
    LengthMismatch { expected: u64, got: usize },
    #[error("sector dimension {0} does not fit in memory as a dense vector")]
    DimensionOverflow(u64),
}

/// Largest sector dimension stored as dense vectors.
pub const MAX_DENSE_DIMENSION: u64 = 1 << 28;

/// Dense complex amplitudes over the basis of a [`HilbertSector`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<T> {
    sector: HilbertSector,
    amps: Vec<Complex<T>>,
}

fn checked_len(sector: &HilbertSector) -> Result<usize, StateError> {
    let dim = sector.dimension();
    if dim > MAX_DENSE_DIMENSION {
        return Err(StateError::DimensionOverflow(dim));
    }
    Ok(dim as usize)
}

impl<T: Real> StateVector<T> {
    pub fn zeros(sector: HilbertSector) -> Result<Self, StateError> {
        let len = checked_len(&sector)?;
        Ok(StateVector {
            sector,
            amps: vec![Complex::zero(); len],
        })
    }

    pub fn basis(sector: HilbertSector, index: usize) -> Result<Self, StateError> {
        let mut v = Self::zeros(sector)?;
        v.amps[index] = Complex::new(T::one(), T::zero());
        Ok(v)
    }

    pub fn from_amplitudes(sector: HilbertSector, amps: Vec<Complex<T>>) -> Result<Self, StateError> {
        let len = checked_len(&sector)?;
        if amps.len() != len {
            return Err(StateError::LengthMismatch {
                expected: sector.dimension(),
                got: amps.len(),
            });
        }
        Ok(StateVector { sector, amps })
    }

    pub fn from_real(sector: HilbertSector, amps: &[T]) -> Result<Self, StateError> {
        Self::from_amplitudes(
            sector,
            amps.iter().map(|&a| Complex::new(a, T::zero())).collect(),
        )
    }

    /// Normalized vector with independent standard-normal real and imaginary parts.
    pub fn random<R: Rng + ?Sized>(sector: HilbertSector, rng: &mut R) -> Result<Self, StateError> {
        let len = checked_len(&sector)?;
        let mut draw = || T::lit(StandardNormal.sample(rng));
        let amps = (0..len).map(|_| Complex::new(draw(), draw())).collect();
        let mut v = StateVector { sector, amps };
        v.normalize();
        Ok(v)
    }

    /// Normalized vector with standard-normal real amplitudes.
    pub fn random_real<R: Rng + ?Sized>(sector: HilbertSector, rng: &mut R) -> Result<Self, StateError> {
        let len = checked_len(&sector)?;
        let amps = (0..len)
            .map(|_| Complex::new(T::lit(StandardNormal.sample(rng)), T::zero()))
            .collect();
        let mut v = StateVector { sector, amps };
        v.normalize();
        Ok(v)
    }

    pub fn sector(&self) -> &HilbertSector {
        &self.sector
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex<T>> {
        self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    /// Scales to unit norm; leaves the zero vector untouched.
    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > T::zero() {
            for a in &mut self.amps {
                *a /= n;
            }
        }
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .fold(Complex::zero(), |acc, z| acc + z)
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: Complex<T>, other: &Self, beta: Complex<T>) -> Self {
        StateVector {
            sector: self.sector,
            amps: self
                .amps
                .iter()
                .zip(&other.amps)
                .map(|(a, b)| *a * alpha + *b * beta)
                .collect(),
        }
    }

    pub fn scale(&mut self, s: Complex<T>) {
        for a in &mut self.amps {
            *a *= s;
        }
    }
}
