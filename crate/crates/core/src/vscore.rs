//! The V-score `N Var E / (E - E_inf)^2`, the energy relative error, the
//! bounds relating the two, and the slope-one log-log fit between them.

use crate::scalar::Real;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum VScoreError {
    #[error("energy equals the zero point E_inf")]
    DegenerateZeroPoint,
    #[error("denominator vanishes")]
    DegenerateDenominator,
    #[error("negative variance {0}")]
    NegativeVariance(f64),
    #[error("fit needs at least 2 points, got {0}")]
    InsufficientPoints(usize),
    #[error("point {index} is not strictly positive")]
    NonPositivePoint { index: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VScoreInput<T> {
    pub energy: T,
    pub variance: T,
    /// Spins for spin models, `N_f` for t-V, `N_up + N_down` for Hubbard.
    pub n_dof: usize,
    pub e_infty: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundContext<T> {
    pub e0: T,
    pub e_max: T,
    /// Gap between the ground-state subspace and the rest of the spectrum.
    pub delta: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitResult<T> {
    /// Intercept of `log10(rel_err) = log10(v_score) + c`.
    pub c: T,
    pub residual_rms: T,
    pub n_points: usize,
    /// Least-squares slope with a free intercept; diagnostic only.
    pub free_slope: Option<T>,
}

pub fn v_score<T: Real>(input: &VScoreInput<T>) -> Result<T, VScoreError> {
    if input.variance < T::zero() {
        return Err(VScoreError::NegativeVariance(input.variance.to_f64_lossy()));
    }
    let gap = input.energy - input.e_infty;
    if gap == T::zero() {
        return Err(VScoreError::DegenerateZeroPoint);
    }
    Ok(T::from_count(input.n_dof) * input.variance / (gap * gap))
}

/// `(E - E_0) / (E_inf - E_0)`.
pub fn relative_error<T: Real>(energy: T, e0: T, e_infty: T) -> Result<T, VScoreError> {
    let span = e_infty - e0;
    if span == T::zero() {
        return Err(VScoreError::DegenerateDenominator);
    }
    Ok((energy - e0) / span)
}

/// Largest possible `v_score / relative_error` at energy `E`:
/// `N (E_inf - E_0)(E_M - E) / (E_inf - E)^2`.
pub fn bound_ratio_max<T: Real>(input: &VScoreInput<T>, ctx: &BoundContext<T>) -> Result<T, VScoreError> {
    let gap = input.e_infty - input.energy;
    if gap == T::zero() || input.e_infty == ctx.e0 {
        return Err(VScoreError::DegenerateDenominator);
    }
    Ok(T::from_count(input.n_dof) * (input.e_infty - ctx.e0) * (ctx.e_max - input.energy) / (gap * gap))
}

/// Vanishing-infidelity limit of `v_score / relative_error` for states whose
/// excited weight sits on the first excited level: `N Delta / (E_inf - E_0)`.
pub fn infidelity_limit_ratio<T: Real>(n_dof: usize, delta: T, e0: T, e_infty: T) -> Result<T, VScoreError> {
    let span = e_infty - e0;
    if span == T::zero() || !(delta > T::zero()) {
        return Err(VScoreError::DegenerateDenominator);
    }
    Ok(T::from_count(n_dof) * delta / span)
}

/// Fit `log10(rel_err) = log10(v_score) + c` with the slope pinned at one.
pub fn fit_intercept<T: Real>(points: &[(T, T)]) -> Result<FitResult<T>, VScoreError> {
    if points.len() < 2 {
        return Err(VScoreError::InsufficientPoints(points.len()));
    }
    for (index, &(v, r)) in points.iter().enumerate() {
        if !(v > T::zero() && r > T::zero()) || !v.is_finite() || !r.is_finite() {
            return Err(VScoreError::NonPositivePoint { index });
        }
    }
    let n = T::from_count(points.len());
    let xs: Vec<T> = points.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<T> = points.iter().map(|p| p.1.log10()).collect();
    let c = xs.iter().zip(&ys).map(|(&x, &y)| y - x).sum::<T>() / n;
    let residual_rms = (xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| {
            let d = y - x - c;
            d * d
        })
        .sum::<T>()
        / n)
        .sqrt();

    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let sxx: T = xs.iter().map(|&x| (x - mx) * (x - mx)).sum();
    let sxy: T = xs.iter().zip(&ys).map(|(&x, &y)| (x - mx) * (y - my)).sum();
    let free_slope = (sxx > T::zero()).then(|| sxy / sxx);

    Ok(FitResult {
        c,
        residual_rms,
        n_points: points.len(),
        free_slope,
    })
}
