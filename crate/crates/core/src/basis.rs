//! Hilbert-space sectors and combinadic rank/unrank of fixed-popcount bitstrings.
//!
//! Basis states are `u64` occupation strings. Spin sectors use bit `i` for
//! site `i` (1 = up). Spinless fermions use bit `i` for the occupation of
//! site `i`. Spinful fermions put the up species in bits `0..N_s` and the down
//! species in bits `N_s..2 N_s`, which is also the Jordan-Wigner mode order.

use std::sync::OnceLock;

const MAX_BITS: usize = 64;

fn pascal() -> &'static [[u64; MAX_BITS + 1]; MAX_BITS + 1] {
    static TABLE: OnceLock<Box<[[u64; MAX_BITS + 1]; MAX_BITS + 1]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Box::new([[0u64; MAX_BITS + 1]; MAX_BITS + 1]);
        for n in 0..=MAX_BITS {
            t[n][0] = 1;
            for k in 1..=n {
                t[n][k] = t[n - 1][k - 1].saturating_add(if k < n { t[n - 1][k] } else { 0 });
            }
        }
        t
    })
}

/// Binomial coefficient `B(n, k)` for `n <= 64`; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    assert!(n <= MAX_BITS, "binomial table covers n <= 64");
    if k > n {
        0
    } else {
        pascal()[n][k]
    }
}

/// Colexicographic rank of `bits` among all strings with the same popcount.
pub fn rank_combination(bits: u64) -> u64 {
    let mut rank = 0;
    let mut rest = bits;
    let mut i = 1;
    while rest != 0 {
        let p = rest.trailing_zeros() as usize;
        rank += binomial(p, i);
        rest &= rest - 1;
        i += 1;
    }
    rank
}

/// Inverse of [`rank_combination`] for strings of `n` bits with `k` ones.
pub fn unrank_combination(mut rank: u64, n: usize, k: usize) -> u64 {
    debug_assert!(rank < binomial(n, k));
    let mut bits = 0u64;
    let mut top = n;
    for i in (1..=k).rev() {
        let mut p = top - 1;
        while binomial(p, i) > rank {
            p -= 1;
        }
        bits |= 1 << p;
        rank -= binomial(p, i);
        top = p;
    }
    bits
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HilbertSector {
    /// Unconstrained spin-1/2 sites.
    Spins { n_sites: usize },
    /// Spinless fermions at fixed particle number.
    Fermions { n_sites: usize, n_particles: usize },
    /// Spin-1/2 fermions at fixed `(N_up, N_down)`.
    SpinfulFermions {
        n_sites: usize,
        n_up: usize,
        n_down: usize,
    },
}

impl HilbertSector {
    pub fn n_sites(&self) -> usize {
        match *self {
            HilbertSector::Spins { n_sites }
            | HilbertSector::Fermions { n_sites, .. }
            | HilbertSector::SpinfulFermions { n_sites, .. } => n_sites,
        }
    }

    /// Number of bits used by a basis state.
    pub fn n_modes(&self) -> usize {
        match *self {
            HilbertSector::SpinfulFermions { n_sites, .. } => 2 * n_sites,
            _ => self.n_sites(),
        }
    }

    pub fn dimension(&self) -> u64 {
        match *self {
            HilbertSector::Spins { n_sites } => 1u64 << n_sites,
            HilbertSector::Fermions {
                n_sites,
                n_particles,
            } => binomial(n_sites, n_particles),
            HilbertSector::SpinfulFermions {
                n_sites,
                n_up,
                n_down,
            } => binomial(n_sites, n_up) * binomial(n_sites, n_down),
        }
    }

    pub fn contains(&self, x: u64) -> bool {
        if x & !low_mask(self.n_modes()) != 0 {
            return false;
        }
        match *self {
            HilbertSector::Spins { .. } => true,
            HilbertSector::Fermions { n_particles, .. } => x.count_ones() as usize == n_particles,
            HilbertSector::SpinfulFermions {
                n_sites,
                n_up,
                n_down,
            } => {
                (x & low_mask(n_sites)).count_ones() as usize == n_up
                    && (x >> n_sites).count_ones() as usize == n_down
            }
        }
    }

    /// Basis state with index `k`; `k` must be below [`dimension`](Self::dimension).
    pub fn state_at(&self, k: u64) -> u64 {
        match *self {
            HilbertSector::Spins { .. } => k,
            HilbertSector::Fermions {
                n_sites,
                n_particles,
            } => unrank_combination(k, n_sites, n_particles),
            HilbertSector::SpinfulFermions {
                n_sites,
                n_up,
                n_down,
            } => {
                let dim_down = binomial(n_sites, n_down);
                let up = unrank_combination(k / dim_down, n_sites, n_up);
                let down = unrank_combination(k % dim_down, n_sites, n_down);
                up | (down << n_sites)
            }
        }
    }

    /// Index of `x`, or `None` if `x` lies outside the sector.
    pub fn index_of(&self, x: u64) -> Option<u64> {
        if !self.contains(x) {
            return None;
        }
        Some(self.index_of_unchecked(x))
    }

    pub(crate) fn index_of_unchecked(&self, x: u64) -> u64 {
        match *self {
            HilbertSector::Spins { .. } => x,
            HilbertSector::Fermions { .. } => rank_combination(x),
            HilbertSector::SpinfulFermions {
                n_sites, n_down, ..
            } => {
                let up = rank_combination(x & low_mask(n_sites));
                let down = rank_combination(x >> n_sites);
                up * binomial(n_sites, n_down) + down
            }
        }
    }

    pub fn states(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.dimension()).map(move |k| self.state_at(k))
    }
}
