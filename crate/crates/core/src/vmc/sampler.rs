use std::str::FromStr;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{Ansatz, VmcError};
use crate::hamiltonian::{HamiltonianSpec, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    /// Flip one uniformly chosen spin.
    SingleFlip,
    /// Swap the spins on a uniformly chosen bond; aligned bonds give a null move.
    Exchange,
}

impl MoveKind {
    pub fn name(self) -> &'static str {
        match self {
            MoveKind::SingleFlip => "single_flip",
            MoveKind::Exchange => "exchange",
        }
    }
}

impl FromStr for MoveKind {
    type Err = VmcError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single_flip" => Ok(MoveKind::SingleFlip),
            "exchange" => Ok(MoveKind::Exchange),
            _ => Err(VmcError::InvalidConfig("move kind must be single_flip or exchange")),
        }
    }
}

/// Burn-in and sample counts are measured in sweeps of `n_sites` proposals;
/// one configuration is recorded per sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig {
    pub n_chains: usize,
    pub n_samples: usize,
    pub n_burnin: usize,
    pub move_kind: MoveKind,
    pub seed: u64,
    /// Common starting configuration; random (at zero magnetization for
    /// exchange moves) when absent.
    pub initial_state: Option<u64>,
}

impl SamplerConfig {
    pub fn new(n_chains: usize, n_samples: usize, n_burnin: usize, move_kind: MoveKind, seed: u64) -> Self {
        SamplerConfig {
            n_chains,
            n_samples,
            n_burnin,
            move_kind,
            seed,
            initial_state: None,
        }
    }

    pub fn total_samples(&self) -> usize {
        self.n_chains * self.n_samples
    }
}

/// Configurations stored chain-major: chain `c` owns
/// `configs[c * samples_per_chain .. (c + 1) * samples_per_chain]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub configs: Vec<u64>,
    pub n_chains: usize,
    pub samples_per_chain: usize,
    pub acceptance_rate: f64,
}

/// The move kind each spin model needs for ergodicity in its sector.
pub fn required_move(spec: &HamiltonianSpec<f64>) -> Result<MoveKind, VmcError> {
    match spec.model() {
        Model::Tfim { .. } => Ok(MoveKind::SingleFlip),
        Model::Heisenberg { .. } | Model::J1J2 { .. } => Ok(MoveKind::Exchange),
        m => Err(VmcError::UnsupportedModel(m.name())),
    }
}

pub(crate) fn check_compatible<A: Ansatz + ?Sized>(
    ansatz: &A,
    spec: &HamiltonianSpec<f64>,
    kind: MoveKind,
) -> Result<(), VmcError> {
    let needed = required_move(spec)?;
    if needed != kind {
        return Err(VmcError::IncompatibleMove {
            model: spec.model().name(),
            kind: kind.name(),
        });
    }
    if ansatz.n_sites() != spec.n_sites() {
        return Err(VmcError::SizeMismatch {
            ansatz: ansatz.n_sites(),
            spec: spec.n_sites(),
        });
    }
    Ok(())
}

/// A single Metropolis walker targeting `|psi|^2`.
pub struct MarkovChain<'a, A: ?Sized> {
    ansatz: &'a A,
    n_sites: usize,
    kind: MoveKind,
    bonds: &'a [(usize, usize)],
    state: u64,
    log_amp: Complex64,
    proposed: u64,
    accepted: u64,
}

impl<'a, A: Ansatz + ?Sized> MarkovChain<'a, A> {
    /// Exchange moves draw from `bonds`, which must be nonempty for them.
    pub fn new(ansatz: &'a A, kind: MoveKind, bonds: &'a [(usize, usize)], state: u64) -> Self {
        MarkovChain {
            ansatz,
            n_sites: ansatz.n_sites(),
            kind,
            bonds,
            state,
            log_amp: ansatz.log_amplitude(state),
            proposed: 0,
            accepted: 0,
        }
    }

    pub fn state(&self) -> u64 {
        self.state
    }

    /// One proposal; returns whether the state changed.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let proposal = match self.kind {
            MoveKind::SingleFlip => self.state ^ (1u64 << rng.random_range(0..self.n_sites)),
            MoveKind::Exchange => {
                let (a, b) = self.bonds[rng.random_range(0..self.bonds.len())];
                if ((self.state >> a) ^ (self.state >> b)) & 1 == 0 {
                    return false;
                }
                self.state ^ ((1u64 << a) | (1u64 << b))
            }
        };
        self.proposed += 1;
        let new_log = self.ansatz.log_amplitude(proposal);
        let u: f64 = rng.random();
        let accept = new_log.re > self.log_amp.re || u < (2.0 * (new_log.re - self.log_amp.re)).exp();
        if accept {
            self.state = proposal;
            self.log_amp = new_log;
            self.accepted += 1;
        }
        accept
    }

    pub fn sweep<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for _ in 0..self.n_sites {
            self.step(rng);
        }
    }

    /// `(accepted, proposed)`, with null exchange moves excluded.
    pub fn counts(&self) -> (u64, u64) {
        (self.accepted, self.proposed)
    }
}

pub(crate) fn exchange_bonds(spec: &HamiltonianSpec<f64>) -> Vec<(usize, usize)> {
    let lat = spec.lattice();
    let mut bonds: Vec<(usize, usize)> = lat.nn_bonds().iter().map(|b| (b.a, b.b)).collect();
    if matches!(spec.model(), Model::J1J2 { .. }) {
        bonds.extend(lat.nnn_bonds().iter().map(|b| (b.a, b.b)));
    }
    bonds
}

/// Persistent set of chains; successive calls continue from the last states.
#[derive(Debug, Clone)]
pub struct Sampler {
    cfg: SamplerConfig,
    bonds: Vec<(usize, usize)>,
    states: Vec<u64>,
    calls: u64,
}

impl Sampler {
    pub fn new<A: Ansatz + ?Sized>(
        ansatz: &A,
        spec: &HamiltonianSpec<f64>,
        cfg: SamplerConfig,
    ) -> Result<Self, VmcError> {
        check_compatible(ansatz, spec, cfg.move_kind)?;
        if cfg.n_chains == 0 || cfg.n_samples == 0 {
            return Err(VmcError::InvalidConfig("sampler needs at least one chain and one sample"));
        }
        let n = spec.n_sites();
        let bonds = exchange_bonds(spec);
        if cfg.move_kind == MoveKind::Exchange && bonds.is_empty() {
            return Err(VmcError::InvalidConfig("exchange moves need at least one bond"));
        }
        let states = (0..cfg.n_chains)
            .map(|c| {
                if let Some(x) = cfg.initial_state {
                    return x;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x1a17_c0de);
                rng.set_stream(c as u64);
                match cfg.move_kind {
                    MoveKind::SingleFlip => rng.random::<u64>() & ((1u64 << n) - 1),
                    MoveKind::Exchange => {
                        let mut sites: Vec<usize> = (0..n).collect();
                        sites.shuffle(&mut rng);
                        sites[..n / 2].iter().fold(0u64, |x, &s| x | (1 << s))
                    }
                }
            })
            .collect();
        Ok(Sampler {
            cfg,
            bonds,
            states,
            calls: 0,
        })
    }

    pub fn config(&self) -> &SamplerConfig {
        &self.cfg
    }

    pub fn set_samples_per_chain(&mut self, n_samples: usize) {
        self.cfg.n_samples = n_samples.max(1);
    }

    /// Runs every chain for `burnin` sweeps, then records one state per sweep.
    pub fn sample<A: Ansatz + ?Sized>(&mut self, ansatz: &A, burnin: usize) -> SampleSet {
        let call = self.calls;
        self.calls += 1;
        let cfg = self.cfg;
        let bonds = &self.bonds;
        let runs: Vec<(Vec<u64>, u64, u64, u64)> = self
            .states
            .par_iter()
            .enumerate()
            .map(|(c, &start)| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(call * cfg.n_chains as u64 + c as u64);
                let mut chain = MarkovChain::new(ansatz, cfg.move_kind, bonds, start);
                for _ in 0..burnin {
                    chain.sweep(&mut rng);
                }
                let before = chain.counts();
                let mut out = Vec::with_capacity(cfg.n_samples);
                for _ in 0..cfg.n_samples {
                    chain.sweep(&mut rng);
                    out.push(chain.state());
                }
                let after = chain.counts();
                (out, after.0 - before.0, after.1 - before.1, chain.state())
            })
            .collect();
        let mut configs = Vec::with_capacity(cfg.total_samples());
        let (mut acc, mut prop) = (0u64, 0u64);
        for (c, (samples, a, p, last)) in runs.into_iter().enumerate() {
            configs.extend(samples);
            acc += a;
            prop += p;
            self.states[c] = last;
        }
        SampleSet {
            configs,
            n_chains: cfg.n_chains,
            samples_per_chain: cfg.n_samples,
            acceptance_rate: if prop == 0 { 0.0 } else { acc as f64 / prop as f64 },
        }
    }
}

/// Draws `n_chains * n_samples` configurations distributed as `|psi|^2`.
pub fn metropolis_sample<A: Ansatz + ?Sized>(
    ansatz: &A,
    spec: &HamiltonianSpec<f64>,
    cfg: &SamplerConfig,
) -> Result<SampleSet, VmcError> {
    let mut sampler = Sampler::new(ansatz, spec, *cfg)?;
    Ok(sampler.sample(ansatz, cfg.n_burnin))
}
