//! Reference dataset: exact energies, imaginary-time ladders, VMC runs and
//! VQE depth scans on small spin chains, all turned into [`BenchRecord`]s.

use super::{BenchError, BenchRecord};
use crate::einfty::einfty_analytic;
use crate::exact::{full_eigensystem, imaginary_time_family_with, lanczos_ground, mean_and_variance, Eigensystem, LanczosConfig};
use crate::hamiltonian::HamiltonianSpec;
use crate::lattice::{chain, Boundary};
use crate::vmc::{
    optimize, required_move, sign_rule_mask, Ansatz, Jastrow, MarshallSign, Optimizer, Rbm, SamplerConfig, Schedule,
    VariationalResult,
};
use crate::vqe::{depth_scan, CircuitAnsatzKind, VqeConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct VmcSettings {
    /// Cumulative iteration counts at which the state is scored.
    pub checkpoints: Vec<usize>,
    pub n_chains: usize,
    pub n_samples: usize,
    pub n_burnin: usize,
    pub final_samples: usize,
    pub learning_rate: f64,
    pub diag_shift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Relative errors the imaginary-time states are tuned to.
    pub itime_targets: Vec<f64>,
    pub vmc: VmcSettings,
    pub vqe: VqeConfig,
    pub hv_depths: Vec<usize>,
    pub rcx_depths: Vec<usize>,
}

impl SuiteConfig {
    /// The reference configuration: ten imaginary-time states per model with
    /// relative errors spaced half a decade apart from `10^-0.5` down to `1e-5`.
    pub fn standard(seed: u64) -> Self {
        SuiteConfig {
            seed,
            itime_targets: (1..=10).map(|k| 10f64.powf(-0.5 * k as f64)).collect(),
            vmc: VmcSettings {
                checkpoints: vec![10, 30, 80],
                n_chains: 16,
                n_samples: 128,
                n_burnin: 20,
                final_samples: 512,
                learning_rate: 0.05,
                diag_shift: 1e-3,
            },
            vqe: VqeConfig::default(),
            hv_depths: vec![8, 12, 16, 20, 24, 26],
            rcx_depths: vec![4, 6, 8, 10, 12],
        }
    }

    /// A minutes-to-seconds reduction of [`SuiteConfig::standard`] for smoke runs.
    pub fn quick(seed: u64) -> Self {
        SuiteConfig {
            seed,
            itime_targets: vec![1e-1, 1e-2, 1e-3],
            vmc: VmcSettings {
                checkpoints: vec![3],
                n_chains: 4,
                n_samples: 32,
                n_burnin: 5,
                final_samples: 64,
                learning_rate: 0.05,
                diag_shift: 1e-3,
            },
            vqe: VqeConfig {
                iterations: 10,
                n_seeds: 2,
                ..VqeConfig::default()
            },
            hv_depths: vec![1, 2],
            rcx_depths: vec![1, 2],
        }
    }
}

/// The suite's Hamiltonians: VMC and imaginary-time targets, then the VQE target.
pub fn suite_hamiltonians() -> (Vec<HamiltonianSpec<f64>>, HamiltonianSpec<f64>) {
    let ring = |n| chain(n, Boundary::Periodic).expect("valid chain");
    let variational = vec![
        HamiltonianSpec::tfim(ring(10), 1.0, 1.0).expect("valid spec"),
        HamiltonianSpec::heisenberg(ring(10), 1.0).expect("valid spec"),
        HamiltonianSpec::j1j2(ring(8), 1.0, 0.5).expect("valid spec"),
    ];
    let open = chain(10, Boundary::Open).expect("valid chain");
    let circuit = HamiltonianSpec::tfim(open, 1.0, 1.0).expect("valid spec");
    (variational, circuit)
}

/// Lanczos ground energy as an `ed` record.
pub fn exact_record(spec: &HamiltonianSpec<f64>) -> Result<BenchRecord, BenchError> {
    let sol = lanczos_ground(spec, &LanczosConfig::default())?;
    let (energy, variance) = mean_and_variance(spec, &sol.ground_vector)?;
    let e_infty = einfty_analytic(spec)?.value;
    Ok(
        BenchRecord::new(spec.descriptor(), "ed", energy, variance, spec.n_dof(), e_infty, Some(sol.e0))?
            .with_metadata("lanczos_iterations", sol.iterations_used)
            .with_metadata("converged", sol.converged),
    )
}

/// Record of an optimized variational state.
pub fn variational_record(
    spec: &HamiltonianSpec<f64>,
    method: impl Into<String>,
    result: &VariationalResult,
    e0: Option<f64>,
) -> Result<BenchRecord, BenchError> {
    let mut r = BenchRecord::new(
        spec.descriptor(),
        method,
        result.energy_mean,
        result.energy_variance,
        spec.n_dof(),
        result.e_infty,
        e0,
    )?
    .with_metadata("iterations", result.iterations)
    .with_metadata("n_parameters", result.n_parameters);
    if result.energy_std_error > 0.0 {
        r = r.with_metadata("energy_std_error", format!("{:.6e}", result.energy_std_error));
    }
    if let Some(acc) = result.acceptance_rate {
        r = r.with_metadata("acceptance_rate", format!("{acc:.4}"));
    }
    Ok(r)
}

/// Relative error of `exp(-tau H)|psi>` from its eigenbasis weights.
fn relative_error_at(values: &[f64], weights: &[f64], e_infty: f64, tau: f64) -> f64 {
    let e0 = values[0];
    let (mut z, mut num) = (0.0, 0.0);
    for (e, w) in values.iter().zip(weights) {
        let p = w * (-2.0 * tau * (e - e0)).exp();
        z += p;
        num += p * (e - e0);
    }
    num / z / (e_infty - e0)
}

/// Imaginary times at which the family started from the seeded vector
/// reaches each target relative error; unreachable targets are dropped.
pub fn imaginary_times_for(eig: &Eigensystem<f64>, e_infty: f64, targets: &[f64], seed: u64) -> Result<Vec<f64>, BenchError> {
    let (_, start) = imaginary_time_family_with(eig, &[0.0], seed)?.remove(0);
    let weights: Vec<f64> = (0..eig.dimension()).map(|k| eig.overlap(k, &start).norm_sqr()).collect();
    let rel = |tau| relative_error_at(&eig.values, &weights, e_infty, tau);
    let mut taus = Vec::new();
    for &target in targets {
        if rel(0.0) <= target {
            continue;
        }
        let mut hi = 1.0;
        while rel(hi) > target && hi < 1e6 {
            hi *= 2.0;
        }
        if rel(hi) > target {
            continue;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if rel(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        taus.push(hi);
    }
    Ok(taus)
}

/// Imaginary-time states tuned to the target relative errors.
pub fn imaginary_time_records(
    spec: &HamiltonianSpec<f64>,
    targets: &[f64],
    seed: u64,
) -> Result<Vec<BenchRecord>, BenchError> {
    let eig = full_eigensystem(spec)?;
    let e0 = eig.values[0];
    let e_infty = einfty_analytic(spec)?.value;
    let taus = imaginary_times_for(&eig, e_infty, targets, seed)?;
    imaginary_time_family_with(&eig, &taus, seed)?
        .into_iter()
        .map(|(tau, v)| {
            let (energy, variance) = mean_and_variance(spec, &v)?;
            Ok(
                BenchRecord::new(spec.descriptor(), format!("itime_tau{tau:.4}"), energy, variance, spec.n_dof(), e_infty, Some(e0))?
                    .with_metadata("tau", format!("{tau:.17e}"))
                    .with_metadata("seed", seed),
            )
        })
        .collect()
}

fn staged_vmc<A: Ansatz>(
    spec: &HamiltonianSpec<f64>,
    mut ansatz: A,
    tag: &str,
    settings: &VmcSettings,
    seed: u64,
    e0: Option<f64>,
) -> Result<Vec<BenchRecord>, BenchError> {
    let kind = required_move(spec)?;
    let optimizer = Optimizer::Sr {
        diag_shift: settings.diag_shift,
    };
    let mut done = 0;
    let mut records = Vec::new();
    for (stage, &target) in settings.checkpoints.iter().enumerate() {
        let cfg = SamplerConfig::new(
            settings.n_chains,
            settings.n_samples,
            settings.n_burnin,
            kind,
            seed.wrapping_add(stage as u64),
        );
        let schedule = Schedule {
            iterations: target.saturating_sub(done),
            learning_rate: settings.learning_rate,
            final_samples: settings.final_samples,
        };
        let result = optimize(&mut ansatz, spec, optimizer, &schedule, &cfg)?;
        done = target.max(done);
        let method = format!("vmc_{tag}_sr_it{done}");
        records.push(
            variational_record(spec, method, &result, e0)?
                .with_metadata("seed", seed)
                .with_metadata("samples", settings.n_chains * settings.final_samples)
                .with_metadata("solve_fallbacks", result.solve_fallbacks),
        );
    }
    Ok(records)
}

/// VMC records for one spin Hamiltonian: sign-dressed RBMs, plus a sign-dressed
/// Jastrow where the sign rule is exact for a positive correlator.
pub fn vmc_records(
    spec: &HamiltonianSpec<f64>,
    settings: &VmcSettings,
    seed: u64,
    e0: Option<f64>,
) -> Result<Vec<BenchRecord>, BenchError> {
    let n = spec.n_sites();
    let mask = sign_rule_mask(spec);
    let rbm = MarshallSign::new(Rbm::random(n, 2, 0.01, seed)?, mask);
    let mut records = staged_vmc(spec, rbm, "rbm_a2", settings, seed, e0)?;
    if spec.conserves_magnetization() {
        let jastrow = MarshallSign::new(Jastrow::random(n, 0.01, seed)?, mask);
        records.extend(staged_vmc(spec, jastrow, "jastrow", settings, seed, e0)?);
    }
    Ok(records)
}

/// Depth scans of both circuit families.
pub fn vqe_records(
    spec: &HamiltonianSpec<f64>,
    cfg: &SuiteConfig,
    e0: Option<f64>,
) -> Result<Vec<BenchRecord>, BenchError> {
    let mut records = Vec::new();
    for (family, depths) in [
        (CircuitAnsatzKind::Hv { depth: 0 }, &cfg.hv_depths),
        (CircuitAnsatzKind::Rcx { depth: 0 }, &cfg.rcx_depths),
    ] {
        for run in depth_scan(spec, family, depths, &cfg.vqe, cfg.seed)? {
            records.push(
                variational_record(spec, format!("vqe_{}", run.kind), &run.result, e0)?
                    .with_metadata("seeds", cfg.vqe.n_seeds)
                    .with_metadata("best_seed", run.best_seed)
                    .with_metadata("optimizer", "adaptive_gd")
                    .with_metadata("learning_rate", cfg.vqe.learning_rate)
                    .with_metadata("seed", cfg.seed),
            );
        }
    }
    Ok(records)
}

/// Runs the whole suite, reporting progress through `log`.
pub fn run_suite(cfg: &SuiteConfig, log: &mut dyn FnMut(&str)) -> Result<Vec<BenchRecord>, BenchError> {
    let (variational, circuit) = suite_hamiltonians();
    let mut records = Vec::new();
    for spec in &variational {
        let ed = exact_record(spec)?;
        let e0 = ed.e0;
        log(&format!("{}: E0 = {:.12}", spec.descriptor(), ed.energy));
        records.push(ed);
        records.extend(imaginary_time_records(spec, &cfg.itime_targets, cfg.seed)?);
        log(&format!("{}: imaginary-time ladder done", spec.descriptor()));
        records.extend(vmc_records(spec, &cfg.vmc, cfg.seed, e0)?);
        log(&format!("{}: VMC done", spec.descriptor()));
    }
    let ed = exact_record(&circuit)?;
    let e0 = ed.e0;
    log(&format!("{}: E0 = {:.12}", circuit.descriptor(), ed.energy));
    records.push(ed);
    records.extend(vqe_records(&circuit, cfg, e0)?);
    log(&format!("{}: VQE depth scans done", circuit.descriptor()));
    Ok(records)
}
