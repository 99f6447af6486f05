//! `qbench`: build lattice Hamiltonians, solve them exactly or variationally,
//! and score, fit and rank the resulting benchmark records.

mod failure;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qbench::bench::suite::{run_suite, SuiteConfig};
use qbench::bench::{append_records, fit_dataset, rank, read_records, write_records, BenchError, BenchRecord};
use qbench::einfty::{einfty_analytic, einfty_sampled};
use qbench::exact::{lanczos_ground, LanczosConfig};
use qbench::vmc::{
    optimize, required_move, sign_rule_mask, Ansatz, Jastrow, MarshallSign, Optimizer, Rbm, SamplerConfig, Schedule,
    VariationalResult,
};
use qbench::vqe::{optimize_vqe, CircuitAnsatzKind, GradientMethod, VqeConfig};
use qbench::vscore::{relative_error, v_score};
use qbench::{HamiltonianSpec, VScoreInput};

use failure::Failure;

#[derive(Parser, Debug)]
#[command(name = "qbench", version, about = "V-score benchmarking of variational ground-state methods")]
struct Cli {
    /// Line-delimited JSON record file.
    #[arg(long, global = true, default_value = "records.jsonl")]
    records: PathBuf,
    #[arg(long, global = true, default_value_t = 2024)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the canonical descriptor and sector dimension.
    Build { hamiltonian: String },
    /// Lanczos ground state; appends an `ed` record.
    Ed { hamiltonian: String },
    /// Zero-point energy, analytic unless `--samples` is given.
    Einfty {
        hamiltonian: String,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Variational Monte Carlo; appends one record.
    Vmc(VmcArgs),
    /// Statevector VQE; appends one record.
    Vqe(VqeArgs),
    /// V-score (and relative error, given `--e0`) of an energy and variance.
    Score {
        hamiltonian: String,
        #[arg(long, allow_hyphen_values = true)]
        energy: f64,
        #[arg(long)]
        variance: f64,
        #[arg(long, allow_hyphen_values = true)]
        e0: Option<f64>,
        /// Append the scored point under this method tag.
        #[arg(long)]
        append: Option<String>,
    },
    /// Slope-one fit of relative error against V-score over the record file.
    Fit,
    /// Per-Hamiltonian winners, hardest first.
    Rank,
    /// Reference suite; replaces the record file with its output.
    Suite {
        /// Reduced sizes for a smoke run.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VmcAnsatz {
    Rbm,
    Jastrow,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum VmcOptimizer {
    Sr,
    Sgd,
}

#[derive(clap::Args, Debug)]
struct VmcArgs {
    hamiltonian: String,
    #[arg(long, value_enum, default_value = "rbm")]
    ansatz: VmcAnsatz,
    /// Hidden-unit density of the RBM.
    #[arg(long, default_value_t = 2)]
    alpha: usize,
    #[arg(long, value_enum, default_value = "sr")]
    optimizer: VmcOptimizer,
    #[arg(long, default_value_t = 1e-3)]
    diag_shift: f64,
    #[arg(long, default_value_t = 80)]
    iters: usize,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    #[arg(long, default_value_t = 16)]
    chains: usize,
    /// Samples per chain during optimization.
    #[arg(long, default_value_t = 128)]
    samples: usize,
    #[arg(long, default_value_t = 20)]
    burnin: usize,
    /// Samples per chain for the final estimate.
    #[arg(long, default_value_t = 512)]
    final_samples: usize,
    /// Drop the built-in ground-state sign rule.
    #[arg(long)]
    no_sign_rule: bool,
    /// Also store the Lanczos ground energy in the record.
    #[arg(long)]
    exact: bool,
    /// Write `iteration energy variance` lines here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct VqeArgs {
    hamiltonian: String,
    /// Circuit family: `rcx` or `hv`.
    #[arg(long, default_value = "hv")]
    ansatz: CircuitAnsatzKind,
    #[arg(long)]
    depth: usize,
    #[arg(long, default_value_t = 5)]
    seeds: usize,
    #[arg(long, default_value_t = 2000)]
    iters: usize,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    /// `adjoint`, `shift` or `fd`.
    #[arg(long, default_value = "adjoint")]
    gradient: GradientMethod,
    #[arg(long)]
    exact: bool,
    #[arg(long)]
    trace: Option<PathBuf>,
}

fn parse_spec(descriptor: &str) -> Result<HamiltonianSpec, Failure> {
    Ok(HamiltonianSpec::from_descriptor(descriptor).map_err(BenchError::from)?)
}

fn exact_energy(spec: &HamiltonianSpec, wanted: bool) -> Result<Option<f64>, Failure> {
    if !wanted {
        return Ok(None);
    }
    let sol = lanczos_ground(spec, &LanczosConfig::default()).map_err(BenchError::from)?;
    if !sol.converged {
        eprintln!("warning: Lanczos stopped at residual {:.3e}", sol.residual);
    }
    Ok(Some(sol.e0))
}

fn write_trace(path: Option<&Path>, result: &VariationalResult) -> Result<(), Failure> {
    if let Some(path) = path {
        std::fs::write(path, result.trace_text()).map_err(|e| BenchError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(())
}

fn report(record: &BenchRecord) {
    println!("energy    {:.12}", record.energy);
    println!("variance  {:.6e}", record.variance);
    println!("v_score   {:.6e}", record.v_score);
    if let Some(rel) = record.relative_error() {
        println!("rel_err   {rel:.6e}");
    }
}

fn variational_record(
    spec: &HamiltonianSpec,
    method: String,
    result: &VariationalResult,
    e0: Option<f64>,
    seed: u64,
) -> Result<BenchRecord, Failure> {
    Ok(qbench::bench::suite::variational_record(spec, method, result, e0)?.with_metadata("seed", seed))
}

fn run_vmc_with<A: Ansatz>(mut ansatz: A, spec: &HamiltonianSpec, args: &VmcArgs, seed: u64) -> Result<VariationalResult, Failure> {
    let kind = required_move(spec).map_err(BenchError::from)?;
    let cfg = SamplerConfig::new(args.chains, args.samples, args.burnin, kind, seed);
    let optimizer = match args.optimizer {
        VmcOptimizer::Sr => Optimizer::Sr {
            diag_shift: args.diag_shift,
        },
        VmcOptimizer::Sgd => Optimizer::Sgd,
    };
    let schedule = Schedule {
        iterations: args.iters,
        learning_rate: args.lr,
        final_samples: args.final_samples,
    };
    Ok(optimize(&mut ansatz, spec, optimizer, &schedule, &cfg).map_err(BenchError::from)?)
}

fn vmc(args: &VmcArgs, cli: &Cli) -> Result<(), Failure> {
    let spec = parse_spec(&args.hamiltonian)?;
    let e0 = exact_energy(&spec, args.exact)?;
    let mask = if args.no_sign_rule { 0 } else { sign_rule_mask(&spec) };
    let n = spec.n_sites();
    let (tag, result) = match args.ansatz {
        VmcAnsatz::Rbm => {
            let rbm = Rbm::random(n, args.alpha, 0.01, cli.seed).map_err(BenchError::from)?;
            (format!("rbm_a{}", args.alpha), run_vmc_with(MarshallSign::new(rbm, mask), &spec, args, cli.seed)?)
        }
        VmcAnsatz::Jastrow => {
            let jastrow = Jastrow::random(n, 0.01, cli.seed).map_err(BenchError::from)?;
            ("jastrow".to_string(), run_vmc_with(MarshallSign::new(jastrow, mask), &spec, args, cli.seed)?)
        }
    };
    write_trace(args.trace.as_deref(), &result)?;
    let optimizer = match args.optimizer {
        VmcOptimizer::Sr => "sr",
        VmcOptimizer::Sgd => "sgd",
    };
    let method = format!("vmc_{tag}_{optimizer}_it{}", result.iterations);
    let record = variational_record(&spec, method, &result, e0, cli.seed)?
        .with_metadata("energy_std_error", format!("{:.6e}", result.energy_std_error));
    report(&record);
    append_records(&[record], &cli.records)?;
    Ok(())
}

fn vqe(args: &VqeArgs, cli: &Cli) -> Result<(), Failure> {
    let spec = parse_spec(&args.hamiltonian)?;
    let e0 = exact_energy(&spec, args.exact)?;
    let cfg = VqeConfig {
        iterations: args.iters,
        learning_rate: args.lr,
        n_seeds: args.seeds,
        gradient: args.gradient,
        ..VqeConfig::default()
    };
    let kind = args.ansatz.with_depth(args.depth);
    let run = optimize_vqe(&spec, kind, &cfg, cli.seed).map_err(BenchError::from)?;
    write_trace(args.trace.as_deref(), &run.result)?;
    let record = variational_record(&spec, format!("vqe_{kind}"), &run.result, e0, cli.seed)?
        .with_metadata("seeds", args.seeds)
        .with_metadata("best_seed", run.best_seed);
    report(&record);
    append_records(&[record], &cli.records)?;
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Build { hamiltonian } => {
            let spec = parse_spec(hamiltonian)?;
            println!("{}", spec.descriptor());
            println!("sector dimension {}", spec.sector_dimension());
        }
        Command::Ed { hamiltonian } => {
            let spec = parse_spec(hamiltonian)?;
            let record = qbench::bench::suite::exact_record(&spec)?;
            report(&record);
            append_records(&[record], &cli.records)?;
        }
        Command::Einfty { hamiltonian, samples } => {
            let spec = parse_spec(hamiltonian)?;
            let estimate = match samples {
                Some(n) => einfty_sampled(&spec, *n, cli.seed),
                None => einfty_analytic(&spec),
            }
            .map_err(BenchError::from)?;
            println!("e_infty   {:.12}", estimate.value);
            if samples.is_some() {
                println!("std_error {:.3e}", estimate.std_error);
            }
        }
        Command::Vmc(args) => vmc(args, cli)?,
        Command::Vqe(args) => vqe(args, cli)?,
        Command::Score {
            hamiltonian,
            energy,
            variance,
            e0,
            append,
        } => {
            let spec = parse_spec(hamiltonian)?;
            let e_infty = einfty_analytic(&spec).map_err(BenchError::from)?.value;
            let input = VScoreInput {
                energy: *energy,
                variance: *variance,
                n_dof: spec.n_dof(),
                e_infty,
            };
            println!("v_score   {:.6e}", v_score(&input).map_err(BenchError::from)?);
            if let Some(e0) = e0 {
                let rel = relative_error(*energy, *e0, e_infty).map_err(BenchError::from)?;
                println!("rel_err   {rel:.6e}");
            }
            if let Some(method) = append {
                let record = BenchRecord::new(spec.descriptor(), method.as_str(), *energy, *variance, spec.n_dof(), e_infty, *e0)?;
                append_records(&[record], &cli.records)?;
            }
        }
        Command::Fit => {
            let fit = fit_dataset(&read_records(&cli.records)?)?;
            println!("points        {}", fit.n_points);
            println!("C             {:.4}", fit.c);
            println!("residual_rms  {:.4}", fit.residual_rms);
            if let Some(slope) = fit.free_slope {
                println!("free_slope    {slope:.4}");
            }
        }
        Command::Rank => {
            for (i, e) in rank(&read_records(&cli.records)?)?.iter().enumerate() {
                let exact = if e.has_exact { "" } else { "  (no exact energy)" };
                println!("{:>3}  {:.4e}  {}  {}  E={:.10}{exact}", i + 1, e.hamiltonian_v_score, e.hamiltonian, e.method, e.energy);
            }
        }
        Command::Suite { quick } => {
            let cfg = if *quick {
                SuiteConfig::quick(cli.seed)
            } else {
                SuiteConfig::standard(cli.seed)
            };
            let records = run_suite(&cfg, &mut |line| eprintln!("{line}"))?;
            write_records(&records, &cli.records)?;
            println!("wrote {} records to {}", records.len(), cli.records.display());
            match fit_dataset(&records) {
                Ok(fit) => println!("C = {:.4}, residual_rms = {:.4} over {} points", fit.c, fit.residual_rms, fit.n_points),
                Err(e) => println!("no fit: {e}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            failure.exit_code()
        }
    }
}
