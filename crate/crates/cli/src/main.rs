//! Command-line front end: scenario runner and report emitter.
//!
//! Exit codes: 0 = consistent/feasible/computed, 1 = violation detected,
//! 2 = input or parse error, 3 = numeric failure. Reports are
//! self-describing JSON (see `report`); identical configuration and seed
//! reproduce byte-identical files.

mod report;

use clap::{Parser, Subcommand};
use report::{alpha_table, monotone_report_value, Envelope};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thermocoh::divergences::{
    free_coherence, free_energy, free_energy_split, renyi_divergence, AlphaGrid,
};
use thermocoh::error::Error;
use thermocoh::io;
use thermocoh::purity::{embedding_isometry_check, rationalize_gibbs, trumping_necessary_check};
use thermocoh::states::{coherent_thermal_state, gibbs_state, Hamiltonian};
use thermocoh::tensorpower::{bound_report, locking_ratio, PureQubit};
use thermocoh::thermalops::{
    activation_demo, counterexample_search, equilibrium_work_bound, monotone_report,
    second_law_sweep, work_locking_sweep, SweepConfig, Verdict, DEFAULT_EPSILON_GRID,
};
use thermocoh::tol;

#[derive(Parser)]
#[command(
    name = "thermocoh",
    version,
    about = "Generalized free energies, free coherences and thermal-operation checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rényi divergences S_α(ρ‖σ) over the α grid
    Divergence {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Generalized free energies F_α(ρ) against the Gibbs state of H
    FreeEnergy {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Free coherences A_α(ρ) = S_α(ρ‖D_H(ρ))
    Coherence {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Split F = F_c + kT·A and certify the identity
    Split {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Monotone report for a candidate transformation ρ → σ
    CheckTransform {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Monte-Carlo second-law sweep over sampled thermal operations
    Simulate {
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Number of sampled channels
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Random input states per channel
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long, default_value_t = 4)]
        bath_dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Work-locking sweep: distributions from ρ and D(ρ) must coincide
    WorkLock {
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        /// System state; defaults to the coherent thermal state
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        /// Work-bit gap
        #[arg(long, default_value_t = 1.0)]
        w: f64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 4)]
        bath_dim: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Coherence activation of two coherent thermal states
    Activate {
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        #[arg(long)]
        hamiltonian2: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Search for a transformation passing every ΔF_α ≤ 0 yet raising A_α
    Counterexample {
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
        /// Comma-separated mixing weights to scan
        #[arg(long)]
        epsilon_grid: Option<String>,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// A_α(ρ^⊗n) table for a pure qubit with the ln(n+1) bound
    TensorPower {
        /// Excited-level population
        #[arg(long, default_value_t = 0.5)]
        p: f64,
        /// Comma-separated copy counts
        #[arg(long)]
        n: String,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// ln(n+1)/(n ln 2), the temperature-independent locking ratio
    LockingRatio {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Embed a distribution through Γ_d and certify the divergence duality
    Embed {
        /// Probability vector p ({"p": [..]})
        #[arg(long)]
        state: PathBuf,
        /// Gibbs distribution to rationalize
        #[arg(long)]
        gamma: PathBuf,
        #[arg(long, default_value_t = 1000)]
        max_denominator: usize,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Grid-sampled necessary conditions for trumping p into p'
    TrumpCheck {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long)]
        gamma: PathBuf,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
    /// Equilibrium-to-equilibrium work bound on the clock + work register
    EquilibriumBound {
        #[arg(long)]
        hamiltonian: PathBuf,
        #[arg(long)]
        hamiltonian2: PathBuf,
        #[arg(long)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        w: f64,
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value = "json")]
        format: String,
    },
}

fn tolerance_from_env() -> Result<f64, Error> {
    match std::env::var("THERMOCOH_TOL") {
        Err(_) => Ok(tol::VERDICT),
        Ok(raw) => {
            let value: f64 = raw.parse().map_err(|_| {
                Error::InvalidInput(format!("THERMOCOH_TOL = '{raw}' is not a number"))
            })?;
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "THERMOCOH_TOL must be positive and finite, got {value}"
                )));
            }
            Ok(value)
        }
    }
}

fn parse_grid(alphas: &Option<String>) -> Result<AlphaGrid, Error> {
    match alphas {
        None => Ok(AlphaGrid::default()),
        Some(spec) => AlphaGrid::parse(spec),
    }
}

fn require_json_format(format: &str) -> Result<(), Error> {
    match format {
        "json" => Ok(()),
        "csv" => Err(Error::InvalidInput(
            "csv output is only available for tensor-power".into(),
        )),
        other => Err(Error::InvalidInput(format!("unknown format '{other}'"))),
    }
}

fn default_qubit() -> Hamiltonian {
    Hamiltonian::from_energies(&[0.0, 1.0]).expect("qubit hamiltonian")
}

fn load_hamiltonian_or_qubit(path: &Option<PathBuf>) -> Result<Hamiltonian, Error> {
    match path {
        Some(p) => io::load_hamiltonian(p),
        None => Ok(default_qubit()),
    }
}

fn write_report(out: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(out, text)?;
    Ok(())
}

fn out_path(out: Option<PathBuf>, command: &str) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from(format!("thermocoh-{command}-report.json")))
}

fn parse_usize_list(spec: &str) -> Result<Vec<usize>, Error> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("bad integer '{s}'")))
        })
        .collect()
}

fn parse_f64_list(spec: &str) -> Result<Vec<f64>, Error> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidInput(format!("bad number '{s}'")))
        })
        .collect()
}

fn run(cli: Cli) -> Result<u8, Error> {
    let tolerance = tolerance_from_env()?;
    match cli.command {
        Command::Divergence {
            state,
            sigma,
            alphas,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let grid = parse_grid(&alphas)?;
            let rho = io::load_density(&state)?;
            let sig = io::load_density(&sigma)?;
            let mut entries = Vec::new();
            for alpha in grid.iter() {
                entries.push((alpha, renyi_divergence(&rho, &sig, alpha)?));
            }
            let mut envelope = Envelope::new("divergence", tolerance).with_grid(&grid);
            envelope.inputs = json!({"state": state, "sigma": sigma});
            envelope.result = json!({"divergences_nats": alpha_table(&entries)});
            envelope.verdict = "COMPUTED".into();
            let path = out_path(out, "divergence");
            write_report(&path, &envelope.to_json())?;
            println!(
                "divergence: COMPUTED ({} alphas) -> {}",
                grid.len(),
                path.display()
            );
            Ok(0)
        }
        Command::FreeEnergy {
            state,
            hamiltonian,
            beta,
            alphas,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let grid = parse_grid(&alphas)?;
            let rho = io::load_density(&state)?;
            let h = io::load_hamiltonian(&hamiltonian)?;
            let thermal = gibbs_state(&h, beta)?;
            let mut entries = Vec::new();
            for alpha in grid.iter() {
                entries.push((alpha, free_energy(&rho, &thermal, alpha)?));
            }
            let mut envelope = Envelope::new("free-energy", tolerance).with_grid(&grid);
            envelope.inputs = json!({
                "state": state,
                "hamiltonian": hamiltonian,
                "beta": beta,
                "log_partition": thermal.log_partition(),
            });
            envelope.result = json!({"free_energies": alpha_table(&entries)});
            envelope.verdict = "COMPUTED".into();
            let path = out_path(out, "free-energy");
            write_report(&path, &envelope.to_json())?;
            println!(
                "free-energy: COMPUTED ({} alphas) -> {}",
                grid.len(),
                path.display()
            );
            Ok(0)
        }
        Command::Coherence {
            state,
            hamiltonian,
            alphas,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let grid = parse_grid(&alphas)?;
            let rho = io::load_density(&state)?;
            let h = io::load_hamiltonian(&hamiltonian)?;
            let mut entries = Vec::new();
            for alpha in grid.iter() {
                entries.push((alpha, free_coherence(&rho, &h, alpha)?));
            }
            let mut envelope = Envelope::new("coherence", tolerance).with_grid(&grid);
            envelope.inputs = json!({"state": state, "hamiltonian": hamiltonian});
            envelope.result = json!({"free_coherences_nats": alpha_table(&entries)});
            envelope.verdict = "COMPUTED".into();
            let path = out_path(out, "coherence");
            write_report(&path, &envelope.to_json())?;
            println!(
                "coherence: COMPUTED ({} alphas) -> {}",
                grid.len(),
                path.display()
            );
            Ok(0)
        }
        Command::Split {
            state,
            hamiltonian,
            beta,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let rho = io::load_density(&state)?;
            let h = io::load_hamiltonian(&hamiltonian)?;
            let thermal = gibbs_state(&h, beta)?;
            let split = free_energy_split(&rho, &thermal)?;
            let ok = split.identity_holds();
            let mut envelope = Envelope::new("split", tolerance);
            envelope.inputs = json!({"state": state, "hamiltonian": hamiltonian, "beta": beta});
            envelope.result = json!({
                "free_energy": split.free_energy,
                "classical": split.classical,
                "kt_times_coherence": split.kt_times_coherence,
                "residual": split.residual,
                "residual_tolerance": tol::SPLIT_RESIDUAL,
            });
            envelope.verdict = if ok {
                "SPLIT_OK"
            } else {
                "SPLIT_RESIDUAL_EXCEEDED"
            }
            .into();
            let path = out_path(out, "split");
            write_report(&path, &envelope.to_json())?;
            println!(
                "split: {} F = {:.6}, F_c = {:.6}, kT·A = {:.6}, residual {:.3e} -> {}",
                envelope.verdict,
                split.free_energy,
                split.classical,
                split.kt_times_coherence,
                split.residual,
                path.display()
            );
            Ok(if ok { 0 } else { 3 })
        }
        Command::CheckTransform {
            state,
            sigma,
            hamiltonian,
            beta,
            alphas,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let grid = parse_grid(&alphas)?;
            let rho = io::load_density(&state)?;
            let sig = io::load_density(&sigma)?;
            let h = io::load_hamiltonian(&hamiltonian)?;
            let thermal = gibbs_state(&h, beta)?;
            let report = monotone_report(&rho, &sig, &thermal, &grid, tolerance)?;
            let verdict = report.verdict;
            let mut envelope = Envelope::new("check-transform", tolerance).with_grid(&grid);
            envelope.inputs = json!({
                "state": state,
                "sigma": sigma,
                "hamiltonian": hamiltonian,
                "beta": beta,
            });
            envelope.result = monotone_report_value(&report);
            envelope.verdict = verdict.to_string();
            let path = out_path(out, "check-transform");
            write_report(&path, &envelope.to_json())?;
            println!("check-transform: {verdict} -> {}", path.display());
            Ok(if verdict == Verdict::Consistent { 0 } else { 1 })
        }
        Command::Simulate {
            hamiltonian,
            beta,
            trials,
            states,
            bath_dim,
            seed,
            alphas,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let grid = parse_grid(&alphas)?;
            let h = load_hamiltonian_or_qubit(&hamiltonian)?;
            let mut cfg = SweepConfig::new(h, beta);
            cfg.channels = trials;
            cfg.states_per_channel = states;
            cfg.bath_dims = vec![bath_dim];
            cfg.seed = seed;
            cfg.grid = grid.clone();
            cfg.tolerance = tolerance;
            let summary = second_law_sweep(&cfg)?;
            let ok = summary.all_consistent
                && summary.max_gibbs_defect < tolerance
                && summary.max_covariance_defect < tolerance
                && summary.max_commutation_defect < tolerance;
            let mut envelope = Envelope::new("simulate", tolerance).with_grid(&grid);
            envelope.seed = Some(seed);
            envelope.inputs = json!({
                "hamiltonian": hamiltonian,
                "beta": beta,
                "channels": trials,
                "states_per_channel": states,
                "bath_dim": bath_dim,
            });
            envelope.result = json!({
                "max_gibbs_defect": summary.max_gibbs_defect,
                "max_covariance_defect": summary.max_covariance_defect,
                "max_commutation_defect": summary.max_commutation_defect,
                "max_delta_f": summary.max_delta_f,
                "max_delta_a": summary.max_delta_a,
                "violations": summary.violations,
            });
            envelope.verdict = if ok { "CONSISTENT" } else { "VIOLATION" }.into();
            let path = out_path(out, "simulate");
            write_report(&path, &envelope.to_json())?;
            println!(
                "simulate: {} over {} channels x {} states (max dF {:.2e}, max dA {:.2e}) -> {}",
                envelope.verdict,
                trials,
                states,
                summary.max_delta_f,
                summary.max_delta_a,
                path.display()
            );
            Ok(if ok { 0 } else { 1 })
        }
        Command::WorkLock {
            hamiltonian,
            state,
            beta,
            w,
            trials,
            bath_dim,
            seed,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let h = load_hamiltonian_or_qubit(&hamiltonian)?;
            let rho = match &state {
                Some(p) => io::load_density(p)?,
                None => coherent_thermal_state(&h, beta)?.state,
            };
            let sweep = work_locking_sweep(&h, &rho, w, beta, bath_dim, trials, seed)?;
            let ok = sweep.max_locking_tv < tolerance;
            let mut envelope = Envelope::new("work-lock", tolerance);
            envelope.seed = Some(seed);
            envelope.inputs = json!({
                "hamiltonian": hamiltonian,
                "state": state,
                "beta": beta,
                "w": w,
                "channels": trials,
                "bath_dim": bath_dim,
            });
            envelope.result = json!({
                "max_locking_tv": sweep.max_locking_tv,
                "control_max_tv": sweep.control_max_tv,
            });
            envelope.verdict = if ok { "LOCKED" } else { "LOCKING_VIOLATION" }.into();
            let path = out_path(out, "work-lock");
            write_report(&path, &envelope.to_json())?;
            println!(
                "work-lock: {} (thermal max TV {:.3e}, control max TV {:.3}) -> {}",
                envelope.verdict,
                sweep.max_locking_tv,
                sweep.control_max_tv,
                path.display()
            );
            Ok(if ok { 0 } else { 1 })
        }
        Command::Activate {
            hamiltonian,
            hamiltonian2,
            beta,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let h1 = load_hamiltonian_or_qubit(&hamiltonian)?;
            let h2 = match &hamiltonian2 {
                Some(p) => io::load_hamiltonian(p)?,
                None => h1.clone(),
            };
            let demo = activation_demo(&h1, &h2, beta)?;
            let activated = demo.activated_free_energy > tolerance
                && demo.joint_dephased_vs_gibbs_norm > tolerance;
            let mut envelope = Envelope::new("activate", tolerance);
            envelope.inputs = json!({
                "hamiltonian": hamiltonian,
                "hamiltonian2": hamiltonian2,
                "beta": beta,
            });
            envelope.result = json!({
                "factor_classical_surplus": demo.factor_classical_surplus,
                "joint_dephased_vs_gibbs_norm": demo.joint_dephased_vs_gibbs_norm,
                "activated_free_energy": demo.activated_free_energy,
            });
            envelope.verdict = if activated {
                "ACTIVATED"
            } else {
                "NO_ACTIVATION"
            }
            .into();
            let path = out_path(out, "activate");
            write_report(&path, &envelope.to_json())?;
            println!(
                "activate: {} (joint distance {:.4}, activated F {:.4}) -> {}",
                envelope.verdict,
                demo.joint_dephased_vs_gibbs_norm,
                demo.activated_free_energy,
                path.display()
            );
            Ok(0)
        }
        Command::Counterexample {
            beta,
            hamiltonian,
            epsilon_grid,
            alphas,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let grid = parse_grid(&alphas)?;
            let h = load_hamiltonian_or_qubit(&hamiltonian)?;
            let thermal = gibbs_state(&h, beta)?;
            let eps_grid = match &epsilon_grid {
                Some(spec) => parse_f64_list(spec)?,
                None => DEFAULT_EPSILON_GRID.to_vec(),
            };
            let found = counterexample_search(&thermal, &eps_grid, &grid, tolerance)?;
            let mut envelope = Envelope::new("counterexample", tolerance).with_grid(&grid);
            envelope.inputs = json!({
                "hamiltonian": hamiltonian,
                "beta": beta,
                "epsilon_grid": eps_grid,
            });
            let (verdict, code, line) = match &found {
                Some(cx) => {
                    envelope.result = json!({
                        "epsilon": cx.epsilon,
                        "s_inf_sigma": cx.s_inf_sigma,
                        "s_zero_rho": cx.s_zero_rho,
                        "report": monotone_report_value(&cx.report),
                    });
                    let (_, a_bad) = cx.report.violating_alphas();
                    let named: Vec<String> = a_bad.iter().map(|a| a.to_string()).collect();
                    (
                        cx.report.verdict.to_string(),
                        1,
                        format!(
                            "counterexample: {} at epsilon {} (dA > 0 at alpha = {})",
                            cx.report.verdict,
                            cx.epsilon,
                            named.join(", ")
                        ),
                    )
                }
                None => {
                    envelope.result = json!({"epsilon": null});
                    (
                        "NO_COUNTEREXAMPLE".to_string(),
                        0,
                        "counterexample: none found on the epsilon grid".to_string(),
                    )
                }
            };
            envelope.verdict = verdict;
            let path = out_path(out, "counterexample");
            write_report(&path, &envelope.to_json())?;
            println!("{line} -> {}", path.display());
            Ok(code)
        }
        Command::TensorPower {
            p,
            n,
            alphas,
            out,
            format,
        } => {
            let grid = parse_grid(&alphas)?;
            let n_list = parse_usize_list(&n)?;
            let qubit = PureQubit::new(p, 0.0)?;
            let table = bound_report(&qubit, &n_list, &grid)?;
            let ok = table.all_within_bound;
            let path = out_path(out, "tensor-power");
            match format.as_str() {
                "csv" => {
                    write_report(&path, &table.to_csv())?;
                }
                "json" => {
                    let rows: Vec<Value> = table
                        .rows
                        .iter()
                        .map(|r| {
                            json!({
                                "n": r.n,
                                "alpha": r.alpha.to_string(),
                                "value_nats": r.value_nats,
                                "bound_nats": r.bound_nats,
                                "slack": r.slack,
                                "ratio": r.ratio,
                            })
                        })
                        .collect();
                    let mut envelope = Envelope::new("tensor-power", tolerance).with_grid(&grid);
                    envelope.inputs = json!({"p_excited": p, "n": n_list});
                    envelope.result = json!({
                        "rows": rows,
                        "all_within_bound": ok,
                    });
                    envelope.verdict = if ok { "BOUND_OK" } else { "BOUND_VIOLATION" }.into();
                    write_report(&path, &envelope.to_json())?;
                }
                other => {
                    return Err(Error::InvalidInput(format!("unknown format '{other}'")));
                }
            }
            println!(
                "tensor-power: {} ({} cells) -> {}",
                if ok { "BOUND_OK" } else { "BOUND_VIOLATION" },
                table.rows.len(),
                path.display()
            );
            Ok(if ok { 0 } else { 1 })
        }
        Command::LockingRatio { n, out, format } => {
            require_json_format(&format)?;
            let ratio = locking_ratio(n)?;
            let mut envelope = Envelope::new("locking-ratio", tolerance);
            envelope.inputs = json!({"n": n});
            envelope.result = json!({"ratio": ratio});
            envelope.verdict = "COMPUTED".into();
            let path = out_path(out, "locking-ratio");
            write_report(&path, &envelope.to_json())?;
            println!(
                "locking-ratio: {ratio:.3} ({ratio}) for n = {n} -> {}",
                path.display()
            );
            Ok(0)
        }
        Command::Embed {
            state,
            gamma,
            max_denominator,
            alphas,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let grid = parse_grid(&alphas)?;
            let p = io::load_prob_vector(&state)?;
            let g = io::load_prob_vector(&gamma)?;
            let (dims, rational_error) = rationalize_gibbs(&g, max_denominator)?;
            let rational = dims.rational_gibbs();
            let embedded = thermocoh::purity::embedding_map(&p, &dims)?;
            let defect = embedding_isometry_check(&p, &rational, &dims, &grid)?;
            let ok = defect < 1e-9;
            let mut envelope = Envelope::new("embed", tolerance).with_grid(&grid);
            envelope.inputs = json!({
                "state": state,
                "gamma": gamma,
                "max_denominator": max_denominator,
            });
            envelope.result = json!({
                "blocks": dims.blocks(),
                "total": dims.total(),
                "rationalization_error": rational_error,
                "rational_gamma": rational.entries(),
                "embedded": embedded.entries(),
                "duality_max_defect": defect,
            });
            envelope.verdict = if ok { "DUALITY_OK" } else { "DUALITY_DEFECT" }.into();
            let path = out_path(out, "embed");
            write_report(&path, &envelope.to_json())?;
            println!(
                "embed: {} (N = {}, rationalization error {:.2e}, duality defect {:.2e}) -> {}",
                envelope.verdict,
                dims.total(),
                rational_error,
                defect,
                path.display()
            );
            Ok(if ok { 0 } else { 1 })
        }
        Command::TrumpCheck {
            state,
            sigma,
            gamma,
            alphas,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let grid = parse_grid(&alphas)?;
            let p = io::load_prob_vector(&state)?;
            let p_prime = io::load_prob_vector(&sigma)?;
            let g = io::load_prob_vector(&gamma)?;
            let verdict = trumping_necessary_check(&p, &p_prime, &g, &grid)?;
            let per_alpha: Vec<Value> = verdict
                .per_alpha
                .iter()
                .map(|(a, slack)| json!({"alpha": a.to_string(), "slack": slack}))
                .collect();
            let mut envelope = Envelope::new("trump-check", tolerance).with_grid(&grid);
            envelope.inputs = json!({"state": state, "sigma": sigma, "gamma": gamma});
            envelope.result = json!({
                "pass": verdict.pass,
                "per_alpha": per_alpha,
                "scope": verdict.scope,
            });
            envelope.verdict = if verdict.pass { "PASS" } else { "FAIL" }.into();
            let path = out_path(out, "trump-check");
            write_report(&path, &envelope.to_json())?;
            println!(
                "trump-check: {} ({}) -> {}",
                envelope.verdict,
                verdict.scope,
                path.display()
            );
            Ok(if verdict.pass { 0 } else { 1 })
        }
        Command::EquilibriumBound {
            hamiltonian,
            hamiltonian2,
            beta,
            w,
            alphas,
            out,
            format,
        } => {
            require_json_format(&format)?;
            let grid = parse_grid(&alphas)?;
            let h1 = io::load_hamiltonian(&hamiltonian)?;
            let h2 = io::load_hamiltonian(&hamiltonian2)?;
            let t1 = gibbs_state(&h1, beta)?;
            let t2 = gibbs_state(&h2, beta)?;
            let bound = equilibrium_work_bound(&t1, &t2, w, &grid)?;
            let thresholds: Vec<Value> = bound
                .thresholds
                .iter()
                .map(|(a, t)| json!({"alpha": a.to_string(), "threshold": t}))
                .collect();
            let mut envelope = Envelope::new("equilibrium-bound", tolerance).with_grid(&grid);
            envelope.inputs = json!({
                "hamiltonian": hamiltonian,
                "hamiltonian2": hamiltonian2,
                "beta": beta,
                "w": w,
            });
            envelope.result = json!({
                "thresholds": thresholds,
                "collapse_defect": bound.collapse_defect,
                "closed_form_bound": bound.closed_form_bound,
                "threshold_vs_closed_form": bound.threshold_vs_closed_form,
                "feasible": bound.feasible,
            });
            envelope.verdict = if bound.feasible {
                "FEASIBLE"
            } else {
                "INFEASIBLE"
            }
            .into();
            let path = out_path(out, "equilibrium-bound");
            write_report(&path, &envelope.to_json())?;
            println!(
                "equilibrium-bound: {} (w = {}, bound = {:.6}) -> {}",
                envelope.verdict,
                w,
                bound.closed_form_bound,
                path.display()
            );
            Ok(if bound.feasible { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_input() { 2 } else { 3 })
        }
    }
}
