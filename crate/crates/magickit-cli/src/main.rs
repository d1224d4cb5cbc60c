//! Command-line surface for the magickit library.
//!
//! Results go to standard output (JSON by default, `--text` for aligned
//! key/value lines); diagnostics and run logs go to standard error. Exit
//! codes: 0 success, 1 domain failure (infeasible or invalid input, with any
//! certificate in the payload), 2 usage error, 3 numerical failure.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use magickit::bounds;
use magickit::channels::{is_cspo, ChoiOperator};
use magickit::error::MagicError;
use magickit::interconvert;
use magickit::io::{self, round_sig, JsonChannel, JsonCircuit, JsonState, JsonSuperchannel};
use magickit::monotones;
use magickit::numerics::matrix::ComplexMatrix;
use magickit::simulate::{self, SimulationConfig};
use magickit::stabilizer::{self, StabilizerSet};

#[derive(Parser)]
#[command(
    name = "magickit",
    about = "Magic monotones, qubit interconversion, and quasiprobability simulation under completely stabilizer preserving operations",
    version
)]
struct Cli {
    /// Emit aligned text instead of JSON.
    #[arg(long, global = true)]
    text: bool,
    /// Emit JSON (the default; kept as an explicit flag).
    #[arg(long, global = true, conflicts_with = "text")]
    json: bool,
    /// Stabilizer cache directory (overrides MAGICKIT_CACHE).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Reporting tolerance for membership/validation significance.
    #[arg(long, global = true, value_name = "TOL")]
    tol: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the pure stabilizer states of n qubits.
    Enumerate {
        #[arg(long)]
        n: usize,
    },
    /// Decide stabilizer-polytope membership of a state.
    CheckStab {
        #[arg(long, value_name = "JSON|@FILE")]
        state: String,
    },
    /// Decide CSPO membership of a channel.
    CheckCspo {
        #[arg(long, value_name = "JSON|@FILE")]
        channel: String,
    },
    /// Validate a superchannel and optionally run the free-superchannel checks.
    CheckSuperchannel {
        #[arg(long, value_name = "JSON|@FILE")]
        superchannel: String,
        /// Completely-CSPO-preserving membership (normalized Choi in the
        /// stabilizer polytope).
        #[arg(long)]
        complete: bool,
        /// CSPO-preserving vertex check (qubit-to-qubit superchannels).
        #[arg(long)]
        preserving: bool,
    },
    /// Magic monotones of states and channels.
    Monotone {
        #[command(subcommand)]
        which: MonotoneCmd,
    },
    /// Qubit interconversion decision with certificates.
    Convert {
        #[arg(long, value_name = "JSON|@FILE")]
        from: String,
        #[arg(long, value_name = "JSON|@FILE")]
        to: String,
        /// Include the reachable-polytope vertices and facets in the payload.
        #[arg(long)]
        emit_polytope: bool,
    },
    /// Interconversion distance between qubit states.
    Distance {
        #[arg(long, value_name = "JSON|@FILE")]
        from: String,
        #[arg(long, value_name = "JSON|@FILE")]
        to: String,
    },
    /// Cost/distillation bounds and the comparison table.
    Bounds {
        #[command(subcommand)]
        which: BoundsCmd,
    },
    /// Classical circuit simulation.
    Simulate {
        #[command(subcommand)]
        which: SimulateCmd,
    },
}

#[derive(Args)]
struct StateOrChannel {
    #[arg(long, value_name = "JSON|@FILE", conflicts_with = "channel")]
    state: Option<String>,
    #[arg(long, value_name = "JSON|@FILE")]
    channel: Option<String>,
}

#[derive(Subcommand)]
enum MonotoneCmd {
    /// Robustness of magic (state or channel).
    Robustness {
        #[command(flatten)]
        target: StateOrChannel,
    },
    /// Generalized robustness (log for channels).
    GenRobustness {
        #[command(flatten)]
        target: StateOrChannel,
    },
    /// Min-relative entropy of magic; channels get the certified bracket.
    Dmin {
        #[command(flatten)]
        target: StateOrChannel,
        /// Seed for the channel bracket's local search.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Hypothesis-testing relative entropy of magic.
    DminEps {
        #[arg(long, value_name = "JSON|@FILE")]
        state: String,
        #[arg(long)]
        epsilon: f64,
    },
    /// Geometric measure of magic.
    Geometric {
        #[arg(long, value_name = "JSON|@FILE")]
        state: String,
    },
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Upper and lower bounds on the magic cost of a channel.
    Cost {
        #[arg(long, value_name = "JSON|@FILE")]
        channel: String,
        /// Single-qubit resource state (defaults to the T state).
        #[arg(long, value_name = "JSON|@FILE", default_value = "{\"name\":\"T\"}")]
        resource: String,
    },
    /// Upper and lower bounds on single-qubit magic distillation.
    Distill {
        #[arg(long, value_name = "JSON|@FILE")]
        channel: String,
        #[arg(long, value_name = "JSON|@FILE", default_value = "{\"name\":\"T\"}")]
        resource: String,
        /// Smoothing parameter of the hypothesis-testing entropy.
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The magic-cost comparison table with the T state as the resource.
    Table1 {
        /// Include the three-qubit rows (builds the n=3 enumeration).
        #[arg(long)]
        with_three_qubit: bool,
    },
}

#[derive(Subcommand)]
enum SimulateCmd {
    /// Static Monte Carlo estimator.
    Static {
        #[arg(long, value_name = "JSON|@FILE")]
        circuit: String,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.05)]
        p_fail: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dynamic constrained-path simulator.
    Constrained {
        #[arg(long, value_name = "JSON|@FILE")]
        circuit: String,
        #[arg(long)]
        delta_star: f64,
        #[arg(long, default_value_t = 0.05)]
        c: f64,
        #[arg(long, default_value_t = 0.05)]
        p_fail: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the paper's approximate lambda* instead of the guaranteed form.
        #[arg(long)]
        paper_lambda_star: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let format = if cli.text {
        output::Format::Text
    } else {
        output::Format::Json
    };
    let ctx = Context {
        format,
        cache_dir: cli.cache_dir.clone(),
        tol: cli.tol.unwrap_or(1e-9),
    };
    match run(&ctx, cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                MagicError::NumericalFailure(_)
                | MagicError::NoConvergence(_)
                | MagicError::Io(_) => ExitCode::from(3),
                _ => ExitCode::from(1),
            }
        }
    }
}

struct Context {
    format: output::Format,
    cache_dir: Option<PathBuf>,
    tol: f64,
}

impl Context {
    fn set(&self, n: usize) -> Result<StabilizerSet, MagicError> {
        match &self.cache_dir {
            Some(dir) => StabilizerSet::load_or_enumerate_in(n, dir),
            None => StabilizerSet::load_or_enumerate(n),
        }
    }

    fn set_for_dim(&self, dim: usize) -> Result<StabilizerSet, MagicError> {
        let n = dim.trailing_zeros() as usize;
        if dim != 1 << n || n == 0 || n > 3 {
            return Err(MagicError::UnsupportedDimension(format!(
                "dimension {dim} is outside the 1-3 qubit enumeration range"
            )));
        }
        self.set(n)
    }

    fn emit<T: Serialize>(&self, value: &T) -> Result<(), MagicError> {
        output::emit(self.format, value)
    }
}

/// Parse inline JSON or, with a leading '@', a file path.
fn parse_arg<T: serde::de::DeserializeOwned>(arg: &str, what: &str) -> Result<T, MagicError> {
    let text = if let Some(path) = arg.strip_prefix('@') {
        std::fs::read_to_string(path)?
    } else {
        arg.to_string()
    };
    serde_json::from_str(&text).map_err(|e| MagicError::InvalidInput(format!("{what}: {e}")))
}

fn parse_state(arg: &str) -> Result<ComplexMatrix, MagicError> {
    let json: JsonState = parse_arg(arg, "state")?;
    io::resolve_state(&json)
}

fn parse_channel(arg: &str) -> Result<ChoiOperator, MagicError> {
    let json: JsonChannel = parse_arg(arg, "channel")?;
    io::resolve_channel(&json)
}

fn run(ctx: &Context, command: Command) -> Result<ExitCode, MagicError> {
    match command {
        Command::Enumerate { n } => {
            let set = ctx.set(n)?;
            let entangled = if n == 2 {
                Some(set.entangled_indices()?.len())
            } else {
                None
            };
            ctx.emit(&output::EnumerateOut {
                n,
                count: set.len(),
                entangled,
                source: match set.source() {
                    stabilizer::StabSource::Computed => "computed",
                    stabilizer::StabSource::Cache => "cache",
                },
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckStab { state } => {
            let rho = parse_state(&state)?;
            let set = ctx.set_for_dim(rho.rows())?;
            let m = stabilizer::is_stabilizer_mixed(&rho, &set)?;
            let out = output::membership_out(&m, ctx.tol);
            ctx.emit(&out)?;
            Ok(domain_exit(m.inside()))
        }
        Command::CheckCspo { channel } => {
            let c = parse_channel(&channel)?;
            let set = ctx.set_for_dim(c.dim_in() * c.dim_out())?;
            let m = is_cspo(&c, &set)?;
            let out = output::membership_out(&m, ctx.tol);
            ctx.emit(&out)?;
            Ok(domain_exit(m.inside()))
        }
        Command::CheckSuperchannel {
            superchannel,
            complete,
            preserving,
        } => {
            let json: JsonSuperchannel = parse_arg(&superchannel, "superchannel")?;
            let sc = io::resolve_superchannel(&json)?;
            let violations = sc.validate();
            let valid = violations.is_empty();
            let mut out = output::SuperchannelOut {
                valid,
                violations: violations
                    .iter()
                    .map(|v| output::ViolationOut {
                        condition: v.condition.to_string(),
                        deviation: round_sig(v.deviation, 12),
                    })
                    .collect(),
                complete: None,
                preserving: None,
                counterexample: None,
            };
            let mut ok = valid;
            if valid && complete {
                let set = ctx.set_for_dim(sc.dims().total())?;
                let m = sc.is_completely_cspo_preserving(&set)?;
                ok &= m.inside();
                out.complete = Some(output::membership_out(&m, ctx.tol));
            }
            if valid && preserving {
                let set = ctx.set(2)?;
                let (pres, counter) = sc.is_cspo_preserving_qubit(&set)?;
                ok &= pres;
                out.preserving = Some(pres);
                out.counterexample = counter.map(|c| io::matrix_to_json(c.matrix()));
            }
            ctx.emit(&out)?;
            Ok(domain_exit(ok))
        }
        Command::Monotone { which } => run_monotone(ctx, which),
        Command::Convert {
            from,
            to,
            emit_polytope,
        } => {
            let rho = parse_state(&from)?;
            let sigma = parse_state(&to)?;
            let outcome = interconvert::qubit_convertible(&rho, &sigma)?;
            let distance = interconvert::interconversion_distance(&rho, &sigma)?;
            let polytope = if emit_polytope {
                let hull = interconvert::reachable_hull(&rho)?;
                Some(output::polytope_out(&hull))
            } else {
                None
            };
            let feasible = outcome.feasible;
            ctx.emit(&output::ConvertOut {
                feasible,
                x: outcome.solution.map(|v| round_vec(&v)),
                certificate: outcome.certificate.map(|v| round_vec(&v)),
                distance: round_sig(distance, 12),
                polytope,
            })?;
            Ok(domain_exit(feasible))
        }
        Command::Distance { from, to } => {
            let rho = parse_state(&from)?;
            let sigma = parse_state(&to)?;
            let d = interconvert::interconversion_distance(&rho, &sigma)?;
            ctx.emit(&output::DistanceOut {
                distance: round_sig(d, 12),
            })?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bounds { which } => run_bounds(ctx, which),
        Command::Simulate { which } => run_simulate(ctx, which),
    }
}

fn run_monotone(ctx: &Context, which: MonotoneCmd) -> Result<ExitCode, MagicError> {
    match which {
        MonotoneCmd::Robustness { target } => match target_of(&target)? {
            Target::State(rho) => {
                let set = ctx.set_for_dim(rho.rows())?;
                let rep = monotones::robustness_state(&rho, &set)?;
                ctx.emit(&output::monotone_out(&rep, &[]))?;
            }
            Target::Channel(c) => {
                let set = ctx.set_for_dim(c.dim_in() * c.dim_out())?;
                let rep = monotones::robustness_channel(&c, &set)?;
                ctx.emit(&output::monotone_out(&rep.report, &[("lr", rep.lr)]))?;
            }
        },
        MonotoneCmd::GenRobustness { target } => match target_of(&target)? {
            Target::State(rho) => {
                let set = ctx.set_for_dim(rho.rows())?;
                let rep = monotones::generalized_robustness_state(&rho, &set)?;
                ctx.emit(&output::monotone_out(&rep, &[]))?;
            }
            Target::Channel(c) => {
                let set = ctx.set_for_dim(c.dim_in() * c.dim_out())?;
                let rep = monotones::log_generalized_robustness_channel(&c, &set)?;
                ctx.emit(&output::monotone_out(
                    &rep.report,
                    &[
                        ("lambda", rep.lambda),
                        ("dualValue", rep.dual_value),
                        ("dualGap", (rep.lambda - rep.dual_value).abs()),
                    ],
                ))?;
            }
        },
        MonotoneCmd::Dmin { target, seed } => match target_of(&target)? {
            Target::State(rho) => {
                let set = ctx.set_for_dim(rho.rows())?;
                let rep = monotones::dmin_state(&rho, &set)?;
                ctx.emit(&output::monotone_out(&rep, &[]))?;
            }
            Target::Channel(c) => {
                let set = ctx.set_for_dim(c.dim_in() * c.dim_out())?;
                let bracket = monotones::dmin_channel_bracket(&c, &set, seed)?;
                ctx.emit(&output::BracketOut {
                    name: "dmin-channel-bracket",
                    lower: round_sig(bracket.lower, 12),
                    upper_estimate: round_sig(bracket.upper_estimate, 12),
                    upper_certified: false,
                })?;
            }
        },
        MonotoneCmd::DminEps { state, epsilon } => {
            let rho = parse_state(&state)?;
            let set = ctx.set_for_dim(rho.rows())?;
            let rep = monotones::dmin_eps_state(&rho, &set, epsilon)?;
            ctx.emit(&output::monotone_out(&rep, &[("epsilon", epsilon)]))?;
        }
        MonotoneCmd::Geometric { state } => {
            let rho = parse_state(&state)?;
            let set = ctx.set_for_dim(rho.rows())?;
            let rep = monotones::geometric_measure(&rho, &set)?;
            ctx.emit(&output::monotone_out(&rep, &[]))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

enum Target {
    State(ComplexMatrix),
    Channel(ChoiOperator),
}

fn target_of(t: &StateOrChannel) -> Result<Target, MagicError> {
    match (&t.state, &t.channel) {
        (Some(s), None) => Ok(Target::State(parse_state(s)?)),
        (None, Some(c)) => Ok(Target::Channel(parse_channel(c)?)),
        _ => Err(MagicError::InvalidInput(
            "provide exactly one of --state / --channel".into(),
        )),
    }
}

fn run_bounds(ctx: &Context, which: BoundsCmd) -> Result<ExitCode, MagicError> {
    match which {
        BoundsCmd::Cost { channel, resource } => {
            let c = parse_channel(&channel)?;
            let psi = parse_state(&resource)?;
            if psi.rows() != 2 {
                return Err(MagicError::InvalidInput(
                    "the cost bounds need a single-qubit resource state".into(),
                ));
            }
            let set_c = ctx.set_for_dim(c.dim_in() * c.dim_out())?;
            let set1 = ctx.set(1)?;
            let rob = monotones::robustness_channel(&c, &set_c)?;
            let gen_c = monotones::log_generalized_robustness_channel(&c, &set_c)?;
            let dmin_psi = monotones::dmin_state(&psi, &set1)?.value;
            let gen_psi = monotones::generalized_robustness_state(&psi, &set1)?.value;
            let upper = bounds::cost_upper_bound(rob.lr, dmin_psi)?;
            let lower = bounds::cost_lower_bound(gen_c.report.value, gen_psi)?;
            ctx.emit(&output::CostBoundsOut {
                cost_upper: upper.value,
                cost_lower: round_sig(lower.value, 12),
                lr_channel: round_sig(rob.lr, 12),
                lrg_channel: round_sig(gen_c.report.value, 12),
                dmin_resource: round_sig(dmin_psi, 12),
                lrg_resource: round_sig(gen_psi, 12),
            })?;
        }
        BoundsCmd::Distill {
            channel,
            resource,
            epsilon,
            seed,
        } => {
            let c = parse_channel(&channel)?;
            let psi = parse_state(&resource)?;
            if psi.rows() != 2 {
                return Err(MagicError::InvalidInput(
                    "the distillation bounds need a single-qubit resource state".into(),
                ));
            }
            let set_c = ctx.set_for_dim(c.dim_in() * c.dim_out())?;
            let set1 = ctx.set(1)?;
            let bracket = monotones::dmin_channel_bracket(&c, &set_c, seed)?;
            let dmin_psi = monotones::dmin_state(&psi, &set1)?.value;
            let upper = bounds::distill_upper_bound(bracket.lower, dmin_psi, true)?;
            let choi_state = c.normalized();
            let dmin_eps_choi = monotones::dmin_eps_state(&choi_state, &set_c, epsilon)?.value;
            let r_hc = monotones::robustness_state(&psi, &set1)?
                .convention
                .expect("robustness carries conventions")
                .r_hc;
            let lr_psi = r_hc.log2();
            let lower = bounds::distill_lower_bound(dmin_eps_choi, lr_psi)?;
            ctx.emit(&output::DistillBoundsOut {
                distill_upper: round_sig(upper.value, 12),
                distill_upper_note: upper.note.map(str::to_string),
                distill_lower: lower.value,
                bracket_lower: round_sig(bracket.lower, 12),
                bracket_upper_estimate: round_sig(bracket.upper_estimate, 12),
                dmin_eps_choi: round_sig(dmin_eps_choi, 12),
                lr_resource: round_sig(lr_psi, 12),
                epsilon,
            })?;
        }
        BoundsCmd::Table1 { with_three_qubit } => {
            let set1 = ctx.set(1)?;
            let set2 = ctx.set(2)?;
            let set3 = if with_three_qubit {
                Some(ctx.set(3)?)
            } else {
                None
            };
            let report = bounds::table1_report(&set1, &set2, set3.as_ref(), with_three_qubit)?;
            output::emit_table1(ctx.format, &report)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_simulate(ctx: &Context, which: SimulateCmd) -> Result<ExitCode, MagicError> {
    match which {
        SimulateCmd::Static {
            circuit,
            epsilon,
            p_fail,
            seed,
        } => {
            let json: JsonCircuit = parse_arg(&circuit, "circuit")?;
            let circuit = io::resolve_circuit(&json)?;
            let config = SimulationConfig {
                epsilon: Some(epsilon),
                p_fail,
                seed,
                ..Default::default()
            };
            let t0 = std::time::Instant::now();
            let est = simulate::static_monte_carlo(&circuit, &config)?;
            eprintln!(
                "run log: N = {}, replaced = [], lambda = 1, wall = {:?}",
                est.sample_count,
                t0.elapsed()
            );
            ctx.emit(&output::sim_out(&est))?;
        }
        SimulateCmd::Constrained {
            circuit,
            delta_star,
            c,
            p_fail,
            seed,
            paper_lambda_star,
        } => {
            let json: JsonCircuit = parse_arg(&circuit, "circuit")?;
            let circuit = io::resolve_circuit(&json)?;
            let stars = simulate::lambda_star(delta_star, circuit.len(), c);
            let config = SimulationConfig {
                c,
                p_fail,
                delta_star: Some(delta_star),
                seed,
                paper_lambda_star,
                epsilon: None,
            };
            let t0 = std::time::Instant::now();
            let est = simulate::constrained_path(&circuit, &config)?;
            eprintln!(
                "run log: N = {}, replaced = {:?}, lambda = {}, lambda_star = {} (guaranteed {} / paper {}), wall = {:?}",
                est.sample_count,
                est.replaced_indices,
                est.lambda_prime,
                if paper_lambda_star { stars.paper_approx } else { stars.guaranteed },
                stars.guaranteed,
                stars.paper_approx,
                t0.elapsed()
            );
            ctx.emit(&output::sim_out(&est))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn domain_exit(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn round_vec(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| round_sig(*x, 12)).collect()
}
