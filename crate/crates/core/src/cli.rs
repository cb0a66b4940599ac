//! Command-line front end: subcommands, file formats and exit codes.
//!
//! Exit codes: 0 success or YES, 1 NO or violation verdict, 2 malformed
//! input, 3 precondition or promise violation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::PinqError;
use crate::ffgauss::{self, CovMatrix, HamMatrix};
use crate::gscon::{self, GsconInstance, GsconParams};
use crate::linalg;
use crate::pauli::{self, format_hamiltonian, parse_hamiltonian, HamiltonianSum, STRUCTURE_TOL};
use crate::pinning::{self, NormBound, PinSpec, PinState, PromiseBounds, Reduction};
use crate::spectral::{self, Decision, Solver};
use crate::zeno::{self, ZenoKind, ZenoProtocol};

pub const REPORT_FORMAT: &str = "pinq-run-report/1";
pub const ZENO_CSV_FORMAT: &str = "pinq-zeno-csv/1";
pub const STATE_FORMAT: &str = "pinq-state/1";

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERDICT: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "pinq",
    version,
    about = "Pinned-qubit reductions, Zeno dynamics and ground-space path checks"
)]
struct Cli {
    /// Seed for every randomized internal (iterative solver start vectors).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Print a JSON run report instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Include wall time in the run report (breaks byte-identical output).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Stoquastic, commuting and permutation checks.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = STRUCTURE_TOL)]
        tol: f64,
    },
    /// Sum of pure-Z and pure-X strings to a pinned commuting one on n + 1 qubits.
    PinCommuting(ReduceArgs),
    /// Any Y-free Hamiltonian to a pinned stoquastic one on n + 1 qubits.
    PinStoquastic(ReduceArgs),
    /// Y-free Hamiltonian to a pinned sum of permutation terms.
    PinPermutation {
        #[command(flatten)]
        common: ReduceArgs,
        /// Binary digits per coefficient.
        #[arg(long)]
        bits: Option<usize>,
    },
    /// Replaces a |0> pin by an energy penalty.
    UnpinPenalty {
        file: PathBuf,
        /// Pinned qubit; defaults to the last one.
        #[arg(long)]
        qubit: Option<usize>,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        /// `term-sum`, `exact` or a number.
        #[arg(long, default_value = "term-sum", value_parser = parse_norm)]
        norm: NormBound,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Effective Hamiltonian on the unpinned qubits.
    Effective {
        file: PathBuf,
        #[arg(long = "pin", value_parser = parse_pin, required = true)]
        pins: Vec<(usize, PinState)>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Ground energy, optionally pinned and decided against (a, b).
    Spectrum {
        file: PathBuf,
        #[arg(long = "pin", value_parser = parse_pin)]
        pins: Vec<(usize, PinState)>,
        #[arg(long, conflicts_with = "iterative")]
        dense: bool,
        #[arg(long)]
        iterative: bool,
        #[arg(long, allow_negative_numbers = true, requires = "b")]
        a: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "a")]
        b: Option<f64>,
    },
    /// Post-selected Zeno evolution under an ancilla Hamiltonian.
    Zeno {
        #[arg(long, value_parser = parse_kind)]
        kind: ZenoKind,
        #[arg(long = "a")]
        a_file: PathBuf,
        #[arg(long = "b")]
        b_file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long = "n")]
        steps: usize,
        /// Comma-separated increasing step counts; replaces `--n`.
        #[arg(long, value_delimiter = ',')]
        sweep: Option<Vec<usize>>,
        /// Initial state, one amplitude per line; defaults to |0...0>.
        #[arg(long)]
        state: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Builds a stoquastic GSCON instance from a local Hamiltonian.
    GsconBuild {
        file: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[arg(long)]
        eta2: Option<f64>,
        #[arg(long)]
        eta4: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        /// Largest path length.
        #[arg(long, default_value_t = gscon::DEFAULT_PATH_LENGTH)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
        /// Witness circuit on the system register (path file).
        #[arg(long, requires = "path_out")]
        witness: Option<PathBuf>,
        /// Where to write the witness traversal.
        #[arg(long)]
        path_out: Option<PathBuf>,
    },
    /// Checks a unitary path against an instance.
    GsconVerify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        path: PathBuf,
    },
    /// Free-fermion interpolation path between two pure Gaussian states.
    FfPath {
        #[arg(long)]
        start: PathBuf,
        #[arg(long)]
        end: PathBuf,
        #[arg(long)]
        h: PathBuf,
        /// Macro-step count.
        #[arg(long = "n")]
        steps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also verify the path with this energy ceiling.
        #[arg(long, allow_negative_numbers = true)]
        eta1: Option<f64>,
    },
}

#[derive(Args, Debug)]
struct ReduceArgs {
    file: PathBuf,
    #[arg(long, allow_negative_numbers = true, requires = "b")]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true, requires = "a")]
    b: Option<f64>,
    /// Write the output Hamiltonian here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_pin(s: &str) -> Result<(usize, PinState), String> {
    PinSpec::parse_entry(s).map_err(|e| e.to_string())
}

fn parse_kind(s: &str) -> Result<ZenoKind, String> {
    s.parse().map_err(|e: PinqError| e.to_string())
}

fn parse_norm(s: &str) -> Result<NormBound, String> {
    match s {
        "term-sum" => Ok(NormBound::TermSum),
        "exact" => Ok(NormBound::Exact),
        _ => s
            .parse::<f64>()
            .ok()
            .filter(|d| d.is_finite() && *d >= 0.0)
            .map(NormBound::Given)
            .ok_or_else(|| {
                format!("norm must be term-sum, exact or a non-negative number, got {s:?}")
            }),
    }
}

/// Every file schema with its version string.
pub fn format_versions() -> Vec<(&'static str, &'static str)> {
    vec![
        ("hamiltonian", pauli::text::FORMAT_VERSION),
        ("state", STATE_FORMAT),
        ("zeno-csv", ZENO_CSV_FORMAT),
        ("gscon-instance", gscon::INSTANCE_FORMAT),
        ("gscon-path", gscon::PATH_FORMAT),
        ("majorana-csv", ffgauss::CSV_FORMAT),
        ("ff-path", ffgauss::PATH_FORMAT),
        ("run-report", REPORT_FORMAT),
    ]
}

#[derive(Debug, Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct RunReport<'a> {
    format: &'static str,
    subcommand: &'a str,
    seed: u64,
    inputs: &'a [InputDigest],
    payload: &'a Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    wall_time_ms: Option<f64>,
}

enum Failure {
    Malformed(String),
    Precondition(String),
}

impl From<PinqError> for Failure {
    fn from(e: PinqError) -> Self {
        match e {
            PinqError::Parse { .. }
            | PinqError::Dimension(_)
            | PinqError::MalformedStep { .. }
            | PinqError::Io(_)
            | PinqError::Json(_) => Failure::Malformed(e.to_string()),
            PinqError::TooLarge { .. }
            | PinqError::UnsupportedTerm { .. }
            | PinqError::Precondition(_)
            | PinqError::NonHermitian(_)
            | PinqError::NoConvergence { .. }
            | PinqError::SurvivalUnderflow { .. }
            | PinqError::Unreachable(_) => Failure::Precondition(e.to_string()),
        }
    }
}

type Outcome = Result<(Value, String, i32), Failure>;

struct Ctx {
    inputs: Vec<InputDigest>,
}

impl Ctx {
    fn read(&mut self, path: &Path) -> Result<String, Failure> {
        let bytes = std::fs::read(path)
            .map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: hex::encode(Sha256::digest(&bytes)),
        });
        String::from_utf8(bytes)
            .map_err(|_| Failure::Malformed(format!("{}: not UTF-8", path.display())))
    }

    fn hamiltonian(&mut self, path: &Path) -> Result<HamiltonianSum, Failure> {
        let text = self.read(path)?;
        parse_hamiltonian(&text).map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
    }

    fn matrix(&mut self, path: &Path) -> Result<nalgebra::DMatrix<f64>, Failure> {
        let text = self.read(path)?;
        ffgauss::read_matrix_csv(&text)
            .map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::Precondition(format!("cannot write {}: {e}", path.display())))
}

fn bounds(a: Option<f64>, b: Option<f64>) -> Result<Option<PromiseBounds>, Failure> {
    match (a, b) {
        (Some(a), Some(b)) => Ok(Some(PromiseBounds::new(a, b)?)),
        _ => Ok(None),
    }
}

fn pin_spec(pins: &[(usize, PinState)]) -> Result<PinSpec, Failure> {
    Ok(PinSpec::new(pins.to_vec())?)
}

fn emit_reduction(r: Reduction, out: Option<&Path>) -> Outcome {
    let text = format_hamiltonian(&r.hamiltonian);
    let mut payload = json!({ "report": r.report });
    let human = match out {
        Some(path) => {
            write_file(path, &text)?;
            payload["output"] = json!(path.display().to_string());
            let pins: Vec<String> = r
                .pin
                .entries()
                .iter()
                .map(|e| format!("{}={}", e.qubit, e.state))
                .collect();
            let pins = if pins.is_empty() {
                String::new()
            } else {
                format!("; pin {}", pins.join(" "))
            };
            format!(
                "{}: {} qubits, {} terms, locality {}{}; written to {}\n",
                r.report.reduction,
                r.report.output_qubits,
                r.report.output_terms,
                r.report.output_locality,
                pins,
                path.display()
            )
        }
        None => {
            payload["hamiltonian"] = json!(text);
            text
        }
    };
    let mut human = human;
    for n in &r.report.notices {
        human.push_str(&format!("# notice: {n}\n"));
    }
    Ok((payload, human, EXIT_OK))
}

fn cmd_check(ctx: &mut Ctx, file: &Path, tol: f64) -> Outcome {
    let h = ctx.hamiltonian(file)?;
    let stoq = pauli::is_stoquastic(&h, true, tol)?;
    let stoq_global = if h.n() <= pauli::SPARSE_CEILING {
        Some(pauli::is_stoquastic(&h, false, tol)?.verdict)
    } else {
        None
    };
    let comm = pauli::is_commuting(&h);
    let perm = pauli::is_permutation(&h, true, tol)?;
    let payload = json!({
        "qubits": h.n(),
        "terms": h.len(),
        "locality": h.locality(),
        "complex": h.is_complex(),
        "stoquastic": stoq.verdict,
        "stoquastic_assembled": stoq_global,
        "commuting": comm.verdict,
        "permutation": perm.verdict,
        "stoquastic_report": stoq,
        "commuting_report": comm,
        "permutation_report": perm,
    });
    let human = format!(
        "qubits: {}\nterms: {}\nlocality: {}\nstoquastic: {}\ncommuting: {}\npermutation: {}\n",
        h.n(),
        h.len(),
        h.locality(),
        stoq.verdict,
        comm.verdict,
        perm.verdict
    );
    Ok((payload, human, EXIT_OK))
}

fn cmd_spectrum(
    ctx: &mut Ctx,
    file: &Path,
    pins: &[(usize, PinState)],
    solver: Solver,
    bounds: Option<PromiseBounds>,
    seed: u64,
) -> Outcome {
    let h = ctx.hamiltonian(file)?;
    let pin = pin_spec(pins)?;
    pin.validate(h.n())?;
    let r = if pin.is_empty() {
        spectral::min_eig(&h, solver, seed)?
    } else {
        spectral::pinned_min_energy(&h, &pin, solver, seed)?
    };
    let mut payload = json!({
        "value": r.value,
        "residual": r.residual,
        "method": r.method,
        "iterations": r.iterations,
    });
    let mut human = format!("{:.16e}\n", r.value);
    let mut code = EXIT_OK;
    if let Some(b) = bounds {
        let d = spectral::decide(r.value, &b);
        payload["decision"] = json!(d);
        human.push_str(&format!(
            "{}\n",
            payload["decision"].as_str().unwrap_or_default()
        ));
        code = match d {
            Decision::Yes => EXIT_OK,
            Decision::No => EXIT_VERDICT,
            Decision::GapViolation => EXIT_PRECONDITION,
        };
    }
    Ok((payload, human, code))
}

#[allow(clippy::too_many_arguments)]
fn cmd_zeno(
    ctx: &mut Ctx,
    kind: ZenoKind,
    a_file: &Path,
    b_file: &Path,
    t: f64,
    steps: usize,
    sweep: Option<&[usize]>,
    state: Option<&Path>,
    csv_out: Option<&Path>,
) -> Outcome {
    let a = ctx.hamiltonian(a_file)?;
    let b = ctx.hamiltonian(b_file)?;
    let p = ZenoProtocol::new(kind, a, b, t, steps)?;
    let psi0 = match state {
        Some(path) => {
            let text = ctx.read(path)?;
            zeno::parse_state(&text)
                .map_err(|e| Failure::Malformed(format!("{}: {e}", path.display())))?
        }
        None => linalg::basis_state(1 << p.n(), 0),
    };
    let (payload, rows) = match sweep {
        Some(ns) => {
            let s = zeno::zeno_scaling_sweep(&p, &psi0, ns)?;
            (json!({ "kind": kind, "t": t, "sweep": s }), s.rows)
        }
        None => {
            let r = zeno::zeno_evolve(&p, &psi0)?;
            let row = zeno::SweepRow {
                steps: r.steps,
                error: r.error_norm,
                survival: r.survival_probability,
            };
            (json!({ "kind": kind, "t": t, "trajectory": r }), vec![row])
        }
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &rows {
        w.serialize(row)
            .map_err(|e| Failure::Precondition(e.to_string()))?;
    }
    let table = String::from_utf8(
        w.into_inner()
            .map_err(|e| Failure::Precondition(e.to_string()))?,
    )
    .expect("csv output is UTF-8");
    let human = match csv_out {
        Some(path) => {
            write_file(path, &table)?;
            let mut s = String::new();
            for r in &rows {
                s.push_str(&format!(
                    "N={} error={:.3e} survival={:.12}\n",
                    r.steps, r.error, r.survival
                ));
            }
            if let Some(sw) = payload.get("sweep") {
                s.push_str(&format!(
                    "error slope: {}\nsurvival slope: {}\n",
                    sw["error_slope"], sw["survival_slope"]
                ));
            }
            s
        }
        None => table,
    };
    Ok((payload, human, EXIT_OK))
}

#[allow(clippy::too_many_arguments)]
fn cmd_gscon_build(
    ctx: &mut Ctx,
    file: &Path,
    alpha: f64,
    beta: f64,
    eta2: Option<f64>,
    eta4: Option<f64>,
    delta: Option<f64>,
    m: usize,
    out: &Path,
    witness: Option<&Path>,
    path_out: Option<&Path>,
) -> Outcome {
    let h = ctx.hamiltonian(file)?;
    let mut params = GsconParams::new(alpha, beta);
    params.eta2 = eta2;
    params.eta4 = eta4;
    params.delta = delta;
    params.m = m;
    let c = gscon::build_stoquastic_gscon(&h, &params)?;
    write_file(out, &c.instance.to_json()?)?;
    let inst = &c.instance;
    let stoq = pauli::is_stoquastic(&c.hamiltonian, true, STRUCTURE_TOL)?.verdict;
    let mut payload = json!({
        "qubits": c.qubits(),
        "terms": c.hamiltonian.len(),
        "locality": c.hamiltonian.locality(),
        "stoquastic": stoq,
        "shift": c.shift,
        "alpha": c.alpha,
        "beta": c.beta,
        "eta1": inst.eta1,
        "eta2": inst.eta2,
        "eta3": inst.eta3,
        "eta4": inst.eta4,
        "delta": inst.delta,
        "l": inst.l,
        "m": inst.m,
        "output": out.display().to_string(),
    });
    let mut human = format!(
        "instance: {} qubits, {} terms, stoquastic {}; written to {}\n",
        c.qubits(),
        c.hamiltonian.len(),
        stoq,
        out.display()
    );
    let mut code = EXIT_OK;
    if let (Some(wpath), Some(ppath)) = (witness, path_out) {
        let text = ctx.read(wpath)?;
        let w = gscon::path_from_json(&text)?;
        let path = gscon::witness_traversal(&c, &w, None)?;
        write_file(ppath, &gscon::path_to_json(&path)?)?;
        let v = gscon::verify_path(inst, &path)?;
        human.push_str(&format!(
            "traversal: {} steps, max energy {:.6e}, final distance {:.3e}, {}\n",
            path.len(),
            v.max_intermediate_energy,
            v.final_distance,
            if v.is_yes() { "YES" } else { "violation" }
        ));
        if !v.is_yes() {
            code = EXIT_VERDICT;
        }
        payload["traversal"] = json!({
            "steps": path.len(),
            "output": ppath.display().to_string(),
            "outcome": v.outcome,
            "max_intermediate_energy": v.max_intermediate_energy,
            "final_distance": v.final_distance,
        });
    }
    Ok((payload, human, code))
}

fn cmd_gscon_verify(ctx: &mut Ctx, instance: &Path, path: &Path) -> Outcome {
    let text = ctx.read(instance)?;
    let inst = GsconInstance::from_json(&text)?;
    let text = ctx.read(path)?;
    let steps = gscon::path_from_json(&text)?;
    let v = gscon::verify_path(&inst, &steps)?;
    let code = if v.is_yes() { EXIT_OK } else { EXIT_VERDICT };
    let human = format!(
        "{}\nmax intermediate energy: {:.16e} (eta1 = {:.16e})\nfinal distance: {:.3e} (eta3 = {:.3e})\n",
        match v.outcome {
            gscon::PathOutcome::YesWitnessed => "YES".to_string(),
            gscon::PathOutcome::EnergyViolation { step } => format!("energy violation at state {step}"),
            gscon::PathOutcome::DistanceViolation => "distance violation".to_string(),
        },
        v.max_intermediate_energy,
        inst.eta1,
        v.final_distance,
        inst.eta3
    );
    Ok((json!({ "verdict": v }), human, code))
}

fn cmd_ff_path(
    ctx: &mut Ctx,
    start: &Path,
    end: &Path,
    h: &Path,
    steps: usize,
    out: Option<&Path>,
    eta1: Option<f64>,
) -> Outcome {
    let gs = CovMatrix::new(ctx.matrix(start)?)?;
    let ge = CovMatrix::new(ctx.matrix(end)?)?;
    let hm = HamMatrix::new(ctx.matrix(h)?)?;
    let (path, hb) = if hm.is_block_diagonal() {
        (ffgauss::interpolation_path(&gs, &ge, &hm, steps)?, hm)
    } else {
        let (w, hb) = hm.block_diagonalize();
        let mut p = ffgauss::interpolation_path(&gs.rotated(&w), &ge.rotated(&w), &hb, steps)?;
        p.frame = Some(ffgauss::matrix_to_rows(&w));
        (p, hb)
    };
    let text = path.to_json()?;
    let mut payload = json!({
        "modes": path.modes,
        "macro_steps": path.macro_steps,
        "gates": path.gates.len(),
        "epsilon": path.epsilon,
        "max_grid_deviation": path.max_grid_deviation,
        "residual_deviation": path.residual_deviation,
        "grid_energies": path.grid_energies,
        "ramp": path.ramp,
        "pre_rotated": path.frame.is_some(),
    });
    let mut human = match out {
        Some(p) => {
            write_file(p, &text)?;
            payload["output"] = json!(p.display().to_string());
            format!(
                "{} gates over {} macro-steps, epsilon {:.3e}; written to {}\n",
                path.gates.len(),
                path.macro_steps,
                path.epsilon,
                p.display()
            )
        }
        None => text + "\n",
    };
    let mut code = EXIT_OK;
    if let Some(eta1) = eta1 {
        let v = ffgauss::verify_ff_path(&path, &hb, eta1)?;
        if !v.passed {
            code = EXIT_VERDICT;
        }
        human.push_str(&format!(
            "verification: {}\n",
            if v.passed { "passed" } else { "failed" }
        ));
        payload["verdict"] = json!(v);
    }
    Ok((payload, human, code))
}

fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Outcome {
    match &cli.command {
        Command::Check { file, tol } => cmd_check(ctx, file, *tol),
        Command::PinCommuting(r) => {
            let h = ctx.hamiltonian(&r.file)?;
            emit_reduction(
                pinning::commuting_pin(&h, bounds(r.a, r.b)?)?,
                r.out.as_deref(),
            )
        }
        Command::PinStoquastic(r) => {
            let h = ctx.hamiltonian(&r.file)?;
            emit_reduction(
                pinning::stoquastic_pin(&h, bounds(r.a, r.b)?)?,
                r.out.as_deref(),
            )
        }
        Command::PinPermutation { common: r, bits } => {
            let h = ctx.hamiltonian(&r.file)?;
            emit_reduction(
                pinning::permutation_pin(&h, *bits, bounds(r.a, r.b)?)?,
                r.out.as_deref(),
            )
        }
        Command::UnpinPenalty {
            file,
            qubit,
            a,
            b,
            norm,
            out,
        } => {
            let h = ctx.hamiltonian(file)?;
            let q = qubit.unwrap_or(h.n().saturating_sub(1));
            let lift = pinning::pin_penalty_lift(&h, q, PromiseBounds::new(*a, *b)?, *norm)?;
            emit_reduction(
                Reduction {
                    hamiltonian: lift.hamiltonian,
                    pin: PinSpec::default(),
                    report: lift.report,
                },
                out.as_deref(),
            )
        }
        Command::Effective { file, pins, out } => {
            let h = ctx.hamiltonian(file)?;
            let pin = pin_spec(pins)?;
            let eff = pinning::effective_sum(&h, &pin)?;
            let text = format_hamiltonian(&eff);
            let free = pin.free_qubits(h.n());
            let mut payload = json!({ "qubits": eff.n(), "terms": eff.len(), "free_qubits": free });
            let human = match out {
                Some(p) => {
                    write_file(p, &text)?;
                    payload["output"] = json!(p.display().to_string());
                    format!(
                        "effective: {} qubits, {} terms; written to {}\n",
                        eff.n(),
                        eff.len(),
                        p.display()
                    )
                }
                None => {
                    payload["hamiltonian"] = json!(text);
                    text
                }
            };
            Ok((payload, human, EXIT_OK))
        }
        Command::Spectrum {
            file,
            pins,
            dense,
            iterative,
            a,
            b,
        } => {
            let solver = match (dense, iterative) {
                (true, _) => Solver::Dense,
                (_, true) => Solver::Iterative,
                _ => Solver::Auto,
            };
            cmd_spectrum(ctx, file, pins, solver, bounds(*a, *b)?, cli.seed)
        }
        Command::Zeno {
            kind,
            a_file,
            b_file,
            t,
            steps,
            sweep,
            state,
            csv,
        } => cmd_zeno(
            ctx,
            *kind,
            a_file,
            b_file,
            *t,
            *steps,
            sweep.as_deref(),
            state.as_deref(),
            csv.as_deref(),
        ),
        Command::GsconBuild {
            file,
            alpha,
            beta,
            eta2,
            eta4,
            delta,
            m,
            out,
            witness,
            path_out,
        } => cmd_gscon_build(
            ctx,
            file,
            *alpha,
            *beta,
            *eta2,
            *eta4,
            *delta,
            *m,
            out,
            witness.as_deref(),
            path_out.as_deref(),
        ),
        Command::GsconVerify { instance, path } => cmd_gscon_verify(ctx, instance, path),
        Command::FfPath {
            start,
            end,
            h,
            steps,
            out,
            eta1,
        } => cmd_ff_path(ctx, start, end, h, *steps, out.as_deref(), *eta1),
    }
}

fn subcommand_name(c: &Command) -> &'static str {
    match c {
        Command::Check { .. } => "check",
        Command::PinCommuting(_) => "pin-commuting",
        Command::PinStoquastic(_) => "pin-stoquastic",
        Command::PinPermutation { .. } => "pin-permutation",
        Command::UnpinPenalty { .. } => "unpin-penalty",
        Command::Effective { .. } => "effective",
        Command::Spectrum { .. } => "spectrum",
        Command::Zeno { .. } => "zeno",
        Command::GsconBuild { .. } => "gscon-build",
        Command::GsconVerify { .. } => "gscon-verify",
        Command::FfPath { .. } => "ff-path",
    }
}

fn long_version() -> &'static str {
    let mut s = format!("{}\nfile formats:", env!("CARGO_PKG_VERSION"));
    for (name, v) in format_versions() {
        s.push_str(&format!("\n  {name}: {v}"));
    }
    Box::leak(s.into_boxed_str())
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code.
/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match Cli::command()
        .long_version(long_version())
        .try_get_matches_from(argv)
    {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_MALFORMED
            } else {
                EXIT_OK
            };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_MALFORMED;
        }
    };
    let started = Instant::now();
    let mut ctx = Ctx { inputs: Vec::new() };
    let name = subcommand_name(&cli.command);
    match dispatch(&cli, &mut ctx) {
        Ok((payload, human, code)) => {
            if cli.json {
                let report = RunReport {
                    format: REPORT_FORMAT,
                    subcommand: name,
                    seed: cli.seed,
                    inputs: &ctx.inputs,
                    payload: &payload,
                    wall_time_ms: cli.timing.then(|| started.elapsed().as_secs_f64() * 1e3),
                };
                emit(&format!(
                    "{}\n",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                ));
            } else {
                emit(&human);
                if cli.timing {
                    eprintln!("wall time: {:.3} ms", started.elapsed().as_secs_f64() * 1e3);
                }
            }
            code
        }
        Err(Failure::Malformed(msg)) => {
            eprintln!("error: malformed input: {msg}");
            EXIT_MALFORMED
        }
        Err(Failure::Precondition(msg)) => {
            eprintln!("error: {msg}");
            EXIT_PRECONDITION
        }
    }
}
