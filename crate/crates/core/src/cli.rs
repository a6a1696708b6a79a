//! `circshift` command line. Reports go to stdout as `key=value` lines;
//! diagnostics go to stderr.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::Path;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::builder::{construct, feasibility_from, k_delta, pool_size, Feasibility, DEFAULT_POOL_CAP};
use crate::circcode::{source_matrix, CircularShiftCode};
use crate::error::{BuildError, FormatError};
use crate::field::{gcd, FieldContext};
use crate::format::{load_network, CodeFile, KernelEntry};
use crate::netmodel::MulticastNetwork;
use crate::networks;
use crate::scalarcode::{ScalarCode, SolutionSet};
use crate::simulate::{round_trip, shift_op_count, OpCounts, SourceMessage};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONSTRUCTION: i32 = 3;
pub const EXIT_SIMULATION: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "circshift", version, about = "Circular-shift linear network codes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Field and rate parameters for a block length.
    Analyze {
        #[arg(long = "L", visible_alias = "l")]
        l: usize,
        #[arg(long)]
        delta: Option<usize>,
        /// Receiver count for the feasibility verdict.
        #[arg(long, requires = "delta")]
        receivers: Option<usize>,
    },
    /// Construct a code and write it as JSON.
    Build {
        /// Network file, or the name of a bundled network.
        #[arg(long)]
        net: String,
        #[arg(long = "L", visible_alias = "l")]
        l: usize,
        #[arg(long)]
        delta: usize,
        #[arg(long)]
        out: std::path::PathBuf,
        /// Which indices to encode over: every index the kernels solve, or
        /// only those coprime to L.
        #[arg(long = "j-set", value_enum, default_value_t = JChoice::Derived)]
        j_set: JChoice,
    },
    /// Re-derive and check every decodability condition of a code file.
    Verify {
        #[arg(long)]
        net: String,
        #[arg(long)]
        code: std::path::PathBuf,
    },
    /// Round-trip random messages through the shift-and-XOR data plane.
    Simulate {
        #[arg(long)]
        net: String,
        #[arg(long)]
        code: std::path::PathBuf,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum JChoice {
    Derived,
    Coprime,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Construction(String),
    #[error("{0}")]
    Simulation(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Construction(_) => EXIT_CONSTRUCTION,
            CliError::Simulation(_) => EXIT_SIMULATION,
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Input(e.to_string())
    }
}

fn input<E: std::fmt::Display>(what: &str) -> impl FnOnce(E) -> CliError + '_ {
    move |e| CliError::Input(format!("{what}: {e}"))
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze { l, delta, receivers } => analyze(l, delta, receivers, out),
        Command::Build { net, l, delta, out: path, j_set } => build(&net, l, delta, j_set, &path, out, err),
        Command::Verify { net, code } => verify(&net, &code, out),
        Command::Simulate { net, code, trials, seed } => simulate(&net, &code, trials, seed, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.code()
        }
    }
}

fn read_network(arg: &str) -> Result<MulticastNetwork, CliError> {
    let text = if Path::new(arg).is_file() {
        std::fs::read_to_string(arg).map_err(input(arg))?
    } else if let Some(t) = networks::bundled(arg) {
        t.to_string()
    } else {
        return Err(CliError::Input(format!(
            "{arg}: no such file or bundled network (bundled: {})",
            networks::BUNDLED.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
        )));
    };
    load_network(&text).map_err(input(arg))
}

fn context(l: usize) -> Result<FieldContext, CliError> {
    FieldContext::new(l).map_err(|e| CliError::Input(e.to_string()))
}

fn reduced(num: usize, den: usize) -> (usize, usize) {
    let g = gcd(num, den).max(1);
    (num / g, den / g)
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn w(out: &mut dyn Write, line: std::fmt::Arguments) -> Result<(), CliError> {
    out.write_fmt(line)
        .and_then(|_| out.write_all(b"\n"))
        .map_err(|e| CliError::Input(format!("writing output: {e}")))
}

macro_rules! emit {
    ($out:expr, $($arg:tt)*) => { w($out, format_args!($($arg)*))? };
}

fn emit_feasibility(out: &mut dyn Write, f: &Feasibility) -> Result<(), CliError> {
    emit!(out, "K_delta={}", f.k_delta);
    emit!(out, "bound={}", f.bound);
    emit!(out, "receivers={}", f.receivers);
    emit!(
        out,
        "feasibility={}",
        if f.guaranteed { "guaranteed" } else { "not-guaranteed" }
    );
    Ok(())
}

fn analyze(l: usize, delta: Option<usize>, receivers: Option<usize>, out: &mut dyn Write) -> Result<i32, CliError> {
    let ctx = context(l)?;
    let (rn, rd) = reduced(ctx.phi(), l);
    emit!(out, "L={l}");
    emit!(out, "m_L={}", ctx.degree());
    emit!(out, "phi={}", ctx.phi());
    emit!(out, "rate={rn}/{rd}");
    emit!(out, "modulus={}", ctx.modulus());
    let cosets: Vec<String> = ctx.cosets().iter().map(|c| format!("{{{}}}", join(c))).collect();
    emit!(out, "cosets={}", cosets.join(" "));
    emit!(out, "coprime_cosets={}", ctx.coprime_cosets().count());
    if let Some(delta) = delta {
        emit!(out, "delta={delta}");
        emit!(out, "pool_size={}", pool_size(l, delta));
        let k = k_delta(&ctx, delta, DEFAULT_POOL_CAP).map_err(|e| CliError::Input(e.to_string()))?;
        match receivers {
            Some(t) => emit_feasibility(out, &feasibility_from(ctx.degree(), ctx.phi(), k, t))?,
            None => emit!(out, "K_delta={k}"),
        }
    }
    Ok(EXIT_OK)
}

fn build(
    net_arg: &str,
    l: usize,
    delta: usize,
    choice: JChoice,
    path: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    let net = read_network(net_arg)?;
    let ctx = context(l)?;
    let feas = k_delta(&ctx, delta, DEFAULT_POOL_CAP)
        .map(|k| feasibility_from(ctx.degree(), ctx.phi(), k, net.receivers().len()));
    let scalar = construct(&net, &ctx, delta).map_err(|e| match e {
        BuildError::SelectionExhausted { .. } | BuildError::Invariant(_) => {
            CliError::Construction(format!("construction failed: {e}"))
        }
        other => CliError::Input(other.to_string()),
    })?;
    let failed = |e: crate::error::CodeError| CliError::Construction(format!("construction failed: {e}"));
    let mut code = CircularShiftCode::induce(&scalar, &net, &ctx).map_err(failed)?;
    match choice {
        JChoice::Derived => code.attach_source_matrix(&ctx).map_err(failed)?,
        JChoice::Coprime => code.restrict_solution_set(ctx.coprime(), &ctx).map_err(failed)?,
    }
    code.attach_decoders(&net).map_err(failed)?;
    let file = code_file(&net, &ctx, delta, &code);
    std::fs::write(path, file.to_json() + "\n").map_err(input(&path.display().to_string()))?;

    let (j, _) = code.rate();
    emit!(out, "L={l}");
    emit!(out, "delta={delta}");
    emit!(out, "omega={}", net.omega());
    emit!(out, "J_set={}", join(code.solution_indices()));
    emit!(out, "rate={j}/{l}");
    emit!(out, "max_weight={}", scalar.max_weight());
    match &feas {
        Ok(f) => {
            emit_feasibility(out, f)?;
            if !f.guaranteed {
                let _ = writeln!(
                    err,
                    "warning: floor(m_L*K_delta/phi) = {} does not exceed |T| = {}; success was not guaranteed",
                    f.bound, f.receivers
                );
            }
        }
        Err(e) => emit!(out, "feasibility=unknown ({e})"),
    }
    emit!(out, "out={}", path.display());
    Ok(EXIT_OK)
}

fn code_file(net: &MulticastNetwork, ctx: &FieldContext, delta: usize, code: &CircularShiftCode) -> CodeFile {
    let l = code.block_length();
    let decoders: BTreeMap<String, Vec<String>> = code
        .decoders()
        .iter()
        .map(|(&t, d)| (net.node_name(t).to_string(), d.to_bitstrings()))
        .collect();
    CodeFile {
        l,
        delta,
        modulus: ctx.modulus().to_bitstring(ctx.degree() + 1),
        kernels: code
            .kernel_polys()
            .iter()
            .map(|(&(d, e), p)| KernelEntry { d, e, poly: p.to_bitstring(l) })
            .collect(),
        j_set: code.solution_indices().to_vec(),
        g: code.g().map(|g| g.to_bitstrings()).unwrap_or_default(),
        decoders,
    }
}

/// A code file bound to a network: the scalar code, its induced vector
/// code with the file's `G`, `J_set` and decoders installed, and the
/// solution set re-derived from the kernels alone.
struct LoadedCode {
    file: CodeFile,
    ctx: FieldContext,
    scalar: ScalarCode,
    code: CircularShiftCode,
    derived: Vec<usize>,
    missing_decoders: Vec<String>,
}

fn load_code(net: &MulticastNetwork, path: &Path) -> Result<LoadedCode, CliError> {
    let shown = path.display().to_string();
    let text = std::fs::read_to_string(path).map_err(input(&shown))?;
    let file = CodeFile::parse(&text).map_err(input(&shown))?;
    let ctx = FieldContext::with_modulus(file.l, file.modulus_poly()?).map_err(input(&shown))?;
    let scalar = ScalarCode::new(net, file.l, None, file.kernel_map()?).map_err(input(&shown))?;
    let mut code = CircularShiftCode::induce(&scalar, net, &ctx).map_err(input(&shown))?;
    let derived = code.solution_indices().to_vec();
    let g = file.g_matrix()?;
    code.set_source_matrix(file.j_set.clone(), g);
    let cols = net.omega() * file.j_set.len();
    let mut missing_decoders = Vec::new();
    for &t in net.receivers() {
        let name = net.node_name(t);
        match file.decoder(name, cols)? {
            Some(d) => code.set_decoder(t, d),
            None => missing_decoders.push(name.to_string()),
        }
    }
    Ok(LoadedCode { file, ctx, scalar, code, derived, missing_decoders })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn verify(net_arg: &str, path: &Path, out: &mut dyn Write) -> Result<i32, CliError> {
    let net = read_network(net_arg)?;
    let lc = load_code(&net, path)?;
    let LoadedCode { file, ctx, scalar, code, derived, .. } = &lc;
    let omega = net.omega();
    let mut all = true;
    let mut row = |out: &mut dyn Write, ok: bool, text: String| -> Result<(), CliError> {
        all &= ok;
        emit!(out, "{:<4} {text}", verdict(ok));
        Ok(())
    };

    let closed = SolutionSet::new(file.j_set.iter().copied(), file.l);
    let subset = file.j_set.iter().all(|j| derived.contains(j));
    row(
        out,
        closed.is_ok() && subset,
        format!(
            "check=J_set J_set={} derived={}{}",
            join(&file.j_set),
            join(derived),
            match &closed {
                Err(e) => format!(" reason=\"{e}\""),
                Ok(_) if !subset => " reason=\"not contained in the derived solution set\"".into(),
                Ok(_) => String::new(),
            }
        ),
    )?;
    let bits = source_matrix(&file.j_set, ctx, omega);
    row(
        out,
        bits.is_ok(),
        format!(
            "check=G-bit-valued{}",
            bits.as_ref().err().map(|e| format!(" reason=\"{e}\"")).unwrap_or_default()
        ),
    )?;
    let heavy: Vec<String> = scalar
        .kernels()
        .iter()
        .filter(|(_, p)| p.weight() > file.delta)
        .map(|(&(d, e), p)| format!("(e{d},e{e}):{}", p.weight()))
        .collect();
    row(
        out,
        heavy.is_empty(),
        format!(
            "check=kernel-weight delta={} max_weight={}{}",
            file.delta,
            scalar.max_weight(),
            if heavy.is_empty() { String::new() } else { format!(" over={}", heavy.join(",")) }
        ),
    )?;

    for &t in net.receivers() {
        let name = net.node_name(t);
        let mut bad_j = Vec::new();
        for &j in file.j_set.iter().filter(|&&j| j < file.l) {
            let rank = scalar.receiver_rank(&net, ctx, t, j).map_err(input("rank"))?;
            if rank != omega {
                bad_j.push(j);
            }
        }
        row(
            out,
            bad_j.is_empty(),
            if bad_j.is_empty() {
                format!("receiver={name} check=scalar-rank")
            } else {
                format!("receiver={name} check=scalar-rank j={}", join(&bad_j))
            },
        )?;

        let (lhs, rhs) = code.rank_relation_check(scalar, &net, ctx, t).map_err(input("rank"))?;
        row(out, lhs == rhs, format!("receiver={name} check=rank-relation lhs={lhs} rhs={rhs}"))?;

        let (rank, need) = code.solution_rank_check(&net, t).map_err(input("rank"))?;
        row(out, rank == need, format!("receiver={name} check=source-rank rank={rank} need={need}"))?;

        let ident = code.decoder_identity_holds(&net, t);
        let note = if lc.missing_decoders.iter().any(|m| m == name) { " reason=\"missing\"" } else { "" };
        row(out, ident, format!("receiver={name} check=decoder-identity{note}"))?;
    }
    emit!(out, "verdict={}", verdict(all));
    Ok(if all { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn simulate(net_arg: &str, path: &Path, trials: usize, seed: u64, out: &mut dyn Write) -> Result<i32, CliError> {
    let net = read_network(net_arg)?;
    let lc = load_code(&net, path)?;
    if !lc.missing_decoders.is_empty() {
        return Err(CliError::Input(format!(
            "code file has no decoder for {}",
            lc.missing_decoders.join(", ")
        )));
    }
    let code = &lc.code;
    let (omega, j) = (net.omega(), lc.file.j_set.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0;
    let mut ops = OpCounts::default();
    let mut first_failure = None;
    for trial in 0..trials {
        let msg = SourceMessage::random(omega, j, &mut rng);
        let (decoded, used) = round_trip(&net, code, &msg).map_err(|e| CliError::Simulation(e.to_string()))?;
        ops += used;
        match decoded.iter().position(|m| m != &msg) {
            None => successes += 1,
            Some(i) if first_failure.is_none() => first_failure = Some((trial, net.node_name(net.receivers()[i]))),
            Some(_) => {}
        }
    }
    let stat = shift_op_count(&net, code).total;
    emit!(out, "seed={seed}");
    emit!(out, "trials={trials}");
    emit!(out, "successes={successes}");
    emit!(out, "rate={j}/{}", lc.file.l);
    emit!(out, "shifts_per_message={}", stat.shifts);
    emit!(out, "unit_xors_per_message={}", stat.unit_xors);
    emit!(out, "word_xors_per_message={}", stat.word_xors);
    emit!(out, "total_shifts={}", ops.shifts);
    emit!(out, "total_word_xors={}", ops.word_xors);
    if let Some((trial, name)) = first_failure {
        emit!(out, "result=FAIL");
        return Err(CliError::Simulation(format!(
            "{} of {trials} messages decoded incorrectly (first: trial {trial} at {name})",
            trials - successes
        )));
    }
    emit!(out, "result=PASS");
    Ok(EXIT_OK)
}
