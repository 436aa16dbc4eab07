//! `cptf` command surface. [`run`] takes an argument list and returns the
//! exit code with both output streams, so the binary and the tests share it.
//!
//! Exit codes: 0 success, 1 failed verification or numerical breakdown,
//! 2 usage or input error.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{phase, ComplexMatrix, DensityMatrix, StateVector};
use crate::protocol::{run_with_trials, ChannelMode, Encoding, ProtocolSetup};
use crate::reps::{
    build_subbasis, cpt_eigenbasis, parse_rational, parse_spin, verify_group, GroupReport, PhaseConfig,
    RepresentationSet, SpeciesLabel, SubBasis, Transformation,
};
use crate::ssr::{
    alignment_rate, dfs_subspace, helstrom_success, helstrom_success_closed_form, resource_state, sector_projectors,
    standard_form, twirl, ResourceForm, Sector,
};
use crate::wave_eqs::{
    clifford_check, dispersion_scan, majorana_set, su2_check, wsg_check, GammaSet, SpinOneSet, WaveEquation,
};

pub const SIGNIFICANT_DIGITS: usize = 12;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_SEED: u64 = 0;

#[derive(Parser, Debug)]
#[command(
    name = "cptf",
    version,
    about = "CPT representations, superselection sectors and frameness resources"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct GlobalArgs {
    /// Master seed for Monte-Carlo commands
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Numerical tolerance (> 0)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Phase of C, radians
    #[arg(long = "theta-c", global = true, allow_negative_numbers = true)]
    theta_c: Option<f64>,
    /// Phase of PT, radians
    #[arg(long = "theta-pt", global = true, allow_negative_numbers = true)]
    theta_pt: Option<f64>,
    /// Output format
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// key = value file supplying defaults for the options above
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for parallel scans (results do not depend on it)
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Representation operators and eigenstates
    #[command(subcommand)]
    Rep(RepCommand),
    /// Algebraic checks, emitting {check, max_deviation, pass}
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Kernel dimension on and off the mass shell for random momenta
    Dispersion {
        /// kg | dirac | weyl | wsg | bbs
        equation: String,
        /// Number of random draws (two rows each)
        #[arg(long)]
        scan: usize,
    },
    /// Average a density matrix over {1, CPT}
    Twirl {
        #[command(flatten)]
        rep: RepArgs,
        /// Density-matrix JSON file, `-` for stdin
        #[arg(long)]
        input: PathBuf,
    },
    /// Sector weights and alignment rate
    Rate {
        #[command(flatten)]
        source: StateSource,
    },
    /// Helstrom success for telling ψ⊗ⁿ from (CPT ψ)⊗ⁿ
    Distinguish {
        #[command(flatten)]
        source: StateSource,
        #[arg(long, default_value_t = 1)]
        copies: usize,
    },
    /// Alice→Bob simulations
    #[command(subcommand)]
    Protocol(ProtocolCommand),
    /// Decoherence-free subspaces of the CPT sectors
    Dfs {
        #[command(flatten)]
        rep: RepArgs,
    },
}

#[derive(Subcommand, Debug)]
enum RepCommand {
    /// Operators for 1, C, PT and CPT
    Build {
        #[command(flatten)]
        rep: RepArgs,
    },
    /// CPT eigenstates (|b> ± CPT|b>)/√2
    Eigen {
        #[command(flatten)]
        rep: RepArgs,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Clifford relations of the Dirac (or Majorana) gamma matrices
    Clifford {
        #[arg(long)]
        majorana: bool,
    },
    /// su(2) relations and Casimir of the spin-1 matrices
    Su2,
    /// Closure and phases of {1, C, PT, CPT}
    Group {
        #[command(flatten)]
        rep: RepArgs,
    },
    /// Structure of the spin-1 γ^{μν} tensor
    Wsg,
}

#[derive(Subcommand, Debug)]
enum ProtocolCommand {
    Run {
        #[arg(long, default_value = "dfs")]
        encoding: String,
        /// random | id | cpt
        #[arg(long, default_value = "random")]
        mode: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Token sector weight q0; enables token-assisted decoding
        #[arg(long = "token-q0")]
        token_q0: Option<f64>,
        #[arg(long, default_value_t = 1)]
        tokens: usize,
        /// Write every trial as CSV
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long, default_value = "1")]
        u: String,
        #[arg(long, default_value_t = 1.0)]
        p: f64,
    },
}

/// Selects a sub-basis: a named species, or spin and `u`.
#[derive(Args, Debug, Clone)]
struct RepArgs {
    /// Spin: 0, 1/2 or 1
    #[arg(long, default_value = "0")]
    spin: String,
    /// Total internal quantum number Q + (B − L), integer or fraction
    #[arg(long, default_value = "1", allow_negative_numbers = true)]
    u: String,
    /// Named species (overrides --spin and --u)
    #[arg(long)]
    species: Option<String>,
    /// Momentum magnitude
    #[arg(long, default_value_t = 1.0)]
    p: f64,
    #[arg(long)]
    massless: bool,
    /// Keep only the two transverse helicities of a massless spin-1 field
    #[arg(long)]
    photon: bool,
}

#[derive(Args, Debug)]
struct StateSource {
    /// Standard-form weight of the + sector
    #[arg(long, conflicts_with = "state")]
    q0: Option<f64>,
    /// State-vector JSON file, `-` for stdin
    #[arg(long)]
    state: Option<PathBuf>,
    #[command(flatten)]
    rep: RepArgs,
}

/// Effective options after merging the config file under the flags.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub phases: PhaseConfig,
    pub tol: f64,
    pub seed: u64,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Output {
    text: String,
    pass: bool,
}

impl RunConfig {
    fn resolve(global: &GlobalArgs) -> Result<Self> {
        let file = match &global.config {
            Some(path) => parse_config(&read_text(path)?)?,
            None => Vec::new(),
        };
        let lookup = |key: &str| file.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str());
        fn num<T: std::str::FromStr>(key: &str, v: Option<&str>) -> Result<Option<T>> {
            v.map(|s| {
                s.parse::<T>()
                    .map_err(|_| Error::Usage(format!("config: bad value {s:?} for {key}")))
            })
            .transpose()
        }
        let tol = global.tol.or(num("tol", lookup("tol"))?).unwrap_or(DEFAULT_TOL);
        if !tol.is_finite() || tol <= 0.0 {
            return Err(Error::Usage(format!("tol must be positive, got {tol}")));
        }
        let format = match (global.format, lookup("format")) {
            (Some(f), _) => Some(f),
            (None, Some(s)) => {
                Some(Format::from_str(s, true).map_err(|_| Error::Usage(format!("config: bad format {s:?}")))?)
            }
            (None, None) => None,
        };
        let theta_c = global.theta_c.or(num("theta_c", lookup("theta_c"))?).unwrap_or(0.0);
        let theta_pt = global.theta_pt.or(num("theta_pt", lookup("theta_pt"))?).unwrap_or(0.0);
        for (key, _) in &file {
            if !["seed", "tol", "theta_c", "theta_pt", "format", "threads"].contains(&key.as_str()) {
                return Err(Error::Usage(format!("config: unknown key {key:?}")));
            }
        }
        Ok(Self {
            phases: PhaseConfig::new(theta_c, theta_pt),
            tol,
            seed: global.seed.or(num("seed", lookup("seed"))?).unwrap_or(DEFAULT_SEED),
            format,
            threads: global.threads.or(num("threads", lookup("threads"))?),
        })
    }
}

/// `key = value` lines; `#` starts a comment. Keys accept `-` for `_`.
pub fn parse_config(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Usage(format!("config line {}: expected key = value", n + 1)))?;
        out.push((k.trim().replace('-', "_"), v.trim().to_string()));
    }
    Ok(out)
}

fn read_text(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        Ok(fs::read_to_string(path)?)
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(round_sig).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serializes with every float rounded for printing.
pub fn to_rounded_value<T: Serialize>(value: &T) -> Result<Value> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    Ok(v)
}

fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&to_rounded_value(value)?)?;
    s.push('\n');
    Ok(s)
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// CSV with a header from the field names of flat records; nested fields
/// are skipped.
pub fn csv_text<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header_written = false;
    for row in rows {
        let Value::Object(map) = to_rounded_value(row)? else {
            return Err(Error::Usage("CSV output needs record rows".into()));
        };
        let flat: Vec<(&String, &Value)> = map.iter().filter(|(_, v)| !v.is_array() && !v.is_object()).collect();
        if !header_written {
            w.write_record(flat.iter().map(|(k, _)| k.as_str()))
                .map_err(csv_error)?;
            header_written = true;
        }
        w.write_record(flat.iter().map(|(_, v)| scalar_text(v)))
            .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::InvalidData(e.to_string()))
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

fn emit<T: Serialize>(value: &T, format: Format) -> Result<String> {
    match format {
        Format::Json => json_text(value),
        Format::Csv => csv_text(std::slice::from_ref(value)),
    }
}

fn json_only(cfg: &RunConfig, command: &str) -> Result<()> {
    if cfg.format == Some(Format::Csv) {
        return Err(Error::Usage(format!("{command} has no CSV form")));
    }
    Ok(())
}

impl RepArgs {
    fn species(&self) -> Result<SpeciesLabel> {
        if let Some(name) = &self.species {
            return SpeciesLabel::preset(name).ok_or_else(|| Error::Usage(format!("unknown species {name:?}")));
        }
        let spin2 = parse_spin(&self.spin)?;
        let u = parse_rational(&self.u)?;
        Ok(SpeciesLabel::with_u(u, spin2, !self.massless && !self.photon))
    }

    fn subbasis(&self) -> Result<SubBasis> {
        build_subbasis(&self.species()?, self.p, self.photon)
    }

    fn representation(&self, cfg: &RunConfig) -> Result<RepresentationSet> {
        RepresentationSet::build(self.subbasis()?, cfg.phases)
    }
}

#[derive(Serialize)]
struct Operators<'a> {
    #[serde(rename = "1")]
    identity: &'a ComplexMatrix,
    #[serde(rename = "C")]
    c: &'a ComplexMatrix,
    #[serde(rename = "PT")]
    pt: &'a ComplexMatrix,
    #[serde(rename = "CPT")]
    cpt: &'a ComplexMatrix,
}

#[derive(Serialize)]
struct GroupCheck {
    check: &'static str,
    max_deviation: f64,
    pass: bool,
    group: GroupReport,
}

fn group_check(rep: &RepresentationSet, tol: f64) -> GroupCheck {
    let report = verify_group(rep, tol);
    let mut max_deviation: f64 = 0.0;
    for e in &report.table {
        let product = rep.operator(e.left) * rep.operator(e.right);
        let target = e.result.unwrap_or_else(|| e.left.compose(e.right));
        let expected = rep.operator(target).scale(phase(e.phase));
        max_deviation = max_deviation.max(product.max_abs_diff(&expected));
    }
    let pass = report.closed && report.abelian && report.failures.is_empty();
    GroupCheck {
        check: "group",
        max_deviation,
        pass,
        group: report,
    }
}

fn load_state(source: &StateSource) -> Result<Option<StateVector>> {
    match &source.state {
        Some(path) => Ok(Some(serde_json::from_str(&read_text(path)?)?)),
        None => Ok(None),
    }
}

/// The CPT operator of the selected sub-basis with the configured phases.
fn cpt_of(rep: &RepArgs, cfg: &RunConfig) -> Result<ComplexMatrix> {
    Ok(rep.representation(cfg)?.operator(Transformation::CPT).clone())
}

fn dispatch(cmd: Command, cfg: &RunConfig) -> Result<Output> {
    let ok = |text| Ok(Output { text, pass: true });
    match cmd {
        Command::Rep(RepCommand::Build { rep }) => {
            json_only(cfg, "rep build")?;
            let set = rep.representation(cfg)?;
            ok(json_text(&json!({
                "subbasis": &set.subbasis,
                "phases": {
                    "theta_c": cfg.phases.theta_c,
                    "theta_pt": cfg.phases.theta_pt,
                    "theta_cpt": cfg.phases.theta_cpt(),
                },
                "operators": Operators {
                    identity: &set.op_identity,
                    c: &set.op_c,
                    pt: &set.op_pt,
                    cpt: &set.op_cpt,
                },
            }))?)
        }
        Command::Rep(RepCommand::Eigen { rep }) => {
            json_only(cfg, "rep eigen")?;
            let set = rep.representation(cfg)?;
            let states = cpt_eigenbasis(&set.op_cpt, &set.subbasis)?;
            let count = |s: Sector| states.iter().filter(|e| e.sector == s).count();
            ok(json_text(&json!({
                "subbasis": &set.subbasis,
                "dim_plus": count(Sector::Plus),
                "dim_minus": count(Sector::Minus),
                "eigenstates": states,
            }))?)
        }
        Command::Verify(v) => {
            let format = cfg.format.unwrap_or(Format::Json);
            let (text, pass) = match v {
                VerifyCommand::Clifford { majorana } => {
                    let set = if majorana { majorana_set()? } else { GammaSet::dirac() };
                    let mut r = clifford_check(&set, cfg.tol);
                    if majorana {
                        r.check = "clifford-majorana".into();
                    }
                    (emit(&r, format)?, r.pass)
                }
                VerifyCommand::Su2 => {
                    let r = su2_check(&SpinOneSet::standard(), cfg.tol);
                    (emit(&r, format)?, r.pass)
                }
                VerifyCommand::Wsg => {
                    let r = wsg_check(&SpinOneSet::standard(), cfg.tol);
                    (emit(&r, format)?, r.pass)
                }
                VerifyCommand::Group { rep } => {
                    let r = group_check(&rep.representation(cfg)?, cfg.tol);
                    (emit(&r, format)?, r.pass)
                }
            };
            Ok(Output { text, pass })
        }
        Command::Dispersion { equation, scan } => {
            let eq: WaveEquation = equation.parse()?;
            let rows = dispersion_scan(eq, scan, cfg.seed, cfg.tol)?;
            match cfg.format.unwrap_or(Format::Csv) {
                Format::Csv => ok(csv_text(&rows)?),
                Format::Json => ok(json_text(&rows)?),
            }
        }
        Command::Twirl { rep, input } => {
            json_only(cfg, "twirl")?;
            let m: ComplexMatrix = serde_json::from_str(&read_text(&input)?)?;
            let rho = DensityMatrix::new(m, cfg.tol)?;
            ok(json_text(&twirl(&rho, &cpt_of(&rep, cfg)?)?)?)
        }
        Command::Rate { source } => {
            let form = match (source.q0, load_state(&source)?) {
                (Some(q0), _) => ResourceForm::new(q0)?,
                (None, Some(psi)) => {
                    let decomp = sector_projectors(&cpt_of(&source.rep, cfg)?, cfg.tol)?;
                    standard_form(&psi, &decomp, cfg.tol)?
                }
                (None, None) => return Err(Error::Usage("rate needs --q0 or --state".into())),
            };
            let out = json!({ "q0": form.q0, "q1": form.q1, "rate_bits": alignment_rate(&form) });
            ok(emit(&out, cfg.format.unwrap_or(Format::Json))?)
        }
        Command::Distinguish { source, copies } => {
            let u = cpt_of(&source.rep, cfg)?;
            let decomp = sector_projectors(&u, cfg.tol)?;
            let psi = match (source.q0, load_state(&source)?) {
                (Some(q0), _) => resource_state(q0, &decomp)?,
                (None, Some(psi)) => psi,
                (None, None) => return Err(Error::Usage("distinguish needs --q0 or --state".into())),
            };
            let form = standard_form(&psi, &decomp, cfg.tol)?;
            let out = json!({
                "q0": form.q0,
                "q1": form.q1,
                "copies": copies,
                "success_probability": helstrom_success(&psi, &u, copies, cfg.tol)?,
                "pure_state_formula": helstrom_success_closed_form(&psi, &u, copies),
            });
            ok(emit(&out, cfg.format.unwrap_or(Format::Json))?)
        }
        Command::Protocol(ProtocolCommand::Run {
            encoding,
            mode,
            trials,
            token_q0,
            tokens,
            dump,
            u,
            p,
        }) => {
            let encoding: Encoding = encoding.parse()?;
            let mode: ChannelMode = mode.parse()?;
            let setup = ProtocolSetup::spin_zero(&SpeciesLabel::with_u(parse_rational(&u)?, 0, true), p)?;
            let encoder = setup.encoder(encoding)?;
            let channel = setup.channel(mode);
            let token_state = match token_q0 {
                Some(q0) => Some(resource_state(q0, &sector_projectors(&setup.u_cpt, cfg.tol)?)?),
                None => None,
            };
            let (report, records) = run_with_trials(
                &encoder,
                &channel,
                token_state.as_ref().map(|t| (t, tokens)),
                trials,
                cfg.seed,
            )?;
            if let Some(path) = dump {
                fs::write(path, csv_text(&records)?)?;
            }
            ok(emit(&report, cfg.format.unwrap_or(Format::Json))?)
        }
        Command::Dfs { rep } => {
            json_only(cfg, "dfs")?;
            let set = rep.representation(cfg)?;
            let decomp = sector_projectors(&set.op_cpt, cfg.tol)?;
            let basis = |s| {
                if decomp.dim(s) == 0 {
                    Ok(Vec::new())
                } else {
                    dfs_subspace(&decomp, s)
                }
            };
            ok(json_text(&json!({
                "subbasis": &set.subbasis,
                "dim_plus": decomp.dim_plus,
                "dim_minus": decomp.dim_minus,
                "qubit_plus": decomp.dim_plus >= 2,
                "qubit_minus": decomp.dim_minus >= 2,
                "basis_plus": basis(Sector::Plus)?,
                "basis_minus": basis(Sector::Minus)?,
            }))?)
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Construction(_) => 1,
        _ => 2,
    }
}

fn execute(cli: Cli) -> Result<Output> {
    let cfg = RunConfig::resolve(&cli.global)?;
    match cfg.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
            pool.install(|| dispatch(cli.command, &cfg))
        }
        None => dispatch(cli.command, &cfg),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Outcome {
                    code: 2,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match execute(cli) {
        Ok(out) => Outcome {
            code: if out.pass { 0 } else { 1 },
            stdout: out.text,
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}
