use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use lieplateau_core::compound::{self, build_generators, Topology, Variant};
use lieplateau_core::dla::{lie_closure, DlaBasis, DEFAULT_MAX_DIM, DEFAULT_TOL};
use lieplateau_core::experiments::{self, ExperimentRow, Figure, DEFAULT_SAMPLES};
use lieplateau_core::ideals::decompose;
use lieplateau_core::io::{parse_state, AnsatzFile, BasisFile, IdealsFile, RunReport, REPORT_SCHEMA};
use lieplateau_core::mixing::{mixing_report, WALK_DIM_CAP};
use lieplateau_core::pauli::{parse_operators, HermitianObservable, Operator, PauliTerm, SkewElement};
use lieplateau_core::simulator::{estimate_gradvar, AnsatzSpec, Circuit, Generator, Observable, Space};
use lieplateau_core::state::InitialState;
use lieplateau_core::variance::{exact_adjoint_oracle, gradvar_predict, lasa_residual, ORACLE_DIM_CAP};
use lieplateau_core::Error;

const THREADS_ENV: &str = "LIEPLATEAU_THREADS";

#[derive(Parser, Serialize)]
#[command(name = "lieplateau", version, about = "Gradient-variance predictions from dynamical Lie algebras")]
struct Cli {
    /// Emit CSV instead of JSON (series-producing commands only).
    #[arg(long, global = true, conflicts_with = "json")]
    csv: bool,
    /// Emit JSON (default).
    #[arg(long, global = true)]
    json: bool,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Lie closure of a generator file.
    Dla(DlaArgs),
    /// Simple-ideal decomposition of a stored basis.
    Ideals(IdealsArgs),
    /// Variance formula for one generator and observable.
    Predict(PredictArgs),
    /// Monte Carlo gradient variance of an ansatz.
    Simulate(SimulateArgs),
    /// Closed forms for the quantum compound ansatz.
    Compound(CompoundArgs),
    /// Moment-walk spectral gap and decay.
    Mixing(MixingArgs),
    /// Compound-ansatz figure series.
    Reproduce(ReproduceArgs),
}

#[derive(Args, Serialize)]
struct DlaArgs {
    #[arg(long)]
    generators: PathBuf,
    #[arg(long, default_value_t = DEFAULT_MAX_DIM)]
    max_dim: usize,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args, Serialize)]
struct IdealsArgs {
    #[arg(long)]
    basis: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct PredictArgs {
    #[arg(long)]
    generators: PathBuf,
    /// Reuse a stored closure instead of recomputing it.
    #[arg(long)]
    basis: Option<PathBuf>,
    #[arg(long)]
    observable: PathBuf,
    #[arg(long)]
    state: String,
    #[arg(long)]
    generator_index: usize,
    /// Also evaluate the adjoint-space oracle.
    #[arg(long)]
    oracle: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct SimulateArgs {
    #[arg(long)]
    ansatz: PathBuf,
    /// Operator file with a `hermitian` block, or `projector` for the input basis state.
    #[arg(long)]
    observable: String,
    #[arg(long)]
    state: String,
    /// Parameter index; defaults to the middle gate of the middle layer.
    #[arg(long)]
    slot: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long)]
    seed: u64,
    /// Restrict to the Hamming sector of a basis-state input.
    #[arg(long)]
    sector_sim: bool,
}

#[derive(Args, Serialize)]
struct CompoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "su")]
    variant: String,
    #[arg(long, default_value = "brick")]
    topology: String,
    #[arg(long, default_value = "hamming:1")]
    state: String,
    /// `hz:I,J` (1-based qubits), `z:I` for Z_I/4, or `projector`.
    #[arg(long, default_value = "hz:1,2")]
    observable: String,
    /// Closed-form and formula predictions.
    #[arg(long)]
    predict: bool,
    /// Monte Carlo estimate with this many samples.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to 12n.
    #[arg(long)]
    layers: Option<usize>,
}

#[derive(Args, Serialize)]
struct MixingArgs {
    #[arg(long)]
    basis: PathBuf,
    #[arg(long, default_value_t = 2)]
    t: usize,
    /// Length of the decay curve.
    #[arg(long, default_value_t = 40)]
    decay: usize,
}

#[derive(Args, Serialize)]
struct ReproduceArgs {
    #[arg(long, default_value = "fig2")]
    figure: String,
    /// Comma-separated qubit counts.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 6, 8])]
    n: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Error plus the process exit code it maps to.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 2,
            Error::Infeasible(_) | Error::TooManyQubits { .. } | Error::Truncated(_) | Error::Overflow(_) => 3,
            Error::NonLasa { .. } | Error::NotInAlgebra { .. } => 4,
            Error::Validation(_) | Error::Decomposition(_) => 5,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn parse_err(msg: String) -> Failure {
    Error::Parse(msg).into()
}

fn read(path: &Path) -> Res<String> {
    fs::read_to_string(path).map_err(|e| parse_err(format!("{}: {e}", path.display())))
}

/// Reads a JSON file, unwrapping the report envelope if the file is a saved
/// command output.
fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Res<T> {
    let bad = |e: serde_json::Error| parse_err(format!("{}: {e}", path.display()));
    let mut v: Value = serde_json::from_str(&read(path)?).map_err(bad)?;
    if v.get("schema").and_then(Value::as_str) == Some(REPORT_SCHEMA) {
        v = v["result"].take();
    }
    serde_json::from_value(v).map_err(bad)
}

fn read_operators(path: &Path) -> Res<Vec<Operator>> {
    parse_operators(&read(path)?).map_err(|e| parse_err(format!("{}: {e}", path.display())))
}

fn read_observable(path: &Path) -> Res<HermitianObservable> {
    match read_operators(path)?.as_slice() {
        [op] => Ok(op.hermitian()),
        ops => Err(parse_err(format!("{}: expected one operator, found {}", path.display(), ops.len()))),
    }
}

fn read_basis(path: &Path) -> Res<DlaBasis<SkewElement>> {
    Ok(read_json::<BasisFile>(path)?.to_basis()?)
}

/// What a command produced: a JSON payload and optionally a CSV table.
struct Output {
    result: Value,
    csv: Option<String>,
    warnings: Vec<String>,
}

fn dla(a: &DlaArgs) -> Res<Output> {
    let gens: Vec<SkewElement> = read_operators(&a.generators)?.iter().map(Operator::skew).collect();
    let basis = lie_closure(&gens, a.max_dim, a.tol)?;
    let mut warnings = Vec::new();
    if basis.truncated {
        warnings.push(format!("closure truncated at dimension {}; the result is a lower bound", basis.dim()));
    }
    let file = BasisFile::from_basis(&basis)?;
    Ok(Output { result: serde_json::to_value(file).unwrap(), csv: None, warnings })
}

fn ideals(a: &IdealsArgs) -> Res<Output> {
    let basis = read_basis(&a.basis)?;
    if basis.truncated {
        return Err(Error::Truncated(basis.dim()).into());
    }
    let dec = decompose(&basis, a.seed)?;
    Ok(Output { result: serde_json::to_value(IdealsFile::from_decomposition(&dec)).unwrap(), csv: None, warnings: vec![] })
}

fn predict(a: &PredictArgs) -> Res<Output> {
    let gens: Vec<SkewElement> = read_operators(&a.generators)?.iter().map(Operator::skew).collect();
    let h = gens.get(a.generator_index).ok_or_else(|| parse_err(format!("generator index {} out of range ({} generators)", a.generator_index, gens.len())))?;
    let obs = read_observable(&a.observable)?;
    let n = h.n_qubits();
    let rho = parse_state(&a.state, n)?;
    let basis = match &a.basis {
        Some(p) => read_basis(p)?,
        None => lie_closure(&gens, DEFAULT_MAX_DIM, DEFAULT_TOL)?,
    };
    if basis.truncated {
        return Err(Error::Truncated(basis.dim()).into());
    }
    let io = obs.to_skew();
    let residual = lasa_residual(&basis, &io)?;
    let dec = decompose(&basis, a.seed)?;
    let report = gradvar_predict(h, &io, &rho, &basis, &dec)?;
    let mut result = json!({ "report": report, "lasa_residual": residual });
    let mut warnings = Vec::new();
    if a.oracle {
        if basis.dim() <= ORACLE_DIM_CAP {
            let o = exact_adjoint_oracle(h, &io, &rho, &basis)?;
            result["oracle"] = json!(o);
            result["oracle_rel_diff"] = json!((o - report.gradvar).abs() / o.abs().max(f64::MIN_POSITIVE));
        } else {
            warnings.push(format!("oracle skipped: dimension {} above {ORACLE_DIM_CAP}", basis.dim()));
        }
    }
    Ok(Output { result, csv: None, warnings })
}

fn simulate(a: &SimulateArgs) -> Res<Output> {
    let file: AnsatzFile = read_json(&a.ansatz)?;
    let n = file.n_qubits().ok_or_else(|| parse_err("ansatz needs n_qubits".into()))?;
    let spec = file.to_spec()?;
    let rho = parse_state(&a.state, n)?;
    let (obs, pauli_obs) = if a.observable == "projector" {
        match rho {
            InitialState::Bits { bits, .. } => (Observable::BasisProjector(bits), None),
            _ => return Err(parse_err("projector observable needs a basis-state input".into())),
        }
    } else {
        let o = read_observable(Path::new(&a.observable))?;
        (Observable::Pauli(o.clone()), Some(o))
    };
    let space = if a.sector_sim {
        match rho {
            InitialState::Bits { bits, .. } => Space::sector(n, bits.count_ones() as usize)?,
            _ => return Err(parse_err("--sector-sim needs a basis-state input".into())),
        }
    } else {
        Space::full(n)?
    };
    let slot = a.slot.unwrap_or_else(|| spec.default_slot());
    let h = match spec.slot_generator(slot)? {
        Generator::Pauli(p) => p.clone(),
        Generator::Dense(_) => return Err(parse_err("file ansatz generators are Pauli sums".into())),
    };
    let gens: Vec<SkewElement> = spec
        .generators
        .iter()
        .filter_map(|g| match g {
            Generator::Pauli(p) => Some(p.clone()),
            Generator::Dense(_) => None,
        })
        .collect();
    let circ = Circuit::new(spec, space)?;
    let psi = circ.space.state_vector(&rho)?;
    let mc = estimate_gradvar(&circ, &obs, &psi, slot, a.samples, a.seed)?;

    let mut warnings = Vec::new();
    let prediction = match pauli_obs {
        Some(o) => match lie_closure(&gens, DEFAULT_MAX_DIM, DEFAULT_TOL) {
            Ok(b) if !b.truncated => match decompose(&b, a.seed).and_then(|d| gradvar_predict(&h, &o.to_skew(), &rho, &b, &d)) {
                Ok(r) => Some(r.gradvar),
                Err(e) => {
                    warnings.push(format!("no prediction: {e}"));
                    None
                }
            },
            Ok(b) => {
                warnings.push(format!("no prediction: closure truncated at {}", b.dim()));
                None
            }
            Err(e) => {
                warnings.push(format!("no prediction: {e}"));
                None
            }
        },
        None => None,
    };
    let p = prediction.map(|v| format!("{v:e}")).unwrap_or_default();
    let csv = format!("n,prediction,estimate,stderr\n{n},{p},{:e},{:e}\n", mc.variance, mc.se_variance);
    Ok(Output { result: json!({ "n": n, "prediction": prediction, "estimate": mc }), csv: Some(csv), warnings })
}

enum CompoundObs {
    Hz(usize, usize),
    Z(usize),
    Projector,
}

fn parse_compound_obs(s: &str, n: usize) -> Res<CompoundObs> {
    let qubit = |t: &str| -> Res<usize> {
        let q: usize = t.trim().parse().map_err(|_| parse_err(format!("bad qubit '{t}'")))?;
        if q == 0 || q > n {
            return Err(parse_err(format!("qubit {q} outside 1..={n}")));
        }
        Ok(q - 1)
    };
    match s.split_once(':') {
        Some(("hz", pair)) => {
            let (i, j) = pair.split_once(',').ok_or_else(|| parse_err(format!("expected hz:I,J, got '{s}'")))?;
            let (i, j) = (qubit(i)?, qubit(j)?);
            if i == j {
                return Err(parse_err("hz needs two distinct qubits".into()));
            }
            Ok(CompoundObs::Hz(i.min(j), i.max(j)))
        }
        Some(("z", q)) => Ok(CompoundObs::Z(qubit(q)?)),
        None if s == "projector" => Ok(CompoundObs::Projector),
        _ => Err(parse_err(format!("unknown observable '{s}'"))),
    }
}

fn compound_cmd(a: &CompoundArgs) -> Res<Output> {
    let n = a.n;
    let variant: Variant = a.variant.parse()?;
    let topology: Topology = a.topology.parse()?;
    let rho = parse_state(&a.state, n)?;
    let obs_kind = parse_compound_obs(&a.observable, n)?;
    let layers = a.layers.unwrap_or(12 * n);
    let spec = AnsatzSpec::compound(n, topology, variant, layers)?;
    let slot = spec.default_slot();
    let h = match spec.slot_generator(slot)? {
        Generator::Pauli(p) => p.clone(),
        Generator::Dense(_) => unreachable!(),
    };
    let hz_obs = |i, j| -> Res<HermitianObservable> { Ok(compound::h_z(n, i, j)?.to_hermitian().scaled(-1.0)) };
    let (obs, pauli_obs) = match obs_kind {
        CompoundObs::Hz(i, j) => {
            let o = hz_obs(i, j)?;
            (Observable::Pauli(o.clone()), Some(o))
        }
        CompoundObs::Z(q) => {
            let o = HermitianObservable::from_terms(n, [(0.25, PauliTerm::single(n, q, 'Z')?)])?;
            (Observable::Pauli(o.clone()), Some(o))
        }
        CompoundObs::Projector => match rho {
            InitialState::Bits { bits, .. } => (Observable::BasisProjector(bits), None),
            _ => return Err(parse_err("projector observable needs a basis-state input".into())),
        },
    };

    let mut result = json!({ "n": n, "variant": variant, "topology": topology, "layers": layers, "slot": slot });
    let mut warnings = Vec::new();
    let mut csv_pred = None;
    if a.predict {
        let basis = lie_closure(&build_generators(n, topology, variant)?, DEFAULT_MAX_DIM, DEFAULT_TOL)?;
        result["dla_dim"] = json!(basis.dim());
        if variant == Variant::Su {
            let closed = match rho {
                InitialState::Bits { bits, .. } => Some(compound::predict_basis_state(n, bits.count_ones() as usize)?),
                InitialState::Uniform { .. } => Some(compound::predict_uniform(n)?),
                _ => None,
            };
            match (&obs_kind, closed) {
                (CompoundObs::Hz(..), Some(c)) => {
                    result["closed_form"] = json!(c);
                    csv_pred = Some(c);
                }
                (CompoundObs::Z(_), Some(c)) => {
                    result["zero_covariance_estimate"] = json!(c / 2.0);
                    csv_pred = Some(c / 2.0);
                }
                _ => {}
            }
        }
        if let Some(o) = &pauli_obs {
            let dec = decompose(&basis, a.seed)?;
            match gradvar_predict(&h, &o.to_skew(), &rho, &basis, &dec) {
                Ok(r) => result["formula"] = json!(r),
                Err(e @ Error::NonLasa { .. }) => warnings.push(format!("formula not applicable: {e}")),
                Err(e) => return Err(e.into()),
            }
        }
        if let (CompoundObs::Projector, InitialState::Bits { bits, .. }) = (&obs_kind, &rho) {
            if n % 2 == 0 && bits.count_ones() as usize == n / 2 {
                let b = compound::projector_bound(n, &h)?;
                result["projector_bound"] = json!(b);
                result["dim_v_lambda0"] = json!(compound::dim_v_lambda0(n)?.to_string());
                csv_pred = Some(b);
            } else {
                warnings.push("projector bound applies to the weight-n/2 sector of even n".into());
            }
        }
    }
    let mut csv = None;
    if let Some(samples) = a.samples {
        let space = match rho {
            InitialState::Bits { bits, .. } => Space::sector(n, bits.count_ones() as usize)?,
            _ => Space::full(n)?,
        };
        let circ = Circuit::new(spec, space)?;
        let psi = circ.space.state_vector(&rho)?;
        let mc = estimate_gradvar(&circ, &obs, &psi, slot, samples, a.seed)?;
        let p = csv_pred.map(|v| format!("{v:e}")).unwrap_or_default();
        csv = Some(format!("n,prediction,estimate,stderr\n{n},{p},{:e},{:e}\n", mc.variance, mc.se_variance));
        result["estimate"] = json!(mc);
    }
    Ok(Output { result, csv, warnings })
}

fn mixing(a: &MixingArgs) -> Res<Output> {
    let basis = read_basis(&a.basis)?;
    if basis.truncated {
        return Err(Error::Truncated(basis.dim()).into());
    }
    let d = basis.dim();
    if d.checked_pow(a.t as u32).map_or(true, |x| x > WALK_DIM_CAP) {
        return Err(Error::Infeasible(format!("walk on dimension {d}^{} (cap {WALK_DIM_CAP})", a.t)).into());
    }
    let ads = basis.adjoint_matrices()?;
    let report = mixing_report(&ads, a.t, a.decay)?;
    let mut csv = String::from("L,epsilon\n");
    for (l, e) in report.decay.iter().enumerate() {
        csv.push_str(&format!("{},{e:e}\n", l + 1));
    }
    Ok(Output { result: serde_json::to_value(report).unwrap(), csv: Some(csv), warnings: vec![] })
}

fn reproduce(a: &ReproduceArgs) -> Res<Output> {
    let figures: Vec<Figure> = if a.figure == "all" {
        vec![Figure::Fig2, Figure::Fig3, Figure::Fig4]
    } else {
        vec![a.figure.parse()?]
    };
    let mut rows: Vec<(Figure, ExperimentRow)> = Vec::new();
    for f in figures {
        let ns: Vec<usize> = if f == Figure::Fig4 { a.n.iter().copied().filter(|n| n % 2 == 0 && *n >= 4).collect() } else { a.n.clone() };
        for r in experiments::reproduce(f, &ns, a.samples, a.seed)? {
            rows.push((f, r));
        }
    }
    let mut csv = format!("figure,{}\n", ExperimentRow::csv_header());
    for (f, r) in &rows {
        csv.push_str(&format!("{},{}\n", serde_json::to_value(f).unwrap().as_str().unwrap(), r.csv_line()));
    }
    let json_rows: Vec<Value> = rows.iter().map(|(f, r)| json!({ "figure": f, "row": r })).collect();
    Ok(Output { result: json!({ "rows": json_rows }), csv: Some(csv), warnings: vec![] })
}

fn configure_threads() -> Res<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.parse().map_err(|_| parse_err(format!("{THREADS_ENV}='{v}' is not a thread count")))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure(1, e.to_string()))?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Res<String> {
    configure_threads()?;
    let t0 = Instant::now();
    let (name, out) = match &cli.command {
        Command::Dla(a) => ("dla", dla(a)?),
        Command::Ideals(a) => ("ideals", ideals(a)?),
        Command::Predict(a) => ("predict", predict(a)?),
        Command::Simulate(a) => ("simulate", simulate(a)?),
        Command::Compound(a) => ("compound", compound_cmd(a)?),
        Command::Mixing(a) => ("mixing", mixing(a)?),
        Command::Reproduce(a) => ("reproduce", reproduce(a)?),
    };
    for w in &out.warnings {
        eprintln!("warning: {w}");
    }
    if cli.csv {
        return out.csv.ok_or_else(|| parse_err(format!("'{name}' has no CSV output")));
    }
    let config = serde_json::to_value(&cli.command).unwrap();
    let mut report = RunReport::new(name, config[name].clone(), out.result);
    report.warnings = out.warnings;
    report.elapsed_ms = t0.elapsed().as_millis() as u64;
    Ok(serde_json::to_string_pretty(&report).unwrap() + "\n")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    // nothing is written unless the whole command succeeded
    let res = run(&cli).and_then(|text| match &cli.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure(1, format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    });
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
