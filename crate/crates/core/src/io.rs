//! JSON file formats and small text grammars shared by the CLI and demo.

use serde::{Deserialize, Serialize};

use crate::compound::{Topology, Variant};
use crate::dla::{DlaBasis, StructureEntry};
use crate::error::{Error, Result};
use crate::ideals::IdealDecomposition;
use crate::pauli::{PauliTerm, SkewElement};
use crate::simulator::{AnsatzSpec, Generator, DEFAULT_RANGE};
use crate::state::InitialState;

pub const BASIS_SCHEMA: &str = "lieplateau.basis/v1";
pub const IDEALS_SCHEMA: &str = "lieplateau.ideals/v1";
pub const REPORT_SCHEMA: &str = "lieplateau.report/v1";

/// `(coefficient, label)` pairs of `sum c (iP)`.
pub type TermList = Vec<(f64, String)>;

pub fn terms_of(s: &SkewElement) -> TermList {
    s.iter().map(|(p, c)| (c, p.label())).collect()
}

pub fn skew_from_terms(n: usize, t: &TermList) -> Result<SkewElement> {
    let parsed = t.iter().map(|(c, l)| Ok((*c, PauliTerm::parse(l)?))).collect::<Result<Vec<_>>>()?;
    SkewElement::from_terms(n, parsed)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub schema: String,
    pub n_qubits: usize,
    pub dim: usize,
    pub truncated: bool,
    pub tol: f64,
    pub closure_log: Vec<usize>,
    pub depth: Vec<usize>,
    pub elements: Vec<TermList>,
    /// `(q, k, j, c)` with `[F_q, F_k] = sum_j c F_j`, `q < k`.
    pub structure_constants: Vec<(u32, u32, u32, f64)>,
}

impl BasisFile {
    pub fn from_basis(b: &DlaBasis<SkewElement>) -> Result<Self> {
        let sc = if b.truncated { Vec::new() } else { b.structure_constants()?.iter().map(|e| (e.q, e.k, e.j, e.c)).collect() };
        Ok(BasisFile {
            schema: BASIS_SCHEMA.into(),
            n_qubits: b.elements()[0].n_qubits(),
            dim: b.dim(),
            truncated: b.truncated,
            tol: b.tol,
            closure_log: b.closure_log.clone(),
            depth: b.depth.clone(),
            elements: b.elements().iter().map(terms_of).collect(),
            structure_constants: sc,
        })
    }

    pub fn to_basis(&self) -> Result<DlaBasis<SkewElement>> {
        if self.schema != BASIS_SCHEMA {
            return Err(Error::Parse(format!("unexpected schema '{}'", self.schema)));
        }
        if self.elements.len() != self.dim {
            return Err(Error::Parse("element count does not match dim".into()));
        }
        let elements = self.elements.iter().map(|t| skew_from_terms(self.n_qubits, t)).collect::<Result<Vec<_>>>()?;
        let sc = (!self.truncated).then(|| self.structure_constants.iter().map(|&(q, k, j, c)| StructureEntry { q, k, j, c }).collect());
        let mut b = DlaBasis::from_parts(elements, self.depth.clone(), self.truncated, self.tol, sc)?;
        b.closure_log = self.closure_log.clone();
        Ok(b)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdealEntry {
    pub dim: usize,
    pub kappa: f64,
    pub kappa_rel_std: f64,
    /// Orthonormal basis vectors in coordinates of the algebra basis.
    pub basis: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdealsFile {
    pub schema: String,
    pub dla_dim: usize,
    pub center_dim: usize,
    pub ideal_dims: Vec<usize>,
    pub seed: u64,
    pub attempts: usize,
    pub ideals: Vec<IdealEntry>,
    pub center: Vec<Vec<f64>>,
}

impl IdealsFile {
    pub fn from_decomposition(dec: &IdealDecomposition) -> Self {
        let cols = |m: &nalgebra::DMatrix<f64>| (0..m.ncols()).map(|j| m.column(j).iter().copied().collect()).collect();
        IdealsFile {
            schema: IDEALS_SCHEMA.into(),
            dla_dim: dec.dim(),
            center_dim: dec.center.ncols(),
            ideal_dims: dec.ideal_dims(),
            seed: dec.seed,
            attempts: dec.attempts,
            ideals: dec.ideals.iter().map(|i| IdealEntry { dim: i.dim(), kappa: i.kappa, kappa_rel_std: i.kappa_rel_std, basis: cols(&i.basis) }).collect(),
            center: cols(&dec.center),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompoundAnsatz {
    pub n: usize,
    pub topology: Topology,
    pub variant: Variant,
}

/// Ansatz description. Either `compound` or `generators` + `pattern`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzFile {
    pub layers: usize,
    #[serde(default)]
    pub param_range: Option<(f64, f64)>,
    #[serde(default)]
    pub compound: Option<CompoundAnsatz>,
    #[serde(default)]
    pub n_qubits: Option<usize>,
    #[serde(default)]
    pub generators: Option<Vec<TermList>>,
    /// Sub-layers of generator indices, repeated cyclically.
    #[serde(default)]
    pub pattern: Option<Vec<Vec<usize>>>,
}

impl AnsatzFile {
    pub fn to_spec(&self) -> Result<AnsatzSpec> {
        let mut spec = match (&self.compound, &self.generators, &self.pattern) {
            (Some(c), None, None) => AnsatzSpec::compound(c.n, c.topology, c.variant, self.layers)?,
            (None, Some(gens), Some(pattern)) => {
                let n = self.n_qubits.ok_or_else(|| Error::Parse("ansatz needs n_qubits".into()))?;
                let gens = gens.iter().map(|t| Ok(Generator::Pauli(skew_from_terms(n, t)?))).collect::<Result<Vec<_>>>()?;
                AnsatzSpec::periodic(gens, pattern, self.layers, DEFAULT_RANGE)?
            }
            _ => return Err(Error::Parse("ansatz needs either 'compound' or both 'generators' and 'pattern'".into())),
        };
        if let Some(r) = self.param_range {
            if !(r.1 > r.0) {
                return Err(Error::Parse(format!("bad param_range {r:?}")));
            }
            spec.ranges = vec![r; spec.n_params()];
        }
        Ok(spec)
    }

    pub fn n_qubits(&self) -> Option<usize> {
        self.compound.as_ref().map(|c| c.n).or(self.n_qubits)
    }
}

/// Parses `uniform`, `mixed`, `bits:0110` (leftmost is qubit 0),
/// `hamming:K` (first `K` qubits set) or `vector:<json array of [re, im]>`.
pub fn parse_state(spec: &str, n: usize) -> Result<InitialState> {
    let spec = spec.trim();
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    match kind {
        "uniform" => Ok(InitialState::Uniform { n }),
        "mixed" => Ok(InitialState::MaximallyMixed { n }),
        "hamming" => {
            let k: usize = arg.parse().map_err(|_| Error::Parse(format!("bad Hamming weight '{arg}'")))?;
            InitialState::hamming(n, k)
        }
        "bits" => {
            if arg.len() != n || !arg.chars().all(|c| c == '0' || c == '1') {
                return Err(Error::Parse(format!("expected {n} bits, got '{arg}'")));
            }
            let bits = arg.chars().enumerate().filter(|(_, c)| *c == '1').fold(0u64, |b, (q, _)| b | 1 << q);
            Ok(InitialState::Bits { n, bits })
        }
        "vector" => {
            let v: Vec<(f64, f64)> = serde_json::from_str(arg).map_err(|e| Error::Parse(format!("state vector: {e}")))?;
            InitialState::vector(v.into_iter().map(|(re, im)| num_complex::Complex64::new(re, im)).collect())
        }
        _ => Err(Error::Parse(format!("unknown state '{spec}'"))),
    }
}

/// Envelope written by every CLI command.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub command: String,
    pub config: serde_json::Value,
    pub result: serde_json::Value,
    pub warnings: Vec<String>,
    pub elapsed_ms: u64,
}

impl RunReport {
    pub fn new(command: &str, config: serde_json::Value, result: serde_json::Value) -> Self {
        RunReport { schema: REPORT_SCHEMA.into(), command: command.into(), config, result, warnings: Vec::new(), elapsed_ms: 0 }
    }
}
