//! Compound-ansatz variance experiments: closed-form or formula prediction
//! next to a Monte Carlo estimate.

use serde::{Deserialize, Serialize};

use crate::compound::{self, build_generators, Topology, Variant};
use crate::dla::{lie_closure, DEFAULT_MAX_DIM, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::ideals::decompose;
use crate::pauli::{HermitianObservable, PauliTerm};
use crate::simulator::{estimate_gradvar, AnsatzSpec, Circuit, Generator, McEstimate, Observable, Space};
use crate::state::InitialState;
use crate::variance::gradvar_predict;

pub const DEFAULT_SAMPLES: usize = 5000;

/// Relative slack allowed between a Monte Carlo variance and its prediction.
pub const MC_REL_TOL: f64 = 0.10;
/// Standard errors allowed between a Monte Carlo variance and its prediction.
pub const MC_SE_TOL: f64 = 3.0;
/// Absolute slack when the prediction is exactly zero.
pub const MC_ZERO_FLOOR: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
}

impl std::str::FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            _ => Err(Error::Parse(format!("unknown figure '{s}' (fig2, fig3, fig4)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateKind {
    /// First `k` qubits set.
    Hamming(usize),
    Uniform,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObservableKind {
    /// `-i h_z` on the first two qubits.
    Hz,
    /// `Z/4` on qubit 0.
    SingleZ,
    /// Projector onto the initial basis state.
    Projector,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompoundExperiment {
    pub n: usize,
    pub state: StateKind,
    pub observable: ObservableKind,
    pub layers: usize,
    pub samples: usize,
    pub seed: u64,
    /// Simulate inside the Hamming sector of a basis-state input.
    pub sector: bool,
}

impl CompoundExperiment {
    pub fn new(n: usize, state: StateKind, observable: ObservableKind, samples: usize, seed: u64) -> Self {
        CompoundExperiment { n, state, observable, layers: 12 * n, samples, seed, sector: true }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub n: usize,
    pub state: String,
    pub observable: String,
    /// Closed-form value the estimate is compared with, when one applies.
    pub prediction: Option<f64>,
    /// Variance formula evaluated through closure and decomposition.
    pub formula: Option<f64>,
    /// Upper bound, for the projector observable.
    pub bound: Option<f64>,
    pub dla_dim: usize,
    pub mc: McEstimate,
}

impl ExperimentRow {
    /// `|mc - prediction| <= max(3 se, 10% prediction)`.
    pub fn within_tolerance(&self, prediction: f64) -> bool {
        let slack = (MC_SE_TOL * self.mc.se_variance).max(MC_REL_TOL * prediction.abs()).max(MC_ZERO_FLOOR);
        (self.mc.variance - prediction).abs() <= slack
    }

    pub fn mean_consistent(&self) -> bool {
        self.mc.mean.abs() <= (MC_SE_TOL * self.mc.se_mean).max(MC_ZERO_FLOOR)
    }

    pub fn csv_header() -> &'static str {
        "n,state,observable,dla_dim,prediction,formula,bound,mc_variance,se_variance,mc_mean,se_mean,samples,seed"
    }

    pub fn csv_line(&self) -> String {
        let o = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{:e},{:e},{:e},{:e},{},{}",
            self.n,
            self.state,
            self.observable,
            self.dla_dim,
            o(self.prediction),
            o(self.formula),
            o(self.bound),
            self.mc.variance,
            self.mc.se_variance,
            self.mc.mean,
            self.mc.se_mean,
            self.mc.samples,
            self.mc.seed
        )
    }
}

fn state_label(s: StateKind) -> String {
    match s {
        StateKind::Hamming(k) => format!("hamming:{k}"),
        StateKind::Uniform => "uniform".into(),
    }
}

fn observable_label(o: ObservableKind) -> String {
    match o {
        ObservableKind::Hz => "hz_12".into(),
        ObservableKind::SingleZ => "Z1/4".into(),
        ObservableKind::Projector => "projector".into(),
    }
}

pub fn run_compound(e: &CompoundExperiment) -> Result<ExperimentRow> {
    let n = e.n;
    let st = match e.state {
        StateKind::Hamming(k) => InitialState::hamming(n, k)?,
        StateKind::Uniform => InitialState::Uniform { n },
    };
    let hz_obs = compound::h_z(n, 0, 1)?.to_hermitian().scaled(-1.0);
    let obs = match e.observable {
        ObservableKind::Hz => Observable::Pauli(hz_obs.clone()),
        ObservableKind::SingleZ => Observable::Pauli(HermitianObservable::from_terms(n, [(0.25, PauliTerm::single(n, 0, 'Z')?)])?),
        ObservableKind::Projector => match st {
            InitialState::Bits { bits, .. } => Observable::BasisProjector(bits),
            _ => return Err(Error::Invalid("projector observable needs a basis-state input".into())),
        },
    };
    let spec = AnsatzSpec::compound(n, Topology::Brick, Variant::Su, e.layers)?;
    let slot = spec.default_slot();
    let h = match spec.slot_generator(slot)? {
        Generator::Pauli(p) => p.clone(),
        Generator::Dense(_) => unreachable!("compound generators are Pauli sums"),
    };
    let space = match (e.sector, &st) {
        (true, InitialState::Bits { bits, .. }) => Space::sector(n, bits.count_ones() as usize)?,
        _ => Space::full(n)?,
    };
    let circ = Circuit::new(spec, space)?;
    let psi = circ.space.state_vector(&st)?;
    let mc = estimate_gradvar(&circ, &obs, &psi, slot, e.samples, e.seed)?;

    let basis = lie_closure(&build_generators(n, Topology::Brick, Variant::Su)?, DEFAULT_MAX_DIM, DEFAULT_TOL)?;
    let closed_hz = match e.state {
        StateKind::Hamming(k) => compound::predict_basis_state(n, k)?,
        StateKind::Uniform => compound::predict_uniform(n)?,
    };
    let (prediction, formula, bound) = match e.observable {
        ObservableKind::Hz => {
            let dec = decompose(&basis, e.seed)?;
            let f = gradvar_predict(&h, &hz_obs.to_skew(), &st, &basis, &dec)?.gradvar;
            (Some(closed_hz), Some(f), None)
        }
        // zero-covariance split of the -i h_z result between the two qubits
        ObservableKind::SingleZ => (Some(closed_hz / 2.0), None, None),
        ObservableKind::Projector => {
            let b = if n % 2 == 0 && matches!(e.state, StateKind::Hamming(k) if k == n / 2) {
                Some(compound::projector_bound(n, &h)?)
            } else {
                None
            };
            (None, None, b)
        }
    };
    Ok(ExperimentRow { n, state: state_label(e.state), observable: observable_label(e.observable), prediction, formula, bound, dla_dim: basis.dim(), mc })
}

/// Seed for one row, so rows do not share parameter draws.
pub fn row_seed(seed: u64, figure: Figure, n: usize, variant: u64) -> u64 {
    let f = match figure {
        Figure::Fig2 => 2u64,
        Figure::Fig3 => 3,
        Figure::Fig4 => 4,
    };
    seed ^ (f << 56) ^ ((n as u64) << 40) ^ (variant << 32)
}

/// Rows of a figure: Fig2 has Hamming 1, Hamming n/2 and uniform inputs with
/// `-i h_z`; Fig3 has the same basis states with `Z/4`; Fig4 has the
/// weight-`n/2` state with its own projector (even `n` only).
pub fn reproduce(figure: Figure, ns: &[usize], samples: usize, seed: u64) -> Result<Vec<ExperimentRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        let mut states = vec![StateKind::Hamming(1)];
        if n / 2 != 1 {
            states.push(StateKind::Hamming(n / 2));
        }
        let plan: Vec<(StateKind, ObservableKind)> = match figure {
            Figure::Fig2 => states.iter().map(|&s| (s, ObservableKind::Hz)).chain([(StateKind::Uniform, ObservableKind::Hz)]).collect(),
            Figure::Fig3 => states.iter().map(|&s| (s, ObservableKind::SingleZ)).collect(),
            Figure::Fig4 => {
                if n % 2 == 1 {
                    return Err(Error::Invalid(format!("projector experiment needs even n, got {n}")));
                }
                vec![(StateKind::Hamming(n / 2), ObservableKind::Projector)]
            }
        };
        for (i, (s, o)) in plan.into_iter().enumerate() {
            let e = CompoundExperiment::new(n, s, o, samples, row_seed(seed, figure, n, i as u64));
            rows.push(run_compound(&e)?);
        }
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 || x.iter().chain(y).any(|v| *v <= 0.0) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    Some(sxy / sxx)
}
