//! Parameter sweeps written as CSV.
//!
//! A grid fixes a base chain, varies named parameters along axes (row-major,
//! first axis slowest) and reports the requested columns:
//!
//! ```json
//! {
//!   "mode": "chain",
//!   "J": [1, 0.1], "h": [1, 0],
//!   "axes": [
//!     {"param": "h1", "values": [0.5, 1.0]},
//!     {"param": "h2", "min": -0.05, "max": 0.05, "count": 11}
//!   ],
//!   "columns": ["h1", "h2", "S_A2", "fidelity"]
//! }
//! ```
//!
//! In `uniform-q` mode the fields are designed from the parameter `q`.

use std::cell::OnceCell;

use rayon::prelude::*;
use serde::Deserialize;

use qrainbow::designer::{h2_max, uniform_q_fields};
use qrainbow::entanglement::{density_eigenvalues, reduced_density_matrix, vn_entropy, EntanglementReport};
use qrainbow::freefermion;
use qrainbow::qalgebra::pair_entropy;
use qrainbow::ChainSpec;

use crate::error::{CliError, Result};
use crate::report::{analyse, Analysis, Settings};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Chain,
    UniformQ,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: String,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
    #[serde(default)]
    pub count: Option<usize>,
    #[serde(default)]
    pub scale: Scale,
}

impl Axis {
    pub fn points(&self) -> Result<Vec<f64>> {
        let bad = |msg: &str| CliError::Input(format!("axis {}: {msg}", self.param));
        match (&self.values, self.min, self.max, self.count) {
            (Some(v), None, None, None) => {
                if v.is_empty() {
                    return Err(bad("empty value list"));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(bad("values must be finite"));
                }
                Ok(v.clone())
            }
            (None, Some(lo), Some(hi), Some(n)) => {
                if n < 2 {
                    return Err(bad("count must be at least 2"));
                }
                if !(lo.is_finite() && hi.is_finite()) {
                    return Err(bad("bounds must be finite"));
                }
                let step = |k: usize| k as f64 / (n - 1) as f64;
                match self.scale {
                    Scale::Linear => Ok((0..n).map(|k| lo + (hi - lo) * step(k)).collect()),
                    Scale::Log => {
                        if !(lo > 0.0 && hi > 0.0) {
                            return Err(bad("log scale needs positive bounds"));
                        }
                        let (a, b) = (lo.ln(), hi.ln());
                        Ok((0..n).map(|k| (a + (b - a) * step(k)).exp()).collect())
                    }
                }
            }
            _ => Err(bad("give either \"values\" or all of \"min\", \"max\", \"count\"")),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepGrid {
    #[serde(default)]
    pub mode: Mode,
    #[serde(rename = "J")]
    pub couplings: Vec<f64>,
    #[serde(rename = "h", default)]
    pub fields: Option<Vec<f64>>,
    /// Base deformation in `uniform-q` mode.
    #[serde(default)]
    pub q: Option<f64>,
    #[serde(default)]
    pub axes: Vec<Axis>,
    pub columns: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Param {
    J(usize),
    H(usize),
    Q,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Column {
    Param(Param),
    Energy,
    Gap,
    Degeneracy,
    AnsatzEnergy,
    Fidelity,
    Entropy,
    AnsatzEntropy,
    FreeFermionEntropy,
    PairEntropy(usize),
    PairQ(usize),
    PairEps(usize),
    FreeFermionEps(usize),
    ValidityMax,
    H2Max,
}

fn pair_index(s: &str, prefix: &str, pairs: usize) -> Option<usize> {
    let i: usize = s.strip_prefix(prefix)?.parse().ok()?;
    (1..=pairs).contains(&i).then_some(i)
}

fn parse_param(name: &str, mode: Mode, pairs: usize) -> Option<Param> {
    if name == "q" {
        return (mode == Mode::UniformQ).then_some(Param::Q);
    }
    if let Some(i) = pair_index(name, "J", pairs) {
        return Some(Param::J(i));
    }
    if mode == Mode::Chain {
        return pair_index(name, "h", pairs).map(Param::H);
    }
    None
}

fn parse_column(name: &str, mode: Mode, pairs: usize) -> Option<Column> {
    if let Some(p) = parse_param(name, mode, pairs) {
        return Some(Column::Param(p));
    }
    // designed fields are readable in uniform-q mode as well
    if let Some(i) = pair_index(name, "h", pairs) {
        return Some(Column::Param(Param::H(i)));
    }
    let c = match name {
        "energy" => Column::Energy,
        "gap" => Column::Gap,
        "degeneracy" => Column::Degeneracy,
        "ansatz_energy" => Column::AnsatzEnergy,
        "fidelity" => Column::Fidelity,
        "S" => Column::Entropy,
        "S_ansatz" => Column::AnsatzEntropy,
        "S_ff" => Column::FreeFermionEntropy,
        "validity_max" => Column::ValidityMax,
        "h2_max" if pairs >= 2 => Column::H2Max,
        _ => {
            return pair_index(name, "S_A", pairs)
                .map(Column::PairEntropy)
                .or_else(|| pair_index(name, "ff_eps_", pairs).map(Column::FreeFermionEps))
                .or_else(|| pair_index(name, "eps_", pairs).map(Column::PairEps))
                .or_else(|| pair_index(name, "q_", pairs).map(Column::PairQ))
        }
    };
    Some(c)
}

/// Column names understood for a chain of `pairs` pairs, for help texts.
pub const COLUMN_HELP: &str = "J<i>, h<i>, q (uniform-q mode), energy, gap, degeneracy, ansatz_energy, \
fidelity, S, S_ansatz, S_ff, S_A<i>, q_<i>, eps_<i>, ff_eps_<i>, validity_max, h2_max";

struct Point {
    spec: ChainSpec,
    q: Option<f64>,
}

struct Plan {
    mode: Mode,
    base_j: Vec<f64>,
    base_h: Vec<f64>,
    base_q: f64,
    axes: Vec<(Param, Vec<f64>)>,
    columns: Vec<Column>,
    header: Vec<String>,
}

impl Plan {
    fn new(grid: &SweepGrid) -> Result<Self> {
        let pairs = grid.couplings.len();
        if pairs == 0 {
            return Err(CliError::Input("\"J\" must list at least one coupling".into()));
        }
        let base_h = match (grid.mode, &grid.fields) {
            (Mode::Chain, Some(h)) => h.clone(),
            (Mode::Chain, None) => vec![0.0; pairs],
            (Mode::UniformQ, Some(_)) => {
                return Err(CliError::Input("\"h\" is designed in uniform-q mode; give \"q\" instead".into()))
            }
            (Mode::UniformQ, None) => vec![0.0; pairs],
        };
        if base_h.len() != pairs {
            return Err(CliError::Input(format!("{} couplings but {} fields", pairs, base_h.len())));
        }
        if grid.mode == Mode::Chain && grid.q.is_some() {
            return Err(CliError::Input("\"q\" is only meaningful in uniform-q mode".into()));
        }
        let mut axes = Vec::new();
        for axis in &grid.axes {
            let p = parse_param(&axis.param, grid.mode, pairs)
                .ok_or_else(|| CliError::Input(format!("unknown sweep parameter {:?}", axis.param)))?;
            if axes.iter().any(|(q, _)| *q == p) {
                return Err(CliError::Input(format!("parameter {:?} appears on two axes", axis.param)));
            }
            axes.push((p, axis.points()?));
        }
        if grid.mode == Mode::UniformQ && grid.q.is_none() && !axes.iter().any(|(p, _)| *p == Param::Q) {
            return Err(CliError::Input("uniform-q mode needs \"q\" or a q axis".into()));
        }
        if grid.columns.is_empty() {
            return Err(CliError::Input("no output columns requested".into()));
        }
        let columns = grid
            .columns
            .iter()
            .map(|c| {
                parse_column(c, grid.mode, pairs)
                    .ok_or_else(|| CliError::Input(format!("unknown column {c:?}; known: {COLUMN_HELP}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Plan {
            mode: grid.mode,
            base_j: grid.couplings.clone(),
            base_h,
            base_q: grid.q.unwrap_or(1.0),
            axes,
            columns,
            header: grid.columns.clone(),
        })
    }

    fn rows(&self) -> usize {
        self.axes.iter().map(|(_, v)| v.len()).product()
    }

    fn point(&self, mut row: usize) -> Result<Point> {
        let mut j = self.base_j.clone();
        let mut h = self.base_h.clone();
        let mut q = self.base_q;
        // row-major: the last axis varies fastest
        for (param, values) in self.axes.iter().rev() {
            let v = values[row % values.len()];
            row /= values.len();
            match *param {
                Param::J(i) => j[i - 1] = v,
                Param::H(i) => h[i - 1] = v,
                Param::Q => q = v,
            }
        }
        match self.mode {
            Mode::Chain => Ok(Point { spec: ChainSpec::new(j, h).map_err(CliError::from_core)?, q: None }),
            Mode::UniformQ => Ok(Point { spec: uniform_q_fields(q, &j).map_err(CliError::from_core)?, q: Some(q) }),
        }
    }
}

struct Row<'a> {
    point: Point,
    settings: &'a Settings,
    analysis: OnceCell<Result<Analysis>>,
    ff: OnceCell<Result<freefermion::FreeFermionResult>>,
}

impl Row<'_> {
    fn analysis(&self) -> Result<&Analysis> {
        self.analysis
            .get_or_init(|| analyse(&self.point.spec, self.settings))
            .as_ref()
            .map_err(clone_err)
    }

    fn ff(&self) -> Result<&freefermion::FreeFermionResult> {
        self.ff
            .get_or_init(|| freefermion::analyze(&self.point.spec).map_err(CliError::from_core))
            .as_ref()
            .map_err(clone_err)
    }

    fn value(&self, c: Column) -> Result<String> {
        let spec = &self.point.spec;
        let f = |x: f64| Ok(format!("{x:.16e}"));
        match c {
            Column::Param(Param::J(i)) => f(spec.couplings[i - 1]),
            Column::Param(Param::H(i)) => f(spec.fields[i - 1]),
            Column::Param(Param::Q) => f(self.point.q.unwrap_or(1.0)),
            Column::Energy => f(self.analysis()?.ground.energy),
            Column::Gap => f(self.analysis()?.ground.gap),
            Column::Degeneracy => Ok(self.analysis()?.ground.degeneracy.to_string()),
            Column::AnsatzEnergy => f(self.analysis()?.ansatz_energy),
            Column::Fidelity => f(self.analysis()?.fidelity),
            Column::Entropy => {
                let rho = reduced_density_matrix(&self.analysis()?.ground.state).map_err(CliError::from_core)?;
                f(vn_entropy(&density_eigenvalues(&rho)))
            }
            Column::AnsatzEntropy => {
                let r = EntanglementReport::from_profile(&self.analysis()?.profile).map_err(CliError::from_core)?;
                f(r.vn_entropy)
            }
            Column::FreeFermionEntropy => f(self.ff()?.vn_entropy()),
            Column::PairEntropy(i) => f(pair_entropy(self.profile()?.q[i - 1])),
            Column::PairQ(i) => f(self.profile()?.q[i - 1].q()),
            Column::PairEps(i) => f(-2.0 * self.profile()?.q[i - 1].gamma()),
            Column::FreeFermionEps(i) => {
                let mut e = self.ff()?.rainbow_energies();
                e.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
                f(e.get(i - 1).copied().unwrap_or(f64::NAN))
            }
            Column::ValidityMax => f(self.profile()?.validity_ratio.iter().fold(0.0, |m, &x| m.max(x))),
            Column::H2Max => f(h2_max(spec.couplings[0], spec.fields[0], spec.couplings[1]).map_err(CliError::from_core)?),
        }
    }

    fn profile(&self) -> Result<qrainbow::QProfile> {
        match self.analysis.get() {
            Some(Ok(a)) => Ok(a.profile.clone()),
            _ => qrainbow::rg::renormalize(&self.point.spec).map_err(CliError::from_core),
        }
    }
}

fn clone_err(e: &CliError) -> CliError {
    match e {
        CliError::SizeCap(x) => CliError::SizeCap(x.clone()),
        CliError::Design(x) => CliError::Design(x.clone()),
        CliError::Compute(x) => CliError::Compute(x.clone()),
        other => CliError::Input(other.to_string()),
    }
}

/// Evaluate the grid in parallel and return the CSV text, rows in grid order.
pub fn run(grid: &SweepGrid, settings: &Settings) -> Result<String> {
    let plan = Plan::new(grid)?;
    let lines = (0..plan.rows())
        .into_par_iter()
        .map(|k| {
            let row = Row { point: plan.point(k)?, settings, analysis: OnceCell::new(), ff: OnceCell::new() };
            let cells = plan.columns.iter().map(|&c| row.value(c)).collect::<Result<Vec<_>>>()?;
            Ok(cells.join(","))
        })
        .collect::<Result<Vec<String>>>()?;
    let mut out = plan.header.join(",");
    out.push('\n');
    for line in lines {
        out.push_str(&line);
        out.push('\n');
    }
    Ok(out)
}
