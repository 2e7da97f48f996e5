use log::warn;
use serde::Serialize;

use qrainbow::entanglement::EntanglementReport;
use qrainbow::exact::{ground_state_with, ExactOptions, GroundStateResult};
use qrainbow::freefermion::{self, FreeFermionResult};
use qrainbow::rg::{ansatz_energy, rainbow_state, renormalize};
use qrainbow::{ChainSpec, QProfile};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub size_cap: usize,
    pub validity_threshold: f64,
}

#[derive(Debug, Serialize)]
pub struct ProfileView {
    pub q: Vec<f64>,
    pub gamma: Vec<f64>,
    #[serde(rename = "J_eff")]
    pub j_eff: Vec<f64>,
    #[serde(rename = "h_eff")]
    pub h_eff: Vec<f64>,
    pub validity_ratio: Vec<f64>,
}

impl From<&QProfile> for ProfileView {
    fn from(p: &QProfile) -> Self {
        ProfileView {
            q: p.q.iter().map(|q| q.q()).collect(),
            gamma: p.gammas(),
            j_eff: p.j_eff.clone(),
            h_eff: p.h_eff.clone(),
            validity_ratio: p.validity_ratio.clone(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ExactView {
    pub energy: f64,
    pub gap: f64,
    pub degeneracy: usize,
}

#[derive(Debug, Serialize)]
pub struct AnsatzView {
    pub energy: f64,
    pub fidelity: f64,
}

#[derive(Debug, Serialize)]
pub struct EntanglementView {
    pub exact: EntanglementReport,
    pub ansatz: EntanglementReport,
}

#[derive(Debug, Serialize)]
pub struct FreeFermionView {
    /// Finite single-particle energies in the `-ln q²` convention, by
    /// descending magnitude.
    pub eps: Vec<f64>,
    /// Correlation-block eigenvalues, ascending.
    pub zeta: Vec<f64>,
    pub saturated: usize,
    pub zero_mode: bool,
    pub vn_entropy: f64,
}

impl From<&FreeFermionResult> for FreeFermionView {
    fn from(r: &FreeFermionResult) -> Self {
        let mut eps = r.rainbow_energies();
        eps.sort_by(|a, b| b.abs().total_cmp(&a.abs()).then(b.total_cmp(a)));
        FreeFermionView {
            eps,
            zeta: r.zeta.clone(),
            saturated: r.infinite_count(),
            zero_mode: r.zero_mode,
            vn_entropy: r.vn_entropy(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub spec: ChainSpec,
    pub q_profile: ProfileView,
    /// Pairs (1-based) whose validity ratio exceeds the threshold.
    pub validity_warnings: Vec<usize>,
    pub exact: ExactView,
    pub ansatz: AnsatzView,
    pub entanglement: EntanglementView,
    pub freefermion: FreeFermionView,
}

/// Everything the sweep and report layers may ask about a chain.
pub struct Analysis {
    pub spec: ChainSpec,
    pub profile: QProfile,
    pub ground: GroundStateResult,
    pub ansatz_energy: f64,
    pub fidelity: f64,
}

pub fn analyse(spec: &ChainSpec, settings: &Settings) -> Result<Analysis> {
    let profile = renormalize(spec).map_err(CliError::from_core)?;
    let opts = ExactOptions { size_cap: settings.size_cap, ..ExactOptions::default() };
    let ground = ground_state_with(spec, &opts).map_err(CliError::from_core)?;
    let psi = rainbow_state(&profile);
    let fidelity = ground.fidelity(&psi).map_err(CliError::from_core)?;
    Ok(Analysis { spec: spec.clone(), ansatz_energy: ansatz_energy(spec, &profile), profile, ground, fidelity })
}

pub fn simulate(spec: &ChainSpec, settings: &Settings) -> Result<Report> {
    let a = analyse(spec, settings)?;
    let validity_warnings = a.profile.validity_warnings(settings.validity_threshold);
    for &i in &validity_warnings {
        warn!(
            "pair {i}: validity ratio {:.3e} exceeds {}; the rainbow ansatz may be inaccurate",
            a.profile.validity_ratio[i - 1],
            settings.validity_threshold
        );
    }
    let exact_ent = EntanglementReport::from_state(&a.ground.state).map_err(CliError::from_core)?;
    let ansatz_ent = EntanglementReport::from_profile(&a.profile).map_err(CliError::from_core)?;
    let ff = freefermion::analyze(spec).map_err(CliError::from_core)?;
    if ff.zero_mode {
        warn!("single-particle zero mode: the free-fermion ground state is ambiguous");
    }
    if a.ground.degeneracy > 1 {
        warn!("ground level is {}-fold degenerate; fidelity uses the projector onto it", a.ground.degeneracy);
    }
    Ok(Report {
        spec: a.spec.clone(),
        q_profile: ProfileView::from(&a.profile),
        validity_warnings,
        exact: ExactView { energy: a.ground.energy, gap: a.ground.gap, degeneracy: a.ground.degeneracy },
        ansatz: AnsatzView { energy: a.ansatz_energy, fidelity: a.fidelity },
        entanglement: EntanglementView { exact: exact_ent, ansatz: ansatz_ent },
        freefermion: FreeFermionView::from(&ff),
    })
}
