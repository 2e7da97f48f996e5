//! Exact ground states by dense diagonalization of magnetization sectors.

use nalgebra::SymmetricEigen;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{self, ChainSpec, DEFAULT_SIZE_CAP};
use crate::error::{Error, Result};

/// Real amplitudes of a `2N`-site state in the chain's basis order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PureState {
    pub sites: usize,
    pub amplitudes: Vec<f64>,
}

impl PureState {
    pub fn new(sites: usize, amplitudes: Vec<f64>) -> Result<Self> {
        if amplitudes.len() != 1usize << sites {
            return Err(Error::invalid(format!(
                "{} amplitudes do not describe {} sites",
                amplitudes.len(),
                sites
            )));
        }
        Ok(PureState { sites, amplitudes })
    }

    /// Basis state `|config>`.
    pub fn basis(sites: usize, config: usize) -> Self {
        let mut amplitudes = vec![0.0; 1 << sites];
        amplitudes[config] = 1.0;
        PureState { sites, amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let n = self.norm();
        self.amplitudes.iter_mut().for_each(|a| *a /= n);
        self
    }

    pub fn dot(&self, other: &PureState) -> Result<f64> {
        if self.dim() != other.dim() {
            return Err(Error::invalid(format!(
                "dimension mismatch: {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a * b).sum())
    }

    /// `<ψ|H|ψ>`.
    pub fn energy(&self, spec: &ChainSpec) -> f64 {
        let h = chain::apply_hamiltonian(spec, &self.amplitudes);
        h.iter().zip(&self.amplitudes).map(|(a, b)| a * b).sum()
    }

    /// Makes the first non-negligible amplitude positive.
    fn fix_phase(&mut self) {
        if let Some(a) = self.amplitudes.iter().find(|a| a.abs() > 1e-12) {
            if *a < 0.0 {
                self.amplitudes.iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
}

/// `|<a|b>|^2`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    let d = a.dot(b)?;
    Ok(d * d)
}

/// Which magnetization sectors the ground-state search visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SectorPolicy {
    /// Every sector for `N <= 4`, only `Sz = 0` above.
    #[default]
    Auto,
    All,
    ZeroMagnetization,
}

#[derive(Debug, Clone, Copy)]
pub struct ExactOptions {
    pub size_cap: usize,
    pub sectors: SectorPolicy,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { size_cap: DEFAULT_SIZE_CAP, sectors: SectorPolicy::Auto }
    }
}

#[derive(Debug, Clone)]
pub struct GroundStateResult {
    pub energy: f64,
    pub state: PureState,
    /// Distance from the ground level to the next distinct level among the
    /// searched sectors.
    pub gap: f64,
    pub degeneracy: usize,
    /// Orthonormal basis of the ground level, `state` first.
    pub subspace: Vec<PureState>,
    /// Largest eigenvalue magnitude seen, an estimate of `‖H‖`.
    pub spectral_scale: f64,
}

impl GroundStateResult {
    /// Fidelity of `ansatz` with the ground level: the squared norm of its
    /// projection onto the (possibly degenerate) ground subspace.
    pub fn fidelity(&self, ansatz: &PureState) -> Result<f64> {
        let mut total = 0.0;
        for v in &self.subspace {
            let d = v.dot(ansatz)?;
            total += d * d;
        }
        Ok(total.min(1.0))
    }
}

pub fn ground_state(spec: &ChainSpec) -> Result<GroundStateResult> {
    ground_state_with(spec, &ExactOptions::default())
}

pub fn ground_state_with(spec: &ChainSpec, opts: &ExactOptions) -> Result<GroundStateResult> {
    let only_zero = match opts.sectors {
        SectorPolicy::All => false,
        SectorPolicy::ZeroMagnetization => true,
        SectorPolicy::Auto => spec.pairs > 4,
    };
    let blocks = if only_zero {
        chain::build_sectors(spec, opts.size_cap, Some(&[0]))?
    } else {
        chain::build_sectors(spec, opts.size_cap, None)?
    };

    // index-ordered collection keeps the merge independent of scheduling
    let solved: Vec<(Vec<usize>, SymmetricEigen<f64, nalgebra::Dyn>)> = blocks
        .into_par_iter()
        .map(|b| (b.indices, SymmetricEigen::new(b.matrix)))
        .collect();

    let mut levels: Vec<(f64, usize, usize)> = Vec::new();
    for (s, (_, eig)) in solved.iter().enumerate() {
        levels.extend(eig.eigenvalues.iter().enumerate().map(|(k, &e)| (e, s, k)));
    }
    levels.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let scale = levels.iter().map(|l| l.0.abs()).fold(0.0, f64::max);
    let tol = 1e-10 * scale.max(f64::MIN_POSITIVE);
    let e0 = levels[0].0;
    let degeneracy = levels.iter().take_while(|l| l.0 - e0 <= tol).count();
    let gap = levels.get(degeneracy).map_or(0.0, |l| l.0 - e0);

    let dim = spec.dim();
    let subspace: Vec<PureState> = levels[..degeneracy]
        .iter()
        .map(|&(_, s, k)| {
            let (indices, eig) = &solved[s];
            let mut amplitudes = vec![0.0; dim];
            for (row, &c) in indices.iter().enumerate() {
                amplitudes[c] = eig.eigenvectors[(row, k)];
            }
            let mut st = PureState { sites: spec.sites(), amplitudes }.normalized();
            st.fix_phase();
            st
        })
        .collect();

    Ok(GroundStateResult {
        energy: e0,
        state: subspace[0].clone(),
        gap,
        degeneracy,
        subspace,
        spectral_scale: scale,
    })
}

/// `‖H v - E v‖`.
pub fn residual(spec: &ChainSpec, state: &PureState, energy: f64) -> f64 {
    let hv = chain::apply_hamiltonian(spec, &state.amplitudes);
    hv.iter()
        .zip(&state.amplitudes)
        .map(|(h, v)| (h - energy * v).powi(2))
        .sum::<f64>()
        .sqrt()
}
