//! Inverse design: field profiles that produce prescribed single-particle
//! entanglement energies or per-pair entropies.
//!
//! With `gamma_i = -ε_i/2` the recursion of [`crate::rg`] is inverted pair by
//! pair. Since `J̃_i` depends only on the couplings and on earlier targets,
//!
//! ```text
//! h_i = -J̃_i [sinh(ε_i/2) + sinh(ε_{i-1}/2)],
//! J̃_i = J_i² / (cosh²(ε_{i-1}/2) J̃_{i-1}),   J̃_1 = J_1
//! ```
//!
//! and eliminating `J̃_{i-1}` in favour of `h_{i-1}` gives the closed form
//!
//! ```text
//! h_i = J_i² [s_i + s_{i-1}] [s_{i-1} + s_{i-2}] / (cosh²(ε_{i-1}/2) h_{i-1}),   s_k = sinh(ε_k/2)
//! ```
//!
//! which is used when `h_{i-1} ≠ 0`. Every design is checked by running the
//! forward recursion on the result.

use serde::{Deserialize, Serialize};

use crate::chain::ChainSpec;
use crate::entanglement::{single_particle_energies, EntanglementReport};
use crate::error::{Error, Result};
use crate::qalgebra::{gamma_for_pair_entropy, QParam};
use crate::rg::{renormalize, QProfile};

/// Tolerance of the forward round trip, relative to `max(1, |ε|)`.
pub const ROUND_TRIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Targets {
    #[serde(rename = "eps")]
    Energies(Vec<f64>),
    #[serde(rename = "S")]
    Entropies(Vec<f64>),
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Energies(v) | Targets::Entropies(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderingPolicy {
    /// Descending `|ε|` from the centre outwards.
    #[default]
    Optimal,
    AsGiven,
}

/// Sign choice for `gamma_i` when only entropies are prescribed. Pair 1
/// always takes `gamma_1 ≥ 0`; the choice applies to pairs `i ≥ 2`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchPolicy {
    /// Same sign as the previous pair.
    #[default]
    Optimal,
    /// `gamma_i ≥ 0`, i.e. `h_i ≥` the maximally entangling field.
    High,
    /// `gamma_i ≤ 0`.
    Low,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignTarget {
    pub targets: Targets,
    #[serde(rename = "J")]
    pub couplings: Vec<f64>,
    #[serde(default)]
    pub ordering: OrderingPolicy,
    #[serde(default)]
    pub branch: BranchPolicy,
}

impl DesignTarget {
    pub fn energies(eps: Vec<f64>, couplings: Vec<f64>) -> Self {
        DesignTarget {
            targets: Targets::Energies(eps),
            couplings,
            ordering: OrderingPolicy::AsGiven,
            branch: BranchPolicy::Optimal,
        }
    }

    pub fn entropies(s: Vec<f64>, couplings: Vec<f64>) -> Self {
        DesignTarget {
            targets: Targets::Entropies(s),
            couplings,
            ordering: OrderingPolicy::AsGiven,
            branch: BranchPolicy::Optimal,
        }
    }

    pub fn with_ordering(mut self, ordering: OrderingPolicy) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn with_branch(mut self, branch: BranchPolicy) -> Self {
        self.branch = branch;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.targets.is_empty() {
            return Err(Error::invalid("target list is empty"));
        }
        if self.targets.len() != self.couplings.len() {
            return Err(Error::invalid(format!(
                "{} targets but {} couplings",
                self.targets.len(),
                self.couplings.len()
            )));
        }
        if let Some(i) = self.couplings.iter().position(|&j| !(j > 0.0 && j.is_finite())) {
            return Err(Error::invalid(format!("coupling J_{} must be positive and finite", i + 1)));
        }
        match &self.targets {
            Targets::Energies(eps) => {
                if let Some(i) = eps.iter().position(|e| !e.is_finite()) {
                    return Err(Error::invalid(format!("target ε_{} is not finite", i + 1)));
                }
            }
            Targets::Entropies(s) => {
                let ln2 = std::f64::consts::LN_2;
                if let Some(i) = s.iter().position(|&x| !(0.0..=ln2 + 1e-15).contains(&x)) {
                    return Err(Error::invalid(format!("target S_{} = {} is outside [0, ln 2]", i + 1, s[i])));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignResult {
    pub spec: ChainSpec,
    pub profile: QProfile,
    /// `permutation[i]` is the index of the target assigned to pair `i + 1`.
    pub permutation: Vec<usize>,
    /// Energies in pair order after permutation and sign assignment.
    pub eps_targets: Vec<f64>,
    pub predicted: EntanglementReport,
}

/// Pair assignment sorting targets by descending `|ε|`, ties by descending
/// `ε`, then by original index.
pub fn order_pairs(eps: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..eps.len()).collect();
    idx.sort_by(|&a, &b| {
        eps[b]
            .abs()
            .total_cmp(&eps[a].abs())
            .then(eps[b].total_cmp(&eps[a]))
            .then(a.cmp(&b))
    });
    idx
}

/// Field profile realizing `eps` (in pair order) on couplings `couplings`.
pub fn fields_for_energies(eps: &[f64], couplings: &[f64]) -> Result<Vec<f64>> {
    let s: Vec<f64> = eps.iter().map(|e| (e / 2.0).sinh()).collect();
    let c2: Vec<f64> = eps.iter().map(|e| (e / 2.0).cosh().powi(2)).collect();
    let mut h = Vec::with_capacity(eps.len());
    let mut jt = couplings[0];
    h.push(-couplings[0] * s[0]);
    for i in 1..eps.len() {
        let j = couplings[i];
        jt = j / c2[i - 1] * j / jt;
        let hi = if i >= 2 && h[i - 1] != 0.0 {
            j * j * (s[i] + s[i - 1]) * (s[i - 1] + s[i - 2]) / (c2[i - 1] * h[i - 1])
        } else {
            -jt * (s[i] + s[i - 1])
        };
        if !(hi.is_finite() && jt.is_finite() && jt > 0.0) {
            return Err(Error::NumericRange {
                pair: i + 1,
                detail: format!("field for ε = {} is not representable", eps[i]),
            });
        }
        h.push(hi);
    }
    if !h[0].is_finite() {
        return Err(Error::NumericRange { pair: 1, detail: format!("field for ε = {} overflows", eps[0]) });
    }
    Ok(h)
}

/// Resolve a target into pair-ordered energies plus the permutation used.
pub fn resolve_energies(target: &DesignTarget) -> Result<(Vec<f64>, Vec<usize>)> {
    target.validate()?;
    match &target.targets {
        Targets::Energies(eps) => {
            let perm = match target.ordering {
                OrderingPolicy::Optimal => order_pairs(eps),
                OrderingPolicy::AsGiven => (0..eps.len()).collect(),
            };
            Ok((perm.iter().map(|&k| eps[k]).collect(), perm))
        }
        Targets::Entropies(s) => {
            let mags = s
                .iter()
                .enumerate()
                .map(|(i, &x)| {
                    if x == 0.0 {
                        return Err(Error::NumericRange {
                            pair: i + 1,
                            detail: "zero entropy needs an infinite ε".into(),
                        });
                    }
                    gamma_for_pair_entropy(x)
                        .map(|g| 2.0 * g)
                        .map_err(|e| match e {
                            Error::NumericRange { detail, .. } => Error::NumericRange { pair: i + 1, detail },
                            other => other,
                        })
                })
                .collect::<Result<Vec<f64>>>()?;
            let perm = match target.ordering {
                OrderingPolicy::Optimal => order_pairs(&mags),
                OrderingPolicy::AsGiven => (0..mags.len()).collect(),
            };
            let mut gammas: Vec<f64> = Vec::with_capacity(mags.len());
            for (i, &k) in perm.iter().enumerate() {
                let g = mags[k] / 2.0;
                let sign = match (i, target.branch) {
                    (0, _) | (_, BranchPolicy::High) => 1.0,
                    (_, BranchPolicy::Low) => -1.0,
                    (_, BranchPolicy::Optimal) => {
                        if gammas[i - 1] < 0.0 {
                            -1.0
                        } else {
                            1.0
                        }
                    }
                };
                gammas.push(sign * g);
            }
            Ok((gammas.iter().map(|g| -2.0 * g).collect(), perm))
        }
    }
}

/// Design a chain for `target` and verify it by the forward recursion.
pub fn fields_from_energies(target: &DesignTarget) -> Result<DesignResult> {
    let (eps, permutation) = resolve_energies(target)?;
    let fields = fields_for_energies(&eps, &target.couplings)?;
    let spec = ChainSpec::new(target.couplings.clone(), fields)?;
    let profile = renormalize(&spec)?;
    let (_, achieved) = single_particle_energies(&profile);
    for (i, (a, e)) in achieved.iter().zip(&eps).enumerate() {
        if (a - e).abs() > ROUND_TRIP_TOL * e.abs().max(1.0) {
            return Err(Error::NumericRange {
                pair: i + 1,
                detail: format!("round trip gave ε = {a}, target {e}"),
            });
        }
    }
    let predicted = EntanglementReport::from_profile(&profile)?;
    Ok(DesignResult { spec, profile, permutation, eps_targets: eps, predicted })
}

/// The `h_2` that makes `h̃_2 = 0`, i.e. `q_2 = 1`.
pub fn h2_max(j1: f64, h1: f64, j2: f64) -> Result<f64> {
    if !(j1 > 0.0 && j2 > 0.0) {
        return Err(Error::invalid("couplings must be positive"));
    }
    let g1 = (h1 / j1).asinh();
    Ok(g1.sinh() * (j2 / g1.cosh()).powi(2) / j1)
}

/// The two fields `(low, high)` giving pair 2 the entropy `target_s2`,
/// symmetric about [`h2_max`].
pub fn branch_candidates(j1: f64, h1: f64, j2: f64, target_s2: f64) -> Result<(f64, f64)> {
    let g2 = gamma_for_pair_entropy(target_s2)?;
    let center = h2_max(j1, h1, j2)?;
    let g1 = (h1 / j1).asinh();
    let jt2 = (j2 / g1.cosh()).powi(2) / j1;
    let d = jt2 * g2.sinh();
    Ok((center - d, center + d))
}

/// High-fidelity field for pair 2: the upper candidate when `h1 ≥ 0`, the
/// lower one otherwise.
pub fn choose_branch(j1: f64, h1: f64, j2: f64, target_s2: f64) -> Result<f64> {
    let (low, high) = branch_candidates(j1, h1, j2, target_s2)?;
    Ok(if h1 < 0.0 { low } else { high })
}

/// Fields giving every pair the same deformation `q`.
pub fn uniform_q_fields(q: f64, couplings: &[f64]) -> Result<ChainSpec> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::invalid(format!("q must be positive and finite, got {q}")));
    }
    if couplings.is_empty() {
        return Err(Error::invalid("coupling list is empty"));
    }
    if q == 1.0 {
        return ChainSpec::new(couplings.to_vec(), vec![0.0; couplings.len()]);
    }
    let gamma = QParam::from_q(q).gamma();
    let t2 = gamma.tanh().powi(2);
    let mut h = vec![couplings[0] * gamma.sinh()];
    for (i, &j) in couplings.iter().enumerate().skip(1) {
        let factor = if i == 1 { 2.0 } else { 4.0 };
        h.push(factor * j * j / h[i - 1] * t2);
    }
    ChainSpec::new(couplings.to_vec(), h)
}
