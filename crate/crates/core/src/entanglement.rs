//! Entanglement across the central cut (sites `-N..-1` against `1..N`).
//!
//! For a rainbow product state the reduced density matrix factorizes into
//! diagonal pair blocks `diag(1/(1+q²), q²/(1+q²))`, so the spectrum is free:
//! `E_j = E0 + Σ_i n_i(j) ε_i` with `E0 = Σ ln(1+q_i²)` and `ε_i = -ln q_i²`.
//!
//! The total von Neumann entropy is the (non-negative) sum of pair entropies.
//! A printed form of the total carries an overall minus sign in front of the
//! sum; that sign is a typo, since each pair term is non-negative.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::PureState;
use crate::qalgebra::pair_probabilities;
use crate::rg::QProfile;

/// Eigenvalues below this are dropped from the entanglement spectrum.
pub const SPECTRUM_CUTOFF: f64 = 1e-14;

/// Renyi orders included in reports.
pub const REPORT_RENYI_ORDERS: [f64; 3] = [0.5, 2.0, 3.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    /// Descending, clipped at zero.
    pub rho_eigs: Vec<f64>,
    /// Renyi entropies keyed by the order printed as a decimal.
    pub renyi: BTreeMap<String, f64>,
    pub vn_entropy: f64,
    /// Ascending entanglement energies `-ln λ`.
    pub spectrum: Vec<f64>,
    /// Single-particle energies `ε_i`, when the spectrum is free.
    pub single_particle: Option<Vec<f64>>,
    #[serde(rename = "E0")]
    pub e0: Option<f64>,
    /// Residual of the free-spectrum fit (zero for an ansatz built from q).
    pub fit_residual: Option<f64>,
}

impl EntanglementReport {
    /// Report for an arbitrary state; single-particle data come from
    /// [`fit_free_spectrum`] when the full spectrum survives the cutoff.
    pub fn from_state(state: &PureState) -> Result<Self> {
        let rho = reduced_density_matrix(state)?;
        let eigs = density_eigenvalues(&rho);
        let pairs = state.sites / 2;
        let mut report = Self::from_eigenvalues(eigs)?;
        if report.spectrum.len() == 1 << pairs {
            let fit = fit_free_spectrum(&report.spectrum, pairs)?;
            report.single_particle = Some(fit.eps);
            report.e0 = Some(fit.e0);
            report.fit_residual = Some(fit.residual);
        }
        Ok(report)
    }

    /// Report for the rainbow ansatz of `profile`, from the closed forms.
    pub fn from_profile(profile: &QProfile) -> Result<Self> {
        let mut eigs = vec![1.0];
        for &q in &profile.q {
            let (p, r) = pair_probabilities(q);
            eigs = eigs.iter().flat_map(|&x| [x * p, x * r]).collect();
        }
        let mut report = Self::from_eigenvalues(eigs)?;
        let (e0, eps) = single_particle_energies(profile);
        report.single_particle = Some(eps);
        report.e0 = Some(e0);
        report.fit_residual = Some(0.0);
        Ok(report)
    }

    fn from_eigenvalues(mut eigs: Vec<f64>) -> Result<Self> {
        eigs.iter_mut().for_each(|x| *x = x.max(0.0));
        eigs.sort_by(|a, b| b.total_cmp(a));
        let renyi = REPORT_RENYI_ORDERS
            .iter()
            .map(|&a| Ok((format!("{a}"), renyi_entropy(&eigs, a)?)))
            .collect::<Result<_>>()?;
        Ok(EntanglementReport {
            vn_entropy: vn_entropy(&eigs),
            spectrum: entanglement_spectrum(&eigs)?,
            renyi,
            rho_eigs: eigs,
            single_particle: None,
            e0: None,
            fit_residual: None,
        })
    }
}

/// Traces out the right half (sites `1..N`, the high bits).
pub fn reduced_density_matrix(state: &PureState) -> Result<DMatrix<f64>> {
    if state.sites % 2 != 0 {
        return Err(Error::invalid(format!("odd site count {}", state.sites)));
    }
    if state.amplitudes.len() != 1 << state.sites {
        return Err(Error::invalid("amplitude vector does not match the site count"));
    }
    let half = 1usize << (state.sites / 2);
    // column r holds amplitudes with right-half configuration r
    let m = DMatrix::from_column_slice(half, half, &state.amplitudes);
    Ok(&m * m.transpose())
}

/// Eigenvalues of a density matrix, descending, with roundoff negatives
/// clipped to zero.
pub fn density_eigenvalues(rho: &DMatrix<f64>) -> Vec<f64> {
    let mut e: Vec<f64> = SymmetricEigen::new(rho.clone()).eigenvalues.iter().map(|x| x.max(0.0)).collect();
    e.sort_by(|a, b| b.total_cmp(a));
    e
}

pub fn renyi_entropy(rho_eigs: &[f64], alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::invalid(format!("Renyi order must be positive, got {alpha}")));
    }
    if alpha == 1.0 {
        return Err(Error::invalid("Renyi order 1 is the von Neumann entropy"));
    }
    let s: f64 = rho_eigs.iter().filter(|&&x| x > 0.0).map(|x| x.powf(alpha)).sum();
    Ok(s.ln() / (1.0 - alpha))
}

pub fn vn_entropy(rho_eigs: &[f64]) -> f64 {
    rho_eigs.iter().filter(|&&x| x > 0.0).map(|x| -x * x.ln()).sum()
}

/// `E_j = -ln λ_j` ascending, for eigenvalues above [`SPECTRUM_CUTOFF`].
pub fn entanglement_spectrum(rho_eigs: &[f64]) -> Result<Vec<f64>> {
    let mut e: Vec<f64> = rho_eigs.iter().filter(|&&x| x > SPECTRUM_CUTOFF).map(|x| -x.ln()).collect();
    if e.is_empty() {
        return Err(Error::invalid("no eigenvalue above the spectrum cutoff"));
    }
    e.sort_by(f64::total_cmp);
    Ok(e)
}

/// `(E0, ε)` of the rainbow ansatz: `E0 = Σ ln(1+q_i²)`, `ε_i = -2 gamma_i`.
pub fn single_particle_energies(profile: &QProfile) -> (f64, Vec<f64>) {
    let e0 = profile.q.iter().map(|q| ln_one_plus_q2(q.gamma())).sum();
    let eps = profile.q.iter().map(|q| -2.0 * q.gamma()).collect();
    (e0, eps)
}

/// `ln(1 + e^{2 gamma})` without overflow.
fn ln_one_plus_q2(gamma: f64) -> f64 {
    let t = 2.0 * gamma;
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Least-squares free-fermion description of an entanglement spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct FreeSpectrumFit {
    pub e0: f64,
    /// Non-negative and descending; the spectrum alone cannot fix signs.
    pub eps: Vec<f64>,
    /// Largest absolute deviation between fitted and given energies.
    pub residual: f64,
}

impl FreeSpectrumFit {
    /// Re-expresses the fit with `ε_i` negative wherever `negative[i]` is set.
    /// Flipping `ε_i -> -ε_i` while shifting `E0 -> E0 + ε_i` leaves the level
    /// set unchanged.
    pub fn with_signs(&self, negative: &[bool]) -> FreeSpectrumFit {
        let mut out = self.clone();
        for (e, &neg) in out.eps.iter_mut().zip(negative) {
            if neg {
                out.e0 += *e;
                *e = -*e;
            }
        }
        out
    }
}

/// Fits `E_j = E0 + Σ_i n_i(j) ε_i` over occupation patterns `n ∈ {0,1}^N`.
///
/// Patterns are assigned greedily (lowest unexplained level minus `E0` gives
/// the next `ε`), then `(E0, ε)` is refined by least squares.
pub fn fit_free_spectrum(spectrum: &[f64], pairs: usize) -> Result<FreeSpectrumFit> {
    if pairs == 0 || pairs >= 31 || spectrum.len() != 1 << pairs {
        return Err(Error::invalid(format!(
            "spectrum of length {} is not 2^{pairs}",
            spectrum.len()
        )));
    }
    if spectrum.iter().any(|e| !e.is_finite()) {
        return Err(Error::invalid("spectrum has non-finite entries"));
    }
    let mut levels = spectrum.to_vec();
    levels.sort_by(f64::total_cmp);
    let e0 = levels[0];

    // greedy reconstruction of the generating energies
    let mut remaining: Vec<f64> = levels[1..].to_vec();
    let mut generated = vec![0.0];
    let mut eps = Vec::with_capacity(pairs);
    for _ in 0..pairs {
        let e = remaining[0] - e0;
        let shifted: Vec<f64> = generated.iter().map(|g| g + e).collect();
        for s in &shifted {
            let target = e0 + s;
            let k = nearest(&remaining, target);
            remaining.remove(k);
        }
        generated.extend(shifted);
        eps.push(e);
    }

    // least-squares refinement against the matched pattern of each level
    let mut patterns: Vec<(usize, f64)> = (0..1usize << pairs)
        .map(|p| (p, (0..pairs).filter(|&i| p >> i & 1 == 1).map(|i| eps[i]).sum::<f64>()))
        .collect();
    patterns.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    let rows = levels.len();
    let a = DMatrix::from_fn(rows, pairs + 1, |r, c| {
        if c == 0 {
            1.0
        } else {
            (patterns[r].0 >> (c - 1) & 1) as f64
        }
    });
    let b = DVector::from_column_slice(&levels);
    let svd = a.clone().svd(true, true);
    let x = svd.solve(&b, 1e-14).map_err(|e| Error::invalid(e.to_string()))?;
    let residual = (&a * &x - &b).amax();

    let mut fit = FreeSpectrumFit { e0: x[0], eps: x.iter().skip(1).copied().collect(), residual };
    // normalize to ε >= 0, descending
    let negative: Vec<bool> = fit.eps.iter().map(|&e| e < 0.0).collect();
    fit = fit.with_signs(&negative);
    fit.eps.sort_by(|a, b| b.total_cmp(a));
    Ok(fit)
}

fn nearest(values: &[f64], target: f64) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if (v - target).abs() < (values[best] - target).abs() {
            best = i;
        }
    }
    best
}
