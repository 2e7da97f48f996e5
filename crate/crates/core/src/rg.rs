//! Real-space renormalization of the concentric chain.
//!
//! The central pair is diagonalized first; integrating it out leaves an
//! effective two-site Hamiltonian between sites `-2` and `2` with
//!
//! ```text
//! J̃_i = 4 J_i² / ([2]²_{q_{i-1}} J̃_{i-1})
//! h̃_i = h_i - 2 (q_{i-1} - 1/q_{i-1}) J_i² / ([2]²_{q_{i-1}} J̃_{i-1})
//! sinh(gamma_i) = h̃_i / J̃_i
//! ```
//!
//! and the recursion continues outwards. The central pair is never rescaled.

use nalgebra::{DMatrix, DVector, Matrix4};
use serde::{Deserialize, Serialize};

use crate::chain::{self, left_bit, right_bit, ChainSpec};
use crate::error::{Error, Result};
use crate::exact::PureState;
use crate::qalgebra::{q_from_ratio, singlet_amplitudes, QParam};

/// Threshold above which the validity ratio is considered to break the
/// strong-inhomogeneity assumption.
pub const DEFAULT_VALIDITY_THRESHOLD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QProfile {
    pub q: Vec<QParam>,
    #[serde(rename = "J_eff")]
    pub j_eff: Vec<f64>,
    #[serde(rename = "h_eff")]
    pub h_eff: Vec<f64>,
    /// `max(J_{i+1}, |h_{i+1}|) / max(J̃_i, |h̃_i|)`; zero for the outermost pair.
    pub validity_ratio: Vec<f64>,
}

impl QProfile {
    pub fn pairs(&self) -> usize {
        self.q.len()
    }

    pub fn gammas(&self) -> Vec<f64> {
        self.q.iter().map(|q| q.gamma()).collect()
    }

    /// Pair indices (1-based) whose validity ratio exceeds `threshold`.
    pub fn validity_warnings(&self, threshold: f64) -> Vec<usize> {
        self.validity_ratio
            .iter()
            .enumerate()
            .filter(|(_, &r)| r > threshold)
            .map(|(i, _)| i + 1)
            .collect()
    }

    /// Profile built directly from deformation parameters, for ansatz-only
    /// work: `J̃ = 1` and `h̃ = sinh(gamma)`.
    pub fn from_q(q: Vec<QParam>) -> Self {
        let n = q.len();
        QProfile {
            h_eff: q.iter().map(|q| q.gamma().sinh()).collect(),
            j_eff: vec![1.0; n],
            validity_ratio: vec![0.0; n],
            q,
        }
    }
}

pub fn renormalize(spec: &ChainSpec) -> Result<QProfile> {
    spec.validate()?;
    let n = spec.pairs;
    let mut q = Vec::with_capacity(n);
    let mut j_eff = Vec::with_capacity(n);
    let mut h_eff = Vec::with_capacity(n);

    j_eff.push(spec.couplings[0]);
    h_eff.push(spec.fields[0]);
    q.push(q_from_ratio(spec.fields[0] / spec.couplings[0])?);

    for i in 1..n {
        let prev = q[i - 1];
        let j = spec.couplings[i];
        // [2]_q = 2 cosh(gamma); divide in two steps so cosh² cannot overflow first
        let cosh = prev.gamma().cosh();
        let base = j / cosh * j / cosh / j_eff[i - 1];
        let jt = base;
        let ht = spec.fields[i] - prev.gamma().sinh() * base;
        if !(jt.is_finite() && ht.is_finite()) || jt <= 0.0 {
            return Err(Error::NumericRange {
                pair: i + 1,
                detail: format!("renormalized parameters J̃ = {jt:e}, h̃ = {ht:e} are out of range"),
            });
        }
        let qi = q_from_ratio(ht / jt).map_err(|_| Error::NumericRange {
            pair: i + 1,
            detail: format!("ratio h̃/J̃ = {ht:e}/{jt:e} is not finite"),
        })?;
        j_eff.push(jt);
        h_eff.push(ht);
        q.push(qi);
    }

    let validity_ratio = (0..n)
        .map(|i| {
            if i + 1 < n {
                spec.couplings[i + 1].max(spec.fields[i + 1].abs()) / j_eff[i].max(h_eff[i].abs())
            } else {
                0.0
            }
        })
        .collect();

    Ok(QProfile { q, j_eff, h_eff, validity_ratio })
}

/// Product of q-singlets, pair `i` on sites `(-i, i)`.
pub fn rainbow_state(profile: &QProfile) -> PureState {
    let n = profile.pairs();
    let sites = 2 * n;
    let amps: Vec<(f64, f64)> = profile.q.iter().map(|&q| singlet_amplitudes(q)).collect();
    let mut amplitudes = vec![0.0; 1 << sites];
    // each pair is either |↑↓> (left up) or |↓↑>; enumerate the 2^N choices
    for pattern in 0..(1usize << n) {
        let mut config = 0usize;
        let mut amp = 1.0;
        for i in 1..=n {
            let left_up = pattern >> (i - 1) & 1 == 1;
            if left_up {
                config |= 1 << left_bit(n, i);
                amp *= amps[i - 1].0;
            } else {
                config |= 1 << right_bit(n, i);
                amp *= amps[i - 1].1;
            }
        }
        amplitudes[config] = amp;
    }
    PureState { sites, amplitudes }
}

/// Outcome of the four-site second-order degenerate perturbation theory.
#[derive(Debug, Clone)]
pub struct PerturbationResult {
    /// `<m_α|V|m_β>` in the basis `{↑ψ⁻↑, ↑ψ⁻↓, ↓ψ⁻↑, ↓ψ⁻↓}` of the outer spins.
    pub first_order: Matrix4<f64>,
    /// `Σ_n <m_α|V|n><n|V|m_β> / (E₋ - E_n)` over the twelve excited states.
    pub second_order: Matrix4<f64>,
    /// `E₋ 1 + first_order + second_order`.
    pub effective: Matrix4<f64>,
    /// Identity coefficient of the effective Hamiltonian.
    pub constant: f64,
    pub j_eff: f64,
    pub h_eff: f64,
    /// Largest deviation of `effective` from the operator form
    /// `C 1 + J̃ (σˣσˣ + σʸσʸ) + h̃ (σᶻ_{-2} - σᶻ_2)`.
    pub form_error: f64,
    /// Ground energy of the effective Hamiltonian, `C - [2]_{q_2} J̃_2`.
    pub ground_energy: f64,
}

/// Numerical perturbation theory on four sites `(-2, -1, 1, 2)`, with the
/// central pair as the unperturbed Hamiltonian and the outer bonds and fields
/// as the perturbation.
pub fn perturbation_oracle_4site(j1: f64, h1: f64, j2: f64, h2: f64) -> Result<PerturbationResult> {
    if !(j1 > 0.0 && j2 > 0.0) {
        return Err(Error::invalid("couplings must be positive"));
    }
    let n = 2;
    let dim = 16;
    let central = ChainSpec { pairs: 1, couplings: vec![j1], fields: vec![h1] };
    let (b_m2, b_m1, b_p1, b_p2) = (left_bit(n, 2), left_bit(n, 1), right_bit(n, 1), right_bit(n, 2));

    // H0 acts on the central bits only; V holds the outer bonds and fields.
    let mut h0 = DMatrix::<f64>::zeros(dim, dim);
    let mut v = DMatrix::<f64>::zeros(dim, dim);
    let bit = |c: usize, b: usize| c >> b & 1;
    for c in 0..dim {
        let central_cfg = bit(c, b_m1) | bit(c, b_p1) << 1;
        h0[(c, c)] = central.diagonal(central_cfg);
        if bit(c, b_m1) != bit(c, b_p1) {
            h0[(c ^ (1 << b_m1) ^ (1 << b_p1), c)] += 2.0 * j1;
        }
        let sz = |b: usize| if bit(c, b) == 1 { 1.0 } else { -1.0 };
        v[(c, c)] = h2 * (sz(b_m2) - sz(b_p2));
        for (a, b) in [(b_m2, b_m1), (b_p1, b_p2)] {
            if bit(c, a) != bit(c, b) {
                v[(c ^ (1 << a) ^ (1 << b), c)] += 2.0 * j2;
            }
        }
    }

    let q1 = q_from_ratio(h1 / j1)?;
    let (a, b) = singlet_amplitudes(q1);
    // |ψ⁻> = a|↑↓> + b|↓↑>, |ψ⁺> = -b|↑↓> + a|↓↑> on sites (-1, 1)
    let ud = 1 << b_m1;
    let du = 1 << b_p1;
    let uu = ud | du;
    let outer = |s_m2: usize, s_p2: usize| s_m2 << b_m2 | s_p2 << b_p2;
    let state = |terms: &[(usize, f64)]| {
        let mut x = DVector::<f64>::zeros(dim);
        for &(c, w) in terms {
            x[c] += w;
        }
        x
    };
    // outer spin orderings follow (↑,↑), (↑,↓), (↓,↑), (↓,↓)
    let outers: Vec<usize> = [(1, 1), (1, 0), (0, 1), (0, 0)].iter().map(|&(l, r)| outer(l, r)).collect();
    let m: Vec<DVector<f64>> = outers.iter().map(|&o| state(&[(o | ud, a), (o | du, b)])).collect();
    let mut excited: Vec<DVector<f64>> = Vec::with_capacity(12);
    excited.extend(outers.iter().map(|&o| state(&[(o | uu, 1.0)])));
    excited.extend(outers.iter().map(|&o| state(&[(o, 1.0)])));
    excited.extend(outers.iter().map(|&o| state(&[(o | ud, -b), (o | du, a)])));

    let e_ground = (m[0].transpose() * &h0 * &m[0])[(0, 0)];
    let vm: Vec<DVector<f64>> = m.iter().map(|x| &v * x).collect();
    let mut first = Matrix4::zeros();
    let mut second = Matrix4::zeros();
    for al in 0..4 {
        for be in 0..4 {
            first[(al, be)] = m[al].dot(&vm[be]);
        }
    }
    for n_state in &excited {
        let e_n = (n_state.transpose() * &h0 * n_state)[(0, 0)];
        let denom = e_ground - e_n;
        let overlaps: Vec<f64> = vm.iter().map(|x| n_state.dot(x)).collect();
        for al in 0..4 {
            for be in 0..4 {
                second[(al, be)] += overlaps[al] * overlaps[be] / denom;
            }
        }
    }
    let effective = Matrix4::identity() * e_ground + first + second;
    let constant = effective[(0, 0)];
    let h_eff = (effective[(1, 1)] - effective[(2, 2)]) / 4.0;
    let j_eff = effective[(1, 2)] / 2.0;

    let mut model = Matrix4::identity() * constant;
    model[(1, 1)] += 2.0 * h_eff;
    model[(2, 2)] -= 2.0 * h_eff;
    model[(1, 2)] = 2.0 * j_eff;
    model[(2, 1)] = 2.0 * j_eff;
    let form_error = (effective - model).amax();

    let q2 = q_from_ratio(h_eff / j_eff)?;
    Ok(PerturbationResult {
        first_order: first,
        second_order: second,
        effective,
        constant,
        j_eff,
        h_eff,
        form_error,
        ground_energy: constant - q2.two() * j_eff,
    })
}

/// Closed-form `(J̃_2, h̃_2)` for a four-site chain.
pub fn closed_form_4site(j1: f64, h1: f64, j2: f64, h2: f64) -> Result<(f64, f64)> {
    let p = renormalize(&ChainSpec::new(vec![j1, j2], vec![h1, h2])?)?;
    Ok((p.j_eff[1], p.h_eff[1]))
}

/// Energy of the rainbow ansatz `<ψ|H|ψ>`.
pub fn ansatz_energy(spec: &ChainSpec, profile: &QProfile) -> f64 {
    let psi = rainbow_state(profile);
    let h = chain::apply_hamiltonian(spec, &psi.amplitudes);
    h.iter().zip(&psi.amplitudes).map(|(a, b)| a * b).sum()
}
