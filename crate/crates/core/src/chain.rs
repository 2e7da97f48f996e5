//! The `2N`-site Hamiltonian
//!
//! ```text
//! H = Σ_i h_i (σᶻ_{-i} - σᶻ_i)
//!   + J_1 (σˣ_{-1} σˣ_1 + σʸ_{-1} σʸ_1)
//!   + Σ_{i≥2} J_i (σˣ_{-i} σˣ_{-(i-1)} + σʸ_{-i} σʸ_{-(i-1)} + σˣ_{i-1} σˣ_i + σʸ_{i-1} σʸ_i)
//! ```
//!
//! with Pauli matrices (not spin-½ operators).
//!
//! Basis convention: sites `-N, ..., -1, 1, ..., N` map to bit positions
//! `0, ..., 2N-1`, a set bit is spin up, and the basis index of a
//! configuration is `Σ_ℓ bit_ℓ 2^ℓ`. The left half of the chain therefore
//! occupies the low `N` bits.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the full Hilbert-space dimension `2^{2N}`.
pub const DEFAULT_SIZE_CAP: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub pairs: usize,
    #[serde(rename = "J")]
    pub couplings: Vec<f64>,
    #[serde(rename = "h")]
    pub fields: Vec<f64>,
}

impl ChainSpec {
    pub fn new(couplings: Vec<f64>, fields: Vec<f64>) -> Result<Self> {
        let spec = ChainSpec { pairs: couplings.len(), couplings, fields };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs == 0 {
            return Err(Error::invalid("chain needs at least one pair"));
        }
        if self.couplings.len() != self.pairs || self.fields.len() != self.pairs {
            return Err(Error::invalid(format!(
                "expected {} couplings and fields, got {} and {}",
                self.pairs,
                self.couplings.len(),
                self.fields.len()
            )));
        }
        if let Some(i) = self.couplings.iter().position(|&j| !(j > 0.0 && j.is_finite())) {
            return Err(Error::invalid(format!(
                "coupling J_{} = {} must be positive and finite",
                i + 1,
                self.couplings[i]
            )));
        }
        if let Some(i) = self.fields.iter().position(|h| !h.is_finite()) {
            return Err(Error::invalid(format!("field h_{} is not finite", i + 1)));
        }
        Ok(())
    }

    pub fn sites(&self) -> usize {
        2 * self.pairs
    }

    pub fn dim(&self) -> usize {
        1usize << self.sites()
    }

    pub fn check_cap(&self, cap: usize) -> Result<()> {
        self.validate()?;
        if self.sites() >= usize::BITS as usize - 1 || self.dim() > cap {
            return Err(Error::SizeCap { dim: self.dim_saturating(), cap });
        }
        Ok(())
    }

    fn dim_saturating(&self) -> usize {
        1usize.checked_shl(self.sites() as u32).unwrap_or(usize::MAX)
    }

    /// Same chain with every field negated.
    pub fn with_fields_negated(&self) -> Self {
        ChainSpec { fields: self.fields.iter().map(|h| -h).collect(), ..self.clone() }
    }

    /// Nearest-neighbour bonds `(bit_a, bit_b, J)` in the linear site order.
    pub fn bonds(&self) -> Vec<(usize, usize, f64)> {
        let n = self.pairs;
        let mut bonds = Vec::with_capacity(2 * n - 1);
        bonds.push((left_bit(n, 1), right_bit(n, 1), self.couplings[0]));
        for i in 2..=n {
            let j = self.couplings[i - 1];
            bonds.push((left_bit(n, i), left_bit(n, i - 1), j));
            bonds.push((right_bit(n, i - 1), right_bit(n, i), j));
        }
        bonds
    }

    /// Diagonal matrix element `Σ_i h_i (σᶻ_{-i} - σᶻ_i)` of a basis state.
    pub fn diagonal(&self, config: usize) -> f64 {
        let n = self.pairs;
        (1..=n)
            .map(|i| self.fields[i - 1] * (sz(config, left_bit(n, i)) - sz(config, right_bit(n, i))))
            .sum()
    }
}

/// Bit position of site `-i`.
pub fn left_bit(pairs: usize, i: usize) -> usize {
    pairs - i
}

/// Bit position of site `i`.
pub fn right_bit(pairs: usize, i: usize) -> usize {
    pairs + i - 1
}

fn sz(config: usize, bit: usize) -> f64 {
    if config >> bit & 1 == 1 {
        1.0
    } else {
        -1.0
    }
}

/// Total `σᶻ` eigenvalue of a basis state on `sites` spins.
pub fn magnetization(config: usize, sites: usize) -> i32 {
    2 * config.count_ones() as i32 - sites as i32
}

/// The Hamiltonian restricted to one total-magnetization sector.
#[derive(Debug, Clone)]
pub struct SectorBlock {
    pub magnetization: i32,
    /// Sorted basis indices spanning the sector.
    pub indices: Vec<usize>,
    pub matrix: DMatrix<f64>,
}

/// Dense Hamiltonian on the full `2^{2N}` basis.
pub fn build_hamiltonian(spec: &ChainSpec, cap: usize) -> Result<DMatrix<f64>> {
    spec.check_cap(cap)?;
    let dim = spec.dim();
    let bonds = spec.bonds();
    let mut h = DMatrix::zeros(dim, dim);
    for c in 0..dim {
        h[(c, c)] = spec.diagonal(c);
        for &(a, b, j) in &bonds {
            if (c >> a & 1) != (c >> b & 1) {
                let d = c ^ (1 << a) ^ (1 << b);
                h[(d, c)] += 2.0 * j;
            }
        }
    }
    Ok(h)
}

/// All magnetization sectors in ascending magnetization order, or only the
/// requested ones when `only` is given.
pub fn build_sectors(spec: &ChainSpec, cap: usize, only: Option<&[i32]>) -> Result<Vec<SectorBlock>> {
    spec.check_cap(cap)?;
    let sites = spec.sites();
    let wanted: Vec<i32> = match only {
        Some(m) => m.to_vec(),
        None => (0..=sites).map(|k| 2 * k as i32 - sites as i32).collect(),
    };
    let bonds = spec.bonds();
    Ok(wanted.par_iter().map(|&m| build_sector(spec, &bonds, m)).collect())
}

fn build_sector(spec: &ChainSpec, bonds: &[(usize, usize, f64)], mag: i32) -> SectorBlock {
    let sites = spec.sites();
    let indices: Vec<usize> = (0..spec.dim()).filter(|&c| magnetization(c, sites) == mag).collect();
    let n = indices.len();
    let mut matrix = DMatrix::zeros(n, n);
    for (col, &c) in indices.iter().enumerate() {
        matrix[(col, col)] = spec.diagonal(c);
        for &(a, b, j) in bonds {
            if (c >> a & 1) != (c >> b & 1) {
                let d = c ^ (1 << a) ^ (1 << b);
                let row = indices.binary_search(&d).expect("hopping conserves magnetization");
                matrix[(row, col)] += 2.0 * j;
            }
        }
    }
    SectorBlock { magnetization: mag, indices, matrix }
}

/// `H ψ` without assembling the matrix.
pub fn apply_hamiltonian(spec: &ChainSpec, psi: &[f64]) -> Vec<f64> {
    assert_eq!(psi.len(), spec.dim(), "state dimension mismatch");
    let bonds = spec.bonds();
    let mut out = vec![0.0; psi.len()];
    for (c, &amp) in psi.iter().enumerate() {
        if amp == 0.0 {
            continue;
        }
        out[c] += spec.diagonal(c) * amp;
        for &(a, b, j) in &bonds {
            if (c >> a & 1) != (c >> b & 1) {
                out[c ^ (1 << a) ^ (1 << b)] += 2.0 * j * amp;
            }
        }
    }
    out
}

/// Two-site ground energy `-[2]_q J` with `sinh(gamma) = h/J`.
pub fn ground_energy_pair(j: f64, h: f64) -> Result<f64> {
    if !(j > 0.0) {
        return Err(Error::invalid(format!("J must be positive, got {j}")));
    }
    let q = crate::qalgebra::q_from_ratio(h / j)?;
    Ok(-q.two() * j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;

    fn spec(j: &[f64], h: &[f64]) -> ChainSpec {
        ChainSpec::new(j.to_vec(), h.to_vec()).unwrap()
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(ChainSpec::new(vec![], vec![]).is_err());
        assert!(ChainSpec::new(vec![1.0, -0.1], vec![0.0, 0.0]).is_err());
        assert!(ChainSpec::new(vec![1.0], vec![f64::NAN]).is_err());
        let bad = ChainSpec { pairs: 2, couplings: vec![1.0], fields: vec![0.0] };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn size_cap_is_enforced() {
        let s = spec(&[1.0; 8], &[0.0; 8]);
        assert_eq!(build_hamiltonian(&s, DEFAULT_SIZE_CAP).unwrap_err(), Error::SizeCap { dim: 1 << 16, cap: 1 << 14 });
        assert!(build_sectors(&spec(&[1.0; 3], &[0.0; 3]), 32, None).is_err());
    }

    #[test]
    fn site_layout() {
        // N = 2: sites -2,-1,1,2 on bits 0,1,2,3
        assert_eq!((left_bit(2, 2), left_bit(2, 1), right_bit(2, 1), right_bit(2, 2)), (0, 1, 2, 3));
        let s = spec(&[1.0, 0.5], &[0.0, 0.0]);
        assert_eq!(s.bonds(), vec![(1, 2, 1.0), (0, 1, 0.5), (2, 3, 0.5)]);
    }

    #[test]
    fn two_site_block() {
        let h = build_hamiltonian(&spec(&[1.0], &[1.0]), DEFAULT_SIZE_CAP).unwrap();
        // |↑↓> = site -1 up (bit 0), site 1 down: index 1; |↓↑> index 2
        assert_eq!(h[(1, 1)], 2.0);
        assert_eq!(h[(2, 2)], -2.0);
        assert_eq!(h[(1, 2)], 2.0);
        assert_eq!(h[(2, 1)], 2.0);
        assert_eq!(h[(0, 0)], 0.0);
        assert_eq!(h[(3, 3)], 0.0);
        let eig = SymmetricEigen::new(h);
        assert_abs_diff_eq!(eig.eigenvalues.min(), -2.0 * 2f64.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn two_site_xx_singlet() {
        let h = build_hamiltonian(&spec(&[1.0], &[0.0]), DEFAULT_SIZE_CAP).unwrap();
        let eig = SymmetricEigen::new(h);
        let k = eig.eigenvalues.imin();
        assert_abs_diff_eq!(eig.eigenvalues[k], -2.0, epsilon = 1e-14);
        let v = eig.eigenvectors.column(k);
        let s = v[1].signum();
        assert_abs_diff_eq!(s * v[1], 1.0 / 2f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(s * v[2], -1.0 / 2f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn pair_energy() {
        assert_eq!(ground_energy_pair(1.0, 0.0).unwrap(), -2.0);
        assert_abs_diff_eq!(ground_energy_pair(1.0, 1.0).unwrap(), -2.0 * 2f64.sqrt(), epsilon = 1e-14);
        assert_eq!(ground_energy_pair(2.0, 0.0).unwrap(), -4.0);
        assert!(ground_energy_pair(0.0, 1.0).is_err());
        for h in [-3.0, -0.2, 0.7, 4.0] {
            let m = build_hamiltonian(&spec(&[1.3], &[h]), DEFAULT_SIZE_CAP).unwrap();
            let e = SymmetricEigen::new(m).eigenvalues.min();
            assert_abs_diff_eq!(ground_energy_pair(1.3, h).unwrap(), e, epsilon = 1e-12);
        }
    }

    #[test]
    fn sectors_match_full_matrix() {
        let s = spec(&[1.0, 0.1], &[0.0, 0.0]);
        let full = build_hamiltonian(&s, DEFAULT_SIZE_CAP).unwrap();
        let sectors = build_sectors(&s, DEFAULT_SIZE_CAP, None).unwrap();
        let full_min = SymmetricEigen::new(full).eigenvalues.min();
        let block_min = sectors
            .iter()
            .map(|b| SymmetricEigen::new(b.matrix.clone()).eigenvalues.min())
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(full_min, block_min, epsilon = 1e-12);
    }

    #[test]
    fn sectors_partition_basis_and_are_symmetric() {
        let s = spec(&[1.0, 0.3, 0.05], &[0.2, -0.4, 0.01]);
        let sectors = build_sectors(&s, DEFAULT_SIZE_CAP, None).unwrap();
        assert_eq!(sectors.iter().map(|b| b.indices.len()).sum::<usize>(), s.dim());
        for b in &sectors {
            assert!((&b.matrix - b.matrix.transpose()).amax() <= 1e-14);
        }
    }

    #[test]
    fn magnetization_is_conserved() {
        let s = spec(&[1.0, 0.4, 0.2], &[0.3, -0.1, 0.7]);
        let h = build_hamiltonian(&s, DEFAULT_SIZE_CAP).unwrap();
        for r in 0..s.dim() {
            for c in 0..s.dim() {
                if magnetization(r, 6) != magnetization(c, 6) {
                    assert_eq!(h[(r, c)], 0.0);
                }
            }
        }
        assert_eq!(h, h.transpose());
    }

    #[test]
    fn spin_flip_negates_fields() {
        for n in 1..=3 {
            let j: Vec<f64> = (0..n).map(|i| 1.0 / (1.0 + i as f64)).collect();
            let h: Vec<f64> = (0..n).map(|i| 0.3 - 0.25 * i as f64).collect();
            let s = spec(&j, &h);
            let a = build_hamiltonian(&s, DEFAULT_SIZE_CAP).unwrap();
            let b = build_hamiltonian(&s.with_fields_negated(), DEFAULT_SIZE_CAP).unwrap();
            let mask = s.dim() - 1;
            for r in 0..s.dim() {
                for c in 0..s.dim() {
                    assert_eq!(a[(r ^ mask, c ^ mask)], b[(r, c)]);
                }
            }
        }
    }

    #[test]
    fn matrix_free_apply_matches_dense() {
        let s = spec(&[1.0, 0.2, 0.03], &[0.5, -0.2, 0.01]);
        let h = build_hamiltonian(&s, DEFAULT_SIZE_CAP).unwrap();
        let psi: Vec<f64> = (0..s.dim()).map(|i| ((i * 7 % 11) as f64 - 5.0) / 9.0).collect();
        let dense = &h * nalgebra::DVector::from_vec(psi.clone());
        let free = apply_hamiltonian(&s, &psi);
        for (a, b) in dense.iter().zip(&free) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
    }
}
