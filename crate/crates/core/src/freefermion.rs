//! Jordan-Wigner route to the entanglement of the chain.
//!
//! With `σᶻ = 2n - 1` and `σˣσˣ + σʸσʸ = 2(c†c + h.c.)` on neighbouring sites,
//! the chain becomes the quadratic form `Σ_ab T_ab c†_a c_b` with hopping `2J`
//! along the linear site order and on-site potential `+2h_i` at site `-i`,
//! `-2h_i` at site `i`. The ground state fills every negative mode.
//!
//! Sign conventions: an occupied fermion is a spin up. For a left-half
//! correlation eigenvalue `ζ` this module reports `ε = ln((1-ζ)/ζ)`, the
//! occupation convention. The rainbow convention `ε = -ln q²` labels a pair
//! by its spin-down weight, and on a single pair (`ζ = 1/(1+q²)`) the two
//! are exact negatives; [`FreeFermionResult::rainbow_energies`] applies that
//! orientation.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::chain::{left_bit, right_bit, ChainSpec};
use crate::error::Result;

/// Single-particle energies closer to zero than this count as zero modes.
pub const ZERO_MODE_TOL: f64 = 1e-12;
/// Correlation eigenvalues this close to 0 or 1 give infinite energies.
pub const SATURATION_TOL: f64 = 1e-14;

/// Tridiagonal hopping matrix indexed by linear site position
/// `(-N, ..., -1, 1, ..., N)`, which coincides with the spin bit order.
pub fn hopping_matrix(spec: &ChainSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    let n = spec.pairs;
    let mut t = DMatrix::zeros(2 * n, 2 * n);
    for i in 1..=n {
        t[(left_bit(n, i), left_bit(n, i))] = 2.0 * spec.fields[i - 1];
        t[(right_bit(n, i), right_bit(n, i))] = -2.0 * spec.fields[i - 1];
    }
    for (a, b, j) in spec.bonds() {
        t[(a, b)] = 2.0 * j;
        t[(b, a)] = 2.0 * j;
    }
    Ok(t)
}

#[derive(Debug, Clone)]
pub struct Correlation {
    /// `C_ab = <c†_a c_b>`.
    pub matrix: DMatrix<f64>,
    pub occupied: usize,
    /// Set when some single-particle energy is a zero mode; its occupation,
    /// and hence the ground state, is then ambiguous.
    pub zero_mode: bool,
    /// Many-body ground energy `Σ_occ e_k`, equal to the spin ground energy.
    pub ground_energy: f64,
}

pub fn correlation_matrix(spec: &ChainSpec) -> Result<Correlation> {
    let t = hopping_matrix(spec)?;
    let eig = SymmetricEigen::new(t);
    let dim = eig.eigenvalues.len();
    let occ: Vec<usize> = (0..dim).filter(|&k| eig.eigenvalues[k] < 0.0).collect();
    let zero_mode = eig.eigenvalues.iter().any(|e| e.abs() < ZERO_MODE_TOL);
    let mut c = DMatrix::zeros(dim, dim);
    for &k in &occ {
        let v = eig.eigenvectors.column(k);
        c += v * v.transpose();
    }
    // the -1 offsets of σᶻ = 2n - 1 cancel inside each staggered pair
    let ground_energy = occ.iter().map(|&k| eig.eigenvalues[k]).sum();
    Ok(Correlation { matrix: c, occupied: occ.len(), zero_mode, ground_energy })
}

#[derive(Debug, Clone)]
pub struct FreeFermionResult {
    /// Eigenvalues of the left-half block of `C`, ascending.
    pub zeta: Vec<f64>,
    /// `ln((1-ζ)/ζ)` per mode, sorted by magnitude; saturated modes are
    /// `±inf` and sort last.
    pub eps: Vec<f64>,
    pub zero_mode: bool,
}

impl FreeFermionResult {
    pub fn finite(&self) -> Vec<f64> {
        self.eps.iter().copied().filter(|e| e.is_finite()).collect()
    }

    pub fn infinite_count(&self) -> usize {
        self.eps.iter().filter(|e| !e.is_finite()).count()
    }

    /// Finite energies in the rainbow convention `ε = -ln q²`.
    pub fn rainbow_energies(&self) -> Vec<f64> {
        self.finite().iter().map(|e| -e).collect()
    }

    /// Von Neumann entropy `Σ -ζ ln ζ - (1-ζ) ln(1-ζ)`.
    pub fn vn_entropy(&self) -> f64 {
        self.zeta.iter().map(|&z| binary_entropy(z)).sum()
    }
}

fn binary_entropy(z: f64) -> f64 {
    let z = z.clamp(0.0, 1.0);
    let f = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    f(z) + f(1.0 - z)
}

/// Single-particle entanglement energies of the first `cut` sites.
pub fn subsystem_ent_energies(c: &DMatrix<f64>, cut: usize) -> FreeFermionResult {
    let block = c.view((0, 0), (cut, cut)).into_owned();
    let mut zeta: Vec<f64> = SymmetricEigen::new(block).eigenvalues.iter().copied().collect();
    zeta.sort_by(f64::total_cmp);
    let mut eps: Vec<f64> = zeta.iter().map(|&z| mode_energy(z)).collect();
    eps.sort_by(|a, b| a.abs().total_cmp(&b.abs()).then(a.total_cmp(b)));
    FreeFermionResult { zeta, eps, zero_mode: false }
}

/// `ln((1-ζ)/ζ)`, or `±inf` for saturated modes.
pub fn mode_energy(zeta: f64) -> f64 {
    if zeta <= SATURATION_TOL {
        f64::INFINITY
    } else if zeta >= 1.0 - SATURATION_TOL {
        f64::NEG_INFINITY
    } else {
        ((1.0 - zeta) / zeta).ln()
    }
}

/// Correlation matrix plus central-cut energies in one call.
pub fn analyze(spec: &ChainSpec) -> Result<FreeFermionResult> {
    let corr = correlation_matrix(spec)?;
    let mut r = subsystem_ent_energies(&corr.matrix, spec.pairs);
    r.zero_mode = corr.zero_mode;
    Ok(r)
}
