//! Simulation and inverse design of the q-deformed rainbow spin chain.
//!
//! A chain of `2N` spins with sites labelled `-N, ..., -1, 1, ..., N` carries
//! XX couplings `J_i` and staggered fields `h_i (σᶻ_{-i} - σᶻ_i)`. In the
//! strongly inhomogeneous regime its ground state is a product of concentric
//! q-deformed singlets, one per pair `(-i, i)`, whose deformation parameters
//! follow from a real-space renormalization recursion. This crate provides:
//!
//! * [`qalgebra`]: scalar q-deformation identities,
//! * [`chain`]: the Hamiltonian, blocked by magnetization,
//! * [`exact`]: dense ground states and fidelities,
//! * [`rg`]: the renormalization recursion, rainbow ansatz and a
//!   second-order perturbation oracle,
//! * [`entanglement`]: reduced density matrices, entropies and spectra,
//! * [`freefermion`]: the Jordan-Wigner correlation-matrix route,
//! * [`designer`]: field profiles for target entanglement spectra,
//! * [`primes`]: Moebius function, zeta normalization and prime spectra.

pub mod chain;
pub mod designer;
pub mod entanglement;
pub mod error;
pub mod exact;
pub mod freefermion;
pub mod primes;
pub mod qalgebra;
pub mod rg;

pub use chain::ChainSpec;
pub use error::{Error, Result};
pub use exact::{GroundStateResult, PureState};
pub use qalgebra::QParam;
pub use rg::QProfile;
