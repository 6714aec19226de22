//! Karlin-McGregor spectral representation of birth-death processes.
//!
//! For the named families the spectral measure and the polynomials
//! `Q_n` (scaled so that `Q_n(0) = 1`) are known in closed form; the
//! [`SpectralData::rescaling`] record states how each is obtained from a
//! classical family. Transition probabilities are computed as
//! `p_ij(t) = pi_j int e^(-zt) Q_i(z) Q_j(z) psi(dz)`, by a truncated sum
//! for the infinite discrete spectra and by Gauss-Laguerre quadrature for
//! the continuous one.

mod data;
mod eigen;
mod process;
mod quadrature;
mod transition;

pub use data::{PolyFamily, Rescaling, SpectralData, SpectrumKind};
pub use eigen::{spectral_eigenfunctions, EigenForm, EigenTable};
pub use process::{BirthDeathSpec, Family, LinearRegime};
pub use quadrature::GaussLaguerre;
pub use transition::{
    km_matrix, km_transition, pi_weights, stationary_distribution, Transition, TruncationControl,
};
