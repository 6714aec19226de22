//! Statistical and numerical oracles: exact-jump simulation of composition
//! processes and urns, empirical transition estimates, and transition
//! matrices by uniformization of a truncated generator.
//!
//! Everything here runs on `f64`. Replicate `r` draws from the ChaCha8
//! stream `r` of the configured seed, so results do not depend on the
//! thread schedule.

mod empirical;
mod expm;
mod ssa;

pub use empirical::{empirical_transition, ChiSquareTest, EmpiricalDistribution, SimReport};
pub use expm::{birth_death_expm, generator_expm, ExpmMatrix, EXPM_TAIL, MAX_EXPM_STATES};
pub use ssa::{simulate_path, SimConfig};

use crate::composition::{composition_rates, CompositionProcess, UrnSpec};
use crate::mvk::Composition;
use crate::scalar::Scalar;

/// A continuous-time chain on occupancy vectors.
pub trait JumpProcess: Sync {
    /// Outgoing jumps with positive rates. Targets may lie outside the state
    /// space; [`JumpProcess::admit`] decides.
    fn jumps(&self, x: &Composition) -> Vec<(Composition, f64)>;

    /// Canonical form of `x` if it lies inside the (possibly truncated)
    /// state space.
    fn admit(&self, x: &Composition) -> Option<Composition>;

    /// Every admitted state, lexicographic order.
    fn state_space(&self) -> Vec<Composition>;
}

impl<T: Scalar> JumpProcess for CompositionProcess<T> {
    fn jumps(&self, x: &Composition) -> Vec<(Composition, f64)> {
        composition_rates(x, self.base())
            .into_iter()
            .map(|(y, r)| (y, r.to_f64()))
            .filter(|(_, r)| *r > 0.0)
            .collect()
    }

    fn admit(&self, x: &Composition) -> Option<Composition> {
        self.normalize(x).ok()
    }

    fn state_space(&self) -> Vec<Composition> {
        self.states()
    }
}

impl<T: Scalar> JumpProcess for UrnSpec<T> {
    fn jumps(&self, x: &Composition) -> Vec<(Composition, f64)> {
        self.rates(x)
            .into_iter()
            .map(|(y, r)| (y, r.to_f64()))
            .filter(|(_, r)| *r > 0.0)
            .collect()
    }

    fn admit(&self, x: &Composition) -> Option<Composition> {
        (x.len() == self.colours() && x.total() == self.balls()).then(|| x.clone())
    }

    fn state_space(&self) -> Vec<Composition> {
        self.states()
    }
}
