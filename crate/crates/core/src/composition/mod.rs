//! Composition processes: `N` independent birth-death particles seen through
//! their occupancy vector, and the `d`-colour urn.
//!
//! Occupancy states are indexed from 0. Transition probabilities are
//! available in three independent forms (multivariate Krawtchouk
//! expansion, dual spectral expansion and a product-form oracle built from
//! one-particle probabilities), which the test suites compare.

mod dual;
mod meixner_class;
mod process;
mod spectral;
mod urn;

pub use dual::{
    cal_n_statistic, dual_poly, dual_poly_gf, theorem10_degree_check, DegreeReport,
    SpectralAssignment,
};
pub use meixner_class::{
    class_argument_total, meixner_additive_poly, meixner_convolution, theorem11_identity_check,
    theorem11_sides, MeixnerClass,
};
pub use process::{composition_rates, CompositionProcess};
pub use spectral::{
    base_pi, composition_transition, dual_spectral_form, product_form_oracle, single_particle,
    CompositionTransition, Method, ORACLE_MAX_ASSIGNMENTS,
};
pub use urn::{ehrenfest_dtype, ehrenfest_two_color, urn_eigen_residual, UrnSpec};
