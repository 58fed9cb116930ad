//! Exponent fits and numerical checks of distortion estimates.

mod convexity;
mod fit;
mod lemmas;
mod report;
mod series;

pub use convexity::{check_almost_convexity, fit_convexity_constants, smallest_constant};
pub use fit::{fit_exponent, fit_points, ols, ExponentFit, FitMode, MIN_FIT_POINTS};
pub use lemmas::{
    verify_bounded_oscillation, verify_bounded_oscillation_ladder, verify_flow_identity, verify_lemma_l4,
    verify_lemma_l4_ladder, verify_lemma_pr1, verify_lemma_pr1_ladder, verify_lemma_pr2, verify_lemma_pr3, SPREAD_BOUND,
};
pub use report::{spread, LemmaReport};
pub use series::{
    hoelder_constant, hoelder_constant_of_derivative, lattice_distortion_sum, oscillating_power, verify_eq39, verify_eq741,
    verify_lemma_l6,
};
