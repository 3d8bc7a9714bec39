//! Laurent-series machinery: radial and frame-bivariate fields, the
//! resonance-aware recurrence solvers, and the moving-frame time derivative.

mod eta;
mod radial;
mod zero;

use thiserror::Error;

use crate::texpr::TExpr;

pub use eta::{complex_even_part, solve_eta, solve_radial_eta, total_t_derivative, BiField, EtaPoly};
pub use radial::{double_integrate, resonant_powers, solve_radial, RadialField};
pub use zero::ZeroTest;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("resonance violation: forcing at index {index} does not vanish")]
    Resonance { index: i32, coeff: TExpr },
    #[error("resonance violation: forcing at zeta index {index} does not vanish")]
    EtaResonance { index: i32, coeff: EtaPoly },
    #[error("power {power} is not resonant for c = {c}")]
    NotResonant { power: i32, c: f64 },
    #[error("logarithmic forcing is not supported")]
    LogForcing,
    #[error("radial scale {0} is degenerate")]
    DegenerateScale(f64),
    #[error("fields live in different frames")]
    FrameMismatch,
    #[error("recurrence did not terminate; eta data must be polynomial")]
    NonTerminating,
}
