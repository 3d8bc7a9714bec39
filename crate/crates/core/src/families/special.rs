//! Solutions built from the Weierstrass function with `P'^2 = 4(P^3 - iota)`.

use std::sync::Arc;

use super::{Coeff, EllipticTerm, Equation, Family, FamilyError, Mode, XPolySolution};
use crate::elliptic::WpEvaluator;
use crate::texpr::ParamTable;

const NORMALIZATION_TOL: f64 = 1e-12;

/// `P(sqrt(6) y) x^3` for the short-wave equation, `P(y) x^2` in 2-D and
/// `P(a y + b z) x^2` with `a^2 + b^2 = 1` in 3-D.
///
/// The short-wave solution needs `k = 2`: with `h = 0` the `x^2` balance
/// reads `(2 - k) xi = 0`.
pub fn build_elliptic(equation: Equation, iota: f64, a: f64, b: f64) -> Result<XPolySolution, FamilyError> {
    let (family, slot, a, b) = match equation {
        Equation::Shortwave { k } => {
            if k != 2.0 {
                return Err(FamilyError::Infeasible(format!(
                    "the short-wave elliptic solution needs k = 2, got k = {k}"
                )));
            }
            (Family::ShortwaveElliptic, 3, 6f64.sqrt(), 0.0)
        }
        Equation::Kz2d => (Family::Kz2dElliptic, 2, 1.0, 0.0),
        Equation::Kz3d => {
            let n = a * a + b * b - 1.0;
            if !(n.abs() <= NORMALIZATION_TOL) {
                return Err(FamilyError::Normalization(a * a + b * b));
            }
            (Family::Kz3dElliptic, 2, a, b)
        }
    };
    let wp = Arc::new(WpEvaluator::new(iota)?);
    let mut coeffs = vec![Coeff::Zero; 4];
    coeffs[slot] = Coeff::Elliptic(EllipticTerm::new(wp, a, b));
    Ok(XPolySolution::new(
        family,
        equation,
        Mode::Solver,
        ParamTable::new(),
        coeffs,
        None,
    ))
}
