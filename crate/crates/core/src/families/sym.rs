//! Small helpers for writing coefficient formulas.

use std::collections::BTreeMap;

use crate::series::RadialField;
use crate::texpr::TExpr;

pub(crate) fn c(v: f64) -> TExpr {
    TExpr::constant(v)
}

/// `sum_p coeff_p * s^p` in the frame of `base`.
pub(crate) fn laurent(base: &RadialField, terms: Vec<(i32, TExpr)>) -> RadialField {
    let mut f = base.empty_like();
    for (p, e) in terms {
        f.add_term(p, 0, e);
    }
    f
}

/// Free resonant data, skipping zeros.
pub(crate) fn free(entries: &[(i32, &TExpr)]) -> BTreeMap<i32, TExpr> {
    entries
        .iter()
        .filter(|(_, e)| !e.is_zero())
        .map(|(p, e)| (*p, (*e).clone()))
        .collect()
}
