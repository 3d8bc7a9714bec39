use crate::texpr::{ParamTable, TExpr};

const PROBE_OFFSETS: [f64; 5] = [0.0, 0.137, -0.211, 0.293, 0.371];
const REL_TOL: f64 = 1e-9;

/// Decides whether a forcing coefficient vanishes identically.
///
/// Structural zeros are always accepted. With a parameter table attached, a
/// structurally nonzero coefficient also counts as zero when it evaluates to
/// zero (relative to its term magnitudes) at every probe time; this is how
/// relations such as the one defining a constrained angle are recognised.
#[derive(Clone, Copy)]
pub struct ZeroTest<'a> {
    table: Option<&'a ParamTable>,
    origin: f64,
}

impl<'a> ZeroTest<'a> {
    pub fn structural() -> ZeroTest<'static> {
        ZeroTest {
            table: None,
            origin: 0.0,
        }
    }

    pub fn numeric(table: &'a ParamTable, origin: f64) -> ZeroTest<'a> {
        ZeroTest {
            table: Some(table),
            origin,
        }
    }

    pub fn is_zero(&self, e: &TExpr) -> bool {
        if e.is_zero() {
            return true;
        }
        let Some(table) = self.table else {
            return false;
        };
        let extra = e.max_atom_order().unwrap_or(0) as usize;
        let mut probed = 0;
        for off in PROBE_OFFSETS {
            let Ok(jets) = table.jets(self.origin + off, 0, extra) else {
                continue;
            };
            let v = e.value(&jets);
            let m = e.magnitude(&jets);
            if !v.is_finite() || v.abs() > REL_TOL * m.max(f64::MIN_POSITIVE) {
                return false;
            }
            probed += 1;
        }
        probed > 0
    }
}
