//! Product and chain rules of jets against partials computed independently.

mod common;

use common::*;
use proptest::prelude::*;

fn coeffs() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-1.0f64..1.0, 27)
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    [-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn product_rule(f in coeffs(), g in coeffs(), p in point()) {
        let r = check_product(&f, &g, p);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }

    #[test]
    fn chain_rule(g in coeffs(), p in point(), which in 0usize..3) {
        let r = check_chain(&g, p, which);
        prop_assert!(r.is_ok(), "{}", r.unwrap_err());
    }
}
