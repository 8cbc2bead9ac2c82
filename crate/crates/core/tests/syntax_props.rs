mod common;

use proptest::prelude::*;

use common::arb_formula;
use regcorr::syntax::{
    child_orders, parse_formula, parse_inequality, signed_tree, Formula, Inequality, Sign, Signature, SignedNode,
};

fn check_signs(f: &Formula, t: &SignedNode, sig: &Signature) {
    let orders = child_orders(f, sig);
    for ((c, ct), o) in f.children().into_iter().zip(&t.children).zip(orders) {
        assert_eq!(ct.sign, t.sign.apply(o));
        check_signs(c, ct, sig);
    }
    if f.children().is_empty() {
        assert!(t.children.is_empty());
    }
}

proptest! {
    #[test]
    fn printing_round_trips(f in arb_formula(true)) {
        let sig = Signature::har();
        let text = f.to_string();
        prop_assert_eq!(parse_formula(&text, &sig, true).unwrap(), f);
    }

    #[test]
    fn inequalities_round_trip(l in arb_formula(false), r in arb_formula(false)) {
        let sig = Signature::har();
        let i = Inequality::new(l, r);
        prop_assert_eq!(parse_inequality(&i.to_string(), &sig, false).unwrap(), i);
    }

    #[test]
    fn signs_follow_order_types(f in arb_formula(true), neg in any::<bool>()) {
        let sig = Signature::har();
        let root = if neg { Sign::Neg } else { Sign::Pos };
        let t = signed_tree(&f, root, &sig);
        prop_assert_eq!(t.sign, root);
        check_signs(&f, &t, &sig);
    }

    #[test]
    fn base_mode_rejects_expanded_atoms(f in arb_formula(true)) {
        let sig = Signature::har();
        let expanded = !f.nominals().is_empty() || !f.conominals().is_empty();
        if expanded {
            prop_assert!(parse_formula(&f.to_string(), &sig, false).is_err());
        }
    }
}
