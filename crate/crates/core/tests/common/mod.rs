#![allow(dead_code)]

use proptest::prelude::*;

use regcorr::semantics::{frame_at, frame_count, Frame};
use regcorr::syntax::{Formula, Inequality, Sym};

pub fn arb_frame(max_n: usize) -> impl Strategy<Value = Frame> {
    (1..=max_n).prop_flat_map(|n| (0..frame_count(n)).prop_map(move |k| frame_at(n, k)))
}

fn arb_leaf(expanded: bool) -> BoxedStrategy<Formula> {
    let mut leaves = vec![
        Just(Formula::Top).boxed(),
        Just(Formula::Bot).boxed(),
        prop_oneof![Just("p"), Just("q"), Just("r")].prop_map(|v| Formula::Var(Sym::from(v))).boxed(),
    ];
    if expanded {
        leaves.push(prop_oneof![Just("i"), Just("j")].prop_map(|v| Formula::Nominal(Sym::from(v))).boxed());
        leaves.push(prop_oneof![Just("m"), Just("n")].prop_map(|v| Formula::Conominal(Sym::from(v))).boxed());
    }
    proptest::strategy::Union::new(leaves).boxed()
}

/// Formulas of depth at most 3 over `dia`, `box`, `neg` and the lattice
/// connectives, plus the expanded-language constructs when asked.
pub fn arb_formula(expanded: bool) -> BoxedStrategy<Formula> {
    arb_leaf(expanded)
        .prop_recursive(3, 24, 2, move |inner| {
            let mut nodes = vec![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)).boxed(),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)).boxed(),
                inner.clone().prop_map(Formula::dia).boxed(),
                inner.clone().prop_map(Formula::boxed).boxed(),
                inner.clone().prop_map(Formula::neg).boxed(),
            ];
            if expanded {
                nodes.push((inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::minus(a, b)).boxed());
                nodes.push(inner.clone().prop_map(|a| Formula::BlackBox(Sym::from("dia"), Box::new(a))).boxed());
                nodes.push(inner.clone().prop_map(|a| Formula::BlackDia(Sym::from("box"), Box::new(a))).boxed());
                nodes.push(inner.clone().prop_map(|a| Formula::BlackLeft(Sym::from("neg"), Box::new(a))).boxed());
            }
            proptest::strategy::Union::new(nodes)
        })
        .boxed()
}

pub fn arb_inequality() -> impl Strategy<Value = Inequality> {
    (arb_formula(false), arb_formula(false)).prop_map(|(l, r)| Inequality::new(l, r))
}
