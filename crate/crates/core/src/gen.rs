//! Seeded random formulas and inequalities for property suites.

use std::collections::BTreeSet;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::classify::{find_certificate, Certificate};
use crate::syntax::{Formula, Inequality, Signature, Sym};

/// Shape of generated formulas.
#[derive(Clone, Debug)]
pub struct GenOptions {
    pub max_depth: usize,
    pub vars: Vec<Sym>,
    /// Also emit nominals, conominals, `-` and the black connectives.
    pub expanded: bool,
}

impl GenOptions {
    pub fn base(max_depth: usize, vars: usize) -> GenOptions {
        GenOptions {
            max_depth,
            vars: ["p", "q", "r", "s", "t"][..vars.min(5)].iter().map(|v| Sym::from(*v)).collect(),
            expanded: false,
        }
    }

    pub fn expanded(max_depth: usize, vars: usize) -> GenOptions {
        GenOptions {
            expanded: true,
            ..GenOptions::base(max_depth, vars)
        }
    }
}

/// Nominal and conominal names used by expanded generation.
pub const GEN_NOMINALS: [&str; 2] = ["i", "j"];
pub const GEN_CONOMINALS: [&str; 2] = ["m", "n"];

fn leaf(rng: &mut impl Rng, opts: &GenOptions) -> Formula {
    let roll = rng.gen_range(0..10);
    match roll {
        0 => Formula::Top,
        1 => Formula::Bot,
        2 if opts.expanded => Formula::Nominal(Sym::from(GEN_NOMINALS[rng.gen_range(0..2)])),
        3 if opts.expanded => Formula::Conominal(Sym::from(GEN_CONOMINALS[rng.gen_range(0..2)])),
        _ if opts.vars.is_empty() => Formula::Top,
        _ => Formula::Var(opts.vars[rng.gen_range(0..opts.vars.len())].clone()),
    }
}

/// A formula of depth at most `depth`.
pub fn random_formula(rng: &mut impl Rng, depth: usize, opts: &GenOptions) -> Formula {
    if depth == 0 || rng.gen_bool(0.25) {
        return leaf(rng, opts);
    }
    let d = depth - 1;
    let kinds = if opts.expanded { 11 } else { 6 };
    match rng.gen_range(0..kinds) {
        0 => Formula::and(random_formula(rng, d, opts), random_formula(rng, d, opts)),
        1 => Formula::or(random_formula(rng, d, opts), random_formula(rng, d, opts)),
        2 => Formula::imp(random_formula(rng, d, opts), random_formula(rng, d, opts)),
        3 => Formula::dia(random_formula(rng, d, opts)),
        4 => Formula::boxed(random_formula(rng, d, opts)),
        5 => Formula::neg(random_formula(rng, d, opts)),
        6 => Formula::minus(random_formula(rng, d, opts), random_formula(rng, d, opts)),
        7 => Formula::BlackBox(Sym::from("dia"), Box::new(random_formula(rng, d, opts))),
        8 => Formula::BlackDia(Sym::from("box"), Box::new(random_formula(rng, d, opts))),
        9 => Formula::BlackLeft(Sym::from("neg"), Box::new(random_formula(rng, d, opts))),
        _ => Formula::boxed(Formula::dia(random_formula(rng, d.saturating_sub(1), opts))),
    }
}

pub fn random_inequality(rng: &mut impl Rng, opts: &GenOptions) -> Inequality {
    Inequality::new(
        random_formula(rng, opts.max_depth, opts),
        random_formula(rng, opts.max_depth, opts),
    )
}

/// `count` distinct inequalities with at least one variable that admit a
/// Sahlqvist or inductive certificate, deterministic in `seed`.
pub fn inductive_corpus(seed: u64, count: usize, opts: &GenOptions, sig: &Signature) -> Vec<(Inequality, Certificate)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let ineq = random_inequality(&mut rng, opts);
        if ineq.vars().is_empty() || !seen.insert(ineq.clone()) {
            continue;
        }
        if let Ok(Some(cert)) = find_certificate(&ineq, sig) {
            out.push((ineq, cert));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_and_variables_are_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let opts = GenOptions::base(3, 2);
        for _ in 0..500 {
            let f = random_formula(&mut rng, 3, &opts);
            assert!(f.depth() <= 3);
            assert!(f.vars().iter().all(|v| &**v == "p" || &**v == "q"));
            assert!(f.check(&Signature::har(), false).is_ok());
        }
    }

    #[test]
    fn expanded_formulas_are_well_formed() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let opts = GenOptions::expanded(3, 2);
        for _ in 0..500 {
            let f = random_formula(&mut rng, 3, &opts);
            assert!(f.check(&Signature::har(), true).is_ok(), "{}", f);
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        let sig = Signature::har();
        let opts = GenOptions::base(3, 3);
        let a = inductive_corpus(3, 20, &opts, &sig);
        let b = inductive_corpus(3, 20, &opts, &sig);
        assert_eq!(a, b);
        assert!(a.iter().all(|(i, _)| !i.vars().is_empty()));
    }
}
