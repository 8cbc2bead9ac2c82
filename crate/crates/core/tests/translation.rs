mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{arb_formula, arb_frame};
use regcorr::fol::{eval_fo, simplify, st_formula, st_quasi_closed, FoEnv};
use regcorr::gen::{random_formula, GenOptions, GEN_CONOMINALS, GEN_NOMINALS};
use regcorr::semantics::{frame_at, frame_count, satisfies, AtomEnv, Frame, Model};
use regcorr::syntax::{Formula, Sym};

struct Tuple {
    frame: Frame,
    phi: Formula,
    world: usize,
    valuation: BTreeMap<Sym, u32>,
    atoms: AtomEnv,
}

fn random_tuple(rng: &mut ChaCha8Rng) -> Tuple {
    let n = rng.gen_range(1..=3);
    let frame = frame_at(n, rng.gen_range(0..frame_count(n)));
    let phi = random_formula(rng, 3, &GenOptions::expanded(3, 3));
    let mut atoms = AtomEnv::default();
    for i in GEN_NOMINALS {
        atoms.nominals.insert(Sym::from(i), rng.gen_range(0..n));
    }
    for m in GEN_CONOMINALS {
        atoms.conominals.insert(Sym::from(m), rng.gen_range(0..n));
    }
    let valuation = ["p", "q", "r"].iter().map(|p| (Sym::from(*p), rng.gen_range(0..1u32 << n))).collect();
    Tuple {
        world: rng.gen_range(0..n),
        frame,
        phi,
        valuation,
        atoms,
    }
}

fn fo_env(t: &Tuple, x: &Sym) -> FoEnv {
    let mut env = FoEnv::default();
    env.individuals.insert(x.clone(), t.world);
    env.individuals.extend(t.atoms.nominals.clone());
    env.individuals.extend(t.atoms.conominals.clone());
    env.predicates = t.valuation.clone();
    env
}

fn agree(t: &Tuple) -> bool {
    let x = Sym::from("x");
    let model = Model {
        frame: t.frame.clone(),
        valuation: t.valuation.clone(),
    };
    let modal = satisfies(&model, t.world, &t.phi, &t.atoms).unwrap();
    let st = st_formula(&t.phi, &x).unwrap();
    modal == eval_fo(&t.frame, &st, &fo_env(t, &x)).unwrap()
}

#[test]
fn translation_agrees_with_satisfaction_on_random_tuples() {
    let mut rng = ChaCha8Rng::seed_from_u64(92);
    let mismatches: Vec<String> = (0..500)
        .map(|_| random_tuple(&mut rng))
        .filter(|t| !agree(t))
        .map(|t| format!("{} at {} on {}", t.phi, t.world, t.frame))
        .collect();
    assert!(mismatches.is_empty(), "{:#?}", mismatches);
}

proptest! {
    #[test]
    fn simplification_preserves_truth(f in arb_frame(3), phi in arb_formula(true), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = random_tuple(&mut rng);
        t.world %= f.n();
        for v in t.atoms.nominals.values_mut().chain(t.atoms.conominals.values_mut()) {
            *v %= f.n();
        }
        for v in t.valuation.values_mut() {
            *v &= (1 << f.n()) - 1;
        }
        t.frame = f;
        t.phi = phi;
        let x = Sym::from("x");
        let st = st_formula(&t.phi, &x).unwrap();
        let env = fo_env(&t, &x);
        prop_assert_eq!(eval_fo(&t.frame, &st, &env).unwrap(), eval_fo(&t.frame, &simplify(&st), &env).unwrap());
        prop_assert!(agree(&t));
    }

    #[test]
    fn pure_translations_are_sentences_of_the_frame_language(l in arb_formula(true), r in arb_formula(true)) {
        let strip = |f: &Formula| f.substitute(&f.vars().into_iter().map(|p| (p, Formula::Top)).collect());
        let q = regcorr::syntax::QuasiInequality::new(
            vec![regcorr::syntax::Inequality::new(strip(&l), strip(&r))],
            regcorr::syntax::Inequality::new(strip(&r), strip(&l)),
        );
        let fo = st_quasi_closed(&q).unwrap();
        prop_assert!(fo.is_l0());
        prop_assert!(fo.is_sentence());
    }
}
